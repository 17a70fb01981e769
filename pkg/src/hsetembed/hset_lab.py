"""Finite-depth generalized Cantor sets on [0, 1] carrying an h-measure.

Level j of the tree consists of dyadic intervals [m 2^-j, (m+1) 2^-j).  Each
node keeps one child (the left half) or both; the mass of a node is its
parent's mass divided by the number of children.  Child counts are chosen so
that level masses track a normalised gauge h~_j.

Text format (one line per level j = 0..J-1 after a header; a node with two
children is written ``1``, a node keeping its left half ``0``)::

    hset-tree 1 depth=J
    1
    10
    ...
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .gauge import GaugeExpr, hseq, is_measure_function
from .seqcalc import SeqExpr

HEADER = "hset-tree 1"


@dataclass(frozen=True)
class NormalizedGauge:
    values: np.ndarray  # h~_0 .. h~_J
    distortion: float  # max |log2(h~_j / (h_j / h_0))|

    @property
    def J(self) -> int:
        return self.values.size - 1


def normalize_gauge(g: Union[GaugeExpr, SeqExpr, Sequence[float]], J: int, n: int = 1) -> NormalizedGauge:
    """h~_0 = 1 and h~_j / h~_{j+1} in [1, 2^n], staying close to h_j / h_0.

    Each step clamps the next value into the admissible window around the
    previous one; the largest log2 deviation from h is reported.
    """
    if isinstance(g, GaugeExpr):
        if not is_measure_function(g).holds:
            raise ValueError(f"{g} is not a measure function")
        lh = hseq(g).log2_values(J)
    elif isinstance(g, SeqExpr):
        lh = g.log2_values(J)
    else:
        arr = np.asarray(g, dtype=float)[: J + 1]
        if arr.size < J + 1 or np.any(arr <= 0):
            raise ValueError("need J+1 positive values")
        lh = np.log2(arr)
    target = lh - lh[0]
    out = np.empty(J + 1)
    out[0] = 0.0
    for j in range(1, J + 1):
        out[j] = min(out[j - 1], max(out[j - 1] - n, target[j]))
    distortion = float(np.max(np.abs(out - target)))
    return NormalizedGauge(2.0**out, distortion)


@dataclass
class DyadicTree:
    """Nodes per level as sorted integer positions; counts[j][i] is the child count of node i at level j."""

    depth: int
    positions: List[np.ndarray]
    counts: List[np.ndarray]
    masses: List[np.ndarray]
    bound: float = 0.0  # max |log2(mass / h~)| over all nodes, when built from a gauge

    @classmethod
    def from_counts(cls, counts: Sequence[Sequence[int]]) -> "DyadicTree":
        positions = [np.zeros(1, dtype=np.int64)]
        masses = [np.ones(1)]
        cnts = []
        for j, c in enumerate(counts):
            c = np.asarray(c, dtype=np.int64)
            if c.size != positions[-1].size or np.any((c < 1) | (c > 2)):
                raise ValueError(f"level {j}: need one child count in {{1,2}} per node")
            cnts.append(c)
            pos, m = positions[-1], masses[-1]
            left = 2 * pos
            child_pos = np.concatenate([left, left[c == 2] + 1])
            child_mass = np.concatenate([m / c, (m / c)[c == 2]])
            order = np.argsort(child_pos, kind="stable")
            positions.append(child_pos[order])
            masses.append(child_mass[order])
        return cls(len(cnts), positions, cnts, masses)

    def level_size(self, j: int) -> int:
        return int(self.positions[j].size)

    def node_index(self, address: str) -> Tuple[int, int]:
        """(level, index) of the node with the given binary address."""
        if any(ch not in "01" for ch in address) or len(address) > self.depth:
            raise ValueError(f"invalid address {address!r}")
        j = len(address)
        m = int(address, 2) if address else 0
        pos = self.positions[j]
        i = int(np.searchsorted(pos, m))
        if i >= pos.size or pos[i] != m:
            raise ValueError(f"address {address!r} is not a node of the tree")
        return j, i

    def address(self, j: int, i: int) -> str:
        return format(int(self.positions[j][i]), f"0{j}b") if j else ""

    def point(self, address: str) -> float:
        """A point of the skeleton inside the node: follow first children to depth J."""
        j, _ = self.node_index(address)
        m = int(address, 2) if address else 0
        while j < self.depth:
            m = 2 * m  # the left child always exists
            j += 1
        return (m + 0.5) / 2.0**self.depth

    def leaves(self) -> List[str]:
        J = self.depth
        return [self.address(J, i) for i in range(self.level_size(J))]


def build_cantor(ht: Union[NormalizedGauge, Sequence[float]], J: Optional[int] = None) -> DyadicTree:
    """Greedy construction: a node splits when halving keeps its mass closest to the next target.

    With x = log2(mass / h~) and the step delta = log2(h~_j / h~_{j+1}) in
    [0, 1], splitting maps x to x + delta - 1 and keeping one child maps it
    to x + delta.  Splitting exactly when x + delta > 1/2 keeps x in
    [-1/2, 1/2], so the reported bound is at most 1/2.
    """
    vals = ht.values if isinstance(ht, NormalizedGauge) else np.asarray(ht, dtype=float)
    if J is None:
        J = vals.size - 1
    if vals.size < J + 1:
        raise ValueError("normalised gauge is shorter than the requested depth")
    lv = np.log2(vals[: J + 1])
    steps = lv[:-1] - lv[1:]
    if abs(lv[0]) > 1e-12 or np.any(steps < -1e-12) or np.any(steps > 1 + 1e-12):
        raise ValueError("gauge is not normalised (h~_0 = 1, ratios in [1, 2])")
    counts = []
    sizes = 1
    x = 0.0
    for j in range(J):
        split = x + steps[j] > 0.5
        counts.append(np.full(sizes, 2 if split else 1, dtype=np.int64))
        x = x + steps[j] - (1.0 if split else 0.0)
        sizes *= 2 if split else 1
    tree = DyadicTree.from_counts(counts)
    tree.bound = float(max(np.max(np.abs(np.log2(tree.masses[j]) - lv[j])) for j in range(J + 1)))
    return tree


def ball_mass(tree: DyadicTree, address: str, j: int) -> float:
    """Mass of the level-j nodes meeting [x - 2^-j, x + 2^-j], x the address's point."""
    lev, _ = tree.node_index(address)
    if j > lev or j < 0:
        raise ValueError("address must reach level j")
    x = tree.point(address)
    return _ball(tree, x, j)


def _ball(tree: DyadicTree, x: float, j: int) -> float:
    r = 2.0**-j
    pos = tree.positions[j]
    lo = pos * r
    hi = lo + r
    hit = (hi >= x - r) & (lo <= x + r)
    return float(tree.masses[j][hit].sum())


@dataclass(frozen=True)
class HCheck:
    ratio_min: float
    ratio_max: float
    ratio_median: float
    doubling_max: float
    samples: int

    @property
    def spread(self) -> float:
        return self.ratio_max / self.ratio_min


def empirical_h_check(tree: DyadicTree, g: Union[GaugeExpr, NormalizedGauge], samples: int = 1000, seed: int = 0) -> HCheck:
    """Statistics of mu(B(x, 2^-j)) / h(2^-j) and mu(B(x, 2^{1-j})) / mu(B(x, 2^-j)) over random leaves and levels."""
    rng = np.random.default_rng(seed)
    J = tree.depth
    if isinstance(g, NormalizedGauge):
        lh = np.log2(g.values)
    else:
        lh = hseq(g).log2_values(J)
    leaves = tree.positions[J]
    idx = rng.integers(0, leaves.size, size=samples)
    js = rng.integers(1, J + 1, size=samples)
    ratios, doubling = [], []
    for i, j in zip(idx, js):
        x = (float(leaves[i]) + 0.5) / 2.0**J
        m = _ball(tree, x, int(j))
        ratios.append(m / 2.0 ** lh[j])
        doubling.append(_ball(tree, x, int(j) - 1) / m)
    ratios = np.array(ratios)
    return HCheck(float(ratios.min()), float(ratios.max()), float(np.median(ratios)), float(max(doubling)), samples)


def porosity_witness(tree: DyadicTree, samples: int = 200, seed: int = 0, sub: int = 3) -> float:
    """Smallest fraction of empty level-(j+sub) intervals inside sampled balls B(x, 2^-j)."""
    rng = np.random.default_rng(seed)
    J = tree.depth
    leaves = tree.positions[J]
    worst = 1.0
    for _ in range(samples):
        j = int(rng.integers(1, J - sub + 1))
        x = (float(leaves[rng.integers(0, leaves.size)]) + 0.5) / 2.0**J
        k = j + sub
        r = 2.0**-j
        lo_cell = math.floor(max(x - r, 0.0) * 2**k)
        hi_cell = math.ceil(min(x + r, 1.0) * 2**k)
        cells = np.arange(lo_cell, hi_cell)
        occupied = np.isin(cells, tree.positions[k]).sum()
        worst = min(worst, 1.0 - occupied / cells.size)
    return worst


class Rearrangement:
    """Right-continuous non-increasing f*(t) = inf{s : mu(|f| > s) <= t}."""

    def __init__(self, values: np.ndarray, masses: np.ndarray):
        order = np.argsort(-values, kind="stable")
        v, m = values[order], masses[order]
        keep = m > 0
        self.values = v[keep]
        self.cum = np.cumsum(m[keep])

    def __call__(self, t: float) -> float:
        i = int(np.searchsorted(self.cum, t, side="right"))
        return float(self.values[i]) if i < self.values.size else 0.0

    def distribution(self, s: float) -> float:
        """mu(|f| > s) recovered from the rearrangement."""
        i = int(np.searchsorted(-self.values, -s, side="left"))
        return float(self.cum[i - 1]) if i > 0 else 0.0


def rearrange(tree: DyadicTree, level_values: Union[np.ndarray, Dict[str, float]]) -> Rearrangement:
    """Rearrangement of a function constant on the depth-J nodes."""
    J = tree.depth
    if isinstance(level_values, dict):
        vals = np.zeros(tree.level_size(J))
        for addr, v in level_values.items():
            _, i = tree.node_index(addr)
            vals[i] = v
    else:
        vals = np.asarray(level_values, dtype=float)
        if vals.size != tree.level_size(J):
            raise ValueError("need one value per depth-J node")
    if not np.all(np.isfinite(vals)):
        raise ValueError("values must be finite")
    return Rearrangement(np.abs(vals), tree.masses[J])


def bump(y: np.ndarray, c1: float = 1.0, c3: float = 1.5) -> np.ndarray:
    """1 on |y| <= c1, 0 on |y| >= c3, linear in between."""
    a = np.abs(y)
    return np.clip((c3 - a) / (c3 - c1), 0.0, 1.0)


def gbT_values(
    tree: DyadicTree,
    b: Sequence[float],
    sigma: SeqExpr,
    gauge: GaugeExpr,
    p1,
    iota0: int,
    T: int,
    x0: Optional[float] = None,
) -> np.ndarray:
    """g(x) = sum_{r<=T} b_r sigma_{r iota0}^-1 h_{r iota0}^{-1/p1} phi(2^{r iota0}(x - x0)) at depth-J node centres."""
    J = tree.depth
    x = (tree.positions[J].astype(float) + 0.5) / 2.0**J
    if x0 is None:
        x0 = float(x[0])
    h = hseq(gauge)
    out = np.zeros_like(x)
    for r in range(1, T + 1):
        k = r * iota0
        coef = b[r - 1] * 2.0 ** (-sigma.log2_value(k) - h.log2_value(k) / float(p1))
        out += coef * bump(2.0**k * (x - x0))
    return out


def dumps(tree: DyadicTree) -> str:
    lines = [f"{HEADER} depth={tree.depth}"]
    for c in tree.counts:
        lines.append("".join("1" if v == 2 else "0" for v in c))
    return "\n".join(lines) + "\n"


def loads(text: str) -> DyadicTree:
    lines = [ln.strip() for ln in text.strip().splitlines()]
    if not lines or not lines[0].startswith(HEADER):
        raise ValueError("missing tree header")
    try:
        depth = int(lines[0].split("depth=")[1])
    except (IndexError, ValueError):
        raise ValueError("malformed tree header") from None
    body = lines[1:]
    if len(body) != depth:
        raise ValueError(f"expected {depth} level lines, got {len(body)}")
    counts = []
    for j, ln in enumerate(body):
        if any(ch not in "01" for ch in ln):
            raise ValueError(f"level {j}: only 0/1 allowed")
        counts.append([2 if ch == "1" else 1 for ch in ln])
    return DyadicTree.from_counts(counts)
