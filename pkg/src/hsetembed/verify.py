"""Seeded consistency suites: symbolic verdicts against numerical oracles.

Each suite returns a :class:`SuiteResult` listing the cases that disagree,
so that the command line and the tests share one implementation.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List

import numpy as np

from .embed_rn import SpaceRn, embed_besov_rn, rn_alpha
from .gauge import dset
from .oracle import landau_witness, log2_diag_opnorm_exact, log2_diag_opnorm_search, partial_sum_membership
from .seqcalc import INF, SeqExpr, dual_exponent, paren, pos, q_star, recip
from .trace_gamma import SpaceGamma, embed_gamma_gamma, trace_exists
from .verdict import Status

RN_LEVELS = (64, 128, 256, 512)
S_GRID = (Fraction(3, 10), Fraction(1, 2), Fraction(1))
P_GRID = (Fraction(1, 2), Fraction(1), Fraction(2), Fraction(4))
Q_GRID = (Fraction(1, 2), Fraction(1), Fraction(2), INF)


@dataclass
class SuiteResult:
    case: str
    total: int = 0
    consistent: int = 0
    failures: List[dict] = field(default_factory=list)

    def record(self, ok: bool, detail: dict) -> None:
        self.total += 1
        if ok:
            self.consistent += 1
        else:
            self.failures.append(detail)

    @property
    def ok(self) -> bool:
        return self.total > 0 and self.consistent == self.total

    def summary(self) -> dict:
        return {
            "case": self.case,
            "total": self.total,
            "consistent": self.consistent,
            "failures": self.failures[:10],
        }


# ---------------------------------------------------------------------------
# R^n embeddings against truncated diagonal operator norms


def random_rn_case(rng: np.random.Generator) -> tuple:
    """A random pair of spaces with p1 <= p2 whose oracle behaviour is decisive at J <= 512.

    The multiplier alpha has rate 0 or |rate| >= 1; with rate 0 and a finite
    q* only divergent polylog exponents are drawn, because convergent
    polynomial tails are too slow to pass a 1e-6 Cauchy test at J = 512.
    """
    i, k = sorted(rng.integers(0, len(P_GRID), size=2))
    p1, p2 = P_GRID[i], P_GRID[k]
    q1, q2 = (Q_GRID[j] for j in rng.integers(0, len(Q_GRID), size=2))
    qs = q_star(q1, q2)
    rate = Fraction(int(rng.choice([-2, -1, 0, 0, 0, 1, 2])))
    s1 = S_GRID[int(rng.integers(0, len(S_GRID)))]
    s2 = rate + s1 - (1 / p1 - 1 / p2)
    halves = [Fraction(m, 2) for m in range(-4, 5)]
    b1 = halves[int(rng.integers(0, len(halves)))]
    choices = halves
    if rate == 0 and qs != INF:
        choices = [b for b in halves if (b - b1) * qs >= -1]
    b2 = choices[int(rng.integers(0, len(choices)))]
    src = SpaceRn(SeqExpr(rate=s1, polylog=b1), p1, q1)
    tgt = SpaceRn(SeqExpr(rate=s2, polylog=b2), p2, q2)
    return src, tgt


def rn_oracle_check(src: SpaceRn, tgt: SpaceRn, seed: int = 0) -> dict:
    v = embed_besov_rn(src, tgt)
    alpha = rn_alpha(src, tgt)
    # log2 norms: rates up to 2 overflow doubles at J = 512
    norms = [log2_diag_opnorm_exact(alpha, src.q, tgt.q, J) for J in RN_LEVELS]
    incr = [1.0 - 2.0 ** (a - b) for a, b in zip(norms, norms[1:])]
    cauchy = max(incr) < 1e-6
    grows = norms[-1] - norms[0] >= math.log2(1.05)
    search = log2_diag_opnorm_search(alpha, src.q, tgt.q, RN_LEVELS[-1], trials=16, seed=seed)
    gap = norms[-1] - search  # log2(exact / search)
    search_ok = -1e-12 <= gap <= -math.log2(1 - 1e-6)
    if v.holds:
        ok = cauchy
    else:
        ok = grows and not cauchy
    return {
        "status": v.status.value,
        "alpha": str(alpha),
        "log2_norms": norms,
        "cauchy": cauchy,
        "grows": grows,
        "search_ok": search_ok,
        "ok": ok and search_ok,
    }


def suite_rn_random(seed: int = 0, n: int = 200) -> SuiteResult:
    rng = np.random.default_rng(seed)
    res = SuiteResult("rn-random")
    for i in range(n):
        src, tgt = random_rn_case(rng)
        out = rn_oracle_check(src, tgt, seed=seed + i)
        res.record(out["ok"], out)
    return res


# ---------------------------------------------------------------------------
# R^n truth table for classical smoothness


def classical_rule(s1, p1, q1, s2, p2, q2, n: int = 1) -> bool:
    delta = s1 - n / p1 - (s2 - n / p2)
    if p1 > p2:
        return False
    return delta > 0 or (delta == 0 and recip(q1) >= recip(q2))


def rn_grid():
    for s1, s2 in itertools.product(S_GRID, repeat=2):
        for p1, p2 in itertools.product(P_GRID, repeat=2):
            for q1, q2 in itertools.product(Q_GRID, repeat=2):
                yield s1, p1, q1, s2, p2, q2


def suite_rn_table() -> SuiteResult:
    res = SuiteResult("rn-table")
    for s1, p1, q1, s2, p2, q2 in rn_grid():
        v = embed_besov_rn(SpaceRn(paren(s1), p1, q1), SpaceRn(paren(s2), p2, q2))
        want = classical_rule(s1, p1, q1, s2, p2, q2)
        res.record(v.holds == want, {"cell": [str(x) for x in (s1, p1, q1, s2, p2, q2)], "status": v.status.value})
    return res


# ---------------------------------------------------------------------------
# Gamma-to-Gamma embeddings on d-sets

GAMMA_D = (Fraction(1, 2), Fraction(9, 10))
GAMMA_Q = (Fraction(1, 2), Fraction(1), Fraction(2))


def gamma_dset_cells():
    """(d, s, p1, q1, t, p2, q2, expected) for the d-set table.

    p1 <= p2 cells satisfy 0 < t < d/p2 and t > d(1/p2-1)_+ and expect the
    criterion s - t >= d(1/p1-1/p2) (strict when q1 > q2).  p1 > p2 cells
    keep those where the sufficient condition fails while the necessary one
    holds; they expect Inconclusive.
    """
    for d in GAMMA_D:
        for s, t in itertools.product(S_GRID, repeat=2):
            for p1, p2 in itertools.product(P_GRID, repeat=2):
                if not (0 < t < d / p2 and t > d * pos(1 / p2 - 1)):
                    continue
                for q1, q2 in itertools.product(GAMMA_Q, repeat=2):
                    gap = s - t - d * (1 / p1 - 1 / p2)
                    if p1 <= p2:
                        want = Status.of(gap >= 0 if q1 <= q2 else gap > 0)
                    else:
                        finite = q1 > q2
                        suff = (t - s < 0) or (t - s == 0 and not finite)
                        nec = gap > 0 or (gap == 0 and not finite)
                        if suff or not nec:
                            continue
                        want = Status.INCONCLUSIVE
                    yield d, s, p1, q1, t, p2, q2, want


def suite_gamma_dset() -> SuiteResult:
    res = SuiteResult("gamma-dset")
    for d, s, p1, q1, t, p2, q2, want in gamma_dset_cells():
        g = dset(d)
        v = embed_gamma_gamma(SpaceGamma(paren(s), p1, q1, g), SpaceGamma(paren(t), p2, q2, g))
        res.record(v.status is want, {"cell": [str(x) for x in (d, s, p1, q1, t, p2, q2)], "status": v.status.value, "want": want.value})
    return res


# ---------------------------------------------------------------------------
# trace existence against partial-sum divergence tests


def trace_rule_exponent(p: Fraction, q: Fraction):
    """Exponent u with sigma^-1 in l_u deciding existence."""
    if p >= 1 or q <= p:
        return dual_exponent(q)
    return 1 / (1 / p - 1 / q)


def trace_boundary_cells(n: int = 50, seed: int = 0):
    """Cells (p, q, b) with sigma = (1+j)^b placed just off the boundary b u = 1."""
    rng = np.random.default_rng(seed)
    ps = (Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), Fraction(1), Fraction(3, 2), Fraction(2), Fraction(4))
    qs = (Fraction(1, 3), Fraction(1, 2), Fraction(2, 3), Fraction(1), Fraction(3, 2), Fraction(2), Fraction(3), Fraction(5))
    out = []
    while len(out) < n:
        p = ps[int(rng.integers(0, len(ps)))]
        q = qs[int(rng.integers(0, len(qs)))]
        u = trace_rule_exponent(p, q)
        eps = Fraction(int(rng.integers(1, 4)), 20) * (1 if rng.random() < 0.5 else -1)
        if u == INF:
            b = eps  # sigma^-1 = (1+j)^{-b} bounded iff b >= 0
        else:
            b = (1 + eps) / u
        out.append((p, q, b))
    return out


def suite_trace_table(seed: int = 0, n: int = 50, N: int = 10**6) -> SuiteResult:
    res = SuiteResult("trace-table")
    g = dset(Fraction(1, 2))
    for p, q, b in trace_boundary_cells(n, seed):
        sigma = SeqExpr(polylog=b)
        v = trace_exists(SpaceGamma(sigma, p, q, g))
        u = trace_rule_exponent(p, q)
        inv = sigma.inverse()
        oracle = partial_sum_membership(inv.log2_values, u, N)
        res.record(v.status is Status.of(oracle), {"cell": [str(p), str(q), str(b)], "status": v.status.value, "oracle_in": oracle})
    return res


def suite_trace_positive_rate() -> SuiteResult:
    """sigma with a > 0 gives an existing trace space for every (p, q)."""
    res = SuiteResult("trace-positive-rate")
    g = dset(Fraction(1, 2))
    for a in (Fraction(1, 10), Fraction(1, 2), Fraction(2)):
        for b in (Fraction(-3), Fraction(0), Fraction(3)):
            for p, q in itertools.product(P_GRID, Q_GRID[:3]):
                v = trace_exists(SpaceGamma(SeqExpr(rate=a, polylog=b), p, q, g))
                res.record(v.holds, {"cell": [str(a), str(b), str(p), str(q)], "status": v.status.value})
    return res


# ---------------------------------------------------------------------------
# Landau witness


def suite_landau(n: int = 1000) -> SuiteResult:
    res = SuiteResult("landau")
    w = landau_witness(SeqExpr(polylog=Fraction(1, 2)), 1, T=n)
    slack = w.exact_slack()
    prod = w.product_norms(1)
    for T in range(1, n + 1):
        want = T * (T + 1) / 2
        ok = slack[T - 1] > 0 and abs(prod[T - 1] - want) <= 1e-9 * want
        res.record(ok, {"T": T, "product": float(prod[T - 1])})
    return res


SUITES: Dict[str, Callable[..., SuiteResult]] = {
    "rn-random": lambda seed, n: suite_rn_random(seed, n),
    "rn-table": lambda seed, n: suite_rn_table(),
    "gamma-dset": lambda seed, n: suite_gamma_dset(),
    "trace-table": lambda seed, n: suite_trace_table(seed, n),
    "landau": lambda seed, n: suite_landau(n),
}

DEFAULT_COUNTS = {"rn-random": 200, "rn-table": 0, "gamma-dset": 0, "trace-table": 50, "landau": 1000}


def run_suite(case: str, seed: int = 0, n=None) -> SuiteResult:
    if case not in SUITES:
        raise ValueError(f"unknown case {case!r}; choose from {', '.join(SUITES)}")
    return SUITES[case](seed, DEFAULT_COUNTS[case] if n is None else n)
