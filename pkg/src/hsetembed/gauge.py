"""Gauge functions h(r) = C r^d (1 + |log2 r|)^beta and the geometry they induce."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .seqcalc import Number, SeqExpr, exact, indices
from .verdict import Status, Verdict, verdict


class NotAGaugeError(ValueError):
    """Raised when h is not positive, non-decreasing and vanishing at 0."""


@dataclass(frozen=True)
class GaugeExpr:
    scale: float = 1.0
    d: Fraction = Fraction(0)
    beta: Fraction = Fraction(0)
    n: int = 1

    def __post_init__(self):
        scale = float(self.scale)
        if not (scale > 0 and math.isfinite(scale)):
            raise ValueError("gauge scale must be positive")
        d, beta = exact(self.d), exact(self.beta)
        if int(self.n) != self.n or self.n < 1:
            raise ValueError("ambient dimension must be a positive integer")
        if d < 0:
            raise ValueError(f"gauge exponent d must be nonnegative, got {d}")
        if d > self.n:
            raise ValueError(f"d={d} exceeds the ambient dimension n={self.n}: no h-set exists")
        object.__setattr__(self, "scale", scale)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "n", int(self.n))

    def __call__(self, r: float) -> float:
        if not 0 < r <= 1:
            raise ValueError("gauge is defined on (0, 1]")
        L = abs(math.log2(r))
        if L == int(L):
            # dyadic r: d * log2(r) is formed exactly before rounding
            rd = 2.0 ** float(-self.d * int(L))
        else:
            rd = r ** float(self.d)
        return self.scale * rd * (1.0 + L) ** float(self.beta)

    def values(self, J: int) -> np.ndarray:
        return hseq(self).values(J)

    def __str__(self) -> str:
        from .dsl import format_gauge

        return format_gauge(self)


def dset(d: Number, n: int = 1) -> GaugeExpr:
    return GaugeExpr(d=exact(d), n=n)


def in_H(g: GaugeExpr) -> bool:
    return g.d > 0 or (g.d == 0 and g.beta < 0)


def _require_H(g: GaugeExpr) -> None:
    if not in_H(g):
        raise NotAGaugeError(f"{g} does not tend to 0 at the origin")


def hseq(g: GaugeExpr) -> SeqExpr:
    """h_j = h(2^-j) as a family member."""
    _require_H(g)
    return SeqExpr(scale=g.scale, rate=-g.d, polylog=g.beta)


def is_measure_function(g: GaugeExpr) -> Verdict:
    """h_{j+k}/h_j >= c 2^{-kn}: true for d<n, and for d=n exactly when beta >= 0."""
    _require_H(g)
    ok = g.d < g.n or g.beta >= 0
    return verdict(
        Status.of(ok),
        "measure-function criterion: h_{j+k}/h_j >= c 2^{-kn} uniformly",
        notes=(f"d={g.d}, n={g.n}, beta={g.beta}",),
    )


def porosity(g: GaugeExpr) -> Verdict:
    """Porosity of the h-sets for h: some eps>0 with h_{j+k}/h_j >= c 2^{-(n-eps)k}; here d < n."""
    if not is_measure_function(g).holds:
        raise ValueError(f"{g} is not a measure function")
    return verdict(
        Status.of(g.d < g.n),
        "porosity criterion: h_{j+k}/h_j >= c 2^{-(n-eps)k} for some eps>0",
    )


def strong_isotropy(g: GaugeExpr) -> Verdict:
    """Some k with 2 h_{j+k} <= h_j for all large j; for the family this means d > 0."""
    _require_H(g)
    return verdict(Status.of(g.d > 0), "strong isotropy: 2 h_{j+k} <= h_j for some fixed k")


def isotropy_level(g: GaugeExpr, jmax: int = 1000, kmax: int = 100000) -> Optional[int]:
    """Smallest k with 2 h_{j+k} <= h_j for all j <= jmax, or None if none up to kmax."""
    _require_H(g)
    if g.d == 0:
        return None
    d, beta = float(g.d), float(g.beta)
    j = np.arange(jmax + 1, dtype=float)

    def ok(k):
        # log2(h_{j+k}/h_j) = -dk + beta log2((1+j+k)/(1+j))
        return np.all(-d * k + beta * np.log2((1 + j + k) / (1 + j)) <= -1 + 1e-12)

    k = max(1, math.floor(1 / d) - 1)
    while not ok(k):
        k += 1
        if k > kmax:
            return None
    while k > 1 and ok(k - 1):
        k -= 1
    return k


@dataclass(frozen=True)
class HIndexConditions:
    upind_h: Fraction
    lowind_h: Fraction
    T1: bool


def h_index_conditions(g: GaugeExpr) -> HIndexConditions:
    idx = indices(hseq(g))
    lower, upper = exact(idx.lower), exact(idx.upper)
    return HIndexConditions(upind_h=upper, lowind_h=lower, T1=bool(-g.n <= lower and upper < 0))


@dataclass(frozen=True)
class IsotropySums:
    """Ratios S1(l) = sum_{j=l}^J h_j / h_l and S2(m) = h_m sum_{j<=m} 1/h_j."""

    J: int
    upper_min: float
    upper_max: float
    lower_min: float
    lower_max: float

    @property
    def bound(self) -> float:
        return max(self.upper_max, self.lower_max)


def numeric_strong_isotropy_equivalences(g: GaugeExpr, J: int) -> IsotropySums:
    lh = hseq(g).log2_values(J)
    h = np.exp2(lh - lh.max())  # common factor cancels in every ratio
    tail = np.cumsum(h[::-1])[::-1]
    s1 = tail / h
    head = np.cumsum(1.0 / h)
    s2 = head * h
    return IsotropySums(J, float(s1.min()), float(s1.max()), float(s2.min()), float(s2.max()))
