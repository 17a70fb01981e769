"""Structured admissible sequences and their l_q membership.

A sequence of the family is

    sigma_j = C * 2**(a*j) * (1+j)**b * ln(e+j)**c ,   j = 0, 1, 2, ...

optionally with the first few terms overridden by a finite prefix.  The tail
parameters ``a, b, c`` are stored as exact rationals so that the membership
rules below never suffer from round-off at the critical boundaries (for
instance ``s1 - n/p1 - s2 + n/p2 == 0``).  The scale and the prefix only
affect finitely many terms, or a constant factor, so they stay floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from numbers import Rational
from typing import Sequence, Tuple, Union

import numpy as np

INF = math.inf

Number = Union[int, float, Fraction, str]
Exponent = Union[Fraction, float]  # Fraction, or math.inf


def exact(x: Number) -> Fraction:
    """Convert a finite number to an exact rational.

    Floats are read through their shortest decimal representation, so
    ``exact(0.3) == Fraction(3, 10)``.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("boolean is not a number")
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if not math.isfinite(x):
            raise ValueError(f"expected a finite number, got {x}")
        return Fraction(repr(x))
    raise TypeError(f"cannot convert {x!r} to an exact number")


def exponent(q: Number) -> Exponent:
    """Normalise an extended exponent in (0, inf]; infinity stays ``math.inf``."""
    if isinstance(q, str) and q.strip().lower() in ("inf", "infinity", "oo", "∞"):
        return INF
    if isinstance(q, (float, np.floating)) and math.isinf(q):
        if q < 0:
            raise ValueError("exponent must be positive")
        return INF
    e = exact(q)
    if e <= 0:
        raise ValueError(f"exponent must be positive, got {q}")
    return e


def recip(q: Exponent) -> Fraction:
    """1/q with 1/inf = 0."""
    return Fraction(0) if q == INF else 1 / Fraction(q)


def from_recip(r: Fraction) -> Exponent:
    """Inverse of :func:`recip`: r = 0 gives infinity."""
    if r < 0:
        raise ValueError("reciprocal exponent must be nonnegative")
    return INF if r == 0 else 1 / r


def pos(x: Fraction) -> Fraction:
    return x if x > 0 else Fraction(0)


def dual_exponent(q: Number) -> Exponent:
    """q' with 1/q' = (1 - 1/q)_+ ; in particular q' = inf for q <= 1."""
    q = exponent(q)
    return from_recip(pos(1 - recip(q)))


def q_star(q1: Number, q2: Number) -> Exponent:
    """q* with 1/q* = (1/q2 - 1/q1)_+ ."""
    q1, q2 = exponent(q1), exponent(q2)
    return from_recip(pos(recip(q2) - recip(q1)))


def format_exponent(q: Exponent) -> str:
    return "inf" if q == INF else format_number(q)


def format_number(x: Fraction) -> str:
    """Exact text for a rational: a terminating decimal when one exists."""
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    d = x.denominator
    twos = fives = 0
    while d % 2 == 0:
        d //= 2
        twos += 1
    while d % 5 == 0:
        d //= 5
        fives += 1
    if d != 1:
        return f"{x.numerator}/{x.denominator}"
    digits = max(twos, fives)
    scaled = abs(x) * 10**digits
    assert scaled.denominator == 1
    s = str(scaled.numerator).rjust(digits + 1, "0")
    s = s[:-digits] + "." + s[-digits:]
    return ("-" if x < 0 else "") + s


@dataclass(frozen=True)
class SeqExpr:
    """sigma_j = scale * 2^(rate j) * (1+j)^polylog * ln(e+j)^loglog, with a prefix override."""

    scale: float = 1.0
    rate: Fraction = Fraction(0)
    polylog: Fraction = Fraction(0)
    loglog: Fraction = Fraction(0)
    prefix: Tuple[float, ...] = field(default=())

    def __post_init__(self):
        scale = float(self.scale)
        if not (scale > 0 and math.isfinite(scale)):
            raise ValueError(f"scale must be positive and finite, got {self.scale}")
        prefix = tuple(float(v) for v in self.prefix)
        if any(not (v > 0 and math.isfinite(v)) for v in prefix):
            raise ValueError("prefix entries must be positive and finite")
        object.__setattr__(self, "scale", scale)
        object.__setattr__(self, "rate", exact(self.rate))
        object.__setattr__(self, "polylog", exact(self.polylog))
        object.__setattr__(self, "loglog", exact(self.loglog))
        object.__setattr__(self, "prefix", prefix)

    @property
    def tail(self) -> Tuple[Fraction, Fraction, Fraction]:
        return (self.rate, self.polylog, self.loglog)

    def formula_log2(self, j: int) -> float:
        """log2 of the closed-form term, ignoring the prefix; j may be a huge int."""
        out = math.log2(self.scale)
        if self.rate:
            out += float(self.rate * j)
        if self.polylog:
            out += float(self.polylog) * math.log2(1 + j)
        if self.loglog:
            out += float(self.loglog) * math.log2(_ln_e_plus(j))
        return out

    def log2_value(self, j: int) -> float:
        if j < 0:
            raise ValueError("index must be nonnegative")
        if j < len(self.prefix):
            return math.log2(self.prefix[j])
        return self.formula_log2(j)

    def value(self, j: int) -> float:
        if j < 0:
            raise ValueError("index must be nonnegative")
        if j < len(self.prefix):
            return self.prefix[j]
        v = self.scale
        if self.rate:
            v *= 2.0 ** float(self.rate * j)
        if self.polylog:
            v *= (1.0 + j) ** float(self.polylog)
        if self.loglog:
            v *= _ln_e_plus(j) ** float(self.loglog)
        return v

    def log2_values(self, J: int) -> np.ndarray:
        """log2 sigma_j for j = 0..J as a float array."""
        j = np.arange(J + 1, dtype=float)
        out = np.full(J + 1, math.log2(self.scale))
        if self.rate:
            out += float(self.rate) * j
        if self.polylog:
            out += float(self.polylog) * np.log2(1.0 + j)
        if self.loglog:
            out += float(self.loglog) * np.log2(np.log(math.e + j))
        m = min(len(self.prefix), J + 1)
        if m:
            out[:m] = np.log2(self.prefix[:m])
        return out

    def values(self, J: int) -> np.ndarray:
        return np.exp2(self.log2_values(J))

    def __mul__(self, other: "SeqExpr") -> "SeqExpr":
        return mul(self, other)

    def __truediv__(self, other: "SeqExpr") -> "SeqExpr":
        return mul(self, pow(other, -1))

    def __pow__(self, r) -> "SeqExpr":
        return pow(self, r)

    def inverse(self) -> "SeqExpr":
        return pow(self, -1)

    def __str__(self) -> str:
        from .dsl import format_seq

        return format_seq(self)


def _ln_e_plus(j: int) -> float:
    if j < 1e300:
        return math.log(math.e + j)
    return math.log(j)  # e/j is far below double precision here


def eval(seq: SeqExpr, j: int) -> float:  # noqa: A001 - name mirrors the math
    return seq.value(j)


def paren(a: Number) -> SeqExpr:
    """The sequence (2^{ja})_j."""
    return SeqExpr(rate=exact(a))


def constant(C: float = 1.0) -> SeqExpr:
    return SeqExpr(scale=C)


def mul(*seqs: SeqExpr) -> SeqExpr:
    """Termwise product; prefixes are multiplied where either one is present."""
    if not seqs:
        return SeqExpr()
    out = seqs[0]
    for s in seqs[1:]:
        out = _mul2(out, s)
    return out


def _mul2(s1: SeqExpr, s2: SeqExpr) -> SeqExpr:
    m = max(len(s1.prefix), len(s2.prefix))
    prefix = tuple(s1.value(j) * s2.value(j) for j in range(m))
    return SeqExpr(
        scale=s1.scale * s2.scale,
        rate=s1.rate + s2.rate,
        polylog=s1.polylog + s2.polylog,
        loglog=s1.loglog + s2.loglog,
        prefix=prefix,
    )


def pow(s: SeqExpr, r: Number) -> SeqExpr:  # noqa: A001
    r = exact(r)
    fr = float(r)
    return SeqExpr(
        scale=s.scale**fr,
        rate=s.rate * r,
        polylog=s.polylog * r,
        loglog=s.loglog * r,
        prefix=tuple(v**fr for v in s.prefix),
    )


def subsequence(s: SeqExpr, iota0: int) -> SeqExpr:
    """Family member tail-equivalent to (sigma_{k iota0})_k.

    (1 + k iota0) / (iota0 (1+k)) and ln(e + k iota0) / ln(e + k) both tend
    to 1, so only the rate and the scale change.
    """
    if iota0 < 1:
        raise ValueError("iota0 must be a positive integer")
    return SeqExpr(
        scale=s.scale * float(iota0) ** float(s.polylog),
        rate=s.rate * iota0,
        polylog=s.polylog,
        loglog=s.loglog,
    )


@dataclass(frozen=True)
class IndexPair:
    lower: float
    upper: float

    def __post_init__(self):
        if self.lower > self.upper:
            raise ValueError("lower index exceeds upper index")


def indices(seq: SeqExpr) -> IndexPair:
    """Regularity indices (lower, upper); both equal the rate for the family."""
    return IndexPair(seq.rate, seq.rate)


def boyd_indices(seq: SeqExpr) -> IndexPair:
    """Boyd indices (beta, alpha); they coincide with the rate for the family."""
    return IndexPair(seq.rate, seq.rate)


def numeric_boyd(seq: SeqExpr, j: int, shifts: int = 2000) -> IndexPair:
    """(1/j) log2 of inf_k resp. sup_k sigma_{j+k}/sigma_k over k < shifts."""
    lv = seq.log2_values(j + shifts)
    diff = lv[j : j + shifts] - lv[:shifts]
    return IndexPair(float(diff.min()) / j, float(diff.max()) / j)


class Membership(str, Enum):
    IN = "In"
    OUT = "Out"


@dataclass(frozen=True)
class LqDecision:
    q: Exponent
    verdict: Membership
    reason: str

    @property
    def member(self) -> bool:
        return self.verdict is Membership.IN


def lq_membership(seq: SeqExpr, q: Number) -> LqDecision:
    """Decide seq in l_q from the tail parameters (the prefix is irrelevant)."""
    q = exponent(q)
    a, b, c = seq.tail
    if a < 0:
        return LqDecision(q, Membership.IN, "exponential decay (a<0)")
    if a > 0:
        return LqDecision(q, Membership.OUT, "exponential growth (a>0)")
    if q == INF:
        if b < 0:
            return LqDecision(q, Membership.IN, "bounded: a=0, b<0")
        if b > 0:
            return LqDecision(q, Membership.OUT, "unbounded: a=0, b>0")
        if c <= 0:
            return LqDecision(q, Membership.IN, "bounded: a=0, b=0, c<=0")
        return LqDecision(q, Membership.OUT, "unbounded: a=0, b=0, c>0")
    bq, cq = b * q, c * q
    if bq < -1:
        return LqDecision(q, Membership.IN, "power series: a=0, bq<-1")
    if bq > -1:
        return LqDecision(q, Membership.OUT, "power series: a=0, bq>-1")
    if cq < -1:
        return LqDecision(q, Membership.IN, "log series: a=0, bq=-1, cq<-1")
    if cq == -1:
        return LqDecision(q, Membership.OUT, "iterated-log boundary: a=0, bq=-1, cq=-1 (decided Out)")
    return LqDecision(q, Membership.OUT, "log series: a=0, bq=-1, cq>-1")


def landau_dual(q1: Number, q2: Number, alpha: SeqExpr) -> LqDecision:
    """alpha*beta in l_q2 for every beta in l_q1  iff  alpha in l_{q*}."""
    return lq_membership(alpha, q_star(q1, q2))


@dataclass(frozen=True)
class TabulatedIndices:
    lower: float
    upper: float
    stable: bool
    windows: Tuple[Tuple[int, int, float, float], ...]

    @property
    def pair(self) -> IndexPair:
        return IndexPair(self.lower, self.upper)


def tabulated_indices(values: Sequence[float], tol: float = 1e-3) -> TabulatedIndices:
    """Windowed liminf/limsup estimates of log2(sigma_{j+1}/sigma_j).

    Windows are the trailing geometric halves [M/2, M) of the ratio list for
    M = N, N/2, N/4, ...  The estimate is the min/max over the last window;
    it is flagged stable when the two most recent windows agree within tol.
    """
    v = np.asarray(list(values), dtype=float)
    if v.size < 8:
        raise ValueError("need at least 8 values")
    if not np.all(v > 0) or not np.all(np.isfinite(v)):
        raise ValueError("values must be positive and finite")
    r = np.diff(np.log2(v))
    windows = []
    M = r.size
    while M >= 4:
        lo = M // 2
        w = r[lo:M]
        windows.append((lo, M, float(w.min()), float(w.max())))
        M //= 2
    windows.reverse()
    lo_est, hi_est = windows[-1][2], windows[-1][3]
    prev = windows[-2]
    stable = abs(prev[2] - lo_est) <= tol and abs(prev[3] - hi_est) <= tol
    return TabulatedIndices(lo_est, hi_est, bool(stable), tuple(windows))


def admissibility_bounds(seq: SeqExpr, J: int = 4096) -> Tuple[float, float]:
    """Numerical (d0, d1) with d0 <= sigma_{j+1}/sigma_j <= d1 on j < J.

    For the family the ratio converges to 2^a, so the bounds over a long
    initial segment are the global ones up to a tiny tail correction.
    """
    ratios = np.exp2(np.diff(seq.log2_values(J)))
    return float(ratios.min()), float(ratios.max())


def lq_norm_log2(log2_terms: np.ndarray, q: Exponent) -> float:
    """log2 of the l_q (quasi-)norm of a nonnegative vector given by log2 entries."""
    x = np.asarray(log2_terms, dtype=float)
    if x.size == 0 or np.all(np.isneginf(x)):
        return -INF
    if q == INF:
        return float(x.max())
    qf = float(q)
    m = float(x.max())
    s = np.exp2(qf * (x - m)).sum()
    return m + math.log2(s) / qf


def partial_sums(seq: SeqExpr, q: Number, N: int) -> np.ndarray:
    """Cumulative sums of sigma_j^q for j = 0..N (q finite)."""
    q = exponent(q)
    if q == INF:
        raise ValueError("partial sums need a finite exponent")
    return np.cumsum(np.exp2(float(q) * seq.log2_values(N)))

