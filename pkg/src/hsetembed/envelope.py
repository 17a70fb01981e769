"""Growth envelopes of L_p(Gamma) and B^sigma_{p,q}(Gamma) on the grid t = h_k."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .gauge import GaugeExpr, h_index_conditions, hseq, porosity
from .seqcalc import INF, Exponent, Number, SeqExpr, dual_exponent, exact, exponent, mul, pos, pow, recip
from .trace_gamma import SpaceGamma, trace_exists
from .verdict import Condition


@dataclass(frozen=True)
class EnvelopePair:
    """Envelope values on t_k = h_k, k = J0..J, with the fine index.

    ``mode`` is "exact", "lower-bound-only" or "bounded"; ``index_u`` is None
    unless the index is known.
    """

    levels: np.ndarray
    t: np.ndarray
    values: np.ndarray
    index_u: Optional[Exponent]
    mode: str = "exact"
    closed_form: Optional[dict] = None

    @property
    def grid(self):
        return list(zip(self.t.tolist(), self.values.tolist()))

    def value_at_level(self, k: int) -> float:
        i = k - int(self.levels[0])
        if not 0 <= i < len(self.levels):
            raise ValueError(f"level {k} is outside the grid [{self.levels[0]}, {self.levels[-1]}]")
        return float(self.values[i])

    def log2_value_at_level(self, k: int) -> float:
        return math.log2(self.value_at_level(k))


def first_level(gauge: GaugeExpr) -> int:
    """Smallest J0 >= 1 with h_{J0} < 1."""
    h = hseq(gauge)
    j = 1
    while h.log2_value(j) >= 0:
        j += 1
        if j > 1 << 20:
            raise ValueError("h_j stays >= 1 on a huge range")
    return j


class StepFunction:
    """Sigma(y) = sigma_j for y in [1/h_j, 1/h_{j+1}); sigma_0 below 1/h_0."""

    def __init__(self, sigma: SeqExpr, gauge: GaugeExpr, J: int):
        self.sigma = sigma
        self.J = J
        self.log2_inv_h = -hseq(gauge).log2_values(J + 1)

    def __call__(self, y: float) -> float:
        ly = math.log2(y)
        j = int(np.searchsorted(self.log2_inv_h, ly, side="right")) - 1
        return self.sigma.value(min(max(j, 0), self.J))


def _require_decay(gauge: GaugeExpr) -> None:
    if not h_index_conditions(gauge).upind_h < 0:
        raise ValueError("envelope discretisation needs upind_h < 0 (d > 0)")


def log2_psi_grid(sigma: SeqExpr, gauge: GaugeExpr, r: Number, u: Number, J: int) -> Tuple[np.ndarray, np.ndarray]:
    """(levels J0..J, log2 Psi_{r,u}(h_k)) computed by cumulative log-sum-exp."""
    _require_decay(gauge)
    r, u = exact(r), exponent(u)
    J0 = first_level(gauge)
    if J < J0:
        raise ValueError(f"J={J} is below the first level J0={J0}")
    term = -hseq(gauge).log2_values(J) / float(r) - sigma.log2_values(J)  # log2(h_j^{-1/r} sigma_j^{-1})
    term = term[J0:]
    if u == INF:
        out = np.maximum.accumulate(term)
    else:
        out = np.logaddexp2.accumulate(float(u) * term) / float(u)
    return np.arange(J0, J + 1), out


def psi_ru(sigma: SeqExpr, gauge: GaugeExpr, r: Number, u: Number, k: int) -> float:
    levels, lv = log2_psi_grid(sigma, gauge, r, u, k)
    return float(2.0 ** lv[-1])


def psi_ru_integral(sigma: SeqExpr, gauge: GaugeExpr, r: Number, u: Number, k: int) -> float:
    """Continuous Psi_{r,u}(t) at t = h_k, integrating y^{-u/r} Sigma(1/y)^{-u} dy/y over [t, h_{J0-1}].

    Sigma is constant on each (h_{j+1}, h_j], so each piece integrates in
    closed form.  Only used to cross-check the discrete version.
    """
    _require_decay(gauge)
    r, u = exact(r), exponent(u)
    J0 = first_level(gauge)
    lh = hseq(gauge).log2_values(k)
    ls = sigma.log2_values(k)
    if u == INF:
        # sup over y in [h_{j+1}, h_j] of y^{-1/r} sigma_j^{-1} is attained at y = h_{j+1}
        vals = [-lh[j + 1] / float(r) - ls[j] for j in range(J0 - 1, k)]
        return float(2.0 ** max(vals))
    a = float(u) / float(r)
    total = 0.0
    for j in range(J0 - 1, k):
        lo, hi = lh[j + 1], lh[j]  # log2 of the y-interval ends
        # int_{2^lo}^{2^hi} y^{-a-1} dy = (2^{-a lo} - 2^{-a hi}) / a
        piece = (2.0 ** (-a * lo) - 2.0 ** (-a * hi)) / a
        total += piece * 2.0 ** (-float(u) * ls[j]) / math.log(2)
    return total ** (1 / float(u))


def growth_envelope_Lp(gauge: GaugeExpr, p: Number, J: int = 64) -> EnvelopePair:
    p = exact(p)
    J0 = first_level(gauge)
    levels = np.arange(J0, J + 1)
    lt = hseq(gauge).log2_values(J)[J0:]
    return EnvelopePair(
        levels, 2.0**lt, 2.0 ** (-lt / float(p)), p, "exact", {"kind": "power", "t_exponent": -1 / p}
    )


def closed_form_tag(X: SpaceGamma, u: Exponent) -> dict:
    """Leading asymptotics of Psi_{p,u} in t = h_k for the family."""
    a, b, c = X.sigma.tail
    d, beta, p = X.gauge.d, X.gauge.beta, X.p
    rho = d / p - a  # per-level growth rate of h_j^{-1/p} sigma_j^{-1}
    if rho > 0:
        return {"kind": "power", "t_exponent": a / d - 1 / p, "log_exponent": -beta * a / d - b, "loglog": -c}
    if rho < 0:
        return {"kind": "bounded"}
    e = beta / p + b  # h_j^{-1/p} sigma_j^{-1} = (1+j)^{-e} ...
    if c == 0 and (u == INF and e <= 0 or u != INF and u * e < 1):
        return {"kind": "log-power", "log_exponent": recip(u) - e}
    return {"kind": "log-power-critical", "polylog": -e, "loglog": -c}


def t2_condition(X: SpaceGamma) -> Condition:
    return Condition.test("sigma^-1 h^(-1/p)", mul(X.sigma.inverse(), pow(X.h, -1 / X.p)), dual_exponent(X.q))


def growth_envelope_gamma(X: SpaceGamma, J: int = 64) -> EnvelopePair:
    if trace_exists(X).fails:
        raise ValueError("the trace space does not exist")
    idx = h_index_conditions(X.gauge)
    qd = dual_exponent(X.q)
    t2 = t2_condition(X)
    if idx.upind_h < 0:
        levels, lv = log2_psi_grid(X.sigma, X.gauge, X.p, qd, J)
        lt = X.h.log2_values(J)[levels[0]:]
    else:
        levels, lv, lt = np.arange(0), np.zeros(0), np.zeros(0)
    if t2.member:
        return EnvelopePair(levels, 2.0**lt, 2.0**lv, None, "bounded", {"kind": "bounded"})
    if idx.upind_h >= 0:
        raise ValueError("no envelope information without upind_h < 0")
    t3 = X.sigma.rate > -idx.lowind_h * pos(1 / X.p - 1)
    exact_mode = porosity(X.gauge).holds and idx.T1 and t3
    return EnvelopePair(
        levels,
        2.0**lt,
        2.0**lv,
        X.q if exact_mode else None,
        "exact" if exact_mode else "lower-bound-only",
        closed_form_tag(X, qd),
    )


@dataclass(frozen=True)
class CorrespondenceReport:
    ks: np.ndarray
    log2_ratio: np.ndarray

    @property
    def variation(self) -> float:
        """max/min of the ratio over the grid."""
        return float(2.0 ** (self.log2_ratio.max() - self.log2_ratio.min()))


def envelope_correspondence(
    d: Number, beta: Number, s: Number, p: Number, q: Number, n: int = 1, kmin: int = 10, kmax: int = 60
) -> CorrespondenceReport:
    """Compare E_Gamma(t^d Psi(t)) with the R^n envelope at t^n, t = 2^-k.

    Gamma carries h(r) = r^d Psi(r), Psi(r) = (1+|log2 r|)^beta, and the space
    B^{(s, Psi)}_{p,q}(Gamma), i.e. sigma_j = 2^{js} Psi(2^-j).  Its R^n
    counterpart has smoothness s + (n-d)/p with log factor Psi^{1+1/p}, whose
    sub-critical envelope is t^{s'/n - 1/p} Psi'(t)^{-1}.
    """
    d, beta, s, p = map(exact, (d, beta, s, p))
    if not (d * pos(1 / p - 1) < s < d / p):
        raise ValueError("parameters are not sub-critical: need d(1/p-1)_+ < s < d/p")
    gauge = GaugeExpr(d=d, beta=beta, n=n)
    sigma = SeqExpr(rate=s, polylog=beta)
    X = SpaceGamma(sigma, p, q, gauge)
    env = growth_envelope_gamma(X, J=kmax)
    ks = np.arange(kmin, kmax + 1)
    lg = np.array([env.log2_value_at_level(int(k)) for k in ks])
    s_rn = s + (n - d) / p
    # R^n side at argument t^n, t = 2^-k: (2^{-kn})^{s'/n-1/p} Psi(2^{-kn})^{-(1+1/p)}
    lrn = -ks * float(s_rn - n / p) - float(beta * (1 + 1 / p)) * np.log2(1.0 + n * ks)
    return CorrespondenceReport(ks, lg - lrn)


def env_measure_mass(pair: EnvelopePair, k: int, iota0: int) -> float:
    """mu([h_{(k+1) iota0}, h_{k iota0}]) = log2 E(h_{(k+1) iota0}) - log2 E(h_{k iota0})."""
    if iota0 < 1:
        raise ValueError("iota0 must be positive")
    hi = pair.log2_value_at_level((k + 1) * iota0)
    lo = pair.log2_value_at_level(k * iota0)
    return max(hi - lo, 0.0)


def log_log_slope(x: np.ndarray, y: np.ndarray) -> float:
    """Least-squares slope of y against x."""
    x, y = np.asarray(x, float), np.asarray(y, float)
    return float(np.polyfit(x, y, 1)[0])
