"""Trace spaces on an h-set Gamma and their embeddings.

B^sigma_{p,q}(Gamma) is the trace of B^{sigma h^{1/p} (n)^{1/p}}_{p,q}(R^n).
Every verdict reports which geometric hypotheses were needed and whether
they hold.  Sufficient conditions are applied without hypotheses; a Fails
verdict is returned only when a necessity argument is available.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Tuple

import numpy as np

from .embed_rn import SpaceRn
from .gauge import GaugeExpr, h_index_conditions, hseq, is_measure_function, porosity
from .seqcalc import (
    INF,
    Exponent,
    Number,
    SeqExpr,
    dual_exponent,
    exact,
    exponent,
    from_recip,
    mul,
    paren,
    pos,
    pow,
    q_star,
    recip,
)
from .verdict import Condition, HypothesisLedger, Status, Verdict, verdict

CITE_DEF = "trace-space definition: sigma^-1 in l_{q'} (i), or sigma^-1 h^{1/r-1/p} in l_{v_r} for some r in [p, min(q,1)] (ii)"
CITE_EXISTS = "exact trace existence: sigma^-1 in l_{q'} (p>=1 or q<=p<1), sigma^-1 in l_{v_p} (p<1, p<q); porosity and upind_h<0"
CITE_LR_LOW = "trace into L_r, r<=p: sigma^-1 in l_{q'}; necessity under porosity"
CITE_LR_SUP = "trace into L_r, p<=r, q<=min(r,1): sigma^-1 h^{1/r-1/p} in l_inf; necessity under upind_h<0"
CITE_LR_VR = "trace into L_r, p<=r<=min(q,1): sigma^-1 h^{1/r-1/p} in l_{v_r}; necessity under upind_h<0"
CITE_LINF = "L_inf(Gamma) criterion: sigma^-1 h^{-1/p} in l_{q'}; sufficiency unconditional"
CITE_LMAX = "L_max(p,1)(Gamma) criterion: sigma^-1 h^{-(1/p-1)_+} in l_{q'}"
CITE_GG_IFF = "Gamma-to-Gamma iff criterion (p1<=p2): sigma^-1 tau h^{-(1/p1-1/p2)} in l_{q*} under porosity, T1, E3a, E3b"
CITE_GG_SUFF = "Gamma-to-Gamma sufficiency: lowind tau > 0 and sigma^-1 tau h^{-(1/p1-1/p2)_+} in l_{q*}"
CITE_GG_NEC = "Gamma-to-Gamma necessity: sigma^-1 tau h^{-(1/p1-1/p2)} in l_{q*} under porosity, T1, E3a, E3b"
CITE_GG_ID = "identity embedding of a space into itself"
CITE_GG_GAP = "Gamma-to-Gamma gap for p1>p2: sufficient condition fails, necessary condition holds"


@dataclass(frozen=True)
class SpaceGamma:
    sigma: SeqExpr
    p: Fraction
    q: Fraction
    gauge: GaugeExpr

    def __post_init__(self):
        p, q = exponent(self.p), exponent(self.q)
        if p == INF or q == INF:
            raise ValueError("p and q must be finite on Gamma")
        if not is_measure_function(self.gauge).holds:
            raise ValueError(f"{self.gauge} is not a measure function in dimension {self.gauge.n}")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)

    @property
    def h(self) -> SeqExpr:
        return hseq(self.gauge)

    @property
    def n(self) -> int:
        return self.gauge.n


def besov_gamma(sigma: SeqExpr, p: Number, q: Number, gauge: GaugeExpr) -> SpaceGamma:
    return SpaceGamma(sigma, p, q, gauge)


def lift(X: SpaceGamma) -> SpaceRn:
    """The R^n space whose trace defines X."""
    tau = mul(X.sigma, pow(X.h, 1 / X.p), paren(X.n / X.p))
    return SpaceRn(tau, X.p, X.q, X.n)


def _geometry(g: GaugeExpr) -> Tuple[Status, Status, Status]:
    idx = h_index_conditions(g)
    return porosity(g).status, Status.of(idx.T1), Status.of(idx.upind_h < 0)


def ledger(X: SpaceGamma) -> HypothesisLedger:
    por, t1, up = _geometry(X.gauge)
    return HypothesisLedger(porosity=por, T1=t1, upind_h_negative=up)


def h_power(X: SpaceGamma, e: Fraction) -> SeqExpr:
    return pow(X.h, e)


@dataclass(frozen=True)
class _Rule:
    condition: Condition
    hypothesis: str  # ledger field whose truth makes the rule necessary
    citation: str
    sufficient: bool  # whether the rule's own condition (or its existential) is met
    boundary: bool = False  # undecided because of an exact boundary coincidence


def vr_exponent(r: Fraction, q: Fraction) -> Exponent:
    return from_recip(1 / r - recip(q))


def _existential(X: SpaceGamma, lo: Fraction, hi: Fraction) -> Tuple[bool, bool, List[Condition]]:
    """Is sigma^-1 h^{1/rho-1/p} in l_{v_rho} for some rho in [lo, hi]?

    In the tail exponents the rate is -a_sigma + d(1/p - 1/rho), monotone in
    rho; for d = 0 the membership inequalities are affine in 1/rho.  Either
    way the admissible set, if nonempty, contains an endpoint, so checking
    lo and hi is exact.  Returns (found, boundary, conditions).
    """
    inv = X.sigma.inverse()
    conds = []
    for rho in sorted({lo, hi}):
        seq = mul(inv, h_power(X, 1 / rho - 1 / X.p))
        conds.append(Condition.test(f"sigma^-1 h^(1/r-1/p) at r={rho}", seq, vr_exponent(rho, X.q)))
    found = any(c.member for c in conds)
    boundary = not found and any("iterated-log boundary" in c.decision.reason for c in conds)
    return found, boundary, conds


def _lr_rules(X: SpaceGamma, r: Fraction) -> List[_Rule]:
    p, q = X.p, X.q
    inv = X.sigma.inverse()
    rules: List[_Rule] = []
    if r <= p and (p >= 1 or q <= p < 1):
        c = Condition.test("sigma^-1", inv, dual_exponent(q))
        rules.append(_Rule(c, "porosity", CITE_LR_LOW, c.member))
    if p <= r and q <= min(r, 1):
        c = Condition.test("sigma^-1 h^(1/r-1/p)", mul(inv, h_power(X, 1 / r - 1 / p)), INF)
        rules.append(_Rule(c, "upind_h_negative", CITE_LR_SUP, c.member))
    if p <= r <= min(q, 1):
        c = Condition.test("sigma^-1 h^(1/r-1/p)", mul(inv, h_power(X, 1 / r - 1 / p)), vr_exponent(r, q))
        found, boundary, _ = _existential(X, r, min(q, Fraction(1)))
        rules.append(_Rule(c, "upind_h_negative", CITE_LR_VR, found or c.member, boundary))
    return rules


def linfty_condition(X: SpaceGamma) -> Condition:
    return Condition.test("sigma^-1 h^(-1/p)", mul(X.sigma.inverse(), h_power(X, -1 / X.p)), dual_exponent(X.q))


def lmax_condition(X: SpaceGamma) -> Condition:
    e = pos(1 / X.p - 1)
    return Condition.test("sigma^-1 h^(-(1/p-1)_+)", mul(X.sigma.inverse(), h_power(X, -e)), dual_exponent(X.q))


def _decide_lr(X: SpaceGamma, r: Fraction, citation: str) -> Verdict:
    led = ledger(X)
    rules = _lr_rules(X, r)
    conds = [rule.condition for rule in rules]
    notes = []
    if any(rule.sufficient for rule in rules):
        cite = next(rule.citation for rule in rules if rule.sufficient)
        return verdict(Status.HOLDS, citation or cite, conds, led)
    # unconditional sufficient routes through smaller target spaces
    lin = linfty_condition(X)
    if lin.member:
        return verdict(Status.HOLDS, CITE_LINF, conds + [lin], led, ["L_inf(Gamma) is contained in L_r(Gamma)"])
    if r <= max(X.p, 1):
        lm = lmax_condition(X)
        if lm.member:
            return verdict(Status.HOLDS, CITE_LMAX, conds + [lm], led, ["L_max(p,1)(Gamma) is contained in L_r(Gamma)"])
    if r < X.p:
        base = _lr_rules(X, X.p)
        if any(rule.sufficient for rule in base):
            return verdict(
                Status.HOLDS,
                CITE_DEF,
                conds + [rule.condition for rule in base],
                led,
                ["trace exists in L_p(Gamma), which is contained in L_r(Gamma)"],
            )
    for rule in rules:
        if led.holds(rule.hypothesis) and not rule.condition.member:
            return verdict(Status.FAILS, citation or rule.citation, conds, led)
    if not rules:
        notes.append(f"no criterion covers r={r} with p={X.p}, q={X.q}")
    else:
        missing = sorted({rule.hypothesis for rule in rules if not led.holds(rule.hypothesis)})
        if missing:
            notes.append("necessity needs: " + ", ".join(missing))
        if any(rule.boundary for rule in rules):
            notes.append("exact boundary coincidence in the existential over r")
    return verdict(Status.INCONCLUSIVE, citation or (rules[0].citation if rules else CITE_DEF), conds, led, notes)


def trace_exists(X: SpaceGamma) -> Verdict:
    return _decide_lr(X, X.p, CITE_EXISTS)


def trace_into_Lr(X: SpaceGamma, r: Number) -> Verdict:
    r = exact(r)
    if r <= 0:
        raise ValueError("r must be positive")
    return _decide_lr(X, r, "")


def embed_into_Linfty(X: SpaceGamma) -> Verdict:
    led = ledger(X)
    cond = linfty_condition(X)
    if cond.member:
        return verdict(Status.HOLDS, CITE_LINF, [cond], led)
    tr = trace_exists(X)
    if tr.fails:
        return verdict(Status.FAILS, CITE_LINF, [cond], led, ["the trace space does not exist"])
    if led.holds("upind_h_negative") and tr.holds:
        return verdict(Status.FAILS, CITE_LINF, [cond], led)
    return verdict(Status.INCONCLUSIVE, CITE_LINF, [cond], led, ["necessity needs upind_h<0 and trace existence"])


def embed_into_Lmax_gamma(X: SpaceGamma) -> Verdict:
    led = ledger(X)
    cond = lmax_condition(X)
    if cond.member:
        return verdict(Status.HOLDS, CITE_LMAX, [cond], led)
    if led.holds("porosity", "upind_h_negative"):
        return verdict(Status.FAILS, CITE_LMAX, [cond], led)
    return verdict(Status.INCONCLUSIVE, CITE_LMAX, [cond], led, ["necessity needs porosity and upind_h<0"])


def gg_sequences(X1: SpaceGamma, X2: SpaceGamma) -> Tuple[SeqExpr, SeqExpr]:
    """(A_plus, A) = sigma^-1 tau h^{-(1/p1-1/p2)_+}, sigma^-1 tau h^{-(1/p1-1/p2)}."""
    e = 1 / X1.p - 1 / X2.p
    base = mul(X1.sigma.inverse(), X2.sigma)
    return mul(base, h_power(X1, -pos(e))), mul(base, h_power(X1, -e))


def isotropy_sum_bounded(tau: SeqExpr, h: SeqExpr, p2: Fraction, q2: Fraction, J: int = 256) -> bool:
    """Numerical check that sum_{r<=k} h_r^{-q2'/p2} tau_r^{-q2'} ~ its last term, k <= J."""
    qd = dual_exponent(q2)
    if qd == INF:
        return True
    w = float(qd) * (-h.log2_values(J) / float(p2) - tau.log2_values(J))
    ratio = np.logaddexp2.accumulate(w) - w  # log2(partial sum / last term)
    half = ratio[J // 2 : J + 1]
    return bool(half.max() - ratio[J // 4 : J // 2 + 1].max() < 0.5 and ratio[-1] < 8)


def gg_ledger(X1: SpaceGamma, X2: SpaceGamma, profile: str = "standard") -> HypothesisLedger:
    por, t1, up = _geometry(X1.gauge)
    tau, h = X2.sigma, X1.h
    d = X1.gauge.d
    if profile == "weak" and X2.q > 1:
        out = Condition.test("tau^-1 h^(-1/p2)", mul(tau.inverse(), pow(h, -1 / X2.p)), dual_exponent(X2.q))
        e3a = Status.of(not out.member and isotropy_sum_bounded(tau, h, X2.p, X2.q))
    else:
        e3a = Status.of(tau.rate - d / X2.p < 0)
    e3b = Status.of(tau.rate > d * pos(1 / X2.p - 1))
    return HypothesisLedger(
        porosity=por,
        T1=t1,
        upind_h_negative=up,
        E3a=e3a,
        E3b=e3b,
        lowind_tau_positive=Status.of(tau.rate > 0),
    )


def embed_gamma_gamma(X1: SpaceGamma, X2: SpaceGamma, profile: str = "standard") -> Verdict:
    """Embedding B^sigma_{p1,q1}(Gamma) -> B^tau_{p2,q2}(Gamma) on one h-set.

    ``profile="weak"`` replaces E3a, for q2 > 1, by tau^-1 h^{-1/p2} not in
    l_{q2'} together with a numerical strong-isotropy sum check.
    """
    if X1.gauge != X2.gauge:
        raise ValueError("both spaces must live on the same h-set (identical gauges)")
    if profile not in ("standard", "weak"):
        raise ValueError(f"unknown hypothesis profile {profile!r}")
    led = gg_ledger(X1, X2, profile)
    qs = q_star(X1.q, X2.q)
    a_plus, a = gg_sequences(X1, X2)
    c_plus = Condition.test("sigma^-1 tau h^(-(1/p1-1/p2)_+)", a_plus, qs)
    c_nec = Condition.test("sigma^-1 tau h^(-(1/p1-1/p2))", a, qs)
    if X1 == X2:
        return verdict(Status.HOLDS, CITE_GG_ID, [c_plus], led, ["identity map"])
    necessary = led.holds("porosity", "T1", "E3a", "E3b")
    sufficient = led.holds("lowind_tau_positive") and c_plus.member
    conds = [c_plus] if X1.p <= X2.p else [c_plus, c_nec]
    if X1.p <= X2.p:
        if necessary:
            return verdict(Status.of(c_nec.member), CITE_GG_IFF, conds, led)
        if sufficient:
            return verdict(Status.HOLDS, CITE_GG_SUFF, conds, led)
        return verdict(
            Status.INCONCLUSIVE,
            CITE_GG_SUFF,
            conds,
            led,
            ["hypotheses for necessity not met: " + _missing(led, ("porosity", "T1", "E3a", "E3b"))],
        )
    if sufficient:
        return verdict(Status.HOLDS, CITE_GG_SUFF, conds, led)
    if necessary and not c_nec.member:
        return verdict(Status.FAILS, CITE_GG_NEC, conds, led)
    if necessary:
        return verdict(Status.INCONCLUSIVE, CITE_GG_GAP, conds, led, ["p1 > p2: sufficient and necessary conditions differ"])
    return verdict(
        Status.INCONCLUSIVE,
        CITE_GG_GAP,
        conds,
        led,
        ["hypotheses for necessity not met: " + _missing(led, ("porosity", "T1", "E3a", "E3b"))],
    )


def _missing(led: HypothesisLedger, names) -> str:
    return ", ".join(n for n in names if not led.holds(n)) or "lowind tau > 0"

