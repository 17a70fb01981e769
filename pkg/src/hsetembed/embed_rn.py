"""Embeddings of Besov spaces of generalised smoothness on R^n."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

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
    q_star,
    recip,
)
from .verdict import Condition, Status, Verdict, verdict

NEVER_COMPACT = "never compact: the embedding, when bounded, is not compact"

CITE_RN = "R^n embedding criterion: p1 <= p2 and sigma^-1 tau 2^{jn(1/p1-1/p2)} in l_{q*}"
CITE_LMAX = "L_max(p,1)(R^n) target criterion (four branches in p, q)"
CITE_C = "C(R^n) target criterion: sigma^-1 2^{jn/p} in l_{q'}"


@dataclass(frozen=True)
class SpaceRn:
    sigma: SeqExpr
    p: Fraction
    q: Exponent
    n: int = 1

    def __post_init__(self):
        p = exact(self.p)
        if p <= 0:
            raise ValueError("p must lie in (0, inf)")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", exponent(self.q))
        if int(self.n) != self.n or self.n < 1:
            raise ValueError("n must be a positive integer")
        object.__setattr__(self, "n", int(self.n))


def besov(sigma: SeqExpr, p: Number, q: Number, n: int = 1) -> SpaceRn:
    return SpaceRn(sigma, p, q, n)


def rn_alpha(src: SpaceRn, tgt: SpaceRn) -> SeqExpr:
    """The diagonal multiplier sigma^-1 tau 2^{jn(1/p1-1/p2)}."""
    return mul(src.sigma.inverse(), tgt.sigma, paren(src.n * (1 / src.p - 1 / tgt.p)))


def embed_besov_rn(src: SpaceRn, tgt: SpaceRn) -> Verdict:
    if src.n != tgt.n:
        raise ValueError(f"dimension mismatch: {src.n} vs {tgt.n}")
    alpha = rn_alpha(src, tgt)
    cond = Condition.test("sigma^-1 tau (n(1/p1-1/p2))", alpha, q_star(src.q, tgt.q))
    notes = [NEVER_COMPACT]
    if src.p > tgt.p:
        notes.append("p1 > p2: l_{p1} is not contained in l_{p2}")
        return verdict(Status.FAILS, CITE_RN, [cond], notes=notes)
    return verdict(Status.of(cond.member), CITE_RN, [cond], notes=notes)


def lmax_governing(src: SpaceRn):
    """(name, sequence, exponent) of the L_max(p,1) criterion."""
    p, q, n = src.p, src.q, src.n
    inv = src.sigma.inverse()
    if p <= 1:
        return "sigma^-1 (n(1/p-1))", mul(inv, paren(n * (1 / p - 1))), dual_exponent(q)
    if q <= min(p, 2):
        return "sigma^-1", inv, INF
    if p <= 2:
        return "sigma^-1", inv, from_recip(1 / p - recip(q))
    return "sigma^-1", inv, from_recip(Fraction(1, 2) - recip(q))


def embed_into_Lmax(src: SpaceRn) -> Verdict:
    name, seq, u = lmax_governing(src)
    cond = Condition.test(name, seq, u)
    return verdict(Status.of(cond.member), CITE_LMAX, [cond])


def embed_into_C(src: SpaceRn) -> Verdict:
    seq = mul(src.sigma.inverse(), paren(src.n / src.p))
    cond = Condition.test("sigma^-1 (n/p)", seq, dual_exponent(src.q))
    return verdict(Status.of(cond.member), CITE_C, [cond])


def classical_delta(s1: Number, p1: Number, s2: Number, p2: Number, n: int = 1) -> Fraction:
    """s1 - n/p1 - (s2 - n/p2)."""
    s1, p1, s2, p2 = map(exact, (s1, p1, s2, p2))
    return s1 - n / p1 - (s2 - n / p2)

