"""Numerical ground truth: truncated sequence norms and extremal witnesses.

Coefficient sequences have one active position per level, which is all the
proofs need.  Most quantities span hundreds of orders of magnitude, so the
kernels work with log2 values and report ordinary floats only at the end.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Union

import numpy as np

from .gauge import GaugeExpr, hseq
from .seqcalc import INF, Exponent, Number, SeqExpr, dual_exponent, exact, exponent, lq_norm_log2, q_star


@dataclass(frozen=True)
class CoeffProfile:
    """Coefficients lambda_j at levels ``levels`` (dense 0..J when levels is None)."""

    values: np.ndarray
    levels: Optional[tuple] = None

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if not np.all(np.isfinite(v)):
            raise ValueError("profile values must be finite")
        object.__setattr__(self, "values", v)
        if self.levels is not None:
            lv = tuple(int(k) for k in self.levels)
            if len(lv) != v.size or any(b <= a for a, b in zip(lv, lv[1:])):
                raise ValueError("levels must be strictly increasing, one per value")
            object.__setattr__(self, "levels", lv)

    @property
    def J(self) -> int:
        return (self.levels[-1] if self.levels else self.values.size - 1)

    def level_list(self) -> List[int]:
        return list(self.levels) if self.levels is not None else list(range(self.values.size))


def _seq_log2(seq: Union[SeqExpr, Sequence[float]], levels: List[int]) -> np.ndarray:
    if isinstance(seq, SeqExpr):
        if levels == list(range(len(levels))):
            return seq.log2_values(len(levels) - 1)
        return np.array([seq.log2_value(k) for k in levels])
    arr = np.asarray(seq, dtype=float)
    return np.log2(arr[levels])


def bnorm(profile: CoeffProfile, sigma: SeqExpr, p: Number = 1, q: Number = 1, n: int = 1) -> float:
    """Norm of a single-position profile in b^sigma_{p,q}: the l_q norm of (sigma_j |lambda_j|).

    The factor 2^{-jn/p} of the sequence-space norm is cancelled by the
    L_p normalisation of the single active cube on each level.
    """
    exponent(p)
    q = exponent(q)
    levels = profile.level_list()
    lam = np.abs(profile.values)
    with np.errstate(divide="ignore"):
        terms = _seq_log2(sigma, levels) + np.log2(lam)
    return float(2.0 ** lq_norm_log2(terms, q))


def _exp2(x: float) -> float:
    """2**x, saturating to inf beyond the double range."""
    return math.inf if x > 1023.9 else float(2.0**x)


def log2_diag_opnorm_exact(alpha: Union[SeqExpr, Sequence[float]], q1: Number, q2: Number, J: int) -> float:
    qs = q_star(q1, q2)
    with np.errstate(divide="ignore"):
        la = _seq_log2(alpha, list(range(J + 1)))
    return lq_norm_log2(la, qs)


def diag_opnorm_exact(alpha, q1: Number, q2: Number, J: int) -> float:
    """Norm of beta -> alpha beta from l_q1 to l_q2 on levels 0..J: ||alpha||_{l_q*}."""
    if J < 0:
        raise ValueError("J must be nonnegative")
    return _exp2(log2_diag_opnorm_exact(alpha, q1, q2, J))


def holder_witness(log2_alpha: np.ndarray, q1: Exponent, q2: Exponent) -> np.ndarray:
    """log2 of the extremal beta, normalised in l_q1 (a spike when q* = inf)."""
    qs = q_star(q1, q2)
    out = np.full(log2_alpha.shape, -np.inf)
    if qs == INF:
        out[int(np.argmax(log2_alpha))] = 0.0
        return out
    if q1 == INF:
        lb = np.where(np.isfinite(log2_alpha), 0.0, -np.inf)
    else:
        lb = float(qs) / float(q1) * log2_alpha
    return lb - lq_norm_log2(lb, q1)


def log2_diag_opnorm_search(alpha, q1: Number, q2: Number, J: int, trials: int = 64, seed: int = 0) -> float:
    """Best ratio ||alpha beta||_q2 / ||beta||_q1 over random beta plus the Hoelder witness."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    q1, q2 = exponent(q1), exponent(q2)
    with np.errstate(divide="ignore"):
        la = _seq_log2(alpha, list(range(J + 1)))
    if np.all(np.isneginf(la)):
        return -INF
    m = float(la[np.isfinite(la)].max())
    rng = np.random.default_rng(seed)
    best = -INF
    candidates = [holder_witness(la, q1, q2)]
    # random profiles: dense exponential weights, and sparse random supports
    dense = rng.exponential(size=(trials, J + 1))
    sparse = dense * (rng.random(size=(trials, J + 1)) < 0.1)
    for block in (dense, sparse):
        with np.errstate(divide="ignore"):
            logs = np.log2(block)
        candidates.extend(logs)
    for lb in candidates:
        if np.all(np.isneginf(lb)):
            continue
        num = lq_norm_log2(la - m + lb, q2)
        den = lq_norm_log2(lb, q1)
        best = max(best, num - den)
    return best + m


def diag_opnorm_search(alpha, q1: Number, q2: Number, J: int, trials: int = 64, seed: int = 0) -> float:
    return _exp2(log2_diag_opnorm_search(alpha, q1, q2, J, trials, seed))


@dataclass(frozen=True)
class LandauWitness:
    """beta supported on t_1 < t_2 < ... with alpha_{t_{j+1}} >= 2 alpha_{t_j}."""

    profile: CoeffProfile
    log2_alpha: np.ndarray  # alpha at the support
    q1: Exponent
    beta_norms: np.ndarray  # ||beta^(T)||_q1, T = 1..len
    closed_bound: float

    def product_norms(self, q2: Number) -> np.ndarray:
        """||alpha beta^(T)||_q2 for T = 1..len."""
        q2 = exponent(q2)
        prod = 2.0 ** self.log2_alpha * self.profile.values
        if q2 == INF:
            return np.maximum.accumulate(prod)
        return np.cumsum(prod ** float(q2)) ** (1 / float(q2))

    @property
    def support(self) -> List[int]:
        return list(self.profile.levels)

    def exact_slack(self) -> List[Fraction]:
        """bound^q1 - ||beta^(T)||_q1^q1 in exact rational arithmetic, T = 1..len.

        Float partial sums reach the bound to the last ulp (it is their
        limit), so strict positivity is checked on the exact values of the
        construction; needs an integer q1.
        """
        if self.q1 == INF or Fraction(self.q1).denominator != 1:
            raise ValueError("exact slack needs an integer q1")
        qi = int(self.q1)
        alphas = [Fraction(float(v)) for v in 2.0**self.log2_alpha]
        x = Fraction(1, 2**qi)
        bound = (1 - x) ** -2 / alphas[0] ** qi
        out, total = [], Fraction(0)
        for j, a in enumerate(alphas, start=1):
            total += j / a**qi
            out.append(bound - total)
        return out


def _gallop_next(alpha: SeqExpr, t: int, target: float, step: int = 1) -> int:
    """Smallest k > t with log2 alpha_k >= target, for alpha non-decreasing beyond t.

    Exponential search from the hint ``step``, then bisection.  Beyond 2^52
    neighbouring indices are indistinguishable in double precision, so the
    bisection stops at that relative resolution.
    """
    lo, step = t, max(1, step)
    hi = t + step
    while alpha.log2_value(hi) < target:
        lo = hi
        step *= 2
        hi = t + step
        if step.bit_length() > 8192:
            raise ValueError("alpha is bounded on the searched range")
    while hi - lo > 1 and hi - lo > hi >> 52:
        mid = (lo + hi) // 2
        if alpha.log2_value(mid) >= target:
            hi = mid
        else:
            lo = mid
    return hi


def _monotone_from(alpha: SeqExpr) -> int:
    """An index beyond which alpha (formula part) is non-decreasing, for unbounded alpha."""
    a, b, c = (float(x) for x in alpha.tail)
    ln2 = math.log(2)
    j = max(len(alpha.prefix), 1)
    if a == 0 and b == 0 and c > 0:
        return j
    # lower bound of d/dx ln alpha: a ln2 + min(b,0)/(1+x) ... with the positive part dropped
    while True:
        x = float(j)
        lower = a * ln2 + min(b, 0.0) / (1 + x) + min(c, 0.0) / ((math.e + x) * math.log(math.e + x))
        if a == 0 and b > 0:
            lower = b / (1 + x) + min(c, 0.0) / ((math.e + x) * math.log(math.e + x))
        if lower > 0:
            return j
        j *= 2
        if j > 1 << 64:
            raise ValueError("alpha is not eventually increasing")


def landau_witness(alpha: Union[SeqExpr, Sequence[float]], q1: Number, T: Optional[int] = None, start: int = 1) -> LandauWitness:
    """Build the witness beta with ||beta||_q1 bounded and ||alpha beta||_q2 unbounded.

    t_1 = start, t_{j+1} = the smallest index beyond t_j with alpha >= 2 alpha_{t_j},
    beta_{t_j} = j^{1/q1} / alpha_{t_j}.  For a list input the construction
    stops when the list is exhausted; T, if given, caps the number of terms.
    """
    q1 = exponent(q1)
    if q1 == INF:
        raise ValueError("q1 must be finite")
    support: List[int] = [start]
    if isinstance(alpha, SeqExpr):
        a, b, c = alpha.tail
        if not (a > 0 or (a == 0 and (b > 0 or (b == 0 and c > 0)))):
            raise ValueError("alpha is bounded: no witness exists")
        if T is None:
            raise ValueError("give T for a symbolic alpha")
        mono = _monotone_from(alpha)
        logs = [alpha.log2_value(start)]
        while len(support) < T:
            t = support[-1]
            target = logs[-1] + 1.0
            k = t + 1
            while k < mono and alpha.log2_value(k) < target:
                k += 1
            if alpha.log2_value(k) < target:
                gap = support[-1] - support[-2] if len(support) > 1 else 1
                k = _gallop_next(alpha, k, target, gap)
            support.append(k)
            logs.append(alpha.log2_value(k))
        la = np.array(logs)
    else:
        arr = np.asarray(alpha, dtype=float)
        if np.any(arr <= 0):
            raise ValueError("alpha must be positive")
        la_all = np.log2(arr)
        logs = [la_all[start]]
        k = start + 1
        while k < arr.size and (T is None or len(support) < T):
            if la_all[k] >= logs[-1] + 1.0:
                support.append(k)
                logs.append(la_all[k])
            k += 1
        if len(support) < 2:
            raise ValueError("alpha is bounded on the supplied range: no witness at this scale")
        la = np.array(logs)
    j = np.arange(1, len(support) + 1, dtype=float)
    qf = float(q1)
    lbeta = np.log2(j) / qf - la
    beta = 2.0**lbeta
    norms = np.cumsum(beta**qf) ** (1 / qf)
    # sum_j j x^{j-1} = 1/(1-x)^2 with x = 2^{-q1}
    bound = 2.0 ** (-la[0]) * (1 - 2.0 ** (-qf)) ** (-2 / qf)
    return LandauWitness(CoeffProfile(beta, tuple(support)), la, q1, norms, float(bound))


def trace_lowerbound_profile(
    b: Sequence[float], sigma: SeqExpr, gauge: GaugeExpr, p1: Number, iota0: int, T: int
) -> Dict[int, float]:
    """k -> sum_{r<=k} b_r sigma_{r iota0}^{-1} h_{r iota0}^{-1/p1}, k = 1..T (b_1 = b[0])."""
    if iota0 < 1 or T < 1:
        raise ValueError("iota0 and T must be positive")
    p1 = exact(p1)
    b = np.asarray(b, dtype=float)[:T]
    if b.size < T:
        raise ValueError("need T coefficients")
    h = hseq(gauge)
    ks = [r * iota0 for r in range(1, T + 1)]
    w = np.array([-sigma.log2_value(k) - h.log2_value(k) / float(p1) for k in ks])
    partial = np.cumsum(b * 2.0**w)
    return {k: float(v) for k, v in zip(range(1, T + 1), partial)}


def lr_lower_bound(b: Sequence[float], sigma: SeqExpr, gauge: GaugeExpr, p: Number, r: Number, iota0: int, T: int) -> float:
    """(sum_m (sum_{l<=m} b_l sigma^{-1}_{l iota0} h^{-1/p}_{l iota0})^r h_{m iota0})^{1/r}.

    The L_r(Gamma) norm of g^{b^T} is bounded below by this sum over the
    annuli P_m, using mu(Gamma cap P_m) >= a2 h_{m iota0}.
    """
    prof = trace_lowerbound_profile(b, sigma, gauge, p, iota0, T)
    h = hseq(gauge)
    r = float(exact(r))
    total = sum(prof[m] ** r * h.value(m * iota0) for m in range(1, T + 1))
    return total ** (1 / r)


def _dual_sum_terms(tau: SeqExpr, h: SeqExpr, p2, q2, N: int) -> np.ndarray:
    qd = float(dual_exponent(q2))
    return qd * (-h.log2_values(N) / float(p2) - tau.log2_values(N))


def envelope_integral(
    b: Sequence[float],
    sigma: SeqExpr,
    tau: SeqExpr,
    gauge: GaugeExpr,
    p1: Number,
    p2: Number,
    q2: Number,
    iota0: int,
    k0: int,
    K: int,
    collapsed: bool = False,
) -> float:
    """Discrete lower bound for the target-envelope integral of g^{b^T}.

    For q2 > 1 the direct form is
        (sum_{k=k0}^K S_k^{q2} (sum_{r<=k iota0} w_r)^{-q2} w_{k iota0})^{1/q2},
    with S_k the lower-bound profile and w_r = h_r^{-q2'/p2} tau_r^{-q2'}.
    For q2 <= 1 the envelope is the sup form and the mass of each interval
    is the log2-ratio of consecutive envelope values.  The collapsed form
    uses sum_{r<=k iota0} w_r ~ w_{k iota0} and S_k >= b_k (...)_k:
        (sum_k b_k^{q2} (sigma^{-1} tau h^{1/p2-1/p1})_{k iota0}^{q2})^{1/q2}.
    """
    p1, p2, q2 = exact(p1), exact(p2), exponent(q2)
    if not 1 <= k0 <= K:
        raise ValueError("need 1 <= k0 <= K")
    h = hseq(gauge)
    b = np.asarray(b, dtype=float)
    if b.size < K:
        raise ValueError("need K coefficients")
    qf = float(q2)
    ks = np.arange(k0, K + 1)
    if collapsed:
        lv = np.array(
            [-sigma.log2_value(k * iota0) + tau.log2_value(k * iota0) + h.log2_value(k * iota0) * float(1 / p2 - 1 / p1) for k in ks]
        )
        return float(np.sum((b[ks - 1] * 2.0**lv) ** qf) ** (1 / qf))
    prof = trace_lowerbound_profile(b, sigma, gauge, p1, iota0, K)
    S = np.array([prof[int(k)] for k in ks])
    N = (K + 1) * iota0
    if q2 > 1:
        w = _dual_sum_terms(tau, h, p2, q2, N)
        w[0] = -np.inf  # the sum runs over r >= 1
        cum = np.logaddexp2.accumulate(w)
        idx = ks * iota0
        lterm = qf * np.log2(S) - qf * cum[idx] + w[idx]
        return float(np.sum(2.0**lterm) ** (1 / qf))
    # q2 <= 1: envelope E(h_m) = sup_{r<=m} h_r^{-1/p2} tau_r^{-1}
    le = np.maximum.accumulate(-h.log2_values(N) / float(p2) - tau.log2_values(N))
    total = 0.0
    for k, s in zip(ks, S):
        mass = max(le[(k + 1) * iota0] - le[k * iota0], 0.0)
        total += (s * 2.0 ** (-le[k * iota0])) ** qf * mass
    return total ** (1 / qf)


def smallest_iota0(tau: SeqExpr, gauge: GaugeExpr, p2: Number, kmax: int = 64, factor: float = 2.0, limit: int = 256) -> Optional[int]:
    """Smallest iota0 with (tau^-1 h^-1/p2)_{(k+1) iota0} >= factor (tau^-1 h^-1/p2)_{k iota0} for k < kmax."""
    p2 = exact(p2)
    h = hseq(gauge)
    for iota0 in range(1, limit + 1):
        N = (kmax + 1) * iota0
        lv = -tau.log2_values(N) - h.log2_values(N) / float(p2)
        steps = lv[iota0 :: iota0][1:] - lv[iota0 :: iota0][:-1]
        if steps.size and steps.min() >= math.log2(factor):
            return iota0
    return None


def partial_sum_membership(log2_terms_fn, u: Number, N: int = 10**6, tol: float = 0.01) -> bool:
    """Independent l_u membership test from dyadic block sums up to N.

    Cauchy condensation: for eventually monotone terms, sum a_j converges
    iff the block sums B_k = sum_{2^k <= j < 2^{k+1}} a_j decay
    geometrically.  The last two blocks decide: In when log2 B_prev -
    log2 B_last exceeds ``tol``.  Harmonic-type blocks shrink only by
    O(2^-k), hence the margin; the test resolves polynomial rates
    (1+j)^{-1-e} with e above ``tol`` but not iterated-log factors.
    For u = inf the block maxima are compared instead.
    """
    u = exponent(u)
    x = np.asarray(log2_terms_fn(N), dtype=float)
    K = int(math.log2(N + 1))
    blocks = []
    for k in range(K - 2, K):
        seg = x[2**k : 2 ** (k + 1)]
        if u == INF:
            blocks.append(float(seg.max()))
        else:
            blocks.append(float(np.logaddexp2.reduce(float(u) * seg)))
    if u == INF:
        return blocks[1] <= blocks[0] + 1e-12
    return blocks[0] - blocks[1] > tol
