import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hsetembed.seqcalc import (
    INF,
    Membership,
    SeqExpr,
    boyd_indices,
    dual_exponent,
    eval,
    exact,
    format_number,
    indices,
    landau_dual,
    lq_membership,
    lq_norm_log2,
    mul,
    numeric_boyd,
    paren,
    partial_sums,
    pow,
    q_star,
    subsequence,
    tabulated_indices,
)
from strategies import exponents, finite_exponents, rationals, seqs


def direct(C, a, b, c, j):
    # independent evaluation of C 2^{aj} (1+j)^b ln(e+j)^c
    return C * math.exp(math.log(2) * a * j + b * math.log(1 + j) + c * math.log(math.log(math.e + j)))


# -- evaluation ---------------------------------------------------------------


def test_eval_pure_power():
    assert eval(SeqExpr(rate=1), 3) == 8.0


def test_eval_constant():
    s = SeqExpr()
    assert all(eval(s, j) == 1.0 for j in range(50))


def test_eval_mixed():
    # C=2, a=-1/2, b=1 at j=3: 2 * 2^{-1.5} * 4 = 2^{1.5}
    s = SeqExpr(scale=2, rate=Fraction(-1, 2), polylog=1)
    assert eval(s, 3) == pytest.approx(2.8284271247461903, rel=1e-15)
    assert eval(s, 3) == pytest.approx(direct(2, -0.5, 1, 0, 3), rel=1e-15)


def test_eval_prefix_overrides():
    s = SeqExpr(rate=Fraction(3, 10), prefix=(7.0, 0.1))
    assert eval(s, 0) == 7.0
    assert eval(s, 1) == 0.1
    assert eval(s, 2) == pytest.approx(2**0.6)


def test_float_parameters_become_exact():
    s = SeqExpr(rate=0.3, polylog=-1)
    assert s.rate == Fraction(3, 10)
    assert exact(0.1) + exact(0.2) == exact(0.3)


@pytest.mark.parametrize("bad", [0.0, -1.0, math.inf])
def test_scale_must_be_positive(bad):
    with pytest.raises(ValueError):
        SeqExpr(scale=bad)


def test_prefix_must_be_positive():
    with pytest.raises(ValueError):
        SeqExpr(prefix=(1.0, 0.0))


@given(seqs(with_prefix=True))
@settings(max_examples=200)
def test_log2_values_match_pointwise(s):
    lv = s.log2_values(64)
    for j in (0, 1, 2, 5, 17, 64):
        assert lv[j] == pytest.approx(math.log2(s.value(j)), abs=1e-12)


@given(seqs())
@settings(max_examples=200)
def test_value_matches_direct_formula(s):
    for j in (0, 1, 3, 10, 40):
        want = direct(s.scale, float(s.rate), float(s.polylog), float(s.loglog), j)
        assert s.value(j) == pytest.approx(want, rel=1e-12)


def test_formula_log2_huge_index():
    s = SeqExpr(rate=Fraction(1, 2), polylog=1, loglog=-1)
    j = 10**200
    got = s.formula_log2(j)
    assert got == pytest.approx(0.5e200, rel=1e-12)
    assert SeqExpr(polylog=1).formula_log2(j) == pytest.approx(200 * math.log2(10), rel=1e-12)


# -- algebra ------------------------------------------------------------------


@given(rationals(-3, 3), rationals(-3, 3))
def test_paren_product(a, b):
    assert mul(paren(a), paren(b)) == paren(a + b)


@given(seqs(with_prefix=True))
def test_pow_one_is_identity(s):
    assert pow(s, 1) == s


@given(rationals(-3, 3), st.sampled_from([Fraction(1, 2), Fraction(2), Fraction(3), Fraction(2, 3), Fraction(4)]))
def test_pow_paren(a, r):
    assert pow(paren(a), 1 / r) == paren(a / r)


@given(seqs(with_prefix=True), seqs(with_prefix=True))
@settings(max_examples=200)
def test_mul_is_pointwise(s1, s2):
    m = mul(s1, s2)
    for j in range(65):
        assert m.value(j) == pytest.approx(s1.value(j) * s2.value(j), rel=1e-12)


@given(seqs(with_prefix=True), rationals(-2, 2))
@settings(max_examples=200)
def test_pow_is_pointwise(s, r):
    t = pow(s, r)
    for j in range(0, 65, 4):
        assert t.log2_value(j) == pytest.approx(float(r) * s.log2_value(j), abs=1e-9)


@given(seqs())
def test_inverse_and_division(s):
    one = mul(s, s.inverse())
    assert one.tail == (0, 0, 0)
    assert one.scale == pytest.approx(1.0)
    assert (s / s).tail == (0, 0, 0)


# -- indices ------------------------------------------------------------------


@given(seqs(with_prefix=True))
def test_indices_are_the_rate(s):
    assert indices(s).lower == indices(s).upper == s.rate
    assert boyd_indices(s).lower == s.rate


def test_indices_ignore_prefix():
    s = SeqExpr(rate=Fraction(3, 10), prefix=(7.0, 0.1))
    assert (indices(s).lower, indices(s).upper) == (Fraction(3, 10), Fraction(3, 10))


@given(seqs(), seqs())
def test_indices_of_products_add(s1, s2):
    assert indices(mul(s1, s2)).upper == indices(s1).upper + indices(s2).upper
    assert indices(mul(s1, s2)).lower == indices(s1).lower + indices(s2).lower


@pytest.mark.parametrize(
    "seq,target",
    [
        (paren(Fraction(2, 5)), 0.4),
        (SeqExpr(), 0.0),
        (SeqExpr(rate=-1, polylog=2), -1.0),
    ],
)
def test_numeric_boyd_converges(seq, target):
    # sup/inf over shifts of (1/j) log2(sigma_{j+k}/sigma_k) approach the rate
    errs = []
    for j in (100, 1000, 10000):
        est = numeric_boyd(seq, j, shifts=2000)
        assert est.lower <= est.upper
        errs.append(max(abs(est.lower - target), abs(est.upper - target)))
    # the polylog factor contributes at most 2 log2(1+j)/j
    assert errs[-1] < 3 * math.log2(10000) / 10000
    assert errs == sorted(errs, reverse=True)


def test_numeric_boyd_sandwich():
    # s_(sigma) <= beta <= alpha <= s^(sigma) at finite j for a sequence with b > 0
    s = SeqExpr(rate=Fraction(2, 5), polylog=3)
    est = numeric_boyd(s, 500)
    r = np.diff(s.log2_values(4000))
    assert r.min() - 1e-12 <= est.lower <= est.upper <= r.max() + 1e-12


# -- tabulated indices --------------------------------------------------------


def test_tabulated_power():
    t = tabulated_indices([2 ** (0.5 * j) for j in range(64)])
    assert abs(t.lower - 0.5) < 1e-12 and abs(t.upper - 0.5) < 1e-12
    assert t.stable


def test_tabulated_constant():
    t = tabulated_indices([3.0] * 20)
    assert (t.lower, t.upper) == (0.0, 0.0)
    assert t.stable


def test_tabulated_oscillating_is_unstable():
    vals = [2.0 ** (j * (1 if j % 2 == 0 else 2)) for j in range(64)]
    t = tabulated_indices(vals)
    # ratios log2(v_{j+1}/v_j) are j+2 (j even) and 1-j (j odd); the last
    # window covers j = 31..62
    assert t.lower == -60.0
    assert t.upper == 64.0
    assert not t.stable


@pytest.mark.parametrize("vals", [[1.0] * 7, [1.0] * 7 + [0.0], [1.0] * 8 + [-2.0]])
def test_tabulated_rejects(vals):
    with pytest.raises(ValueError):
        tabulated_indices(vals)


# -- exponents ----------------------------------------------------------------


def test_dual_exponent_values():
    assert dual_exponent(1) == INF
    assert dual_exponent(Fraction(1, 2)) == INF
    assert dual_exponent(2) == 2
    assert dual_exponent(3) == Fraction(3, 2)
    assert dual_exponent(INF) == 1


def test_q_star_values():
    assert q_star(2, 2) == INF
    assert q_star(4, 2) == 4
    assert q_star(1, 2) == INF
    assert q_star(INF, 1) == 1
    assert q_star(2, 1) == 2


@given(st.one_of(st.just(INF), rationals(1, 50)))
def test_dual_is_an_involution_on_one_to_inf(q):
    assert dual_exponent(dual_exponent(q)) == q


@given(rationals(Fraction(1, 100), 1))
def test_dual_of_small_exponents_is_inf(q):
    assert dual_exponent(q) == INF


@pytest.mark.parametrize("bad", [0, -1, "abc"])
def test_bad_exponents(bad):
    with pytest.raises((ValueError, TypeError)):
        dual_exponent(bad)


def test_format_number():
    assert format_number(Fraction(3, 10)) == "0.3"
    assert format_number(Fraction(-1, 8)) == "-0.125"
    assert format_number(Fraction(1, 3)) == "1/3"
    assert format_number(Fraction(4)) == "4"


# -- l_q membership -----------------------------------------------------------


@given(seqs(rate=(-3, Fraction(-1, 10))), exponents)
def test_decay_is_in_every_lq(s, q):
    assert lq_membership(s, q).member


def test_harmonic_is_out_of_l1():
    d = lq_membership(SeqExpr(polylog=-1), 1)
    assert d.verdict is Membership.OUT
    # oracle: partial sums grow like ln N
    ps = partial_sums(SeqExpr(polylog=-1), 1, 10**6)
    assert ps[-1] == pytest.approx(math.log(10**6 + 1) + 0.5772156649, rel=1e-5)
    assert ps[10**6] - ps[10**5] > 2.0


def test_inverse_square_is_in_l1():
    assert lq_membership(SeqExpr(polylog=-2), 1).member
    ps = partial_sums(SeqExpr(polylog=-2), 1, 10**6)
    assert ps[-1] == pytest.approx(math.pi**2 / 6, rel=1e-5)


def test_constant_is_in_linf():
    assert lq_membership(SeqExpr(), INF).member
    assert not lq_membership(SeqExpr(), 5).member


@pytest.mark.parametrize(
    "tail,q,want",
    [
        ((0, 0, 0), INF, True),
        ((0, -1, 0), INF, True),
        ((0, 0, 1), INF, False),
        ((0, 0, -1), INF, True),
        ((0, 1, -5), INF, False),
        ((0, Fraction(-1, 2), 0), 2, False),
        ((0, Fraction(-1, 2), -1), 2, True),  # bq = -1, cq = -2
        ((0, -1, -2), 1, True),
        ((0, -1, -1), 1, False),  # iterated-log boundary decided Out
        ((0, -1, 0), 1, False),
        ((1, -10, -10), 1, False),
        ((Fraction(-1, 1000), 10, 10), 1, True),
    ],
)
def test_lq_table(tail, q, want):
    a, b, c = tail
    got = lq_membership(SeqExpr(rate=a, polylog=b, loglog=c), q)
    assert got.member is want


def test_iterated_log_boundary_reason():
    d = lq_membership(SeqExpr(polylog=-1, loglog=-1), 1)
    assert d.verdict is Membership.OUT
    assert "iterated-log" in d.reason


@given(seqs(with_prefix=True), exponents)
def test_prefix_irrelevant(s, q):
    bare = SeqExpr(scale=s.scale, rate=s.rate, polylog=s.polylog, loglog=s.loglog)
    assert lq_membership(s, q).verdict == lq_membership(bare, q).verdict


@given(seqs(), finite_exponents, exponents)
def test_lq_monotone_in_q(s, q, q2):
    if q2 >= q and lq_membership(s, q).member:
        assert lq_membership(s, q2).member


@given(seqs(), exponents, st.integers(1, 8))
def test_subsequence_stable(s, q, iota0):
    assert lq_membership(subsequence(s, iota0), q).verdict == lq_membership(s, q).verdict


@given(seqs(rate=(0, 0)), st.integers(1, 8))
def test_subsequence_tail_equivalent(s, iota0):
    # (sigma_{k iota0}) / subsequence(s, iota0)_k -> 1; the rate part is exact,
    # the loglog part converges like ln(iota0) / ln(k)
    sub = subsequence(s, iota0)
    k = 10**200
    tol = abs(float(s.loglog)) * math.log2(1 + math.log(iota0) / math.log(k)) + 1e-9
    assert abs(s.formula_log2(k * iota0) - sub.formula_log2(k)) <= tol


@given(seqs(rate=(-4, -1), polylog=(-2, 2), loglog=(-2, 2)), st.sampled_from([Fraction(1, 2), Fraction(1), Fraction(2), Fraction(4)]))
@settings(max_examples=100)
def test_in_partial_sums_stabilise(s, q):
    ps = partial_sums(s, q, 200)
    incr = np.diff(ps) / ps[1:]
    assert lq_membership(s, q).member
    assert incr.min() < 1e-9


@given(seqs(rate=(0, 0), polylog=(-2, 2), loglog=(-2, 2)), finite_exponents)
@settings(max_examples=40, deadline=None)
def test_out_partial_sums_keep_growing(s, q):
    if not lq_membership(s, q).member:
        ps = partial_sums(s, q, 4 * 10**5)
        assert (ps[4 * 10**5] - ps[10**5]) / ps[10**5] > 1e-3


def test_landau_dual_table():
    assert landau_dual(1, 2, paren(-1)).member
    assert not landau_dual(2, 1, SeqExpr()).member
    assert landau_dual(2, 1, SeqExpr()).q == 2
    assert landau_dual(1, 2, SeqExpr()).member
    assert landau_dual(1, 2, SeqExpr()).q == INF


# -- numerics -----------------------------------------------------------------


def test_lq_norm_log2():
    x = np.log2(np.array([3.0, 4.0]))
    assert 2 ** lq_norm_log2(x, 2) == pytest.approx(5.0)
    assert 2 ** lq_norm_log2(x, INF) == pytest.approx(4.0)
    assert lq_norm_log2(np.array([-np.inf]), 1) == -INF
    # no overflow for huge entries
    assert lq_norm_log2(np.array([5000.0, 5000.0]), 1) == pytest.approx(5001.0)


def test_partial_sums_reject_inf():
    with pytest.raises(ValueError):
        partial_sums(SeqExpr(), INF, 10)
