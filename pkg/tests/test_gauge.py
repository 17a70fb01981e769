import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hsetembed.gauge import (
    GaugeExpr,
    NotAGaugeError,
    dset,
    h_index_conditions,
    hseq,
    in_H,
    is_measure_function,
    isotropy_level,
    numeric_strong_isotropy_equivalences,
    porosity,
    strong_isotropy,
)
from hsetembed.seqcalc import SeqExpr, lq_membership
from strategies import gauges


def test_hseq_of_dset():
    assert hseq(dset(Fraction(7, 10))) == SeqExpr(rate=Fraction(-7, 10))


def test_hseq_of_log_gauge():
    assert hseq(GaugeExpr(beta=-2)) == SeqExpr(polylog=-2)


def test_hseq_mixed_at_one():
    # 2^{-1} * (1 + 1)^1 = 1
    g = GaugeExpr(d=1, beta=1)
    assert hseq(g).value(1) == 1.0
    assert g(0.5) == 1.0


@given(gauges(n=3), st.sampled_from([1.0, 0.25, 5.0]))
@settings(max_examples=200)
def test_hseq_matches_gauge(g, scale):
    g = GaugeExpr(scale=scale, d=g.d, beta=g.beta, n=g.n)
    h = hseq(g)
    for j in range(65):
        want = g(2.0**-j)
        assert abs(h.value(j) - want) <= 4 * math.ulp(want)


def test_construction_rejects():
    with pytest.raises(ValueError):
        GaugeExpr(d=-1)
    with pytest.raises(ValueError):
        GaugeExpr(d=2, n=1)
    with pytest.raises(ValueError):
        GaugeExpr(d=1, n=0)


def test_not_in_H():
    for g in (GaugeExpr(), GaugeExpr(beta=1)):
        assert not in_H(g)
        with pytest.raises(NotAGaugeError):
            hseq(g)
        with pytest.raises(NotAGaugeError):
            is_measure_function(g)
    assert in_H(GaugeExpr(beta=-1))
    assert in_H(dset(Fraction(1, 100)))


def test_measure_function_examples():
    assert is_measure_function(dset(Fraction(7, 10))).holds
    assert is_measure_function(GaugeExpr(beta=-1)).holds
    assert is_measure_function(GaugeExpr(d=1, beta=0)).holds
    assert is_measure_function(GaugeExpr(d=1, beta=1)).holds
    assert is_measure_function(GaugeExpr(d=1, beta=-1)).fails


def test_measure_function_ratio_oracle():
    # d = n, beta = -1: h_k / h_0 * 2^{kn} = (1+k)^{-1} has no positive lower bound
    h = hseq(GaugeExpr(d=1, beta=-1))
    k = np.arange(61)
    ratio = h.values(60) / h.value(0) * 2.0**k
    assert ratio[-1] == pytest.approx(1 / 61)
    assert np.all(np.diff(ratio) < 0)
    # beta = 0: the ratio is identically 1
    h = hseq(GaugeExpr(d=1))
    assert np.allclose(h.values(60) * 2.0**k, 1.0)


def test_porosity_examples():
    assert porosity(dset(Fraction(1, 2))).holds
    assert porosity(GaugeExpr(d=1)).fails
    assert porosity(GaugeExpr(beta=-2)).holds
    assert porosity(GaugeExpr(d=2, beta=3, n=2)).fails
    assert porosity(GaugeExpr(d=Fraction(3, 2), n=2)).holds


def test_porosity_requires_measure_function():
    with pytest.raises(ValueError):
        porosity(GaugeExpr(d=1, beta=-1))


def test_porosity_ratio_oracle():
    # d=0, beta=-2: h_{j+k}/h_j = ((1+j)/(1+j+k))^2 beats 2^{-(1-eps)k} with eps = 1/2
    h = hseq(GaugeExpr(beta=-2)).values(400)
    j, k = np.meshgrid(np.arange(200), np.arange(200))
    ratio = h[j + k] / h[j]
    assert np.min(ratio / 2.0 ** (-0.5 * k)) > 0.05


def test_strong_isotropy_examples():
    assert strong_isotropy(dset(Fraction(1, 2))).holds
    assert strong_isotropy(GaugeExpr(beta=-1)).fails
    assert strong_isotropy(dset(Fraction(1, 100))).holds


def test_isotropy_level_small_d():
    # 2^{-k/100} <= 1/2 first at k = 100
    assert isotropy_level(dset(Fraction(1, 100))) == 100
    assert isotropy_level(dset(1)) == 1
    assert isotropy_level(dset(Fraction(1, 2))) == 2
    assert isotropy_level(GaugeExpr(beta=-1)) is None


def test_isotropy_level_scan():
    # direct scan j <= 1000 for a gauge with a log factor
    g = GaugeExpr(d=Fraction(1, 2), beta=1)
    k = isotropy_level(g)
    h = hseq(g)
    lv = h.log2_values(1000 + k)
    assert np.all(lv[k:] - lv[:-k] <= -1 + 1e-12)
    assert np.any(lv[k - 1 :] - lv[: -(k - 1)] > -1)


def test_index_conditions():
    c = h_index_conditions(dset(Fraction(1, 2)))
    assert (c.upind_h, c.lowind_h, c.T1) == (Fraction(-1, 2), Fraction(-1, 2), True)
    c = h_index_conditions(GaugeExpr(beta=-1))
    assert c.upind_h == 0 and not c.T1
    assert h_index_conditions(dset(1)).T1
    assert h_index_conditions(GaugeExpr(d=2, n=2)).T1


def test_isotropy_sums_dset():
    s = numeric_strong_isotropy_equivalences(dset(Fraction(1, 2)), 60)
    assert 1 <= s.upper_min and s.upper_max <= 1 / (1 - 2**-0.5) + 0.01
    assert 1 <= s.lower_min and s.lower_max <= 1 / (1 - 2**-0.5) + 0.01


def test_isotropy_sums_unit_dimension():
    s = numeric_strong_isotropy_equivalences(dset(1), 60)
    assert s.upper_max == pytest.approx(2.0, rel=1e-12)
    assert s.lower_max == pytest.approx(2.0, rel=1e-12)


def test_isotropy_sums_log_gauge_grow():
    g = GaugeExpr(beta=Fraction(-1, 2))
    bounds = [numeric_strong_isotropy_equivalences(g, J).bound for J in (64, 256, 1024)]
    assert bounds[0] < bounds[1] < bounds[2]
    assert bounds[2] > 2 * bounds[0]


@given(gauges(n=2))
def test_porosity_implies_measure_function(g):
    if is_measure_function(g).holds and porosity(g).holds:
        assert is_measure_function(g).holds


@given(gauges(n=2))
def test_strong_isotropy_implies_l1(g):
    if strong_isotropy(g).holds:
        assert lq_membership(hseq(g), 1).member


@given(gauges(n=2))
@settings(max_examples=50)
def test_gauge_is_monotone(g):
    rng = np.random.default_rng(0)
    pairs = np.sort(rng.uniform(1e-12, 1.0, size=(1000, 2)), axis=1)
    for r1, r2 in pairs:
        # non-decreasing near 0; allow rounding
        assert g(r1) <= g(r2) * (1 + 1e-12) or _log_bump(g, r1, r2)


def _log_bump(g, r1, r2):
    # for d > 0 and beta > 0, log h = -d L ln2 + beta ln(1+L) increases in L
    # while 1 + L < beta / (d ln 2), i.e. h decreases in r on (2^{1-beta/(d ln 2)}, 1]
    if g.beta <= 0:
        return False
    turn = 2.0 ** (1 - float(g.beta) / (float(g.d) * math.log(2)))
    return r2 > turn
