import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from biorlicz import nfunc
from biorlicz.errors import ConfigurationError, DomainError

FAMILIES = [
    nfunc.power(2),
    nfunc.power(3),
    nfunc.power(1.5),
    nfunc.power_log(2, 1),
    nfunc.square_over_log2(),
    nfunc.exponential(),
]


def test_closed_forms():
    assert nfunc.power(2)(3.0) == 9.0
    for nf in FAMILIES:
        assert nf(0.0) == 0.0


def test_power_log_at_one_matches_density_quadrature():
    nf = nfunc.power_log(2, 1)
    oracle, _ = integrate.quad(nf.phi, 0.0, 1.0, epsabs=1e-14, epsrel=1e-13)
    assert nf(1.0) == pytest.approx(math.log(math.e + 1), rel=1e-14)
    assert nf(1.0) == pytest.approx(oracle, rel=1e-10)
    assert nf(1.0) == pytest.approx(1.31326, abs=1e-5)


@pytest.mark.parametrize("nf", FAMILIES, ids=lambda f: f.label)
def test_density_consistent_with_closed_form(nf):
    for a, b in [(0.0, 0.5), (0.3, 2.0), (1.0, 7.5), (2.0, 20.0)]:
        q, _ = integrate.quad(nf.phi, a, b, epsabs=0, epsrel=1e-12, limit=200)
        assert nf(b) - nf(a) == pytest.approx(q, rel=1e-8)


@pytest.mark.parametrize("nf", FAMILIES, ids=lambda f: f.label)
def test_convex_increasing_and_limits(nf):
    t = np.geomspace(1e-6, 30.0, 2000)
    v = nf(t)
    assert np.all(np.diff(v) > 0)
    mid = nf(0.5 * (t[:-2] + t[2:]))
    assert np.all(mid <= 0.5 * (v[:-2] + v[2:]) + 1e-12 * v[2:])
    assert nf(1e-8) / 1e-8 < 1e-3
    assert nf(1e6 if nf.label != "e^t-t-1" else 50.0) / 1e6 > 1.0


@pytest.mark.parametrize("bad", [-1.0, math.nan, math.inf, np.array([1.0, -0.5])])
def test_domain_errors(bad):
    with pytest.raises(DomainError):
        nfunc.evaluate(nfunc.power(2), bad)


def test_family_lookup():
    assert nfunc.by_name("power", p=3)(2.0) == 8.0
    assert nfunc.by_name("square_over_log2").spec() == {"family": "square_over_log2"}
    with pytest.raises(ConfigurationError):
        nfunc.by_name("nope")
    with pytest.raises(ConfigurationError):
        nfunc.by_name("power", q=2)
    with pytest.raises(DomainError):
        nfunc.power(1.0)


def test_doubling_constants():
    assert nfunc.check_doubling(nfunc.power(2)).constant == pytest.approx(4.0, rel=1e-12)
    assert nfunc.check_doubling(nfunc.power(3)).constant == pytest.approx(8.0, rel=1e-12)
    pl = nfunc.check_doubling(nfunc.power_log(2, 1))
    assert pl.holds and 4.0 <= pl.constant <= 8.0
    # the ratio 4 log(e+2t)/log(e+t) peaks below 8 on any t >= 0
    t = np.geomspace(1e-6, 1e12, 200_001)
    oracle = np.max(4 * np.log(math.e + 2 * t) / np.log(math.e + t))
    assert pl.constant <= oracle + 1e-12
    assert nfunc.check_doubling(nfunc.power(1.5)).constant >= 2.0


def test_exponential_is_not_doubling():
    est = nfunc.check_doubling(nfunc.exponential())
    assert not est.holds


def test_doubling_grid_requirements():
    with pytest.raises(ConfigurationError):
        nfunc.check_doubling(nfunc.power(2), nfunc.LogGrid(points=100))
    with pytest.raises(ConfigurationError):
        nfunc.check_doubling(nfunc.power(2), nfunc.LogGrid(1e-2, 1e3))


def test_ainc():
    assert nfunc.check_ainc(nfunc.power(2), 2, 0.0).constant == pytest.approx(1.0)
    est = nfunc.check_ainc(nfunc.power_log(2, 1), 2, 0.0)
    assert est.holds and est.constant == pytest.approx(1.0)
    bad = nfunc.check_ainc(nfunc.power(1.5), 2, 1.0)
    # running-max oracle: g = t^-0.5 is decreasing, so C_A = sqrt(T_max / t0)
    assert not bad.holds
    assert bad.constant == pytest.approx(math.sqrt(1e8), rel=1e-9)
    with pytest.raises(DomainError):
        nfunc.check_ainc(nfunc.power(2), 1.0)


def test_largest_ainc_exponent():
    assert nfunc.largest_ainc_exponent(nfunc.power(3)).exponent == 3.0
    assert nfunc.largest_ainc_exponent(nfunc.power(1.5)).exponent == 1.5


def test_superadditivity_examples():
    assert nfunc.superadditivity_defect(nfunc.power(2), 1.0, 2.0) == pytest.approx(4.0)
    for nf in FAMILIES:
        assert nfunc.superadditivity_defect(nf, 0.0, 5.0) == pytest.approx(0.0, abs=1e-12)
    pl = nfunc.power_log(2, 1)
    expected = 4 * math.log(math.e + 2) - 2 * math.log(math.e + 1)
    assert nfunc.superadditivity_defect(pl, 1.0, 1.0) == pytest.approx(expected, rel=1e-14)
    assert expected == pytest.approx(3.57926, abs=1e-5)
    with pytest.raises(DomainError):
        nfunc.superadditivity_defect(pl, -1.0, 1.0)


@pytest.mark.parametrize("nf", FAMILIES, ids=lambda f: f.label)
def test_superadditivity_random_pairs(nf):
    rng = np.random.default_rng(11)
    top = 40.0 if nf.label == "e^t-t-1" else 1e4
    a, b = rng.uniform(0, top, (2, 10_000))
    defect = nf(a + b) - nf(a) - nf(b)
    assert np.all(defect >= -1e-12 * nf(a + b))


@settings(max_examples=200, deadline=None)
@given(st.floats(0, 1e3), st.floats(0, 1e3))
def test_superadditivity_property(a, b):
    nf = nfunc.power_log(2, 1)
    assert nfunc.superadditivity_defect(nf, a, b) >= -1e-12 * nf(a + b)


def test_tail_closed_forms():
    rep = nfunc.tail_integral(nfunc.power(1.5))
    assert rep.verdict == "converged"
    # exact value over [1, 2^30] is 2 - 2^-14
    assert rep.value == pytest.approx(2.0 - 2.0**-14, rel=1e-12)
    sq = nfunc.tail_integral(nfunc.power(2))
    assert np.allclose(sq.increments, math.log(2), rtol=1e-12)
    assert sq.verdict == "diverging"


def tail_oracle(nf, t_max):
    # adaptive quadrature in s = log t, independent of the fixed octave rule
    val, _ = integrate.quad(lambda s: nf(math.exp(s)) * math.exp(-2 * s), 0.0, math.log(t_max),
                            epsabs=0, epsrel=1e-9, limit=1000)
    return val


def test_tail_borderline_matches_adaptive_quadrature():
    nf = nfunc.square_over_log2()
    rep = nfunc.tail_integral(nf)
    oracle = tail_oracle(nf, rep.t_max)
    assert rep.verdict == "converged"
    assert abs(rep.value - oracle) <= 0.01 * oracle
    assert rep.value == pytest.approx(oracle, rel=1e-9)


def test_tail_truncation_gap_is_logarithmic():
    # int_T^inf dt / (t log^2 t) ~ 1 / log T: the truncated value sits below the full one
    nf = nfunc.square_over_log2()
    rep = nfunc.tail_integral(nf)
    # for large t the integrand in s is 1 / log(e + e^s)^2 ~ 1 / s^2
    beyond, _ = integrate.quad(lambda s: 1.0 / math.log(math.e + math.exp(min(s, 700.0))) ** 2
                               if s < 700 else 1.0 / s**2,
                               30 * math.log(2), math.inf, epsrel=1e-9, limit=500)
    full = tail_oracle(nf, 2.0**30) + beyond
    assert 0.5 / math.log(2.0**30) < full - rep.value < 1.5 / math.log(2.0**30)


@pytest.mark.parametrize("nf", FAMILIES, ids=lambda f: f.label)
def test_tail_verdicts_agree_with_discrete_counterpart(nf):
    rep = nfunc.tail_integral(nf)
    assert rep.verdict == rep.discrete_verdict


def test_tail_needs_long_range():
    with pytest.raises(DomainError):
        nfunc.tail_integral(nfunc.power(2), t_max=100.0)


def test_growth_report_fields():
    rep = nfunc.growth_report(nfunc.power(2)).to_dict()
    assert rep["doubling_constant"] == pytest.approx(4.0)
    assert rep["ainc_constant"] == pytest.approx(1.0)
    assert rep["ainc_exponent"] == 2.0 and rep["ainc_threshold"] == 0.0
    assert rep["tail_verdict"] == "diverging"
    assert rep["doubling_constant"] >= 2 and rep["ainc_constant"] >= 1
