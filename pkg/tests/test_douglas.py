import math

import numpy as np
import pytest
from scipy import integrate

from biorlicz import boundary, douglas, nfunc
from biorlicz.errors import ConfigurationError, ResolutionError


def naive_douglas(u, nf, depth):
    """Level terms straight from the definition, one interval at a time."""
    out = []
    for n in range(1, depth + 1):
        s = 0.0
        for k in range(1, 2**n + 1):
            s += float(nf((u(k / 2**n) - u((k - 1) / 2**n)) * 2**n))
        out.append(s * 4.0**-n)
    return np.array(out)


def test_identity_exact_cumulative():
    rep = douglas.discrete_douglas(boundary.image_lengths(boundary.identity(), 20),
                                   nfunc.power(2))
    assert np.array_equal(rep.per_level, 2.0 ** -np.arange(1, 21))
    assert abs(rep.cumulative[-1] - (1 - 2.0**-20)) <= 1e-12
    assert rep.verdict == "converging"


@pytest.mark.parametrize("alpha,p", [(0.5, 2), (0.1, 3), (0.3, 2.5)])
def test_matches_naive_sum(alpha, p):
    bh = boundary.power_map(alpha)
    nf = nfunc.power(p)
    rep = douglas.discrete_douglas(boundary.image_lengths(bh, 9), nf)
    assert np.allclose(rep.per_level, naive_douglas(lambda x: x**alpha, nf, 9), rtol=1e-12)


def test_power_scaling_verdicts():
    table = boundary.image_lengths(boundary.power_map(0.1), 14)
    cubic = douglas.discrete_douglas(table, nfunc.power(3), 14)
    sq = douglas.discrete_douglas(table, nfunc.power(2), 14)
    t3 = cubic.per_level[7:14]  # levels 8..14
    t2 = sq.per_level[7:14]
    assert np.all(np.diff(t3) >= 0)
    assert np.all(t2[1:] / t2[:-1] < 0.95)
    assert cubic.verdict == "diverging" and sq.verdict == "converging"
    # the k=1 term alone is 2^{n(p(1-alpha)-2)}
    n = np.arange(1, 15)
    first = table.lengths[14][0]
    assert first == pytest.approx(2.0 ** (-14 * 0.1))
    lead = np.array([float(nfunc.power(3)(table.lengths[m][0] * 2.0**m)) * 4.0**-m for m in n])
    assert np.allclose(lead, 2.0 ** (n * (3 * 0.9 - 2)), rtol=1e-12)


def test_threshold_helper():
    assert douglas.p_douglas_threshold(0.5) == 4.0
    assert douglas.p_douglas_threshold(0.1) == pytest.approx(20 / 9)
    assert douglas.p_douglas_threshold(1.0) == math.inf


def test_report_invariants_and_errors():
    table = boundary.image_lengths(boundary.random_piecewise_linear(7, 16), 10)
    rep = douglas.discrete_douglas(table, nfunc.power_log(2, 1))
    assert np.all(rep.per_level >= 0)
    assert np.all(np.diff(rep.cumulative) >= 0)
    assert set(rep.to_dict()) == {"label", "verdict", "levels", "per_level", "cumulative"}
    with pytest.raises(ConfigurationError):
        douglas.discrete_douglas(table, nfunc.power(2), 11)
    with pytest.raises(ConfigurationError):
        douglas.discrete_douglas(table, nfunc.power(2), 0)


def test_inverse_hook_is_plain_douglas_of_inverse():
    bh = boundary.power_map(0.5)
    inv_table = boundary.image_lengths(bh.inverse(), 8)
    rep = douglas.discrete_douglas(inv_table, nfunc.power(2))
    assert np.allclose(rep.per_level, naive_douglas(lambda x: x**2, nfunc.power(2), 8), rtol=1e-12)


def test_continuous_identity():
    c = douglas.continuous_douglas(boundary.identity(), nfunc.power(2), 10)
    assert np.allclose(c.estimates, 1 - 2.0 ** -np.arange(1, 11), rtol=0, atol=1e-12)
    assert c.far_field == pytest.approx(0.5)
    u = douglas.continuous_douglas(boundary.identity(), nfunc.power(2), 6, grid=2**10)
    assert u.scheme == "uniform"
    assert u.estimate == pytest.approx(1 - 2.0**-6, abs=1e-3)


def test_continuous_band_matches_adaptive_quadrature():
    # band 1/8 < d <= 1/4 of the power(0.5) map; U is the lift U(y+1) = U(y)+1
    def U(y):
        return y**0.5 if y < 1 else 1 + (y - 1) ** 0.5

    oracle, _ = integrate.dblquad(lambda d, x: 2 * ((U(x + d) - U(x)) / d) ** 2,
                                  0, 1, 0.125, 0.25, epsabs=1e-10, epsrel=1e-8)
    c = douglas.continuous_douglas(boundary.power_map(0.5), nfunc.power(2), 3)
    assert c.bands[1] == pytest.approx(oracle, rel=1e-3)


def test_continuous_trends():
    p05 = douglas.continuous_douglas(boundary.power_map(0.5), nfunc.power(2), 12)
    inc = p05.bands
    assert np.all(inc[1:] / inc[:-1] < 0.9)
    assert np.all(np.diff(p05.estimates) >= 0)
    p01 = douglas.continuous_douglas(boundary.power_map(0.1), nfunc.power(3), 12)
    assert p01.verdict == "diverging"
    assert np.all(np.diff(p01.bands[6:]) > 0)
    assert np.isfinite(p01.far_field)


def test_resolution_error():
    with pytest.raises(ResolutionError):
        douglas.continuous_douglas(boundary.identity(), nfunc.power(2), 8, grid=256)
    with pytest.raises(ResolutionError):
        douglas.continuous_douglas(boundary.identity(), nfunc.power(2), 4, grid=100)


def test_continuous_is_deterministic():
    a = douglas.continuous_douglas(boundary.random_piecewise_linear(3, 9), nfunc.power(3), 8)
    b = douglas.continuous_douglas(boundary.random_piecewise_linear(3, 9), nfunc.power(3), 8)
    assert np.array_equal(a.estimates, b.estimates)


def test_equivalence_examples():
    ident = douglas.equivalence_report(boundary.identity(), nfunc.power(2), 12)
    assert np.allclose(ident.ratios, 1.0, rtol=0, atol=1e-12)
    p05 = douglas.equivalence_report(boundary.power_map(0.5), nfunc.power(2), 12)
    lo, hi = p05.bracket(6)
    assert 1 / 64 <= lo <= hi <= 64
    assert hi / lo < 1.2
    p01 = douglas.equivalence_report(boundary.power_map(0.1), nfunc.power(3), 12)
    assert p01.discrete.verdict == p01.continuous.verdict == "diverging"
    d = p01.to_dict()
    assert d["verdicts_agree"] is True and len(d["ratios"]) == 12
