import math

import numpy as np
import pytest
from scipy import integrate

from biorlicz import analysis, boundary, extension as ext, nfunc
from biorlicz.errors import ConfigurationError, PreconditionError, ResolutionError


def brute_maximal(f):
    m = f.shape[0]
    out = f.copy()
    r = 1
    while r <= m:
        for i in range(m):
            for j in range(m):
                win = f[max(i - r, 0) : i + r + 1, max(j - r, 0) : j + r + 1]
                out[i, j] = max(out[i, j], win.mean())
        r *= 2
    return out


def test_maximal_transform_matches_brute_force():
    f = np.random.default_rng(4).random((16, 16)) ** 3
    M = analysis.maximal_transform(analysis.GridField(f)).values
    assert np.allclose(M, brute_maximal(f), rtol=1e-12)
    assert np.all(M >= f)


def test_maximal_transform_with_mask():
    f = np.ones((8, 8))
    mask = np.zeros((8, 8), dtype=bool)
    mask[:, :4] = True
    M = analysis.maximal_transform(analysis.GridField(f * mask, mask)).values
    assert np.allclose(M[mask], 1.0) and np.all(M[~mask] == 0)


def test_constant_field():
    c, t0 = 3.0, 1.0
    fld = analysis.GridField(np.full((64, 64), c))
    res = analysis.maximal_inequality_test(fld, nfunc.power(2), 2, t0)
    assert res.lhs == pytest.approx(c**2)
    assert res.ratio == pytest.approx(c**2 / (c**2 + t0**2))
    assert res.ratio <= 1


def test_indicator_left_half():
    m = 512
    f = np.zeros((m, m))
    f[:, : m // 2] = 1.0
    res = analysis.maximal_inequality_test(analysis.GridField(f), nfunc.power(2), 2, 0.0)
    assert np.isfinite(res.lhs) and res.ratio <= 5


def test_maximal_preconditions():
    fld = analysis.GridField(np.ones((8, 8)))
    with pytest.raises(PreconditionError):
        analysis.maximal_inequality_test(fld, nfunc.exponential(), 2)
    with pytest.raises(PreconditionError):
        analysis.maximal_inequality_test(fld, nfunc.power(1.5), 2, 1.0)


def test_grid_field_validation():
    with pytest.raises(ConfigurationError):
        analysis.GridField(np.ones((4, 5)))
    with pytest.raises(ConfigurationError):
        analysis.GridField(-np.ones((4, 4)))
    with pytest.raises(ConfigurationError):
        analysis.GridField(np.ones((4, 4)), np.ones((2, 2)))


def test_sampled_distortion_of_power_mesh():
    mesh = ext.build_extension(boundary.power_map(0.5), 12)
    fld = analysis.sample_distortion(mesh, 512)
    res = analysis.maximal_inequality_test(fld, nfunc.power_log(2, 1), 2, 1.0)
    assert np.isfinite(res.lhs) and res.lhs >= res.rhs - fld.domain_area * nfunc.power_log(2, 1)(1.0)


def test_identity_probe():
    mesh = ext.build_extension(boundary.identity(), 10)
    for n, k in [(3, 4), (5, 17), (8, 100)]:
        p = analysis.onlyif_probe(mesh, mesh.table, n, k)
        assert p.lhs == pytest.approx(4.0**-n)
        assert p.rhs == pytest.approx(9 * 4.0**-n, rel=1e-12)
        assert p.slack == pytest.approx(9.0)
    edge = analysis.onlyif_probe(mesh, mesh.table, 3, 1)
    assert edge.rhs == pytest.approx(6 * 4.0**-3)  # clipped at x = 0


def test_window_integral_matches_sampling():
    mesh = ext.build_extension(boundary.power_map(0.5), 9)
    x0, x1, y0, y1 = analysis.probe_window(3, 2)
    m = 1024
    xs = x0 + (np.arange(m) + 0.5) * (x1 - x0) / m
    ys = y0 + (np.arange(m) + 0.5) * (y1 - y0) / m
    X, Y = np.meshgrid(xs, ys)
    sampled = ext.distortion_at(mesh, np.column_stack((X.ravel(), Y.ravel()))).mean()
    sampled *= (x1 - x0) * (y1 - y0)
    assert analysis.window_integral(mesh, x0, x1, y0, y1) == pytest.approx(sampled, rel=2e-3)


def test_probes_power_maps():
    p05 = ext.build_extension(boundary.power_map(0.5), 10)
    assert all(analysis.onlyif_probe(p05, p05.table, 4, k).holds for k in range(1, 17))
    p01 = ext.build_extension(boundary.power_map(0.1), 10)
    singular = analysis.onlyif_probe(p01, p01.table, 6, 1)
    assert singular.holds and singular.slack > 1
    with pytest.raises(ConfigurationError):
        analysis.onlyif_probe(p01, p01.table, 10, 1)
    with pytest.raises(ConfigurationError):
        analysis.onlyif_probe(p01, p01.table, 3, 9)


def test_probe_window_shape():
    assert analysis.probe_window(3, 4) == pytest.approx((3.5 / 8 - 1.5 / 8, 3.5 / 8 + 1.5 / 8, 0.0, 3 / 8))
    assert analysis.probe_window(1, 1) == (0.0, 1.0, 0.0, 1.0)


def test_harmonic_identity_and_rotation():
    th = np.linspace(0, 2 * np.pi, 50)
    for r in (0.0, 0.3, 0.6, 0.9):
        z = analysis.harmonic_extension(boundary.identity(), r, th)
        assert np.max(np.abs(z - r * np.exp(1j * th))) <= 1e-6
    rot = analysis.harmonic_extension(boundary.identity(), 0.8, th, shift=0.3)
    assert np.max(np.abs(rot - 0.8 * np.exp(1j * (th + 0.6 * np.pi)))) <= 1e-6
    with pytest.raises(ResolutionError):
        analysis.harmonic_extension(boundary.identity(), 0.995, 0.0)


def test_harmonic_power_map_converges():
    bh = boundary.power_map(0.5)
    a = analysis.harmonic_extension(bh, 0.5, np.pi)
    b = analysis.harmonic_extension(bh, 0.5, np.pi, nodes=8192)
    assert abs(a - b) <= 1e-6

    def kernel(t):
        return (1 - 0.25) / (1 - np.cos(np.pi - t) + 0.25)

    # oracle: adaptive quadrature in x, where the map is x -> sqrt(x)
    re = integrate.quad(lambda x: kernel(2 * np.pi * x) * np.cos(2 * np.pi * math.sqrt(x)), 0, 1,
                        epsabs=1e-13, limit=200)[0]
    im = integrate.quad(lambda x: kernel(2 * np.pi * x) * np.sin(2 * np.pi * math.sqrt(x)), 0, 1,
                        epsabs=1e-13, limit=200)[0]
    assert abs(a - complex(re, im)) <= 1e-9


def test_theorem_examples():
    ident = analysis.theorem_experiment(boundary.identity(), nfunc.power(2), nfunc.power(2), 12)
    assert ident.consistent is True
    assert {ident.douglas_fwd, ident.douglas_inv, ident.energy_fwd, ident.energy_inv} == {"converging"}
    p05 = analysis.theorem_experiment(boundary.power_map(0.5), nfunc.power(3), nfunc.power(2), 14)
    assert p05.consistent and p05.douglas_fwd == p05.douglas_inv == "converging"
    assert "forward_coupling" in p05.constants
    p01 = analysis.theorem_experiment(boundary.power_map(0.1), nfunc.power(3), nfunc.power(2), 14)
    assert p01.douglas_fwd == p01.energy_fwd == "diverging" and p01.consistent
    with pytest.raises(PreconditionError):
        analysis.theorem_experiment(boundary.identity(), nfunc.exponential(), nfunc.power(2), 6)


def test_consistency_is_undefined_when_inconclusive():
    v = analysis.ExperimentVerdict("converging", "inconclusive", "converging", "converging")
    assert v.consistent is None
    assert v.to_dict()["consistent"] is None
    w = analysis.ExperimentVerdict("converging", "converging", "diverging", "converging")
    assert w.consistent is False


def test_corollary_examples():
    nf = nfunc.square_over_log2()
    c = analysis.corollary_experiment(boundary.power_map(0.02), nf, 14, first=8)
    assert c.douglas_fwd == c.douglas_inv == "converging" and c.passed
    cantor = analysis.corollary_experiment(boundary.cantor_approximant(8), nfunc.power(1.5), 14, first=8)
    assert cantor.passed
    with pytest.raises(PreconditionError):
        analysis.corollary_experiment(boundary.identity(), nfunc.power(2), 8)


@pytest.mark.parametrize("bh", [boundary.identity(), boundary.power_map(0.02),
                                boundary.cantor_approximant(8),
                                boundary.random_piecewise_linear(7, 16)], ids=repr)
@pytest.mark.parametrize("nf", [nfunc.power(2), nfunc.square_over_log2(), nfunc.power_log(2, 1)],
                         ids=lambda f: f.label)
def test_superadditive_domination(bh, nf):
    table = boundary.image_lengths(bh, 14)
    assert np.all(analysis.dominated_levels(table, nf, 14))
