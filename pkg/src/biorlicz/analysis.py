"""Verification harness: maximal inequality, only-if probe, harmonic baseline, experiments."""

from dataclasses import dataclass, field
import math

import numpy as np
import shapely

from ._numerics import CONVERGING, INCONCLUSIVE, fsum, trend_verdict
from .boundary import image_lengths
from .douglas import discrete_douglas
from .errors import ConfigurationError, PreconditionError, ResolutionError
from .extension import build_extension, distortion_at, orlicz_energy
from .nfunc import LogGrid, check_ainc, check_doubling, tail_integral


# -- grid fields and the maximal operator ------------------------------------

@dataclass
class GridField:
    """Cell values on an ``m x m`` grid over the unit square.

    ``values[i, j]`` belongs to the cell ``[j/m, (j+1)/m] x [i/m, (i+1)/m]``.
    """

    values: np.ndarray
    mask: np.ndarray = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 2 or self.values.shape[0] != self.values.shape[1]:
            raise ConfigurationError("grid field must be square")
        if not np.all(np.isfinite(self.values)) or np.any(self.values < 0):
            raise ConfigurationError("grid field values must be finite and nonnegative")
        if self.mask is None:
            self.mask = np.ones(self.values.shape, dtype=bool)
        else:
            self.mask = np.asarray(self.mask, dtype=bool)
            if self.mask.shape != self.values.shape:
                raise ConfigurationError("mask shape does not match the field")

    @property
    def resolution(self):
        return self.values.shape[0]

    @property
    def cell_area(self):
        return 1.0 / self.resolution**2

    @property
    def domain_area(self):
        return float(np.count_nonzero(self.mask)) * self.cell_area


def cell_centers(m):
    c = (np.arange(m) + 0.5) / m
    X, Y = np.meshgrid(c, c)
    return np.column_stack((X.ravel(), Y.ravel()))


def sample_distortion(mesh, m):
    """``|Dh|`` of a mesh at the ``m x m`` cell centers."""
    vals = distortion_at(mesh, cell_centers(m))
    return GridField(vals.reshape(m, m))


def _box_sums(sat, r, m):
    i = np.arange(m)
    lo = np.maximum(i - r, 0)
    hi = np.minimum(i + r, m - 1) + 1
    return (sat[hi[:, None], hi[None, :]] - sat[lo[:, None], hi[None, :]]
            - sat[hi[:, None], lo[None, :]] + sat[lo[:, None], lo[None, :]])


def _summed_area(a):
    m = a.shape[0]
    sat = np.zeros((m + 1, m + 1))
    sat[1:, 1:] = a.cumsum(0).cumsum(1)
    return sat


def maximal_transform(fld):
    """Centered maximal averages of ``|f|`` over squares of radius ``0, 1, 2, 4, ...`` cells.

    Windows are clipped to the domain and averages taken over the clipped part.
    """
    m = fld.resolution
    f = np.where(fld.mask, np.abs(fld.values), 0.0)
    sat_f = _summed_area(f)
    sat_w = _summed_area(fld.mask.astype(float))
    out = f.copy()
    r = 1
    while r <= m:
        w = _box_sums(sat_w, r, m)
        with np.errstate(invalid="ignore", divide="ignore"):
            avg = np.where(w > 0, _box_sums(sat_f, r, m) / np.maximum(w, 1e-300), 0.0)
        np.maximum(out, avg, out=out)
        r *= 2
    return GridField(np.where(fld.mask, out, 0.0), fld.mask)


@dataclass
class MaximalResult:
    lhs: float
    rhs: float
    ratio: float
    resolution: int

    def to_dict(self):
        return dict(self.__dict__)


def maximal_inequality_test(fld, nf, p, t0=0.0, grid=LogGrid()):
    """``sum Phi(Mf) dA`` against ``sum Phi(f) dA + |Omega| Phi(t0)``."""
    if not check_doubling(nf, grid).holds:
        raise PreconditionError(f"{nf.label} is not doubling")
    if not check_ainc(nf, p, t0, grid).holds:
        raise PreconditionError(f"{nf.label} fails (aInc)_{p:g} above t0={t0:g}")
    mf = maximal_transform(fld)
    sel = fld.mask
    lhs = fsum(np.asarray(nf(mf.values[sel]))) * fld.cell_area
    rhs = fsum(np.asarray(nf(fld.values[sel]))) * fld.cell_area + fld.domain_area * nf(t0)
    return MaximalResult(float(lhs), float(rhs), float(lhs / rhs), fld.resolution)


# -- only-if probe -----------------------------------------------------------

@dataclass
class ProbeResult:
    level: int
    index: int
    lhs: float
    rhs: float

    @property
    def slack(self):
        return self.rhs / self.lhs

    @property
    def holds(self):
        return self.lhs <= self.rhs

    def to_dict(self):
        return {"level": self.level, "index": self.index, "lhs": self.lhs,
                "rhs": self.rhs, "slack": self.slack, "holds": self.holds}


def probe_window(n, k, C=3.0):
    """``C Q_{n,k}`` clipped to the square; ``Q_{n,k} = I_{n,k} x [2^-n, 2^{1-n}]``."""
    s = 2.0**-n
    cx, cy = (k - 0.5) * s, 1.5 * s
    half = 0.5 * C * s
    return max(cx - half, 0.0), min(cx + half, 1.0), max(cy - half, 0.0), min(cy + half, 1.0)


def window_integral(mesh, x0, x1, y0, y1):
    """Exact integral of ``|Dh|`` over the rectangle ``[x0, x1] x [y0, y1]``."""
    box = shapely.box(x0, y0, x1, y1)
    parts = []
    for s in mesh.strips:
        if s.y_bottom >= y1 or s.y_top <= y0:
            continue
        cols = 2**s.level
        k0 = max(int(math.floor(x0 * cols)) - 1, 0)
        k1 = min(int(math.ceil(x1 * cols)) + 1, cols)
        idx = np.arange(3 * k0, 3 * k1)
        tri = s.domain_vertices(idx)
        polys = shapely.polygons(tri)
        area = shapely.area(shapely.intersection(polys, box))
        parts.append(s.sigma1[idx] * area)
    floor_y = 2.0**-mesh.depth
    if y0 < floor_y:
        lm = mesh.level_maps[mesh.depth]
        a = np.clip(lm.xs[:-1], x0, x1)
        b = np.clip(lm.xs[1:], x0, x1)
        h = min(y1, floor_y) - y0
        parts.append(np.atleast_1d(np.maximum(lm.slopes, 1.0) * (b - a) * h))
    return fsum(np.concatenate(parts)) if parts else 0.0


def onlyif_probe(mesh, table, n, k, C=3.0):
    """``2^-n |u(I_{n,k})|`` against the integral of ``|Dh|`` over the window ``C Q_{n,k}``."""
    if not 1 <= n <= mesh.depth - 1:
        raise ConfigurationError(f"probe level must lie in 1..{mesh.depth - 1}")
    if not 1 <= k <= 2**n:
        raise ConfigurationError(f"probe index must lie in 1..{2**n}")
    lhs = 2.0**-n * float(table.lengths[n][k - 1])
    rhs = window_integral(mesh, *probe_window(n, k, C))
    return ProbeResult(int(n), int(k), lhs, rhs)


def onlyif_sweep(mesh, table=None, max_level=8, C=3.0):
    """Probe every ``(n, k)`` with ``n <= max_level``."""
    table = mesh.table if table is None else table
    top = min(max_level, mesh.depth - 1)
    return [onlyif_probe(mesh, table, n, k, C) for n in range(1, top + 1)
            for k in range(1, 2**n + 1)]


# -- harmonic baseline -------------------------------------------------------

def harmonic_extension(bh, r, theta, nodes=4096, shift=0.0, graded=True):
    """Poisson extension of ``e^{2 pi i x} -> e^{2 pi i (u(x) + shift)}`` at ``r e^{i theta}``.

    Trapezoid rule on ``nodes`` boundary points.  With ``graded`` the nodes
    follow ``x = s - sin(2 pi s)/(2 pi)``, which clusters them at the fixed
    point ``x = 0`` where maps such as ``x**alpha`` are singular.  Returns a
    complex number (or array).
    """
    r = np.asarray(r, dtype=float)
    if np.any(r < 0) or np.any(r > 0.99):
        raise ResolutionError("Poisson quadrature needs 0 <= r <= 0.99")
    s = np.arange(nodes) / nodes
    if graded:
        x = np.clip(s - np.sin(2 * np.pi * s) / (2 * np.pi), 0.0, 1.0)
        w = 1.0 - np.cos(2 * np.pi * s)
    else:
        x, w = s, np.ones_like(s)
    F = np.exp(2j * np.pi * (np.asarray(bh.evaluate(x)) + shift))
    t = 2 * np.pi * x
    rr = np.atleast_1d(r)[..., None]
    th = np.atleast_1d(np.asarray(theta, dtype=float))[..., None]
    kernel = (1 - rr**2) / (1 - 2 * rr * np.cos(th - t) + rr**2)
    val = (kernel * F * w).mean(axis=-1)
    return complex(val[0]) if np.ndim(r) == 0 and np.ndim(theta) == 0 else val


# -- experiments -------------------------------------------------------------

@dataclass
class ExperimentVerdict:
    douglas_fwd: str
    douglas_inv: str
    energy_fwd: str
    energy_inv: str
    constants: dict = field(default_factory=dict)

    @property
    def consistent(self):
        verdicts = (self.douglas_fwd, self.douglas_inv, self.energy_fwd, self.energy_inv)
        if INCONCLUSIVE in verdicts:
            return None
        return self.douglas_fwd == self.energy_fwd and self.douglas_inv == self.energy_inv

    def to_dict(self):
        return {"douglas_fwd": self.douglas_fwd, "douglas_inv": self.douglas_inv,
                "energy_fwd": self.energy_fwd, "energy_inv": self.energy_inv,
                "consistent": self.consistent, "constants": self.constants}


def _coupling(energy, douglas, phi1):
    # energy over strips 0..n against the Douglas cumulative to level n, level 0 included
    d = phi1 + np.concatenate(([0.0], douglas.cumulative))[: energy.cumulative.size]
    return float(np.max(energy.cumulative / d))


def theorem_experiment(bh, phi, psi, depth, grid=LogGrid(), window=5):
    """All four verdicts for ``(bh, Phi, Psi)``: Douglas levels ``1..depth``, strips ``0..depth``."""
    for nf in (phi, psi):
        if not check_doubling(nf, grid).holds:
            raise PreconditionError(f"{nf.label} is not doubling")
    table = image_lengths(bh, depth + 1)
    inv_table = image_lengths(bh.inverse(), depth)
    d_fwd = discrete_douglas(table, phi, depth, window)
    d_inv = discrete_douglas(inv_table, psi, depth, window)
    mesh = build_extension(bh, depth + 1, table)
    e_fwd = orlicz_energy(mesh, phi, "forward", window=window)
    e_inv = orlicz_energy(mesh, psi, "inverse", window=window)
    constants = {
        "forward_surrogate": e_fwd.surrogate_constant,
        "inverse_surrogate": e_inv.surrogate_constant,
    }
    if d_fwd.verdict == CONVERGING and e_fwd.verdict == CONVERGING:
        constants["forward_coupling"] = _coupling(e_fwd, d_fwd, phi(1.0))
    if d_inv.verdict == CONVERGING and e_inv.verdict == CONVERGING:
        constants["inverse_coupling"] = _coupling(e_inv, d_inv, psi(1.0))
    verdict = ExperimentVerdict(d_fwd.verdict, d_inv.verdict, e_fwd.verdict, e_inv.verdict,
                                constants)
    verdict.details = {"douglas_fwd": d_fwd, "douglas_inv": d_inv,
                       "energy_fwd": e_fwd, "energy_inv": e_inv, "mesh": mesh}
    return verdict


@dataclass
class CorollaryVerdict:
    douglas_fwd: str
    douglas_inv: str
    energy_fwd: str
    energy_inv: str
    domination_holds: bool
    tail_integral: float

    @property
    def passed(self):
        return self.domination_holds and all(
            v == CONVERGING for v in (self.douglas_fwd, self.douglas_inv,
                                      self.energy_fwd, self.energy_inv))

    def to_dict(self):
        d = dict(self.__dict__)
        d["passed"] = self.passed
        return d


def dominated_levels(table, nf, depth):
    """Per level: ``sum_k Phi(|u(I_{n,k})| 2^n) <= Phi(2^n)`` (both scaled by ``2^{-2n}``)."""
    ok = []
    for n in range(1, depth + 1):
        lhs = fsum(np.asarray(nf(table.lengths[n] * 2.0**n)))
        ok.append(lhs <= nf(2.0**n) * (1 + 1e-12))
    return np.array(ok)


def corollary_experiment(bh, nf, depth, first=None, grid=LogGrid()):
    """Douglas sums of ``bh`` and its inverse plus both mesh energies under one ``Phi``.

    Verdicts are read from levels (strips) ``first..depth``; by default the
    last five.
    """
    if not check_doubling(nf, grid).holds:
        raise PreconditionError(f"{nf.label} is not doubling")
    tail = tail_integral(nf)
    if tail.verdict != "converged":
        raise PreconditionError(f"tail integral of {nf.label} is {tail.verdict}")
    table = image_lengths(bh, depth + 1)
    inv_table = image_lengths(bh.inverse(), depth)
    mesh = build_extension(bh, depth + 1, table)
    d_fwd = discrete_douglas(table, nf, depth).per_level
    d_inv = discrete_douglas(inv_table, nf, depth).per_level
    e_fwd = orlicz_energy(mesh, nf, "forward").terms
    e_inv = orlicz_energy(mesh, nf, "inverse").terms
    first = depth - 4 if first is None else int(first)
    span = depth - first + 1

    def v(terms, offset):
        return trend_verdict(terms[first - offset : depth - offset + 1], window=span)

    dom = bool(np.all(dominated_levels(table, nf, depth))
               and np.all(dominated_levels(inv_table, nf, depth)))
    return CorollaryVerdict(v(d_fwd, 1), v(d_inv, 1), v(e_fwd, 0), v(e_inv, 0), dom, tail.value)
