"""Discrete and continuous Phi-Douglas energies of a boundary map.

The discrete form sums ``Phi(|u(I_{n,k})| 2^n) 2^{-2n}`` level by level.  The
continuous form integrates ``Phi(d(u(x), u(y)) / d(x, y))`` over the torus
with a tensor midpoint rule, where ``d`` is arc distance on the circle of
length one, and excludes a diagonal band ``d(x, y) < delta``.  Both report
their truncation increments so that a trend verdict can be drawn.
"""

from dataclasses import dataclass
import math

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ._numerics import DIVERGING, cumulative, fsum, trend_verdict
from .boundary import image_lengths
from .errors import ConfigurationError, ResolutionError


@dataclass
class DouglasReport:
    """Per-level terms of the discrete Douglas sum."""

    levels: np.ndarray
    per_level: np.ndarray
    cumulative: np.ndarray
    verdict: str
    label: str = ""

    def to_dict(self):
        return {
            "label": self.label,
            "verdict": self.verdict,
            "levels": self.levels.tolist(),
            "per_level": self.per_level.tolist(),
            "cumulative": self.cumulative.tolist(),
        }


def level_term(lengths, n, nf):
    """``sum_k Phi(lengths[k] 2^n) 2^{-2n}`` for one level."""
    return fsum(np.asarray(nf(np.asarray(lengths) * 2.0**n), dtype=float)) * 2.0 ** (-2 * n)


def discrete_douglas(table, nf, depth=None, window=5):
    """Discrete Douglas terms for levels ``1..depth`` of a :class:`DyadicImageTable`."""
    depth = table.depth if depth is None else int(depth)
    if depth > table.depth:
        raise ConfigurationError(f"table depth {table.depth} < requested depth {depth}")
    if depth < 1:
        raise ConfigurationError("discrete Douglas needs depth >= 1")
    levels = np.arange(1, depth + 1)
    terms = np.array([level_term(table.lengths[n], n, nf) for n in levels])
    return DouglasReport(levels, terms, cumulative(terms), trend_verdict(terms, window),
                         label=getattr(nf, "label", ""))


@dataclass
class ContinuousDouglas:
    """Midpoint estimates of the truncated double integral.

    Level ``n`` is the distance band ``2^-(n+1) < d <= 2^-n``; ``bands[n-1]``
    is its contribution and ``estimates[n-1]`` integrates over
    ``d > 2^-(n+1)``, so level 1 is the far field ``d > 1/4``.
    """

    levels: np.ndarray
    estimates: np.ndarray
    bands: np.ndarray
    far_field: float
    scheme: str
    resolution: int
    verdict: str

    @property
    def estimate(self):
        return float(self.estimates[-1])

    @property
    def deltas(self):
        return 2.0 ** -(self.levels + 1.0)

    def to_dict(self):
        return {
            "scheme": self.scheme,
            "resolution": self.resolution,
            "verdict": self.verdict,
            "far_field": self.far_field,
            "levels": self.levels.tolist(),
            "deltas": self.deltas.tolist(),
            "estimates": self.estimates.tolist(),
            "bands": self.bands.tolist(),
        }


def _lift(bh, y):
    # U(y) for y in [0, 2): U(y + 1) = U(y) + 1
    wrap = y >= 1.0
    out = np.asarray(bh.evaluate(np.where(wrap, y - 1.0, y)), dtype=float)
    return out + wrap


def _band_sum(bh, nf, x, ux, d, weight, block_elems=1 << 22):
    """``2 * weight * sum_ij Phi((U(x_i + d_j) - U(x_i)) / d_j)``, blocked over offsets.

    ``U(x + d) - U(x)`` is the image length of the shorter arc from ``x`` to
    ``x + d``; the factor 2 accounts for the pairs ``(x, x - d)``.
    """
    step = max(1, block_elems // x.size)
    rows = []
    for s in range(0, d.size, step):
        dj = d[s : s + step, None]
        delta = _lift(bh, x[None, :] + dj) - ux[None, :]
        vals = np.asarray(nf(np.maximum(delta, 0.0) / dj), dtype=float)
        rows.append(vals.sum(axis=1))
    return 2.0 * weight * fsum(np.concatenate(rows))


def _uniform_band(u, nf, lo, hi, block_elems=1 << 22):
    """Sum over grid offsets ``lo < j <= hi`` on the uniform midpoint grid ``u``."""
    m = u.size
    ext = np.concatenate((u, u[:-1] + 1.0))
    windows = sliding_window_view(ext, m)
    total = []
    step = max(1, block_elems // m)
    for s in range(lo + 1, hi + 1, step):
        e = min(hi + 1, s + step)
        delta = windows[s:e] - u[None, :]
        d = np.arange(s, e, dtype=float)[:, None] / m
        rows = np.asarray(nf(np.maximum(delta, 0.0) / d), dtype=float).sum(axis=1)
        # antipodal offset m/2 already covers both orders
        weights = np.where(np.arange(s, e) * 2 == m, 1.0, 2.0)
        total.append(rows * weights)
    return fsum(np.concatenate(total)) / m**2


def continuous_douglas(bh, nf, depth, grid=None, refine=6, window=5):
    """Midpoint quadrature of the Phi-Douglas integral over dyadic distance bands.

    Parameters
    ----------
    depth : int
        Number of bands; the excluded diagonal is ``d <= 2^-(depth+1)``.
    grid : int, optional
        Use one uniform ``grid x grid`` midpoint rule for every band.  Must be
        a power of two ``>= 2^(depth+1)``.
    refine : int
        Banded scheme (default): band ``n`` uses ``2^refine`` offset midpoints
        and ``2^(n+1+refine)`` points in ``x``, so every band is resolved
        alike.
    """
    depth = int(depth)
    if depth < 1:
        raise ConfigurationError("continuous Douglas needs depth >= 1")
    bands = np.empty(depth)
    if grid is not None:
        m = int(grid)
        if m < 2 ** (depth + 1) or m & (m - 1):
            raise ResolutionError(
                f"grid {m} cannot resolve the band at 2^-{depth + 1}; "
                f"need a power of two >= {2 ** (depth + 1)}")
        u = np.asarray(bh.evaluate((np.arange(m) + 0.5) / m), dtype=float)
        for n in range(1, depth + 1):
            bands[n - 1] = _uniform_band(u, nf, m >> (n + 1), m >> n)
        scheme, resolution = "uniform", m
    else:
        per_band = 2 ** int(refine)
        for n in range(1, depth + 1):
            width = 2.0 ** -(n + 1)
            h = width / per_band
            d = width + (np.arange(per_band) + 0.5) * h
            x = (np.arange(2 ** (n + 1) * per_band) + 0.5) * h
            ux = np.asarray(bh.evaluate(x), dtype=float)
            bands[n - 1] = _band_sum(bh, nf, x, ux, d, h * h)
        scheme, resolution = "banded", per_band
    levels = np.arange(1, depth + 1)
    return ContinuousDouglas(levels, cumulative(bands), bands, float(bands[0]), scheme,
                             resolution, trend_verdict(bands, window))


@dataclass
class EquivalenceReport:
    levels: np.ndarray
    ratios: np.ndarray
    discrete: DouglasReport
    continuous: ContinuousDouglas

    @property
    def verdicts_agree(self):
        return self.discrete.verdict == self.continuous.verdict

    def bracket(self, first=6):
        """Min and max of continuous/discrete over levels ``>= first``."""
        sel = self.ratios[self.levels >= first]
        return float(np.min(sel)), float(np.max(sel))

    def to_dict(self):
        return {
            "levels": self.levels.tolist(),
            "ratios": self.ratios.tolist(),
            "discrete": self.discrete.to_dict(),
            "continuous": self.continuous.to_dict(),
            "verdicts_agree": self.verdicts_agree,
        }


def equivalence_report(bh, nf, depth, grid=None, table=None, refine=6):
    """Continuous estimate at ``delta = 2^-(n+1)`` over discrete cumulative at level ``n``."""
    if table is None:
        table = image_lengths(bh, depth)
    disc = discrete_douglas(table, nf, depth)
    cont = continuous_douglas(bh, nf, depth, grid, refine)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = cont.estimates / disc.cumulative
    return EquivalenceReport(disc.levels, ratios, disc, cont)


def is_diverging(report):
    return report.verdict == DIVERGING


def p_douglas_threshold(alpha):
    """Exponent ``2/(1-alpha)`` separating convergence for ``u(x) = x**alpha``, ``alpha < 1``."""
    return math.inf if alpha >= 1 else 2.0 / (1.0 - alpha)
