"""N-functions and grid-based checks of their growth hypotheses.

An N-function is represented by its closed form together with its density
(the right derivative), so that ``Phi(b) - Phi(a)`` can be cross-checked
against quadrature of the density.  The structural checks below are
empirical estimators on logarithmic grids, not proofs.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from ._numerics import CONVERGING, DIVERGING, INCONCLUSIVE, fsum, trend_verdict
from .errors import ConfigurationError, DomainError

E = math.e


def _as_nonneg(t):
    arr = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr < 0):
        raise DomainError("N-functions are evaluated at finite t >= 0")
    return arr


@dataclass(frozen=True)
class NFunction:
    """A Young/N-function ``Phi`` with density ``phi``.

    ``func`` and ``density`` must accept numpy arrays.  Calling the object
    evaluates ``Phi`` with a domain check; scalars come back as floats.
    """

    func: object
    density: object
    label: str
    params: dict = field(default_factory=dict)

    def __call__(self, t):
        arr = _as_nonneg(t)
        with np.errstate(over="ignore", invalid="ignore"):
            out = self.func(arr)
        return float(out) if np.ndim(out) == 0 else out

    def phi(self, t):
        arr = _as_nonneg(t)
        with np.errstate(over="ignore", invalid="ignore"):
            out = self.density(arr)
        return float(out) if np.ndim(out) == 0 else out

    def spec(self):
        return {"family": self.params.get("family", self.label), **{
            k: v for k, v in self.params.items() if k != "family"}}


def evaluate(nf, t):
    """Return ``Phi(t)``; raises :class:`DomainError` for negative or non-finite t."""
    return nf(t)


# -- built-in families -------------------------------------------------------

def power(p):
    """``Phi(t) = t**p`` for ``p > 1``."""
    if not p > 1:
        raise DomainError(f"power N-function needs p > 1, got {p}")
    p = float(p)
    return NFunction(
        func=lambda t: t**p,
        density=lambda t: p * t ** (p - 1),
        label=f"t^{p:g}",
        params={"family": "power", "p": p},
    )


def power_log(p, a):
    """``Phi(t) = t**p * log(e + t)**a``."""
    if not p > 1:
        raise DomainError(f"power_log N-function needs p > 1, got {p}")
    p, a = float(p), float(a)

    def func(t):
        return t**p * np.log(E + t) ** a

    def density(t):
        L = np.log(E + t)
        return p * t ** (p - 1) * L**a + a * t**p * L ** (a - 1) / (E + t)

    return NFunction(func, density, f"t^{p:g} log^{a:g}(e+t)",
                     {"family": "power_log", "p": p, "a": a})


def square_over_log2():
    """``Phi(t) = t**2 / log(e + t)**2``; the borderline case of the tail test."""
    nf = power_log(2.0, -2.0)
    return NFunction(nf.func, nf.density, "t^2/log^2(e+t)",
                     {"family": "square_over_log2"})


def exponential():
    """``Phi(t) = e**t - t - 1``: an N-function that is not doubling."""
    return NFunction(
        func=lambda t: np.expm1(t) - t,
        density=np.expm1,
        label="e^t-t-1",
        params={"family": "exp"},
    )


FAMILIES = {
    "power": power,
    "power_log": power_log,
    "square_over_log2": square_over_log2,
    "exp": exponential,
}


def by_name(family, **params):
    """Build a built-in family from its name and parameters."""
    try:
        factory = FAMILIES[family]
    except KeyError:
        raise ConfigurationError(
            f"unknown N-function family {family!r}; choose from {sorted(FAMILIES)}"
        ) from None
    try:
        return factory(**params)
    except TypeError as exc:
        raise ConfigurationError(f"bad parameters for {family!r}: {exc}") from None


# -- grids -------------------------------------------------------------------

@dataclass(frozen=True)
class LogGrid:
    """Log-spaced sample grid on ``[t_min, t_max]``."""

    t_min: float = 1e-6
    t_max: float = 1e8
    points: int = 10_000

    def values(self):
        return np.geomspace(self.t_min, self.t_max, self.points)


@dataclass(frozen=True)
class DoublingEstimate:
    constant: float
    holds: bool
    max_ratio: float


@dataclass(frozen=True)
class AincEstimate:
    constant: float
    holds: bool
    exponent: float
    threshold: float


def _doubling_ratio(nf, t):
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        r = np.asarray(nf(2.0 * t), dtype=float) / np.asarray(nf(t), dtype=float)
    return np.where(np.isnan(r), np.inf, r)


def check_doubling(nf, grid=LogGrid(), blowup=1e6):
    """Estimate the doubling constant ``C_D = sup Phi(2t)/Phi(t)``.

    The estimate is clamped below by 2.  The function is flagged as
    non-doubling when the ratio exceeds ``blowup`` anywhere on the grid, or
    when its growth over each of the top three decades does not slow down.
    """
    if grid.points < 1000:
        raise ConfigurationError("doubling grid needs at least 10^3 points")
    if not (grid.t_min <= 1.0 <= grid.t_max) or math.log10(grid.t_max / grid.t_min) < 8:
        raise ConfigurationError("doubling grid must span 8 decades around 1")
    ratios = _doubling_ratio(nf, grid.values())
    max_ratio = float(np.max(ratios))
    top = _doubling_ratio(nf, grid.t_max * 10.0 ** np.arange(-3.0, 1.0))
    accelerating = False
    if np.all(np.isfinite(top)):
        steps = np.diff(top)
        accelerating = bool(np.all(steps > 1e-9 * top[1:]) and np.all(np.diff(steps) >= 0))
    holds = bool(np.isfinite(max_ratio) and max_ratio <= blowup and not accelerating)
    return DoublingEstimate(max(2.0, max_ratio), holds, max_ratio)


def check_ainc(nf, p, t0=0.0, grid=LogGrid(), eps=1e-6, growth=1.01):
    """Estimate ``C_A`` such that ``Phi(s)/s^p <= C_A Phi(t)/t^p`` for ``t0 <= s <= t``.

    Uses the running maximum of ``g = Phi/t^p``.  The check is flagged as
    failing when the constant keeps growing by more than ``growth`` per
    decade over the last three decades of the grid.
    """
    if not p > 1:
        raise DomainError(f"(aInc)_p needs p > 1, got {p}")
    lo = max(t0, eps)
    if lo >= grid.t_max:
        raise ConfigurationError("aInc grid is empty above the threshold")
    t = np.geomspace(lo, grid.t_max, grid.points)
    with np.errstate(over="ignore", invalid="ignore"):
        g = np.asarray(nf(t), dtype=float) / t**p
    keep = np.isfinite(g)
    t, g = t[keep], g[keep]
    worst = np.maximum.accumulate(g) / g

    def upto(limit):
        sel = t <= limit * (1 + 1e-12)
        return float(np.max(worst[sel])) if np.any(sel) else 1.0

    top = t[-1]
    consts = [upto(top / 10.0**k) for k in range(4)]
    growing = all(consts[k] > growth * consts[k + 1] for k in range(3))
    constant = max(1.0, consts[0])
    return AincEstimate(constant, not growing, float(p), float(t0))


def superadditivity_defect(nf, a, b):
    """``Phi(a+b) - Phi(a) - Phi(b)``; nonnegative for every N-function."""
    if a < 0 or b < 0:
        raise DomainError("superadditivity is stated for a, b >= 0")
    return nf(a + b) - nf(a) - nf(b)


# -- tail integral -----------------------------------------------------------

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(48)


def _octave_integral(nf, lo, hi):
    # substitute t = e^s: integrand Phi(e^s) e^{-2s} is smooth in s
    s0, s1 = math.log(lo), math.log(hi)
    s = 0.5 * (s1 - s0) * _GL_NODES + 0.5 * (s1 + s0)
    with np.errstate(over="ignore", invalid="ignore"):
        vals = np.asarray(nf(np.exp(s)), dtype=float) * np.exp(-2.0 * s)
    if not np.all(np.isfinite(vals)):
        return math.inf
    return 0.5 * (s1 - s0) * fsum(vals * _GL_WEIGHTS)


@dataclass
class TailReport:
    """Truncated tail integral of ``Phi(t)/t^3`` and its dyadic counterpart."""

    t_max: float
    value: float
    increments: np.ndarray
    verdict: str
    discrete_terms: np.ndarray
    discrete_sum: float
    discrete_verdict: str


def tail_integral(nf, t_max=2.0**30, window=5):
    """Integrate ``Phi(t)/t^3`` over ``[1, t_max]`` octave by octave.

    Also returns ``sum_n Phi(2^n) 2^{-2n}`` over the same octaves, which
    converges exactly when the integral does.
    """
    if t_max < 2.0**10:
        raise DomainError("tail integral needs t_max >= 2^10")
    octaves = int(math.floor(math.log2(t_max) + 1e-12))
    inc = np.array([_octave_integral(nf, 2.0**n, 2.0 ** (n + 1)) for n in range(octaves)])
    value = fsum(inc)
    if t_max > 2.0**octaves:
        value = value + _octave_integral(nf, 2.0**octaves, t_max)
    n = np.arange(1, octaves + 1, dtype=float)
    with np.errstate(over="ignore", invalid="ignore"):
        dterms = np.asarray(nf(2.0**n), dtype=float) * 2.0 ** (-2.0 * n)
    dterms = np.where(np.isnan(dterms), np.inf, dterms)
    return TailReport(
        t_max=float(t_max),
        value=float(value),
        increments=inc,
        verdict=_tail_verdict(inc, window),
        discrete_terms=dterms,
        discrete_sum=fsum(dterms) if np.all(np.isfinite(dterms)) else math.inf,
        discrete_verdict=_tail_verdict(dterms, window),
    )


_TAIL_NAMES = {CONVERGING: "converged", DIVERGING: "diverging", INCONCLUSIVE: "inconclusive"}


def _tail_verdict(terms, window):
    return _TAIL_NAMES[trend_verdict(terms, window=window)]


# -- aggregate report --------------------------------------------------------

@dataclass
class GrowthReport:
    doubling_constant: float
    doubling_holds: bool
    ainc_constant: float
    ainc_holds: bool
    ainc_exponent: float
    ainc_threshold: float
    tail_integral: float
    tail_verdict: str
    tail_discrete_verdict: str

    def to_dict(self):
        return dict(self.__dict__)


def growth_report(nf, p=2.0, t0=0.0, grid=LogGrid(), t_max=2.0**30):
    """Run the doubling, (aInc)_p and tail checks and collect them in one record."""
    d = check_doubling(nf, grid)
    a = check_ainc(nf, p, t0, grid)
    tail = tail_integral(nf, t_max)
    return GrowthReport(
        doubling_constant=d.constant,
        doubling_holds=d.holds,
        ainc_constant=a.constant,
        ainc_holds=a.holds,
        ainc_exponent=a.exponent,
        ainc_threshold=a.threshold,
        tail_integral=tail.value,
        tail_verdict=tail.verdict,
        tail_discrete_verdict=tail.discrete_verdict,
    )


def largest_ainc_exponent(nf, t0=0.0, ladder=(3.0, 2.0, 1.5, 1.1, 1.01), grid=LogGrid()):
    """First exponent on ``ladder`` for which (aInc)_p is not flagged, else ``None``."""
    for p in ladder:
        est = check_ainc(nf, p, t0, grid)
        if est.holds:
            return est
    return None
