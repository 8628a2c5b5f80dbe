"""Circle homeomorphisms in the flat model.

A degree-one homeomorphism of the circle that fixes a point is represented
as a strictly increasing map ``u`` of ``[0, 1]`` onto itself with ``u(0) = 0``
and ``u(1) = 1``.  Every quantity downstream only depends on the lengths of
images of dyadic intervals, which :func:`image_lengths` tabulates.
"""

from dataclasses import dataclass
import csv

import numpy as np

from .errors import ConfigurationError, DataError, DomainError

MAX_DEPTH = 20


def _check_unit(x):
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr < 0) or np.any(arr > 1):
        raise DomainError("boundary maps are evaluated on [0, 1]")
    return arr


def bisect_inverse(func, y, tol=1e-14, max_iter=200):
    """Invert an increasing map of ``[0, 1]`` by vectorized bisection."""
    y = np.asarray(y, dtype=float)
    lo = np.zeros_like(y)
    hi = np.ones_like(y)
    for _ in range(max_iter):
        if np.all(hi - lo <= tol):
            break
        mid = 0.5 * (lo + hi)
        below = func(mid) < y
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return 0.5 * (lo + hi)


class BoundaryHomeo:
    """Strictly increasing self-map of ``[0, 1]`` fixing both endpoints.

    Parameters
    ----------
    forward : callable
        Vectorized ``u``.
    inverse : callable, optional
        Vectorized ``u^{-1}``; bisection to ``tol`` is used when omitted.
    label, params :
        Family name and parameters, used in reports.
    """

    representation = "closed-form"

    def __init__(self, forward, inverse=None, label="custom", params=None, tol=1e-14):
        self._forward = forward
        self._inverse = inverse
        self.label = label
        self.params = dict(params or {})
        self.tol = tol

    def __repr__(self):
        args = ", ".join(f"{k}={v!r}" for k, v in self.params.items())
        return f"{type(self).__name__}({self.label}{', ' if args else ''}{args})"

    def __call__(self, x):
        return self.evaluate(x)

    def evaluate(self, x, direction="forward"):
        arr = _check_unit(x)
        if direction == "forward":
            out = self._forward(arr)
        elif direction == "inverse":
            if self._inverse is not None:
                out = self._inverse(arr)
            else:
                out = bisect_inverse(self._forward, arr, self.tol)
        else:
            raise ConfigurationError(f"direction must be 'forward' or 'inverse', not {direction!r}")
        out = np.clip(out, 0.0, 1.0)
        return float(out) if np.ndim(out) == 0 else out

    def inverse(self):
        """The inverse homeomorphism as a new :class:`BoundaryHomeo`."""
        fwd = self._inverse
        if fwd is None:
            fwd = lambda y: bisect_inverse(self._forward, y, self.tol)  # noqa: E731
        return BoundaryHomeo(fwd, self._forward, label=f"inverse({self.label})",
                             params=self.params, tol=self.tol)

    def spec(self):
        return {"family": self.label, **self.params}


class PiecewiseLinearHomeo(BoundaryHomeo):
    """Increasing piecewise-linear map through the knots ``(xs[i], ys[i])``."""

    representation = "piecewise-linear-samples"

    def __init__(self, xs, ys, label="piecewise-linear", params=None):
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        if xs.shape != ys.shape or xs.ndim != 1 or xs.size < 2:
            raise ConfigurationError("piecewise-linear map needs at least 2 matching knots")
        if xs[0] != 0 or xs[-1] != 1 or ys[0] != 0 or ys[-1] != 1:
            raise DataError("piecewise-linear map must fix the endpoints 0 and 1")
        bad = np.flatnonzero((np.diff(xs) <= 0) | (np.diff(ys) <= 0))
        if bad.size:
            raise DataError(f"knots are not strictly increasing at index {bad[0] + 1}")
        self.xs, self.ys = xs, ys
        super().__init__(lambda x: np.interp(x, xs, ys), lambda y: np.interp(y, ys, xs),
                         label=label, params=params)

    def inverse(self):
        return PiecewiseLinearHomeo(self.ys, self.xs, label=f"inverse({self.label})",
                                    params=self.params)


def evaluate(bh, x, direction="forward"):
    return bh.evaluate(x, direction)


# -- families ----------------------------------------------------------------

def identity():
    return BoundaryHomeo(lambda x: x, lambda y: y, label="identity")


def power_map(alpha):
    """``u(x) = x**alpha``; its inverse is ``x**(1/alpha)``."""
    if not alpha > 0:
        raise ConfigurationError(f"power map needs alpha > 0, got {alpha}")
    a = float(alpha)
    return BoundaryHomeo(lambda x: x**a, lambda y: y ** (1.0 / a),
                         label="power", params={"alpha": a})


def log_singular(beta=1.0):
    """``u(x) = 1 / (1 - beta log x)``: continuous at 0 but not Hölder there.

    The inverse ``exp((1 - 1/y)/beta)`` is flatter than any power at 0 and
    underflows in double precision past dyadic level ~ ``log2(745 beta)``.
    """
    if not beta > 0:
        raise ConfigurationError(f"log-singular map needs beta > 0, got {beta}")
    b = float(beta)

    def fwd(x):
        with np.errstate(divide="ignore"):
            out = 1.0 / (1.0 - b * np.log(x))
        return np.where(x > 0, out, 0.0)

    def inv(y):
        with np.errstate(divide="ignore", over="ignore"):
            out = np.exp((1.0 - 1.0 / y) / b)
        return np.where(y > 0, out, 0.0)

    return BoundaryHomeo(fwd, inv, label="log-singular", params={"beta": b})


def random_piecewise_linear(seed=0, knots=16):
    """Random increasing piecewise-linear map with ``knots`` breakpoints (endpoints included)."""
    if knots < 2:
        raise ConfigurationError("random piecewise-linear map needs knots >= 2")
    rng = np.random.default_rng(seed)
    dx = rng.dirichlet(np.ones(knots - 1))
    dy = rng.dirichlet(np.ones(knots - 1))
    xs = np.concatenate(([0.0], np.cumsum(dx)))
    ys = np.concatenate(([0.0], np.cumsum(dy)))
    xs[-1] = ys[-1] = 1.0
    return PiecewiseLinearHomeo(xs, ys, label="random-pl",
                                params={"seed": int(seed), "knots": int(knots)})


def cantor_approximant(level=8, ratio=0.25):
    """Finite-level self-similar map: each dyadic half receives ``ratio`` / ``1-ratio``
    of its parent's image, down to ``level``; linear below that."""
    if level < 0:
        raise ConfigurationError("cantor approximant needs level >= 0")
    if not 0 < ratio < 1:
        raise ConfigurationError("cantor approximant needs 0 < ratio < 1")
    mass = np.ones(1)
    for _ in range(int(level)):
        mass = np.column_stack((mass * ratio, mass * (1.0 - ratio))).ravel()
    xs = np.arange(mass.size + 1, dtype=float) / mass.size
    ys = np.concatenate(([0.0], np.cumsum(mass)))
    ys[-1] = 1.0
    return PiecewiseLinearHomeo(xs, ys, label="cantor",
                                params={"level": int(level), "ratio": float(ratio)})


def from_csv(path):
    """Piecewise-linear map from a two-column CSV of ``x, u(x)`` (header optional)."""
    rows = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].strip().startswith("#"):
                continue
            try:
                rows.append((float(row[0]), float(row[1])))
            except ValueError:
                if rows:
                    raise DataError(f"non-numeric row in {path}: {row}") from None
    if not rows:
        raise DataError(f"no knots found in {path}")
    xs, ys = np.array(rows).T
    return PiecewiseLinearHomeo(xs, ys, label="csv", params={"path": str(path)})


FAMILIES = {
    "identity": identity,
    "power": power_map,
    "log-singular": log_singular,
    "random-pl": random_piecewise_linear,
    "cantor": cantor_approximant,
    "csv": from_csv,
}


def construct_family(name, **params):
    """Build a boundary map from a family name and parameters."""
    name = {"random-piecewise-linear": "random-pl", "cantor-approximant": "cantor"}.get(name, name)
    try:
        factory = FAMILIES[name]
    except KeyError:
        raise ConfigurationError(
            f"unknown boundary family {name!r}; choose from {sorted(FAMILIES)}") from None
    try:
        return factory(**params)
    except TypeError as exc:
        raise ConfigurationError(f"bad parameters for {name!r}: {exc}") from None


# -- dyadic image table ------------------------------------------------------

@dataclass
class DyadicImageTable:
    """Images of the dyadic intervals ``I_{n,k}`` for levels ``0..depth``.

    ``nodes[n][k] = u(k 2^-n)`` for ``k = 0..2^n`` and
    ``lengths[n][k-1] = |u(I_{n,k})|`` (stored 0-based).
    """

    depth: int
    nodes: list
    lengths: list

    def level(self, n):
        if not 0 <= n <= self.depth:
            raise ConfigurationError(f"level {n} outside table depth {self.depth}")
        return self.lengths[n]

    def refinement_defect(self):
        """Largest ``| |I_{n,k}| - |I_{n+1,2k-1}| - |I_{n+1,2k}| |`` over the table."""
        worst = 0.0
        for n in range(self.depth):
            child = self.lengths[n + 1]
            worst = max(worst, float(np.max(np.abs(self.lengths[n] - child[0::2] - child[1::2]))))
        return worst


def image_lengths(bh, depth, max_depth=MAX_DEPTH):
    """Tabulate ``|u(I_{n,k})|`` for ``n <= depth`` from one evaluation on the finest grid."""
    depth = int(depth)
    if not 0 <= depth <= max_depth:
        raise ConfigurationError(f"depth must lie in 0..{max_depth}, got {depth}")
    size = 2**depth
    values = np.asarray(bh.evaluate(np.arange(size + 1, dtype=float) / size), dtype=float)
    if abs(values[0]) > 1e-12 or abs(values[-1] - 1.0) > 1e-12:
        raise DataError("boundary map must satisfy u(0) = 0 and u(1) = 1")
    # absorb bisection round-off at the endpoints
    values[0], values[-1] = 0.0, 1.0
    nodes, lengths = [], []
    for n in range(depth + 1):
        nd = values[:: 2 ** (depth - n)]
        ln = np.diff(nd)
        bad = np.flatnonzero(~(ln > 0))
        if bad.size:
            raise DataError(
                f"boundary map is not strictly increasing on I_(n={n}, k={bad[0] + 1})")
        nodes.append(nd)
        lengths.append(ln)
    return DyadicImageTable(depth, nodes, lengths)
