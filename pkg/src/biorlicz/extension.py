"""Piecewise-linear homeomorphic extension of a boundary map to the flat square.

The boundary map lives on the bottom edge of ``[0, 1] x [0, 1]``.  At each
height ``2^-n`` a level map is built by grouping consecutive dyadic intervals
until their image has length at least ``2^-n`` and mapping each group
linearly onto its image.  Between heights ``2^-n`` and ``2^-(n+1)`` every
dyadic square column is cut into three triangles, and ``h`` is affine on each.

Level 0 (height 1) is the identity.  Below height ``2^-N`` the map is
``(x, y) -> (level_map[N](x), y)``.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from ._numerics import CONVERGING, cumulative, fsum, trend_verdict
from .boundary import image_lengths
from .errors import ConfigurationError, ConstructionError, DataError, DomainError, OrientationError

# relative slack for the greedy threshold so exact dyadic sums are not split by round-off
_THRESHOLD_SLACK = 1e-12


# -- step 2: merged partitions and level maps --------------------------------

@dataclass
class MergedPartition:
    """Greedy grouping of the level-``n`` dyadic intervals.

    Group ``j`` spans intervals ``bounds[j] + 1 .. bounds[j+1]`` (1-based)
    out of ``cells`` equal ones; for a dyadic level ``cells = 2^n``.
    """

    level: int
    bounds: np.ndarray
    image_nodes: np.ndarray
    remainder_merged: bool = False
    cells: int = 0

    def __post_init__(self):
        if not self.cells:
            self.cells = 2**self.level

    @property
    def domain_lengths(self):
        return np.diff(self.bounds) / self.cells

    @property
    def image_lengths(self):
        return np.diff(self.image_nodes)

    @property
    def short_domain(self):
        """Groups whose domain is shorter than ``2^-n / 2``."""
        return np.flatnonzero(self.domain_lengths < 0.5 * 2.0**-self.level)

    @property
    def oversized(self):
        """Groups whose image reaches ``2^-(n-1)``."""
        return np.flatnonzero(self.image_lengths >= 2.0 ** (1 - self.level))

    @property
    def max_image_ratio(self):
        """``max_j |T_j| / 2^-(n-1)``; above 1 the three-segment cover fails."""
        return float(np.max(self.image_lengths) * 2.0 ** (self.level - 1))

    def flags(self):
        return {
            "remainder_merged": self.remainder_merged,
            "short_domain": self.short_domain.tolist(),
            "oversized": self.oversized.tolist(),
        }


def merge_nodes(nodes, n):
    """Greedy merge of the intervals between consecutive ``nodes`` at threshold ``2^-n``.

    On a dyadic table ``nodes[k] = u(k 2^-n)``; other interval counts are
    accepted so the rule can be exercised on its own.
    """
    nodes = np.asarray(nodes, dtype=float)
    size = nodes.size - 1
    if size < 1:
        raise ConfigurationError("merge needs at least one interval")
    target = nodes + 2.0**-n * (1.0 - _THRESHOLD_SLACK)
    # nxt[k]: first index whose node reaches nodes[k] + 2^-n
    nxt = np.searchsorted(nodes, target, side="left").tolist()
    bounds = [0]
    k = 0
    while True:
        e = nxt[k]
        if e > size:
            break
        bounds.append(e)
        k = e
        if k == size:
            break
    merged = bounds[-1] != size
    if merged:
        if len(bounds) > 1:
            bounds[-1] = size
        else:
            bounds.append(size)
    b = np.asarray(bounds, dtype=np.int64)
    return MergedPartition(int(n), b, nodes[b], merged, size)


def merge_lengths(lengths, n):
    """Greedy merge from the level-``n`` image lengths alone."""
    lengths = np.asarray(lengths, dtype=float)
    if np.any(lengths <= 0):
        raise DataError("image lengths must be positive")
    nodes = np.concatenate(([0.0], np.cumsum(lengths)))
    return merge_nodes(nodes, n)


def merge_level(table, n):
    if not 0 <= n <= table.depth:
        raise ConfigurationError(f"level {n} exceeds table depth {table.depth}")
    return merge_nodes(table.nodes[n], n)


@dataclass
class LevelMap:
    """Increasing piecewise-linear bijection of ``[0, 1]`` at height ``2^-level``."""

    level: int
    xs: np.ndarray
    ys: np.ndarray

    @property
    def slopes(self):
        return np.diff(self.ys) / np.diff(self.xs)

    def __call__(self, x):
        return np.interp(x, self.xs, self.ys)

    def inverse(self, y):
        return np.interp(y, self.ys, self.xs)

    def slope_at(self, x):
        """Slope of the piece containing ``x`` (right-continuous, last piece at 1)."""
        j = np.clip(np.searchsorted(self.xs, x, side="right") - 1, 0, self.xs.size - 2)
        return self.slopes[j]


def build_level_map(partition):
    xs = partition.bounds / partition.cells
    ys = np.asarray(partition.image_nodes, dtype=float)
    bad = np.flatnonzero(~(np.diff(ys) > 0) | ~(np.diff(xs) > 0))
    if bad.size:
        raise DataError(f"zero-length group {bad[0]} at level {partition.level}")
    return LevelMap(partition.level, xs, ys)


# -- step 3: triangulated strips ---------------------------------------------

def singular_values(A):
    """Singular values ``(s1, s2)`` of a stack of 2x2 matrices, ``s1 >= s2``."""
    a, b, c, d = A[..., 0, 0], A[..., 0, 1], A[..., 1, 0], A[..., 1, 1]
    s1 = 0.5 * (np.hypot(a + d, c - b) + np.hypot(a - d, c + b))
    det = a * d - b * c
    return s1, np.abs(det) / s1


@dataclass
class TriangleMap:
    """Affine map ``z -> A z + b`` of one domain triangle onto its image."""

    domain_vertices: np.ndarray
    image_vertices: np.ndarray
    linear_part: np.ndarray
    offset: np.ndarray

    @property
    def singular_values(self):
        s1, s2 = singular_values(self.linear_part)
        return float(s1), float(s2)

    @property
    def jacobian(self):
        return float(np.linalg.det(self.linear_part))

    def __call__(self, z):
        return np.asarray(z) @ self.linear_part.T + self.offset


def differential(tm):
    """``(|Dh|, |Dh^-1|, det Dh)`` for a triangle map or a bare 2x2 matrix."""
    A = np.asarray(getattr(tm, "linear_part", tm), dtype=float)
    s1, s2 = singular_values(A)
    det = float(np.linalg.det(A))
    if not det > 0:
        raise OrientationError(f"linear part has non-positive determinant {det}")
    return float(s1), float(1.0 / s2), det


@dataclass
class Strip:
    """Triangles between heights ``2^-level`` (top) and ``2^-(level+1)``.

    Triangle ``3k + i`` belongs to the column over the dyadic interval
    ``I_{level, k+1}``: ``i = 0`` is ``X1 Y1 Y2``, ``1`` is ``X1 Y2 X2`` and
    ``2`` is ``X2 Y2 Y3``.
    """

    level: int
    top_images: np.ndarray      # level_map[n] at the 2^n + 1 top nodes
    bottom_images: np.ndarray   # level_map[n+1] at the 2^(n+1) + 1 bottom nodes
    A: np.ndarray
    b: np.ndarray
    sigma1: np.ndarray
    sigma2: np.ndarray
    jacobian: np.ndarray
    area: np.ndarray
    side: np.ndarray            # image length of each triangle's horizontal side

    @property
    def y_top(self):
        return 2.0**-self.level

    @property
    def y_bottom(self):
        return 2.0 ** -(self.level + 1)

    @property
    def count(self):
        return self.A.shape[0]

    def domain_vertices(self, idx=None):
        n = self.level
        idx = np.arange(self.count) if idx is None else np.asarray(idx)
        k, i = np.divmod(idx, 3)
        w = 2.0**-n
        a = k * w
        top, bot = self.y_top, self.y_bottom
        X1 = np.stack([a, np.full_like(a, top)], -1)
        X2 = np.stack([a + w, np.full_like(a, top)], -1)
        Y1 = np.stack([a, np.full_like(a, bot)], -1)
        Y2 = np.stack([a + 0.5 * w, np.full_like(a, bot)], -1)
        Y3 = np.stack([a + w, np.full_like(a, bot)], -1)
        tri = np.empty(idx.shape + (3, 2))
        for slot, (p, q, r) in enumerate(((X1, Y1, Y2), (X1, Y2, X2), (X2, Y2, Y3))):
            sel = i == slot
            tri[sel, 0], tri[sel, 1], tri[sel, 2] = p[sel], q[sel], r[sel]
        return tri

    def image_vertices(self, idx=None):
        tri = self.domain_vertices(idx)
        A = self.A if idx is None else self.A[idx]
        b = self.b if idx is None else self.b[idx]
        return np.einsum("tij,tvj->tvi", A, tri) + b[:, None, :]

    def triangle(self, i):
        dv = self.domain_vertices([i])[0]
        return TriangleMap(dv, dv @ self.A[i].T + self.b[i], self.A[i].copy(), self.b[i].copy())


def _strip_vertex_images(top, bot, n):
    """Domain and image vertex arrays ``(3 2^n, 3, 2)`` for strip ``n``."""
    cols = 2**n
    w = 2.0**-n
    a = np.arange(cols) * w
    yt, yb = w, 0.5 * w
    X1x, X2x = a, a + w
    Y1x, Y2x, Y3x = a, a + 0.5 * w, a + w
    tX1, tX2 = top[:-1], top[1:]
    bY1, bY2, bY3 = bot[0:-1:2], bot[1::2], bot[2::2]
    dom = np.empty((cols, 3, 3, 2))
    img = np.empty((cols, 3, 3, 2))
    spec = (
        ((X1x, yt, tX1), (Y1x, yb, bY1), (Y2x, yb, bY2)),
        ((X1x, yt, tX1), (Y2x, yb, bY2), (X2x, yt, tX2)),
        ((X2x, yt, tX2), (Y2x, yb, bY2), (Y3x, yb, bY3)),
    )
    for t, verts in enumerate(spec):
        for v, (dx, y, ix) in enumerate(verts):
            dom[:, t, v, 0] = dx
            dom[:, t, v, 1] = y
            img[:, t, v, 0] = ix
            img[:, t, v, 1] = y
    return dom.reshape(-1, 3, 2), img.reshape(-1, 3, 2)


def triangulate_strip(upper, lower, n=None):
    """Affine triangle maps for the strip between ``upper`` (level n) and ``lower`` (n+1)."""
    n = upper.level if n is None else int(n)
    if lower.level != n + 1:
        raise ConfigurationError("lower level map must sit one level below the upper one")
    top = upper(np.arange(2**n + 1) * 2.0**-n)
    bot = lower(np.arange(2 ** (n + 1) + 1) * 2.0 ** -(n + 1))
    dom, img = _strip_vertex_images(top, bot, n)
    E = np.stack([dom[:, 1] - dom[:, 0], dom[:, 2] - dom[:, 0]], axis=-1)
    Ei = np.stack([img[:, 1] - img[:, 0], img[:, 2] - img[:, 0]], axis=-1)
    detE = E[:, 0, 0] * E[:, 1, 1] - E[:, 0, 1] * E[:, 1, 0]
    Einv = np.empty_like(E)
    Einv[:, 0, 0], Einv[:, 1, 1] = E[:, 1, 1] / detE, E[:, 0, 0] / detE
    Einv[:, 0, 1], Einv[:, 1, 0] = -E[:, 0, 1] / detE, -E[:, 1, 0] / detE
    A = Ei @ Einv
    b = img[:, 0] - np.einsum("tij,tj->ti", A, dom[:, 0])
    jac = A[:, 0, 0] * A[:, 1, 1] - A[:, 0, 1] * A[:, 1, 0]
    bad = np.flatnonzero(~(jac > 0) | ~np.isfinite(jac))
    if bad.size:
        k = bad[0] // 3
        raise ConstructionError(
            f"degenerate image triangle in strip n={n}, column k={k + 1} (jacobian {jac[bad[0]]})")
    s1, s2 = singular_values(A)
    area = 0.5 * np.abs(detE)
    side = np.empty(dom.shape[0])
    side[0::3] = bot[1::2] - bot[0:-1:2]
    side[1::3] = top[1:] - top[:-1]
    side[2::3] = bot[2::2] - bot[1::2]
    return Strip(n, top, bot, A, b, s1, s2, jac, area, side)


# -- the mesh ----------------------------------------------------------------

@dataclass
class ExtensionMesh:
    depth: int
    boundary: object
    table: object
    partitions: list
    level_maps: list
    strips: list
    audit: dict = field(default_factory=dict)

    @property
    def triangle_count(self):
        return sum(s.count for s in self.strips)

    def triangle(self, n, i):
        return self.strips[n].triangle(i)

    def evaluate(self, points, direction="forward"):
        return evaluate(self, points, direction)


def build_extension(bh, depth, table=None):
    """Construct the extension down to height ``2^-depth`` (strips ``0..depth-1``)."""
    depth = int(depth)
    if depth < 1:
        raise ConfigurationError("extension depth must be >= 1")
    if table is None:
        table = image_lengths(bh, depth)
    elif table.depth < depth:
        raise ConfigurationError(f"table depth {table.depth} < mesh depth {depth}")
    partitions = [merge_level(table, n) for n in range(depth + 1)]
    maps = [build_level_map(p) for p in partitions]
    strips = [triangulate_strip(maps[n], maps[n + 1], n) for n in range(depth)]
    return ExtensionMesh(depth, bh, table, partitions, maps, strips)


# -- evaluation --------------------------------------------------------------

def _strip_index(y, depth):
    with np.errstate(divide="ignore"):
        n = np.floor(-np.log2(y))
    return np.clip(n, 0, depth - 1).astype(np.int64)


def evaluate(mesh, points, direction="forward"):
    """Apply ``h`` (``direction="forward"``) or ``h^-1`` to points of ``[0, 1]^2``."""
    pts = np.asarray(points, dtype=float)
    single = pts.ndim == 1
    pts = np.atleast_2d(pts)
    if pts.shape[-1] != 2 or not np.all(np.isfinite(pts)):
        raise DomainError("points must be finite (x, y) pairs")
    if np.any(pts < 0) or np.any(pts > 1):
        raise DomainError("points must lie in the closed unit square")
    if direction == "forward":
        out = _forward(mesh, pts)
    elif direction == "inverse":
        out = _inverse(mesh, pts)
    else:
        raise ConfigurationError(f"direction must be 'forward' or 'inverse', not {direction!r}")
    return out[0] if single else out


def locate(mesh, pts):
    """Strip and triangle index of each domain point; strip ``-1`` below resolution."""
    x, y = pts[:, 0], pts[:, 1]
    N = mesh.depth
    below = y < 2.0**-N
    n = np.where(below, -1, _strip_index(np.where(below, 1.0, y), N))
    tri = np.zeros(x.shape, dtype=np.int64)
    for level in np.unique(n[n >= 0]):
        sel = n == level
        w = 2.0**-level
        top = w
        k = np.clip(np.floor(x[sel] / w), 0, 2**level - 1).astype(np.int64)
        a = k * w
        t = (top - y[sel]) / (top - 0.5 * top)
        left = x[sel] - a < 0.5 * w * t
        right = x[sel] - a > w - 0.5 * w * t
        tri[sel] = 3 * k + np.where(left, 0, np.where(right, 2, 1))
    return n, tri


def _forward(mesh, pts):
    out = np.empty_like(pts)
    n, tri = locate(mesh, pts)
    below = n < 0
    if np.any(below):
        out[below, 0] = mesh.level_maps[mesh.depth](pts[below, 0])
        out[below, 1] = pts[below, 1]
    for level in np.unique(n[n >= 0]):
        sel = n == level
        s = mesh.strips[level]
        i = tri[sel]
        out[sel] = np.einsum("tij,tj->ti", s.A[i], pts[sel]) + s.b[i]
    return out


def _locate_image(strip, X, Y):
    """Triangle index of image points inside the image strip, by bisection on columns."""
    top, bot = strip.top_images, strip.bottom_images
    yt = strip.y_top
    t = (yt - Y) / (yt - strip.y_bottom)
    cols = top.size - 1
    lo = np.zeros(X.shape, dtype=np.int64)
    hi = np.full(X.shape, cols, dtype=np.int64)
    while np.any(hi - lo > 1):
        mid = (lo + hi) // 2
        edge = (1 - t) * top[mid] + t * bot[2 * mid]
        go = edge <= X
        lo = np.where(go, mid, lo)
        hi = np.where(go, hi, mid)
    k = lo
    left_edge = (1 - t) * top[k] + t * bot[2 * k + 1]
    right_edge = (1 - t) * top[k + 1] + t * bot[2 * k + 1]
    return 3 * k + np.where(X < left_edge, 0, np.where(X > right_edge, 2, 1))


def _inverse(mesh, pts):
    out = np.empty_like(pts)
    X, Y = pts[:, 0], pts[:, 1]
    N = mesh.depth
    below = Y < 2.0**-N
    if np.any(below):
        out[below, 0] = mesh.level_maps[N].inverse(X[below])
        out[below, 1] = Y[below]
    n = np.where(below, -1, _strip_index(np.where(below, 1.0, Y), N))
    for level in np.unique(n[n >= 0]):
        sel = n == level
        s = mesh.strips[level]
        i = _locate_image(s, X[sel], Y[sel])
        A, b = s.A[i], s.b[i]
        rhs = pts[sel] - b
        det = s.jacobian[i]
        out[sel, 0] = (A[:, 1, 1] * rhs[:, 0] - A[:, 0, 1] * rhs[:, 1]) / det
        out[sel, 1] = (A[:, 0, 0] * rhs[:, 1] - A[:, 1, 0] * rhs[:, 0]) / det
    return out


def distortion_at(mesh, pts):
    """``|Dh|`` (largest singular value) at domain points."""
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    n, tri = locate(mesh, pts)
    out = np.empty(pts.shape[0])
    below = n < 0
    if np.any(below):
        out[below] = np.maximum(mesh.level_maps[mesh.depth].slope_at(pts[below, 0]), 1.0)
    for level in np.unique(n[n >= 0]):
        sel = n == level
        out[sel] = mesh.strips[level].sigma1[tri[sel]]
    return out


# -- energies ----------------------------------------------------------------

@dataclass
class EnergyTerms:
    direction: str
    strips: np.ndarray
    terms: np.ndarray
    cumulative: np.ndarray
    surrogate: np.ndarray
    surrogate_constant: float
    verdict: str


def _strip_energy(strip, nf, direction):
    n = strip.level
    if direction == "forward":
        vals = np.asarray(nf(strip.sigma1), dtype=float) * strip.area
        sur = (np.asarray(nf(strip.side * 2.0**n), dtype=float) + nf(1.0)) * 2.0 ** (-2 * n)
    else:
        img_area = strip.area * strip.jacobian
        vals = np.asarray(nf(1.0 / strip.sigma2), dtype=float) * img_area
        weight = strip.side * 2.0**-n
        sur = (np.asarray(nf(2.0**-n / strip.side), dtype=float) + nf(1.0)) * weight
    return fsum(vals), float(np.max(vals / sur))


def orlicz_energy(mesh, nf, direction="forward", depth=None, window=5):
    """Per-strip ``int Phi(|Dh|)`` (forward) or ``int Psi(|Dh^-1|)`` over image strips (inverse).

    The per-triangle surrogate bound is evaluated alongside; its empirical
    constant is ``max exact / surrogate`` over all triangles.
    """
    if direction not in ("forward", "inverse"):
        raise ConfigurationError(f"direction must be 'forward' or 'inverse', not {direction!r}")
    depth = mesh.depth if depth is None else int(depth)
    if depth > mesh.depth:
        raise ConfigurationError(f"mesh depth {mesh.depth} < requested depth {depth}")
    terms, consts = [], []
    for s in mesh.strips[:depth]:
        e, c = _strip_energy(s, nf, direction)
        terms.append(e)
        consts.append(c)
    terms = np.array(terms)
    surrogate = np.array(consts)
    return EnergyTerms(direction, np.arange(depth), terms, cumulative(terms), surrogate,
                       float(np.max(surrogate)), trend_verdict(terms, window))


@dataclass
class EnergyReport:
    strips: np.ndarray
    forward: EnergyTerms
    inverse: EnergyTerms
    min_jacobian: np.ndarray
    max_group_excess: np.ndarray

    def rows(self):
        for i, n in enumerate(self.strips):
            yield {
                "strip": int(n),
                "fwd_term": float(self.forward.terms[i]),
                "fwd_cumulative": float(self.forward.cumulative[i]),
                "inv_term": float(self.inverse.terms[i]),
                "inv_cumulative": float(self.inverse.cumulative[i]),
                "min_jacobian": float(self.min_jacobian[i]),
                "max_group_excess": float(self.max_group_excess[i]),
            }

    def to_dict(self):
        return {
            "forward_verdict": self.forward.verdict,
            "inverse_verdict": self.inverse.verdict,
            "forward_surrogate_constant": self.forward.surrogate_constant,
            "inverse_surrogate_constant": self.inverse.surrogate_constant,
            "rows": list(self.rows()),
        }


def energy_report(mesh, phi, psi=None, depth=None):
    psi = phi if psi is None else psi
    fwd = orlicz_energy(mesh, phi, "forward", depth)
    inv = orlicz_energy(mesh, psi, "inverse", depth)
    strips = fwd.strips
    min_jac = np.array([float(np.min(mesh.strips[n].jacobian)) for n in strips])
    excess = np.array([mesh.partitions[n].max_image_ratio for n in strips])
    return EnergyReport(strips, fwd, inv, min_jac, excess)


def inverse_group_bound(mesh, inverse_table, psi):
    """Per-strip segment-group bound on the inverse energy.

    A group ``T_j`` at level ``n`` is covered by ``c_j = ceil(|T_j| 2^n) + 1``
    dyadic target intervals ``J_l``; the group's inverse energy is bounded by
    ``c_j Psi(2^n max_l |u^-1(J_l)|) 2^{-2n+1}`` summed over the
    groups.  Returns ``(bounds, exact)`` per strip.
    """
    bounds, exact = [], []
    for s in mesh.strips:
        n = s.level
        part = mesh.partitions[n]
        inv_len = inverse_table.lengths[n]
        starts = np.floor(part.image_nodes[:-1] * 2**n).astype(np.int64)
        stops = np.minimum(np.ceil(part.image_nodes[1:] * 2**n).astype(np.int64), 2**n)
        total = []
        for a, b in zip(starts.tolist(), stops.tolist()):
            cover = max(b - a, 1)
            worst = float(np.max(inv_len[a:max(b, a + 1)]))
            total.append((cover + 1) * float(psi(2.0**n * worst)) * 2.0 ** (1 - 2 * n))
        bounds.append(fsum(total))
        exact.append(_strip_energy(s, psi, "inverse")[0])
    return np.array(bounds), np.array(exact)


# -- audit -------------------------------------------------------------------

@dataclass
class AuditReport:
    min_jacobian: float
    interface_mismatch: float
    reconstruction_residual: float
    area_defect: float
    image_area_defect: float
    boundary_sup: np.ndarray
    boundary_bound: np.ndarray
    boundary_nonincreasing: bool
    boundary_within_bound: bool

    @property
    def passed(self):
        return bool(self.min_jacobian > 0 and self.interface_mismatch <= 1e-10
                    and self.reconstruction_residual <= 1e-10 and self.boundary_within_bound)

    def to_dict(self):
        d = dict(self.__dict__)
        d["boundary_sup"] = self.boundary_sup.tolist()
        d["boundary_bound"] = self.boundary_bound.tolist()
        d["passed"] = self.passed
        return d


def homeo_audit(mesh):
    """Check orientation, continuity across strip edges and the boundary approximation."""
    min_jac = math.inf
    mismatch = 0.0
    resid = 0.0
    area_def = 0.0
    img_area_def = 0.0
    for s in mesh.strips:
        n = s.level
        min_jac = min(min_jac, float(np.min(s.jacobian)))
        dom = s.domain_vertices()
        img = s.image_vertices()
        # vertex reconstruction against the level maps
        expected_x = np.where(dom[..., 1] == s.y_top, mesh.level_maps[n](dom[..., 0]),
                              mesh.level_maps[n + 1](dom[..., 0]))
        resid = max(resid, float(np.max(np.abs(img[..., 0] - expected_x))),
                    float(np.max(np.abs(img[..., 1] - dom[..., 1]))))
        # traces: midpoints of horizontal edges must land on the level maps
        for slot, (p, q, lm) in enumerate(((1, 2, n + 1), (0, 2, n), (1, 2, n + 1))):
            sel = np.arange(slot, s.count, 3)
            mid = 0.5 * (dom[sel, p] + dom[sel, q])
            hmid = np.einsum("tij,tj->ti", s.A[sel], mid) + s.b[sel]
            mismatch = max(mismatch, float(np.max(np.abs(hmid[:, 0] - mesh.level_maps[lm](mid[:, 0])))),
                           float(np.max(np.abs(hmid[:, 1] - mid[:, 1]))))
        strip_area = 2.0 ** -(n + 1)
        area_def = max(area_def, abs(fsum(s.area) - strip_area))
        img_area_def = max(img_area_def, abs(fsum(s.area * s.jacobian) - strip_area))
    sup, bound = [], []
    for n, lm in enumerate(mesh.level_maps):
        x = np.arange(2**n + 1) * 2.0**-n
        sup.append(float(np.max(np.abs(lm(x) - mesh.table.nodes[n]))))
        bound.append(float(np.max(mesh.partitions[n].image_lengths)))
    sup, bound = np.array(sup), np.array(bound)
    return AuditReport(
        min_jacobian=min_jac,
        interface_mismatch=mismatch,
        reconstruction_residual=resid,
        area_defect=area_def,
        image_area_defect=img_area_def,
        boundary_sup=sup,
        boundary_bound=bound,
        boundary_nonincreasing=bool(np.all(np.diff(sup) <= 1e-15)),
        boundary_within_bound=bool(np.all(sup <= bound + 1e-15)),
    )


def is_converging(terms):
    return terms.verdict == CONVERGING


def round_trip_residual(mesh, points):
    """``max |h^-1(h(z)) - z|`` over the given points."""
    z = np.asarray(points, dtype=float)
    back = evaluate(mesh, evaluate(mesh, z, "forward"), "inverse")
    return float(np.max(np.abs(back - z)))


def strip_verdict(terms, first, last, window=None):
    """Verdict from the increments of strips ``first..last`` only."""
    sel = np.asarray(terms)[first : last + 1]
    return trend_verdict(sel, window=len(sel) if window is None else window)
