"""Deterministic CSV, JSON and SVG writers."""

import csv
import json
import math
from pathlib import Path

import numpy as np


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isfinite(x):
            return x
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    return obj


def dumps(obj):
    """JSON with sorted keys and non-finite floats spelled out as strings."""
    return json.dumps(_clean(obj), sort_keys=True, indent=2) + "\n"


def write_json(path, obj):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(obj))
    return path


def write_csv(path, header, rows):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    return path


def douglas_rows(report):
    return [(int(n), float(a), float(b))
            for n, a, b in zip(report.levels, report.per_level, report.cumulative)]


def write_douglas_csv(path, report):
    return write_csv(path, ("level", "per_level", "cumulative"), douglas_rows(report))


ENERGY_COLUMNS = ("strip", "fwd_term", "fwd_cumulative", "inv_term", "inv_cumulative",
                  "min_jacobian", "max_group_excess")


def write_energy_csv(path, report):
    rows = [tuple(r[c] for c in ENERGY_COLUMNS) for r in report.rows()]
    return write_csv(path, ENERGY_COLUMNS, rows)


def mesh_to_dict(mesh):
    """Levels, group bounds, triangle vertex lists and singular values."""
    strips = []
    for s in mesh.strips:
        strips.append({
            "level": s.level,
            "domain_vertices": s.domain_vertices(),
            "image_vertices": s.image_vertices(),
            "sigma1": s.sigma1,
            "sigma2": s.sigma2,
            "jacobian": s.jacobian,
        })
    levels = [{
        "level": p.level,
        "group_bounds": p.bounds,
        "image_nodes": p.image_nodes,
        "flags": p.flags(),
    } for p in mesh.partitions]
    return {
        "depth": mesh.depth,
        "boundary": mesh.boundary.spec(),
        "triangle_count": mesh.triangle_count,
        "levels": levels,
        "strips": strips,
    }


def _color(v, lo, hi):
    # blue (low distortion) to red (high)
    t = 0.0 if hi <= lo else (v - lo) / (hi - lo)
    return f"rgb({int(255 * t)},{int(80 * (1 - t))},{int(255 * (1 - t))})"


def mesh_svg(mesh, max_level=8, size=480):
    """Domain and image triangulations side by side, colored by ``log sigma1``."""
    levels = mesh.strips[: max_level]
    logs = np.concatenate([np.log(s.sigma1) for s in levels])
    lo, hi = float(logs.min()), float(logs.max())
    pad = 10
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{2 * size + 3 * pad}" '
           f'height="{size + 2 * pad}">']
    for panel, image in ((0, False), (1, True)):
        ox = pad + panel * (size + pad)
        for s in levels:
            tris = s.image_vertices() if image else s.domain_vertices()
            for tri, val in zip(tris, np.log(s.sigma1)):
                pts = " ".join(f"{ox + size * x:.3f},{pad + size * (1 - y):.3f}" for x, y in tri)
                out.append(f'<polygon points="{pts}" fill="{_color(val, lo, hi)}" '
                           f'stroke="black" stroke-width="0.2"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_svg(path, mesh, max_level=8):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(mesh_svg(mesh, max_level))
    return path
