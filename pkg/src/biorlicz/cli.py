"""Command-line front end.

    biorlicz <douglas|extend|energy|verify|corpus> [--config FILE] [--depth N]
             [--seed S] [--out DIR] [--svg]

Exit status is 0 when every asserted check passes, 1 when a check fails and
2 for a malformed configuration.
"""

import argparse
from dataclasses import dataclass, field
import os
from pathlib import Path
import sys

import numpy as np
import yaml

from . import analysis, boundary, douglas, extension, nfunc, reports
from ._numerics import DIVERGING
from .errors import BiOrliczError, ConfigurationError, DataError, PreconditionError

OUTPUT_ENV = "BIORLICZ_OUTPUT_DIR"
MAX_DEPTH = boundary.MAX_DEPTH

DEFAULT_CORPUS = (
    {"family": "identity"},
    {"family": "power", "alpha": 0.5},
    {"family": "power", "alpha": 0.1},
    {"family": "random-pl", "knots": 16},
    {"family": "cantor", "level": 8},
)

_KEYS = {"boundary", "phi", "psi", "depth", "seed", "quadrature", "output", "svg",
         "verify", "corpus"}


@dataclass
class RunConfig:
    boundary: dict = field(default_factory=lambda: {"family": "identity"})
    phi: dict = field(default_factory=lambda: {"family": "power", "p": 2.0})
    psi: dict = None
    depth: int = 10
    seed: int = 0
    quadrature: dict = field(default_factory=dict)
    output: str = "biorlicz-out"
    svg: bool = False
    verify: dict = field(default_factory=dict)
    corpus: list = None

    def __post_init__(self):
        if self.psi is None:
            self.psi = dict(self.phi)
        if not isinstance(self.depth, int) or isinstance(self.depth, bool):
            raise ConfigurationError(f"depth must be an integer, got {self.depth!r}")
        if not 1 <= self.depth <= MAX_DEPTH:
            raise ConfigurationError(f"depth must lie in 1..{MAX_DEPTH}, got {self.depth}")
        if not isinstance(self.seed, int) or isinstance(self.seed, bool):
            raise ConfigurationError(f"seed must be an integer, got {self.seed!r}")
        for name in ("boundary", "phi", "psi", "quadrature", "verify"):
            if not isinstance(getattr(self, name), dict):
                raise ConfigurationError(f"{name} must be a mapping")
        if self.corpus is not None and not isinstance(self.corpus, list):
            raise ConfigurationError("corpus must be a list of boundary specs")


def load_config(path=None, overrides=None):
    data = {}
    if path is not None:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigurationError(f"cannot read config {path}: {exc}") from None
        try:
            data = yaml.safe_load(text) or {}
        except yaml.YAMLError as exc:
            raise ConfigurationError(f"config {path} is not valid YAML: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigurationError("config must be a mapping at the top level")
    unknown = set(data) - _KEYS
    if unknown:
        raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
    for k, v in (overrides or {}).items():
        if v is not None:
            data[k] = v
    return RunConfig(**data)


def _spec(spec, what):
    if isinstance(spec, str):
        spec = {"family": spec}
    if not isinstance(spec, dict) or "family" not in spec:
        raise ConfigurationError(f"{what} spec needs a 'family' key")
    params = {k: v for k, v in spec.items() if k != "family"}
    return spec["family"], params


def make_boundary(spec, seed):
    family, params = _spec(spec, "boundary")
    if family in ("random-pl", "random-piecewise-linear"):
        params.setdefault("seed", seed)
    return boundary.construct_family(family, **params)


def make_nfunction(spec):
    family, params = _spec(spec, "N-function")
    try:
        return nfunc.by_name(family, **params)
    except BiOrliczError as exc:
        raise ConfigurationError(str(exc)) from None


def output_dir(cfg, flag=None):
    return Path(flag or os.environ.get(OUTPUT_ENV) or cfg.output)


# -- subcommands -------------------------------------------------------------

class Outcome:
    """Collects report files and named failing checks."""

    def __init__(self, out):
        self.out = Path(out)
        self.failures = []
        self.files = []

    def check(self, name, ok):
        if not ok:
            self.failures.append(name)

    def json(self, name, obj):
        self.files.append(reports.write_json(self.out / name, obj))

    def csv(self, writer, name, report):
        self.files.append(writer(self.out / name, report))


def run_douglas(cfg, res):
    bh = make_boundary(cfg.boundary, cfg.seed)
    phi = make_nfunction(cfg.phi)
    q = cfg.quadrature
    table = boundary.image_lengths(bh, cfg.depth)
    disc = douglas.discrete_douglas(table, phi, cfg.depth, q.get("window", 5))
    res.csv(reports.write_douglas_csv, "douglas.csv", disc)
    payload = {"boundary": bh.spec(), "phi": phi.spec(), "depth": cfg.depth,
               "discrete": disc.to_dict()}
    if q.get("continuous", False):
        eq = douglas.equivalence_report(bh, phi, cfg.depth, q.get("grid"), table,
                                        q.get("refine", 6))
        payload["continuous"] = eq.continuous.to_dict()
        payload["ratios"] = eq.ratios
        payload["verdicts_agree"] = eq.verdicts_agree
        res.check("douglas.verdicts_agree", eq.verdicts_agree)
    res.check("douglas.cumulative_nondecreasing", bool(np.all(np.diff(disc.cumulative) >= 0)))
    res.json("douglas.json", payload)


def run_extend(cfg, res):
    bh = make_boundary(cfg.boundary, cfg.seed)
    mesh = extension.build_extension(bh, cfg.depth)
    audit = extension.homeo_audit(mesh)
    data = reports.mesh_to_dict(mesh)
    data["audit"] = audit.to_dict()
    res.json("mesh.json", data)
    if cfg.svg:
        res.files.append(reports.write_svg(res.out / "mesh.svg", mesh))
    res.check("audit.passed", audit.passed)


def run_energy(cfg, res):
    bh = make_boundary(cfg.boundary, cfg.seed)
    phi, psi = make_nfunction(cfg.phi), make_nfunction(cfg.psi)
    mesh = extension.build_extension(bh, cfg.depth)
    rep = extension.energy_report(mesh, phi, psi)
    res.csv(reports.write_energy_csv, "energy.csv", rep)
    res.json("energy.json", {"boundary": bh.spec(), "phi": phi.spec(), "psi": psi.spec(),
                             "depth": cfg.depth, **rep.to_dict()})
    res.check("energy.min_jacobian_positive", bool(np.all(rep.min_jacobian > 0)))


def _verify_one(bh, phi, psi, cfg):
    """Theorem, corollary, maximal and only-if checks for one boundary map."""
    v = cfg.verify
    failures = []
    out = {"boundary": bh.spec(), "phi": phi.spec(), "psi": psi.spec(), "depth": cfg.depth}
    exp = analysis.theorem_experiment(bh, phi, psi, cfg.depth)
    out["theorem"] = exp.to_dict()
    if exp.consistent is False:
        failures.append("theorem.consistent")
    mesh = exp.details["mesh"]
    audit = extension.homeo_audit(mesh)
    out["audit"] = audit.to_dict()
    if not audit.passed:
        failures.append("audit.passed")

    probes = analysis.onlyif_sweep(mesh, max_level=v.get("probe_level", 8),
                                   C=v.get("window_factor", 3.0))
    bad = [p.to_dict() for p in probes if not p.holds]
    out["onlyif"] = {"probes": len(probes), "violations": bad,
                     "min_slack": min((p.slack for p in probes), default=None)}
    if bad:
        failures.append("onlyif.violations")

    p, t0 = v.get("p", 2.0), v.get("t0", 0.0)
    try:
        fld = analysis.sample_distortion(mesh, v.get("maximal_grid", 256))
        out["maximal"] = analysis.maximal_inequality_test(fld, phi, p, t0).to_dict()
    except PreconditionError as exc:
        out["maximal"] = {"skipped": str(exc)}

    try:
        cor = analysis.corollary_experiment(bh, phi, cfg.depth)
        out["corollary"] = cor.to_dict()
        if not cor.domination_holds:
            failures.append("corollary.domination")
        if DIVERGING in (cor.douglas_fwd, cor.douglas_inv, cor.energy_fwd, cor.energy_inv):
            failures.append("corollary.diverging")
    except PreconditionError as exc:
        out["corollary"] = {"skipped": str(exc)}
    out["failures"] = failures
    return out, failures


def run_verify(cfg, res):
    bh = make_boundary(cfg.boundary, cfg.seed)
    phi, psi = make_nfunction(cfg.phi), make_nfunction(cfg.psi)
    out, failures = _verify_one(bh, phi, psi, cfg)
    for name in failures:
        res.check(name, False)
    res.json("verify.json", out)


def run_corpus(cfg, res):
    specs = cfg.corpus if cfg.corpus is not None else list(DEFAULT_CORPUS)
    phi, psi = make_nfunction(cfg.phi), make_nfunction(cfg.psi)
    entries, rows = [], []
    for i, spec in enumerate(specs):
        bh = make_boundary(spec, cfg.seed)
        out, failures = _verify_one(bh, phi, psi, cfg)
        table = out["theorem"]
        entries.append(out)
        rows.append((i, bh.label, table["douglas_fwd"], table["douglas_inv"],
                     table["energy_fwd"], table["energy_inv"],
                     "" if table["consistent"] is None else str(table["consistent"]).lower(),
                     float(out["audit"]["min_jacobian"]), len(out["onlyif"]["violations"])))
        for name in failures:
            res.check(f"corpus[{i}].{name}", False)
    res.json("corpus.json", {"seed": cfg.seed, "depth": cfg.depth, "entries": entries})
    res.files.append(reports.write_csv(
        res.out / "corpus.csv",
        ("entry", "family", "douglas_fwd", "douglas_inv", "energy_fwd", "energy_inv",
         "consistent", "min_jacobian", "onlyif_violations"), rows))


COMMANDS = {
    "douglas": run_douglas,
    "extend": run_extend,
    "energy": run_energy,
    "verify": run_verify,
    "corpus": run_corpus,
}


def build_parser():
    ap = argparse.ArgumentParser(prog="biorlicz", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--config", help="YAML run configuration")
    ap.add_argument("--depth", type=int, help="truncation depth (overrides config)")
    ap.add_argument("--seed", type=int, help="seed for random families (overrides config)")
    ap.add_argument("--out", help=f"output directory (overrides ${OUTPUT_ENV} and config)")
    ap.add_argument("--svg", action="store_true", default=None, help="also write mesh.svg")
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, {"depth": args.depth, "seed": args.seed, "svg": args.svg})
        res = Outcome(output_dir(cfg, args.out))
        COMMANDS[args.command](cfg, res)
    except (ConfigurationError, DataError) as exc:
        print(f"biorlicz: configuration error: {exc}", file=sys.stderr)
        return 2
    for path in res.files:
        print(path)
    if res.failures:
        for name in res.failures:
            print(f"biorlicz: check failed: {name}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
