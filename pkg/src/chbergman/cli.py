"""Batch command line: spec validation, orbit export, kernel/ratio sweeps and bound audits.

Exit codes: 0 success, 2 validation failure, 3 element budget exceeded,
64 usage or parse error.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import audit, bounds
from .bounds import BoundReport
from .geometry import BallPoint, hyp_distance
from .group import check_membership
from .io import (SpecParseError, atomic_write, complex_from_pair, complex_from_str,
                 complex_to_str, render_table, spec_from_json, spec_matrices_from_json)
from .kernel import DegenerateKernelError, KernelConstant, kernel_sum, volume_ratio
from .orbit import (DEFAULT_BUDGET, LatticeSpec, PartialOrbitError, UndefinedEstimateError,
                    dirichlet_membership, enumerate_orbit, injectivity_radius_estimate,
                    word_to_str)
from .presets import SHIPPED, shipped_spec_path

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_BUDGET = 3
EXIT_USAGE = 64

COMMANDS = ("validate", "orbit", "kernel", "ratio", "bounds")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    lattice_file: str
    points: list = field(default_factory=list)
    k_range: list = field(default_factory=lambda: [3, 5, 10])
    word_length: int = 3
    constant: float = 1.0
    r_override: float | None = None
    output: str | None = None
    format: str = "csv"
    seed: int = 0
    variant: str = "proof"
    budget: int = DEFAULT_BUDGET
    n_points: int = 8

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if any(k < 3 for k in self.k_range):
            raise UsageError("every k must be at least 3")
        if self.word_length < 0:
            raise UsageError("--length must be nonnegative")
        if not self.constant > 0:
            raise UsageError("--constant must be positive")
        if self.format not in ("csv", "json"):
            raise UsageError("--format must be csv or json")


def _resolve_lattice(name: str) -> str:
    p = Path(name)
    if p.exists():
        return p.read_text()
    if name in SHIPPED:
        return shipped_spec_path(name).read_text()
    raise UsageError(f"lattice file {name!r} not found (shipped specs: {', '.join(SHIPPED)})")


def _parse_point(tok) -> BallPoint:
    if isinstance(tok, list):
        if len(tok) != 2:
            raise UsageError(f"point must have two coordinates, got {tok!r}")
        return BallPoint(*(complex_from_pair(c) if isinstance(c, list) else complex(c) for c in tok))
    parts = [p for p in str(tok).split(",") if p.strip()]
    if len(parts) != 2:
        raise UsageError(f"point {tok!r} must be 'z1,z2'")
    return BallPoint(complex_from_str(parts[0]), complex_from_str(parts[1]))


def parse_points(arg: str | None) -> list[BallPoint]:
    """Points from a JSON/text file or inline ``z1,z2;z1,z2`` with complex literals."""
    if not arg:
        return []
    p = Path(arg)
    try:
        if p.exists():
            text = p.read_text().strip()
            if text.startswith("["):
                return [_parse_point(t) for t in json.loads(text)]
            toks = [ln.strip() for ln in text.splitlines()
                    if ln.strip() and not ln.lstrip().startswith("#")]
        else:
            toks = [t for t in arg.split(";") if t.strip()]
        return [_parse_point(t) for t in toks]
    except (ValueError, json.JSONDecodeError) as exc:
        raise UsageError(f"bad point list: {exc}") from None


def _parse_ks(text: str) -> list[int]:
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        if not tok:
            continue
        if "-" in tok[1:]:
            lo, hi = tok.split("-", 1)
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(tok))
    if not out:
        raise UsageError("--k needs at least one value")
    return out


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="chbergman", description=__doc__.splitlines()[0])
    ap.add_argument("--command", required=True, choices=COMMANDS)
    ap.add_argument("--lattice", required=True,
                    help="spec JSON file, or a shipped spec name: " + ", ".join(SHIPPED))
    ap.add_argument("--k", default="3,5,10", help="bundle powers, e.g. '3,5,10' or '3-8'")
    ap.add_argument("--length", type=int, default=3, help="maximal word length")
    ap.add_argument("--points", default=None,
                    help="file or inline list 'z1,z2;z1,z2' (complex literals like 0.1+0.2j)")
    ap.add_argument("--n-points", type=int, default=8, help="random points when --points is absent")
    ap.add_argument("--constant", type=float, default=1.0, help="series constant C")
    ap.add_argument("--r", type=float, default=None, help="injectivity radius override")
    ap.add_argument("--variant", choices=bounds.VARIANTS, default="proof")
    ap.add_argument("--out", default=None, help="output path (stdout when omitted)")
    ap.add_argument("--format", choices=("csv", "json"), default="csv")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="orbit element cap")
    return ap


def _emit(cfg: RunConfig, columns, rows, meta) -> None:
    text = render_table(columns, rows, cfg.format, meta)
    if cfg.output:
        atomic_write(cfg.output, text)
    else:
        sys.stdout.write(text)


def _radius(cfg: RunConfig, spec: LatticeSpec) -> float:
    if cfg.r_override is not None:
        return cfg.r_override
    if spec.injectivity_radius_override is not None:
        return spec.injectivity_radius_override
    samples = [BallPoint(0.0, 0.0)] + audit.random_points(4, cfg.seed)
    try:
        return injectivity_radius_estimate(spec, samples, cfg.word_length)
    except UndefinedEstimateError as exc:
        raise UsageError(f"cannot estimate the injectivity radius: {exc}") from None


def _points(cfg: RunConfig) -> list[BallPoint]:
    return cfg.points or audit.random_points(cfg.n_points, cfg.seed)


def cmd_validate(cfg: RunConfig) -> int:
    doc, mats = spec_matrices_from_json(_resolve_lattice(cfg.lattice_file))
    columns = ["generator", "form_residual", "det_residual", "column_relation_residual",
               "row_relation_residual", "passed"]
    rows = []
    for i, m in enumerate(mats):
        rep = check_membership(m)
        rows.append([i, rep.form_residual, rep.det_residual, rep.column_relation_residual,
                     rep.row_relation_residual, rep.passed])
    _emit(cfg, columns, rows, {"spec": doc.get("name", "unnamed")})
    return EXIT_OK if all(r[-1] for r in rows) else EXIT_VALIDATION


class _ValidationError(Exception):
    pass


def _load_spec(cfg: RunConfig) -> LatticeSpec:
    text = _resolve_lattice(cfg.lattice_file)
    try:
        return spec_from_json(text)
    except SpecParseError:
        raise
    except ValueError as exc:
        # parsed fine but a generator failed membership
        raise _ValidationError(str(exc)) from None


def cmd_orbit(cfg: RunConfig) -> int:
    spec = _load_spec(cfg)
    pts = cfg.points or [BallPoint(0.0, 0.0)]
    z = pts[0]
    w = pts[1] if len(pts) > 1 else z
    columns = ["word", "dist", "image_z1", "image_z2"]
    status = EXIT_OK
    try:
        orb = enumerate_orbit(spec, z, w, cfg.word_length, budget=cfg.budget)
        partial = False
    except PartialOrbitError as exc:
        orb, partial, status = exc.orbit, True, EXIT_BUDGET
    try:
        inj = injectivity_radius_estimate(spec, [z], min(cfg.word_length, 3)) \
            if cfg.word_length > 0 else math.nan
    except (UndefinedEstimateError, PartialOrbitError):
        inj = math.nan
    rows = [[word_to_str(wd), d, im[0], im[1]]
            for wd, d, im in zip(orb.words, orb.dists, orb.images)]
    meta = {"spec": spec.name, "z": _pt(z), "w": _pt(w), "max_word_length": cfg.word_length,
            "elements": len(orb), "truncation_radius": orb.truncation_radius,
            "injectivity_estimate": inj, "exhaustive": orb.exhaustive, "partial": partial}
    _emit(cfg, columns, rows, meta)
    return status


def _pt(p: BallPoint) -> str:
    return f"{complex_to_str(p.z1)},{complex_to_str(p.z2)}"


def cmd_kernel(cfg: RunConfig) -> int:
    spec = _load_spec(cfg)
    r = _radius(cfg, spec)
    const = KernelConstant(cfg.constant)
    pts = _points(cfg)
    pairs = list(zip(pts[::2], pts[1::2])) if len(pts) > 1 else [(pts[0], pts[0])]
    columns = ["z", "w", "dist", "k", "petersson", "tail_total", "thm4_bound", "bound",
               "regime", "dirichlet", "exhaustive", "satisfied", "margin"]
    rows = []
    for z, w in pairs:
        orb = enumerate_orbit(spec, z, w, cfg.word_length, budget=cfg.budget)
        d = hyp_distance(z, w)
        dirichlet = dirichlet_membership(z, w, orb)
        exhaustive = orb.exhaustive and math.isfinite(orb.truncation_radius)
        for k in cfg.k_range:
            kv = kernel_sum(orb, 3 * k, const)
            envelope, _ = bounds.thm4_bound(d, k, r, cfg.constant, cfg.variant)
            if z == w:
                bound, regime = bounds.c_tilde(k, r, cfg.constant).value, "diagonal"
            else:
                bound, regime = bounds.offdiag_bound(d, k, r, cfg.constant, cfg.variant)
            tail = math.nan
            delta = orb.truncation_radius
            if math.isfinite(delta) and delta > r / 2.0:
                tail = bounds.tail_certificate(3 * k, delta, r, cfg.constant, orb.exhaustive).total_tail
            elif not math.isfinite(delta):
                tail = 0.0
            rep = bounds.verify("kernel", kv.petersson, bound, regime)
            rows.append([_pt(z), _pt(w), d, k, kv.petersson, tail, envelope, bound, regime,
                         dirichlet, exhaustive, rep.satisfied, rep.margin])
    _emit(cfg, columns, rows, {"spec": spec.name, "r": r, "C": cfg.constant,
                               "variant": cfg.variant, "max_word_length": cfg.word_length})
    return EXIT_OK


def cmd_ratio(cfg: RunConfig) -> int:
    spec = _load_spec(cfg)
    r = _radius(cfg, spec)
    const = KernelConstant(cfg.constant)
    columns = ["z", "k", "ratio", "thm9_bound", "thm9_bound_nolog", "satisfied", "margin", "error"]
    rows = []
    failures = 0
    for z in _points(cfg):
        orb = enumerate_orbit(spec, z, z, cfg.word_length, budget=cfg.budget)
        for k in cfg.k_range:
            b = bounds.thm9_bound(k, r, cfg.constant)
            nolog = bounds.thm9_bound(k, r, cfg.constant, "nolog")
            try:
                mr = volume_ratio(z, k, orb, const)
            except DegenerateKernelError as exc:
                failures += 1
                rows.append([_pt(z), k, math.nan, b, nolog, False, math.nan, str(exc)])
                continue
            rep = bounds.verify("ratio", mr.ratio, b, "log k")
            rows.append([_pt(z), k, mr.ratio, b, nolog, rep.satisfied, rep.margin, ""])
    _emit(cfg, columns, rows, {"spec": spec.name, "r": r, "C": cfg.constant,
                               "max_word_length": cfg.word_length})
    return EXIT_VALIDATION if rows and failures == len(rows) else EXIT_OK


def cmd_bounds(cfg: RunConfig) -> int:
    spec = _load_spec(cfg)
    r = _radius(cfg, spec)
    reports: list[BoundReport] = audit.full_audit(
        spec, r, cfg.k_range, cfg.word_length, cfg.n_points, cfg.seed, cfg.constant, cfg.variant)
    if cfg.points:
        reports += audit.diagonal_reports(spec, r, cfg.points, cfg.k_range, cfg.word_length,
                                          cfg.constant)
    columns = ["quantity", "measured", "bound", "regime", "satisfied", "margin"]
    rows = [[rep.quantity, rep.measured, rep.bound, rep.regime, rep.satisfied, rep.margin]
            for rep in reports]
    _emit(cfg, columns, rows, {"spec": spec.name, "r": r, "C": cfg.constant,
                               "variant": cfg.variant, "reports": len(rows),
                               "violations": sum(not rep.satisfied for rep in reports)})
    return EXIT_OK if all(rep.satisfied for rep in reports) else EXIT_VALIDATION


_DISPATCH = {"validate": cmd_validate, "orbit": cmd_orbit, "kernel": cmd_kernel,
             "ratio": cmd_ratio, "bounds": cmd_bounds}


def run(cfg: RunConfig) -> int:
    return _DISPATCH[cfg.command](cfg)


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        cfg = RunConfig(
            command=args.command, lattice_file=args.lattice, points=parse_points(args.points),
            k_range=_parse_ks(args.k), word_length=args.length, constant=args.constant,
            r_override=args.r, output=args.out, format=args.format, seed=args.seed,
            variant=args.variant, budget=args.budget, n_points=args.n_points)
        return run(cfg)
    except (UsageError, ValueError) as exc:
        # SpecParseError is a ValueError; bad point coordinates land here too
        print(f"chbergman: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except _ValidationError as exc:
        print(f"chbergman: validation failed: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except PartialOrbitError as exc:
        print(f"chbergman: {exc}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
