"""Command-line front end: ``ivtree {fixed-points,scan,free-energy,entropy,verify}``.

Exit codes: 0 ok, 1 verification failure, 2 configuration error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

from .errors import ConfigError, DomainError
from .fixedpoint import TIFields, fixed_points
from .model import ModelParams
from .sweep import (
    AXES,
    CONVENTION,
    Axis,
    SweepSpec,
    default_threads,
    evaluate_params,
    provenance_notes,
    rows_to_csv,
    rows_to_json,
    run_sweep,
    spec_from_mapping,
)
from .thermo import entropy, free_energy_numeric
from .verify import run_verify

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib


def _axis(text: str) -> Axis:
    """'VALUE' or 'MIN:MAX:STEPS[:log|linear]'."""
    parts = text.split(":")
    try:
        if len(parts) == 1:
            v = float(parts[0])
            return Axis(v, v, 1)
        if len(parts) in (3, 4):
            return Axis(float(parts[0]), float(parts[1]), int(parts[2]), parts[3] if len(parts) == 4 else "linear")
    except ValueError:
        pass
    raise argparse.ArgumentTypeError(f"expected VALUE or MIN:MAX:STEPS[:log], got {text!r}")


def _common() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), default=argparse.SUPPRESS)
    common.add_argument("--threads", type=int, default=argparse.SUPPRESS, help="worker threads (default: all cores)")
    common.add_argument("--out", default=argparse.SUPPRESS, help="write output here instead of stdout")
    common.add_argument("--config", default=argparse.SUPPRESS, help="TOML file; CLI flags take precedence")
    return common


def _param_args(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--J", type=float)
    sp.add_argument("--Jp", type=float)
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--T", type=float)
    g.add_argument("--beta", type=float)
    sp.add_argument("--c", type=float, help="reduced coupling exp(2 beta J); needs --d")
    sp.add_argument("--d", type=float, help="reduced coupling exp(2 beta Jp); needs --c")


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="ivtree", parents=[common],
                                     description="Ising-Vannimenus model on the order-2 Cayley tree")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("fixed-points", parents=[common], help="fixed points of g at one parameter point")
    _param_args(sp)

    sp = sub.add_parser("scan", parents=[common], help="grid sweep over (J, Jp, T) or (c, d)")
    sp.add_argument("--mode", choices=sorted(AXES))
    for name in ("J", "Jp", "T", "c", "d"):
        sp.add_argument(f"--{name}", type=_axis, metavar="MIN:MAX:STEPS[:log]")
    sp.add_argument("--outputs", help="comma-separated subset of roots,free_energy,entropy,region")
    sp.add_argument("--beta", type=float, help="beta used to recover (J, Jp) in reduced mode")

    sp = sub.add_parser("free-energy", parents=[common], help="free energies at each fixed point")
    _param_args(sp)
    sp.add_argument("--h", type=float, help="use this field instead of the fixed points")
    sp.add_argument("--depth", type=int, default=12)

    sp = sub.add_parser("entropy", parents=[common], help="entropy at each fixed point")
    _param_args(sp)
    sp.add_argument("--h", type=float, help="use this field instead of the fixed points")

    sp = sub.add_parser("verify", parents=[common], help="run the oracle suites")
    sp.add_argument("--level", choices=("quick", "full"), default="quick")
    sp.add_argument("--perturb", type=float, default=0.0, help="shift fixed-point fields by this much")
    return parser


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except OSError as exc:
        raise ConfigError("--config", str(exc)) from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError("--config", f"invalid TOML: {exc}") from None


def _params(args, cfg: dict) -> ModelParams:
    def pick(name):
        v = getattr(args, name, None)
        return cfg.get(name) if v is None else v

    J, Jp, T, beta, c, d = (pick(k) for k in ("J", "Jp", "T", "beta", "c", "d"))
    try:
        if c is not None or d is not None:
            if c is None or d is None:
                raise ConfigError("c" if c is None else "d", "--c and --d go together")
            return ModelParams.from_reduced(float(c), float(d), float(beta) if beta is not None else 1.0)
        if J is None or Jp is None:
            raise ConfigError("J" if J is None else "Jp", "missing coupling (give --J and --Jp, or --c and --d)")
        if T is not None:
            return ModelParams.from_temperature(float(J), float(Jp), float(T))
        if beta is None:
            raise ConfigError("T", "give --T or --beta")
        return ModelParams(float(J), float(Jp), float(beta))
    except DomainError as exc:
        raise ConfigError("params", str(exc)) from None


def _scan_spec(args, cfg: dict) -> SweepSpec:
    merged = dict(cfg)
    grid = {k: dict(v) if isinstance(v, dict) else v for k, v in cfg.get("grid", {}).items()}
    if args.mode:
        merged["mode"] = args.mode
    for name in ("J", "Jp", "T", "c", "d"):
        ax = getattr(args, name)
        if ax is not None:
            grid[name] = {"min": ax.min, "max": ax.max, "steps": ax.steps, "scale": ax.scale}
    merged["grid"] = grid
    if args.outputs:
        merged["outputs"] = [o.strip() for o in args.outputs.split(",") if o.strip()]
    if args.beta is not None:
        merged["beta"] = args.beta
    return spec_from_mapping(merged)


def _table(header, rows, fmt, notes=()) -> str:
    if fmt == "json":
        return json.dumps({"convention": CONVENTION, "notes": list(notes),
                           "rows": [dict(zip(header, r)) for r in rows]}, indent=2) + "\n"
    buf = io.StringIO()
    buf.write(f"# convention: {CONVENTION}\n")
    for n in notes:
        buf.write(f"# note: {n}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow(["" if v is None else repr(v) if isinstance(v, float) else v for v in r])
    return buf.getvalue()


def _fields_for(p: ModelParams, h: float | None) -> list[tuple[float, TIFields]]:
    if h is not None:
        return [(math.exp(h), TIFields(h, h))]
    return [(u, TIFields.from_u(u)) for u in fixed_points(p.c, p.d).roots]


def _run(args) -> tuple[str, int]:
    fmt = getattr(args, "format", "csv")
    cfg = _load_config(getattr(args, "config", None))
    threads = getattr(args, "threads", None) or default_threads()
    if threads < 1:
        raise ConfigError("--threads", "must be >= 1")

    if args.command == "scan":
        rows = list(run_sweep(_scan_spec(args, cfg), threads=threads))
        return (rows_to_json(rows) if fmt == "json" else rows_to_csv(rows)), 0

    if args.command == "verify":
        rep = run_verify(args.level, args.perturb)
        return (rep.to_json() if fmt == "json" else rep.to_csv()), (0 if rep.passed else 1)

    p = _params(args, cfg)
    if args.command == "fixed-points":
        row = evaluate_params(p)
        rep = fixed_points(p.c, p.d)
        if fmt == "json":
            payload = json.loads(rows_to_json([row]))
            payload["rows"][0]["stability"] = list(rep.stability)
            payload["rows"][0]["multiplicity"] = list(rep.multiplicity)
            return json.dumps(payload, indent=2) + "\n", 0
        lines = rows_to_csv([row]).splitlines(keepends=True)
        n_comments = sum(1 for ln in lines if ln.startswith("#"))
        stab = "# stability: " + ";".join(rep.stability) + "\n"
        return "".join(lines[:n_comments]) + stab + "".join(lines[n_comments:]), 0

    notes = provenance_notes([evaluate_params(p, frozenset())])
    if args.command == "free-energy":
        if args.depth < 1:
            raise ConfigError("--depth", "must be >= 1")
        header = ("u", "h", "f_paper", "f_numeric", "f_recursion", "n_used", "convergence_gap")
        rows = []
        for u, f in _fields_for(p, args.h):
            r = free_energy_numeric(p, f, args.depth)
            rows.append((u, f.h1, r.f_paper, r.f_numeric, r.f_recursion, r.n_used, r.convergence_gap))
        return _table(header, rows, fmt, notes), 0

    if args.command == "entropy":
        header = ("u", "h", "s_analytic", "s_fd", "s_residual")
        rows = []
        for u, f in _fields_for(p, args.h):
            r = entropy(p, f.h1)
            rows.append((u, f.h1, r.s_analytic, r.s_fd, r.s_residual))
        return _table(header, rows, fmt, notes), 0
    raise AssertionError(args.command)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        text, code = _run(args)
    except ConfigError as exc:
        print(f"ivtree: config error: {exc}", file=sys.stderr)
        return 2
    out = getattr(args, "out", None)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
