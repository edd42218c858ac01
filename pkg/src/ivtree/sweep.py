"""Parameter grids over (J, Jp, T) or (c, d), and their CSV/JSON rendering."""
from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, fields
from itertools import product
from typing import Iterator

import numpy as np

from .errors import ConfigError
from .fixedpoint import fixed_points
from .model import ModelParams
from .thermo import entropy_analytic, free_energy_paper

CONVENTION = "beta = 1/T (k_B = 1); c = exp(2*beta*J); d = exp(2*beta*Jp)"
CSV_COLUMNS = ("J", "Jp", "T", "beta", "c", "d", "num_roots", "u1", "u2", "u3", "f1", "f2", "f3", "region")
ENTROPY_COLUMNS = ("s1", "s2", "s3")
OUTPUTS = frozenset({"roots", "free_energy", "entropy", "region"})
DEFAULT_OUTPUTS = frozenset({"roots", "free_energy", "region"})
AXES = {"physical": ("J", "Jp", "T"), "reduced": ("c", "d")}

# couplings whose published root values assume an unstated convention
_REFERENCE_POINT = (-13.0, 34.6)
_REFERENCE_NOTE = (
    "J=-13, Jp=34.6: the root values u = 0.260261, 1.18483, 3.52491 quoted elsewhere for this "
    "point do not solve the fixed-point cubic under the convention above and are not reproduced; "
    "only the three-root structure is."
)


@dataclass(frozen=True)
class Axis:
    min: float
    max: float
    steps: int = 1
    scale: str = "linear"

    def validate(self, path: str) -> None:
        if not isinstance(self.steps, int) or self.steps < 1:
            raise ConfigError(f"{path}.steps", f"must be an integer >= 1, got {self.steps!r}")
        if self.scale not in ("linear", "log"):
            raise ConfigError(f"{path}.scale", f"must be 'linear' or 'log', got {self.scale!r}")
        if not (math.isfinite(self.min) and math.isfinite(self.max)):
            raise ConfigError(path, "bounds must be finite")
        if self.steps == 1 and self.min > self.max or self.steps > 1 and not self.min < self.max:
            raise ConfigError(path, f"need min < max (got {self.min}, {self.max})")
        if self.scale == "log" and self.min <= 0:
            raise ConfigError(f"{path}.min", "log axes need min > 0")

    def values(self) -> list[float]:
        if self.steps == 1:
            return [float(self.min)]
        if self.scale == "log":
            return [float(v) for v in np.geomspace(self.min, self.max, self.steps)]
        return [float(v) for v in np.linspace(self.min, self.max, self.steps)]


@dataclass(frozen=True)
class SweepSpec:
    mode: str
    grid: dict[str, Axis]
    outputs: frozenset[str] = DEFAULT_OUTPUTS
    beta: float = 1.0  # reduced mode only: the beta used to recover (J, Jp)

    def validate(self) -> None:
        if self.mode not in AXES:
            raise ConfigError("mode", f"must be one of {sorted(AXES)}, got {self.mode!r}")
        names = AXES[self.mode]
        extra = set(self.grid) - set(names)
        if extra:
            raise ConfigError(f"grid.{sorted(extra)[0]}", f"not an axis of {self.mode} mode")
        for name in names:
            if name not in self.grid:
                raise ConfigError(f"grid.{name}", "missing axis")
            self.grid[name].validate(f"grid.{name}")
        if self.mode == "physical" and self.grid["T"].min <= 0:
            raise ConfigError("grid.T.min", "temperature must be positive")
        if self.mode == "reduced":
            for name in names:
                if self.grid[name].min <= 0:
                    raise ConfigError(f"grid.{name}.min", "c and d must be positive")
        bad = set(self.outputs) - OUTPUTS
        if bad:
            raise ConfigError("outputs", f"unknown output(s) {sorted(bad)}")
        if not self.beta > 0:
            raise ConfigError("beta", "must be positive")

    def points(self) -> list[tuple[float, ...]]:
        """Grid points in row-major order over the mode's axes."""
        return list(product(*(self.grid[name].values() for name in AXES[self.mode])))

    @property
    def size(self) -> int:
        return math.prod(self.grid[name].steps for name in AXES[self.mode])


@dataclass(frozen=True)
class SweepRow:
    J: float
    Jp: float
    T: float
    beta: float
    c: float
    d: float
    num_roots: int
    u1: float | None = None
    u2: float | None = None
    u3: float | None = None
    f1: float | None = None
    f2: float | None = None
    f3: float | None = None
    region: str | None = None
    s1: float | None = None
    s2: float | None = None
    s3: float | None = None


def _pad(vals, n=3):
    vals = list(vals)
    return vals + [None] * (n - len(vals))


def evaluate_params(p: ModelParams, outputs=DEFAULT_OUTPUTS, c: float | None = None, d: float | None = None) -> SweepRow:
    """Row for one parameter point; ``c``/``d`` override the values derived from ``p``."""
    c = p.c if c is None else c
    d = p.d if d is None else d
    rep = fixed_points(c, d)
    hs = [math.log(x) for x in rep.roots]
    u = _pad(rep.roots) if "roots" in outputs else [None] * 3
    f = _pad(free_energy_paper(p, h) for h in hs) if "free_energy" in outputs else [None] * 3
    s = _pad(entropy_analytic(p, h) for h in hs) if "entropy" in outputs else [None] * 3
    return SweepRow(
        J=p.J, Jp=p.Jp, T=1.0 / p.beta, beta=p.beta, c=c, d=d, num_roots=rep.num_roots,
        u1=u[0], u2=u[1], u3=u[2], f1=f[0], f2=f[1], f3=f[2],
        region=rep.region if "region" in outputs else None,
        s1=s[0], s2=s[1], s3=s[2],
    )


def evaluate_point(mode: str, point: tuple[float, ...], outputs=DEFAULT_OUTPUTS, beta: float = 1.0) -> SweepRow:
    if mode == "physical":
        J, Jp, T = point
        return evaluate_params(ModelParams.from_temperature(J, Jp, T), outputs)
    c, d = point
    # keep the requested (c, d) verbatim rather than round-tripping through log/exp
    return evaluate_params(ModelParams.from_reduced(c, d, beta), outputs, c, d)


def default_threads() -> int:
    env = os.environ.get("IVTREE_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError("IVTREE_THREADS", f"not an integer: {env!r}") from None
    return os.cpu_count() or 1


def run_sweep(spec: SweepSpec, threads: int | None = None) -> Iterator[SweepRow]:
    """One row per grid point, in grid order whatever the thread count."""
    spec.validate()
    threads = threads or default_threads()
    pts = spec.points()

    def work(pt):
        return evaluate_point(spec.mode, pt, spec.outputs, spec.beta)

    if threads == 1:
        yield from map(work, pts)
        return
    with ThreadPoolExecutor(max_workers=threads) as pool:
        yield from pool.map(work, pts)


def provenance_notes(rows) -> list[str]:
    for r in rows:
        if math.isclose(r.J, _REFERENCE_POINT[0], rel_tol=1e-9) and math.isclose(r.Jp, _REFERENCE_POINT[1], rel_tol=1e-9):
            return [_REFERENCE_NOTE]
    return []


def _columns(rows) -> tuple[str, ...]:
    if any(r.s1 is not None for r in rows):
        return CSV_COLUMNS + ENTROPY_COLUMNS
    return CSV_COLUMNS


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def rows_to_csv(rows) -> str:
    rows = list(rows)
    buf = io.StringIO()
    buf.write(f"# convention: {CONVENTION}\n")
    for note in provenance_notes(rows):
        buf.write(f"# note: {note}\n")
    cols = _columns(rows)
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in rows:
        w.writerow([_cell(getattr(r, c)) for c in cols])
    return buf.getvalue()


def rows_to_json(rows) -> str:
    rows = list(rows)
    cols = _columns(rows)
    payload = {
        "convention": CONVENTION,
        "notes": provenance_notes(rows),
        "columns": list(cols),
        "rows": [{c: getattr(r, c) for c in cols} for r in rows],
    }
    return json.dumps(payload, indent=2) + "\n"


def spec_from_mapping(cfg: dict) -> SweepSpec:
    """Build a SweepSpec from a TOML-style mapping (``mode``, ``outputs``, ``beta``, ``grid.<axis>``)."""
    try:
        mode = cfg.get("mode", "reduced")
        grid_cfg = cfg.get("grid", {})
        if not isinstance(grid_cfg, dict):
            raise ConfigError("grid", "must be a table")
        grid = {}
        for name, ax in grid_cfg.items():
            if isinstance(ax, (int, float)):
                grid[name] = Axis(float(ax), float(ax), 1)
                continue
            if not isinstance(ax, dict):
                raise ConfigError(f"grid.{name}", "must be a number or a table")
            known = {f.name for f in fields(Axis)}
            bad = set(ax) - known
            if bad:
                raise ConfigError(f"grid.{name}.{sorted(bad)[0]}", "unknown key")
            if "min" not in ax:
                raise ConfigError(f"grid.{name}.min", "missing")
            grid[name] = Axis(float(ax["min"]), float(ax.get("max", ax["min"])),
                              ax.get("steps", 1), ax.get("scale", "linear"))
        outputs = frozenset(cfg.get("outputs", DEFAULT_OUTPUTS))
        spec = SweepSpec(mode, grid, outputs, float(cfg.get("beta", 1.0)))
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError("config", str(exc)) from None
    spec.validate()
    return spec


def row_dict(row: SweepRow) -> dict:
    return asdict(row)
