"""Cross-module oracle suites run by ``ivtree verify``.

Every check is seeded and sequential so that the report is byte-identical
between runs. Timings are deliberately left out of the report.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from ._numerics import LN2
from .fixedpoint import TIFields, fixed_points, map_g, thresholds
from .gibbs import (
    BoundaryFields,
    compatibility_residual,
    consistency_residual,
    log_level_product,
    partition_dp,
    partition_exhaustive,
)
from .model import ModelParams
from .thermo import (
    entropy_analytic,
    entropy_fd,
    f_numeric,
    free_energy_paper,
    free_energy_recursion,
    residual_entropy,
)
from .tree import build_tree

SEED = 20240611


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    value: float
    threshold: float
    detail: str = ""


@dataclass(frozen=True)
class VerifyReport:
    level: str
    checks: tuple[Check, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("check", "status", "value", "threshold", "detail"))
        for c in self.checks:
            w.writerow((c.name, "PASS" if c.passed else "FAIL", repr(c.value), repr(c.threshold), c.detail))
        w.writerow(("overall", "PASS" if self.passed else "FAIL", "", "", self.level))
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps({"level": self.level, "passed": self.passed,
                           "checks": [asdict(c) for c in self.checks]}, indent=2) + "\n"


def _at_most(name, value, threshold, detail=""):
    return Check(name, bool(value <= threshold), float(value), float(threshold), detail)


def _at_least(name, value, threshold, detail=""):
    return Check(name, bool(value > threshold), float(value), float(threshold), detail)


def _random_fields(rng) -> BoundaryFields:
    from .gibbs import EdgeFieldQuadruple
    return BoundaryFields.of(EdgeFieldQuadruple(*rng.uniform(-1.5, 1.5, 4)))


def _three_root_cases(rng, k: int) -> list[tuple[float, float]]:
    out = []
    for _ in range(k):
        d = float(rng.uniform(3.5, 12.5))
        e1, e2 = thresholds(d)
        lo, hi = math.log(e1), math.log(e2)
        c = math.exp(lo + (hi - lo) * float(rng.uniform(0.1, 0.9)))
        out.append((c, d))
    return out


def fixed_point_cases(rng, k_three: int, k_other: int):
    """Fixed points of ``k_three`` three-root (c, d) draws plus ``k_other`` log-uniform draws in [0.05, 10]^2.

    Couplings stay moderate: at strong coupling the max-norm consistency
    residual responds only weakly (~1e-6) to a 1e-2 field perturbation.
    """
    cases = _three_root_cases(rng, k_three)
    cases += [tuple(float(x) for x in np.exp(rng.uniform(math.log(0.05), math.log(10.0), 2))) for _ in range(k_other)]
    for c, d in cases:
        p = ModelParams.from_reduced(c, d)
        for f in fixed_points(c, d).fields():
            yield p, f


def sign_change_count(c: float, d: float, num: int = 100_000) -> int:
    """Root count of the fixed-point cubic by scanning a log grid for sign changes."""
    hi = 1.0 + max(d, d / c, 1.0 / c)
    u = np.geomspace(1e-12, hi, num)
    v = ((c * u - c * d) * u + d) * u - 1.0
    s = np.sign(v)
    s = s[s != 0]
    return int(np.count_nonzero(s[1:] != s[:-1]))


def run_verify(level: str = "quick", perturb: float = 0.0) -> VerifyReport:
    """Run the oracle suites; ``perturb`` shifts the fixed-point fields to show the checks bite."""
    if level not in ("quick", "full"):
        raise ValueError(f"level must be 'quick' or 'full', got {level!r}")
    full = level == "full"
    rng = np.random.default_rng(SEED)
    max_n = 3 if full else 2
    checks: list[Check] = []

    # tree geometry
    worst = 0
    for n in range(2, 11):
        t = build_tree(2, n)
        worst = max(worst, abs(len(t.prolonged_pairs) - (2 ** (n + 1) - 4)), abs(len(t.edges) - (t.num_vertices - 1)))
    checks.append(_at_most("tree_counts", worst, 0, "n=2..10"))

    # exhaustive enumeration vs level recursion
    draws = 100 if full else 20
    worst = 0.0
    for _ in range(draws):
        p = ModelParams(float(rng.uniform(-2, 2)), float(rng.uniform(-2, 2)), float(rng.uniform(0.1, 2)))
        fields = _random_fields(rng)
        for n in range(max_n + 1):
            t = build_tree(2, n)
            lz_dp = partition_dp(t, p, fields)
            lz_ex = partition_exhaustive(t, p, fields).log_z
            worst = max(worst, abs(lz_ex - lz_dp) / max(abs(lz_dp), 1e-300))
    checks.append(_at_most("exhaustive_vs_dp", worst, 1e-12, f"{draws} draws, n<={max_n}"))

    # fixed points: compatibility, consistency, partition recursion
    cons, compat, recur = 0.0, 0.0, 0.0
    pert_min = math.inf
    cases = list(fixed_point_cases(rng, 3 if full else 1, 5 if full else 2))
    for p, f in cases:
        ff = f.shifted(perturb)
        compat = max(compat, max(compatibility_residual(p, ff.quadruple(), ff.quadruple())))
        for n in range(2, max_n + 1):
            tn, tm = build_tree(2, n), build_tree(2, n - 1)
            cons = max(cons, consistency_residual(tn, tm, p, ff.boundary(), ff.boundary()))
            bumped = f.shifted(perturb or 1e-2).boundary()
            pert_min = min(pert_min, consistency_residual(tn, tm, p, bumped, bumped))
            lz_n = partition_dp(tn, p, f.boundary())
            lz_m = partition_dp(tm, p, f.boundary())
            recur = max(recur, abs(lz_n - (log_level_product(tm, p, f.boundary()) + lz_m)) / abs(lz_n))
    detail = f"{len(cases)} fixed points, n=2..{max_n}" + (f", perturbed by {perturb!r}" if perturb else "")
    checks.append(_at_most("compatibility_at_fixed_point", compat, 1e-10, detail))
    checks.append(_at_most("consistency_at_fixed_point", cons, 1e-10, detail))
    checks.append(_at_least("consistency_detects_perturbation", pert_min, 1e-6, detail))
    checks.append(_at_most("partition_recursion", recur, 1e-10, f"{len(cases)} fixed points, log-relative"))

    # entropy: analytic vs finite differences
    worst = 0.0
    for _ in range(100 if full else 20):
        p = ModelParams(float(rng.uniform(-2, 2)), float(rng.uniform(-2, 2)), float(rng.uniform(0.2, 3)))
        h = float(rng.uniform(-2, 2))
        sa, sf = entropy_analytic(p, h), entropy_fd(p, h)
        worst = max(worst, abs(sa - sf) / max(1.0, abs(sa)))
    checks.append(_at_most("entropy_fd", worst, 1e-6))

    # sign ledger at the free point
    p0 = ModelParams(0.0, 0.0, 0.8)
    f0 = TIFields(0.0, 0.0)
    sign_err = max(abs(free_energy_paper(p0, 0.0) + LN2 / p0.beta),
                   abs(f_numeric(p0, f0, 4) - LN2 / p0.beta))
    checks.append(_at_most("free_energy_sign_ledger", sign_err, 1e-14, "f_paper=-ln2/beta, f_numeric=+ln2/beta"))
    checks.append(_at_most("residual_entropy_free_point", abs(residual_entropy(p0, 0.0).value - LN2), 1e-6))

    # root counts vs sign-change scan
    worst = 0
    n_pts = 300 if full else 40
    scanned = 0
    for _ in range(n_pts):
        c, d = (float(x) for x in rng.uniform(0.01, 20.0, 2))
        if d > 3:
            e1, e2 = thresholds(d)
            if min(abs(c - e1), abs(c - e2)) < 1e-6 * c:
                continue
        scanned += 1
        worst = max(worst, abs(fixed_points(c, d).num_roots - sign_change_count(c, d)))
    checks.append(_at_most("root_count_vs_scan", worst, 0, f"{scanned} points"))

    # g at each fixed point
    worst = 0.0
    for p, f in cases:
        u = f.u1
        worst = max(worst, abs(float(map_g(u, p.c, p.d)) - u) / max(1.0, u))
    checks.append(_at_most("fixed_point_residual", worst, 1e-12))

    if full:
        # free-energy convergence along n = 8..13 at the first three-root fixed point
        p, f = cases[0]
        f_rec = free_energy_recursion(p, f.h1, f.h2)
        errs = [abs(f_numeric(p, f, n) - f_rec) for n in range(7, 14)]
        ratios = [errs[i + 1] / errs[i] for i in range(len(errs) - 1) if errs[i] > 0]
        checks.append(_at_most("dp_convergence_ratio", max(ratios) if ratios else 0.0, 0.5, "n=8..13"))
        gaps = [abs(f_numeric(p, f, n) - f_numeric(p, f, n - 1)) for n in range(8, 14)]
        tele = max(errs[i + 1] - gaps[i] for i in range(len(gaps)))
        checks.append(_at_most("recursion_telescoping", tele, 1e-10, "|f_rec - f_n| - gap_n, n=8..13"))
        # the error is exactly C / |V_n|; eliminating it from n=12, 13 recovers the limit
        v12, v13 = 2**13 - 1, 2**14 - 1
        lim = (v13 * f_numeric(p, f, 13) - v12 * f_numeric(p, f, 12)) / (v13 - v12)
        checks.append(_at_most("extrapolated_limit", abs(lim - f_rec), 1e-8))

        # three-root region only where d > 3 and inside the thresholds
        bad = 0
        for d in np.geomspace(1.0, 20.0, 40):
            for c in np.geomspace(0.01, 5.0, 40):
                k = fixed_points(float(c), float(d)).num_roots
                if k == 3 and d <= 3:
                    bad += 1
                elif d > 3:
                    e1, e2 = thresholds(float(d))
                    if (k == 3) != (e1 < c < e2):
                        bad += 1
        checks.append(_at_most("region_grid_40x40", bad, 0))

    return VerifyReport(level, tuple(checks))
