"""Translation-invariant boundary fields and the scalar map g.

Under the ansatz h_pp = h_mp = h1, h_mm = h_pm = h2 the compatibility system
forces u1 = u2 = u (u = e^h) with

    u = g(u) = (c d u^2 + 1) / (c u^2 + d),    c = e^{2 beta J}, d = e^{2 beta Jp},

equivalently p(u) = c u^3 - c d u^2 + d u - 1 = 0. By Descartes' rule p has no
negative roots, so every real root is a positive fixed point.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .gibbs import BoundaryFields, EdgeFieldQuadruple

#: two roots closer than this (relative) are reported as one double root
DOUBLE_ROOT_RTOL = 1e-6
#: |g'(u)| within this of 1 counts as marginal
MARGINAL_TOL = 1e-6
_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class TIFields:
    h1: float
    h2: float

    @classmethod
    def from_u(cls, u1: float, u2: float | None = None) -> "TIFields":
        if u1 <= 0 or (u2 is not None and u2 <= 0):
            raise DomainError("u must be positive")
        return cls(math.log(u1), math.log(u1 if u2 is None else u2))

    @property
    def u1(self) -> float:
        return math.exp(self.h1)

    @property
    def u2(self) -> float:
        return math.exp(self.h2)

    def quadruple(self) -> EdgeFieldQuadruple:
        return EdgeFieldQuadruple(h_pp=self.h1, h_pm=self.h2, h_mp=self.h1, h_mm=self.h2)

    def boundary(self) -> BoundaryFields:
        return BoundaryFields.of(self.quadruple())

    def shifted(self, dh: float) -> "TIFields":
        return TIFields(self.h1 + dh, self.h2 + dh)


@dataclass(frozen=True)
class FixedPointReport:
    c: float
    d: float
    roots: tuple[float, ...]
    multiplicity: tuple[int, ...]
    stability: tuple[str, ...]
    region: str

    @property
    def num_roots(self) -> int:
        return len(self.roots)

    def fields(self) -> list[TIFields]:
        return [TIFields.from_u(u) for u in self.roots]


def _check_domain(u, c, d):
    if not (np.all(np.asarray(u) > 0) and c > 0 and d > 0):
        raise DomainError(f"need u, c, d > 0 (got u={u}, c={c}, d={d})")


def map_g(u, c: float, d: float):
    _check_domain(u, c, d)
    u2 = np.square(u)
    return (c * d * u2 + 1.0) / (c * u2 + d)


def map_g_prime(u, c: float, d: float):
    _check_domain(u, c, d)
    return 2.0 * c * (d - 1.0) * (d + 1.0) * u / np.square(d + c * np.square(u))


def cubic(u, c: float, d: float):
    """p(u) = c u^3 - c d u^2 + d u - 1, whose positive roots are the fixed points of g."""
    return ((c * u - c * d) * u + d) * u - 1.0


def _cubic_scale(u, c, d):
    return c * u**3 + c * d * u**2 + d * u + 1.0


def _cubic_d1(u, c, d):
    return (3.0 * c * u - 2.0 * c * d) * u + d


def _refine(lo: float, hi: float, c: float, d: float) -> float:
    """Root of p in [lo, hi] (p(lo) < 0 < p(hi) or reversed) by Newton steps guarded by bisection."""
    flo = cubic(lo, c, d)
    if flo == 0.0:
        return lo
    x = 0.5 * (lo + hi)
    for _ in range(200):
        fx = cubic(x, c, d)
        if fx == 0.0:
            return x
        if (fx < 0) == (flo < 0):
            lo, flo = x, fx
        else:
            hi = x
        dfx = _cubic_d1(x, c, d)
        step = x - fx / dfx if dfx != 0.0 else None
        x_new = step if step is not None and lo < step < hi else 0.5 * (lo + hi)
        if abs(x_new - x) <= 2 * _EPS * abs(x_new) or hi - lo <= 4 * _EPS * abs(hi):
            return x_new
        x = x_new
    return x


def _upper_root_bound(c: float, d: float) -> float:
    # Cauchy bound on the monic cubic u^3 - d u^2 + (d/c) u - 1/c
    return 1.0 + max(d, d / c, 1.0 / c)


def _stability(gp: float) -> str:
    if abs(abs(gp) - 1.0) <= MARGINAL_TOL:
        return "marginal"
    return "attracting" if abs(gp) < 1.0 else "repelling"


def _critical_sign(u: float, c: float, d: float) -> int:
    """Sign of p at a critical point u, with 0 when the two nearby roots would merge."""
    val = cubic(u, c, d)
    merge = abs(6.0 * c * u - 2.0 * c * d) * (DOUBLE_ROOT_RTOL * u) ** 2 / 8.0
    noise = 8.0 * _EPS * _cubic_scale(u, c, d)
    if abs(val) <= max(merge, noise):
        return 0
    return 1 if val > 0 else -1


def fixed_points(c: float, d: float) -> FixedPointReport:
    """All positive solutions of u = g(u).

    The critical points of p split (0, inf) into monotone pieces; each piece
    holds at most one root, located by a sign change and refined. A critical
    value that vanishes within tolerance yields a double root.
    """
    if not (c > 0 and d > 0):
        raise DomainError(f"need c, d > 0 (got c={c}, d={d})")
    hi = _upper_root_bound(c, d)
    disc = c * d * (c * d - 3.0)
    if disc <= 0.0:
        ui = d / 3.0  # inflection point; a triple root can only sit here
        if abs(disc) <= 1e-12 * (c * d) ** 2 and _critical_sign(ui, c, d) == 0:
            roots, mult = [ui], [3]
        else:
            roots, mult = [_refine(0.0, hi, c, d)], [1]
    else:
        sq = math.sqrt(disc)
        # p' = 3c u^2 - 2cd u + d: local max at ua, local min at ub, p(ua) >= p(ub)
        ua = (c * d - sq) / (3.0 * c)
        ub = d / (3.0 * c * ua)  # product of the critical points is d / (3c)
        sa, sb = _critical_sign(ua, c, d), _critical_sign(ub, c, d)
        if sa > 0 and sb < 0:
            roots = [_refine(0.0, ua, c, d), _refine(ua, ub, c, d), _refine(ub, hi, c, d)]
            mult = [1, 1, 1]
        elif sa > 0 and sb == 0:
            roots, mult = [_refine(0.0, ua, c, d), ub], [1, 2]
        elif sa > 0:
            roots, mult = [_refine(0.0, ua, c, d)], [1]
        elif sa == 0 and sb < 0:
            roots, mult = [ua, _refine(ub, hi, c, d)], [2, 1]
        elif sa == 0:
            # both critical values vanish: the three roots have merged
            roots, mult = [_refine(ua, ub, c, d) if cubic(ua, c, d) * cubic(ub, c, d) < 0 else 0.5 * (ua + ub)], [3]
        else:
            roots, mult = [_refine(ub, hi, c, d)], [1]
    stab = tuple(_stability(float(map_g_prime(u, c, d))) for u in roots)
    region = {1: "unique", 2: "boundary", 3: "three"}[len(roots)]
    return FixedPointReport(c, d, tuple(roots), tuple(mult), stab, region)


def critical_points(c: float, d: float) -> list[float]:
    """Positive solutions of u g'(u) = g(u), i.e. c^2 d u^4 - c (d^2 - 3) u^2 + d = 0.

    Returns 0 or 2 values (ascending); at d = 3 the pair coincides.
    """
    if not (c > 0 and d > 0):
        raise DomainError(f"need c, d > 0 (got c={c}, d={d})")
    b = d * d - 3.0
    disc = (d * d - 9.0) * (d * d - 1.0)
    if b <= 0.0 or disc < 0.0:
        return []
    sq = math.sqrt(disc)
    lo, hi = (b - sq) / (2.0 * c * d), (b + sq) / (2.0 * c * d)
    if lo <= 0.0:
        return []
    return [math.sqrt(lo), math.sqrt(hi)]


def discriminant(c: float, d: float) -> float:
    """Discriminant of p in u: c * (-4 d^3 c^2 + (d^4 + 18 d^2 - 27) c - 4 d^3).

    Positive iff p has three distinct real (hence positive) roots.
    """
    return c * _reduced_discriminant(c, d)


def _reduced_discriminant(c: float, d: float) -> float:
    return (-4.0 * d**3 * c + (d**4 + 18.0 * d**2 - 27.0)) * c - 4.0 * d**3


def _bisect(f, lo: float, hi: float, rtol: float) -> float:
    flo = f(lo)
    while lo == 0.0 or hi - lo > rtol * lo:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def thresholds(d: float, rtol: float = 1e-13) -> tuple[float, float]:
    """(eta1, eta2): the values of c at which p acquires a double root.

    For c in (eta1, eta2) there are three fixed points. Found by bisection on
    the discriminant, bracketed around its maximum in c.
    """
    if not d > 3.0:
        raise DomainError(f"three fixed points require d > 3, got d={d}")
    # reduced discriminant written about its maximiser c0:
    #   -4 d^3 [(c - c0)^2 - (d^2 - 9)^3 (d^2 - 1) / (64 d^6)]
    # which stays well conditioned as the window closes (d -> 3)
    c0 = (d**4 + 18.0 * d**2 - 27.0) / (8.0 * d**3)
    half_width_sq = (d * d - 9.0) ** 3 * (d * d - 1.0) / (64.0 * d**6)
    f = lambda c: half_width_sq - (c - c0) ** 2
    hi = 2.0 * c0
    while f(hi) > 0:
        hi *= 2.0
    eta1 = _bisect(f, 0.0, c0, rtol)
    eta2 = _bisect(f, c0, hi, rtol)
    return eta1, eta2


def classify(c: float, d: float) -> str:
    """'unique', 'boundary' (a double root) or 'three'; always matches fixed_points."""
    return fixed_points(c, d).region
