"""Finite-volume Gibbs measures with memory-2 boundary fields.

The weight of a configuration s on V_n is

    exp(-beta H_n(s) + sum_{x in W_{n-1}, y in S(x)} s_x s_y h_{xy, s_x s_y})

so boundary fields sit only on the edges that enter the last level. Two
independent engines compute Z_n: brute-force enumeration (n <= 3) and a
bottom-up tree recursion whose state is the (parent spin, own spin) pair,
which the grandparent coupling Jp forces.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, NamedTuple, Sequence

import numpy as np
from scipy.special import logsumexp

from ._numerics import LN2, logcosh
from .errors import DepthTooLarge, DimensionMismatch, MissingField
from .model import Configuration, ModelParams, all_spins, energy, energy_batch
from .tree import CayleyTree, build_tree, level_range

EXHAUSTIVE_MAX_DEPTH = 3
DP_MAX_DEPTH = 30

# spin index i <-> spin value SPIN[i]; matches the packed-bit convention (bit set = +1)
SPIN = np.array([-1.0, 1.0])


def _idx(s: int) -> int:
    return 1 if s > 0 else 0


@dataclass(frozen=True)
class EdgeFieldQuadruple:
    """Field components h_{xy, s_x s_y}; the first sign belongs to the parent x."""

    h_pp: float = 0.0
    h_pm: float = 0.0
    h_mp: float = 0.0
    h_mm: float = 0.0

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.h_pp, self.h_pm, self.h_mp, self.h_mm)):
            raise ValueError(f"field components must be finite: {self}")

    def value(self, sx: int, sy: int) -> float:
        if sx > 0:
            return self.h_pp if sy > 0 else self.h_pm
        return self.h_mp if sy > 0 else self.h_mm

    def log_factors(self) -> np.ndarray:
        """2x2 table of s_x s_y h_{s_x s_y}, indexed by spin index (0 -> -1, 1 -> +1)."""
        return np.array(
            [[self.h_mm, -self.h_mp],
             [-self.h_pm, self.h_pp]]
        )

    def shifted(self, dh: float) -> "EdgeFieldQuadruple":
        return EdgeFieldQuadruple(self.h_pp + dh, self.h_pm + dh, self.h_mp + dh, self.h_mm + dh)


@dataclass(frozen=True)
class BoundaryFields:
    """Fields on the edges W_{n-1} -> W_n.

    Uniform mode shares one quadruple across all edges (and all depths);
    per-edge mode maps ``(parent, child)`` to a quadruple.
    """

    uniform: EdgeFieldQuadruple | None = None
    per_edge: Mapping[tuple[int, int], EdgeFieldQuadruple] | None = None

    def __post_init__(self):
        if (self.uniform is None) == (self.per_edge is None):
            raise ValueError("exactly one of uniform / per_edge must be given")

    @property
    def mode(self) -> str:
        return "uniform" if self.uniform is not None else "per-edge"

    @classmethod
    def zero(cls) -> "BoundaryFields":
        return cls(uniform=EdgeFieldQuadruple())

    @classmethod
    def of(cls, q: EdgeFieldQuadruple) -> "BoundaryFields":
        return cls(uniform=q)

    def quadruple(self, x: int, y: int) -> EdgeFieldQuadruple:
        if self.uniform is not None:
            return self.uniform
        try:
            return self.per_edge[(x, y)]
        except KeyError:
            raise MissingField(f"no boundary field on edge ({x}, {y})") from None

    def table(self, t: CayleyTree) -> np.ndarray:
        """(|W_n|, 2, 2) log-factor tables for the boundary edges, ordered by child id.

        Uniform mode returns a single (1, 2, 2) slab that broadcasts.
        """
        if self.uniform is not None:
            return self.uniform.log_factors()[None]
        edges = t.boundary_edges()
        return np.array([self.quadruple(int(x), int(y)).log_factors() for x, y in edges]).reshape(-1, 2, 2)


class PartitionValue(NamedTuple):
    z: float
    log_z: float


@dataclass(frozen=True)
class MeasureTable:
    """Exhaustive table of mu_{n,h}; row index of ``log_weights`` is the packed configuration."""

    depth: int
    log_weights: np.ndarray
    log_z: float

    @property
    def weights(self) -> np.ndarray:
        return np.exp(self.log_weights)

    @property
    def z(self) -> float:
        return math.exp(self.log_z)

    def probabilities(self) -> np.ndarray:
        return np.exp(self.log_weights - self.log_z)

    def marginal(self) -> np.ndarray:
        """Probabilities of the restriction to V_{depth-1} (sum over the last layer)."""
        if self.depth == 0:
            raise DimensionMismatch("cannot marginalise V_0")
        inner = 2 ** (2**self.depth - 1)
        return self.probabilities().reshape(-1, inner).sum(axis=0)


def _boundary_log_factor(t: CayleyTree, fields: BoundaryFields, spins: np.ndarray) -> np.ndarray:
    if t.n == 0:
        return np.zeros(len(spins))
    edges = t.boundary_edges()
    tab = fields.table(t)
    ix = (spins[:, edges[:, 0]] > 0).astype(np.intp)
    iy = (spins[:, edges[:, 1]] > 0).astype(np.intp)
    k = np.arange(len(edges)) if len(tab) > 1 else np.zeros(len(edges), dtype=np.intp)
    return tab[k, ix, iy].sum(axis=1)


def weight(t: CayleyTree, p: ModelParams, fields: BoundaryFields, s: Configuration) -> float:
    e = energy(t, p, s)
    extra = 0.0
    if t.n > 0:
        spins = s.spins()
        for x, y in t.boundary_edges():
            sx, sy = int(spins[x]), int(spins[y])
            extra += sx * sy * fields.quadruple(int(x), int(y)).value(sx, sy)
    return math.exp(-p.beta * e + extra)


def _require_exhaustive(t: CayleyTree, max_depth: int) -> None:
    if t.n > max_depth:
        raise DepthTooLarge(f"exhaustive enumeration limited to depth {max_depth}, got {t.n}")


def measure_table(t: CayleyTree, p: ModelParams, fields: BoundaryFields,
                  *, max_depth: int = EXHAUSTIVE_MAX_DEPTH) -> MeasureTable:
    _require_exhaustive(t, max_depth)
    spins = all_spins(t.n)
    lw = -p.beta * energy_batch(t, p, spins) + _boundary_log_factor(t, fields, spins)
    return MeasureTable(t.n, lw, float(logsumexp(lw)))


def partition_exhaustive(t: CayleyTree, p: ModelParams, fields: BoundaryFields,
                         *, max_depth: int = EXHAUSTIVE_MAX_DEPTH) -> PartitionValue:
    """Z_n by summing the weight of every configuration."""
    m = measure_table(t, p, fields, max_depth=max_depth)
    top = float(m.log_weights.max())
    scaled = float(np.exp(m.log_weights - top).sum())
    z = math.exp(top) * scaled if top < 709.0 else math.inf
    return PartitionValue(z, top + math.log(scaled))


def partition_dp(t: CayleyTree, p: ModelParams, fields: BoundaryFields) -> float:
    """log Z_n by the bottom-up (parent spin, own spin) recursion.

    msg[j, s, t] is the log-sum over the subtree strictly below vertex j given
    its parent's spin s and its own spin t. Uniform fields collapse each level
    to a single vertex, so the cost is O(n); per-edge fields cost O(|V_n|).
    """
    n = t.n
    if n > DP_MAX_DEPTH:
        raise DepthTooLarge(f"DP limited to depth {DP_MAX_DEPTH}, got {n}")
    if n == 0:
        return LN2
    bJ, bJp = p.beta * p.J, p.beta * p.Jp
    # couple[s, t, e] = beta*J*t*e + beta*Jp*s*e for grandparent s, parent t, child e
    couple = bJ * SPIN[None, :, None] * SPIN[None, None, :] + bJp * SPIN[:, None, None] * SPIN[None, None, :]
    uniform = fields.mode == "uniform"
    tab = fields.table(t)

    msg = np.zeros((1 if uniform else 2**n, 2, 2))  # leaves: nothing below
    for m in range(n, 1, -1):
        inner = msg + (tab if m == n else 0.0)  # [j, t, e]
        per_child = logsumexp(couple[None] + inner[:, None, :, :], axis=3)  # [j, s, t]
        msg = 2.0 * per_child if uniform else per_child[0::2] + per_child[1::2]

    # msg now belongs to level-1 vertices; the root has no grandparent
    root_edge = bJ * SPIN[:, None] * SPIN[None, :] + msg + (tab if n == 1 else 0.0)  # [j, s0, s1]
    per_child = logsumexp(root_edge, axis=2)  # [j, s0]
    total = 2.0 * per_child[0] if uniform else per_child.sum(axis=0)
    return float(logsumexp(total))


def consistency_residual(t_n: CayleyTree, t_nm1: CayleyTree, p: ModelParams,
                         fields_n: BoundaryFields, fields_nm1: BoundaryFields,
                         *, max_depth: int = EXHAUSTIVE_MAX_DEPTH) -> float:
    """max over s on V_{n-1} of |sum_w mu_n(s v w) - mu_{n-1}(s)|."""
    if t_n.n < 1 or t_nm1.n != t_n.n - 1:
        raise DimensionMismatch(f"need consecutive depths, got {t_n.n} and {t_nm1.n}")
    _require_exhaustive(t_n, max_depth)
    marg = measure_table(t_n, p, fields_n, max_depth=max_depth).marginal()
    prev = measure_table(t_nm1, p, fields_nm1, max_depth=max_depth).probabilities()
    return float(np.max(np.abs(marg - prev)))


def _children_fields(child_fields) -> Sequence[EdgeFieldQuadruple]:
    if isinstance(child_fields, EdgeFieldQuadruple):
        return (child_fields, child_fields)
    child_fields = tuple(child_fields)
    if len(child_fields) != 2:
        raise DimensionMismatch("order-2 tree: expected two child-edge quadruples")
    return child_fields


def sector_sums(p: ModelParams, child_fields) -> np.ndarray:
    """A[s_x, s_y] = prod_{z in S(y)} sum_e exp(e h_{yz, s_y e} s_y + beta e (J s_y + Jp s_x)).

    Indexed by spin index; this is the right-hand side of the compatibility
    condition A[s_x, s_y] = D exp(s_x s_y h_{xy, s_x s_y}).
    """
    bJ, bJp = p.beta * p.J, p.beta * p.Jp
    couple = bJ * SPIN[None, :, None] * SPIN[None, None, :] + bJp * SPIN[:, None, None] * SPIN[None, None, :]
    log_a = np.zeros((2, 2))
    for q in _children_fields(child_fields):
        log_a += logsumexp(couple + q.log_factors()[None], axis=2)
    return np.exp(log_a)


def compatibility_residual(p: ModelParams, child_fields, parent_fields: EdgeFieldQuadruple) -> tuple[float, float, float]:
    """Residuals of the three ratio equations linking parent-edge fields to child-edge fields.

    Only the gauge-invariant sums h_pp+h_mp, h_mm+h_pm, h_pp+h_pm of the
    parent edge are constrained.
    """
    A = sector_sums(p, child_fields)
    P, M = 1, 0
    q = parent_fields
    r1 = abs(math.exp(q.h_pp + q.h_mp) - A[P, P] / A[M, P])
    r2 = abs(math.exp(q.h_mm + q.h_pm) - A[M, M] / A[P, M])
    r3 = abs(math.exp(q.h_pp + q.h_pm) - A[P, P] / A[P, M])
    return r1, r2, r3


def log_level_constant(p: ModelParams, child_fields) -> float:
    bJ, bJp = p.beta * p.J, p.beta * p.Jp
    out = 2 * LN2
    for q in _children_fields(child_fields):
        mid = 0.5 * (q.h_pp + q.h_pm)
        out += 0.5 * (q.h_pp - q.h_pm) + 0.5 * (logcosh(mid + bJ + bJp) + logcosh(mid + bJ - bJp))
    return out


def level_constant(p: ModelParams, child_fields) -> float:
    """D(x, y) = 4 prod_{z in S(y)} b(y, z), the factor with Z_n = D^{|W_{n-1}|} Z_{n-1}."""
    return math.exp(log_level_constant(p, child_fields))


def log_level_product(t_nm1: CayleyTree, p: ModelParams, fields: BoundaryFields) -> float:
    """log U_{n-1}: the sum of log D over the edges entering W_{n-1}.

    D(x, y) uses the fields on the child edges below y, i.e. the boundary
    fields of the depth-n tree.
    """
    if t_nm1.n < 1:
        raise DimensionMismatch("U_{n-1} needs n-1 >= 1 (the root edge has no grandparent)")
    total = 0.0
    for y in level_range(t_nm1.n):
        kids = [fields.quadruple(y, 2 * y + 1), fields.quadruple(y, 2 * y + 2)]
        total += log_level_constant(p, kids)
    return total
