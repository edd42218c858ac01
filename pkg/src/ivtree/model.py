"""Couplings, spin configurations and the Ising-Vannimenus Hamiltonian.

H(s) = -Jp * sum_{prolonged <x,z>} s_x s_z - J * sum_{<x,y>} s_x s_y

The Hamiltonian is temperature free; beta only enters the Gibbs weights.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, DomainError
from .tree import CayleyTree, n_vertices


@dataclass(frozen=True)
class ModelParams:
    J: float
    Jp: float
    beta: float

    def __post_init__(self):
        if not self.beta > 0 or not math.isfinite(self.beta):
            raise DomainError(f"beta must be a positive finite number, got {self.beta}")

    @classmethod
    def from_temperature(cls, J: float, Jp: float, T: float) -> "ModelParams":
        """Physical parameters with unit Boltzmann constant, beta = 1/T."""
        if not T > 0:
            raise DomainError(f"temperature must be positive, got {T}")
        return cls(J, Jp, 1.0 / T)

    @classmethod
    def from_reduced(cls, c: float, d: float, beta: float = 1.0) -> "ModelParams":
        """Inverse of c = exp(2 beta J), d = exp(2 beta Jp)."""
        if c <= 0 or d <= 0:
            raise DomainError(f"c and d must be positive, got c={c}, d={d}")
        return cls(math.log(c) / (2 * beta), math.log(d) / (2 * beta), beta)

    @property
    def a(self) -> float:
        return math.exp(self.beta * self.J)

    @property
    def b(self) -> float:
        return math.exp(self.beta * self.Jp)

    @property
    def c(self) -> float:
        return math.exp(2 * self.beta * self.J)

    @property
    def d(self) -> float:
        return math.exp(2 * self.beta * self.Jp)


@dataclass(frozen=True)
class Configuration:
    """Spins on V_depth packed into an int; bit v set means s(v) = +1."""

    bits: int
    depth: int

    def __post_init__(self):
        if self.bits < 0 or self.bits >> n_vertices(self.depth):
            raise DimensionMismatch(f"bits do not fit V_{self.depth}")

    @property
    def size(self) -> int:
        return n_vertices(self.depth)

    @classmethod
    def from_spins(cls, spins, depth: int | None = None) -> "Configuration":
        spins = np.asarray(spins)
        if depth is None:
            depth = (len(spins) + 1).bit_length() - 2
        if len(spins) != n_vertices(depth) or not np.all(np.abs(spins) == 1):
            raise DimensionMismatch(f"need {n_vertices(depth)} spins in {{-1,+1}}")
        bits = sum(1 << i for i, s in enumerate(spins) if s > 0)
        return cls(bits, depth)

    @classmethod
    def all_plus(cls, depth: int) -> "Configuration":
        return cls((1 << n_vertices(depth)) - 1, depth)

    @classmethod
    def all_minus(cls, depth: int) -> "Configuration":
        return cls(0, depth)

    def spins(self) -> np.ndarray:
        return np.array([1 if (self.bits >> i) & 1 else -1 for i in range(self.size)], dtype=np.int8)

    def restrict(self, depth: int) -> "Configuration":
        if depth > self.depth:
            raise DimensionMismatch(f"cannot restrict V_{self.depth} to V_{depth}")
        return Configuration(self.bits & ((1 << n_vertices(depth)) - 1), depth)

    def layer(self, m: int) -> "Layer":
        """Spins on W_m as a boundary layer."""
        if not 0 <= m <= self.depth:
            raise DimensionMismatch(f"level {m} outside V_{self.depth}")
        return Layer((self.bits >> (2**m - 1)) & ((1 << 2**m) - 1), m)


@dataclass(frozen=True)
class Layer:
    """Spins on a single level W_level, bit i for vertex 2**level - 1 + i."""

    bits: int
    level: int

    def __post_init__(self):
        if self.bits < 0 or self.bits >> (2**self.level):
            raise DimensionMismatch(f"bits do not fit W_{self.level}")

    @classmethod
    def constant(cls, level: int, spin: int) -> "Layer":
        return cls((1 << 2**level) - 1 if spin > 0 else 0, level)


def unpack_spins(bits, size: int) -> np.ndarray:
    """Rows of +-1 spins for an array of packed configurations."""
    bits = np.asarray(bits)
    if size <= 62:
        b = bits.astype(np.int64)[:, None] >> np.arange(size, dtype=np.int64)
        return ((b & 1) * 2 - 1).astype(np.int8)
    out = np.empty((len(bits), size), dtype=np.int8)
    for r, x in enumerate(bits):
        out[r] = [1 if (int(x) >> i) & 1 else -1 for i in range(size)]
    return out


def all_spins(depth: int) -> np.ndarray:
    """Every configuration on V_depth, row index == packed bits."""
    size = n_vertices(depth)
    return unpack_spins(np.arange(2**size, dtype=np.int64), size)


def _check(t: CayleyTree, s: Configuration) -> None:
    if s.depth != t.n:
        raise DimensionMismatch(f"configuration depth {s.depth} != tree depth {t.n}")


def pair_sums(t: CayleyTree, spins: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Nearest-neighbour and prolonged pair sums for a batch of spin rows."""
    spins = np.atleast_2d(spins).astype(np.int64)
    e, p = t.edges, t.prolonged_pairs
    nn = (spins[:, e[:, 0]] * spins[:, e[:, 1]]).sum(axis=1)
    pr = (spins[:, p[:, 0]] * spins[:, p[:, 1]]).sum(axis=1)
    return nn, pr


def energy_batch(t: CayleyTree, p: ModelParams, spins: np.ndarray) -> np.ndarray:
    nn, pr = pair_sums(t, spins)
    return -p.J * nn - p.Jp * pr


def energy(t: CayleyTree, p: ModelParams, s: Configuration) -> float:
    _check(t, s)
    # integer pair sums first, so the float result is exact up to one rounding per coupling
    nn, pr = pair_sums(t, s.spins())
    return float(-p.J * nn[0] - p.Jp * pr[0])


def concat(s_prev: Configuration, w: Layer | None) -> Configuration:
    """sigma_{n-1} v omega. ``w=None`` returns ``s_prev`` unchanged."""
    if w is None:
        return s_prev
    if w.level != s_prev.depth + 1:
        raise DimensionMismatch(f"layer W_{w.level} does not extend V_{s_prev.depth}")
    return Configuration(s_prev.bits | (w.bits << (2**w.level - 1)), w.level)


def energy_split(t: CayleyTree, p: ModelParams, s_prev: Configuration, w: Layer) -> tuple[float, float, float]:
    """Split H_n(s_prev v w) into (H_{n-1}(s_prev), new-edge part, new-prolonged part)."""
    if t.n < 1 or s_prev.depth != t.n - 1 or w.level != t.n:
        raise DimensionMismatch(f"need V_{t.n - 1} configuration and W_{t.n} layer for tree depth {t.n}")
    from .tree import build_tree

    inner = energy(build_tree(2, t.n - 1), p, s_prev)
    full = concat(s_prev, w).spins().astype(np.int64)
    leaves = np.arange(2**t.n - 1, 2 ** (t.n + 1) - 1)
    edge_part = float(-p.J * np.sum(full[(leaves - 1) // 2] * full[leaves]))
    if t.n >= 2:
        prol_part = float(-p.Jp * np.sum(full[((leaves - 1) // 2 - 1) // 2] * full[leaves]))
    else:
        prol_part = 0.0
    return inner, edge_part, prol_part
