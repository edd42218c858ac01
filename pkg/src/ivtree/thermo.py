"""Free energies and entropies for translation-invariant boundary fields.

Three free energies are kept side by side and never reconciled silently:

* ``f_paper``: the closed form  -ln2/beta - ln[cosh(h + beta(J+Jp)) cosh(h + beta(J-Jp))],
  thermodynamic sign, no 1/beta on the cosh term.
* ``f_numeric``: ln Z_n / (beta |V_n|) from the exact tree recursion (positive sign).
* ``f_recursion``: the large-n limit of ``f_numeric`` obtained by telescoping
  Z_n = D^{|W_{n-1}|} Z_{n-1}:  (ln2 + (h1-h2)/2 + 1/2 ln[cosh(m + beta(J+Jp)) cosh(m + beta(J-Jp))]) / beta,
  m = (h1+h2)/2.

At J = Jp = h = 0 these give f_paper = -ln2/beta and f_numeric = f_recursion = +ln2/beta.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ._numerics import LN2, logcosh
from .errors import DepthTooLarge, DomainError, NoConvergence
from .fixedpoint import TIFields
from .gibbs import DP_MAX_DEPTH, partition_dp
from .model import ModelParams
from .tree import build_tree, n_vertices

#: beta ladder for the zero-temperature extrapolation
RESIDUAL_LADDER = tuple(2.0**k for k in range(5, 13))
FD_REL_STEP = 1e-5


@dataclass(frozen=True)
class FreeEnergyResult:
    f_paper: float
    f_numeric: float
    f_recursion: float
    n_used: int
    convergence_gap: float


@dataclass(frozen=True)
class EntropyResult:
    s_analytic: float
    s_fd: float
    s_residual: float


class ResidualEntropy(NamedTuple):
    value: float
    error: float
    f_inf: float


def free_energy_paper(p: ModelParams, h: float) -> float:
    b = p.beta
    return -LN2 / b - (logcosh(h + b * (p.J + p.Jp)) + logcosh(h + b * (p.J - p.Jp)))


def free_energy_general_paper(p: ModelParams, h1: float, h2: float) -> float:
    """Two-field closed form; equals :func:`free_energy_paper` when h1 == h2."""
    b = p.beta
    m = 0.5 * (h1 + h2)
    return -LN2 / b - ((h1 - h2) + logcosh(m + b * (p.J + p.Jp)) + logcosh(m + b * (p.J - p.Jp)))


def free_energy_recursion(p: ModelParams, h1: float, h2: float | None = None) -> float:
    if h2 is None:
        h2 = h1
    b = p.beta
    m = 0.5 * (h1 + h2)
    return (LN2 + 0.5 * (h1 - h2) + 0.5 * (logcosh(m + b * (p.J + p.Jp)) + logcosh(m + b * (p.J - p.Jp)))) / b


def f_numeric(p: ModelParams, fields: TIFields, n: int) -> float:
    """ln Z_n / (beta |V_n|) with the fields on the last-level edges."""
    return partition_dp(build_tree(2, n), p, fields.boundary()) / (p.beta * n_vertices(n))


def free_energy_numeric(p: ModelParams, fields: TIFields, n: int) -> FreeEnergyResult:
    if n > DP_MAX_DEPTH:
        raise DepthTooLarge(f"depth {n} exceeds DP limit {DP_MAX_DEPTH}")
    if n < 1:
        raise DomainError("need n >= 1 to report a convergence gap")
    fn = f_numeric(p, fields, n)
    gap = abs(fn - f_numeric(p, fields, n - 1))
    return FreeEnergyResult(
        f_paper=free_energy_general_paper(p, fields.h1, fields.h2),
        f_numeric=fn,
        f_recursion=free_energy_recursion(p, fields.h1, fields.h2),
        n_used=n,
        convergence_gap=gap,
    )


def entropy_analytic(p: ModelParams, h: float) -> float:
    """beta^2 dF/dbeta of the closed-form free energy at fixed h."""
    b = p.beta
    jp, jm = p.J + p.Jp, p.J - p.Jp
    return LN2 - b * b * (jp * math.tanh(h + b * jp) + jm * math.tanh(h + b * jm))


def entropy_fd(p: ModelParams, h: float, rel_step: float = FD_REL_STEP) -> float:
    """beta^2 dF/dbeta by central differences, one Richardson level."""
    b = p.beta

    def F(beta):
        return free_energy_paper(ModelParams(p.J, p.Jp, beta), h)

    def central(step):
        return (F(b + step) - F(b - step)) / (2.0 * step)

    step = rel_step * b
    deriv = (4.0 * central(step / 2.0) - central(step)) / 3.0
    return b * b * deriv


def _thermo_f(p: ModelParams, h: float, form: str) -> float:
    if form == "paper":
        return free_energy_paper(p, h)
    if form == "recursion":
        # thermodynamic sign, so both forms describe F = -(1/beta) lim ln Z_n / |V_n|
        return -free_energy_recursion(p, h)
    raise ValueError(f"unknown free-energy form {form!r}")


def residual_entropy(p: ModelParams, h: float, *, form: str = "recursion",
                     ladder=RESIDUAL_LADDER, rtol: float = 1e-6) -> ResidualEntropy:
    """S_inf = -lim beta (F(beta) - F_inf), extrapolated along a doubling beta ladder.

    ``p.beta`` is ignored; only the couplings are used. With F = F_inf - S/beta + o(1/beta)
    each consecutive pair of rungs gives one estimate of S and F_inf.
    """
    betas = np.asarray(ladder, dtype=float)
    fs = np.array([_thermo_f(ModelParams(p.J, p.Jp, float(b)), h, form) for b in betas])
    inv = 1.0 / betas
    s_est = -(fs[1:] - fs[:-1]) / (inv[1:] - inv[:-1])
    f_inf = fs[1:] + s_est * inv[1:]
    err = float(abs(s_est[-1] - s_est[-2]))
    if not np.all(np.isfinite(s_est)) or err > rtol * max(1.0, abs(s_est[-1])):
        raise NoConvergence(
            f"residual-entropy extrapolants do not settle (last two: {s_est[-2]:.6g}, {s_est[-1]:.6g})"
        )
    return ResidualEntropy(float(s_est[-1]), err, float(f_inf[-1]))


def entropy(p: ModelParams, h: float) -> EntropyResult:
    try:
        s_res = residual_entropy(p, h).value
    except NoConvergence:
        s_res = math.nan
    return EntropyResult(entropy_analytic(p, h), entropy_fd(p, h), s_res)
