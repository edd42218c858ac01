"""Ising-Vannimenus model on the rooted Cayley tree of order 2."""
from .errors import (
    ConfigError,
    DepthTooLarge,
    DimensionMismatch,
    DomainError,
    IVTreeError,
    LeafVertex,
    MissingField,
    NoConvergence,
    NoGrandchildren,
    UnsupportedOrder,
)
from .fixedpoint import (
    FixedPointReport,
    TIFields,
    classify,
    critical_points,
    fixed_points,
    map_g,
    map_g_prime,
    thresholds,
)
from .gibbs import (
    BoundaryFields,
    EdgeFieldQuadruple,
    MeasureTable,
    compatibility_residual,
    consistency_residual,
    level_constant,
    measure_table,
    partition_dp,
    partition_exhaustive,
    weight,
)
from .model import Configuration, Layer, ModelParams, concat, energy, energy_split
from .sweep import Axis, SweepRow, SweepSpec, run_sweep
from .thermo import (
    EntropyResult,
    FreeEnergyResult,
    entropy,
    free_energy_general_paper,
    free_energy_numeric,
    free_energy_paper,
    free_energy_recursion,
    residual_entropy,
)
from .tree import CayleyTree, build_tree, prolonged_successors, successors

__version__ = "0.1.0"
