"""Numerical laboratory for harmonic measure on four-corner Cantor sets."""

from .cantor_geometry import (
    CylinderAddress,
    ScaleSequence,
    SquareRegion,
    as_address,
    containing_cylinder,
    distance_to_approximation,
    fold_codes,
    fold_distance,
    sidelength,
    square_of,
    squares_of_generation,
)
from .dim_entropy import (
    EntropyReport,
    OscillationReport,
    capacity_sequence,
    chain_rule_gap,
    delta_jk,
    dim_cantor,
    entropy_hk,
    entropy_ratio_dimension,
    local_dimension_samples,
    make_product_table,
    make_uniform_table,
)
from .errors import (
    AddressError,
    CornerwalkError,
    CostGuardError,
    DiscardBudgetExceeded,
    InsufficientCounts,
    ParameterError,
    SequenceError,
    StepLimitExceeded,
    UndefinedConditional,
)
from .measure_table import (
    CylinderMeasureTable,
    codim_compare,
    harnack_ratio_scan,
    quasi_invariance_check,
)
from .oracle_grid import (
    GridOracleParams,
    grid_harmonic_measure,
    grid_walk_reference,
    richardson_check,
)
from .rng import RngStream
from .wos_engine import (
    WosParams,
    exterior_reentry,
    reentry_cdf,
    reentry_density,
    run_campaign,
    sample_exit,
)

__version__ = "0.1.0"

__all__ = [
    "AddressError",
    "CornerwalkError",
    "CostGuardError",
    "CylinderAddress",
    "CylinderMeasureTable",
    "DiscardBudgetExceeded",
    "EntropyReport",
    "GridOracleParams",
    "InsufficientCounts",
    "OscillationReport",
    "ParameterError",
    "RngStream",
    "ScaleSequence",
    "SequenceError",
    "SquareRegion",
    "StepLimitExceeded",
    "UndefinedConditional",
    "WosParams",
    "as_address",
    "capacity_sequence",
    "fold_codes",
    "fold_distance",
    "squares_of_generation",
    "chain_rule_gap",
    "codim_compare",
    "containing_cylinder",
    "delta_jk",
    "dim_cantor",
    "distance_to_approximation",
    "entropy_hk",
    "entropy_ratio_dimension",
    "exterior_reentry",
    "grid_harmonic_measure",
    "grid_walk_reference",
    "harnack_ratio_scan",
    "local_dimension_samples",
    "make_product_table",
    "make_uniform_table",
    "quasi_invariance_check",
    "reentry_cdf",
    "reentry_density",
    "richardson_check",
    "run_campaign",
    "sample_exit",
    "sidelength",
    "square_of",
]
