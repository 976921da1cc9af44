"""Parameters, constants and identities shared by all igeom packages."""

from .constants import (
    IDENTITY_TOLERANCE,
    DerivedConstants,
    bessel_dimension,
    boundary_interaction,
    derive_constants,
    dual_constants,
    strip_hitting_regime,
)
from .errors import (
    ConfigValidationError,
    DegenerateStartError,
    DomainError,
    IGeomError,
    OrderingError,
    OutOfScopeError,
    ParameterDomainError,
)
from .params import ForcePoint, SleParams
from .report import Report
from .rng import SeedLike, make_rng, run_seed, run_seeds
from .stats import (
    MeanEstimate,
    correlation_stderr,
    is_strictly_decreasing,
    ks_two_sample,
    mean_stderr,
    normality_pvalue,
    pooled_difference,
    variance_stderr,
)
from .weights import (
    CONTINUATION_THRESHOLD,
    conditional_law_weights,
    continuation_threshold_hit,
    critical_intersection_angle,
    flow_line_weights,
    max_simple_angle_gap,
)

__all__ = [
    "CONTINUATION_THRESHOLD",
    "IDENTITY_TOLERANCE",
    "ConfigValidationError",
    "DegenerateStartError",
    "DerivedConstants",
    "DomainError",
    "ForcePoint",
    "IGeomError",
    "OrderingError",
    "MeanEstimate",
    "OutOfScopeError",
    "ParameterDomainError",
    "Report",
    "SeedLike",
    "SleParams",
    "bessel_dimension",
    "boundary_interaction",
    "conditional_law_weights",
    "continuation_threshold_hit",
    "correlation_stderr",
    "critical_intersection_angle",
    "derive_constants",
    "dual_constants",
    "flow_line_weights",
    "is_strictly_decreasing",
    "ks_two_sample",
    "make_rng",
    "max_simple_angle_gap",
    "mean_stderr",
    "normality_pvalue",
    "pooled_difference",
    "run_seed",
    "run_seeds",
    "strip_hitting_regime",
    "variance_stderr",
]
