"""Prey-predator dynamics with a moving predator range.

A prey density u lives on a large truncated line while the predator v
occupies a finite interval (g(t), h(t)) whose ends move at speeds
proportional to the predator gradient there.  The package integrates
the coupled system, classifies each run as spreading or vanishing,
locates the threshold expansion rate, and cross-checks runs against
the analytic bounds, limits and comparison facts that constrain them.
"""

__version__ = "0.1.0"

from .analysis import (
    SPREADING,
    UNDECIDED,
    VANISHING,
    AsymptoticReport,
    BoundSequence,
    Classification,
    ClassifyCriteria,
    DominationReport,
    OrderingReport,
    SupersolutionWitness,
    asymptotic_check,
    bound_sequences,
    classify,
    comparison_check,
    fit_witness_amplitude,
    make_stop_rule,
    supersolution_check,
)
from .errors import (
    AssumptionViolated,
    BoundBlowup,
    CflViolation,
    ConfigSyntaxError,
    ConstraintViolation,
    DegenerateInterval,
    DomainTooSmall,
    FrontNearTruncation,
    GridTooSmall,
    IncomparableRuns,
    LGFrontsError,
    NoBracket,
    NonmonotoneFronts,
    NoPositiveEquilibrium,
    RunCapExceeded,
    UnknownKey,
    Violation,
    WindowOutsideFronts,
    WitnessInvalid,
)
from .io import (
    RunConfig,
    load_config,
    parse_config,
    read_series,
    read_snapshot,
    serialize_config,
    write_series,
    write_snapshot,
)
from .model import (
    HOLLING_TANNER,
    LESLIE_GOWER,
    ConstantProfile,
    CosineProfile,
    DerivedConstants,
    InitialData,
    ModelParams,
    ReactionKernel,
    TableProfile,
    ValidatedModel,
    coexistence_state,
    derived_constants,
    reaction_rates,
    validate_params,
)
from .solver import (
    Discretization,
    HealthReport,
    RefinementReport,
    SeriesRecord,
    SimResult,
    SimState,
    refine_check,
    resolve_disc,
    simulate,
    step,
)
from .sweep import (
    BetaBracket,
    GridResult,
    GridRow,
    bisect_beta,
    run_grid,
)
from .transform import FrontState, boundary_gradient, front_speeds, map_x_to_y, map_y_to_x

__all__ = [name for name in dir() if not name.startswith("_")]
