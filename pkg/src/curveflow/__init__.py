"""Curvature-power flows of locally convex closed plane curves.

Simulation and verification package for the area-preserving and
length-preserving kappa^alpha flows: support-function evolution with a
cross-validating curvature engine, invariant-checked diagnostics, scenario
presets and a command-line driver.  All state types are immutable values and
every operation is a pure function, so independent runs can execute
concurrently without shared state.
"""

from .curves import (
    AP,
    LP,
    ClassReport,
    CosinePerturbed,
    CurvatureState,
    CurveSpec,
    FlowParams,
    FromSamples,
    GeometrySummary,
    MFoldCircle,
    SupportState,
    classify,
    closure_defect,
    curvature_of,
    generate_support,
    geometry,
    load_support,
    prop_p_holds,
    reconstruct_points,
    support_of,
)
from .diagnostics import (
    Diagnostics,
    MonitorEntry,
    MonitorReport,
    check_monotonicity,
    curvature_energy,
    curvature_energy_spectral,
    rate_check,
    snapshot,
    spreading_check,
)
from .errors import (
    ConfigError,
    ConvexityError,
    CurveFlowError,
    FlowNumericsError,
    ResonanceError,
    SpecError,
    StepFloorError,
)
from .flow import (
    BlowUp,
    Converged,
    RunOutcome,
    StepControl,
    TimeLimit,
    Verdict,
    advance,
    advance_curvature,
    evolve_curvature,
    evolve_support,
    lambda_of,
    rhs_curvature,
    rhs_support,
    rk4_step,
    rk4_step_curvature,
    run,
)
from .grid import (
    PeriodicField,
    PeriodicGrid,
    apply_helmholtz,
    build_grid,
    differentiate,
    eval_field,
    integrate_periodic,
    invert_helmholtz,
)

__version__ = "0.1.0"
