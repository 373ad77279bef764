"""Exception types shared across the package."""


class CurveFlowError(Exception):
    """Base class for all curveflow errors."""


class SpecError(CurveFlowError):
    """Invalid curve specification (nonpositive radius, bad sample count, ...)."""


class ConvexityError(CurveFlowError):
    """A state left the locally convex cone (min(h + h'') <= 0, or v <= 0)."""


class ResonanceError(CurveFlowError):
    """Frequency-1 content obstructs curve closure (periodic Fredholm condition)."""


class StepFloorError(CurveFlowError):
    """The stability-limited time step fell below the configured floor."""


class FlowNumericsError(CurveFlowError):
    """Time integration failed in a way not certified as curvature blow-up."""


class ConfigError(CurveFlowError):
    """Scenario configuration could not be parsed or validated."""
