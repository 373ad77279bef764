"""Time evolution of the area-preserving and length-preserving flows.

Both flows move the curve with normal speed kappa^alpha - lambda(t), where
the nonlocal multiplier lambda is chosen so that the algebraic area (ap) or
the length (lp) is exactly conserved:

    ap:  lambda = integral(kappa^(alpha-1) dtheta) / L
    lp:  lambda = integral(kappa^alpha  dtheta) / (2*m*pi)

The primary evolving variable is the support function,

    h_t = lambda(t) - (h + h'')^(-alpha),

which keeps the curve exactly closed at every step.  The equivalent
evolution of v = kappa^alpha,

    v_t = alpha * v^p * (v'' + v - lambda),   p = 1 + 1/alpha,

is kept as a cross-validation engine.  Time stepping is classical RK4 with
the parabolic stability bound dt = cfl * dtheta^2 / (alpha * kappa_max^(alpha+1));
lambda is recomputed at every stage, which preserves the conservation law to
the order of the integrator.  A shrinking dt is itself blow-up evidence: the
run loop certifies a singularity when the step hits its floor while the
curvature maximum has been climbing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Union

import numpy as np

from .curves import AP, CurvatureState, FlowParams, SupportState
from .errors import ConvexityError, FlowNumericsError, StepFloorError
from .grid import PeriodicField, PeriodicGrid, _helmholtz_apply_values

__all__ = [
    "StepControl",
    "Converged",
    "BlowUp",
    "TimeLimit",
    "Verdict",
    "RunOutcome",
    "lambda_of",
    "rhs_support",
    "rhs_curvature",
    "rk4_step",
    "rk4_step_curvature",
    "advance",
    "advance_curvature",
    "evolve_support",
    "evolve_curvature",
    "run",
]


@dataclass(frozen=True)
class StepControl:
    """Adaptive-stepping and termination knobs for one run.

    Unset dt_max, dt_min and sample_interval are filled from t_end
    (t_end/100, 1e-12*t_end and t_end/200 respectively).
    """

    t_end: float
    cfl: float = 0.25
    dt_max: float | None = None
    dt_min: float | None = None
    kappa_blowup: float = 1e6
    sample_interval: float | None = None

    def __post_init__(self) -> None:
        if not (self.t_end > 0):
            raise ValueError(f"t_end must be positive, got {self.t_end}")
        if not (0.0 < self.cfl <= 1.0):
            raise ValueError(f"cfl must lie in (0, 1], got {self.cfl}")
        if self.dt_max is None:
            object.__setattr__(self, "dt_max", self.t_end / 100.0)
        if self.dt_min is None:
            object.__setattr__(self, "dt_min", 1e-12 * self.t_end)
        if self.sample_interval is None:
            object.__setattr__(self, "sample_interval", self.t_end / 200.0)
        if not (0.0 < self.dt_min < self.dt_max):
            raise ValueError(
                f"need 0 < dt_min < dt_max, got dt_min={self.dt_min}, dt_max={self.dt_max}"
            )
        if not (self.sample_interval > 0):
            raise ValueError(f"sample_interval must be positive, got {self.sample_interval}")
        if not (self.kappa_blowup > 0):
            raise ValueError(f"kappa_blowup must be positive, got {self.kappa_blowup}")


@dataclass(frozen=True)
class Converged:
    """The state settled onto an m-fold circle of radius r_inf."""

    r_inf: float
    kind = "converged"


@dataclass(frozen=True)
class BlowUp:
    """Curvature blow-up evidence at time t_stop.

    witness is one of "curvature-threshold" (kappa_max crossed the configured
    ceiling), "dt-floor" (stable step fell below dt_min with kappa_max strictly
    climbing over the trailing samples), "convexity-loss" (a step left the
    locally convex cone) or "shrinking-length" (length collapsed below 1e-3 of
    its initial value with growing curvature).
    """

    t_stop: float
    kappa_max: float
    witness: str
    kind = "blowup"


@dataclass(frozen=True)
class TimeLimit:
    """The run reached t_end without converging or blowing up."""

    kind = "timelimit"


Verdict = Union[Converged, BlowUp, TimeLimit]


@dataclass
class RunOutcome:
    """Terminal verdict of one run plus its evidence trail."""

    verdict: Verdict
    series: list            # Diagnostics per sample, in time order
    final_state: SupportState
    states: list[SupportState] = field(default_factory=list)  # aligned with series
    notes: list[str] = field(default_factory=list)


# ---------------------------------------------------------------------------
# raw-array kernels

def _u_of(h: np.ndarray, grid: PeriodicGrid) -> np.ndarray:
    """h + h'' (the curvature radius field 1/kappa)."""
    return _helmholtz_apply_values(h, grid.freqs)


def _require_convex(u: np.ndarray, t: float) -> None:
    m = float(u.min())
    if not (m > 0.0):
        raise ConvexityError(f"convexity lost: min(h + h'') = {m:.6g} near t = {t:.9g}")


def _lambda_from_u(u: np.ndarray, grid: PeriodicGrid, params: FlowParams) -> float:
    v = 1.0 / u if params.alpha == 1.0 else u ** (-params.alpha)
    return _lambda_from_uv(u, v, params)


def _lambda_from_uv(u: np.ndarray, v: np.ndarray, params: FlowParams) -> float:
    if params.kind == AP:
        # kappa^(alpha-1) = u^(1-alpha) = u * v
        return float(np.sum(u * v)) / float(np.sum(u))
    # lp: mean of kappa^alpha over the period
    return float(np.mean(v))


def _rhs_from_u(u: np.ndarray, grid: PeriodicGrid, params: FlowParams) -> np.ndarray:
    v = 1.0 / u if params.alpha == 1.0 else u ** (-params.alpha)
    return _lambda_from_uv(u, v, params) - v


def _rk4_support(
    h: np.ndarray,
    u0: np.ndarray,
    grid: PeriodicGrid,
    params: FlowParams,
    dt: float,
    t: float,
) -> tuple[np.ndarray, np.ndarray]:
    """One fixed-dt RK4 step; returns (h_new, u_new) with u_new verified convex."""
    k1 = _rhs_from_u(u0, grid, params)

    u = _u_of(h + 0.5 * dt * k1, grid)
    _require_convex(u, t)
    k2 = _rhs_from_u(u, grid, params)

    u = _u_of(h + 0.5 * dt * k2, grid)
    _require_convex(u, t)
    k3 = _rhs_from_u(u, grid, params)

    u = _u_of(h + dt * k3, grid)
    _require_convex(u, t)
    k4 = _rhs_from_u(u, grid, params)

    h_new = h + (dt / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)
    u_new = _u_of(h_new, grid)
    _require_convex(u_new, t + dt)
    return h_new, u_new


def _v_rhs(v: np.ndarray, grid: PeriodicGrid, params: FlowParams, t: float) -> np.ndarray:
    if not (float(v.min()) > 0.0):
        raise ConvexityError(f"v = kappa^alpha lost positivity near t = {t:.9g}")
    vhat = np.fft.rfft(v)
    v_tt = np.fft.irfft(vhat * (-(grid.freqs**2)), n=grid.N)
    alpha = params.alpha
    if params.kind == AP:
        if alpha == 1.0:
            lam = float(v.size) / float(np.sum(1.0 / v))
        else:
            lam = float(np.sum(v ** ((alpha - 1.0) / alpha))) / float(np.sum(v ** (-1.0 / alpha)))
    else:
        lam = float(np.mean(v))
    return alpha * v ** params.p * (v_tt + v - lam)


def _rk4_curvature(
    v: np.ndarray, grid: PeriodicGrid, params: FlowParams, dt: float, t: float
) -> np.ndarray:
    k1 = _v_rhs(v, grid, params, t)
    k2 = _v_rhs(v + 0.5 * dt * k1, grid, params, t)
    k3 = _v_rhs(v + 0.5 * dt * k2, grid, params, t)
    k4 = _v_rhs(v + dt * k3, grid, params, t)
    v_new = v + (dt / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)
    if not (float(v_new.min()) > 0.0):
        raise ConvexityError(f"v = kappa^alpha lost positivity near t = {t + dt:.9g}")
    return v_new


def _stable_dt(kappa_max: float, grid: PeriodicGrid, params: FlowParams, cfl: float) -> float:
    # diffusion coefficient of the linearized equation is alpha * kappa^(alpha+1)
    return cfl * grid.dtheta**2 / (params.alpha * kappa_max ** (params.alpha + 1.0))


# ---------------------------------------------------------------------------
# public single-step and fixed-horizon drivers

def lambda_of(state: SupportState | CurvatureState, params: FlowParams) -> float:
    """Nonlocal multiplier of the given state under the selected flow."""
    if isinstance(state, SupportState):
        u = _u_of(state.h.values, state.grid)
        _require_convex(u, state.t)
        return _lambda_from_u(u, state.grid, params)
    v = state.v.values
    if not (float(v.min()) > 0.0):
        raise ConvexityError(f"v must be positive everywhere, min is {v.min():.6g}")
    alpha = params.alpha
    if params.kind == AP:
        return float(np.sum(v ** ((alpha - 1.0) / alpha))) / float(np.sum(v ** (-1.0 / alpha)))
    return float(np.mean(v))


def rhs_support(s: SupportState, params: FlowParams) -> PeriodicField:
    """Pointwise speed of the support function, lambda(t) - kappa^alpha."""
    u = _u_of(s.h.values, s.grid)
    _require_convex(u, s.t)
    return PeriodicField(s.grid, _rhs_from_u(u, s.grid, params))


def rhs_curvature(c: CurvatureState, params: FlowParams) -> PeriodicField:
    """Pointwise speed of v = kappa^alpha: alpha * v^p * (v'' + v - lambda)."""
    return PeriodicField(c.grid, _v_rhs(c.v.values, c.grid, params, c.t))


def rk4_step(s: SupportState, params: FlowParams, dt: float) -> SupportState:
    """One RK4 step of the support equation at a caller-chosen dt."""
    if not (dt > 0):
        raise ValueError(f"dt must be positive, got {dt}")
    u0 = _u_of(s.h.values, s.grid)
    _require_convex(u0, s.t)
    h_new, _ = _rk4_support(s.h.values, u0, s.grid, params, dt, s.t)
    return SupportState(s.grid, PeriodicField(s.grid, h_new), s.t + dt)


def rk4_step_curvature(c: CurvatureState, params: FlowParams, dt: float) -> CurvatureState:
    """One RK4 step of the v-form equation at a caller-chosen dt."""
    if not (dt > 0):
        raise ValueError(f"dt must be positive, got {dt}")
    v_new = _rk4_curvature(c.v.values, c.grid, params, dt, c.t)
    return CurvatureState(c.grid, PeriodicField(c.grid, v_new), c.t + dt)


def advance(
    s: SupportState, params: FlowParams, ctl: StepControl, dt_cap: float | None = None
) -> SupportState:
    """One stability-controlled step.

    The step is min(dt_max, cfl * dtheta^2 / (alpha * kappa_max^(alpha+1))),
    optionally clipped by dt_cap (used to land exactly on sample times).
    Raises StepFloorError when the uncapped step falls below dt_min and
    ConvexityError when the step leaves the locally convex cone.
    """
    u0 = _u_of(s.h.values, s.grid)
    _require_convex(u0, s.t)
    kappa_max = 1.0 / float(u0.min())
    dt = min(_stable_dt(kappa_max, s.grid, params, ctl.cfl), ctl.dt_max)
    if dt < ctl.dt_min:
        raise StepFloorError(
            f"required dt {dt:.3e} fell below the floor {ctl.dt_min:.3e} "
            f"at t = {s.t:.9g} (kappa_max = {kappa_max:.6g})"
        )
    if dt_cap is not None:
        dt = min(dt, dt_cap)
    h_new, _ = _rk4_support(s.h.values, u0, s.grid, params, dt, s.t)
    return SupportState(s.grid, PeriodicField(s.grid, h_new), s.t + dt)


def advance_curvature(
    c: CurvatureState, params: FlowParams, ctl: StepControl, dt_cap: float | None = None
) -> CurvatureState:
    """Stability-controlled step of the v-form engine (same dt rule as advance)."""
    v = c.v.values
    if not (float(v.min()) > 0.0):
        raise ConvexityError(f"v must be positive everywhere, min is {v.min():.6g}")
    kappa_max = float(v.max()) ** (1.0 / params.alpha)
    dt = min(_stable_dt(kappa_max, c.grid, params, ctl.cfl), ctl.dt_max)
    if dt < ctl.dt_min:
        raise StepFloorError(
            f"required dt {dt:.3e} fell below the floor {ctl.dt_min:.3e} "
            f"at t = {c.t:.9g} (kappa_max = {kappa_max:.6g})"
        )
    if dt_cap is not None:
        dt = min(dt, dt_cap)
    v_new = _rk4_curvature(v, c.grid, params, dt, c.t)
    return CurvatureState(c.grid, PeriodicField(c.grid, v_new), c.t + dt)


def _snap_time(state, t_target: float):
    if state.t != t_target and abs(state.t - t_target) <= 1e-12 * max(abs(t_target), 1.0):
        return replace(state, t=t_target)
    return state


def evolve_support(
    s: SupportState, params: FlowParams, ctl: StepControl, t_target: float
) -> SupportState:
    """Advance the support engine to exactly t_target (no verdict logic)."""
    while s.t < t_target - 1e-14 * max(t_target, 1.0):
        s = advance(s, params, ctl, dt_cap=t_target - s.t)
    return _snap_time(s, t_target)


def evolve_curvature(
    c: CurvatureState, params: FlowParams, ctl: StepControl, t_target: float
) -> CurvatureState:
    """Advance the v-form engine to exactly t_target (no verdict logic)."""
    while c.t < t_target - 1e-14 * max(t_target, 1.0):
        c = advance_curvature(c, params, ctl, dt_cap=t_target - c.t)
    return _snap_time(c, t_target)


# ---------------------------------------------------------------------------
# full runs

def _strictly_increasing(vals: list[float], window: int) -> bool:
    if len(vals) < window:
        return False
    tail = vals[-window:]
    return all(b > a for a, b in zip(tail, tail[1:]))


def _certificate(diag, params: FlowParams, period: float, tol: float) -> bool:
    """Scale-free convergence test from sampled extremes.

    kappa * L / (2*m*pi) equals 1 exactly on an m-fold circle and its extreme
    deviations occur at the curvature extremes, so the sampled extremes settle
    the sup-norm test.  The stationarity residual |lambda - kappa^alpha| is
    made dimensionless with the current mean radius L / (2*m*pi).
    """
    r = diag.L / period
    dev = max(abs(diag.kappa_max * r - 1.0), abs(diag.kappa_min * r - 1.0))
    if dev > tol:
        return False
    resid = max(
        abs(diag.lam - diag.kappa_max**params.alpha),
        abs(diag.lam - diag.kappa_min**params.alpha),
    ) * r**params.alpha
    return resid <= tol


def run(
    s0: SupportState,
    params: FlowParams,
    ctl: StepControl,
    tol_conv: float = 1e-3,
    al_n: int | None = None,
) -> RunOutcome:
    """Evolve s0 until convergence, blow-up evidence, or t_end.

    Diagnostics are sampled every ctl.sample_interval (plus the initial and
    terminal instants).  Convergence detection arms only after the certificate
    has failed at least once, so a run started exactly on an m-fold circle
    coasts to TimeLimit instead of trivially "converging" at t = 0.  When
    al_n is given, the monotone-support property is tracked per sample.
    """
    from . import diagnostics as diag_mod  # deferred import, avoids a module cycle

    grid = s0.grid
    period = grid.period
    interval = float(ctl.sample_interval)
    series: list = []
    states: list[SupportState] = []
    notes: list[str] = []

    h = np.array(s0.h.values, dtype=float)
    u = _u_of(h, grid)
    _require_convex(u, s0.t)
    t = float(s0.t)
    last_dt = 0.0
    sample_k = 0
    next_sample = t
    armed = False
    L0: float | None = None
    verdict: Verdict | None = None

    def emit() -> object:
        nonlocal L0
        s_now = SupportState(grid, PeriodicField(grid, h), t)
        d = diag_mod.snapshot(s_now, params, dt=last_dt, prop_n=al_n)
        series.append(d)
        states.append(s_now)
        if L0 is None:
            L0 = d.L
        return d

    def kappa_trail() -> list[float]:
        return [d.kappa_max for d in series]

    time_eps = 1e-9 * interval
    while verdict is None:
        kappa_max = 1.0 / float(u.min())

        if t >= next_sample - time_eps or t >= ctl.t_end - time_eps:
            d = emit()
            if d.L < 1e-3 * L0 and _strictly_increasing(kappa_trail(), 3):
                notes.append(
                    f"length collapsed to {d.L:.3e} (from {L0:.6g}) with growing curvature: "
                    "shrink-to-point blow-up"
                )
                verdict = BlowUp(t_stop=t, kappa_max=d.kappa_max, witness="shrinking-length")
                break
            if _certificate(d, params, period, tol_conv):
                if armed:
                    verdict = Converged(r_inf=d.L / period)
                    break
            else:
                armed = True
            while next_sample <= t + time_eps:
                sample_k += 1
                next_sample = sample_k * interval

        if t >= ctl.t_end - time_eps:
            if not armed:
                notes.append(
                    "initial state already satisfied the convergence certificate "
                    "(stationary start); ran to the time limit"
                )
            verdict = TimeLimit()
            break

        if kappa_max >= ctl.kappa_blowup:
            if states and t > states[-1].t + time_eps:
                emit()
            verdict = BlowUp(t_stop=t, kappa_max=kappa_max, witness="curvature-threshold")
            break

        dt = min(_stable_dt(kappa_max, grid, params, ctl.cfl), ctl.dt_max)
        if dt < ctl.dt_min:
            if states and t > states[-1].t + time_eps:
                emit()
            if _strictly_increasing(kappa_trail(), 10):
                verdict = BlowUp(t_stop=t, kappa_max=kappa_max, witness="dt-floor")
                break
            raise FlowNumericsError(
                f"step floor {ctl.dt_min:.3e} hit at t = {t:.9g} without monotone "
                "curvature growth over the trailing samples; cannot certify blow-up"
            )

        horizon = min(next_sample, ctl.t_end)
        dt_step = min(dt, horizon - t)
        try:
            h, u = _rk4_support(h, u, grid, params, dt_step, t)
        except ConvexityError as exc:
            if states and t > states[-1].t + time_eps:
                emit()
            notes.append(f"step at t = {t:.9g} left the convex cone: {exc}")
            verdict = BlowUp(t_stop=t, kappa_max=kappa_max, witness="convexity-loss")
            break
        t += dt_step
        if abs(t - horizon) <= 1e-12 * max(horizon, 1.0):
            t = horizon
        last_dt = dt_step

    final_state = states[-1] if states else s0
    return RunOutcome(
        verdict=verdict, series=series, final_state=final_state, states=states, notes=notes
    )
