"""Locally convex closed plane curves represented by their support function.

A locally convex curve with turning number m admits the normal angle
``theta in [0, 2*m*pi)`` as a global parameter.  Its support function
h(theta) (signed distance from the origin to the tangent line with outward
normal (cos theta, sin theta)) determines everything:

    curvature      kappa = 1 / (h + h'')
    length         L = integral of h
    algebraic area A = 1/2 * integral of (h^2 - h_theta^2)
    plane points   X = h * (cos, sin) + h_theta * (-sin, cos)

The module also carries the dual representation v = kappa^alpha used by the
flow engine's cross-validation path, generators for the preset curve
families, and the rotational-symmetry classifier.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np

from .errors import ConvexityError, ResonanceError, SpecError
from .grid import (
    PeriodicField,
    PeriodicGrid,
    _diff_values,
    _helmholtz_apply_values,
    build_grid,
    eval_field,
    integrate_periodic,
    invert_helmholtz,
)

__all__ = [
    "FlowParams",
    "SupportState",
    "CurvatureState",
    "MFoldCircle",
    "CosinePerturbed",
    "FromSamples",
    "CurveSpec",
    "GeometrySummary",
    "ClassReport",
    "generate_support",
    "load_support",
    "curvature_of",
    "support_of",
    "geometry",
    "reconstruct_points",
    "closure_defect",
    "classify",
    "prop_p_holds",
]

AP = "ap"
LP = "lp"


@dataclass(frozen=True)
class FlowParams:
    """Flow selector: curvature exponent alpha > 0, turning number m, kind ap/lp."""

    alpha: float
    m: int
    kind: str

    def __post_init__(self) -> None:
        if not (self.alpha > 0):
            raise SpecError(f"alpha must be positive, got {self.alpha}")
        if self.m < 1:
            raise SpecError(f"turning number m must be >= 1, got {self.m}")
        if self.kind not in (AP, LP):
            raise SpecError(f"flow kind must be '{AP}' or '{LP}', got {self.kind!r}")

    @property
    def p(self) -> float:
        """Exponent of the porous-medium factor in the v-form equation."""
        return 1.0 + 1.0 / self.alpha


@dataclass(frozen=True)
class SupportState:
    """Sampled support function at one flow time (the primary evolving state)."""

    grid: PeriodicGrid
    h: PeriodicField
    t: float = 0.0


@dataclass(frozen=True)
class CurvatureState:
    """Sampled v = kappa^alpha at one flow time (the oracle evolving state)."""

    grid: PeriodicGrid
    v: PeriodicField
    t: float = 0.0


# ---------------------------------------------------------------------------
# curve specifications

@dataclass(frozen=True)
class MFoldCircle:
    """Circle of radius r traversed m times."""

    r: float
    m: int

    def __post_init__(self) -> None:
        if not (self.r > 0):
            raise SpecError(f"circle radius must be positive, got {self.r}")
        if self.m < 1:
            raise SpecError(f"turning number m must be >= 1, got {self.m}")


@dataclass(frozen=True)
class CosinePerturbed:
    """h(theta) = a + b*cos(n*theta/m), the workhorse rotationally symmetric family.

    Requires a > 0 and, for n != m, a positive convexity margin
    a - |b| * |1 - (n/m)^2| since h + h'' = a + b*(1 - (n/m)^2)*cos(n*theta/m).
    (n = m is a pure translation mode: the curve is an off-center m-fold circle.)
    """

    a: float
    b: float
    n: int
    m: int

    def __post_init__(self) -> None:
        if not (self.a > 0):
            raise SpecError(f"mean radius a must be positive, got {self.a}")
        if self.n < 1 or self.m < 1:
            raise SpecError(f"n and m must be >= 1, got n={self.n}, m={self.m}")
        if self.n != self.m and self.convexity_margin <= 0:
            raise ConvexityError(
                f"h + h'' reaches {self.convexity_margin:.6g} <= 0 for "
                f"a={self.a}, b={self.b}, n={self.n}, m={self.m}"
            )

    @property
    def curvature_factor(self) -> float:
        """Coefficient 1 - (n/m)^2 multiplying the cosine in h + h''."""
        return 1.0 - (self.n / self.m) ** 2

    @property
    def convexity_margin(self) -> float:
        return self.a - abs(self.b) * abs(self.curvature_factor)


@dataclass(frozen=True)
class FromSamples:
    """Support values supplied directly; the sample count must match the grid."""

    values: np.ndarray
    m: int

    def __post_init__(self) -> None:
        vals = np.array(self.values, dtype=float)
        if vals.ndim != 1 or vals.size < 4:
            raise SpecError(f"need a 1-d array of >= 4 support samples, got shape {vals.shape}")
        if not np.all(np.isfinite(vals)):
            raise SpecError("support samples must be finite")
        if self.m < 1:
            raise SpecError(f"turning number m must be >= 1, got {self.m}")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)


CurveSpec = Union[MFoldCircle, CosinePerturbed, FromSamples]


def generate_support(spec: CurveSpec, N: int) -> SupportState:
    """Sample a curve specification on an N-point grid at t = 0.

    The sampled convexity margin min(h + h'') is re-verified numerically;
    a nonpositive margin raises ConvexityError.
    """
    grid = build_grid(spec.m, N)
    if isinstance(spec, MFoldCircle):
        h = np.full(N, spec.r)
    elif isinstance(spec, CosinePerturbed):
        if spec.n >= N // 2:
            raise SpecError(
                f"N={N} cannot resolve the perturbation mode n={spec.n} (need n < N/2)"
            )
        h = spec.a + spec.b * np.cos((spec.n / spec.m) * grid.theta)
    elif isinstance(spec, FromSamples):
        if spec.values.size != N:
            raise SpecError(
                f"sample count {spec.values.size} does not match requested N={N}; "
                "resampling is not supported"
            )
        h = spec.values
    else:
        raise SpecError(f"unknown curve specification {type(spec).__name__}")

    state = SupportState(grid, PeriodicField(grid, h), t=0.0)
    margin = float(_helmholtz_apply_values(state.h.values, grid.freqs).min())
    if margin <= 0.0:
        raise ConvexityError(f"sampled convexity margin {margin:.6g} <= 0")
    return state


def load_support(path: str | Path) -> SupportState:
    """Read the plain-text support format: first line "m N", then N values."""
    lines = Path(path).read_text().split("\n")
    rows = [ln.strip() for ln in lines if ln.strip() and not ln.strip().startswith("#")]
    if not rows:
        raise SpecError(f"{path}: empty support file")
    head = rows[0].split()
    if len(head) != 2:
        raise SpecError(f"{path}: first line must be 'm N', got {rows[0]!r}")
    try:
        m, N = int(head[0]), int(head[1])
    except ValueError as exc:
        raise SpecError(f"{path}: first line must hold two integers, got {rows[0]!r}") from exc
    vals = rows[1:]
    if len(vals) != N:
        raise SpecError(f"{path}: expected {N} support values, found {len(vals)}")
    try:
        h = np.array([float(x) for x in vals])
    except ValueError as exc:
        raise SpecError(f"{path}: non-numeric support value") from exc
    return generate_support(FromSamples(h, m), N)


# ---------------------------------------------------------------------------
# conversions between the two representations

def curvature_of(s: SupportState, alpha: float) -> CurvatureState:
    """v = (h + h'')^(-alpha) on the same grid and at the same time."""
    u = _helmholtz_apply_values(s.h.values, s.grid.freqs)
    margin = float(u.min())
    if margin <= 0.0:
        raise ConvexityError(f"convexity margin {margin:.6g} <= 0 at t={s.t}")
    return CurvatureState(s.grid, PeriodicField(s.grid, u ** (-alpha)), s.t)


def support_of(c: CurvatureState, alpha: float, resonance_tol: float = 1e-8) -> SupportState:
    """Recover the support function from v = kappa^alpha.

    Solves h + h'' = v^(-1/alpha).  The frequency-1 coefficients of h, which
    encode a pure translation, are zeroed, so the result is centered at its
    Steiner point.  Raises ResonanceError when the curvature field does not
    close a curve (frequency-1 content of 1/kappa above ``resonance_tol``).
    """
    v = c.v.values
    if float(v.min()) <= 0.0:
        raise ConvexityError(f"v must be positive everywhere, min is {v.min():.6g}")
    radius = v ** (-1.0 / alpha)
    h = invert_helmholtz(PeriodicField(c.grid, radius), resonance_tol=resonance_tol)
    return SupportState(c.grid, h, c.t)


def closure_defect(c: CurvatureState, alpha: float) -> float:
    """Magnitude of the frequency-1 component of 1/kappa.

    Zero (to quadrature accuracy) exactly when the prescribed curvature closes
    up into a curve; reported along the oracle evolution as a drift monitor.
    """
    v = c.v.values
    if float(v.min()) <= 0.0:
        raise ConvexityError(f"v must be positive everywhere, min is {v.min():.6g}")
    radius = v ** (-1.0 / alpha)
    z = c.grid.dtheta * np.sum(radius * np.exp(1j * c.grid.theta))
    return float(abs(z))


# ---------------------------------------------------------------------------
# geometric functionals

@dataclass(frozen=True)
class GeometrySummary:
    """Scalar geometry of one state: length, algebraic area, extremes, gaps."""

    L: float
    A: float
    kappa_min: float
    kappa_max: float
    convexity_margin: float
    h_min: float
    h_max: float
    isop_gap: float   # L^2 - 4*m*pi*A, zero exactly on an m-fold circle
    rado_gap: float   # L^2 - 4*pi*|A|, nonnegative for immersed closed curves


def geometry(s: SupportState) -> GeometrySummary:
    h = s.h.values
    grid = s.grid
    u = _helmholtz_apply_values(h, grid.freqs)
    margin = float(u.min())
    if margin <= 0.0:
        raise ConvexityError(f"convexity margin {margin:.6g} <= 0 at t={s.t}")
    h_theta = _diff_values(h, grid.freqs, 1)
    L = float(grid.dtheta * h.sum())
    A = float(0.5 * grid.dtheta * np.sum(h**2 - h_theta**2))
    return GeometrySummary(
        L=L,
        A=A,
        kappa_min=1.0 / float(u.max()),
        kappa_max=1.0 / margin,
        convexity_margin=margin,
        h_min=float(h.min()),
        h_max=float(h.max()),
        isop_gap=L**2 - 4.0 * grid.m * math.pi * A,
        rado_gap=L**2 - 4.0 * math.pi * abs(A),
    )


def reconstruct_points(s: SupportState) -> np.ndarray:
    """Plane points X(theta_j), shape (N, 2); the sequence closes by periodicity."""
    h = s.h.values
    h_theta = _diff_values(h, s.grid.freqs, 1)
    th = s.grid.theta
    cos, sin = np.cos(th), np.sin(th)
    return np.column_stack((h * cos - h_theta * sin, h * sin + h_theta * cos))


# ---------------------------------------------------------------------------
# symmetry classification

HIGHLY_SYMMETRIC = "highly-symmetric"
ABRESCH_LANGER = "abresch-langer"
CIRCLE = "circle"
UNCLASSIFIED = "unclassified"


@dataclass(frozen=True)
class ClassReport:
    """Detected rotational symmetry and curve-class membership.

    n = 0 means full rotational symmetry (an m-fold circle).  The
    Abresch-Langer label is restricted to m < n < 2m; profiles with n <= m
    are reported as unclassified even when the monotone-support property
    holds, because the positive-area convergence regime excludes them.
    """

    n: int
    coprime: bool
    label: str
    prop_p: bool | None = None


def _active_modes(h: np.ndarray, tol: float) -> tuple[np.ndarray, np.ndarray]:
    chat = np.fft.rfft(h)
    scale = float(np.linalg.norm(chat))
    k = np.arange(chat.size)
    active = (np.abs(chat) > tol * max(scale, np.finfo(float).tiny)) & (k >= 1)
    return k[active], chat


def prop_p_holds(
    s: SupportState,
    n: int,
    sym_tol: float = 1e-8,
    mono_tol: float = 1e-10,
) -> bool:
    """Monotone-support property for an n-fold symmetric profile.

    Checks, on the grid: h (hence kappa) even about theta = 0 and n-fold
    periodic, h and kappa nonincreasing across (0, m*pi/n), and h(m*pi/n) > 0.
    Sign conditions use a tolerance relative to the field's amplitude.
    """
    grid = s.grid
    h = s.h.values
    active, chat = _active_modes(h, sym_tol)
    if np.any(active % n != 0):
        return False
    scale = float(np.linalg.norm(chat))
    if float(np.abs(chat.imag).max()) > sym_tol * max(scale, np.finfo(float).tiny):
        return False  # even about theta = 0 iff the cosine series is pure

    u = _helmholtz_apply_values(h, grid.freqs)
    h_theta = _diff_values(h, grid.freqs, 1)
    u_theta = _diff_values(u, grid.freqs, 1)
    half = grid.m * math.pi / n
    inside = (grid.theta > 1e-12) & (grid.theta < half - 1e-12)
    if np.any(h_theta[inside] > mono_tol * np.abs(h).max()):
        return False
    # kappa = 1/u nonincreasing iff u nondecreasing
    if np.any(u_theta[inside] < -mono_tol * np.abs(u).max()):
        return False
    return float(eval_field(s.h, half)) > 0.0


def classify(s: SupportState, n: int | None = None, sym_tol: float = 1e-8) -> ClassReport:
    """Report the symmetry order and class membership of a state.

    The symmetry order is the largest n with h(theta + 2*m*pi/n) = h(theta)
    to tolerance; on the discrete spectrum that is the gcd of the active
    rfft bins.  Scale- and rotation-invariant by construction.  Never raises.
    """
    m = s.grid.m
    active, _ = _active_modes(s.h.values, sym_tol)
    if active.size == 0:
        return ClassReport(n=0, coprime=True, label=CIRCLE, prop_p=None)
    detected = int(np.gcd.reduce(active))
    if n is not None:
        if np.any(active % n != 0):
            return ClassReport(n=n, coprime=math.gcd(m, n) == 1, label=UNCLASSIFIED)
        detected = n
    coprime = math.gcd(m, detected) == 1
    if coprime and detected > 2 * m:
        return ClassReport(n=detected, coprime=True, label=HIGHLY_SYMMETRIC)
    if coprime and m < detected < 2 * m:
        ok = prop_p_holds(s, detected, sym_tol=sym_tol)
        label = ABRESCH_LANGER if ok else UNCLASSIFIED
        return ClassReport(n=detected, coprime=True, label=label, prop_p=ok)
    return ClassReport(n=detected, coprime=coprime, label=UNCLASSIFIED)
