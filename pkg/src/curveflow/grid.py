"""Spectral calculus on uniformly sampled periodic grids.

Every evolving field in this package lives on the normal-angle circle
``[0, 2*m*pi)`` where ``m`` is the turning number of the curve family.
The operations here are plain Fourier collocation: differentiation and
the inverse of ``w -> w + w''`` act mode by mode, integration is the
periodic trapezoid rule.  All of them are exact to rounding on resolved
trigonometric modes, which is what makes the conservation and
monotonicity audits elsewhere meaningful at tight tolerances.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ResonanceError

__all__ = [
    "PeriodicGrid",
    "PeriodicField",
    "build_grid",
    "differentiate",
    "integrate_periodic",
    "apply_helmholtz",
    "invert_helmholtz",
    "eval_field",
]


@dataclass(frozen=True)
class PeriodicGrid:
    """Uniform samples ``theta_j = j * dtheta`` of the circle of circumference 2*m*pi.

    No endpoint is duplicated: ``theta[N-1] + dtheta`` wraps back to 0, so a
    field with N samples automatically satisfies f(theta + 2*m*pi) = f(theta).
    """

    m: int
    N: int

    def __post_init__(self) -> None:
        if self.m < 1:
            raise ValueError(f"turning number m must be >= 1, got {self.m}")
        if self.N < 4:
            raise ValueError(f"grid needs at least 4 samples, got {self.N}")
        if self.N % 2 != 0:
            raise ValueError(
                f"N must be even so the Nyquist convention is well defined, got {self.N}"
            )

    @property
    def period(self) -> float:
        return 2.0 * np.pi * self.m

    @property
    def dtheta(self) -> float:
        return self.period / self.N

    @cached_property
    def theta(self) -> np.ndarray:
        th = np.arange(self.N) * self.dtheta
        th.setflags(write=False)
        return th

    @cached_property
    def freqs(self) -> np.ndarray:
        """Mode frequencies k/m of the rfft bins k = 0 .. N/2 (period 2*m*pi)."""
        f = np.fft.rfftfreq(self.N, d=1.0 / self.N) / self.m
        f.setflags(write=False)
        return f


@dataclass(frozen=True)
class PeriodicField:
    """N finite real samples of a 2*m*pi-periodic function on its grid."""

    grid: PeriodicGrid
    values: np.ndarray

    def __post_init__(self) -> None:
        vals = np.array(self.values, dtype=float)  # private copy
        if vals.shape != (self.grid.N,):
            raise ValueError(
                f"field needs exactly {self.grid.N} samples, got shape {vals.shape}"
            )
        if not np.all(np.isfinite(vals)):
            raise ValueError("field values must all be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)


def build_grid(m: int, N: int, *, min_points: int = 16) -> PeriodicGrid:
    """Build the uniform grid with dtheta = 2*m*pi/N.

    Rejects odd N, N below ``min_points`` and m < 1.  ``min_points`` exists so
    unit tests can exercise tiny grids; production callers keep the default.
    """
    if N < min_points:
        raise ValueError(f"N must be >= {min_points}, got {N}")
    return PeriodicGrid(m=m, N=N)


# ---------------------------------------------------------------------------
# raw-array kernels (shared with the time-stepping hot loop)

def _diff_values(values: np.ndarray, freqs: np.ndarray, order: int) -> np.ndarray:
    vhat = np.fft.rfft(values)
    if order == 1:
        vhat = vhat * (1j * freqs)
        vhat[-1] = 0.0  # Nyquist mode has no well-defined odd derivative
    elif order == 2:
        vhat = vhat * (-(freqs**2))
    else:
        raise ValueError(f"derivative order must be 1 or 2, got {order}")
    return np.fft.irfft(vhat, n=values.shape[0])


def _helmholtz_apply_values(values: np.ndarray, freqs: np.ndarray) -> np.ndarray:
    vhat = np.fft.rfft(values)
    vhat = vhat * (1.0 - freqs**2)
    return np.fft.irfft(vhat, n=values.shape[0])


# ---------------------------------------------------------------------------
# public operations

def differentiate(f: PeriodicField, order: int = 1) -> PeriodicField:
    """Discrete theta-derivative by Fourier collocation.

    Exact (to rounding) on any resolved mode cos(k*theta/m) with k < N/2.
    """
    return PeriodicField(f.grid, _diff_values(f.values, f.grid.freqs, order))


def integrate_periodic(f: PeriodicField) -> float:
    """Integral over one full period.

    On a uniform periodic grid the trapezoid rule collapses to
    ``dtheta * sum(values)`` and is spectrally accurate for smooth fields.
    """
    return float(f.grid.dtheta * f.values.sum())


def apply_helmholtz(f: PeriodicField) -> PeriodicField:
    """Return w + w'' (the multiplier 1 - (k/m)^2 in Fourier space)."""
    return PeriodicField(f.grid, _helmholtz_apply_values(f.values, f.grid.freqs))


def invert_helmholtz(f: PeriodicField, resonance_tol: float = 1e-8) -> PeriodicField:
    """Solve w + w'' = f on the 2*m*pi circle.

    The operator kernel is spanned by cos(theta) and sin(theta), i.e. the
    rfft bin k = m.  Solvability requires f to have no frequency-1 content;
    geometrically that is exactly the condition for a prescribed curvature
    radius 1/kappa to close up into a curve.  The resonant bin of the
    solution is set to zero, which centers the curve at its Steiner point.

    Raises ResonanceError when ``|fhat[m]| > resonance_tol * ||fhat||_2``.
    """
    grid = f.grid
    if grid.m >= grid.N // 2:
        raise ValueError(
            f"grid with N={grid.N} cannot resolve the resonant mode k=m={grid.m}"
        )
    fhat = np.fft.rfft(f.values)
    scale = float(np.linalg.norm(fhat))
    resonant = abs(fhat[grid.m])
    if resonant > resonance_tol * max(scale, np.finfo(float).tiny):
        raise ResonanceError(
            "frequency-1 content blocks inversion (curve would not close): "
            f"|fhat[m]| / ||fhat|| = {resonant / max(scale, np.finfo(float).tiny):.3e} "
            f"> {resonance_tol:.1e}"
        )
    denom = 1.0 - grid.freqs**2  # zero exactly at k = m, nowhere else
    what = np.zeros_like(fhat)
    nonres = denom != 0.0
    what[nonres] = fhat[nonres] / denom[nonres]
    return PeriodicField(grid, np.fft.irfft(what, n=grid.N))


def eval_field(f: PeriodicField, theta) -> float | np.ndarray:
    """Evaluate the trigonometric interpolant of f at arbitrary angles.

    Exact for band-limited fields; used for off-grid probes such as h(m*pi/n).
    """
    grid = f.grid
    coeff = np.fft.rfft(f.values) / grid.N
    weights = np.full(grid.N // 2 + 1, 2.0)
    weights[0] = 1.0
    weights[-1] = 1.0  # Nyquist bin carries full amplitude in rfft
    th = np.atleast_1d(np.asarray(theta, dtype=float))
    phases = np.exp(1j * th[:, None] * grid.freqs[None, :])
    out = (phases * (weights * coeff)).real.sum(axis=1)
    return out if np.ndim(theta) else float(out[0])
