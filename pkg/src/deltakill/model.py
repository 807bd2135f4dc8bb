"""Parameter bundles, time grids, and series containers.

All types are immutable after construction and safe to share between
threads. Units are the caller's responsibility; the library only requires
a consistent system (tests use natural units hbar = m = 1).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParameterError

DIFFUSION_DENSITY = "diffusion_density"
QUANTUM_AMPLITUDE = "quantum_amplitude"


def _require_finite(name: str, value: float) -> None:
    if not math.isfinite(value):
        raise InvalidParameterError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class DiffusionParams:
    """Free diffusion with a killing term of strength kappa concentrated at x = 0.

    D      -- diffusion coefficient (length^2 / time), > 0
    kappa  -- killing strength (length / time), >= 0
    x0     -- source position (length)
    """

    D: float
    kappa: float
    x0: float

    def __post_init__(self):
        for name in ("D", "kappa", "x0"):
            _require_finite(name, getattr(self, name))
        if self.D <= 0:
            raise InvalidParameterError(f"D must be > 0, got {self.D}")
        if self.kappa < 0:
            raise InvalidParameterError(f"kappa must be >= 0, got {self.kappa}")


@dataclass(frozen=True)
class QuantumParams:
    """Free particle with the absorbing point potential -(i k / 2) delta(x).

    hbar, mass > 0; coupling k >= 0; x0 is the release position; a is the
    initial Gaussian width (a = 0 means a point source).
    """

    hbar: float
    mass: float
    k: float
    x0: float
    a: float = 0.0

    def __post_init__(self):
        for name in ("hbar", "mass", "k", "x0", "a"):
            _require_finite(name, getattr(self, name))
        if self.hbar <= 0:
            raise InvalidParameterError(f"hbar must be > 0, got {self.hbar}")
        if self.mass <= 0:
            raise InvalidParameterError(f"mass must be > 0, got {self.mass}")
        if self.k < 0:
            raise InvalidParameterError(f"k must be >= 0, got {self.k}")
        if self.a < 0:
            raise InvalidParameterError(f"a must be >= 0, got {self.a}")


@dataclass(frozen=True)
class EffectiveComplexParams:
    """Complex diffusion parameters equivalent to a quantum parameter set."""

    D_c: complex
    kappa_c: complex


def map_quantum_to_diffusion(q: QuantumParams) -> EffectiveComplexParams:
    """Transplant quantum parameters onto the diffusion form.

    The Schrodinger problem becomes a diffusion problem with complex
    coefficients: D_c = i*hbar/(2m) and kappa_c = k/(2*hbar).
    """
    return EffectiveComplexParams(
        D_c=0.5j * q.hbar / q.mass,
        kappa_c=0.5 * q.k / q.hbar,
    )


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid t_i = t_start + i*h for i = 0 .. count-1."""

    t_start: float
    step: float
    count: int

    def __post_init__(self):
        _require_finite("t_start", self.t_start)
        _require_finite("step", self.step)
        if self.t_start < 0:
            raise InvalidParameterError(f"t_start must be >= 0, got {self.t_start}")
        if self.step <= 0:
            raise InvalidParameterError(f"step must be > 0, got {self.step}")
        if self.count < 2:
            raise InvalidParameterError(f"count must be >= 2, got {self.count}")

    @property
    def times(self) -> np.ndarray:
        # i*h by multiplication, not repeated addition, to avoid drift
        return self.t_start + self.step * np.arange(self.count)

    @property
    def t_end(self) -> float:
        return self.t_start + self.step * (self.count - 1)


def make_time_grid(t_start: float, h: float, count: int) -> TimeGrid:
    """Validated constructor for a uniform TimeGrid."""
    return TimeGrid(t_start=t_start, step=h, count=count)


@dataclass(frozen=True)
class AmplitudeSeries:
    """Boundary values phi(t_i) (complex) or p(0, tau_i) (real part used)."""

    grid: TimeGrid
    values: np.ndarray
    kind: str = QUANTUM_AMPLITUDE

    def __post_init__(self):
        if self.kind not in (DIFFUSION_DENSITY, QUANTUM_AMPLITUDE):
            raise InvalidParameterError(f"unknown series kind {self.kind!r}")
        vals = np.asarray(self.values, dtype=complex)
        if vals.shape != (self.grid.count,):
            raise InvalidParameterError(
                f"values shape {vals.shape} does not match grid count {self.grid.count}"
            )
        if not np.all(np.isfinite(vals)):
            raise InvalidParameterError("series values must be finite")
        object.__setattr__(self, "values", vals)


@dataclass(frozen=True)
class SurvivalCurve:
    """S(t_i) on a time grid plus fit metadata filled in downstream."""

    grid: TimeGrid
    values: np.ndarray
    kind: str
    params: object = None
    method: str = ""
    tail_coefficient: float | None = None
    vanishing_time: float | None = None
    extrapolated: bool = field(default=False)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != (self.grid.count,):
            raise InvalidParameterError(
                f"values shape {vals.shape} does not match grid count {self.grid.count}"
            )
        object.__setattr__(self, "values", vals)
