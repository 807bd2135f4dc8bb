"""Survival probability curves, tail fits, and the vanishing-time estimate.

Diffusion: S(tau) = 1 - (kappa/D) * integral of p(0, u) du from 0 to tau.
Quantum:   S(t)   = S(0) - (k/hbar) * integral of |phi|^2 dt'.

The absorption prefactor in the quantum rate is k/hbar (the norm identity
d/dt int |psi|^2 = -(k/hbar) |psi(0,t)|^2); it reduces to k only for
hbar = 1. The initial Gaussian profile is normalized as a probability
density, whose quantum norm is 1/(2 a sqrt(pi)); with normalize on, state
and boundary amplitude are rescaled so S(0) = 1.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import closedform
from .errors import (GridTooCoarseError, InsufficientPointsError,
                     InvalidParameterError, NormalizationError,
                     NoVanishingError)
from .model import (AmplitudeSeries, DIFFUSION_DENSITY, DiffusionParams,
                    QUANTUM_AMPLITUDE, QuantumParams, SurvivalCurve)

LAYER_POINTS = 10_000        # log-spaced points for the [0, t_start] boundary layer
LAYER_MASS_LIMIT = 1e-6      # largest closed-form layer mass accepted as "omitted"


@dataclass(frozen=True)
class TailFit:
    """Power-law fit value ~ c * t^exponent over a time window."""

    coefficient: float
    exponent: float
    window: tuple[float, float]
    residual: float
    model: str = "power_law"

    def __post_init__(self):
        if self.window[0] >= self.window[1]:
            raise InvalidParameterError("fit window must have t_lo < t_hi")
        if self.residual < 0:
            raise InvalidParameterError("residual must be >= 0")


@dataclass(frozen=True)
class VanishingTimeEstimate:
    """Vanishing time, flagged when it comes from extrapolation."""

    time: float
    extrapolated: bool


def _cumulative_trapezoid(values: np.ndarray, h: float) -> np.ndarray:
    steps = 0.5 * h * (values[1:] + values[:-1])
    return np.concatenate([[0.0], np.cumsum(steps)])


def _diffusion_layer_mass(d: DiffusionParams, t_start: float) -> float:
    """Closed-form mass (kappa/D) * int_0^{t_start} p(0, u) du."""
    if t_start <= 0:
        return 0.0
    u = np.logspace(np.log10(t_start) - 10.0, np.log10(t_start), LAYER_POINTS)
    p = closedform.boundary_density_diffusion(u, d)
    return float((d.kappa / d.D) * np.trapezoid(p, u))


def survival_diffusion(series: AmplitudeSeries, d: DiffusionParams) -> SurvivalCurve:
    """Survival curve from a boundary-density series on its tau grid.

    The series must start early enough that the omitted [0, tau_start] mass
    (estimated from the closed form) is below 1e-6; that estimate is still
    added as a boundary-layer correction.
    """
    if series.kind != DIFFUSION_DENSITY:
        raise InvalidParameterError("survival_diffusion expects a diffusion-density series")
    p = series.values.real
    if np.max(np.abs(series.values.imag)) > 1e-10 * max(1.0, np.max(np.abs(p))):
        raise InvalidParameterError("diffusion density series has a complex part")
    layer = _diffusion_layer_mass(d, series.grid.t_start)
    if layer > LAYER_MASS_LIMIT:
        raise GridTooCoarseError(
            f"omitted boundary-layer mass {layer:.3e} exceeds {LAYER_MASS_LIMIT:g}; "
            "start the series earlier")
    if np.any(p < -1e-12 * np.max(np.abs(p))):
        raise GridTooCoarseError("density series goes negative; refine the grid")
    absorbed = (d.kappa / d.D) * _cumulative_trapezoid(p, series.grid.step)
    s_vals = 1.0 - layer - absorbed
    return SurvivalCurve(grid=series.grid, values=s_vals, kind=DIFFUSION_DENSITY,
                         params=d, method="trapezoid+layer")


def gaussian_norm_factor(q: QuantumParams) -> float:
    """Factor rescaling the density-normalized Gaussian to unit quantum norm.

    The profile has int |psi|^2 dy = 1/(2 a sqrt(pi)); the state (and with
    it the boundary amplitude) is multiplied by sqrt(2 a sqrt(pi)).
    """
    if q.a <= 0:
        raise NormalizationError("a point source has no finite norm to normalize")
    return float(np.sqrt(2.0 * q.a * np.sqrt(np.pi)))


def survival_quantum(series: AmplitudeSeries, q: QuantumParams,
                     normalize: bool = True) -> SurvivalCurve:
    """Survival curve S(t) = S(0) - (k/hbar) int |phi|^2 from a phi series.

    With normalize on (requires a > 0) the amplitude is rescaled by the
    quantum-normalization factor and S(0) = 1; otherwise S(0) is the raw
    profile norm 1/(2 a sqrt(pi)).
    """
    if series.kind != QUANTUM_AMPLITUDE:
        raise InvalidParameterError("survival_quantum expects a quantum-amplitude series")
    if normalize:
        scale = gaussian_norm_factor(q) ** 2
        s0 = 1.0
    else:
        if q.a <= 0:
            raise NormalizationError("survival of a point source is not defined")
        scale = 1.0
        s0 = 1.0 / (2.0 * q.a * np.sqrt(np.pi))
    abs2 = scale * np.abs(series.values) ** 2
    layer = 0.0
    if series.grid.t_start > 0:
        t0 = series.grid.t_start
        u = np.logspace(np.log10(t0) - 8.0, np.log10(t0), LAYER_POINTS)
        layer_vals = scale * np.abs(closedform.gaussian_amplitude_series(u, q)) ** 2
        layer = float((q.k / q.hbar) * np.trapezoid(layer_vals, u))
        if layer > LAYER_MASS_LIMIT:
            raise GridTooCoarseError(
                f"omitted boundary-layer absorption {layer:.3e} exceeds "
                f"{LAYER_MASS_LIMIT:g}; start the series earlier")
    absorbed = (q.k / q.hbar) * _cumulative_trapezoid(abs2, series.grid.step)
    s_vals = s0 - layer - absorbed
    return SurvivalCurve(grid=series.grid, values=s_vals, kind=QUANTUM_AMPLITUDE,
                         params=q, method="trapezoid+layer")


def fit_tail(series: AmplitudeSeries, window: tuple[float, float]) -> TailFit:
    """Least-squares power-law fit of the series tail on a log-log scale.

    Quantum series are fitted as |phi|^2 ~ c t^p, diffusion series as
    p(0, tau) ~ c tau^p. Needs at least 10 grid points inside the window.
    """
    t_lo, t_hi = window
    times = series.grid.times
    mask = (times >= t_lo) & (times <= t_hi)
    if np.count_nonzero(mask) < 10:
        raise InsufficientPointsError(
            f"window {window} holds {np.count_nonzero(mask)} points; need >= 10")
    t_w = times[mask]
    if series.kind == QUANTUM_AMPLITUDE:
        y = np.abs(series.values[mask]) ** 2
    else:
        y = series.values[mask].real
    if np.any(y <= 0):
        raise InsufficientPointsError("tail values must be positive inside the window")
    coeffs = np.polyfit(np.log(t_w), np.log(y), 1)
    fitted = np.polyval(coeffs, np.log(t_w))
    residual = float(np.sqrt(np.mean((np.log(y) - fitted) ** 2)))
    return TailFit(coefficient=float(np.exp(coeffs[1])), exponent=float(coeffs[0]),
                   window=(t_lo, t_hi), residual=residual)


def vanishing_time_estimate(curve: SurvivalCurve, tail: TailFit) -> VanishingTimeEstimate:
    """Time at which the survival curve reaches zero.

    If the curve crosses zero on its grid, the crossing is interpolated
    linearly. Otherwise the |phi|^2 ~ c/t tail model is extrapolated:
    S(T_max) - (k/hbar) c ln(T*/T_max) = 0. The model applies only when the
    fitted tail exponent is within 0.1 of -1; anything else (including
    k = 0) raises NoVanishingError.
    """
    q = curve.params
    if not isinstance(q, QuantumParams):
        raise NoVanishingError("vanishing-time estimate needs quantum curve parameters")
    if q.k == 0:
        raise NoVanishingError("k = 0 absorbs nothing; no vanishing time")
    values = curve.values
    if np.any(values <= 0):
        i = int(np.argmax(values <= 0))
        if i == 0:
            return VanishingTimeEstimate(time=float(curve.grid.times[0]), extrapolated=False)
        t_prev, t_cur = curve.grid.times[i - 1], curve.grid.times[i]
        s_prev, s_cur = values[i - 1], values[i]
        cross = t_prev + s_prev * (t_cur - t_prev) / (s_prev - s_cur)
        return VanishingTimeEstimate(time=float(cross), extrapolated=False)
    if abs(tail.exponent + 1.0) > 0.1:
        raise NoVanishingError(
            f"tail exponent {tail.exponent:.3f} is not within 0.1 of -1; "
            "the logarithmic-absorption model does not apply")
    t_max = float(curve.grid.times[-1])
    s_end = float(values[-1])
    exponent = s_end * q.hbar / (q.k * tail.coefficient)
    if exponent > 700.0:
        raise NoVanishingError(
            "extrapolated vanishing time overflows; absorption is too slow")
    return VanishingTimeEstimate(time=t_max * float(np.exp(exponent)), extrapolated=True)
