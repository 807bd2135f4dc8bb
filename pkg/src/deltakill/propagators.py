"""Free Green's functions and the forcing / kernel pieces of the boundary
integral equations.

Both the diffusion and the quantum problem reduce to a second-kind Volterra
equation for the boundary value with the same Abel kernel lambda/sqrt(t-s);
only lambda and the forcing differ. All complex roots here are principal,
which is what produces the (1-i)/sqrt(2) style prefactors of the quantum
formulas.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .model import DiffusionParams, QuantumParams, map_quantum_to_diffusion
from .specfun import sqrt_principal


@dataclass(frozen=True)
class KernelSpec:
    """Abel kernel K(t - s) = coefficient / sqrt(t - s)."""

    coefficient: complex
    exponent: float = -0.5


def heat_kernel(x: float, y: float, tau) -> complex:
    """Free heat kernel exp(-(x-y)^2 / 4 tau) / (2 sqrt(pi tau)).

    tau may be complex with Re tau > 0, or purely imaginary and nonzero
    (the Schrodinger case).
    """
    tau = complex(tau)
    if tau == 0 or tau.real < 0:
        raise DomainError(f"heat_kernel needs Re tau > 0 or imaginary tau != 0, got {tau}")
    return complex(np.exp(-((x - y) ** 2) / (4 * tau)) / (2 * sqrt_principal(np.pi * tau)))


def schrodinger_propagator(x: float, y: float, t: float, q: QuantumParams) -> complex:
    """Free-particle propagator sqrt(m / 2 pi hbar i t) exp(-m (x-y)^2 / 2 hbar i t)."""
    if t <= 0:
        raise DomainError(f"propagator needs t > 0, got {t}")
    eff = map_quantum_to_diffusion(q)
    return heat_kernel(x, y, eff.D_c * t)


def forcing_delta(t: float, q: QuantumParams) -> complex:
    """Driving term for a point source released at x0: G(0, x0, t).

    Diverges like t^{-1/2} (with an e^{i m x0^2 / 2 hbar t} phase) as t -> 0.
    """
    return schrodinger_propagator(0.0, q.x0, t, q)


def forcing_gaussian(t, q: QuantumParams):
    """Driving term for a Gaussian source of width a centered at x0.

    Closed form of the free evolution integral against the width-a Gaussian
    profile (normalized as a probability density):

        (1-i) sqrt(m) / (2 sqrt(pi) sqrt(-i m a^2 + hbar t))
            * exp( (i/2) x0^2 m / (-i m a^2 + hbar t) )

    Continuous at t = 0 (value psi(0, 0)); accepts t >= 0.
    """
    if q.a <= 0:
        raise DomainError("forcing_gaussian needs a > 0; use forcing_delta for a = 0")
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise DomainError("forcing_gaussian needs t >= 0")
    den = -1j * q.mass * q.a ** 2 + q.hbar * t
    out = ((1 - 1j) * np.sqrt(q.mass)
           / (2 * sqrt_principal(den) * np.sqrt(np.pi))
           * np.exp(0.5j * q.x0 ** 2 * q.mass / den))
    return out if out.ndim else complex(out)


def kernel_quantum(q: QuantumParams) -> KernelSpec:
    """Memory kernel of the quantum boundary equation, K(t) = kappa_c G(0, 0, t).

    kappa_c = k/(2 hbar) is the absorption coefficient of the first-order
    equation psi_t = D_c psi_xx - kappa_c delta(x) psi, so

        lambda = kappa_c / (2 sqrt(pi D_c))
               = (k / 2 hbar) sqrt(m / 2 pi hbar) e^{-i pi/4}.

    For unit parameters lambda = 0.1410474 (1 - i); linear in k.
    """
    eff = map_quantum_to_diffusion(q)
    lam = eff.kappa_c / (2 * sqrt_principal(np.pi * eff.D_c))
    return KernelSpec(coefficient=complex(lam))


def kernel_diffusion(d: DiffusionParams) -> KernelSpec:
    """Memory kernel of the diffusion boundary equation in tau = D t time.

    lambda = kappa / (2 D sqrt(pi)), real and positive.
    """
    return KernelSpec(coefficient=d.kappa / (2 * d.D * np.sqrt(np.pi)))
