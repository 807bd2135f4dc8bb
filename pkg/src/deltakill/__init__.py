"""Boundary density/amplitude and survival probability for diffusion and
quantum dynamics with a killing delta potential at the origin.

Two independent routes compute the boundary value driving the absorption:
exact closed forms (stabilized error-function representations) and a
product-integration Volterra solver; a Crank-Nicolson grid solver provides
an end-to-end PDE cross-check. Survival curves, tail fits, and asymptotics
build on top. See README.md for the physics summary and the acceptance
suite.
"""

__version__ = "0.1.0"

from .errors import (BoundaryLeakageError, DegenerateFitError, DomainError,
                     GridTooCoarseError, InsufficientPointsError,
                     InvalidParameterError, NonConvergenceError,
                     NonphysicalNegativityError, NormalizationError,
                     NoVanishingError, OutOfRegimeError, SingularStepError,
                     StepResolutionError, UnknownPresetError)
from .model import (AmplitudeSeries, DIFFUSION_DENSITY, DiffusionParams,
                    EffectiveComplexParams, QUANTUM_AMPLITUDE, QuantumParams,
                    SurvivalCurve, TimeGrid, make_time_grid,
                    map_quantum_to_diffusion)
from .specfun import (SpecialFunctionOverflow, erfc_complex, erfcx,
                      faddeeva_w, sqrt_principal)
from .propagators import (KernelSpec, forcing_delta, forcing_gaussian,
                          heat_kernel, kernel_diffusion, kernel_quantum,
                          schrodinger_propagator)
from .volterra import (History, VolterraProblem, delta_splice_history,
                       estimate_convergence_order, quadrature_residual,
                       solve_abel_volterra)
from .closedform import (AsymptoticCoefficients, asymptotic_boundary_density,
                         asymptotic_phi_gaussian, boundary_amplitude_quantum,
                         boundary_amplitude_quantum_gaussian,
                         boundary_density_diffusion,
                         boundary_density_diffusion_direct,
                         diffusion_tail_coefficients,
                         gaussian_amplitude_series, laplace_boundary_density,
                         quantum_amplitude_tail, stationary_scattering)
from .survival import (TailFit, VanishingTimeEstimate, fit_tail,
                       gaussian_norm_factor, survival_diffusion,
                       survival_quantum, vanishing_time_estimate)
from .oracle import (EvolutionResult, GridState, SpatialGrid,
                     evolve_diffusion, evolve_schrodinger)
