"""Scaled complementary error function, Faddeeva function, and principal
complex square root.

These are the numerical backbone of every closed form in the package: the
boundary-density formulas always appear in the stabilized combination
e^{x^2} erfc(x), so the plain erfc route would overflow long before the
interesting regime. Backed by scipy.special (erfcx, wofz); the accuracy
contracts (1e-12 real, 1e-10 complex) are checked in the test suite
against independent series oracles.

Overflow policy: flag-and-propagate. Where an exp factor overflows the
function emits SpecialFunctionOverflow (a RuntimeWarning) and returns inf;
the stabilized call sites never trigger it.
"""
from __future__ import annotations

import warnings

import numpy as np
from scipy import special


class SpecialFunctionOverflow(RuntimeWarning):
    """An exponential factor overflowed; inf was propagated."""


def erfcx(x):
    """Scaled complementary error function e^{x^2} erfc(x) for real x.

    Decreasing and positive on x >= 0; grows like 2 e^{x^2} for x -> -inf
    and overflows (with a warning) near x = -26.6.
    """
    x = np.asarray(x, dtype=float)
    out = special.erfcx(x)
    if not np.all(np.isfinite(out)):
        warnings.warn("erfcx overflowed for very negative argument",
                      SpecialFunctionOverflow, stacklevel=2)
    return out if out.ndim else float(out)


def faddeeva_w(z):
    """Faddeeva function w(z) = e^{-z^2} erfc(-iz).

    Bounded on the closed upper half-plane. For Im z < 0 the reflection
    w(-z) = 2 e^{-z^2} - w(z) applies, whose exp factor can overflow; that
    case warns and propagates inf.
    """
    z = np.asarray(z, dtype=complex)
    upper = z.imag >= 0
    out = np.empty_like(z)
    if np.any(upper):
        out[upper] = special.wofz(z[upper])
    if not np.all(upper):
        zl = z[~upper]
        with np.errstate(over="ignore", invalid="ignore"):
            refl = 2.0 * np.exp(-zl * zl) - special.wofz(-zl)
        if not np.all(np.isfinite(refl)):
            warnings.warn("faddeeva_w reflection term overflowed",
                          SpecialFunctionOverflow, stacklevel=2)
        out[~upper] = refl
    return out if out.ndim else complex(out)


def erfc_complex(z):
    """Complementary error function for complex argument: e^{-z^2} w(iz)."""
    z = np.asarray(z, dtype=complex)
    with np.errstate(over="ignore", invalid="ignore"):
        out = np.exp(-z * z) * faddeeva_w(1j * z)
    if not np.all(np.isfinite(out)):
        warnings.warn("erfc_complex overflowed", SpecialFunctionOverflow,
                      stacklevel=2)
    return out if out.ndim else complex(out)


def sqrt_principal(z):
    """Principal branch square root: Re >= 0, cut on the negative real axis.

    Negative reals map to the upper edge of the cut (arg in (-pi, pi]), so
    sqrt_principal(-1) = +1j even if the input carries a -0.0 imaginary part.
    """
    z = np.asarray(z, dtype=complex)
    # pull exact negative reals onto the upper side of the cut
    z = np.where(z.imag == 0.0, z.real + 0.0j, z)
    out = np.sqrt(z)
    return out if out.ndim else complex(out)
