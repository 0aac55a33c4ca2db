"""
Gamma Functions — Complex log-gamma and Pochhammer Symbols

Provides:
  1. log_gamma()   — Stirling series log Γ(z), shifted up by recurrence near the
                     origin, with reflection for Re z < 0.5
  2. pochhammer()  — rising factorial (z)_m as a direct product
"""

import logging

import numpy as np
from numpy.polynomial import polynomial as P

from common.errors import PoleError

logger = logging.getLogger(__name__)

# B_{2k} / (2k(2k−1)), k = 1..8, as a polynomial in 1/z²
_STIRLING_COEFFS = (
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
)
_STIRLING_MIN_MODULUS = 12.0
_HALF_LOG_TWO_PI = 0.5 * np.log(2 * np.pi)
_LOG_PI = np.log(np.pi)


# -------------------------------------------------------------------
# 1. log-gamma
# -------------------------------------------------------------------

def log_gamma(z):
    """
    Principal-branch log Γ(z) for complex z (scalar or array).

    Right of Re z = 0.5 the Stirling series is summed at z + n, n chosen so
    that |z + n| ≥ 12, and the n logarithms are subtracted again. Far from
    the real axis on the left the series is used directly (|arg z| stays
    below 117°). Elsewhere on the left the reflection formula
    Γ(z)Γ(1−z) = π / sin(πz) is used, with a log-sine that stays finite for
    large |Im z|.

    Raises
    ------
    PoleError
        If any z is a nonpositive integer.
    """
    z_arr = np.asarray(z, dtype=complex)
    _check_poles(z_arr)

    result = np.empty_like(z_arr)
    right = z_arr.real >= 0.5
    far = ~right & (np.abs(z_arr.imag) >= _STIRLING_MIN_MODULUS + 2 * np.abs(z_arr.real))
    near = ~(right | far)
    if np.any(right):
        result[right] = _shifted_stirling(z_arr[right])
    if np.any(far):
        result[far] = _stirling(z_arr[far])
    if np.any(near):
        zl = z_arr[near]
        result[near] = _LOG_PI - _log_sin_pi(zl) - _shifted_stirling(1 - zl)

    if result.ndim == 0:
        return complex(result)
    return result


def _stirling(w):
    rz = 1.0 / w
    series = rz * P.polyval(rz * rz, _STIRLING_COEFFS)
    return (w - 0.5) * np.log(w) - w + _HALF_LOG_TWO_PI + series


def _shifted_stirling(z):
    """log Γ(z) for Re z ≥ 0.5 via log Γ(z + n) − Σ_{k<n} log(z + k)."""
    shift = np.where(np.abs(z) >= _STIRLING_MIN_MODULUS, 0.0, np.ceil(_STIRLING_MIN_MODULUS - z.real))
    correction = np.zeros_like(z)
    # each z + k lies in the right half-plane, so the principal logs add up without branch jumps
    for k in range(int(shift.max(initial=0.0))):
        active = k < shift
        correction[active] += np.log(z[active] + k)
    return _stirling(z + shift) - correction


def _log_sin_pi(z):
    """log sin(πz), computed from the dominant exponential."""
    # For Im z >= 0: sin(πz) = (i/2) e^{−iπz} (1 − e^{2iπz}); mirror below the axis.
    upper = z.imag >= 0
    w = np.where(upper, z, np.conj(z))
    value = np.log(0.5j) - 1j * np.pi * w + np.log1p(-np.exp(2j * np.pi * w))
    return np.where(upper, value, np.conj(value))


def _check_poles(z_arr):
    on_axis = (z_arr.imag == 0) & (z_arr.real <= 0) & (z_arr.real == np.round(z_arr.real))
    if np.any(on_axis):
        raise PoleError(z_arr[on_axis].flat[0].real)


# -------------------------------------------------------------------
# 2. Pochhammer symbol
# -------------------------------------------------------------------

def pochhammer(z, m: int):
    """(z)_m = z(z+1)…(z+m−1); the empty product is 1."""
    if isinstance(m, bool) or int(m) != m or m < 0:
        raise ValueError(f"pochhammer length must be a nonnegative integer, got {m}")
    z_arr = np.asarray(z, dtype=complex)
    product = np.ones_like(z_arr)
    for k in range(int(m)):
        product = product * (z_arr + k)
    if product.ndim == 0:
        return complex(product)
    return product
