"""
Spherical Functions — φ_λ, Ξ, Kostant Polynomials and the Plancherel Density

Provides the scalar special functions of a rank-one space:
  1. SpectralParam                 — complex spectral parameter λ = re + i·im
  2. kostant_polynomial()          — Q_δ(λ) from two Pochhammer symbols
  3. spherical_function()          — φ_λ(t): closed form on h3, series + radial ODE elsewhere
  4. xi() / log_xi()               — ground spherical function Ξ = φ_0
  5. c_function() / plancherel_density() — Harish-Chandra c-function and μ = |c|^{-2}
  6. harish_chandra_series()       — Φ_λ, the t → ∞ expansion used for contour quadrature
  7. fit_plancherel_asymptotics()  — sandwich constants against λ²(1+λ)^{mγ+m2γ−2}

Generic spaces are evaluated as Jacobi functions with parameters
(jacobi_a, jacobi_b): the hypergeometric series in tanh² t near the origin,
continued by DOP853 integration of the radial eigen-equation.
"""

import math
import logging
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.integrate import solve_ivp

from common.errors import SpecialFunctionError
from common.settings import section
from space.symmetric_space import SpaceParams, KTypeIndex
from specfun.gamma_functions import log_gamma, pochhammer

logger = logging.getLogger(__name__)

_LOG_TWO = math.log(2.0)
_TAYLOR_CUTOFF = 1e-4


# -------------------------------------------------------------------
# 1. Spectral parameter
# -------------------------------------------------------------------

@dataclass(frozen=True)
class SpectralParam:
    re: float
    im: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.re) and math.isfinite(self.im)):
            raise ValueError(f"SpectralParam components must be finite, got ({self.re}, {self.im})")

    @property
    def value(self) -> complex:
        return complex(self.re, self.im)

    def in_strip(self, r: float) -> bool:
        return abs(self.im) <= r


def as_complex(lam):
    """Coerce SpectralParam, numbers or arrays to complex numpy values."""
    if isinstance(lam, SpectralParam):
        return np.asarray(lam.value)
    return np.asarray(lam, dtype=complex)


def _scalar_or_array(values):
    return values.item() if values.ndim == 0 else values


# -------------------------------------------------------------------
# 2. Kostant polynomial
# -------------------------------------------------------------------

def kostant_polynomial(space: SpaceParams, delta: KTypeIndex, lam):
    """Q_δ(λ) = (½(a+b+1+iλ))_{(p+q)/2} · (½(a−b+1+iλ))_{(p−q)/2}."""
    a, b = space.jacobi_a, space.jacobi_b
    ilam = 1j * as_complex(lam)
    first = pochhammer(0.5 * (a + b + 1 + ilam), (delta.p + delta.q) // 2)
    second = pochhammer(0.5 * (a - b + 1 + ilam), (delta.p - delta.q) // 2)
    return _scalar_or_array(np.asarray(first * second))


def kostant_coefficients(space: SpaceParams, delta: KTypeIndex) -> np.ndarray:
    """Monomial coefficients of Q_δ in λ, lowest degree first."""
    a, b = space.jacobi_a, space.jacobi_b
    # each factor c + k + iλ/2 equals (i/2)(λ − 2i(c + k))
    roots = [2j * (0.5 * (a + b + 1) + k) for k in range((delta.p + delta.q) // 2)]
    roots += [2j * (0.5 * (a - b + 1) + k) for k in range((delta.p - delta.q) // 2)]
    return (0.5j) ** delta.p * npoly.polyfromroots(roots) if roots else np.array([1.0 + 0j])


# -------------------------------------------------------------------
# 3. Hypergeometric series
# -------------------------------------------------------------------

def hyp2f1_series(a, b, c, z, max_terms: int = None):
    """
    Gauss series ₂F₁(a, b; c; z) for |z| < 1, vectorized over broadcast arguments.

    Complex parameters are allowed (scipy.special.hyp2f1 only takes real a, b, c).
    """
    if max_terms is None:
        max_terms = section("spherical_functions")["series_max_terms"]
    a, b, c, z = np.broadcast_arrays(*(np.asarray(v, dtype=complex) for v in (a, b, c, z)))
    term = np.ones(a.shape, dtype=complex)
    total = term.copy()
    peak = np.ones(a.shape)
    quiet = 0
    for k in range(max_terms):
        term = term * (a + k) * (b + k) / ((c + k) * (k + 1)) * z
        total = total + term
        peak = np.maximum(peak, np.abs(total))
        if np.all(np.abs(term) <= 1e-17 * peak):
            quiet += 1
            if quiet >= 2 and k >= 3:
                return total
        else:
            quiet = 0
    raise SpecialFunctionError(f"₂F₁ series did not converge in {max_terms} terms (max |z| = {np.max(np.abs(z)):.3f})")


def jacobi_series(space: SpaceParams, lam, t, derivative: bool = False):
    """
    φ_λ(t) = (cosh t)^{iλ−ρ} ₂F₁(½(ρ−iλ), ½(a−b+1−iλ); a+1; tanh² t).

    Convergent for every t, accurate while |λ|·t stays moderate. With
    derivative=True returns (φ, dφ/dt).
    """
    lam = as_complex(lam)
    t = np.asarray(t, dtype=float)
    rho, a, b = space.rho, space.jacobi_a, space.jacobi_b
    ilam = 1j * lam
    pa = 0.5 * (rho - ilam)
    pb = 0.5 * (a - b + 1 - ilam)
    pc = a + 1
    tanh_t = np.tanh(t)
    z = tanh_t ** 2
    exponent = ilam - rho
    prefactor = np.exp(exponent * np.log(np.cosh(t)))
    phi = prefactor * hyp2f1_series(pa, pb, pc, z)
    if not derivative:
        return phi
    dF = (pa * pb / pc) * hyp2f1_series(pa + 1, pb + 1, pc + 1, z)
    dphi = exponent * tanh_t * phi + prefactor * dF * 2 * tanh_t / np.cosh(t) ** 2
    return phi, dphi


def harish_chandra_series(space: SpaceParams, lam, t):
    """
    Φ_λ(t) = (2 cosh t)^{iλ−ρ} ₂F₁(½(ρ−iλ), ½(a−b+1−iλ); 1−iλ; cosh^{−2} t).

    Behaves like e^{(iλ−ρ)t} as t → ∞; intended for t ≥ 1.
    """
    lam = as_complex(lam)
    t = np.asarray(t, dtype=float)
    rho, a, b = space.rho, space.jacobi_a, space.jacobi_b
    ilam = 1j * lam
    log_two_cosh = t + np.log1p(np.exp(-2 * t))
    z = np.exp(-2 * log_two_cosh) * 4
    series = hyp2f1_series(0.5 * (rho - ilam), 0.5 * (a - b + 1 - ilam), 1 - ilam, z)
    return np.exp((ilam - rho) * log_two_cosh) * series


# -------------------------------------------------------------------
# 4. Spherical function
# -------------------------------------------------------------------

def spherical_function(space: SpaceParams, lam, t):
    """
    Elementary spherical function φ_λ(t).

    Parameters
    ----------
    space : SpaceParams
    lam : SpectralParam, complex or float
        A single spectral parameter.
    t : float or array of nonnegative radii

    Returns
    -------
    complex, or complex array shaped like t
    """
    lam_value = as_complex(lam)
    if lam_value.ndim != 0:
        raise ValueError("spherical_function takes a single λ; use spherical_function_matrix for grids")
    t_arr = np.asarray(t, dtype=float)
    row = spherical_function_matrix(space, lam_value.reshape(1), t_arr.reshape(-1))[0]
    row = np.asarray(row, dtype=complex).reshape(t_arr.shape)
    return _scalar_or_array(row)


def spherical_function_matrix(space: SpaceParams, lam, t) -> np.ndarray:
    """
    φ_λ(t) on the outer grid lam × t, shape (len(lam), len(t)).

    Real output when every λ is real.
    """
    lam = np.atleast_1d(as_complex(lam))
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(t < 0):
        raise ValueError("spherical functions are evaluated at t >= 0")
    real_input = bool(np.all(lam.imag == 0))

    if space.is_h3:
        values = _h3_phi(lam[:, None], t[None, :])
    else:
        values = _generic_phi(space, _weyl_canonical(lam), t)
    return values.real if real_input else values


def _h3_phi(lam, t):
    """sin(λt) / (λ sinh t) with the Taylor branch near λt = 0."""
    x = lam * t
    small = np.abs(x) < _TAYLOR_CUTOFF
    safe_x = np.where(small, 1.0, x)
    sinc = np.where(small, 1 - x ** 2 / 6 + x ** 4 / 120, np.sin(safe_x) / safe_x)
    return sinc * _t_over_sinh(t)


def _t_over_sinh(t):
    t = np.asarray(t, dtype=float)
    safe = np.where(t == 0, 1.0, t)
    with np.errstate(over="ignore"):
        ratio = 2 * safe * np.exp(-safe) / (-np.expm1(-2 * safe))
    return np.where(t == 0, 1.0, ratio)


def _weyl_canonical(lam):
    """Representative of {λ, −λ} with Re λ > 0, or Re λ = 0 and Im λ ≥ 0."""
    flip = (lam.real < 0) | ((lam.real == 0) & (lam.imag < 0))
    return np.where(flip, -lam, lam)


def _generic_phi(space: SpaceParams, lam, t):
    order = np.argsort(t, kind="stable")
    t_sorted = t[order]
    lam_scale = float(np.max(np.abs(lam))) if lam.size else 0.0
    t_switch = 1.0 if lam_scale <= 2.0 else 2.0 / lam_scale

    out = np.empty((lam.size, t.size), dtype=complex)
    near = t_sorted <= t_switch
    if np.any(near):
        out[:, near] = jacobi_series(space, lam[:, None], t_sorted[None, near])
    if np.any(~near):
        out[:, ~near] = _integrate_radial_ode(space, lam, t_switch, t_sorted[~near])

    result = np.empty_like(out)
    result[:, order] = out
    return result


def _integrate_radial_ode(space: SpaceParams, lam, t_start: float, t_eval, rescaled: bool = False):
    """
    Continue φ_λ from t_start with the radial eigen-equation.

    Integrates ψ = e^{ρt} φ, which satisfies
    ψ'' + (A − 2ρ) ψ' + (λ² + 2ρ² − ρA) ψ = 0 with A = mγ coth t + 2 m2γ coth 2t,
    so that solutions stay O(1) instead of decaying like e^{−ρt}. With
    rescaled=True the ψ values are returned instead of φ.
    """
    cfg = section("spherical_functions")
    rho = space.rho
    m1, m2 = space.m_gamma, space.m_2gamma
    unique_t, inverse = np.unique(t_eval, return_inverse=True)

    phi0, dphi0 = jacobi_series(space, lam, t_start, derivative=True)
    scale = math.exp(rho * t_start)
    real_problem = bool(np.all(lam.imag == 0))
    y0 = np.concatenate([scale * phi0, scale * (dphi0 + rho * phi0)])
    if real_problem:
        y0 = y0.real
    lam_sq = (lam ** 2).real if real_problem else lam ** 2
    n = lam.size

    def rhs(t, y):
        psi, dpsi = y[:n], y[n:]
        a_t = m1 / math.tanh(t) + (2 * m2 / math.tanh(2 * t) if m2 else 0.0)
        return np.concatenate([dpsi, -(a_t - 2 * rho) * dpsi - (lam_sq + 2 * rho ** 2 - rho * a_t) * psi])

    sol = solve_ivp(
        rhs,
        (t_start, float(unique_t[-1])),
        y0,
        method="DOP853",
        t_eval=unique_t,
        rtol=cfg["ode_rtol"],
        atol=cfg["ode_atol"],
    )
    if not sol.success:
        raise SpecialFunctionError(f"Radial ODE failed on {space.name}: {sol.message}")

    psi = sol.y[:n]
    if not rescaled:
        psi = psi * np.exp(-rho * unique_t)[None, :]
    return psi[:, inverse]


# -------------------------------------------------------------------
# 5. Ground spherical function
# -------------------------------------------------------------------

def xi(space: SpaceParams, t):
    """Ξ(t) = φ_0(t), real and positive."""
    return _scalar_or_array(np.exp(np.asarray(log_xi(space, t))))


def log_xi(space: SpaceParams, t):
    """log Ξ(t); finite for every t ≥ 0 (no underflow at large radii)."""
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    if space.is_h3:
        with np.errstate(divide="ignore"):
            values = np.log(_t_over_sinh(t_arr))
        # t/sinh t underflows past t ≈ 745; use the asymptotic form there
        far = t_arr > 700
        values = np.where(far, np.log(np.where(far, t_arr, 1.0)) + _LOG_TWO - t_arr, values)
    else:
        values = np.empty_like(t_arr)
        near = t_arr <= 1.0
        if np.any(near):
            values[near] = np.log(jacobi_series(space, 0.0, t_arr[near]).real)
        if np.any(~near):
            far_t = t_arr[~near]
            order = np.argsort(far_t, kind="stable")
            psi = _integrate_radial_ode(
                space, np.zeros(1, dtype=complex), 1.0, far_t[order], rescaled=True
            )[0].real
            log_vals = np.empty_like(far_t)
            log_vals[order] = np.log(psi) - space.rho * far_t[order]
            values[~near] = log_vals
    return _scalar_or_array(values.reshape(np.shape(t)))


# -------------------------------------------------------------------
# 6. c-function and Plancherel density
# -------------------------------------------------------------------

def log_c_function(space: SpaceParams, lam):
    """
    log c(λ) with c(λ) = 2^{ρ−iλ} Γ(a+1) Γ(iλ) / (Γ(½(iλ+ρ)) Γ(½(iλ+a−b+1))).

    Normalized so that c(−iρ) = 1.
    """
    rho, a, b = space.rho, space.jacobi_a, space.jacobi_b
    ilam = 1j * as_complex(lam)
    return (
        (rho - ilam) * _LOG_TWO
        + math.lgamma(a + 1)
        + log_gamma(ilam)
        - log_gamma(0.5 * (ilam + rho))
        - log_gamma(0.5 * (ilam + a - b + 1))
    )


def c_function(space: SpaceParams, lam):
    return _scalar_or_array(np.exp(np.asarray(log_c_function(space, lam))))


def plancherel_density(space: SpaceParams, lam):
    """μ(λ): λ² on h3, |c(λ)|^{-2} elsewhere; even in λ, zero at λ = 0."""
    lam_arr = np.abs(np.asarray(lam, dtype=float))
    if space.is_h3:
        return _scalar_or_array(lam_arr ** 2)
    return _scalar_or_array(np.exp(np.asarray(log_plancherel_density(space, lam_arr))))


def log_plancherel_density(space: SpaceParams, lam):
    """log μ(λ); −inf at λ = 0."""
    lam_arr = np.atleast_1d(np.abs(np.asarray(lam, dtype=float)))
    values = np.full(lam_arr.shape, -np.inf)
    positive = lam_arr > 0
    if space.is_h3:
        values[positive] = 2 * np.log(lam_arr[positive])
    elif np.any(positive):
        values[positive] = -2 * np.real(log_c_function(space, lam_arr[positive]))
    return _scalar_or_array(values.reshape(np.shape(lam)))


def fit_plancherel_asymptotics(space: SpaceParams, lam_grid=None) -> dict:
    """
    Fit μ(λ) against λ²(1+λ)^{mγ+m2γ−2} over a large-λ sweep.

    Returns
    -------
    dict with keys c1, c2, spread (= c2/c1) and growth_exponent, the
    least-squares slope of log μ against log λ.
    """
    if lam_grid is None:
        lam_grid = np.geomspace(10.0, 1000.0, 200)
    lam_grid = np.asarray(lam_grid, dtype=float)
    mu = np.asarray(plancherel_density(space, lam_grid))
    model = lam_grid ** 2 * (1 + lam_grid) ** (space.m_gamma + space.m_2gamma - 2)
    ratio = mu / model
    slope = np.polyfit(np.log(lam_grid), np.log(mu), 1)[0]

    c1, c2 = float(ratio.min()), float(ratio.max())
    logger.info(f"Plancherel fit on {space.name}: c1={c1:.6g}, c2={c2:.6g}, exponent={slope:.4f}")
    return {
        "c1": c1,
        "c2": c2,
        "spread": c2 / c1,
        "growth_exponent": float(slope),
    }
