"""
Spherical Transform — Forward/Inverse Spherical, Euclidean Fourier and Abel Transforms

Provides five transform functions used across the toolkit:
  1. spherical_transform()          — f̂(λ) = ∫ f(t) φ_λ(t) Δ(t) dt, tabulated on [0, Λ]
  2. inverse_spherical_transform()  — f(t) = C₀ ∫ f̂(λ) φ_λ(t) μ(λ) dλ
  3. euclidean_fourier() / euclidean_inverse_fourier() — ℱg(λ) = ∫ g(t) e^{-iλt} dt
  4. abel_transform()               — 𝒜f = ℱ⁻¹(f̂), an even function on ℝ
  5. euclidean_convolution()        — (g1 ∗ g2)(x) on an output grid

The inverse uses two rules. Radii below saddle_min_radius, and every
tabulated spectrum, go through the real λ axis. Gaussian-type spectra at
larger radii are integrated along the steepest-descent line
Im λ = log(2 cosh r)/(2α), where φ_λ μ is replaced by Φ_λ / c(−λ) and the
Gaussian factor becomes real; this keeps full relative accuracy far into
the e^{-r²/4α} tail.
"""

import math
import logging

import numpy as np
from numpy.polynomial.hermite import hermval

from common.errors import TruncationError, ProfileError
from common.settings import section
from space.symmetric_space import SpaceParams, volume_density, log_volume_density
from specfun.spherical_functions import (
    spherical_function_matrix,
    plancherel_density,
    log_plancherel_density,
    log_xi,
    log_c_function,
    hyp2f1_series,
)
from transforms.calibration import calibrate
from transforms.profiles import (
    RadialProfile,
    SpectralProfile,
    LineProfile,
    radial_values,
    radial_log_abs,
    spectral_values,
    spectral_log_abs,
    even_polynomial,
)
from transforms.quadrature import QuadratureScheme, resolve_quadrature, gauss_hermite_rule

logger = logging.getLogger(__name__)

# Integrand contributions below e^{-TRIM_LOG_RANGE} of the peak are dropped
TRIM_LOG_RANGE = 80.0


# -------------------------------------------------------------------
# Grids
# -------------------------------------------------------------------

def spectral_cutoff(quad: QuadratureScheme, time_scale) -> float:
    """Integer λ cutoff so panels stay aligned."""
    return float(math.ceil(quad.spectral_cutoff(time_scale)))


def spectral_grid(quad: QuadratureScheme, cutoff: float) -> np.ndarray:
    """[0] + Gauss–Legendre nodes of [0, cutoff] + [cutoff]; the inverse reads these knots exactly."""
    nodes, _ = quad.nodes(0.0, cutoff)
    return np.concatenate([[0.0], nodes, [cutoff]])


def radial_grid(quad: QuadratureScheme, end: float = None) -> np.ndarray:
    """Uniform output grid with step 1/panels_per_unit on [0, end]."""
    end = quad.t_max if end is None else end
    return np.linspace(0.0, end, int(round(end * quad.panels_per_unit)) + 1)


def _trim(log_bound: np.ndarray):
    """Number of leading nodes to keep: through the last one within TRIM_LOG_RANGE of the peak."""
    if log_bound.size == 0 or not np.any(np.isfinite(log_bound)):
        return 0, -np.inf
    peak = float(np.max(log_bound))
    significant = np.nonzero(log_bound > peak - TRIM_LOG_RANGE)[0]
    return int(significant[-1]) + 1, peak


def _check_tail(label: str, tail_log: float, peak_log: float, quad: QuadratureScheme):
    tail = math.exp(tail_log) if tail_log > -745 else 0.0
    threshold = quad.abs_tol + quad.rel_tol * math.exp(min(peak_log, 700.0))
    if tail > threshold:
        raise TruncationError(f"{label}: integrand has not decayed at the truncation radius", tail)


# -------------------------------------------------------------------
# 1. Forward spherical transform
# -------------------------------------------------------------------

def _radial_quadrature(space: SpaceParams, f: RadialProfile, quad: QuadratureScheme, c_x: float):
    """Nodes and weights·f·Δ for the forward transform, trimmed to the support of |f|ΔΞ."""
    end = quad.t_max
    if f.kind == "tabulated":
        end = min(end, float(f.grid[-1]))
    t, w = quad.nodes(0.0, end)
    log_bound = radial_log_abs(space, f, t, quad) + log_volume_density(space, t, c_x) + log_xi(space, t)
    keep, peak = _trim(log_bound)
    if keep == 0:
        return t[:0], w[:0]

    if keep == t.size and f.decay_class != "compact":
        edge = np.array([end])
        tail_log = float(
            radial_log_abs(space, f, edge, quad)[0]
            + log_volume_density(space, edge, c_x)[0]
            + log_xi(space, edge)[0]
        )
        _check_tail(f"spherical_transform of {f.describe()} on {space.name}", tail_log, peak, quad)

    t, w = t[:keep], w[:keep]
    weights = w * radial_values(space, f, t, quad) * volume_density(space, t, c_x)
    return t, weights


def spherical_transform_values(space: SpaceParams, f: RadialProfile, lam, quad=None, c_x: float = None):
    """f̂ at arbitrary real λ (array)."""
    quad = resolve_quadrature(quad)
    if c_x is None:
        c_x = calibrate(space, quad).c_x
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    if f.kind == "zero":
        return np.zeros(lam.shape)
    t, weights = _radial_quadrature(space, f, quad, c_x)
    if t.size == 0:
        return np.zeros(lam.shape)
    phi = spherical_function_matrix(space, lam, t)
    return phi @ weights


def spherical_transform(space: SpaceParams, f: RadialProfile, quad: QuadratureScheme = None) -> SpectralProfile:
    """
    Spherical transform of a radial profile, tabulated on [0, Λ].

    Λ = max(lambda_max, 8/√τ) for profiles whose transform decays like
    e^{-τλ²}, the configured lambda_max otherwise.

    Raises
    ------
    TruncationError
        If |f|ΔΞ has not decayed by t_max (or the end of a tabulated grid).
    """
    quad = resolve_quadrature(quad)
    cutoff = spectral_cutoff(quad, f.spectral_time_scale)
    lam = spectral_grid(quad, cutoff)
    values = spherical_transform_values(space, f, lam, quad)
    logger.debug(f"spherical_transform {f.describe()} on {space.name}: {lam.size} λ points up to {cutoff:g}")
    return SpectralProfile.tabulated(lam, values)


# -------------------------------------------------------------------
# 2. Inverse spherical transform
# -------------------------------------------------------------------

def _real_axis_inverse(space: SpaceParams, fhat: SpectralProfile, r, quad: QuadratureScheme, c0: float):
    if fhat.kind == "tabulated":
        cutoff = float(fhat.grid[-1])
    else:
        cutoff = spectral_cutoff(quad, fhat.time_scale)
    lam, w = quad.nodes(0.0, cutoff)
    log_bound = spectral_log_abs(space, fhat, lam, quad) + log_plancherel_density(space, lam)
    keep, peak = _trim(log_bound)
    if keep == 0:
        return np.zeros(r.shape)
    if keep == lam.size and fhat.kind != "tabulated":
        edge = np.array([cutoff])
        tail_log = float(spectral_log_abs(space, fhat, edge, quad)[0] + log_plancherel_density(space, edge)[0])
        _check_tail(f"inverse_spherical_transform of {fhat.describe()} on {space.name}", tail_log, peak, quad)

    lam, w = lam[:keep], w[:keep]
    weights = w * spectral_values(space, fhat, lam, quad) * plancherel_density(space, lam)
    phi = spherical_function_matrix(space, lam, r)
    return c0 * (weights @ phi)


def _saddle_terms(space: SpaceParams, form, r):
    """
    Log prefactor and Gauss–Hermite sum of the steepest-descent rule.

    f(r) = C₀ e^{κ} ∫_ℝ P(λ²) e^{-αλ²} Φ_λ(r) / c(−λ) dx with λ = x + iy,
    y = L/(2α), L = log(2 cosh r); the exponent collapses to −αx² − L²/(4α) − ρL.
    """
    coeffs, alpha, log_const = form
    order = section("heat")["hermite_nodes"]
    x, w = gauss_hermite_rule(order)
    log_two_cosh = r + np.log1p(np.exp(-2 * r))
    y = log_two_cosh / (2 * alpha)
    lam = x[None, :] / math.sqrt(alpha) + 1j * y[:, None]

    # ₂F₁ part of Φ_λ; the (2 cosh r)^{iλ−ρ} factor is folded into the exponent
    ilam = 1j * lam
    a, b = space.jacobi_a, space.jacobi_b
    sech_sq = np.exp(-2 * log_two_cosh) * 4
    series = hyp2f1_series(0.5 * (space.rho - ilam), 0.5 * (a - b + 1 - ilam), 1 - ilam, sech_sq[:, None])
    inverse_c = np.exp(-log_c_function(space, -lam))
    total = np.sum(w[None, :] * even_polynomial(coeffs, lam) * series * inverse_c, axis=1).real

    log_prefactor = log_const - log_two_cosh ** 2 / (4 * alpha) - space.rho * log_two_cosh - 0.5 * math.log(alpha)
    return log_prefactor, total


def _saddle_inverse(space: SpaceParams, form, r, c0: float):
    log_prefactor, total = _saddle_terms(space, form, r)
    return c0 * np.exp(log_prefactor) * total


def _saddle_log_abs(space: SpaceParams, form, r, c0: float):
    log_prefactor, total = _saddle_terms(space, form, r)
    with np.errstate(divide="ignore"):
        return math.log(c0) + log_prefactor + np.log(np.abs(total))


def _saddle_mask(fhat: SpectralProfile, r, rule: str):
    if rule not in ("auto", "real_axis", "saddle"):
        raise ValueError(f"Unknown inverse rule: {rule}")
    if fhat.kind not in ("heat_spectral", "closed_form"):
        if rule == "saddle":
            raise ProfileError(f"The saddle rule needs a Gaussian-type spectrum, got {fhat.kind}")
        return np.zeros(r.shape, dtype=bool)
    if rule == "saddle":
        return np.ones(r.shape, dtype=bool)
    if rule == "real_axis":
        return np.zeros(r.shape, dtype=bool)
    return r >= section("heat")["saddle_min_radius"]


def inverse_values_with_constant(space: SpaceParams, fhat: SpectralProfile, r, quad: QuadratureScheme, c0: float,
                                 rule: str = "auto"):
    """Inverse transform at radii r with an explicit inversion constant."""
    r = np.atleast_1d(np.asarray(r, dtype=float))
    if np.any(r < 0):
        raise ProfileError("Radii must be nonnegative")
    if fhat.kind == "zero":
        return np.zeros(r.shape)

    saddle = _saddle_mask(fhat, r, rule)
    out = np.zeros(r.shape, dtype=complex if _is_complex_spectrum(fhat) else float)
    if np.any(~saddle):
        out[~saddle] = _real_axis_inverse(space, fhat, r[~saddle], quad, c0)
    if np.any(saddle):
        out[saddle] = _saddle_inverse(space, fhat.gaussian_form(space), r[saddle], c0)
    return out


def inverse_log_abs_with_constant(space: SpaceParams, fhat: SpectralProfile, r, quad: QuadratureScheme, c0: float):
    """log |f(r)| for the inverse, exact in the Gaussian tail where the saddle rule applies."""
    r = np.atleast_1d(np.asarray(r, dtype=float))
    saddle = _saddle_mask(fhat, r, "auto")
    out = np.empty(r.shape)
    with np.errstate(divide="ignore"):
        if np.any(~saddle):
            out[~saddle] = np.log(np.abs(_real_axis_inverse(space, fhat, r[~saddle], quad, c0)))
    if np.any(saddle):
        out[saddle] = _saddle_log_abs(space, fhat.gaussian_form(space), r[saddle], c0)
    return out


def _is_complex_spectrum(fhat: SpectralProfile) -> bool:
    return fhat.kind == "tabulated" and np.iscomplexobj(fhat.values)


def inverse_values(space: SpaceParams, fhat: SpectralProfile, r, quad=None, rule: str = "auto"):
    quad = resolve_quadrature(quad)
    return inverse_values_with_constant(space, fhat, r, quad, calibrate(space, quad).c0, rule)


def inverse_spherical_transform(space: SpaceParams, fhat: SpectralProfile, quad: QuadratureScheme = None,
                                grid=None, rule: str = "auto") -> RadialProfile:
    """
    Inverse spherical transform, tabulated on grid.

    Parameters
    ----------
    grid : array, optional
        Output radii starting at 0; defaults to step 1/panels_per_unit on [0, t_max].
    rule : {"auto", "real_axis", "saddle"}
        Quadrature rule; "auto" picks the saddle line for Gaussian-type spectra at r ≥ 1.
    """
    quad = resolve_quadrature(quad)
    grid = radial_grid(quad) if grid is None else np.asarray(grid, dtype=float)
    values = inverse_values(space, fhat, grid, quad, rule)
    decay = "gaussian" if fhat.kind in ("heat_spectral", "closed_form") else "unknown"
    return RadialProfile.tabulated(grid, values, decay_class=decay)


# -------------------------------------------------------------------
# 3. Euclidean Fourier transform
# -------------------------------------------------------------------

def _line_quadrature(g: LineProfile, quad: QuadratureScheme, min_panels: int = 64):
    a, b = g.support
    if g.is_compact:
        return quad.nodes(a, b, min_panels=min_panels)
    a, b = max(a, -quad.t_max), min(b, quad.t_max)
    edges = np.array([x for x in (a, b) if abs(x) == quad.t_max])
    if edges.size:
        tail = float(np.max(np.abs(g(edges))))
        if tail > quad.abs_tol:
            raise TruncationError(f"Line function {g.label or 'g'} has not decayed at ±{quad.t_max}", tail)
    return quad.nodes(a, b)


def fourier_values(g: LineProfile, lam, quad=None) -> np.ndarray:
    """ℱg(λ) = ∫ g(t) e^{-iλt} dt at the given λ."""
    quad = resolve_quadrature(quad)
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    t, w = _line_quadrature(g, quad)
    weights = w * g(t)
    return np.exp(-1j * np.outer(lam, t)) @ weights


def inverse_fourier_values(G: LineProfile, x, quad=None) -> np.ndarray:
    """ℱ⁻¹G(x) = (2π)⁻¹ ∫ G(λ) e^{iλx} dλ."""
    quad = resolve_quadrature(quad)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    lam, w = _line_quadrature(G, quad)
    weights = w * G(lam)
    return (np.exp(1j * np.outer(x, lam)) @ weights) / (2 * math.pi)


def euclidean_fourier(g: LineProfile, quad: QuadratureScheme = None, grid=None) -> LineProfile:
    """ℱg tabulated on grid (default: step 1/panels_per_unit on [−lambda_max, lambda_max])."""
    quad = resolve_quadrature(quad)
    if grid is None:
        grid = np.linspace(-quad.lambda_max, quad.lambda_max, int(2 * quad.lambda_max * quad.panels_per_unit) + 1)
    return LineProfile.tabulated(grid, fourier_values(g, grid, quad), label=f"F[{g.label}]")


def euclidean_inverse_fourier(G: LineProfile, quad: QuadratureScheme = None, grid=None) -> LineProfile:
    """ℱ⁻¹G tabulated on grid (default: step 1/panels_per_unit on [−t_max, t_max])."""
    quad = resolve_quadrature(quad)
    if grid is None:
        grid = np.linspace(-quad.t_max, quad.t_max, int(2 * quad.t_max * quad.panels_per_unit) + 1)
    return LineProfile.tabulated(grid, inverse_fourier_values(G, grid, quad), label=f"F^-1[{G.label}]")


# -------------------------------------------------------------------
# 4. Abel transform
# -------------------------------------------------------------------

def _gaussian_abel_terms(form, s):
    """
    ℱ⁻¹ of e^{κ} P(λ²) e^{-αλ²} as (log prefactor, Hermite sum) with x = s/(2√α):
    e^{κ} (4πα)^{-1/2} e^{-x²} Σ (−1)^k p_k (4α)^{-k} H_{2k}(x).
    """
    coeffs, alpha, log_const = form
    x = np.abs(s) / (2 * math.sqrt(alpha))
    hermite = np.zeros(2 * len(coeffs) - 1)
    for k, p in enumerate(coeffs):
        hermite[2 * k] = (-1) ** k * p / (4 * alpha) ** k
    log_prefactor = log_const - 0.5 * math.log(4 * math.pi * alpha) - x ** 2
    return log_prefactor, hermval(x, hermite)


def abel_values_from_spectrum(space: SpaceParams, fhat: SpectralProfile, s, quad=None) -> np.ndarray:
    """
    ℱ⁻¹(f̂)(s) = π⁻¹ ∫₀^Λ f̂(λ) cos(λs) dλ; closed form for Gaussian-type spectra.

    Tabulated spectra are integrated on quadrature nodes up to their last
    knot, with values interpolated between knots; only |s| enters, so the
    result is exactly even in s.
    """
    quad = resolve_quadrature(quad)
    s = np.atleast_1d(np.asarray(s, dtype=float))
    if fhat.kind == "zero":
        return np.zeros(s.shape)
    form = fhat.gaussian_form(space)
    if form is not None:
        log_prefactor, total = _gaussian_abel_terms(form, s)
        return np.exp(log_prefactor) * total
    cutoff = float(fhat.grid[-1]) if fhat.kind == "tabulated" else spectral_cutoff(quad, fhat.time_scale)
    lam, w = quad.nodes(0.0, cutoff)
    weights = w * spectral_values(space, fhat, lam, quad)
    return np.real(np.cos(np.outer(np.abs(s), lam)) @ weights) / math.pi


def abel_log_abs_from_spectrum(space: SpaceParams, fhat: SpectralProfile, s, quad=None) -> np.ndarray:
    """log |ℱ⁻¹(f̂)(s)|, exact in the Gaussian tail for Gaussian-type spectra."""
    s = np.atleast_1d(np.asarray(s, dtype=float))
    form = fhat.gaussian_form(space)
    with np.errstate(divide="ignore"):
        if form is None:
            return np.log(np.abs(abel_values_from_spectrum(space, fhat, s, quad)))
        log_prefactor, total = _gaussian_abel_terms(form, s)
        return log_prefactor + np.log(np.abs(total))


def abel_values(space: SpaceParams, f: RadialProfile, s, quad=None, spectrum: SpectralProfile = None) -> np.ndarray:
    """
    𝒜f(s) = ℱ⁻¹(f̂)(s).

    f̂ is tabulated by spherical_transform unless its spherical transform is
    passed as spectrum, in which case that one is used (closed form for
    Gaussian-type spectra).
    """
    quad = resolve_quadrature(quad)
    if f.kind == "zero":
        return np.zeros(np.atleast_1d(s).shape)
    if spectrum is None:
        spectrum = spherical_transform(space, f, quad)
    return abel_values_from_spectrum(space, spectrum, s, quad)


def abel_transform(space: SpaceParams, f: RadialProfile, quad: QuadratureScheme = None, grid=None,
                   spectrum: SpectralProfile = None) -> LineProfile:
    """Abel transform tabulated on a symmetric grid (default step 1/panels_per_unit on [−t_max/2, t_max/2])."""
    quad = resolve_quadrature(quad)
    if grid is None:
        half = quad.t_max / 2
        grid = np.linspace(-half, half, int(2 * half * quad.panels_per_unit) + 1)
    grid = np.asarray(grid, dtype=float)
    values = abel_values(space, f, grid, quad, spectrum)
    return LineProfile.tabulated(grid, values, label=f"A[{f.describe()}]")


# -------------------------------------------------------------------
# 5. Euclidean convolution
# -------------------------------------------------------------------

def convolution_values(g1: LineProfile, g2: LineProfile, x, quad=None, min_panels: int = 64) -> np.ndarray:
    """(g1 ∗ g2)(x) = ∫ g1(s) g2(x − s) ds, integrating over the compact factor."""
    quad = resolve_quadrature(quad)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if not g1.is_compact and g2.is_compact:
        g1, g2 = g2, g1
    s, w = _line_quadrature(g1, quad, min_panels=min_panels)
    weights = w * g1(s)
    kernel = g2((x[:, None] - s[None, :]).ravel()).reshape(x.size, s.size)
    return kernel @ weights


def euclidean_convolution(g1: LineProfile, g2: LineProfile, quad: QuadratureScheme = None, grid=None) -> LineProfile:
    """g1 ∗ g2 tabulated on grid (default step 1/panels_per_unit on [−t_max/2, t_max/2])."""
    quad = resolve_quadrature(quad)
    if grid is None:
        half = quad.t_max / 2
        grid = np.linspace(-half, half, int(2 * half * quad.panels_per_unit) + 1)
    grid = np.asarray(grid, dtype=float)
    return LineProfile.tabulated(grid, convolution_values(g1, g2, grid, quad), label=f"{g1.label}*{g2.label}")
