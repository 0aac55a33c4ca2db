"""
Sharpness — The Bump-Filtered Counterexample Pair on h3

Builds the pair (g, ĝ) showing that the weight in the Beurling condition
cannot be relaxed:
  1. standard_bump()          — ψ = normalized e^{-1/(1−(s/ζ)²)} on [−ζ, ζ]
  2. bump_filtered_values()   — ĝ(λ) = ℱψ(λ) e^{-λ²/4} P(λ²)
  3. bump_convolved_values()  — g(t) = √π C₀ (ψ ∗ K)(t) / sinh t,  K = Σ (−1)^k p_k H_{2k+1}(x) e^{-x²}
  4. sharpness_construct() / sharpness_verify()
  5. check_sharpness_bounds() / case_ii_bounds() — fitted envelope checks

On h3, ĝ(λ) = 2i c_X ℱ(g·sinh)(λ)/λ, and ℱ(H_{2k+1}e^{-x²}) = √π (−iλ)^{2k+1} e^{-λ²/4},
which fixes K and the constant. As ζ → 0, g tends to e^{1/4} h_{1/4}.
"""

import math
import logging
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial.hermite import hermval

from common.errors import ProfileError, SpaceError
from common.settings import section
from space.symmetric_space import SpaceParams, model_space
from specfun.spherical_functions import log_xi
from transforms.calibration import calibrate
from transforms.profiles import RadialProfile, SpectralProfile, LineProfile, even_polynomial, radial_log_abs, spectral_log_abs
from transforms.quadrature import resolve_quadrature
from transforms.spherical_transform import convolution_values, fourier_values

logger = logging.getLogger(__name__)

_SMALL_T = 1e-6


# -------------------------------------------------------------------
# 1. Bump
# -------------------------------------------------------------------

def _raw_bump(u):
    u = np.asarray(u, dtype=float)
    inside = np.abs(u) < 1
    safe = np.where(inside, u, 0.0)
    return np.where(inside, np.exp(-1.0 / (1.0 - safe ** 2)), 0.0)


@lru_cache(maxsize=16)
def _bump_mass(min_panels: int) -> float:
    u, w = resolve_quadrature(None).nodes(-1.0, 1.0, min_panels=min_panels)
    return float(np.sum(w * _raw_bump(u)))


def standard_bump(zeta: float) -> LineProfile:
    """Even C_c^∞ bump on [−ζ, ζ] with unit mass."""
    _check_zeta(zeta)
    mass = zeta * _bump_mass(section("sharpness")["min_convolution_panels"])
    return LineProfile.analytic(lambda s: _raw_bump(np.asarray(s) / zeta) / mass, (-zeta, zeta), f"bump({zeta:g})")


def bump_samples(zeta: float):
    """(grid, values) of the standard bump at the configured sample count."""
    grid = np.linspace(-zeta, zeta, int(section("sharpness")["bump_samples"]))
    return grid, standard_bump(zeta)(grid)


def _check_zeta(zeta: float):
    if not 0 < zeta < 0.25:
        raise ProfileError(f"zeta must lie in (0, 1/4), got {zeta}")


def _bump_nodes(zeta: float, quad):
    """Quadrature nodes on [−ζ, ζ] and weights·ψ."""
    bump = standard_bump(zeta)
    s, w = quad.nodes(-zeta, zeta, min_panels=section("sharpness")["min_convolution_panels"])
    return s, w * bump(s)


# -------------------------------------------------------------------
# 2. Spectral side
# -------------------------------------------------------------------

def bump_fourier(zeta: float, lam, quad=None) -> np.ndarray:
    """ℱψ(λ) = ∫ ψ(s) cos(λs) ds (ψ is even)."""
    quad = resolve_quadrature(quad)
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    s, weights = _bump_nodes(zeta, quad)
    return np.cos(np.outer(lam, s)) @ weights


def bump_filtered_values(zeta: float, poly, lam, quad=None) -> np.ndarray:
    lam = np.asarray(lam, dtype=float)
    values = bump_fourier(zeta, lam.ravel(), quad) * np.exp(-lam.ravel() ** 2 / 4)
    values = values * even_polynomial(poly, lam.ravel()).real
    return values.reshape(lam.shape)


def bump_filtered_log_abs(zeta: float, poly, lam, quad=None) -> np.ndarray:
    lam = np.asarray(lam, dtype=float)
    flat = lam.ravel()
    with np.errstate(divide="ignore"):
        logs = (
            np.log(np.abs(bump_fourier(zeta, flat, quad)))
            - flat ** 2 / 4
            + np.log(np.abs(even_polynomial(poly, flat).real))
        )
    return logs.reshape(lam.shape)


# -------------------------------------------------------------------
# 3. Radial side
# -------------------------------------------------------------------

def _hermite_combination(poly, shift: int = 1) -> np.ndarray:
    """Hermite-series coefficients of Σ (−1)^k p_k H_{2k+shift}."""
    coeffs = np.zeros(2 * len(poly) + shift)
    for k, p in enumerate(poly):
        coeffs[2 * k + shift] = (-1) ** k * p
    return coeffs


def _require_h3(space: SpaceParams):
    if not space.is_h3:
        raise SpaceError(f"The sharpness construction lives on h3, not {space.name}")


def _prefactor(space: SpaceParams, quad) -> float:
    """√π C₀ with C₀ = 1/(2π c_X)."""
    return math.sqrt(math.pi) / (2 * math.pi * calibrate(space, quad).c_x)


def _log_sinh(t):
    return t + np.log(-np.expm1(-2 * t)) - math.log(2.0)


def bump_convolved_values(space: SpaceParams, zeta: float, poly, t, quad=None) -> np.ndarray:
    """g(t) for an array of radii; g(0) is the limit ∫ψ(s) K′(−s) ds."""
    _require_h3(space)
    quad = resolve_quadrature(quad)
    t = np.asarray(t, dtype=float)
    flat = t.ravel()
    s, weights = _bump_nodes(zeta, quad)
    odd = _hermite_combination(poly, 1)

    out = np.empty(flat.shape)
    small = flat < _SMALL_T
    if np.any(small):
        even = -_hermite_combination(poly, 2)
        out[small] = np.sum(weights * hermval(-s, even) * np.exp(-s ** 2))
    if np.any(~small):
        x = flat[~small, None] - s[None, :]
        conv = (hermval(x, odd) * np.exp(-x ** 2)) @ weights
        out[~small] = conv / np.sinh(flat[~small])
    return _prefactor(space, quad) * out.reshape(t.shape)


def bump_convolved_log_abs(space: SpaceParams, zeta: float, poly, t, quad=None) -> np.ndarray:
    """log |g(t)|: −t² + log|∫ψ(s) K̃(t−s) e^{2ts−s²} ds| + log(√π C₀) − log sinh t for t ≥ 1."""
    _require_h3(space)
    quad = resolve_quadrature(quad)
    t = np.asarray(t, dtype=float)
    flat = t.ravel()
    out = np.empty(flat.shape)
    near = flat < 1.0
    with np.errstate(divide="ignore"):
        if np.any(near):
            out[near] = np.log(np.abs(bump_convolved_values(space, zeta, poly, flat[near], quad)))
        if np.any(~near):
            s, weights = _bump_nodes(zeta, quad)
            far = flat[~near]
            x = far[:, None] - s[None, :]
            scaled = (hermval(x, _hermite_combination(poly, 1)) * np.exp(2 * far[:, None] * s[None, :] - s ** 2)) @ weights
            out[~near] = -far ** 2 + np.log(np.abs(scaled)) + math.log(_prefactor(space, quad)) - _log_sinh(far)
    return out.reshape(t.shape)


# -------------------------------------------------------------------
# 4. Construction and verification
# -------------------------------------------------------------------

@dataclass(frozen=True)
class SharpnessConstruction:
    zeta: float
    poly: tuple
    g: RadialProfile
    ghat: SpectralProfile
    bump: LineProfile

    @property
    def decay_exponent(self) -> float:
        """l = 1 − 4ζ."""
        return 1 - 4 * self.zeta


def sharpness_construct(zeta: float, poly=(1.0,), quad=None) -> SharpnessConstruction:
    """
    Build (g, ĝ) on h3 from the bump on [−ζ, ζ] and an even polynomial P.

    Raises
    ------
    ProfileError
        If ζ is outside (0, 1/4) or P is empty.
    """
    _check_zeta(zeta)
    poly = tuple(float(p) for p in poly)
    if not poly or not any(poly):
        raise ProfileError("The sharpness polynomial needs a nonzero coefficient")
    construction = SharpnessConstruction(
        zeta=float(zeta),
        poly=poly,
        g=RadialProfile.bump_convolved(zeta, poly),
        ghat=SpectralProfile.bump_filtered(zeta, poly),
        bump=standard_bump(zeta),
    )
    logger.info(f"Sharpness pair built: zeta={zeta:g}, poly={poly}, l={construction.decay_exponent:g}")
    return construction


def sharpness_verify(construction: SharpnessConstruction, c: float, eps: float, d: int, quad=None, ladder=None):
    """Ladder report for the weighted functional of the pair, ridge along λ = 2ct."""
    from uncertainty.beurling_functional import BeurlingConfig, beurling_functional

    cfg = BeurlingConfig(d=d, c=c, eps=eps, ladder=ladder, ridge_alpha=0.25)
    return beurling_functional(model_space("h3"), construction.g, construction.ghat, cfg, quad, waive_consistency=True)


def convolution_slice_defect(construction: SharpnessConstruction, lam, quad=None) -> float:
    """
    max |ℱ(g·sinh)(λ) − √π C₀ ℱψ(λ) ℱK(λ)| over lam.

    g·sinh = √π C₀ (ψ ∗ K) is rebuilt through euclidean convolution and
    transformed by Fourier quadrature; ℱK(λ) = −i√π λ P(λ²) e^{-λ²/4}.
    """
    quad = resolve_quadrature(quad)
    space = model_space("h3")
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    odd = _hermite_combination(construction.poly, 1)
    kernel = LineProfile.analytic(lambda x: hermval(x, odd) * np.exp(-np.asarray(x) ** 2), label="K")
    prefactor = _prefactor(space, quad)
    window = min(quad.t_max, 12.0)
    product = LineProfile.analytic(
        lambda x: prefactor * convolution_values(construction.bump, kernel, x, quad),
        (-window, window),
        "g*sinh",
    )
    numeric = fourier_values(product, lam, quad)
    exact = (
        prefactor
        * bump_fourier(construction.zeta, lam, quad)
        * (-1j * math.sqrt(math.pi) * lam * even_polynomial(construction.poly, lam) * np.exp(-lam ** 2 / 4))
    )
    return float(np.max(np.abs(numeric - exact)))


# -------------------------------------------------------------------
# 5. Envelope checks
# -------------------------------------------------------------------

@dataclass(frozen=True)
class BoundCheck:
    name: str
    constant: float
    window: tuple
    head_max: float
    tail_max: float
    passed: bool

    def to_dict(self) -> dict:
        return dict(self.__dict__, window=list(self.window))


def _bound_check(name: str, grid, log_ratio) -> BoundCheck:
    """Fit C = sup ratio; pass if C is finite and the ratio does not grow toward the end of the window."""
    ratio = np.exp(np.asarray(log_ratio, dtype=float))
    quarter = max(len(grid) // 4, 1)
    constant = float(np.max(ratio))
    head, tail = float(np.max(ratio[:quarter])), float(np.max(ratio[-quarter:]))
    passed = bool(math.isfinite(constant) and constant > 0 and tail <= constant and tail <= head * (1 + 1e-9))
    status = "✓" if passed else "✗"
    logger.info(f"{status} {name}: C={constant:.6g}, head={head:.3g}, tail={tail:.3g}")
    return BoundCheck(name, constant, (float(grid[0]), float(grid[-1])), head, tail, passed)


def _radial_window():
    return np.linspace(0.5, 12.0, 461)


def _spectral_window():
    return np.linspace(0.0, 12.0, 481)


def check_sharpness_bounds(construction: SharpnessConstruction, quad=None) -> tuple:
    """
    |g(t)| ≤ C e^{-t²} e^{(4ζ−1)t} on [0.5, 12] and |ĝ(λ)| ≤ C′ e^{-λ²/4} (1+λ)^N on [0, 12],
    N being the λ-degree of P.
    """
    quad = resolve_quadrature(quad)
    space = model_space("h3")
    t = _radial_window()
    log_g = radial_log_abs(space, construction.g, t, quad)
    radial = _bound_check("g bound", t, log_g + t ** 2 - (4 * construction.zeta - 1) * t)

    lam = _spectral_window()
    degree = 2 * (len(construction.poly) - 1)
    log_ghat = spectral_log_abs(space, construction.ghat, lam, quad)
    spectral = _bound_check("g-hat bound", lam, log_ghat + lam ** 2 / 4 - degree * np.log1p(lam))
    return radial, spectral


def case_ii_parameters(c: float):
    """(α, β) = ((1+c²)/2, c²/(4α)); then α < 1, β < 1/4 and 4αβ = c²."""
    if not 0 < c < 1:
        raise ValueError(f"c must lie in (0, 1), got {c}")
    alpha = (1 + c ** 2) / 2
    return alpha, c ** 2 / (4 * alpha)


def case_ii_bounds(construction: SharpnessConstruction, c: float, quad=None) -> tuple:
    """|g| ≤ C e^{-αt²} Ξ(t) and |ĝ| ≤ C′ e^{-βλ²} for the case-(ii) exponents of c."""
    quad = resolve_quadrature(quad)
    alpha, beta = case_ii_parameters(c)
    space = model_space("h3")
    t = _radial_window()
    log_g = radial_log_abs(space, construction.g, t, quad)
    radial = _bound_check(f"g case-(ii) bound (alpha={alpha:g})", t, log_g + alpha * t ** 2 - np.asarray(log_xi(space, t)))

    lam = _spectral_window()
    log_ghat = spectral_log_abs(space, construction.ghat, lam, quad)
    spectral = _bound_check(f"g-hat case-(ii) bound (beta={beta:g})", lam, log_ghat + beta * lam ** 2)
    return radial, spectral
