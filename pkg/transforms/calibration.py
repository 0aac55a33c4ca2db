"""
Calibration — Per-space Normalization Constants

Fixes the density constant c_X and the inversion constant C₀ of a space:
  1. c_X from the Riemannian sphere-area normalization
  2. C₀ = 1/(2π c_X), rescaled so the quadrature heat kernel has unit mass at t = 1
  3. gaussian(1) round trip at the origin verified to 1e-6

Constants are computed on first use and cached per (space, quadrature).
"""

import math
import logging
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from common.errors import CalibrationError
from space.symmetric_space import SpaceParams, geometric_volume_constant, volume_density
from specfun.spherical_functions import plancherel_density
from transforms.quadrature import QuadratureScheme

logger = logging.getLogger(__name__)

MASS_DRIFT_WARNING = 1e-6
ROUND_TRIP_TOLERANCE = 1e-6


@dataclass(frozen=True)
class Calibration:
    c_x: float
    c0: float
    mass_drift: float


def mass_radius(space: SpaceParams, time: float, abs_tol: float) -> float:
    """Radius past which h_t·Δ is below abs_tol: 2ρt + √(4t·log(1/abs_tol)) + 1, rounded up."""
    return float(math.ceil(2 * space.rho * time + math.sqrt(4 * time * math.log(1.0 / abs_tol)) + 1))


@lru_cache(maxsize=None)
def calibrate(space: SpaceParams, quad: QuadratureScheme) -> Calibration:
    """
    Calibrate c_X and C₀ for one space under one quadrature scheme.

    Raises
    ------
    CalibrationError
        If the gaussian(1) round trip misses the identity by more than 1e-6.
    """
    from transforms.profiles import RadialProfile, SpectralProfile
    from transforms.spherical_transform import inverse_values_with_constant, spherical_transform_values

    c_x = geometric_volume_constant(space)
    c0_analytic = 1.0 / (2 * math.pi * c_x)

    # Mass of h_1 built with the analytic constant
    r, w = quad.nodes(0.0, mass_radius(space, 1.0, quad.abs_tol))
    heat_one = inverse_values_with_constant(space, SpectralProfile.heat_spectral(1.0), r, quad, c0_analytic)
    mass = float(np.sum(w * heat_one * volume_density(space, r, c_x)))
    if not math.isfinite(mass) or mass <= 0:
        raise CalibrationError(f"Heat mass on {space.name} is not positive: {mass}")

    c0 = c0_analytic / mass
    drift = abs(mass - 1.0)
    if drift > MASS_DRIFT_WARNING:
        logger.warning(f"Calibration on {space.name}: quadrature mass {mass:.12g}, rescaling C0")

    # Round trip of gaussian(1) at the origin: C₀ ∫ f̂ μ dλ must return f(0) = 1
    gaussian = RadialProfile.gaussian(1.0)
    cutoff = quad.spectral_cutoff(gaussian.spectral_time_scale)
    lam, lam_w = quad.nodes(0.0, float(math.ceil(cutoff)))
    fhat = spherical_transform_values(space, gaussian, lam, quad, c_x=c_x)
    origin = c0 * float(np.sum(lam_w * fhat * plancherel_density(space, lam)))
    if abs(origin - 1.0) > ROUND_TRIP_TOLERANCE:
        raise CalibrationError(
            f"Round trip on {space.name} misses the identity: f(0) = {origin:.12g} instead of 1"
        )

    logger.info(f"✓ Calibrated {space.name}: c_X={c_x:.12g}, C0={c0:.12g} (mass drift {drift:.2e})")
    return Calibration(c_x=c_x, c0=c0, mass_drift=drift)
