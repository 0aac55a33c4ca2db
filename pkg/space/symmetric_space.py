"""
Symmetric Space — Structure Constants of Rank-One Spaces

Provides the radial geometry every other package builds on:
  1. make_space()          — SpaceParams from root multiplicities
  2. model_space()         — registry of the classical hyperbolic spaces
  3. volume_density()      — radial Cartan density c_X (2 sinh t)^mγ (2 sinh 2t)^m2γ
  4. KTypeIndex / enumerate_k_types() — spherical K-type parameters (p, q)
"""

import math
import logging
import re
from dataclasses import dataclass

import numpy as np

from common.errors import SpaceError, KTypeError
from common.settings import section

logger = logging.getLogger(__name__)


# -------------------------------------------------------------------
# 1. Space parameters
# -------------------------------------------------------------------

@dataclass(frozen=True)
class SpaceParams:
    """Root multiplicities of a rank-one space and the constants derived from them."""
    m_gamma: int
    m_2gamma: int
    rho: float
    d_x: int
    jacobi_a: float
    jacobi_b: float
    name: str

    @property
    def is_h3(self) -> bool:
        return self.m_gamma == 2 and self.m_2gamma == 0


def make_space(m_gamma: int, m_2gamma: int, name: str = "") -> SpaceParams:
    """
    Build SpaceParams from the multiplicities of γ and 2γ.

    Parameters
    ----------
    m_gamma : int
        Multiplicity of the simple root, at least 1.
    m_2gamma : int
        Multiplicity of twice the root, nonnegative.
    name : str
        Identifier carried into reports.
    """
    if isinstance(m_gamma, bool) or isinstance(m_2gamma, bool):
        raise SpaceError("Multiplicities must be integers, not booleans")
    if int(m_gamma) != m_gamma or int(m_2gamma) != m_2gamma:
        raise SpaceError(f"Multiplicities must be integers, got ({m_gamma}, {m_2gamma})")
    m_gamma, m_2gamma = int(m_gamma), int(m_2gamma)
    if m_gamma < 1:
        raise SpaceError(f"m_gamma must be at least 1 (degenerate root system), got {m_gamma}")
    if m_2gamma < 0:
        raise SpaceError(f"m_2gamma must be nonnegative, got {m_2gamma}")

    return SpaceParams(
        m_gamma=m_gamma,
        m_2gamma=m_2gamma,
        rho=(m_gamma + 2 * m_2gamma) / 2,
        d_x=m_gamma + m_2gamma + 1,
        jacobi_a=(m_gamma + m_2gamma - 1) / 2,
        jacobi_b=(m_2gamma - 1) / 2,
        name=name or f"space({m_gamma},{m_2gamma})",
    )


# -------------------------------------------------------------------
# 2. Model-space registry
# -------------------------------------------------------------------

# Multiplicities of the real, complex and quaternionic hyperbolic spaces come
# from the classification of rank-one spaces; only h3 appears in the closed
# forms used by the sharpness construction.
_FAMILIES = {
    "real_hyperbolic": lambda n: (n - 1, 0),
    "complex_hyperbolic": lambda n: (2 * (n - 1), 1),
    "quaternionic_hyperbolic": lambda n: (4 * (n - 1), 3),
}

_FAMILY_PATTERN = re.compile(r"^\s*([a-z_]+)\s*\(\s*(-?\d+)\s*\)\s*$")


def model_space(name: str) -> SpaceParams:
    """Look up h3 or one of real/complex/quaternionic_hyperbolic(n), n ≥ 2."""
    key = name.strip().lower()
    if key in ("h3", "sl2c"):
        return make_space(2, 0, "h3")

    match = _FAMILY_PATTERN.match(key)
    if not match or match.group(1) not in _FAMILIES:
        raise SpaceError(f"Unknown model space: {name!r}")

    family, n = match.group(1), int(match.group(2))
    if n < 2:
        raise SpaceError(f"{family}(n) requires n >= 2, got {n}")
    m_gamma, m_2gamma = _FAMILIES[family](n)
    return make_space(m_gamma, m_2gamma, f"{family}({n})")


def default_registry() -> tuple:
    """The model spaces swept by round-trip and Plancherel checks."""
    return tuple(model_space(name) for name in section("registry"))


# -------------------------------------------------------------------
# 3. Radial density
# -------------------------------------------------------------------

def geometric_volume_constant(space: SpaceParams) -> float:
    """
    c_X = area(S^{d_X−1}) / 4^ρ, the Riemannian normalization of the density.

    With this constant the H³ density is 4π sinh² t, the area of a sphere of
    radius t.
    """
    d = space.d_x
    sphere_area = 2 * math.pi ** (d / 2) / math.gamma(d / 2)
    return sphere_area / 4 ** space.rho


def log_volume_density(space: SpaceParams, t, c_x: float = 1.0):
    """Natural log of volume_density; −inf at t = 0."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise SpaceError("volume_density requires t >= 0")
    with np.errstate(divide="ignore"):
        result = (
            math.log(c_x)
            + space.m_gamma * _log_two_sinh(t)
            + (space.m_2gamma * _log_two_sinh(2 * t) if space.m_2gamma else 0.0)
        )
    return result if result.ndim else float(result)


def volume_density(space: SpaceParams, t, c_x: float = 1.0):
    """
    Radial density Δ(t) = c_X (2 sinh t)^mγ (2 sinh 2t)^m2γ.

    Accepts a scalar or an array of radii; returns the same shape.
    """
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0):
        raise SpaceError("volume_density requires t >= 0")
    result = c_x * (2 * np.sinh(t_arr)) ** space.m_gamma * (2 * np.sinh(2 * t_arr)) ** space.m_2gamma
    return result if result.ndim else float(result)


def _log_two_sinh(t):
    """log(2 sinh t) without overflow for large t."""
    t = np.asarray(t, dtype=float)
    with np.errstate(divide="ignore"):
        return t + np.log(-np.expm1(-2 * t))


# -------------------------------------------------------------------
# 4. K-types
# -------------------------------------------------------------------

@dataclass(frozen=True, order=True)
class KTypeIndex:
    """Spherical K-type (p, q): p ≥ 0 with p + q and p − q nonnegative and even."""
    p: int
    q: int

    def __post_init__(self):
        if not is_valid_k_type(self.p, self.q):
            raise KTypeError(f"(p, q) = ({self.p}, {self.q}) is not a spherical K-type")

    @property
    def is_trivial(self) -> bool:
        return self.p == 0 and self.q == 0

    def __str__(self):
        return f"({self.p},{self.q})"


def is_valid_k_type(p, q) -> bool:
    if isinstance(p, bool) or isinstance(q, bool):
        return False
    if int(p) != p or int(q) != q:
        return False
    p, q = int(p), int(q)
    plus, minus = p + q, p - q
    return p >= 0 and plus >= 0 and minus >= 0 and plus % 2 == 0 and minus % 2 == 0


def enumerate_k_types(p_bound: float) -> tuple:
    """All valid K-types with p < p_bound, ordered by (p, q)."""
    found = []
    p = 0
    while p < p_bound:
        for q in range(-p, p + 1):
            if is_valid_k_type(p, q):
                found.append(KTypeIndex(p, q))
        p += 1
    return tuple(found)
