"""
Profiles — Radial, Spectral and Line Functions

Provides the function types that flow through the transforms:
  1. RadialProfile   — K-biinvariant f given by its radial profile t ↦ f(t)
  2. SpectralProfile — even spectral-side function λ ↦ f̂(λ)
  3. LineProfile     — function on ℝ (Abel transforms, bumps, Gaussians)
  4. clean_tabulation() — deduplicate / validate a (grid, value) table
  5. radial_values(), radial_log_abs(), spectral_values(), spectral_log_abs()
     — evaluation dispatch over the descriptors

Analytic descriptors are evaluated exactly wherever they are asked for;
tabulated ones through a cubic spline that refuses to extrapolate.
"""

import math
import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Optional

import numpy as np
import pandas as pd
from scipy.interpolate import CubicSpline

from common.errors import ProfileError
from space.symmetric_space import SpaceParams

logger = logging.getLogger(__name__)

RADIAL_KINDS = ("heat", "gaussian", "tabulated", "bump_convolved", "zero")
SPECTRAL_KINDS = ("heat_spectral", "closed_form", "tabulated", "bump_filtered", "zero")
DECAY_CLASSES = ("gaussian", "exponential", "compact", "unknown")

_GRID_SLACK = 1e-12


# -------------------------------------------------------------------
# 1. Tabulation cleaning
# -------------------------------------------------------------------

def clean_tabulation(frame: pd.DataFrame) -> pd.DataFrame:
    """
    Clean a raw (grid, value) table.

    Steps:
    - Combine value_re / value_im columns into a complex value column
    - Drop rows with missing grid or value entries
    - Remove duplicate grid points (first occurrence wins)
    - Sort by grid and require a nonnegative grid starting at 0
    """
    df = frame.copy()
    if "value" not in df.columns:
        if "value_re" not in df.columns:
            raise ProfileError(f"Tabulation needs a value or value_re column, got {list(df.columns)}")
        imag = df["value_im"] if "value_im" in df.columns else 0.0
        df["value"] = df["value_re"] + 1j * imag
    if "grid" not in df.columns:
        raise ProfileError(f"Tabulation needs a grid column, got {list(df.columns)}")
    df = df[["grid", "value"]]
    initial_count = len(df)

    df = df.dropna(subset=["grid", "value"])
    dropped = initial_count - len(df)
    if dropped:
        logger.warning(f"Tabulation: dropped {dropped} rows with missing entries")

    before = len(df)
    df = df.drop_duplicates(subset=["grid"], keep="first")
    dupes_removed = before - len(df)
    if dupes_removed:
        logger.warning(f"Tabulation: removed {dupes_removed} duplicate grid points")

    df = df.sort_values("grid").reset_index(drop=True)
    if df.empty:
        raise ProfileError("Tabulation is empty after cleaning")
    if df["grid"].iloc[0] != 0:
        raise ProfileError(f"Tabulated grids must start at 0, got {df['grid'].iloc[0]}")

    values = df["value"].to_numpy()
    if not np.all(np.isfinite(values)):
        raise ProfileError("Tabulated values must be finite")
    if np.all(np.imag(values) == 0):
        df["value"] = np.real(values).astype(float)

    logger.info(f"Tabulation cleaned: {len(df)} points ({initial_count} raw)")
    return df


def _validated_table(grid, values, start_at_zero: bool = True):
    grid = np.asarray(grid, dtype=float)
    values = np.asarray(values)
    if grid.ndim != 1 or values.shape != grid.shape:
        raise ProfileError(f"grid and values must be 1-D of equal length, got {grid.shape} and {values.shape}")
    if grid.size < 4:
        raise ProfileError("Tabulations need at least 4 points for cubic interpolation")
    if np.any(np.diff(grid) <= 0):
        raise ProfileError("Tabulated grid must be strictly increasing")
    if start_at_zero and grid[0] != 0:
        raise ProfileError(f"Tabulated grids must start at 0, got {grid[0]}")
    if not np.all(np.isfinite(grid)) or not np.all(np.isfinite(values)):
        raise ProfileError("Tabulated grid and values must be finite")
    if np.iscomplexobj(values) and np.all(values.imag == 0):
        values = values.real
    grid.setflags(write=False)
    values = np.array(values)
    values.setflags(write=False)
    return grid, values


class _Tabulated:
    """Mixin: spline evaluation of a tabulated profile without extrapolation."""

    @cached_property
    def _spline(self):
        return CubicSpline(self.grid, self.values, extrapolate=False)

    def _interpolate(self, x):
        x = np.asarray(x, dtype=float)
        lo, hi = self.grid[0], self.grid[-1]
        if np.any(x < lo - _GRID_SLACK) or np.any(x > hi + _GRID_SLACK):
            raise ProfileError(
                f"Evaluation outside tabulated range [{lo}, {hi}] "
                f"(requested [{np.min(x):.6g}, {np.max(x):.6g}])"
            )
        return self._spline(np.clip(x, lo, hi))


# -------------------------------------------------------------------
# 2. Radial profiles
# -------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class RadialProfile(_Tabulated):
    kind: str
    params: tuple = ()
    grid: Optional[np.ndarray] = None
    values: Optional[np.ndarray] = None
    decay_class: str = "unknown"

    def __post_init__(self):
        if self.kind not in RADIAL_KINDS:
            raise ProfileError(f"Unknown radial descriptor: {self.kind}")
        if self.decay_class not in DECAY_CLASSES:
            raise ProfileError(f"Unknown decay class: {self.decay_class}")

    @classmethod
    def heat(cls, time: float) -> "RadialProfile":
        if not time > 0:
            raise ProfileError(f"heat(time) requires time > 0, got {time}")
        return cls("heat", (float(time),), decay_class="gaussian")

    @classmethod
    def gaussian(cls, alpha: float) -> "RadialProfile":
        if not alpha > 0:
            raise ProfileError(f"gaussian(alpha) requires alpha > 0, got {alpha}")
        return cls("gaussian", (float(alpha),), decay_class="gaussian")

    @classmethod
    def tabulated(cls, grid, values, decay_class: str = "unknown") -> "RadialProfile":
        grid, values = _validated_table(grid, values)
        return cls("tabulated", (), grid, values, decay_class)

    @classmethod
    def bump_convolved(cls, zeta: float, poly=(1.0,)) -> "RadialProfile":
        return cls("bump_convolved", (float(zeta), tuple(float(p) for p in poly)), decay_class="gaussian")

    @classmethod
    def zero(cls) -> "RadialProfile":
        return cls("zero", (), decay_class="compact")

    @property
    def sample_grid(self):
        return self.grid

    @property
    def gaussian_rate(self):
        """a with f(t) ≈ e^{-a t²} for large t, or None."""
        if self.kind == "heat":
            return 1.0 / (4.0 * self.params[0])
        if self.kind == "gaussian":
            return self.params[0]
        if self.kind == "bump_convolved":
            return 1.0
        return None

    @property
    def spectral_time_scale(self):
        """τ with f̂(λ) ≈ e^{-τλ²}, used to size the λ cutoff."""
        rate = self.gaussian_rate
        return None if rate is None else 1.0 / (4.0 * rate)

    def describe(self) -> str:
        if self.kind == "tabulated":
            return f"tabulated[{self.grid.size} pts, 0..{self.grid[-1]:g}]"
        return f"{self.kind}({', '.join(str(p) for p in self.params)})"


def radial_values(space: SpaceParams, f: RadialProfile, t, quad=None) -> np.ndarray:
    """f(t) for an array of radii."""
    t = np.asarray(t, dtype=float)
    if f.kind == "zero":
        return np.zeros_like(t)
    if f.kind == "gaussian":
        return np.exp(-f.params[0] * t ** 2)
    if f.kind == "tabulated":
        return f._interpolate(t)
    if f.kind == "heat":
        from heat.heat_kernel import heat_kernel_values
        return heat_kernel_values(space, f.params[0], t, quad=quad)
    from uncertainty.sharpness import bump_convolved_values
    zeta, poly = f.params
    return bump_convolved_values(space, zeta, poly, t, quad=quad)


def radial_log_abs(space: SpaceParams, f: RadialProfile, t, quad=None) -> np.ndarray:
    """log |f(t)|, computed without underflow for the analytic descriptors."""
    t = np.asarray(t, dtype=float)
    if f.kind == "zero":
        return np.full(t.shape, -np.inf)
    if f.kind == "gaussian":
        return -f.params[0] * t ** 2
    if f.kind == "heat":
        from heat.heat_kernel import log_heat_kernel
        return log_heat_kernel(space, f.params[0], t, quad=quad)
    if f.kind == "bump_convolved":
        from uncertainty.sharpness import bump_convolved_log_abs
        zeta, poly = f.params
        return bump_convolved_log_abs(space, zeta, poly, t, quad=quad)
    with np.errstate(divide="ignore"):
        return np.log(np.abs(radial_values(space, f, t, quad)))


# -------------------------------------------------------------------
# 3. Spectral profiles
# -------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SpectralProfile(_Tabulated):
    kind: str
    params: tuple = ()
    grid: Optional[np.ndarray] = None
    values: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.kind not in SPECTRAL_KINDS:
            raise ProfileError(f"Unknown spectral descriptor: {self.kind}")

    @classmethod
    def heat_spectral(cls, time: float) -> "SpectralProfile":
        if not time > 0:
            raise ProfileError(f"heat_spectral(time) requires time > 0, got {time}")
        return cls("heat_spectral", (float(time),))

    @classmethod
    def closed_form(cls, poly, alpha: float) -> "SpectralProfile":
        """P(λ²) e^{-αλ²} with poly the coefficients of P, constant term first."""
        if not alpha > 0:
            raise ProfileError(f"closed_form requires alpha > 0, got {alpha}")
        coeffs = tuple(float(c) for c in poly)
        if not coeffs:
            raise ProfileError("closed_form needs at least one coefficient")
        return cls("closed_form", (coeffs, float(alpha)))

    @classmethod
    def tabulated(cls, grid, values) -> "SpectralProfile":
        grid, values = _validated_table(grid, values)
        return cls("tabulated", (), grid, values)

    @classmethod
    def bump_filtered(cls, zeta: float, poly=(1.0,)) -> "SpectralProfile":
        return cls("bump_filtered", (float(zeta), tuple(float(p) for p in poly)))

    @classmethod
    def zero(cls) -> "SpectralProfile":
        return cls("zero", ())

    @property
    def sample_grid(self):
        return self.grid

    @property
    def time_scale(self):
        """τ with f̂(λ) ≈ e^{-τλ²}, or None when unknown."""
        if self.kind == "heat_spectral":
            return self.params[0]
        if self.kind == "closed_form":
            return self.params[1]
        if self.kind == "bump_filtered":
            return 0.25
        return None

    def gaussian_form(self, space: SpaceParams):
        """(coefficients of P in λ², alpha, log constant) for Gaussian-type descriptors."""
        if self.kind == "heat_spectral":
            time = self.params[0]
            return (1.0,), time, -time * space.rho ** 2
        if self.kind == "closed_form":
            coeffs, alpha = self.params
            return coeffs, alpha, 0.0
        return None

    def describe(self) -> str:
        if self.kind == "tabulated":
            return f"tabulated[{self.grid.size} pts, 0..{self.grid[-1]:g}]"
        return f"{self.kind}({', '.join(str(p) for p in self.params)})"


def even_polynomial(coeffs, lam):
    """Σ c_k λ^{2k} for complex λ."""
    lam_sq = np.asarray(lam) ** 2
    total = np.zeros_like(lam_sq, dtype=complex)
    for c in reversed(coeffs):
        total = total * lam_sq + c
    return total


def spectral_values(space: SpaceParams, fhat: SpectralProfile, lam, quad=None) -> np.ndarray:
    """f̂(λ); complex λ allowed for the closed-form descriptors."""
    lam = np.asarray(lam)
    if fhat.kind == "zero":
        return np.zeros(lam.shape)
    if fhat.kind == "tabulated":
        if np.iscomplexobj(lam) and np.any(np.imag(lam) != 0):
            raise ProfileError("Tabulated spectra are only defined for real λ")
        return fhat._interpolate(np.abs(np.real(lam)))
    if fhat.kind == "bump_filtered":
        from uncertainty.sharpness import bump_filtered_values
        zeta, poly = fhat.params
        return bump_filtered_values(zeta, poly, lam, quad=quad)

    coeffs, alpha, log_const = fhat.gaussian_form(space)
    values = even_polynomial(coeffs, lam) * np.exp(log_const - alpha * lam.astype(complex) ** 2)
    if not np.iscomplexobj(lam) or np.all(np.imag(lam) == 0):
        return values.real
    return values


def spectral_log_abs(space: SpaceParams, fhat: SpectralProfile, lam, quad=None) -> np.ndarray:
    """log |f̂(λ)| for real λ, without underflow for the analytic descriptors."""
    lam = np.asarray(lam, dtype=float)
    with np.errstate(divide="ignore"):
        if fhat.kind == "zero":
            return np.full(lam.shape, -np.inf)
        if fhat.kind == "tabulated":
            return np.log(np.abs(spectral_values(space, fhat, lam)))
        if fhat.kind == "bump_filtered":
            from uncertainty.sharpness import bump_filtered_log_abs
            zeta, poly = fhat.params
            return bump_filtered_log_abs(zeta, poly, lam, quad=quad)
        coeffs, alpha, log_const = fhat.gaussian_form(space)
        return np.log(np.abs(even_polynomial(coeffs, lam).real)) + log_const - alpha * lam ** 2


# -------------------------------------------------------------------
# 4. Line profiles
# -------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class LineProfile(_Tabulated):
    """
    Function on ℝ: analytic (callable with a support interval) or tabulated.

    Analytic profiles vanish outside their support; tabulated ones raise on
    evaluation past the grid.
    """
    support: tuple
    function: Optional[Callable] = None
    grid: Optional[np.ndarray] = None
    values: Optional[np.ndarray] = None
    label: str = field(default="")

    @classmethod
    def analytic(cls, function, support=(-math.inf, math.inf), label: str = "") -> "LineProfile":
        a, b = support
        if not a < b:
            raise ProfileError(f"Support must be a nonempty interval, got {support}")
        return cls(support=(float(a), float(b)), function=function, label=label)

    @classmethod
    def tabulated(cls, grid, values, label: str = "") -> "LineProfile":
        grid, values = _validated_table(grid, values, start_at_zero=False)
        return cls(support=(float(grid[0]), float(grid[-1])), grid=grid, values=values, label=label)

    @classmethod
    def zero(cls) -> "LineProfile":
        return cls.analytic(lambda x: np.zeros_like(np.asarray(x, dtype=float)), (-1.0, 1.0), "zero")

    @property
    def is_compact(self) -> bool:
        return math.isfinite(self.support[0]) and math.isfinite(self.support[1])

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.function is None:
            return self._interpolate(x)
        a, b = self.support
        inside = (x >= a) & (x <= b)
        values = np.asarray(self.function(np.where(inside, x, 0.5 * (a + b) if self.is_compact else 0.0)))
        return np.where(inside, values, 0.0)
