"""
Beurling Functional — Truncation Ladders for Weighted |f|·|f̂| Double Integrals

Provides the numerical proxy for "the double integral is finite":
  1. BeurlingConfig        — exponent d, cross weight c, Ξ-exponent modifier eps, ladder
  2. ConvergenceReport     — partial values I(R_k), classification, ridge cross-check
  3. classify()            — converged / diverging / inconclusive from a ladder
  4. beurling_functional() — I(R) = ∫₀^R∫₀^R |f||f̂| e^{ctλ} Ξ^{1+eps} (1+t+λ)^{-d} Δ μ dt dλ
  5. demange_pair()        — the two cross conditions for a pair of spaces
  6. abel_side_functional()— the same weight on the line, with 𝒜f in place of f

The double integral is accumulated in log space, one ladder segment and one
row chunk at a time, so integrands spanning hundreds of orders of magnitude
never underflow. Partial values are built by logaddexp, which keeps them
exactly nondecreasing.
"""

import math
import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from common.errors import ConfigError, InconsistentPairError
from common.settings import section
from space.symmetric_space import SpaceParams, log_volume_density
from specfun.spherical_functions import log_xi, log_plancherel_density
from transforms.calibration import calibrate
from transforms.profiles import (
    RadialProfile,
    SpectralProfile,
    radial_log_abs,
    spectral_values,
    spectral_log_abs,
)
from transforms.quadrature import resolve_quadrature
from transforms.spherical_transform import spherical_transform_values, abel_log_abs_from_spectrum

logger = logging.getLogger(__name__)

CLASSIFICATIONS = ("converged", "diverging", "inconclusive")
CONSISTENCY_POINTS = (0.0, 0.5, 1.0, 2.0)
_ROW_CHUNK = 512


# -------------------------------------------------------------------
# 1. Configuration and report
# -------------------------------------------------------------------

@dataclass(frozen=True)
class BeurlingConfig:
    d: int
    c: float = 1.0
    eps: float = 0.0
    ladder: tuple = None
    rel_tol: float = None
    growth_factor: float = None
    ridge_alpha: Optional[float] = None

    def __post_init__(self):
        cfg = section("beurling")
        if self.ladder is None:
            object.__setattr__(self, "ladder", tuple(float(r) for r in cfg["ladder"]))
        else:
            object.__setattr__(self, "ladder", tuple(float(r) for r in self.ladder))
        if self.rel_tol is None:
            object.__setattr__(self, "rel_tol", float(cfg["rel_tol"]))
        if self.growth_factor is None:
            object.__setattr__(self, "growth_factor", float(cfg["growth_factor"]))

        if isinstance(self.d, bool) or int(self.d) != self.d or self.d < 0:
            raise ConfigError(f"d must be a nonnegative integer, got {self.d}")
        if len(self.ladder) < 4:
            raise ConfigError(f"The ladder needs at least 4 rungs, got {len(self.ladder)}")
        if self.ladder[0] <= 0 or any(b <= a for a, b in zip(self.ladder, self.ladder[1:])):
            raise ConfigError(f"The ladder must be positive and strictly increasing, got {self.ladder}")
        if not (math.isfinite(self.c) and math.isfinite(self.eps)):
            raise ConfigError("c and eps must be finite")
        if self.ridge_alpha is not None and not self.ridge_alpha > 0:
            raise ConfigError(f"ridge_alpha must be positive, got {self.ridge_alpha}")


@dataclass
class ConvergenceReport:
    partial_values: tuple
    ladder: tuple
    classification: str
    stabilized_value: Optional[float] = None
    log_partial_values: tuple = ()
    ridge_values: tuple = ()
    ridge_classification: Optional[str] = None
    ridge_agrees: Optional[bool] = None
    label: str = field(default="")

    def to_dict(self) -> dict:
        return {
            "ladder": list(self.ladder),
            "partial_values": list(self.partial_values),
            "classification": self.classification,
            "value": self.stabilized_value,
            "ridge_values": list(self.ridge_values),
            "ridge_classification": self.ridge_classification,
            "ridge_agrees": self.ridge_agrees,
        }


# -------------------------------------------------------------------
# 2. Classification
# -------------------------------------------------------------------

def classify(values, rel_tol: float, growth_factor: float):
    """
    Classify a nondecreasing ladder of partial values.

    converged    — the increment over the final two rungs is below rel_tol
                   (relative to I(R_max)) and no larger than the one before
    diverging    — overflow, a last-rung ratio above growth_factor, or
                   nondecreasing increments over the final three rungs
    inconclusive — anything else

    Returns
    -------
    (classification, stabilized_value or None)
    """
    v = np.asarray(values, dtype=float)
    if np.all(v == 0):
        return "converged", 0.0
    if not np.all(np.isfinite(v)):
        return "diverging", None
    if v[-2] > 0 and v[-1] / v[-2] > growth_factor:
        return "diverging", None

    inc = np.diff(v)
    rel = inc / v[1:].clip(min=np.finfo(float).tiny)
    if rel[-1] < rel_tol and (inc[-1] <= inc[-2] or rel[-1] <= 1e-14):
        return "converged", float(v[-1])
    if inc.size >= 3 and inc[-1] > 0 and inc[-3] <= inc[-2] <= inc[-1]:
        return "diverging", None
    return "inconclusive", None


# -------------------------------------------------------------------
# 3. Ladder accumulation
# -------------------------------------------------------------------

def _segments(ladder, quad):
    """Quadrature nodes split at the ladder radii: [(nodes, weights)] for [0, R_1], [R_1, R_2], ..."""
    edges = (0.0,) + tuple(ladder)
    return [quad.nodes(a, b) for a, b in zip(edges[:-1], edges[1:])]


def _masked(evaluator, x, end):
    """evaluator(x) where x ≤ end, −inf past it."""
    out = np.full(x.shape, -np.inf)
    inside = x <= end
    if np.any(inside):
        out[inside] = evaluator(x[inside])
    return out


def _ladder_log_partials(ladder, quad, log_radial, log_spectral, c: float, d: int, log_scale: float = 0.0):
    """
    log I(R_k) for every rung, with I(R) = ∫₀^R∫₀^R e^{A(t) + B(λ) + ctλ} (1+t+λ)^{-d} dt dλ.

    log_radial and log_spectral map node arrays to A and B.
    """
    segs = _segments(ladder, quad)
    rows = [(t, np.log(w) + log_radial(t)) for t, w in segs]
    lam = np.concatenate([s[0] for s in segs])
    col_log = np.concatenate([np.log(s[1]) + log_spectral(s[0]) for s in segs])
    col_starts = np.cumsum([0] + [s[0].size for s in segs[:-1]])

    n = len(ladder)
    blocks = np.full((n, n), -np.inf)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        for j, (t, row_log) in enumerate(rows):
            for start in range(0, t.size, _ROW_CHUNK):
                tc = t[start:start + _ROW_CHUNK]
                log_m = (
                    row_log[start:start + _ROW_CHUNK, None]
                    + col_log[None, :]
                    + c * tc[:, None] * lam[None, :]
                    - d * np.log1p(tc[:, None] + lam[None, :])
                )
                peak = np.max(log_m)
                if not np.isfinite(peak):
                    if peak == np.inf:
                        blocks[j, :] = np.inf
                    continue
                sums = np.add.reduceat(np.exp(log_m - peak).sum(axis=0), col_starts)
                blocks[j] = np.logaddexp(blocks[j], peak + np.log(sums))

        partial = []
        running = -np.inf
        for k in range(n):
            new = np.concatenate([blocks[k, :k + 1], blocks[:k, k]])
            running = np.logaddexp(running, np.logaddexp.reduce(new))
            partial.append(running + log_scale)
    return np.array(partial)


def _ridge_log_partials(ladder, quad, log_radial, log_spectral, c: float, d: int, alpha: float):
    """1-D integral of the same integrand along λ = c·t/(2α), truncated to the square [0, R]²."""
    slope = c / (2 * alpha)
    t, w = quad.nodes(0.0, ladder[-1])
    lam = slope * t
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        logs = np.log(w) + log_radial(t) + log_spectral(lam) + c * t * lam - d * np.log1p(t + lam)
        cumulative = np.logaddexp.accumulate(logs)
    out = []
    for radius in ladder:
        end = radius if slope <= 1 else radius / slope
        idx = int(np.searchsorted(t, end, side="right")) - 1
        out.append(cumulative[idx] if idx >= 0 else -np.inf)
    return np.array(out)


def _report(log_partials, cfg: BeurlingConfig, log_ridge=None, label: str = "") -> ConvergenceReport:
    with np.errstate(over="ignore"):
        values = np.exp(log_partials)
    classification, stabilized = classify(values, cfg.rel_tol, cfg.growth_factor)
    report = ConvergenceReport(
        partial_values=tuple(float(v) for v in values),
        ladder=cfg.ladder,
        classification=classification,
        stabilized_value=stabilized,
        log_partial_values=tuple(float(v) for v in log_partials),
        label=label,
    )
    if log_ridge is not None:
        with np.errstate(over="ignore"):
            ridge = np.exp(log_ridge)
        report.ridge_values = tuple(float(v) for v in ridge)
        report.ridge_classification, _ = classify(ridge, cfg.rel_tol, cfg.growth_factor)
        report.ridge_agrees = report.ridge_classification == classification
        if not report.ridge_agrees:
            logger.warning(
                f"{label}: ladder says {classification}, ridge oracle says {report.ridge_classification}"
            )
    logger.info(f"{label}: {classification} (I(R_max) = {report.partial_values[-1]:.6g})")
    return report


# -------------------------------------------------------------------
# 4. Pair consistency
# -------------------------------------------------------------------

def check_pair(space: SpaceParams, f: RadialProfile, fhat: SpectralProfile, quad=None, tol: float = None) -> float:
    """
    Max deviation of spherical_transform(f) from fhat at a few λ, relative to max |fhat|.

    Raises
    ------
    InconsistentPairError
        If the deviation exceeds tol (default from config).
    """
    quad = resolve_quadrature(quad)
    tol = section("beurling")["consistency_tol"] if tol is None else tol
    lam = np.array(CONSISTENCY_POINTS)
    claimed = np.asarray(spectral_values(space, fhat, lam, quad))
    computed = spherical_transform_values(space, f, lam, quad)
    scale = float(np.max(np.abs(claimed)))
    deviation = float(np.max(np.abs(computed - claimed)))
    if scale > 0:
        deviation /= scale
    if deviation > tol:
        raise InconsistentPairError(
            f"{f.describe()} and {fhat.describe()} are not a transform pair on {space.name}", deviation
        )
    return deviation


def _ridge_alpha(cfg: BeurlingConfig, fhat: SpectralProfile):
    if cfg.ridge_alpha is not None:
        return cfg.ridge_alpha
    return fhat.time_scale


def _radial_log_weight(space: SpaceParams, f: RadialProfile, eps: float, quad):
    c_x = calibrate(space, quad).c_x
    end = float(f.grid[-1]) if f.kind == "tabulated" else np.inf

    def evaluate(t):
        return (
            radial_log_abs(space, f, t, quad)
            + (1 + eps) * np.asarray(log_xi(space, t))
            + log_volume_density(space, t, c_x)
        )

    return lambda t: _masked(evaluate, t, end)


def _spectral_log_weight(space: SpaceParams, fhat: SpectralProfile, quad):
    end = float(fhat.grid[-1]) if fhat.kind == "tabulated" else np.inf

    def evaluate(lam):
        return spectral_log_abs(space, fhat, lam, quad) + np.asarray(log_plancherel_density(space, lam))

    return lambda lam: _masked(evaluate, lam, end)


# -------------------------------------------------------------------
# 5. Functionals
# -------------------------------------------------------------------

def _cross_functional(radial_space, f, spectral_space, fhat, cfg, quad, label):
    if f.kind == "zero" or fhat.kind == "zero":
        zeros = np.full(len(cfg.ladder), -np.inf)
        return _report(zeros, cfg, zeros, label)
    log_radial = _radial_log_weight(radial_space, f, cfg.eps, quad)
    log_spectral = _spectral_log_weight(spectral_space, fhat, quad)
    log_partials = _ladder_log_partials(cfg.ladder, quad, log_radial, log_spectral, cfg.c, cfg.d)

    alpha = _ridge_alpha(cfg, fhat)
    log_ridge = None
    if alpha is not None:
        log_ridge = _ridge_log_partials(cfg.ladder, quad, log_radial, log_spectral, cfg.c, cfg.d, alpha)
    return _report(log_partials, cfg, log_ridge, label)


def beurling_functional(space: SpaceParams, f: RadialProfile, fhat: SpectralProfile, cfg: BeurlingConfig,
                        quad=None, waive_consistency: bool = False) -> ConvergenceReport:
    """
    Evaluate the weighted double integral along cfg.ladder and classify it.

    For a radial f the matrix norm of f̂(λ) reduces to |f̂(λ)|. The ridge
    oracle integrates the same integrand along λ = c·t/(2α), α being the
    Gaussian rate of f̂ (or cfg.ridge_alpha).

    Raises
    ------
    InconsistentPairError
        If fhat is not the spherical transform of f, unless waived.
    """
    quad = resolve_quadrature(quad)
    if not waive_consistency and f.kind != "zero" and fhat.kind != "zero":
        check_pair(space, f, fhat, quad)
    label = f"beurling {f.describe()} on {space.name} (d={cfg.d}, c={cfg.c:g}, eps={cfg.eps:g})"
    return _cross_functional(space, f, space, fhat, cfg, quad, label)


def demange_pair(space1: SpaceParams, f1: RadialProfile, fhat1: SpectralProfile,
                 space2: SpaceParams, f2: RadialProfile, fhat2: SpectralProfile,
                 d: int, quad=None, cfg: BeurlingConfig = None, waive_consistency: bool = False):
    """
    Both cross conditions for functions on two spaces.

    Condition (1) pairs f1 (radial side of space1) with fhat2 (spectral side
    of space2); condition (2) pairs f2 with fhat1. Each uses the Ξ, Δ of its
    radial space and the μ of its spectral space, with Ξ to the first power.

    Returns
    -------
    (ConvergenceReport, ConvergenceReport)
    """
    quad = resolve_quadrature(quad)
    cfg = BeurlingConfig(d=d) if cfg is None else cfg
    if not waive_consistency:
        for space, f, fhat in ((space1, f1, fhat1), (space2, f2, fhat2)):
            if f.kind != "zero" and fhat.kind != "zero":
                check_pair(space, f, fhat, quad)
    first = _cross_functional(space1, f1, space2, fhat2, cfg, quad, f"demange (1) {space1.name} x {space2.name}")
    second = _cross_functional(space2, f2, space1, fhat1, cfg, quad, f"demange (2) {space2.name} x {space1.name}")
    return first, second


def abel_side_functional(space: SpaceParams, f: RadialProfile, fhat: SpectralProfile, c: float, eps: float,
                         d: int, quad=None, cfg: BeurlingConfig = None,
                         waive_consistency: bool = False) -> ConvergenceReport:
    """
    ∫_ℝ∫_ℝ |𝒜f(t)| |f̂(λ)| e^{c|λ||t|} e^{ερ|t|} (1+|t|+|λ|)^{-d} dt dλ along the ladder.

    𝒜f is taken from fhat (ℱ𝒜f = f̂), in closed form for Gaussian-type spectra.
    Both integrands are even, so the quarter-plane integral is scaled by 4.
    """
    quad = resolve_quadrature(quad)
    cfg = BeurlingConfig(d=d, c=c, eps=eps) if cfg is None else cfg
    label = f"abel-side {fhat.describe()} on {space.name} (d={d}, c={c:g}, eps={eps:g})"
    if f.kind == "zero" or fhat.kind == "zero":
        zeros = np.full(len(cfg.ladder), -np.inf)
        return _report(zeros, cfg, None, label)
    if not waive_consistency:
        check_pair(space, f, fhat, quad)

    end = float(fhat.grid[-1]) if fhat.kind == "tabulated" else np.inf

    def log_line(t):
        return abel_log_abs_from_spectrum(space, fhat, t, quad) + eps * space.rho * t

    def log_spectral(lam):
        return _masked(lambda x: spectral_log_abs(space, fhat, x, quad), lam, end)

    log_partials = _ladder_log_partials(cfg.ladder, quad, log_line, log_spectral, c, d, math.log(4.0))
    alpha = _ridge_alpha(cfg, fhat)
    log_ridge = None
    if alpha is not None:
        log_ridge = _ridge_log_partials(cfg.ladder, quad, log_line, log_spectral, c, d, alpha) + math.log(4.0)
    return _report(log_partials, cfg, log_ridge, label)
