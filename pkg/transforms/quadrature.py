"""
Quadrature — Composite Gauss–Legendre Rules

Provides:
  1. QuadratureScheme        — panel density, truncation radii, tolerances
  2. default_quadrature()    — scheme built from config/harmonic_config.yaml
  3. gauss_legendre_panels() — nodes and weights on [a, b], panels aligned to 1/panels_per_unit
  4. gauss_hermite_rule()    — nodes and weights for ∫ e^{-x²} g(x) dx

Panels are summed left to right with numpy reductions over fixed-order
arrays, so every integral is bit-stable for a given scheme.
"""

import math
import logging
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np
from numpy.polynomial.hermite import hermgauss
from numpy.polynomial.legendre import leggauss

from common.errors import ConfigError
from common.settings import section, quad_panels_override

logger = logging.getLogger(__name__)


# -------------------------------------------------------------------
# 1. Scheme
# -------------------------------------------------------------------

@dataclass(frozen=True)
class QuadratureScheme:
    panels_per_unit: int = 16
    t_max: float = 40.0
    lambda_max: float = 12.0
    abs_tol: float = 1e-10
    rel_tol: float = 1e-8
    nodes_per_panel: int = 8

    def __post_init__(self):
        if int(self.panels_per_unit) != self.panels_per_unit or self.panels_per_unit <= 0:
            raise ConfigError(f"panels_per_unit must be a positive integer, got {self.panels_per_unit}")
        if int(self.nodes_per_panel) != self.nodes_per_panel or self.nodes_per_panel <= 0:
            raise ConfigError(f"nodes_per_panel must be a positive integer, got {self.nodes_per_panel}")
        if self.t_max < 1 or self.lambda_max < 1:
            raise ConfigError(f"t_max and lambda_max must be >= 1, got {self.t_max}, {self.lambda_max}")
        if self.abs_tol <= 0 or self.rel_tol <= 0:
            raise ConfigError("Tolerances must be positive")

    def spectral_cutoff(self, time_scale: float = None) -> float:
        """
        λ cutoff for a spectrum decaying like e^{-τλ²}: max(lambda_max, 8/√τ).

        Without a time scale the configured lambda_max is used.
        """
        if time_scale is None or time_scale <= 0:
            return float(self.lambda_max)
        return max(float(self.lambda_max), 8.0 / math.sqrt(time_scale))

    def refined(self, factor: int = 2) -> "QuadratureScheme":
        """Same scheme with factor × the panel density."""
        return replace(self, panels_per_unit=self.panels_per_unit * factor)

    def nodes(self, a: float, b: float, min_panels: int = 1):
        """Composite Gauss–Legendre nodes and weights on [a, b] for this scheme."""
        return gauss_legendre_panels(a, b, self.panels_per_unit, self.nodes_per_panel, min_panels)


@lru_cache(maxsize=1)
def default_quadrature() -> QuadratureScheme:
    """Scheme from the YAML defaults, honouring HARMONIC_QUAD_PANELS."""
    cfg = dict(section("quadrature"))
    override = quad_panels_override()
    if override is not None:
        logger.info(f"HARMONIC_QUAD_PANELS override: panels_per_unit={override}")
        cfg["panels_per_unit"] = override
    return QuadratureScheme(
        panels_per_unit=int(cfg["panels_per_unit"]),
        t_max=float(cfg["t_max"]),
        lambda_max=float(cfg["lambda_max"]),
        abs_tol=float(cfg["abs_tol"]),
        rel_tol=float(cfg["rel_tol"]),
        nodes_per_panel=int(cfg["nodes_per_panel"]),
    )


def resolve_quadrature(quad) -> QuadratureScheme:
    return default_quadrature() if quad is None else quad


# -------------------------------------------------------------------
# 2. Gauss–Legendre panels
# -------------------------------------------------------------------

@lru_cache(maxsize=32)
def _legendre_reference(order: int):
    nodes, weights = leggauss(order)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def gauss_legendre_panels(a: float, b: float, panels_per_unit: int, order: int, min_panels: int = 1):
    """
    Composite rule on [a, b].

    Panel edges sit on multiples of 1/panels_per_unit when a and b do, so
    truncations at integer radii select whole panels.

    Returns
    -------
    (nodes, weights) : tuple of 1-D arrays, nodes increasing
    """
    if b <= a:
        return np.empty(0), np.empty(0)
    n_panels = max(int(math.ceil((b - a) * panels_per_unit - 1e-9)), int(min_panels))
    edges = np.linspace(a, b, n_panels + 1)
    ref_nodes, ref_weights = _legendre_reference(order)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    nodes = (mid[:, None] + half[:, None] * ref_nodes[None, :]).ravel()
    weights = (half[:, None] * ref_weights[None, :]).ravel()
    return nodes, weights


# -------------------------------------------------------------------
# 3. Gauss–Hermite
# -------------------------------------------------------------------

@lru_cache(maxsize=8)
def gauss_hermite_rule(order: int):
    """Nodes and weights for ∫_ℝ e^{-x²} g(x) dx."""
    nodes, weights = hermgauss(order)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights
