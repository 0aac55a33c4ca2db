"""
Verdicts — Case Analysis for the Beurling-Type Uncertainty Theorems

Maps theorem parameters to the conclusion the theorem forces:
  1. verdict_beurling()        — exponent d against d_X
  2. verdict_gelfand_shilov()  — αβ against 1, then N against d_X + 1
  3. verdict_morgan()          — (ap)^{1/p}(bq)^{1/q} against 1
  4. verdict_hardy()           — ab against 1/4
  5. verdict_cowling_price()   — ab against 1/4, then n against d_X and d_X + p₂

Threshold equalities are decided with an absolute tolerance on the
decision quantity (verdicts.threshold_tol, 1e-12 by default).
"""

import math
import logging
from dataclasses import dataclass
from typing import Optional

from common.settings import section
from space.symmetric_space import SpaceParams, enumerate_k_types

logger = logging.getLogger(__name__)

ZERO = "Zero"
HEAT_KERNEL_MULTIPLE = "HeatKernelMultiple"
HEAT_DERIVATIVE = "HeatDerivative"
NOT_DETERMINED = "NotDetermined"

# Higher is a stronger conclusion
OUTCOME_STRENGTH = {ZERO: 3, HEAT_KERNEL_MULTIPLE: 2, HEAT_DERIVATIVE: 1, NOT_DETERMINED: 0}


@dataclass(frozen=True)
class Verdict:
    outcome: str
    cited_case: str
    F: tuple = ()
    deg_bound: Optional[float] = None
    heat_time: Optional[float] = None

    @property
    def strength(self) -> int:
        return OUTCOME_STRENGTH[self.outcome]

    def to_dict(self) -> dict:
        return {
            "verdict": self.outcome,
            "cited_case": self.cited_case,
            "F": [str(delta) for delta in self.F],
            "deg_bound": self.deg_bound,
            "heat_time": self.heat_time,
        }


def _tolerance() -> float:
    return float(section("verdicts")["threshold_tol"])


def _compare(value: float, threshold: float) -> int:
    """−1, 0 or 1 as value is below, at (within tolerance) or above threshold."""
    gap = value - threshold
    if abs(gap) <= _tolerance():
        return 0
    return 1 if gap > 0 else -1


def _positive(**params):
    for name, value in params.items():
        if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
            raise ValueError(f"{name} must be a positive real, got {value}")


def _nonnegative_int(**params):
    for name, value in params.items():
        if isinstance(value, bool) or int(value) != value or value < 0:
            raise ValueError(f"{name} must be a nonnegative integer, got {value}")


def _heat_derivative(bound: float, case: str) -> Verdict:
    return Verdict(HEAT_DERIVATIVE, case, F=enumerate_k_types(bound), deg_bound=float(bound))


# -------------------------------------------------------------------
# 1. Beurling
# -------------------------------------------------------------------

def verdict_beurling(space: SpaceParams, d: int) -> Verdict:
    """d ≤ d_X forces f = 0; otherwise f is a heat derivative over F = {δ : p_δ < (d − d_X)/2}."""
    _nonnegative_int(d=d)
    if d <= space.d_x:
        return Verdict(ZERO, "beurling(zero)")
    return _heat_derivative((d - space.d_x) / 2, "beurling(heat_derivative)")


# -------------------------------------------------------------------
# 2. Gelfand–Shilov
# -------------------------------------------------------------------

def verdict_gelfand_shilov(space: SpaceParams, alpha: float, beta: float, p: float, N: int) -> Verdict:
    _positive(alpha=alpha, beta=beta)
    if not p > 1:
        raise ValueError(f"p must exceed 1, got {p}")
    _nonnegative_int(N=N)

    side = _compare(alpha * beta, 1.0)
    if side > 0:
        return Verdict(ZERO, "gelfand_shilov(a)")
    if side < 0:
        return Verdict(NOT_DETERMINED, "gelfand_shilov(below_threshold)")
    if _compare(p, 2.0) != 0:
        return Verdict(ZERO, "gelfand_shilov(b)")
    if N < space.d_x + 1:
        return Verdict(ZERO, "gelfand_shilov(c)")
    if N == space.d_x + 1:
        return Verdict(HEAT_KERNEL_MULTIPLE, "gelfand_shilov(d)", heat_time=beta ** 2 / 2)
    return _heat_derivative(N - space.d_x, "gelfand_shilov(d)")


# -------------------------------------------------------------------
# 3. Morgan and Hardy
# -------------------------------------------------------------------

def verdict_morgan(space: SpaceParams, a: float, b: float, p: float, n: int) -> Verdict:
    """
    Morgan's case table with q the conjugate exponent of p.

    At the threshold with p = 2 the heat kernel only fits the radial bound
    when n ≥ (mγ + m2γ − 2)/2; below that the conclusion is f = 0.
    """
    _positive(a=a, b=b)
    if not p > 1:
        raise ValueError(f"p must exceed 1, got {p}")
    _nonnegative_int(n=n)
    q = p / (p - 1)
    threshold = (a * p) ** (1 / p) * (b * q) ** (1 / q)

    side = _compare(threshold, 1.0)
    if side > 0:
        return Verdict(ZERO, "morgan(a)")
    if side < 0:
        return Verdict(NOT_DETERMINED, "morgan(below_threshold)")
    if _compare(p, 2.0) != 0:
        return Verdict(ZERO, "morgan(b)")
    if n < (space.m_gamma + space.m_2gamma - 2) / 2:
        return Verdict(ZERO, "morgan(remark)")
    return Verdict(HEAT_KERNEL_MULTIPLE, "morgan(c)", heat_time=b)


def verdict_hardy(space: SpaceParams, a: float, b: float) -> Verdict:
    _positive(a=a, b=b)
    side = _compare(a * b, 0.25)
    if side > 0:
        return Verdict(ZERO, "hardy(a)")
    if side == 0:
        return Verdict(HEAT_KERNEL_MULTIPLE, "hardy(b)", heat_time=b)
    return Verdict(NOT_DETERMINED, "hardy(below_threshold)")


# -------------------------------------------------------------------
# 4. Cowling–Price
# -------------------------------------------------------------------

def verdict_cowling_price(space: SpaceParams, a: float, b: float, p1: float, p2: float, m: int, n: int) -> Verdict:
    """
    Cowling–Price case table; p1 and p2 lie in [1, ∞] with math.inf for ∞.

    p₂ = ∞ makes |f̂|e^{bλ²} bounded, which pins f to a heat-kernel multiple
    at ab = 1/4 (with p₁ = p₂ = ∞ this is Hardy's case).
    """
    _positive(a=a, b=b)
    for name, value in (("p1", p1), ("p2", p2)):
        if not (isinstance(value, (int, float)) and not math.isnan(value) and value >= 1):
            raise ValueError(f"{name} must lie in [1, inf], got {value}")
    _nonnegative_int(m=m, n=n)

    side = _compare(a * b, 0.25)
    if side > 0:
        return Verdict(ZERO, "cowling_price(a)")
    if side < 0:
        return Verdict(NOT_DETERMINED, "cowling_price(below_threshold)")
    if math.isinf(p2):
        return Verdict(HEAT_KERNEL_MULTIPLE, "cowling_price(b)", heat_time=b)
    if n <= space.d_x:
        return Verdict(ZERO, "cowling_price(b)")
    if n <= space.d_x + p2:
        return Verdict(HEAT_KERNEL_MULTIPLE, "cowling_price(b)", heat_time=b)
    return _heat_derivative((n - space.d_x) / p2, "cowling_price(b)")
