"""
Self-test — Numerical Acceptance Checks for the Harmonic Toolkit

Each check sweeps one family of identities and returns the list of issues
it found; a suite passes when no check reports an issue.
Checks: Kostant degree and symmetry, spectral heat identity, round trips,
heat mass and semigroup, Fourier slice, Plancherel sandwich, Beurling
ladder, sharpness pair, verdict golden table.

Suites: kostant, spectral, heat, slice, plancherel, beurling, sharpness,
verdicts, all, and quick (kostant + verdicts + heat on h3).
"""

import math
import time
import logging

import numpy as np
from scipy.integrate import trapezoid

from common.errors import HarmonicError
from space.symmetric_space import default_registry, enumerate_k_types, model_space
from specfun.spherical_functions import fit_plancherel_asymptotics, kostant_coefficients, kostant_polynomial
from transforms.profiles import LineProfile, RadialProfile, SpectralProfile
from transforms.quadrature import resolve_quadrature
from transforms.spherical_transform import (
    abel_values,
    fourier_values,
    inverse_values,
    spherical_transform,
    spherical_transform_values,
)
from heat.heat_kernel import anker_ratio, heat_kernel_values, heat_spectral, semigroup_defect, total_mass
from uncertainty.beurling_functional import BeurlingConfig, beurling_functional
from uncertainty.sharpness import check_sharpness_bounds, sharpness_construct, sharpness_verify
from uncertainty import verdicts

logger = logging.getLogger(__name__)

# (theorem, space, parameters, expected outcome, expected extra)
GOLDEN_VERDICTS = (
    ("hardy", "h3", dict(a=1.0, b=1.0), verdicts.ZERO, None),
    ("hardy", "h3", dict(a=0.25, b=1.0), verdicts.HEAT_KERNEL_MULTIPLE, ("heat_time", 1.0)),
    ("hardy", "h3", dict(a=0.1, b=1.0), verdicts.NOT_DETERMINED, None),
    ("morgan", "h3", dict(a=1.0, b=1.0, p=2.0, n=0), verdicts.ZERO, None),
    ("morgan", "h3", dict(a=1 / 3, b=2 / 3, p=3.0, n=0), verdicts.ZERO, None),
    ("morgan", "h3", dict(a=0.25, b=1.0, p=2.0, n=0), verdicts.HEAT_KERNEL_MULTIPLE, ("heat_time", 1.0)),
    ("morgan", "quaternionic_hyperbolic(2)", dict(a=0.25, b=1.0, p=2.0, n=1), verdicts.ZERO, None),
    ("morgan", "h3", dict(a=0.1, b=1.0, p=2.0, n=0), verdicts.NOT_DETERMINED, None),
    ("gs", "h3", dict(alpha=2.0, beta=1.0, p=2.0, N=0), verdicts.ZERO, None),
    ("gs", "h3", dict(alpha=1.0, beta=1.0, p=3.0, N=0), verdicts.ZERO, None),
    ("gs", "h3", dict(alpha=1.0, beta=1.0, p=2.0, N=2), verdicts.ZERO, None),
    ("gs", "h3", dict(alpha=1.0, beta=1.0, p=2.0, N=4), verdicts.HEAT_KERNEL_MULTIPLE, ("heat_time", 0.5)),
    ("gs", "h3", dict(alpha=1.0, beta=1.0, p=2.0, N=6), verdicts.HEAT_DERIVATIVE, ("deg_bound", 3.0)),
    ("cp", "h3", dict(a=1.0, b=1.0, p1=2.0, p2=2.0, m=0, n=0), verdicts.ZERO, None),
    ("cp", "h3", dict(a=0.25, b=1.0, p1=2.0, p2=2.0, m=0, n=2), verdicts.ZERO, None),
    ("cp", "h3", dict(a=0.25, b=1.0, p1=2.0, p2=2.0, m=0, n=4), verdicts.HEAT_KERNEL_MULTIPLE, ("heat_time", 1.0)),
    ("cp", "h3", dict(a=0.25, b=1.0, p1=2.0, p2=2.0, m=0, n=9), verdicts.HEAT_DERIVATIVE, ("deg_bound", 3.0)),
    ("cp", "h3", dict(a=0.25, b=1.0, p1=math.inf, p2=math.inf, m=0, n=0), verdicts.HEAT_KERNEL_MULTIPLE, None),
    ("beurling", "h3", dict(d=3), verdicts.ZERO, None),
    ("beurling", "h3", dict(d=6), verdicts.HEAT_DERIVATIVE, ("deg_bound", 1.5)),
)

VERDICT_FUNCTIONS = {
    "hardy": verdicts.verdict_hardy,
    "morgan": verdicts.verdict_morgan,
    "gs": verdicts.verdict_gelfand_shilov,
    "cp": verdicts.verdict_cowling_price,
    "beurling": verdicts.verdict_beurling,
}


# -------------------------------------------------------------------
# 1. Special functions
# -------------------------------------------------------------------

def check_kostant(quad=None, spaces=None, p_max: int = 8):
    """Degree of Q_δ equals p_δ and conj Q_δ(λ) = Q_δ(−λ) on real λ."""
    spaces = spaces or (model_space("h3"), model_space("quaternionic_hyperbolic(2)"))
    lam = np.linspace(-5.0, 5.0, 41)
    issues = []

    for space in spaces:
        for delta in enumerate_k_types(p_max + 1):
            coeffs = kostant_coefficients(space, delta)
            degree = len(np.trim_zeros(coeffs, "b")) - 1
            if degree != delta.p:
                issues.append(f"{space.name} {delta}: degree {degree} instead of {delta.p}")

            q_plus = np.asarray(kostant_polynomial(space, delta, lam))
            q_minus = np.asarray(kostant_polynomial(space, delta, -lam))
            defect = np.max(np.abs(np.conj(q_plus) - q_minus) / np.maximum(1.0, np.abs(q_plus)))
            if defect > 1e-12:
                issues.append(f"{space.name} {delta}: conjugate symmetry defect {defect:.3e}")
        logger.info(f"  {space.name}: Kostant polynomials checked up to p = {p_max}")

    logger.info(f"Kostant check complete — {len(issues)} issues found")
    return issues


def check_plancherel(quad=None, spaces=None):
    """Fitted sandwich constants on λ ∈ [10, 1000] must satisfy c2/c1 < 10."""
    issues = []
    for space in spaces or default_registry():
        fit = fit_plancherel_asymptotics(space)
        logger.info(f"  {space.name}: c2/c1 = {fit['spread']:.4f}")
        if not fit["spread"] < 10:
            issues.append(f"{space.name}: Plancherel spread {fit['spread']:.3f}")
    logger.info(f"Plancherel check complete — {len(issues)} issues found")
    return issues


# -------------------------------------------------------------------
# 2. Transforms
# -------------------------------------------------------------------

def check_spectral_identity(quad=None, spaces=None):
    """Spherical transform of heat(t) on h3 against e^{-t(λ²+ρ²)}."""
    quad = resolve_quadrature(quad)
    space = model_space("h3")
    lam = np.linspace(0.0, 10.0, 101)
    issues = []

    for t in (0.25, 1.0, 4.0):
        numeric = np.asarray(spherical_transform_values(space, RadialProfile.heat(t), lam, quad)).real
        exact = np.asarray(heat_spectral(space, t, lam)).real
        abs_err = float(np.max(np.abs(numeric - exact)))
        visible = exact >= 1e-3
        rel_err = float(np.max(np.abs(numeric - exact)[visible] / exact[visible])) if np.any(visible) else 0.0
        logger.info(f"  heat({t:g}): abs {abs_err:.2e}, rel {rel_err:.2e}")
        if abs_err >= 1e-6 or rel_err >= 1e-6:
            issues.append(f"heat({t:g}): spectral identity error abs {abs_err:.3e}, rel {rel_err:.3e}")

    logger.info(f"Spectral identity check complete — {len(issues)} issues found")
    return issues


def check_round_trip(quad=None, spaces=None):
    """Relative L²(dt) error of inverse∘forward on gaussian(1)."""
    quad = resolve_quadrature(quad)
    gaussian = RadialProfile.gaussian(1.0)
    r = np.linspace(0.0, 6.0, 241)
    issues = []

    for space in spaces or default_registry():
        fhat = spherical_transform(space, gaussian, quad)
        back = np.asarray(inverse_values(space, fhat, r, quad)).real
        exact = np.exp(-r ** 2)
        error = math.sqrt(trapezoid((back - exact) ** 2, r) / trapezoid(exact ** 2, r))
        logger.info(f"  {space.name}: round trip L2 error {error:.2e}")
        if error >= 1e-6:
            issues.append(f"{space.name}: round trip error {error:.3e}")

    logger.info(f"Round-trip check complete — {len(issues)} issues found")
    return issues


def check_fourier_slice(quad=None, spaces=None):
    """max |ℱ(𝒜f) − f̂| on h3 for heat(0.5), heat(2) and gaussian(1)."""
    quad = resolve_quadrature(quad)
    space = model_space("h3")
    lam = np.linspace(0.0, 10.0, 101)
    issues = []

    for f in (RadialProfile.heat(0.5), RadialProfile.heat(2.0), RadialProfile.gaussian(1.0)):
        line = LineProfile.analytic(lambda s, f=f: abel_values(space, f, s, quad), (-20.0, 20.0), f.describe())
        sliced = fourier_values(line, lam, quad)
        direct = np.asarray(spherical_transform_values(space, f, lam, quad))
        defect = float(np.max(np.abs(sliced - direct)))
        logger.info(f"  {f.describe()}: slice defect {defect:.2e}")
        if defect >= 1e-6:
            issues.append(f"{f.describe()}: Fourier slice defect {defect:.3e}")

    logger.info(f"Fourier slice check complete — {len(issues)} issues found")
    return issues


# -------------------------------------------------------------------
# 3. Heat kernel
# -------------------------------------------------------------------

def check_heat(quad=None, spaces=None):
    """Mass, closed form against quadrature, semigroup and envelope stability."""
    quad = resolve_quadrature(quad)
    h3 = model_space("h3")
    issues = []

    for t in (0.1, 1.0, 10.0):
        drift = abs(total_mass(h3, t, quad) - 1.0)
        if drift >= 1e-6:
            issues.append(f"h3: mass at t={t:g} off by {drift:.3e}")
    for space in spaces or default_registry():
        if space.is_h3:
            continue
        drift = abs(total_mass(space, 1.0, quad) - 1.0)
        if drift >= 1e-5:
            issues.append(f"{space.name}: mass at t=1 off by {drift:.3e}")

    r = np.linspace(0.0, 10.0, 201)
    for t in (0.5, 1.0, 2.0):
        closed = heat_kernel_values(h3, t, r, quad, method="closed_form")
        numeric = heat_kernel_values(h3, t, r, quad, method="quadrature")
        gap = float(np.max(np.abs(closed - numeric)))
        logger.info(f"  h3 t={t:g}: closed form vs quadrature {gap:.2e}")
        if gap >= 1e-8:
            issues.append(f"h3: closed form and quadrature differ by {gap:.3e} at t={t:g}")

    for t, s in ((1.0, 1.0), (0.25, 4.0)):
        defect = semigroup_defect(h3, t, s, quad)
        logger.info(f"  h3 semigroup ({t:g}, {s:g}): {defect:.2e}")
        if defect >= 1e-6:
            issues.append(f"h3: semigroup defect {defect:.3e} at ({t:g}, {s:g})")

    for t in (1.0, 4.0):
        coarse = anker_ratio(h3, t, np.linspace(0.0, 20.0, 321), quad)["sup_ratio"]
        fine = anker_ratio(h3, t, np.linspace(0.0, 20.0, 641), quad)["sup_ratio"]
        change = abs(fine - coarse) / coarse
        if change >= 0.01:
            issues.append(f"h3: envelope ratio moved {change:.2%} under grid doubling at t={t:g}")

    logger.info(f"Heat check complete — {len(issues)} issues found")
    return issues


# -------------------------------------------------------------------
# 4. Uncertainty
# -------------------------------------------------------------------

def check_beurling(quad=None, spaces=None):
    """heat(1) on h3 converges at d = 8 and diverges at d = 3, ridge oracle agreeing."""
    quad = resolve_quadrature(quad)
    space = model_space("h3")
    f, fhat = RadialProfile.heat(1.0), SpectralProfile.heat_spectral(1.0)
    issues = []

    for d, expected in ((8, "converged"), (3, "diverging")):
        report = beurling_functional(space, f, fhat, BeurlingConfig(d=d), quad)
        if report.classification != expected:
            issues.append(f"d={d}: classified {report.classification}, expected {expected}")
        if report.ridge_agrees is False:
            issues.append(f"d={d}: ridge oracle says {report.ridge_classification}")

    logger.info(f"Beurling check complete — {len(issues)} issues found")
    return issues


def check_sharpness(quad=None, spaces=None):
    """ζ = 0.1 pair: both envelope checks pass, c = 0.9 converges and c = 1.1 diverges."""
    quad = resolve_quadrature(quad)
    construction = sharpness_construct(0.1, quad=quad)
    issues = [f"{check.name} failed (C={check.constant:.3g})"
              for check in check_sharpness_bounds(construction, quad) if not check.passed]

    for c, expected in ((0.9, "converged"), (1.1, "diverging")):
        report = sharpness_verify(construction, c=c, eps=0.0, d=8, quad=quad)
        if report.classification != expected:
            issues.append(f"c={c:g}: classified {report.classification}, expected {expected}")

    logger.info(f"Sharpness check complete — {len(issues)} issues found")
    return issues


def check_verdicts(quad=None, spaces=None):
    """Golden verdict table plus the p = 2 Morgan-to-Hardy reduction."""
    issues = []
    for theorem, space_name, params, outcome, extra in GOLDEN_VERDICTS:
        verdict = VERDICT_FUNCTIONS[theorem](model_space(space_name), **params)
        if verdict.outcome != outcome:
            issues.append(f"{theorem} {params} on {space_name}: {verdict.outcome}, expected {outcome}")
        elif extra is not None and not math.isclose(getattr(verdict, extra[0]), extra[1]):
            issues.append(f"{theorem} {params}: {extra[0]} = {getattr(verdict, extra[0])}, expected {extra[1]}")

    h3 = model_space("h3")
    for a, b in ((1.0, 1.0), (0.25, 1.0), (0.125, 2.0), (0.1, 1.0)):
        hardy = verdicts.verdict_hardy(h3, a, b)
        morgan = verdicts.verdict_morgan(h3, a, b, 2.0, 0)
        if hardy.outcome != morgan.outcome:
            issues.append(f"Morgan p=2 at (a={a:g}, b={b:g}) gives {morgan.outcome}, Hardy {hardy.outcome}")

    logger.info(f"Verdict check complete — {len(issues)} issues found")
    return issues


# -------------------------------------------------------------------
# 5. Suites
# -------------------------------------------------------------------

SUITES = {
    "kostant": (check_kostant,),
    "spectral": (check_spectral_identity, check_round_trip),
    "heat": (check_heat,),
    "slice": (check_fourier_slice,),
    "plancherel": (check_plancherel,),
    "beurling": (check_beurling,),
    "sharpness": (check_sharpness,),
    "verdicts": (check_verdicts,),
}
SUITES["all"] = tuple(check for name in list(SUITES) for check in SUITES[name])
SUITES["quick"] = (check_kostant, check_verdicts, check_heat)


def run_selftest(suite: str = "quick", quad=None) -> dict:
    """
    Run every check of a suite and aggregate the issues.

    Returns
    -------
    dict
        {"suite", "status": SUCCESS or FAILURE, "checks": [{check, issues}]}
    """
    if suite not in SUITES:
        raise ValueError(f"Unknown selftest suite: {suite!r}; choose from {sorted(SUITES)}")
    quad = resolve_quadrature(quad)
    spaces = (model_space("h3"),) if suite == "quick" else None

    results = []
    for check in SUITES[suite]:
        started = time.perf_counter()
        try:
            issues = check(quad, spaces)
        except HarmonicError as e:
            issues = [f"raised {type(e).__name__}: {e}"]
        elapsed = time.perf_counter() - started
        status = "✓" if not issues else "✗"
        logger.info(f"{status} {check.__name__} ({elapsed:.1f}s)")
        for issue in issues:
            logger.warning(f"  {issue}")
        results.append({"check": check.__name__, "issues": issues})

    all_issues = [issue for result in results for issue in result["issues"]]
    status = "SUCCESS" if not all_issues else "FAILURE"
    logger.info(f"Selftest {suite} — status: {status}, issues: {len(all_issues)}")
    return {"suite": suite, "status": status, "checks": results}
