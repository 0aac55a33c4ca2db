"""
Tests for Heat Kernel Module

Tests cover:
- heat_spectral() values and time validation
- Closed-form h3 heat kernel against the quadrature inverse
- Radial decay of h_t on every registry space
- total_mass() on h3 and the generic registry spaces
- semigroup_defect() for the (t, s) pairs used by the self-test
- anker_ratio() stability under grid refinement
- HeatDerivativeForm evaluation, K-type and degree validation, spatial synthesis
"""

import math

import pytest
import numpy as np

from common.errors import ConfigError, KTypeError, ProfileError
from heat.heat_kernel import (
    HeatDerivativeForm,
    anker_ratio,
    heat_derivative_eval,
    heat_kernel,
    heat_spectral,
    log_heat_kernel,
    semigroup_defect,
    spatial_profile,
    total_mass,
)
from space.symmetric_space import KTypeIndex, default_registry, model_space
from transforms.profiles import radial_values
from transforms.quadrature import default_quadrature


# -------------------------------------------------------------------
# Fixtures
# -------------------------------------------------------------------

@pytest.fixture
def h3():
    return model_space("h3")


@pytest.fixture
def quad():
    return default_quadrature()


@pytest.fixture
def generic_spaces():
    """Registry spaces other than h3."""
    return [space for space in default_registry() if not space.is_h3]


def h3_heat(t, r):
    """(4πt)^{-3/2} e^{-t} (r/sinh r) e^{-r²/4t}."""
    r = np.asarray(r, dtype=float)
    xi = np.where(r == 0, 1.0, r / np.sinh(np.where(r == 0, 1.0, r)))
    return (4 * math.pi * t) ** -1.5 * math.exp(-t) * xi * np.exp(-r ** 2 / (4 * t))


# -------------------------------------------------------------------
# heat_spectral() Tests
# -------------------------------------------------------------------

class TestHeatSpectral:
    def test_values(self, h3):
        assert heat_spectral(h3, 1.0, 0.0) == pytest.approx(math.exp(-1.0))
        assert heat_spectral(h3, 0.5, 2.0) == pytest.approx(math.exp(-2.5))

    def test_rho_shift(self):
        space = model_space("quaternionic_hyperbolic(2)")
        assert heat_spectral(space, 0.1, 0.0) == pytest.approx(math.exp(-2.5))

    def test_complex_argument(self, h3):
        # λ = i gives λ² + ρ² = 0
        assert heat_spectral(h3, 3.0, 1j) == pytest.approx(1.0)

    def test_rejects_nonpositive_time(self, h3):
        with pytest.raises(ProfileError):
            heat_spectral(h3, 0.0, 1.0)


# -------------------------------------------------------------------
# heat_kernel() Tests
# -------------------------------------------------------------------

class TestHeatKernel:
    def test_closed_form_values(self, h3):
        r = np.array([0.0, 0.5, 2.0, 6.0])
        assert np.allclose(heat_kernel(h3, 1.0, r), h3_heat(1.0, r), rtol=1e-13)

    def test_closed_form_matches_quadrature(self, h3, quad):
        r = np.linspace(0, 10, 41)
        for t in (0.5, 1.0, 2.0):
            closed = heat_kernel(h3, t, r, method="closed_form")
            numeric = heat_kernel(h3, t, r, method="quadrature", quad=quad)
            assert np.max(np.abs(closed - numeric)) < 1e-8

    def test_scalar_input(self, h3):
        assert isinstance(heat_kernel(h3, 1.0, 1.0), float)

    def test_closed_form_only_on_h3(self, generic_spaces):
        for space in generic_spaces:
            with pytest.raises(ValueError):
                heat_kernel(space, 1.0, 1.0, method="closed_form")

    def test_unknown_method(self, h3):
        with pytest.raises(ValueError):
            heat_kernel(h3, 1.0, 1.0, method="parametrix")

    def test_negative_radius(self, h3):
        with pytest.raises(ProfileError):
            heat_kernel(h3, 1.0, -1.0)

    def test_log_kernel_far_tail(self, h3):
        r = np.array([60.0])
        expected = -1.5 * math.log(4 * math.pi) - 1.0 + math.log(60.0) - (60.0 - math.log(2.0)) - 900.0
        assert log_heat_kernel(h3, 1.0, r)[0] == pytest.approx(expected, rel=1e-12)

    def test_log_kernel_generic_matches(self, generic_spaces, quad):
        r = np.array([0.5, 2.0, 4.0])
        for space in generic_spaces:
            direct = np.log(heat_kernel(space, 1.0, r, quad=quad))
            assert np.allclose(log_heat_kernel(space, 1.0, r, quad), direct, rtol=1e-8), space.name

    def test_positive(self, generic_spaces, quad):
        r = np.linspace(0, 10, 21)
        for space in generic_spaces:
            assert np.all(heat_kernel(space, 1.0, r, quad=quad) > 0), space.name

    @pytest.mark.parametrize("t", [0.25, 1.0, 4.0])
    def test_radially_decreasing(self, quad, t):
        r = np.linspace(0, 10, 41)
        for space in default_registry():
            h = np.asarray(heat_kernel(space, t, r, quad=quad))
            assert np.all(h > 0), space.name
            assert np.all(np.diff(h) <= 1e-12 * h[0]), space.name


# -------------------------------------------------------------------
# Mass and Semigroup Tests
# -------------------------------------------------------------------

class TestMassAndSemigroup:
    def test_h3_mass(self, h3, quad):
        for t in (0.1, 1.0, 10.0):
            assert abs(total_mass(h3, t, quad) - 1.0) < 1e-6

    def test_generic_mass(self, generic_spaces, quad):
        for space in generic_spaces:
            assert abs(total_mass(space, 1.0, quad) - 1.0) < 1e-5, space.name

    def test_semigroup(self, h3, quad):
        for t, s in ((1.0, 1.0), (0.25, 4.0)):
            assert semigroup_defect(h3, t, s, quad) < 1e-6

    def test_semigroup_generic(self, quad):
        space = model_space("complex_hyperbolic(2)")
        assert semigroup_defect(space, 1.0, 1.0, quad, grid=np.linspace(0, 10, 41)) < 1e-6


# -------------------------------------------------------------------
# anker_ratio() Tests
# -------------------------------------------------------------------

class TestAnkerRatio:
    def test_keys(self, h3):
        result = anker_ratio(h3, 1.0)
        assert set(result) == {"sup_ratio", "argmax_r"}
        assert result["sup_ratio"] > 0

    def test_stable_under_refinement(self, h3):
        for t in (1.0, 4.0):
            coarse = anker_ratio(h3, t, np.linspace(0, 20, 321))
            fine = anker_ratio(h3, t, np.linspace(0, 20, 641))
            assert abs(fine["sup_ratio"] / coarse["sup_ratio"] - 1) < 0.01

    def test_ratio_bounded(self, h3):
        # on h3 the ratio is (4π)^{-3/2} r e^{r}/sinh(r) /(1+r²), bounded for all r
        assert anker_ratio(h3, 1.0)["sup_ratio"] < 1.0


# -------------------------------------------------------------------
# HeatDerivativeForm Tests
# -------------------------------------------------------------------

class TestHeatDerivativeForm:
    def test_kostant_example(self, h3):
        form = HeatDerivativeForm(0.5, {(KTypeIndex(2, 0), 1): (1.0,)})
        value = heat_derivative_eval(form, h3, 1.0)
        assert value == pytest.approx((0.25 + 0.75j) * 0.6065307, abs=1e-7)

    def test_sums_terms(self, h3):
        form = HeatDerivativeForm(1.0, {
            (KTypeIndex(0, 0), 1): (1.0,),
            (KTypeIndex(0, 0), 2): (0.0, 1.0),
        })
        lam = np.array([0.0, 2.0])
        assert np.allclose(heat_derivative_eval(form, h3, lam), (1 + lam ** 2) * np.exp(-lam ** 2))

    def test_k_types(self):
        form = HeatDerivativeForm(1.0, {
            (KTypeIndex(1, 1), 1): (1.0,),
            (KTypeIndex(0, 0), 1): (1.0,),
            (KTypeIndex(1, 1), 2): (2.0,),
        })
        assert form.k_types == (KTypeIndex(0, 0), KTypeIndex(1, 1))

    def test_validate_for(self, h3):
        form = HeatDerivativeForm(1.0, {(KTypeIndex(1, -1), 1): (1.0,)})
        assert form.validate_for(h3, 6) is form
        with pytest.raises(KTypeError):
            form.validate_for(h3, 5)

    def test_degree_bound_from_verdict(self, h3):
        within = HeatDerivativeForm(1.0, {(KTypeIndex(0, 0), 1): (1.0,)}, deg_bound=1.5)
        assert within.deg_bound == 1.5
        with pytest.raises(ConfigError):
            HeatDerivativeForm(1.0, {(KTypeIndex(0, 0), 2): (1.0,)}, deg_bound=1.5)

    def test_validate_for_checks_degree(self, h3):
        form = HeatDerivativeForm(1.0, {(KTypeIndex(0, 0), 2): (1.0,)})
        assert form.validate_for(h3, 8) is form
        with pytest.raises(ConfigError):
            form.validate_for(h3, 6)

    def test_construction_errors(self):
        with pytest.raises(ProfileError):
            HeatDerivativeForm(0.0)
        with pytest.raises(KTypeError):
            HeatDerivativeForm(1.0, {((0, 0), 1): (1.0,)})
        with pytest.raises(ProfileError):
            HeatDerivativeForm(1.0, {(KTypeIndex(0, 0), 0): (1.0,)})
        with pytest.raises(ProfileError):
            HeatDerivativeForm(1.0, {(KTypeIndex(0, 0), 1): ()})


class TestSpatialProfile:
    def test_trivial_form_is_scaled_heat_kernel(self, h3, quad):
        form = HeatDerivativeForm(1.0, {(KTypeIndex(0, 0), 1): (1.0,)})
        r = np.linspace(0, 6, 13)
        f = spatial_profile(form, h3, quad, grid=np.linspace(0, 8, 321))
        # e^{-λ²} = e^{ρ²}·ĥ_1 on h3
        assert np.allclose(radial_values(h3, f, r), math.e * h3_heat(1.0, r), rtol=1e-5, atol=1e-12)

    def test_rejects_nontrivial_k_types(self, h3):
        form = HeatDerivativeForm(1.0, {(KTypeIndex(2, 0), 1): (1.0,)})
        with pytest.raises(ProfileError):
            spatial_profile(form, h3)

    def test_zero_form(self, h3):
        form = HeatDerivativeForm(1.0, {(KTypeIndex(0, 0), 1): (0.0,)})
        assert spatial_profile(form, h3).kind == "zero"
