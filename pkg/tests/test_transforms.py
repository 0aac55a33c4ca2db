"""
Tests for Transforms Module

Tests cover:
- Composite Gauss–Legendre panels and QuadratureScheme validation
- clean_tabulation() drops NaN/duplicate rows and enforces a grid from 0
- Profile descriptors, tabulated profiles without extrapolation, LineProfile
- calibrate() constants on h3 and mass_radius()
- spherical_transform() of heat(t) against e^{-t(λ²+ρ²)}
- inverse∘forward round trip on gaussian(1) for every registry space
- Saddle and real-axis inverse rules agree where both apply
- Linearity of spherical_transform() and the Abel transform
- Euclidean Fourier transform, convolution and the Abel transform
"""

import math

import pytest
import numpy as np
import pandas as pd
from scipy.integrate import trapezoid

from common.errors import ConfigError, ProfileError, TruncationError
from space.symmetric_space import default_registry, model_space
from transforms import quadrature
from transforms.calibration import calibrate, mass_radius
from transforms.profiles import (
    LineProfile,
    RadialProfile,
    SpectralProfile,
    clean_tabulation,
    even_polynomial,
    radial_values,
    spectral_values,
)
from transforms.quadrature import QuadratureScheme, default_quadrature, gauss_legendre_panels
from transforms.spherical_transform import (
    abel_transform,
    abel_values,
    abel_values_from_spectrum,
    convolution_values,
    euclidean_convolution,
    fourier_values,
    inverse_fourier_values,
    inverse_spherical_transform,
    inverse_values,
    radial_grid,
    spectral_grid,
    spherical_transform,
    spherical_transform_values,
)


# -------------------------------------------------------------------
# Fixtures
# -------------------------------------------------------------------

@pytest.fixture
def h3():
    return model_space("h3")


@pytest.fixture
def quad():
    """The default quadrature scheme from the YAML settings."""
    return default_quadrature()


@pytest.fixture
def raw_table():
    """A (grid, value) table with a duplicate, a NaN row and unsorted order."""
    return pd.DataFrame({
        "grid": [0.5, 0.0, 1.0, 1.0, 1.5, 2.0, np.nan],
        "value": [0.8, 1.0, 0.4, 0.45, 0.1, 0.02, 0.3],
    })


# -------------------------------------------------------------------
# Quadrature Tests
# -------------------------------------------------------------------

class TestQuadrature:
    def test_polynomial_exactness(self):
        x, w = gauss_legendre_panels(0.0, 3.0, panels_per_unit=2, order=8)
        assert np.sum(w * x ** 15) == pytest.approx(3.0 ** 16 / 16, rel=1e-13)

    def test_panel_count(self):
        x, w = gauss_legendre_panels(0.0, 2.0, panels_per_unit=4, order=5)
        assert x.size == 8 * 5
        assert np.all(np.diff(x) > 0)

    def test_min_panels(self):
        x, _ = gauss_legendre_panels(-0.1, 0.1, panels_per_unit=1, order=4, min_panels=16)
        assert x.size == 64

    def test_empty_interval(self):
        x, w = gauss_legendre_panels(1.0, 1.0, 4, 8)
        assert x.size == 0 and w.size == 0

    def test_scheme_validation(self):
        with pytest.raises(ConfigError):
            QuadratureScheme(panels_per_unit=0)
        with pytest.raises(ConfigError):
            QuadratureScheme(t_max=0.5)
        with pytest.raises(ConfigError):
            QuadratureScheme(abs_tol=-1.0)

    def test_spectral_cutoff(self):
        scheme = QuadratureScheme(lambda_max=12.0)
        assert scheme.spectral_cutoff(None) == 12.0
        assert scheme.spectral_cutoff(1.0) == 12.0
        assert scheme.spectral_cutoff(0.25) == 16.0

    def test_refined(self):
        assert QuadratureScheme(panels_per_unit=16).refined().panels_per_unit == 32

    def test_defaults_from_yaml(self, quad):
        assert quad.panels_per_unit == 16
        assert quad.nodes_per_panel == 8
        assert quad.t_max == 40.0

    def test_environment_override(self, monkeypatch):
        monkeypatch.setenv("HARMONIC_QUAD_PANELS", "24")
        quadrature.default_quadrature.cache_clear()
        try:
            assert quadrature.default_quadrature().panels_per_unit == 24
        finally:
            monkeypatch.delenv("HARMONIC_QUAD_PANELS")
            quadrature.default_quadrature.cache_clear()

    def test_environment_override_rejects_garbage(self, monkeypatch):
        monkeypatch.setenv("HARMONIC_QUAD_PANELS", "many")
        quadrature.default_quadrature.cache_clear()
        try:
            with pytest.raises(ConfigError):
                quadrature.default_quadrature()
        finally:
            monkeypatch.delenv("HARMONIC_QUAD_PANELS")
            quadrature.default_quadrature.cache_clear()


# -------------------------------------------------------------------
# Profile Tests
# -------------------------------------------------------------------

class TestCleanTabulation:
    def test_drops_nan_and_duplicates(self, raw_table):
        cleaned = clean_tabulation(raw_table)
        assert len(cleaned) == 5
        assert cleaned["grid"].is_unique
        assert cleaned["grid"].isna().sum() == 0

    def test_first_duplicate_wins(self, raw_table):
        cleaned = clean_tabulation(raw_table)
        assert cleaned.loc[cleaned["grid"] == 1.0, "value"].iloc[0] == 0.4

    def test_sorted(self, raw_table):
        cleaned = clean_tabulation(raw_table)
        assert list(cleaned["grid"]) == [0.0, 0.5, 1.0, 1.5, 2.0]

    def test_complex_columns(self):
        frame = pd.DataFrame({"grid": [0.0, 1.0], "value_re": [1.0, 0.5], "value_im": [0.0, 0.25]})
        cleaned = clean_tabulation(frame)
        assert cleaned["value"].iloc[1] == 0.5 + 0.25j

    def test_requires_origin(self):
        with pytest.raises(ProfileError):
            clean_tabulation(pd.DataFrame({"grid": [0.5, 1.0], "value": [1.0, 2.0]}))

    def test_requires_columns(self):
        with pytest.raises(ProfileError):
            clean_tabulation(pd.DataFrame({"x": [0.0], "y": [1.0]}))


class TestProfiles:
    def test_descriptor_validation(self):
        with pytest.raises(ProfileError):
            RadialProfile.heat(0.0)
        with pytest.raises(ProfileError):
            RadialProfile.gaussian(-1.0)
        with pytest.raises(ProfileError):
            RadialProfile("unknown")

    def test_gaussian_rates(self):
        assert RadialProfile.heat(2.0).gaussian_rate == 0.125
        assert RadialProfile.gaussian(1.0).spectral_time_scale == 0.25
        assert SpectralProfile.heat_spectral(3.0).time_scale == 3.0

    def test_tabulated_no_extrapolation(self, h3):
        grid = np.linspace(0, 2, 21)
        f = RadialProfile.tabulated(grid, np.exp(-grid ** 2))
        assert radial_values(h3, f, np.array([1.0])) == pytest.approx(math.exp(-1), rel=1e-4)
        with pytest.raises(ProfileError):
            radial_values(h3, f, np.array([2.5]))

    def test_tabulated_validation(self):
        with pytest.raises(ProfileError):
            RadialProfile.tabulated([0.0, 1.0, 1.0, 2.0], [1, 2, 3, 4])
        with pytest.raises(ProfileError):
            RadialProfile.tabulated([0.1, 1.0, 2.0, 3.0], [1, 2, 3, 4])
        with pytest.raises(ProfileError):
            RadialProfile.tabulated([0.0, 1.0], [1, 2])

    def test_closed_form_values(self, h3):
        fhat = SpectralProfile.closed_form((1.0, 2.0), 0.5)
        lam = np.array([0.0, 1.0])
        assert np.allclose(spectral_values(h3, fhat, lam), [1.0, 3.0 * math.exp(-0.5)])

    def test_heat_spectral_includes_rho(self, h3):
        fhat = SpectralProfile.heat_spectral(1.0)
        assert spectral_values(h3, fhat, np.array([0.0]))[0] == pytest.approx(math.exp(-1.0))

    def test_gaussian_form_only_for_gaussian_kinds(self, h3):
        assert SpectralProfile.zero().gaussian_form(h3) is None
        assert SpectralProfile.tabulated(np.linspace(0, 3, 4), np.ones(4)).gaussian_form(h3) is None

    def test_even_polynomial(self):
        assert even_polynomial((1.0, -1.0, 0.5), 2.0) == pytest.approx(1 - 4 + 8)

    def test_line_profile_support(self):
        g = LineProfile.analytic(lambda x: np.ones_like(x), (-1.0, 1.0))
        assert list(g(np.array([-2.0, 0.0, 1.0, 1.5]))) == [0.0, 1.0, 1.0, 0.0]
        assert g.is_compact
        with pytest.raises(ProfileError):
            LineProfile.analytic(np.cos, (1.0, 1.0))


# -------------------------------------------------------------------
# Calibration Tests
# -------------------------------------------------------------------

class TestCalibration:
    def test_h3_constants(self, h3, quad):
        calibration = calibrate(h3, quad)
        assert calibration.c_x == pytest.approx(math.pi)
        assert calibration.c0 == pytest.approx(1 / (2 * math.pi ** 2), rel=1e-6)
        assert calibration.mass_drift < 1e-6

    def test_generic_constants_positive(self, quad):
        for space in default_registry():
            calibration = calibrate(space, quad)
            assert calibration.c_x > 0 and calibration.c0 > 0

    def test_cached(self, h3, quad):
        assert calibrate(h3, quad) is calibrate(h3, quad)

    def test_mass_radius(self, h3):
        expected = math.ceil(2 * 1.0 + math.sqrt(4 * math.log(1e10)) + 1)
        assert mass_radius(h3, 1.0, 1e-10) == expected


# -------------------------------------------------------------------
# spherical_transform() Tests
# -------------------------------------------------------------------

class TestSphericalTransform:
    def test_heat_identity_h3(self, h3, quad):
        lam = np.linspace(0, 10, 101)
        for t in (0.25, 1.0, 4.0):
            numeric = spherical_transform_values(h3, RadialProfile.heat(t), lam, quad)
            exact = np.exp(-t * (lam ** 2 + 1))
            assert np.max(np.abs(numeric - exact)) < 1e-6
            visible = exact >= 1e-3
            assert np.max(np.abs(numeric - exact)[visible] / exact[visible]) < 1e-6

    def test_zero_profile(self, h3, quad):
        assert np.all(spherical_transform_values(h3, RadialProfile.zero(), [0.0, 1.0], quad) == 0)

    def test_tabulated_output(self, h3, quad):
        # gaussian(1) transforms like e^{-λ²/4}, so the grid widens to 8/√(1/4)
        fhat = spherical_transform(h3, RadialProfile.gaussian(1.0), quad)
        assert fhat.kind == "tabulated"
        assert fhat.grid[0] == 0.0
        assert fhat.grid[-1] == 16.0

    def test_tabulated_output_default_cutoff(self, h3, quad):
        grid = np.linspace(0, 8, 161)
        fhat = spherical_transform(h3, RadialProfile.tabulated(grid, np.exp(-4 * grid ** 2)), quad)
        assert fhat.grid[-1] == quad.lambda_max == 12.0

    def test_linearity(self, quad):
        lam = np.linspace(0, 8, 17)
        f, g = RadialProfile.heat(0.5), RadialProfile.gaussian(1.0)
        for space in default_registry():
            grid = np.linspace(0, 20, 2001)
            combined = RadialProfile.tabulated(
                grid, 2.0 * radial_values(space, f, grid, quad) - 3.0 * radial_values(space, g, grid, quad)
            )
            lhs = spherical_transform_values(space, combined, lam, quad)
            rhs = (2.0 * spherical_transform_values(space, f, lam, quad)
                   - 3.0 * spherical_transform_values(space, g, lam, quad))
            assert np.allclose(lhs, rhs, rtol=1e-4, atol=1e-6), space.name

    def test_truncation_error(self, h3, quad):
        grid = np.linspace(0, 5, 51)
        flat = RadialProfile.tabulated(grid, np.ones_like(grid))
        with pytest.raises(TruncationError) as exc:
            spherical_transform_values(h3, flat, [0.0], quad)
        assert exc.value.tail_estimate > quad.abs_tol

    def test_round_trip_registry(self, quad):
        r = np.linspace(0, 6, 241)
        gaussian = RadialProfile.gaussian(1.0)
        exact = np.exp(-r ** 2)
        for space in default_registry():
            back = np.real(inverse_values(space, spherical_transform(space, gaussian, quad), r, quad))
            error = math.sqrt(trapezoid((back - exact) ** 2, r) / trapezoid(exact ** 2, r))
            assert error < 1e-6, space.name


class TestInverseRules:
    def test_saddle_matches_real_axis(self, quad):
        r = np.array([1.0, 1.5, 3.0])
        for space in default_registry():
            fhat = SpectralProfile.heat_spectral(1.0)
            saddle = inverse_values(space, fhat, r, quad, rule="saddle")
            real_axis = inverse_values(space, fhat, r, quad, rule="real_axis")
            assert np.allclose(saddle, real_axis, rtol=1e-8, atol=1e-12), space.name

    def test_saddle_far_tail_h3(self, h3, quad):
        r = np.array([15.0, 25.0])
        got = inverse_values(h3, SpectralProfile.heat_spectral(1.0), r, quad)
        exact = (4 * math.pi) ** -1.5 * math.e ** -1 * r / np.sinh(r) * np.exp(-r ** 2 / 4)
        assert np.allclose(got, exact, rtol=1e-8)

    def test_saddle_needs_gaussian_spectrum(self, h3, quad):
        fhat = SpectralProfile.tabulated(np.linspace(0, 3, 7), np.ones(7))
        with pytest.raises(ProfileError):
            inverse_values(h3, fhat, [2.0], quad, rule="saddle")

    def test_unknown_rule(self, h3, quad):
        with pytest.raises(ValueError):
            inverse_values(h3, SpectralProfile.heat_spectral(1.0), [1.0], quad, rule="midpoint")

    def test_negative_radius(self, h3, quad):
        with pytest.raises(ProfileError):
            inverse_values(h3, SpectralProfile.heat_spectral(1.0), [-1.0], quad)

    def test_inverse_profile_grid(self, h3, quad):
        f = inverse_spherical_transform(h3, SpectralProfile.heat_spectral(1.0), quad, grid=np.linspace(0, 4, 41))
        assert f.kind == "tabulated"
        assert f.decay_class == "gaussian"

    def test_grids(self, quad):
        assert radial_grid(quad, 2.0).size == 33
        lam = spectral_grid(quad, 12.0)
        assert lam[0] == 0.0 and lam[-1] == 12.0


# -------------------------------------------------------------------
# Euclidean and Abel Tests
# -------------------------------------------------------------------

class TestEuclidean:
    def test_gaussian_fourier(self, quad):
        g = LineProfile.analytic(lambda x: np.exp(-np.asarray(x) ** 2), label="gauss")
        lam = np.linspace(-5, 5, 11)
        assert np.allclose(fourier_values(g, lam, quad), math.sqrt(math.pi) * np.exp(-lam ** 2 / 4), atol=1e-12)

    def test_inverse_fourier(self, quad):
        G = LineProfile.analytic(lambda lam: math.sqrt(math.pi) * np.exp(-np.asarray(lam) ** 2 / 4))
        x = np.linspace(-3, 3, 7)
        assert np.allclose(inverse_fourier_values(G, x, quad), np.exp(-x ** 2), atol=1e-12)

    def test_slow_decay_truncation(self, quad):
        g = LineProfile.analytic(lambda x: 1 / (1 + np.asarray(x) ** 2))
        with pytest.raises(TruncationError):
            fourier_values(g, [0.0], quad)

    def test_gaussian_convolution(self, quad):
        g = LineProfile.analytic(lambda x: np.exp(-np.asarray(x) ** 2))
        x = np.linspace(-2, 2, 9)
        expected = math.sqrt(math.pi / 2) * np.exp(-x ** 2 / 2)
        assert np.allclose(convolution_values(g, g, x, quad), expected, atol=1e-12)

    def test_compact_factor_first(self, quad):
        box = LineProfile.analytic(lambda x: np.ones_like(np.asarray(x)), (-0.5, 0.5), "box")
        g = LineProfile.analytic(lambda x: np.exp(-np.asarray(x) ** 2), label="gauss")
        x = np.array([0.0, 1.0])
        assert np.allclose(convolution_values(g, box, x, quad), convolution_values(box, g, x, quad))

    def test_convolution_tabulated(self, quad):
        box = LineProfile.analytic(lambda x: np.ones_like(np.asarray(x)), (-0.5, 0.5), "box")
        result = euclidean_convolution(box, box, quad, grid=np.linspace(-2, 2, 41))
        assert result(np.array([0.0]))[0] == pytest.approx(1.0, abs=1e-12)
        assert result(np.array([1.5]))[0] == pytest.approx(0.0, abs=1e-12)


class TestAbel:
    def test_h3_heat_closed_form(self, h3, quad):
        s = np.linspace(-6, 6, 25)
        t = 0.5
        exact = (4 * math.pi * t) ** -0.5 * math.exp(-t) * np.exp(-s ** 2 / (4 * t))
        got = abel_values_from_spectrum(h3, SpectralProfile.heat_spectral(t), s, quad)
        assert np.allclose(got, exact, rtol=1e-12)

    def test_quadrature_path_matches(self, h3, quad):
        s = np.linspace(0, 4, 9)
        t = 1.0
        exact = (4 * math.pi * t) ** -0.5 * math.exp(-t) * np.exp(-s ** 2 / (4 * t))
        assert np.allclose(abel_values(h3, RadialProfile.heat(t), s, quad), exact, atol=1e-7)

    def test_even(self, h3, quad):
        line = abel_transform(h3, RadialProfile.gaussian(1.0), quad, grid=np.linspace(-3, 3, 13))
        assert np.allclose(line.values, line.values[::-1])

    def test_known_spectrum_matches_tabulated(self, h3, quad):
        grid = np.linspace(-4, 4, 17)
        f = RadialProfile.heat(1.0)
        tabulated = abel_transform(h3, f, quad, grid=grid)
        known = abel_transform(h3, f, quad, grid=grid, spectrum=SpectralProfile.heat_spectral(1.0))
        assert np.allclose(known.values, tabulated.values, atol=1e-7)

    def test_fourier_slice(self, h3, quad):
        lam = np.linspace(0, 10, 41)
        for f in (RadialProfile.heat(0.5), RadialProfile.heat(2.0), RadialProfile.gaussian(1.0)):
            line = LineProfile.analytic(lambda s, f=f: abel_values(h3, f, s, quad), (-20.0, 20.0))
            sliced = fourier_values(line, lam, quad)
            direct = spherical_transform_values(h3, f, lam, quad)
            assert np.max(np.abs(sliced - direct)) < 1e-6, f.describe()

    def test_closed_form_polynomial(self, h3, quad):
        # ℱ⁻¹ of λ² e^{-λ²} is −d²/ds² of the Gaussian kernel
        s = np.linspace(-3, 3, 13)
        got = abel_values_from_spectrum(h3, SpectralProfile.closed_form((0.0, 1.0), 1.0), s, quad)
        kernel = (4 * math.pi) ** -0.5 * np.exp(-s ** 2 / 4)
        expected = kernel * (0.5 - s ** 2 / 4)
        assert np.allclose(got, expected, atol=1e-14)

    def test_linearity(self, quad):
        s = np.linspace(-4, 4, 17)
        f, g = RadialProfile.heat(1.0), RadialProfile.gaussian(1.0)
        for space in (model_space("h3"), model_space("complex_hyperbolic(2)")):
            grid = np.linspace(0, 20, 2001)
            combined = RadialProfile.tabulated(
                grid, 0.5 * radial_values(space, f, grid, quad) + 4.0 * radial_values(space, g, grid, quad)
            )
            lhs = abel_values(space, combined, s, quad)
            rhs = 0.5 * abel_values(space, f, s, quad) + 4.0 * abel_values(space, g, s, quad)
            assert np.allclose(lhs, rhs, rtol=1e-4, atol=1e-7), space.name
