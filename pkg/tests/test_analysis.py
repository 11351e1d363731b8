import math

import numpy as np
import pytest

from coulomb_crystal_lab import (
    DensityProfile,
    FitDataError,
    IonChain,
    PotentialSpec,
    SolverOptions,
    TooFewIonsError,
    local_density,
    min_spacing,
    peak_location,
    power_law_fit,
    scan,
    spacing_uniformity,
)

QUARTIC = PotentialSpec(4)
QUADRATIC = PotentialSpec(2)


class TestLocalDensity:
    def test_unit_gap(self):
        profile = local_density(IonChain([-0.5, 0.5]))
        assert profile.samples == [(-0.5, 1.0)]

    def test_reciprocal_gaps(self):
        profile = local_density(IonChain([0.0, 1.0, 3.0]))
        assert profile.samples == [(0.0, 1.0), (1.0, 0.5)]

    def test_length_is_n_minus_one(self):
        profile = local_density(IonChain(np.linspace(-2, 2, 9)))
        assert len(profile) == 8

    def test_needs_two_ions(self):
        with pytest.raises(TooFewIonsError):
            local_density(IonChain([0.0]))


class TestMinSpacing:
    def test_simple(self):
        assert min_spacing(IonChain([0.0, 1.0, 3.0])) == 1.0

    def test_needs_two_ions(self):
        with pytest.raises(TooFewIonsError):
            min_spacing(IonChain([0.0]))

    def test_three_ion_quartic_ground_state(self, solve):
        # spacing of the symmetric three-ion minimum, z^5 = 5/4
        expected = (5.0 / 4.0) ** 0.2
        assert min_spacing(solve(4, 3, 1e-10).chain) == pytest.approx(expected, abs=1e-8)

    def test_two_ion_quadratic_ground_state(self, solve):
        assert min_spacing(solve(2, 2, 1e-10).chain) == pytest.approx(2.0 ** (1 / 3), abs=1e-8)

    def test_matches_profile_reciprocal(self):
        rng = np.random.default_rng(5)
        positions = np.cumsum(rng.uniform(0.1, 1.0, size=12))
        chain = IonChain(positions)
        profile = local_density(chain)
        assert min_spacing(chain) == pytest.approx(float(np.min(1.0 / profile.density)), rel=1e-14)


class TestPeakLocation:
    def test_peak_at_center(self):
        profile = DensityProfile(z=np.array([-1.0, 0.0, 1.0]), density=np.array([1.0, 2.0, 1.0]))
        assert peak_location(profile) == (0.0, 0.0)

    def test_ties_break_toward_center(self):
        profile = DensityProfile(z=np.array([-1.0, 0.5, 2.0]), density=np.array([3.0, 3.0, 1.0]))
        z_peak, _ = peak_location(profile)
        assert z_peak == 0.5

    def test_fraction_uses_chain_extent(self):
        chain = IonChain([-4.0, -1.0, 1.0, 4.0])
        profile = local_density(chain)
        z_peak, fraction = peak_location(profile)
        assert z_peak == 1.0  # central gap is smallest, density assigned to its left ion at -1
        assert fraction == pytest.approx(0.25)

    def test_quadratic_ground_state_peaks_at_center(self, solve):
        profile = local_density(solve(2, 100).chain)
        _, fraction = peak_location(profile)
        assert fraction < 0.1


class TestSpacingUniformity:
    def test_equally_spaced_is_zero(self):
        assert spacing_uniformity(IonChain([0.0, 1.0, 2.0, 3.0])) == 0.0

    def test_two_gap_arithmetic(self):
        assert spacing_uniformity(IonChain([0.0, 1.0, 3.0])) == pytest.approx(1.0 / 3.0)

    def test_needs_three_ions(self):
        with pytest.raises(TooFewIonsError):
            spacing_uniformity(IonChain([0.0, 1.0]))


class TestPowerLawFit:
    def test_exact_power_law(self):
        points = [(n, 3.0 * n**-0.5) for n in (10, 20, 40, 80, 160)]
        fit = power_law_fit(points)
        assert fit.prefactor == pytest.approx(3.0, rel=1e-12)
        assert fit.exponent == pytest.approx(-0.5, abs=1e-12)
        assert fit.r_squared == pytest.approx(1.0, abs=1e-12)
        assert fit.n_range == (10, 160)

    def test_exact_constant(self):
        fit = power_law_fit([(10, 2.0), (20, 2.0), (40, 2.0)])
        assert fit.exponent == pytest.approx(0.0, abs=1e-14)
        assert fit.r_squared == 1.0

    def test_predict(self):
        fit = power_law_fit([(n, 2.0 * n**1.5) for n in (5, 10, 20)])
        assert fit.predict(40) == pytest.approx(2.0 * 40**1.5, rel=1e-10)

    def test_rejects_short_input(self):
        with pytest.raises(FitDataError):
            power_law_fit([(1, 1.0), (2, 2.0)])

    def test_rejects_non_positive(self):
        with pytest.raises(FitDataError):
            power_law_fit([(1, 1.0), (2, -2.0), (3, 3.0)])
        with pytest.raises(FitDataError):
            power_law_fit([(0, 1.0), (2, 2.0), (3, 3.0)])


class TestScan:
    def test_two_ion_quartic_row(self, result_cache):
        rows = scan([2], QUARTIC, SolverOptions(gradient_tolerance=1e-10), cache=result_cache)
        d = 8.0**0.2
        assert len(rows) == 1
        row = rows[0]
        assert row.error is None
        assert row.energy == pytest.approx(d**4 / 32 + 1 / d, abs=1e-8)
        assert row.dz_min == pytest.approx(d, abs=1e-8)
        assert math.isnan(row.uniformity)  # a single gap has no spread

    def test_quadratic_closed_form_energies(self, result_cache):
        rows = scan([2, 3], QUADRATIC, SolverOptions(gradient_tolerance=1e-10), cache=result_cache)
        d = 2.0 ** (1 / 3)
        z = (5.0 / 4.0) ** (1 / 3)
        assert rows[0].energy == pytest.approx(d**2 / 4 + 1 / d, abs=1e-8)
        assert rows[1].energy == pytest.approx(z**2 + 5 / (2 * z), abs=1e-8)

    def test_rejects_single_ion_rows(self):
        with pytest.raises(TooFewIonsError):
            scan([1, 5], QUARTIC)

    def test_row_failure_marker(self):
        rows = scan([2, 8], QUARTIC, SolverOptions(max_iterations=1))
        assert all(row.error is not None for row in rows)
        assert all(math.isnan(row.energy) for row in rows)

    def test_monotone_trends(self, solve):
        dz, half = [], []
        for n in (10, 20, 40, 60):
            chain = solve(4, n).chain
            dz.append(min_spacing(chain))
            half.append(chain.half_length)
        assert all(a > b for a, b in zip(dz, dz[1:]))
        assert all(a < b for a, b in zip(half, half[1:]))

    @pytest.mark.parametrize("n_ions", [50, 60])
    def test_density_integrates_to_ion_count(self, n_ions, solve):
        profile = local_density(solve(4, n_ions).chain)
        integral = float(np.trapezoid(profile.density, profile.z))
        assert abs(integral - n_ions) / n_ions < 0.05
