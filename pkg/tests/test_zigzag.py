import math

import numpy as np
import pytest

from coulomb_crystal_lab import (
    EigensolverError,
    IonChain,
    PotentialSpec,
    SolverOptions,
    TooFewIonsError,
    TransverseHessianBase,
    beta_c_scan,
    critical_beta,
    critical_beta_from_base,
    mode_spectrum,
    smallest_eigenpair,
    transverse_hessian_base,
)

from conftest import random_ordered_positions

QUARTIC = PotentialSpec(4)
QUADRATIC = PotentialSpec(2)


def sign_changes(vector):
    signs = np.sign(vector)
    return int(np.sum(signs[:-1] != signs[1:]))


class TestSmallestEigenpair:
    def test_two_ion_closed_form(self):
        d = 8.0**0.2
        base = transverse_hessian_base(IonChain([-d / 2, d / 2]))
        value, mode = smallest_eigenpair(base)
        assert value == pytest.approx(-2.0 / d**3, abs=1e-12)
        assert mode == pytest.approx([1 / math.sqrt(2), -1 / math.sqrt(2)], abs=1e-12)
        assert mode[0] > 0  # sign convention

    def test_two_ion_quadratic_minimum_distance(self):
        d = 2.0 ** (1 / 3)
        base = transverse_hessian_base(IonChain([0.0, d]))
        value, _ = smallest_eigenpair(base)
        assert value == pytest.approx(-1.0, abs=1e-14)

    def test_ones_vector_in_null_space(self):
        rng = np.random.default_rng(9)
        base = transverse_hessian_base(IonChain(random_ordered_positions(rng, 15)))
        ones = np.ones(15)
        scale = np.max(np.abs(base.entries))
        assert np.max(np.abs(base.entries @ ones)) < 1e-10 * scale
        value, _ = smallest_eigenpair(base)
        assert value <= 0.0

    def test_single_ion(self):
        value, mode = smallest_eigenpair(TransverseHessianBase(np.zeros((1, 1))))
        assert value == 0.0
        assert mode == pytest.approx([1.0])


class TestCriticalBeta:
    def test_two_ion_quadratic_is_exactly_one(self, solve):
        result = critical_beta(solve(2, 2, 1e-12).chain)
        assert abs(result.beta_c - 1.0) < 1e-10

    def test_two_ion_quartic(self, solve):
        result = critical_beta(solve(4, 2, 1e-12).chain)
        assert abs(result.beta_c - 2.0**-0.4) < 1e-10

    def test_relation_to_base_eigenvalue(self, solve):
        result = critical_beta(solve(4, 10).chain)
        assert result.beta_c**2 == pytest.approx(-result.lambda_min_base, rel=1e-14)

    def test_needs_two_ions(self):
        with pytest.raises(TooFewIonsError):
            critical_beta(IonChain([0.0]))

    def test_non_negative_spectrum_flagged(self):
        # cannot arise from a valid chain; drive the guard with a zero matrix
        with pytest.raises(EigensolverError):
            critical_beta_from_base(TransverseHessianBase(np.zeros((2, 2))))

    def test_sign_bracketing(self, solve):
        chain = solve(4, 10).chain
        result = critical_beta(chain)
        below = mode_spectrum(chain, 0.99 * result.beta_c)
        above = mode_spectrum(chain, 1.01 * result.beta_c)
        assert below.eigenvalues[0] < 0.0
        assert not below.stable
        assert above.eigenvalues[0] > 0.0
        assert above.stable

    @pytest.mark.parametrize("n_ions", [4, 9, 20, 57, 100])
    def test_quartic_mode_alternates(self, n_ions, solve):
        result = critical_beta(solve(4, n_ions).chain)
        assert sign_changes(result.mode) == n_ions - 1

    @pytest.mark.parametrize("n_ions", [4, 11, 25, 40])
    def test_quadratic_mode_alternates(self, n_ions, solve):
        # beyond N ~ 40 the quadratic chain's outermost mode components fall
        # below double precision and their signs are no longer meaningful
        result = critical_beta(solve(2, n_ions).chain)
        assert sign_changes(result.mode) == n_ions - 1


class TestModeSpectrum:
    def test_single_ion_frequency_is_beta(self):
        spectrum = mode_spectrum(IonChain([0.0]), 0.7)
        assert spectrum.frequencies == pytest.approx([0.7])
        assert spectrum.stable

    def test_two_ion_quartic_at_unit_beta(self, solve):
        spectrum = mode_spectrum(solve(4, 2, 1e-12).chain, 1.0)
        d = 8.0**0.2
        expected = sorted([1.0 - 2.0 / d**3, 1.0])
        assert spectrum.eigenvalues == pytest.approx(expected, abs=1e-10)
        assert spectrum.frequencies == pytest.approx([math.sqrt(expected[0]), 1.0], abs=1e-10)

    def test_shift_identity(self, solve):
        chain = solve(4, 12).chain
        base = transverse_hessian_base(chain).entries
        base_eigenvalues = np.linalg.eigvalsh(base)
        rng = np.random.default_rng(31)
        for beta in rng.uniform(0.5, 50.0, size=3):
            spectrum = mode_spectrum(chain, beta)
            shifted = base_eigenvalues + beta**2
            scale = np.max(np.abs(spectrum.eigenvalues))
            assert np.max(np.abs(spectrum.eigenvalues - shifted)) < 1e-10 * scale

    def test_smallest_eigenvalue_vanishes_at_critical_beta(self, solve):
        chain = solve(4, 20).chain
        beta_c = critical_beta(chain).beta_c
        spectrum = mode_spectrum(chain, beta_c)
        spectral_radius = np.max(np.abs(spectrum.eigenvalues))
        assert abs(spectrum.eigenvalues[0]) < 1e-8 * spectral_radius

    def test_orthonormal_eigenvectors(self, solve):
        chain = solve(4, 15).chain
        spectrum = mode_spectrum(chain, 2.0)
        gram = spectrum.eigenvectors.T @ spectrum.eigenvectors
        assert np.max(np.abs(gram - np.eye(15))) < 1e-8

    def test_unstable_frequencies_are_nan_with_flag(self, solve):
        chain = solve(4, 10).chain
        beta_c = critical_beta(chain).beta_c
        spectrum = mode_spectrum(chain, 0.5 * beta_c)
        assert not spectrum.stable
        assert math.isnan(spectrum.frequencies[0])
        assert not math.isnan(spectrum.frequencies[-1])

    def test_rejects_non_positive_beta(self, solve):
        with pytest.raises(ValueError):
            mode_spectrum(solve(4, 2).chain, 0.0)


class TestSpacingConfinementRelation:
    def test_beta_c_tracks_inverse_spacing_to_the_three_halves(self, solve):
        # beta_c * dz_min^(3/2) should be nearly constant across the quartic
        # scan range (observed spread is only ~2%; the bound is a loose 1.5x)
        from coulomb_crystal_lab import min_spacing

        values = []
        for n in (20, 100, 300):
            result = solve(4, n)
            beta = critical_beta(result.chain).beta_c
            values.append(beta * min_spacing(result.chain) ** 1.5)
        assert max(values) / min(values) < 1.5


class TestBetaCScan:
    def test_two_ion_column(self, result_cache):
        result = beta_c_scan([2], QUARTIC, SolverOptions(gradient_tolerance=1e-12), cache=result_cache)
        assert result.rows[0].beta_c == pytest.approx(2.0**-0.4, abs=1e-10)
        assert result.fit is None  # not enough rows in the scaling regime

    def test_small_scan_has_fit(self, result_cache):
        result = beta_c_scan([10, 14, 18, 22], QUARTIC,
                             SolverOptions(gradient_tolerance=1e-8), cache=result_cache)
        assert all(row.error is None for row in result.rows)
        assert result.fit is not None
        assert 0.9 < result.fit.exponent < 1.4

    def test_row_failure_marker(self):
        result = beta_c_scan([2, 6], QUARTIC, SolverOptions(max_iterations=1))
        assert all(row.error is not None for row in result.rows)
        assert result.fit is None

    def test_rejects_single_ion(self):
        with pytest.raises(TooFewIonsError):
            beta_c_scan([1, 5], QUARTIC)
