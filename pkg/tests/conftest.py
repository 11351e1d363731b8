import numpy as np
import pytest

from coulomb_crystal_lab import PotentialSpec, ResultCache, SolverOptions, ground_state

# Tolerance used for the medium/large solves shared across the suite; positions
# are then accurate far beyond what the scaling fits need.
SCAN_TOLERANCE = 1e-8


@pytest.fixture(scope="session")
def result_cache(tmp_path_factory):
    return ResultCache(tmp_path_factory.mktemp("ground-state-cache"))


@pytest.fixture(scope="session")
def solve(result_cache):
    """Memoized ground-state solver shared across the whole session."""
    memo = {}

    def _solve(exponent, n_ions, tolerance=SCAN_TOLERANCE):
        key = (exponent, n_ions, tolerance)
        if key not in memo:
            memo[key] = ground_state(
                n_ions,
                PotentialSpec(exponent),
                SolverOptions(gradient_tolerance=tolerance),
                cache=result_cache,
            )
        return memo[key]

    return _solve


def random_ordered_positions(rng, n_ions, min_gap=0.05, max_gap=0.6):
    """Strictly ordered random chain centered on the origin."""
    gaps = rng.uniform(min_gap, max_gap, size=n_ions - 1) if n_ions > 1 else np.zeros(0)
    positions = np.concatenate([[0.0], np.cumsum(gaps)])
    return positions - positions.mean()
