"""Dimensionless energy model of a 1D chain of like charges in an even-power trap.

The total potential energy of N ordered ions at axial positions z_1 < ... < z_N is

    E(z) = sum_i z_i**p / p  +  sum_{i<j} 1 / (z_j - z_i)

with p an even exponent (2 for a harmonic trap, 4 for a purely quartic one) and
unit trap coefficient in the rescaled units used throughout the package.

Summation order is fixed for bit reproducibility: trap terms are reduced in ion
order and Coulomb terms over upper-triangle pairs in row-major (i, then j) order,
both with numpy's pairwise reduction, which is deterministic for a fixed array.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DegenerateChainError

#: Smallest adjacent gap accepted before a configuration is considered degenerate.
DEFAULT_MIN_GAP = 1e-12


@dataclass(frozen=True)
class PotentialSpec:
    """Axial trap family: single even monomial z**p with coefficient 1/p.

    The per-ion trap energy is z**p / p, so the harmonic case (p=2) is z^2/2
    and the quartic case (p=4) is z^4/4.
    """

    exponent: int = 2

    def __post_init__(self):
        if not isinstance(self.exponent, (int, np.integer)) or isinstance(self.exponent, bool):
            raise ValueError(f"exponent must be an integer, got {self.exponent!r}")
        if self.exponent < 2 or self.exponent % 2 != 0:
            raise ValueError(f"exponent must be even and >= 2, got {self.exponent}")

    @property
    def coefficient(self) -> float:
        """Trap coefficient 1/p in rescaled units."""
        return 1.0 / self.exponent

    def trap_energy(self, z):
        """Per-ion trap term z**p / p, elementwise."""
        return np.asarray(z, dtype=float) ** self.exponent / self.exponent


@dataclass(frozen=True, eq=False)
class IonChain:
    """Strictly ordered axial positions of N >= 1 ions (dimensionless)."""

    positions: np.ndarray

    def __post_init__(self):
        arr = np.array(self.positions, dtype=float, copy=True)
        if arr.ndim != 1 or arr.size < 1:
            raise ValueError("positions must be a 1D sequence with at least one ion")
        if not np.all(np.isfinite(arr)):
            raise ValueError("positions must be finite")
        if arr.size > 1 and not np.all(np.diff(arr) > 0.0):
            raise ValueError("positions must be strictly increasing")
        arr.setflags(write=False)
        object.__setattr__(self, "positions", arr)

    def __len__(self) -> int:
        return int(self.positions.size)

    def __eq__(self, other) -> bool:
        if not isinstance(other, IonChain):
            return NotImplemented
        return np.array_equal(self.positions, other.positions)

    @property
    def n_ions(self) -> int:
        return len(self)

    @property
    def gaps(self) -> np.ndarray:
        """Adjacent spacings z_{i+1} - z_i (length N-1)."""
        return np.diff(self.positions)

    @property
    def half_length(self) -> float:
        """Largest distance of any ion from the trap center."""
        return float(np.max(np.abs(self.positions)))


@dataclass(frozen=True)
class TransverseHessianBase:
    """Confinement-independent part of the transverse Hessian at x = 0.

    For a linear chain the Hessian of the energy with respect to transverse
    displacements is B + beta^2 * I, where beta is the transverse confinement
    strength and B has entries

        B[m, n] = 1 / |z_m - z_n|^3           for m != n
        B[n, n] = -sum_{p != n} 1 / |z_p - z_n|^3

    B is symmetric with zero row sums, hence negative semidefinite with the
    all-ones vector in its null space.
    """

    entries: np.ndarray

    def __post_init__(self):
        mat = np.array(self.entries, dtype=float, copy=True)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1] or mat.shape[0] < 1:
            raise ValueError("entries must be a square matrix of size >= 1")
        scale = float(np.max(np.abs(mat))) if mat.size else 0.0
        tol = 1e-10 * max(scale, 1.0)
        if not np.allclose(mat, mat.T, rtol=0.0, atol=tol):
            raise ValueError("entries must be symmetric")
        if np.max(np.abs(mat.sum(axis=1))) > tol:
            raise ValueError("rows must sum to zero")
        mat.setflags(write=False)
        object.__setattr__(self, "entries", mat)

    @property
    def n_ions(self) -> int:
        return int(self.entries.shape[0])


@lru_cache(maxsize=32)
def _pair_indices(n: int):
    """Upper-triangle index pair (i, j) arrays, i < j, row-major order."""
    i, j = np.triu_indices(n, k=1)
    i.setflags(write=False)
    j.setflags(write=False)
    return i, j


def _require_gaps(z: np.ndarray, min_gap: float) -> None:
    if z.size > 1:
        smallest = float(np.min(np.diff(z)))
        if smallest <= min_gap:
            raise DegenerateChainError(
                f"adjacent gap {smallest:.3e} at or below the minimum-gap guard {min_gap:.3e}"
            )


def _raw_energy(z: np.ndarray, exponent: int) -> float:
    trap = float(np.sum(z**exponent)) / exponent
    i, j = _pair_indices(z.size)
    coulomb = float(np.sum(1.0 / (z[j] - z[i])))
    return trap + coulomb


def _raw_gradient(z: np.ndarray, exponent: int) -> np.ndarray:
    diff = z[:, None] - z[None, :]
    np.fill_diagonal(diff, np.inf)
    coulomb = -np.sum(np.sign(diff) / diff**2, axis=1)
    return z ** (exponent - 1) + coulomb


def _raw_energy_difference(z: np.ndarray, delta: np.ndarray, exponent: int) -> float:
    """E(z + delta) - E(z), evaluated without catastrophic cancellation.

    Trap terms use the factorization a^p - b^p = (a - b) * sum_k a^k b^(p-1-k)
    and pair terms use 1/(r+s) - 1/r = -s / (r (r + s)), so the difference stays
    accurate even when it is many orders of magnitude below the total energy.
    The line search relies on this to certify descent near convergence.
    """
    znew = z + delta
    powers = np.zeros_like(z)
    for k in range(exponent):
        powers += znew**k * z ** (exponent - 1 - k)
    trap = float(np.sum(delta * powers)) / exponent
    i, j = _pair_indices(z.size)
    r = z[j] - z[i]
    s = delta[j] - delta[i]
    coulomb = float(np.sum(-s / (r * (r + s))))
    return trap + coulomb


def total_energy(chain: IonChain, potential: PotentialSpec, *, min_gap: float = DEFAULT_MIN_GAP) -> float:
    """Total potential energy: trap term plus pairwise Coulomb repulsion.

    Raises DegenerateChainError when any adjacent gap is at or below min_gap.
    """
    z = chain.positions
    _require_gaps(z, min_gap)
    return _raw_energy(z, potential.exponent)


def energy_gradient(chain: IonChain, potential: PotentialSpec, *, min_gap: float = DEFAULT_MIN_GAP) -> np.ndarray:
    """Analytic gradient of total_energy with respect to each position.

    Component i is z_i**(p-1) - sum_{j != i} sign(z_i - z_j) / (z_i - z_j)**2.
    """
    z = chain.positions
    _require_gaps(z, min_gap)
    return _raw_gradient(z, potential.exponent)


def transverse_hessian_base(chain: IonChain, *, min_gap: float = DEFAULT_MIN_GAP) -> TransverseHessianBase:
    """Transverse Hessian at x = 0 with the beta^2 diagonal shift removed.

    The full transverse Hessian at confinement beta is entries + beta**2 * I.
    """
    z = chain.positions
    _require_gaps(z, min_gap)
    diff = z[:, None] - z[None, :]
    np.fill_diagonal(diff, np.inf)
    off = 1.0 / np.abs(diff) ** 3
    entries = off.copy()
    np.fill_diagonal(entries, -np.sum(off, axis=1))
    return TransverseHessianBase(entries)
