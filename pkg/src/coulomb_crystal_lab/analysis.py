"""Densities, spacings, and power-law scalings extracted from ground-state chains."""

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import FitDataError, TooFewIonsError
from .model import IonChain, PotentialSpec
from .solver import GroundStateResult, SolverOptions, ground_state


@dataclass(frozen=True)
class DensityProfile:
    """Discrete local density: sample i is (z_i, 1 / (z_{i+1} - z_i)).

    Density is assigned to the left ion of each gap, so an N-ion chain yields
    N-1 samples.  chain_extent records the outermost ion position of the source
    chain, which the samples alone do not contain.
    """

    z: np.ndarray
    density: np.ndarray
    chain_extent: Optional[float] = None

    def __post_init__(self):
        zz = np.array(self.z, dtype=float, copy=True)
        nn = np.array(self.density, dtype=float, copy=True)
        if zz.ndim != 1 or nn.ndim != 1 or zz.size != nn.size or zz.size < 1:
            raise ValueError("z and density must be 1D arrays of equal positive length")
        if zz.size > 1 and not np.all(np.diff(zz) > 0):
            raise ValueError("z samples must be strictly increasing")
        if not np.all(nn > 0):
            raise ValueError("density samples must be positive")
        zz.setflags(write=False)
        nn.setflags(write=False)
        object.__setattr__(self, "z", zz)
        object.__setattr__(self, "density", nn)

    def __len__(self) -> int:
        return int(self.z.size)

    @property
    def samples(self):
        return list(zip(self.z.tolist(), self.density.tolist()))


@dataclass(frozen=True)
class PowerLawFit:
    """Least-squares fit y = prefactor * N**exponent on log-log axes."""

    prefactor: float
    exponent: float
    r_squared: float
    n_range: tuple

    def __post_init__(self):
        if self.prefactor <= 0:
            raise ValueError("prefactor must be positive")
        if not 0.0 <= self.r_squared <= 1.0:
            raise ValueError("r_squared must lie in [0, 1]")

    def predict(self, n):
        return self.prefactor * np.asarray(n, dtype=float) ** self.exponent


def local_density(chain: IonChain) -> DensityProfile:
    """Reciprocal-gap density profile of a chain with at least two ions."""
    if len(chain) < 2:
        raise TooFewIonsError("local density needs at least 2 ions")
    gaps = chain.gaps
    return DensityProfile(z=chain.positions[:-1], density=1.0 / gaps, chain_extent=chain.half_length)


def min_spacing(chain: IonChain) -> float:
    """Smallest adjacent gap."""
    if len(chain) < 2:
        raise TooFewIonsError("minimum spacing needs at least 2 ions")
    return float(np.min(chain.gaps))


def peak_location(profile: DensityProfile) -> tuple:
    """(|z| of the densest sample, its fraction of the outermost ion position).

    Ties are broken toward smaller |z|.  Falls back to the largest |z| among
    the samples when the profile does not record its source chain extent.
    """
    if len(profile) < 1:
        raise ValueError("profile must be nonempty")
    peak = np.max(profile.density)
    candidates = np.flatnonzero(profile.density == peak)
    z_peak = abs(float(profile.z[candidates[np.argmin(np.abs(profile.z[candidates]))]]))
    extent = profile.chain_extent if profile.chain_extent is not None else float(np.max(np.abs(profile.z)))
    fraction = z_peak / extent if extent > 0 else 0.0
    return z_peak, fraction


def spacing_uniformity(chain: IonChain) -> float:
    """Coefficient of variation of the adjacent gaps (std / mean, population std)."""
    if len(chain) < 3:
        raise TooFewIonsError("spacing uniformity needs at least 3 ions")
    gaps = chain.gaps
    return float(np.std(gaps) / np.mean(gaps))


def power_law_fit(points: Sequence[tuple]) -> PowerLawFit:
    """Ordinary least squares on (ln N, ln y) for points (N, y), all positive.

    exponent is the slope, prefactor is exp(intercept), and r_squared comes
    from the log-log residuals (1.0 for exact power laws, including constants).
    """
    pts = [(float(n), float(y)) for n, y in points]
    if len(pts) < 3:
        raise FitDataError(f"power-law fit needs at least 3 points, got {len(pts)}")
    if any(n <= 0 or y <= 0 for n, y in pts):
        raise FitDataError("power-law fit needs strictly positive coordinates")
    x = np.log([n for n, _ in pts])
    y = np.log([v for _, v in pts])
    slope, intercept = np.polyfit(x, y, 1)
    residuals = y - (slope * x + intercept)
    ss_res = float(np.sum(residuals**2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    if ss_tot == 0.0:
        r_squared = 1.0 if ss_res <= 1e-24 else 0.0
    else:
        r_squared = min(max(1.0 - ss_res / ss_tot, 0.0), 1.0)
    ns = [n for n, _ in pts]
    return PowerLawFit(
        prefactor=float(np.exp(intercept)),
        exponent=float(slope),
        r_squared=r_squared,
        n_range=(min(ns), max(ns)),
    )


@dataclass
class ScanRow:
    """One ground-state summary: N, energy, minimum gap, extent, peak, uniformity.

    uniformity is NaN for N = 2 (a single gap has no spread).  error is set,
    and the numeric fields are NaN, when the solve for this N failed.
    """

    n_ions: int
    energy: float
    dz_min: float
    half_length: float
    peak_fraction: float
    uniformity: float
    error: Optional[str] = None
    result: Optional[GroundStateResult] = field(default=None, repr=False, compare=False)


def scan(n_values: Sequence[int], potential: PotentialSpec,
         opts: SolverOptions = SolverOptions(), cache=None) -> list:
    """Ground-state summaries for each N, in input order.

    Solver failures are recorded per row rather than raised, so a long scan
    survives an isolated non-convergence.
    """
    rows = []
    for n in n_values:
        if n < 2:
            raise TooFewIonsError("scan needs N >= 2 for every entry")
        try:
            result = ground_state(n, potential, opts, cache=cache)
        except Exception as exc:  # row-level failure marker
            rows.append(ScanRow(n, math.nan, math.nan, math.nan, math.nan, math.nan, error=str(exc)))
            continue
        if not result.converged:
            rows.append(ScanRow(n, math.nan, math.nan, math.nan, math.nan, math.nan,
                                error=f"not converged: {result.message}", result=result))
            continue
        chain = result.chain
        profile = local_density(chain)
        _, fraction = peak_location(profile)
        uniformity = spacing_uniformity(chain) if n >= 3 else math.nan
        rows.append(ScanRow(
            n_ions=n,
            energy=result.energy,
            dz_min=min_spacing(chain),
            half_length=chain.half_length,
            peak_fraction=fraction,
            uniformity=uniformity,
            result=result,
        ))
    return rows
