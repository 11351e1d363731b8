"""Transverse normal modes and the critical confinement of the zigzag transition.

For a linear chain the transverse Hessian is B + beta^2 I with B the
confinement-independent base matrix (see model).  Since beta enters only as a
uniform diagonal shift, the chain buckles exactly when beta^2 drops below
-lambda_min(B), so the critical confinement is computed directly as
beta_c = sqrt(-lambda_min(B)) with no bisection over beta.
"""

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import scipy.linalg

from . import analysis
from .errors import EigensolverError, TooFewIonsError
from .model import IonChain, PotentialSpec, TransverseHessianBase, transverse_hessian_base
from .solver import SolverOptions, ground_state


@dataclass(frozen=True)
class ZigzagResult:
    """Critical transverse confinement and the buckling mode of a linear chain."""

    beta_c: float
    lambda_min_base: float
    mode: np.ndarray

    def __post_init__(self):
        vec = np.array(self.mode, dtype=float, copy=True)
        if vec.ndim != 1 or vec.size < 1:
            raise ValueError("mode must be a 1D vector")
        if abs(float(np.linalg.norm(vec)) - 1.0) > 1e-10:
            raise ValueError("mode must have unit norm")
        vec.setflags(write=False)
        object.__setattr__(self, "mode", vec)


@dataclass(frozen=True)
class ModeSpectrum:
    """Transverse normal modes at confinement beta.

    eigenvalues are ascending; frequencies are their square roots, NaN where an
    eigenvalue is negative (stable is False in that case, the configuration is
    past the zigzag transition).
    """

    beta: float
    eigenvalues: np.ndarray
    frequencies: np.ndarray
    eigenvectors: np.ndarray
    stable: bool


def _fix_sign(vector: np.ndarray) -> np.ndarray:
    """Flip sign so the first nonzero component is positive."""
    for component in vector:
        if component != 0.0:
            return vector if component > 0 else -vector
    return vector


def _refine_far_field(matrix: np.ndarray, eigenvalue: float, vector: np.ndarray,
                      sweeps: int = 3) -> np.ndarray:
    """Jacobi-style refinement of an eigenvector through its eigen-equation.

    The buckling mode decays steeply toward the chain ends; the outermost
    components can sit below the dense solver's absolute noise floor
    (eps * norm), which scrambles their signs.  Rewriting row i of the
    eigen-equation as v_i = sum_{j != i} B_ij v_j / (lambda - B_ii)
    reconstructs each component from larger, accurately known ones, and a few
    sweeps damp the noise by roughly |B_ii / (lambda - B_ii)| per pass while
    leaving the residual at machine level.
    """
    diagonal = np.diag(matrix).copy()
    denominator = eigenvalue - diagonal
    scale = max(abs(eigenvalue), float(np.max(np.abs(diagonal))), 1e-300)
    if float(np.min(np.abs(denominator))) < 1e-8 * scale:
        return vector  # refinement would divide by a near-zero diagonal gap
    off_diagonal = matrix - np.diag(diagonal)
    refined = vector
    for _ in range(sweeps):
        refined = (off_diagonal @ refined) / denominator
        refined = refined / float(np.linalg.norm(refined))
    return refined


def smallest_eigenpair(base: TransverseHessianBase) -> tuple:
    """Algebraically smallest eigenvalue of B and its unit eigenvector.

    The eigenvector sign is fixed so its first nonzero component is positive,
    and its far-field components are refined through the eigen-equation (see
    _refine_far_field).
    """
    if base.n_ions == 1:
        return float(base.entries[0, 0]), np.ones(1)
    try:
        values, vectors = scipy.linalg.eigh(base.entries, subset_by_index=(0, 0))
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as exc:
        raise EigensolverError(f"smallest-eigenpair computation failed: {exc}") from exc
    mode = _refine_far_field(base.entries, float(values[0]), vectors[:, 0])
    mode = _fix_sign(mode)
    mode = mode / float(np.linalg.norm(mode))
    return float(values[0]), mode


def critical_beta_from_base(base: TransverseHessianBase) -> ZigzagResult:
    """Critical confinement from a precomputed base Hessian."""
    lambda_min, mode = smallest_eigenpair(base)
    if base.n_ions >= 2 and lambda_min >= 0.0:
        raise EigensolverError(
            f"base Hessian has non-negative smallest eigenvalue {lambda_min:.3e} for {base.n_ions} ions; "
            "this cannot happen for a valid ordered chain"
        )
    return ZigzagResult(beta_c=math.sqrt(-lambda_min), lambda_min_base=lambda_min, mode=mode)


def critical_beta(chain: IonChain) -> ZigzagResult:
    """Critical transverse confinement beta_c of a linear ground state.

    All transverse modes are stable for beta > beta_c and at least one is
    unstable for beta < beta_c.  The returned mode is the buckling direction,
    with adjacent ions displaced in alternating transverse directions.
    """
    if len(chain) < 2:
        raise TooFewIonsError("the zigzag transition needs at least 2 ions")
    return critical_beta_from_base(transverse_hessian_base(chain))


def mode_spectrum(chain: IonChain, beta: float) -> ModeSpectrum:
    """Full transverse eigendecomposition of B + beta^2 I."""
    if beta <= 0:
        raise ValueError("beta must be positive")
    base = transverse_hessian_base(chain)
    matrix = base.entries + beta**2 * np.eye(base.n_ions)
    try:
        values, vectors = scipy.linalg.eigh(matrix)
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as exc:
        raise EigensolverError(f"mode-spectrum computation failed: {exc}") from exc
    for column in range(vectors.shape[1]):
        vectors[:, column] = _fix_sign(vectors[:, column])
    with np.errstate(invalid="ignore"):
        frequencies = np.where(values >= 0.0, np.sqrt(np.maximum(values, 0.0)), np.nan)
    return ModeSpectrum(
        beta=float(beta),
        eigenvalues=values,
        frequencies=frequencies,
        eigenvectors=vectors,
        stable=bool(np.all(values >= 0.0)),
    )


@dataclass
class BetaCScanRow:
    """Critical confinement for one chain size; error marks a failed solve."""

    n_ions: int
    beta_c: float
    error: Optional[str] = None


@dataclass
class BetaCScan:
    """beta_c per N plus a power-law fit (None when too few usable rows)."""

    rows: list
    fit: Optional[analysis.PowerLawFit]


def beta_c_scan(n_values: Sequence[int], potential: PotentialSpec,
                opts: SolverOptions = SolverOptions(), cache=None) -> BetaCScan:
    """beta_c over fresh ground states for each N, with a power-law fit.

    The fit uses rows with N >= 10 (small chains are outside the scaling
    regime) and needs at least three of them.
    """
    rows = []
    for n in n_values:
        if n < 2:
            raise TooFewIonsError("beta_c scan needs N >= 2 for every entry")
        try:
            result = ground_state(n, potential, opts, cache=cache)
            if not result.converged:
                rows.append(BetaCScanRow(n, math.nan, error=f"not converged: {result.message}"))
                continue
            rows.append(BetaCScanRow(n, critical_beta(result.chain).beta_c))
        except Exception as exc:  # row-level failure marker
            rows.append(BetaCScanRow(n, math.nan, error=str(exc)))
    fit_points = [(row.n_ions, row.beta_c) for row in rows if row.error is None and row.n_ions >= 10]
    fit = analysis.power_law_fit(fit_points) if len(fit_points) >= 3 else None
    return BetaCScan(rows=rows, fit=fit)
