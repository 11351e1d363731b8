"""Ground-state search by nonlinear conjugate-gradient minimization.

The discrete energy of the ordered chain is minimized with Polak-Ribiere
conjugate gradients (non-negative beta, periodic steepest-descent restart) and
a backtracking Armijo line search.  Trial steps that would close any adjacent
gap below the guard are treated as infinite energy and contracted away, which
keeps every accepted iterate strictly ordered without explicit constraints.

The line search evaluates energy *differences* in a cancellation-free form
(see model), so descent can be certified long after plain energy values have
saturated double precision.  Accepted energies are accumulated from those
differences, making the iterate energy sequence exactly non-increasing.
"""

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import model, variational
from .errors import DegenerateChainError, UnsupportedFamilyError
from .model import IonChain, PotentialSpec

#: Called after each accepted iteration with (iteration, positions, energy, gradient max-norm).
ProgressCallback = Callable[[int, np.ndarray, float, float], None]


@dataclass(frozen=True)
class SolverOptions:
    """Tunables for the conjugate-gradient minimizer.

    restart_period=None restarts every N iterations (N = number of ions).
    """

    gradient_tolerance: float = 1e-10
    max_iterations: int = 1_000_000
    restart_period: Optional[int] = None
    initial_step: float = 1.0
    contraction: float = 0.5
    sufficient_decrease: float = 1e-4
    min_gap: float = model.DEFAULT_MIN_GAP

    def __post_init__(self):
        if self.gradient_tolerance <= 0:
            raise ValueError("gradient_tolerance must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.restart_period is not None and self.restart_period < 1:
            raise ValueError("restart_period must be >= 1")
        if self.initial_step <= 0:
            raise ValueError("initial_step must be positive")
        if not 0.0 < self.contraction < 1.0:
            raise ValueError("contraction must lie in (0, 1)")
        if not 0.0 < self.sufficient_decrease < 1.0:
            raise ValueError("sufficient_decrease must lie in (0, 1)")
        if self.min_gap <= 0:
            raise ValueError("min_gap must be positive")


@dataclass(frozen=True)
class GroundStateResult:
    """Converged chain with solver diagnostics."""

    chain: IonChain
    energy: float
    gradient_max_norm: float
    iterations: int
    converged: bool
    symmetric: bool = True
    message: str = ""


def initial_guess(n_ions: int, potential: PotentialSpec) -> IonChain:
    """Uniformly spaced, reflection-symmetric start on [-L, L].

    L is the closed-form optimal half-length of the matching trial density
    (exponent 2 or 4).  Other even exponents get the heuristic
    L**(p+1) = (p+1) N max(ln(2N), 1), which has the right large-N scaling.
    """
    if n_ions < 1:
        raise ValueError("n_ions must be >= 1")
    if n_ions == 1:
        return IonChain(np.zeros(1))
    try:
        family = variational.AnsatzFamily.for_exponent(potential.exponent)
        half_length = variational.optimal_solution(n_ions, family).half_length
    except UnsupportedFamilyError:
        p = potential.exponent
        half_length = ((p + 1) * n_ions * max(math.log(2.0 * n_ions), 1.0)) ** (1.0 / (p + 1))
    return IonChain(np.linspace(-half_length, half_length, n_ions))


def _line_search(z, direction, slope, exponent, guard, first_step, contraction, c1, max_backtracks=80):
    """Largest tried Armijo step, backtracking from first_step.

    Returns (step, energy_change) or (None, None) when no acceptable step
    exists down to the backtracking floor.
    """
    step = first_step
    for _ in range(max_backtracks):
        delta = step * direction
        trial = z + delta
        if trial.size == 1 or np.min(np.diff(trial)) > guard:
            change = model._raw_energy_difference(z, delta, exponent)
            if change <= c1 * step * slope:
                return step, change
        step *= contraction
    return None, None


def minimize(start: IonChain, potential: PotentialSpec, opts: SolverOptions = SolverOptions(),
             callback: Optional[ProgressCallback] = None) -> GroundStateResult:
    """Minimize the chain energy from a given strictly ordered start.

    Returns a GroundStateResult whose chain is strictly ordered and whose
    accepted-iterate energies never increased.  converged is False (with a
    message) when the iteration or line-search budget runs out first.
    """
    z = start.positions.copy()
    p = potential.exponent
    guard = opts.min_gap
    model._require_gaps(z, guard)
    restart_every = opts.restart_period if opts.restart_period is not None else max(len(z), 1)
    c1 = opts.sufficient_decrease

    energy = model._raw_energy(z, p)
    grad = model._raw_gradient(z, p)
    direction = -grad
    previous_step = opts.initial_step / 2.0
    iterations = 0
    converged = False
    message = ""

    while True:
        grad_max = float(np.max(np.abs(grad)))
        if grad_max <= opts.gradient_tolerance:
            converged = True
            break
        if iterations >= opts.max_iterations:
            message = f"iteration budget exhausted at gradient max-norm {grad_max:.3e}"
            break

        slope = float(grad @ direction)
        if slope >= 0.0:  # not a descent direction, fall back to steepest descent
            direction = -grad
            slope = -float(grad @ grad)

        step, change = _line_search(z, direction, slope, p, guard, 2.0 * previous_step,
                                    opts.contraction, c1)
        if step is None and not np.array_equal(direction, -grad):
            direction = -grad
            slope = -float(grad @ grad)
            step, change = _line_search(z, direction, slope, p, guard, 2.0 * previous_step,
                                        opts.contraction, c1)
        if step is None:
            message = f"line search stalled at gradient max-norm {grad_max:.3e}"
            break

        z = z + step * direction
        energy += change
        iterations += 1
        new_grad = model._raw_gradient(z, p)
        if callback is not None:
            callback(iterations, z.copy(), energy, float(np.max(np.abs(new_grad))))

        if iterations % restart_every == 0:
            beta = 0.0
        else:
            beta = max(0.0, float(new_grad @ (new_grad - grad)) / float(grad @ grad))
        direction = -new_grad + beta * direction
        grad = new_grad
        previous_step = step

    chain = IonChain(z)
    return GroundStateResult(
        chain=chain,
        energy=model._raw_energy(z, p),  # fresh value, free of accumulation drift
        gradient_max_norm=float(np.max(np.abs(grad))),
        iterations=iterations,
        converged=converged,
        message=message,
    )


#: Relative asymmetry (vs. half-length) above which a ground state is flagged.
SYMMETRY_TOLERANCE = 1e-6


def ground_state(n_ions: int, potential: PotentialSpec, opts: SolverOptions = SolverOptions(),
                 cache=None) -> GroundStateResult:
    """Ground state for N ions: variational start, minimize, symmetry check.

    When a result cache is supplied, a stored converged result for the same
    (exponent, N, gradient tolerance, version) key is returned directly and
    fresh converged results are stored back.
    """
    if n_ions < 1:
        raise ValueError("n_ions must be >= 1")
    key = None
    if cache is not None:
        from . import serialize
        from .cache import CacheKey

        key = CacheKey.for_ground_state(potential.exponent, n_ions, opts.gradient_tolerance)
        payload = cache.lookup(key)
        if payload is not None:
            return serialize.ground_state_from_payload(payload)[0]

    result = minimize(initial_guess(n_ions, potential), potential, opts)
    z = result.chain.positions
    asymmetry = float(np.max(np.abs(z + z[::-1])))
    symmetric = asymmetry <= SYMMETRY_TOLERANCE * result.chain.half_length
    message = result.message
    if not symmetric:
        message = (message + "; " if message else "") + f"asymmetry {asymmetry:.3e} exceeds tolerance"
    result = GroundStateResult(
        chain=result.chain,
        energy=result.energy,
        gradient_max_norm=result.gradient_max_norm,
        iterations=result.iterations,
        converged=result.converged,
        symmetric=symmetric,
        message=message,
    )

    if cache is not None and result.converged:
        from . import serialize

        cache.store(key, serialize.ground_state_payload(result, potential, opts.gradient_tolerance))
    return result
