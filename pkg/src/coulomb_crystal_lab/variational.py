"""Local-density variational treatment of the ordered chain.

The discrete chain is replaced by a continuous line density n(z) and the energy
becomes the functional

    E[n] = int dz { (z**p / p) n(z) + gamma n(z)^2
                    - (1/2) n(z) int_0^inf dy ln[y n(z)] d/dy [n(z-y) + n(z+y)] }

with gamma Euler's constant.  Two one-parameter trial densities are supported,
each normalized so that the total charge is N:

    inverted parabola (p=2):  n(z) = (3/4) (N/L) (1 - z^2/L^2)   for |z| < L
    inverted quartic  (p=4):  n(z) = (5/8) (N/L) (1 - z^4/L^4)   for |z| < L

For both families the optimal half-length and minimal energy have closed forms:

    p=2:  L^3 = 3 N [gamma - 13/5 + ln(6 N)]            E = (3/10) N L^2
    p=4:  L^5 = 5 N [gamma + pi/2 - 85/18 + ln(10 N)]   E = (5/36) N L^4

The quartic family additionally has a closed-form trial energy at arbitrary L,
which `functional_energy_numeric` cross-checks by direct quadrature.
"""

import enum
import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.integrate import quad

from .errors import AnsatzDomainError, QuadratureError, UnsupportedFamilyError

#: Euler's constant, 16 significant digits.
EULER_GAMMA = 0.5772156649015329


class AnsatzFamily(enum.Enum):
    """Shape of the one-parameter trial density."""

    INVERTED_PARABOLA = "inverted-parabola"
    INVERTED_QUARTIC = "inverted-quartic"

    @property
    def trap_exponent(self) -> int:
        return 2 if self is AnsatzFamily.INVERTED_PARABOLA else 4

    @property
    def normalization(self) -> float:
        """Peak density in units of N/L (fixed by total charge N)."""
        return 0.75 if self is AnsatzFamily.INVERTED_PARABOLA else 0.625

    @classmethod
    def for_exponent(cls, exponent: int) -> "AnsatzFamily":
        if exponent == 2:
            return cls.INVERTED_PARABOLA
        if exponent == 4:
            return cls.INVERTED_QUARTIC
        raise UnsupportedFamilyError(f"no trial-density family for exponent {exponent}")


@dataclass(frozen=True)
class VariationalSolution:
    """Optimal half-length and energy of a trial density for N ions."""

    family: AnsatzFamily
    n_ions: int
    half_length: float
    energy: float

    def __post_init__(self):
        if self.half_length <= 0 or self.energy <= 0:
            raise ValueError("half_length and energy must be positive")


def _log_factor(n_ions: int, family: AnsatzFamily) -> float:
    """Bracketed logarithmic factor of the closed-form half-length."""
    if family is AnsatzFamily.INVERTED_PARABOLA:
        return EULER_GAMMA - 13.0 / 5.0 + math.log(6.0 * n_ions)
    return EULER_GAMMA + math.pi / 2.0 - 85.0 / 18.0 + math.log(10.0 * n_ions)


def ansatz_density(z, n_ions: int, half_length: float, family: AnsatzFamily):
    """Trial density at z: the family formula inside |z| < L, zero outside."""
    if half_length <= 0:
        raise ValueError("half_length must be positive")
    q = family.trap_exponent
    zz = np.asarray(z, dtype=float)
    inside = np.abs(zz) < half_length
    value = family.normalization * (n_ions / half_length) * (1.0 - (zz / half_length) ** q)
    result = np.where(inside, np.maximum(value, 0.0), 0.0)
    return float(result) if np.isscalar(z) else result


def energy_at_half_length(n_ions: int, half_length: float, family: AnsatzFamily) -> float:
    """Closed-form trial energy of the inverted-quartic density at half-length L.

        E(L) = (1/36) N L^4 + (5/9) (N^2 / L) [gamma + pi/2 - 85/18 + ln(10 N)]

    Only the quartic family has this printed closed form; the parabola family
    raises UnsupportedFamilyError.
    """
    if family is not AnsatzFamily.INVERTED_QUARTIC:
        raise UnsupportedFamilyError("closed-form trial energy is available for the inverted-quartic family only")
    if half_length <= 0:
        raise ValueError("half_length must be positive")
    n = float(n_ions)
    return n * half_length**4 / 36.0 + (5.0 / 9.0) * (n**2 / half_length) * _log_factor(n_ions, family)


def optimal_solution(n_ions: int, family: AnsatzFamily) -> VariationalSolution:
    """Closed-form optimal half-length and energy for N ions.

    Raises AnsatzDomainError when the logarithmic factor is non-positive
    (N = 1 for both families), since the half-length is then undefined.
    """
    if n_ions < 1:
        raise ValueError("n_ions must be >= 1")
    factor = _log_factor(n_ions, family)
    if factor <= 0.0:
        raise AnsatzDomainError(
            f"log factor {factor:.4f} is not positive at N={n_ions}; no optimal half-length exists"
        )
    n = float(n_ions)
    if family is AnsatzFamily.INVERTED_PARABOLA:
        half_length = (3.0 * n * factor) ** (1.0 / 3.0)
        energy = 0.3 * n * half_length**2
    else:
        half_length = (5.0 * n * factor) ** (1.0 / 5.0)
        energy = (5.0 / 36.0) * n * half_length**4
    return VariationalSolution(family=family, n_ions=n_ions, half_length=half_length, energy=energy)


def predicted_min_spacing(n_ions: int, family: AnsatzFamily) -> float:
    """Minimum adjacent spacing predicted by the trial density, 1 / (peak density).

    Equals L / (c N) with c the family normalization, so it scales as the
    optimal half-length divided by N.
    """
    solution = optimal_solution(n_ions, family)
    return solution.half_length / (family.normalization * n_ions)


def _density_slope(u: float, n_ions: int, half_length: float, family: AnsatzFamily) -> float:
    """Spatial derivative of the trial density, zero outside the support."""
    if abs(u) >= half_length:
        return 0.0
    q = family.trap_exponent
    c = family.normalization
    return -c * (n_ions / half_length) * q * u ** (q - 1) / half_length**q


def _interaction_inner(z: float, n_ions: int, half_length: float, family: AnsatzFamily, rel_tol: float) -> float:
    """Inner integral int_0^inf ln[y n(z)] d/dy [n(z-y) + n(z+y)] dy at fixed z.

    The integrand vanishes for y beyond L + |z| and has kinks where z - y or
    z + y crosses the support edge, so the integral is split there.  Near y = 0
    the integrand behaves like y ln(y) (integrable, log-singular derivative);
    a cubic node-clustering substitution y = a t^3 absorbs the singular end.
    """
    nz = ansatz_density(z, n_ions, half_length, family)
    log_nz = math.log(nz)
    za = abs(z)
    y_edge_near = half_length - za
    y_edge_far = half_length + za

    def integrand(y: float) -> float:
        g = _density_slope(z + y, n_ions, half_length, family) - _density_slope(
            z - y, n_ions, half_length, family
        )
        return (math.log(y) + log_nz) * g

    total = 0.0
    # (0, y_edge_near): both arguments inside the support; cluster nodes at y=0.
    a = y_edge_near
    if a > 0.0:
        part, _ = quad(
            lambda t: integrand(a * t**3) * 3.0 * a * t**2,
            0.0,
            1.0,
            epsabs=1e-9,
            epsrel=rel_tol,
            limit=200,
        )
        total += part
    # (y_edge_near, y_edge_far): only z - y remains inside the support.
    if y_edge_far > y_edge_near:
        part, _ = quad(integrand, y_edge_near, y_edge_far, epsabs=1e-9, epsrel=rel_tol, limit=200)
        total += part
    return total


def functional_energy_numeric(
    n_ions: int,
    half_length: float,
    family: AnsatzFamily,
    *,
    rel_tol: float = 1e-4,
    initial_panels: int = 4,
    max_refinements: int = 7,
) -> float:
    """Full energy functional of the trial density, by quadrature.

    Integrates trap, correlation, and logarithmic-interaction terms over the
    support.  The outer integral uses composite Gauss-Legendre panels over
    (0, L), doubled by symmetry, with panel-doubling refinement until two
    successive estimates agree to rel_tol.  Interior nodes never touch the
    endpoints, where n -> 0 makes ln[y n(z)] formally divergent but the n(z)
    prefactor kills the term.

    Raises QuadratureError when refinement fails to converge.
    """
    if half_length <= 0:
        raise ValueError("half_length must be positive")
    if rel_tol <= 0 or initial_panels < 1 or max_refinements < 0:
        raise ValueError("invalid quadrature options")
    p = family.trap_exponent
    inner_tol = min(rel_tol * 1e-2, 1e-6)
    nodes, weights = leggauss(16)

    def outer_integrand(z: float) -> float:
        nz = ansatz_density(z, n_ions, half_length, family)
        trap = (z**p / p) * nz
        correlation = EULER_GAMMA * nz**2
        interaction = -0.5 * nz * _interaction_inner(z, n_ions, half_length, family, inner_tol)
        return trap + correlation + interaction

    def estimate(panels: int) -> float:
        edges = np.linspace(0.0, half_length, panels + 1)
        total = 0.0
        for left, right in zip(edges[:-1], edges[1:]):
            mid = 0.5 * (left + right)
            scale = 0.5 * (right - left)
            total += scale * sum(w * outer_integrand(mid + scale * x) for x, w in zip(nodes, weights))
        return 2.0 * total  # the integrand is even in z

    panels = initial_panels
    previous = estimate(panels)
    for _ in range(max_refinements):
        panels *= 2
        current = estimate(panels)
        if abs(current - previous) <= rel_tol * max(abs(current), 1e-300):
            return current
        previous = current
    raise QuadratureError(
        f"outer quadrature did not reach rel_tol={rel_tol:g} after {max_refinements} refinements"
    )
