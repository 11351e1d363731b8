"""Exception types shared across the package."""


class CoulombCrystalError(Exception):
    """Base class for all errors raised by this package."""


class DegenerateChainError(CoulombCrystalError):
    """A chain has a non-positive or below-guard adjacent gap."""


class TooFewIonsError(CoulombCrystalError):
    """An operation needs more ions than the chain provides."""


class FitDataError(CoulombCrystalError):
    """Power-law fit input is non-positive or has too few points."""


class UnsupportedFamilyError(CoulombCrystalError):
    """The requested trial-density family is not available here."""


class AnsatzDomainError(CoulombCrystalError):
    """The closed-form half-length is undefined for this ion count."""


class QuadratureError(CoulombCrystalError):
    """Adaptive quadrature failed to reach the requested tolerance."""


class EigensolverError(CoulombCrystalError):
    """Dense symmetric eigendecomposition failed or gave an invalid spectrum."""


class PlotDataError(CoulombCrystalError):
    """Plot input is empty or missing the columns the plot kind needs."""
