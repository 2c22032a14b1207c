"""Exception and warning types raised across the package."""


class SxPIDError(Exception):
    """Base class for all package errors."""


class UnsupportedOrderError(SxPIDError, ValueError):
    """Requested number of sources is outside the supported range."""


class IncompleteLatticeError(SxPIDError, KeyError):
    """A lattice function is missing one or more antichains."""


class LatticeMismatchError(SxPIDError, ValueError):
    """Two antichains (or a function and a lattice) use different source counts."""


class UndefinedLocalValueError(SxPIDError, ValueError):
    """A local redundancy was requested where a probability or density is zero."""


class InsufficientSamplesError(SxPIDError, ValueError):
    """Not enough samples for the requested neighbour order."""


class DegenerateColumnError(SxPIDError, ValueError):
    """A column has zero spread and cannot be standardized."""


class StepTooLargeError(SxPIDError, ValueError):
    """Finite-difference step pushes a density to a non-positive value."""


class DegenerateGeometryWarning(UserWarning):
    """Exact duplicate points make some k-th neighbour distances zero."""
