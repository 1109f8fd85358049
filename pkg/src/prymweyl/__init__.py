"""Exact Weyl-group correspondences, lattice quotients and polarization types."""

from .errors import (BoundExceeded, CoverError, HomologyError, LatticeError, PrymWeylError,
                     RootSystemError)
from .rootsys import RootDatum, build_root_datum, fundamental_weight

__all__ = [
    "BoundExceeded", "CoverError", "HomologyError", "LatticeError", "PrymWeylError",
    "RootSystemError", "RootDatum", "build_root_datum", "fundamental_weight",
]
