"""Length spectra of congruence subgroups of SL2(Z): class numbers, finite-group trace
distributions, multiplicities, and the local factors of correlation constants."""

from .arith import DomainError, ResourceGuard
from .finite_sl2 import FULL, GroupSpec, NoClosedForm

__version__ = "0.1.0"
__all__ = ["DomainError", "ResourceGuard", "NoClosedForm", "GroupSpec", "FULL"]
