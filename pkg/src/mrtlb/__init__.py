"""Fourth-order D2Q5 MRT lattice Boltzmann diffusion solver and its equivalent
finite-difference schemes, with spectral stability and verification tools."""

from .errors import MRTLBError, ParseError, ValidationError
from .kinetic import LBModel
from .macro_fd import FDSolver, SchemeKind, build_coefficients
from .params import (
    DiffusionProblem,
    Discretization,
    RelaxationSet,
    derive_fourth_order,
    derive_fourth_order_natural,
)

__all__ = [
    "DiffusionProblem",
    "Discretization",
    "FDSolver",
    "LBModel",
    "MRTLBError",
    "ParseError",
    "RelaxationSet",
    "SchemeKind",
    "ValidationError",
    "build_coefficients",
    "derive_fourth_order",
    "derive_fourth_order_natural",
]
__version__ = "0.1.0"
