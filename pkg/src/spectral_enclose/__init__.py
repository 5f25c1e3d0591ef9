"""Certified two-sided eigenvalue enclosures for 1-D Schroedinger operators."""

__version__ = "0.1.0"

from .assembly import FormMatrices, Potential, ShiftedForms, assemble, shift
from .eigensolve import EigenDecomposition, cholesky, eig_gsym, eig_sym
from .errors import (
    ConvergenceError,
    EncloseError,
    InconsistentEnclosureError,
    InvalidArgumentError,
    NotPositiveDefiniteError,
    ShiftInSpectrumError,
    SolverError,
    UnsupportedDegreeError,
)
from .lmg import (
    BoundSet,
    EnclosureReport,
    TauSpectrum,
    bounds_from_tau,
    check_admissibility,
    enclose,
    galerkin_upper,
    tau_spectrum,
)
from .mesh import HermiteElement, Mesh, QuadratureRule, eval_basis, gauss_rule, make_mesh
