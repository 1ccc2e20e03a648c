"""Spectral-gap laboratory for reparametrized B-spline Galerkin discretizations
of the 1-D Dirichlet Laplacian."""

from .assembly import QuadratureConfig, SymmetricBandedMatrix, assemble_mass, assemble_pencil, assemble_stiffness
from .bspline import basis_deriv, basis_eval, cardinal_deriv, cardinal_eval, open_uniform_knots
from .eigensolve import Spectrum, compute_spectrum, generalized_eig
from .errors import DefinitenessError, DomainError, IgaGapError, NumericalError, ParseError
from .reparam import (
    make_exp_family,
    make_identity,
    make_log_family,
    make_Phi,
    make_phi1,
    make_phi2,
    make_phi3,
    parse_phi,
    validate,
)
from .symbol import ep_eval, ep_inverse, ep_symbol, gamma_slope, psi_sqrt, rearrange

__version__ = "0.1.0"
