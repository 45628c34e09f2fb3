"""Exact iterated residues on hyperplane arrangements, Szenes-type lattice sums,
SU(n) root data and residue evaluators for intersection pairings."""

from .arrangement import (Arrangement, ArrangementError, CertificateError, DiagonalBasis, OrderedBasis, circuits,
                          diagonal_basis, enumerate_bases, expansion_coefficients, extend_diagonal_basis, nbc_bases,
                          residue_matrix, simple_fraction)
from .expr import ExprSyntaxError, ExprValueError, format_mero, parse_mero_expression
from .laurent import PrecisionError, bernoulli
from .numkernel import LatticeBasis, LatticeError, LinearForm, Poly, lattice_quotient, natural_dual, snf
from .pairing import (Constants, FixedPointDatum, PairingError, PairingProblem, SubgroupDatum, Torus,
                      amw_lattice_sum, amw_residue_block, amw_residue_form, residue_pairing, s_sum)
from .residue import MeroFunction, MeroTerm, ResidueError, res_one, res_tau, res_tau_numeric
from .rootsystem import RootSystem, RootSystemError
from .szenes import SzenesCase, SzenesError, szenes_rhs, szenes_sun_rhs, verify_szenes

__version__ = "0.1.0"

__all__ = [
    "Arrangement",
    "ArrangementError",
    "CertificateError",
    "Constants",
    "DiagonalBasis",
    "ExprSyntaxError",
    "ExprValueError",
    "FixedPointDatum",
    "LatticeBasis",
    "LatticeError",
    "LinearForm",
    "MeroFunction",
    "MeroTerm",
    "OrderedBasis",
    "PairingError",
    "PairingProblem",
    "Poly",
    "PrecisionError",
    "ResidueError",
    "RootSystem",
    "RootSystemError",
    "SubgroupDatum",
    "SzenesCase",
    "SzenesError",
    "Torus",
    "amw_lattice_sum",
    "amw_residue_block",
    "amw_residue_form",
    "bernoulli",
    "circuits",
    "diagonal_basis",
    "enumerate_bases",
    "expansion_coefficients",
    "extend_diagonal_basis",
    "format_mero",
    "lattice_quotient",
    "natural_dual",
    "nbc_bases",
    "parse_mero_expression",
    "res_one",
    "res_tau",
    "res_tau_numeric",
    "residue_matrix",
    "residue_pairing",
    "s_sum",
    "simple_fraction",
    "snf",
    "szenes_rhs",
    "szenes_sun_rhs",
    "verify_szenes",
]
