"""Exact algebra for canonical ideals of Fermat curves: ideals, automorphisms, Betti tables."""

__version__ = "0.1.0"

from .errors import PetriError
from .field import FieldElement, PrimeField, default_prime, primitive_root
from .linalg import ExactMatrix, kernel_basis, rank, rref
from .poly import Monomial, SparsePolynomial, TermOrder, term_compare
from .ring import GradedPiece, GradedRing, coordinate_ring_piece
from .fermat import (AuditReport, DifferentialBasis, FermatIdeal, build_basis, build_ideal,
                     dimension_audit, minkowski_sum, set_C, sigma_map, verify_vanishing)
from .quadrics import (ConditionSystem, QuadricForm, QuadricSystem, condition_equations,
                       encode_quadric, is_automorphism)
from .group import CandidateAutomorphism, enumerate_fermat_group, rho1_homomorphism_check
from .koszul import BettiTable, betti_number, betti_table, gorenstein_check, koszul_slice
from .tor import (TorRepresentation, block_diagonal_audit, character_table_slice, ring_action,
                  tor_representation)
