"""Equivariant deformation cohomology of finite-dimensional algebra morphisms, in exact arithmetic."""

from .algebra import Algebra, Bimodule, EquivariantMorphism, GroupAction, close_actions, close_group, identity_morphism
from .deformation import DeformationTriple, build_from_infinitesimal, extend_one_order, obstruction, verify
from .equivalence import FormalIsomorphismPair, conjugate, is_equivalence, rigidity_report, trivialize_step
from .hochschild import Cochain, coboundary_matrix, equivariant_cohomology, hochschild_cohomology
from .linalg import GF, QQ, Matrix, Subspace
from .morphism import MorphismCochain, deformation_complex, morphism_cohomology, vanishing_check

__version__ = "0.1.0"

__all__ = [
    "Algebra",
    "Bimodule",
    "build_from_infinitesimal",
    "close_actions",
    "close_group",
    "coboundary_matrix",
    "Cochain",
    "conjugate",
    "deformation_complex",
    "DeformationTriple",
    "equivariant_cohomology",
    "EquivariantMorphism",
    "extend_one_order",
    "FormalIsomorphismPair",
    "GF",
    "GroupAction",
    "hochschild_cohomology",
    "identity_morphism",
    "is_equivalence",
    "Matrix",
    "morphism_cohomology",
    "MorphismCochain",
    "obstruction",
    "QQ",
    "rigidity_report",
    "Subspace",
    "trivialize_step",
    "vanishing_check",
    "verify",
]
