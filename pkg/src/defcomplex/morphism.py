"""The equivariant deformation complex of an algebra morphism phi: A -> B.

Degree-n cochains are triples ``(u, v, w)`` with ``u`` in C^n_G(A; A), ``v`` in
C^n_G(B; B) and ``w`` in C^{n-1}_G(A; B), where B is an A-bimodule through phi.
The differential is ``d(u, v, w) = (du, dv, phi u - v phi^{(x)n} - dw)``.
Degree 0 is the zero space.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from .algebra import EquivariantMorphism, induced_bimodule
from .hochschild import (
    Cochain,
    CohomologyResult,
    coboundary_apply,
    coboundary_matrix,
    cohomology_from_maps,
    equivariant_cohomology,
    invariant_subspace,
    is_invariant,
    num_coords,
    postcompose_matrix,
    precompose_matrix,
    restrict_to_subspaces,
)
from .linalg import DimensionError, Matrix, Subspace, block_matrix, membership


@dataclass(frozen=True)
class MorphismCochain:
    u: Cochain
    v: Cochain
    w: Cochain

    def __post_init__(self):
        if not (self.u.degree == self.v.degree == self.w.degree + 1):
            raise DimensionError(
                f"component degrees ({self.u.degree}, {self.v.degree}, {self.w.degree}) do not form a cochain"
            )

    @property
    def degree(self) -> int:
        return self.u.degree

    def vector(self) -> tuple:
        return self.u.coeffs + self.v.coeffs + self.w.coeffs

    def is_zero(self) -> bool:
        return self.u.is_zero() and self.v.is_zero() and self.w.is_zero()

    def __add__(self, other: "MorphismCochain") -> "MorphismCochain":
        return MorphismCochain(self.u + other.u, self.v + other.v, self.w + other.w)

    def __sub__(self, other: "MorphismCochain") -> "MorphismCochain":
        return MorphismCochain(self.u - other.u, self.v - other.v, self.w - other.w)

    def __neg__(self) -> "MorphismCochain":
        return MorphismCochain(-self.u, -self.v, -self.w)

    def scale(self, c) -> "MorphismCochain":
        return MorphismCochain(self.u.scale(c), self.v.scale(c), self.w.scale(c))


class DeformationComplex:
    """Coordinate spaces and differentials of the complex attached to ``phi``.

    Instances cache their invariant subspaces and matrices; obtain them with
    :func:`deformation_complex` so that repeated calls share the cache.
    """

    def __init__(self, phi: EquivariantMorphism):
        self.phi = phi
        self.field = phi.field
        self.A = phi.source
        self.B = phi.target
        self.mod_A = self.A.as_bimodule()
        self.mod_B = self.B.as_bimodule()
        self.mod_AB = induced_bimodule(phi)
        self.act_A = phi.source_action
        self.act_B = phi.target_action
        self._spaces: dict = {}
        self._full: dict = {}
        self._restricted: dict = {}

    # -- coordinate bookkeeping --------------------------------------------

    def block_sizes(self, n: int) -> tuple[int, int, int]:
        if n < 1:
            raise ValueError("the complex is zero in degrees below 1")
        a, b = self.A.dim, self.B.dim
        return (num_coords(a, a, n), num_coords(b, b, n), num_coords(a, b, n - 1))

    def component_spaces(self, n: int) -> tuple[Subspace, Subspace, Subspace]:
        if n not in self._spaces:
            self._spaces[n] = (
                invariant_subspace(self.A, self.mod_A, n, self.act_A),
                invariant_subspace(self.B, self.mod_B, n, self.act_B),
                invariant_subspace(self.A, self.mod_AB, n - 1, self.act_A, self.act_B),
            )
        return self._spaces[n]

    def space(self, n: int) -> Subspace:
        """C^n_G(phi, phi) inside the full coordinate space of degree ``n``."""
        return Subspace.direct_sum(self.component_spaces(n))

    def zero(self, n: int) -> MorphismCochain:
        return MorphismCochain(
            Cochain.zero(self.A, self.mod_A, n),
            Cochain.zero(self.B, self.mod_B, n),
            Cochain.zero(self.A, self.mod_AB, n - 1),
        )

    def from_vector(self, n: int, vec: Sequence) -> MorphismCochain:
        su, sv, sw = self.block_sizes(n)
        if len(vec) != su + sv + sw:
            raise DimensionError("vector length does not match the degree")
        vec = tuple(vec)
        return MorphismCochain(
            Cochain(self.A, self.mod_A, n, vec[:su]),
            Cochain(self.B, self.mod_B, n, vec[su : su + sv]),
            Cochain(self.A, self.mod_AB, n - 1, vec[su + sv :]),
        )

    def from_coords(self, n: int, coords: Sequence) -> MorphismCochain:
        return self.from_vector(n, self.space(n).combine(coords))

    def coords(self, c: MorphismCochain) -> tuple:
        """Coordinates in the invariant basis; raises if ``c`` is not invariant."""
        ok, coords = membership(c.vector(), self.space(c.degree))
        if not ok:
            raise ValueError("cochain is not invariant")
        return coords

    def is_invariant(self, c: MorphismCochain) -> bool:
        return (
            is_invariant(c.u, self.act_A)
            and is_invariant(c.v, self.act_B)
            and is_invariant(c.w, self.act_A, self.act_B)
        )

    # -- differential --------------------------------------------------------

    def d_apply(self, c: MorphismCochain) -> MorphismCochain:
        n = c.degree
        phi_m = self.phi.matrix
        du = coboundary_apply(c.u)
        dv = coboundary_apply(c.v)
        phi_u = postcompose_matrix(phi_m, n, self.A.dim).apply(c.u.coeffs)
        v_phi = precompose_matrix(phi_m, n, self.B.dim).apply(c.v.coeffs)
        dw = coboundary_apply(c.w).coeffs
        third = tuple(x - y - z for x, y, z in zip(phi_u, v_phi, dw))
        return MorphismCochain(du, dv, Cochain(self.A, self.mod_AB, n, third))

    def full_d_matrix(self, n: int) -> Matrix:
        """The differential on full (not necessarily invariant) coordinates."""
        if n not in self._full:
            phi_m = self.phi.matrix
            a = self.A.dim
            blocks = [
                [coboundary_matrix(self.A, self.mod_A, n), None, None],
                [None, coboundary_matrix(self.B, self.mod_B, n), None],
                [
                    postcompose_matrix(phi_m, n, a),
                    -precompose_matrix(phi_m, n, self.B.dim),
                    -coboundary_matrix(self.A, self.mod_AB, n - 1),
                ],
            ]
            self._full[n] = block_matrix(blocks, self.block_sizes(n + 1), self.block_sizes(n), self.field)
        return self._full[n]

    def d_matrix(self, n: int) -> Matrix:
        """The differential between invariant coordinates of degrees ``n`` and ``n + 1``."""
        if n not in self._restricted:
            self._restricted[n] = restrict_to_subspaces(self.full_d_matrix(n), self.space(n), self.space(n + 1))
        return self._restricted[n]

    def cohomology(self, n: int) -> CohomologyResult:
        """H^n_G(phi, phi); degree 1 has no coboundaries since the complex vanishes in degree 0."""
        if n < 1:
            raise ValueError("degree must be at least 1")
        d_in = self.d_matrix(n - 1) if n >= 2 else None
        return cohomology_from_maps(
            self.field, d_in, self.d_matrix(n), self.space(n), n, lambda v: self.from_vector(n, v)
        )

    def coboundary_image(self, n: int) -> Subspace:
        """Image of d^{n-1} in the invariant coordinates of degree ``n``."""
        if n < 2:
            return Subspace(self.field, self.space(n).dim)
        return Subspace.span(self.d_matrix(n - 1))


@lru_cache(maxsize=64)
def deformation_complex(phi: EquivariantMorphism) -> DeformationComplex:
    return DeformationComplex(phi)


def d_apply(phi: EquivariantMorphism, c: MorphismCochain) -> MorphismCochain:
    return deformation_complex(phi).d_apply(c)


def d_matrix(phi: EquivariantMorphism, n: int) -> Matrix:
    return deformation_complex(phi).d_matrix(n)


def morphism_cohomology(phi: EquivariantMorphism, n: int) -> CohomologyResult:
    return deformation_complex(phi).cohomology(n)


@dataclass(frozen=True)
class VanishingReport:
    degree: int
    h_source: int
    h_target: int
    h_mixed: int
    prediction: int | None  # None: the vanishing criterion does not apply
    direct: int

    @property
    def consistent(self) -> bool:
        return self.prediction is None or self.prediction == self.direct

    def as_dict(self) -> dict:
        return {
            "degree": self.degree,
            "ingredients": {
                "H_G^n(A,A)": self.h_source,
                "H_G^n(B,B)": self.h_target,
                "H_G^{n-1}(A,B)": self.h_mixed,
            },
            "prediction": "not applicable" if self.prediction is None else self.prediction,
            "direct": self.direct,
            "consistent": self.consistent,
        }


def ingredient_dims(phi: EquivariantMorphism, n: int) -> tuple[int, int, int]:
    """Dimensions of H^n_G(A,A), H^n_G(B,B) and H^{n-1}_G(A,B)."""
    cx = deformation_complex(phi)
    h_a = equivariant_cohomology(cx.A, cx.mod_A, n, cx.act_A).betti
    h_b = equivariant_cohomology(cx.B, cx.mod_B, n, cx.act_B).betti
    h_ab = equivariant_cohomology(cx.A, cx.mod_AB, n - 1, cx.act_A, cx.act_B).betti
    return h_a, h_b, h_ab


def vanishing_check(phi: EquivariantMorphism, n: int) -> VanishingReport:
    """Compare the three-ingredient vanishing criterion with a direct computation."""
    if n < 2:
        raise ValueError("the vanishing criterion needs degree >= 2")
    h_a, h_b, h_ab = ingredient_dims(phi, n)
    prediction = 0 if (h_a, h_b, h_ab) == (0, 0, 0) else None
    direct = morphism_cohomology(phi, n).betti
    return VanishingReport(n, h_a, h_b, h_ab, prediction, direct)
