"""Truncated equivariant deformations of a morphism and their obstructions.

A deformation of order N is stored as the coefficients of t^1 .. t^N of
``mu_t`` (on A), ``nu_t`` (on B) and ``phi_t`` (A -> B).  The constant terms
are the products of A and B and the morphism itself.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import product
from typing import Sequence

from .algebra import EquivariantMorphism
from .hochschild import Cochain, is_invariant, linear_map_cochain, product_cochain
from .linalg import solve_certificate, solve_linear
from .morphism import DeformationComplex, MorphismCochain, deformation_complex


class NotVerifiedError(ValueError):
    """The operation needs a deformation satisfying its equations through its order."""


@dataclass(frozen=True, eq=False)
class DeformationTriple:
    morphism: EquivariantMorphism
    mu: tuple = ()
    nu: tuple = ()
    phi: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "mu", tuple(self.mu))
        object.__setattr__(self, "nu", tuple(self.nu))
        object.__setattr__(self, "phi", tuple(self.phi))
        if not (len(self.mu) == len(self.nu) == len(self.phi)):
            raise ValueError("mu, nu and phi must have the same number of coefficients")
        a, b = self.morphism.source, self.morphism.target
        for c in self.mu:
            if c.degree != 2 or c.algebra.dim != a.dim or c.module.dim != a.dim:
                raise ValueError("mu coefficients must be 2-cochains on the source algebra")
        for c in self.nu:
            if c.degree != 2 or c.algebra.dim != b.dim or c.module.dim != b.dim:
                raise ValueError("nu coefficients must be 2-cochains on the target algebra")
        for c in self.phi:
            if c.degree != 1 or c.algebra.dim != a.dim or c.module.dim != b.dim:
                raise ValueError("phi coefficients must be linear maps from source to target")

    @classmethod
    def trivial(cls, morphism: EquivariantMorphism, order: int = 0) -> "DeformationTriple":
        cx = deformation_complex(morphism)
        z = cx.zero(2)
        return cls(morphism, (z.u,) * order, (z.v,) * order, (z.w,) * order)

    @classmethod
    def from_coefficients(cls, morphism: EquivariantMorphism, coefficients: Sequence[MorphismCochain]):
        return cls(
            morphism,
            tuple(c.u for c in coefficients),
            tuple(c.v for c in coefficients),
            tuple(c.w for c in coefficients),
        )

    @property
    def order(self) -> int:
        return len(self.mu)

    @property
    def complex(self) -> DeformationComplex:
        return deformation_complex(self.morphism)

    def coefficient(self, i: int) -> MorphismCochain:
        """``(mu_i, nu_i, phi_i)`` for ``1 <= i <= order`` (zero beyond the order)."""
        if i < 1:
            raise ValueError("coefficients are indexed from 1")
        if i > self.order:
            return self.complex.zero(2)
        return MorphismCochain(self.mu[i - 1], self.nu[i - 1], self.phi[i - 1])

    def coefficients(self) -> list[MorphismCochain]:
        return [self.coefficient(i) for i in range(1, self.order + 1)]

    # full series including constant terms
    def mu_series(self) -> list[Cochain]:
        return [product_cochain(self.morphism.source)] + list(self.mu)

    def nu_series(self) -> list[Cochain]:
        return [product_cochain(self.morphism.target)] + list(self.nu)

    def phi_series(self) -> list[Cochain]:
        cx = self.complex
        return [linear_map_cochain(cx.A, cx.mod_AB, self.morphism.matrix)] + list(self.phi)

    def truncate(self, order: int) -> "DeformationTriple":
        return DeformationTriple(self.morphism, self.mu[:order], self.nu[:order], self.phi[:order])

    def extended_by(self, c: MorphismCochain) -> "DeformationTriple":
        return DeformationTriple(self.morphism, self.mu + (c.u,), self.nu + (c.v,), self.phi + (c.w,))

    def is_coefficientwise_invariant(self) -> bool:
        cx = self.complex
        return (
            all(is_invariant(c, cx.act_A) for c in self.mu)
            and all(is_invariant(c, cx.act_B) for c in self.nu)
            and all(is_invariant(c, cx.act_A, cx.act_B) for c in self.phi)
        )

    @cached_property
    def verified_to(self) -> int:
        """Largest r such that the deformation equations hold for every order up to r (-1 if none)."""
        return verify(self).verified_to

    def __eq__(self, other):
        if not isinstance(other, DeformationTriple):
            return NotImplemented
        return (
            self.morphism == other.morphism
            and self.mu == other.mu
            and self.nu == other.nu
            and self.phi == other.phi
        )

    def __hash__(self):
        return hash((self.morphism, self.mu, self.nu, self.phi))


# ---------------------------------------------------------------------------
# residual sums


def _table(f: Cochain) -> list:
    d = f.algebra.dim
    return [[f.value((a, b)) for b in range(d)] for a in range(d)]


def _bil(table, u: Sequence, v: Sequence, zero, dim):
    out = [zero] * dim
    for p, x in enumerate(u):
        if not x:
            continue
        row = table[p]
        for q, y in enumerate(v):
            if not y:
                continue
            c = x * y
            for k, z in enumerate(row[q]):
                if z:
                    out[k] = out[k] + c * z
    return out


def _lin(f: Cochain, u: Sequence, zero):
    out = [zero] * f.module.dim
    for p, x in enumerate(u):
        if x:
            for k, z in enumerate(f.value((p,))):
                if z:
                    out[k] = out[k] + x * z
    return out


def associator_sum(series: Sequence[Cochain], pairs) -> Cochain:
    """``sum over (i, j) of m_i(m_j(a, b), c) - m_i(a, m_j(b, c))`` on basis triples."""
    first = series[0]
    alg, mod = first.algebra, first.module
    d = alg.dim
    field = alg.field
    zero = field.zero
    tables = {i: _table(series[i]) for pair in pairs for i in pair}
    basis = [alg.basis_vector(i) for i in range(d)]
    coeffs = []
    for a, b, c in product(range(d), repeat=3):
        acc = [zero] * d
        for i, j in pairs:
            left = _bil(tables[i], tables[j][a][b], basis[c], zero, d)
            right = _bil(tables[i], basis[a], tables[j][b][c], zero, d)
            for k in range(d):
                acc[k] = acc[k] + left[k] - right[k]
        coeffs.extend(acc)
    return Cochain(alg, mod, 3, tuple(coeffs))


def morphism_sum(d: DeformationTriple, phi_mu_pairs, nu_phi_triples) -> Cochain:
    """``sum phi_i(mu_j(a, b)) - sum nu_i(phi_j a, phi_k b)`` on basis pairs."""
    cx = d.complex
    A, B = cx.A, cx.B
    zero = A.field.zero
    mus, nus, phis = d.mu_series(), d.nu_series(), d.phi_series()
    mu_tables = {j: _table(mus[j]) for _, j in phi_mu_pairs}
    nu_tables = {i: _table(nus[i]) for i, _, _ in nu_phi_triples}
    phi_images = {
        j: [_lin(phis[j], A.basis_vector(a), zero) for a in range(A.dim)]
        for triple in nu_phi_triples
        for j in triple[1:]
    }
    coeffs = []
    for a, b in product(range(A.dim), repeat=2):
        acc = [zero] * B.dim
        for i, j in phi_mu_pairs:
            val = _lin(phis[i], mu_tables[j][a][b], zero)
            for k in range(B.dim):
                acc[k] = acc[k] + val[k]
        for i, j, k_ in nu_phi_triples:
            val = _bil(nu_tables[i], phi_images[j][a], phi_images[k_][b], zero, B.dim)
            for k in range(B.dim):
                acc[k] = acc[k] - val[k]
        coeffs.extend(acc)
    return Cochain(A, cx.mod_AB, 2, tuple(coeffs))


def _pairs(r: int, positive: bool = False) -> list[tuple[int, int]]:
    lo = 1 if positive else 0
    return [(i, r - i) for i in range(lo, r + 1 - lo)]


def _triples(r: int) -> list[tuple[int, int, int]]:
    return [(i, j, r - i - j) for i in range(r + 1) for j in range(r + 1 - i)]


def primed_triples(r: int) -> list[tuple[int, int, int]]:
    """Compositions ``i + j + k = r`` with at most one zero part."""
    return [t for t in _triples(r) if sum(1 for x in t if x == 0) < 2]


# ---------------------------------------------------------------------------
# verification


@dataclass(frozen=True)
class OrderResidual:
    r: int
    source: Cochain  # associativity residual on A
    target: Cochain  # associativity residual on B
    morphism: Cochain  # multiplicativity residual of phi_t

    @property
    def ok(self) -> bool:
        return self.source.is_zero() and self.target.is_zero() and self.morphism.is_zero()

    def as_dict(self) -> dict:
        def nnz(c):
            return sum(1 for x in c.coeffs if x)

        return {
            "r": self.r,
            "ok": self.ok,
            "nonzero_source": nnz(self.source),
            "nonzero_target": nnz(self.target),
            "nonzero_morphism": nnz(self.morphism),
        }


@dataclass(frozen=True)
class VerificationReport:
    residuals: tuple
    invariant: bool

    @property
    def verified_to(self) -> int:
        r = -1
        for res in self.residuals:
            if not res.ok:
                break
            r = res.r
        return r

    @property
    def passed(self) -> bool:
        return self.invariant and all(res.ok for res in self.residuals)

    def first_failure(self) -> int | None:
        for res in self.residuals:
            if not res.ok:
                return res.r
        return None

    def as_dict(self) -> dict:
        return {
            "invariant": self.invariant,
            "verified_to": self.verified_to,
            "passed": self.passed,
            "orders": [res.as_dict() for res in self.residuals],
        }


def residuals_at(d: DeformationTriple, r: int) -> OrderResidual:
    """Residuals of the deformation equations at order ``r`` (coefficients beyond the order count as zero)."""
    zero = d.complex.zero(2)
    while d.order < r:
        d = d.extended_by(zero)
    pairs = _pairs(r)
    return OrderResidual(
        r,
        associator_sum(d.mu_series(), pairs),
        associator_sum(d.nu_series(), pairs),
        morphism_sum(d, pairs, _triples(r)),
    )


def verify(d: DeformationTriple, r_max: int | None = None) -> VerificationReport:
    """Check the deformation equations for r = 0 .. r_max and invariance of every coefficient."""
    if r_max is None:
        r_max = d.order
    if r_max > d.order:
        raise ValueError(f"cannot verify beyond the order {d.order}")
    residuals = tuple(residuals_at(d, r) for r in range(r_max + 1))
    return VerificationReport(residuals, d.is_coefficientwise_invariant())


def _require_verified(d: DeformationTriple):
    report = verify(d)
    if not report.passed:
        raise NotVerifiedError(
            f"deformation not verified (equations hold to order {report.verified_to}, "
            f"invariant={report.invariant}, order {d.order})"
        )


# ---------------------------------------------------------------------------
# infinitesimals and obstructions


def infinitesimal_order(d: DeformationTriple) -> tuple[int, MorphismCochain] | None:
    """Least n with a nonzero coefficient triple, or None if trivial through the order."""
    for i, c in enumerate(d.coefficients(), start=1):
        if not c.is_zero():
            return i, c
    return None


def check_infinitesimal_cocycle(d: DeformationTriple) -> bool:
    found = infinitesimal_order(d)
    if found is None:
        return True
    return d.complex.d_apply(found[1]).is_zero()


def obstruction(d: DeformationTriple) -> MorphismCochain:
    """The degree-3 obstruction to extending an order-N deformation to order N + 1."""
    _require_verified(d)
    return obstruction_unchecked(d)


def obstruction_unchecked(d: DeformationTriple) -> MorphismCochain:
    r = d.order + 1
    inner = _pairs(r, positive=True)
    o1 = associator_sum(d.mu_series(), inner)
    o2 = associator_sum(d.nu_series(), inner)
    # morphism_sum computes sum phi mu - sum nu(phi, phi); the obstruction has the opposite sign
    o3 = -morphism_sum(d, inner, primed_triples(r))
    return MorphismCochain(o1, o2, o3)


def obstruction_is_cocycle(d: DeformationTriple) -> bool:
    return d.complex.d_apply(obstruction(d)).is_zero()


@dataclass(frozen=True)
class ExtensionResult:
    deformation: DeformationTriple | None
    obstruction: MorphismCochain
    rank: int | None = None
    rank_augmented: int | None = None

    @property
    def obstructed(self) -> bool:
        return self.deformation is None


def extend_one_order(d: DeformationTriple) -> ExtensionResult:
    """Solve ``d(mu', nu', phi') = Ob`` in invariant coordinates and append the canonical solution."""
    ob = obstruction(d)
    cx = d.complex
    rhs = cx.coords(ob)
    dm = cx.d_matrix(2)
    x = solve_linear(dm, rhs)
    if x is None:
        cert = solve_certificate(dm, rhs)
        return ExtensionResult(None, ob, cert["rank"], cert["rank_augmented"])
    extended = d.extended_by(cx.from_coords(2, x))
    res = residuals_at(extended, extended.order)
    if not res.ok:
        raise RuntimeError("extension does not satisfy the deformation equations; sign convention broken")
    return ExtensionResult(extended, ob)


@dataclass(frozen=True)
class BuildResult:
    deformation: DeformationTriple  # the longest verified deformation reached
    obstruction: MorphismCochain | None = None  # set when stopped before max_order
    rank: int | None = None
    rank_augmented: int | None = None

    @property
    def obstructed(self) -> bool:
        return self.obstruction is not None

    @property
    def failed_order(self) -> int | None:
        return self.deformation.order + 1 if self.obstructed else None


def build_from_infinitesimal(phi: EquivariantMorphism, seed: MorphismCochain, max_order: int) -> BuildResult:
    """Extend the order-1 deformation with infinitesimal ``seed`` as far as ``max_order``."""
    cx = deformation_complex(phi)
    if seed.degree != 2:
        raise ValueError("seed is not a cocycle (wrong degree)")
    if not cx.is_invariant(seed) or not cx.d_apply(seed).is_zero():
        raise ValueError("seed is not a cocycle")
    if max_order < 1:
        raise ValueError("max_order must be at least 1")
    d = DeformationTriple.from_coefficients(phi, [seed])
    while d.order < max_order:
        res = extend_one_order(d)
        if res.obstructed:
            return BuildResult(d, res.obstruction, res.rank, res.rank_augmented)
        d = res.deformation
    return BuildResult(d)
