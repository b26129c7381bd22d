"""Formal isomorphisms between deformations, trivialization and rigidity."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Sequence

from .algebra import EquivariantMorphism
from .deformation import (
    DeformationTriple,
    NotVerifiedError,
    _require_verified,
    build_from_infinitesimal,
    infinitesimal_order,
    verify,
)
from .hochschild import Cochain, coboundary_apply, cochain_matrix
from .linalg import Matrix, inverse, membership, solve_certificate, solve_linear
from .morphism import MorphismCochain, ingredient_dims, morphism_cohomology


# ---------------------------------------------------------------------------
# truncated series of linear maps


def compose_series(a: Sequence[Matrix], b: Sequence[Matrix], order: int) -> list[Matrix]:
    """Coefficients of ``a(t) b(t)`` through ``t^order`` (missing terms are zero)."""
    out = []
    for k in range(order + 1):
        acc = None
        for i in range(k + 1):
            if i < len(a) and k - i < len(b):
                term = a[i] @ b[k - i]
                acc = term if acc is None else acc + term
        if acc is None:
            acc = Matrix.zeros(a[0].field, a[0].nrows, b[0].ncols)
        out.append(acc)
    return out


def truncated_inverse(series: Sequence[Matrix], order: int) -> list[Matrix]:
    """Inverse of a matrix power series through ``t^order``; the constant term must be invertible."""
    try:
        b0 = inverse(series[0])
    except ZeroDivisionError as exc:
        raise ValueError("constant term not invertible") from exc
    out = [b0]
    for k in range(1, order + 1):
        acc = None
        for i in range(1, k + 1):
            if i < len(series):
                term = series[i] @ out[k - i]
                acc = term if acc is None else acc + term
        out.append(Matrix.zeros(b0.field, b0.nrows, b0.ncols) if acc is None else -(b0 @ acc))
    return out


@dataclass(frozen=True)
class FormalIsomorphismPair:
    """``psi[i]`` and ``theta[i]`` are the coefficients of t^i, with ``psi[0]`` and ``theta[0]`` identities."""

    psi: tuple
    theta: tuple

    def __post_init__(self):
        object.__setattr__(self, "psi", tuple(self.psi))
        object.__setattr__(self, "theta", tuple(self.theta))
        if len(self.psi) != len(self.theta) or not self.psi:
            raise ValueError("psi and theta need the same positive number of coefficients")
        for series in (self.psi, self.theta):
            m = series[0]
            if m != Matrix.identity(m.field, m.nrows):
                raise ValueError("constant terms must be identity maps")

    @classmethod
    def identity(cls, morphism: EquivariantMorphism, order: int) -> "FormalIsomorphismPair":
        F = morphism.field
        a, b = morphism.source.dim, morphism.target.dim
        psi = [Matrix.identity(F, a)] + [Matrix.zeros(F, a, a)] * order
        theta = [Matrix.identity(F, b)] + [Matrix.zeros(F, b, b)] * order
        return cls(tuple(psi), tuple(theta))

    @classmethod
    def from_higher(cls, morphism: EquivariantMorphism, psi: Sequence[Matrix], theta: Sequence[Matrix]):
        """Build from the coefficients of t^1 .. t^N."""
        F = morphism.field
        return cls(
            (Matrix.identity(F, morphism.source.dim),) + tuple(psi),
            (Matrix.identity(F, morphism.target.dim),) + tuple(theta),
        )

    @property
    def order(self) -> int:
        return len(self.psi) - 1

    def is_equivariant(self, morphism: EquivariantMorphism) -> bool:
        for series, action in ((self.psi, morphism.source_action), (self.theta, morphism.target_action)):
            for m in series:
                if any(m @ g != g @ m for g in action.elements):
                    return False
        return True

    def inverse(self) -> "FormalIsomorphismPair":
        return FormalIsomorphismPair(
            tuple(truncated_inverse(self.psi, self.order)), tuple(truncated_inverse(self.theta, self.order))
        )


# ---------------------------------------------------------------------------
# conjugation


def _add_into(acc: list, vec: Sequence, c=1):
    for k, x in enumerate(vec):
        if x:
            acc[k] = acc[k] + c * x


def _twisted(mu_series: Sequence[Cochain], left: Sequence[Sequence], right: Sequence[Sequence], order: int) -> list:
    """``W_s = sum_{j+l+m=s} mu_j(left_l, right_m)`` for s = 0 .. order."""
    dim = mu_series[0].module.dim
    zero = mu_series[0].field.zero
    out = []
    for s in range(order + 1):
        acc = [zero] * dim
        for j in range(min(s, len(mu_series) - 1) + 1):
            for l in range(s - j + 1):
                m = s - j - l
                _add_into(acc, mu_series[j].evaluate(left[l], right[m]))
        out.append(acc)
    return out


def _conjugate_product(mu_series, psi, psi_inv, order) -> list[Cochain]:
    """Coefficients 1..order of ``Psi o mu_t o (Psi^-1 x Psi^-1)``."""
    alg, mod = mu_series[0].algebra, mu_series[0].module
    d = alg.dim
    zero = alg.field.zero
    inv_cols = [m.columns() for m in psi_inv]
    values = [[None] * (d * d) for _ in range(order + 1)]
    for a, b in product(range(d), repeat=2):
        w = _twisted(mu_series, [c[a] for c in inv_cols], [c[b] for c in inv_cols], order)
        for k in range(order + 1):
            acc = [zero] * d
            for i in range(k + 1):
                _add_into(acc, psi[i].apply(w[k - i]))
            values[k][a * d + b] = acc
    out = []
    for k in range(1, order + 1):
        coeffs = tuple(x for vec in values[k] for x in vec)
        out.append(Cochain(alg, mod, 2, coeffs))
    return out


def _phi_matrices(d: DeformationTriple) -> list[Matrix]:
    return [cochain_matrix(c) for c in d.phi_series()]


def conjugate(d: DeformationTriple, p: FormalIsomorphismPair) -> DeformationTriple:
    """Transport ``d`` along ``p``: the result is the deformation ``p`` maps ``d`` to."""
    if p.order != d.order:
        raise ValueError(f"order mismatch: pair has order {p.order}, deformation {d.order}")
    n = d.order
    psi_inv = truncated_inverse(p.psi, n)
    theta_inv = truncated_inverse(p.theta, n)
    mu = _conjugate_product(d.mu_series(), p.psi, psi_inv, n)
    nu = _conjugate_product(d.nu_series(), p.theta, theta_inv, n)
    phi_t = compose_series(compose_series(p.theta, _phi_matrices(d), n), psi_inv, n)
    cx = d.complex
    from .hochschild import linear_map_cochain

    phi = [linear_map_cochain(cx.A, cx.mod_AB, m) for m in phi_t[1:]]
    return DeformationTriple(d.morphism, tuple(mu), tuple(nu), tuple(phi))


def _intertwines(mu_series, mu_tilde_series, psi, order) -> bool:
    """``mu~_t(Psi a, Psi b) = Psi mu_t(a, b)`` through ``t^order`` on basis pairs."""
    alg = mu_series[0].algebra
    d = alg.dim
    zero = alg.field.zero
    cols = [m.columns() for m in psi]
    for a, b in product(range(d), repeat=2):
        lhs = _twisted(mu_tilde_series, [c[a] for c in cols], [c[b] for c in cols], order)
        for k in range(order + 1):
            rhs = [zero] * d
            for i in range(k + 1):
                if k - i < len(mu_series):
                    _add_into(rhs, psi[i].apply(mu_series[k - i].value((a, b))))
            if tuple(lhs[k]) != tuple(rhs):
                return False
    return True


def is_equivalence(p: FormalIsomorphismPair, d1: DeformationTriple, d2: DeformationTriple) -> bool:
    """Whether ``p`` is an equivariant formal isomorphism from ``d1`` to ``d2`` through their order."""
    if d1.morphism != d2.morphism or d1.order != d2.order or p.order != d1.order:
        return False
    n = d1.order
    if not p.is_equivariant(d1.morphism):
        return False
    if not _intertwines(d1.mu_series(), d2.mu_series(), p.psi, n):
        return False
    if not _intertwines(d1.nu_series(), d2.nu_series(), p.theta, n):
        return False
    lhs = compose_series(_phi_matrices(d2), p.psi, n)
    rhs = compose_series(p.theta, _phi_matrices(d1), n)
    return lhs == rhs


def infinitesimal_class_compare(d1: DeformationTriple, d2: DeformationTriple) -> bool:
    """Whether the order-1 coefficients of ``d1`` and ``d2`` differ by a coboundary."""
    if d1.morphism != d2.morphism:
        raise ValueError("deformations of different morphisms")
    for d in (d1, d2):
        if d.order < 1 or verify(d, 1).verified_to < 1:
            raise NotVerifiedError("both deformations must be verified to order at least 1")
    cx = d1.complex
    diff = cx.coords(d1.coefficient(1) - d2.coefficient(1))
    return membership(diff, cx.coboundary_image(2))[0]


# ---------------------------------------------------------------------------
# trivialization and rigidity


@dataclass(frozen=True)
class TrivializeResult:
    order: int | None  # infinitesimal order examined; None for a deformation trivial through its order
    reduced: DeformationTriple | None
    pair: FormalIsomorphismPair | None
    infinitesimal: MorphismCochain | None = None
    rank: int | None = None
    rank_augmented: int | None = None

    @property
    def is_coboundary(self) -> bool:
        return self.reduced is not None


def normalize_primitive(d: DeformationTriple, primitive: MorphismCochain) -> tuple[Cochain, Cochain]:
    """Turn ``(psi, theta, m)`` into ``(psi, theta + d m)`` with the same differential."""
    cx = d.complex
    m_in_b = Cochain(cx.B, cx.mod_B, 0, primitive.w.coeffs)
    theta = primitive.v + coboundary_apply(m_in_b)
    return primitive.u, theta


def trivialize_step(d: DeformationTriple) -> TrivializeResult:
    """Remove the n-infinitesimal by a formal isomorphism when it is a coboundary."""
    try:
        _require_verified(d)
    except NotVerifiedError as exc:
        raise NotVerifiedError(f"not verified: {exc}") from exc
    found = infinitesimal_order(d)
    if found is None:
        return TrivializeResult(None, d, FormalIsomorphismPair.identity(d.morphism, d.order))
    n, inf = found
    cx = d.complex
    rhs = cx.coords(inf)
    dm = cx.d_matrix(1)
    x = solve_linear(dm, rhs)
    if x is None:
        cert = solve_certificate(dm, rhs)
        return TrivializeResult(n, None, None, inf, cert["rank"], cert["rank_augmented"])
    psi_c, theta_c = normalize_primitive(d, cx.from_coords(1, x))
    primitive = MorphismCochain(psi_c, theta_c, Cochain.zero(cx.A, cx.mod_AB, 0))
    if cx.d_apply(primitive) != inf:
        raise RuntimeError("normalized primitive does not reproduce the infinitesimal")
    F = d.morphism.field
    psi = [Matrix.identity(F, cx.A.dim)] + [Matrix.zeros(F, cx.A.dim, cx.A.dim)] * d.order
    theta = [Matrix.identity(F, cx.B.dim)] + [Matrix.zeros(F, cx.B.dim, cx.B.dim)] * d.order
    psi[n] = cochain_matrix(psi_c)
    theta[n] = cochain_matrix(theta_c)
    pair = FormalIsomorphismPair(tuple(psi), tuple(theta))
    reduced = conjugate(d, pair)
    return TrivializeResult(n, reduced, pair, inf)


def trivialize(d: DeformationTriple, max_steps: int | None = None) -> tuple[DeformationTriple, list[TrivializeResult]]:
    """Iterate :func:`trivialize_step` until the deformation is trivial or an infinitesimal is not a coboundary."""
    steps = []
    limit = d.order if max_steps is None else max_steps
    for _ in range(limit + 1):
        res = trivialize_step(d)
        steps.append(res)
        if not res.is_coboundary or res.order is None:
            break
        d = res.reduced
    return d, steps


@dataclass(frozen=True)
class RigidityReport:
    h2: int
    h2_source: int
    h2_target: int
    h1_mixed: int
    probes: tuple = ()  # (representative index, order reached, obstructed)

    @property
    def rigid_sufficient(self) -> bool:
        return self.h2 == 0

    @property
    def ingredient_rigid(self) -> bool:
        return (self.h2_source, self.h2_target, self.h1_mixed) == (0, 0, 0)

    def as_dict(self) -> dict:
        return {
            "h2": self.h2,
            "rigid_sufficient": self.rigid_sufficient,
            "ingredient_route": {
                "H2_G(A,A)": self.h2_source,
                "H2_G(B,B)": self.h2_target,
                "H1_G(A,B)": self.h1_mixed,
                "rigid_sufficient": self.ingredient_rigid,
            },
            "probes": [
                {"representative": i, "order_reached": r, "obstructed": o} for i, r, o in self.probes
            ],
        }


def rigidity_report(phi: EquivariantMorphism, probe_order: int = 0) -> RigidityReport:
    """The sufficient conditions for rigidity; never asserts non-rigidity.

    With ``probe_order >= 1`` each representative of H^2 is also extended
    order by order, which shows how far those infinitesimals integrate.
    """
    coh = morphism_cohomology(phi, 2)
    h_a, h_b, h_ab = ingredient_dims(phi, 2)
    probes = []
    if probe_order >= 1:
        for i, rep in enumerate(coh.representatives):
            res = build_from_infinitesimal(phi, rep, probe_order)
            probes.append((i, res.deformation.order, res.obstructed))
    return RigidityReport(coh.betti, h_a, h_b, h_ab, tuple(probes))
