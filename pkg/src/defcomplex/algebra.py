"""Algebras by structure constants, finite group actions, bimodules, morphisms.

Conventions used throughout the package:

* ``e_i e_j = sum_k c[i][j][k] e_k``; an algebra stores, for each pair
  ``(i, j)``, the sparse tuple of ``(k, c)`` pairs.
* A linear map is a matrix acting on coordinate columns, so column ``j`` is the
  image of ``e_j``.  Group elements and morphisms follow this convention.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Sequence

from .linalg import Field, Matrix, is_invertible

SparseVec = tuple  # tuple of (index, value) pairs with nonzero values, sorted by index


def _sparse(field: Field, mapping: dict) -> SparseVec:
    return tuple((k, field(v)) for k, v in sorted(mapping.items()) if field(v))


def _accumulate(acc: dict, items, c=1):
    for k, x in items:
        y = acc.get(k, 0) + c * x
        if y:
            acc[k] = y
        else:
            acc.pop(k, None)


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of a structural check: it passes iff there are no violations."""

    check: str
    violations: tuple = ()

    @property
    def passed(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.passed

    def first(self) -> str | None:
        if not self.violations:
            return None
        return str(self.violations[0])


@dataclass(frozen=True)
class Algebra:
    """A finite-dimensional (not necessarily unital) associative algebra."""

    field: Field
    dim: int
    table: tuple  # table[i][j] is the sparse product e_i e_j
    basis_names: tuple = ()

    def __post_init__(self):
        if not self.basis_names:
            object.__setattr__(self, "basis_names", tuple(f"e{i}" for i in range(self.dim)))
        if len(self.basis_names) != self.dim:
            raise ValueError("basis_names must have one label per basis vector")

    @classmethod
    def from_triples(cls, field: Field, dim: int, triples, basis_names: Sequence[str] = ()) -> "Algebra":
        """Build from ``(i, j, k, c)`` entries meaning ``c`` is added to ``c[i][j][k]``."""
        acc = [[dict() for _ in range(dim)] for _ in range(dim)]
        for i, j, k, c in triples:
            for idx in (i, j, k):
                if not (isinstance(idx, int) and 0 <= idx < dim):
                    raise IndexError(f"structure index {idx} out of range for dimension {dim}")
            acc[i][j][k] = acc[i][j].get(k, 0) + field(c)
        table = tuple(tuple(_sparse(field, acc[i][j]) for j in range(dim)) for i in range(dim))
        return cls(field, dim, table, tuple(basis_names))

    @classmethod
    def from_tensor(cls, field: Field, tensor, basis_names: Sequence[str] = ()) -> "Algebra":
        dim = len(tensor)
        triples = [
            (i, j, k, tensor[i][j][k]) for i in range(dim) for j in range(dim) for k in range(dim) if tensor[i][j][k]
        ]
        return cls.from_triples(field, dim, triples, basis_names)

    def structure_constant(self, i: int, j: int, k: int):
        for kk, c in self.table[i][j]:
            if kk == k:
                return c
        return self.field.zero

    def tensor(self) -> list:
        z = self.field.zero
        out = [[[z] * self.dim for _ in range(self.dim)] for _ in range(self.dim)]
        for i, j in product(range(self.dim), repeat=2):
            for k, c in self.table[i][j]:
                out[i][j][k] = c
        return out

    def triples(self) -> list[tuple]:
        return [(i, j, k, c) for i in range(self.dim) for j in range(self.dim) for k, c in self.table[i][j]]

    def multiply(self, u: Sequence, v: Sequence) -> tuple:
        """Product of two dense coordinate vectors."""
        acc: dict = {}
        for i, a in enumerate(u):
            if not a:
                continue
            for j, b in enumerate(v):
                if not b:
                    continue
                _accumulate(acc, self.table[i][j], a * b)
        z = self.field.zero
        return tuple(acc.get(k, z) for k in range(self.dim))

    def basis_vector(self, i: int) -> tuple:
        z, one = self.field.zero, self.field.one
        return tuple(one if k == i else z for k in range(self.dim))

    def as_bimodule(self) -> "Bimodule":
        """The algebra as a bimodule over itself."""
        return Bimodule(self.field, self.dim, self.dim, self.table, self.table)

    def find_unit(self) -> tuple | None:
        """Coordinates of a two-sided unit, or None if there is none."""
        from .linalg import solve_linear

        # unit u: u e_j = e_j and e_j u = e_j for all j; linear in u
        rows, rhs = [], []
        z, one = self.field.zero, self.field.one
        for j in range(self.dim):
            for k in range(self.dim):
                rows.append([self.structure_constant(i, j, k) for i in range(self.dim)])
                rhs.append(one if k == j else z)
                rows.append([self.structure_constant(j, i, k) for i in range(self.dim)])
                rhs.append(one if k == j else z)
        if not rows:
            return None
        return solve_linear(Matrix.from_rows(self.field, rows, ncols=self.dim), rhs)


@dataclass(frozen=True)
class Bimodule:
    """A bimodule over an algebra of dimension ``algebra_dim``.

    ``left[i][m]`` is the sparse vector ``e_i . f_m`` and ``right[m][i]`` is
    ``f_m . e_i``.
    """

    field: Field
    algebra_dim: int
    dim: int
    left: tuple
    right: tuple

    def act_left(self, a: Sequence, x: Sequence) -> tuple:
        acc: dict = {}
        for i, ai in enumerate(a):
            if ai:
                for m, xm in enumerate(x):
                    if xm:
                        _accumulate(acc, self.left[i][m], ai * xm)
        z = self.field.zero
        return tuple(acc.get(n, z) for n in range(self.dim))

    def act_right(self, x: Sequence, a: Sequence) -> tuple:
        acc: dict = {}
        for m, xm in enumerate(x):
            if xm:
                for i, ai in enumerate(a):
                    if ai:
                        _accumulate(acc, self.right[m][i], ai * xm)
        z = self.field.zero
        return tuple(acc.get(n, z) for n in range(self.dim))


def check_associativity(a: Algebra) -> ValidationReport:
    """Enumerate every basis quadruple ``(i, j, k, l)`` and compare ``(e_i e_j) e_k`` with ``e_i (e_j e_k)``."""
    violations = []
    d = a.dim
    for i, j, k in product(range(d), repeat=3):
        lhs: dict = {}
        for m, c in a.table[i][j]:
            _accumulate(lhs, a.table[m][k], c)
        rhs: dict = {}
        for m, c in a.table[j][k]:
            _accumulate(rhs, a.table[i][m], c)
        for l in range(d):
            if lhs.get(l, 0) != rhs.get(l, 0):
                violations.append((i, j, k, l))
    return ValidationReport("associativity", tuple(violations))


def check_bimodule(a: Algebra, m: Bimodule) -> ValidationReport:
    """The three mixed associativity conditions on basis elements."""
    if m.algebra_dim != a.dim:
        raise ValueError("bimodule is over an algebra of a different dimension")
    violations = []
    d, dm = a.dim, m.dim
    for i, j, x in product(range(d), range(d), range(dm)):
        # (e_i e_j) f_x = e_i (e_j f_x)
        lhs: dict = {}
        for p, c in a.table[i][j]:
            _accumulate(lhs, m.left[p][x], c)
        rhs: dict = {}
        for y, c in m.left[j][x]:
            _accumulate(rhs, m.left[i][y], c)
        if lhs != rhs:
            violations.append(("left", i, j, x))
        # f_x (e_i e_j) = (f_x e_i) e_j
        lhs = {}
        for p, c in a.table[i][j]:
            _accumulate(lhs, m.right[x][p], c)
        rhs = {}
        for y, c in m.right[x][i]:
            _accumulate(rhs, m.right[y][j], c)
        if lhs != rhs:
            violations.append(("right", x, i, j))
        # (e_i f_x) e_j = e_i (f_x e_j)
        lhs = {}
        for y, c in m.left[i][x]:
            _accumulate(lhs, m.right[y][j], c)
        rhs = {}
        for y, c in m.right[x][j]:
            _accumulate(rhs, m.left[i][y], c)
        if lhs != rhs:
            violations.append(("middle", i, x, j))
    return ValidationReport("bimodule", tuple(violations))


# ---------------------------------------------------------------------------
# group actions


class GroupClosureError(ValueError):
    pass


@dataclass(frozen=True)
class GroupAction:
    """A finite group acting on an algebra, fully enumerated.

    ``elements[g]`` is the matrix of ``g``; ``mult_table[g][h]`` is the index
    of ``g h``.  ``generators`` lists indices that generate the group.
    """

    algebra: Algebra
    elements: tuple
    identity_index: int
    mult_table: tuple
    generators: tuple = ()

    @property
    def order(self) -> int:
        return len(self.elements)

    def inverse_index(self, g: int) -> int:
        row = self.mult_table[g]
        return row.index(self.identity_index)

    def generator_matrices(self) -> list[Matrix]:
        gens = self.generators or tuple(i for i in range(self.order) if i != self.identity_index)
        return [self.elements[g] for g in gens]

    def same_group(self, other: "GroupAction") -> bool:
        return self.mult_table == other.mult_table and self.identity_index == other.identity_index


def trivial_action(algebra: Algebra) -> GroupAction:
    return GroupAction(algebra, (Matrix.identity(algebra.field, algebra.dim),), 0, ((0,),), ())


def close_actions(specs: Sequence[tuple[Algebra, Sequence[Matrix]]], cap: int = 1024) -> list[GroupAction]:
    """Close several generator lists simultaneously.

    ``specs`` pairs each algebra with its generator matrices; the ``i``-th
    generators of all algebras are the images of one abstract generator.  The
    returned actions share element ordering and multiplication table.
    """
    if not specs:
        raise ValueError("no algebras given")
    ngen = len(specs[0][1])
    for alg, gens in specs:
        if len(gens) != ngen:
            raise ValueError("every algebra needs the same number of generators")
        for g in gens:
            if g.shape != (alg.dim, alg.dim):
                raise ValueError(f"generator of shape {g.shape} for an algebra of dimension {alg.dim}")
            if not is_invertible(g):
                raise GroupClosureError("generator not invertible")
    ident = tuple(Matrix.identity(alg.field, alg.dim) for alg, _ in specs)
    gens = [tuple(specs[a][1][i] for a in range(len(specs))) for i in range(ngen)]
    elements = [ident]
    index = {ident: 0}
    frontier = [ident]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = tuple(gm @ xm for gm, xm in zip(g, x))
                if y not in index:
                    if len(elements) >= cap:
                        raise GroupClosureError(f"closure exceeds cap ({cap})")
                    index[y] = len(elements)
                    elements.append(y)
                    nxt.append(y)
        frontier = nxt
    n = len(elements)
    table = []
    for x in elements:
        row = []
        for y in elements:
            z = tuple(xm @ ym for xm, ym in zip(x, y))
            row.append(index[z])
        table.append(tuple(row))
    gen_idx = tuple(index[g] for g in gens)
    actions = []
    for a, (alg, _) in enumerate(specs):
        act = GroupAction(alg, tuple(e[a] for e in elements), 0, tuple(table), gen_idx)
        report = check_action(act)
        bad = [v for v in report.violations if v[0] == "multiplicativity"]
        if bad:
            raise GroupClosureError(f"generated map violates multiplicativity on products: {bad[0]}")
        actions.append(act)
    assert all(len(act.elements) == n for act in actions)
    return actions


def close_group(algebra: Algebra, generators: Sequence[Matrix], cap: int = 1024) -> GroupAction:
    """Enumerate the finite group generated by ``generators`` acting on ``algebra``."""
    return close_actions([(algebra, list(generators))], cap)[0]


def check_action(ga: GroupAction) -> ValidationReport:
    a = ga.algebra
    violations = []
    n = ga.order
    ident = Matrix.identity(a.field, a.dim)
    if not (0 <= ga.identity_index < n) or ga.elements[ga.identity_index] != ident:
        violations.append(("identity", ga.identity_index))
    if len(ga.mult_table) != n or any(len(r) != n for r in ga.mult_table):
        violations.append(("mult_table_shape",))
    else:
        for g, h in product(range(n), repeat=2):
            k = ga.mult_table[g][h]
            if not (0 <= k < n) or ga.elements[g] @ ga.elements[h] != ga.elements[k]:
                violations.append(("closure", g, h))
    for g, m in enumerate(ga.elements):
        if m.shape != (a.dim, a.dim) or not is_invertible(m):
            violations.append(("invertibility", g))
    for g, m in enumerate(ga.elements):
        if m.shape != (a.dim, a.dim):
            continue
        cols = m.columns()
        for i, j in product(range(a.dim), repeat=2):
            lhs = m.apply(a.multiply(a.basis_vector(i), a.basis_vector(j)))
            rhs = a.multiply(cols[i], cols[j])
            if lhs != rhs:
                violations.append(("multiplicativity", g, i, j))
    return ValidationReport("action", tuple(violations))


# ---------------------------------------------------------------------------
# morphisms


@dataclass(frozen=True)
class EquivariantMorphism:
    """``matrix`` is ``target.dim x source.dim``; column ``j`` is ``phi(e_j)``."""

    source: Algebra
    target: Algebra
    matrix: Matrix
    source_action: GroupAction = None
    target_action: GroupAction = None

    def __post_init__(self):
        if self.source_action is None:
            object.__setattr__(self, "source_action", trivial_action(self.source))
        if self.target_action is None:
            object.__setattr__(self, "target_action", trivial_action(self.target))
        if self.matrix.shape != (self.target.dim, self.source.dim):
            raise ValueError(
                f"morphism matrix has shape {self.matrix.shape}, expected {(self.target.dim, self.source.dim)}"
            )
        if not self.source_action.same_group(self.target_action):
            raise ValueError("source and target actions are not by the same group (mult_table mismatch)")

    @property
    def field(self) -> Field:
        return self.source.field

    def __call__(self, v: Sequence) -> tuple:
        return self.matrix.apply(v)


def identity_morphism(algebra: Algebra, action: GroupAction | None = None) -> EquivariantMorphism:
    return EquivariantMorphism(algebra, algebra, Matrix.identity(algebra.field, algebra.dim), action, action)


def check_morphism(phi: EquivariantMorphism) -> ValidationReport:
    a, b = phi.source, phi.target
    if not phi.source_action.same_group(phi.target_action):
        raise ValueError("group shape mismatch between source and target actions")
    violations = []
    cols = phi.matrix.columns()
    for i, j in product(range(a.dim), repeat=2):
        lhs = phi(a.multiply(a.basis_vector(i), a.basis_vector(j)))
        rhs = b.multiply(cols[i], cols[j])
        if lhs != rhs:
            violations.append(("multiplicativity", i, j))
    for g, (ga, gb) in enumerate(zip(phi.source_action.elements, phi.target_action.elements)):
        if phi.matrix @ ga != gb @ phi.matrix:
            violations.append(("equivariance", g))
    return ValidationReport("morphism", tuple(violations))


def induced_bimodule(phi: EquivariantMorphism) -> Bimodule:
    """The target algebra as a bimodule over the source: ``a.b = phi(a) b``, ``b.a = b phi(a)``."""
    a, b = phi.source, phi.target
    cols = phi.matrix.columns()
    left, right = [], []
    for i in range(a.dim):
        row = []
        for m in range(b.dim):
            row.append(_sparse(b.field, dict(enumerate(b.multiply(cols[i], b.basis_vector(m))))))
        left.append(tuple(row))
    for m in range(b.dim):
        row = []
        for i in range(a.dim):
            row.append(_sparse(b.field, dict(enumerate(b.multiply(b.basis_vector(m), cols[i])))))
        right.append(tuple(row))
    return Bimodule(a.field, a.dim, b.dim, tuple(left), tuple(right))
