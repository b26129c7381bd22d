"""Hochschild cochains, the coboundary, invariant cochains and equivariant cohomology.

A cochain ``f`` in C^n(A; M) is stored by its coordinates: the coefficient of
``f_m`` in ``f(e_{i_1}, ..., e_{i_n})`` sits at position
``flat(i_1, ..., i_n) * dim(M) + m``, where ``flat`` is the lexicographic index
of the tuple.  Degree 0 cochains are vectors of M.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Sequence

from .algebra import Algebra, Bimodule, GroupAction, trivial_action
from .linalg import DimensionError, Matrix, Subspace, kernel_basis, rref, vstack


def flat_index(t: Sequence[int], d: int) -> int:
    idx = 0
    for x in t:
        idx = idx * d + x
    return idx


def num_coords(d_a: int, d_m: int, n: int) -> int:
    return d_a**n * d_m


@dataclass(frozen=True, eq=False)
class Cochain:
    algebra: Algebra
    module: Bimodule
    degree: int
    coeffs: tuple

    def __post_init__(self):
        if self.degree < 0:
            raise ValueError("negative degree")
        expected = num_coords(self.algebra.dim, self.module.dim, self.degree)
        if len(self.coeffs) != expected:
            raise DimensionError(f"degree-{self.degree} cochain needs {expected} coefficients, got {len(self.coeffs)}")

    @classmethod
    def zero(cls, algebra: Algebra, module: Bimodule, degree: int) -> "Cochain":
        z = algebra.field.zero
        return cls(algebra, module, degree, (z,) * num_coords(algebra.dim, module.dim, degree))

    @classmethod
    def from_values(cls, algebra: Algebra, module: Bimodule, degree: int, values: dict) -> "Cochain":
        """``values`` maps basis tuples to M-vectors (dense sequences or ``{m: c}`` dicts)."""
        field = algebra.field
        coeffs = [field.zero] * num_coords(algebra.dim, module.dim, degree)
        for t, vec in values.items():
            t = tuple(t)
            if len(t) != degree or any(not 0 <= x < algebra.dim for x in t):
                raise IndexError(f"basis tuple {t} invalid for degree {degree}")
            base = flat_index(t, algebra.dim) * module.dim
            items = vec.items() if isinstance(vec, dict) else enumerate(vec)
            for m, c in items:
                coeffs[base + m] = coeffs[base + m] + field(c)
        return cls(algebra, module, degree, tuple(coeffs))

    @property
    def field(self):
        return self.algebra.field

    def value(self, t: Sequence[int]) -> tuple:
        """``f(e_{t_1}, ..., e_{t_n})`` as a coordinate vector of M."""
        base = flat_index(t, self.algebra.dim) * self.module.dim
        return self.coeffs[base : base + self.module.dim]

    def evaluate(self, *args: Sequence) -> tuple:
        """Multilinear evaluation on arbitrary coordinate vectors of A."""
        if len(args) != self.degree:
            raise DimensionError(f"degree-{self.degree} cochain evaluated on {len(args)} arguments")
        dm = self.module.dim
        support = [[(i, x) for i, x in enumerate(v) if x] for v in args]
        out = [self.field.zero] * dm
        for combo in product(*support):
            c = self.field.one
            t = []
            for i, x in combo:
                c = c * x
                t.append(i)
            base = flat_index(t, self.algebra.dim) * dm
            for m in range(dm):
                y = self.coeffs[base + m]
                if y:
                    out[m] = out[m] + c * y
        return tuple(out)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def _check(self, other: "Cochain"):
        if (self.degree, self.algebra.dim, self.module.dim) != (other.degree, other.algebra.dim, other.module.dim):
            raise DimensionError("cochain shapes differ")

    def __add__(self, other: "Cochain") -> "Cochain":
        self._check(other)
        return Cochain(self.algebra, self.module, self.degree, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "Cochain") -> "Cochain":
        self._check(other)
        return Cochain(self.algebra, self.module, self.degree, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> "Cochain":
        return Cochain(self.algebra, self.module, self.degree, tuple(-a for a in self.coeffs))

    def scale(self, c) -> "Cochain":
        c = self.field(c)
        return Cochain(self.algebra, self.module, self.degree, tuple(c * a for a in self.coeffs))

    def __eq__(self, other):
        if not isinstance(other, Cochain):
            return NotImplemented
        return (
            self.degree == other.degree
            and self.algebra.dim == other.algebra.dim
            and self.module.dim == other.module.dim
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.degree, self.algebra.dim, self.module.dim, self.coeffs))

    def __repr__(self):
        nz = sum(1 for x in self.coeffs if x)
        return f"<Cochain degree={self.degree} shape=({self.algebra.dim}^{self.degree}, {self.module.dim}) nnz={nz}>"


def product_cochain(algebra: Algebra) -> Cochain:
    """The multiplication of ``algebra`` as a 2-cochain with values in itself."""
    d = algebra.dim
    coeffs = [algebra.field.zero] * (d**3)
    for i, j in product(range(d), repeat=2):
        for k, c in algebra.table[i][j]:
            coeffs[(i * d + j) * d + k] = c
    return Cochain(algebra, algebra.as_bimodule(), 2, tuple(coeffs))


def linear_map_cochain(algebra: Algebra, module: Bimodule, matrix: Matrix) -> Cochain:
    """A linear map A -> M (matrix ``dim M x dim A``) as a degree-1 cochain."""
    if matrix.shape != (module.dim, algebra.dim):
        raise DimensionError(f"expected a {module.dim}x{algebra.dim} matrix, got {matrix.shape}")
    coeffs = []
    for i in range(algebra.dim):
        coeffs.extend(matrix.column(i))
    return Cochain(algebra, module, 1, tuple(coeffs))


def cochain_matrix(f: Cochain) -> Matrix:
    """Inverse of :func:`linear_map_cochain` for degree-1 cochains."""
    if f.degree != 1:
        raise ValueError("only degree-1 cochains are linear maps")
    return Matrix.from_columns(f.field, [f.value((i,)) for i in range(f.algebra.dim)], nrows=f.module.dim)


# ---------------------------------------------------------------------------
# coboundary


def coboundary_apply(f: Cochain) -> Cochain:
    """Evaluate the Hochschild coboundary of ``f`` on every basis tuple."""
    a, m, n = f.algebra, f.module, f.degree
    d, dm = a.dim, m.dim
    field = a.field
    z = field.zero
    out = []
    sign_last = -1 if (n + 1) % 2 else 1
    for t in product(range(d), repeat=n + 1):
        acc = [z] * dm
        # x_1 . f(x_2, ..., x_{n+1})
        for mm, y in enumerate(f.value(t[1:])):
            if y:
                for k, c in m.left[t[0]][mm]:
                    acc[k] = acc[k] + c * y
        # sum_i (-1)^i f(..., x_i x_{i+1}, ...)
        for i in range(1, n + 1):
            sgn = -1 if i % 2 else 1
            for p, c in a.table[t[i - 1]][t[i]]:
                val = f.value(t[: i - 1] + (p,) + t[i + 1 :])
                for k in range(dm):
                    if val[k]:
                        acc[k] = acc[k] + sgn * c * val[k]
        # (-1)^{n+1} f(x_1, ..., x_n) . x_{n+1}
        for mm, y in enumerate(f.value(t[:n])):
            if y:
                for k, c in m.right[mm][t[n]]:
                    acc[k] = acc[k] + sign_last * c * y
        out.extend(acc)
    return Cochain(a, m, n + 1, tuple(out))


@lru_cache(maxsize=256)
def coboundary_matrix(algebra: Algebra, module: Bimodule, n: int) -> Matrix:
    """Matrix of the coboundary C^n(A; M) -> C^{n+1}(A; M) in lexicographic coordinates."""
    if n < 0:
        raise ValueError("degree must be nonnegative")
    d, dm = algebra.dim, module.dim
    field = algebra.field
    rows = [dict() for _ in range(num_coords(d, dm, n + 1))]

    def add(r, c, x):
        row = rows[r]
        y = row.get(c, 0) + x
        if y:
            row[c] = y
        else:
            row.pop(c, None)

    sign_last = -1 if (n + 1) % 2 else 1
    for t in product(range(d), repeat=n + 1):
        out_base = flat_index(t, d) * dm
        tail = flat_index(t[1:], d) * dm
        for mm in range(dm):
            for k, c in module.left[t[0]][mm]:
                add(out_base + k, tail + mm, c)
        for i in range(1, n + 1):
            sgn = -1 if i % 2 else 1
            for p, c in algebra.table[t[i - 1]][t[i]]:
                col = flat_index(t[: i - 1] + (p,) + t[i + 1 :], d) * dm
                for k in range(dm):
                    add(out_base + k, col + k, sgn * c)
        head = flat_index(t[:n], d) * dm
        for mm in range(dm):
            for k, c in module.right[mm][t[n]]:
                add(out_base + k, head + mm, sign_last * c)
    return Matrix(field, len(rows), num_coords(d, dm, n), rows)


# ---------------------------------------------------------------------------
# composition operators on coordinate spaces


def precompose_matrix(g: Matrix, n: int, d_m: int) -> Matrix:
    """Matrix of ``f |-> f o g^{(x)n}`` for ``g: Y -> X`` (shape ``dim X x dim Y``).

    Columns index C^n(X; M), rows index C^n(Y; M).
    """
    dx, dy = g.shape
    field = g.field
    row_items = [g.row_items(i) for i in range(dx)]
    rows = [dict() for _ in range(num_coords(dy, d_m, n))]
    for t in product(range(dx), repeat=n):
        col_base = flat_index(t, dx) * d_m
        for combo in product(*(row_items[x] for x in t)):
            c = field.one
            s = []
            for y, v in combo:
                c = c * v
                s.append(y)
            row_base = flat_index(s, dy) * d_m
            for m in range(d_m):
                r = rows[row_base + m]
                val = r.get(col_base + m, 0) + c
                if val:
                    r[col_base + m] = val
                else:
                    r.pop(col_base + m, None)
    return Matrix(field, len(rows), num_coords(dx, d_m, n), rows)


def postcompose_matrix(r: Matrix, n: int, d_a: int) -> Matrix:
    """Matrix of ``f |-> r o f`` on C^n(A; M) -> C^n(A; M'), ``r`` of shape ``dim M' x dim M``."""
    dm_out, dm_in = r.shape
    items = [r.row_items(i) for i in range(dm_out)]
    rows = []
    for tb in range(d_a**n):
        for k in range(dm_out):
            rows.append({tb * dm_in + m: c for m, c in items[k]})
    return Matrix(r.field, len(rows), d_a**n * dm_in, rows)


# ---------------------------------------------------------------------------
# invariance


def _module_elements(action: GroupAction, module_action) -> tuple:
    if module_action is None:
        return action.elements
    elements = module_action.elements if isinstance(module_action, GroupAction) else tuple(module_action)
    if len(elements) != action.order:
        raise ValueError("module action does not match the group order")
    return elements


def is_invariant(f: Cochain, action: GroupAction, module_action=None) -> bool:
    """Whether ``f(g x_1, ..., g x_n) = g f(x_1, ..., x_n)`` for every group element."""
    mod_elems = _module_elements(action, module_action)
    for g, rho in zip(action.elements, mod_elems):
        cols = g.columns()
        for t in product(range(f.algebra.dim), repeat=f.degree):
            lhs = f.evaluate(*(cols[i] for i in t))
            rhs = rho.apply(f.value(t))
            if lhs != rhs:
                return False
    return True


@lru_cache(maxsize=256)
def _invariant_subspace(algebra: Algebra, module: Bimodule, n: int, gen_pairs: tuple) -> Subspace:
    field = algebra.field
    size = num_coords(algebra.dim, module.dim, n)
    constraints = []
    for g, rho in gen_pairs:
        op = precompose_matrix(g, n, module.dim) - postcompose_matrix(rho, n, algebra.dim)
        if not op.is_zero():
            constraints.append(op)
    if not constraints:
        return Subspace.full(field, size)
    return kernel_basis(vstack(constraints))


def invariant_subspace(algebra: Algebra, module: Bimodule, n: int, action: GroupAction, module_action=None) -> Subspace:
    """Invariant n-cochains, as the common kernel of ``f o g^{(x)n} - rho(g) o f`` over generators ``g``.

    No division by the group order happens, so this is valid in every characteristic.
    """
    mod_elems = _module_elements(action, module_action)
    gens = action.generators or tuple(i for i in range(action.order) if i != action.identity_index)
    pairs = tuple((action.elements[g], mod_elems[g]) for g in gens)
    return _invariant_subspace(algebra, module, n, pairs)


def reynolds_projector(algebra: Algebra, module: Bimodule, n: int, action: GroupAction, module_action=None) -> Matrix:
    """Group average ``f |-> (1/|G|) sum_g rho(g) o f o (g^{-1})^{(x)n}``; needs |G| invertible."""
    field = algebra.field
    order = field(action.order)
    if not order:
        raise ZeroDivisionError("group order is zero in the field; averaging is undefined")
    mod_elems = _module_elements(action, module_action)
    size = num_coords(algebra.dim, module.dim, n)
    total = Matrix.zeros(field, size, size)
    for g in range(action.order):
        ginv = action.elements[action.inverse_index(g)]
        term = postcompose_matrix(mod_elems[g], n, algebra.dim) @ precompose_matrix(ginv, n, module.dim)
        total = total + term
    return total.scale(1 / order)


# ---------------------------------------------------------------------------
# cohomology


@dataclass(frozen=True)
class CohomologyResult:
    degree: int
    dim_cocycles: int
    dim_coboundaries: int
    betti: int
    representatives: tuple
    cocycles: Subspace  # full coordinates
    coboundaries: Subspace  # full coordinates

    def is_coboundary(self, vector: Sequence) -> bool:
        return tuple(vector) in self.coboundaries

    def summary(self) -> dict:
        return {
            "degree": self.degree,
            "dim_cocycles": self.dim_cocycles,
            "dim_coboundaries": self.dim_coboundaries,
            "betti": self.betti,
        }


def restrict_to_subspaces(m: Matrix, source: Subspace, target: Subspace | None) -> Matrix:
    """``m`` composed with the source basis, read off in target coordinates (pivot rows)."""
    full = m @ source.basis
    if target is None:
        return full
    return full.submatrix(rows=target.pivots)


def cohomology_from_maps(field, d_in: Matrix, d_out: Matrix | None, space: Subspace, degree: int, make) -> CohomologyResult:
    """Shared bookkeeping for H = ker(d_out) / im(d_in) inside ``space``.

    ``d_out`` acts on coordinates of ``space`` (None means the zero map) and
    ``d_in`` maps into coordinates of ``space`` (None means no coboundaries).
    ``make`` turns a full-coordinate vector into a cochain object.
    """
    k = space.dim
    if d_out is None:
        z_coords = Subspace.full(field, k)
    else:
        z_coords = kernel_basis(d_out)
    if d_in is None or d_in.ncols == 0:
        b_coords = Subspace(field, k)
    else:
        b_coords = Subspace.span(d_in)
    # representatives: cocycle basis vectors independent modulo coboundaries
    reps = []
    if z_coords.dim > b_coords.dim:
        stacked = list(b_coords.vectors) + list(z_coords.vectors)
        _, pivots, _ = rref(Matrix.from_columns(field, stacked, nrows=k))
        nb = b_coords.dim
        reps = [space.combine(z_coords.vectors[p - nb]) for p in pivots if p >= nb]
    cocycles_full = Subspace(field, space.ambient_dim, [space.combine(v) for v in z_coords.vectors])
    coboundaries_full = Subspace(field, space.ambient_dim, [space.combine(v) for v in b_coords.vectors])
    return CohomologyResult(
        degree=degree,
        dim_cocycles=z_coords.dim,
        dim_coboundaries=b_coords.dim,
        betti=z_coords.dim - b_coords.dim,
        representatives=tuple(make(v) for v in reps),
        cocycles=cocycles_full,
        coboundaries=coboundaries_full,
    )


def equivariant_cohomology(
    algebra: Algebra,
    module: Bimodule,
    n: int,
    action: GroupAction,
    module_action=None,
) -> CohomologyResult:
    """H^n of the invariant subcomplex; degree 0 has no coboundaries."""
    if n < 0:
        raise ValueError("degree must be nonnegative")
    field = algebra.field
    v_n = invariant_subspace(algebra, module, n, action, module_action)
    v_next = invariant_subspace(algebra, module, n + 1, action, module_action)
    d_out = restrict_to_subspaces(coboundary_matrix(algebra, module, n), v_n, v_next)
    d_in = None
    if n > 0:
        v_prev = invariant_subspace(algebra, module, n - 1, action, module_action)
        d_in = restrict_to_subspaces(coboundary_matrix(algebra, module, n - 1), v_prev, v_n)
    return cohomology_from_maps(field, d_in, d_out, v_n, n, lambda v: Cochain(algebra, module, n, tuple(v)))


def hochschild_cohomology(algebra: Algebra, module: Bimodule, n: int) -> CohomologyResult:
    """Ordinary Hochschild cohomology (trivial group)."""
    act = trivial_action(algebra)
    return equivariant_cohomology(algebra, module, n, act, [Matrix.identity(algebra.field, module.dim)])
