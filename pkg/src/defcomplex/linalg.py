"""Exact scalars and the matrix algebra every cohomology computation reduces to.

Two fields are supported: the rationals (elements are :class:`fractions.Fraction`)
and prime fields F_p (elements are :class:`Mod`).  Both support the ordinary
arithmetic operators, so the algorithms below are written once against ``+``,
``-``, ``*``, ``/`` and truthiness.

Matrices are immutable.  They are stored as sparse rows internally because the
coboundary matrices are overwhelmingly zero, but they behave as dense matrices
(``entries`` is the row-major list, indexing returns explicit zeros).
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence


class DimensionError(ValueError):
    """Raised when operand shapes do not agree."""


class FieldMismatchError(ValueError):
    pass


class Mod:
    """An element of the prime field F_p, stored as a residue in [0, p)."""

    __slots__ = ("value", "p")

    def __init__(self, value: int, p: int):
        self.value = value % p
        self.p = p

    def _coerce(self, other):
        if isinstance(other, Mod):
            if other.p != self.p:
                raise FieldMismatchError(f"F_{self.p} and F_{other.p} elements mixed")
            return other.value
        if isinstance(other, int):
            return other
        if isinstance(other, Fraction):
            if other.denominator % self.p == 0:
                raise ZeroDivisionError(f"{other} has no image in F_{self.p}")
            return other.numerator * pow(other.denominator, -1, self.p)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Mod(self.value + o, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Mod(self.value - o, self.p)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Mod(o - self.value, self.p)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Mod(self.value * o, self.p)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if o % self.p == 0:
            raise ZeroDivisionError("division by zero in F_%d" % self.p)
        return Mod(self.value * pow(o, -1, self.p), self.p)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if self.value == 0:
            raise ZeroDivisionError("division by zero in F_%d" % self.p)
        return Mod(o * pow(self.value, -1, self.p), self.p)

    def __neg__(self):
        return Mod(-self.value, self.p)

    def __pos__(self):
        return self

    def __bool__(self):
        return self.value != 0

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return False
        return (self.value - o) % self.p == 0

    def __hash__(self):
        return hash((self.value, self.p))

    def __repr__(self):
        return f"Mod({self.value}, {self.p})"

    def __str__(self):
        return str(self.value)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


class Field:
    """Base class for the two supported scalar fields."""

    name = "field"
    characteristic = 0

    def __call__(self, value):
        raise NotImplementedError

    @property
    def zero(self):
        return self(0)

    @property
    def one(self):
        return self(1)

    def parse(self, text) -> object:
        """Parse a serialized scalar (string "p/q", "p", or an int)."""
        if isinstance(text, bool):
            raise ValueError(f"not a scalar: {text!r}")
        if isinstance(text, int):
            return self(text)
        if not isinstance(text, str):
            raise ValueError(f"not a scalar: {text!r}")
        try:
            value = Fraction(text.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a scalar: {text!r}") from exc
        return self(value)

    def format(self, x) -> str:
        raise NotImplementedError

    def __eq__(self, other):
        return type(self) is type(other) and self.characteristic == other.characteristic

    def __hash__(self):
        return hash((type(self).__name__, self.characteristic))


class RationalField(Field):
    name = "Q"
    characteristic = 0

    def __call__(self, value):
        if isinstance(value, Mod):
            raise FieldMismatchError("prime-field element used over Q")
        return Fraction(value)

    def format(self, x) -> str:
        x = Fraction(x)
        if x.denominator == 1:
            return str(x.numerator)
        return f"{x.numerator}/{x.denominator}"

    def __repr__(self):
        return "QQ"

    def to_json(self):
        return "Q"


class PrimeField(Field):
    def __init__(self, p: int):
        if not is_prime(p):
            raise ValueError(f"modulus not prime: {p}")
        self.characteristic = p
        self.name = f"F_{p}"

    def __call__(self, value):
        p = self.characteristic
        if isinstance(value, Mod):
            if value.p != p:
                raise FieldMismatchError(f"F_{value.p} element used over F_{p}")
            return value
        if isinstance(value, Fraction):
            if value.denominator % p == 0:
                raise ZeroDivisionError(f"{value} has no image in F_{p}")
            return Mod(value.numerator * pow(value.denominator, -1, p), p)
        return Mod(int(value), p)

    def format(self, x) -> str:
        return str(self(x).value)

    def __repr__(self):
        return f"GF({self.characteristic})"

    def to_json(self):
        return {"Fp": self.characteristic}


QQ = RationalField()


def GF(p: int) -> PrimeField:
    return PrimeField(p)


# ---------------------------------------------------------------------------
# matrices


class Matrix:
    """Immutable matrix over a :class:`Field`.

    Construct with :meth:`from_rows`, :meth:`from_columns`, :meth:`identity`,
    :meth:`zeros` or :meth:`from_sparse`.
    """

    __slots__ = ("field", "nrows", "ncols", "_rows", "_hash")

    def __init__(self, field: Field, nrows: int, ncols: int, rows: Sequence[dict]):
        # rows: one {col: nonzero value} dict per row; ownership passes to the matrix
        if len(rows) != nrows:
            raise DimensionError("row count does not match nrows")
        self.field = field
        self.nrows = nrows
        self.ncols = ncols
        self._rows = tuple(rows)
        self._hash = None

    # -- construction -----------------------------------------------------

    @classmethod
    def from_rows(cls, field: Field, rows: Sequence[Sequence], ncols: int | None = None) -> "Matrix":
        rows = list(rows)
        if ncols is None:
            if not rows:
                raise DimensionError("ncols required for a matrix with no rows")
            ncols = len(rows[0])
        out = []
        for row in rows:
            if len(row) != ncols:
                raise DimensionError("ragged rows")
            d = {}
            for j, x in enumerate(row):
                x = field(x)
                if x:
                    d[j] = x
            out.append(d)
        return cls(field, len(out), ncols, out)

    @classmethod
    def from_columns(cls, field: Field, columns: Sequence[Sequence], nrows: int | None = None) -> "Matrix":
        columns = list(columns)
        if nrows is None:
            if not columns:
                raise DimensionError("nrows required for a matrix with no columns")
            nrows = len(columns[0])
        rows = [dict() for _ in range(nrows)]
        for j, col in enumerate(columns):
            if len(col) != nrows:
                raise DimensionError("ragged columns")
            for i, x in enumerate(col):
                x = field(x)
                if x:
                    rows[i][j] = x
        return cls(field, nrows, len(columns), rows)

    @classmethod
    def from_sparse(cls, field: Field, nrows: int, ncols: int, entries: dict) -> "Matrix":
        """Build from ``{(i, j): value}``; zero values are dropped."""
        rows = [dict() for _ in range(nrows)]
        for (i, j), x in entries.items():
            if not (0 <= i < nrows and 0 <= j < ncols):
                raise DimensionError(f"entry ({i}, {j}) outside {nrows}x{ncols}")
            x = field(x)
            if x:
                rows[i][j] = x
        return cls(field, nrows, ncols, rows)

    @classmethod
    def identity(cls, field: Field, n: int) -> "Matrix":
        one = field.one
        return cls(field, n, n, [{i: one} for i in range(n)])

    @classmethod
    def zeros(cls, field: Field, nrows: int, ncols: int) -> "Matrix":
        return cls(field, nrows, ncols, [dict() for _ in range(nrows)])

    # -- access -------------------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    def __getitem__(self, ij):
        i, j = ij
        if not (0 <= i < self.nrows and 0 <= j < self.ncols):
            raise IndexError(ij)
        return self._rows[i].get(j, self.field.zero)

    def row_items(self, i: int):
        """Nonzero ``(col, value)`` pairs of row ``i`` in column order."""
        return sorted(self._rows[i].items())

    def row(self, i: int) -> tuple:
        z = self.field.zero
        r = self._rows[i]
        return tuple(r.get(j, z) for j in range(self.ncols))

    def column(self, j: int) -> tuple:
        z = self.field.zero
        return tuple(r.get(j, z) for r in self._rows)

    def columns(self) -> list[tuple]:
        z = self.field.zero
        cols = [[z] * self.nrows for _ in range(self.ncols)]
        for i, r in enumerate(self._rows):
            for j, x in r.items():
                cols[j][i] = x
        return [tuple(c) for c in cols]

    def to_lists(self) -> list[list]:
        return [list(self.row(i)) for i in range(self.nrows)]

    @property
    def entries(self) -> tuple:
        """Row-major dense entries."""
        return tuple(x for i in range(self.nrows) for x in self.row(i))

    def nnz(self) -> int:
        return sum(len(r) for r in self._rows)

    def is_zero(self) -> bool:
        return not any(self._rows)

    # -- arithmetic -------------------------------------------------------

    def _check_field(self, other: "Matrix"):
        if self.field != other.field:
            raise FieldMismatchError(f"{self.field!r} vs {other.field!r}")

    def __matmul__(self, other):
        if isinstance(other, Matrix):
            self._check_field(other)
            if self.ncols != other.nrows:
                raise DimensionError(f"cannot multiply {self.shape} by {other.shape}")
            orows = other._rows
            out = []
            for r in self._rows:
                acc: dict = {}
                for k, a in r.items():
                    for j, b in orows[k].items():
                        acc[j] = acc.get(j, 0) + a * b
                out.append({j: x for j, x in acc.items() if x})
            return Matrix(self.field, self.nrows, other.ncols, out)
        return self.apply(other)

    def apply(self, vector: Sequence) -> tuple:
        """Matrix-vector product with a dense vector."""
        if len(vector) != self.ncols:
            raise DimensionError(f"vector of length {len(vector)} for {self.shape} matrix")
        z = self.field.zero
        out = []
        for r in self._rows:
            s = z
            for j, a in r.items():
                v = vector[j]
                if v:
                    s = s + a * v
            out.append(s)
        return tuple(out)

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check_field(other)
        if self.shape != other.shape:
            raise DimensionError(f"cannot add {self.shape} and {other.shape}")
        out = []
        for r, s in zip(self._rows, other._rows):
            d = dict(r)
            for j, x in s.items():
                y = d.get(j, 0) + x
                if y:
                    d[j] = y
                else:
                    d.pop(j, None)
            out.append(d)
        return Matrix(self.field, self.nrows, self.ncols, out)

    def __neg__(self) -> "Matrix":
        return Matrix(self.field, self.nrows, self.ncols, [{j: -x for j, x in r.items()} for r in self._rows])

    def __sub__(self, other: "Matrix") -> "Matrix":
        return self + (-other)

    def scale(self, c) -> "Matrix":
        c = self.field(c)
        if not c:
            return Matrix.zeros(self.field, self.nrows, self.ncols)
        return Matrix(self.field, self.nrows, self.ncols, [{j: c * x for j, x in r.items()} for r in self._rows])

    def transpose(self) -> "Matrix":
        rows = [dict() for _ in range(self.ncols)]
        for i, r in enumerate(self._rows):
            for j, x in r.items():
                rows[j][i] = x
        return Matrix(self.field, self.ncols, self.nrows, rows)

    @property
    def T(self) -> "Matrix":
        return self.transpose()

    def submatrix(self, rows: Sequence[int] | None = None, cols: Sequence[int] | None = None) -> "Matrix":
        rsel = range(self.nrows) if rows is None else rows
        if cols is None:
            out = [dict(self._rows[i]) for i in rsel]
            return Matrix(self.field, len(out), self.ncols, out)
        pos = {c: k for k, c in enumerate(cols)}
        out = []
        for i in rsel:
            out.append({pos[j]: x for j, x in self._rows[i].items() if j in pos})
        return Matrix(self.field, len(out), len(cols), out)

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return (
            self.field == other.field
            and self.shape == other.shape
            and all(a == b for a, b in zip(self._rows, other._rows))
        )

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(
                (self.field, self.nrows, self.ncols, tuple(tuple(sorted(r.items())) for r in self._rows))
            )
        return self._hash

    def __repr__(self):
        if self.nrows * self.ncols <= 64:
            body = [[self.field.format(x) for x in self.row(i)] for i in range(self.nrows)]
            return f"Matrix({self.field!r}, {body})"
        return f"<Matrix {self.nrows}x{self.ncols} over {self.field!r}, nnz={self.nnz()}>"


def hstack(blocks: Sequence[Matrix]) -> Matrix:
    if not blocks:
        raise DimensionError("empty hstack")
    nrows = blocks[0].nrows
    field = blocks[0].field
    rows = [dict() for _ in range(nrows)]
    offset = 0
    for b in blocks:
        if b.nrows != nrows:
            raise DimensionError("hstack row mismatch")
        b._check_field(blocks[0])
        for i, r in enumerate(b._rows):
            for j, x in r.items():
                rows[i][offset + j] = x
        offset += b.ncols
    return Matrix(field, nrows, offset, rows)


def vstack(blocks: Sequence[Matrix]) -> Matrix:
    if not blocks:
        raise DimensionError("empty vstack")
    ncols = blocks[0].ncols
    rows = []
    for b in blocks:
        if b.ncols != ncols:
            raise DimensionError("vstack column mismatch")
        b._check_field(blocks[0])
        rows.extend(dict(r) for r in b._rows)
    return Matrix(blocks[0].field, len(rows), ncols, rows)


def block_matrix(blocks: Sequence[Sequence[Matrix | None]], row_sizes: Sequence[int], col_sizes: Sequence[int], field: Field) -> Matrix:
    """Assemble a block matrix; ``None`` blocks are zero."""
    rows: list[dict] = []
    for bi, brow in enumerate(blocks):
        band = [dict() for _ in range(row_sizes[bi])]
        offset = 0
        for bj, b in enumerate(brow):
            if b is not None:
                if b.shape != (row_sizes[bi], col_sizes[bj]):
                    raise DimensionError(f"block ({bi},{bj}) has shape {b.shape}")
                for i, r in enumerate(b._rows):
                    for j, x in r.items():
                        band[i][offset + j] = x
            offset += col_sizes[bj]
        rows.extend(band)
    return Matrix(field, sum(row_sizes), sum(col_sizes), rows)


# ---------------------------------------------------------------------------
# elimination


def _eliminate(m: Matrix, pivot_limit: int | None = None) -> tuple[list[dict], list[int]]:
    """Gauss-Jordan elimination on working copies of the rows.

    Pivots are searched only among the first ``pivot_limit`` columns.  Returns
    the nonzero reduced rows (in pivot order) and the pivot columns.
    """
    limit = m.ncols if pivot_limit is None else pivot_limit
    pending = [dict(r) for r in m._rows if r]
    done: list[dict] = []
    pivots: list[int] = []
    for c in range(limit):
        if not pending:
            break
        k = next((i for i, r in enumerate(pending) if c in r), None)
        if k is None:
            continue
        prow = pending.pop(k)
        inv = 1 / prow[c]
        prow = {j: x * inv for j, x in prow.items()}
        for group in (pending, done):
            for idx, r in enumerate(group):
                f = r.get(c)
                if f is None:
                    continue
                for j, x in prow.items():
                    y = r.get(j, 0) - f * x
                    if y:
                        r[j] = y
                    else:
                        r.pop(j, None)
        pending = [r for r in pending if r]
        done.append(prow)
        pivots.append(c)
    return done, pivots


def rref(m: Matrix) -> tuple[Matrix, list[int], int]:
    """Reduced row-echelon form, pivot columns and rank."""
    rows, pivots = _eliminate(m)
    rows = rows + [dict() for _ in range(m.nrows - len(rows))]
    return Matrix(m.field, m.nrows, m.ncols, rows), pivots, len(pivots)


def rank(m: Matrix) -> int:
    return len(_eliminate(m)[1])


def _column_matrix(field: Field, dim: int, vectors: Sequence[Sequence]) -> Matrix:
    return Matrix.from_columns(field, vectors, nrows=dim)


class Subspace:
    """A subspace of F^n with its basis in reduced column-echelon form.

    The canonical form makes ``==`` a test of equality of subspaces.
    """

    __slots__ = ("field", "ambient_dim", "vectors", "pivots", "_basis")

    def __init__(self, field: Field, ambient_dim: int, vectors: Sequence[Sequence] = ()):
        rows, pivots = _eliminate(
            Matrix.from_rows(field, vectors, ncols=ambient_dim) if vectors else Matrix.zeros(field, 0, ambient_dim)
        )
        z = field.zero
        self.field = field
        self.ambient_dim = ambient_dim
        self.vectors = tuple(tuple(r.get(j, z) for j in range(ambient_dim)) for r in rows)
        self.pivots = tuple(pivots)
        self._basis = None

    @classmethod
    def full(cls, field: Field, n: int) -> "Subspace":
        s = cls.__new__(cls)
        s.field, s.ambient_dim = field, n
        one, z = field.one, field.zero
        s.vectors = tuple(tuple(one if i == j else z for i in range(n)) for j in range(n))
        s.pivots = tuple(range(n))
        s._basis = None
        return s

    @classmethod
    def direct_sum(cls, parts: Sequence["Subspace"]) -> "Subspace":
        """The block sum of subspaces of consecutive coordinate blocks."""
        if not parts:
            raise ValueError("empty direct sum")
        field = parts[0].field
        total = sum(p.ambient_dim for p in parts)
        z = field.zero
        vectors, pivots = [], []
        offset = 0
        for p in parts:
            before = (z,) * offset
            after = (z,) * (total - offset - p.ambient_dim)
            vectors.extend(before + v + after for v in p.vectors)
            pivots.extend(offset + q for q in p.pivots)
            offset += p.ambient_dim
        s = cls.__new__(cls)
        s.field, s.ambient_dim = field, total
        s.vectors, s.pivots, s._basis = tuple(vectors), tuple(pivots), None
        return s

    @classmethod
    def span(cls, m: Matrix) -> "Subspace":
        """Column space of ``m``."""
        return cls(m.field, m.nrows, m.columns())

    @property
    def dim(self) -> int:
        return len(self.vectors)

    @property
    def basis(self) -> Matrix:
        """Basis vectors as the columns of an ``ambient_dim x dim`` matrix."""
        if self._basis is None:
            self._basis = _column_matrix(self.field, self.ambient_dim, self.vectors)
        return self._basis

    def coordinates(self, v: Sequence) -> tuple:
        """Coordinates of ``v`` assuming it lies in the subspace (read off pivot rows)."""
        return tuple(v[p] for p in self.pivots)

    def combine(self, coords: Sequence) -> tuple:
        """The vector with the given coordinates in this basis."""
        if len(coords) != self.dim:
            raise DimensionError("coordinate vector has wrong length")
        out = [self.field.zero] * self.ambient_dim
        for c, vec in zip(coords, self.vectors):
            if c:
                for i, x in enumerate(vec):
                    if x:
                        out[i] = out[i] + c * x
        return tuple(out)

    def __contains__(self, v) -> bool:
        return membership(v, self)[0]

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.field == other.field and self.ambient_dim == other.ambient_dim and self.vectors == other.vectors

    def __hash__(self):
        return hash((self.field, self.ambient_dim, self.vectors))

    def __repr__(self):
        return f"<Subspace dim={self.dim} of {self.field!r}^{self.ambient_dim}>"


def kernel_basis(m: Matrix) -> Subspace:
    """Null space ``{x : m x = 0}``."""
    rows, pivots = _eliminate(m)
    pivset = set(pivots)
    one = m.field.one
    vectors = []
    for f in range(m.ncols):
        if f in pivset:
            continue
        x = {f: one}
        for r, p in zip(rows, pivots):
            a = r.get(f)
            if a:
                x[p] = -a
        vectors.append(x)
    z = m.field.zero
    dense = [[x.get(i, z) for i in range(m.ncols)] for x in vectors]
    return Subspace(m.field, m.ncols, dense)


def solve_linear(m: Matrix, b: Sequence) -> tuple | None:
    """Canonical particular solution of ``m x = b`` (free variables zero), or None."""
    if len(b) != m.nrows:
        raise DimensionError(f"right-hand side of length {len(b)} for {m.nrows} rows")
    field = m.field
    rows = []
    for r, bi in zip(m._rows, b):
        d = dict(r)
        bi = field(bi)
        if bi:
            d[m.ncols] = bi
        rows.append(d)
    aug = Matrix(field, m.nrows, m.ncols + 1, rows)
    reduced, pivots = _eliminate(aug)
    if pivots and pivots[-1] == m.ncols:
        return None
    x = [field.zero] * m.ncols
    for r, p in zip(reduced, pivots):
        v = r.get(m.ncols)
        if v:
            x[p] = v
    return tuple(x)


def solve_certificate(m: Matrix, b: Sequence) -> dict:
    """Ranks of ``m`` and of ``[m | b]``; unequal ranks certify infeasibility."""
    col = Matrix.from_columns(m.field, [b], nrows=m.nrows)
    return {"rank": rank(m), "rank_augmented": rank(hstack([m, col]))}


def intersect(subspaces: Sequence[Subspace], ambient_dim: int | None = None, field: Field | None = None) -> Subspace:
    """Intersection of subspaces; the empty intersection is the whole space."""
    if not subspaces:
        if ambient_dim is None or field is None:
            raise ValueError("ambient_dim and field are required for an empty intersection")
        return Subspace.full(field, ambient_dim)
    n = subspaces[0].ambient_dim
    field = subspaces[0].field
    for s in subspaces:
        if s.ambient_dim != n:
            raise DimensionError("subspaces live in different ambient spaces")
        if s.field != field:
            raise FieldMismatchError("subspaces over different fields")
    if len(subspaces) == 1:
        return subspaces[0]
    # x lies in every subspace iff it is killed by every annihilator
    constraints = []
    for s in subspaces:
        if s.dim == n:
            continue
        if s.dim == 0:
            return Subspace(field, n)
        ann = kernel_basis(Matrix.from_rows(field, s.vectors, ncols=n))
        constraints.extend(ann.vectors)
    if not constraints:
        return Subspace.full(field, n)
    return kernel_basis(Matrix.from_rows(field, constraints, ncols=n))


def membership(v: Sequence, s: Subspace) -> tuple[bool, tuple | None]:
    """Whether ``v`` lies in ``s``; if so, also its coordinates in ``s.basis``."""
    if len(v) != s.ambient_dim:
        raise DimensionError(f"vector of length {len(v)} in ambient dimension {s.ambient_dim}")
    coords = s.coordinates(v)
    if tuple(v) == s.combine(coords):
        return True, coords
    return False, None


def inverse(m: Matrix) -> Matrix:
    if m.nrows != m.ncols:
        raise DimensionError("only square matrices are invertible")
    n = m.nrows
    aug = hstack([m, Matrix.identity(m.field, n)])
    rows, pivots = _eliminate(aug, pivot_limit=n)
    if len(pivots) < n:
        raise ZeroDivisionError("matrix is singular")
    out = [{j - n: x for j, x in r.items() if j >= n} for r in rows]
    return Matrix(m.field, n, n, out)


def is_invertible(m: Matrix) -> bool:
    return m.nrows == m.ncols and rank(m) == m.nrows
