"""Exact linear algebra over any field of the tower.

Plain Gaussian elimination, no fraction-free or modular tricks: the
dimensions stay small enough after restriction of scalars that this is
sufficient.  Determinism conventions: RREF pivoting picks the first
nonzero entry scanning top to bottom, free variables in solve are set
to zero, and subspaces are always stored by their RREF basis so that
subspace equality is entrywise basis equality.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DimensionMismatch, NoSolution, NotSquare, Singular
from .fields import Field, FieldElem


@dataclass(frozen=True)
class Matrix:
    """Immutable row-major matrix over a fixed field.

    Zero-row and zero-column matrices are first-class: maps into or out
    of zero-dimensional stalks occur constantly downstream.
    """

    field: Field
    rows: int
    cols: int
    entries: tuple

    def __getitem__(self, rc):
        r, c = rc
        return self.entries[r][c]

    def row(self, r) -> tuple:
        return self.entries[r]

    def col(self, c) -> tuple:
        return tuple(self.entries[r][c] for r in range(self.rows))

    def __add__(self, other):
        self._same_shape(other)
        return Matrix(
            self.field,
            self.rows,
            self.cols,
            tuple(
                tuple(a + b for a, b in zip(ra, rb))
                for ra, rb in zip(self.entries, other.entries)
            ),
        )

    def __sub__(self, other):
        self._same_shape(other)
        return Matrix(
            self.field,
            self.rows,
            self.cols,
            tuple(
                tuple(a - b for a, b in zip(ra, rb))
                for ra, rb in zip(self.entries, other.entries)
            ),
        )

    def __neg__(self):
        return self.scale(-self.field.one)

    def __mul__(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise DimensionMismatch(f"{self.rows}x{self.cols} times {other.rows}x{other.cols}")
        zero = self.field.zero
        out = []
        for r in range(self.rows):
            row = self.entries[r]
            out_row = []
            for c in range(other.cols):
                acc = zero
                for k in range(self.cols):
                    a = row[k]
                    if not a.is_zero:
                        acc = acc + a * other.entries[k][c]
                out_row.append(acc)
            out.append(tuple(out_row))
        return Matrix(self.field, self.rows, other.cols, tuple(out))

    def _same_shape(self, other):
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionMismatch(
                f"{self.rows}x{self.cols} vs {other.rows}x{other.cols}"
            )

    def scale(self, c: FieldElem) -> "Matrix":
        return self.map_entries(lambda e: e * c)

    def apply(self, vec: tuple) -> tuple:
        """Multiply a column vector given as a tuple."""
        if len(vec) != self.cols:
            raise DimensionMismatch(f"vector of length {len(vec)} for {self.cols} columns")
        zero = self.field.zero
        out = []
        for r in range(self.rows):
            acc = zero
            for k, x in enumerate(vec):
                if not x.is_zero:
                    acc = acc + self.entries[r][k] * x
            out.append(acc)
        return tuple(out)

    def transpose(self) -> "Matrix":
        return Matrix(
            self.field,
            self.cols,
            self.rows,
            tuple(tuple(self.entries[r][c] for r in range(self.rows)) for c in range(self.cols)),
        )

    def map_entries(self, fn, field: Field | None = None) -> "Matrix":
        f = field or self.field
        return Matrix(
            f, self.rows, self.cols, tuple(tuple(fn(e) for e in row) for row in self.entries)
        )

    def hstack(self, other: "Matrix") -> "Matrix":
        if self.rows != other.rows:
            raise DimensionMismatch("hstack with different row counts")
        return Matrix(
            self.field,
            self.rows,
            self.cols + other.cols,
            tuple(ra + rb for ra, rb in zip(self.entries, other.entries)),
        )

    def vstack(self, other: "Matrix") -> "Matrix":
        if self.cols != other.cols:
            raise DimensionMismatch("vstack with different column counts")
        return Matrix(self.field, self.rows + other.rows, self.cols, self.entries + other.entries)

    def kron(self, other: "Matrix") -> "Matrix":
        out = []
        for r in range(self.rows):
            for r2 in range(other.rows):
                row = []
                for c in range(self.cols):
                    a = self.entries[r][c]
                    row.extend(a * b for b in other.entries[r2])
                out.append(tuple(row))
        return Matrix(self.field, self.rows * other.rows, self.cols * other.cols, tuple(out))

    @property
    def is_zero(self) -> bool:
        return all(e.is_zero for row in self.entries for e in row)

    @property
    def is_identity(self) -> bool:
        if self.rows != self.cols:
            return False
        one = self.field.one
        return all(
            self.entries[r][c] == (one if r == c else self.field.zero)
            for r in range(self.rows)
            for c in range(self.cols)
        )

    def rank(self) -> int:
        return len(rref(self)[1])

    def inverse(self) -> "Matrix":
        if self.rows != self.cols:
            raise NotSquare("inverse of a non-square matrix")
        try:
            return solve_matrix(self, identity(self.field, self.rows))
        except NoSolution:
            raise Singular("matrix is singular") from None

    def power(self, n: int) -> "Matrix":
        if self.rows != self.cols:
            raise NotSquare("power of a non-square matrix")
        result = identity(self.field, self.rows)
        for _ in range(n):
            result = result * self
        return result

    def __repr__(self):
        body = "; ".join(
            " ".join(self.field.render(e.rep) for e in row) for row in self.entries
        )
        return f"[{body}]({self.rows}x{self.cols})"


def mat(field: Field, rows) -> Matrix:
    """Build a matrix, coercing entries into the field."""
    coerced = tuple(
        tuple(e if isinstance(e, FieldElem) and e.field == field else field.elem(e) for e in row)
        for row in rows
    )
    nrows = len(coerced)
    ncols = len(coerced[0]) if nrows else 0
    if any(len(row) != ncols for row in coerced):
        raise DimensionMismatch("ragged rows")
    return Matrix(field, nrows, ncols, coerced)


def zeros(field: Field, rows: int, cols: int) -> Matrix:
    z = field.zero
    return Matrix(field, rows, cols, tuple(tuple(z for _ in range(cols)) for _ in range(rows)))


def identity(field: Field, n: int) -> Matrix:
    z, o = field.zero, field.one
    return Matrix(field, n, n, tuple(tuple(o if r == c else z for c in range(n)) for r in range(n)))


def from_cols(field: Field, cols) -> Matrix:
    cols = list(cols)
    if not cols:
        return zeros(field, 0, 0)
    return mat(field, [[col[r] for col in cols] for r in range(len(cols[0]))])


def rref(m: Matrix):
    """Reduced row echelon form and the strictly increasing pivot list."""
    work = [list(row) for row in m.entries]
    pivots = []
    r = 0
    for c in range(m.cols):
        pivot_row = None
        for rr in range(r, m.rows):
            if not work[rr][c].is_zero:
                pivot_row = rr
                break
        if pivot_row is None:
            continue
        work[r], work[pivot_row] = work[pivot_row], work[r]
        inv = work[r][c].inverse()
        work[r] = [e * inv for e in work[r]]
        for rr in range(m.rows):
            if rr != r and not work[rr][c].is_zero:
                factor = work[rr][c]
                work[rr] = [a - factor * b for a, b in zip(work[rr], work[r])]
        pivots.append(c)
        r += 1
        if r == m.rows:
            break
    return Matrix(m.field, m.rows, m.cols, tuple(tuple(row) for row in work)), tuple(pivots)


@dataclass(frozen=True)
class Subspace:
    """A subspace stored by its RREF row basis.

    Two subspaces of the same ambient space are equal iff their bases
    are entrywise equal.
    """

    ambient_dim: int
    basis: Matrix

    @property
    def dim(self) -> int:
        return self.basis.rows

    @property
    def field(self) -> Field:
        return self.basis.field

    def contains(self, vec: tuple) -> bool:
        return self.coords_of(vec) is not None

    def coords_of(self, vec: tuple):
        """Coordinates of vec in the basis, or None if outside."""
        try:
            return solve(self.basis.transpose(), vec)
        except NoSolution:
            return None

    def vector(self, coords: tuple) -> tuple:
        return self.basis.transpose().apply(coords)

    def __eq__(self, other):
        return (
            isinstance(other, Subspace)
            and other.ambient_dim == self.ambient_dim
            and other.basis.entries == self.basis.entries
        )

    def __repr__(self):
        return f"Subspace(dim {self.dim} of {self.ambient_dim})"


def subspace_from_vectors(field: Field, ambient_dim: int, vectors) -> Subspace:
    vectors = list(vectors)
    if not vectors:
        return Subspace(ambient_dim, zeros(field, 0, ambient_dim))
    red, pivots = rref(mat(field, vectors))
    basis = Matrix(field, len(pivots), ambient_dim, red.entries[: len(pivots)])
    return Subspace(ambient_dim, basis)


def full_space(field: Field, n: int) -> Subspace:
    return Subspace(n, identity(field, n))


def kernel(m: Matrix) -> Subspace:
    """RREF basis of the null space {v : m v = 0}."""
    red, pivots = rref(m)
    free = [c for c in range(m.cols) if c not in pivots]
    field = m.field
    vectors = []
    for f in free:
        v = [field.zero] * m.cols
        v[f] = field.one
        for r, p in enumerate(pivots):
            v[p] = -red.entries[r][f]
        vectors.append(v)
    return subspace_from_vectors(field, m.cols, vectors)


def annihilator(s: Subspace) -> Matrix:
    """Constraint matrix whose kernel is exactly s (under the standard pairing)."""
    return kernel(s.basis).basis


def intersect(a: Subspace, b: Subspace) -> Subspace:
    if a.ambient_dim != b.ambient_dim:
        raise DimensionMismatch("intersection of subspaces of different ambient spaces")
    constraints = annihilator(a).vstack(annihilator(b))
    return kernel(constraints)


def generalized_eigenspace(t: Matrix, lam: FieldElem, order: int) -> Subspace:
    """Kernel of (t - lam)^order."""
    if t.rows != t.cols:
        raise NotSquare("generalized eigenspace of a non-square matrix")
    shifted = t - identity(t.field, t.rows).scale(lam)
    return kernel(shifted.power(order))


def solve(m: Matrix, rhs: tuple) -> tuple:
    """A particular solution of m x = rhs, free variables set to zero."""
    if len(rhs) != m.rows:
        raise DimensionMismatch("right-hand side has wrong length")
    sol = solve_matrix(m, from_cols(m.field, [rhs]) if m.rows else zeros(m.field, 0, 1))
    return sol.col(0)


def solve_matrix(m: Matrix, rhs: Matrix) -> Matrix:
    """Solve m X = rhs columnwise; raises NoSolution if inconsistent."""
    if rhs.rows != m.rows:
        raise DimensionMismatch("right-hand side has wrong row count")
    red, pivots = rref(m.hstack(rhs))
    for p in pivots:
        if p >= m.cols:
            raise NoSolution("inconsistent linear system")
    field = m.field
    out = [[field.zero] * rhs.cols for _ in range(m.cols)]
    for r, p in enumerate(pivots):
        for c in range(rhs.cols):
            out[p][c] = red.entries[r][m.cols + c]
    return mat(field, out) if m.cols else zeros(field, 0, rhs.cols)
