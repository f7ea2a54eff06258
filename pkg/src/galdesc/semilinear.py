"""Semilinear cocycles on L-vector spaces and Galois descent.

A structure on an L-space of dimension n is a family of invertible
matrices A_g over L, one per automorphism g of L/K, read as the
semilinear maps s_g(v) = A_g * g(v) (g applied entrywise).  The cocycle
convention is fixed once and for all:

    A_{g.h} = A_g * g(A_h),   where g.h applies h first, then g,

matching the composition table of the automorphism group.  Descent
computes the common fixed space of all the s_g in restricted-scalars
coordinates as an intersection of kernels -- never by averaging, since
the group order may be divisible by the characteristic.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DescentFailed, DimensionMismatch, NotCocycle, NotEquivariant, Singular
from .fields import Extension, FieldAut, FieldElem, GaloisGroup, apply_aut, coerce_down
from .linalg import (
    Matrix,
    Subspace,
    full_space,
    identity,
    intersect,
    kernel,
    mat,
    zeros,
)


@dataclass(frozen=True)
class LSpace:
    """A finite-dimensional vector space over an extension field."""

    ext: Extension
    dim: int


@dataclass(frozen=True)
class GStructure:
    """A semilinear cocycle: one invertible matrix per group element.

    ``mats`` is aligned with the element order of the automorphism
    group the structure is checked against.
    """

    space: LSpace
    mats: tuple[Matrix, ...]

    def mat_for(self, i: int) -> Matrix:
        return self.mats[i]


@dataclass(frozen=True)
class KForm:
    """The descent output: a K-basis of the invariant space.

    ``kbasis`` rows are the L-coordinates of the K-basis vectors; the
    stored inverse witnesses that they are L-linearly independent, which
    is the isomorphism L (x) V_K -> V restated as invertibility.
    """

    kdim: int
    kbasis: Matrix
    kbasis_inverse: Matrix
    invariants: Subspace


def conjugate_matrix(g: FieldAut, m: Matrix) -> Matrix:
    """Apply the field automorphism to every entry."""
    return m.map_entries(lambda e: apply_aut(g, e))


def check_gstructure(gs: GStructure, group: GaloisGroup):
    """Verify identity at id, invertibility, and the full cocycle condition.

    Returns the list of checked identities as a pass certificate.
    """
    if len(gs.mats) != len(group.elements):
        raise DimensionMismatch("cocycle not defined on the whole group")
    n = gs.space.dim
    checked = []
    if not gs.mats[group.identity_index].is_identity:
        raise NotCocycle("matrix at the identity element is not the identity",
                         pair=(group.identity_index, group.identity_index))
    for i, m in enumerate(gs.mats):
        if m.rows != n or m.cols != n:
            raise DimensionMismatch(f"cocycle matrix {i} has wrong shape")
        try:
            m.inverse()
        except Singular:
            raise Singular(f"cocycle matrix {i} is singular", tag=i) from None
        checked.append(("invertible", i))
    for i in range(len(group.elements)):
        for j in range(len(group.elements)):
            k = group.compose(i, j)
            lhs = gs.mats[k]
            rhs = gs.mats[i] * conjugate_matrix(group.elements[i], gs.mats[j])
            if lhs.entries != rhs.entries:
                raise NotCocycle(
                    f"cocycle identity fails for pair ({i},{j})", pair=(i, j)
                )
            checked.append(("cocycle", i, j))
    return checked


def extend_scalars(w_dim: int, ext: Extension, group: GaloisGroup):
    """L (x) K^n with its natural structure (all matrices the identity)."""
    space = LSpace(ext, w_dim)
    mats = tuple(identity(ext, w_dim) for _ in group.elements)
    return space, GStructure(space, mats)


@dataclass(frozen=True)
class RestrictedScalars:
    """Multiplication action of the power basis on K-coordinates.

    Coordinates follow the ordering e_i (x) b_j with the vector index
    major and the field-basis index minor; ``action[j]`` is the K-matrix
    of multiplication by the j-th power of the generator.
    """

    kdim: int
    basis_elems: tuple[FieldElem, ...]
    action: tuple[Matrix, ...]


def _mult_matrix(ext: Extension, beta: FieldElem) -> Matrix:
    """d x d base-field matrix of multiplication by beta on L."""
    d = ext.degree
    gen = ext.generator()
    cols = []
    for j in range(d):
        prod = beta * gen**j
        cols.append(list(ext.to_base_coeffs(prod)))
    base = ext.base
    return mat(base, [[cols[j][r] for j in range(d)] for r in range(d)])


def restrict_scalars(v: LSpace) -> RestrictedScalars:
    ext = v.ext
    d = ext.degree
    n = v.dim
    gen = ext.generator()
    basis = tuple(gen**j for j in range(d))
    mults = [_mult_matrix(ext, b) for b in basis]
    base = ext.base
    action = []
    for mult in mults:
        big = zeros(base, n * d, n * d)
        rows = [list(r) for r in big.entries]
        for i in range(n):
            for r in range(d):
                for c in range(d):
                    rows[i * d + r][i * d + c] = mult.entries[r][c]
        action.append(mat(base, rows))
    return RestrictedScalars(kdim=n * d, basis_elems=basis, action=tuple(action))


def to_k_coords(ext: Extension, vec: tuple) -> list:
    """Flatten an L-vector into restricted-scalars K-coordinates."""
    out = []
    for entry in vec:
        out.extend(ext.to_base_coeffs(ext.coerce(entry)))
    return out


def from_k_coords(ext: Extension, coords, n: int) -> tuple:
    d = ext.degree
    return tuple(ext.from_base_coeffs(coords[i * d : (i + 1) * d]) for i in range(n))


def semilinear_kmatrix(g: FieldAut, a: Matrix) -> Matrix:
    """K-matrix of v -> a * g(v) on restricted-scalars coordinates."""
    ext = a.field
    d = ext.degree
    n = a.rows
    gen = ext.generator()
    cols = []
    for i in range(n):
        acol = a.col(i)
        for j in range(d):
            scalar = apply_aut(g, gen**j)
            image = tuple(scalar * e for e in acol)
            cols.append(to_k_coords(ext, image))
    base = ext.base
    return mat(base, [[cols[c][r] for c in range(n * d)] for r in range(n * d)])


def invariant_space(gs: GStructure, group: GaloisGroup) -> Subspace:
    """Common kernel of (s_g - id) over K, intersected over the group."""
    ext = gs.space.ext
    nd = gs.space.dim * ext.degree
    base = ext.base
    inv = full_space(base, nd)
    for i in group.non_identity():
        s = semilinear_kmatrix(group.elements[i], gs.mats[i])
        inv = intersect(inv, kernel(s - identity(base, nd)))
    return inv


def descend(gs: GStructure, group: GaloisGroup) -> KForm:
    """Galois descent for a semilinear structure on an L-space.

    Computes the invariant K-subspace, checks its dimension equals the
    L-dimension, and certifies that the chosen K-basis is L-linearly
    independent by inverting the basis matrix.
    """
    check_gstructure(gs, group)
    if not group.is_galois:
        raise DescentFailed(
            "automorphism group is not Galois; descent is not available",
            found=len(group.elements),
            expected=gs.space.ext.degree,
        )
    ext = gs.space.ext
    n = gs.space.dim
    inv = invariant_space(gs, group)
    if inv.dim != n:
        raise DescentFailed(
            f"invariant space has K-dimension {inv.dim}, expected {n}",
            found=inv.dim,
            expected=n,
        )
    rows = [from_k_coords(ext, row, n) for row in inv.basis.entries]
    kbasis = mat(ext, [list(r) for r in rows]) if n else zeros(ext, 0, 0)
    # Each row must be fixed by every semilinear map; re-verified here so
    # the returned object is a self-contained certificate.
    for i, g in enumerate(group.elements):
        a = gs.mats[i]
        for r in range(n):
            vec = kbasis.row(r)
            image = a.apply(tuple(apply_aut(g, e) for e in vec))
            if image != vec:
                raise DescentFailed("invariant basis vector moved by the structure")
    try:
        inverse = kbasis.inverse() if n else kbasis
    except Singular:
        raise DescentFailed("invariant basis is not L-linearly independent") from None
    return KForm(kdim=n, kbasis=kbasis, kbasis_inverse=inverse, invariants=inv)


def descend_morphism_vect(
    f: Matrix,
    src: GStructure,
    dst: GStructure,
    group: GaloisGroup,
    src_form: KForm | None = None,
    dst_form: KForm | None = None,
) -> Matrix:
    """Descend an equivariant L-matrix to the K-bases of both K-forms.

    Equivariance means A_g(dst) * g(f) = f * A_g(src) for every g; for
    natural structures this says every entry of f is fixed, and the
    result is f itself read over K.  Precomputed K-forms may be passed
    to avoid re-running descent.
    """
    if f.rows != dst.space.dim or f.cols != src.space.dim:
        raise DimensionMismatch("morphism shape does not match the structures")
    for i, g in enumerate(group.elements):
        lhs = dst.mats[i] * conjugate_matrix(g, f)
        rhs = f * src.mats[i]
        if lhs.entries != rhs.entries:
            raise NotEquivariant(f"morphism not equivariant at group element {i}", aut=i)
    src_form = src_form or descend(src, group)
    dst_form = dst_form or descend(dst, group)
    over_l = dst_form.kbasis.transpose().inverse() * f * src_form.kbasis.transpose()
    ext = src.space.ext
    base = ext.base
    return over_l.map_entries(lambda e: FieldElem(base, coerce_down(ext, group, e).rep), base)


def hom_dim_check(n: int, m: int, ext: Extension):
    """Dimension bookkeeping for morphism spaces under extension of scalars.

    Both sides are n*m; the explicit base-change basis (matrix units
    read over L) is returned so tests can use it as an oracle.
    """
    units = []
    for r in range(m):
        for c in range(n):
            rows = [[ext.one if (r2 == r and c2 == c) else ext.zero for c2 in range(n)] for r2 in range(m)]
            units.append(mat(ext, rows))
    return n * m, n * m, tuple(units)
