"""Sheaves of vector spaces on finite posets.

In the Alexandrov model a sheaf is a functor on the poset: a stalk
dimension per point and a restriction matrix per covering pair, with
all covering-chain composites between comparable points agreeing (path
independence, checked exhaustively at construction).  The stalk at x is
canonically the space of sections over the minimal open {y : y >= x}.

Stalk bases produced by constructions (pushforward, hom) are the RREF
section bases, and induced maps are computed by solve with the
zero-free-variable convention, so equal inputs give byte-equal outputs.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DimensionMismatch, FieldMismatch, NotSheafMorphism
from .fields import Field
from .linalg import (
    Matrix,
    Subspace,
    identity,
    kernel,
    mat,
    solve_matrix,
    subspace_from_vectors,
    zeros,
)
from .posets import FinPoset, MonotoneMap


@dataclass(frozen=True)
class PosetSheaf:
    """Stalk dimensions plus restriction matrices along covering pairs."""

    poset: FinPoset
    field: Field
    stalk_dim: tuple[int, ...]
    res: tuple[Matrix, ...]  # aligned with poset.covers; maps stalk(x) -> stalk(y)

    def res_for(self, pair) -> Matrix:
        return self.res[self.poset.covers.index(tuple(pair))]

    def res_map(self, x: int, y: int) -> Matrix:
        """Composite restriction along any covering chain from x to y."""
        if not self.poset.le(x, y):
            raise DimensionMismatch(f"{x} is not below {y}")
        paths = self.poset.cover_paths(x, y)
        return self._compose_path(paths[0], x)

    def _compose_path(self, path, start: int) -> Matrix:
        m = identity(self.field, self.stalk_dim[start])
        for pair in path:
            m = self.res_for(pair) * m
        return m

    def map_entries(self, fn, field: Field | None = None) -> "PosetSheaf":
        return make_sheaf(
            self.poset,
            field or self.field,
            self.stalk_dim,
            [r.map_entries(fn, field) for r in self.res],
        )

    def __eq__(self, other):
        return (
            isinstance(other, PosetSheaf)
            and other.poset == self.poset
            and other.field == self.field
            and other.stalk_dim == self.stalk_dim
            and tuple(r.entries for r in other.res) == tuple(r.entries for r in self.res)
        )


def make_sheaf(poset: FinPoset, field: Field, stalk_dim, res) -> PosetSheaf:
    """Validate shapes and path independence, then freeze the sheaf."""
    stalk_dim = tuple(stalk_dim)
    res = tuple(res)
    if len(stalk_dim) != poset.n or len(res) != len(poset.covers):
        raise DimensionMismatch("stalk or restriction data has wrong length")
    for (x, y), m in zip(poset.covers, res):
        if m.rows != stalk_dim[y] or m.cols != stalk_dim[x]:
            raise DimensionMismatch(f"restriction for {(x, y)} has shape {m.rows}x{m.cols}")
        if m.field != field:
            raise FieldMismatch(f"restriction for {(x, y)} over the wrong field")
    sheaf = PosetSheaf(poset, field, stalk_dim, res)
    _check_path_independence(sheaf)
    return sheaf


def _check_path_independence(sheaf: PosetSheaf):
    p = sheaf.poset
    for x in p.points():
        for y in p.points():
            if x != y and p.le(x, y):
                paths = p.cover_paths(x, y)
                first = sheaf._compose_path(paths[0], x)
                for path in paths[1:]:
                    if sheaf._compose_path(path, x).entries != first.entries:
                        raise NotSheafMorphism(
                            f"restriction composites from {x} to {y} disagree",
                            pair=(x, y),
                        )


def constant_sheaf(poset: FinPoset, field: Field, dim: int = 1) -> PosetSheaf:
    return make_sheaf(
        poset, field, [dim] * poset.n, [identity(field, dim) for _ in poset.covers]
    )


def zero_sheaf(poset: FinPoset, field: Field) -> PosetSheaf:
    return make_sheaf(poset, field, [0] * poset.n, [zeros(field, 0, 0) for _ in poset.covers])


@dataclass(frozen=True)
class SheafMorphism:
    """A family of stalk maps commuting with all restrictions."""

    source: PosetSheaf
    target: PosetSheaf
    comp: tuple[Matrix, ...]

    def is_pointwise_iso(self) -> bool:
        from .errors import Singular

        for m in self.comp:
            if m.rows != m.cols:
                return False
            try:
                m.inverse()
            except Singular:
                return False
        return True

    @property
    def is_zero(self) -> bool:
        return all(m.is_zero for m in self.comp)


def sheaf_morphism(source: PosetSheaf, target: PosetSheaf, comp) -> SheafMorphism:
    comp = tuple(comp)
    if source.poset != target.poset:
        raise DimensionMismatch("morphism between sheaves on different posets")
    if source.field != target.field:
        raise FieldMismatch("morphism between sheaves over different fields")
    for x, m in enumerate(comp):
        if m.rows != target.stalk_dim[x] or m.cols != source.stalk_dim[x]:
            raise DimensionMismatch(f"component at {x} has wrong shape")
    for k, (x, y) in enumerate(source.poset.covers):
        lhs = target.res[k] * comp[x]
        rhs = comp[y] * source.res[k]
        if lhs.entries != rhs.entries:
            raise NotSheafMorphism(f"components do not commute over {(x, y)}", pair=(x, y))
    return SheafMorphism(source, target, comp)


def zero_morphism(source: PosetSheaf, target: PosetSheaf) -> SheafMorphism:
    return sheaf_morphism(
        source,
        target,
        [zeros(source.field, target.stalk_dim[x], source.stalk_dim[x]) for x in source.poset.points()],
    )


def identity_morphism(sheaf: PosetSheaf) -> SheafMorphism:
    return sheaf_morphism(
        sheaf, sheaf, [identity(sheaf.field, d) for d in sheaf.stalk_dim]
    )


def compose_morphisms(second: SheafMorphism, first: SheafMorphism) -> SheafMorphism:
    return sheaf_morphism(
        first.source,
        second.target,
        [second.comp[x] * first.comp[x] for x in first.source.poset.points()],
    )


@dataclass(frozen=True)
class SectionSpace:
    """Sections over an up-set, as a subspace of the product of stalks."""

    sheaf: PosetSheaf
    points: tuple[int, ...]
    offsets: tuple[int, ...]
    space: Subspace

    @property
    def dim(self) -> int:
        return self.space.dim

    def block(self, x: int) -> slice:
        i = self.points.index(x)
        start = self.offsets[i]
        return slice(start, start + self.sheaf.stalk_dim[x])

    def projection(self, x: int) -> Matrix:
        """Matrix taking section coordinates to the stalk at x."""
        blk = self.block(x)
        cols = [row[blk] for row in self.space.basis.entries]
        d = self.sheaf.stalk_dim[x]
        if d == 0 or self.dim == 0:
            return zeros(self.sheaf.field, d, self.dim)
        return mat(self.sheaf.field, [[cols[c][r] for c in range(self.dim)] for r in range(d)])

    def restriction_to(self, smaller: "SectionSpace") -> Matrix:
        """Matrix of restricting sections to a smaller up-set, in RREF bases."""
        rows = []
        for basis_row in self.space.basis.entries:
            restricted = []
            for x in smaller.points:
                restricted.extend(basis_row[self.block(x)])
            rows.append(restricted)
        field = self.sheaf.field
        amb = smaller.space.ambient_dim
        stacked = mat(field, rows) if rows else zeros(field, 0, amb)
        return solve_matrix(smaller.space.basis.transpose(), stacked.transpose())


def sections(sheaf: PosetSheaf, up_set) -> SectionSpace:
    """Sections over an up-set: the kernel of the gluing constraints.

    One block of constraints per covering pair inside the up-set; for
    the minimal open of a point the projection to that point's stalk is
    an isomorphism onto the stalk.
    """
    sheaf.poset.require_up_set(up_set)
    pts = tuple(sorted(set(up_set)))
    offsets = []
    total = 0
    for x in pts:
        offsets.append(total)
        total += sheaf.stalk_dim[x]
    field = sheaf.field
    offset_of = {x: o for x, o in zip(pts, offsets)}
    rows = []
    for k, (x, y) in enumerate(sheaf.poset.covers):
        if x in offset_of and y in offset_of:
            r = sheaf.res[k]
            for i in range(sheaf.stalk_dim[y]):
                row = [field.zero] * total
                for j in range(sheaf.stalk_dim[x]):
                    row[offset_of[x] + j] = r.entries[i][j]
                row[offset_of[y] + i] = row[offset_of[y] + i] - field.one
                rows.append(row)
    constraints = mat(field, rows) if rows else zeros(field, 0, total)
    return SectionSpace(sheaf, pts, tuple(offsets), kernel(constraints))


def _pushforward_data(f: MonotoneMap, sheaf: PosetSheaf):
    spaces = {}
    for y in f.target.points():
        pre = f.preimage(f.target.up_set(y))
        spaces[y] = sections(sheaf, pre)
    res = []
    for (y, y2) in f.target.covers:
        res.append(spaces[y].restriction_to(spaces[y2]))
    pushed = make_sheaf(
        f.target,
        sheaf.field,
        [spaces[y].dim for y in f.target.points()],
        res,
    )
    return pushed, spaces


def pushforward(f: MonotoneMap, sheaf: PosetSheaf) -> PosetSheaf:
    """Direct image: stalk at y is the sections over the preimage of its
    minimal open, with restriction maps induced by inclusion of preimages."""
    if sheaf.poset != f.source:
        raise DimensionMismatch("sheaf does not live on the source of the map")
    return _pushforward_data(f, sheaf)[0]


def pullback(f: MonotoneMap, sheaf: PosetSheaf) -> PosetSheaf:
    """Inverse image: stalkwise composition with the point map."""
    if sheaf.poset != f.target:
        raise DimensionMismatch("sheaf does not live on the target of the map")
    dims = [sheaf.stalk_dim[f(x)] for x in f.source.points()]
    res = [sheaf.res_map(f(x), f(y)) for (x, y) in f.source.covers]
    return make_sheaf(f.source, sheaf.field, dims, res)


def extend_by_zero(ambient: FinPoset, locus, sheaf: PosetSheaf) -> PosetSheaf:
    """Extension by zero of a sheaf on a locally closed subposet.

    The locus must be order-convex; the sheaf must live on the induced
    subposet.  Stalks outside the locus are zero, and every restriction
    into or out of a zero stalk is the zero map.
    """
    ambient.require_locally_closed(locus)
    sub, index = ambient.induced(locus)
    if sheaf.poset != sub:
        raise DimensionMismatch("sheaf does not live on the induced subposet")
    in_locus = set(locus)
    dims = [sheaf.stalk_dim[index[x]] if x in in_locus else 0 for x in ambient.points()]
    res = []
    for (x, y) in ambient.covers:
        if x in in_locus and y in in_locus:
            res.append(sheaf.res_for((index[x], index[y])))
        else:
            res.append(zeros(sheaf.field, dims[y], dims[x]))
    return make_sheaf(ambient, sheaf.field, dims, res)


def skyscraper(ambient: FinPoset, x: int, field: Field, dim: int = 1) -> PosetSheaf:
    """Constant sheaf on a single point, extended by zero."""
    sub, _ = ambient.induced([x])
    return extend_by_zero(ambient, [x], constant_sheaf(sub, field, dim))


def tensor(a: PosetSheaf, b: PosetSheaf) -> PosetSheaf:
    """Stalkwise tensor product; restriction maps are Kronecker products."""
    if a.poset != b.poset:
        raise DimensionMismatch("tensor of sheaves on different posets")
    if a.field != b.field:
        raise FieldMismatch("tensor of sheaves over different fields")
    dims = [da * db for da, db in zip(a.stalk_dim, b.stalk_dim)]
    res = [ra.kron(rb) for ra, rb in zip(a.res, b.res)]
    return make_sheaf(a.poset, a.field, dims, res)


@dataclass(frozen=True)
class HomSystem:
    """Compatible families of stalk maps F|_U -> G|_U over an up-set U.

    A family is a block vector (one block per point, row-major entries
    of the map at that point); the space collects the solutions of all
    commuting-square constraints.
    """

    source: PosetSheaf
    target: PosetSheaf
    points: tuple[int, ...]
    offsets: tuple[int, ...]
    space: Subspace

    @property
    def dim(self) -> int:
        return self.space.dim

    def block_shape(self, x: int):
        return self.target.stalk_dim[x], self.source.stalk_dim[x]

    def component(self, vec, x: int) -> Matrix:
        i = self.points.index(x)
        r, c = self.block_shape(x)
        start = self.offsets[i]
        rows = [
            [vec[start + ri * c + ci] for ci in range(c)] for ri in range(r)
        ]
        return mat(self.source.field, rows) if r and c else zeros(self.source.field, r, c)

    def restriction_to(self, smaller: "HomSystem") -> Matrix:
        rows = []
        for basis_row in self.space.basis.entries:
            restricted = []
            for x in smaller.points:
                i = self.points.index(x)
                r, c = self.block_shape(x)
                start = self.offsets[i]
                restricted.extend(basis_row[start : start + r * c])
            rows.append(restricted)
        field = self.source.field
        amb = smaller.space.ambient_dim
        stacked = mat(field, rows) if rows else zeros(field, 0, amb)
        return solve_matrix(smaller.space.basis.transpose(), stacked.transpose())


def hom_system(f: PosetSheaf, g: PosetSheaf, up_set) -> HomSystem:
    if f.poset != g.poset:
        raise DimensionMismatch("hom of sheaves on different posets")
    if f.field != g.field:
        raise FieldMismatch("hom of sheaves over different fields")
    f.poset.require_up_set(up_set)
    pts = tuple(sorted(set(up_set)))
    field = f.field
    offsets = []
    total = 0
    for x in pts:
        offsets.append(total)
        total += g.stalk_dim[x] * f.stalk_dim[x]
    offset_of = {x: o for x, o in zip(pts, offsets)}
    rows = []
    for k, (x, y) in enumerate(f.poset.covers):
        if x in offset_of and y in offset_of:
            rf, rg = f.res[k], g.res[k]
            # (rg * h_x)[i,j] = (h_y * rf)[i,j] for all i < dimG_y, j < dimF_x
            for i in range(g.stalk_dim[y]):
                for j in range(f.stalk_dim[x]):
                    row = [field.zero] * total
                    for k2 in range(g.stalk_dim[x]):
                        row[offset_of[x] + k2 * f.stalk_dim[x] + j] = rg.entries[i][k2]
                    for k2 in range(f.stalk_dim[y]):
                        idx = offset_of[y] + i * f.stalk_dim[y] + k2
                        row[idx] = row[idx] - rf.entries[k2][j]
                    rows.append(row)
    constraints = mat(field, rows) if rows else zeros(field, 0, total)
    return HomSystem(f, g, pts, tuple(offsets), kernel(constraints))


def sheaf_hom(f: PosetSheaf, g: PosetSheaf) -> PosetSheaf:
    """Internal hom: the stalk at x is the space of compatible families
    over the minimal open of x; restrictions forget constraints."""
    systems = {x: hom_system(f, g, f.poset.up_set(x)) for x in f.poset.points()}
    res = [systems[x].restriction_to(systems[y]) for (x, y) in f.poset.covers]
    return make_sheaf(
        f.poset, f.field, [systems[x].dim for x in f.poset.points()], res
    )


def hom_global(f: PosetSheaf, g: PosetSheaf) -> tuple[SheafMorphism, ...]:
    """A basis of the space of sheaf morphisms F -> G.

    Computed as the global sections of the internal hom: the compatible
    families over the whole space are exactly the morphisms.
    """
    system = hom_system(f, g, tuple(f.poset.points()))
    out = []
    for row in system.space.basis.entries:
        comps = [system.component(row, x) for x in f.poset.points()]
        out.append(sheaf_morphism(f, g, comps))
    return tuple(out)


def is_locally_constant(sheaf: PosetSheaf) -> bool:
    """True iff every restriction along a covering pair is invertible."""
    from .errors import Singular

    for m in sheaf.res:
        if m.rows != m.cols:
            return False
        try:
            m.inverse()
        except Singular:
            return False
    return True


def global_sections_dim(sheaf: PosetSheaf) -> int:
    return sections(sheaf, tuple(sheaf.poset.points())).dim
