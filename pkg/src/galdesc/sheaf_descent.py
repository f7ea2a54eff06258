"""Extension of scalars and Galois descent for sheaves on finite posets.

A structure on an L-sheaf is a semilinear cocycle on every stalk that
is also a morphism of sheaves: for each covering pair x -> y and each
group element g the mixed identity R_xy * A_g(x) = A_g(y) * g(R_xy)
holds.  Descent runs the vector-space construction pointwise and
re-expresses the restriction maps on the invariant bases; their entries
are then fixed by the group and drop to the base field.

In this finite model the pointwise tensor of a K-sheaf with L is
already a sheaf, so extension of scalars needs no sheafification step;
a regression test in the suite checks sections of the extended sheaf
against the extended section spaces over every up-set.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

from .errors import (
    NotCocycle,
    NotEquivariant,
    NotFixed,
    NotFixedRestriction,
    NotSheafMorphism,
)
from .fields import Extension, FieldElem, GaloisGroup, apply_aut, coerce_down
from .linalg import Matrix, solve_matrix, zeros
from .posets import MonotoneMap
from .semilinear import (
    GStructure,
    KForm,
    LSpace,
    check_gstructure,
    conjugate_matrix,
    descend,
    descend_morphism_vect,
    extend_scalars,
)
from .sheaves import (
    PosetSheaf,
    SheafMorphism,
    _pushforward_data,
    hom_system,
    is_locally_constant,
    make_sheaf,
    pullback,
    sheaf_morphism,
)


@dataclass(frozen=True)
class SheafGStructure:
    """A sheaf over L with a compatible semilinear cocycle on each stalk."""

    sheaf: PosetSheaf
    cocycles: tuple[GStructure, ...]

    @property
    def ext(self) -> Extension:
        return self.sheaf.field


@dataclass(frozen=True)
class SheafKForm:
    """Descent output: the K-sheaf, pointwise K-forms, and the gluing iso.

    ``iso`` maps the extension of the K-sheaf to the original sheaf;
    the ``intertwined`` flag records that it carries the natural
    structure to the given one (checked matrix by matrix).
    """

    ksheaf: PosetSheaf
    pointwise: tuple[KForm, ...]
    iso: SheafMorphism
    intertwined: bool


@dataclass
class Report:
    """Structured pass/fail result of a compatibility checker."""

    name: str
    passed: bool
    details: dict = dc_field(default_factory=dict)


def coerce_sheaf(sheaf: PosetSheaf, ext: Extension) -> PosetSheaf:
    """Read a K-sheaf over L by embedding every restriction entry."""
    return sheaf.map_entries(lambda e: ext.coerce(e), ext)


def coerce_matrix(m: Matrix, ext: Extension) -> Matrix:
    return m.map_entries(lambda e: ext.coerce(e), ext)


def natural_structure(sheaf: PosetSheaf, group: GaloisGroup) -> SheafGStructure:
    cocycles = tuple(
        extend_scalars(sheaf.stalk_dim[x], sheaf.field, group)[1]
        for x in sheaf.poset.points()
    )
    return SheafGStructure(sheaf, cocycles)


def extend_sheaf(sheaf: PosetSheaf, ext: Extension, group: GaloisGroup):
    """Extension of scalars with the natural structure on every stalk."""
    lifted = coerce_sheaf(sheaf, ext)
    return lifted, natural_structure(lifted, group)


def check_sheaf_gstructure(sgs: SheafGStructure, group: GaloisGroup):
    """Pointwise cocycle checks plus the sheaf-morphism compatibility."""
    sheaf = sgs.sheaf
    checked = []
    for x in sheaf.poset.points():
        try:
            check_gstructure(sgs.cocycles[x], group)
        except NotCocycle as e:
            raise NotCocycle(f"cocycle fails at point {x}: {e}", pair=e.pair, point=x) from None
        checked.append(("point", x))
    for k, (x, y) in enumerate(sheaf.poset.covers):
        r = sheaf.res[k]
        for i, g in enumerate(group.elements):
            lhs = r * sgs.cocycles[x].mats[i]
            rhs = sgs.cocycles[y].mats[i] * conjugate_matrix(g, r)
            if lhs.entries != rhs.entries:
                raise NotSheafMorphism(
                    f"structure is not a sheaf morphism over {(x, y)} at group element {i}",
                    pair=(x, y),
                    aut=i,
                )
            checked.append(("cover", x, y, i))
    return checked


def descend_sheaf(sgs: SheafGStructure, group: GaloisGroup) -> SheafKForm:
    """Galois descent for a sheaf structure, with a verified certificate.

    Pointwise descent gives the invariant bases; restriction maps are
    rewritten on those bases, where their entries are group-fixed and
    drop to K.  The returned iso realizes the commuting square between
    the natural structure on the extension and the given structure.
    """
    check_sheaf_gstructure(sgs, group)
    sheaf = sgs.sheaf
    ext = sheaf.field
    base = ext.base
    forms = tuple(descend(sgs.cocycles[x], group) for x in sheaf.poset.points())
    kres = []
    for k, (x, y) in enumerate(sheaf.poset.covers):
        r = sheaf.res[k]
        bx = forms[x].kbasis.transpose()
        by_inv = forms[y].kbasis_inverse.transpose()
        over_l = by_inv * r * bx
        try:
            kres.append(
                over_l.map_entries(
                    lambda e: FieldElem(base, coerce_down(ext, group, e).rep), base
                )
            )
        except NotFixed as e:
            raise NotFixedRestriction(
                f"descended restriction for {(x, y)} has a non-fixed entry: {e}",
                pair=(x, y),
            ) from None
    ksheaf = make_sheaf(sheaf.poset, base, [f.kdim for f in forms], kres)
    lifted = coerce_sheaf(ksheaf, ext)
    iso = sheaf_morphism(
        lifted, sheaf, [forms[x].kbasis.transpose() for x in sheaf.poset.points()]
    )
    intertwined = True
    for x in sheaf.poset.points():
        bx = forms[x].kbasis.transpose()
        for i, g in enumerate(group.elements):
            if (sgs.cocycles[x].mats[i] * conjugate_matrix(g, bx)).entries != bx.entries:
                intertwined = False
    if not intertwined:
        raise NotFixedRestriction("descent certificate does not intertwine the structures")
    return SheafKForm(ksheaf=ksheaf, pointwise=forms, iso=iso, intertwined=True)


def descend_sheaf_morphism(
    f: SheafMorphism,
    src: SheafGStructure,
    dst: SheafGStructure,
    group: GaloisGroup,
    src_form: SheafKForm | None = None,
    dst_form: SheafKForm | None = None,
) -> SheafMorphism:
    """Descend a morphism of L-sheaves that is equivariant at every point."""
    src_form = src_form or descend_sheaf(src, group)
    dst_form = dst_form or descend_sheaf(dst, group)
    comps = []
    for x in f.source.poset.points():
        try:
            comps.append(
                descend_morphism_vect(
                    f.comp[x],
                    src.cocycles[x],
                    dst.cocycles[x],
                    group,
                    src_form=src_form.pointwise[x],
                    dst_form=dst_form.pointwise[x],
                )
            )
        except NotEquivariant as e:
            raise NotEquivariant(
                f"morphism not equivariant at point {x}", aut=e.aut, point=x
            ) from None
    return sheaf_morphism(src_form.ksheaf, dst_form.ksheaf, comps)


def _base_change_matrix(k_space, l_space, ext: Extension) -> Matrix:
    """Express coerced K-basis vectors in an RREF L-basis (columnwise)."""
    base_rows = k_space.basis.entries
    if not base_rows:
        return zeros(ext, l_space.dim, 0)
    coerced = [[ext.coerce(e) for e in row] for row in base_rows]
    from .linalg import mat

    stacked = mat(ext, coerced)
    return solve_matrix(l_space.basis.transpose(), stacked.transpose())


def _is_invertible_square(m: Matrix) -> bool:
    from .errors import Singular

    if m.rows != m.cols:
        return False
    try:
        m.inverse()
    except Singular:
        return False
    return True


def check_compat_pullback(
    f: MonotoneMap, sheaf: PosetSheaf, ext: Extension, group: GaloisGroup
) -> Report:
    """Extension of scalars commutes with inverse images, on the nose.

    Both routes produce literally the same stalk data here, so the
    comparison morphism is the identity; a failure would witness an
    implementation bug rather than a mathematical one.
    """
    side1 = coerce_sheaf(pullback(f, sheaf), ext)
    side2 = pullback(f, coerce_sheaf(sheaf, ext))
    passed = side1 == side2
    return Report(
        name="pullback-compat",
        passed=passed,
        details={
            "stalk_dims": list(side1.stalk_dim),
            "pointwise_equal": passed,
        },
    )


def check_compat_pushforward(
    f: MonotoneMap, sheaf: PosetSheaf, ext: Extension, group: GaloisGroup
) -> Report:
    """For finite extensions, direct images commute with extension of scalars.

    The natural map sends an extended K-section to itself read as an
    L-section; it is checked to be a pointwise isomorphism commuting
    with the induced restriction maps.
    """
    push_k, spaces_k = _pushforward_data(f, sheaf)
    side1 = coerce_sheaf(push_k, ext)
    lifted = coerce_sheaf(sheaf, ext)
    side2, spaces_l = _pushforward_data(f, lifted)
    comparison = {}
    passed = True
    for y in f.target.points():
        n = _base_change_matrix(spaces_k[y].space, spaces_l[y].space, ext)
        comparison[y] = n
        if not _is_invertible_square(n):
            passed = False
    for k, (y, y2) in enumerate(f.target.covers):
        lhs = side2.res[k] * comparison[y]
        rhs = comparison[y2] * coerce_matrix(push_k.res[k], ext)
        if lhs.entries != rhs.entries:
            passed = False
    return Report(
        name="pushforward-compat",
        passed=passed,
        details={
            "stalk_dims_base": list(push_k.stalk_dim),
            "stalk_dims_extended": list(side2.stalk_dim),
            "comparison": comparison,
        },
    )


def check_compat_hom(
    f: PosetSheaf, g: PosetSheaf, ext: Extension, group: GaloisGroup
) -> Report:
    """Morphism spaces base-change bijectively for finite extensions.

    Checks the global dimension count, injectivity and fullness of the
    base-change map on a basis, and the stalkwise comparison of the
    internal homs.
    """
    all_pts = tuple(f.poset.points())
    sys_k = hom_system(f, g, all_pts)
    fl = coerce_sheaf(f, ext)
    gl = coerce_sheaf(g, ext)
    sys_l = hom_system(fl, gl, all_pts)
    passed = sys_k.dim == sys_l.dim
    global_map = _base_change_matrix(sys_k.space, sys_l.space, ext)
    if not _is_invertible_square(global_map):
        passed = False
    stalk_pairs = []
    for x in f.poset.points():
        up = f.poset.up_set(x)
        sk = hom_system(f, g, up)
        sl = hom_system(fl, gl, up)
        ok = sk.dim == sl.dim and _is_invertible_square(
            _base_change_matrix(sk.space, sl.space, ext)
        )
        stalk_pairs.append((sk.dim, sl.dim))
        if not ok:
            passed = False
    return Report(
        name="hom-compat",
        passed=passed,
        details={
            "dim_base": sys_k.dim,
            "dim_extended": sys_l.dim,
            "stalkwise_dims": stalk_pairs,
            "base_change": global_map,
        },
    )


def check_locally_constant_descent(sgs: SheafGStructure, group: GaloisGroup) -> Report:
    """Local constancy holds over L iff it holds for the descended sheaf."""
    form = descend_sheaf(sgs, group)
    upstairs = is_locally_constant(sgs.sheaf)
    downstairs = is_locally_constant(form.ksheaf)
    return Report(
        name="locally-constant-descent",
        passed=(upstairs == downstairs),
        details={"extended": upstairs, "descended": downstairs},
    )
