"""Exact fields: rationals, prime fields, quotient extensions, automorphisms.

An extension is a quotient K[x]/(f) with f monic and irreducible over K.
Elements are stored dense, low degree first, always reduced; rationals are
kept in lowest terms with positive denominator.  Towers are supported to
depth two (an extension whose base is itself an extension of a base field).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from .errors import (
    HintNotRoot,
    NotClosed,
    NotConstant,
    NotFixed,
    Reducible,
    UnverifiableIrreducibility,
)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


class FieldElem:
    """An element of a field, carrying a reference to its field.

    The representation is a Fraction (rationals), an int in [0, p)
    (prime fields), or a fixed-length tuple of base-field elements
    (extensions, low degree first).
    """

    __slots__ = ("field", "rep")

    def __init__(self, field, rep):
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "rep", rep)

    def __setattr__(self, name, value):
        raise AttributeError("field elements are immutable")

    def _rep_of(self, other):
        if isinstance(other, FieldElem):
            if other.field is self.field or other.field == self.field:
                return other.rep
            return self.field.coerce(other).rep
        return self.field.elem(other).rep

    def __add__(self, other):
        return FieldElem(self.field, self.field.add(self.rep, self._rep_of(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return FieldElem(self.field, self.field.sub(self.rep, self._rep_of(other)))

    def __rsub__(self, other):
        return FieldElem(self.field, self.field.sub(self._rep_of(other), self.rep))

    def __mul__(self, other):
        return FieldElem(self.field, self.field.mul(self.rep, self._rep_of(other)))

    __rmul__ = __mul__

    def __neg__(self):
        return FieldElem(self.field, self.field.neg(self.rep))

    def __truediv__(self, other):
        return self * FieldElem(self.field, self.field.inv(self._rep_of(other)))

    def inverse(self) -> "FieldElem":
        return FieldElem(self.field, self.field.inv(self.rep))

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = self.field.one
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    @property
    def is_zero(self) -> bool:
        return self.rep == self.field.zero.rep

    def __eq__(self, other):
        if isinstance(other, FieldElem):
            if other.field is self.field or other.field == self.field:
                return self.rep == other.rep
            return NotImplemented
        if isinstance(other, (int, Fraction)):
            return self.rep == self.field.elem(other).rep
        return NotImplemented

    def __hash__(self):
        return hash((self.field, self._hashable_rep()))

    def _hashable_rep(self):
        if isinstance(self.rep, tuple):
            return tuple(c._hashable_rep() for c in self.rep)
        return self.rep

    def __repr__(self):
        return self.field.render(self.rep)


class Field:
    """Common interface for the exact fields of the toolkit."""

    char: int = 0

    def elem(self, value) -> FieldElem:
        return FieldElem(self, self.coerce_rep(value))

    def coerce(self, x: FieldElem) -> FieldElem:
        return self.elem(x)

    @property
    def zero(self) -> FieldElem:
        return self.elem(0)

    @property
    def one(self) -> FieldElem:
        return self.elem(1)

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def order(self) -> int | None:
        """Number of elements, or None for infinite fields."""
        raise NotImplementedError

    def elements(self):
        """Iterate all elements (finite fields only), deterministically."""
        raise NotImplementedError

    def random_elem(self, rng) -> FieldElem:
        raise NotImplementedError

    def render(self, rep) -> str:
        """Canonical standalone text form of an element."""
        raise NotImplementedError

    def render_coeff(self, rep) -> str:
        """Text form used inside polynomial strings of an extension."""
        return self.render(rep)


class RationalField(Field):
    """The rational numbers with arbitrary-precision arithmetic."""

    char = 0

    def coerce_rep(self, value):
        if isinstance(value, FieldElem):
            if value.field == self:
                return value.rep
            raise FieldMismatchError(value, self)
        return Fraction(value)

    def add(self, a, b):
        return a + b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return 1 / a

    def order(self):
        return None

    def random_elem(self, rng):
        return self.elem(Fraction(rng.randint(-9, 9), rng.randint(1, 9)))

    def render(self, rep):
        return str(rep)

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("rationals")

    def __repr__(self):
        return "QQ"


class PrimeField(Field):
    """Integers modulo a prime p, verified prime by trial division."""

    def __init__(self, p: int):
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        self.p = p
        self.char = p

    def coerce_rep(self, value):
        if isinstance(value, FieldElem):
            if value.field == self:
                return value.rep
            raise FieldMismatchError(value, self)
        if isinstance(value, Fraction):
            if value.denominator % self.p == 0:
                raise ZeroDivisionError("denominator divisible by p")
            return value.numerator * pow(value.denominator, -1, self.p) % self.p
        return int(value) % self.p

    def add(self, a, b):
        return (a + b) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(a, -1, self.p)

    def order(self):
        return self.p

    def elements(self):
        for r in range(self.p):
            yield self.elem(r)

    def random_elem(self, rng):
        return self.elem(rng.randrange(self.p))

    def render(self, rep):
        return f"{rep} mod {self.p}"

    def render_coeff(self, rep):
        return str(rep)

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("prime", self.p))

    def __repr__(self):
        return f"GF({self.p})"


class FieldMismatchError(TypeError):
    def __init__(self, elem, field):
        super().__init__(f"element of {elem.field!r} used over {field!r}")


@dataclass(frozen=True)
class Poly:
    """Dense univariate polynomial over a field, low degree first.

    The coefficient tuple carries no trailing zeros; the zero polynomial
    is the empty tuple.
    """

    field: Field
    coeffs: tuple

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == self.field.one

    def __add__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        f = self.field
        out = []
        for i in range(n):
            a = self.coeffs[i] if i < len(self.coeffs) else f.zero
            b = other.coeffs[i] if i < len(other.coeffs) else f.zero
            out.append(a + b)
        return poly(f, out)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return Poly(self.field, tuple(-c for c in self.coeffs))

    def __mul__(self, other):
        if self.is_zero or other.is_zero:
            return Poly(self.field, ())
        f = self.field
        out = [f.zero] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return poly(f, out)

    def scale(self, c: FieldElem):
        return poly(self.field, [a * c for a in self.coeffs])

    def divmod(self, other: "Poly"):
        if other.is_zero:
            raise ZeroDivisionError("polynomial division by zero")
        f = self.field
        rem = list(self.coeffs)
        dq = len(rem) - len(other.coeffs)
        if dq < 0:
            return Poly(f, ()), self
        lead_inv = other.coeffs[-1].inverse()
        quo = [f.zero] * (dq + 1)
        for k in range(dq, -1, -1):
            c = rem[k + other.degree] * lead_inv
            quo[k] = c
            if not c.is_zero:
                for i, b in enumerate(other.coeffs):
                    rem[k + i] = rem[k + i] - c * b
        return poly(f, quo), poly(f, rem)

    def __mod__(self, other):
        return self.divmod(other)[1]

    def evaluate(self, x: FieldElem) -> FieldElem:
        """Horner evaluation; x may live in an extension of the field."""
        target = x.field
        result = target.zero
        for c in reversed(self.coeffs):
            result = result * x + target.coerce(c)
        return result

    def derivative(self) -> "Poly":
        f = self.field
        out = []
        for i, c in enumerate(self.coeffs[1:], start=1):
            term = f.zero
            for _ in range(i):
                term = term + c
            out.append(term)
        return poly(f, out)

    def monic(self) -> "Poly":
        if self.is_zero:
            return self
        return self.scale(self.coeffs[-1].inverse())

    def __repr__(self):
        if self.is_zero:
            return "0"
        return "+".join(
            f"{self.field.render_coeff(c.rep)}*x^{i}" for i, c in enumerate(self.coeffs)
        )


def poly(field: Field, coeffs) -> Poly:
    """Build a normalized polynomial, coercing coefficients into field."""
    cs = [c if isinstance(c, FieldElem) and c.field == field else field.elem(c) for c in coeffs]
    while cs and cs[-1].is_zero:
        cs.pop()
    return Poly(field, tuple(cs))


def poly_gcd(a: Poly, b: Poly) -> Poly:
    while not b.is_zero:
        a, b = b, a % b
    return a.monic()


def poly_xgcd(a: Poly, b: Poly):
    """Return (g, s, t) with s*a + t*b = g, g monic."""
    f = a.field
    r0, r1 = a, b
    s0, s1 = poly(f, [1]), poly(f, ())
    t0, t1 = poly(f, ()), poly(f, [1])
    while not r1.is_zero:
        q, r = r0.divmod(r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if r0.is_zero:
        return r0, s0, t0
    c = r0.coeffs[-1].inverse()
    return r0.scale(c), s0.scale(c), t0.scale(c)


class Extension(Field):
    """A quotient field K[x]/(f) for monic irreducible f over K.

    Elements are tuples of exactly ``degree`` base-field coefficients.
    Use :func:`make_extension` to construct one; it verifies (or records
    the assertion of) irreducibility.
    """

    def __init__(self, base: Field, modulus: Poly, gen_symbol: str, verified: str):
        self.base = base
        self.modulus = modulus
        self.degree = modulus.degree
        self.gen_symbol = gen_symbol
        self.irreducibility = verified  # "verified" | "asserted"
        self.char = base.char
        self._key = (base, tuple(c._hashable_rep() for c in modulus.coeffs), gen_symbol)
        # Reduction table: alpha^k for k in [degree, 2*degree-2] as dense tuples.
        d = self.degree
        alpha_d = tuple(-modulus.coeffs[i] for i in range(d))
        pows = [alpha_d]
        for _ in range(d - 2):
            prev = pows[-1]
            shifted = [base.zero] + list(prev[: d - 1])
            top = prev[d - 1]
            pows.append(tuple(shifted[i] + top * alpha_d[i] for i in range(d)))
        self._alpha_pows = pows

    def tower_depth(self) -> int:
        return 1 + (self.base.tower_depth() if isinstance(self.base, Extension) else 0)

    def coerce_rep(self, value):
        if isinstance(value, FieldElem):
            if value.field == self:
                return value.rep
            if value.field == self.base:
                return self._const(value)
            if isinstance(self.base, Extension):
                return self._const(self.base.coerce(value))
            raise FieldMismatchError(value, self)
        return self._const(self.base.elem(value))

    def _const(self, c: FieldElem):
        return (c,) + (self.base.zero,) * (self.degree - 1)

    def generator(self) -> FieldElem:
        if self.degree == 1:
            # x = c for the degree-one modulus x - c
            return self.elem(-self.modulus.coeffs[0])
        rep = [self.base.zero] * self.degree
        rep[1] = self.base.one
        return FieldElem(self, tuple(rep))

    def from_base_coeffs(self, coeffs) -> FieldElem:
        cs = [c if isinstance(c, FieldElem) else self.base.elem(c) for c in coeffs]
        if len(cs) != self.degree:
            raise ValueError("coefficient vector has wrong length")
        return FieldElem(self, tuple(cs))

    def to_base_coeffs(self, x: FieldElem) -> tuple:
        return self.coerce(x).rep

    def add(self, a, b):
        return tuple(x + y for x, y in zip(a, b))

    def neg(self, a):
        return tuple(-x for x in a)

    def mul(self, a, b):
        d = self.degree
        base = self.base
        conv = [base.zero] * (2 * d - 1)
        for i, x in enumerate(a):
            if x.is_zero:
                continue
            for j, y in enumerate(b):
                conv[i + j] = conv[i + j] + x * y
        out = list(conv[:d])
        for k in range(d, 2 * d - 1):
            c = conv[k]
            if c.is_zero:
                continue
            red = self._alpha_pows[k - d]
            for i in range(d):
                out[i] = out[i] + c * red[i]
        return tuple(out)

    def inv(self, a):
        apoly = poly(self.base, a)
        if apoly.is_zero:
            raise ZeroDivisionError("inverse of zero")
        g, s, _ = poly_xgcd(apoly, self.modulus)
        if g.degree != 0:
            raise ZeroDivisionError("element not invertible; modulus not irreducible?")
        s = s.scale(g.coeffs[0].inverse()) % self.modulus
        cs = list(s.coeffs) + [self.base.zero] * (self.degree - len(s.coeffs))
        return tuple(cs)

    def order(self):
        b = self.base.order()
        return None if b is None else b**self.degree

    def elements(self):
        base_elems = list(self.base.elements())
        for combo in product(base_elems, repeat=self.degree):
            yield FieldElem(self, tuple(combo))

    def random_elem(self, rng):
        return FieldElem(self, tuple(self.base.random_elem(rng) for _ in range(self.degree)))

    def render(self, rep):
        parts = []
        for i, c in enumerate(rep):
            cs = self.base.render_coeff(c.rep)
            if i == 0:
                parts.append(cs)
            elif i == 1:
                parts.append(f"{cs}*{self.gen_symbol}")
            else:
                parts.append(f"{cs}*{self.gen_symbol}^{i}")
        return "+".join(parts)

    def render_coeff(self, rep):
        return f"({self.render(rep)})"

    def __eq__(self, other):
        return isinstance(other, Extension) and other._key == self._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return f"{self.base!r}[{self.gen_symbol}]/({self.modulus!r})"


QQ = RationalField()


def _finite_irreducible(base: Field, modulus: Poly) -> None:
    """Reject reducible moduli over a finite field, else return.

    Exhaustive root search for degree <= 3, plus trial division by all
    monic factors of degree <= deg/2 beyond that.  Feasible at desk
    scale where the base order is small.
    """
    for e in base.elements():
        if modulus.evaluate(e).is_zero:
            raise Reducible(f"modulus has root {base.render(e.rep)}", factor=poly(base, [-e, base.one]))
    if modulus.degree <= 3:
        return
    base_elems = list(base.elements())
    for deg in range(2, modulus.degree // 2 + 1):
        for combo in product(base_elems, repeat=deg):
            cand = poly(base, list(combo) + [base.one])
            if (modulus % cand).is_zero:
                raise Reducible(f"modulus divisible by {cand!r}", factor=cand)


def _int_coeffs(modulus: Poly):
    """Clear denominators of a rational polynomial (content not removed)."""
    denoms = [c.rep.denominator for c in modulus.coeffs]
    lcm = 1
    for d in denoms:
        g = _gcd(lcm, d)
        lcm = lcm // g * d
    return [int(c.rep * lcm) for c in modulus.coeffs], lcm


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return abs(a)


def _divisors(n: int) -> list[int]:
    n = abs(n)
    out = []
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            if d != n // d:
                out.append(n // d)
        d += 1
    return sorted(out)


def _rational_roots(modulus: Poly):
    """Candidates p/q with p | constant, q | leading (integer-cleared)."""
    ints, _ = _int_coeffs(modulus)
    if ints[0] == 0:
        yield Fraction(0)
        return
    for p in _divisors(ints[0]):
        for q in _divisors(ints[-1]):
            yield Fraction(p, q)
            yield Fraction(-p, q)


def _rational_irreducible(modulus: Poly, assert_irreducible: bool) -> str:
    """Certify irreducibility over Q or raise; returns the trust level.

    Degree <= 3 is settled by the rational-root test.  Beyond that we
    reduce modulo the first three primes p with p coprime to the leading
    coefficient and the reduction squarefree: if any reduction is
    irreducible over GF(p), so is the modulus.  Inconclusive cases need
    an explicit assertion from the caller.
    """
    for r in _rational_roots(modulus):
        if modulus.evaluate(QQ.elem(r)).is_zero:
            raise Reducible(f"modulus has rational root {r}", factor=poly(QQ, [-r, 1]))
    if modulus.degree <= 3:
        return "verified"
    ints, _ = _int_coeffs(modulus)
    used = 0
    p = 2
    while used < 3 and p < 200:
        if is_prime(p) and ints[-1] % p != 0:
            gf = PrimeField(p)
            reduced = poly(gf, [c % p for c in ints])
            if reduced.degree == modulus.degree and poly_gcd(reduced, reduced.derivative()).degree == 0:
                used += 1
                try:
                    _finite_irreducible(gf, reduced.monic())
                    return "verified"
                except Reducible:
                    pass
        p += 1
    if assert_irreducible:
        return "asserted"
    raise UnverifiableIrreducibility(
        "cannot certify irreducibility over Q; pass assert_irreducible=True to proceed"
    )


def make_extension(
    base: Field,
    modulus_coeffs,
    gen_symbol: str = "a",
    assert_irreducible: bool = False,
) -> Extension:
    """Construct K[x]/(f) after verifying f is monic and irreducible.

    ``modulus_coeffs`` is given low degree first and must be monic.
    Raises Reducible when a factor is found, UnverifiableIrreducibility
    when the rational-case heuristic cannot decide and no assertion was
    given.  Towers deeper than two are rejected.
    """
    modulus = poly(base, modulus_coeffs)
    if not modulus.is_monic:
        raise ValueError("modulus must be monic")
    if modulus.degree < 1:
        raise ValueError("modulus must have degree >= 1")
    if isinstance(base, Extension) and base.tower_depth() >= 2:
        raise ValueError("towers deeper than two are not supported")
    verified = "verified"
    if modulus.degree > 1:
        if base.order() is not None:
            _finite_irreducible(base, modulus)
        elif isinstance(base, RationalField):
            verified = _rational_irreducible(modulus, assert_irreducible)
        else:
            # Extension of an infinite field: no enumeration available.
            if not assert_irreducible:
                raise UnverifiableIrreducibility(
                    "irreducibility over an extension of Q must be asserted explicitly"
                )
            verified = "asserted"
    return Extension(base, modulus, gen_symbol, verified)


@dataclass(frozen=True)
class FieldAut:
    """An automorphism of an extension fixing the base field pointwise.

    Determined by the image of the generator, which must be a root of
    the modulus.
    """

    ext: Extension
    gen_image: FieldElem

    @property
    def is_identity(self) -> bool:
        return self.gen_image == self.ext.generator()

    def __repr__(self):
        return f"{self.ext.gen_symbol}->{self.ext.render(self.gen_image.rep)}"


def field_aut(ext: Extension, gen_image) -> FieldAut:
    img = ext.coerce(gen_image) if isinstance(gen_image, FieldElem) else ext.elem(gen_image)
    if not ext.modulus.evaluate(img).is_zero:
        raise HintNotRoot(f"{ext.render(img.rep)} is not a root of the modulus")
    return FieldAut(ext, img)


def apply_aut(g: FieldAut, x: FieldElem) -> FieldElem:
    """Apply g to x by substituting the generator image into x's polynomial."""
    ext = g.ext
    rep = ext.coerce(x).rep
    result = ext.zero
    for c in reversed(rep):
        result = result * g.gen_image + ext.coerce(c)
    return result


@dataclass(frozen=True)
class GaloisGroup:
    """A verified automorphism group with its composition table.

    ``table[i][j]`` is the index of elements[i] composed after
    elements[j] (apply j first).  ``is_galois`` records whether the
    group order equals the extension degree.
    """

    ext: Extension
    elements: tuple[FieldAut, ...]
    table: tuple[tuple[int, ...], ...]
    identity_index: int
    is_galois: bool

    def __len__(self):
        return len(self.elements)

    def compose(self, i: int, j: int) -> int:
        return self.table[i][j]

    def inverse_index(self, i: int) -> int:
        for j in range(len(self.elements)):
            if self.table[i][j] == self.identity_index:
                return j
        raise NotClosed("group element without inverse")  # unreachable for verified groups

    def non_identity(self):
        return [i for i in range(len(self.elements)) if i != self.identity_index]


def _close_and_table(ext: Extension, auts: list[FieldAut]) -> GaloisGroup:
    images = [a.gen_image for a in auts]

    def index_of(img):
        for k, known in enumerate(images):
            if known == img:
                return k
        return None

    n = len(auts)
    table = []
    for i in range(n):
        row = []
        for j in range(n):
            img = apply_aut(auts[i], auts[j].gen_image)
            k = index_of(img)
            if k is None:
                raise NotClosed(
                    "composition leaves the supplied set of automorphisms",
                    missing_image=img,
                )
            row.append(k)
        table.append(tuple(row))
    identity = index_of(ext.generator())
    if identity is None:
        raise NotClosed("identity automorphism missing")
    # Closure under inverse and associativity, verified exhaustively.
    for i in range(n):
        if identity not in table[i]:
            raise NotClosed(f"element {i} has no inverse in the set")
    for i in range(n):
        for j in range(n):
            for k in range(n):
                if table[table[i][j]][k] != table[i][table[j][k]]:
                    raise NotClosed("composition table is not associative")
    return GaloisGroup(
        ext=ext,
        elements=tuple(auts),
        table=tuple(table),
        identity_index=identity,
        is_galois=(n == ext.degree),
    )


def automorphisms(ext: Extension, hints=None) -> GaloisGroup:
    """All automorphisms of ext over its base.

    Finite fields: exhaustive search for roots of the modulus (the
    automorphisms are exactly generator -> root).  Infinite base: the
    identity plus verified hints; the set must already be closed under
    composition.
    """
    if ext.base.order() is not None:
        roots = [e for e in ext.elements() if ext.modulus.evaluate(e).is_zero]
        gen = ext.generator()
        roots.sort(key=lambda e: (e != gen, ext.render(e.rep)))
        auts = [FieldAut(ext, r) for r in roots]
        return _close_and_table(ext, auts)
    auts = [FieldAut(ext, ext.generator())]
    for h in hints or []:
        a = field_aut(ext, h)
        if all(a.gen_image != b.gen_image for b in auts):
            auts.append(a)
    return _close_and_table(ext, auts)


def coerce_down(ext: Extension, group: GaloisGroup, x: FieldElem) -> FieldElem:
    """Return x as a base-field element, provided it is fixed by the group.

    Requires a verified Galois group; a fixed element of a Galois
    extension always has a constant representative, so NotConstant
    signals an internal inconsistency.
    """
    if not group.is_galois:
        raise ValueError("coerce_down requires a Galois group")
    x = ext.coerce(x)
    for i, g in enumerate(group.elements):
        if i == group.identity_index:
            continue
        if apply_aut(g, x) != x:
            raise NotFixed(f"element moved by {g!r}", aut=g)
    rep = x.rep
    for c in rep[1:]:
        if not c.is_zero:
            raise NotConstant("fixed element with non-constant representative")
    return rep[0]
