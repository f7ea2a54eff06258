"""Finite posets as models of topological spaces.

Convention, fixed throughout the toolkit: open sets are UP-sets, the
minimal open neighbourhood of x is {y : y >= x}, and a point is closed
iff it is minimal.  Continuous maps between such spaces are exactly the
monotone maps.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import NotLocallyClosed, NotMonotone, NotPartialOrder, NotUpSet


@dataclass(frozen=True)
class FinPoset:
    """A finite poset on points 0..n-1.

    ``leq`` is the full reflexive-transitive relation; ``covers`` are
    the canonical covering pairs (x, y) with x covered by y, which
    generate the relation.
    """

    n: int
    leq: tuple[tuple[bool, ...], ...]
    covers: tuple[tuple[int, int], ...]

    def points(self):
        return range(self.n)

    def le(self, x: int, y: int) -> bool:
        return self.leq[x][y]

    def up_set(self, x: int) -> tuple[int, ...]:
        """The minimal open neighbourhood {y : y >= x}."""
        return tuple(y for y in range(self.n) if self.leq[x][y])

    def up_closure(self, points) -> tuple[int, ...]:
        pts = set(points)
        return tuple(sorted({y for x in pts for y in range(self.n) if self.leq[x][y]}))

    def down_closure(self, points) -> tuple[int, ...]:
        pts = set(points)
        return tuple(sorted({y for x in pts for y in range(self.n) if self.leq[y][x]}))

    def is_up_set(self, points) -> bool:
        pts = set(points)
        return all(y in pts for x in pts for y in range(self.n) if self.leq[x][y])

    def require_up_set(self, points):
        if not self.is_up_set(points):
            raise NotUpSet(f"{sorted(set(points))} is not an up-set")

    def is_locally_closed(self, points) -> bool:
        """True iff the subset is order-convex (an up-set meets a down-set)."""
        pts = set(points)
        for x in pts:
            for z in pts:
                if self.leq[x][z]:
                    for y in range(self.n):
                        if self.leq[x][y] and self.leq[y][z] and y not in pts:
                            return False
        return True

    def require_locally_closed(self, points):
        if not self.is_locally_closed(points):
            raise NotLocallyClosed(f"{sorted(set(points))} is not locally closed")

    def minimal_points(self) -> tuple[int, ...]:
        return tuple(
            x
            for x in range(self.n)
            if all(not self.leq[y][x] for y in range(self.n) if y != x)
        )

    def height(self, x: int) -> int:
        below = [y for y in range(self.n) if self.leq[y][x] and y != x]
        if not below:
            return 0
        return 1 + max(self.height(y) for y in below)

    def cover_paths(self, x: int, y: int):
        """All covering chains from x to y (each a list of cover pairs)."""
        if x == y:
            return [[]]
        out = []
        for (a, b) in self.covers:
            if a == x and self.leq[b][y]:
                for tail in self.cover_paths(b, y):
                    out.append([(a, b)] + tail)
        return out

    def all_up_sets(self):
        """Every up-set, smallest first; exponential, for small posets only."""
        out = []
        for mask in range(1 << self.n):
            pts = [x for x in range(self.n) if mask >> x & 1]
            if self.is_up_set(pts):
                out.append(tuple(pts))
        out.sort(key=lambda u: (len(u), u))
        return out

    def induced(self, points) -> tuple["FinPoset", dict]:
        """Subposet on the given points; returns it with old->new index map."""
        pts = sorted(set(points))
        index = {p: i for i, p in enumerate(pts)}
        leq = tuple(
            tuple(self.leq[a][b] for b in pts) for a in pts
        )
        return poset_from_leq(len(pts), lambda i, j: leq[i][j]), index


def poset_from_leq(n: int, le) -> FinPoset:
    """Build a poset from a membership predicate, validating the axioms."""
    leq = [[bool(le(x, y)) for y in range(n)] for x in range(n)]
    for x in range(n):
        if not leq[x][x]:
            raise NotPartialOrder(f"relation not reflexive at {x}")
    for x in range(n):
        for y in range(n):
            if leq[x][y] and leq[y][x] and x != y:
                raise NotPartialOrder(f"antisymmetry fails for {x},{y}")
            for z in range(n):
                if leq[x][y] and leq[y][z] and not leq[x][z]:
                    raise NotPartialOrder(f"transitivity fails for {x},{y},{z}")
    covers = []
    for x in range(n):
        for y in range(n):
            if x != y and leq[x][y]:
                if not any(
                    z != x and z != y and leq[x][z] and leq[z][y] for z in range(n)
                ):
                    covers.append((x, y))
    return FinPoset(n, tuple(tuple(r) for r in leq), tuple(sorted(covers)))


def poset_from_covers(n: int, pairs) -> FinPoset:
    """Build a poset from generating pairs via transitive closure."""
    reach = [[x == y for y in range(n)] for x in range(n)]
    for (a, b) in pairs:
        if not (0 <= a < n and 0 <= b < n):
            raise NotPartialOrder(f"pair ({a},{b}) out of range")
        reach[a][b] = True
    changed = True
    while changed:
        changed = False
        for x in range(n):
            for y in range(n):
                if reach[x][y]:
                    for z in range(n):
                        if reach[y][z] and not reach[x][z]:
                            reach[x][z] = True
                            changed = True
    return poset_from_leq(n, lambda x, y: reach[x][y])


def chain(n: int) -> FinPoset:
    return poset_from_covers(n, [(i, i + 1) for i in range(n - 1)])


def antichain(n: int) -> FinPoset:
    return poset_from_covers(n, [])


def point() -> FinPoset:
    return antichain(1)


@dataclass(frozen=True)
class MonotoneMap:
    """A continuous map between finite Alexandrov spaces."""

    source: FinPoset
    target: FinPoset
    image: tuple[int, ...]

    def __call__(self, x: int) -> int:
        return self.image[x]

    def preimage(self, points) -> tuple[int, ...]:
        pts = set(points)
        return tuple(x for x in range(self.source.n) if self.image[x] in pts)


def monotone_map(source: FinPoset, target: FinPoset, image) -> MonotoneMap:
    image = tuple(image)
    if len(image) != source.n:
        raise NotMonotone("image list has wrong length")
    for (x, y) in source.covers:
        if not target.le(image[x], image[y]):
            raise NotMonotone(f"map does not preserve {x} <= {y}")
    return MonotoneMap(source, target, image)


def identity_map(p: FinPoset) -> MonotoneMap:
    return MonotoneMap(p, p, tuple(range(p.n)))


def to_point_map(p: FinPoset) -> MonotoneMap:
    return MonotoneMap(p, point(), tuple(0 for _ in range(p.n)))
