"""Finite groups by multiplication table, finite G-sets, subgroup
lattices with conjugacy data, separating families, and orbit categories.

Everything is index-based: group elements are 0..order-1, G-set points
are 0..size-1.  All values are immutable after construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from .errors import ValidationError

Subgroup = frozenset


@dataclass(frozen=True)
class Group:
    """A finite group given by a total multiplication table.

    ``table[a][b]`` is the product a*b.  The identity index and the
    inverse table are derived and checked on construction.
    """

    table: tuple
    name: str = "G"

    def __post_init__(self):
        n = len(self.table)
        if n == 0:
            raise ValidationError("group must be nonempty")
        for row in self.table:
            if len(row) != n or any(not (0 <= x < n) for x in row):
                raise ValidationError("multiplication table is not square over 0..n-1")
        ident = None
        for e in range(n):
            if all(self.table[e][x] == x and self.table[x][e] == x for x in range(n)):
                ident = e
                break
        if ident is None:
            raise ValidationError("no two-sided identity")
        object.__setattr__(self, "_identity", ident)
        inv = [None] * n
        for a in range(n):
            for b in range(n):
                if self.table[a][b] == ident and self.table[b][a] == ident:
                    inv[a] = b
                    break
            if inv[a] is None:
                raise ValidationError(f"element {a} has no inverse")
        object.__setattr__(self, "_inv", tuple(inv))
        for a in range(n):
            for b in range(n):
                for c in range(n):
                    if self.table[self.table[a][b]][c] != self.table[a][self.table[b][c]]:
                        raise ValidationError(f"associativity fails at ({a},{b},{c})")

    @property
    def order(self):
        return len(self.table)

    @property
    def identity(self):
        return self._identity

    def mul(self, a, b):
        return self.table[a][b]

    def inv(self, a):
        return self._inv[a]

    def conj(self, g, a):
        """g * a * g^-1."""
        return self.table[self.table[g][a]][self._inv[g]]

    def elements(self):
        return range(self.order)

    def __len__(self):
        return self.order

    def __repr__(self):
        return f"Group({self.name}, order={self.order})"

    def __eq__(self, other):
        return isinstance(other, Group) and self.table == other.table

    def __hash__(self):
        return hash(self.table)


def _mulclose(gens):
    """Close a set of permutation tuples under composition."""
    if not gens:
        return []
    n = len(gens[0])
    ident = tuple(range(n))
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for p in frontier:
            for q in gens:
                r = tuple(p[q[i]] for i in range(n))
                if r not in seen:
                    seen.add(r)
                    nxt.append(r)
        frontier = nxt
    return sorted(seen)


def group_from_permutations(gens, name="G"):
    """Group generated by permutation tuples, elements sorted lexicographically
    with the identity first."""
    perms = _mulclose([tuple(g) for g in gens])
    n = len(perms[0])
    ident = tuple(range(n))
    perms.sort(key=lambda p: (p != ident, p))
    index = {p: i for i, p in enumerate(perms)}
    table = tuple(
        tuple(index[tuple(p[q[i]] for i in range(n))] for q in perms) for p in perms
    )
    return Group(table, name=name)


def trivial_group():
    return Group(((0,),), name="1")


def cyclic_group(n):
    table = tuple(tuple((a + b) % n for b in range(n)) for a in range(n))
    return Group(table, name=f"C{n}")


def klein_four_group():
    table = tuple(tuple(a ^ b for b in range(4)) for a in range(4))
    return Group(table, name="V4")


def dihedral_group(n):
    rot = tuple((i + 1) % n for i in range(n))
    refl = tuple((-i) % n for i in range(n))
    return group_from_permutations([rot, refl], name=f"D{n}")


def symmetric_group(n):
    gens = []
    for i in range(n - 1):
        p = list(range(n))
        p[i], p[i + 1] = p[i + 1], p[i]
        gens.append(tuple(p))
    return group_from_permutations(gens or [(0,)], name=f"S{n}")


def alternating_group(n):
    gens = []
    for i in range(n - 2):
        p = list(range(n))
        p[i], p[i + 1], p[i + 2] = p[i + 1], p[i + 2], p[i]
        gens.append(tuple(p))
    return group_from_permutations(gens or [(0,)], name=f"A{n}")


GROUP_PRESETS = {
    "trivial": trivial_group,
    "C2": lambda: cyclic_group(2),
    "C3": lambda: cyclic_group(3),
    "C4": lambda: cyclic_group(4),
    "C5": lambda: cyclic_group(5),
    "C6": lambda: cyclic_group(6),
    "V4": klein_four_group,
    "S3": lambda: symmetric_group(3),
    "S4": lambda: symmetric_group(4),
    "D4": lambda: dihedral_group(4),
    "A4": lambda: alternating_group(4),
    "A5": lambda: alternating_group(5),
}


@dataclass(frozen=True)
class GSet:
    """A finite set with a left action of a finite group.

    ``action[g][x]`` is g.x.  Validated to be a genuine action.
    """

    group: Group
    size: int
    action: tuple

    def __post_init__(self):
        G = self.group
        if len(self.action) != G.order:
            raise ValidationError("action table must have one row per group element")
        for row in self.action:
            if len(row) != self.size or any(not (0 <= x < self.size) for x in row):
                raise ValidationError("action row out of range")
        e = G.identity
        if self.action[e] != tuple(range(self.size)):
            raise ValidationError("identity does not act trivially")
        for g in G.elements():
            for h in G.elements():
                gh = G.mul(g, h)
                for x in range(self.size):
                    if self.action[g][self.action[h][x]] != self.action[gh][x]:
                        raise ValidationError("action is not associative")

    def act(self, g, x):
        return self.action[g][x]

    def points(self):
        return range(self.size)

    def orbit(self, x):
        return frozenset(self.action[g][x] for g in self.group.elements())

    def orbits(self):
        """G-orbits as sorted tuples, ordered by minimal point."""
        seen = set()
        out = []
        for x in range(self.size):
            if x in seen:
                continue
            orb = sorted(self.orbit(x))
            seen.update(orb)
            out.append(tuple(orb))
        return out

    def stabilizer(self, x):
        return frozenset(g for g in self.group.elements() if self.action[g][x] == x)

    def fixed_points(self, H):
        return [x for x in range(self.size) if all(self.action[g][x] == x for g in H)]

    def __repr__(self):
        return f"GSet(|{self.group.name}|={self.group.order}, size={self.size})"


def trivial_gset(group, size):
    action = tuple(tuple(range(size)) for _ in group.elements())
    return GSet(group, size, action)


def coset_gset(group, H):
    """The transitive G-set G/H, cosets ordered by minimal element."""
    H = frozenset(H)
    if not is_subgroup(group, H):
        raise ValidationError("coset space requires a subgroup")
    cosets = []
    seen = set()
    for x in group.elements():
        if x in seen:
            continue
        cs = frozenset(group.mul(x, h) for h in H)
        seen.update(cs)
        cosets.append(cs)
    cosets.sort(key=min)
    index = {cs: i for i, cs in enumerate(cosets)}
    action = tuple(
        tuple(index[frozenset(group.mul(g, y) for y in cs)] for cs in cosets)
        for g in group.elements()
    )
    return GSet(group, len(cosets), action)


def disjoint_union_gsets(parts):
    if not parts:
        raise ValidationError("need at least one part")
    G = parts[0].group
    if any(p.group != G for p in parts):
        raise ValidationError("group mismatch in disjoint union")
    offsets = []
    total = 0
    for p in parts:
        offsets.append(total)
        total += p.size
    action = []
    for g in G.elements():
        row = []
        for p, off in zip(parts, offsets):
            row.extend(off + y for y in p.action[g])
        action.append(tuple(row))
    return GSet(G, total, tuple(action)), offsets


def product_gset(a, b):
    """Cartesian product with diagonal action; point (x, y) has index x*b.size + y."""
    if a.group != b.group:
        raise ValidationError("group mismatch in product")
    G = a.group
    action = tuple(
        tuple(
            a.action[g][x] * b.size + b.action[g][y]
            for x in range(a.size)
            for y in range(b.size)
        )
        for g in G.elements()
    )
    return GSet(G, a.size * b.size, action)


def is_equivariant(f, src: GSet, dst: GSet):
    if len(f) != src.size:
        return False
    G = src.group
    return all(
        dst.action[g][f[x]] == f[src.action[g][x]]
        for g in G.elements()
        for x in range(src.size)
    )


def require_equivariant(f, src, dst, what="map"):
    if src.group != dst.group:
        raise ValidationError(f"{what}: group mismatch")
    if not is_equivariant(f, src, dst):
        raise ValidationError(f"{what} is not equivariant")


# -- subgroup lattice ------------------------------------------------------


def _closure(group, seed):
    """Subgroup generated by a set of elements."""
    cur = {group.identity}
    frontier = list(set(seed) | cur)
    cur.update(frontier)
    while frontier:
        nxt = []
        for a in frontier:
            for b in list(cur):
                for c in (group.mul(a, b), group.mul(b, a)):
                    if c not in cur:
                        cur.add(c)
                        nxt.append(c)
            inv = group.inv(a)
            if inv not in cur:
                cur.add(inv)
                nxt.append(inv)
        frontier = nxt
    return frozenset(cur)


def subgroup_key(H):
    return (len(H), tuple(sorted(H)))


@lru_cache(maxsize=None)
def all_subgroups(group):
    """Every subgroup, sorted by order then element list.

    Enumeration: close each single element to a cyclic subgroup, then
    repeatedly extend known subgroups by cyclic ones until stable.
    Adequate up to |G| = 60.
    """
    cyclics = {_closure(group, [g]) for g in group.elements()}
    found = set(cyclics)
    found.add(frozenset([group.identity]))
    frontier = set(found)
    while frontier:
        nxt = set()
        for H in frontier:
            for C in cyclics:
                if C <= H:
                    continue
                K = _closure(group, H | C)
                if K not in found:
                    found.add(K)
                    nxt.add(K)
        frontier = nxt
    return tuple(sorted(found, key=subgroup_key))


def conjugate_subgroup(group, g, H):
    return frozenset(group.conj(g, h) for h in H)


@lru_cache(maxsize=None)
def conjugacy_classes_of_subgroups(group):
    """Classes as tuples of subgroups; each class sorted, classes sorted by
    their representative (smallest member under subgroup_key)."""
    remaining = set(all_subgroups(group))
    classes = []
    while remaining:
        H = min(remaining, key=subgroup_key)
        cls = {conjugate_subgroup(group, g, H) for g in group.elements()}
        remaining -= cls
        classes.append(tuple(sorted(cls, key=subgroup_key)))
    classes.sort(key=lambda cls: subgroup_key(cls[0]))
    return tuple(classes)


def subgroup_class_representatives(group):
    return [cls[0] for cls in conjugacy_classes_of_subgroups(group)]


def is_subgroup(group, H):
    H = frozenset(H)
    if group.identity not in H:
        return False
    return all(group.mul(a, b) in H and group.inv(a) in H for a in H for b in H)


def is_normal_in(group, H, K):
    """H normal in K (both subgroups of group, H <= K assumed)."""
    return all(conjugate_subgroup(group, k, H) == H for k in K)


def commutator_subgroup(group, H):
    comms = [
        group.mul(group.mul(a, b), group.inv(group.mul(b, a))) for a in H for b in H
    ]
    return _closure(group, comms)


def is_solvable_subgroup(group, H):
    cur = frozenset(H)
    while len(cur) > 1:
        nxt = commutator_subgroup(group, cur)
        if nxt == cur:
            return False
        cur = nxt
    return True


@dataclass(frozen=True)
class SubgroupFamily:
    """A set of subgroups closed under conjugation and under subgroups."""

    group: Group
    members: frozenset
    name: str = "F"

    def __post_init__(self):
        for H in self.members:
            if not is_subgroup(self.group, H):
                raise ValidationError("family member is not a subgroup")
        if not self.members:
            raise ValidationError("a family must be nonempty")
        for H in self.members:
            for g in self.group.elements():
                if conjugate_subgroup(self.group, g, H) not in self.members:
                    raise ValidationError("family not closed under conjugation")
        for H in self.members:
            for K in all_subgroups(self.group):
                if K <= H and K not in self.members:
                    raise ValidationError("family not closed under subgroups")

    def __contains__(self, H):
        return frozenset(H) in self.members

    def class_representatives(self):
        return [
            cls[0]
            for cls in conjugacy_classes_of_subgroups(self.group)
            if cls[0] in self.members
        ]


def family_all(group):
    return SubgroupFamily(group, frozenset(all_subgroups(group)), name="all")


def family_trivial(group):
    return SubgroupFamily(group, frozenset([frozenset([group.identity])]), name="triv")


def family_solvable(group):
    members = frozenset(
        H for H in all_subgroups(group) if is_solvable_subgroup(group, H)
    )
    return SubgroupFamily(group, members, name="sol")


def family_generated_by(group, seeds, name="F"):
    """Smallest family containing the given subgroups."""
    members = set()
    for H in seeds:
        H = frozenset(H)
        if not is_subgroup(group, H):
            raise ValidationError("seed is not a subgroup")
        for g in group.elements():
            C = conjugate_subgroup(group, g, H)
            for K in all_subgroups(group):
                if K <= C:
                    members.add(K)
    return SubgroupFamily(group, frozenset(members), name=name)


def is_separating(group, family: SubgroupFamily):
    """True iff for every H normal in K with K/H of prime order,
    H and K lie on the same side of the family."""
    if family.group != group:
        raise ValidationError("family belongs to a different group")
    subs = all_subgroups(group)
    primes = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59}
    for K in subs:
        for H in subs:
            if not (H < K):
                continue
            if len(K) // len(H) not in primes or len(K) % len(H) != 0:
                continue
            if not is_normal_in(group, H, K):
                continue
            if (H in family.members) != (K in family.members):
                return False
    return True


# -- orbit category --------------------------------------------------------


@dataclass(frozen=True)
class OrbitMorphism:
    """An equivariant map G/H -> G/K, stored by images of coset indices."""

    src: int
    dst: int
    images: tuple


@dataclass(frozen=True)
class OrbitCategory:
    """The full subcategory of transitive G-sets with stabilizers in a family.

    Objects are G/H for conjugacy class representatives H; hom-sets are
    complete lists of equivariant maps.
    """

    group: Group
    subgroups: tuple
    objects: tuple  # GSet per object
    homs: dict = field(compare=False)  # (i, j) -> tuple of OrbitMorphism

    def hom(self, i, j):
        return self.homs[(i, j)]

    def identity(self, i):
        return OrbitMorphism(i, i, tuple(range(self.objects[i].size)))

    def compose(self, f: OrbitMorphism, g: OrbitMorphism):
        """g after f."""
        if f.dst != g.src:
            raise ValidationError("morphisms are not composable")
        return OrbitMorphism(f.src, g.dst, tuple(g.images[x] for x in f.images))

    def all_morphisms(self):
        n = len(self.objects)
        for i in range(n):
            for j in range(n):
                yield from self.homs[(i, j)]


def orbit_category(group, family="all"):
    if family == "all":
        family = family_all(group)
    reps = family.class_representatives()
    objects = tuple(coset_gset(group, H) for H in reps)
    homs = {}
    for i, H in enumerate(reps):
        for j, K in enumerate(reps):
            maps = set()
            for g in group.elements():
                gi = group.inv(g)
                if all(group.conj(gi, h) in K for h in H):
                    # xH -> xgK, realized on coset indices
                    maps.add(_coset_map(group, H, K, g, objects[i], objects[j]))
            homs[(i, j)] = tuple(
                OrbitMorphism(i, j, m) for m in sorted(maps)
            )
    return OrbitCategory(group, tuple(reps), objects, homs)


def _coset_map(group, H, K, g, src: GSet, dst: GSet):
    """Images of the map xH -> xgK on coset indices."""
    # rebuild coset lists in the same canonical order as coset_gset
    def cosets(S):
        out, seen = [], set()
        for x in group.elements():
            if x in seen:
                continue
            cs = frozenset(group.mul(x, s) for s in S)
            seen.update(cs)
            out.append(cs)
        out.sort(key=min)
        return out

    cs_h = cosets(H)
    cs_k = cosets(K)
    index_k = {c: i for i, c in enumerate(cs_k)}
    images = []
    for c in cs_h:
        x = min(c)
        img = frozenset(group.mul(group.mul(x, g), k) for k in K)
        images.append(index_k[img])
    return tuple(images)
