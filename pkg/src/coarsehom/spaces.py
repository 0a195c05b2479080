"""Entourage algebra and G-bornological coarse spaces over finite carriers.

A coarse structure on a finite carrier is an ideal of subsets of W x W
closed under subsets, unions, inverses and composition, containing the
diagonal; it is determined by its largest member, an equivalence
relation, stored here as a partition of the carrier.  Bornologies on
finite carriers are forced to the full power set (a bornology covers
the carrier and is closed under finite unions), so properness and
bornologicity are trivially true for maps between finite spaces; the
predicates still run uniformly.

Entourages are plain frozensets of index pairs; operations take the
carrier size explicitly so that mismatches are detectable.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ValidationError
from .groups import (
    GSet,
    product_gset,
    require_equivariant,
    trivial_gset,
)


def _check_pairs(U, size, what="entourage"):
    for a, b in U:
        if not (0 <= a < size and 0 <= b < size):
            raise ValidationError(f"{what}: pair ({a},{b}) outside carrier of size {size}")


def thicken(U, A, size):
    """U[A] = {w | exists a in A with (w, a) in U}."""
    _check_pairs(U, size)
    for a in A:
        if not (0 <= a < size):
            raise ValidationError("subset outside carrier")
    A = set(A)
    return frozenset(w for (w, a) in U if a in A)


def compose_entourages(U, V, size):
    """U o V = {(x, z) | exists y with (x, y) in U and (y, z) in V}."""
    _check_pairs(U, size)
    _check_pairs(V, size)
    by_mid = {}
    for (y, z) in V:
        by_mid.setdefault(y, []).append(z)
    out = set()
    for (x, y) in U:
        for z in by_mid.get(y, ()):
            out.add((x, z))
    return frozenset(out)


def invert_entourage(U, size):
    _check_pairs(U, size)
    return frozenset((b, a) for (a, b) in U)


def diagonal(size):
    return frozenset((x, x) for x in range(size))


def is_invariant_entourage(U, gset: GSet):
    act = gset.action
    return all((act[g][a], act[g][b]) in U for g in gset.group.elements() for (a, b) in U)


def _partition_from_relation(size, pairs):
    """Blocks of the equivalence closure of the reflexive-symmetric hull."""
    parent = list(range(size))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in pairs:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    labels = {}
    block = []
    for x in range(size):
        r = find(x)
        if r not in labels:
            labels[r] = len(labels)
        block.append(labels[r])
    return tuple(block)


@dataclass(frozen=True)
class CoarseStructure:
    """Generated coarse structure on a finite carrier.

    ``block[x]`` is the coarse component label of x; two structures are
    equal iff their closures (partitions) agree.
    """

    size: int
    block: tuple
    generators: tuple = ()

    def __eq__(self, other):
        return (
            isinstance(other, CoarseStructure)
            and self.size == other.size
            and self.block == other.block
        )

    def __hash__(self):
        return hash((self.size, self.block))

    def related(self, a, b):
        return self.block[a] == self.block[b]

    def closure_entourage(self):
        return frozenset(
            (a, b)
            for a in range(self.size)
            for b in range(self.size)
            if self.block[a] == self.block[b]
        )

    def contains(self, U):
        """Membership test: U is an entourage iff U lies inside the closure."""
        _check_pairs(U, self.size)
        return all(self.block[a] == self.block[b] for (a, b) in U)

    def components(self):
        """Blocks as sorted tuples, ordered by minimal point."""
        out = {}
        for x in range(self.size):
            out.setdefault(self.block[x], []).append(x)
        return [tuple(v) for _, v in sorted(out.items(), key=lambda kv: kv[1][0])]


def generate_structure(gens, gset: GSet):
    """Smallest coarse structure containing the given invariant entourages."""
    gens = tuple(frozenset(U) for U in gens)
    for U in gens:
        _check_pairs(U, gset.size)
        if not is_invariant_entourage(U, gset):
            raise ValidationError("generator is not G-invariant")
    pairs = set()
    for U in gens:
        pairs.update(U)
        pairs.update((b, a) for (a, b) in U)
    block = _partition_from_relation(gset.size, pairs)
    return CoarseStructure(gset.size, block, generators=gens)


@dataclass(frozen=True)
class BornCoarseSpace:
    """A finite G-bornological coarse space; the bornology is the full
    power set (forced, see module docstring)."""

    carrier: GSet
    coarse: CoarseStructure
    name: str = field(default="", compare=False)

    def __post_init__(self):
        if self.coarse.size != self.carrier.size:
            raise ValidationError("coarse structure size does not match carrier")
        # the closure must be G-invariant for the structure to be a
        # G-coarse structure; generators were checked at generation time
        act = self.carrier.action
        blk = self.coarse.block
        for g in self.carrier.group.elements():
            for x in range(self.carrier.size):
                for y in range(x + 1, self.carrier.size):
                    if (blk[x] == blk[y]) != (blk[act[g][x]] == blk[act[g][y]]):
                        raise ValidationError("coarse structure is not G-invariant")

    @property
    def group(self):
        return self.carrier.group

    @property
    def size(self):
        return self.carrier.size

    def is_finite(self):
        return True

    def components(self):
        return self.coarse.components()

    def __repr__(self):
        nm = self.name or "X"
        return f"Space({nm}, {self.size} pts, {len(self.components())} comps)"


def make_space(gset, generators=(), name=""):
    return BornCoarseSpace(gset, generate_structure(generators, gset), name=name)


def minimal_space(gset, name=""):
    return make_space(gset, (), name=name)


def maximal_space(gset, name=""):
    if gset.size == 0:
        return make_space(gset, (), name=name)
    full = frozenset((a, b) for a in range(gset.size) for b in range(gset.size))
    return make_space(gset, (full,), name=name)


def point_space(group):
    return minimal_space(trivial_gset(group, 1), name="pt")


def empty_space(group):
    return minimal_space(trivial_gset(group, 0), name="empty")


def space_with_entourage(X: BornCoarseSpace, U, name=""):
    """X_U: same carrier, structure generated by the single entourage U."""
    return make_space(X.carrier, (frozenset(U),), name=name or f"{X.name}_U")


def coarse_components(X: BornCoarseSpace):
    return X.components()


def components_gset(X: BornCoarseSpace):
    """pi_0(X) as a G-set together with the block label of each point."""
    comps = X.components()
    # block labels in component order
    label = [None] * X.size
    for i, comp in enumerate(comps):
        for x in comp:
            label[x] = i
    act = tuple(
        tuple(label[X.carrier.action[g][comp[0]]] for comp in comps)
        for g in X.group.elements()
    )
    return GSet(X.group, len(comps), act), tuple(label)


def coarse_closure(X: BornCoarseSpace, A):
    """[A]: union of the coarse components meeting A."""
    A = set(A)
    blocks = {X.coarse.block[a] for a in A}
    return frozenset(x for x in range(X.size) if X.coarse.block[x] in blocks)


def coarsely_disjoint(X, A, B):
    return not (coarse_closure(X, A) & coarse_closure(X, B))


def is_equivariant_partition(parts, gset: GSet):
    seen = set()
    for p in parts:
        if seen & set(p):
            return False
        seen.update(p)
    if seen != set(range(gset.size)):
        return False
    as_sets = {frozenset(p) for p in parts}
    return all(
        frozenset(gset.action[g][x] for x in p) in as_sets
        for g in gset.group.elements()
        for p in as_sets
    )


def partition_entourage(parts):
    out = set()
    for p in parts:
        out.update((a, b) for a in p for b in p)
    return frozenset(out)


def restrict_by_partition(X: BornCoarseSpace, parts):
    """The structure generated by the intersections of structure entourages
    with the block entourage of an equivariant partition."""
    if not is_equivariant_partition(parts, X.carrier):
        raise ValidationError("partition is not equivariant")
    upart = partition_entourage(parts)
    maxgen = X.coarse.closure_entourage() & upart
    return generate_structure((maxgen,), X.carrier)


def induced_structure(w, src_gset: GSet, target: BornCoarseSpace):
    """w^{-1} C: the maximal coarse structure on the source making w controlled."""
    require_equivariant(w, src_gset, target.carrier, "induced_structure map")
    pre = frozenset(
        (a, b)
        for a in range(src_gset.size)
        for b in range(src_gset.size)
        if target.coarse.related(w[a], w[b])
    )
    return generate_structure((pre,), src_gset)


def tensor(X: BornCoarseSpace, Y: BornCoarseSpace, name=""):
    """Product carrier; entourages generated by products of entourages.
    Point (x, y) has index x * Y.size + y."""
    if X.group != Y.group:
        raise ValidationError("tensor: group mismatch")
    gset = product_gset(X.carrier, Y.carrier)
    if gset.size == 0:
        return make_space(gset, (), name=name)
    gen = frozenset(
        (a * Y.size + c, b * Y.size + d)
        for (a, b) in X.coarse.closure_entourage()
        for (c, d) in Y.coarse.closure_entourage()
    )
    return make_space(gset, (gen,), name=name or f"({X.name})x({Y.name})")


def coproduct(parts, name=""):
    """Disjoint union with blockwise structure; returns (space, offsets)."""
    if not parts:
        raise ValidationError("coproduct of an empty list; pass the group's empty space")
    if any(p.group != parts[0].group for p in parts):
        raise ValidationError("coproduct: group mismatch")
    from .groups import disjoint_union_gsets

    gset, offsets = disjoint_union_gsets([p.carrier for p in parts])
    pairs = set()
    for p, off in zip(parts, offsets):
        pairs.update((a + off, b + off) for (a, b) in p.coarse.closure_entourage())
    block = _partition_from_relation(gset.size, pairs)
    return BornCoarseSpace(gset, CoarseStructure(gset.size, block), name=name), offsets


def min_space_of_gset(I: GSet, name=""):
    return minimal_space(I, name=name or "I_min,min")


def bounded_union(I: GSet, X: BornCoarseSpace, name=""):
    """The bounded union of I copies of X: I_min,min tensor X."""
    return tensor(min_space_of_gset(I), X, name=name or "bd_union")


def free_union_copies(I: GSet, X: BornCoarseSpace, name=""):
    """Free union of I copies of X; requires finite orbits (automatic here).

    The structure is generated by blockwise families (U_i); over a finite
    index set the closure coincides with the bounded union's closure.
    """
    return tensor(min_space_of_gset(I), X, name=name or "free_union")


def free_union_family(parts, name=""):
    """Free union of a finite family over a trivially-acted index set."""
    return coproduct(parts, name=name or "free_union")


def map_predicates(f, X: BornCoarseSpace, Y: BornCoarseSpace):
    """(controlled, proper, bornological) for a finite-carrier map."""
    require_equivariant(f, X.carrier, Y.carrier)
    controlled = all(
        Y.coarse.related(f[a], f[b])
        for a in range(X.size)
        for b in range(X.size)
        if X.coarse.related(a, b)
    )
    return controlled, True, True


def is_morphism(f, X, Y):
    controlled, proper, _ = map_predicates(f, X, Y)
    return controlled and proper


def identity_map(X):
    return tuple(range(X.size))


def compose_maps(f, g):
    """g after f."""
    return tuple(g[x] for x in f)


# -- isomorphism search ----------------------------------------------------


def find_space_isomorphism(X: BornCoarseSpace, Y: BornCoarseSpace, allowed=None):
    """Search for an equivariant bijection X -> Y preserving the coarse
    structure; ``allowed(p, q)`` can veto images pointwise (used by span
    isomorphism to pin down leg compatibility).  Returns the bijection
    as a tuple, or None.

    Complete backtracking over orbit representatives with invariant
    pruning; carriers in intended use have at most 64 points.
    """
    if X.group != Y.group or X.size != Y.size:
        return None
    G = X.group

    comps_x = X.components()
    comps_y = Y.components()
    if sorted(map(len, comps_x)) != sorted(map(len, comps_y)):
        return None

    def invariant(space, x):
        comp = len(space.components()[space.coarse.block[x]])
        orb = len(space.carrier.orbit(x))
        stab = len(space.carrier.stabilizer(x))
        return (comp, orb, stab)

    inv_y = {}
    for y in range(Y.size):
        inv_y.setdefault(invariant(Y, y), []).append(y)

    orbits = X.carrier.orbits()
    phi = [None] * X.size
    used = [False] * Y.size

    def assign_orbit(k):
        if k == len(orbits):
            return check_full()
        orb = orbits[k]
        rep = orb[0]
        stab_rep = X.carrier.stabilizer(rep)
        for q in inv_y.get(invariant(X, rep), []):
            if used[q]:
                continue
            if allowed is not None and not allowed(rep, q):
                continue
            if not stab_rep <= Y.carrier.stabilizer(q):
                continue
            images = {}
            ok = True
            for g in G.elements():
                p2 = X.carrier.act(g, rep)
                q2 = Y.carrier.act(g, q)
                if p2 in images and images[p2] != q2:
                    ok = False
                    break
                images[p2] = q2
            if not ok or len(set(images.values())) != len(orb):
                continue
            if any(used[v] for v in images.values()):
                continue
            if allowed is not None and any(
                not allowed(p, v) for p, v in images.items()
            ):
                continue
            for p, v in images.items():
                phi[p] = v
                used[v] = True
            res = assign_orbit(k + 1)
            if res is not None:
                return res
            for p, v in images.items():
                phi[p] = None
                used[v] = False
        return None

    def check_full():
        for a in range(X.size):
            for b in range(X.size):
                if X.coarse.related(a, b) != Y.coarse.related(phi[a], phi[b]):
                    return None
        return tuple(phi)

    return assign_orbit(0)


def spaces_isomorphic(X, Y):
    return find_space_isomorphism(X, Y) is not None
