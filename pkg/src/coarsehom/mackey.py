"""The effective Burnside category of a finite group, its realization
on coarse spaces via minimal structures, the Mackey functor attached to
the homology theory, Burnside marks, and the degree-wise assembly map
over a family of subgroups.

Morphisms of the effective Burnside category are spans of finite
G-sets composed by set-theoretic fiber product.  The functor M equips
a G-set with its minimal coarse and bornological structures; every
equivariant map of finite G-sets becomes a bounded covering, so a span
of G-sets can be read as a transfer span in either direction.  The
value functor is contravariant: a span (A <- W -> B) acts on homology
by the transfer along the right leg followed by the pushforward along
the left leg.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import InternalCheckError, ValidationError
from .groups import (
    GSet,
    OrbitCategory,
    SubgroupFamily,
    coset_gset,
    is_equivariant,
    orbit_category,
    subgroup_class_representatives,
    trivial_gset,
)
from .snf import AbHom, FPAbGroup
from .spaces import find_space_isomorphism, minimal_space
from .spans import make_span
from .homology import (
    SpaceComplex,
    homology_map_from_chain_cols,
    pullback_chain_cols,
    pushforward_chain_cols,
    scols_mul,
)


@dataclass(frozen=True)
class GFinSpan:
    """A span of finite G-sets from src to dst; equality of morphisms is
    the existence of an equivariant apex bijection commuting with legs."""

    src: GSet
    dst: GSet
    apex: GSet
    left: tuple  # apex -> src
    right: tuple  # apex -> dst

    def __post_init__(self):
        if not is_equivariant(self.left, self.apex, self.src):
            raise ValidationError("left leg is not equivariant")
        if not is_equivariant(self.right, self.apex, self.dst):
            raise ValidationError("right leg is not equivariant")


def identity_gfin_span(S: GSet):
    ident = tuple(range(S.size))
    return GFinSpan(S, S, S, ident, ident)


def compose_gfin_spans(s1: GFinSpan, s2: GFinSpan):
    """s2 after s1: apex the set-theoretic fiber product over the middle."""
    if s1.dst != s2.src:
        raise ValidationError("span endpoints do not match")
    pts = [
        (p, q)
        for p in range(s1.apex.size)
        for q in range(s2.apex.size)
        if s1.right[p] == s2.left[q]
    ]
    index = {pq: k for k, pq in enumerate(pts)}
    G = s1.apex.group
    action = tuple(
        tuple(index[(s1.apex.action[g][p], s2.apex.action[g][q])] for (p, q) in pts)
        for g in G.elements()
    )
    apex = GSet(G, len(pts), action)
    left = tuple(s1.left[p] for (p, q) in pts)
    right = tuple(s2.right[q] for (p, q) in pts)
    return GFinSpan(s1.src, s2.dst, apex, left, right)


def gfin_spans_equal(s1: GFinSpan, s2: GFinSpan):
    if s1.src != s2.src or s1.dst != s2.dst:
        raise ValidationError("span endpoints do not match")
    A = minimal_space(s1.apex)
    B = minimal_space(s2.apex)

    def allowed(p, q):
        return s1.left[p] == s2.left[q] and s1.right[p] == s2.right[q]

    return find_space_isomorphism(A, B, allowed) is not None


# -- generating spans --------------------------------------------------------


def transfer_span(group, H):
    """tr_H: G/G -> G/H (left leg the projection, right leg the identity)."""
    GH = coset_gset(group, H)
    GG = coset_gset(group, frozenset(group.elements()))
    proj = tuple(0 for _ in range(GH.size))
    ident = tuple(range(GH.size))
    return GFinSpan(GG, GH, GH, proj, ident)


def restriction_span(group, K):
    """res_K: G/K -> G/G (left leg the identity, right leg the projection)."""
    GK = coset_gset(group, K)
    GG = coset_gset(group, frozenset(group.elements()))
    proj = tuple(0 for _ in range(GK.size))
    ident = tuple(range(GK.size))
    return GFinSpan(GK, GG, GK, ident, proj)


def coset_projection(group, L, K):
    """The coset map G/L -> G/K for L <= K, on canonical coset indices."""
    L, K = frozenset(L), frozenset(K)
    if not L <= K:
        raise ValidationError("coset projection needs nested subgroups")

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

    cl = cosets(L)
    ck = cosets(K)
    index_k = {c: i for i, c in enumerate(ck)}
    return tuple(index_k[frozenset(group.mul(min(c), k) for k in K)] for c in cl)


def coset_translation(group, L, H, g):
    """The map G/L -> G/H, xL -> xgH (requires g^-1 L g <= H)."""
    L, H = frozenset(L), frozenset(H)
    gi = group.inv(g)
    if not all(group.mul(group.mul(gi, l), g) in H for l in L):
        raise ValidationError("translation is not well-defined on cosets")

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

    cl = cosets(L)
    ch = cosets(H)
    index_h = {c: i for i, c in enumerate(ch)}
    return tuple(
        index_h[frozenset(group.mul(group.mul(min(c), g), h) for h in H)] for c in cl
    )


# -- the functor M and the Mackey functor EM ---------------------------------


def M(S: GSet):
    """S with the minimal coarse and bornological structures."""
    return minimal_space(S, name="M(S)")


def M_span(s: GFinSpan):
    """The transfer span of coarse spaces realizing a Burnside morphism;
    both legs of a span of minimal spaces validate (the left is a bounded
    covering, the right is proper and bornological)."""
    return make_span(M(s.src), M(s.apex), M(s.dst), s.left, s.right, validate=True)


def EM_object(S: GSet, maxdeg=3):
    from .homology import homology

    return homology(M(S), maxdeg)


class EMContext:
    """Caches chain complexes and homology presentations of the minimal
    spaces appearing in one computation."""

    def __init__(self, maxdeg=2):
        self.maxdeg = maxdeg
        self._space = {}
        self._cx = {}

    def space_of(self, S: GSet):
        key = (S.group, S.size, S.action)
        if key not in self._space:
            self._space[key] = M(S)
        return self._space[key]

    def complex_of(self, S: GSet):
        key = (S.group, S.size, S.action)
        if key not in self._cx:
            self._cx[key] = SpaceComplex(self.space_of(S), self.maxdeg)
        return self._cx[key]

    def em_morphism(self, s: GFinSpan):
        """Per-degree maps EM(dst) -> EM(src): transfer along the right
        leg, then pushforward along the left leg."""
        cxA = self.complex_of(s.src)
        cxW = self.complex_of(s.apex)
        cxB = self.complex_of(s.dst)
        W = self.space_of(s.apex)
        A = self.space_of(s.src)
        B = self.space_of(s.dst)
        cols = []
        for n in range(self.maxdeg + 2):
            back = pullback_chain_cols(s.right, W, B, cxW, cxB, n)
            push = pushforward_chain_cols(s.left, W, A, cxW, cxA, n)
            cols.append(scols_mul(push, back))
        return homology_map_from_chain_cols(cols, cxB, cxA, self.maxdeg)


def EM_morphism(s: GFinSpan, maxdeg=2, ctx=None):
    ctx = ctx or EMContext(maxdeg)
    return ctx.em_morphism(s)


def hom_equal(h1: AbHom, h2: AbHom):
    if h1.src.ngens != h2.src.ngens or h1.dst.ngens != h2.dst.ngens:
        return False
    for gi in range(h1.src.ngens):
        e = [1 if i == gi else 0 for i in range(h1.src.ngens)]
        if h1.dst.reduce(h1.apply(e)) != h2.dst.reduce(h2.apply(e)):
            return False
    return True


def hom_sum(homs):
    first = homs[0]
    matrix = [[0] * first.src.ngens for _ in range(first.dst.ngens)]
    for h in homs:
        for i in range(len(matrix)):
            for j in range(len(matrix[0])):
                matrix[i][j] += h.matrix[i][j]
    return AbHom(first.src, first.dst, matrix)


def double_coset_check(group, H, K, maxdeg=2):
    """res_K o tr_H computed two ways: once through the composite span
    (fiber product), once as the sum over double cosets K g H of the
    one-step spans G/K <- G/(K cap gHg^-1) -> G/H."""
    H, K = frozenset(H), frozenset(K)
    ctx = EMContext(maxdeg)
    tr = transfer_span(group, H)
    res = restriction_span(group, K)
    composite = compose_gfin_spans(res, tr)  # G/K -> G/H
    lhs_direct = [
        b.compose(a)
        for a, b in zip(ctx.em_morphism(tr), ctx.em_morphism(res))
    ]
    lhs_span = ctx.em_morphism(composite)

    # enumerate double coset representatives K g H
    seen = set()
    reps = []
    for g in group.elements():
        coset = frozenset(
            group.mul(group.mul(k, g), h) for k in K for h in H
        )
        if coset not in seen:
            seen.add(coset)
            reps.append(g)
    terms = []
    for g in reps:
        gi = group.inv(g)
        L = frozenset(
            x for x in K if group.mul(group.mul(gi, x), g) in H
        )
        GL = coset_gset(group, L)
        left = coset_projection(group, L, K)
        right = coset_translation(group, L, H, g)
        span_g = GFinSpan(coset_gset(group, K), coset_gset(group, H), GL, left, right)
        terms.append(ctx.em_morphism(span_g))
    rhs = [hom_sum([t[n] for t in terms]) for n in range(maxdeg + 1)]

    for n in range(maxdeg + 1):
        if not hom_equal(lhs_span[n], rhs[n]):
            return False
        if not hom_equal(lhs_direct[n], lhs_span[n]):
            raise InternalCheckError("EM functoriality failed on the double-coset composite")
    return True


# -- Burnside marks ----------------------------------------------------------


def burnside_marks(S: GSet):
    """marks(S)[H] = |S^H| over conjugacy class representatives, in the
    canonical subgroup order."""
    reps = subgroup_class_representatives(S.group)
    return tuple(len(S.fixed_points(H)) for H in reps)


# -- classifying table and assembly ------------------------------------------


def classifying_table(group, family: SubgroupFamily):
    """For each orbit type G/H: 'point' iff H lies in the family (the
    value of the classifying object of the family on that orbit)."""
    out = []
    for H in subgroup_class_representatives(group):
        out.append(("G/" + subgroup_label(group, H), "point" if H in family else "empty"))
    return out


def subgroup_label(group, H):
    return "{" + ",".join(str(x) for x in sorted(H)) + "}"


@dataclass
class AssemblyResult:
    group_name: str
    family_name: str
    degree: int
    object_labels: list
    colimit: FPAbGroup
    target: FPAbGroup
    assembly: AbHom
    injective: bool
    split: bool
    label: str = field(default="empirical")

    def verdict_line(self):
        return (
            f"assembly[{self.group_name}, {self.family_name}, degree {self.degree}]: "
            f"colimit {self.colimit.describe()} -> {self.target.describe()}; "
            f"injective={self.injective} split={self.split} ({self.label})"
        )


def assembly(group, family: SubgroupFamily, degree=0, cat: OrbitCategory = None):
    """The degree-wise assembly map: the colimit of EM over the orbit
    category of the family, mapped to EM(pt).

    The colimit of the finite diagram of finitely generated abelian
    groups is presented as the direct sum of the object groups modulo
    one relation per non-identity morphism and object generator.  The
    split-injectivity verdict is a decision procedure on the presented
    groups and is reported as empirical; it is not a proof of the
    spectrum-level statement.
    """
    if cat is None:
        cat = orbit_category(group, family)
    ctx = EMContext(max(degree, 0))
    n = degree

    values = []
    for S in cat.objects:
        values.append(ctx.complex_of(S).homology_data(n))
    offsets = []
    total = 0
    for v in values:
        offsets.append(total)
        total += v.group.ngens

    relations = []
    for v, off in zip(values, offsets):
        for col in v.group.relations:
            big = [0] * total
            for i, x in enumerate(col):
                big[off + i] = x
            relations.append(big)

    # one relation per non-identity morphism and source generator
    for f in cat.all_morphisms():
        if f.src == f.dst and f.images == tuple(range(cat.objects[f.src].size)):
            continue
        hs = _diagram_map(ctx, cat, f, n)
        for gi in range(values[f.src].group.ngens):
            e = [1 if i == gi else 0 for i in range(values[f.src].group.ngens)]
            img = hs.apply(e)
            col = [0] * total
            col[offsets[f.src] + gi] += 1
            for i, x in enumerate(img):
                col[offsets[f.dst] + i] -= x
            relations.append(col)
    colim = FPAbGroup(total, relations)

    pt = trivial_gset(group, 1)
    target_data = ctx.complex_of(pt).homology_data(n)
    target = target_data.group
    matrix = [[0] * total for _ in range(target.ngens)]
    for obj_i, (v, off) in enumerate(zip(values, offsets)):
        to_pt = tuple(0 for _ in range(cat.objects[obj_i].size))
        h = _pushforward_hom(ctx, cat.objects[obj_i], pt, to_pt, n)
        for gi in range(v.group.ngens):
            e = [1 if i == gi else 0 for i in range(v.group.ngens)]
            img = h.apply(e)
            for i, x in enumerate(img):
                matrix[i][off + gi] = x
    alpha = AbHom(colim, target, matrix)
    injective = alpha.is_injective()
    split = injective and alpha.is_split_injective()
    labels = ["G/" + subgroup_label(group, H) for H in cat.subgroups]
    return AssemblyResult(
        group.name, family.name, degree, labels, colim, target, alpha, injective, split
    )


def _pushforward_hom(ctx: EMContext, S: GSet, T: GSet, f, n):
    """E(f) = f_* on homology for a map of G-sets (an embedded morphism)."""
    cxS = ctx.complex_of(S)
    cxT = ctx.complex_of(T)
    cols = [
        pushforward_chain_cols(f, ctx.space_of(S), ctx.space_of(T), cxS, cxT, d)
        for d in range(n + 2)
    ]
    return homology_map_from_chain_cols(cols, cxS, cxT, n)[n]


def _diagram_map(ctx, cat, f, n):
    return _pushforward_hom(ctx, cat.objects[f.src], cat.objects[f.dst], f.images, n)
