"""Bounded coverings, admissible squares, pullbacks, and the span
category of transfers.

A span (W, w, f) from X to Y has a bounded covering as its left leg
and a controlled, proper and bornological right leg.  Generalized
morphisms are isomorphism classes of spans; composition pulls the
middle cospan back to an admissible square.  Equality of classes is
decided by an explicit equivariant isomorphism search on apexes.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InternalCheckError, OutOfScopeError, ValidationError
from .groups import GSet, require_equivariant
from .spaces import (
    BornCoarseSpace,
    CoarseStructure,
    bounded_union,
    compose_maps,
    coproduct,
    empty_space,
    find_space_isomorphism,
    identity_map,
    induced_structure,
    map_predicates,
    partition_entourage,
)
from .tape import TapeMap, TapeSpace, tape_map_predicates, tape_projection_is_bounded_covering


# -- covering validation -----------------------------------------------------


def is_bounded_coarse_covering(w, W: BornCoarseSpace, Z: BornCoarseSpace):
    """Conditions: (1) the induced structure restricted along pi_0(W)
    equals the structure of W; (2) every coarse component of W maps
    isomorphically onto a coarse component of Z.  Returns (ok, diagnostic)."""
    require_equivariant(w, W.carrier, Z.carrier, "covering candidate")
    controlled, _, _ = map_predicates(w, W, Z)
    if not controlled:
        raise ValidationError("covering candidate is not controlled")

    comps = W.components()
    induced = induced_structure(w, W.carrier, Z)
    # intersecting two equivalence relations yields one; no closure needed
    restricted = induced.closure_entourage() & partition_entourage(comps)
    if restricted != W.coarse.closure_entourage():
        missing = W.coarse.closure_entourage() - restricted
        extra = restricted - W.coarse.closure_entourage()
        witness = next(iter(missing or extra))
        return False, f"condition 1 fails: restricted induced structure differs at pair {witness}"

    for comp in comps:
        images = [w[x] for x in comp]
        if len(set(images)) != len(images):
            dup = next(a for a in comp for b in comp if a < b and w[a] == w[b])
            return False, f"condition 2 fails: component {comp} not injective (witness point {dup})"
        target_block = {Z.coarse.block[v] for v in images}
        if len(target_block) != 1:
            return False, f"condition 2 fails: component {comp} maps into several components"
        tb = target_block.pop()
        target = sorted(v for v in range(Z.size) if Z.coarse.block[v] == tb)
        if sorted(images) != target:
            return False, f"condition 2 fails: component {comp} does not cover its target component"
    return True, "bounded coarse covering"


def is_bounded_covering(w, W, Z):
    """Bounded covering check; returns (ok, diagnostic).

    Finite carriers: conditions 1 and 2 via the coarse covering check;
    bornologicity is trivial and condition 3 is automatic (a bounded set
    meets finitely many components, which give the partition), so it is
    verified structurally and skipped.  Tape sources: the symbolic
    projection check against the preset bounded family.
    """
    if isinstance(W, TapeSpace):
        if not isinstance(w, TapeMap):
            raise ValidationError("map from a tape space must be a TapeMap")
        if isinstance(Z, TapeSpace):
            is_ident = (
                w.kind == "shift"
                and w.shift == 0
                and tuple(w.fiber_images) == tuple(range(W.fiber.size))
                and W.fiber == Z.fiber
                and W.coarse_preset == Z.coarse_preset
            )
            if is_ident:
                # identity of the underlying coarse space with a possibly
                # shrunk bornology: conditions 1 and 2 are immediate, the
                # trivial partition settles condition 3, so the verdict is
                # just bornologicity
                _c, _p, born = tape_map_predicates(w)
                if born:
                    return True, "identity covering (bornology shrunk or equal)"
                return False, "identity candidate is not bornological"
            raise OutOfScopeError("tape-to-tape covering checks support identities only")
        return tape_projection_is_bounded_covering(w)
    ok, diag = is_bounded_coarse_covering(w, W, Z)
    if not ok:
        return ok, diag
    return True, diag + "; bornological (full bornologies); condition 3 automatic on finite carriers"


# -- spans -------------------------------------------------------------------


@dataclass(frozen=True)
class Span:
    """A span (apex, left, right) from src to dst; left is a bounded
    covering, right is controlled, proper and bornological."""

    src: object
    apex: object
    dst: object
    left: object
    right: object

    def is_finite(self):
        return all(
            isinstance(s, BornCoarseSpace) for s in (self.src, self.apex, self.dst)
        )


def make_span(src, apex, dst, left, right, validate=True):
    if validate:
        ok, diag = is_bounded_covering(left, apex, src)
        if not ok:
            raise ValidationError(f"left leg is not a bounded covering: {diag}")
        if isinstance(apex, TapeSpace):
            if isinstance(right, TapeMap):
                c, p, b = tape_map_predicates(right)
            else:
                raise ValidationError("map from a tape apex must be a TapeMap")
            if not (c and p and b):
                raise ValidationError("right leg must be controlled, proper and bornological")
        else:
            c, p, b = map_predicates(right, apex, dst)
            if not (c and p and b):
                raise ValidationError("right leg must be controlled, proper and bornological")
    return Span(src, apex, dst, left, right)


def identity_span(X):
    if isinstance(X, TapeSpace):
        ident = TapeMap("shift", X, X, tuple(range(X.fiber.size)), 0)
        return Span(X, X, X, ident, ident)
    ident = identity_map(X)
    return Span(X, X, X, ident, ident)


def empty_morphism(X, Y):
    """The zero morphism: the span with empty apex."""
    E = empty_space(X.group)
    return Span(X, E, Y, (), ())


def embed(f, X, Y):
    """iota: a controlled proper map becomes the span (X^, id, f).

    On finite carriers the bornology replacement f^{-1}B is the full
    power set again, so the hat space is X itself.
    """
    if isinstance(X, TapeSpace) or isinstance(Y, TapeSpace):
        raise OutOfScopeError("embedding is implemented for finite carriers")
    controlled, proper, _ = map_predicates(f, X, Y)
    if not (controlled and proper):
        raise ValidationError("embed requires a controlled and proper map")
    return make_span(X, X, Y, identity_map(X), tuple(f))


def transfer(w, W, X):
    """tr_w = [W, w, id]: X -> W for a validated bounded covering w."""
    ok, diag = is_bounded_covering(w, W, X)
    if not ok:
        raise ValidationError(f"transfer requires a bounded covering: {diag}")
    if isinstance(W, TapeSpace):
        ident = TapeMap("shift", W, W, tuple(range(W.fiber.size)), 0)
        return Span(X, W, W, w, ident)
    return Span(X, W, W, tuple(w), identity_map(W))


def projection_map(I: GSet, X: BornCoarseSpace):
    """Point (i, x) of I_min,min ox X has index i*X.size + x; project to x."""
    return tuple(idx % X.size for idx in range(I.size * X.size))


def transfer_I(X: BornCoarseSpace, I: GSet):
    """tr_{X,I}: X -> I_min,min ox X."""
    W = bounded_union(I, X)
    return transfer(projection_map(I, X), W, X)


def inclusion_at(X: BornCoarseSpace, I: GSet, i):
    """j_i: X -> I_min,min ox X for a G-fixed index i."""
    if any(I.action[g][i] != i for g in I.group.elements()):
        raise ValidationError("component inclusion needs a G-fixed index")
    return tuple(i * X.size + x for x in range(X.size))


def component_inclusion(X, I, i):
    """The morphism j_i as a generalized morphism (an embedded span)."""
    W = bounded_union(I, X)
    return embed(inclusion_at(X, I, i), X, W)


def component_projection(X, I, i):
    """p_i = [X, j_i, id]: I_min,min ox X -> X."""
    W = bounded_union(I, X)
    return make_span(W, X, X, inclusion_at(X, I, i), identity_map(X))


def fold_morphism(X, I: GSet):
    """rho: I_min,min ox X -> X for trivially acted I, as an embedded span."""
    W = bounded_union(I, X)
    return embed(projection_map(I, X), W, X)


# -- admissible squares and pullback ----------------------------------------


@dataclass(frozen=True)
class AdmissibleSquareCandidate:
    """The square with corners W (top left), U (top right), V (bottom
    left), Z (bottom right): f: W->U, w: W->V, g: V->Z, u: U->Z."""

    W: BornCoarseSpace
    U: BornCoarseSpace
    V: BornCoarseSpace
    Z: BornCoarseSpace
    f: tuple  # W -> U
    w: tuple  # W -> V
    g: tuple  # V -> Z
    u: tuple  # U -> Z


def pullback(g, V: BornCoarseSpace, u, U: BornCoarseSpace, Z: BornCoarseSpace):
    """Complete the cospan V -g-> Z <-u- U (g proper and bornological,
    u a bounded covering) to an admissible square.

    Returns (W, w, f): the fiber-product carrier {(v, x) | g(v) = u(x)}
    with the structure generated by w^{-1}(A) cap f^{-1}(B) and the
    bornology f^{-1}B_U (the full power set here).
    """
    controlled, proper, born = map_predicates(g, V, Z)
    if not (controlled and proper and born):
        raise ValidationError("pullback: g must be controlled, proper and bornological")
    ok, diag = is_bounded_covering(u, U, Z)
    if not ok:
        raise ValidationError(f"pullback: u is not a bounded covering: {diag}")

    pts = [(v, x) for v in range(V.size) for x in range(U.size) if g[v] == u[x]]
    index = {p: k for k, p in enumerate(pts)}
    G = V.group
    action = tuple(
        tuple(index[(V.carrier.action[gg][v], U.carrier.action[gg][x])] for (v, x) in pts)
        for gg in G.elements()
    )
    carrier = GSet(G, len(pts), action)
    # intersection of two equivalence relations is one; no closure needed
    blocks = {}
    labels = []
    for (v, x) in pts:
        key = (V.coarse.block[v], U.coarse.block[x])
        if key not in blocks:
            blocks[key] = len(blocks)
        labels.append(blocks[key])
    W = BornCoarseSpace(carrier, CoarseStructure(len(pts), tuple(labels)), name="pullback")
    w = tuple(v for (v, x) in pts)
    f = tuple(x for (v, x) in pts)

    sq = AdmissibleSquareCandidate(W, U, V, Z, f, w, g, u)
    ok, diag = is_admissible(sq)
    if not ok:
        raise InternalCheckError(f"constructed pullback square is not admissible: {diag}")
    return W, w, f


def is_admissible(sq: AdmissibleSquareCandidate):
    """Check: the square commutes and is cartesian on underlying coarse
    spaces, g and f are proper and bornological, u is a bounded covering;
    cross-checks that the induced w is then a bounded covering."""
    W, U, V, Z = sq.W, sq.U, sq.V, sq.Z
    f, w, g, u = sq.f, sq.w, sq.g, sq.u
    require_equivariant(f, W.carrier, U.carrier, "square map f")
    require_equivariant(w, W.carrier, V.carrier, "square map w")
    require_equivariant(g, V.carrier, Z.carrier, "square map g")
    require_equivariant(u, U.carrier, Z.carrier, "square map u")

    for p in range(W.size):
        if g[w[p]] != u[f[p]]:
            return False, f"square does not commute at apex point {p}"

    cg, pg, bg = map_predicates(g, V, Z)
    if not (cg and pg and bg):
        return False, "g is not controlled+proper+bornological"
    cf, pf, bf = map_predicates(f, W, U)
    if not (cf and pf and bf):
        return False, "f is not controlled+proper+bornological"
    cw, _, _ = map_predicates(w, W, V)
    if not cw:
        return False, "w is not controlled"

    ok, diag = is_bounded_covering(u, U, Z)
    if not ok:
        return False, f"u is not a bounded covering: {diag}"

    # cartesian: the canonical comparison p -> (w(p), f(p)) must be an
    # isomorphism of G-coarse spaces onto the fiber product
    pts = [(v, x) for v in range(V.size) for x in range(U.size) if g[v] == u[x]]
    index = {p: k for k, p in enumerate(pts)}
    if len(pts) != W.size:
        return False, f"not cartesian: fiber product has {len(pts)} points, apex has {W.size}"
    comparison = []
    seen = set()
    for p in range(W.size):
        key = (w[p], f[p])
        if key not in index or key in seen:
            return False, f"not cartesian: comparison map fails at apex point {p}"
        seen.add(key)
        comparison.append(index[key])
    for a in range(W.size):
        for b in range(W.size):
            pa, pb = pts[comparison[a]], pts[comparison[b]]
            prod_related = V.coarse.related(pa[0], pb[0]) and U.coarse.related(pa[1], pb[1])
            if W.coarse.related(a, b) != prod_related:
                return False, f"not cartesian: structure mismatch at pair ({a},{b})"

    # in an admissible square the left edge is forced to be a bounded
    # covering; a failure here is a bug, not a property of the input
    ok, diag = is_bounded_covering(w, W, V)
    if not ok:
        raise InternalCheckError(f"admissible square with non-covering left edge: {diag}")
    return True, "admissible"


# -- composition and the hom monoid -----------------------------------------


def compose(s1: Span, s2: Span):
    """Composite of spans s1: X -> Y and s2: Y -> Z, via the pullback of
    the middle cospan; returns the canonical representative span."""
    if s1.dst != s2.src:
        raise ValidationError("span endpoints do not match")
    if not (s1.is_finite() and s2.is_finite()):
        raise OutOfScopeError("span composition is implemented for finite carriers")
    P, wp, fp = pullback(s1.right, s1.apex, s2.left, s2.apex, s1.dst)
    left = compose_maps(wp, s1.left)
    right = compose_maps(fp, s2.right)
    ok, diag = is_bounded_covering(left, P, s1.src)
    if not ok:
        raise InternalCheckError(f"composite left leg not a covering: {diag}")
    return make_span(s1.src, P, s2.dst, left, right, validate=True)


def hom_monoid_add(s1: Span, s2: Span):
    """Sum in the hom commutative monoid: apex disjoint union, legs
    componentwise; the unit is the empty span."""
    if s1.src != s2.src or s1.dst != s2.dst:
        raise ValidationError("span endpoints do not match")
    if not (s1.is_finite() and s2.is_finite()):
        raise OutOfScopeError("hom-monoid sums are implemented for finite carriers")
    apex, offsets = coproduct([s1.apex, s2.apex])
    left = tuple(list(s1.left) + list(s2.left))
    right = tuple(list(s1.right) + list(s2.right))
    return make_span(s1.src, apex, s1.dst, left, right, validate=True)


def spans_isomorphic(s1: Span, s2: Span):
    """Equality test of generalized morphisms: an equivariant structure
    preserving apex bijection commuting with both legs."""
    if s1.src != s2.src or s1.dst != s2.dst:
        raise ValidationError("span endpoints do not match")
    if isinstance(s1.apex, TapeSpace) or isinstance(s2.apex, TapeSpace):
        if not (isinstance(s1.apex, TapeSpace) and isinstance(s2.apex, TapeSpace)):
            return False
        a, b = s1.apex, s2.apex
        if (a.coarse_preset, a.born_preset) != (b.coarse_preset, b.born_preset):
            return False
        # preset-aware fiber comparison: fibers with commuting fiber legs
        la, ra = s1.left, s1.right
        lb, rb = s2.left, s2.right

        def fibleg(m):
            return tuple(m.fiber_images) if isinstance(m, TapeMap) else None

        def allowed(p, q):
            return fibleg(la)[p] == fibleg(lb)[q] and fibleg(ra)[p] == fibleg(rb)[q]

        return find_space_isomorphism(a.fiber, b.fiber, allowed) is not None

    def allowed(p, q):
        return s1.left[p] == s2.left[q] and s1.right[p] == s2.right[q]

    return find_space_isomorphism(s1.apex, s2.apex, allowed) is not None


@dataclass(frozen=True)
class HoMorphism:
    """An isomorphism class of spans, held by a canonical representative."""

    rep: Span

    @property
    def src(self):
        return self.rep.src

    @property
    def dst(self):
        return self.rep.dst

    def __eq__(self, other):
        return isinstance(other, HoMorphism) and spans_isomorphic(self.rep, other.rep)

    def __hash__(self):
        ap = self.rep.apex
        size = ap.fiber.size if isinstance(ap, TapeSpace) else ap.size
        return hash((id(type(self)), size))

    def then(self, other):
        return HoMorphism(compose(self.rep, other.rep))

    def __add__(self, other):
        return HoMorphism(hom_monoid_add(self.rep, other.rep))
