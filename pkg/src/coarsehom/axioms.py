"""Axiom checkers for the homology theory: excision for equivariant
complementary pairs, coarse invariance, u-continuity, additivity for
coproducts, weak transfers, and strong additivity for free unions.

A complementary pair here is the operational form imported with the
homology axioms: an increasing equivariant family (Y_i) of invariant
subsets together with an invariant subset Z such that Z cup Y_i = X
for some i.  Flasqueness is witness-based and lives in the tape module
(finite nonempty spaces are never flasque).
"""

from __future__ import annotations

from .errors import InternalCheckError, ValidationError
from .groups import GSet
from .snf import AbHom, FPAbGroup
from .spaces import (
    BornCoarseSpace,
    CoarseStructure,
    bounded_union,
    coproduct,
    free_union_family,
    make_space,
    maximal_space,
    tensor,
    trivial_gset,
)
from .spans import projection_map
from .homology import (
    SpaceComplex,
    chain_map_commutes,
    homology_map_from_chain_cols,
    hom_is_identity,
    orbit_rep_of_tuple,
    pullback_chain_cols,
    pushforward_chain_cols,
    scols_mul,
)


def is_invariant_subset(X: BornCoarseSpace, A):
    A = set(A)
    return all(X.carrier.act(g, a) in A for g in X.group.elements() for a in A)


def subspace(X: BornCoarseSpace, A):
    """The invariant subset A with the induced structure; returns the
    space and the inclusion point map (subspace index -> X index)."""
    if not is_invariant_subset(X, A):
        raise ValidationError("subset is not G-invariant")
    pts = sorted(A)
    pos = {p: k for k, p in enumerate(pts)}
    action = tuple(
        tuple(pos[X.carrier.act(g, p)] for p in pts) for g in X.group.elements()
    )
    carrier = GSet(X.group, len(pts), action)
    labels = {}
    block = []
    for p in pts:
        lbl = X.coarse.block[p]
        if lbl not in labels:
            labels[lbl] = len(labels)
        block.append(labels[lbl])
    sub = BornCoarseSpace(carrier, CoarseStructure(len(pts), tuple(block)), name=f"{X.name}|A")
    return sub, tuple(pts)


def validate_complementary_pair(X, Z, Ys):
    """Z invariant, (Y_i) an equivariant big family, and Z cup Y_i = X
    for some member.

    A big family is increasing and absorbs thickenings: for every member
    and every structure entourage U there is a member containing the
    U-thickening; over a finite carrier this says the coarse closure of
    each member lies in a later member (so the top member is coarsely
    closed)."""
    from .spaces import coarse_closure

    if not is_invariant_subset(X, Z):
        raise ValidationError("Z is not invariant")
    prev = set()
    for Y in Ys:
        Y = set(Y)
        if not is_invariant_subset(X, Y):
            raise ValidationError("a family member is not invariant")
        if not prev <= Y:
            raise ValidationError("the family is not increasing")
        prev = Y
    if not Ys:
        raise ValidationError("the family is empty")
    top = set(Ys[-1])
    for Y in Ys:
        if not set(coarse_closure(X, Y)) <= top:
            raise ValidationError("the family does not absorb thickenings (not a big family)")
    if not any(set(Z) | set(Y) == set(range(X.size)) for Y in Ys):
        raise ValidationError("Z and the family never cover X: not a complementary pair")


def check_excision(X: BornCoarseSpace, Z, Ys, maxdeg=2):
    """The inclusion (Z, Z cap Y) -> (X, Y) induces an isomorphism of
    relative homology; Y is the stabilized member of the big family."""
    validate_complementary_pair(X, Z, Ys)
    Ymax = set(Ys[-1])
    Zset = set(Z)

    rel_x = SpaceComplex(X, maxdeg, exclude=lambda t: all(p in Ymax for p in t))
    Zspace, incl = subspace(X, Zset)
    zy = {k for k, p in enumerate(incl) if p in Ymax}
    rel_z = SpaceComplex(Zspace, maxdeg, exclude=lambda t: all(p in zy for p in t))

    cols_by_deg = []
    for n in range(maxdeg + 2):
        cols = []
        for rep in rel_z.bases[n]:
            img = orbit_rep_of_tuple(X, tuple(incl[p] for p in rep))
            j = rel_x.index[n].get(img)
            if j is None:
                raise InternalCheckError("relative basis image escaped the relative complex")
            cols.append({j: 1})
        cols_by_deg.append(cols)
    if not chain_map_commutes(cols_by_deg, rel_z, rel_x, maxdeg + 1):
        raise InternalCheckError("relative inclusion does not commute with the differential")
    homs = homology_map_from_chain_cols(cols_by_deg, rel_z, rel_x, maxdeg)
    verdicts = [h.is_isomorphism() for h in homs]
    return all(verdicts), verdicts


def two_point_max_space(group):
    return maximal_space(trivial_gset(group, 2), name="{0,1}_max,max")


def check_coarse_invariance(X: BornCoarseSpace, maxdeg=2):
    """The projection {0,1}_max,max ox X -> X induces an isomorphism."""
    D = two_point_max_space(X.group)
    Y = tensor(D, X)
    proj = tuple(idx % X.size for idx in range(Y.size))
    cxY = SpaceComplex(Y, maxdeg)
    cxX = SpaceComplex(X, maxdeg)
    cols = [
        pushforward_chain_cols(proj, Y, X, cxY, cxX, n) for n in range(maxdeg + 2)
    ]
    if not chain_map_commutes(cols, cxY, cxX, maxdeg + 1):
        raise InternalCheckError("projection chain map does not commute with the differential")
    homs = homology_map_from_chain_cols(cols, cxY, cxX, maxdeg)
    verdicts = [h.is_isomorphism() for h in homs]
    return all(verdicts), verdicts


def check_u_continuity(X: BornCoarseSpace, maxdeg=2):
    """H(X) is the direct limit of H(X_U) over the invariant entourage
    filtration, computed as stabilization of the generator filtration.
    Returns (ok, stabilization index)."""
    gens = list(X.coarse.generators) or [X.coarse.closure_entourage()]
    stages = []
    for k in range(len(gens) + 1):
        stages.append(make_space(X.carrier, gens[:k], name=f"{X.name}_U{k}"))
    if stages[-1].coarse != X.coarse:
        raise InternalCheckError("generator filtration does not reach the structure")
    cxX = SpaceComplex(X, maxdeg)
    iso_from = None
    for k, Xk in enumerate(stages):
        cxK = SpaceComplex(Xk, maxdeg)
        ident = tuple(range(X.size))
        cols = [
            pushforward_chain_cols(ident, Xk, X, cxK, cxX, n) for n in range(maxdeg + 2)
        ]
        homs = homology_map_from_chain_cols(cols, cxK, cxX, maxdeg)
        if all(h.is_isomorphism() for h in homs):
            if iso_from is None:
                iso_from = k
        else:
            iso_from = None
    ok = iso_from is not None
    return ok, iso_from


def check_weak_transfers(X: BornCoarseSpace, I: GSet, maxdeg=2):
    """p^ex_j o tr_I = id for every fixed j: the free-union transfer at
    chain level followed by the excision projection onto a component.

    I must be finite with trivial action; for finite index sets the free
    union carries the bounded union's structure.
    """
    if any(I.action[g] != tuple(range(I.size)) for g in I.group.elements()):
        raise ValidationError("weak transfers are stated for trivially acted index sets")
    if I.size == 0:
        raise ValidationError("the index set must be nonempty")
    W = bounded_union(I, X)
    cxX = SpaceComplex(X, maxdeg)
    cxW = SpaceComplex(W, maxdeg)
    tr_cols = [
        pullback_chain_cols(projection_map(I, X), W, X, cxW, cxX, n)
        for n in range(maxdeg + 2)
    ]
    for j in range(I.size):
        proj_cols = []
        for n in range(maxdeg + 2):
            cols = []
            for rep in cxW.bases[n]:
                if all(p // X.size == j for p in rep):
                    xrep = tuple(p % X.size for p in rep)
                    cols.append({cxX.index[n][xrep]: 1})
                else:
                    cols.append({})
            proj_cols.append(cols)
        comp = [scols_mul(proj_cols[n], tr_cols[n]) for n in range(maxdeg + 2)]
        homs = homology_map_from_chain_cols(comp, cxX, cxX, maxdeg)
        if not all(hom_is_identity(h) for h in homs):
            return False
    return True


def _fp_direct_sum(groups):
    ngens = sum(g.ngens for g in groups)
    relations = []
    off = 0
    for g in groups:
        for col in g.relations:
            big = [0] * ngens
            for i, v in enumerate(col):
                big[off + i] = v
            relations.append(big)
        off += g.ngens
    return FPAbGroup(ngens, relations)


def check_additivity(parts, maxdeg=2):
    """The inclusions induce an isomorphism from the direct sum of the
    parts' homology onto the homology of the coproduct."""
    X, offsets = coproduct(parts)
    cxX = SpaceComplex(X, maxdeg)
    cxs = [SpaceComplex(p, maxdeg) for p in parts]
    for n in range(maxdeg + 1):
        hX = cxX.homology_data(n)
        hparts = [cx.homology_data(n) for cx in cxs]
        src = _fp_direct_sum([h.group for h in hparts])
        matrix = [[0] * src.ngens for _ in range(hX.group.ngens)]
        col = 0
        for p, off, cx, hp in zip(parts, offsets, cxs, hparts):
            incl = tuple(off + x for x in range(p.size))
            cols = pushforward_chain_cols(incl, p, X, cx, cxX, n)
            for cycle in hp.gen_cycles:
                img = [0] * len(cxX.bases[n])
                for j, c in enumerate(cols):
                    if cycle[j]:
                        for i, v in c.items():
                            img[i] += cycle[j] * v
                for i, v in enumerate(hX.class_of(img)):
                    matrix[i][col] = v
                col += 1
        if not AbHom(src, hX.group, matrix).is_isomorphism():
            return False
    return True


def check_strong_additivity(parts, maxdeg=2):
    """The restriction spans p_j^free assemble to an isomorphism from
    the homology of the free union onto the product of the parts'."""
    X, offsets = free_union_family(parts)
    cxX = SpaceComplex(X, maxdeg)
    cxs = [SpaceComplex(p, maxdeg) for p in parts]
    for n in range(maxdeg + 1):
        hX = cxX.homology_data(n)
        hparts = [cx.homology_data(n) for cx in cxs]
        dst = _fp_direct_sum([h.group for h in hparts])
        matrix = [[0] * hX.group.ngens for _ in range(dst.ngens)]
        row_off = 0
        for p, off, cx, hp in zip(parts, offsets, cxs, hparts):
            incl = tuple(off + x for x in range(p.size))
            # p_j^free acts by the transfer along the component inclusion:
            # restriction of chains to the block
            cols = pullback_chain_cols(incl, p, X, cx, cxX, n)
            for gi, cycle in enumerate(hX.gen_cycles):
                img = [0] * len(cx.bases[n])
                for j, c in enumerate(cols):
                    if cycle[j]:
                        for i, v in c.items():
                            img[i] += cycle[j] * v
                for i, v in enumerate(hp.class_of(img)):
                    matrix[row_off + i][gi] = v
            row_off += hp.group.ngens
        if not AbHom(hX.group, dst, matrix).is_isomorphism():
            return False
    return True
