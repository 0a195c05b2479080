"""Chain-level equivariant coarse ordinary homology with transfers.

Degree-n chains on a finite space are G-invariant integer functions on
(n+1)-tuples whose support is controlled and locally finite; on a
finite carrier controlled means component-constrained and local
finiteness is automatic, so the chain group is free on the G-orbits of
component-constrained tuples.  The differential is the alternating sum
of the face maps omitting one entry (entry i with sign (-1)^i).

A generalized morphism [W, w, f] acts by f_* o w^*, where w^* pulls
back along the covering and multiplies by the characteristic function
of component-constrained tuples, and f_* sums over fibers.  Homology
is exact over Z via Smith normal form, computed slice by slice over
G-orbits of coarse components (boundaries never mix slices).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .errors import InternalCheckError, OutOfScopeError, ValidationError
from .snf import (
    AbHom,
    FPAbGroup,
    mat_vec,
    smith_normal_form,
)
from .spaces import BornCoarseSpace
from .spans import Span


def _require_finite(X, what="this operation"):
    if not isinstance(X, BornCoarseSpace):
        raise OutOfScopeError(f"{what} supports finite carriers only")


def orbit_rep_of_tuple(X: BornCoarseSpace, t):
    act = X.carrier.action
    return min(tuple(act[g][x] for x in t) for g in X.group.elements())


def chain_basis(X: BornCoarseSpace, n):
    """G-orbit representatives (lexicographically minimal) of
    component-constrained (n+1)-tuples, sorted."""
    _require_finite(X, "chain_basis")
    reps = set()
    for comp in X.components():
        for t in itertools.product(comp, repeat=n + 1):
            reps.add(orbit_rep_of_tuple(X, t))
    return sorted(reps)


def _orbit_of_tuple(X, t):
    act = X.carrier.action
    return {tuple(act[g][x] for x in t) for g in X.group.elements()}


# -- sparse column helpers ---------------------------------------------------


def scols_mul(A_cols, B_cols):
    """Columns of A o B where each column maps row index -> value."""
    out = []
    for colB in B_cols:
        acc = {}
        for k, v in colB.items():
            for i, w in A_cols[k].items():
                acc[i] = acc.get(i, 0) + v * w
        out.append({i: v for i, v in acc.items() if v})
    return out


def scols_eq(A_cols, B_cols):
    if len(A_cols) != len(B_cols):
        return False
    for a, b in zip(A_cols, B_cols):
        if {k: v for k, v in a.items() if v} != {k: v for k, v in b.items() if v}:
            return False
    return True


def scols_dense(cols, nrows):
    out = [[0] * len(cols) for _ in range(nrows)]
    for j, col in enumerate(cols):
        for i, v in col.items():
            out[i][j] = v
    return out


def scols_apply(cols, vec, nrows):
    out = [0] * nrows
    for j, col in enumerate(cols):
        v = vec[j]
        if v:
            for i, w in col.items():
                out[i] += v * w
    return out


# -- the complex -------------------------------------------------------------


class SpaceComplex:
    """Bases and boundaries of the invariant controlled chain complex in
    degrees 0..maxdeg+1; ``exclude`` drops basis orbits (used for the
    relative complexes of excision)."""

    def __init__(self, X: BornCoarseSpace, maxdeg, exclude=None):
        _require_finite(X, "chain complexes")
        self.X = X
        self.N = maxdeg
        self.bases = []
        self.index = []
        for n in range(maxdeg + 2):
            basis = chain_basis(X, n)
            if exclude is not None:
                basis = [t for t in basis if not exclude(t)]
            self.bases.append(basis)
            self.index.append({t: i for i, t in enumerate(basis)})
        # slice = G-orbit of coarse components, read off the first entry
        comp_orbit = {}
        nslices = 0
        for ci, comp in enumerate(X.components()):
            if ci in comp_orbit:
                continue
            labels = {X.coarse.block[X.carrier.act(g, comp[0])] for g in X.group.elements()}
            for label in labels:
                comp_orbit[label] = nslices
            nslices += 1
        self.nslices = nslices
        self.slice_of = [
            [comp_orbit[X.coarse.block[t[0]]] for t in basis] for basis in self.bases
        ]
        self._boundaries = {}
        self._hom = {}

    def boundary_cols(self, n):
        """Columns of d_n: C_n -> C_{n-1} in the orbit bases."""
        if n in self._boundaries:
            return self._boundaries[n]
        if n == 0 or n > self.N + 1:
            raise ValidationError("boundary degree out of range")
        cols = []
        lower = self.index[n - 1]
        for rep in self.bases[n]:
            counts = {}
            for t in _orbit_of_tuple(self.X, rep):
                for i in range(n + 1):
                    face = t[:i] + t[i + 1 :]
                    counts[face] = counts.get(face, 0) + (1 if i % 2 == 0 else -1)
            col = {}
            for face, v in counts.items():
                idx = lower.get(face)
                if idx is not None and v:
                    col[idx] = col.get(idx, 0) + v
            cols.append({i: v for i, v in col.items() if v})
        self._boundaries[n] = cols
        return cols

    def check_dd_zero(self):
        for n in range(2, self.N + 2):
            prod = scols_mul(self.boundary_cols(n - 1), self.boundary_cols(n))
            if any(col for col in prod):
                return False
        return True

    def homology_data(self, n):
        """Kernel/quotient data per slice, assembled into one canonical
        global presentation; cached.

        Per slice: diagonalize d_n = U D V^-1; the kernel lattice is
        spanned by the V-columns at non-pivot positions, and the rows of
        V^-1 at those positions extract kernel coordinates, so boundary
        images and cycle classes need no per-column solves.
        """
        if n in self._hom:
            return self._hom[n]
        if not (0 <= n <= self.N):
            raise ValidationError("homology degree out of range")
        slices = []
        for s in range(self.nslices):
            rows = [i for i, sl in enumerate(self.slice_of[n]) if sl == s]
            cols_np1 = [j for j, sl in enumerate(self.slice_of[n + 1]) if sl == s]
            row_pos = {r: k for k, r in enumerate(rows)}
            m_local = len(rows)
            if m_local == 0:
                slices.append(_SliceHom(s, rows, [], None, None))
                continue

            if n == 0:
                kernel_cols = list(range(m_local))
                K = [[1 if i == j else 0 for j in kernel_cols] for i in range(m_local)]
                extractor = [[1 if i == j else 0 for j in range(m_local)] for i in kernel_cols]
                pivot_extractor = []
            else:
                upper_rows = [i for i, sl in enumerate(self.slice_of[n - 1]) if sl == s]
                upos = {r: k for k, r in enumerate(upper_rows)}
                dn = self.boundary_cols(n)
                dense = [[0] * m_local for _ in range(len(upper_rows))]
                for k, j in enumerate(rows):
                    for i, v in dn[j].items():
                        dense[upos[i]][k] = v
                res = smith_normal_form(dense, len(upper_rows), m_local, track_v=True)
                pivot_cols = {pj for (_pi, pj) in res.pivots}
                kernel_cols = [j for j in range(m_local) if j not in pivot_cols]
                K = [[res.V[i][j] for j in kernel_cols] for i in range(m_local)]
                extractor = [res.Vinv[j] for j in kernel_cols]
                pivot_extractor = [res.Vinv[j] for j in sorted(pivot_cols)]
            kdim = len(kernel_cols)
            solver = _CycleCoords(extractor, pivot_extractor, row_pos, m_local)

            dnp1 = self.boundary_cols(n + 1)
            img_coords = []
            for j in cols_np1:
                x = solver.coords_sparse(dnp1[j])
                if x is None:
                    raise InternalCheckError("boundary image is not a cycle")
                img_coords.append(x)
            fp = FPAbGroup(kdim, img_coords)
            slices.append(_SliceHom(s, rows, K, solver, fp))

        # global canonical presentation: the kept coordinates (divisor
        # not 1) of every slice, in slice then coordinate order
        total = []
        for sl in slices:
            if sl.fp is None:
                continue
            sl.keep = [i for i in range(sl.fp.ngens) if sl.fp._coord_divisor[i] != 1]
            for i in sl.keep:
                total.append(sl.fp._coord_divisor[i])
        relations = []
        for gi, d in enumerate(total):
            if d > 1:
                col = [0] * len(total)
                col[gi] = d
                relations.append(col)
        group = FPAbGroup(len(total), relations)

        # canonical_generators enumerates kept coordinates in coordinate
        # order, matching the global order; push them down to chains
        cycles = []
        for sl in slices:
            if sl.fp is None:
                continue
            for local_vec in sl.fp.canonical_generators():
                chain = [0] * len(self.bases[n])
                loc = mat_vec(sl.K, local_vec)
                for k, r in enumerate(sl.rows):
                    chain[r] = loc[k]
                cycles.append(chain)
        data = _HomologyGroup(self, n, slices, group, cycles)
        self._hom[n] = data
        return data


class _CycleCoords:
    """Kernel coordinates of cycles in one slice.

    ``coords_sparse`` takes a chain as a sparse column over global row
    indices; a chain is a cycle iff the pivot coordinates vanish, in
    which case the kernel-basis coordinates are returned.
    """

    def __init__(self, extractor, pivot_extractor, row_pos, m):
        self.extractor = extractor
        self.pivot_extractor = pivot_extractor
        self.row_pos = row_pos
        self.m = m

    def coords_sparse(self, col):
        local = {}
        for i, v in col.items():
            k = self.row_pos.get(i)
            if k is None:
                if v:
                    return None  # support outside the slice
                continue
            local[k] = v
        for row in self.pivot_extractor:
            if sum(row[k] * v for k, v in local.items()):
                return None
        return [sum(row[k] * v for k, v in local.items()) for row in self.extractor]

    def coords_dense_local(self, b):
        for row in self.pivot_extractor:
            if sum(r * v for r, v in zip(row, b)):
                return None
        return [sum(r * v for r, v in zip(row, b)) for row in self.extractor]


class _SliceHom:
    def __init__(self, slice_id, rows, K, solver, fp):
        self.slice_id = slice_id
        self.rows = rows
        self.K = K
        self.solver = solver
        self.fp = fp
        self.keep = []


@dataclass
class _HomologyGroup:
    complex: object
    degree: int
    slices: list
    group: FPAbGroup
    gen_cycles: list  # one chain vector per canonical generator

    def class_of(self, chain):
        """Canonical coordinates of a cycle's homology class."""
        out = []
        for sl in self.slices:
            if sl.fp is None:
                continue
            b = [chain[r] for r in sl.rows]
            x = sl.solver.coords_dense_local(b)
            if x is None:
                raise ValidationError("chain is not a cycle")
            red = sl.fp.reduce(x)
            out.extend(red[i] for i in sl.keep)
        return tuple(out)

    def invariants(self):
        return self.group.invariants()


@dataclass(frozen=True)
class GradedAbGroup:
    """Per degree: free rank and torsion coefficients in divisibility order."""

    degrees: tuple  # tuple of (rank, torsion tuple)

    def describe(self):
        out = []
        for n, (rank, torsion) in enumerate(self.degrees):
            parts = ["Z"] * rank + [f"Z/{d}" for d in torsion]
            out.append(f"H_{n} = " + (" + ".join(parts) if parts else "0"))
        return "\n".join(out)


def homology(X: BornCoarseSpace, maxdeg=3):
    """Homology of the invariant controlled chain complex, degrees 0..maxdeg."""
    _require_finite(X, "homology")
    cx = SpaceComplex(X, maxdeg)
    return GradedAbGroup(tuple(cx.homology_data(n).invariants() for n in range(maxdeg + 1)))


# -- chain maps --------------------------------------------------------------


def pullback_chain_cols(w, W: BornCoarseSpace, X: BornCoarseSpace, cxW, cxX, n):
    """w^*: C_n(X) -> C_n(W) for a bounded covering w (columns over the
    X-basis).  The pullback is cut by the characteristic function of
    component-constrained tuples, identically 1 on basis orbits."""
    cols = [dict() for _ in cxX.bases[n]]
    for row, repW in enumerate(cxW.bases[n]):
        img = orbit_rep_of_tuple(X, tuple(w[x] for x in repW))
        j = cxX.index[n].get(img)
        if j is not None:
            cols[j][row] = 1
    return cols


def pushforward_chain_cols(f, W: BornCoarseSpace, Y: BornCoarseSpace, cxW, cxY, n):
    """f_*: C_n(W) -> C_n(Y) for a controlled proper map: fiber sums."""
    cols = []
    for repW in cxW.bases[n]:
        counts = {}
        for t in _orbit_of_tuple(W, repW):
            img = tuple(f[x] for x in t)
            counts[img] = counts.get(img, 0) + 1
        col = {}
        for img, c in counts.items():
            idx = cxY.index[n].get(img)
            if idx is not None:
                col[idx] = col.get(idx, 0) + c
        cols.append({i: v for i, v in col.items() if v})
    return cols


def span_chain_cols(span: Span, cxX, cxW, cxY, n):
    """[W, w, f]_* = f_* o w^* in the orbit bases."""
    back = pullback_chain_cols(span.left, span.apex, span.src, cxW, cxX, n)
    push = pushforward_chain_cols(span.right, span.apex, span.dst, cxW, cxY, n)
    return scols_mul(push, back)


def chain_map_commutes(cols_by_deg, cx_src, cx_dst, upto):
    """d o T = T o d as exact sparse identities for degrees 1..upto."""
    for n in range(1, upto + 1):
        lhs = scols_mul(cx_dst.boundary_cols(n), cols_by_deg[n])
        rhs = scols_mul(cols_by_deg[n - 1], cx_src.boundary_cols(n))
        if not scols_eq(lhs, rhs):
            return False
    return True


def homology_map_from_chain_cols(cols_by_deg, cx_src, cx_dst, maxdeg):
    """Descend a chain map to per-degree homomorphisms on homology."""
    homs = []
    for n in range(maxdeg + 1):
        hX = cx_src.homology_data(n)
        hY = cx_dst.homology_data(n)
        matrix = [[0] * hX.group.ngens for _ in range(hY.group.ngens)]
        for gi, cycle in enumerate(hX.gen_cycles):
            img = scols_apply(cols_by_deg[n], cycle, len(cx_dst.bases[n]))
            for i, c in enumerate(hY.class_of(img)):
                matrix[i][gi] = c
        homs.append(AbHom(hX.group, hY.group, matrix))
    return homs


def induced_map(span: Span, maxdeg=3, complexes=None):
    """Per-degree homomorphisms on homology for a generalized morphism;
    validates that the chain map commutes with the differential."""
    for s in (span.src, span.apex, span.dst):
        _require_finite(s, "induced maps")
    if complexes is None:
        cxX = SpaceComplex(span.src, maxdeg)
        cxW = SpaceComplex(span.apex, maxdeg)
        cxY = SpaceComplex(span.dst, maxdeg)
    else:
        cxX, cxW, cxY = complexes
    cols = [span_chain_cols(span, cxX, cxW, cxY, n) for n in range(maxdeg + 2)]
    if not chain_map_commutes(cols, cxX, cxY, maxdeg + 1):
        raise InternalCheckError("induced chain map does not commute with the differential")
    return homology_map_from_chain_cols(cols, cxX, cxY, maxdeg)


def validate_chain_table(X: BornCoarseSpace, n, table):
    """Check a function table on (n+1)-tuples against the chain
    invariants (G-invariance, controlled support) and convert it to a
    vector over the orbit basis.  Local finiteness is automatic on
    finite carriers."""
    _require_finite(X, "chain tables")
    act = X.carrier.action
    for t, v in table.items():
        if len(t) != n + 1:
            raise ValidationError(f"tuple {t} has wrong length")
        if v == 0:
            continue
        for g in X.group.elements():
            gt = tuple(act[g][x] for x in t)
            if table.get(gt, 0) != v:
                raise ValidationError(f"table is not G-invariant at {t}")
        if len({X.coarse.block[x] for x in t}) != 1:
            raise ValidationError(f"support tuple {t} is not controlled")
    basis = chain_basis(X, n)
    index = {t: i for i, t in enumerate(basis)}
    vec = [0] * len(basis)
    for t, v in table.items():
        if v and t == orbit_rep_of_tuple(X, t):
            vec[index[t]] = v
    return vec


def chain_table_from_vector(X: BornCoarseSpace, n, vec):
    basis = chain_basis(X, n)
    table = {}
    for i, v in enumerate(vec):
        if v:
            for t in _orbit_of_tuple(X, basis[i]):
                table[t] = v
    return table


def pushforward_chain(f, W: BornCoarseSpace, Y: BornCoarseSpace, vec, n):
    """f_* on a chain vector (orbit bases); f must be controlled and
    proper so that the fiber sums are finite."""
    from .spaces import map_predicates

    controlled, proper, _ = map_predicates(f, W, Y)
    if not (controlled and proper):
        raise ValidationError("pushforward requires a controlled proper map")
    cxW = SpaceComplex(W, n)
    cxY = SpaceComplex(Y, n)
    cols = pushforward_chain_cols(f, W, Y, cxW, cxY, n)
    return scols_apply(cols, vec, len(cxY.bases[n]))


def transfer_chain(w, W: BornCoarseSpace, X: BornCoarseSpace, vec, n):
    """w^* on a chain vector for a validated bounded covering w."""
    from .spans import is_bounded_covering

    ok, diag = is_bounded_covering(w, W, X)
    if not ok:
        raise ValidationError(f"transfer requires a bounded covering: {diag}")
    cxW = SpaceComplex(W, n)
    cxX = SpaceComplex(X, n)
    cols = pullback_chain_cols(w, W, X, cxW, cxX, n)
    return scols_apply(cols, vec, len(cxW.bases[n]))


# -- lazy chains on tape carriers ---------------------------------------------


@dataclass
class TapeChain:
    """A degree-n chain on a tape carrier: an evaluable function with a
    controlled-support certificate (all support tuples are pairwise
    within the band of the given radius and in one coarse component).
    Equality is probed on finite windows; homology on tape carriers is
    out of scope."""

    space: object  # TapeSpace
    degree: int
    fn: object  # callable on (n+1)-tuples of (i, x) points
    support_radius: int

    def value(self, t):
        return self.fn(t)

    def window_tuples(self, window):
        """Component-constrained tuples within the probe window that
        respect the support certificate."""
        from itertools import product

        sp = self.space
        pts = [(i, x) for i in range(window + 1) for x in range(sp.fiber.size)]
        blk = sp.fiber.coarse.block
        kind, _ = sp.components_symbolic()
        out = []
        for t in product(pts, repeat=self.degree + 1):
            same_block = len({blk[x] for (_i, x) in t}) <= 1
            if not same_block:
                continue
            if kind == "per_index" and len({i for (i, _x) in t}) > 1:
                continue
            if any(
                abs(a[0] - b[0]) > self.support_radius for a in t for b in t
            ):
                continue
            out.append(t)
        return out

    def window_equal(self, other, window=16):
        if self.degree != other.degree or self.space != other.space:
            return False
        r = max(self.support_radius, other.support_radius)
        probe = TapeChain(self.space, self.degree, self.fn, r)
        for t in probe.window_tuples(window):
            if self.fn(t) != other.fn(t):
                return False
        return True

    def boundary(self):
        """The alternating face sum, evaluated lazily; insertion points
        range over the window allowed by the support certificate."""
        sp = self.space
        r = self.support_radius
        blk = sp.fiber.coarse.block
        kind, _ = sp.components_symbolic()

        def bfn(t):
            total = 0
            i0 = t[0][0] if t else 0
            candidates = [
                (i, x)
                for i in range(max(0, i0 - r), i0 + r + 1)
                for x in range(sp.fiber.size)
            ]
            for pos in range(self.degree + 1):
                for z in candidates:
                    full = t[:pos] + (z,) + t[pos:]
                    total += (1 if pos % 2 == 0 else -1) * self.fn(full)
            return total

        if self.degree == 0:
            raise ValidationError("boundary of a degree-0 tape chain has degree -1")
        return TapeChain(sp, self.degree - 1, bfn, r)


def tape_transfer_chain(w, X: BornCoarseSpace, vec, n):
    """w^* for a tape projection covering: pull a finite chain back to
    the tape, cut by the characteristic function of component tuples."""
    from .tape import TapeMap

    if not isinstance(w, TapeMap) or w.kind != "project":
        raise ValidationError("tape transfer needs a projection covering")
    sp = w.src
    table = chain_table_from_vector(X, n, vec)
    blk = sp.fiber.coarse.block
    kind, _ = sp.components_symbolic()

    def fn(t):
        if len({blk[x] for (_i, x) in t}) > 1:
            return 0
        if kind == "per_index" and len({i for (i, _x) in t}) > 1:
            return 0
        return table.get(tuple(w.fiber_images[x] for (_i, x) in t), 0)

    return TapeChain(sp, n, fn, 0)


def tape_pushforward_chain(s, c: TapeChain):
    """s_* along a proper shift with bijective fiber map."""
    from .tape import TapeMap, tape_map_predicates

    if not isinstance(s, TapeMap) or s.kind != "shift":
        raise ValidationError("tape pushforward supports shift maps")
    _c, proper, _b = tape_map_predicates(s)
    if not proper:
        raise ValidationError("pushforward requires a proper map")
    phi = s.fiber_images
    if len(set(phi)) != len(phi):
        raise ValidationError("fiber map must be bijective for pointwise pushforward")
    inv = {v: k for k, v in enumerate(phi)}

    def fn(t):
        pre = []
        for (i, x) in t:
            if i < s.shift or x not in inv:
                return 0
            pre.append((i - s.shift, inv[x]))
        return c.fn(tuple(pre))

    return TapeChain(s.dst, c.degree, fn, c.support_radius)


def hom_is_identity(h: AbHom):
    return hom_is_multiplication_by(h, 1)


def hom_is_multiplication_by(h: AbHom, k):
    if h.src.ngens != h.dst.ngens:
        return False
    for gi in range(h.src.ngens):
        e = [1 if i == gi else 0 for i in range(h.src.ngens)]
        if h.dst.reduce(h.apply(e)) != h.dst.reduce([k * v for v in e]):
            return False
    return True
