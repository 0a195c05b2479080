"""Exact integer linear algebra: sparse Smith normal form with
magnitude pivoting, integer kernels and solvers, finitely presented
abelian groups, and decision procedures for homomorphisms between them
(injectivity, surjectivity, isomorphism, split injectivity).

Everything runs over Python's arbitrary-precision integers; entries
grow under elimination and must not be truncated.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InternalCheckError, ValidationError


# -- dense matrix helpers ----------------------------------------------------


def mat_zero(m, n):
    return [[0] * n for _ in range(m)]


def mat_identity(n):
    out = mat_zero(n, n)
    for i in range(n):
        out[i][i] = 1
    return out


def mat_mul(A, B):
    m = len(A)
    k = len(B)
    n = len(B[0]) if k else 0
    if any(len(row) != k for row in A):
        raise ValidationError("matrix dimensions do not match")
    out = mat_zero(m, n)
    for i in range(m):
        Ai = A[i]
        Oi = out[i]
        for t in range(k):
            a = Ai[t]
            if a:
                Bt = B[t]
                for j in range(n):
                    if Bt[j]:
                        Oi[j] += a * Bt[j]
    return out


def mat_eq(A, B):
    return len(A) == len(B) and all(ra == rb for ra, rb in zip(A, B))


def mat_scale(A, c):
    return [[c * v for v in row] for row in A]


def mat_add(A, B):
    return [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_vec(A, v):
    return [sum(a * x for a, x in zip(row, v)) for row in A]


def transpose(A):
    if not A:
        return []
    return [list(col) for col in zip(*A)]


# -- sparse Smith normal form ------------------------------------------------


class _Sparse:
    """Row-major sparse matrix with a column index."""

    def __init__(self, dense, m, n):
        self.m, self.n = m, n
        self.rows = {}
        self.cols = {}
        for i in range(m):
            for j in range(n):
                v = dense[i][j]
                if v:
                    self.rows.setdefault(i, {})[j] = v
                    self.cols.setdefault(j, set()).add(i)

    def get(self, i, j):
        return self.rows.get(i, {}).get(j, 0)

    def set(self, i, j, v):
        if v:
            self.rows.setdefault(i, {})[j] = v
            self.cols.setdefault(j, set()).add(i)
        else:
            row = self.rows.get(i)
            if row and j in row:
                del row[j]
                if not row:
                    del self.rows[i]
                col = self.cols[j]
                col.discard(i)
                if not col:
                    del self.cols[j]


@dataclass
class SNFResult:
    """U A V = D with U, V unimodular (tracked on demand).

    divisors: the nonzero diagonal of D in divisibility order d1 | d2 | ...
    pivots:   (row, col) positions of the diagonal in the original indexing.
    """

    m: int
    n: int
    divisors: list
    pivots: list
    U: list = None
    Uinv: list = None
    V: list = None
    Vinv: list = None

    @property
    def rank(self):
        return len(self.divisors)


def smith_normal_form(dense, m=None, n=None, track_u=False, track_v=False):
    """Smith normal form with partial pivoting on magnitude.

    Each round picks the nonzero entry of least absolute value (ties by
    least fill), clears its row and column by Euclid steps, then folds
    in any remaining entry the pivot fails to divide; the diagonal
    therefore comes out in divisibility order.
    """
    if m is None:
        m = len(dense)
    if n is None:
        n = len(dense[0]) if dense else 0
    A = _Sparse(dense, m, n)
    U = mat_identity(m) if track_u else None
    Uinv = mat_identity(m) if track_u else None
    V = mat_identity(n) if track_v else None
    Vinv = mat_identity(n) if track_v else None

    def row_addmul(k, i, q):
        """row_k += q * row_i, with U := E U and Uinv := Uinv E^{-1}."""
        for j, v in list(A.rows.get(i, {}).items()):
            A.set(k, j, A.get(k, j) + q * v)
        if track_u:
            Ui, Uk = U[i], U[k]
            for j in range(m):
                Uk[j] += q * Ui[j]
            for r in range(m):
                Uinv[r][i] -= q * Uinv[r][k]

    def col_addmul(l, j, q):
        """col_l += q * col_j, with V := V E and Vinv := E^{-1} Vinv."""
        for i in list(A.cols.get(j, set())):
            A.set(i, l, A.get(i, l) + q * A.rows[i][j])
        if track_v:
            for i in range(n):
                V[i][l] += q * V[i][j]
            Vl, Vj = Vinv[l], Vinv[j]
            for i in range(n):
                Vj[i] -= q * Vl[i]

    def negate_row(i):
        for j in list(A.rows.get(i, {})):
            A.rows[i][j] = -A.rows[i][j]
        if track_u:
            for j in range(m):
                U[i][j] = -U[i][j]
            for r in range(m):
                Uinv[r][i] = -Uinv[r][i]

    active_rows = set(range(m))
    active_cols = set(range(n))
    pivots = []
    divisors = []

    def eliminate(pi, pj):
        """Clear the pivot row and column; the pivot walks to wherever a
        smaller remainder appears, so |pivot| strictly decreases and the
        loop terminates.  Returns the final pivot position."""
        while True:
            moved = False
            for k in list(A.cols.get(pj, set())):
                if k == pi or k not in active_rows:
                    continue
                piv = A.get(pi, pj)
                q = A.get(k, pj) // piv
                row_addmul(k, pi, -q)
                if A.get(k, pj) != 0:
                    pi = k
                    moved = True
                    break
            if moved:
                continue
            for l in list(A.rows.get(pi, {})):
                if l == pj or l not in active_cols:
                    continue
                piv = A.get(pi, pj)
                q = A.get(pi, l) // piv
                col_addmul(l, pj, -q)
                if A.get(pi, l) != 0:
                    pj = l
                    moved = True
                    break
            if not moved:
                return pi, pj

    while True:
        best = None
        for i in active_rows:
            row = A.rows.get(i)
            if not row:
                continue
            nr = sum(1 for j in row if j in active_cols)
            for j, v in row.items():
                if j not in active_cols:
                    continue
                key = (abs(v), (nr - 1) * (len(A.cols[j]) - 1))
                if best is None or key < best[0]:
                    best = (key, i, j)
            if best and best[0] == (1, 0):
                break
        if best is None:
            break
        _, pi, pj = best

        pi, pj = eliminate(pi, pj)
        while True:
            piv = A.get(pi, pj)
            offender = None
            for i in active_rows:
                if i == pi:
                    continue
                row = A.rows.get(i)
                if not row:
                    continue
                for j, v in row.items():
                    if j in active_cols and v % piv != 0:
                        offender = i
                        break
                if offender is not None:
                    break
            if offender is None:
                break
            row_addmul(pi, offender, 1)
            pi, pj = eliminate(pi, pj)

        if A.get(pi, pj) < 0:
            negate_row(pi)
        pivots.append((pi, pj))
        divisors.append(A.get(pi, pj))
        active_rows.discard(pi)
        active_cols.discard(pj)

    for a, b in zip(divisors, divisors[1:]):
        if b % a != 0:
            raise InternalCheckError("smith divisors out of divisibility order")
    return SNFResult(m, n, divisors, pivots, U, Uinv, V, Vinv)


def kernel_basis(dense, m=None, n=None):
    """Integer basis of {x | A x = 0}, as a list of length-n columns.

    The kernel lattice is spanned by the V-columns at non-pivot
    positions, hence saturated (a direct summand of Z^n).
    """
    if m is None:
        m = len(dense)
    if n is None:
        n = len(dense[0]) if dense else 0
    res = smith_normal_form(dense, m, n, track_v=True)
    pivot_cols = {pj for (_pi, pj) in res.pivots}
    return [[res.V[i][j] for i in range(n)] for j in range(n) if j not in pivot_cols]


def solve_int(dense, b, m=None, n=None):
    """One integer solution of A x = b, or None."""
    if m is None:
        m = len(dense)
    if n is None:
        n = len(dense[0]) if dense else 0
    res = smith_normal_form(dense, m, n, track_u=True, track_v=True)
    ub = mat_vec(res.U, list(b))
    pivot_rows = {pi: idx for idx, (pi, _pj) in enumerate(res.pivots)}
    ycols = [0] * n
    for i in range(m):
        idx = pivot_rows.get(i)
        if idx is None:
            if ub[i] != 0:
                return None
        else:
            d = res.divisors[idx]
            if ub[i] % d != 0:
                return None
            ycols[res.pivots[idx][1]] = ub[i] // d
    return mat_vec(res.V, ycols)


def lattice_contains(gens_cols, v):
    """Does v lie in the integer span of the given columns?"""
    if not gens_cols:
        return all(x == 0 for x in v)
    n = len(gens_cols[0])
    A = [[col[i] for col in gens_cols] for i in range(n)]
    return solve_int(A, list(v), n, len(gens_cols)) is not None


# -- finitely presented abelian groups --------------------------------------


@dataclass
class FPAbGroup:
    """Z^ngens modulo the column span of the relation matrix.

    Canonical data comes from U R V = D: in the generators y = U x the
    relations are diagonal, making reduction and equality immediate.
    """

    ngens: int
    relations: list  # list of columns, each of length ngens

    def __post_init__(self):
        for col in self.relations:
            if len(col) != self.ngens:
                raise ValidationError("relation column has wrong length")
        R = [[col[i] for col in self.relations] for i in range(self.ngens)]
        res = smith_normal_form(R, self.ngens, len(self.relations), track_u=True)
        order = {pi: idx for idx, (pi, _pj) in enumerate(res.pivots)}
        self._coord_divisor = [
            res.divisors[order[i]] if i in order else 0 for i in range(self.ngens)
        ]
        self._U = res.U
        self._Uinv = res.Uinv
        self.torsion = sorted(d for d in res.divisors if d > 1)
        self.rank = self.ngens - res.rank

    def reduce(self, v):
        """Canonical coordinates of an element (length ngens): torsion
        coordinates reduced mod their divisor, killed coordinates zeroed."""
        if len(v) != self.ngens:
            raise ValidationError("element has wrong length")
        y = mat_vec(self._U, list(v))
        out = []
        for i in range(self.ngens):
            d = self._coord_divisor[i]
            if d == 1:
                out.append(0)
            elif d > 1:
                out.append(y[i] % d)
            else:
                out.append(y[i])
        return tuple(out)

    def is_zero(self, v):
        return all(c == 0 for c in self.reduce(v))

    def equal(self, v, w):
        return self.reduce(v) == self.reduce(w)

    def is_trivial(self):
        return self.rank == 0 and not self.torsion

    def order(self):
        if self.rank > 0:
            return None
        out = 1
        for d in self.torsion:
            out *= d
        return out

    def invariants(self):
        """(rank, torsion coefficients in divisibility order)."""
        return (self.rank, tuple(self.torsion))

    def isomorphic(self, other):
        return self.invariants() == other.invariants()

    def canonical_generators(self):
        """Original-coordinate vectors projecting to canonical generators
        (the torsion and free coordinates, in coordinate order)."""
        gens = []
        for i in range(self.ngens):
            d = self._coord_divisor[i]
            if d == 0 or d > 1:
                gens.append([self._Uinv[r][i] for r in range(self.ngens)])
        return gens

    def describe(self):
        parts = ["Z"] * self.rank + [f"Z/{d}" for d in self.torsion]
        return " + ".join(parts) if parts else "0"


@dataclass
class AbHom:
    """A homomorphism between finitely presented abelian groups, given
    by a matrix on the original generators (dst.ngens x src.ngens)."""

    src: FPAbGroup
    dst: FPAbGroup
    matrix: list

    def __post_init__(self):
        if len(self.matrix) != self.dst.ngens or any(
            len(r) != self.src.ngens for r in self.matrix
        ):
            raise ValidationError("homomorphism matrix has wrong shape")
        for col in self.src.relations:
            if not self.dst.is_zero(mat_vec(self.matrix, col)):
                raise ValidationError("matrix does not descend to the quotients")

    def apply(self, v):
        return mat_vec(self.matrix, list(v))

    def compose(self, other):
        """self after other."""
        if other.dst.ngens != self.src.ngens:
            raise ValidationError("composition shape mismatch")
        return AbHom(other.src, self.dst, mat_mul(self.matrix, other.matrix))

    def _preimage_lattice(self):
        """Columns spanning {x | M x lies in the relation lattice of dst}."""
        a, b = self.src.ngens, self.dst.ngens
        cols = [[self.matrix[i][j] for i in range(b)] for j in range(a)]
        cols.extend(list(c) for c in self.dst.relations)
        if b == 0:
            return [[1 if i == j else 0 for i in range(a)] for j in range(a)]
        A = [[cols[j][i] for j in range(len(cols))] for i in range(b)]
        ker = kernel_basis(A, b, len(cols))
        return [k[:a] for k in ker]

    def is_injective(self):
        return all(lattice_contains(self.src.relations, p) for p in self._preimage_lattice())

    def is_surjective(self):
        b = self.dst.ngens
        if b == 0:
            return True
        cols = [[self.matrix[i][j] for i in range(b)] for j in range(self.src.ngens)]
        cols.extend(list(c) for c in self.dst.relations)
        if not cols:
            return False
        A = [[c[i] for c in cols] for i in range(b)]
        res = smith_normal_form(A, b, len(cols))
        return res.rank == b and all(d == 1 for d in res.divisors)

    def is_isomorphism(self):
        return self.is_injective() and self.is_surjective()

    def is_split_injective(self):
        """Exists beta with beta . alpha = id on src: beta M = I + Rs Z and
        beta Rd = Rs Y for integer multiplier matrices Z, Y.  Solved as one
        integer linear system in the entries of beta, Z and Y."""
        a, b = self.src.ngens, self.dst.ngens
        rs = self.src.relations
        rd = self.dst.relations
        nrs, nrd = len(rs), len(rd)
        nbeta = a * b
        nZ = nrs * a
        nY = nrs * nrd
        rows = []
        rhs = []
        # beta M - Rs Z = I over (i, j) in a x a; Z is nrs x a
        for i in range(a):
            for j in range(a):
                row = [0] * (nbeta + nZ + nY)
                for k in range(b):
                    row[i * b + k] = self.matrix[k][j]
                for l in range(nrs):
                    row[nbeta + l * a + j] -= rs[l][i]
                rows.append(row)
                rhs.append(1 if i == j else 0)
        # beta Rd - Rs Y = 0 over (i, c) in a x nrd; Y is nrs x nrd
        for i in range(a):
            for c in range(nrd):
                row = [0] * (nbeta + nZ + nY)
                for k in range(b):
                    row[i * b + k] = rd[c][k]
                for l in range(nrs):
                    row[nbeta + nZ + l * nrd + c] -= rs[l][i]
                rows.append(row)
                rhs.append(0)
        if not rows:
            return True
        return solve_int(rows, rhs, len(rows), nbeta + nZ + nY) is not None
