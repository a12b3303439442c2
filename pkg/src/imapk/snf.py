"""Exact integer matrix normal forms and the group invariants they carry.

The Smith decomposition U*M*V = D is computed with deterministic pivoting
(nonzero entry of minimal absolute value, ties broken row-major) and verified
before being returned: the transforms are unimodular and the diagonal
satisfies the divisibility chain.  Cokernels and kernels of id - A are read
off the diagonal, which is all the K-group computations need.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import NotSquare
from .polynomials import IntPoly


def identity_matrix(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def mat_mul(A, B):
    rows, inner, cols = len(A), len(B), len(B[0]) if B else 0
    out = [[0] * cols for _ in range(rows)]
    for i in range(rows):
        Ai = A[i]
        for k in range(inner):
            a = Ai[k]
            if a == 0:
                continue
            Bk = B[k]
            row = out[i]
            for j in range(cols):
                row[j] += a * Bk[j]
    return out


def mat_sub(A, B):
    return [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def determinant(A):
    """Bareiss fraction-free elimination; exact for integer matrices."""
    n = len(A)
    if n == 0:
        return 1
    M = [row[:] for row in A]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for i in range(k + 1, n):
                if M[i][k] != 0:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
            M[i][k] = 0
        prev = M[k][k]
    return sign * M[-1][-1]


def char_poly(A):
    """Characteristic polynomial det(tI - A) by Faddeev-LeVerrier, exact."""
    n = len(A)
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    M = identity_matrix(n)
    AM = A
    for k in range(1, n + 1):
        AM = mat_mul(A, M)
        c = Fraction(-sum(AM[i][i] for i in range(n)), k)
        coeffs[n - k] = c
        M = [[AM[i][j] + (c if i == j else 0) for j in range(n)] for i in range(n)]
    return IntPoly(coeffs)


def rational_rank(A):
    """Rank over the rationals by fraction Gauss elimination."""
    M = [[Fraction(x) for x in row] for row in A]
    rows, cols = len(M), len(M[0]) if M else 0
    rank = 0
    for col in range(cols):
        pivot = None
        for r in range(rank, rows):
            if M[r][col] != 0:
                pivot = r
                break
        if pivot is None:
            continue
        M[rank], M[pivot] = M[pivot], M[rank]
        pv = M[rank][col]
        for r in range(rows):
            if r != rank and M[r][col] != 0:
                f = M[r][col] / pv
                M[r] = [a - f * b for a, b in zip(M[r], M[rank])]
        rank += 1
        if rank == rows:
            break
    return rank


@dataclass
class SmithDecomposition:
    U: list
    D: list
    V: list

    def diagonal(self):
        return [self.D[i][i] for i in range(min(len(self.D), len(self.D[0]) if self.D else 0))]

    def as_dict(self):
        return {"U": self.U, "D": self.D, "V": self.V, "diagonal": self.diagonal()}


def _pivot(M, s):
    """Position of the nonzero entry of minimal |value| in the trailing block."""
    best = None
    for i in range(s, len(M)):
        for j in range(s, len(M[0])):
            v = abs(M[i][j])
            if v and (best is None or v < best[0]):
                best = (v, i, j)
    return None if best is None else (best[1], best[2])


def smith_normal_form(M):
    """Smith decomposition with verified certificate U*M*V = D."""
    original = [[int(x) for x in row] for row in M]
    A = [row[:] for row in original]
    rows = len(A)
    cols = len(A[0]) if rows else 0
    U = identity_matrix(rows)
    V = identity_matrix(cols)

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, f):
        A[dst] = [a + f * b for a, b in zip(A[dst], A[src])]
        U[dst] = [a + f * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, f):
        for row in A:
            row[dst] += f * row[src]
        for row in V:
            row[dst] += f * row[src]

    def negate_row(i):
        A[i] = [-a for a in A[i]]
        U[i] = [-a for a in U[i]]

    for s in range(min(rows, cols)):
        while True:
            pos = _pivot(A, s)
            if pos is None:
                break
            i, j = pos
            if i != s:
                swap_rows(s, i)
            if j != s:
                swap_cols(s, j)
            dirty = False
            for r in range(s + 1, rows):
                if A[r][s] != 0:
                    add_row(r, s, -(A[r][s] // A[s][s]))
                    if A[r][s] != 0:
                        dirty = True
            for c in range(s + 1, cols):
                if A[s][c] != 0:
                    add_col(c, s, -(A[s][c] // A[s][s]))
                    if A[s][c] != 0:
                        dirty = True
            if dirty:
                continue
            # pivot must divide the rest of the block for the chain to hold
            offender = None
            for r in range(s + 1, rows):
                for c in range(s + 1, cols):
                    if A[r][c] % A[s][s] != 0:
                        offender = r
                        break
                if offender is not None:
                    break
            if offender is None:
                break
            add_row(s, offender, 1)
        if A[s][s] < 0:
            negate_row(s)

    D = A
    decomp = SmithDecomposition(U, D, V)
    _verify(original, decomp)
    return decomp


def _verify(M, decomp):
    assert mat_mul(mat_mul(decomp.U, M), decomp.V) == decomp.D
    assert abs(determinant(decomp.U)) == 1
    assert abs(determinant(decomp.V)) == 1
    for i, row in enumerate(decomp.D):
        for j, x in enumerate(row):
            if i != j:
                assert x == 0, "off-diagonal entry left"
            else:
                assert x >= 0, "diagonal entries must be nonnegative"
    diag = decomp.diagonal()
    nonzero = [d for d in diag if d]
    zeros = [d for d in diag if not d]
    assert diag == nonzero + zeros, "zero diagonal entries must come last"
    for a, b in zip(nonzero, nonzero[1:]):
        assert b % a == 0, "divisibility chain broken"


@dataclass
class KGroups:
    torsion: list
    free_rank: int
    k1_rank: int
    generator_note: str = ""

    def as_dict(self):
        return {
            "k0": {"torsion": list(self.torsion), "free_rank": self.free_rank},
            "k1": {"free_rank": self.k1_rank},
            "generator_note": self.generator_note,
        }

    def text(self):
        parts = ["Z/%d" % d for d in self.torsion]
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append("Z^%d" % self.free_rank)
        k0 = " + ".join(parts) if parts else "0"
        k1 = "Z^%d" % self.k1_rank if self.k1_rank > 1 else ("Z" if self.k1_rank else "0")
        return "K0 = %s, K1 = %s" % (k0, k1)


def _require_square(A):
    n = len(A)
    for row in A:
        if len(row) != n:
            raise NotSquare("matrix is not square")
    return n


def kgroups_from_incidence(A):
    """K-groups of the crossed product algebra from a surjective Markov matrix.

    Cokernel and kernel of id - A via the Smith form; callers restrict to the
    eventual range first when the map is not surjective.
    """
    n = _require_square(A)
    M = mat_sub(identity_matrix(n), A)
    decomp = smith_normal_form(M)
    diag = decomp.diagonal()
    torsion = [d for d in diag if d >= 2]
    free_rank = sum(1 for d in diag if d == 0)
    return KGroups(
        torsion=torsion,
        free_rank=free_rank,
        k1_rank=free_rank,
        generator_note="[1]_0 generates" if not torsion and free_rank <= 1 else "",
    )


@dataclass
class DimensionTriplePresentation:
    """Stationary inductive limit presentation of the core algebra's K0."""

    size: int
    matrix: list
    det: int
    char_poly: IntPoly
    limit_rank: int
    order_unit: list
    limit_note: str
    automorphism_note: str

    def as_dict(self):
        return {
            "group": "Z^%d" % self.size,
            "automorphism_matrix": [list(r) for r in self.matrix],
            "order_unit": list(self.order_unit),
            "det": self.det,
            "char_poly": self.char_poly.text(),
            "limit_rank": self.limit_rank,
            "limit_note": self.limit_note,
            "automorphism_note": self.automorphism_note,
        }


def stationary_dimension_triple(A):
    n = _require_square(A)
    p = char_poly(A)
    det = determinant(A)
    # rank of the limit group: rank of A^n over the rationals
    power = identity_matrix(n)
    for _ in range(n):
        power = mat_mul(power, A)
    limit_rank = rational_rank(power)
    limit_note = ""
    auto_note = ""
    # single nonzero eigenvalue k: char poly t^(n-1) (t - k)
    coeffs = p.coeffs
    if n >= 1 and all(c == 0 for c in coeffs[: n - 1]) and coeffs[n] == 1:
        k = -coeffs[n - 1]
        if k > 1:
            limit_note = "Z[1/%d]" % k
            auto_note = "multiplication by %d" % k
        elif k == 1:
            limit_note = "Z"
            auto_note = "identity"
    if not auto_note and abs(det) == 1:
        limit_note = "Z^%d" % n
        auto_note = "the matrix acts as an automorphism of Z^%d" % n
    return DimensionTriplePresentation(
        size=n,
        matrix=[list(r) for r in A],
        det=det,
        char_poly=p,
        limit_rank=limit_rank,
        order_unit=[1] * n,
        limit_note=limit_note,
        automorphism_note=auto_note,
    )
