"""Exact dense linear algebra over any field with +, -, *, / and a zero test.

Entries may be Fractions, field elements of Q(sqrt(r)) (reduced polynomials in
an algebraic generator), or CoefficientFunctions: elimination only uses exact
field operations.  Pivoting is deterministic (first nonzero), so results are
bit-for-bit reproducible.
"""

from __future__ import annotations

from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .errors import Unsolvable
from .scalars import fe_is_zero, fe_sign


def _is_zero(x) -> bool:
    if isinstance(x, (int, Fraction)):
        return x == 0
    z = getattr(x, "is_zero", None)
    if z is not None:
        return z
    return x == 0


def mat_copy(m):
    return [list(row) for row in m]


def rref(matrix: Sequence[Sequence], ncols: Optional[int] = None) -> Tuple[list, List[int]]:
    """Row-reduce in place on a copy; returns (reduced matrix, pivot columns).

    Reduction runs over all columns of the matrix unless ncols restricts the
    eliminated columns (useful for augmented systems).
    """
    m = mat_copy(matrix)
    rows = len(m)
    if rows == 0:
        return m, []
    width = len(m[0])
    limit = width if ncols is None else ncols
    pivots = []
    r = 0
    for c in range(limit):
        pivot_row = None
        for i in range(r, rows):
            if not _is_zero(m[i][c]):
                pivot_row = i
                break
        if pivot_row is None:
            continue
        m[r], m[pivot_row] = m[pivot_row], m[r]
        pv = m[r][c]
        if not (isinstance(pv, (int, Fraction)) and pv == 1):
            m[r] = [x / pv for x in m[r]]
        for i in range(rows):
            if i == r:
                continue
            f = m[i][c]
            if _is_zero(f):
                continue
            m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return m, pivots


def rank(matrix) -> int:
    _, pivots = rref(matrix)
    return len(pivots)


def solve_affine(A, b):
    """All solutions of A x = b: (particular, nullspace basis, free columns).

    Returns None when inconsistent.  A is m x n, b a length-m vector.  The
    particular solution sets every free variable to zero; nullspace vector i
    has a one in free column i and the matching pivot-column entries.
    """
    rows = len(A)
    n = len(A[0]) if rows else 0
    aug = [list(A[i]) + [b[i]] for i in range(rows)]
    red, pivots = rref(aug, ncols=n)
    for row in red[len(pivots):]:
        if not _is_zero(row[n]):
            return None
    zero = Fraction(0)
    one = Fraction(1)
    part = [zero] * n
    for r, c in enumerate(pivots):
        part[c] = red[r][n]
    free = [c for c in range(n) if c not in set(pivots)]
    basis = []
    for fc in free:
        v = [zero] * n
        v[fc] = one
        for r, c in enumerate(pivots):
            v[c] = -red[r][fc]
        basis.append(v)
    return part, basis, free


def nullspace(A):
    rows = len(A)
    zero = [Fraction(0)] * rows
    result = solve_affine(A, zero)
    assert result is not None
    return result[1]


def matrix_inverse(A):
    """Exact inverse of a square matrix; raises Unsolvable when singular."""
    n = len(A)
    zero, one = Fraction(0), Fraction(1)
    aug = [list(A[i]) + [one if j == i else zero for j in range(n)] for i in range(n)]
    red, pivots = rref(aug, ncols=n)
    if len(pivots) != n:
        raise Unsolvable("matrix is singular", {"rank": len(pivots), "size": n})
    return [row[n:] for row in red]


def mat_mul(A, B):
    rows, inner, cols = len(A), len(B), len(B[0])
    out = []
    for i in range(rows):
        row = []
        for j in range(cols):
            acc = A[i][0] * B[0][j]
            for k in range(1, inner):
                acc = acc + A[i][k] * B[k][j]
            row.append(acc)
        out.append(row)
    return out


def signature(matrix) -> Tuple[int, int]:
    """Exact signature (plus, minus) of a symmetric matrix by congruence.

    plus + minus < n means the matrix is degenerate (the remaining block is
    zero).  Signs of pivots are decided exactly, including in Q(sqrt(r)).
    """
    m = mat_copy(matrix)
    n = len(m)
    plus = minus = 0
    for k in range(n):
        if _is_zero(m[k][k]):
            swap = None
            for i in range(k + 1, n):
                if not _is_zero(m[i][i]):
                    swap = i
                    break
            if swap is not None:
                m[k], m[swap] = m[swap], m[k]
                for row in m:
                    row[k], row[swap] = row[swap], row[k]
            else:
                off = None
                for i in range(k, n):
                    for j in range(i + 1, n):
                        if not _is_zero(m[i][j]):
                            off = (i, j)
                            break
                    if off:
                        break
                if off is None:
                    break
                i, j = off
                # congruence by adding row/col j into i creates a diagonal pivot
                m[i] = [a + b for a, b in zip(m[i], m[j])]
                for row in m:
                    row[i] = row[i] + row[j]
                if i != k:
                    m[k], m[i] = m[i], m[k]
                    for row in m:
                        row[k], row[i] = row[i], row[k]
        pivot = m[k][k]
        if _is_zero(pivot):
            break
        if fe_sign(pivot) > 0:
            plus += 1
        else:
            minus += 1
        # Schur complement of the pivot; symmetric since m is symmetric
        for i in range(k + 1, n):
            f = m[i][k] / pivot
            if _is_zero(f):
                continue
            for j in range(k + 1, n):
                m[i][j] = m[i][j] - f * m[k][j]
        for i in range(k + 1, n):
            m[i][k] = Fraction(0)
            m[k][i] = Fraction(0)
    return plus, minus
