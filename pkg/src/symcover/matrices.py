"""Dense exact-integer matrices: constructors and fraction-free elimination.

Matrices are plain lists of lists of Python ints, so determinants of
ill-conditioned integer matrices come out exact at any size.
"""

from __future__ import annotations

__all__ = [
    "DegenerateMatrix",
    "identity",
    "cycle_block",
    "path_block",
    "det_bareiss",
    "leading_minor_dets",
]

IntMatrix = list[list[int]]


class DegenerateMatrix(ValueError):
    """Some leading principal minor of the matrix is singular."""


def identity(n: int) -> IntMatrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def cycle_block(a: int, n: int) -> IntMatrix:
    """a on the diagonal plus the adjacency matrix of an n-cycle.

    The 2-cycle is a doubled edge, so the n = 2 block is [[a, 2], [2, a]].
    For n = 3 the two cyclic neighbours coincide with "everything else",
    giving all off-diagonal entries 1.
    """
    if n < 2:
        raise ValueError("cycle_block needs n >= 2")
    if n == 2:
        return [[a, 2], [2, a]]
    m = [[0] * n for _ in range(n)]
    for i in range(n):
        m[i][i] = a
        m[i][(i + 1) % n] = 1
        m[i][(i - 1) % n] = 1
    return m


def path_block(a: int, n: int) -> IntMatrix:
    """Tridiagonal block: diagonal a with a-1 at both ends, 1 off-diagonal."""
    if n < 2:
        raise ValueError("path_block needs n >= 2")
    m = [[0] * n for _ in range(n)]
    for i in range(n):
        m[i][i] = a
        if i + 1 < n:
            m[i][i + 1] = 1
            m[i + 1][i] = 1
    m[0][0] = a - 1
    m[n - 1][n - 1] = a - 1
    return m


def det_bareiss(matrix: IntMatrix) -> int:
    """Exact determinant by Bareiss fraction-free elimination, with pivoting."""
    n = len(matrix)
    if any(len(row) != n for row in matrix):
        raise ValueError("matrix must be square")
    if n == 0:
        return 1
    m = [row[:] for row in matrix]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        pivot = m[k][k]
        for i in range(k + 1, n):
            row_i = m[i]
            row_k = m[k]
            head = row_i[k]
            for j in range(k + 1, n):
                row_i[j] = (pivot * row_i[j] - head * row_k[j]) // prev
        prev = pivot
    return sign * m[n - 1][n - 1]


def leading_minor_dets(matrix: IntMatrix) -> list[int]:
    """Determinants of all leading principal minors, exactly.

    Runs Bareiss without row exchanges; after eliminating column k the
    (k, k) entry equals the determinant of the leading (k+1) x (k+1)
    submatrix.  A zero pivot means some leading minor is singular, which
    raises DegenerateMatrix since later minors then have no meaning here.
    """
    n = len(matrix)
    if any(len(row) != n for row in matrix):
        raise ValueError("matrix must be square")
    m = [row[:] for row in matrix]
    dets: list[int] = []
    prev = 1
    for k in range(n):
        pivot = m[k][k]
        if pivot == 0:
            raise DegenerateMatrix(f"leading {k + 1} x {k + 1} minor is singular")
        dets.append(pivot)
        if k == n - 1:
            break
        for i in range(k + 1, n):
            row_i = m[i]
            row_k = m[k]
            head = row_i[k]
            for j in range(k + 1, n):
                row_i[j] = (pivot * row_i[j] - head * row_k[j]) // prev
        prev = pivot
    return dets
