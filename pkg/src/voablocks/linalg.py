"""Exact linear algebra over the rationals.

Gaussian elimination with deterministic pivoting (first nonzero entry in
column order, scanning rows top to bottom), solving A x = b with either a
solution, a report of free columns, or an inconsistency certificate: a row
vector y with y A = 0 and y b != 0.
"""

from __future__ import annotations

from fractions import Fraction

__all__ = ["LinSolve", "solve_linear", "mat_mul", "mat_vec", "mat_inverse",
           "mat_one_norm", "vec_one_norm", "identity_matrix"]

F0 = Fraction(0)
F1 = Fraction(1)


class LinSolve:
    """Outcome of an exact linear solve.

    ``solution`` is a particular solution (free variables set to 0) or None;
    ``free`` lists the free column indices; ``certificate`` is a left-kernel
    row witnessing inconsistency (None when consistent)."""

    def __init__(self, solution, free, certificate, rank):
        self.solution = solution
        self.free = free
        self.certificate = certificate
        self.rank = rank

    @property
    def consistent(self) -> bool:
        return self.certificate is None

    @property
    def unique(self) -> bool:
        return self.consistent and not self.free


def solve_linear(rows, rhs) -> LinSolve:
    """Solve (rows) x = rhs exactly; rows is a list of equal-length lists."""
    m = len(rows)
    ncols = len(rows[0]) if m else 0
    a = [[Fraction(x) for x in row] for row in rows]
    b = [Fraction(x) for x in rhs]
    if len(b) != m or any(len(row) != ncols for row in a):
        raise ValueError("shape mismatch")
    # trans tracks the row operations: trans . original = current
    trans = [[F1 if i == j else F0 for j in range(m)] for i in range(m)]
    pivots = []  # (row, col)
    prow = 0
    for col in range(ncols):
        sel = None
        for r in range(prow, m):
            if a[r][col]:
                sel = r
                break
        if sel is None:
            continue
        if sel != prow:
            a[prow], a[sel] = a[sel], a[prow]
            b[prow], b[sel] = b[sel], b[prow]
            trans[prow], trans[sel] = trans[sel], trans[prow]
        inv = F1 / a[prow][col]
        a[prow] = [x * inv for x in a[prow]]
        b[prow] *= inv
        trans[prow] = [x * inv for x in trans[prow]]
        for r in range(m):
            if r != prow and a[r][col]:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[prow])]
                b[r] -= f * b[prow]
                trans[r] = [x - f * y for x, y in zip(trans[r], trans[prow])]
        pivots.append((prow, col))
        prow += 1
        if prow == m:
            break
    rank = len(pivots)
    for r in range(rank, m):
        if b[r]:
            return LinSolve(None, [], list(trans[r]), rank)
    pivot_cols = {col for _, col in pivots}
    free = [c for c in range(ncols) if c not in pivot_cols]
    x = [F0] * ncols
    for r, col in pivots:
        x[col] = b[r]
    return LinSolve(x, free, None, rank)


def identity_matrix(n: int):
    return [[F1 if i == j else F0 for j in range(n)] for i in range(n)]


def mat_mul(a, b):
    n, k, m = len(a), len(b), len(b[0]) if b else 0
    return [[sum((a[i][t] * b[t][j] for t in range(k)), F0) for j in range(m)]
            for i in range(n)]


def mat_vec(a, v):
    return [sum((row[j] * v[j] for j in range(len(v))), F0) for row in a]


def mat_inverse(a):
    """Exact inverse; raises ValueError when singular."""
    n = len(a)
    cols = []
    for j in range(n):
        e = [F1 if i == j else F0 for i in range(n)]
        res = solve_linear(a, e)
        if not res.unique:
            raise ValueError("matrix is singular")
        cols.append(res.solution)
    return [[cols[j][i] for j in range(n)] for i in range(n)]


def vec_one_norm(v) -> Fraction:
    return sum((abs(Fraction(x)) for x in v), F0)


def mat_one_norm(a) -> Fraction:
    """Operator norm induced by the vector 1-norm: max column abs sum."""
    if not a or not a[0]:
        return F0
    return max(sum((abs(row[j]) for row in a), F0) for j in range(len(a[0])))
