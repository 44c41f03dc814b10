"""Exact linear algebra over Q and over the Expr field.

Everything here is fraction-exact; no floating point.  The sparse echelon
form keys columns by arbitrary hashable labels (assigned integer indices in
first-seen order), which is what the coefficient-monomial matrices of vector
fields need.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import NotSolvableError
from .expr import Expr


def rat_rank(rows: list[list[Fraction]]) -> int:
    """Rank of a dense rational matrix (Gaussian elimination on a copy)."""
    m = [list(map(Fraction, r)) for r in rows]
    if not m:
        return 0
    ncols = len(m[0])
    rank = 0
    for col in range(ncols):
        piv = None
        for r in range(rank, len(m)):
            if m[r][col]:
                piv = r
                break
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        inv = Fraction(1) / m[rank][col]
        m[rank] = [x * inv for x in m[rank]]
        for r in range(len(m)):
            if r != rank and m[r][col]:
                f = m[r][col]
                m[r] = [a - f * b for a, b in zip(m[r], m[rank])]
        rank += 1
        if rank == len(m):
            break
    return rank


def rat_solve_unique(rows: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    """Solve A x = b exactly; raises unless the solution exists and is unique."""
    n_unknowns = len(rows[0]) if rows else 0
    aug = [list(map(Fraction, r)) + [Fraction(b)] for r, b in zip(rows, rhs)]
    rank = 0
    piv_cols = []
    for col in range(n_unknowns):
        piv = None
        for r in range(rank, len(aug)):
            if aug[r][col]:
                piv = r
                break
        if piv is None:
            continue
        aug[rank], aug[piv] = aug[piv], aug[rank]
        inv = Fraction(1) / aug[rank][col]
        aug[rank] = [x * inv for x in aug[rank]]
        for r in range(len(aug)):
            if r != rank and aug[r][col]:
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[rank])]
        piv_cols.append(col)
        rank += 1
    for r in range(rank, len(aug)):
        if aug[r][n_unknowns]:
            raise NotSolvableError("inconsistent linear system")
    if rank < n_unknowns:
        raise NotSolvableError("underdetermined linear system")
    sol = [Fraction(0)] * n_unknowns
    for r, col in enumerate(piv_cols):
        sol[col] = aug[r][n_unknowns]
    return sol


class SparseEchelon:
    """Incremental row reduction over Q with hashable column labels.

    Rows are sparse dicts {column label: Fraction}.  Columns receive integer
    indices in first-seen order, so the pivot choice (and hence everything
    downstream) is deterministic for a deterministic insertion sequence.
    """

    def __init__(self):
        self._col_index: dict = {}
        self._rows: list[tuple[int, dict, dict]] = []  # (pivot index, row, combo)

    def _index(self, col) -> int:
        idx = self._col_index.get(col)
        if idx is None:
            idx = len(self._col_index)
            self._col_index[col] = idx
        return idx

    def reduce(self, row: dict) -> tuple[dict, dict]:
        """Reduce `row` against the stored rows.

        Returns (residual row, combination) where combination maps stored-row
        position -> coefficient such that row = residual + sum(coeff * stored).
        """
        work = {self._index(c): Fraction(v) for c, v in row.items() if v}
        combo: dict[int, Fraction] = {}
        for pos, (piv, stored, _c) in enumerate(self._rows):
            f = work.get(piv)
            if not f:
                continue
            combo[pos] = f
            for c, v in stored.items():
                s = work.get(c, Fraction(0)) - f * v
                if s:
                    work[c] = s
                else:
                    work.pop(c, None)
        return work, combo

    def insert(self, row: dict) -> bool:
        """Reduce and store `row`; returns False when it is dependent."""
        work, _combo = self.reduce(row)
        if not work:
            return False
        piv = min(work)
        inv = Fraction(1) / work[piv]
        work = {c: v * inv for c, v in work.items()}
        self._rows.append((piv, work, {}))
        return True

    def __len__(self) -> int:
        return len(self._rows)


def expr_solve(matrix: list[list[Expr]], rhs: list[Expr]) -> list[Expr]:
    """Solve a square system over the Expr field; raises NotSolvableError
    when the matrix is singular or the system inconsistent."""
    n = len(rhs)
    aug = [list(row) + [b] for row, b in zip(matrix, rhs)]
    rank = 0
    piv_cols: list[int] = []
    n_unknowns = len(matrix[0]) if matrix else 0
    for col in range(n_unknowns):
        piv = None
        for r in range(rank, n):
            if not aug[r][col].is_zero:
                piv = r
                break
        if piv is None:
            continue
        aug[rank], aug[piv] = aug[piv], aug[rank]
        inv = aug[rank][col]
        aug[rank] = [x / inv for x in aug[rank]]
        for r in range(n):
            if r != rank and not aug[r][col].is_zero:
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[rank])]
        piv_cols.append(col)
        rank += 1
    for r in range(rank, n):
        if not aug[r][n_unknowns].is_zero:
            raise NotSolvableError("inconsistent linear system over expressions")
    if rank < n_unknowns:
        raise NotSolvableError("singular linear system over expressions")
    sol = [Expr.zero()] * n_unknowns
    for r, col in enumerate(piv_cols):
        sol[col] = aug[r][n_unknowns]
    return sol
