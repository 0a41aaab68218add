from fractions import Fraction
from math import lcm
from typing import List, Sequence

from algebra.polynomial import Scalar, to_rational


def _integer_rows(matrix: Sequence[Sequence[Scalar]]) -> List[List[int]]:
    rows = []
    for row in matrix:
        values = [to_rational(v) for v in row]
        scale = 1
        for v in values:
            scale = lcm(scale, v.denominator)
        rows.append([int(v * scale) for v in values])
    return rows


def exact_rank(matrix: Sequence[Sequence[Scalar]]) -> int:
    """Rank over Q by fraction-free (Bareiss) elimination.

    Rows are first cleared of denominators; scaling rows leaves the rank unchanged.
    """
    m = _integer_rows(matrix)
    if not m or not m[0]:
        return 0
    n_rows = len(m)
    n_cols = len(m[0])
    rank = 0
    previous = 1
    for piv_c in range(n_cols):
        for i_row in range(rank, n_rows):
            if m[i_row][piv_c] != 0:
                break
        else:
            continue
        if i_row != rank:
            m[rank], m[i_row] = m[i_row], m[rank]
        pivot = m[rank][piv_c]
        for r in range(rank + 1, n_rows):
            factor = m[r][piv_c]
            for c in range(piv_c + 1, n_cols):
                # Exact by Sylvester's identity.
                m[r][c] = (m[r][c] * pivot - factor * m[rank][c]) // previous
            m[r][piv_c] = 0
        previous = pivot
        rank += 1
        if rank == n_rows:
            break
    return rank


def exact_solve(matrix: Sequence[Sequence[Scalar]], rhs: Sequence[Scalar]) -> List[Fraction]:
    """Solves the square system ``matrix @ x = rhs`` over Q.

    Raises:
        ValueError: If the matrix is not square or is singular.
    """
    m = [[to_rational(v) for v in row] for row in matrix]
    t = [to_rational(v) for v in rhs]
    n = len(m)
    if any(len(row) != n for row in m) or len(t) != n:
        raise ValueError("exact_solve expects a square system")
    for piv in range(n):
        for i_row in range(piv, n):
            if m[i_row][piv] != 0:
                break
        else:
            raise ValueError("singular system")
        if i_row != piv:
            m[piv], m[i_row] = m[i_row], m[piv]
            t[piv], t[i_row] = t[i_row], t[piv]
        fp = m[piv][piv]
        for r in range(piv + 1, n):
            fr = m[r][piv]
            if fr == 0:
                continue
            frp = fr / fp
            for c in range(piv, n):
                m[r][c] -= m[piv][c] * frp
            t[r] -= t[piv] * frp
    sol = [Fraction(0)] * n
    for r in range(n - 1, -1, -1):
        s = t[r] - sum((m[r][c] * sol[c] for c in range(r + 1, n)), Fraction(0))
        sol[r] = s / m[r][r]
    return sol
