"""Brute-force vertex enumeration for small LPs, independent of the simplex code.

Every vertex of ``{x >= 0, A x <= b}`` in ``k`` variables is the unique
solution of some ``k`` tight rows. Enumerating all such subsets is
exponential, so this is only for certifying small instances.
"""

from fractions import Fraction
from itertools import combinations
from math import lcm

from .exceptions import ParameterError

MAX_FREE_VARS = 9


def _integer_system(A, b):
    """Scale each row of ``[A | b]`` to integers."""
    out = []
    for row, r in zip(A, b):
        vals = [Fraction(v) for v in row] + [Fraction(r)]
        scale = lcm(*(v.denominator for v in vals))
        out.append([int(v * scale) for v in vals])
    return out


def _bareiss_solve(rows):
    """Fraction-free elimination of an integer augmented system.

    Returns ``(numerators, denominator)`` with a positive denominator (not
    necessarily in lowest terms), or ``None`` if the system is singular.
    """
    k = len(rows)
    rows = [list(r) for r in rows]
    prev = 1
    for col in range(k):
        piv = next((r for r in range(col, k) if rows[r][col] != 0), None)
        if piv is None:
            return None
        rows[col], rows[piv] = rows[piv], rows[col]
        p = rows[col][col]
        for r in range(col + 1, k):
            f = rows[r][col]
            rows[r] = [(p * a - f * c) // prev for a, c in zip(rows[r], rows[col])]
        prev = p
    det = rows[k - 1][k - 1] if k else 1
    if det == 0:
        return None
    # back substitution on X = det * x, which is integral (Cramer), so every division is exact
    X = [0] * k
    for r in range(k - 1, -1, -1):
        acc = det * rows[r][k] - sum(rows[r][c] * X[c] for c in range(r + 1, k))
        X[r] = acc // rows[r][r]
    if det < 0:
        X, det = [-v for v in X], -det
    return X, det

def solve_exact(A, b):
    """Solve the square system ``A x = b`` over the rationals; ``None`` if singular."""
    sol = _bareiss_solve(_integer_system(A, b))
    if sol is None:
        return None
    num, den = sol
    return [Fraction(v, den) for v in num]


def enumerate_vertices(A, b):
    """All vertices of ``{x >= 0, A x <= b}``, deduplicated, in discovery order."""
    k = len(A[0]) if A else 0
    if k > MAX_FREE_VARS:
        raise ParameterError(f"vertex enumeration limited to {MAX_FREE_VARS} variables")
    eye = [[1 if c == r else 0 for c in range(k)] for r in range(k)]
    # nonnegativity written as -x <= 0 so every row reads "row . x <= rhs"
    rows = _integer_system([list(r) for r in A] + [[-v for v in e] for e in eye],
                           list(b) + [0] * k)
    seen, out = set(), []
    for subset in combinations(range(len(rows)), k):
        sol = _bareiss_solve([rows[r] for r in subset])
        if sol is None:
            continue
        num, den = sol
        if all(sum(a * v for a, v in zip(row[:k], num)) <= row[k] * den for row in rows):
            key = tuple(Fraction(v, den) for v in num)
            if key not in seen:
                seen.add(key)
                out.append(key)
    return out


def vertex_max(lp):
    """Optimum of an outerbound ``LinearProgram`` by checking every vertex.

    Returns ``(value, maximizers)`` with exact fractions; masked variables
    are dropped before enumeration and reported as zero.
    """
    free = [v for v in range(lp.num_vars) if v not in lp.zero_vars]
    A = [[row[v] for v in free] for row, _ in lp.constraints]
    b = [rhs for _, rhs in lp.constraints]
    c = [Fraction(lp.objective[v]) for v in free]
    best, argmax = None, []
    for x in enumerate_vertices(A, b):
        val = sum(ci * xi for ci, xi in zip(c, x))
        if best is None or val > best:
            best, argmax = val, [x]
        elif val == best:
            argmax.append(x)
    full = []
    for x in argmax:
        d = [Fraction(0)] * lp.num_vars
        for k, v in enumerate(free):
            d[v] = x[k]
        full.append(tuple(d))
    return best, full
