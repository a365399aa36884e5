"""Dense tableau simplex for small LPs of the form max c.x, A x <= b, x >= 0, b >= 0.

The origin is always feasible here, so no phase one is needed. Pivots follow
Bland's rule, which cannot cycle on degenerate vertices. Integer and
``Fraction`` data are solved in exact rational arithmetic; anything else
falls back to floats with a small pivot tolerance.
"""

import numbers
from fractions import Fraction

from .exceptions import ParameterError

FLOAT_EPS = 1e-12


def _is_rational(x):
    return isinstance(x, (numbers.Rational, Fraction)) and not isinstance(x, bool)


class SimplexResult:
    """Optimal value, optimizer and tableau statistics of a solved LP."""

    __slots__ = ("value", "x", "pivots", "exact")

    def __init__(self, value, x, pivots, exact):
        self.value = value
        self.x = x
        self.pivots = pivots
        self.exact = exact

    def __repr__(self):
        return f"SimplexResult(value={self.value}, pivots={self.pivots}, exact={self.exact})"


def _integer_rows(c, A, b):
    """Scale each row of rational data to integers (a positive row scale keeps the LP)."""
    from math import lcm
    out = []
    for row in [list(c)] + [list(r) + [rhs] for r, rhs in zip(A, b)]:
        fr = [Fraction(v) for v in row]
        scale = lcm(*(f.denominator for f in fr)) if fr else 1
        out.append([int(f * scale) for f in fr])
    return out[0], [r[:-1] for r in out[1:]], [r[-1] for r in out[1:]]


def simplex_max(c, A, b, max_pivots=10_000):
    """Maximize ``c.x`` subject to ``A x <= b`` and ``x >= 0``.

    Parameters
    ----------
    c : sequence, length n
    A : sequence of m rows, each length n
    b : sequence, length m, all entries nonnegative

    Returns
    -------
    SimplexResult
        ``x`` is a list of length n. Values are ``Fraction`` when every input
        is rational, floats otherwise.
    """
    m, n = len(A), len(c)
    if any(len(row) != n for row in A) or len(b) != m:
        raise ParameterError("inconsistent LP dimensions")
    data = list(c) + [v for row in A for v in row] + list(b)
    exact = all(_is_rational(v) for v in data)
    if any(v < 0 for v in b):
        raise ParameterError("right-hand sides must be nonnegative (origin feasible)")
    if exact:
        cs, As, bs = _integer_rows(c, A, b)
        # the objective scale is undone by recomputing c.x with the original c
        x, pivots = _pivot_loop(cs, As, bs, 0, max_pivots, fraction_free=True)
        value = sum((Fraction(ci) * xi for ci, xi in zip(c, x)), Fraction(0))
    else:
        x, pivots = _pivot_loop([float(v) for v in c], [[float(v) for v in r] for r in A],
                                [float(v) for v in b], FLOAT_EPS, max_pivots,
                                fraction_free=False)
        value = float(sum(float(ci) * xi for ci, xi in zip(c, x)))
    return SimplexResult(value, x, pivots, exact)


def _pivot_loop(c, A, b, eps, max_pivots, fraction_free):
    """Bland-rule pivoting on the slack-basis tableau.

    In fraction-free mode every row holds integers equal to the true tableau
    times the last pivot element ``denom``; an update divides exactly by the
    previous pivot (Bareiss), so entries stay integral and small.
    """
    m, n = len(A), len(c)
    one = 1 if fraction_free else 1.0
    zero = 0 if fraction_free else 0.0
    rows = [list(A[r]) + [one if k == r else zero for k in range(m)] + [b[r]]
            for r in range(m)]
    cost = list(c) + [zero] * (m + 1)
    basis = list(range(n, n + m))
    denom = 1
    pivots = 0
    while True:
        enter = next((j for j in range(n + m) if cost[j] > eps), None)
        if enter is None:
            break
        leave = None
        for r in range(m):
            a = rows[r][enter]
            if a > eps:
                if leave is None:
                    leave = r
                    continue
                if fraction_free:
                    # rhs/a against the incumbent, cross-multiplied
                    lhs = rows[r][-1] * rows[leave][enter]
                    rhs = rows[leave][-1] * a
                    if lhs < rhs or (lhs == rhs and basis[r] < basis[leave]):
                        leave = r
                else:
                    ratio, best = rows[r][-1] / a, rows[leave][-1] / rows[leave][enter]
                    if ratio < best - eps or (abs(ratio - best) <= eps
                                              and basis[r] < basis[leave]):
                        leave = r
        if leave is None:
            raise ParameterError("LP is unbounded")
        pivots += 1
        if pivots > max_pivots:
            raise ParameterError("pivot limit exceeded")
        prow = rows[leave]
        piv = prow[enter]
        if fraction_free:
            for r in range(m):
                if r != leave:
                    f = rows[r][enter]
                    rows[r] = [(piv * v - f * p) // denom for v, p in zip(rows[r], prow)]
            f = cost[enter]
            cost = [(piv * v - f * p) // denom for v, p in zip(cost, prow)]
            denom = piv
        else:
            prow = [v / piv for v in prow]
            rows[leave] = prow
            for r in range(m):
                if r != leave:
                    f = rows[r][enter]
                    if f:
                        rows[r] = [v - f * p for v, p in zip(rows[r], prow)]
            f = cost[enter]
            cost = [v - f * p for v, p in zip(cost, prow)]
        basis[leave] = enter

    x = [Fraction(0) if fraction_free else 0.0] * n
    for r, var in enumerate(basis):
        if var < n:
            x[var] = Fraction(rows[r][-1], denom) if fraction_free else rows[r][-1]
    return x, pivots
