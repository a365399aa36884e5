"""Degrees-of-freedom region outerbound of the M x N X network as a small LP.

The DoF vector is indexed by message ``(j, i)`` (receiver ``j``, transmitter
``i``, both 1-based) and flattened row-major: variable ``(j-1)*M + (i-1)``.
"""

from dataclasses import dataclass, field
from fractions import Fraction

from .exceptions import ParameterError
from .simplex import simplex_max
from .validation import check_count

FEASIBILITY_TOL = 1e-9


@dataclass(frozen=True)
class DofRegionSpec:
    """Network dimensions, antenna counts and absent messages."""

    M: int
    N: int
    At: tuple = None
    Ar: tuple = None
    null_mask: frozenset = frozenset()

    def __post_init__(self):
        M = check_count(self.M, "M")
        N = check_count(self.N, "N")
        At = tuple(self.At) if self.At is not None else (1,) * M
        Ar = tuple(self.Ar) if self.Ar is not None else (1,) * N
        if len(At) != M or len(Ar) != N:
            raise ParameterError("antenna lists must have lengths M and N")
        for a in At + Ar:
            check_count(a, "antenna count")
        mask = frozenset((int(j), int(i)) for j, i in self.null_mask)
        for j, i in mask:
            if not (1 <= j <= N and 1 <= i <= M):
                raise ParameterError(f"null-mask entry {(j, i)} outside {N}x{M}")
        object.__setattr__(self, "At", At)
        object.__setattr__(self, "Ar", Ar)
        object.__setattr__(self, "null_mask", mask)

    def var(self, j, i):
        return (j - 1) * self.M + (i - 1)


@dataclass
class LinearProgram:
    """``max objective.d`` subject to ``coeffs.d <= rhs`` rows, ``d >= 0``, masked ``d = 0``."""

    num_vars: int
    objective: list
    constraints: list
    zero_vars: frozenset = frozenset()
    labels: list = field(default_factory=list)
    nonneg: bool = True


def region_constraints(spec, weights=None):
    """Build the outerbound LP: one row per (transmitter m, receiver n) pair.

    Row ``(m, n)`` bounds the messages that leave transmitter ``m`` or reach
    receiver ``n``: their DoF sum is at most ``max(At[m], Ar[n])``.
    ``weights`` maps ``(j, i)`` to an objective weight (default: all ones).
    """
    M, N = spec.M, spec.N
    nv = M * N
    if weights is None:
        objective = [1] * nv
    else:
        objective = [0] * nv
        for (j, i), w in dict(weights).items():
            if not (1 <= j <= N and 1 <= i <= M):
                raise ParameterError(f"weight key {(j, i)} outside {N}x{M}")
            objective[spec.var(j, i)] = w
    constraints, labels = [], []
    for m in range(1, M + 1):
        for n in range(1, N + 1):
            row = [0] * nv
            for q in range(1, N + 1):
                row[spec.var(q, m)] += 1
            for p in range(1, M + 1):
                row[spec.var(n, p)] += 1
            row[spec.var(n, m)] -= 1
            constraints.append((row, max(spec.At[m - 1], spec.Ar[n - 1])))
            labels.append((m, n))
    zero = frozenset(spec.var(j, i) for j, i in spec.null_mask)
    return LinearProgram(nv, objective, constraints, zero, labels)


@dataclass(frozen=True)
class LPSolution:
    value: object
    x: tuple
    binding: tuple
    exact: bool

    def as_matrix(self, M, N):
        """Optimizer reshaped to ``d[j][i]`` (0-based lists)."""
        return [list(self.x[j * M:(j + 1) * M]) for j in range(N)]


def solve_lp(lp):
    """Solve the outerbound LP; masked variables are removed before pivoting.

    Returns an :class:`LPSolution` whose ``binding`` lists the constraint
    rows met with equality (exactly, or within 1e-9 in float mode).
    """
    free = [v for v in range(lp.num_vars) if v not in lp.zero_vars]
    c = [lp.objective[v] for v in free]
    A = [[row[v] for v in free] for row, _ in lp.constraints]
    b = [rhs for _, rhs in lp.constraints]
    res = simplex_max(c, A, b)
    zero = Fraction(0) if res.exact else 0.0
    x = [zero] * lp.num_vars
    for k, v in enumerate(free):
        x[v] = res.x[k]
    binding = []
    for idx, (row, rhs) in enumerate(lp.constraints):
        lhs = sum(a * xv for a, xv in zip(row, x))
        slack = rhs - lhs
        if res.exact:
            if slack < 0:
                raise ArithmeticError("exact optimizer violates a constraint")
            if slack == 0:
                binding.append(idx)
        else:
            if slack < -FEASIBILITY_TOL:
                raise ArithmeticError("optimizer violates a constraint beyond tolerance")
            if abs(slack) <= FEASIBILITY_TOL:
                binding.append(idx)
    return LPSolution(res.value, tuple(x), tuple(binding), res.exact)


def max_total_dof(M, N, null_mask=(), At=None, Ar=None):
    """Optimal unweighted sum of the outerbound LP."""
    spec = DofRegionSpec(M, N, At, Ar, frozenset(null_mask))
    return solve_lp(region_constraints(spec)).value


def total_dof_bound(M, N):
    """``MN / (M + N - 1)`` as an exact fraction."""
    M = check_count(M, "M")
    N = check_count(N, "N")
    return Fraction(M * N, M + N - 1)


def mimo_innerbound_formula(M, N, A):
    """``A M N / (M + N - 1/A)``: achievable total DoF with ``A`` antennas per node."""
    M = check_count(M, "M")
    N = check_count(N, "N")
    A = check_count(A, "A")
    return Fraction(A * M * N) / (M + N - Fraction(1, A))
