"""Numerical rank certification and aligned subspace pairs from commuting diagonals.

A subspace pair ``(V, Vp)`` is built from generators ``T_1..T_G`` (diagonal)
and a seed column ``w``: the columns of ``V`` are ``prod_i T_i**a_i @ w`` for
exponent tuples ``a`` in ``{1..n}**G``, those of ``Vp`` the same products for
``a`` in ``{1..n+1}**G``. Because diagonal matrices commute, ``T_i`` maps the
column at ``a`` onto the ``Vp`` column at ``a + e_i``, so ``T_i V`` lies in
the span of ``Vp`` by index arithmetic alone.
"""

import itertools
from dataclasses import dataclass, field

import numpy as np

from .exceptions import DegeneracyError, InputError, ParameterError
from .validation import as_diagonal, bounded_draw, check_count, check_matrix, make_rng

RANK_TOL = 1e-9


def numeric_rank(A, rel_tol=RANK_TOL):
    """Rank of ``A`` relative to its largest singular value.

    Returns
    -------
    rank : int
        Number of singular values ``>= rel_tol * s_max``.
    ratio : float
        ``s_min / s_max`` over the ``min(A.shape)`` singular values; 0 for a
        zero matrix.
    """
    if not 0 < rel_tol < 1:
        raise ParameterError(f"rel_tol must lie in (0, 1), got {rel_tol}")
    A = check_matrix(A)
    s = np.linalg.svd(A, compute_uv=False)
    if s[0] == 0:
        return 0, 0.0
    return int(np.sum(s >= rel_tol * s[0])), float(s[-1] / s[0])


def lemma1_matrix(M, K=1, seed=0, h_min=0.5, h_max=2.0):
    """Random ``M x M`` matrix whose row-``i`` entries are distinct monomials.

    Entry ``(i, j)`` (1-based ``j``) is ``X[i,1]**j * prod_{k>=2} X[i,k]**b_k(j-1)``
    where ``b_k(x)`` is bit ``k-2`` of ``x``. The powers of ``X[i,1]`` already
    make every row's monomials pairwise different; extra variables only vary
    the pattern. Variables are bounded-support draws, independent per row.
    """
    M = check_count(M, "M")
    K = check_count(K, "K")
    rng = make_rng(seed, "lemma1", M, K)
    X = bounded_draw(rng, (M, K), h_min, h_max)
    expo = np.zeros((M, K), dtype=int)
    expo[:, 0] = np.arange(1, M + 1)
    for k in range(1, K):
        expo[:, k] = (np.arange(M) >> (k - 1)) & 1
    # A[i, j] = prod_k X[i, k] ** expo[j, k]
    return np.prod(X[:, None, :] ** expo[None, :, :], axis=2)


@dataclass(frozen=True)
class SubspacePair:
    """Aligned pair ``(V, Vp)`` with the exponent bookkeeping of its columns.

    ``V`` and ``Vp`` hold unit-norm columns; ``v_scale`` / ``vp_scale`` are
    the norms of the raw monomial columns, so ``V[:, c] * v_scale[c]`` is the
    raw product ``prod_i T_i**a_i @ w``.
    """

    V: np.ndarray = field(repr=False)
    Vp: np.ndarray = field(repr=False)
    n: int
    generators: tuple = field(repr=False)
    w: np.ndarray = field(repr=False)
    exponents: tuple = field(repr=False)
    vp_exponents: tuple = field(repr=False)
    v_scale: np.ndarray = field(repr=False)
    vp_scale: np.ndarray = field(repr=False)

    @property
    def gamma(self):
        return len(self.generators)

    @property
    def mu(self):
        return self.V.shape[0]

    @property
    def exponent_index(self):
        """Column of ``V`` -> exponent tuple."""
        return dict(enumerate(self.exponents))

    def vp_column(self, alpha):
        """Column index in ``Vp`` of the exponent tuple ``alpha`` (entries 1..n+1)."""
        col = 0
        for a in alpha:
            if not 1 <= a <= self.n + 1:
                raise IndexError(f"exponent {alpha} outside {{1..{self.n + 1}}}")
            col = col * (self.n + 1) + (a - 1)
        return col

    def shifted_column(self, c, i):
        """``Vp`` column index that generator ``i`` maps column ``c`` of ``V`` to."""
        alpha = list(self.exponents[c])
        alpha[i] += 1
        return self.vp_column(alpha)

    def raw_V(self):
        return self.V * self.v_scale

    def raw_Vp(self):
        return self.Vp * self.vp_scale


def _monomial_columns(T, w, top):
    exps = tuple(itertools.product(range(1, top + 1), repeat=len(T)))
    cols = np.empty((w.shape[0], len(exps)))
    for c, alpha in enumerate(exps):
        col = w.copy()
        for t, a in zip(T, alpha):
            col *= t ** a
        cols[:, c] = col
    scale = np.linalg.norm(cols, axis=0)
    return cols / scale, scale, exps


def build_subspace_pair(T, w, n, strict=True):
    """Construct the aligned pair for generators ``T`` and seed column ``w``.

    Parameters
    ----------
    T : sequence of diagonal matrices (or their 1-D diagonals), all length mu
    w : array of length mu, no zero entries
    n : int
        Alignment order. ``V`` gets ``n**G`` columns, ``Vp`` gets ``(n+1)**G``.
    strict : bool
        Require ``mu > (n+1)**G``; with ``False`` only ``mu >= (n+1)**G``.

    Columns are ordered lexicographically by exponent tuple.
    """
    n = check_count(n, "n")
    diags = [as_diagonal(t, f"T[{k}]") for k, t in enumerate(T)]
    w = np.asarray(w, dtype=float).reshape(-1)
    mu = w.shape[0]
    G = len(diags)
    if any(d.shape != (mu,) for d in diags):
        raise ParameterError("generators and w must share the extension length")
    need = (n + 1) ** G
    if (strict and mu <= need) or mu < need:
        raise ParameterError(f"extension length {mu} too short for order {n} with "
                             f"{G} generators (needs > {need})")
    if not np.all(np.isfinite(w)) or any(not np.all(np.isfinite(d)) for d in diags):
        raise InputError("generators and w must be finite")
    if np.any(w == 0):
        raise DegeneracyError("seed column w has a zero entry")
    for k, d in enumerate(diags):
        if np.any(d == 0):
            raise DegeneracyError(f"generator {k} has a zero diagonal entry")
    Vp, vp_scale, vp_exps = _monomial_columns(diags, w, n + 1)
    # V is sliced out of Vp so containment is verbatim, not just up to rounding
    exps = tuple(itertools.product(range(1, n + 1), repeat=G))
    keep = [sum((a - 1) * (n + 1) ** (G - 1 - k) for k, a in enumerate(alpha)) for alpha in exps]
    V, v_scale = Vp[:, keep], vp_scale[keep]
    for arr in (V, Vp, v_scale, vp_scale, w):
        arr.setflags(write=False)
    return SubspacePair(V, Vp, n, tuple(diags), w, exps, vp_exps, v_scale, vp_scale)


def check_containment(T_i, pair, tol=RANK_TOL):
    """Whether ``T_i @ V`` lies inside the span of ``Vp``.

    Two tests must both hold: every normalized column of ``T_i V`` equals
    (up to sign) some column of ``Vp`` within ``tol`` in max-abs error, and the
    least-squares residual of ``T_i V`` against ``Vp`` is below ``tol``
    relative to each column's norm.
    """
    t = as_diagonal(T_i, "T_i")
    if t.shape != (pair.mu,):
        raise ParameterError("T_i does not match the pair's extension length")
    X = t[:, None] * pair.V
    Xn = X / np.linalg.norm(X, axis=0)
    # cosine similarity picks the candidate column; the max-abs test confirms it
    sims = pair.Vp.T @ Xn
    best = np.argmax(np.abs(sims), axis=0)
    signs = np.sign(sims[best, np.arange(X.shape[1])])
    err = np.max(np.abs(Xn - pair.Vp[:, best] * signs), axis=0)
    if np.any(err >= tol):
        return False
    return span_residual(X, pair.Vp) < tol


def span_residual(X, B):
    """Largest relative least-squares residual of the columns of ``X`` against span(B)."""
    X = np.atleast_2d(np.asarray(X, dtype=float).T).T
    if B.shape[1] == 0:
        return 1.0 if np.any(X) else 0.0
    Q, _ = np.linalg.qr(B)
    R = X - Q @ (Q.T @ X)
    norms = np.linalg.norm(X, axis=0)
    norms[norms == 0] = 1.0
    return float(np.max(np.linalg.norm(R, axis=0) / norms))


def random_generators(G, mu, seed=0, h_min=0.5, h_max=2.0):
    """``G`` random diagonal generators and a seed column, as 1-D arrays."""
    rng = make_rng(seed, "generators", G, mu)
    T = [bounded_draw(rng, mu, h_min, h_max) for _ in range(G)]
    w = bounded_draw(rng, mu, h_min, h_max)
    return T, w
