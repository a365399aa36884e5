"""Beamforming and zero-forcing plans for single-antenna X networks.

Three constructions are provided:

* ``build_mx2`` -- perfect alignment on the ``M x 2`` network over an
  ``M+1`` symbol extension, one stream per message.
* ``reciprocal`` / ``build_2xm_reciprocal`` -- swap transmitters and
  receivers, reusing zero-forcing vectors as beamformers and vice versa.
* ``build_general`` -- partial alignment for any ``M x N`` over the
  ``N(n+1)**G + (M-1)n**G`` extension, ``G = (M-1)(N-1)``.

Message keys are ``(j, i)``: receiver ``j``, transmitter ``i``, both 1-based.
Receiver ``j`` decodes its streams by projecting onto the rows of the inverse
of ``Lambda_j = [desired columns | basis of the aligned interference]``.
"""

import dataclasses
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .alignment import RANK_TOL, build_subspace_pair, numeric_rank, span_residual
from .channel import DEFAULT_H_MAX, DEFAULT_H_MIN
from .exceptions import DegeneracyError, ParameterError, RankFailureError, StateError
from .validation import bounded_draw, check_count, make_rng

PERFECT_MX2 = "perfect_Mx2"
RECIPROCAL_2XM = "reciprocal_2xM"
RECIPROCAL = "reciprocal"
GENERAL = "general_partial"

BASES = ("svd", "orthonormal", "monomial")


@dataclass(frozen=True)
class BeamformingPlan:
    """Per-message beamformers, optional zero-forcers, and stream bookkeeping.

    ``Vmat[(j, i)]`` is ``mu x streams[(j, i)]``; ``Umat`` has the same
    layout once zero-forcing has been computed, else it is ``None``.
    """

    M: int
    N: int
    mu: int
    streams: dict
    Vmat: dict = field(repr=False)
    Umat: dict = field(default=None, repr=False)
    kind: str = PERFECT_MX2
    n: int = None
    meta: dict = field(default_factory=dict, repr=False)

    @property
    def total_streams(self):
        return sum(self.streams.values())

    def messages(self):
        return [(j, i) for j in range(1, self.N + 1) for i in range(1, self.M + 1)]

    def stream_index(self):
        """Every stream as ``(j, i, s)`` in receiver-major, transmitter-minor order."""
        return [(j, i, s) for (j, i) in self.messages() for s in range(self.streams[(j, i)])]


@dataclass(frozen=True)
class AlignmentReport:
    """Outcome of :func:`verify_plan`; failures are reported, never raised."""

    interference_dim: dict
    expected_interference_dim: dict
    lambda_rank: dict
    lambda_ratio: dict
    max_alignment_residual: float
    max_cross_gain: float
    achieved_dof: Fraction
    tol: float
    failures: tuple = ()

    @property
    def passed(self):
        return not self.failures


def achieved_dof(plan):
    """Total streams over extension length, as an exact fraction."""
    return Fraction(plan.total_streams, plan.mu)


def general_extension_length(M, N, n):
    """Extension length ``N(n+1)**G + (M-1)n**G`` with ``G = (M-1)(N-1)``."""
    G = (M - 1) * (N - 1)
    return N * (n + 1) ** G + (M - 1) * n ** G


def general_dof(M, N, n):
    """DoF of the order-``n`` partial alignment scheme, as an exact fraction."""
    G = (M - 1) * (N - 1)
    return Fraction(N * (n + 1) ** G + (M - 1) * N * n ** G, general_extension_length(M, N, n))


def _check_ext(ext):
    if np.any(ext.diag == 0):
        raise DegeneracyError("channel extension has a zero gain")


# -- receiver-side geometry ---------------------------------------------------

def desired_columns(plan, ext, j):
    """``[H^{j1} V^{j1} | ... | H^{jM} V^{jM}]`` at receiver ``j``."""
    blocks = [ext.h(j, i)[:, None] * plan.Vmat[(j, i)] for i in range(1, plan.M + 1)]
    return np.hstack(blocks)


def interference_columns(plan, ext, j):
    """Every column received at ``j`` that carries another receiver's stream."""
    blocks = [ext.h(j, i)[:, None] * plan.Vmat[(l, i)]
              for l in range(1, plan.N + 1) if l != j for i in range(1, plan.M + 1)]
    if not blocks:
        return np.zeros((plan.mu, 0))
    return np.hstack(blocks)


def _structured_basis(plan):
    return plan.kind in (PERFECT_MX2, GENERAL)


def interference_basis(plan, ext, j, tol=RANK_TOL):
    """Columns spanning the interference at ``j``.

    For the aligned constructions this is the interference from transmitter 1,
    ``H^{j1} V^{l1}`` for ``l != j``, which every other interferer aligns
    with. Otherwise the dominant left singular vectors of all interference.
    """
    if _structured_basis(plan):
        blocks = [ext.h(j, 1)[:, None] * plan.Vmat[(l, 1)]
                  for l in range(1, plan.N + 1) if l != j]
        return np.hstack(blocks) if blocks else np.zeros((plan.mu, 0))
    I = interference_columns(plan, ext, j)
    if I.shape[1] == 0:
        return I
    U, s, _ = np.linalg.svd(I, full_matrices=False)
    r = int(np.sum(s >= tol * s[0])) if s[0] > 0 else 0
    return U[:, :r]


def lambda_matrix(plan, ext, j, tol=RANK_TOL):
    return np.hstack([desired_columns(plan, ext, j), interference_basis(plan, ext, j, tol)])


# -- zero forcing --------------------------------------------------------------

def compute_zero_forcing(plan, ext, tol=RANK_TOL):
    """Return a copy of ``plan`` with ``Umat`` set from the rows of ``Lambda_j^{-1}``.

    Raises
    ------
    RankFailureError
        If some ``Lambda_j`` is not square or is rank deficient at ``tol``.
    """
    Umat = {}
    for j in range(1, plan.N + 1):
        L = lambda_matrix(plan, ext, j, tol)
        rank, ratio = numeric_rank(L, tol)
        if L.shape[1] != plan.mu:
            raise RankFailureError(
                j, ratio, f"receiver {j}: decoding matrix is {L.shape[0]}x{L.shape[1]}, "
                          f"not square")
        if rank < plan.mu:
            raise RankFailureError(j, ratio)
        rows = np.linalg.inv(L)
        start = 0
        for i in range(1, plan.M + 1):
            k = plan.streams[(j, i)]
            Umat[(j, i)] = rows[start:start + k].T.copy()
            start += k
    return dataclasses.replace(plan, Umat=Umat)


def cross_gains(plan, ext, j):
    """Gains ``u_s^T H^{j m} v_c`` from every stream ``c`` onto each stream ``s`` of ``j``.

    Rows follow the desired streams of ``j``; columns follow
    ``plan.stream_index()``.
    """
    if plan.Umat is None:
        raise StateError("plan has no zero-forcing vectors")
    U = np.hstack([plan.Umat[(j, i)] for i in range(1, plan.M + 1)])
    cols = np.hstack([ext.h(j, i)[:, None] * plan.Vmat[(l, i)] for (l, i) in plan.messages()])
    return U.T @ cols, U, cols


def _max_cross_gain(plan, ext):
    worst, weakest = 0.0, np.inf
    index = plan.stream_index()
    for j in range(1, plan.N + 1):
        G, U, cols = cross_gains(plan, ext, j)
        scale = np.outer(np.linalg.norm(U, axis=0), np.linalg.norm(cols, axis=0))
        rel = np.abs(G) / np.where(scale > 0, scale, 1.0)
        own = [c for c, (l, _, _) in enumerate(index) if l == j]
        mask = np.ones_like(rel, dtype=bool)
        mask[np.arange(len(own)), own] = False
        if mask.any():
            worst = max(worst, float(rel[mask].max()))
        if own:
            weakest = min(weakest, float(rel[np.arange(len(own)), own].min()))
    return worst, weakest


# -- perfect M x 2 -------------------------------------------------------------

def build_mx2(ext, seed=0, h_min=DEFAULT_H_MIN, h_max=DEFAULT_H_MAX):
    """Perfect alignment on the ``M x 2`` network, ``mu = M + 1``.

    ``v^{11}`` and ``v^{21}`` are bounded random draws; the other
    transmitters pick ``v^{2m} = H^{11} v^{21} / H^{1m}`` and
    ``v^{1m} = H^{21} v^{11} / H^{2m}`` entrywise, so at each receiver every
    interferer lands exactly on the interference from transmitter 1. Entry
    ``l`` of every beamformer depends only on slot ``l`` of the channel.
    """
    M = ext.M
    if ext.N != 2:
        raise ParameterError(f"perfect M x 2 scheme needs N = 2, got N = {ext.N}")
    if ext.mu != M + 1:
        raise ParameterError(f"perfect M x 2 scheme needs mu = M + 1 = {M + 1}, got {ext.mu}")
    _check_ext(ext)
    rng = make_rng(seed, "mx2")
    p = bounded_draw(rng, ext.mu, h_min, h_max)
    q = bounded_draw(rng, ext.mu, h_min, h_max)
    V = {(1, 1): p, (2, 1): q}
    for m in range(2, M + 1):
        V[(2, m)] = ext.h(1, 1) * q / ext.h(1, m)
        V[(1, m)] = ext.h(2, 1) * p / ext.h(2, m)
    Vmat = {key: v[:, None] for key, v in V.items()}
    streams = {key: 1 for key in Vmat}
    return BeamformingPlan(M, 2, ext.mu, streams, Vmat, None, PERFECT_MX2, None,
                           {"seed": seed})


# -- reciprocity -----------------------------------------------------------------

def reciprocal(plan, ext, tol=RANK_TOL, kind=RECIPROCAL):
    """Dual plan on the network with transmitters and receivers swapped.

    Dual beamformers are the primal zero-forcers and dual zero-forcers are
    the primal beamformers: ``Vbar[(i, j)] = U[(j, i)]``,
    ``Ubar[(i, j)] = V[(j, i)]``. The dual channel is ``ext.transpose()``.
    """
    if plan.Umat is None:
        raise StateError("primal plan has no zero-forcing vectors")
    report = verify_plan(plan, ext, tol)
    if not report.passed:
        raise StateError("primal plan failed verification: " + "; ".join(report.failures))
    Vbar = {(i, j): plan.Umat[(j, i)].copy() for (j, i) in plan.messages()}
    Ubar = {(i, j): plan.Vmat[(j, i)].copy() for (j, i) in plan.messages()}
    streams = {(i, j): plan.streams[(j, i)] for (j, i) in plan.messages()}
    meta = {"primal_kind": plan.kind, "seed": plan.meta.get("seed")}
    return BeamformingPlan(plan.N, plan.M, plan.mu, streams, Vbar, Ubar, kind, plan.n, meta)


def build_2xm_reciprocal(primal, ext_primal, tol=RANK_TOL):
    """Dual ``2 x M`` plan of a verified perfect ``M x 2`` plan."""
    if primal.kind != PERFECT_MX2:
        raise StateError(f"expected a {PERFECT_MX2} primal, got {primal.kind}")
    return reciprocal(primal, ext_primal, tol, kind=RECIPROCAL_2XM)


# -- general M x N partial alignment --------------------------------------------

def _orthonormal(A):
    Q, _ = np.linalg.qr(A)
    return Q


def _whiten_blocks(Vmat, M, N, ext):
    """Rotate each message basis so its zero-forced outputs are orthogonal.

    At receiver ``k`` the block ``H^{ki} V^{ki}`` is projected off everything
    else that receiver sees, and ``V^{ki}`` is replaced by ``V^{ki} W`` with
    ``W`` the right singular vectors of that projection. Spans are unchanged,
    so every alignment relation survives.
    """
    out = {}
    for k in range(1, N + 1):
        interf = [ext.h(k, 1)[:, None] * Vmat[(l, 1)] for l in range(1, N + 1) if l != k]
        blocks = {i: ext.h(k, i)[:, None] * Vmat[(k, i)] for i in range(1, M + 1)}
        for i in range(1, M + 1):
            others = [blocks[x] for x in blocks if x != i] + interf
            A = blocks[i]
            if others:
                Q = _orthonormal(np.hstack(others))
                A = A - Q @ (Q.T @ A)
            _, _, Wt = np.linalg.svd(A, full_matrices=False)
            out[(k, i)] = Vmat[(k, i)] @ Wt.T
    return out


def build_general(M, N, n, ext, seed=0, basis="svd", h_min=DEFAULT_H_MIN, h_max=DEFAULT_H_MAX):
    """Order-``n`` partial alignment plan for the ``M x N`` network.

    For each receiver ``k`` the generators are ``T^{ji} = H^{ji} / H^{j1}``
    for ``j != k`` and ``i >= 2``; the subspace pair built from them and a
    random seed column ``w^k`` gives ``V^{k1} = Vp`` (``(n+1)**G`` streams)
    and ``V^{k2} = ... = V^{kM} = V`` (``n**G`` streams each). Then at any
    receiver ``j != k``, ``H^{ji} V^{ki} = H^{j1} T^{ji} V^{k2}`` falls
    inside the span of ``H^{j1} V^{k1}``.

    Parameters
    ----------
    basis : {"svd", "orthonormal", "monomial"}
        Basis used for each message's span. ``"monomial"`` keeps the
        unit-normalized monomial columns; ``"orthonormal"`` orthonormalizes
        them; ``"svd"`` additionally rotates each basis so the zero-forced
        outputs of its streams are orthogonal (best finite-SNR conditioning).
        All three span the same subspaces.
    """
    M = check_count(M, "M")
    N = check_count(N, "N")
    n = check_count(n, "n")
    if basis not in BASES:
        raise ParameterError(f"basis must be one of {BASES}, got {basis!r}")
    if (ext.M, ext.N) != (M, N):
        raise ParameterError(f"extension is {ext.M}x{ext.N}, plan is {M}x{N}")
    mu = general_extension_length(M, N, n)
    if ext.mu != mu:
        raise ParameterError(f"order {n} needs extension length {mu}, got {ext.mu}")
    _check_ext(ext)
    G = (M - 1) * (N - 1)
    T = {(j, i): ext.h(j, i) / ext.h(j, 1)
         for j in range(1, N + 1) for i in range(2, M + 1)}
    rng = make_rng(seed, "general")
    W = bounded_draw(rng, (N, mu), h_min, h_max)

    Vmat, pairs, gen_keys = {}, {}, {}
    for k in range(1, N + 1):
        keys = tuple((j, i) for j in range(1, N + 1) if j != k for i in range(2, M + 1))
        gen_keys[k] = keys
        if G == 0:
            # no alignment relations: a single seed column per message
            col = (W[k - 1] / np.linalg.norm(W[k - 1]))[:, None]
            V1 = V2 = col
        else:
            pair = build_subspace_pair([T[key] for key in keys], W[k - 1], n)
            pairs[k] = pair
            V1, V2 = pair.Vp, pair.V
        if basis != "monomial":
            V1, V2 = _orthonormal(V1), _orthonormal(V2)
        Vmat[(k, 1)] = V1
        for i in range(2, M + 1):
            Vmat[(k, i)] = V2
    if basis == "svd":
        Vmat = _whiten_blocks(Vmat, M, N, ext)
    streams = {key: Vmat[key].shape[1] for key in Vmat}
    meta = {"seed": seed, "basis": basis, "pairs": pairs, "generator_keys": gen_keys}
    return BeamformingPlan(M, N, mu, streams, Vmat, None, GENERAL, n, meta)


# -- verification -----------------------------------------------------------------

def expected_interference_dim(plan, j):
    if plan.kind == PERFECT_MX2:
        return 1
    if plan.kind == GENERAL:
        G = (plan.M - 1) * (plan.N - 1)
        return (plan.N - 1) * (plan.n + 1) ** G
    return plan.mu - sum(plan.streams[(j, i)] for i in range(1, plan.M + 1))


def alignment_residual(plan, ext):
    """Largest relative distance of an interferer from the span it must align with."""
    worst = 0.0
    if plan.kind == PERFECT_MX2:
        for j in (1, 2):
            l = 3 - j
            ref = ext.h(j, 1)[:, None] * plan.Vmat[(l, 1)]
            for m in range(2, plan.M + 1):
                x = ext.h(j, m)[:, None] * plan.Vmat[(l, m)]
                worst = max(worst, span_residual(x, ref))
    elif plan.kind == GENERAL:
        for k in range(1, plan.N + 1):
            for j in range(1, plan.N + 1):
                if j == k:
                    continue
                ref = ext.h(k, 1)[:, None] * plan.Vmat[(j, 1)]
                for i in range(2, plan.M + 1):
                    x = ext.h(k, i)[:, None] * plan.Vmat[(j, i)]
                    worst = max(worst, span_residual(x, ref))
    else:
        # interference energy beyond the dimension left free by the desired streams
        for j in range(1, plan.N + 1):
            I = interference_columns(plan, ext, j)
            d = expected_interference_dim(plan, j)
            if I.shape[1] > d:
                s = np.linalg.svd(I, compute_uv=False)
                if s[0] > 0 and d < len(s):
                    worst = max(worst, float(s[d] / s[0]))
    return worst


def verify_plan(plan, ext, tol=RANK_TOL):
    """Check alignment, interference dimension, decodability and zero forcing.

    The report fails when an alignment residual reaches ``tol``, when the
    measured interference dimension differs from the construction's, when a
    ``Lambda_j`` is not a full-rank ``mu x mu`` matrix, or (if zero-forcers
    are present) when any cross gain reaches ``tol`` relative to
    ``|u| |H v|``.
    """
    failures = []
    res = alignment_residual(plan, ext)
    if not res < tol:
        failures.append(f"alignment residual {res:.3e} >= {tol:g}")
    idim, expected, lrank, lratio = {}, {}, {}, {}
    for j in range(1, plan.N + 1):
        I = interference_columns(plan, ext, j)
        idim[j] = numeric_rank(I, tol)[0] if I.shape[1] else 0
        expected[j] = expected_interference_dim(plan, j)
        if idim[j] != expected[j]:
            failures.append(f"receiver {j}: interference dimension {idim[j]} != {expected[j]}")
        L = lambda_matrix(plan, ext, j, tol)
        lrank[j], lratio[j] = numeric_rank(L, tol)
        if L.shape[1] != plan.mu or lrank[j] < plan.mu:
            failures.append(f"receiver {j}: Lambda is {L.shape[0]}x{L.shape[1]} with rank "
                            f"{lrank[j]} (ratio {lratio[j]:.3e})")
    cross = float("nan")
    if plan.Umat is not None:
        cross, weakest = _max_cross_gain(plan, ext)
        if not cross < tol:
            failures.append(f"cross gain {cross:.3e} >= {tol:g}")
        if not weakest > tol:
            failures.append(f"a desired gain vanishes ({weakest:.3e})")
    return AlignmentReport(idim, expected, lrank, lratio, res, cross, achieved_dof(plan),
                           tol, tuple(failures))


def perturb_plan(plan, key, column=0, scale=1e-3, seed=0):
    """Copy of ``plan`` with one beamforming column nudged off its subspace."""
    rng = make_rng(seed, "perturb")
    V = dict(plan.Vmat)
    A = V[key].copy()
    A[:, column] += scale * np.linalg.norm(A[:, column]) * rng.standard_normal(plan.mu)
    V[key] = A
    return dataclasses.replace(plan, Vmat=V, Umat=None)
