"""scikit-learn style wrappers: fit a plan to a channel block, transform received vectors.

``fit`` takes an :class:`~xnet.channel.ExtendedChannel` in place of a data
matrix; ``transform`` takes received super-symbols of shape ``(N, mu)`` or
``(n_samples, N, mu)`` and returns the zero-forcing outputs, one column per
stream in :meth:`BeamformingPlan.stream_index` order.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .alignment import RANK_TOL
from .channel import ExtendedChannel
from .exceptions import InputError, ParameterError
from .schemes import (BASES, RECIPROCAL_2XM, build_general, build_mx2,
                      compute_zero_forcing, general_extension_length, reciprocal, verify_plan)


class _PlanEstimator(TransformerMixin, BaseEstimator):

    def _build(self, ext):
        raise NotImplementedError

    def fit(self, X, y=None):
        if not isinstance(X, ExtendedChannel):
            raise InputError("fit expects an ExtendedChannel")
        plan = self._build(X)
        self.plan_ = plan
        self.report_ = verify_plan(plan, X, self.tol)
        self.achieved_dof_ = self.report_.achieved_dof
        self.n_streams_ = plan.total_streams
        self.mu_ = plan.mu
        self._U = [(j, plan.Umat[(j, i)][:, s]) for (j, i, s) in plan.stream_index()]
        return self

    def transform(self, X):
        check_is_fitted(self, "plan_")
        Y = np.asarray(X, dtype=float)
        single = Y.ndim == 2
        if single:
            Y = Y[None]
        if Y.ndim != 3 or Y.shape[1:] != (self.plan_.N, self.mu_):
            raise InputError(f"expected shape (n_samples, {self.plan_.N}, {self.mu_}), got {np.shape(X)}")
        out = np.stack([Y[:, j - 1, :] @ u for j, u in self._U], axis=1)
        return out[0] if single else out

    def streams(self):
        """Stream labels ``(j, i, s)`` matching the output columns of :meth:`transform`."""
        check_is_fitted(self, "plan_")
        return self.plan_.stream_index()


class PerfectAlignment(_PlanEstimator):
    """Exact alignment on ``M x 2`` (direct) or ``2 x N`` (through reciprocity).

    Parameters
    ----------
    seed : int
        Seed of the random beamformer columns.
    tol : float
        Relative tolerance for rank and residual checks.
    """

    def __init__(self, seed=0, tol=RANK_TOL):
        self.seed = seed
        self.tol = tol

    def _build(self, ext):
        if ext.mu != ext.M + 1 and ext.N == 2:
            raise ParameterError(f"an {ext.M}x2 plan needs mu = {ext.M + 1}, got {ext.mu}")
        if ext.N == 2:
            return compute_zero_forcing(build_mx2(ext, self.seed), ext, self.tol)
        if ext.M == 2:
            if ext.mu != ext.N + 1:
                raise ParameterError(f"a 2x{ext.N} plan needs mu = {ext.N + 1}, got {ext.mu}")
            primal_ext = ext.transpose()
            primal = compute_zero_forcing(build_mx2(primal_ext, self.seed), primal_ext, self.tol)
            return reciprocal(primal, primal_ext, self.tol, kind=RECIPROCAL_2XM)
        raise ParameterError("perfect alignment needs M = 2 or N = 2")


class PartialAlignment(_PlanEstimator):
    """Order-``n`` partial alignment for any ``M x N``.

    The extension must have length ``N(n+1)**G + (M-1)n**G``.
    """

    def __init__(self, n=1, seed=0, basis="svd", tol=RANK_TOL):
        self.n = n
        self.seed = seed
        self.basis = basis
        self.tol = tol

    def _build(self, ext):
        if self.basis not in BASES:
            raise ParameterError(f"basis must be one of {BASES}")
        mu = general_extension_length(ext.M, ext.N, self.n)
        if ext.mu != mu:
            raise ParameterError(f"order {self.n} on {ext.M}x{ext.N} needs mu = {mu}, got {ext.mu}")
        plan = build_general(ext.M, ext.N, self.n, ext, self.seed, self.basis)
        return compute_zero_forcing(plan, ext, self.tol)
