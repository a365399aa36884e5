"""Time-varying fully connected X-network channels and their symbol extensions.

Receivers and transmitters are indexed from 1 in every public mapping, so
``H[(j, i)]`` is the gain from transmitter ``i`` to receiver ``j``.
"""

from dataclasses import dataclass, field

import numpy as np

from .exceptions import HorizonError, ParameterError
from .validation import bounded_draw, check_bounds, check_count, make_rng

DEFAULT_H_MIN = 0.5
DEFAULT_H_MAX = 2.0


@dataclass(frozen=True)
class ChannelProcess:
    """Per-slot real gains for every (receiver, transmitter) pair.

    ``gains`` has shape ``(N, M, T)``: ``gains[j-1, i-1, t-1]`` is the gain
    from transmitter ``i`` to receiver ``j`` in slot ``t``.
    """

    M: int
    N: int
    T: int
    gains: np.ndarray = field(repr=False)
    seed: int = 0
    h_min: float = DEFAULT_H_MIN
    h_max: float = DEFAULT_H_MAX

    def coeff(self, j, i, t):
        """Gain from transmitter ``i`` to receiver ``j`` at 1-based slot ``t``."""
        return float(self.gains[j - 1, i - 1, t - 1])

    @property
    def coeffs(self):
        """Mapping ``(j, i, t) -> gain`` with 1-based indices."""
        N, M, T = self.gains.shape
        return {(j + 1, i + 1, t + 1): float(self.gains[j, i, t])
                for j in range(N) for i in range(M) for t in range(T)}

    def scaled(self, factor):
        """Copy with every gain multiplied by ``factor`` (bounds scale too)."""
        factor = float(factor)
        if factor <= 0:
            raise ParameterError("scale factor must be positive")
        gains = self.gains * factor
        gains.setflags(write=False)
        return ChannelProcess(self.M, self.N, self.T, gains, self.seed,
                              self.h_min * factor, self.h_max * factor)

    def transpose(self):
        """The reciprocal network: transmitters and receivers swap roles."""
        gains = np.ascontiguousarray(self.gains.transpose(1, 0, 2))
        gains.setflags(write=False)
        return ChannelProcess(self.N, self.M, self.T, gains, self.seed,
                              self.h_min, self.h_max)


@dataclass(frozen=True)
class ExtendedChannel:
    """Diagonal ``mu x mu`` channel matrices of one ``mu``-symbol extension block.

    ``diag`` has shape ``(N, M, mu)``; row ``r`` (0-based) holds the gains of
    slot ``base_slot + r + 1``.
    """

    M: int
    N: int
    mu: int
    diag: np.ndarray = field(repr=False)
    base_slot: int = 0

    def h(self, j, i):
        """Diagonal of the extended channel from transmitter ``i`` to receiver ``j``."""
        return self.diag[j - 1, i - 1]

    def matrix(self, j, i):
        return np.diag(self.diag[j - 1, i - 1])

    @property
    def H(self):
        """Mapping ``(j, i) -> mu x mu`` diagonal matrix."""
        return {(j + 1, i + 1): np.diag(self.diag[j, i])
                for j in range(self.N) for i in range(self.M)}

    def transpose(self):
        """Extension of the reciprocal network, ``Hbar[(i, j)] = H[(j, i)]``."""
        diag = np.ascontiguousarray(self.diag.transpose(1, 0, 2))
        diag.setflags(write=False)
        return ExtendedChannel(self.N, self.M, self.mu, diag, self.base_slot)

    def with_diag(self, diag):
        diag = np.array(diag, dtype=float)
        diag.setflags(write=False)
        return ExtendedChannel(self.M, self.N, self.mu, diag, self.base_slot)


def sample_channel(M, N, T, seed=0, h_min=DEFAULT_H_MIN, h_max=DEFAULT_H_MAX):
    """Draw an ``M x N`` channel process over ``T`` slots.

    Every gain has magnitude uniform on ``[h_min, h_max]`` and an independent
    fair sign, so none is zero. The draw is a pure function of its arguments.
    """
    M = check_count(M, "M")
    N = check_count(N, "N")
    T = check_count(T, "T")
    h_min, h_max = check_bounds(h_min, h_max)
    rng = make_rng(seed, "channel")
    gains = bounded_draw(rng, (N, M, T), h_min, h_max)
    gains.setflags(write=False)
    return ChannelProcess(M, N, T, gains, int(seed), h_min, h_max)


def extend(proc, kappa, mu):
    """Extension block ``kappa`` of length ``mu``: slots ``kappa*mu + 1 .. (kappa+1)*mu``."""
    kappa = check_count(kappa, "kappa", minimum=0)
    mu = check_count(mu, "mu")
    if (kappa + 1) * mu > proc.T:
        raise HorizonError(
            f"block {kappa} of length {mu} needs {(kappa + 1) * mu} slots, "
            f"only {proc.T} generated")
    base = kappa * mu
    diag = np.array(proc.gains[:, :, base:base + mu])
    diag.setflags(write=False)
    return ExtendedChannel(proc.M, proc.N, mu, diag, base)


def random_extension(M, N, mu, seed=0, h_min=DEFAULT_H_MIN, h_max=DEFAULT_H_MAX):
    """Shorthand for block 0 of a freshly sampled ``mu``-slot process."""
    return extend(sample_channel(M, N, mu, seed, h_min, h_max), 0, mu)
