"""Link-level transmission through a plan, zero-forcing decoding and sum-rate slopes.

Power model: every stream uses a unit-norm beamformer and the same energy
``rho * mu / S`` per super-symbol (``S`` streams, ``mu`` channel uses), so
the total transmit power per channel use is exactly ``rho``. Noise is unit
variance per receive dimension.

Rates use the Gaussian-codebook surrogate ``log2(1 + SINR)`` per stream with
the expected (not sampled) signal, interference and noise powers, so a fixed
plan has a deterministic rate. Averaging happens over extension blocks of a
time-varying channel: block ``kappa`` gets its own channel and its own
beamformer draw.
"""

from dataclasses import dataclass, field

import numpy as np

from .channel import ChannelProcess, ExtendedChannel, extend, sample_channel
from .exceptions import ParameterError, RankFailureError
from .schemes import (build_general, build_mx2, compute_zero_forcing, general_dof,
                      general_extension_length, reciprocal)
from .validation import check_count, make_rng

HIGH_SNR_DB = 30.0


def db_to_linear(db):
    return 10.0 ** (np.asarray(db, dtype=float) / 10.0)


@dataclass(frozen=True)
class LinkTrial:
    """One super-symbol transmission: plan, channel block, SNR and seed."""

    plan: object
    ext: ExtendedChannel
    rho: float
    noise_var: float = 1.0
    seed: int = 0

    @property
    def stream_energy(self):
        """Energy per stream over the super-symbol."""
        S = self.plan.total_streams
        return self.rho * self.plan.mu / S if S else 0.0

    @property
    def per_stream_power(self):
        """Power per stream per channel use, ``rho / S``."""
        S = self.plan.total_streams
        return self.rho / S if S else 0.0


def unit_beamformers(plan):
    """``Vmat`` with every column scaled to unit norm."""
    return {key: V / np.linalg.norm(V, axis=0) for key, V in plan.Vmat.items()}


def draw_payload(plan, seed=0):
    """Unit-variance Gaussian symbols for every stream."""
    rng = make_rng(seed, "payload")
    return {key: rng.standard_normal(plan.streams[key]) for key in plan.messages()}


def transmitted_signals(trial, payload=None):
    """``X^{[i]}`` for every transmitter: superposition of its scaled streams."""
    plan = trial.plan
    if payload is None:
        payload = draw_payload(plan, trial.seed)
    amp = np.sqrt(trial.stream_energy)
    Vn = unit_beamformers(plan)
    X = {i: np.zeros(plan.mu) for i in range(1, plan.M + 1)}
    for (j, i) in plan.messages():
        X[i] += amp * Vn[(j, i)] @ payload[(j, i)]
    return X


def transmit_receive(trial, payload=None):
    """Received ``mu``-vectors ``Y^{[j]} = sum_i H^{ji} X^{[i]} + Z^{[j]}``."""
    plan, ext = trial.plan, trial.ext
    X = transmitted_signals(trial, payload)
    rng = make_rng(trial.seed, "noise")
    Y = {}
    for j in range(1, plan.N + 1):
        y = sum(ext.h(j, i) * X[i] for i in range(1, plan.M + 1))
        if trial.noise_var > 0:
            y = y + np.sqrt(trial.noise_var) * rng.standard_normal(plan.mu)
        Y[j] = y
    return Y


@dataclass(frozen=True)
class StreamDecode:
    """Zero-forcing output and expected powers for one stream."""

    key: tuple
    estimate: float
    gain: float
    signal_power: float
    interference_power: float
    noise_power: float

    @property
    def sinr(self):
        return self.signal_power / (self.interference_power + self.noise_power)


def _stream_powers(plan, ext, energy, noise_var):
    """Per-stream (gain, signal, interference, noise) powers and the u vectors."""
    Vn = unit_beamformers(plan)
    index = plan.stream_index()
    out = []
    for j in range(1, plan.N + 1):
        cols = np.hstack([ext.h(j, i)[:, None] * Vn[(l, i)] for (l, i) in plan.messages()])
        for i in range(1, plan.M + 1):
            U = plan.Umat[(j, i)]
            G = U.T @ cols
            for s in range(U.shape[1]):
                c = index.index((j, i, s))
                g = G[s, c]
                tot = float(np.sum(G[s] ** 2))
                out.append(((j, i, s), U[:, s], g, energy * g * g,
                            energy * max(tot - g * g, 0.0),
                            noise_var * float(U[:, s] @ U[:, s])))
    return out


def zf_decode(trial, received):
    """Project each receiver's vector onto its zero-forcers.

    Signal and interference powers are expectations over unit-variance
    payloads; ``estimate`` is the actual projection of ``received``.
    """
    plan = trial.plan
    if plan.Umat is None:
        raise ParameterError("plan has no zero-forcing vectors")
    rows = _stream_powers(plan, trial.ext, trial.stream_energy, trial.noise_var)
    return [StreamDecode(key, float(u @ received[key[0]]), float(g), sig, intf, noise)
            for key, u, g, sig, intf, noise in rows]


def sum_rate(plan, ext, rho, noise_var=1.0):
    """``(1/mu) * sum_s log2(1 + SINR_s)`` in bits per channel use."""
    if plan.total_streams == 0:
        return 0.0
    trial = LinkTrial(plan, ext, rho, noise_var)
    rows = _stream_powers(plan, ext, trial.stream_energy, noise_var)
    return float(sum(np.log2(1.0 + sig / (intf + noise))
                     for _, _, _, sig, intf, noise in rows) / plan.mu)


# -- plan builders ---------------------------------------------------------------

@dataclass(frozen=True)
class PlanBuilder:
    """Builds a zero-forcing plan for any extension block of an ``M x N`` channel."""

    M: int
    N: int
    mu: int
    build: object = field(repr=False)
    label: str = ""
    dof: object = None

    def __call__(self, ext, seed=0):
        return self.build(ext, seed)


def perfect_builder(M, N=2):
    """Perfect alignment: ``M x 2`` directly, ``2 x M`` through reciprocity."""
    from fractions import Fraction
    if N == 2:
        def build(ext, seed):
            return compute_zero_forcing(build_mx2(ext, seed), ext)
        return PlanBuilder(M, 2, M + 1, build, f"perfect {M}x2", Fraction(2 * M, M + 1))
    if M == 2:
        def build(ext, seed):
            primal_ext = ext.transpose()
            primal = compute_zero_forcing(build_mx2(primal_ext, seed), primal_ext)
            return reciprocal(primal, primal_ext, kind="reciprocal_2xM")
        return PlanBuilder(2, N, N + 1, build, f"reciprocal 2x{N}", Fraction(2 * N, N + 1))
    raise ParameterError("perfect alignment needs M = 2 or N = 2")


def general_builder(M, N, n, basis="svd"):
    def build(ext, seed):
        return compute_zero_forcing(build_general(M, N, n, ext, seed, basis), ext)
    return PlanBuilder(M, N, general_extension_length(M, N, n), build,
                       f"general {M}x{N} n={n}", general_dof(M, N, n))


# -- block-averaged rates and slopes ------------------------------------------------

def _trial_seed(seed, t):
    return int(np.random.SeedSequence(seed, spawn_key=(t,)).generate_state(1)[0])


def _blocks(builder, channel, trials, seed):
    """Yield ``(ext, plan_seed)`` for each trial."""
    if channel is None:
        channel = sample_channel(builder.M, builder.N, trials * builder.mu, seed)
    if isinstance(channel, ExtendedChannel):
        for t in range(trials):
            yield channel, _trial_seed(seed, t)
    elif isinstance(channel, ChannelProcess):
        if channel.T < trials * builder.mu:
            raise ParameterError(f"channel has {channel.T} slots, {trials} blocks of "
                                 f"{builder.mu} need {trials * builder.mu}")
        for t in range(trials):
            yield extend(channel, t, builder.mu), _trial_seed(seed, t)
    else:
        raise ParameterError("channel must be a ChannelProcess, an ExtendedChannel or None")


@dataclass(frozen=True)
class RateCurve:
    """Block-averaged sum rate at each SNR point."""

    rho_db: np.ndarray
    rates: np.ndarray  # shape (trials, points)
    rank_failures: int
    dof: object = None

    @property
    def mean(self):
        return self.rates.mean(axis=0)

    @property
    def stderr(self):
        t = self.rates.shape[0]
        if t < 2:
            return np.zeros(self.rates.shape[1])
        return self.rates.std(axis=0, ddof=1) / np.sqrt(t)

    def slope(self, i=0, k=-1):
        """Rate increase per log2 of SNR between points ``i`` and ``k``."""
        lo, hi = self.rho_db[i], self.rho_db[k]
        d = np.log2(db_to_linear(hi)) - np.log2(db_to_linear(lo))
        return float((self.mean[k] - self.mean[i]) / d)

    def gap(self, dof):
        """``rate - dof * log2(rho)`` at every point."""
        return self.mean - float(dof) * np.log2(db_to_linear(self.rho_db))

    def gap_variation(self, dof):
        g = self.gap(dof)
        return float(g.max() - g.min())


def rate_curve(builder, channel, rho_db, trials=200, seed=0, noise_var=1.0):
    """Sum rate of fresh plans over ``trials`` extension blocks at every SNR in ``rho_db``.

    The same blocks and beamformer seeds serve every SNR point. A block whose
    plan fails its rank test contributes zero rate and is counted.
    """
    trials = check_count(trials, "trials")
    rho_db = np.asarray(rho_db, dtype=float).reshape(-1)
    rhos = db_to_linear(rho_db)
    rates = np.zeros((trials, len(rhos)))
    failures = 0
    for t, (ext, s) in enumerate(_blocks(builder, channel, trials, seed)):
        try:
            plan = builder(ext, s)
        except RankFailureError:
            failures += 1
            continue
        rates[t] = [sum_rate(plan, ext, r, noise_var) for r in rhos]
    return RateCurve(rho_db, rates, failures, builder.dof)


def dof_slope(builder, channel, rho_lo, rho_hi, trials=200, seed=0):
    """Empirical DoF: ``(R(rho_hi) - R(rho_lo)) / (log2 rho_hi - log2 rho_lo)``.

    ``rho_lo`` and ``rho_hi`` are linear SNRs, both at least 30 dB apart from
    zero and at least a factor 100 apart. ``channel`` is a channel process
    supplying one block per trial, a fixed extension (only beamformers are
    redrawn), or ``None`` to sample a process from ``seed``.
    """
    if rho_lo <= 0 or 10 * np.log10(rho_lo) < HIGH_SNR_DB - 1e-9:
        raise ParameterError("rho_lo must be in the high-SNR regime (>= 30 dB)")
    if rho_hi < 100 * rho_lo * (1 - 1e-12):
        raise ParameterError("rho_hi must be at least 100 * rho_lo")
    curve = rate_curve(builder, channel, 10 * np.log10([rho_lo, rho_hi]), trials, seed)
    return curve.slope()
