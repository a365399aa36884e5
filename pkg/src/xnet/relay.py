"""Two-hop parallel relay network as two X networks in cascade.

Source ``j`` splits its message into ``K`` submessages, one per relay. Phase
one runs an ``M x K`` X-network plan (relay ``k`` decodes submessage
``(j, k)`` from source ``j``); phase two runs a ``K x M`` plan forwarding
every decoded submessage to its destination. The phases use separate
extension blocks, so relays never send and receive at once.
"""

from dataclasses import dataclass, field
from fractions import Fraction

from .channel import ChannelProcess, extend, sample_channel
from .exceptions import ParameterError, StateError
from .schemes import (build_general, build_mx2, compute_zero_forcing,
                      general_extension_length, reciprocal, verify_plan)
from .validation import check_count

PERFECT = "perfect"
GENERAL = "general"


def relay_dof(M, K):
    """``MK / (2(M + K - 1))`` as an exact fraction."""
    M = check_count(M, "M")
    K = check_count(K, "K")
    return Fraction(M * K, 2 * (M + K - 1))


@dataclass(frozen=True)
class RelayTopology:
    """``M`` sources/destinations, ``K`` half-duplex relays, one channel per hop.

    ``hop1`` is an ``M x K`` process (transmitters are sources), ``hop2`` a
    ``K x M`` process (transmitters are relays).
    """

    M: int
    K: int
    hop1: ChannelProcess = field(repr=False)
    hop2: ChannelProcess = field(repr=False)
    half_duplex: bool = True

    def __post_init__(self):
        if (self.hop1.M, self.hop1.N) != (self.M, self.K):
            raise ParameterError("hop1 must have M transmitters and K receivers")
        if (self.hop2.M, self.hop2.N) != (self.K, self.M):
            raise ParameterError("hop2 must have K transmitters and M receivers")
        if not self.half_duplex:
            raise ParameterError("only half-duplex relays are modelled")


def sample_topology(M, K, T, seed=0, **bounds):
    return RelayTopology(M, K, sample_channel(M, K, T, seed=(seed * 2) % (2 ** 32), **bounds),
                         sample_channel(K, M, T, seed=(seed * 2 + 1) % (2 ** 32), **bounds))


@dataclass(frozen=True)
class TwoHopPlan:
    """Per-hop plans plus the pairing of phase-one and phase-two streams.

    ``stream_map`` maps ``(j, k, s)`` -- stream ``s`` of source ``j``'s
    submessage for relay ``k`` -- to itself; a stream appears only if both
    hops carry it. ``unpaired`` counts streams that one hop carries and the
    other cannot forward.
    """

    phase1: object = field(repr=False)
    phase2: object = field(repr=False)
    stream_map: dict = field(repr=False)
    mu1: int
    mu2: int
    unpaired: int
    reports: tuple = field(default=(), repr=False)

    @property
    def paired_streams(self):
        return len(self.stream_map)

    @property
    def channel_uses(self):
        return self.mu1 + self.mu2

    @property
    def dof(self):
        return Fraction(self.paired_streams, self.channel_uses)

    def hop_dof(self):
        return (Fraction(self.phase1.total_streams, self.mu1),
                Fraction(self.phase2.total_streams, self.mu2))


def _hop_plan(proc, kappa, scheme, n, seed, heavy_on_receivers):
    """Zero-forcing plan for one hop.

    With ``heavy_on_receivers`` the plan is the reciprocal of a plan built on
    the transposed channel, which moves the extra streams of transmitter 1 of
    the transposed network onto receiver 1 of this one.
    """
    M, N = proc.M, proc.N
    if heavy_on_receivers:
        primal_proc = proc.transpose()
        primal, ext = _hop_plan(primal_proc, kappa, scheme, n, seed, False)
        dual = reciprocal(primal, ext)
        return dual, ext.transpose()
    if scheme == PERFECT:
        if N != 2:
            raise ParameterError(f"no perfect scheme for a {M}x{N} hop")
        ext = extend(proc, kappa, M + 1)
        return compute_zero_forcing(build_mx2(ext, seed), ext), ext
    mu = general_extension_length(M, N, n)
    ext = extend(proc, kappa, mu)
    return compute_zero_forcing(build_general(M, N, n, ext, seed), ext), ext


def compose_two_hop(topology, n=1, scheme=GENERAL, kappa=0, seed=0, phase2="reciprocal"):
    """Decode-and-forward composition of an ``M x K`` and a ``K x M`` plan.

    Parameters
    ----------
    scheme : {"general", "perfect"}
        ``"perfect"`` needs ``K == 2`` or ``M == 2``; each hop then uses the
        ``X x 2`` construction directly or through reciprocity.
    phase2 : {"reciprocal", "direct"}
        How the general second hop is built. ``"reciprocal"`` dualizes a
        plan of the transposed hop, so destination ``j`` receives from every
        relay as many streams as source ``j`` sent to it. ``"direct"`` builds
        the ``K x M`` scheme as is and pairs streams by the minimum count.

    Raises
    ------
    StateError
        If the phase-one plan fails verification; relays must decode before
        anything is forwarded.
    """
    M, K = topology.M, topology.K
    if scheme not in (PERFECT, GENERAL):
        raise ParameterError(f"unknown scheme {scheme!r}")
    if phase2 not in ("reciprocal", "direct"):
        raise ParameterError(f"unknown phase2 mode {phase2!r}")

    if scheme == PERFECT:
        if K == 2:
            p1, ext1 = _hop_plan(topology.hop1, kappa, PERFECT, n, seed, False)
            p2, ext2 = _hop_plan(topology.hop2, kappa, PERFECT, n, seed + 1, True)
        elif M == 2:
            p1, ext1 = _hop_plan(topology.hop1, kappa, PERFECT, n, seed, True)
            p2, ext2 = _hop_plan(topology.hop2, kappa, PERFECT, n, seed + 1, False)
        else:
            raise ParameterError("perfect composition needs M == 2 or K == 2")
    else:
        p1, ext1 = _hop_plan(topology.hop1, kappa, GENERAL, n, seed, False)

    r1 = verify_plan(p1, ext1)
    if not r1.passed:
        raise StateError("phase-one plan failed verification: " + "; ".join(r1.failures))

    if scheme == GENERAL:
        p2, ext2 = _hop_plan(topology.hop2, kappa, GENERAL, n, seed + 1, phase2 == "reciprocal")
    r2 = verify_plan(p2, ext2)
    if not r2.passed:
        raise StateError("phase-two plan failed verification: " + "; ".join(r2.failures))

    stream_map, unpaired = {}, 0
    for j in range(1, M + 1):
        for k in range(1, K + 1):
            s1 = p1.streams[(k, j)]  # source j -> relay k
            s2 = p2.streams[(j, k)]  # relay k -> destination j
            for s in range(min(s1, s2)):
                stream_map[(j, k, s)] = (j, k, s)
            unpaired += abs(s1 - s2)
    return TwoHopPlan(p1, p2, stream_map, p1.mu, p2.mu, unpaired, (r1, r2))
