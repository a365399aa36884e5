"""Slot-level simulation of time-division alignment through propagation delays.

On the 2 x 2 X network, transmitters send one symbol per message per period
of three slots. With delays ``T11, T21 = 0``, ``T12 = 1`` and ``T22 = 2``
(mod 3), each receiver sees its two desired messages in two distinct residue
classes and both interferers stacked in the third, so every message gets a
third of the slots interference-free.
"""

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction

from .exceptions import ParameterError, ScheduleError
from .validation import check_count

PERIOD = 3
DELAY_RESIDUES = {(1, 1): 0, (1, 2): 1, (2, 1): 0, (2, 2): 2}
TX_PHASE = {(1, 1): 0, (2, 1): 1, (1, 2): 1, (2, 2): 0}

DESIRED = "desired"
INTERFERENCE = "interference"


@dataclass(frozen=True)
class DelaySchedule:
    """Integer delays ``T[(j, i)]`` (receiver ``j``, transmitter ``i``) and message phases."""

    T: dict
    horizon: int = 300
    tx_phase: dict = None

    def __post_init__(self):
        T = {(int(j), int(i)): int(v) for (j, i), v in dict(self.T).items()}
        if set(T) != set(DELAY_RESIDUES):
            raise ParameterError("delays must be given for all four (receiver, transmitter) pairs")
        if any(v < 0 for v in T.values()):
            raise ParameterError("delays must be nonnegative")
        object.__setattr__(self, "T", T)
        object.__setattr__(self, "tx_phase", dict(self.tx_phase or TX_PHASE))
        check_count(self.horizon, "horizon")

    @classmethod
    def from_tuple(cls, delays, horizon=300):
        """Build from ``(T11, T12, T21, T22)``."""
        t11, t12, t21, t22 = delays
        return cls({(1, 1): t11, (1, 2): t12, (2, 1): t21, (2, 2): t22}, horizon)

    @property
    def max_delay(self):
        return max(self.T.values())


def validate_delays(T):
    """True iff ``T`` meets the four residue conditions mod 3.

    ``T`` is a mapping ``(j, i) -> delay`` or a tuple ``(T11, T12, T21, T22)``.
    """
    if not isinstance(T, dict):
        t11, t12, t21, t22 = T
        T = {(1, 1): t11, (1, 2): t12, (2, 1): t21, (2, 2): t22}
    if any(int(v) != v or v < 0 for v in T.values()):
        raise ParameterError("delays must be nonnegative integers")
    return all(T[key] % PERIOD == r for key, r in DELAY_RESIDUES.items())


@dataclass(frozen=True)
class Arrival:
    message: tuple
    role: str
    sent: int


@dataclass(frozen=True)
class DelaySimulation:
    """Arrivals per receiver: ``slots[j][t]`` is the list of arrivals in slot ``t``."""

    schedule: DelaySchedule
    horizon: int
    slots: dict
    sent: dict

    def occupancy(self):
        """Rows ``(slot, receiver, message, role)`` sorted by slot then receiver."""
        rows = []
        for j in sorted(self.slots):
            for t, arrivals in self.slots[j].items():
                for a in arrivals:
                    rows.append((t, j, a.message, a.role))
        rows.sort(key=lambda r: (r[0], r[1], r[2]))
        return rows

    def collisions(self):
        """Slots where a desired symbol shares the slot with any other arrival."""
        bad = []
        for j, slots in self.slots.items():
            for t, arrivals in slots.items():
                if any(a.role == DESIRED for a in arrivals) and len(arrivals) > 1:
                    bad.append((j, t))
        return sorted(bad)

    def residues(self, j, role):
        return {t % PERIOD for t, arrivals in self.slots[j].items()
                for a in arrivals if a.role == role}


def simulate(schedule, horizon=None):
    """Propagate every symbol sent in slots ``0 .. horizon-1`` to both receivers.

    A symbol of message ``(j, i)`` sent at ``t`` reaches receiver ``r`` at
    ``t + T[(r, i)]``; it is desired at ``r == j`` and interference elsewhere.
    """
    if not validate_delays(schedule.T):
        raise ScheduleError(f"delays {schedule.T} violate the residue conditions")
    horizon = check_count(schedule.horizon if horizon is None else horizon, "horizon")
    slots = {1: defaultdict(list), 2: defaultdict(list)}
    sent = defaultdict(int)
    for t in range(horizon):
        for (j, i), phase in schedule.tx_phase.items():
            if t % PERIOD != phase:
                continue
            sent[(j, i)] += 1
            for r in (1, 2):
                role = DESIRED if r == j else INTERFERENCE
                slots[r][t + schedule.T[(r, i)]].append(Arrival((j, i), role, t))
    return DelaySimulation(schedule, horizon,
                           {r: dict(sorted(s.items())) for r, s in slots.items()}, dict(sent))


def delivered(sim):
    """Collision-free desired deliveries per message."""
    count = defaultdict(int)
    for j, slots in sim.slots.items():
        for arrivals in slots.values():
            if len(arrivals) == 1 and arrivals[0].role == DESIRED:
                count[arrivals[0].message] += 1
    return {key: count.get(key, 0) for key in DELAY_RESIDUES}


def throughput(sim, per_message=False):
    """Collision-free desired symbols per slot, as an exact fraction.

    Counts symbols sent within the horizon; every one of them eventually
    arrives, so the pipeline transient does not dilute the count.
    """
    if sim.horizon % PERIOD:
        raise ParameterError(f"horizon must be a multiple of {PERIOD}")
    counts = delivered(sim)
    if per_message:
        return {key: Fraction(c, sim.horizon) for key, c in counts.items()}
    return Fraction(sum(counts.values()), sim.horizon)


def steady_state_pattern(sim, j):
    """Per-slot role sets at receiver ``j`` once every pipeline is full.

    Covers slots ``max_delay .. horizon-1``: any slot ``s`` there receives,
    over a link of delay ``d``, the symbol sent at ``s - d``, which lies
    inside the sending window.
    """
    lo = sim.schedule.max_delay
    hi = sim.horizon
    return [frozenset((a.message, a.role) for a in sim.slots[j].get(t, []))
            for t in range(lo, hi)]


def transmitter_active_residues(schedule, i):
    """Residues mod 3 in which transmitter ``i`` sends."""
    return {phase for (j, tx), phase in schedule.tx_phase.items() if tx == i}
