from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from xnet.delay import (DESIRED, INTERFERENCE, PERIOD, DelaySchedule, simulate,
                        steady_state_pattern, throughput, transmitter_active_residues,
                        validate_delays)
from xnet.exceptions import ParameterError, ScheduleError

VALID = [(0, 1, 0, 2), (3, 4, 6, 8), (0, 4, 3, 5), (9, 1, 3, 2), (6, 7, 12, 11)]


def test_validity_examples():
    assert validate_delays((0, 1, 0, 2))
    assert validate_delays((3, 4, 6, 8))
    assert not validate_delays((0, 0, 0, 2))
    assert validate_delays({(1, 1): 0, (1, 2): 1, (2, 1): 0, (2, 2): 2})


def test_negative_or_fractional_delays():
    with pytest.raises(ParameterError):
        validate_delays((0, -2, 0, 2))
    with pytest.raises(ParameterError):
        validate_delays((0, 1.5, 0, 2))
    with pytest.raises(ParameterError):
        DelaySchedule.from_tuple((0, -2, 0, 2))


def test_invalid_schedule_is_rejected():
    with pytest.raises(ScheduleError):
        simulate(DelaySchedule.from_tuple((0, 0, 0, 2)))


def _arrival_residues(sim, j, message):
    return {t % PERIOD for t, arr in sim.slots[j].items() for a in arr if a.message == message}


@pytest.mark.parametrize("delays", VALID)
def test_receiver_one_residues(delays):
    sim = simulate(DelaySchedule.from_tuple(delays))
    assert _arrival_residues(sim, 1, (1, 1)) == {0}
    assert _arrival_residues(sim, 1, (1, 2)) == {2}
    assert sim.residues(1, INTERFERENCE) == {1}


@pytest.mark.parametrize("delays", VALID)
def test_receiver_two_residues(delays):
    sim = simulate(DelaySchedule.from_tuple(delays))
    assert sim.residues(2, DESIRED) == {1, 2}
    assert sim.residues(2, INTERFERENCE) == {0}


@pytest.mark.parametrize("delays", VALID)
def test_no_collisions_and_full_throughput(delays):
    sim = simulate(DelaySchedule.from_tuple(delays, 300))
    assert sim.collisions() == []
    assert throughput(sim) == Fraction(4, 3)
    assert set(throughput(sim, per_message=True).values()) == {Fraction(1, 3)}


def test_single_period():
    sim = simulate(DelaySchedule.from_tuple((0, 1, 0, 2), 3))
    assert throughput(sim) == Fraction(4, 3)
    assert sum(sim.sent.values()) == 4


def test_horizon_must_be_whole_periods():
    sim = simulate(DelaySchedule.from_tuple((0, 1, 0, 2), 10))
    with pytest.raises(ParameterError):
        throughput(sim)


def test_arrival_times_follow_delays():
    sched = DelaySchedule.from_tuple((3, 4, 6, 8), 30)
    sim = simulate(sched)
    for j, slots in sim.slots.items():
        for t, arrivals in slots.items():
            for a in arrivals:
                assert t == a.sent + sched.T[(j, a.message[1])]
                assert a.role == (DESIRED if a.message[0] == j else INTERFERENCE)


@pytest.mark.parametrize("delays", VALID)
def test_steady_state_is_periodic(delays):
    sim = simulate(DelaySchedule.from_tuple(delays, 60))
    for j in (1, 2):
        pat = steady_state_pattern(sim, j)
        assert len(pat) > 2 * PERIOD
        assert all(pat[k] == pat[k + PERIOD] for k in range(len(pat) - PERIOD))
        # every slot of the steady window is busy
        assert all(pat)


def test_transmitters_idle_one_slot_in_three():
    sched = DelaySchedule.from_tuple((0, 1, 0, 2))
    assert transmitter_active_residues(sched, 1) == {0, 1}
    assert transmitter_active_residues(sched, 2) == {0, 1}


def test_occupancy_rows_sorted():
    rows = simulate(DelaySchedule.from_tuple((0, 1, 0, 2), 9)).occupancy()
    assert rows == sorted(rows, key=lambda r: (r[0], r[1], r[2]))


@given(st.integers(0, 20), st.integers(0, 20), st.integers(0, 20), st.integers(0, 20))
def test_any_valid_delays_align(a, b, c, d):
    delays = (3 * a, 3 * b + 1, 3 * c, 3 * d + 2)
    sim = simulate(DelaySchedule.from_tuple(delays, 60))
    assert throughput(sim) == Fraction(4, 3) and not sim.collisions()
    for j in (1, 2):
        assert len(sim.residues(j, INTERFERENCE)) == 1
        assert len(sim.residues(j, DESIRED)) == 2
