import numpy as np
import pytest

from xnet.channel import random_extension, sample_channel
from xnet.exceptions import ParameterError
from xnet.link import (LinkTrial, db_to_linear, dof_slope, draw_payload, general_builder,
                       perfect_builder, rate_curve, sum_rate, transmit_receive,
                       transmitted_signals, unit_beamformers, zf_decode)
from xnet.schemes import (BeamformingPlan, build_general, build_mx2, compute_zero_forcing,
                          perturb_plan)


def mx2(M, seed=0):
    ext = random_extension(M, 2, M + 1, seed)
    return compute_zero_forcing(build_mx2(ext, seed), ext), ext


def test_single_stream_superposition():
    plan, ext = mx2(3)
    trial = LinkTrial(plan, ext, rho=100.0, noise_var=0.0)
    payload = {k: np.zeros(plan.streams[k]) for k in plan.messages()}
    payload[(2, 3)][0] = 0.7
    Y = transmit_receive(trial, payload)
    v = unit_beamformers(plan)[(2, 3)][:, 0]
    for j in (1, 2):
        assert np.allclose(Y[j], np.sqrt(trial.stream_energy) * 0.7 * ext.h(j, 3) * v)


def test_transmit_energy_matches_allocation():
    plan, ext = mx2(3, seed=2)
    rho = 50.0
    energy = {i: 0.0 for i in range(1, 4)}
    trials = 1000
    for s in range(trials):
        X = transmitted_signals(LinkTrial(plan, ext, rho, seed=s))
        for i in X:
            energy[i] += X[i] @ X[i] / trials
    t = LinkTrial(plan, ext, rho)
    for i in energy:
        alloc = t.stream_energy * sum(plan.streams[(j, i)] for j in (1, 2))
        assert abs(energy[i] / alloc - 1) < 0.05
    # the allocations add up to rho per channel use
    assert np.isclose(t.stream_energy * plan.total_streams / plan.mu, rho)


def test_identical_seeds_identical_outputs():
    plan, ext = mx2(2, seed=1)
    a = transmit_receive(LinkTrial(plan, ext, 10.0, noise_var=0.0, seed=4))
    b = transmit_receive(LinkTrial(plan, ext, 10.0, noise_var=0.0, seed=4))
    assert all(np.array_equal(a[j], b[j]) for j in a)
    c = transmit_receive(LinkTrial(plan, ext, 10.0, noise_var=1.0, seed=4))
    d = transmit_receive(LinkTrial(plan, ext, 10.0, noise_var=1.0, seed=4))
    assert all(np.array_equal(c[j], d[j]) for j in c)


def test_noise_has_unit_variance():
    plan, ext = mx2(2)
    trial = LinkTrial(plan, ext, 0.0)
    samples = np.concatenate([transmit_receive(LinkTrial(plan, ext, 0.0, seed=s))[1]
                              for s in range(2000)])
    assert abs(samples.var() - 1.0) < 0.05 and trial.per_stream_power == 0.0


def test_zf_recovers_symbols_without_noise():
    plan, ext = mx2(4, seed=3)
    trial = LinkTrial(plan, ext, 1e4, noise_var=0.0, seed=7)
    payload = draw_payload(plan, 7)
    out = zf_decode(trial, transmit_receive(trial, payload))
    amp = np.sqrt(trial.stream_energy)
    for d in out:
        j, i, s = d.key
        assert np.isclose(d.estimate, amp * d.gain * payload[(j, i)][s])
        assert d.interference_power <= 1e-9 * d.signal_power


def test_sinr_linear_in_rho():
    plan, ext = mx2(3, seed=1)
    lo = zf_decode(LinkTrial(plan, ext, 1e4), transmit_receive(LinkTrial(plan, ext, 1e4)))
    hi = zf_decode(LinkTrial(plan, ext, 1e6), transmit_receive(LinkTrial(plan, ext, 1e6)))
    for a, b in zip(lo, hi):
        assert 99 <= b.sinr / a.sinr <= 101


def test_residual_interference_independent_of_rho():
    for M in (2, 3, 4, 5):
        plan, ext = mx2(M, seed=M)
        for db in (40.0, 70.0):
            t = LinkTrial(plan, ext, float(db_to_linear(db)))
            for d in zf_decode(t, transmit_receive(t)):
                assert d.interference_power < 1e-9 * d.signal_power


def test_misaligned_plan_saturates():
    ext = random_extension(2, 2, 8, 0)
    plan = build_general(2, 2, 2, ext, 0)
    bad = compute_zero_forcing(perturb_plan(plan, (1, 2), 0, 1e-2, seed=0), ext)
    rates = [sum_rate(bad, ext, float(db_to_linear(db))) for db in (60.0, 80.0, 100.0)]
    good = compute_zero_forcing(plan, ext)
    good_rates = [sum_rate(good, ext, float(db_to_linear(db))) for db in (60.0, 80.0, 100.0)]
    assert (rates[2] - rates[1]) < 0.8 * (good_rates[2] - good_rates[1])
    sinr = {db: [d.sinr for d in zf_decode(LinkTrial(bad, ext, float(db_to_linear(db))),
                                            transmit_receive(LinkTrial(bad, ext, 1.0)))]
            for db in (80.0, 100.0)}
    assert min(b / a for a, b in zip(sinr[80.0], sinr[100.0])) < 2


def test_rate_positive_at_zero_db():
    plan, ext = mx2(2)
    r = sum_rate(plan, ext, 1.0)
    assert 0 < r < 5


def test_empty_plan_has_zero_rate():
    ext = random_extension(2, 2, 3, 0)
    empty = BeamformingPlan(2, 2, 3, {(j, i): 0 for j in (1, 2) for i in (1, 2)},
                            {(j, i): np.zeros((3, 0)) for j in (1, 2) for i in (1, 2)},
                            {(j, i): np.zeros((3, 0)) for j in (1, 2) for i in (1, 2)})
    assert sum_rate(empty, ext, 1e6) == 0.0


def test_point_to_point_slope():
    s = dof_slope(general_builder(1, 1, 1), None, 1e4, 1e6, trials=200)
    assert abs(s - 1.0) <= 0.02


def test_three_user_perfect_slope():
    s = dof_slope(perfect_builder(3, 2), None, 1e4, 1e6, trials=200)
    assert abs(s / 1.5 - 1) <= 0.03


def test_reciprocal_slope():
    s = dof_slope(perfect_builder(2, 3), None, 1e4, 1e6, trials=200)
    assert abs(s / 1.5 - 1) <= 0.03


@pytest.mark.xfail(strict=True, reason="measured slope 1.207 (-3.4%): some streams of the "
                                       "order-2 plan are still below unit SINR at 40 dB")
def test_two_user_order_two_slope():
    s = dof_slope(general_builder(2, 2, 2), None, 1e4, 1e6, trials=200)
    assert abs(s / 1.25 - 1) <= 0.03


def test_order_two_slope_converges_at_higher_snr():
    # the shortfall is a finite-SNR effect: between 80 and 100 dB the slope is close
    s = dof_slope(general_builder(2, 2, 2), None, 1e8, 1e10, trials=200)
    assert abs(s / 1.25 - 1) <= 0.03


def test_slope_invariant_to_channel_scale():
    b = perfect_builder(3, 2)
    proc = sample_channel(3, 2, 200 * b.mu, seed=5)
    a = dof_slope(b, proc, 1e4, 1e6, trials=200, seed=5)
    c = dof_slope(b, proc.scaled(3.0), 1e4, 1e6, trials=200, seed=5)
    assert abs(a - c) < 0.03
    lo = rate_curve(b, proc, [40.0], 200, 5).mean[0]
    hi = rate_curve(b, proc.scaled(3.0), [40.0], 200, 5).mean[0]
    assert hi > lo


def test_fixed_extension_blocks():
    b = perfect_builder(2, 2)
    ext = random_extension(2, 2, 3, 1)
    curve = rate_curve(b, ext, [40.0, 60.0], trials=5, seed=2)
    assert curve.rates.shape == (5, 2) and curve.rank_failures == 0


def test_rank_failures_counted():
    from xnet.channel import ExtendedChannel
    b = perfect_builder(2, 2)
    base = random_extension(2, 2, 1, 0)
    flat = ExtendedChannel(2, 2, 3, np.repeat(base.diag, 3, axis=2))
    curve = rate_curve(b, flat, [40.0], trials=3)
    assert curve.rank_failures == 3 and np.all(curve.rates == 0)


def test_rate_curve_is_deterministic():
    b = general_builder(2, 2, 1)
    a = rate_curve(b, None, [40.0, 50.0], 20, seed=3)
    c = rate_curve(b, None, [40.0, 50.0], 20, seed=3)
    assert np.array_equal(a.rates, c.rates)


def test_slope_preconditions():
    b = perfect_builder(2, 2)
    with pytest.raises(ParameterError):
        dof_slope(b, None, 100.0, 1e6)
    with pytest.raises(ParameterError):
        dof_slope(b, None, 1e4, 1e5)
    with pytest.raises(ParameterError):
        rate_curve(b, sample_channel(2, 2, 5, 0), [40.0], trials=2)
    with pytest.raises(ParameterError):
        perfect_builder(3, 3)
