import math

import numpy as np
import pytest

from combofilter.filters import TapDelayLine
from combofilter.scenario import (
    ISI_CHANNEL_TAPS,
    NoiseModel,
    RngSpec,
    SystemModel,
    apply_abrupt_change,
    desired_signal,
    draw_unknown_system,
    gen_bg_impulse,
    gen_wgn,
    snr_to_variance,
)


class TestRngSpec:
    def test_streams_are_reproducible(self):
        spec = RngSpec(123)
        a = spec.trial_stream(4, "input").standard_normal(32)
        b = spec.trial_stream(4, "input").standard_normal(32)
        assert np.array_equal(a, b)

    def test_streams_differ_across_roles_trials_seeds(self):
        base = RngSpec(123).trial_stream(0, "input").standard_normal(32)
        for other in (
            RngSpec(123).trial_stream(0, "background"),
            RngSpec(123).trial_stream(1, "input"),
            RngSpec(124).trial_stream(0, "input"),
        ):
            assert not np.array_equal(base, other.standard_normal(32))

    def test_rejects_negative_seed(self):
        with pytest.raises(ValueError):
            RngSpec(-1)

    def test_cross_stream_independence(self):
        # Correlation between any two roles stays inside the 3-sigma band
        # for this (deterministic) seed.
        spec = RngSpec(2024)
        n = 100_000
        streams = {
            role: spec.trial_stream(0, role).standard_normal(n)
            for role in ("input", "background", "impulse")
        }
        limit = 3.0 / math.sqrt(n)
        pairs = [("input", "background"), ("input", "impulse"), ("background", "impulse")]
        for a, b in pairs:
            r = float(np.corrcoef(streams[a], streams[b])[0, 1])
            assert abs(r) < limit


class TestGenWgn:
    def test_moments(self):
        samples = gen_wgn(100_000, 1.0, RngSpec(5).trial_stream(0, "input"))
        assert abs(samples.mean()) < 0.02
        assert 0.97 < samples.var() < 1.03

    def test_variance_scaling(self):
        rng_a = RngSpec(5).trial_stream(0, "input")
        rng_b = RngSpec(5).trial_stream(0, "input")
        unit = gen_wgn(64, 1.0, rng_a)
        scaled = gen_wgn(64, 4.0, rng_b)
        np.testing.assert_allclose(scaled, 2.0 * unit, rtol=1e-12)

    def test_rejects_bad_arguments(self):
        rng = RngSpec(0).trial_stream(0, "input")
        with pytest.raises(ValueError):
            gen_wgn(0, 1.0, rng)
        with pytest.raises(ValueError):
            gen_wgn(8, 0.0, rng)


class TestGenBgImpulse:
    def test_sparsity_and_conditional_scale(self):
        model = NoiseModel(impulse_prob=0.05, impulse_variance=9.0, snr_db=10.0)
        train = gen_bg_impulse(200_000, model, RngSpec(6).trial_stream(0, "impulse"))
        active = train != 0.0
        rate = active.mean()
        sigma = math.sqrt(0.05 * 0.95 / 200_000)
        assert abs(rate - 0.05) < 4 * sigma
        # active amplitudes carry the configured variance
        assert 8.0 < train[active].var() < 10.0

    def test_overall_variance(self):
        model = NoiseModel(impulse_prob=0.1, impulse_variance=25.0, snr_db=10.0)
        train = gen_bg_impulse(200_000, model, RngSpec(7).trial_stream(0, "impulse"))
        assert 0.9 * 2.5 < train.var() < 1.1 * 2.5

    def test_zero_probability_gives_silence(self):
        model = NoiseModel(impulse_prob=0.0, impulse_variance=25.0, snr_db=10.0)
        train = gen_bg_impulse(1000, model, RngSpec(8).trial_stream(0, "impulse"))
        assert np.array_equal(train, np.zeros(1000))

    def test_reproducible(self):
        model = NoiseModel()
        a = gen_bg_impulse(512, model, RngSpec(9).trial_stream(3, "impulse"))
        b = gen_bg_impulse(512, model, RngSpec(9).trial_stream(3, "impulse"))
        assert np.array_equal(a, b)


class TestNoiseModel:
    @pytest.mark.parametrize(
        "kwargs",
        [
            {"impulse_prob": -0.1},
            {"impulse_prob": 1.1},
            {"impulse_variance": 0.0},
            {"snr_db": math.nan},
        ],
    )
    def test_rejects_bad_values(self, kwargs):
        with pytest.raises(ValueError):
            NoiseModel(**kwargs)


class TestSnrToVariance:
    def test_unit_system_at_10db(self):
        assert snr_to_variance([1.0], 1.0, 10.0) == pytest.approx(0.1)

    def test_zero_db_equals_signal_power(self):
        w = np.array([0.6, 0.8])  # unit norm
        assert snr_to_variance(w, 2.0, 0.0) == pytest.approx(2.0)

    def test_infinite_snr_switches_noise_off(self):
        assert snr_to_variance([1.0], 1.0, math.inf) == 0.0

    def test_rejects_zero_norm(self):
        with pytest.raises(ValueError):
            snr_to_variance([0.0, 0.0], 1.0, 10.0)


class TestDesiredSignal:
    def test_example(self):
        line = TapDelayLine.from_samples([3.0, 1.0])
        value = desired_signal([1.0, -1.0], line, 0.1, 0.0)
        assert value == pytest.approx(2.1)


class TestSystemDraws:
    def test_unit_norm(self):
        for trial in range(5):
            w = draw_unknown_system(10, RngSpec(1).trial_stream(trial, "system"))
            assert np.linalg.norm(w) == pytest.approx(1.0, rel=1e-12)

    def test_reproducible(self):
        a = draw_unknown_system(10, RngSpec(1).trial_stream(0, "system"))
        b = draw_unknown_system(10, RngSpec(1).trial_stream(0, "system"))
        assert np.array_equal(a, b)


class TestSystemModel:
    def test_rejects_zero_weights(self):
        with pytest.raises(ValueError):
            SystemModel(np.zeros(4))

    def test_rejects_bad_change(self):
        with pytest.raises(ValueError):
            SystemModel(np.ones(4), change_at=0)
        with pytest.raises(ValueError):
            SystemModel(np.ones(4), change_kind="swap")


class TestApplyAbruptChange:
    def test_identity_off_schedule(self):
        model = SystemModel(np.ones(3), change_at=100)
        assert apply_abrupt_change(model, 99) is model
        assert apply_abrupt_change(model, 101) is model
        no_change = SystemModel(np.ones(3), change_at=None)
        assert apply_abrupt_change(no_change, 1) is no_change

    def test_sign_flip(self):
        model = SystemModel(np.array([1.0, -2.0]), change_at=7, change_kind="sign_flip")
        flipped = apply_abrupt_change(model, 7)
        assert np.array_equal(flipped.weights, [-1.0, 2.0])

    def test_redraw(self):
        model = SystemModel(np.ones(6), change_at=7, change_kind="redraw")
        redrawn = apply_abrupt_change(model, 7, RngSpec(3).trial_stream(0, "system"))
        assert np.linalg.norm(redrawn.weights) == pytest.approx(1.0, rel=1e-12)
        assert not np.array_equal(redrawn.weights, model.weights)

    def test_redraw_requires_rng(self):
        model = SystemModel(np.ones(6), change_at=7, change_kind="redraw")
        with pytest.raises(ValueError):
            apply_abrupt_change(model, 7)


class TestIsiChannel:
    def test_shape_and_immutability(self):
        assert ISI_CHANNEL_TAPS.shape == (11,)
        with pytest.raises(ValueError):
            ISI_CHANNEL_TAPS[0] = 1.0
