import math

import numpy as np
import pytest

from combofilter.combiner import (
    CombinerConfig,
    CombinerState,
    aux_step_sign,
    aux_step_squared,
    clamp_and_transfer,
    combined_error,
    combined_output,
    combined_weights,
    mixing_from_aux,
    mixing_step_upper_bound,
    reported_mixing,
    step,
)
from combofilter.filters import FilterConfig, FilterState, TapDelayLine


class TestCombinerConfig:
    def test_defaults(self):
        config = CombinerConfig()
        assert config.mixing_rule == "sign"
        assert config.mixing_step == 10.0
        assert config.clamp == 4.0
        assert config.transfer == "tracking"
        assert config.transfer_window == 2
        assert config.saturation_margin == 1e-2

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"mixing_rule": "absolute"},
            {"mixing_step": 0.0},
            {"clamp": 0.0},
            {"transfer": "copy"},
            {"transfer_window": 0},
            {"saturation_margin": 0.0},
            {"saturation_margin": 5.0},
        ],
    )
    def test_rejects_bad_values(self, kwargs):
        with pytest.raises(ValueError):
            CombinerConfig(**kwargs)


class TestCombinerState:
    def test_initial(self):
        state = CombinerState.initial(
            FilterConfig(3, 0.1), FilterConfig(3, 0.01), CombinerConfig()
        )
        assert state.aux == 0.0
        assert state.mixing == 0.5
        assert state.iteration == 0
        assert np.array_equal(state.fast.weights, np.zeros(3))
        assert np.array_equal(state.slow.weights, np.zeros(3))

    def test_rejects_tap_mismatch(self):
        with pytest.raises(ValueError):
            CombinerState.initial(
                FilterConfig(3, 0.1), FilterConfig(4, 0.01), CombinerConfig()
            )


class TestMixingFromAux:
    def test_center(self):
        assert mixing_from_aux(0.0) == 0.5

    def test_known_values(self):
        # 1/(1+exp(-4)) to 16 digits.
        assert mixing_from_aux(4.0) == pytest.approx(0.9820137900379085, rel=1e-12)
        assert mixing_from_aux(-4.0) == pytest.approx(0.017986209962091558, rel=1e-12)

    def test_monotone_and_bounded(self):
        grid = np.linspace(-30, 30, 401)
        values = [mixing_from_aux(a) for a in grid]
        assert all(0.0 <= v <= 1.0 for v in values)
        assert all(b > a for a, b in zip(values, values[1:]))

    def test_extreme_arguments_do_not_overflow(self):
        assert mixing_from_aux(800.0) == 1.0
        assert mixing_from_aux(-800.0) == 0.0


class TestBlendOps:
    def test_combined_output_example(self):
        assert combined_output(0.7, 1.0, -1.0) == pytest.approx(0.4)

    def test_combined_error_matches_output_identity(self):
        rng = np.random.default_rng(2)
        for _ in range(200):
            lam = rng.uniform(0, 1)
            y_fast, y_slow, d = rng.standard_normal(3)
            error = combined_error(lam, d - y_fast, d - y_slow)
            assert error == pytest.approx(
                d - combined_output(lam, y_fast, y_slow), rel=1e-12, abs=1e-12
            )

    def test_combined_weights_example(self):
        blended = combined_weights(0.5, [2.0, 0.0], [0.0, 2.0])
        np.testing.assert_allclose(blended, [1.0, 1.0])

    def test_combined_weights_rejects_mismatch(self):
        with pytest.raises(ValueError):
            combined_weights(0.5, [1.0, 2.0], [1.0])


class TestAuxSteps:
    def test_sign_step_example(self):
        # 0 + 10 * sign(1) * 2 * 0.5 * 0.5 = 5
        assert aux_step_sign(0.0, 1.0, 3.0, 1.0, 0.5, 10.0) == 5.0

    def test_sign_step_ignores_error_magnitude(self):
        small = aux_step_sign(0.3, 0.4, 1.0, -1.0, 0.6, 7.0)
        huge = aux_step_sign(0.3, 4.0e5, 1.0, -1.0, 0.6, 7.0)
        assert small == huge

    def test_sign_step_zero_error(self):
        assert aux_step_sign(1.2, 0.0, 3.0, 1.0, 0.5, 10.0) == 1.2

    def test_squared_step_linear_in_error(self):
        base = aux_step_squared(0.0, 1.0, 2.0, -1.0, 0.5, 3.0)
        double = aux_step_squared(0.0, 2.0, 2.0, -1.0, 0.5, 3.0)
        assert double == pytest.approx(2 * base, rel=1e-12)

    def test_saturated_mixing_freezes_aux(self):
        assert aux_step_sign(4.0, 1.0, 3.0, 1.0, 1.0, 10.0) == 4.0
        assert aux_step_squared(-4.0, 1.0, 3.0, 1.0, 0.0, 10.0) == -4.0


class TestReportedMixing:
    def test_three_branches(self):
        assert reported_mixing(3.995, 0.982, 4.0, 0.01) == 1.0
        assert reported_mixing(-3.995, 0.018, 4.0, 0.01) == 0.0
        assert reported_mixing(1.0, 0.73, 4.0, 0.01) == 0.73

    def test_boundaries_snap(self):
        assert reported_mixing(3.99, 0.9, 4.0, 0.01) == 1.0
        assert reported_mixing(-3.99, 0.1, 4.0, 0.01) == 0.0


class TestMixingStepUpperBound:
    def test_example(self):
        # 2*|1| / (2^2 * 0.5^2 * 0.5^2) = 8
        assert mixing_step_upper_bound(1.0, 2.0, 0.0, 0.5) == pytest.approx(8.0)

    def test_degenerate_cases_are_infinite(self):
        assert mixing_step_upper_bound(1.0, 2.0, 2.0, 0.5) == math.inf
        assert mixing_step_upper_bound(1.0, 2.0, 0.0, 0.0) == math.inf
        assert mixing_step_upper_bound(1.0, 2.0, 0.0, 1.0) == math.inf


def _state_with(aux, iteration, transfer="tracking", window=2):
    fast = FilterState(np.array([1.0, 2.0]), FilterConfig(2, 0.1))
    slow = FilterState(np.array([-1.0, 0.5]), FilterConfig(2, 0.01))
    config = CombinerConfig(transfer=transfer, transfer_window=window)
    return CombinerState(
        fast=fast,
        slow=slow,
        config=config,
        aux=aux,
        mixing=mixing_from_aux(aux) if abs(aux) < 30 else (aux > 0) * 1.0,
        iteration=iteration,
    )


class TestClampAndTransfer:
    def test_upper_rail_clamps_pins_and_copies(self):
        state, fired = clamp_and_transfer(_state_with(5.0, iteration=1))
        assert fired
        assert state.aux == 4.0
        assert state.mixing == 1.0
        assert np.array_equal(state.slow.weights, state.fast.weights)
        # the slow filter keeps its own configuration
        assert state.slow.config.step_size == 0.01

    def test_lower_rail_clamps_and_pins_without_copy(self):
        state, fired = clamp_and_transfer(_state_with(-6.0, iteration=1))
        assert not fired
        assert state.aux == -4.0
        assert state.mixing == 0.0
        assert np.array_equal(state.slow.weights, [-1.0, 0.5])

    def test_interior_aux_unchanged(self):
        before = _state_with(1.0, iteration=1)
        state, fired = clamp_and_transfer(before)
        assert not fired
        assert state is before

    def test_window_miss_leaves_everything(self):
        before = _state_with(6.0, iteration=2)  # (2-1) % 2 != 0
        state, fired = clamp_and_transfer(before)
        assert not fired
        assert state is before

    def test_transfer_none_still_clamps_but_never_copies(self):
        state, fired = clamp_and_transfer(
            _state_with(5.0, iteration=1, transfer="none")
        )
        assert not fired
        assert state.aux == 4.0
        assert state.mixing == 1.0
        assert np.array_equal(state.slow.weights, [-1.0, 0.5])

    def test_exact_rail_is_upper_branch(self):
        state, fired = clamp_and_transfer(_state_with(4.0, iteration=1))
        assert fired
        assert state.mixing == 1.0

    def test_exact_negative_rail_is_untouched(self):
        # the lower branch is strict: aux == -clamp stays as it is
        before = _state_with(-4.0, iteration=1)
        state, fired = clamp_and_transfer(before)
        assert state is before and not fired


class TestStep:
    def test_two_step_trace(self):
        # Frozen from a straight-line scalar trace: M=2, mu=(0.1, 0.01),
        # eps=1e-4, sign rule with step 10, clamp 4, window 2.
        fast = FilterConfig(2, 0.1, 1e-4)
        slow = FilterConfig(2, 0.01, 1e-4)
        state = CombinerState.initial(fast, slow, CombinerConfig())
        line = TapDelayLine.from_samples([2.0, 5.0])

        state, diag = step(state, line, 1.0)
        assert (diag.y_fast, diag.y_slow, diag.output) == (0.0, 0.0, 0.0)
        assert diag.error == 1.0
        assert diag.mixing_reported == 0.5
        assert not diag.transfer_fired
        np.testing.assert_allclose(
            state.fast.weights,
            [0.006896527943007094, 0.017241319857517735],
            rtol=1e-13,
        )
        np.testing.assert_allclose(
            state.slow.weights,
            [0.0006896527943007093, 0.0017241319857517732],
            rtol=1e-13,
        )
        assert state.aux == 0.0  # equal outputs leave the accumulator
        assert state.mixing == 0.5
        assert state.iteration == 1

        line.push(1.0)  # delay line becomes (1, 2)
        state, diag = step(state, line, 0.5)
        assert diag.y_fast == pytest.approx(0.041379167658042566, rel=1e-13)
        assert diag.y_slow == pytest.approx(0.004137916765804256, rel=1e-13)
        assert diag.output == pytest.approx(0.022758542211923413, rel=1e-13)
        assert diag.error == pytest.approx(0.4772414577880766, rel=1e-13)
        np.testing.assert_allclose(
            state.fast.weights,
            [0.02689612795100694, 0.05724051987351742],
            rtol=1e-13,
        )
        np.testing.assert_allclose(
            state.slow.weights,
            [0.0026896127951006933, 0.005724051987351741],
            rtol=1e-13,
        )
        assert state.aux == pytest.approx(0.09310312723059577, rel=1e-13)
        assert state.mixing == pytest.approx(0.523258983122868, rel=1e-13)
        assert state.iteration == 2

    def test_diagnostics_blend_identity(self):
        rng = np.random.default_rng(8)
        fast = FilterConfig(4, 0.1)
        slow = FilterConfig(4, 0.01)
        state = CombinerState.initial(fast, slow, CombinerConfig())
        line = TapDelayLine(4)
        for _ in range(300):
            line.push(rng.standard_normal())
            d = rng.standard_normal()
            lam = state.mixing
            state, diag = step(state, line, d)
            assert diag.output == pytest.approx(
                lam * diag.y_fast + (1 - lam) * diag.y_slow, rel=1e-12, abs=1e-12
            )
            assert diag.error == pytest.approx(d - diag.output, rel=1e-12, abs=1e-12)

    def test_pinned_mixing_is_exact(self):
        # Drive the accumulator over the rail; at the window hit the mixing
        # weight must be exactly 1.0, then recomputed from the sigmoid.
        fast = FilterConfig(1, 0.5)
        slow = FilterConfig(1, 0.001)
        config = CombinerConfig(mixing_step=100.0, transfer_window=1)
        state = CombinerState.initial(fast, slow, config)
        line = TapDelayLine(1)
        rng = np.random.default_rng(0)
        pinned = False
        for _ in range(50):
            line.push(rng.standard_normal() + 2.0)
            state, _ = step(state, line, 5.0)
            if state.mixing == 1.0:
                pinned = True
                assert state.aux == config.clamp
        assert pinned

    def test_degenerate_equal_components_keep_half(self):
        config = FilterConfig(3, 0.05)
        state = CombinerState.initial(config, config, CombinerConfig())
        line = TapDelayLine(3)
        rng = np.random.default_rng(9)
        for _ in range(200):
            line.push(rng.standard_normal())
            state, diag = step(state, line, rng.standard_normal())
            assert state.mixing == 0.5
            assert state.aux == 0.0
            assert diag.y_fast == diag.y_slow

    def test_sign_rule_resists_error_outliers(self):
        # Same history, one sample with a 1e6-times larger error: the sign
        # rule produces the identical accumulator move.
        fast = FilterConfig(2, 0.1)
        slow = FilterConfig(2, 0.01)
        base = CombinerState(
            fast=FilterState(np.array([0.3, 0.1]), fast),
            slow=FilterState(np.array([0.1, 0.2]), slow),
            config=CombinerConfig(),
            aux=0.4,
            mixing=mixing_from_aux(0.4),
            iteration=3,
        )
        line = TapDelayLine.from_samples([1.0, -1.0])
        state_small, _ = step(base, line, 2.0)
        state_huge, _ = step(base, line, 2.0e6)
        assert state_small.aux == state_huge.aux
