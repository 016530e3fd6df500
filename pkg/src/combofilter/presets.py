"""Canned experiment configurations.

Two impulsive-noise identification scenarios over a random ten-tap unit-norm
plant with a sign flip halfway through the horizon, each running the two
standalone components, their sign-cost combination with tracking transfer,
and a squared-cost NLMS+NSA combination baseline.
"""

from __future__ import annotations

from .combiner import CombinerConfig
from .experiment import AlgorithmSpec, ExperimentConfig, ScenarioConfig
from .filters import FilterConfig
from .scenario import NoiseModel, RngSpec

__all__ = ["PRESETS", "example1", "example2", "DEFAULT_TRIALS", "DEFAULT_SEED"]

DEFAULT_TRIALS = 50
DEFAULT_SEED = 0

_NUM_TAPS = 10
_HORIZON = 20000
_CHANGE_AT = 10000
_FAST_STEP = 0.05
_REGULARIZATION = 1e-4
_MIXING_STEP = 10.0
_CLAMP = 4.0
_TRANSFER_WINDOW = 2


def _build(slow_step, noise, trials, seed):
    fast_nsa = FilterConfig(
        num_taps=_NUM_TAPS,
        step_size=_FAST_STEP,
        regularization=_REGULARIZATION,
        algorithm="nsa",
    )
    slow_nsa = FilterConfig(
        num_taps=_NUM_TAPS,
        step_size=slow_step,
        regularization=_REGULARIZATION,
        algorithm="nsa",
    )
    fast_nlms = FilterConfig(
        num_taps=_NUM_TAPS,
        step_size=_FAST_STEP,
        regularization=_REGULARIZATION,
        algorithm="nlms",
    )
    sign_tracking = CombinerConfig(
        mixing_rule="sign",
        mixing_step=_MIXING_STEP,
        clamp=_CLAMP,
        transfer="tracking",
        transfer_window=_TRANSFER_WINDOW,
    )
    squared_plain = CombinerConfig(
        mixing_rule="squared",
        mixing_step=_MIXING_STEP,
        clamp=_CLAMP,
        transfer="none",
        transfer_window=_TRANSFER_WINDOW,
    )
    return ExperimentConfig(
        scenario=ScenarioConfig(
            num_taps=_NUM_TAPS,
            input_variance=1.0,
            noise=noise,
            change_at=_CHANGE_AT,
            change_kind="sign_flip",
        ),
        algorithms=(
            AlgorithmSpec.single("nsa_fast", fast_nsa),
            AlgorithmSpec.single("nsa_slow", slow_nsa),
            AlgorithmSpec.combination("nsa_nsa", fast_nsa, slow_nsa, sign_tracking),
            AlgorithmSpec.combination("nlms_nsa", fast_nlms, slow_nsa, squared_plain),
        ),
        trials=trials,
        horizon=_HORIZON,
        rng=RngSpec(seed),
    )


def example1(trials=DEFAULT_TRIALS, seed=DEFAULT_SEED):
    """Strongly impulsive scenario: 10 dB background SNR, impulse variance
    1e4/12 at 1% occurrence, slow step 0.005."""
    noise = NoiseModel(impulse_prob=0.01, impulse_variance=1e4 / 12, snr_db=10.0)
    return _build(slow_step=0.005, noise=noise, trials=trials, seed=seed)


def example2(trials=DEFAULT_TRIALS, seed=DEFAULT_SEED):
    """Noisier background, milder impulses: 5 dB SNR, impulse variance
    1e4/20 at 1% occurrence, slow step 0.008."""
    noise = NoiseModel(impulse_prob=0.01, impulse_variance=1e4 / 20, snr_db=5.0)
    return _build(slow_step=0.008, noise=noise, trials=trials, seed=seed)


PRESETS = {"example1": example1, "example2": example2}
