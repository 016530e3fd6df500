"""Convex combinations of normalized-sign adaptive filters.

Core per-sample primitives live in :mod:`combofilter.filters` and
:mod:`combofilter.combiner`; scenario generation in
:mod:`combofilter.scenario`; Monte Carlo runs in
:mod:`combofilter.experiment`; scikit-learn style estimators in
:mod:`combofilter.estimators`; canned configurations in
:mod:`combofilter.presets`; and the CLI in :mod:`combofilter.cli`.
"""

from .combiner import (
    CombinerConfig,
    CombinerState,
    StepDiagnostics,
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
from .estimators import ConvexCombinationFilter, NLMSFilter, NSAFilter
from .experiment import (
    AlgorithmResult,
    AlgorithmSpec,
    ExperimentConfig,
    LearningCurve,
    MonteCarloResult,
    ScenarioConfig,
    SteadyStateReport,
    TrialTrajectories,
    a_priori_error,
    check_optimality,
    convergence_time,
    emse_db,
    estimate_cross_emse,
    optimality_verdict,
    run_monte_carlo,
    run_trial,
)
from .filters import (
    FilterConfig,
    FilterState,
    TapDelayLine,
    nlms_update,
    nsa_update,
    predict,
    sign,
    update,
)
from .manifest import (
    FORMAT_VERSION,
    ConfigError,
    RunManifest,
    config_from_dict,
    config_to_dict,
    dump_config,
    load_config,
)
from .presets import PRESETS, example1, example2
from .scenario import (
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

__version__ = "0.1.0"
