"""Monte Carlo system-identification runs.

Simulates one or more algorithms (single filters or fast/slow combinations)
against a shared scenario, producing excess-error learning curves, mixing
trajectories, steady-state estimates over a final window, and an optimality
verdict comparing the combination against its own components.

All algorithms within a run see identical input and noise streams, so curves
are co-registered sample by sample. The per-trial work is vectorized across a
fixed-size block of trials; aggregation walks the blocks in a fixed order, so
results are bit-identical regardless of the worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .combiner import CombinerConfig
from .filters import FilterConfig
from .scenario import (
    CHANGE_KINDS,
    ISI_CHANNEL_TAPS,
    NoiseModel,
    RngSpec,
    SystemModel,
    apply_abrupt_change,
    draw_unknown_system,
    gen_bg_impulse,
    gen_wgn,
    snr_to_variance,
)

__all__ = [
    "SYSTEM_KINDS",
    "VERDICTS",
    "NEVER_CONVERGED",
    "AlgorithmSpec",
    "ScenarioConfig",
    "ExperimentConfig",
    "LearningCurve",
    "SteadyStateReport",
    "TrialTrajectories",
    "AlgorithmResult",
    "MonteCarloResult",
    "a_priori_error",
    "emse_db",
    "estimate_cross_emse",
    "optimality_verdict",
    "check_optimality",
    "convergence_time",
    "run_trial",
    "run_monte_carlo",
]

SYSTEM_KINDS = ("random", "isi_channel")
VERDICTS = ("matches_best", "better_than_both", "violation")

# Sentinel returned by convergence_time when the curve never settles.
NEVER_CONVERGED = -1

# Trials per vectorized block. Fixed (never derived from the worker count) so
# the reduction order, and therefore every output bit, is scheduling-independent.
_BLOCK_TRIALS = 64


@dataclass(frozen=True)
class AlgorithmSpec:
    """One algorithm to simulate: a single filter or a fast/slow combination.

    Exactly one of the two forms must be populated: ``filter`` alone, or the
    ``fast``/``slow``/``combiner`` trio.
    """

    name: str
    filter: FilterConfig | None = None
    fast: FilterConfig | None = None
    slow: FilterConfig | None = None
    combiner: CombinerConfig | None = None

    def __post_init__(self):
        if not self.name:
            raise ValueError("algorithm name must be non-empty")
        single = self.filter is not None
        combo_fields = (self.fast, self.slow, self.combiner)
        if single and any(f is not None for f in combo_fields):
            raise ValueError(
                f"algorithm {self.name!r} sets both 'filter' and combination fields"
            )
        if not single:
            if any(f is None for f in combo_fields):
                raise ValueError(
                    f"algorithm {self.name!r} must set either 'filter' or all of "
                    "fast/slow/combiner"
                )
            if self.fast.num_taps != self.slow.num_taps:
                raise ValueError(
                    f"algorithm {self.name!r}: fast and slow num_taps differ"
                )

    @property
    def is_combination(self):
        return self.filter is None

    @property
    def num_taps(self):
        return self.fast.num_taps if self.is_combination else self.filter.num_taps

    @classmethod
    def single(cls, name, config):
        return cls(name=name, filter=config)

    @classmethod
    def combination(cls, name, fast, slow, combiner):
        return cls(name=name, fast=fast, slow=slow, combiner=combiner)


@dataclass(frozen=True)
class ScenarioConfig:
    """Plant and signal/noise generation settings shared by all algorithms.

    ``system`` selects the plant: ``"random"`` draws a fresh unit-norm FIR
    per trial, ``"isi_channel"`` uses the fixed dispersive channel taps (and
    then ``num_taps`` must match their length).
    """

    num_taps: int = 10
    input_variance: float = 1.0
    noise: NoiseModel = NoiseModel()
    change_at: int | None = 10000
    change_kind: str = "sign_flip"
    system: str = "random"

    def __post_init__(self):
        if self.num_taps < 1:
            raise ValueError(f"num_taps must be >= 1, got {self.num_taps}")
        if not self.input_variance > 0:
            raise ValueError(
                f"input_variance must be positive, got {self.input_variance}"
            )
        if self.change_at is not None and self.change_at < 1:
            raise ValueError(f"change_at must be >= 1, got {self.change_at}")
        if self.change_kind not in CHANGE_KINDS:
            raise ValueError(
                f"change_kind must be one of {CHANGE_KINDS}, got {self.change_kind!r}"
            )
        if self.system not in SYSTEM_KINDS:
            raise ValueError(
                f"system must be one of {SYSTEM_KINDS}, got {self.system!r}"
            )
        if self.system == "isi_channel" and self.num_taps != ISI_CHANNEL_TAPS.size:
            raise ValueError(
                f"isi_channel plant requires num_taps == {ISI_CHANNEL_TAPS.size}, "
                f"got {self.num_taps}"
            )


@dataclass(frozen=True)
class ExperimentConfig:
    """Complete description of one Monte Carlo run.

    ``steady_window`` is the number of final iterations averaged for
    steady-state estimates; ``None`` selects the final tenth of the horizon.
    ``convergence_threshold_db`` optionally fixes the convergence threshold;
    ``None`` selects steady state plus 3 dB per algorithm.
    """

    scenario: ScenarioConfig
    algorithms: tuple[AlgorithmSpec, ...]
    trials: int = 50
    horizon: int = 20000
    rng: RngSpec = RngSpec(0)
    steady_window: int | None = None
    convergence_threshold_db: float | None = None

    def __post_init__(self):
        algorithms = tuple(self.algorithms)
        object.__setattr__(self, "algorithms", algorithms)
        if not algorithms:
            raise ValueError("algorithms must be non-empty")
        names = [spec.name for spec in algorithms]
        if len(set(names)) != len(names):
            raise ValueError(f"algorithm names must be unique, got {names}")
        for spec in algorithms:
            if spec.num_taps != self.scenario.num_taps:
                raise ValueError(
                    f"algorithm {spec.name!r} num_taps {spec.num_taps} does not "
                    f"match scenario num_taps {self.scenario.num_taps}"
                )
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if self.horizon < 1:
            raise ValueError(f"horizon must be >= 1, got {self.horizon}")
        if self.steady_window is not None and not (
            1 <= self.steady_window < self.horizon
        ):
            raise ValueError(
                "steady_window must lie in [1, horizon), got "
                f"{self.steady_window} for horizon {self.horizon}"
            )
        change_at = self.scenario.change_at
        if change_at is not None and change_at > self.horizon:
            raise ValueError(
                f"change_at {change_at} lies beyond the horizon {self.horizon}"
            )

    @property
    def resolved_steady_window(self):
        if self.steady_window is not None:
            return self.steady_window
        return max(1, self.horizon // 10)


@dataclass(frozen=True)
class LearningCurve:
    """Trial-averaged squared a-priori error per iteration (raw power)."""

    mean_square: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.mean_square, dtype=np.float64)
        if arr.ndim != 1 or arr.size < 1:
            raise ValueError("mean_square must be a non-empty 1-D array")
        if np.any(arr < 0):
            raise ValueError("mean_square must be non-negative")
        object.__setattr__(self, "mean_square", arr)

    @property
    def db(self):
        """10*log10 of the curve; -inf wherever the mean power is exactly 0."""
        out = np.full(self.mean_square.shape, -np.inf)
        positive = self.mean_square > 0
        out[positive] = 10.0 * np.log10(self.mean_square[positive])
        return out

    def smoothed(self, window=100):
        """Moving-average copy for plotting. Emitted files keep raw curves."""
        if not 1 <= window <= self.mean_square.size:
            raise ValueError(f"window must lie in [1, {self.mean_square.size}]")
        kernel = np.ones(window) / window
        return LearningCurve(np.convolve(self.mean_square, kernel, mode="same"))

    def __len__(self):
        return self.mean_square.size


@dataclass(frozen=True)
class SteadyStateReport:
    """Final-window, cross-trial steady-state estimates for one combination.

    All excess-error moments are raw powers (not dB): component levels, their
    cross moment, the combined level, and the level at the saturation-snapped
    mixing weight. ``mixing_variance`` measures how much the mixing weight
    still wanders over the window.
    """

    fast_emse: float
    slow_emse: float
    cross_emse: float
    combined_emse: float
    reported_emse: float
    mean_mixing: float
    mixing_variance: float
    verdict: str


@dataclass(frozen=True)
class TrialTrajectories:
    """Per-iteration trajectories of one algorithm.

    ``a_priori`` is the excess (noise-free) error of the operated output;
    combination runs also carry the component excess errors, the mixing
    weight and its accumulator as used at each iteration, and the excess
    error at the saturation-snapped mixing weight. Single-filter runs leave
    those fields None. Arrays from run_trial are 1-D over the horizon.
    """

    a_priori: np.ndarray
    fast_a_priori: np.ndarray | None = None
    slow_a_priori: np.ndarray | None = None
    mixing: np.ndarray | None = None
    aux: np.ndarray | None = None
    reported_a_priori: np.ndarray | None = None


@dataclass(frozen=True)
class AlgorithmResult:
    """Aggregated Monte Carlo outcome for one algorithm."""

    name: str
    curve: LearningCurve
    steady_state_emse: float
    mixing_mean: np.ndarray | None = None
    aux_mean: np.ndarray | None = None
    report: SteadyStateReport | None = None

    @property
    def steady_state_db(self):
        return emse_db(self.steady_state_emse)


@dataclass(frozen=True)
class MonteCarloResult:
    """All per-algorithm results of one run, keyed by algorithm name."""

    config: ExperimentConfig
    algorithms: dict

    def __getitem__(self, name):
        return self.algorithms[name]


def a_priori_error(system_weights, weights, line):
    """Excess error of the current weights on the clean plant output.

    (w0 - w)^T x: the estimation error with both noises removed, which is
    what learning curves and steady-state moments are built from.
    """
    w0 = np.asarray(system_weights, dtype=np.float64)
    w = np.asarray(weights, dtype=np.float64)
    if w0.shape != w.shape:
        raise ValueError(
            f"system and filter weights must have equal shapes, got {w0.shape} "
            f"and {w.shape}"
        )
    return float(np.dot(w0 - w, line.samples))


def emse_db(mean_square):
    """Raw excess-error power to dB; -inf sentinel at exactly zero."""
    if mean_square < 0:
        raise ValueError(f"mean_square must be >= 0, got {mean_square}")
    if mean_square == 0:
        return -math.inf
    return 10.0 * math.log10(mean_square)


def estimate_cross_emse(fast_errors, slow_errors, window):
    """Mean product of the two excess-error trajectories over the final window.

    Accepts 1-D trajectories or stacked (trials, horizon) arrays; the window
    applies to the trailing axis.
    """
    e_fast = np.asarray(fast_errors, dtype=np.float64)
    e_slow = np.asarray(slow_errors, dtype=np.float64)
    if e_fast.shape != e_slow.shape:
        raise ValueError("error trajectories must have equal shapes")
    if not 1 <= window <= e_fast.shape[-1]:
        raise ValueError(
            f"window must lie in [1, {e_fast.shape[-1]}], got {window}"
        )
    return float(np.mean(e_fast[..., -window:] * e_slow[..., -window:]))


def optimality_verdict(fast_emse, slow_emse, cross_emse, combined_emse, tol_db=1.0):
    """Classify a combination's steady state against its own components.

    ``matches_best``: combined level within tol_db of the better component.
    ``better_than_both``: combined level more than tol_db below the better
    component and, whenever the cross moment sits below both components,
    consistent (within tol_db) with the predicted level
    cross + d1*d2/(d1+d2), where d_i = component_i - cross.
    ``violation``: anything else, in particular a combined level more than
    tol_db above the better component.
    """
    best = min(fast_emse, slow_emse)
    best_db = emse_db(best)
    combined_db = emse_db(combined_emse)
    if combined_db > best_db + tol_db:
        return "violation"
    if combined_db >= best_db - tol_db:
        return "matches_best"
    # More than tol_db below the better component: check consistency with the
    # predicted optimum when the cross moment permits computing it.
    if cross_emse < best:
        d_fast = fast_emse - cross_emse
        d_slow = slow_emse - cross_emse
        predicted = cross_emse + d_fast * d_slow / (d_fast + d_slow)
        if predicted > 0 and abs(combined_db - emse_db(predicted)) <= tol_db:
            return "better_than_both"
        return "violation"
    return "better_than_both"


def check_optimality(report, tol_db=1.0):
    """Recompute the verdict from a report's raw moments."""
    return optimality_verdict(
        report.fast_emse,
        report.slow_emse,
        report.cross_emse,
        report.combined_emse,
        tol_db=tol_db,
    )


def convergence_time(curve, threshold_db, run_length=100):
    """First iteration index whose next ``run_length`` dB samples all sit
    below ``threshold_db``; NEVER_CONVERGED (-1) if no such run exists.

    ``curve`` may be a LearningCurve or a raw dB array. Indices are 0-based
    into the curve.
    """
    if isinstance(curve, LearningCurve):
        db = curve.db
    else:
        db = np.asarray(curve, dtype=np.float64)
    if run_length < 1:
        raise ValueError(f"run_length must be >= 1, got {run_length}")
    below = db < threshold_db
    if below.size < run_length:
        return NEVER_CONVERGED
    counts = np.convolve(below.astype(np.int64), np.ones(run_length, np.int64), "valid")
    hits = np.flatnonzero(counts == run_length)
    if hits.size == 0:
        return NEVER_CONVERGED
    return int(hits[0])


def _stable_sigmoid(aux):
    """Vectorized overflow-safe sigmoid, matching mixing_from_aux branchwise."""
    z = np.exp(-np.abs(aux))
    return np.where(aux >= 0.0, 1.0 / (1.0 + z), z / (1.0 + z))


def _simulate_block(config, lo, hi):
    """Simulate trials [lo, hi) for every algorithm, vectorized across trials.

    Returns {name: TrialTrajectories} with arrays shaped (hi - lo, horizon).
    """
    scenario = config.scenario
    num_taps = scenario.num_taps
    horizon = config.horizon
    n_trials = hi - lo

    x = np.empty((n_trials, horizon))
    noise = np.empty((n_trials, horizon))
    w0_before = np.empty((n_trials, num_taps))
    w0_after = np.empty((n_trials, num_taps))
    change_at = scenario.change_at
    for i, trial in enumerate(range(lo, hi)):
        system_rng = config.rng.trial_stream(trial, "system")
        if scenario.system == "isi_channel":
            w0 = np.array(ISI_CHANNEL_TAPS)
        else:
            w0 = draw_unknown_system(num_taps, system_rng)
        w0_before[i] = w0
        x[i] = gen_wgn(
            horizon, scenario.input_variance, config.rng.trial_stream(trial, "input")
        )
        bg_variance = snr_to_variance(
            w0, scenario.input_variance, scenario.noise.snr_db
        )
        if bg_variance > 0:
            background = gen_wgn(
                horizon, bg_variance, config.rng.trial_stream(trial, "background")
            )
        else:
            background = np.zeros(horizon)
        impulses = gen_bg_impulse(
            horizon, scenario.noise, config.rng.trial_stream(trial, "impulse")
        )
        noise[i] = background + impulses
        if change_at is not None:
            model = SystemModel(
                w0, change_at=change_at, change_kind=scenario.change_kind
            )
            w0_after[i] = apply_abrupt_change(model, change_at, system_rng).weights
        else:
            w0_after[i] = w0

    padded = np.concatenate([np.zeros((n_trials, num_taps - 1)), x], axis=1)
    # (trials, horizon, num_taps) delay-line view, newest first.
    windows = sliding_window_view(padded, num_taps, axis=1)[:, :, ::-1]
    clean = np.einsum("tnm,tm->tn", windows, w0_before)
    if change_at is not None:
        split = change_at - 1  # 1-based iteration -> 0-based sample index
        clean[:, split:] = np.einsum(
            "tnm,tm->tn", windows[:, split:], w0_after
        )
    desired = clean + noise
    norms = np.einsum("tnm,tnm->tn", windows, windows)

    out = {}
    for spec in config.algorithms:
        if spec.is_combination:
            out[spec.name] = _simulate_combination(spec, windows, norms, clean, desired)
        else:
            out[spec.name] = _simulate_single(spec, windows, norms, clean, desired)
    return out


def _simulate_single(spec, windows, norms, clean, desired):
    n_trials, horizon, _ = windows.shape
    cfg = spec.filter
    mu = cfg.step_size
    eps = cfg.regularization
    is_nsa = cfg.algorithm == "nsa"
    w = np.zeros((n_trials, cfg.num_taps))
    a_priori = np.empty((n_trials, horizon))
    for n in range(horizon):
        xn = windows[:, n, :]
        y = np.einsum("tm,tm->t", w, xn)
        a_priori[:, n] = clean[:, n] - y
        e = desired[:, n] - y
        g = np.sign(e) if is_nsa else e
        w += ((mu * g) / (eps + norms[:, n]))[:, None] * xn
    return TrialTrajectories(a_priori=a_priori)


def _simulate_combination(spec, windows, norms, clean, desired):
    n_trials, horizon, num_taps = windows.shape
    fast_cfg, slow_cfg, comb = spec.fast, spec.slow, spec.combiner
    fast_nsa = fast_cfg.algorithm == "nsa"
    slow_nsa = slow_cfg.algorithm == "nsa"
    sign_rule = comb.mixing_rule == "sign"
    tracking = comb.transfer == "tracking"
    clamp = comb.clamp
    margin = comb.saturation_margin
    rho = comb.mixing_step
    window = comb.transfer_window

    w_fast = np.zeros((n_trials, num_taps))
    w_slow = np.zeros((n_trials, num_taps))
    aux = np.zeros(n_trials)
    lam = np.full(n_trials, 0.5)

    a_priori = np.empty((n_trials, horizon))
    fast_a_priori = np.empty((n_trials, horizon))
    slow_a_priori = np.empty((n_trials, horizon))
    mixing_traj = np.empty((n_trials, horizon))
    aux_traj = np.empty((n_trials, horizon))
    reported_a_priori = np.empty((n_trials, horizon))

    for n in range(horizon):
        xn = windows[:, n, :]
        cn = clean[:, n]
        dn = desired[:, n]
        y_fast = np.einsum("tm,tm->t", w_fast, xn)
        y_slow = np.einsum("tm,tm->t", w_slow, xn)
        e_fast = dn - y_fast
        e_slow = dn - y_slow
        error = lam * e_fast + (1.0 - lam) * e_slow

        fast_a_priori[:, n] = cn - y_fast
        slow_a_priori[:, n] = cn - y_slow
        a_priori[:, n] = cn - (lam * y_fast + (1.0 - lam) * y_slow)
        mixing_traj[:, n] = lam
        aux_traj[:, n] = aux
        lam_reported = np.where(
            aux >= clamp - margin,
            1.0,
            np.where(aux <= -clamp + margin, 0.0, lam),
        )
        reported_a_priori[:, n] = cn - (
            lam_reported * y_fast + (1.0 - lam_reported) * y_slow
        )

        denom = norms[:, n]
        g_fast = np.sign(e_fast) if fast_nsa else e_fast
        g_slow = np.sign(e_slow) if slow_nsa else e_slow
        w_fast += (
            (fast_cfg.step_size * g_fast) / (fast_cfg.regularization + denom)
        )[:, None] * xn
        w_slow += (
            (slow_cfg.step_size * g_slow) / (slow_cfg.regularization + denom)
        )[:, None] * xn

        g_mix = np.sign(error) if sign_rule else error
        aux = aux + rho * g_mix * (y_fast - y_slow) * lam * (1.0 - lam)
        lam = _stable_sigmoid(aux)
        if n % window == 0:  # 1-based iteration n+1 satisfies (n+1-1) mod N0 == 0
            low = aux < -clamp
            if low.any():
                aux[low] = -clamp
                lam[low] = 0.0
            high = aux >= clamp
            if high.any():
                aux[high] = clamp
                lam[high] = 1.0
                if tracking:
                    w_slow[high] = w_fast[high]

    return TrialTrajectories(
        a_priori=a_priori,
        fast_a_priori=fast_a_priori,
        slow_a_priori=slow_a_priori,
        mixing=mixing_traj,
        aux=aux_traj,
        reported_a_priori=reported_a_priori,
    )


@dataclass
class _BlockStats:
    """Small per-block reductions shipped back from workers."""

    trials: int
    sq_sum: np.ndarray
    window_sq: float
    mixing_sum: np.ndarray | None = None
    aux_sum: np.ndarray | None = None
    window_sq_fast: float = 0.0
    window_sq_slow: float = 0.0
    window_cross: float = 0.0
    window_sq_reported: float = 0.0
    window_mixing: float = 0.0
    window_mixing_sq: float = 0.0


def _collect_block(config, lo, hi):
    window = config.resolved_steady_window
    tail = slice(config.horizon - window, config.horizon)
    stats = {}
    for name, traj in _simulate_block(config, lo, hi).items():
        sq = traj.a_priori**2
        block = _BlockStats(
            trials=hi - lo,
            sq_sum=sq.sum(axis=0),
            window_sq=float(sq[:, tail].sum()),
        )
        if traj.mixing is not None:
            block.mixing_sum = traj.mixing.sum(axis=0)
            block.aux_sum = traj.aux.sum(axis=0)
            block.window_sq_fast = float((traj.fast_a_priori[:, tail] ** 2).sum())
            block.window_sq_slow = float((traj.slow_a_priori[:, tail] ** 2).sum())
            block.window_cross = float(
                (traj.fast_a_priori[:, tail] * traj.slow_a_priori[:, tail]).sum()
            )
            block.window_sq_reported = float(
                (traj.reported_a_priori[:, tail] ** 2).sum()
            )
            block.window_mixing = float(traj.mixing[:, tail].sum())
            block.window_mixing_sq = float((traj.mixing[:, tail] ** 2).sum())
        stats[name] = block
    return stats


def _collect_block_task(args):
    return _collect_block(*args)


def run_trial(config, trial_index):
    """Simulate a single trial for every algorithm.

    Returns {name: TrialTrajectories} with 1-D arrays over the horizon. All
    algorithms see the same input and noise streams. The trial index may lie
    beyond config.trials; trajectories are a pure function of (config minus
    trials, trial_index).
    """
    if trial_index < 0:
        raise ValueError(f"trial_index must be >= 0, got {trial_index}")
    block = _simulate_block(config, trial_index, trial_index + 1)
    out = {}
    for name, traj in block.items():
        out[name] = TrialTrajectories(
            a_priori=traj.a_priori[0],
            fast_a_priori=None if traj.fast_a_priori is None else traj.fast_a_priori[0],
            slow_a_priori=None if traj.slow_a_priori is None else traj.slow_a_priori[0],
            mixing=None if traj.mixing is None else traj.mixing[0],
            aux=None if traj.aux is None else traj.aux[0],
            reported_a_priori=(
                None if traj.reported_a_priori is None else traj.reported_a_priori[0]
            ),
        )
    return out


def run_monte_carlo(config, jobs=1):
    """Run all trials of an experiment and aggregate.

    ``jobs`` workers split the fixed-size trial blocks; the reduction always
    walks blocks in index order, so any worker count produces bit-identical
    results.
    """
    if jobs < 1:
        raise ValueError(f"jobs must be >= 1, got {jobs}")
    blocks = [
        (lo, min(lo + _BLOCK_TRIALS, config.trials))
        for lo in range(0, config.trials, _BLOCK_TRIALS)
    ]
    if jobs > 1 and len(blocks) > 1:
        tasks = [(config, lo, hi) for lo, hi in blocks]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            collected = list(pool.map(_collect_block_task, tasks))
    else:
        collected = [_collect_block(config, lo, hi) for lo, hi in blocks]

    window = config.resolved_steady_window
    results = {}
    for spec in config.algorithms:
        first = collected[0][spec.name]
        total = replace(first, sq_sum=first.sq_sum.copy())
        if total.mixing_sum is not None:
            total.mixing_sum = total.mixing_sum.copy()
            total.aux_sum = total.aux_sum.copy()
        for stats in collected[1:]:
            block = stats[spec.name]
            total.trials += block.trials
            total.sq_sum += block.sq_sum
            total.window_sq += block.window_sq
            if total.mixing_sum is not None:
                total.mixing_sum += block.mixing_sum
                total.aux_sum += block.aux_sum
                total.window_sq_fast += block.window_sq_fast
                total.window_sq_slow += block.window_sq_slow
                total.window_cross += block.window_cross
                total.window_sq_reported += block.window_sq_reported
                total.window_mixing += block.window_mixing
                total.window_mixing_sq += block.window_mixing_sq

        n_trials = total.trials
        n_window = n_trials * window
        curve = LearningCurve(total.sq_sum / n_trials)
        steady = total.window_sq / n_window
        report = None
        mixing_mean = None
        aux_mean = None
        if spec.is_combination:
            mixing_mean = total.mixing_sum / n_trials
            aux_mean = total.aux_sum / n_trials
            fast_emse = total.window_sq_fast / n_window
            slow_emse = total.window_sq_slow / n_window
            cross = total.window_cross / n_window
            mean_mixing = total.window_mixing / n_window
            mixing_var = max(
                0.0, total.window_mixing_sq / n_window - mean_mixing**2
            )
            report = SteadyStateReport(
                fast_emse=fast_emse,
                slow_emse=slow_emse,
                cross_emse=cross,
                combined_emse=steady,
                reported_emse=total.window_sq_reported / n_window,
                mean_mixing=mean_mixing,
                mixing_variance=mixing_var,
                verdict=optimality_verdict(fast_emse, slow_emse, cross, steady),
            )
        results[spec.name] = AlgorithmResult(
            name=spec.name,
            curve=curve,
            steady_state_emse=steady,
            mixing_mean=mixing_mean,
            aux_mean=aux_mean,
            report=report,
        )
    return MonteCarloResult(config=config, algorithms=results)
