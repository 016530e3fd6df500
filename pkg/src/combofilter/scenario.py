"""Signal, system, and noise generation for system-identification runs.

The unknown plant is an FIR system driven by white Gaussian noise; its output
is observed through additive background Gaussian noise at a prescribed SNR
plus a Bernoulli-Gaussian impulse train. Every random quantity is drawn from
a named per-trial stream derived from one master seed, so a scenario is a
pure function of its RngSpec.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

__all__ = [
    "CHANGE_KINDS",
    "STREAM_ROLES",
    "ISI_CHANNEL_TAPS",
    "RngSpec",
    "NoiseModel",
    "SystemModel",
    "gen_wgn",
    "gen_bg_impulse",
    "snr_to_variance",
    "desired_signal",
    "draw_unknown_system",
    "apply_abrupt_change",
]

CHANGE_KINDS = ("sign_flip", "redraw")

# Fixed role ids keep the per-trial streams disjoint and reproducible.
STREAM_ROLES = {"input": 0, "background": 1, "impulse": 2, "system": 3}

# Eleven-tap dispersive channel usable as a fixed real-valued plant instead of
# a random draw. Close to unit norm as given.
ISI_CHANNEL_TAPS = np.array(
    [0.04, -0.05, 0.07, -0.21, -0.5, 0.72, 0.36, 0.0, 0.21, 0.03, 0.07]
)
ISI_CHANNEL_TAPS.flags.writeable = False


@dataclass(frozen=True)
class RngSpec:
    """Master seed plus the derivation rule for per-trial random streams.

    Each (trial, role) pair gets its own generator seeded from
    ``SeedSequence((seed, trial, role_id))`` with the role ids in
    ``STREAM_ROLES``. Streams never overlap across trials or roles, and the
    same spec always reproduces the same scenario.
    """

    seed: int = 0

    def __post_init__(self):
        if self.seed < 0:
            raise ValueError(f"seed must be >= 0, got {self.seed}")

    def trial_stream(self, trial, role):
        """Fresh generator for one (trial, role) pair."""
        if trial < 0:
            raise ValueError(f"trial must be >= 0, got {trial}")
        role_id = STREAM_ROLES[role]
        return np.random.default_rng(
            np.random.SeedSequence((self.seed, int(trial), role_id))
        )


@dataclass(frozen=True)
class NoiseModel:
    """Observation-noise description: impulse train plus background level.

    Attributes
    ----------
    impulse_prob : float
        Occurrence probability c of an impulse per sample, in [0, 1].
    impulse_variance : float
        Variance of the Gaussian impulse amplitudes, positive. The impulse
        train itself then has variance c * impulse_variance.
    snr_db : float
        Background SNR in dB relative to the clean system-output power.
        ``inf`` switches the background noise off.
    """

    impulse_prob: float = 0.01
    impulse_variance: float = 1e4 / 12
    snr_db: float = 10.0

    def __post_init__(self):
        if not 0.0 <= self.impulse_prob <= 1.0:
            raise ValueError(
                f"impulse_prob must lie in [0, 1], got {self.impulse_prob}"
            )
        if not self.impulse_variance > 0:
            raise ValueError(
                f"impulse_variance must be positive, got {self.impulse_variance}"
            )
        if math.isnan(self.snr_db):
            raise ValueError("snr_db must not be NaN")


@dataclass(frozen=True)
class SystemModel:
    """Unknown FIR plant, optionally changing abruptly mid-run.

    ``change_at`` is the 1-based iteration from which the changed plant is in
    effect; ``None`` means no change. ``sign_flip`` negates every tap,
    ``redraw`` replaces the plant with a fresh unit-norm draw.
    """

    weights: np.ndarray
    change_at: int | None = None
    change_kind: str = "sign_flip"

    def __post_init__(self):
        weights = np.asarray(self.weights, dtype=np.float64)
        if weights.ndim != 1 or weights.size < 1:
            raise ValueError("weights must be a non-empty 1-D vector")
        if not np.all(np.isfinite(weights)):
            raise ValueError("weights must be finite")
        if not float(np.dot(weights, weights)) > 0:
            raise ValueError("weights must have positive norm")
        if self.change_at is not None and self.change_at < 1:
            raise ValueError(f"change_at must be >= 1, got {self.change_at}")
        if self.change_kind not in CHANGE_KINDS:
            raise ValueError(
                f"change_kind must be one of {CHANGE_KINDS}, got {self.change_kind!r}"
            )
        object.__setattr__(self, "weights", weights)


def gen_wgn(n_samples, variance, rng):
    """Zero-mean white Gaussian samples with the given variance.

    Parameters
    ----------
    n_samples : int
        Number of samples, >= 1.
    variance : float
        Strictly positive.
    rng : numpy.random.Generator
    """
    if n_samples < 1:
        raise ValueError(f"n_samples must be >= 1, got {n_samples}")
    if not variance > 0:
        raise ValueError(f"variance must be positive, got {variance}")
    return math.sqrt(variance) * rng.standard_normal(n_samples)


def gen_bg_impulse(n_samples, model, rng):
    """Bernoulli-Gaussian impulse train.

    Each sample is the product of a Bernoulli(impulse_prob) occurrence flag
    and an independent zero-mean Gaussian amplitude of variance
    ``impulse_variance``, giving overall variance c * impulse_variance. The
    draw order is fixed (all occurrence uniforms first, then all amplitudes)
    so a given stream always yields the same train.
    """
    if n_samples < 1:
        raise ValueError(f"n_samples must be >= 1, got {n_samples}")
    occurs = rng.random(n_samples) < model.impulse_prob
    amplitudes = math.sqrt(model.impulse_variance) * rng.standard_normal(n_samples)
    return np.where(occurs, amplitudes, 0.0)


def snr_to_variance(system_weights, input_variance, snr_db):
    """Background-noise variance realizing ``snr_db``.

    The SNR reference is the clean plant output power, which for white input
    is input_variance * ||w0||^2. ``snr_db = inf`` yields 0 (noise off).
    """
    weights = np.asarray(system_weights, dtype=np.float64)
    if not input_variance > 0:
        raise ValueError(f"input_variance must be positive, got {input_variance}")
    power = input_variance * float(np.dot(weights, weights))
    if not power > 0:
        raise ValueError("system weights must have positive norm")
    return power / 10.0 ** (snr_db / 10.0)


def desired_signal(system_weights, line, background, impulse):
    """Observed reference sample: clean plant response plus both noises."""
    weights = np.asarray(system_weights, dtype=np.float64)
    clean = float(np.dot(weights, line.samples))
    return clean + background + impulse


def draw_unknown_system(num_taps, rng):
    """Unit-norm Gaussian draw for the unknown plant's taps."""
    if num_taps < 1:
        raise ValueError(f"num_taps must be >= 1, got {num_taps}")
    while True:
        weights = rng.standard_normal(num_taps)
        norm = float(np.linalg.norm(weights))
        if norm > 0:
            return weights / norm


def apply_abrupt_change(model, n, rng=None):
    """Scheduled abrupt plant change.

    At n == change_at the plant is replaced (sign flip or fresh unit-norm
    redraw); at any other n the model is returned unchanged. The redraw pulls
    from ``rng``, which must therefore be supplied for that kind.
    """
    if model.change_at is None or n != model.change_at:
        return model
    if model.change_kind == "sign_flip":
        return replace(model, weights=-model.weights)
    if rng is None:
        raise ValueError("redraw change requires an rng stream")
    return replace(
        model, weights=draw_unknown_system(model.weights.size, rng)
    )
