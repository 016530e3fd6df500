"""Component adaptive FIR filters.

Per-sample predict/update primitives for the two filter families used by the
convex combination: the normalized sign algorithm (NSA), whose weight update
depends on the error only through its sign, and the normalized LMS (NLMS)
baseline, whose update is proportional to the error.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

__all__ = [
    "ALGORITHMS",
    "FilterConfig",
    "FilterState",
    "TapDelayLine",
    "sign",
    "predict",
    "nsa_update",
    "nlms_update",
    "update",
]

ALGORITHMS = ("nsa", "nlms")


def sign(x):
    """Three-valued sign of ``x``: 1 if positive, -1 if negative, 0 at zero."""
    if x > 0:
        return 1
    if x < 0:
        return -1
    return 0


@dataclass(frozen=True)
class FilterConfig:
    """Static configuration of one adaptive FIR filter.

    Attributes
    ----------
    num_taps : int
        Filter length M, at least 1.
    step_size : float
        Adaptation step, positive.
    regularization : float
        Additive constant in the input-power normalization, positive. Keeps
        the update finite when the delay line is all zeros.
    algorithm : str
        Update rule, ``"nsa"`` or ``"nlms"``.
    """

    num_taps: int
    step_size: float
    regularization: float = 1e-4
    algorithm: str = "nsa"

    def __post_init__(self):
        if self.num_taps < 1:
            raise ValueError(f"num_taps must be >= 1, got {self.num_taps}")
        if not self.step_size > 0:
            raise ValueError(f"step_size must be positive, got {self.step_size}")
        if not self.regularization > 0:
            raise ValueError(
                f"regularization must be positive, got {self.regularization}"
            )
        if self.algorithm not in ALGORITHMS:
            raise ValueError(
                f"algorithm must be one of {ALGORITHMS}, got {self.algorithm!r}"
            )


@dataclass(frozen=True)
class FilterState:
    """Weight vector of one filter plus its configuration.

    Treated as immutable: updates return a new state and never touch the old
    weight array, so states can be kept around for later comparison.
    """

    weights: np.ndarray
    config: FilterConfig

    def __post_init__(self):
        weights = np.asarray(self.weights, dtype=np.float64)
        if weights.shape != (self.config.num_taps,):
            raise ValueError(
                f"weights must have shape ({self.config.num_taps},), "
                f"got {weights.shape}"
            )
        if not np.all(np.isfinite(weights)):
            raise ValueError("weights must be finite")
        object.__setattr__(self, "weights", weights)

    @classmethod
    def zeros(cls, config):
        """All-zero initial state for ``config``."""
        return cls(np.zeros(config.num_taps), config)


class TapDelayLine:
    """The most recent ``num_taps`` input samples, newest first.

    Starts zero-prefilled, so the first M-1 outputs see an implicit all-zero
    history; shifting in one sample drops exactly the oldest.
    """

    def __init__(self, num_taps):
        num_taps = int(num_taps)
        if num_taps < 1:
            raise ValueError(f"num_taps must be >= 1, got {num_taps}")
        self._buffer = np.zeros(num_taps)

    @classmethod
    def from_samples(cls, samples):
        """Delay line preloaded with ``samples``, given newest first."""
        samples = np.asarray(samples, dtype=np.float64)
        if samples.ndim != 1 or samples.size < 1:
            raise ValueError("samples must be a non-empty 1-D sequence")
        line = cls(samples.size)
        line._buffer[:] = samples
        return line

    def push(self, sample):
        """Shift in one new sample, dropping the oldest."""
        buffer = self._buffer
        buffer[1:] = buffer[:-1]
        buffer[0] = sample

    @property
    def samples(self):
        """Current contents, newest first. Callers must not mutate."""
        return self._buffer

    def __len__(self):
        return self._buffer.size


def predict(state, line):
    """Filter output for the current delay-line contents, w^T x."""
    return float(np.dot(state.weights, line.samples))


def nsa_update(state, line, error):
    """One normalized-sign-algorithm update.

    w' = w + mu * sign(e) * x / (eps + ||x||^2). The error enters only through
    its sign, so a single huge outlier moves the weights no further than a
    small error of the same sign; the normalized increment norm is bounded by
    mu / (2 sqrt(eps)) regardless of the input.

    Parameters
    ----------
    state : FilterState
    line : TapDelayLine
        Must match the state's ``num_taps``.
    error : float
        Estimation error d - w^T x for this sample.

    Returns
    -------
    FilterState
        The updated state; ``state`` itself is unchanged.
    """
    x = line.samples
    config = state.config
    scale = config.step_size * sign(error) / (
        config.regularization + float(np.dot(x, x))
    )
    return replace(state, weights=state.weights + scale * x)


def nlms_update(state, line, error):
    """One normalized-LMS update: w' = w + mu * e * x / (eps + ||x||^2).

    The increment is linear in the error, which converges fast on Gaussian
    noise but lets impulsive outliers throw the weights.
    """
    x = line.samples
    config = state.config
    scale = config.step_size * error / (
        config.regularization + float(np.dot(x, x))
    )
    return replace(state, weights=state.weights + scale * x)


def update(state, line, error):
    """Apply the update rule selected by the state's configuration."""
    if state.config.algorithm == "nlms":
        return nlms_update(state, line, error)
    return nsa_update(state, line, error)
