"""Scikit-learn style wrappers around the streaming filter cores.

Estimators consume an (input, desired) signal pair through ``fit`` /
``partial_fit`` and expose learned weights with trailing-underscore names;
``predict`` applies the learned FIR statically (no adaptation) from a zero
initial history. Construction parameters follow the scikit-learn contract,
so ``get_params`` / ``set_params`` / ``clone`` work as usual.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .combiner import CombinerConfig, CombinerState, step
from .filters import FilterConfig, FilterState, TapDelayLine, predict, update
from .validation import check_signal, check_signal_pair

__all__ = ["NSAFilter", "NLMSFilter", "ConvexCombinationFilter"]


class _SingleFilterBase(BaseEstimator):
    """Shared streaming plumbing for the single-filter estimators."""

    _algorithm = "nsa"

    def __init__(self, num_taps=10, step_size=0.05, regularization=1e-4):
        self.num_taps = num_taps
        self.step_size = step_size
        self.regularization = regularization

    def _filter_config(self):
        return FilterConfig(
            num_taps=self.num_taps,
            step_size=self.step_size,
            regularization=self.regularization,
            algorithm=self._algorithm,
        )

    def _reset(self):
        config = self._filter_config()
        self._state = FilterState.zeros(config)
        self._line = TapDelayLine(config.num_taps)
        self.weights_ = self._state.weights
        self.n_samples_seen_ = 0

    def fit(self, x, d):
        """Reset the filter and adapt through the signal pair once."""
        self._reset()
        return self.partial_fit(x, d)

    def partial_fit(self, x, d):
        """Continue streaming adaptation, keeping weights and delay line."""
        x, d = check_signal_pair(x, d)
        if not hasattr(self, "weights_"):
            self._reset()
        state = self._state
        line = self._line
        for xn, dn in zip(x, d):
            line.push(xn)
            error = dn - predict(state, line)
            state = update(state, line, error)
        self._state = state
        self.weights_ = state.weights
        self.n_samples_seen_ += x.size
        return self

    def predict(self, x):
        """Filter ``x`` through the learned weights, zero initial history."""
        check_is_fitted(self, "weights_")
        x = check_signal(x)
        return np.convolve(x, self.weights_)[: x.size]


class NSAFilter(_SingleFilterBase):
    """Adaptive FIR filter trained by the normalized sign algorithm.

    The weight update uses only the sign of the estimation error, making the
    filter robust to impulsive observation noise at the price of slower
    convergence than NLMS on clean data.

    Parameters
    ----------
    num_taps : int
        Filter length.
    step_size : float
        Adaptation step, positive.
    regularization : float
        Positive constant added to the input power in the normalization.

    Attributes
    ----------
    weights_ : ndarray of shape (num_taps,)
        Learned FIR coefficients.
    n_samples_seen_ : int
        Samples consumed so far by fit/partial_fit.
    """

    _algorithm = "nsa"


class NLMSFilter(_SingleFilterBase):
    """Adaptive FIR filter trained by normalized LMS.

    Fast on Gaussian noise, fragile under impulses; see NSAFilter for the
    parameter and attribute description, which is identical.
    """

    _algorithm = "nlms"


class ConvexCombinationFilter(BaseEstimator):
    """Convex combination of a fast and a slow adaptive FIR filter.

    Both component filters adapt in parallel on every sample; their outputs
    are blended by a sigmoid mixing weight adapted on a sign or squared cost,
    with a windowed clamp and optional tracking weight transfer from the fast
    into the slow filter at upper-rail saturation.

    Parameters
    ----------
    num_taps : int
        Length of both component filters.
    fast_step, slow_step : float
        Component adaptation steps; the fast one should be the larger.
    regularization : float
        Shared normalization constant of both components.
    fast_algorithm, slow_algorithm : str
        Component update rules, ``"nsa"`` or ``"nlms"``.
    mixing_rule : str
        ``"sign"`` or ``"squared"`` accumulator update.
    mixing_step : float
        Accumulator step.
    clamp : float
        Accumulator rail.
    transfer : str
        ``"tracking"`` or ``"none"``.
    transfer_window : int
        Iterations between clamp/transfer checks.
    saturation_margin : float
        Rail distance within which the reported mixing weight snaps to 0/1.

    Attributes
    ----------
    weights_ : ndarray of shape (num_taps,)
        Convex blend of the component weights at the current mixing weight.
    fast_weights_, slow_weights_ : ndarray of shape (num_taps,)
    mixing_ : float
        Current mixing weight.
    mixing_aux_ : float
        Current accumulator value.
    transfer_count_ : int
        Number of tracking transfers fired so far.
    n_samples_seen_ : int
    """

    def __init__(
        self,
        num_taps=10,
        fast_step=0.05,
        slow_step=0.005,
        regularization=1e-4,
        fast_algorithm="nsa",
        slow_algorithm="nsa",
        mixing_rule="sign",
        mixing_step=10.0,
        clamp=4.0,
        transfer="tracking",
        transfer_window=2,
        saturation_margin=1e-2,
    ):
        self.num_taps = num_taps
        self.fast_step = fast_step
        self.slow_step = slow_step
        self.regularization = regularization
        self.fast_algorithm = fast_algorithm
        self.slow_algorithm = slow_algorithm
        self.mixing_rule = mixing_rule
        self.mixing_step = mixing_step
        self.clamp = clamp
        self.transfer = transfer
        self.transfer_window = transfer_window
        self.saturation_margin = saturation_margin

    def _configs(self):
        fast = FilterConfig(
            num_taps=self.num_taps,
            step_size=self.fast_step,
            regularization=self.regularization,
            algorithm=self.fast_algorithm,
        )
        slow = FilterConfig(
            num_taps=self.num_taps,
            step_size=self.slow_step,
            regularization=self.regularization,
            algorithm=self.slow_algorithm,
        )
        comb = CombinerConfig(
            mixing_rule=self.mixing_rule,
            mixing_step=self.mixing_step,
            clamp=self.clamp,
            transfer=self.transfer,
            transfer_window=self.transfer_window,
            saturation_margin=self.saturation_margin,
        )
        return fast, slow, comb

    def _reset(self):
        fast, slow, comb = self._configs()
        self._state = CombinerState.initial(fast, slow, comb)
        self._line = TapDelayLine(self.num_taps)
        self.transfer_count_ = 0
        self.n_samples_seen_ = 0
        self._refresh_attributes()

    def _refresh_attributes(self):
        state = self._state
        self.fast_weights_ = state.fast.weights
        self.slow_weights_ = state.slow.weights
        self.mixing_ = state.mixing
        self.mixing_aux_ = state.aux
        self.weights_ = (
            state.mixing * state.fast.weights
            + (1.0 - state.mixing) * state.slow.weights
        )

    def fit(self, x, d):
        """Reset the combination and adapt through the signal pair once."""
        self._reset()
        return self.partial_fit(x, d)

    def partial_fit(self, x, d):
        """Continue streaming adaptation of both components and the mixing."""
        x, d = check_signal_pair(x, d)
        if not hasattr(self, "weights_"):
            self._reset()
        state = self._state
        line = self._line
        fired = 0
        for xn, dn in zip(x, d):
            line.push(xn)
            state, diagnostics = step(state, line, dn)
            fired += diagnostics.transfer_fired
        self._state = state
        self.transfer_count_ += fired
        self.n_samples_seen_ += x.size
        self._refresh_attributes()
        return self

    def predict(self, x):
        """Filter ``x`` through the blended weights, zero initial history."""
        check_is_fitted(self, "weights_")
        x = check_signal(x)
        return np.convolve(x, self.weights_)[: x.size]
