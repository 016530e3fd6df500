"""Convex combination of two adaptive filters.

A fast and a slow component filter run in parallel on the same input; their
outputs are blended by a mixing weight lam in [0, 1], itself the sigmoid of an
auxiliary accumulator ``aux`` adapted by a stochastic-gradient rule. Two rules
are supported: a sign (absolute-error) cost, robust to impulsive noise, and
the classical squared-error cost. A windowed clamp keeps the accumulator
inside [-clamp, +clamp]; when the combination saturates toward the fast
filter, the tracking transfer additionally copies the fast weights into the
slow filter so the slow branch does not lag behind after abrupt changes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .filters import FilterState, predict, sign, update

__all__ = [
    "MIXING_RULES",
    "TRANSFER_MODES",
    "CombinerConfig",
    "CombinerState",
    "StepDiagnostics",
    "mixing_from_aux",
    "combined_output",
    "combined_error",
    "combined_weights",
    "aux_step_sign",
    "aux_step_squared",
    "reported_mixing",
    "mixing_step_upper_bound",
    "clamp_and_transfer",
    "step",
]

MIXING_RULES = ("sign", "squared")
TRANSFER_MODES = ("tracking", "none")


@dataclass(frozen=True)
class CombinerConfig:
    """Static configuration of the combination layer.

    Attributes
    ----------
    mixing_rule : str
        Accumulator update rule, ``"sign"`` or ``"squared"``.
    mixing_step : float
        Step of the accumulator update, positive. Serves whichever rule is
        active.
    clamp : float
        Rail for the accumulator, positive; it is confined to
        [-clamp, +clamp] at window hits.
    transfer : str
        ``"tracking"`` copies fast weights into the slow filter whenever the
        accumulator is clamped at the upper rail; ``"none"`` clamps only.
    transfer_window : int
        Window length N0 >= 1 between clamp/transfer checks. The check runs
        on iterations n with (n - 1) mod N0 == 0, so the first iteration is
        always a window hit.
    saturation_margin : float
        Distance from the rails, in accumulator units, inside which the
        reported mixing weight snaps to 0 or 1. Must satisfy
        0 < saturation_margin < clamp.
    """

    mixing_rule: str = "sign"
    mixing_step: float = 10.0
    clamp: float = 4.0
    transfer: str = "tracking"
    transfer_window: int = 2
    saturation_margin: float = 1e-2

    def __post_init__(self):
        if self.mixing_rule not in MIXING_RULES:
            raise ValueError(
                f"mixing_rule must be one of {MIXING_RULES}, got {self.mixing_rule!r}"
            )
        if not self.mixing_step > 0:
            raise ValueError(f"mixing_step must be positive, got {self.mixing_step}")
        if not self.clamp > 0:
            raise ValueError(f"clamp must be positive, got {self.clamp}")
        if self.transfer not in TRANSFER_MODES:
            raise ValueError(
                f"transfer must be one of {TRANSFER_MODES}, got {self.transfer!r}"
            )
        if self.transfer_window < 1:
            raise ValueError(
                f"transfer_window must be >= 1, got {self.transfer_window}"
            )
        if not 0 < self.saturation_margin < self.clamp:
            raise ValueError(
                "saturation_margin must lie strictly between 0 and clamp, "
                f"got {self.saturation_margin}"
            )


@dataclass(frozen=True)
class CombinerState:
    """Full state of the combination: both filters plus the mixing variables.

    ``aux`` is the accumulator behind the sigmoid and ``mixing`` the blend
    weight applied to the fast filter; ``iteration`` counts completed
    per-sample steps, so the next step executes 1-based iteration
    ``iteration + 1``.
    """

    fast: FilterState
    slow: FilterState
    config: CombinerConfig
    aux: float = 0.0
    mixing: float = 0.5
    iteration: int = 0

    def __post_init__(self):
        if self.fast.config.num_taps != self.slow.config.num_taps:
            raise ValueError(
                "fast and slow filters must have the same num_taps, got "
                f"{self.fast.config.num_taps} and {self.slow.config.num_taps}"
            )
        if not 0.0 <= self.mixing <= 1.0:
            raise ValueError(f"mixing must lie in [0, 1], got {self.mixing}")
        if self.iteration < 0:
            raise ValueError(f"iteration must be >= 0, got {self.iteration}")

    @classmethod
    def initial(cls, fast_config, slow_config, config):
        """Zero-weight filters, centered mixing (aux = 0, mixing = 1/2)."""
        return cls(
            fast=FilterState.zeros(fast_config),
            slow=FilterState.zeros(slow_config),
            config=config,
        )


@dataclass(frozen=True)
class StepDiagnostics:
    """Per-sample observables of one combination step."""

    y_fast: float
    y_slow: float
    output: float
    e_fast: float
    e_slow: float
    error: float
    mixing_reported: float
    transfer_fired: bool


def mixing_from_aux(aux):
    """Sigmoid map from the accumulator to the mixing weight.

    Strictly increasing with values in (0, 1); aux = 0 gives exactly 1/2.
    Evaluated in the overflow-safe branch form.
    """
    if aux >= 0:
        return 1.0 / (1.0 + math.exp(-aux))
    z = math.exp(aux)
    return z / (1.0 + z)


def combined_output(mixing, y_fast, y_slow):
    """Convex blend of the component outputs, lam*y1 + (1-lam)*y2."""
    return mixing * y_fast + (1.0 - mixing) * y_slow


def combined_error(mixing, e_fast, e_slow):
    """Convex blend of the component errors.

    Equals d minus the combined output whenever e_i = d - y_i.
    """
    return mixing * e_fast + (1.0 - mixing) * e_slow


def combined_weights(mixing, w_fast, w_slow):
    """Elementwise convex blend of the two weight vectors."""
    w_fast = np.asarray(w_fast, dtype=np.float64)
    w_slow = np.asarray(w_slow, dtype=np.float64)
    if w_fast.shape != w_slow.shape:
        raise ValueError(
            f"weight vectors must have equal shapes, got {w_fast.shape} "
            f"and {w_slow.shape}"
        )
    return mixing * w_fast + (1.0 - mixing) * w_slow


def aux_step_sign(aux, error, y_fast, y_slow, mixing, step_size):
    """Sign-cost gradient step on the accumulator.

    aux' = aux + step * sign(e) * (y1 - y2) * lam * (1 - lam). The increment
    depends on the error only through its sign, so an impulsive outlier
    cannot slam the mixing weight.
    """
    return aux + step_size * sign(error) * (y_fast - y_slow) * mixing * (1.0 - mixing)


def aux_step_squared(aux, error, y_fast, y_slow, mixing, step_size):
    """Squared-cost gradient step on the accumulator.

    aux' = aux + step * e * (y1 - y2) * lam * (1 - lam); linear in the error
    and hence sensitive to outliers.
    """
    return aux + step_size * error * (y_fast - y_slow) * mixing * (1.0 - mixing)


def reported_mixing(aux, mixing, clamp, margin):
    """Mixing weight with saturation snapped to the endpoints.

    Returns 1 when the accumulator sits within ``margin`` of the upper rail,
    0 within ``margin`` of the lower rail, and ``mixing`` unchanged in
    between. This is the value a practitioner would report, since the sigmoid
    never reaches the endpoints exactly.
    """
    if aux >= clamp - margin:
        return 1.0
    if aux <= -clamp + margin:
        return 0.0
    return mixing


def mixing_step_upper_bound(error, y_fast, y_slow, mixing):
    """Largest mixing step for which one sign-cost update cannot overshoot.

    2|e| / ((y1 - y2)^2 lam^2 (1 - lam)^2) in the frozen-output small-step
    model; infinite when the denominator vanishes (equal outputs or saturated
    mixing), where the update moves nothing anyway.
    """
    denom = (y_fast - y_slow) ** 2 * mixing**2 * (1.0 - mixing) ** 2
    if denom == 0.0:
        return math.inf
    return 2.0 * abs(error) / denom


def clamp_and_transfer(state):
    """Windowed rail clamp plus the tracking weight transfer.

    Acts only when the just-completed iteration opens the window, i.e.
    (state.iteration - 1) mod transfer_window == 0. At a window hit the
    accumulator is clamped to [-clamp, +clamp] and the mixing weight pinned
    to the matching endpoint: aux < -clamp pins mixing to 0, aux >= clamp
    pins it to 1. At the upper rail, tracking mode also copies the fast
    weights into the slow filter (configs stay put). The pin lasts one
    sample; the next step recomputes the sigmoid.

    Returns
    -------
    state : CombinerState
    transfer_fired : bool
        True iff the weight copy occurred.
    """
    config = state.config
    if (state.iteration - 1) % config.transfer_window != 0:
        return state, False
    if state.aux >= config.clamp:
        fired = config.transfer == "tracking"
        slow = state.slow
        if fired:
            slow = replace(slow, weights=state.fast.weights.copy())
        return replace(state, aux=config.clamp, mixing=1.0, slow=slow), fired
    if state.aux < -config.clamp:
        return replace(state, aux=-config.clamp, mixing=0.0), False
    return state, False


def step(state, line, desired):
    """One full per-sample pass of the combination.

    Order within the pass: component outputs and errors; combined output and
    error at the current mixing weight; both component weight updates; one
    accumulator step under the configured rule; sigmoid refresh of the mixing
    weight; windowed clamp/transfer. Iterations are counted 1-based, so the
    first step is a window hit.

    Parameters
    ----------
    state : CombinerState
    line : TapDelayLine
        Already pushed to the current sample.
    desired : float
        Observed (noisy) reference sample d.

    Returns
    -------
    state : CombinerState
    diagnostics : StepDiagnostics
    """
    config = state.config
    y_fast = predict(state.fast, line)
    y_slow = predict(state.slow, line)
    e_fast = desired - y_fast
    e_slow = desired - y_slow
    output = combined_output(state.mixing, y_fast, y_slow)
    error = combined_error(state.mixing, e_fast, e_slow)
    lam_reported = reported_mixing(
        state.aux, state.mixing, config.clamp, config.saturation_margin
    )

    fast = update(state.fast, line, e_fast)
    slow = update(state.slow, line, e_slow)
    if config.mixing_rule == "sign":
        aux = aux_step_sign(
            state.aux, error, y_fast, y_slow, state.mixing, config.mixing_step
        )
    else:
        aux = aux_step_squared(
            state.aux, error, y_fast, y_slow, state.mixing, config.mixing_step
        )
    state = replace(
        state,
        fast=fast,
        slow=slow,
        aux=aux,
        mixing=mixing_from_aux(aux),
        iteration=state.iteration + 1,
    )
    state, fired = clamp_and_transfer(state)
    diagnostics = StepDiagnostics(
        y_fast=y_fast,
        y_slow=y_slow,
        output=output,
        e_fast=e_fast,
        e_slow=e_slow,
        error=error,
        mixing_reported=lam_reported,
        transfer_fired=fired,
    )
    return state, diagnostics
