"""Experiment-config serialization and run manifests.

A manifest is a YAML document carrying a format version tag plus the fully
resolved experiment configuration; loading the manifest back reproduces the
exact run, bit for bit. Validation errors carry a dotted field path so a CLI
user can find the offending entry.
"""

from __future__ import annotations

from dataclasses import dataclass

import yaml

from .combiner import CombinerConfig
from .experiment import AlgorithmSpec, ExperimentConfig, ScenarioConfig
from .filters import FilterConfig
from .scenario import NoiseModel, RngSpec

__all__ = [
    "FORMAT_VERSION",
    "ConfigError",
    "RunManifest",
    "config_to_dict",
    "config_from_dict",
    "load_config",
    "dump_config",
]

FORMAT_VERSION = 1


class ConfigError(ValueError):
    """Config validation error, carrying the offending field path."""

    def __init__(self, field, message):
        self.field = field
        self.message = message
        super().__init__(f"{field}: {message}")


@dataclass(frozen=True)
class RunManifest:
    """Everything the CLI resolved for one run.

    ``config_path`` is the source file, None when a preset was used; the
    config plus format version fully determine every output byte.
    """

    config: ExperimentConfig
    out_dir: str
    config_path: str | None = None
    format_version: int = FORMAT_VERSION


def _require(mapping, key, path):
    if key not in mapping:
        raise ConfigError(f"{path}.{key}" if path else key, "missing required field")
    return mapping[key]


def _reject_unknown(mapping, known, path):
    for key in mapping:
        if key not in known:
            where = f"{path}.{key}" if path else key
            raise ConfigError(where, "unknown field")


def _build(factory, path, /, **kwargs):
    """Construct a config dataclass, rewrapping its ValueError with the path."""
    try:
        return factory(**kwargs)
    except ConfigError:
        raise
    except (TypeError, ValueError) as err:
        raise ConfigError(path, str(err)) from err


def _filter_to_dict(config, include_taps=False):
    out = {
        "algorithm": config.algorithm,
        "step_size": config.step_size,
        "regularization": config.regularization,
    }
    if include_taps:
        out["num_taps"] = config.num_taps
    return out


def _filter_from_dict(mapping, path, num_taps):
    if not isinstance(mapping, dict):
        raise ConfigError(path, "must be a mapping")
    _reject_unknown(mapping, {"algorithm", "step_size", "regularization"}, path)
    return _build(
        FilterConfig,
        path,
        num_taps=num_taps,
        step_size=_require(mapping, "step_size", path),
        regularization=mapping.get("regularization", 1e-4),
        algorithm=mapping.get("algorithm", "nsa"),
    )


_COMBINER_KEYS = {
    "mixing_rule": "mixing_rule",
    "mixing_step": "mixing_step",
    "clamp": "clamp",
    "transfer": "transfer",
    "transfer_window": "transfer_window",
    "saturation_margin": "saturation_margin",
}


def _algorithm_to_dict(spec):
    if not spec.is_combination:
        out = {"name": spec.name, "kind": spec.filter.algorithm}
        out.update(_filter_to_dict(spec.filter))
        del out["algorithm"]
        return out
    comb = spec.combiner
    return {
        "name": spec.name,
        "kind": "combination",
        "fast": _filter_to_dict(spec.fast),
        "slow": _filter_to_dict(spec.slow),
        "mixing_rule": comb.mixing_rule,
        "mixing_step": comb.mixing_step,
        "clamp": comb.clamp,
        "transfer": comb.transfer,
        "transfer_window": comb.transfer_window,
        "saturation_margin": comb.saturation_margin,
    }


def _algorithm_from_dict(mapping, path, num_taps):
    if not isinstance(mapping, dict):
        raise ConfigError(path, "must be a mapping")
    name = _require(mapping, "name", path)
    kind = _require(mapping, "kind", path)
    if kind in ("nsa", "nlms"):
        _reject_unknown(
            mapping, {"name", "kind", "step_size", "regularization"}, path
        )
        config = _build(
            FilterConfig,
            path,
            num_taps=num_taps,
            step_size=_require(mapping, "step_size", path),
            regularization=mapping.get("regularization", 1e-4),
            algorithm=kind,
        )
        return _build(AlgorithmSpec.single, path, name=name, config=config)
    if kind != "combination":
        raise ConfigError(
            f"{path}.kind", f"must be 'nsa', 'nlms' or 'combination', got {kind!r}"
        )
    known = {"name", "kind", "fast", "slow"} | set(_COMBINER_KEYS)
    _reject_unknown(mapping, known, path)
    fast = _filter_from_dict(_require(mapping, "fast", path), f"{path}.fast", num_taps)
    slow = _filter_from_dict(_require(mapping, "slow", path), f"{path}.slow", num_taps)
    comb_kwargs = {
        field: mapping[key] for key, field in _COMBINER_KEYS.items() if key in mapping
    }
    comb = _build(CombinerConfig, path, **comb_kwargs)
    return _build(
        AlgorithmSpec.combination, path, name=name, fast=fast, slow=slow, combiner=comb
    )


def config_to_dict(config):
    """Plain-type dict representation of an ExperimentConfig."""
    scenario = config.scenario
    out = {
        "trials": config.trials,
        "horizon": config.horizon,
        "seed": config.rng.seed,
        "scenario": {
            "num_taps": scenario.num_taps,
            "input_variance": scenario.input_variance,
            "snr_db": scenario.noise.snr_db,
            "impulse_prob": scenario.noise.impulse_prob,
            "impulse_variance": scenario.noise.impulse_variance,
            "change_at": scenario.change_at,
            "change_kind": scenario.change_kind,
            "system": scenario.system,
        },
        "algorithms": [_algorithm_to_dict(spec) for spec in config.algorithms],
    }
    if config.steady_window is not None:
        out["steady_window"] = config.steady_window
    if config.convergence_threshold_db is not None:
        out["convergence_threshold_db"] = config.convergence_threshold_db
    return out


_SCENARIO_KEYS = {
    "num_taps",
    "input_variance",
    "snr_db",
    "impulse_prob",
    "impulse_variance",
    "change_at",
    "change_kind",
    "system",
}

_TOP_KEYS = {
    "format_version",
    "trials",
    "horizon",
    "seed",
    "steady_window",
    "convergence_threshold_db",
    "scenario",
    "algorithms",
}


def config_from_dict(mapping):
    """Parse and validate a config dict into an ExperimentConfig."""
    if not isinstance(mapping, dict):
        raise ConfigError("<root>", "config must be a mapping")
    _reject_unknown(mapping, _TOP_KEYS, "")
    version = mapping.get("format_version", FORMAT_VERSION)
    if version != FORMAT_VERSION:
        raise ConfigError(
            "format_version", f"unsupported version {version!r}, expected {FORMAT_VERSION}"
        )
    raw_scenario = _require(mapping, "scenario", "")
    if not isinstance(raw_scenario, dict):
        raise ConfigError("scenario", "must be a mapping")
    _reject_unknown(raw_scenario, _SCENARIO_KEYS, "scenario")
    noise = _build(
        NoiseModel,
        "scenario",
        impulse_prob=raw_scenario.get("impulse_prob", 0.01),
        impulse_variance=raw_scenario.get("impulse_variance", 1e4 / 12),
        snr_db=_as_snr(raw_scenario.get("snr_db", 10.0)),
    )
    num_taps = raw_scenario.get("num_taps", 10)
    scenario = _build(
        ScenarioConfig,
        "scenario",
        num_taps=num_taps,
        input_variance=raw_scenario.get("input_variance", 1.0),
        noise=noise,
        change_at=raw_scenario.get("change_at"),
        change_kind=raw_scenario.get("change_kind", "sign_flip"),
        system=raw_scenario.get("system", "random"),
    )
    raw_algorithms = _require(mapping, "algorithms", "")
    if not isinstance(raw_algorithms, list) or not raw_algorithms:
        raise ConfigError("algorithms", "must be a non-empty list")
    algorithms = tuple(
        _algorithm_from_dict(entry, f"algorithms[{i}]", num_taps)
        for i, entry in enumerate(raw_algorithms)
    )
    rng = _build(RngSpec, "seed", seed=mapping.get("seed", 0))
    return _build(
        ExperimentConfig,
        "<root>",
        scenario=scenario,
        algorithms=algorithms,
        trials=mapping.get("trials", 50),
        horizon=mapping.get("horizon", 20000),
        rng=rng,
        steady_window=mapping.get("steady_window"),
        convergence_threshold_db=mapping.get("convergence_threshold_db"),
    )


def _as_snr(value):
    if isinstance(value, str):
        if value.lower() in ("inf", ".inf", "+inf"):
            return float("inf")
        raise ConfigError("scenario.snr_db", f"must be a number or 'inf', got {value!r}")
    return value


def load_config(path):
    """Load and validate a YAML config or manifest file."""
    try:
        with open(path, "r", encoding="utf-8") as handle:
            raw = yaml.safe_load(handle)
    except OSError as err:
        raise ConfigError("<file>", f"cannot read {path}: {err}") from err
    except yaml.YAMLError as err:
        raise ConfigError("<file>", f"invalid YAML in {path}: {err}") from err
    return config_from_dict(raw)


def dump_config(config, path):
    """Write the resolved config as a versioned manifest, stably ordered."""
    document = {"format_version": FORMAT_VERSION}
    document.update(config_to_dict(config))
    with open(path, "w", encoding="utf-8") as handle:
        yaml.safe_dump(document, handle, sort_keys=True)
