"""Flat key-value configuration for the benchmark harness.

Config files are JSON objects with dotted flat keys, e.g.::

    {"data.dir": "/data/gas", "drca.components": 127, "methods": "drca,ldsp"}

Every key has a typed default; unknown keys are errors, so typos fail loudly
instead of silently running with defaults.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .adaptation import METHOD_NAMES, SelfTrainConfig
from .classifier import ClassifierConfig
from .data_io import SyntheticConfig
from .metrics import F1_AVERAGES
from .subspace import DrcaConfig, LdspConfig


class ConfigError(ValueError):
    """Raised for unknown keys, type mismatches, or invalid values."""


def _as_bool(v):
    if isinstance(v, bool):
        return v
    raise TypeError("expected a boolean")


def _as_int(v):
    if isinstance(v, bool) or not isinstance(v, int):
        raise TypeError("expected an integer")
    return v


def _as_float(v):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise TypeError("expected a number")
    return float(v)


def _as_str(v):
    if not isinstance(v, str):
        raise TypeError("expected a string")
    return v


# key -> (caster, default)
SCHEMA: dict[str, tuple] = {
    "data.dir": (_as_str, ""),
    "synthetic.enabled": (_as_bool, False),
    "synthetic.n_classes": (_as_int, 6),
    "synthetic.dim": (_as_int, 16),
    "synthetic.per_class": (_as_int, 50),
    "synthetic.n_batches": (_as_int, 10),
    "synthetic.drift_step": (_as_float, 0.5),
    "synthetic.seed": (_as_int, 7),
    "normalize.enabled": (_as_bool, True),
    "methods": (_as_str, "all"),
    "drca.target_weight": (_as_float, 0.1),
    "drca.components": (_as_int, 127),
    "ldsp.target_weight": (_as_float, 0.1),
    "ldsp.within_weight": (_as_float, 10.0),
    "ldsp.between_weight": (_as_float, 100.0),
    "ldsp.components": (_as_int, 127),
    "selftrain.threshold": (_as_float, 0.99),
    "selftrain.max_rounds": (_as_int, 10),
    "selftrain.cumulative": (_as_bool, True),
    "classifier.reg_strength": (_as_float, 1.0),
    "classifier.tol": (_as_float, 1e-6),
    "classifier.max_iter": (_as_int, 1000),
    "metrics.f1_average": (_as_str, "macro"),
}


def _resolve_methods(raw: str) -> tuple[str, ...]:
    if raw.strip() == "all":
        return METHOD_NAMES
    names = [m.strip() for m in raw.split(",") if m.strip()]
    if not names:
        raise ConfigError("methods must name at least one strategy")
    seen = []
    for m in names:
        if m not in METHOD_NAMES:
            raise ConfigError(f"unknown method '{m}' (choose from {', '.join(METHOD_NAMES)})")
        if m not in seen:
            seen.append(m)
    return tuple(seen)


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved harness configuration."""

    data_dir: str
    synthetic_enabled: bool
    synthetic: SyntheticConfig
    normalize: bool
    methods: tuple[str, ...]
    drca: DrcaConfig
    ldsp: LdspConfig
    selftrain: SelfTrainConfig
    classifier: ClassifierConfig
    f1_average: str
    flat: dict = field(compare=False, default_factory=dict)

    def echo(self) -> dict:
        """Flat resolved key-value view, embedded in reports."""
        return dict(self.flat)


def resolve_config(values: dict) -> RunConfig:
    """Validate a flat key-value mapping and build a typed RunConfig."""
    unknown = sorted(set(values) - set(SCHEMA))
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(unknown)}")
    resolved = {}
    for key, (cast, default) in SCHEMA.items():
        if key in values:
            try:
                resolved[key] = cast(values[key])
            except TypeError as exc:
                raise ConfigError(f"config key '{key}': {exc}") from None
        else:
            resolved[key] = default
    methods = _resolve_methods(resolved["methods"])
    resolved["methods"] = ",".join(methods)
    if resolved["metrics.f1_average"] not in F1_AVERAGES:
        raise ConfigError(
            f"metrics.f1_average must be one of {F1_AVERAGES}, "
            f"got '{resolved['metrics.f1_average']}'"
        )
    try:
        synthetic = SyntheticConfig(
            n_classes=resolved["synthetic.n_classes"],
            dim=resolved["synthetic.dim"],
            per_class=resolved["synthetic.per_class"],
            n_batches=resolved["synthetic.n_batches"],
            drift_step=resolved["synthetic.drift_step"],
            seed=resolved["synthetic.seed"],
        )
        drca = DrcaConfig(
            target_weight=resolved["drca.target_weight"],
            n_components=resolved["drca.components"],
        )
        ldsp = LdspConfig(
            target_weight=resolved["ldsp.target_weight"],
            within_weight=resolved["ldsp.within_weight"],
            between_weight=resolved["ldsp.between_weight"],
            n_components=resolved["ldsp.components"],
        )
        selftrain = SelfTrainConfig(
            confidence_threshold=resolved["selftrain.threshold"],
            max_rounds=resolved["selftrain.max_rounds"],
            cumulative=resolved["selftrain.cumulative"],
        )
        clf = ClassifierConfig(
            reg_strength=resolved["classifier.reg_strength"],
            tol=resolved["classifier.tol"],
            max_iter=resolved["classifier.max_iter"],
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return RunConfig(
        data_dir=resolved["data.dir"],
        synthetic_enabled=resolved["synthetic.enabled"],
        synthetic=synthetic,
        normalize=resolved["normalize.enabled"],
        methods=methods,
        drca=drca,
        ldsp=ldsp,
        selftrain=selftrain,
        classifier=clf,
        f1_average=resolved["metrics.f1_average"],
        flat=resolved,
    )


def load_run_config(path: Path | str | None = None, overrides: dict | None = None) -> RunConfig:
    """Read a JSON config file (optional), apply overrides, and resolve."""
    values: dict = {}
    if path is not None:
        raw = Path(path).read_text()
        try:
            doc = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: not valid JSON ({exc})") from None
        if not isinstance(doc, dict):
            raise ConfigError(f"{path}: config must be a JSON object of flat keys")
        values.update(doc)
    if overrides:
        values.update({k: v for k, v in overrides.items() if v is not None})
    return resolve_config(values)
