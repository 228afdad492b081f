"""Ensemble configuration as a JSON document.

The document mirrors EnsembleConfig field by field; omitted sections fall
back to the published defaults, and CLI flags override file values.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from ..core import (
    ConfigurationError,
    EnsembleConfig,
    FusionStrategy,
    Gate1Params,
    Gate2Params,
    ModelId,
)


def config_to_dict(config: EnsembleConfig) -> dict[str, Any]:
    return {
        "weights": {m.value: w for m, w in sorted(config.weights.items())},
        "tta_models": sorted(m.value for m in config.tta_models),
        "strategy": config.strategy.value,
        "gate1": {
            "enabled": config.gate1.enabled,
            "outlier_model": config.gate1.outlier_model.value,
            "quorum": config.gate1.quorum,
            "jury": sorted(m.value for m in config.gate1.jury),
        },
        "gate2": {
            "enabled": config.gate2.enabled,
            "tau1": config.gate2.tau1,
            "tau2": config.gate2.tau2,
            "delta": config.gate2.delta,
            "witness_a": config.gate2.witness_a.value,
            "witness_b": config.gate2.witness_b.value,
        },
        "gate2_after_gate1_exclusion": config.gate2_after_gate1_exclusion,
    }


def config_from_dict(obj: dict[str, Any]) -> EnsembleConfig:
    defaults = EnsembleConfig()
    try:
        weights = (
            {ModelId(k): float(v) for k, v in obj["weights"].items()}
            if "weights" in obj
            else defaults.weights
        )
        tta = (
            frozenset(ModelId(m) for m in obj["tta_models"])
            if "tta_models" in obj
            else defaults.tta_models
        )
        g1_obj = obj.get("gate1", {})
        gate1 = Gate1Params(
            enabled=bool(g1_obj.get("enabled", True)),
            outlier_model=ModelId(g1_obj.get("outlier_model", "M4")),
            quorum=int(g1_obj.get("quorum", 3)),
            jury=frozenset(
                ModelId(m) for m in g1_obj.get("jury", ["M1", "M2", "M3", "M5"])
            ),
        )
        g2_obj = obj.get("gate2", {})
        gate2 = Gate2Params(
            enabled=bool(g2_obj.get("enabled", True)),
            tau1=float(g2_obj.get("tau1", 8.0)),
            tau2=float(g2_obj.get("tau2", 3.0)),
            delta=float(g2_obj.get("delta", 2.5)),
            witness_a=ModelId(g2_obj.get("witness_a", "M4")),
            witness_b=ModelId(g2_obj.get("witness_b", "M5")),
        )
        return EnsembleConfig(
            weights=weights,
            tta_models=tta,
            gate1=gate1,
            gate2=gate2,
            strategy=FusionStrategy(obj.get("strategy", "weighted_logit")),
            gate2_after_gate1_exclusion=bool(
                obj.get("gate2_after_gate1_exclusion", True)
            ),
        )
    except (KeyError, ValueError, TypeError) as exc:
        if isinstance(exc, ConfigurationError):
            raise
        raise ConfigurationError(f"invalid configuration document: {exc}") from exc


def load_config(path: str | Path) -> EnsembleConfig:
    with Path(path).open("r", encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"invalid configuration JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise ConfigurationError("configuration document must be a JSON object")
    return config_from_dict(obj)


def save_config(config: EnsembleConfig, path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        json.dump(config_to_dict(config), fh, indent=2)
        fh.write("\n")
