"""Experiment configuration.

Configs are TOML files. The schema (all tables optional unless noted)::

    [experiment]
    name = "nn-matched"
    seed = 1
    replicates = 10
    burn_in = 5            # dropped from Gibbs-type chains only

    [model]                # required
    id = "normal-normal"
    params = { n = 20, K = 10 }
    calibrate = { pilot_size = 100000 }   # MA(2) distance normalizers

    [data]
    source = "synthetic"   # or "stellar-flux" with path = "..."
    truth = { alpha = 0.5 }  # fixed blocks; the rest is drawn from the prior

    [[samplers]]           # at least one
    label = "gibbs"
    kind = "abc-gibbs"     # vanilla | abc-gibbs | hierarchical | retention | smc
    ...

    [oracle]
    blocks = ["alpha", "mu_1"]

    [predictive]
    reps = 1

    [outputs]
    samples = true
    density_blocks = ["alpha"]
    grid_resolution = 256

    [[sweep.points]]       # optional; each point overrides dotted keys
    "samplers.gibbs.rules.default.best_of" = 5
"""

from __future__ import annotations

import copy
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

SAMPLER_KINDS = ("vanilla", "abc-gibbs", "hierarchical", "retention", "smc")


class ConfigError(ValueError):
    pass


@dataclass
class SamplerConfig:
    label: str
    kind: str
    settings: dict = field(default_factory=dict)

    @property
    def is_gibbs(self) -> bool:
        return self.kind in ("abc-gibbs", "hierarchical", "retention")


@dataclass
class ExperimentConfig:
    name: str
    model_id: str
    model_params: dict
    samplers: list
    seed: int = 0
    replicates: int = 1
    burn_in: int = 5
    calibrate: dict | None = None
    data: dict = field(default_factory=dict)
    oracle: dict | None = None
    predictive: dict | None = field(default_factory=lambda: {"reps": 1})
    outputs: dict = field(default_factory=dict)
    probe: dict | None = None
    sweep: list | None = None
    raw: dict = field(default_factory=dict)

    def sampler(self, label: str) -> SamplerConfig:
        for s in self.samplers:
            if s.label == label:
                return s
        raise ConfigError(f"no sampler labelled {label!r}")


def load_config(path) -> ExperimentConfig:
    with open(path, "rb") as fh:
        raw = tomllib.load(fh)
    cfg = config_from_dict(raw)
    data_path = cfg.data.get("path")
    if data_path and not Path(data_path).is_absolute():
        cfg.data["path"] = str((Path(path).parent / data_path).resolve())
    return cfg


def config_from_dict(raw: dict) -> ExperimentConfig:
    raw = copy.deepcopy(raw)
    exp = raw.get("experiment", {})
    model = raw.get("model")
    if not model or "id" not in model:
        raise ConfigError("config needs a [model] table with an id")
    samplers = []
    for i, s in enumerate(raw.get("samplers", [])):
        s = dict(s)
        kind = s.pop("kind", None)
        if kind not in SAMPLER_KINDS:
            raise ConfigError(f"sampler {i}: unknown kind {kind!r}; choose from {SAMPLER_KINDS}")
        label = s.pop("label", kind)
        samplers.append(SamplerConfig(label, kind, s))
    labels = [s.label for s in samplers]
    if len(set(labels)) != len(labels):
        raise ConfigError("sampler labels must be unique")
    replicates = int(exp.get("replicates", 1))
    if replicates < 1:
        raise ConfigError("replicates must be >= 1")
    burn_in = int(exp.get("burn_in", 5))
    if burn_in < 0:
        raise ConfigError("burn_in must be >= 0")
    sweep = raw.get("sweep", {}).get("points") if "sweep" in raw else None
    return ExperimentConfig(
        name=str(exp.get("name", model["id"])),
        model_id=model["id"],
        model_params=dict(model.get("params", {})),
        samplers=samplers,
        seed=int(exp.get("seed", 0)),
        replicates=replicates,
        burn_in=burn_in,
        calibrate=model.get("calibrate"),
        data=dict(raw.get("data", {})),
        oracle=raw.get("oracle"),
        predictive=raw.get("predictive", {"reps": 1}),
        outputs=dict(raw.get("outputs", {})),
        probe=raw.get("probe"),
        sweep=sweep,
        raw=raw,
    )


def set_dotted(raw: dict, key: str, value: Any) -> None:
    """Assign ``value`` at a dotted path; ``samplers.<label>`` selects by label."""
    parts = key.split(".")
    node: Any = raw
    for i, part in enumerate(parts[:-1]):
        if isinstance(node, list):
            node = next((s for s in node if s.get("label", s.get("kind")) == part), None)
            if node is None:
                raise ConfigError(f"sweep key {key!r}: no sampler labelled {part!r}")
            continue
        if part not in node:
            node[part] = {}
        node = node[part]
    if isinstance(node, list):
        raise ConfigError(f"sweep key {key!r} ends at a list")
    node[parts[-1]] = value


def sweep_configs(cfg: ExperimentConfig) -> list[tuple[str, ExperimentConfig]]:
    """One ``(tag, config)`` per sweep point, or the config itself."""
    if not cfg.sweep:
        return [("", cfg)]
    out = []
    for k, point in enumerate(cfg.sweep):
        raw = copy.deepcopy(cfg.raw)
        raw.pop("sweep", None)
        for key, value in point.items():
            set_dotted(raw, key, value)
        sub = config_from_dict(raw)
        sub.data = dict(cfg.data)
        out.append((f"point_{k:02d}", sub))
    return out
