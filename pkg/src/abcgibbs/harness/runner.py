"""Seeded, budget-matched experiment runner.

Stream layout under the base seed: child 0 draws the observed data, child 1
calibrates distance normalizers, child ``2 + r`` drives replicate ``r``.
Inside a replicate, sampler ``k`` runs on child ``k``, its predictive check
on child ``1000 + k`` and its output resampling on child ``2000 + k``. The
layout depends only on the config, so results do not depend on how
replicates are scheduled.
"""

from __future__ import annotations

import itertools
import logging
import re
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..diagnostics import contraction_probe, posterior_predictive_distance, wasserstein1
from ..model import BestOfN, Model, parse_rule, resolve_blocks, resolve_rules
from ..models import build_model
from ..rng import RngStream
from ..samplers import (
    abc_gibbs,
    abc_reference_table,
    hierarchical_abc_gibbs,
    hierarchical_abc_gibbs_retention,
    smc_abc,
    vanilla_abc,
)
from ..samplers.chain import ChainOutput
from .config import ConfigError, ExperimentConfig, SamplerConfig, sweep_configs
from .data import draw_truth, observed_data
from .output import emit_density, write_density_csv, write_json, write_samples_csv

log = logging.getLogger(__name__)


@dataclass
class RunSummary:
    summary: dict
    timing: dict
    chains: dict = field(default_factory=dict)

    def metric(self, label: str, key: str, block: str | None = None) -> np.ndarray:
        """Per-replicate values of a metric (``"w1"`` needs ``block``)."""
        vals = []
        for rep in self.summary["replicates"]:
            m = rep["samplers"][label]
            vals.append(m[key][block] if block is not None else m[key]["mean"] if key == "predictive" else m[key])
        return np.asarray(vals, dtype=float)


# --------------------------------------------------------------------------
# budgets


def gibbs_iteration_cost(model: Model, settings: dict) -> int:
    rules = resolve_rules(model, parse_rules(settings.get("rules")))
    exact = resolve_blocks(model, settings.get("exact", ()))
    total = 0
    for j, rule in rules.items():
        if j in exact:
            continue
        if not isinstance(rule, BestOfN):
            raise ConfigError("budget matching needs best_of rules on every simulated block")
        total += rule.n * model.block_cost(j, None)
    return total


def parse_rules(rules):
    if rules is None:
        raise ConfigError("Gibbs samplers need rules")
    if isinstance(rules, dict) and not ({"eps", "best_of"} & set(rules)):
        return {k: parse_rule(v) for k, v in rules.items()}
    return parse_rule(rules)


def resolve_matching(model: Model, cfg: ExperimentConfig) -> dict:
    """Fill ``"matched"`` sizes and check budgets; returns predicted draws per label."""
    predicted = {}
    by_label = {s.label: s for s in cfg.samplers}
    for s in cfg.samplers:
        st = s.settings
        if s.kind in ("abc-gibbs", "hierarchical") and st.get("iterations") != "matched":
            try:
                predicted[s.label] = int(st["iterations"]) * gibbs_iteration_cost(model, st)
            except ConfigError:
                pass
        if s.kind == "vanilla" and st.get("table_size", None) not in (None, "matched"):
            predicted[s.label] = int(st["table_size"]) * model.sim_cost()
    for s in cfg.samplers:
        st = s.settings
        other = st.get("match")
        if other is None:
            continue
        if other not in by_label:
            raise ConfigError(f"sampler {s.label!r} matches unknown sampler {other!r}")
        if other not in predicted:
            raise ConfigError(f"sampler {other!r} has no predictable budget")
        target = predicted[other]
        if s.kind == "vanilla":
            if st.get("table_size") == "matched":
                st["table_size"] = max(1, round(target / model.sim_cost()))
            mine = int(st["table_size"]) * model.sim_cost()
            slack = gibbs_iteration_cost(model, by_label[other].settings) if by_label[other].is_gibbs else model.sim_cost()
        elif s.kind in ("abc-gibbs", "hierarchical"):
            per_iter = gibbs_iteration_cost(model, st)
            if st.get("iterations") == "matched":
                st["iterations"] = max(1, target // per_iter)
            mine = int(st["iterations"]) * per_iter
            slack = per_iter
        else:
            raise ConfigError(f"sampler kind {s.kind!r} cannot be budget matched")
        if abs(mine - target) > slack:
            raise ConfigError(
                f"budget mismatch: {s.label} uses {mine} draws, {other} uses {target} (slack {slack})"
            )
        predicted[s.label] = mine
    return predicted


# --------------------------------------------------------------------------
# samplers


def _init_state(model, setting, truth, rng):
    if setting is None or setting == "prior":
        return model.sample_prior(rng, 1)[0]
    if setting == "truth":
        if truth is None:
            raise ConfigError("init = 'truth' needs synthetic data")
        return np.array(truth, dtype=float)
    return np.asarray(setting, dtype=float)


def run_sampler(model, observed, spec: SamplerConfig, rng: RngStream, truth=None,
                resample_rng: RngStream | None = None) -> ChainOutput:
    st = spec.settings
    if spec.kind == "vanilla":
        if "table_size" in st:
            return abc_reference_table(model, observed, int(st["table_size"]), int(st["keep"]), rng)
        return vanilla_abc(model, observed, int(st["n"]), parse_rule(st["rule"]), rng,
                           max_attempts=int(st.get("max_attempts", 10**6)))
    if spec.kind in ("abc-gibbs", "hierarchical"):
        init = _init_state(model, st.get("init"), truth, rng)
        fn = abc_gibbs if spec.kind == "abc-gibbs" else hierarchical_abc_gibbs
        return fn(model, observed, int(st["iterations"]), parse_rules(st.get("rules")), init, rng,
                  exact=tuple(st.get("exact", ())), max_attempts=int(st.get("max_attempts", 10**6)))
    if spec.kind == "retention":
        init = _init_state(model, st.get("init"), truth, rng)
        return hierarchical_abc_gibbs_retention(model, observed, int(st["iterations"]),
                                                float(st["eps_alpha"]), rng, init=init)
    if spec.kind == "smc":
        res = smc_abc(model, observed, int(st["particles"]), int(st.get("m", 1)), int(st["steps"]), rng,
                      alpha_quality=float(st.get("alpha_quality", 0.9)),
                      n_min=st.get("n_min"), max_move_attempts=int(st.get("max_move_attempts", 1000)),
                      move=str(st.get("move", "repeat")), mh_steps=int(st.get("mh_steps", 1)))
        chain = res.to_chain(resample_rng)
        chain.meta["epsilons"] = res.epsilons.tolist()
        chain.meta["stalls"] = res.stalls
        return chain
    raise ConfigError(f"unknown sampler kind {spec.kind!r}")


# --------------------------------------------------------------------------
# oracle


_UNIT = re.compile(r"^mu_(\d+)$")


def oracle_grids(model, observed, blocks, resolution=2001):
    if not hasattr(model, "posterior_grids"):
        return {}
    units = sorted({int(m.group(1)) - 1 for b in blocks if (m := _UNIT.match(b))})
    grids = model.posterior_grids(observed, resolution=resolution, units=units)
    return {b: grids[b] for b in blocks if b in grids}


# --------------------------------------------------------------------------
# experiment


def _prepare(cfg: ExperimentConfig):
    model = build_model(cfg.model_id, cfg.model_params)
    root = RngStream(cfg.seed)
    truth, observed = observed_data(model, cfg.data, root.child(0))
    if cfg.calibrate is not None:
        if not hasattr(model, "calibrate"):
            raise ConfigError(f"model {cfg.model_id!r} has no calibration step")
        model.calibrate(observed, root.child(1), pilot_size=int(cfg.calibrate.get("pilot_size", 10**5)))
    return model, root, truth, observed


def _block_means(chain: ChainOutput) -> dict:
    return {name: chain.samples[:, sl].mean(axis=0).tolist() for name, sl in zip(chain.block_names, chain.block_slices)}


def run_experiment(cfg: ExperimentConfig, out_dir=None, *, keep_chains: bool = False) -> RunSummary:
    """Run every sampler on every replicate; write outputs under ``out_dir``."""
    if not cfg.samplers:
        raise ConfigError("no samplers configured")
    if cfg.sweep:
        raise ConfigError("use run_sweep for configs with sweep points")
    model, root, truth, observed = _prepare(cfg)
    predicted = resolve_matching(model, cfg)
    out = Path(out_dir) if out_dir is not None else None
    outputs = cfg.outputs
    oracle_blocks = list(cfg.oracle.get("blocks", [])) if cfg.oracle else []
    grids = oracle_grids(model, observed, oracle_blocks, int(cfg.oracle.get("resolution", 2001))) if cfg.oracle else {}
    if cfg.oracle and not grids:
        log.warning("model %s has no exact posterior; oracle metrics skipped", cfg.model_id)
    if out is not None:
        for b, g in grids.items():
            write_density_csv(out / f"oracle_{b}.csv", g)

    replicates, timing, chains = [], {s.label: [] for s in cfg.samplers}, {}
    for r in range(cfg.replicates):
        rep_rng = root.child(2 + r)
        rep = {"replicate": r, "samplers": {}}
        for k, spec in enumerate(cfg.samplers):
            t0 = time.perf_counter()
            chain = run_sampler(model, observed, spec, rep_rng.child(k), truth, rep_rng.child(2000 + k))
            timing[spec.label].append(time.perf_counter() - t0)
            offset = 0
            if spec.is_gibbs and cfg.burn_in:
                if cfg.burn_in >= len(chain):
                    raise ConfigError(f"burn_in {cfg.burn_in} leaves no draws for {spec.label}")
                chain = chain.drop(cfg.burn_in)
                offset = cfg.burn_in
            m = {
                "budget": chain.budget.as_dict(),
                "n_samples": len(chain),
                "means": _block_means(chain),
            }
            if spec.label in predicted:
                m["budget_predicted"] = predicted[spec.label]
            if chain.accepted is not None:
                m["acceptance_rate"] = float(np.mean(chain.accepted))
            if "epsilons" in chain.meta:
                m["epsilons"] = chain.meta["epsilons"]
                m["stalls"] = chain.meta["stalls"]
            if grids:
                m["w1"] = {b: wasserstein1(chain.block(b), g) for b, g in grids.items()}
            if cfg.predictive:
                mean, se = posterior_predictive_distance(
                    model, observed, chain, rep_rng.child(1000 + k),
                    block=cfg.predictive.get("block"), reps=int(cfg.predictive.get("reps", 1)),
                )
                m["predictive"] = {"mean": mean, "se": se}
            rep["samplers"][spec.label] = m
            if out is not None:
                stem = out / spec.label / f"rep_{r:03d}"
                if outputs.get("samples", True):
                    write_samples_csv(stem / "samples.csv", chain, offset)
                for b in outputs.get("density_blocks", []):
                    try:
                        g = emit_density(chain.block(b), int(outputs.get("grid_resolution", 256)))
                    except ValueError as exc:
                        log.warning("no density for %s/%s: %s", spec.label, b, exc)
                        continue
                    write_density_csv(stem / f"density_{b}.csv", g)
            if keep_chains:
                chains[(r, spec.label)] = chain
        replicates.append(rep)

    summary = {
        "experiment": cfg.name,
        "model": cfg.model_id,
        "seed": cfg.seed,
        "replicates": replicates,
        "truth": None if truth is None else dict(zip(model.block_names, [truth[b.slice].tolist() for b in model.blocks])),
        "aggregate": aggregate(replicates, [s.label for s in cfg.samplers]),
    }
    result = RunSummary(summary, {"seconds": timing}, chains)
    if out is not None:
        write_json(out / "summary.json", summary)
        write_json(out / "timing.json", result.timing)
    return result


def aggregate(replicates: list, labels: list) -> dict:
    """Means of scalar metrics and pairwise win counts across replicates."""
    out = {"means": {}, "wins": {}}
    metrics = {}
    for rep in replicates:
        for label, m in rep["samplers"].items():
            d = metrics.setdefault(label, {})
            for b, v in m.get("w1", {}).items():
                d.setdefault(f"w1:{b}", []).append(v)
            if "predictive" in m:
                d.setdefault("predictive", []).append(m["predictive"]["mean"])
    for label, d in metrics.items():
        out["means"][label] = {k: float(np.mean(v)) for k, v in d.items()}
    for a, b in itertools.permutations(labels, 2):
        keys = set(metrics.get(a, {})) & set(metrics.get(b, {}))
        for key in sorted(keys):
            wins = int(sum(x < y for x, y in zip(metrics[a][key], metrics[b][key])))
            out["wins"].setdefault(f"{a}<{b}", {})[key] = wins
    return out


def run_sweep(cfg: ExperimentConfig, out_dir=None) -> dict:
    """Run every sweep point; returns ``{tag: RunSummary}``."""
    results = {}
    for tag, sub in sweep_configs(cfg):
        target = None if out_dir is None else (Path(out_dir) / tag if tag else Path(out_dir))
        results[tag] = run_experiment(sub, target)
    if out_dir is not None and cfg.sweep:
        index = {tag: {"point": point, "aggregate": res.summary["aggregate"]}
                 for (tag, res), point in zip(results.items(), cfg.sweep)}
        write_json(Path(out_dir) / "sweep.json", index)
    return results


# --------------------------------------------------------------------------
# probe and oracle commands


def _grid(spec):
    if isinstance(spec, dict):
        return np.linspace(float(spec["lo"]), float(spec["hi"]), int(spec.get("points", 9)))
    return np.asarray(spec, dtype=float)


def run_probe(cfg: ExperimentConfig, out_dir=None) -> dict:
    if not cfg.probe:
        raise ConfigError("config has no [probe] table")
    p = cfg.probe
    model, root, truth, observed = _prepare(cfg)
    base = p.get("base_state", "truth")
    rng = root.child(3000)
    if base == "truth":
        base_state = truth if truth is not None else model.sample_prior(rng, 1)[0]
    elif base == "prior":
        base_state = model.sample_prior(rng, 1)[0]
    else:
        base_state = np.asarray(base, dtype=float)
    res = contraction_probe(
        model, observed, p["block"], p["conditioning"], _grid(p["grid"]), parse_rule(p["rule"]),
        int(p.get("draws_per_cell", 2000)), rng, base_state=base_state, bins=p.get("bins"),
    )
    d = {"block": p["block"], "conditioning": p["conditioning"], **res.as_dict()}
    if out_dir is not None:
        write_json(Path(out_dir) / "probe.json", d)
    return d


def run_oracle(cfg: ExperimentConfig, out_dir=None) -> dict:
    model, root, truth, observed = _prepare(cfg)
    blocks = list((cfg.oracle or {}).get("blocks", ["alpha"]))
    grids = oracle_grids(model, observed, blocks, int((cfg.oracle or {}).get("resolution", 2001)))
    if not grids:
        raise ConfigError(f"model {cfg.model_id!r} has no exact posterior")
    if out_dir is not None:
        for b, g in grids.items():
            write_density_csv(Path(out_dir) / f"oracle_{b}.csv", g)
        write_json(Path(out_dir) / "oracle.json",
                   {b: {"mean": g.mean(), "sd": g.sd(), "support": list(g.support)} for b, g in grids.items()})
    return grids


__all__ = [
    "RunSummary",
    "aggregate",
    "draw_truth",
    "gibbs_iteration_cost",
    "resolve_matching",
    "run_experiment",
    "run_oracle",
    "run_probe",
    "run_sampler",
    "run_sweep",
]
