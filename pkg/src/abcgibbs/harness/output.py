"""Deterministic CSV/JSON writers and the density emitter."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np
from scipy import stats as sps

from ..diagnostics import DensityGrid
from ..samplers.chain import ChainOutput


def _num(x: float) -> str:
    return repr(float(x))


def write_samples_csv(path, chain: ChainOutput, iteration_offset: int = 0) -> None:
    """Long format: ``iteration, block, component, value``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["iteration", "block", "component", "value"])
        for i, row in enumerate(chain.samples):
            for name, sl in zip(chain.block_names, chain.block_slices):
                for c, v in enumerate(row[sl]):
                    w.writerow([i + iteration_offset, name, c, _num(v)])


def emit_density(samples, resolution: int = 256, *, pad: float = 3.0) -> DensityGrid:
    """Gaussian KDE with a Silverman bandwidth on a uniform grid.

    The grid spans the sample range padded by ``pad`` bandwidths and is
    normalized by the trapezoid rule.
    """
    x = np.asarray(samples, dtype=float).ravel()
    if x.size == 0:
        raise ValueError("emit_density of an empty sample")
    if x.size < 2 or np.ptp(x) == 0:
        raise ValueError("emit_density needs at least two distinct values")
    kde = sps.gaussian_kde(x, bw_method="silverman")
    h = math.sqrt(float(kde.covariance[0, 0]))
    grid = np.linspace(x.min() - pad * h, x.max() + pad * h, resolution)
    return DensityGrid(grid, kde(grid))


def write_density_csv(path, grid: DensityGrid) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", "density"])
        for a, b in zip(grid.x, grid.density):
            w.writerow([_num(a), _num(b)])


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    return obj


def write_json(path, obj) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(_jsonable(obj), fh, indent=2, sort_keys=True)
        fh.write("\n")
