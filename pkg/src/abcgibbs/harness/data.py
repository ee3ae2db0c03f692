"""Observed data: synthetic draws from a model, or the stellar-flux file."""

from __future__ import annotations

import logging
import math
from pathlib import Path

import numpy as np

from ..model import HierarchicalModel, Model
from ..rng import RngStream

log = logging.getLogger(__name__)

MISSING_MARKERS = frozenset({"na", "nan", "?", "-", "--", "*", "missing", "-999", "-9999"})
FLUX_COLUMNS = 7
FLUX_ROWS = 208


class DataFormatError(ValueError):
    pass


def _is_missing(tok: str) -> bool:
    if tok.lower() in MISSING_MARKERS:
        return True
    try:
        return math.isnan(float(tok))
    except ValueError:
        return False


def load_stellar_flux(path, *, columns: int = FLUX_COLUMNS, expected_rows: int | None = FLUX_ROWS):
    """Read a whitespace-delimited flux table, one column per object.

    Rows with a missing marker are dropped with a warning. Lines that are
    blank or start with ``#`` are skipped. Returns an array of shape
    ``(columns, T)`` (one series per row).
    """
    rows, dropped = [], []
    with open(Path(path)) as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            toks = text.split()
            if len(toks) != columns:
                raise DataFormatError(f"{path}:{lineno}: expected {columns} columns, found {len(toks)}")
            if any(_is_missing(t) for t in toks):
                dropped.append(lineno)
                continue
            try:
                rows.append([float(t) for t in toks])
            except ValueError:
                raise DataFormatError(f"{path}:{lineno}: malformed value in {text!r}") from None
    if dropped:
        log.warning("dropped %d row(s) with missing values: lines %s", len(dropped), dropped)
    if not rows:
        raise DataFormatError(f"{path}: no usable rows")
    data = np.asarray(rows).T
    if expected_rows is not None and data.shape[1] != expected_rows:
        log.warning("expected %d usable rows, found %d", expected_rows, data.shape[1])
    return data


def draw_truth(model: Model, rng: RngStream, fixed: dict | None = None) -> np.ndarray:
    """A parameter vector with ``fixed`` blocks set and the rest drawn.

    Hyper blocks are settled first, then every other free block is drawn
    from its conditional prior given the current vector.
    """
    theta = model.sample_prior(rng, 1)[0]
    fixed = dict(fixed or {})
    given = set()
    for name, value in fixed.items():
        j = model.block_index(name)
        theta = model.with_block(theta, j, np.asarray(value, dtype=float))
        given.add(j)
    hyper = tuple(getattr(model, "hyper_blocks", ())) if isinstance(model, HierarchicalModel) else ()
    order = [j for j in hyper] + [j for j in range(len(model.blocks)) if j not in hyper]
    for j in order:
        if j in given:
            continue
        if j in hyper:
            continue  # already a prior draw, independent of unit blocks
        theta = model.with_block(theta, j, model.conditional_prior(j, theta, rng, 1)[0])
    if not bool(model.in_support(theta)[0]):
        raise ValueError("fixed truth lies outside the prior support")
    return theta


def observed_data(model: Model, data_cfg: dict, rng: RngStream):
    """``(truth or None, observed)`` per the ``[data]`` table."""
    source = data_cfg.get("source", "synthetic")
    if source == "synthetic":
        if "observed" in data_cfg:
            return None, np.asarray(data_cfg["observed"], dtype=float)
        theta = draw_truth(model, rng, data_cfg.get("truth"))
        return theta, model.simulate(theta, rng)
    if source == "stellar-flux":
        if "path" not in data_cfg:
            raise ValueError("stellar-flux data needs a path")
        data = load_stellar_flux(data_cfg["path"], expected_rows=data_cfg.get("expected_rows", FLUX_ROWS))
        return None, data
    raise ValueError(f"unknown data source {source!r}")
