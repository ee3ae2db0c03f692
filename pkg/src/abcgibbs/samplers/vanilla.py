"""Rejection ABC on the joint prior predictive."""

from __future__ import annotations

import numpy as np

from ..model import BestOfN, BudgetCounter, Fixed, Model, ToleranceRule
from ..rng import RngStream
from .chain import BudgetExceeded, ChainOutput

DEFAULT_CHUNK = 4096


def _output(model, samples, distances, budget):
    return ChainOutput(
        samples=np.asarray(samples, dtype=float),
        distances=np.asarray(distances, dtype=float).reshape(-1, 1),
        budget=budget,
        attempts=np.array([budget.simulations]),
        block_names=model.block_names,
        block_slices=[b.slice for b in model.blocks],
    )


def vanilla_abc(
    model: Model,
    observed,
    n: int,
    rule: ToleranceRule,
    rng: RngStream,
    *,
    max_attempts: int = 10**6,
    chunk: int = DEFAULT_CHUNK,
) -> ChainOutput:
    """Draw ``n`` independent samples from the ABC posterior.

    With ``Fixed(eps)`` each draw repeats prior-predictive simulations until
    the global distance falls below ``eps``. With ``BestOfN(m)`` each draw is
    the closest of a fresh table of ``m`` prior-predictive simulations.

    Raises
    ------
    BudgetExceeded
        When ``Fixed`` needs more than ``max_attempts`` simulations for a
        single accepted draw.
    """
    if n < 1:
        raise ValueError("n must be positive")
    cost = model.sim_cost()
    budget = BudgetCounter()

    if isinstance(rule, BestOfN):
        m = rule.n
        rows_per_chunk = max(1, chunk // m)
        samples, dists = [], []
        done = 0
        while done < n:
            k = min(rows_per_chunk, n - done)
            thetas, d = model.prior_table(observed, k * m, rng)
            d = d.reshape(k, m)
            best = np.argmin(d, axis=1)
            samples.append(thetas.reshape(k, m, -1)[np.arange(k), best])
            dists.append(d[np.arange(k), best])
            done += k
        budget.book(n * m, n * m * cost)
        return _output(model, np.concatenate(samples), np.concatenate(dists), budget)

    if not isinstance(rule, Fixed):
        raise TypeError(f"unknown tolerance rule {rule!r}")

    eps = rule.eps
    samples, dists = [], []
    since_last = 0  # rejected attempts since the previous acceptance
    while len(samples) < n:
        thetas, d = model.prior_table(observed, chunk, rng)
        ok = np.ones(chunk, bool) if np.isinf(eps) else d < eps
        pos = -1
        used = chunk
        for idx in np.flatnonzero(ok):
            if since_last + idx - pos > max_attempts:
                raise BudgetExceeded(f"no acceptance within {max_attempts} attempts")
            samples.append(thetas[idx])
            dists.append(d[idx])
            since_last, pos = 0, idx
            if len(samples) == n:
                used = idx + 1
                break
        if len(samples) < n:
            since_last += chunk - 1 - pos
            if since_last >= max_attempts:
                raise BudgetExceeded(f"no acceptance within {max_attempts} attempts")
        # lookahead rows past the final acceptance are not charged
        budget.book(used, used * cost)
    return _output(model, np.array(samples), np.array(dists), budget)


def abc_reference_table(
    model: Model,
    observed,
    table_size: int,
    n_keep: int,
    rng: RngStream,
    *,
    chunk: int = DEFAULT_CHUNK,
) -> ChainOutput:
    """Keep the ``n_keep`` closest rows of one prior-predictive table.

    This is the quantile-tolerance form of rejection ABC: the implied
    tolerance is the ``n_keep / table_size`` quantile of the simulated
    distances. Rows are returned in table order.
    """
    if not 1 <= n_keep <= table_size:
        raise ValueError("need 1 <= n_keep <= table_size")
    thetas, dists = [], []
    done = 0
    while done < table_size:
        k = min(chunk, table_size - done)
        t, d = model.prior_table(observed, k, rng)
        thetas.append(t)
        dists.append(d)
        done += k
    thetas = np.concatenate(thetas)
    dists = np.concatenate(dists)
    keep = np.sort(np.argsort(dists, kind="stable")[:n_keep])
    budget = BudgetCounter()
    budget.book(table_size, table_size * model.sim_cost())
    out = _output(model, thetas[keep], dists[keep], budget)
    out.meta["tolerance"] = float(dists[keep].max())
    return out
