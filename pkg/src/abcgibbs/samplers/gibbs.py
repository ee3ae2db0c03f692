"""Component-wise ABC samplers.

:func:`abc_gibbs` runs a systematic scan over the model's blocks, replacing
each exact Gibbs conditional by an ABC draw from that block's conditional
prior predictive. :func:`hierarchical_abc_gibbs` does the same scan but
updates conditionally independent unit blocks together, which is the
structure of a two-level hierarchical model. :func:`hierarchical_abc_gibbs_retention`
is the accept-or-stay variant whose convergence is easiest to analyse.
"""

from __future__ import annotations

from typing import Iterable

import numpy as np

from ..model import (
    BestOfN,
    BudgetCounter,
    Fixed,
    HierarchicalModel,
    Model,
    ToleranceRule,
    resolve_blocks,
    resolve_rules,
)
from ..rng import RngStream
from .chain import BudgetExceeded, ChainOutput

FIXED_CHUNK = 256


def abc_conditional_step(
    model: Model,
    observed,
    j: int,
    state,
    rule: ToleranceRule,
    rng: RngStream,
    *,
    exact: bool = False,
    budget: BudgetCounter | None = None,
    max_attempts: int = 10**6,
):
    """Replace block ``j`` of ``state`` by one approximate conditional draw.

    Returns ``(new_state, distance, simulations)``. Only block ``j`` differs
    between ``state`` and ``new_state``. In exact mode the model's exact
    conditional is used, no simulation is spent and the distance is NaN.
    """
    new, dist, sims = _group_update(
        model, observed, (j,), state, rule, rng, exact=exact, max_attempts=max_attempts
    )
    if budget is not None and sims[0]:
        budget.book(sims[0], sims[0] * model.block_cost(j, state))
    return new, float(dist[0]), int(sims[0])


def _group_update(model, observed, group, state, rule, rng, *, exact, max_attempts):
    """Update every block of ``group`` given the rest of ``state``.

    Returns the new state, the accepted distance per block and the
    simulations spent per block.
    """
    group = tuple(group)
    new = np.array(state, dtype=float, copy=True)
    dist = np.full(len(group), np.nan)
    sims = np.zeros(len(group), dtype=np.int64)

    if exact:
        for g, j in enumerate(group):
            if not model.has_exact(j):
                raise ValueError(f"block {model.blocks[j].name} has no exact conditional")
            new[model.blocks[j].slice] = model.exact_conditional(j, state, observed, rng)
        return new, dist, sims

    if isinstance(rule, BestOfN):
        cands, d = model.group_table(group, state, observed, rule.n, rng)
        best = np.argmin(d, axis=1)
        for g, j in enumerate(group):
            new[model.blocks[j].slice] = cands[g, best[g]]
            dist[g] = d[g, best[g]]
        sims[:] = rule.n
        return new, dist, sims

    if not isinstance(rule, Fixed):
        raise TypeError(f"unknown tolerance rule {rule!r}")

    pending = list(range(len(group)))
    chunk = FIXED_CHUNK
    while pending:
        sub = tuple(group[g] for g in pending)
        cands, d = model.group_table(sub, state, observed, chunk, rng)
        ok = np.ones_like(d, bool) if np.isinf(rule.eps) else d < rule.eps
        still = []
        for r, g in enumerate(pending):
            hits = np.flatnonzero(ok[r])
            if hits.size:
                k = hits[0]
                sims[g] += k + 1
                if sims[g] > max_attempts:
                    raise BudgetExceeded(
                        f"block {model.blocks[group[g]].name}: no acceptance within {max_attempts} attempts"
                    )
                new[model.blocks[group[g]].slice] = cands[r, k]
                dist[g] = d[r, k]
            else:
                sims[g] += chunk
                if sims[g] >= max_attempts:
                    raise BudgetExceeded(
                        f"block {model.blocks[group[g]].name}: no acceptance within {max_attempts} attempts"
                    )
                still.append(g)
        pending = still
        chunk = min(chunk * 2, 1 << 16)
    return new, dist, sims


def _scan(model, observed, n, rules, init, rng, exact, max_attempts, groups):
    rules = resolve_rules(model, rules)
    exact_set = resolve_blocks(model, exact)
    state = np.array(init, dtype=float, copy=True)
    if state.shape != (model.dim,):
        raise ValueError(f"init must have shape ({model.dim},)")
    nb = len(model.blocks)
    samples = np.empty((n, model.dim))
    distances = np.full((n, nb), np.nan)
    attempts = np.zeros(nb, dtype=np.int64)
    budget = BudgetCounter()

    for i in range(n):
        for group in groups:
            use_exact = group[0] in exact_set
            if any((j in exact_set) != use_exact for j in group):
                raise ValueError("exact mode must be uniform within a block group")
            rule = rules[group[0]]
            before = state
            state, dist, sims = _group_update(
                model, observed, group, before, rule, rng,
                exact=use_exact, max_attempts=max_attempts,
            )
            for g, j in enumerate(group):
                distances[i, j] = dist[g]
                if sims[g]:
                    attempts[j] += sims[g]
                    budget.book(sims[g], sims[g] * model.block_cost(j, before))
        samples[i] = state

    return ChainOutput(
        samples=samples,
        distances=distances,
        budget=budget,
        attempts=attempts,
        block_names=model.block_names,
        block_slices=[b.slice for b in model.blocks],
    )


def abc_gibbs(
    model: Model,
    observed,
    n: int,
    rules,
    init,
    rng: RngStream,
    *,
    exact: Iterable[str] = (),
    max_attempts: int = 10**6,
) -> ChainOutput:
    """Systematic-scan ABC-Gibbs.

    Parameters
    ----------
    model : Model
    observed : dataset
    n : int
        Number of sweeps; each sweep updates every block once, in order, using
        the freshest values of the other blocks.
    rules : ToleranceRule or mapping
        One rule for all blocks, or a mapping by block or family name.
    init : array_like, shape (dim,)
    rng : RngStream
    exact : iterable of str, optional
        Blocks (or families) updated by their exact conditional instead. When
        every block is listed the chain is a plain Gibbs sampler.
    max_attempts : int
        Cap on simulations per accepted draw under ``Fixed`` rules.
    """
    groups = tuple((j,) for j in range(len(model.blocks)))
    return _scan(model, observed, n, rules, init, rng, exact, max_attempts, groups)


def hierarchical_abc_gibbs(
    model: HierarchicalModel,
    observed,
    n: int,
    rules,
    init,
    rng: RngStream,
    *,
    exact: Iterable[str] = (),
    max_attempts: int = 10**6,
) -> ChainOutput:
    """ABC-Gibbs for a hierarchical model.

    Each sweep updates every unit block against its own data, with a table
    that simulates only that unit, then updates each hyper block against a
    statistic of the freshly drawn unit parameters (simulating unit
    parameters from the candidate hyperparameter, never data). Unit blocks
    of one group are conditionally independent, so they are drawn in a single
    vectorized call; the result has the same law as :func:`abc_gibbs` with
    the same block order.
    """
    if not isinstance(model, HierarchicalModel) or not model.hyper_blocks:
        raise TypeError("hierarchical_abc_gibbs needs a HierarchicalModel with hyper blocks")
    return _scan(model, observed, n, rules, init, rng, exact, max_attempts, model.scan_groups())


def hierarchical_abc_gibbs_retention(
    model: HierarchicalModel,
    observed,
    n: int,
    eps_alpha: float,
    rng: RngStream,
    *,
    init=None,
) -> ChainOutput:
    """Accept-or-stay ABC-Gibbs for a two-level model with exact unit updates.

    Each step draws unit parameters exactly from their conditional given the
    current hyperparameter and the data, then proposes a hyperparameter from
    its prior together with unit parameters simulated from it. The pair is
    accepted when the hyper-level statistics of the two unit vectors are
    closer than ``eps_alpha``; otherwise the chain keeps its previous state.
    """
    if len(model.hyper_blocks) != 1 or len(model.unit_groups) != 1:
        raise TypeError("retention kernel needs one hyper block and one unit group")
    (h,) = model.hyper_blocks
    units = model.unit_groups[0]
    if not all(model.has_exact(j) for j in units):
        raise ValueError("retention kernel needs exact unit conditionals")

    if init is None:
        state = model.sample_prior(rng, 1)[0]
    else:
        state = np.array(init, dtype=float, copy=True)
    nb = len(model.blocks)
    samples = np.empty((n, model.dim))
    distances = np.full((n, nb), np.nan)
    accepted = np.zeros(n, dtype=bool)
    budget = BudgetCounter()
    cost = model.block_cost(h, state)

    for i in range(n):
        prop, _, _ = _group_update(model, observed, units, state, None, rng, exact=True, max_attempts=0)
        # one-row hyper table: alpha_c from the prior, unit parameters simulated from it
        alpha_c, d = model.block_table(h, prop, observed, 1, rng)
        d = float(d[0])
        budget.book(1, cost)
        distances[i, h] = d
        if d < eps_alpha or np.isinf(eps_alpha):
            state = model.with_block(prop, h, alpha_c[0])
            accepted[i] = True
        samples[i] = state

    attempts = np.zeros(nb, dtype=np.int64)
    attempts[h] = n
    return ChainOutput(
        samples=samples,
        distances=distances,
        budget=budget,
        attempts=attempts,
        block_names=model.block_names,
        block_slices=[b.slice for b in model.blocks],
        accepted=accepted,
    )
