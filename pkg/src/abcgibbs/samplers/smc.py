"""SMC-ABC with an ESS-driven tolerance schedule.

Each particle carries a cache of ``M`` distances between pseudo-data
simulated at its value and the observed data. The tolerance for the next
step is chosen by bisection so that reweighting the current particles by
their surviving cache fraction keeps a fixed fraction ``alpha_quality`` of
the previous effective sample size. Particles are then resampled if the
ESS drops below ``n_min`` and every particle is moved by a Gaussian random
walk until a proposal has at least one cached distance below the new
tolerance. That move has no accept/reject correction, so blocks the global
distance ignores drift away from their prior; ``move="mh"`` replaces it by
Metropolis-Hastings steps whose ratio includes the prior density and the
fraction of cached distances below the tolerance.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from ..model import BudgetCounter, Model
from ..rng import RngStream
from ..stats import ess
from .chain import ChainOutput

log = logging.getLogger(__name__)


@dataclass
class ParticleSystem:
    particles: np.ndarray
    weights: np.ndarray
    cache: np.ndarray
    epsilon: float
    ess: float
    resampled: bool = False
    stalls: int = 0


@dataclass
class SMCResult:
    steps: list
    budget: BudgetCounter
    block_names: list
    block_slices: list
    stalls: int = 0
    meta: dict = field(default_factory=dict)

    @property
    def final(self) -> ParticleSystem:
        return self.steps[-1]

    @property
    def epsilons(self) -> np.ndarray:
        return np.array([s.epsilon for s in self.steps])

    def to_chain(self, rng: RngStream | None = None) -> ChainOutput:
        """Final particles as a chain; resampled by weight when ``rng`` is given."""
        ps = self.final
        x = ps.particles
        if rng is not None:
            idx = rng.choice(len(x), size=len(x), p=ps.weights)
            x = x[idx]
        n_blocks = len(self.block_names)
        return ChainOutput(
            samples=np.array(x),
            distances=np.full((len(x), 1), ps.epsilon),
            budget=self.budget,
            attempts=np.full(n_blocks, self.budget.simulations),
            block_names=self.block_names,
            block_slices=self.block_slices,
            meta={"weights": ps.weights.copy(), "epsilon": ps.epsilon},
        )


def _simulate_cache(model, thetas, observed, m, rng):
    d = model.simulate_distances(np.repeat(thetas, m, axis=0), observed, rng)
    return d.reshape(len(thetas), m)


def _reweight(w, cache, eps_prev, eps):
    prev = (cache < eps_prev).sum(axis=1)
    now = (cache < eps).sum(axis=1)
    ratio = np.divide(now, prev, out=np.zeros(len(w)), where=prev > 0)
    new = w * ratio
    total = new.sum()
    return new / total if total > 0 else None


def _ess_or_zero(w):
    return 0.0 if w is None else ess(w)


def next_epsilon(w, cache, eps_prev, alpha_quality, *, tol=1e-6, max_iter=100):
    """Solve ESS(w(eps)) = alpha_quality * ESS(w) for eps by bisection.

    Returns ``(eps, weights)``. Keeps ``eps_prev`` when no smaller tolerance
    reaches the target.
    """
    target = alpha_quality * ess(w)
    finite = cache[np.isfinite(cache)]
    hi = eps_prev
    if not np.isfinite(hi):
        if finite.size == 0:
            return eps_prev, w
        hi = float(np.nextafter(finite.max(), np.inf))
    if _ess_or_zero(_reweight(w, cache, eps_prev, hi)) < target:
        return eps_prev, _reweight(w, cache, eps_prev, eps_prev)
    lo = 0.0
    for _ in range(max_iter):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if _ess_or_zero(_reweight(w, cache, eps_prev, mid)) >= target:
            hi = mid
        else:
            lo = mid
    return hi, _reweight(w, cache, eps_prev, hi)


def _repeat_move(model, observed, theta, cache, eps, chol, m, cost, budget, rng, max_attempts):
    """Propose until a cached distance is below ``eps``; updates in place.

    Returns the number of particles left in place after ``max_attempts``.
    """
    n = len(theta)
    pending = np.arange(n)
    tries = np.zeros(n, dtype=np.int64)
    stalls = 0
    while pending.size:
        prop = theta[pending] + rng.standard_normal((pending.size, theta.shape[1])) @ chol.T
        tries[pending] += 1
        ok = np.zeros(pending.size, bool)
        inside = np.flatnonzero(model.in_support(prop))
        if inside.size:
            d = _simulate_cache(model, prop[inside], observed, m, rng)
            budget.book(inside.size * m, inside.size * m * cost)
            hit = (d < eps).any(axis=1)
            sel = inside[hit]
            theta[pending[sel]] = prop[sel]
            cache[pending[sel]] = d[hit]
            ok[sel] = True
        pending = pending[~ok]
        stalled = pending[tries[pending] >= max_attempts]
        if stalled.size:
            log.warning("SMC move stalled for %d particle(s) at eps=%.6g", stalled.size, eps)
            stalls += stalled.size
            pending = pending[tries[pending] < max_attempts]
    return stalls


def _mh_move(model, observed, theta, cache, eps, chol, m, cost, budget, rng):
    """One Metropolis-Hastings step per particle; updates in place.

    The Gaussian kernel is symmetric, so the ratio is the prior ratio times
    the ratio of cached hit counts.
    """
    n = len(theta)
    prop = theta + rng.standard_normal(theta.shape) @ chol.T
    u = rng.random(n)
    inside = np.flatnonzero(model.in_support(prop))
    if not inside.size:
        return
    d = _simulate_cache(model, prop[inside], observed, m, rng)
    budget.book(inside.size * m, inside.size * m * cost)
    hits_new = (d < eps).sum(axis=1)
    hits_old = (cache[inside] < eps).sum(axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        log_ratio = model.log_prior(prop[inside]) - model.log_prior(theta[inside])
        log_ratio = log_ratio + np.log(hits_new) - np.log(hits_old)
    # a particle with no surviving hits accepts any proposal with a hit
    log_ratio = np.where(hits_old == 0, np.where(hits_new > 0, 0.0, -np.inf), log_ratio)
    acc = np.log(u[inside]) < log_ratio
    sel = inside[acc]
    theta[sel] = prop[inside][acc]
    cache[sel] = d[acc]


def smc_abc(
    model: Model,
    observed,
    n: int,
    m: int,
    t: int,
    rng: RngStream,
    *,
    alpha_quality: float = 0.9,
    n_min: int | None = None,
    max_move_attempts: int = 1000,
    bisect_tol: float = 1e-6,
    bisect_iter: int = 100,
    move: str = "repeat",
    mh_steps: int = 1,
) -> SMCResult:
    """Run ``t`` SMC-ABC steps with ``n`` particles and ``m`` pseudo-datasets each.

    Parameters
    ----------
    alpha_quality : float in (0, 1)
        Fraction of the ESS retained by each tolerance update.
    n_min : int, optional
        Resampling threshold on the ESS (default ``n // 2``).
    max_move_attempts : int
        Proposals per particle per move step before the particle is left in
        place (logged as a stall).
    move : {"repeat", "mh"}
        ``"repeat"`` proposes until a cached distance falls below the
        tolerance and adopts that proposal. ``"mh"`` runs ``mh_steps``
        Metropolis-Hastings steps per particle and needs
        :meth:`Model.log_prior`.
    """
    if not 0 < alpha_quality < 1:
        raise ValueError("alpha_quality must lie in (0, 1)")
    if m < 1 or n < 1:
        raise ValueError("need n >= 1 and m >= 1")
    if move not in ("repeat", "mh"):
        raise ValueError("move must be 'repeat' or 'mh'")
    n_min = n // 2 if n_min is None else n_min
    if n_min > n:
        raise ValueError("n_min must not exceed n")

    budget = BudgetCounter()
    cost = model.sim_cost()
    theta = model.sample_prior(rng, n)
    cache = _simulate_cache(model, theta, observed, m, rng)
    budget.book(n * m, n * m * cost)
    # strict inequality: nudge above the largest distance so every particle counts
    eps = float(np.nextafter(cache.max(), np.inf))
    w = np.full(n, 1.0 / n)
    steps = [ParticleSystem(theta.copy(), w.copy(), cache.copy(), eps, ess(w))]
    total_stalls = 0

    for _ in range(t):
        eps_new, w = next_epsilon(w, cache, eps, alpha_quality, tol=bisect_tol, max_iter=bisect_iter)
        resampled = False
        if ess(w) < n_min:
            idx = rng.choice(n, size=n, p=w)
            theta, cache = theta[idx], cache[idx]
            w = np.full(n, 1.0 / n)
            resampled = True
        eps = eps_new

        cov = np.atleast_2d(np.cov(theta.T, aweights=w)) if n > 1 else np.eye(theta.shape[1])
        cov = 2.0 * cov + 1e-12 * np.eye(theta.shape[1])
        chol = np.linalg.cholesky(cov)

        if move == "mh":
            stalled = 0
            for _ in range(mh_steps):
                _mh_move(model, observed, theta, cache, eps, chol, m, cost, budget, rng)
        else:
            stalled = _repeat_move(model, observed, theta, cache, eps, chol, m, cost, budget, rng,
                                   max_move_attempts)
            total_stalls += stalled

        steps.append(
            ParticleSystem(theta.copy(), w.copy(), cache.copy(), eps, ess(w), resampled, stalled)
        )

    return SMCResult(
        steps=steps,
        budget=budget,
        block_names=model.block_names,
        block_slices=[b.slice for b in model.blocks],
        stalls=total_stalls,
    )
