"""Two-level Normal-Normal hierarchy with a uniform hyperprior.

    alpha ~ U[lo, hi],  mu_j | alpha ~ N(alpha, varsigma^2),
    x_{j,k} | mu_j ~ N(mu_j, sigma^2),  j = 1..n, k = 1..K.

Unit means are sufficient at both levels, which makes exact conditionals
and a quadrature posterior available for checking the ABC samplers.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import stats as sps

from ..diagnostics import DensityGrid
from ..model import HierarchicalModel, make_blocks
from ..rng import RngStream


def exact_conditional_mu(alpha, unit_data, sigma, varsigma, rng: RngStream):
    """Draw mu_j from its conjugate conditional given alpha and the unit's data."""
    x = np.asarray(unit_data, dtype=float).ravel()
    k = x.size
    if k == 0:
        return float(rng.normal(alpha, varsigma))
    if sigma == 0:
        return float(x.mean())
    v = 1.0 / (1.0 / varsigma**2 + k / sigma**2)
    m = v * (alpha / varsigma**2 + k * x.mean() / sigma**2)
    return float(rng.normal(m, math.sqrt(v)))


def conditional_mu_moments(alpha, xbar, k, sigma, varsigma):
    v = 1.0 / (1.0 / varsigma**2 + k / sigma**2)
    return v * (np.asarray(alpha) / varsigma**2 + k * np.asarray(xbar) / sigma**2), v


class NormalNormalModel(HierarchicalModel):
    """Blocks ``mu_1 .. mu_n`` (one group) followed by ``alpha``."""

    name = "normal-normal"

    def __init__(self, n=20, K=10, sigma=1.0, varsigma=1.0, alpha_range=(-4.0, 4.0)):
        if n < 1 or K < 1:
            raise ValueError("need n >= 1 and K >= 1")
        if sigma < 0 or varsigma <= 0:
            raise ValueError("need sigma >= 0 and varsigma > 0")
        self.n, self.K = int(n), int(K)
        self.sigma, self.varsigma = float(sigma), float(varsigma)
        self.lo, self.hi = map(float, alpha_range)
        if not self.lo < self.hi:
            raise ValueError("alpha_range must be increasing")
        self.blocks = make_blocks([(f"mu_{j + 1}", 1) for j in range(self.n)] + [("alpha", 1)])
        self.alpha = self.n
        units = tuple(range(self.n))
        self.groups = (units, (self.alpha,))
        self.hyper_blocks = (self.alpha,)
        self.unit_groups = (units,)

    # -- primitives ---------------------------------------------------------

    def sample_prior(self, rng, size):
        a = rng.uniform(self.lo, self.hi, size)
        mu = a[:, None] + self.varsigma * rng.standard_normal((size, self.n))
        return np.column_stack([mu, a])

    def conditional_prior(self, j, state, rng, size):
        if j == self.alpha:
            return rng.uniform(self.lo, self.hi, (size, 1))
        return rng.normal(state[self.alpha], self.varsigma, (size, 1))

    def simulate(self, theta, rng):
        mu = np.asarray(theta, dtype=float)[: self.n]
        return mu[:, None] + self.sigma * rng.standard_normal((self.n, self.K))

    def block_summary(self, j, data, state):
        if j == self.alpha:
            # the hyper level sees the unit parameters, not the data
            return np.atleast_1d(np.mean(state[: self.n]))
        return np.atleast_1d(np.mean(data[j]))

    def block_distance(self, j, a, b):
        return float(np.abs(np.asarray(a) - np.asarray(b)).sum())

    def block_cost(self, j, state=None):
        return self.n if j == self.alpha else self.K

    def sim_cost(self, theta=None):
        return self.n * (1 + self.K)

    def summary(self, data):
        return np.asarray(data, dtype=float).mean(axis=-1)

    def in_support(self, theta):
        theta = np.atleast_2d(theta)
        a = theta[:, self.alpha]
        return (a >= self.lo) & (a <= self.hi)

    def log_prior(self, theta):
        theta = np.atleast_2d(theta)
        z = (theta[:, : self.n] - theta[:, self.alpha, None]) / self.varsigma
        lp = -0.5 * (z * z).sum(axis=1)
        return np.where(self.in_support(theta), lp, -np.inf)

    # -- exact conditionals -------------------------------------------------

    def has_exact(self, j):
        return True

    def exact_conditional(self, j, state, observed, rng):
        if j == self.alpha:
            mbar = float(np.mean(state[: self.n]))
            sd = self.varsigma / math.sqrt(self.n)
            a, b = (self.lo - mbar) / sd, (self.hi - mbar) / sd
            return np.atleast_1d(sps.truncnorm.rvs(a, b, loc=mbar, scale=sd, random_state=rng.generator))
        return np.atleast_1d(
            exact_conditional_mu(state[self.alpha], observed[j], self.sigma, self.varsigma, rng)
        )

    # -- vectorized tables --------------------------------------------------

    def _unit_means(self, mu, rng):
        noise = rng.standard_normal((*mu.shape, self.K)).mean(axis=-1)
        return mu + self.sigma * noise

    def block_table(self, j, state, observed, size, rng):
        if j == self.alpha:
            cands = rng.uniform(self.lo, self.hi, size)
            mu_t = cands[:, None] + self.varsigma * rng.standard_normal((size, self.n))
            d = np.abs(mu_t.mean(axis=1) - np.mean(state[: self.n]))
            return cands[:, None], d
        cands, d = self.group_table((j,), state, observed, size, rng)
        return cands[0], d[0]

    def group_table(self, group, state, observed, size, rng):
        group = list(group)
        if self.alpha in group:
            if len(group) != 1:
                raise ValueError("alpha cannot share a group with unit blocks")
            c, d = self.block_table(self.alpha, state, observed, size, rng)
            return c[None], d[None]
        cands = state[self.alpha] + self.varsigma * rng.standard_normal((len(group), size))
        xbar = self._unit_means(cands, rng)
        target = np.asarray(observed, dtype=float)[group].mean(axis=1)
        return cands[..., None], np.abs(xbar - target[:, None])

    def simulate_distances(self, thetas, observed, rng):
        thetas = np.atleast_2d(thetas)
        xbar = self._unit_means(thetas[:, : self.n], rng)
        return np.linalg.norm(xbar - self.summary(observed), axis=1)

    def prior_table(self, observed, size, rng):
        thetas = self.sample_prior(rng, size)
        return thetas, self.simulate_distances(thetas, observed, rng)

    # -- oracle -------------------------------------------------------------

    def posterior_grids(self, observed, resolution=2001, mu_resolution=1001, units=None):
        """Exact marginal posteriors of ``alpha`` and the requested ``mu_j``.

        The alpha posterior is proportional to the indicator of the prior
        range times the product over units of N(xbar_j; alpha,
        varsigma^2 + sigma^2/K); each mu_j marginal integrates its conjugate
        conditional against that density.
        """
        xbar = self.summary(observed)
        s2 = self.varsigma**2 + self.sigma**2 / self.K
        a = np.linspace(self.lo, self.hi, resolution)
        logp = -0.5 * ((xbar[None, :] - a[:, None]) ** 2).sum(axis=1) / s2
        pa = np.exp(logp - logp.max())
        grids = {"alpha": DensityGrid(a, pa)}
        wa = grids["alpha"].density * np.gradient(a)
        wa /= wa.sum()
        units = range(self.n) if units is None else units
        for j in units:
            m, v = conditional_mu_moments(a, xbar[j], self.K, max(self.sigma, 1e-300), self.varsigma)
            sd = math.sqrt(v)
            x = np.linspace(m.min() - 8 * sd, m.max() + 8 * sd, mu_resolution)
            dens = (wa[None, :] * sps.norm.pdf(x[:, None], m[None, :], sd)).sum(axis=1)
            grids[f"mu_{j + 1}"] = DensityGrid(x, dens)
        return grids
