"""Hierarchical G&K models.

The G&K family is defined through its quantile function

    F^{-1}(x) = mu + B (1 + c tanh(g z / 2)) (1 + z^2)^k z,   z = Phi^{-1}(x),

(the tanh form equals (1 - e^{-gz}) / (1 + e^{-gz}) and does not overflow),
so simulation is by inversion. Units share a location hyperparameter
``alpha`` with ``mu_i ~ N(alpha, 1)``; data are compared through the sum of
absolute octile differences.
"""

from __future__ import annotations

import numpy as np

from ..model import HierarchicalModel, make_blocks
from ..rng import RngStream
from ..stats import empirical_quantile, std_normal_quantile

OCTILES = np.arange(9) / 8.0


def gk_inverse_cdf(x, mu=0.0, B=1.0, g=0.0, k=0.0, c=0.8):
    """G&K quantile function; arguments broadcast. Raises for ``x`` outside (0, 1)."""
    z = std_normal_quantile(x)
    return _gk_from_z(z, mu, B, g, k, c)


def _gk_from_z(z, mu, B, g, k, c):
    z = np.asarray(z, dtype=float)
    out = mu + B * (1.0 + c * np.tanh(0.5 * g * z)) * (1.0 + z * z) ** k * z
    return float(out) if np.ndim(out) == 0 else out


def gk_sample(rng: RngStream, size, mu=0.0, B=1.0, g=0.0, k=0.0, c=0.8):
    """Inversion sampler: ``F^{-1}(u)`` with ``u`` uniform on the open interval (0, 1).

    Parameter arrays must broadcast against ``size``.
    """
    # midpoints of a 2^-53 lattice, so u is never exactly 0 or 1
    u = (np.floor(rng.random(size) * 2.0**53) + 0.5) / 2.0**53
    return _gk_from_z(std_normal_quantile(u), mu, B, g, k, c)


def octiles(x, axis=-1):
    """The nine octiles (levels 0, 1/8, ..., 1) along ``axis``."""
    return empirical_quantile(x, OCTILES, axis=axis)


def gk_octile_distance(x1, x2) -> float:
    """Sum over levels i/8, i = 0..8, of absolute quantile differences."""
    a = np.asarray(x1, dtype=float).ravel()
    b = np.asarray(x2, dtype=float).ravel()
    if a.size == 0 or b.size == 0:
        raise ValueError("octile distance of an empty sample")
    return float(np.abs(octiles(a) - octiles(b)).sum())


def _check_shape(B, c):
    if not 0 < c < 1:
        raise ValueError("c must lie in (0, 1)")
    if B is not None and B <= 0:
        raise ValueError("B must be positive")


class SimpleGKModel(HierarchicalModel):
    """``alpha ~ U(lo, hi)``, ``mu_i ~ N(alpha, 1)``, ``x_i ~ GK(mu_i, B, g, k)``
    with known ``(B, g, k)``. Blocks ``mu_1 .. mu_n`` then ``alpha``."""

    name = "gk-simple"

    def __init__(self, n=20, obs_per_unit=100, B=1.0, g=2.0, k=0.5, c=0.8, alpha_range=(-10.0, 10.0)):
        _check_shape(B, c)
        if n < 1 or obs_per_unit < 1:
            raise ValueError("need n >= 1 and obs_per_unit >= 1")
        self.n, self.m = int(n), int(obs_per_unit)
        self.B, self.g, self.k, self.c = float(B), float(g), float(k), float(c)
        self.lo, self.hi = map(float, alpha_range)
        self.blocks = make_blocks([(f"mu_{i + 1}", 1) for i in range(self.n)] + [("alpha", 1)])
        self.alpha = self.n
        units = tuple(range(self.n))
        self.groups = (units, (self.alpha,))
        self.hyper_blocks = (self.alpha,)
        self.unit_groups = (units,)

    def sample_prior(self, rng, size):
        a = rng.uniform(self.lo, self.hi, size)
        return np.column_stack([a[:, None] + rng.standard_normal((size, self.n)), a])

    def conditional_prior(self, j, state, rng, size):
        if j == self.alpha:
            return rng.uniform(self.lo, self.hi, (size, 1))
        return rng.normal(state[self.alpha], 1.0, (size, 1))

    def _data(self, mu, rng):
        mu = np.asarray(mu, dtype=float)
        return gk_sample(rng, (*mu.shape, self.m), mu[..., None], self.B, self.g, self.k, self.c)

    def simulate(self, theta, rng):
        return self._data(np.asarray(theta, dtype=float)[: self.n], rng)

    def block_summary(self, j, data, state):
        if j == self.alpha:
            return octiles(np.asarray(state[: self.n]))
        return octiles(np.asarray(data[j]))

    def block_distance(self, j, a, b):
        return float(np.abs(np.asarray(a) - np.asarray(b)).sum())

    def block_cost(self, j, state=None):
        return self.n if j == self.alpha else self.m

    def sim_cost(self, theta=None):
        return self.n * (1 + self.m)

    def summary(self, data):
        return octiles(np.asarray(data, dtype=float))

    def distance(self, a, b):
        return float(np.abs(np.asarray(a) - np.asarray(b)).sum())

    def in_support(self, theta):
        a = np.atleast_2d(theta)[:, self.alpha]
        return (a >= self.lo) & (a <= self.hi)

    def block_table(self, j, state, observed, size, rng):
        if j == self.alpha:
            cands = rng.uniform(self.lo, self.hi, size)
            mu_t = cands[:, None] + rng.standard_normal((size, self.n))
            target = octiles(np.asarray(state[: self.n]))
            d = np.abs(octiles(mu_t) - target).sum(axis=-1)
            return cands[:, None], d
        c, d = self.group_table((j,), state, observed, size, rng)
        return c[0], d[0]

    def group_table(self, group, state, observed, size, rng):
        group = list(group)
        if self.alpha in group:
            if len(group) != 1:
                raise ValueError("alpha cannot share a group with unit blocks")
            c, d = self.block_table(self.alpha, state, observed, size, rng)
            return c[None], d[None]
        cands = state[self.alpha] + rng.standard_normal((len(group), size))
        sim = octiles(self._data(cands, rng))
        target = octiles(np.asarray(observed, dtype=float)[group])
        d = np.abs(sim - target[:, None, :]).sum(axis=-1)
        return cands[..., None], d

    def simulate_distances(self, thetas, observed, rng):
        thetas = np.atleast_2d(thetas)
        sim = octiles(self._data(thetas[:, : self.n], rng))
        return np.abs(sim - self.summary(observed)).sum(axis=(-1, -2))


class DoublyGKModel(HierarchicalModel):
    """G&K hierarchy with unknown shared ``(B, g, k)``.

    ``alpha ~ U(lo, hi)``, ``B, g, k ~ U(0, 1)``, ``mu_i ~ N(alpha, 1)``,
    ``x_i ~ GK(mu_i, B, g, k)``. Blocks are scanned in the order
    ``alpha, B, g, k, mu_1 .. mu_n``. The shape blocks are scored against
    the whole dataset (sum of per-unit octile distances).
    """

    name = "gk-double"

    def __init__(self, n=20, obs_per_unit=100, c=0.8, alpha_range=(-10.0, 10.0)):
        _check_shape(None, c)
        if n < 1 or obs_per_unit < 1:
            raise ValueError("need n >= 1 and obs_per_unit >= 1")
        self.n, self.m, self.c = int(n), int(obs_per_unit), float(c)
        self.lo, self.hi = map(float, alpha_range)
        self.blocks = make_blocks(
            [("alpha", 1), ("B", 1), ("g", 1), ("k", 1)] + [(f"mu_{i + 1}", 1) for i in range(self.n)]
        )
        units = tuple(range(4, 4 + self.n))
        self.groups = ((0,), (1,), (2,), (3,), units)
        self.hyper_blocks = (0,)
        self.unit_groups = (units,)
        self.shape_blocks = (1, 2, 3)

    def _mu(self, state):
        return np.asarray(state, dtype=float)[4:]

    def sample_prior(self, rng, size):
        a = rng.uniform(self.lo, self.hi, size)
        bgk = rng.uniform(0.0, 1.0, (size, 3))
        mu = a[:, None] + rng.standard_normal((size, self.n))
        return np.column_stack([a, bgk, mu])

    def conditional_prior(self, j, state, rng, size):
        if j == 0:
            return rng.uniform(self.lo, self.hi, (size, 1))
        if j in self.shape_blocks:
            return rng.uniform(0.0, 1.0, (size, 1))
        return rng.normal(state[0], 1.0, (size, 1))

    def _data(self, mu, B, g, k, rng):
        mu = np.asarray(mu, dtype=float)
        return gk_sample(rng, (*mu.shape, self.m), mu[..., None], B, g, k, self.c)

    def simulate(self, theta, rng):
        th = np.asarray(theta, dtype=float)
        return self._data(th[4:], th[1], th[2], th[3], rng)

    def block_summary(self, j, data, state):
        if j == 0:
            return octiles(self._mu(state))
        if j in self.shape_blocks:
            return octiles(np.asarray(data, dtype=float))
        return octiles(np.asarray(data[j - 4]))

    def block_distance(self, j, a, b):
        return float(np.abs(np.asarray(a) - np.asarray(b)).sum())

    def block_cost(self, j, state=None):
        if j == 0:
            return self.n
        if j in self.shape_blocks:
            return self.n * self.m
        return self.m

    def sim_cost(self, theta=None):
        return self.n * (1 + self.m)

    def summary(self, data):
        return octiles(np.asarray(data, dtype=float))

    def distance(self, a, b):
        return float(np.abs(np.asarray(a) - np.asarray(b)).sum())

    def in_support(self, theta):
        th = np.atleast_2d(theta)
        ok = (th[:, 0] >= self.lo) & (th[:, 0] <= self.hi)
        return ok & np.all((th[:, 1:4] >= 0) & (th[:, 1:4] <= 1), axis=1)

    def block_table(self, j, state, observed, size, rng):
        state = np.asarray(state, dtype=float)
        if j == 0:
            cands = rng.uniform(self.lo, self.hi, size)
            mu_t = cands[:, None] + rng.standard_normal((size, self.n))
            d = np.abs(octiles(mu_t) - octiles(self._mu(state))).sum(axis=-1)
            return cands[:, None], d
        if j in self.shape_blocks:
            cands = rng.uniform(0.0, 1.0, size)
            bgk = np.broadcast_to(state[1:4], (size, 3)).copy()
            bgk[:, j - 1] = cands
            p = [bgk[:, i, None, None] for i in range(3)]
            sim = octiles(self._data(np.broadcast_to(self._mu(state), (size, self.n)), *p, rng))
            d = np.abs(sim - self.summary(observed)).sum(axis=(-1, -2))
            return cands[:, None], d
        c, d = self.group_table((j,), state, observed, size, rng)
        return c[0], d[0]

    def group_table(self, group, state, observed, size, rng):
        group = list(group)
        if any(j < 4 for j in group):
            if len(group) != 1:
                raise ValueError("hyper and shape blocks are updated one at a time")
            c, d = self.block_table(group[0], state, observed, size, rng)
            return c[None], d[None]
        state = np.asarray(state, dtype=float)
        cands = state[0] + rng.standard_normal((len(group), size))
        sim = octiles(self._data(cands, state[1], state[2], state[3], rng))
        units = [j - 4 for j in group]
        target = octiles(np.asarray(observed, dtype=float)[units])
        return cands[..., None], np.abs(sim - target[:, None, :]).sum(axis=-1)

    def simulate_distances(self, thetas, observed, rng):
        th = np.atleast_2d(thetas)
        p = [th[:, i, None, None] for i in (1, 2, 3)]
        sim = octiles(self._data(th[:, 4:], *p, rng))
        return np.abs(sim - self.summary(observed)).sum(axis=(-1, -2))
