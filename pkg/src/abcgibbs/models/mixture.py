"""Two-component uniform mixture on a constrained square.

``(theta_1, theta_2)`` is uniform on A = {0 <= theta_i <= 10,
|theta_1 - theta_2| > 2} and a single observation is drawn from
0.5 U(theta_1, theta_1 + 1) + 0.5 U(theta_2, theta_2 + 1). Given
theta_2, the conditional prior of theta_1 excludes a band of width 4
around theta_2, so a component-wise sampler cannot jump between the two
symmetric posterior branches.
"""

from __future__ import annotations

import numpy as np

from ..model import Model, make_blocks

LOW, HIGH, GAP = 0.0, 10.0, 2.0


def mixture_prior_sample(rng, size=1, *, chunk=None):
    """Rejection sampling from U[0,10]^2 restricted to |theta_1 - theta_2| > 2."""
    out, got = np.empty((size, 2)), 0
    chunk = chunk or max(16, 2 * size)
    while got < size:
        p = rng.uniform(LOW, HIGH, (chunk, 2))
        p = p[np.abs(p[:, 0] - p[:, 1]) > GAP][: size - got]
        out[got : got + len(p)] = p
        got += len(p)
    return out


def mixture_simulate(theta1, theta2, rng, size=None):
    """One observation per parameter pair (arrays broadcast)."""
    t1, t2 = np.broadcast_arrays(np.asarray(theta1, float), np.asarray(theta2, float))
    shape = t1.shape if size is None else size
    pick = rng.random(shape) < 0.5
    return np.where(pick, t1, t2) + rng.random(shape)


def conditional_allowed(other, rng, size):
    """Uniform draws on [0, 10] minus (other - 2, other + 2)."""
    left = max(0.0, other - GAP - LOW)
    right = max(0.0, HIGH - (other + GAP))
    u = rng.uniform(0.0, left + right, size)
    return np.where(u < left, LOW + u, other + GAP + (u - left))


def in_posterior_support(theta, x_obs):
    """Membership of the exact posterior support given one observation."""
    th = np.atleast_2d(theta)
    in_a = np.all((th >= LOW) & (th <= HIGH), axis=1) & (np.abs(th[:, 0] - th[:, 1]) > GAP)
    covers = ((th[:, 0] <= x_obs) & (x_obs <= th[:, 0] + 1)) | ((th[:, 1] <= x_obs) & (x_obs <= th[:, 1] + 1))
    return in_a & covers


class MixtureModel(Model):
    """Blocks ``theta1`` and ``theta2``; summary is the observation itself."""

    name = "mixture"

    def __init__(self):
        self.blocks = make_blocks([("theta1", 1), ("theta2", 1)])

    def sample_prior(self, rng, size):
        return mixture_prior_sample(rng, size)

    def conditional_prior(self, j, state, rng, size):
        return conditional_allowed(float(state[1 - j]), rng, size)[:, None]

    def simulate(self, theta, rng):
        return float(mixture_simulate(theta[0], theta[1], rng))

    def block_summary(self, j, data, state):
        return np.atleast_1d(data)

    def block_cost(self, j, state=None):
        return 2

    def sim_cost(self, theta=None):
        return 2

    def summary(self, data):
        return np.atleast_1d(np.asarray(data, dtype=float))

    def in_support(self, theta):
        th = np.atleast_2d(theta)
        box = np.all((th >= LOW) & (th <= HIGH), axis=1)
        return box & (np.abs(th[:, 0] - th[:, 1]) > GAP)

    def log_prior(self, theta):
        return np.where(self.in_support(theta), 0.0, -np.inf)

    def block_table(self, j, state, observed, size, rng):
        cands = conditional_allowed(float(state[1 - j]), rng, size)
        other = np.full(size, float(state[1 - j]))
        x = mixture_simulate(cands, other, rng)
        return cands[:, None], np.abs(x - float(np.asarray(observed).ravel()[0]))

    def simulate_distances(self, thetas, observed, rng):
        th = np.atleast_2d(thetas)
        x = mixture_simulate(th[:, 0], th[:, 1], rng)
        return np.abs(x - float(np.asarray(observed).ravel()[0]))
