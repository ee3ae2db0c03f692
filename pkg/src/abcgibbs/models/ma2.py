"""Hierarchical MA(2) model.

Each of ``n`` series follows x(t) = y_t + mu_1 y_{t-1} + mu_2 y_{t-2} with
y_t ~ N(0, sigma_j^2). The MA coefficients are parameterized through a
point of the 2-simplex, beta_j ~ Dirichlet(alpha), with
mu_j = (beta_1 - beta_2, 2 (beta_1 + beta_2) - 1), and the noise variances
are inverse-gamma with hyperparameters ``varsigma``.

Unit-level statistics: lag-1/lag-2 sample autocorrelations (for mu_j) and
the spread of the lag-3 thinned series (for sigma_j^2). Hyper-level
statistics are the Dirichlet and gamma sufficient statistics of the unit
parameters.
"""

from __future__ import annotations

import numpy as np

from ..distributions import dirichlet
from ..model import HierarchicalModel, make_blocks
from ..rng import RngStream
from ..stats import empirical_quantile


def ma2_simulate(mu1, mu2, sigma2, T: int, rng: RngStream):
    """MA(2) series of length ``T``; parameter arrays broadcast to a batch shape."""
    if T < 3:
        raise ValueError("T must be at least 3")
    mu1, mu2, sigma2 = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in (mu1, mu2, sigma2)))
    if np.any(sigma2 < 0):
        raise ValueError("sigma2 must be non-negative")
    with np.errstate(invalid="ignore", over="ignore"):
        y = np.sqrt(sigma2)[..., None] * rng.standard_normal((*mu1.shape, T + 2))
        return y[..., 2:] + mu1[..., None] * y[..., 1:-1] + mu2[..., None] * y[..., :-2]


def autocorrelation(x, lag: int, *, strict: bool = True):
    """Lag-``lag`` sample autocorrelation along the last axis.

    Zero-variance series raise when ``strict``; otherwise they give NaN.
    """
    x = np.asarray(x, dtype=float)
    xc = x - x.mean(axis=-1, keepdims=True)
    den = (xc * xc).sum(axis=-1)
    num = (xc[..., :-lag] * xc[..., lag:]).sum(axis=-1)
    if strict and np.any(den == 0):
        raise ValueError("autocorrelation of a constant series")
    with np.errstate(invalid="ignore", divide="ignore"):
        return num / den


def population_autocorrelation(mu1, mu2):
    """Lag-1 and lag-2 autocorrelations of the MA(2) process."""
    s = 1.0 + mu1**2 + mu2**2
    return mu1 * (1.0 + mu2) / s, mu2 / s


def thinned_spread(x):
    """Sum of squared deviations of x(3), x(6), ..., x(3 floor(T/3))."""
    x = np.asarray(x, dtype=float)
    t3 = x.shape[-1] // 3
    sub = x[..., 2::3][..., :t3]
    return ((sub - sub.mean(axis=-1, keepdims=True)) ** 2).sum(axis=-1)


def unit_stats(x, *, strict: bool = False):
    """``(rho_1, rho_2, S / floor(T/3))`` along the last axis, stacked last."""
    x = np.asarray(x, dtype=float)
    t3 = x.shape[-1] // 3
    # heavy-tailed variance draws can overflow; those rows end up at infinite distance
    with np.errstate(invalid="ignore", over="ignore"):
        return np.stack(
            [autocorrelation(x, 1, strict=strict), autocorrelation(x, 2, strict=strict), thinned_spread(x) / t3],
            axis=-1,
        )


def w_distance(stats, stats_obs):
    """Autocorrelation distance w from unit statistics."""
    d = np.asarray(stats)[..., :2] - np.asarray(stats_obs)[..., :2]
    return np.sqrt((d * d).sum(axis=-1))


def v_distance(stats, stats_obs):
    """Thinned-variance distance v from unit statistics."""
    return np.abs(np.asarray(stats)[..., 2] - np.asarray(stats_obs)[..., 2])


def ma2_dirichlet_reparam(beta1, beta2):
    """Simplex point ``(beta1, beta2)`` to MA coefficients ``(mu1, mu2)``."""
    b1, b2 = np.asarray(beta1, dtype=float), np.asarray(beta2, dtype=float)
    tol = 1e-12
    if np.any(b1 < -tol) or np.any(b2 < -tol) or np.any(b1 + b2 > 1 + tol):
        raise ValueError("beta outside the simplex")
    return b1 - b2, 2.0 * (b1 + b2) - 1.0


def ma2_inverse_reparam(mu1, mu2, *, check: bool = True):
    """MA coefficients back to ``(beta1, beta2)``."""
    mu1, mu2 = np.asarray(mu1, dtype=float), np.asarray(mu2, dtype=float)
    b1 = (mu2 + 2.0 * mu1 + 1.0) / 4.0
    b2 = (mu2 - 2.0 * mu1 + 1.0) / 4.0
    if check:
        tol = 1e-12
        if np.any(b1 < -tol) or np.any(b2 < -tol) or np.any(b1 + b2 > 1 + tol):
            raise ValueError("mu outside the image of the simplex")
    return b1, b2


def dirichlet_summary(mu):
    """``(sum log beta_1, sum log beta_2, sum log beta_3)`` over units.

    ``mu`` has shape ``(..., n, 2)``. Boundary points (a zero simplex
    coordinate) raise.
    """
    mu = np.asarray(mu, dtype=float)
    b1, b2 = ma2_inverse_reparam(mu[..., 0], mu[..., 1])
    beta = np.stack([b1, b2, 1.0 - b1 - b2], axis=-1)
    if np.any(beta <= 0):
        raise ValueError("Dirichlet summary undefined on the simplex boundary")
    return np.log(beta).sum(axis=-2)


def _dirichlet_summary_beta(beta):
    with np.errstate(divide="ignore"):
        return np.log(beta).sum(axis=-2)


def invgamma_summary(sigma2):
    """``(sum log sigma_j^2, sum 1/sigma_j^2)`` over the last axis."""
    s = np.asarray(sigma2, dtype=float)
    with np.errstate(divide="ignore"):
        return np.stack([np.log(s).sum(axis=-1), (1.0 / s).sum(axis=-1)], axis=-1)


def ma2_hyper_summaries(mu=None, sigma2=None):
    """Hyper-level statistics of unit MA coefficients and/or variances."""
    out = {}
    if mu is not None:
        out["alpha"] = dirichlet_summary(mu)
    if sigma2 is not None:
        out["varsigma"] = invgamma_summary(sigma2)
    return out


def _invgamma(shape, scale, rng, size=None):
    with np.errstate(divide="ignore", over="ignore"):
        return scale / rng.gamma(shape, 1.0, size)


def _half_cauchy(rng, size):
    return np.abs(np.tan(np.pi * (rng.random(size) - 0.5)))


class MA2HierModel(HierarchicalModel):
    """Blocks ``mu_1..mu_n`` (2 each), ``alpha`` (3), ``sigma2_1..sigma2_n``, ``varsigma`` (2).

    Parameters
    ----------
    n, T : int
        Number of series and series length.
    q_w, q_v : array_like, optional
        Per-series normalizers of the w and v distances in the global
        distance. Default to ones; see :meth:`calibrate`.
    """

    name = "ma2"

    def __init__(self, n=5, T=100, q_w=None, q_v=None):
        if n < 1:
            raise ValueError("need n >= 1")
        if T < 3:
            raise ValueError("T must be at least 3")
        self.n, self.T = int(n), int(T)
        spec = [(f"mu_{j + 1}", 2) for j in range(n)] + [("alpha", 3)]
        spec += [(f"sigma2_{j + 1}", 1) for j in range(n)] + [("varsigma", 2)]
        self.blocks = make_blocks(spec)
        self.mu_blocks = tuple(range(n))
        self.alpha = n
        self.sigma_blocks = tuple(range(n + 1, 2 * n + 1))
        self.varsigma = 2 * n + 1
        self.groups = (self.mu_blocks, (self.alpha,), self.sigma_blocks, (self.varsigma,))
        self.hyper_blocks = (self.alpha, self.varsigma)
        self.unit_groups = (self.mu_blocks, self.sigma_blocks)
        self.q_w = np.ones(n) if q_w is None else np.asarray(q_w, dtype=float)
        self.q_v = np.ones(n) if q_v is None else np.asarray(q_v, dtype=float)

    # -- state helpers --------------------------------------------------------

    def mu(self, state):
        s = np.asarray(state, dtype=float)
        return s[..., : 2 * self.n].reshape(*s.shape[:-1], self.n, 2)

    def sigma2(self, state):
        s = np.asarray(state, dtype=float)
        a = 2 * self.n + 3
        return s[..., a : a + self.n]

    def _alpha(self, state):
        s = np.asarray(state, dtype=float)
        return s[..., 2 * self.n : 2 * self.n + 3]

    def _vs(self, state):
        s = np.asarray(state, dtype=float)
        return s[..., -2:]

    def _obs_stats(self, observed):
        return unit_stats(observed, strict=True)

    # -- primitives -------------------------------------------------------------

    def sample_prior(self, rng, size):
        a = rng.exponential(1.0, (size, 3))
        beta = dirichlet(a[:, None, :].repeat(self.n, axis=1), rng)
        mu = np.stack(ma2_dirichlet_reparam(beta[..., 0], beta[..., 1]), axis=-1)
        vs = _half_cauchy(rng, (size, 2))
        s2 = _invgamma(vs[:, :1], vs[:, 1:], rng, (size, self.n))
        return np.column_stack([mu.reshape(size, -1), a, s2, vs])

    def conditional_prior(self, j, state, rng, size):
        if j in self.mu_blocks:
            beta = dirichlet(self._alpha(state), rng, size)
            return np.stack(ma2_dirichlet_reparam(beta[:, 0], beta[:, 1]), axis=-1)
        if j == self.alpha:
            return rng.exponential(1.0, (size, 3))
        if j in self.sigma_blocks:
            vs = self._vs(state)
            return _invgamma(vs[0], vs[1], rng, (size, 1))
        return _half_cauchy(rng, (size, 2))

    def simulate(self, theta, rng):
        mu = self.mu(theta)
        return ma2_simulate(mu[:, 0], mu[:, 1], self.sigma2(theta), self.T, rng)

    def block_summary(self, j, data, state):
        if j == self.alpha:
            return dirichlet_summary(self.mu(state))
        if j == self.varsigma:
            return invgamma_summary(self.sigma2(state))
        unit = j if j in self.mu_blocks else j - self.n - 1
        s = unit_stats(np.asarray(data)[unit])
        return s[:2] if j in self.mu_blocks else s[2:]

    def block_cost(self, j, state=None):
        if j == self.alpha:
            return 3 * self.n
        if j == self.varsigma:
            return self.n
        return self.T + 2

    def sim_cost(self, theta=None):
        return self.n * (3 + 1 + self.T + 2)

    def summary(self, data):
        return unit_stats(data, strict=False)

    def distance(self, a, b):
        a, b = np.asarray(a), np.asarray(b)
        with np.errstate(over="ignore"):
            d = (w_distance(a, b) / self.q_w + v_distance(a, b) / self.q_v).sum(axis=-1)
        return float(d) if np.ndim(d) == 0 else d

    def in_support(self, theta):
        th = np.atleast_2d(theta)
        mu = self.mu(th)
        b1, b2 = ma2_inverse_reparam(mu[..., 0], mu[..., 1], check=False)
        simplex = np.all((b1 >= 0) & (b2 >= 0) & (b1 + b2 <= 1), axis=1)
        pos = np.all(self._alpha(th) > 0, axis=1) & np.all(self.sigma2(th) > 0, axis=1)
        return simplex & pos & np.all(self._vs(th) > 0, axis=1)

    # -- tables -------------------------------------------------------------------

    def block_table(self, j, state, observed, size, rng):
        state = np.asarray(state, dtype=float)
        if j == self.alpha:
            cands = rng.exponential(1.0, (size, 3))
            beta = dirichlet(cands[:, None, :].repeat(self.n, axis=1), rng)
            mu = self.mu(state)
            b1, b2 = ma2_inverse_reparam(mu[:, 0], mu[:, 1], check=False)
            cur = np.stack([b1, b2, 1.0 - b1 - b2], axis=-1)
            target = _dirichlet_summary_beta(np.clip(cur, 1e-300, None))
            sim = _dirichlet_summary_beta(beta)
            with np.errstate(invalid="ignore"):
                d = np.sqrt(((sim - target) ** 2).sum(axis=-1))
            return cands, np.where(np.isnan(d), np.inf, d)
        if j == self.varsigma:
            cands = _half_cauchy(rng, (size, 2))
            s2 = _invgamma(cands[:, :1], cands[:, 1:], rng, (size, self.n))
            target = invgamma_summary(self.sigma2(state))
            with np.errstate(invalid="ignore", over="ignore"):
                d = np.sqrt(((invgamma_summary(s2) - target) ** 2).sum(axis=-1))
            return cands, np.where(np.isnan(d), np.inf, d)
        c, d = self.group_table((j,), state, observed, size, rng)
        return c[0], d[0]

    def group_table(self, group, state, observed, size, rng):
        group = list(group)
        if self.alpha in group or self.varsigma in group:
            if len(group) != 1:
                raise ValueError("hyper blocks are updated one at a time")
            c, d = self.block_table(group[0], state, observed, size, rng)
            return c[None], d[None]
        state = np.asarray(state, dtype=float)
        obs = self._obs_stats(observed)
        if all(j in self.mu_blocks for j in group):
            units = np.array(group)
            beta = dirichlet(self._alpha(state), rng, (len(group), size))
            mu1, mu2 = ma2_dirichlet_reparam(beta[..., 0], beta[..., 1])
            s2 = self.sigma2(state)[units][:, None]
            x = ma2_simulate(mu1, mu2, np.broadcast_to(s2, mu1.shape), self.T, rng)
            d = w_distance(unit_stats(x), obs[units][:, None, :])
            return np.stack([mu1, mu2], axis=-1), np.where(np.isnan(d), np.inf, d)
        if all(j in self.sigma_blocks for j in group):
            units = np.array(group) - self.n - 1
            vs = self._vs(state)
            cands = _invgamma(vs[0], vs[1], rng, (len(group), size))
            mu = self.mu(state)[units]
            mu1 = np.broadcast_to(mu[:, 0, None], cands.shape)
            mu2 = np.broadcast_to(mu[:, 1, None], cands.shape)
            x = ma2_simulate(mu1, mu2, cands, self.T, rng)
            d = v_distance(unit_stats(x), obs[units][:, None, :])
            return cands[..., None], np.where(np.isnan(d), np.inf, d)
        raise ValueError("a group must contain only mu blocks or only sigma2 blocks")

    def simulate_distances(self, thetas, observed, rng):
        th = np.atleast_2d(thetas)
        mu = self.mu(th)
        x = ma2_simulate(mu[..., 0], mu[..., 1], self.sigma2(th), self.T, rng)
        d = self.distance(unit_stats(x), self._obs_stats(observed))
        return np.where(np.isnan(d), np.inf, d)

    # -- calibration ----------------------------------------------------------------

    def calibrate(self, observed, rng: RngStream, pilot_size=10**5, level=0.001, chunk=10**4):
        """Set ``q_w`` and ``q_v`` to the ``level`` quantiles of the per-series
        w and v distances over a prior-predictive pilot table."""
        obs = self._obs_stats(observed)
        ws, vs = [], []
        done = 0
        while done < pilot_size:
            m = min(chunk, pilot_size - done)
            th = self.sample_prior(rng, m)
            mu = self.mu(th)
            x = ma2_simulate(mu[..., 0], mu[..., 1], self.sigma2(th), self.T, rng)
            s = unit_stats(x)
            ws.append(w_distance(s, obs))
            vs.append(v_distance(s, obs))
            done += m
        w = np.concatenate(ws)
        v = np.concatenate(vs)
        q_w = np.array([empirical_quantile(col[np.isfinite(col)], level) for col in w.T])
        q_v = np.array([empirical_quantile(col[np.isfinite(col)], level) for col in v.T])
        # guard against a zero quantile
        self.q_w = np.maximum(q_w, 1e-12)
        self.q_v = np.maximum(q_v, 1e-12)
        return self.q_w, self.q_v
