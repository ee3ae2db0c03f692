"""Heat equation on a circle with piecewise-constant conductivity.

The domain [0, 1) is split into ``n`` cells with conductivity ``theta_j``
and discretized by linear finite elements on the nodes j/n. With the mass
matrix M (1/3 on the diagonal, 1/6 on the cyclic off-diagonals) and the
stiffness matrix S (diagonal theta_j + theta_{j+1}, off-diagonals
-theta_j and -theta_{j+1}), one implicit Euler step of length Delta solves

    (M / Delta + sign * S) y_{t+1} = (M / Delta) y_t.

``sign = +1`` is the diffusive scheme and the default. ``sign = -1`` moves
the stiffness term exactly as in the scheme's printed right-hand side;
that variant amplifies high-frequency modes and is kept for inspection.
Indices are cyclic (mod n) throughout and arrays are 0-based, so node j
sits between cells j and j+1.
"""

from __future__ import annotations

import numpy as np

from ..model import Model, make_blocks
from ..rng import RngStream

CHUNK = 2048


def cyclic_bands(theta, delta: float, sign: float = 1.0):
    """Sub-, main- and super-diagonals of ``M/delta + sign*S``.

    ``sub[j]`` multiplies ``y[j-1]`` and ``sup[j]`` multiplies ``y[j+1]``
    (both cyclic). ``theta`` may be batched along leading axes.
    """
    th = np.asarray(theta, dtype=float)
    th_next = np.roll(th, -1, axis=-1)
    diag = 1.0 / (3.0 * delta) + sign * (th + th_next)
    sub = 1.0 / (6.0 * delta) - sign * th
    sup = 1.0 / (6.0 * delta) - sign * th_next
    return sub, diag, sup


def fem_matrices(theta, delta: float = 0.1, sign: float = 1.0):
    """Dense ``(A, B)`` with ``A y_{t+1} = B y_t``; ``B = M / delta``."""
    th = np.asarray(theta, dtype=float)
    n = th.shape[-1]
    if n < 3:
        raise ValueError("need at least 3 cells")
    sub, diag, sup = cyclic_bands(th, delta, sign)
    idx = np.arange(n)
    A = np.zeros((*th.shape[:-1], n, n))
    A[..., idx, idx] = diag
    A[..., idx, (idx - 1) % n] = sub
    A[..., idx, (idx + 1) % n] = sup
    B = np.zeros((n, n))
    B[idx, idx] = 1.0 / (3.0 * delta)
    B[idx, (idx - 1) % n] = 1.0 / (6.0 * delta)
    B[idx, (idx + 1) % n] = 1.0 / (6.0 * delta)
    return A, B


def mass_apply(y, delta: float):
    y = np.asarray(y, dtype=float)
    return (2.0 * y + np.roll(y, 1, axis=-1) + np.roll(y, -1, axis=-1)) / (6.0 * delta)


def _thomas(a, b, c, d):
    """Tridiagonal solve along the last axis (no corner terms).

    The bands are factored once at their own shape and applied to ``d``,
    which may carry extra right-hand-side axes that broadcast against them.
    """
    # sweep over a leading axis so each step touches contiguous memory
    bshape = np.broadcast_shapes(a.shape, b.shape, c.shape)
    a, b, c = (np.ascontiguousarray(np.moveaxis(np.broadcast_to(v, bshape), -1, 0)) for v in (a, b, c))
    d = np.moveaxis(np.asarray(d, dtype=float), -1, 0)
    n = b.shape[0]
    cp = np.empty_like(b)
    inv = np.empty_like(b)
    inv[0] = 1.0 / b[0]
    cp[0] = c[0] * inv[0]
    for i in range(1, n):
        inv[i] = 1.0 / (b[i] - a[i] * cp[i - 1])
        cp[i] = c[i] * inv[i]
    dp = np.empty(np.broadcast_shapes(d.shape, b.shape))
    dp[0] = d[0] * inv[0]
    for i in range(1, n):
        dp[i] = (d[i] - a[i] * dp[i - 1]) * inv[i]
    for i in range(n - 2, -1, -1):
        dp[i] -= cp[i] * dp[i + 1]
    return np.moveaxis(dp, 0, -1)


def cyclic_tridiagonal_solve(sub, diag, sup, rhs):
    """Solve a cyclic tridiagonal system by a rank-one corrected Thomas sweep.

    ``sub[0]`` is the corner coefficient of ``x[n-1]`` in row 0 and
    ``sup[n-1]`` that of ``x[0]`` in row n-1. All arguments may carry
    matching leading batch axes.
    """
    a = np.asarray(sub, dtype=float)
    b = np.array(diag, dtype=float, copy=True)
    c = np.asarray(sup, dtype=float)
    d = np.asarray(rhs, dtype=float)
    alpha, beta = c[..., -1], a[..., 0]  # row n-1 -> x0 corner, row 0 -> x_{n-1} corner
    gamma = -b[..., 0]
    b[..., 0] = b[..., 0] - gamma
    b[..., -1] = b[..., -1] - alpha * beta / gamma
    u = np.zeros_like(b)
    u[..., 0] = gamma
    u[..., -1] = alpha
    y = _thomas(a, b, c, d)
    z = _thomas(a, b, c, u)
    vy = y[..., 0] + beta / gamma * y[..., -1]
    vz = z[..., 0] + beta / gamma * z[..., -1]
    return y - (vy / (1.0 + vz))[..., None] * z


def heat_fem_step(theta, y, delta: float = 0.1, *, sign: float = 1.0, method: str = "cyclic"):
    """One implicit step ``y_t -> y_{t+1}``.

    ``method`` is ``"cyclic"`` (rank-one corrected tridiagonal sweep) or
    ``"dense"`` (LU on the assembled matrix).
    """
    th = np.asarray(theta, dtype=float)
    if th.shape[-1] < 3:
        raise ValueError("need at least 3 cells")
    rhs = mass_apply(y, delta)
    if method == "dense":
        A, _ = fem_matrices(th, delta, sign)
        out = np.linalg.solve(A, rhs[..., None])[..., 0]
    elif method == "cyclic":
        out = cyclic_tridiagonal_solve(*cyclic_bands(th, delta, sign), rhs)
    else:
        raise ValueError(f"unknown method {method!r}")
    if not np.all(np.isfinite(out)):
        raise FloatingPointError("heat solver produced non-finite values")
    return out


def propagators(theta, delta: float, sign: float = 1.0):
    """One-step propagators ``A^{-1} M / delta``, shape ``(batch, n, n)``."""
    th = np.atleast_2d(np.asarray(theta, dtype=float))
    n = th.shape[-1]
    if th.shape[0] >= 64:
        # A and M are symmetric, so row k of the propagator solves A x = M e_k / delta
        sub, diag, sup = (b[:, None, :] for b in cyclic_bands(th, delta, sign))
        rhs = mass_apply(np.eye(n), delta)
        return np.swapaxes(cyclic_tridiagonal_solve(sub, diag, sup, rhs[None]), -1, -2)
    A, B = fem_matrices(th, delta, sign)
    return np.linalg.solve(A, np.broadcast_to(B, A.shape))


def heat_trajectories(theta, y0, delta: float, n_steps: int, *, sign: float = 1.0):
    """Noise-free states ``y_1 .. y_T`` for a batch of conductivities.

    Returns an array of shape ``(batch, n, T)``. States are built by
    doubling: with the first k states known, the next k are P^k times them.
    """
    th = np.atleast_2d(np.asarray(theta, dtype=float))
    y0 = np.asarray(y0, dtype=float)
    return propagate(propagators(th, delta, sign), y0, n_steps)


def propagate(P, y0, n_steps: int):
    """States ``P y0, P^2 y0, ..., P^T y0`` as ``(batch, n, T)``."""
    with np.errstate(over="ignore", invalid="ignore"):
        Y = P @ np.broadcast_to(y0, P.shape[:-1])[..., None]
        Pk = P
        while Y.shape[-1] < n_steps:
            k = Y.shape[-1]
            Y = np.concatenate([Y, Pk @ Y[..., : n_steps - k]], axis=-1)
            if Y.shape[-1] < n_steps:
                Pk = Pk @ Pk
    return Y[..., :n_steps]


def local_rows(m: int, n: int) -> np.ndarray:
    """Rows m-2, m-1, m, m+1 (mod n) informing block m."""
    return (np.arange(m - 2, m + 2)) % n


def heat_local_summary(m: int, data) -> np.ndarray:
    data = np.asarray(data, dtype=float)
    return data[..., local_rows(m, data.shape[-2]), :]


class HeatModel(Model):
    """Noisy heat-equation observations ``x_{j,t} ~ N(y_{j,t}, noise_sd^2)``.

    Blocks ``theta_1 .. theta_n`` with independent U[0, 1] priors. Block
    ``m`` is scored on the observation rows m-2..m+1; vanilla ABC uses the
    whole data matrix.
    """

    name = "heat"

    def __init__(self, n=20, delta=0.1, n_steps=50, noise_sd=0.1, y0=None, sign=1.0):
        if n < 3:
            raise ValueError("need at least 3 cells")
        if delta <= 0:
            raise ValueError("delta must be positive")
        if noise_sd < 0:
            raise ValueError("noise_sd must be non-negative")
        self.n, self.delta, self.n_steps = int(n), float(delta), int(n_steps)
        self.noise_sd, self.sign = float(noise_sd), float(sign)
        nodes = np.arange(1, self.n + 1) / self.n
        self.y0 = np.sin(2 * np.pi * nodes) if y0 is None else np.asarray(y0, dtype=float)
        if self.y0.shape != (self.n,):
            raise ValueError("y0 must have one value per node")
        self.blocks = make_blocks([(f"theta_{j + 1}", 1) for j in range(self.n)])

    def sample_prior(self, rng, size):
        return rng.uniform(0.0, 1.0, (size, self.n))

    def conditional_prior(self, j, state, rng, size):
        return rng.uniform(0.0, 1.0, (size, 1))

    def trajectory(self, theta):
        return heat_trajectories(theta, self.y0, self.delta, self.n_steps, sign=self.sign)

    def _noisy(self, theta, rng):
        y = self.trajectory(theta)
        if self.noise_sd > 0:
            y = y + self.noise_sd * rng.standard_normal(y.shape)
        return y

    def simulate(self, theta, rng):
        return self._noisy(np.asarray(theta, dtype=float)[None], rng)[0]

    def block_summary(self, j, data, state):
        return heat_local_summary(j, data)

    def block_cost(self, j, state=None):
        return self.n * self.n_steps

    def sim_cost(self, theta=None):
        return self.n * self.n_steps

    def summary(self, data):
        return np.asarray(data, dtype=float)

    def in_support(self, theta):
        th = np.atleast_2d(theta)
        return np.all((th >= 0) & (th <= 1), axis=1)

    def block_table(self, j, state, observed, size, rng):
        cands = rng.uniform(0.0, 1.0, size)
        rows = local_rows(j, self.n)
        y = propagate(self.block_propagators(j, state, cands), self.y0, self.n_steps)[:, rows, :]
        d = self._noisy_distance(y, np.asarray(observed, dtype=float)[rows], rng)
        return cands[:, None], d

    def block_propagators(self, j, state, values):
        """Propagators for ``state`` with ``theta_j`` replaced by each of ``values``.

        Changing ``theta_j`` by ``d`` adds ``sign * d * e e^T`` to the system
        matrix, with ``e = e_{j-1} - e_j``, so every candidate follows from
        the current inverse by a Sherman-Morrison correction.
        """
        state = np.asarray(state, dtype=float)
        A, B = fem_matrices(state, self.delta, self.sign)
        Ainv = np.linalg.inv(A)
        e = np.zeros(self.n)
        e[(j - 1) % self.n] += 1.0
        e[j] -= 1.0
        g = Ainv @ e
        kappa = e @ g
        sd = self.sign * (np.asarray(values, dtype=float) - state[j])
        coef = sd / (1.0 + sd * kappa)
        return (Ainv @ B)[None] - coef[:, None, None] * np.outer(g, g @ B)[None]

    def simulate_distances(self, thetas, observed, rng):
        th = np.atleast_2d(thetas)
        obs = np.asarray(observed, dtype=float)
        out = np.empty(th.shape[0])
        for s in range(0, th.shape[0], CHUNK):
            out[s : s + CHUNK] = self._noisy_distance(self.trajectory(th[s : s + CHUNK]), obs, rng)
        return out

    def _noisy_distance(self, y, target, rng):
        """Euclidean distance from ``y + noise`` to ``target``, one per row.

        ``|y + s e - target|^2 / s^2`` is noncentral chi-square with one
        degree of freedom per entry, so it is drawn directly instead of
        through the individual noise variates.
        """
        with np.errstate(over="ignore", invalid="ignore"):
            sq = ((y - target) ** 2).sum(axis=(-1, -2))
            if self.noise_sd == 0:
                d = np.sqrt(sq)
            else:
                df = y.shape[-1] * y.shape[-2]
                ok = np.isfinite(sq)
                nonc = np.where(ok, sq, 0.0) / self.noise_sd**2
                d = self.noise_sd * np.sqrt(rng.noncentral_chisquare(df, nonc))
                d = np.where(ok, d, np.inf)
        return np.where(np.isnan(d), np.inf, d)
