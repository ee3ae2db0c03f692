"""Comparing samples with each other and with reference densities."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import BestOfN, Fixed, Model, ToleranceRule, nan_to_inf
from .rng import RngStream
from .samplers.chain import BudgetExceeded, ChainOutput


def _trapz(y, x):
    return float(np.sum(0.5 * (y[1:] + y[:-1]) * np.diff(x)))


@dataclass
class DensityGrid:
    """A density tabulated on a uniform grid, normalized by the trapezoid rule."""

    x: np.ndarray
    density: np.ndarray

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        d = np.asarray(self.density, dtype=float)
        if d.shape != self.x.shape or self.x.size < 2:
            raise ValueError("grid and density must be 1-D arrays of equal length >= 2")
        if not np.all(np.isfinite(d)) or np.any(d < 0):
            raise ValueError("density values must be finite and non-negative")
        total = _trapz(d, self.x)
        if total <= 0:
            raise ValueError("density integrates to zero")
        self.density = d / total

    @property
    def support(self) -> tuple[float, float]:
        return float(self.x[0]), float(self.x[-1])

    def integral(self) -> float:
        return _trapz(self.density, self.x)

    def cdf_values(self) -> np.ndarray:
        inc = 0.5 * (self.density[1:] + self.density[:-1]) * np.diff(self.x)
        c = np.concatenate([[0.0], np.cumsum(inc)])
        return c / c[-1]

    def cdf(self, q):
        return np.interp(q, self.x, self.cdf_values(), left=0.0, right=1.0)

    def mean(self) -> float:
        return _trapz(self.x * self.density, self.x)

    def sd(self) -> float:
        m = self.mean()
        return math.sqrt(_trapz((self.x - m) ** 2 * self.density, self.x))

    def quantile(self, p):
        c = self.cdf_values()
        return np.interp(p, c, self.x)


# --------------------------------------------------------------------------
# distances between distributions


def wasserstein1(sample_a, sample_b) -> float:
    """One-dimensional Wasserstein-1 distance.

    ``sample_b`` may be a sample or a :class:`DensityGrid`; in both cases the
    distance is the integral of the absolute CDF difference.
    """
    a = np.sort(np.asarray(sample_a, dtype=float).ravel())
    if a.size == 0:
        raise ValueError("wasserstein1 of an empty sample")
    if isinstance(sample_b, DensityGrid):
        return _w1_grid(a, sample_b)
    b = np.sort(np.asarray(sample_b, dtype=float).ravel())
    if b.size == 0:
        raise ValueError("wasserstein1 of an empty sample")
    pts = np.concatenate([a, b])
    pts.sort(kind="mergesort")
    widths = np.diff(pts)
    fa = np.searchsorted(a, pts[:-1], side="right") / a.size
    fb = np.searchsorted(b, pts[:-1], side="right") / b.size
    return float(np.sum(np.abs(fa - fb) * widths))


def _w1_grid(a, grid: DensityGrid) -> float:
    pts = np.union1d(a, grid.x)
    fn = np.searchsorted(a, pts, side="right") / a.size
    f = grid.cdf(pts)
    # the empirical CDF is constant on [pts[i], pts[i+1]); the grid CDF is ~linear
    left = np.abs(fn[:-1] - f[:-1])
    right = np.abs(fn[:-1] - f[1:])
    return float(np.sum(0.5 * (left + right) * np.diff(pts)))


def default_bins(n: int) -> int:
    return max(20, math.ceil(math.log2(max(n, 1))) + 1)


def tv_histogram(sample_a, sample_b, bins: int | None = None) -> float:
    """Total variation between two samples on a common histogram.

    Both samples are binned on ``bins`` equal-width cells spanning their
    pooled range; the result is half the L1 distance of the cell
    frequencies and lies in [0, 1].
    """
    a = np.asarray(sample_a, dtype=float).ravel()
    b = np.asarray(sample_b, dtype=float).ravel()
    if a.size == 0 or b.size == 0:
        raise ValueError("tv_histogram of an empty sample")
    if bins is None:
        bins = default_bins(max(a.size, b.size))
    if bins < 2:
        raise ValueError("need at least 2 bins")
    lo = min(a.min(), b.min())
    hi = max(a.max(), b.max())
    if hi <= lo:
        return 0.0
    edges = np.linspace(lo, hi, bins + 1)
    pa = np.histogram(a, edges)[0] / a.size
    pb = np.histogram(b, edges)[0] / b.size
    return float(0.5 * np.abs(pa - pb).sum())


# --------------------------------------------------------------------------
# assumption probe


@dataclass
class ProbeResult:
    kappa: float
    pairwise: np.ndarray
    grid: np.ndarray
    margin: float
    draws_per_cell: int
    threshold: float = 0.5

    @property
    def passed(self) -> bool:
        return self.kappa < self.threshold

    def as_dict(self) -> dict:
        return {
            "kappa": self.kappa,
            "margin": self.margin,
            "passed": self.passed,
            "threshold": self.threshold,
            "draws_per_cell": self.draws_per_cell,
            "grid": self.grid.tolist(),
        }


def conditional_draws(
    model: Model,
    observed,
    j: int,
    state,
    rule: ToleranceRule,
    size: int,
    rng: RngStream,
    *,
    max_attempts: int = 10**7,
) -> np.ndarray:
    """``size`` independent approximate conditional draws of block ``j``."""
    if isinstance(rule, BestOfN):
        cands, d = model.block_table(j, state, observed, size * rule.n, rng)
        d = d.reshape(size, rule.n)
        best = np.argmin(d, axis=1)
        return cands.reshape(size, rule.n, -1)[np.arange(size), best]
    if not isinstance(rule, Fixed):
        raise TypeError(f"unknown tolerance rule {rule!r}")
    out, spent = [], 0
    chunk = max(1024, 4 * size)
    while sum(len(o) for o in out) < size:
        cands, d = model.block_table(j, state, observed, chunk, rng)
        ok = np.ones(chunk, bool) if np.isinf(rule.eps) else nan_to_inf(d) < rule.eps
        out.append(cands[ok])
        spent += chunk
        if spent > max_attempts:
            raise BudgetExceeded("contraction probe: acceptance too rare")
    return np.concatenate(out)[:size]


def contraction_probe(
    model: Model,
    observed,
    block,
    conditioning,
    grid,
    rule: ToleranceRule,
    draws_per_cell: int,
    rng: RngStream,
    *,
    base_state=None,
    bins: int | None = None,
) -> ProbeResult:
    """Estimate the largest TV distance between ABC conditionals of ``block``
    as the ``conditioning`` block ranges over ``grid``.

    For each pair of grid values the conditioning block is set to each value
    (all other blocks from ``base_state``), ``draws_per_cell`` approximate
    conditional draws of ``block`` are taken, and their histogram TV is
    computed. Multi-dimensional blocks use the largest per-coordinate TV.
    The reported margin is the largest TV between two halves of the same
    cell, i.e. the Monte Carlo floor of the estimate. A supremum over a
    finite grid can only under-estimate the true supremum.
    """
    j = model.block_index(block)
    c = model.block_index(conditioning)
    grid = np.asarray(grid, dtype=float)
    if grid.ndim == 1:
        grid = grid[:, None]
    if base_state is None:
        base_state = model.sample_prior(rng, 1)[0]
    cells = []
    for g in grid:
        st = model.with_block(base_state, c, g)
        cells.append(np.atleast_2d(conditional_draws(model, observed, j, st, rule, draws_per_cell, rng)))
    if bins is None:
        bins = default_bins(draws_per_cell)

    def tv(x, y, b):
        return max(tv_histogram(x[:, k], y[:, k], b) for k in range(x.shape[1]))

    k = len(cells)
    pair = np.zeros((k, k))
    for a in range(k):
        for b in range(a + 1, k):
            pair[a, b] = pair[b, a] = tv(cells[a], cells[b], bins)
    half = draws_per_cell // 2
    margin = max(tv(cell[:half], cell[half:], bins) for cell in cells) if half else float("nan")
    return ProbeResult(float(pair.max()), pair, grid.squeeze(-1) if grid.shape[1] == 1 else grid,
                       float(margin), draws_per_cell)


# --------------------------------------------------------------------------
# posterior predictive


def posterior_predictive_distance(
    model: Model,
    observed,
    chain: ChainOutput | np.ndarray,
    rng: RngStream,
    *,
    block=None,
    reps: int = 1,
) -> tuple[float, float]:
    """Mean and standard error of the distance between fresh simulations at
    posterior draws and the observed data.

    ``block=None`` uses the model's global summary distance; otherwise the
    named block's summary and distance are used.
    """
    samples = chain.samples if isinstance(chain, ChainOutput) else np.atleast_2d(chain)
    if samples.shape[0] == 0:
        raise ValueError("empty chain")
    thetas = np.repeat(samples, reps, axis=0)
    if block is None:
        d = model.simulate_distances(thetas, observed, rng)
    else:
        j = model.block_index(block)
        d = np.empty(len(thetas))
        for r, th in enumerate(thetas):
            x = model.simulate(th, rng)
            d[r] = model.block_distance(
                j, model.block_summary(j, x, th), model.block_summary(j, observed, th)
            )
    d = np.asarray(d, dtype=float)
    se = float(d.std(ddof=1) / math.sqrt(d.size)) if d.size > 1 else 0.0
    return float(d.mean()), se
