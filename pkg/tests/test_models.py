import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats as sps

from abcgibbs import RngStream, abc_reference_table
from abcgibbs.diagnostics import DensityGrid
from abcgibbs.models.gk import (
    DoublyGKModel,
    SimpleGKModel,
    gk_inverse_cdf,
    gk_octile_distance,
    gk_sample,
    octiles,
)
from abcgibbs.models.heat import (
    HeatModel,
    cyclic_tridiagonal_solve,
    fem_matrices,
    heat_fem_step,
    heat_local_summary,
    heat_trajectories,
    local_rows,
    propagate,
    propagators,
)
from abcgibbs.models.ma2 import (
    MA2HierModel,
    autocorrelation,
    dirichlet_summary,
    invgamma_summary,
    ma2_dirichlet_reparam,
    ma2_hyper_summaries,
    ma2_inverse_reparam,
    ma2_simulate,
    population_autocorrelation,
    unit_stats,
    v_distance,
    w_distance,
)
from abcgibbs.models.mixture import (
    MixtureModel,
    conditional_allowed,
    in_posterior_support,
    mixture_prior_sample,
    mixture_simulate,
)
from abcgibbs.models.normal import NormalNormalModel, conditional_mu_moments, exact_conditional_mu

# ==========================================================================
# Normal-Normal


def test_nn_zero_noise_data_equal_means():
    m = NormalNormalModel(n=4, K=6, sigma=0.0)
    theta = m.sample_prior(RngStream(0), 1)[0]
    x = m.simulate(theta, RngStream(1))
    assert np.array_equal(x, np.repeat(theta[:4, None], 6, axis=1))


def test_nn_constant_unit_summary():
    m = NormalNormalModel(n=2, K=5)
    data = np.array([[3.5] * 5, [1.0, 2.0, 3.0, 4.0, 5.0]])
    assert m.block_summary(0, data, np.zeros(3))[0] == 3.5


def test_nn_unit_mean_clt():
    m = NormalNormalModel(n=1, K=10)
    rng = RngStream(2)
    xbar = m._unit_means(np.full(10**6, 2.0), rng)
    assert abs(xbar.mean() - 2.0) < 0.003


def test_nn_conjugate_example_moments():
    mean, var = conditional_mu_moments(0.0, 2.0, 1, 1.0, 1.0)
    assert mean == pytest.approx(1.0) and var == pytest.approx(0.5)
    # quadrature of prior x likelihood
    mu = np.linspace(-10, 10, 200001)
    w = sps.norm.pdf(mu, 0, 1) * sps.norm.pdf(2.0, mu, 1)
    w /= w.sum()
    assert (w * mu).sum() == pytest.approx(1.0, abs=1e-8)
    assert (w * (mu - 1.0) ** 2).sum() == pytest.approx(0.5, abs=1e-8)


def test_nn_exact_conditional_draws_match_conjugate_law():
    rng = RngStream(3)
    x = np.array([2.0])
    draws = np.array([exact_conditional_mu(0.0, x, 1.0, 1.0, rng) for _ in range(20000)])
    assert sps.kstest(draws, sps.norm(1.0, math.sqrt(0.5)).cdf).pvalue > 1e-3


def test_nn_exact_conditional_limits():
    rng = RngStream(4)
    # no data: prior draw
    draws = np.array([exact_conditional_mu(1.5, [], 1.0, 2.0, rng) for _ in range(5000)])
    assert sps.kstest(draws, sps.norm(1.5, 2.0).cdf).pvalue > 1e-3
    # flat prior limit: mean of the data
    mean, _ = conditional_mu_moments(0.0, 3.0, 10, 1.0, 1e6)
    assert mean == pytest.approx(3.0, abs=1e-9)


def test_nn_oracle_normalized():
    m = NormalNormalModel(n=5, K=10)
    _, x = m.generate(RngStream(5))
    grids = m.posterior_grids(x)
    for g in grids.values():
        assert g.integral() == pytest.approx(1.0, abs=1e-6)


def test_nn_oracle_single_unit_symmetric():
    m = NormalNormalModel(n=1, K=10**6)
    g = m.posterior_grids(np.zeros((1, 10)))["alpha"]
    assert g.x[np.argmax(g.density)] == pytest.approx(0.0, abs=1e-2)
    assert g.mean() == pytest.approx(0.0, abs=1e-9)


def test_nn_oracle_matches_importance_sampling():
    """The quadrature marginal agrees with a joint (alpha, mu) importance
    sampler: alpha uniform on the prior range, mu_j from the unit-mean
    likelihood, weights equal to the prior density of mu given alpha."""
    m = NormalNormalModel(n=3, K=10)
    _, x = m.generate(RngStream(6))
    xbar = m.summary(x)
    rng = RngStream(7)
    num = den = 0.0
    for _ in range(10):
        a = rng.uniform(m.lo, m.hi, 10**5)
        mu = xbar + m.sigma / math.sqrt(m.K) * rng.standard_normal((10**5, 3))
        w = np.exp(-0.5 * ((mu - a[:, None]) / m.varsigma) ** 2).prod(axis=1)
        num += (w * a).sum()
        den += w.sum()
    g = m.posterior_grids(x)["alpha"]
    assert num / den == pytest.approx(g.mean(), abs=0.005)


def test_nn_mu_marginal_chi_square():
    """Alpha drawn from the quadrature marginal then mu_1 from its exact
    conditional reproduces the quadrature mu_1 marginal."""
    m = NormalNormalModel(n=4, K=10)
    _, x = m.generate(RngStream(8))
    grids = m.posterior_grids(x, units=[0])
    rng = RngStream(9)
    n = 10**5
    alpha = grids["alpha"].quantile(rng.random(n))
    mean, var = conditional_mu_moments(alpha, m.summary(x)[0], m.K, m.sigma, m.varsigma)
    mu = rng.normal(mean, math.sqrt(var))
    edges = grids["mu_1"].quantile(np.linspace(0, 1, 51))
    edges[0], edges[-1] = -np.inf, np.inf
    counts = np.histogram(mu, edges)[0]
    assert sps.chisquare(counts).pvalue > 1e-3


def test_nn_validation():
    with pytest.raises(ValueError):
        NormalNormalModel(n=0)
    with pytest.raises(ValueError):
        NormalNormalModel(varsigma=0)
    with pytest.raises(ValueError):
        NormalNormalModel(alpha_range=(1, -1))


# ==========================================================================
# G&K


def _gk_mp(x, mu, B, g, k, c):
    mpmath.mp.dps = 50
    z = mpmath.sqrt(2) * mpmath.erfinv(2 * mpmath.mpf(x) - 1)
    e = mpmath.exp(-g * z)
    return float(mu + B * (1 + c * (1 - e) / (1 + e)) * (1 + z**2) ** k * z)


def test_gk_quantile_high_precision():
    val = gk_inverse_cdf(0.975, 0.0, 1.0, 2.0, 0.5, 0.8)
    assert val == pytest.approx(_gk_mp("0.975", 0, 1, 2, mpmath.mpf("0.5"), mpmath.mpf("0.8")), abs=1e-12)


@pytest.mark.slow
def test_gk_inversion_quantile_at_975():
    x = gk_sample(RngStream(10), 10**7, 0.0, 1.0, 2.0, 0.5, 0.8)
    target = gk_inverse_cdf(0.975, 0.0, 1.0, 2.0, 0.5, 0.8)
    assert abs(np.quantile(x, 0.975) - target) < 0.01


@settings(max_examples=50)
@given(
    st.floats(-5, 5), st.floats(0.1, 5), st.floats(-5, 5), st.floats(0, 3),
    st.floats(0.001, 0.999),
)
def test_gk_formula_matches_exponential_form(mu, B, g, k, x):
    assert gk_inverse_cdf(x, mu, B, g, k) == pytest.approx(_gk_mp(x, mu, B, g, k, 0.8), rel=1e-9, abs=1e-9)


def test_gk_median_and_normal_case():
    rng = RngStream(11)
    p = rng.uniform(-5, 5, (1000, 4))
    assert np.all(gk_inverse_cdf(0.5, p[:, 0], np.abs(p[:, 1]) + 0.1, p[:, 2], p[:, 3]) == p[:, 0])
    xs = np.linspace(0.01, 0.99, 37)
    assert np.allclose(gk_inverse_cdf(xs, 1.0, 2.0, 0.0, 0.0), 1.0 + 2.0 * sps.norm.ppf(xs), atol=1e-12)


@settings(max_examples=60)
@given(st.floats(0.1, 5), st.floats(-6, 6), st.floats(0.0, 3))
def test_gk_quantile_increasing(B, g, k):
    x = np.linspace(1e-6, 1 - 1e-6, 4001)
    assert np.all(np.diff(gk_inverse_cdf(x, 0.0, B, g, k)) > 0)


@settings(max_examples=40)
@given(st.floats(0.1, 5), st.floats(-0.499, 0.0))
def test_gk_quantile_increasing_negative_k_symmetric(B, k):
    # with g = 0, d/dz (1 + z^2)^k z = (1 + z^2)^(k-1) (1 + (1 + 2k) z^2) > 0
    x = np.linspace(1e-6, 1 - 1e-6, 4001)
    assert np.all(np.diff(gk_inverse_cdf(x, 0.0, B, 0.0, k)) > 0)


def test_gk_quantile_not_monotone_for_skewed_negative_k():
    x = np.linspace(1e-6, 1 - 1e-6, 4001)
    assert np.any(np.diff(gk_inverse_cdf(x, 0.0, 1.0, 3.0, -0.3)) <= 0)


def test_gk_domain():
    for bad in (0.0, 1.0, -0.2, 1.2):
        with pytest.raises(ValueError):
            gk_inverse_cdf(bad)


def test_gk_inversion_uniform_pit():
    params = (0.5, 1.2, 1.5, 0.3, 0.8)
    x = gk_sample(RngStream(12), 10**6, *params)
    # invert F^{-1} on a fine grid to get F(x)
    grid = np.linspace(1e-7, 1 - 1e-7, 200001)
    q = gk_inverse_cdf(grid, *params)
    u = np.interp(x, q, grid)
    assert sps.kstest(u, "uniform").statistic < 0.002


def test_octile_distance_examples():
    a = np.arange(1.0, 10.0)
    assert gk_octile_distance(a, a) == 0.0
    assert gk_octile_distance(a, a + 0.7) == pytest.approx(9 * 0.7)
    assert gk_octile_distance(a, a[::-1]) == 0.0
    with pytest.raises(ValueError):
        gk_octile_distance([], a)


def test_octiles_shape():
    x = RngStream(13).normal(size=(3, 4, 100))
    assert octiles(x).shape == (3, 4, 9)


def test_gk_models_validate():
    with pytest.raises(ValueError):
        SimpleGKModel(c=1.2)
    with pytest.raises(ValueError):
        SimpleGKModel(B=0.0)
    with pytest.raises(ValueError):
        DoublyGKModel(n=0)


def test_doubly_gk_shape_block_table_moves_only_that_shape():
    m = DoublyGKModel(n=3, obs_per_unit=50)
    rng = RngStream(14)
    theta, x = m.generate(rng)
    cands, d = m.block_table(2, theta, x, 200, rng)
    assert cands.shape == (200, 1) and np.all((cands >= 0) & (cands <= 1))
    # the candidate nearest the truth should tend to score better than a far one
    near = np.abs(cands[:, 0] - theta[2]) < 0.1
    far = np.abs(cands[:, 0] - theta[2]) > 0.6
    if near.any() and far.any():
        assert d[near].mean() < d[far].mean()


# ==========================================================================
# MA(2)


def test_ma2_white_noise_acf():
    x = ma2_simulate(0.0, 0.0, 1.0, 10**5, RngStream(15))
    assert abs(autocorrelation(x, 1)) < 0.02
    assert abs(autocorrelation(x, 2)) < 0.02


def test_ma2_population_acf():
    x = ma2_simulate(0.6, 0.2, 1.0, 10**6, RngStream(16))
    r1, r2 = population_autocorrelation(0.6, 0.2)
    assert r1 == pytest.approx(0.6 * 1.2 / 1.4)
    assert abs(autocorrelation(x, 1) - r1) < 0.01
    assert abs(autocorrelation(x, 2) - r2) < 0.01


def test_ma2_acf_error_shrinks_with_length():
    r1, _ = population_autocorrelation(0.6, 0.2)
    errs = []
    for T in (10**3, 10**5):
        x = ma2_simulate(0.6, 0.2, 1.0, T, RngStream(17).child(T))
        errs.append(np.abs(autocorrelation(x.reshape(1, -1), 1) - r1).mean())
    xs = ma2_simulate(np.full(200, 0.6), 0.2, 1.0, 10**3, RngStream(18))
    small = np.abs(autocorrelation(xs, 1) - r1).mean()
    xl = ma2_simulate(np.full(200, 0.6), 0.2, 1.0, 10**5, RngStream(19))
    large = np.abs(autocorrelation(xl, 1) - r1).mean()
    assert large < small / 3


def test_ma2_constant_series_raises():
    with pytest.raises(ValueError):
        autocorrelation(np.ones(10), 1)
    assert np.isnan(autocorrelation(np.ones(10), 1, strict=False))


def test_ma2_simulate_validation():
    with pytest.raises(ValueError):
        ma2_simulate(0.1, 0.1, 1.0, 2, RngStream(0))
    with pytest.raises(ValueError):
        ma2_simulate(0.1, 0.1, -1.0, 10, RngStream(0))


def test_ma2_distances_zero_on_self():
    m = MA2HierModel(n=3, T=50)
    _, x = m.generate(RngStream(20))
    s = unit_stats(x)
    assert np.all(w_distance(s, s) == 0)
    assert np.all(v_distance(s, s) == 0)
    assert m.distance(m.summary(x), m.summary(x)) == 0.0


def test_reparam_examples():
    mu1, mu2 = ma2_dirichlet_reparam(1 / 3, 1 / 3)
    assert mu1 == pytest.approx(0.0, abs=1e-15) and mu2 == pytest.approx(1 / 3)
    b1, b2 = ma2_inverse_reparam(0.0, -1.0)
    assert b1 == 0.0 and b2 == 0.0
    with pytest.raises(ValueError):
        ma2_dirichlet_reparam(0.8, 0.5)
    with pytest.raises(ValueError):
        ma2_inverse_reparam(2.0, 0.0)


def test_reparam_round_trip():
    beta = sps.dirichlet([1, 1, 1]).rvs(1000, random_state=1)
    mu1, mu2 = ma2_dirichlet_reparam(beta[:, 0], beta[:, 1])
    b1, b2 = ma2_inverse_reparam(mu1, mu2)
    assert np.max(np.abs(b1 - beta[:, 0])) < 1e-12
    assert np.max(np.abs(b2 - beta[:, 1])) < 1e-12


@given(st.floats(-2, 2), st.floats(-1, 1))
def test_reparam_inverse_then_forward(mu1, mu2):
    b1, b2 = ma2_inverse_reparam(mu1, mu2, check=False)
    f1, f2 = ma2_dirichlet_reparam(b1, b2) if (b1 >= 0 and b2 >= 0 and b1 + b2 <= 1) else (mu1, mu2)
    assert f1 == pytest.approx(mu1, abs=1e-12) and f2 == pytest.approx(mu2, abs=1e-12)


def test_hyper_summaries_examples():
    mu = np.array([[0.0, 1 / 3]])
    assert np.allclose(dirichlet_summary(mu), np.log([1 / 3] * 3))
    s2 = np.array([0.5, 2.0, 3.0])
    c = 4.0
    assert invgamma_summary(s2 * c)[0] == pytest.approx(invgamma_summary(s2)[0] + 3 * math.log(c))
    rng = RngStream(21)
    beta = sps.dirichlet([2, 3, 4]).rvs(6, random_state=2)
    mus = np.stack(ma2_dirichlet_reparam(beta[:, 0], beta[:, 1]), axis=-1)
    perm = rng.permutation(6)
    a, b = ma2_hyper_summaries(mus, s2), ma2_hyper_summaries(mus[perm], s2[::-1])
    assert np.allclose(a["alpha"], b["alpha"]) and np.allclose(a["varsigma"], b["varsigma"])
    with pytest.raises(ValueError):
        dirichlet_summary(np.array([[0.0, -1.0]]))


def test_ma2_calibration_quantile():
    m = MA2HierModel(n=2, T=60)
    _, x = m.generate(RngStream(22))
    q_w, q_v = m.calibrate(x, RngStream(23), pilot_size=20000, level=0.01, chunk=5000)
    th = m.sample_prior(RngStream(24), 20000)
    mu = m.mu(th)
    sims = ma2_simulate(mu[..., 0], mu[..., 1], m.sigma2(th), m.T, RngStream(25))
    s = unit_stats(sims)
    frac_w = (w_distance(s, unit_stats(x)) <= q_w).mean(axis=0)
    frac_v = (v_distance(s, unit_stats(x)) <= q_v).mean(axis=0)
    assert np.all(np.abs(frac_w - 0.01) < 0.004)
    assert np.all(np.abs(frac_v - 0.01) < 0.004)


def test_ma2_prior_mu_inside_triangle():
    m = MA2HierModel(n=4, T=20)
    th = m.sample_prior(RngStream(26), 2000)
    mu = m.mu(th)
    b1, b2 = ma2_inverse_reparam(mu[..., 0], mu[..., 1])
    assert np.all(b1 >= -1e-12) and np.all(b2 >= -1e-12) and np.all(b1 + b2 <= 1 + 1e-12)


# ==========================================================================
# heat


def test_heat_mass_conservation():
    rng = RngStream(27)
    th = rng.uniform(0, 1, (1000, 20))
    y = rng.normal(size=(1000, 20))
    y1 = heat_fem_step(th, y, 0.1)
    assert np.max(np.abs(y1.sum(axis=1) - y.sum(axis=1))) < 1e-10


def test_heat_constant_fixed_point():
    th = RngStream(28).uniform(0, 1, 20)
    y = np.full(20, 2.5)
    assert np.allclose(heat_fem_step(th, y, 0.1), y, atol=1e-12)


def test_heat_cyclic_matches_dense():
    rng = RngStream(29)
    th = rng.uniform(0, 1, (200, 20))
    y = rng.normal(size=(200, 20))
    a = heat_fem_step(th, y, 0.1, method="cyclic")
    b = heat_fem_step(th, y, 0.1, method="dense")
    assert np.max(np.abs(a - b)) < 1e-10


def test_cyclic_solver_against_numpy():
    rng = RngStream(30)
    n = 9
    sub, sup = rng.normal(size=n), rng.normal(size=n)
    diag = 5.0 + rng.random(n)
    rhs = rng.normal(size=n)
    A = np.diag(diag) + np.diag(sub[1:], -1) + np.diag(sup[:-1], 1)
    A[0, -1] = sub[0]
    A[-1, 0] = sup[-1]
    assert np.allclose(cyclic_tridiagonal_solve(sub, diag, sup, rhs), np.linalg.solve(A, rhs), atol=1e-12)


def test_heat_printed_orientation_available():
    """``sign=-1`` solves the scheme exactly as printed."""
    rng = RngStream(31)
    th = rng.uniform(0, 1, 8)
    y = rng.normal(size=8)
    d = 0.1
    y1 = heat_fem_step(th, y, d, sign=-1.0, method="dense")
    n = 8
    for j in range(n):
        jm, jp = (j - 1) % n, (j + 1) % n
        lhs = (y1[j] - y[j]) / (3 * d) + (y1[jp] - y[jp]) / (6 * d) + (y1[jm] - y[jm]) / (6 * d)
        rhs = y1[j] * (th[jp] + th[j]) - y1[jm] * th[j] - y1[jp] * th[jp]
        assert lhs == pytest.approx(rhs, abs=1e-10)


def test_heat_default_orientation_diffuses():
    th = np.full(20, 0.5)
    y0 = np.sin(2 * np.pi * np.arange(1, 21) / 20)
    traj = heat_trajectories(th, y0, 0.1, 50)[0]
    assert traj.shape == (20, 50)
    amp = np.abs(traj).max(axis=0)
    assert np.all(np.diff(amp) <= 1e-12)


def test_heat_trajectory_matches_stepping():
    rng = RngStream(32)
    th = rng.uniform(0, 1, (3, 20))
    y0 = rng.normal(size=20)
    traj = heat_trajectories(th, y0, 0.1, 13)
    y = np.broadcast_to(y0, (3, 20))
    for t in range(13):
        y = heat_fem_step(th, y, 0.1)
        assert np.allclose(traj[:, :, t], y, atol=1e-12)


def test_heat_rank_one_propagators():
    m = HeatModel()
    rng = RngStream(33)
    state = rng.uniform(0, 1, 20)
    vals = rng.uniform(0, 1, 5)
    fast = m.block_propagators(7, state, vals)
    full = np.repeat(state[None], 5, axis=0)
    full[:, 7] = vals
    assert np.allclose(fast, propagators(full, m.delta), atol=1e-12)


def test_heat_noise_free_simulation():
    m = HeatModel(noise_sd=0.0)
    th = m.sample_prior(RngStream(34), 1)[0]
    assert np.array_equal(m.simulate(th, RngStream(35)), m.trajectory(th[None])[0])


def test_heat_local_summary_cyclic():
    data = RngStream(36).normal(size=(20, 5))
    assert np.array_equal(heat_local_summary(3, data), heat_local_summary(23, data))
    assert list(local_rows(0, 20)) == [18, 19, 0, 1]
    assert np.array_equal(heat_local_summary(0, data), data[[18, 19, 0, 1]])


def test_heat_distance_to_self_zero():
    m = HeatModel()
    _, x = m.generate(RngStream(37))
    assert m.distance(m.summary(x), m.summary(x)) == 0.0
    assert m.block_distance(4, m.block_summary(4, x, None), m.block_summary(4, x, None)) == 0.0


def test_heat_noncentral_distance_law():
    m = HeatModel(n_steps=10)
    rng = RngStream(38)
    theta, x = m.generate(rng)
    y = m.trajectory(theta[None])
    fast = m._noisy_distance(np.repeat(y, 4000, axis=0), x, rng)
    slow = np.linalg.norm(y + 0.1 * rng.standard_normal((4000, 20, 10)) - x, axis=(1, 2))
    assert sps.ks_2samp(fast, slow).pvalue > 1e-3


def test_heat_propagate_doubling():
    rng = RngStream(39)
    P = propagators(rng.uniform(0, 1, (2, 20)), 0.1)
    y0 = rng.normal(size=20)
    Y = propagate(P, y0, 7)
    ref = y0
    for t in range(7):
        ref = P @ ref if ref.ndim == 1 else np.einsum("bij,bj->bi", P, ref)
        assert np.allclose(Y[..., t], ref, atol=1e-12)


def test_fem_matrices_validation():
    with pytest.raises(ValueError):
        fem_matrices(np.ones(2))
    with pytest.raises(ValueError):
        HeatModel(delta=0)


# ==========================================================================
# mixture


def test_mixture_support_of_observation():
    rng = RngStream(40)
    th = mixture_prior_sample(rng, 5000)
    x = mixture_simulate(th[:, 0], th[:, 1], rng)
    assert np.all(x >= th.min(axis=1)) and np.all(x <= th.max(axis=1) + 1)


def test_mixture_prior_acceptance_rate():
    rng = RngStream(41)
    p = rng.uniform(0, 10, (10**6, 2))
    rate = MixtureModel().in_support(p).mean()
    assert rate == pytest.approx(0.64, abs=0.003)
    th = mixture_prior_sample(rng, 10000)
    assert np.all(np.abs(th[:, 0] - th[:, 1]) > 2)


def test_mixture_conditional_prior_uniform_off_band():
    draws = conditional_allowed(3.0, RngStream(42), 50000)
    assert not np.any((draws > 1.0) & (draws < 5.0))
    # remaining set [0,1] u [5,10] has length 6
    assert (draws <= 1.0).mean() == pytest.approx(1 / 6, abs=0.01)


def test_mixture_posterior_support():
    inside = np.array([[4.5, 1.0], [1.0, 4.2], [4.0, 9.0]])
    outside = np.array([[4.5, 5.5], [1.0, 2.0], [6.0, 9.0]])
    assert in_posterior_support(inside, 5.0).all()
    assert not in_posterior_support(outside, 5.0).any()


def test_mixture_abc_lands_in_posterior_support():
    m = MixtureModel()
    out = abc_reference_table(m, 5.0, 200000, 500, RngStream(43))
    slack = out.meta["tolerance"]
    th = out.samples
    near = np.zeros(len(th), bool)
    for dx in (-slack, 0.0, slack):
        near |= in_posterior_support(th, 5.0 + dx)
    assert near.all()


def test_mixture_log_prior():
    m = MixtureModel()
    assert m.log_prior(np.array([[1.0, 5.0]]))[0] == 0.0
    assert m.log_prior(np.array([[1.0, 2.0]]))[0] == -np.inf


def test_density_grid_helpers():
    x = np.linspace(-5, 5, 2001)
    g = DensityGrid(x, sps.norm.pdf(x))
    assert g.mean() == pytest.approx(0.0, abs=1e-9)
    assert g.sd() == pytest.approx(1.0, abs=1e-3)
    assert g.quantile(0.975) == pytest.approx(1.96, abs=1e-3)
