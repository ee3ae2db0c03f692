import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats as sps

from abcgibbs import BestOfN, BudgetCounter, Fixed, Model, RngStream, budget_gibbs, budget_vanilla
from abcgibbs.model import parse_rule, resolve_blocks, resolve_rules
from abcgibbs.models import MODELS, build_model
from abcgibbs.models.ma2 import MA2HierModel
from abcgibbs.models.normal import NormalNormalModel


def test_budget_vanilla_examples():
    assert budget_vanilla(10**4, 20, 10) == 2_200_000
    assert budget_vanilla(1, 1, 1) == 2
    assert budget_vanilla(17, 4, 0) == 68


def test_budget_gibbs_examples():
    assert budget_gibbs(333, 20, 30, 10) == 2_197_800
    assert abs(budget_gibbs(333, 20, 30, 10) - budget_vanilla(10**4, 20, 10)) <= 30 * 20 * 11
    assert budget_gibbs(1, 1, 1, 1) == 2


@given(st.integers(1, 1000), st.integers(1, 50), st.integers(1, 100), st.integers(0, 20))
def test_budget_gibbs_doubling_identity(n, units, n_alpha, k):
    assert budget_gibbs(2 * n, units, n_alpha, k) == budget_gibbs(n, units, 2 * n_alpha, k)


def test_rules_validation():
    with pytest.raises(ValueError):
        Fixed(-1.0)
    with pytest.raises(ValueError):
        BestOfN(0)
    with pytest.raises(ValueError):
        BestOfN(2.5)
    assert parse_rule({"eps": 0.5}) == Fixed(0.5)
    assert parse_rule({"best_of": 3}) == BestOfN(3)
    assert parse_rule(4) == BestOfN(4)
    with pytest.raises(ValueError):
        parse_rule("tight")


def test_budget_counter_monotone():
    b = BudgetCounter()
    b.book(2, 10)
    with pytest.raises(ValueError):
        b.book(-1, 0)
    assert b.merge(BudgetCounter(1, 1)).as_dict() == {"simulations": 3, "draws": 11}


def test_resolve_rules_by_family_and_default():
    m = NormalNormalModel(n=3)
    r = resolve_rules(m, {"mu": {"best_of": 5}, "default": {"eps": 0.1}})
    assert r[0] == r[2] == BestOfN(5)
    assert r[m.alpha] == Fixed(0.1)
    r = resolve_rules(m, {"mu_2": 7, "mu": 3, "alpha": 1})
    assert r[1] == BestOfN(7) and r[0] == BestOfN(3)
    with pytest.raises(KeyError):
        resolve_rules(m, {"mu": 3})
    assert resolve_blocks(m, ["mu"]) == {0, 1, 2}
    assert resolve_blocks(m, ["alpha", "mu_1"]) == {0, m.alpha}


def test_block_index_lookup():
    m = NormalNormalModel(n=3)
    assert m.block_index("alpha") == 3
    assert m.block_index(1) == 1
    with pytest.raises(KeyError):
        m.block_index("beta")
    with pytest.raises(IndexError):
        m.block_index(9)


def test_registry_builds_all_models():
    for name in MODELS:
        m = build_model(name, {})
        assert len(m.blocks) >= 2
    with pytest.raises(KeyError):
        build_model("lotka-volterra", {})


@pytest.mark.parametrize("name", sorted(MODELS))
def test_block_distance_is_pseudometric(name):
    m = build_model(name, {"n": 4} if name not in ("mixture", "heat") else {})
    rng = RngStream(1)
    theta = m.sample_prior(rng, 1)[0]
    x1, x2 = m.simulate(theta, rng), m.simulate(theta, rng)
    for j in range(len(m.blocks)):
        a, b = m.block_summary(j, x1, theta), m.block_summary(j, x2, theta)
        assert m.block_distance(j, a, a) == 0.0
        assert m.block_distance(j, a, b) == pytest.approx(m.block_distance(j, b, a))
        assert m.block_distance(j, a, b) >= 0


@pytest.mark.parametrize("name", sorted(MODELS))
def test_prior_draws_in_support_and_tables_shaped(name):
    m = build_model(name, {"n": 4} if name not in ("mixture", "heat") else {})
    rng = RngStream(2)
    th = m.sample_prior(rng, 50)
    assert th.shape == (50, m.dim)
    assert m.in_support(th).all()
    _, x = m.generate(rng)
    for group in m.scan_groups():
        c, d = m.group_table(group, th[0], x, 6, rng)
        assert c.shape[:2] == (len(group), 6)
        assert d.shape == (len(group), 6)
        assert np.all(d >= 0)
    t, d = m.prior_table(x, 8, rng)
    assert t.shape == (8, m.dim) and d.shape == (8,)


UNIT_BLOCK = {"normal-normal": "mu_2", "gk-simple": "mu_2", "gk-double": "mu_2", "ma2": "mu_2",
              "heat": "theta_3", "mixture": "theta1"}


@pytest.mark.parametrize("name", sorted(MODELS))
def test_vectorized_table_matches_generic_table(name):
    """The batched unit-block table has the law of the primitive definition
    (conditional prior, full simulation, block summary, block distance)."""
    m = build_model(name, {"n": 4} if name not in ("mixture", "heat") else {})
    rng = RngStream(3)
    theta, x = m.generate(rng)
    j = m.block_index(UNIT_BLOCK[name])
    size = 1500
    c_fast, d_fast = m.block_table(j, theta, x, size, RngStream(4))
    c_slow, d_slow = Model.block_table(m, j, theta, x, size, RngStream(5))
    assert c_fast.shape == c_slow.shape
    assert sps.ks_2samp(d_fast, d_slow).pvalue > 1e-3
    assert sps.ks_2samp(c_fast[:, 0], c_slow[:, 0]).pvalue > 1e-3


def test_sim_cost_counts_variates():
    assert NormalNormalModel(n=20, K=10).sim_cost() == 220
    assert MA2HierModel(n=5, T=100).sim_cost() == 5 * (3 + 1 + 102)
    m = build_model("heat", {})
    assert m.sim_cost() == 20 * 50
