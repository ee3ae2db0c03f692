"""Component-wise ABC (ABC-Gibbs) with rejection and SMC baselines."""

from .model import BestOfN, BudgetCounter, Fixed, HierarchicalModel, Model, budget_gibbs, budget_vanilla
from .rng import RngStream
from .samplers import (
    ChainOutput,
    abc_gibbs,
    abc_reference_table,
    hierarchical_abc_gibbs,
    hierarchical_abc_gibbs_retention,
    smc_abc,
    vanilla_abc,
)

__version__ = "0.1.0"

__all__ = [
    "BestOfN",
    "BudgetCounter",
    "ChainOutput",
    "Fixed",
    "HierarchicalModel",
    "Model",
    "RngStream",
    "abc_gibbs",
    "abc_reference_table",
    "budget_gibbs",
    "budget_vanilla",
    "hierarchical_abc_gibbs",
    "hierarchical_abc_gibbs_retention",
    "smc_abc",
    "vanilla_abc",
]
