from .chain import BudgetExceeded, ChainOutput
from .gibbs import (
    abc_conditional_step,
    abc_gibbs,
    hierarchical_abc_gibbs,
    hierarchical_abc_gibbs_retention,
)
from .smc import ParticleSystem, SMCResult, next_epsilon, smc_abc
from .vanilla import abc_reference_table, vanilla_abc

__all__ = [
    "BudgetExceeded",
    "ChainOutput",
    "ParticleSystem",
    "SMCResult",
    "abc_conditional_step",
    "abc_gibbs",
    "abc_reference_table",
    "hierarchical_abc_gibbs",
    "hierarchical_abc_gibbs_retention",
    "next_epsilon",
    "smc_abc",
    "vanilla_abc",
]
