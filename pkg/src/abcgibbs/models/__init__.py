"""Benchmark models and a name registry for the experiment harness."""

from .gk import DoublyGKModel, SimpleGKModel, gk_inverse_cdf, gk_octile_distance, gk_sample
from .heat import HeatModel, cyclic_tridiagonal_solve, fem_matrices, heat_fem_step, heat_trajectories
from .ma2 import MA2HierModel, ma2_dirichlet_reparam, ma2_hyper_summaries, ma2_inverse_reparam, ma2_simulate
from .mixture import MixtureModel, mixture_prior_sample, mixture_simulate
from .normal import NormalNormalModel, exact_conditional_mu

MODELS = {
    "normal-normal": NormalNormalModel,
    "gk-simple": SimpleGKModel,
    "gk-double": DoublyGKModel,
    "ma2": MA2HierModel,
    "heat": HeatModel,
    "mixture": MixtureModel,
}


def build_model(name: str, params: dict | None = None):
    """Instantiate a registered model by name."""
    try:
        cls = MODELS[name]
    except KeyError:
        raise KeyError(f"unknown model {name!r}; choose from {sorted(MODELS)}") from None
    params = dict(params or {})
    for key in ("alpha_range",):
        if key in params:
            params[key] = tuple(params[key])
    return cls(**params)


__all__ = [
    "MODELS",
    "build_model",
    "DoublyGKModel",
    "HeatModel",
    "MA2HierModel",
    "MixtureModel",
    "NormalNormalModel",
    "SimpleGKModel",
    "cyclic_tridiagonal_solve",
    "exact_conditional_mu",
    "fem_matrices",
    "gk_inverse_cdf",
    "gk_octile_distance",
    "gk_sample",
    "heat_fem_step",
    "heat_trajectories",
    "ma2_dirichlet_reparam",
    "ma2_hyper_summaries",
    "ma2_inverse_reparam",
    "ma2_simulate",
    "mixture_prior_sample",
    "mixture_simulate",
]
