"""The contract every benchmark model implements.

A model splits its parameter vector into named blocks. ABC-Gibbs updates
one block at a time, drawing candidates from the block's conditional prior,
simulating pseudo-data, and scoring them with a block-specific summary and
distance. Samplers never touch model internals beyond this interface.

The vectorized hooks (:meth:`Model.block_table`, :meth:`Model.group_table`,
:meth:`Model.prior_table`) have generic defaults built from the primitive
methods; concrete models override them with batched numpy code.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Mapping, Sequence, Union

import numpy as np

from .rng import RngStream

Dataset = Any


# --------------------------------------------------------------------------
# tolerance rules


@dataclass(frozen=True)
class Fixed:
    """Accept the first simulation with distance strictly below ``eps``."""

    eps: float

    def __post_init__(self):
        if not self.eps >= 0:
            raise ValueError("Fixed tolerance must be >= 0")


@dataclass(frozen=True)
class BestOfN:
    """Simulate a table of ``n`` candidates and keep the closest one."""

    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError("BestOfN needs a positive integer table size")


ToleranceRule = Union[Fixed, BestOfN]


def parse_rule(value) -> ToleranceRule:
    """Build a rule from ``{"eps": x}``, ``{"best_of": n}`` or an existing rule."""
    if isinstance(value, (Fixed, BestOfN)):
        return value
    if isinstance(value, Mapping):
        if "eps" in value:
            return Fixed(float(value["eps"]))
        if "best_of" in value:
            return BestOfN(int(value["best_of"]))
    if isinstance(value, int) and not isinstance(value, bool):
        return BestOfN(value)
    raise ValueError(f"cannot interpret tolerance rule {value!r}")


# --------------------------------------------------------------------------
# budget


@dataclass
class BudgetCounter:
    """Running totals of simulator calls and elementary random variates."""

    simulations: int = 0
    draws: int = 0

    def book(self, simulations: int, draws: int) -> None:
        if simulations < 0 or draws < 0:
            raise ValueError("budget can only grow")
        self.simulations += int(simulations)
        self.draws += int(draws)

    def merge(self, other: BudgetCounter) -> BudgetCounter:
        return BudgetCounter(self.simulations + other.simulations, self.draws + other.draws)

    def as_dict(self) -> dict:
        return {"simulations": self.simulations, "draws": self.draws}


def budget_vanilla(n_v: int, n: int, k: int) -> int:
    """Normal variates used by ``n_v`` prior-predictive draws of the
    Normal-Normal hierarchy (``n`` units, ``k`` observations per unit)."""
    return n_v * n * (1 + k)


def budget_gibbs(n_iter: int, n: int, n_alpha: int, k: int) -> int:
    """Normal variates used by ``n_iter`` hierarchical ABC-Gibbs sweeps with
    equal table sizes ``n_alpha`` at both levels."""
    return n_iter * n * n_alpha * (1 + k)


# --------------------------------------------------------------------------
# blocks and models


@dataclass(frozen=True)
class Block:
    name: str
    start: int
    size: int = 1

    @property
    def slice(self) -> slice:
        return slice(self.start, self.start + self.size)


def make_blocks(spec: Sequence[tuple[str, int]]) -> tuple[Block, ...]:
    out, start = [], 0
    for name, size in spec:
        out.append(Block(name, start, size))
        start += size
    return tuple(out)


def nan_to_inf(d):
    d = np.asarray(d, dtype=float)
    return np.where(np.isnan(d), np.inf, d)


class Model(ABC):
    """Base class for a blocked, simulable model.

    Subclasses set ``blocks`` (in systematic-scan order) and may set
    ``groups``: tuples of block indices whose members are conditionally
    independent given all other blocks, so they can be updated in one
    vectorized call. By default every block is its own group.
    """

    name: str = "model"
    blocks: tuple[Block, ...] = ()
    groups: tuple[tuple[int, ...], ...] | None = None

    # -- layout -------------------------------------------------------------

    @property
    def dim(self) -> int:
        return sum(b.size for b in self.blocks)

    @property
    def block_names(self) -> list[str]:
        return [b.name for b in self.blocks]

    def block_index(self, name_or_index) -> int:
        if isinstance(name_or_index, (int, np.integer)):
            j = int(name_or_index)
            if not 0 <= j < len(self.blocks):
                raise IndexError(f"block index {j} out of range")
            return j
        for j, b in enumerate(self.blocks):
            if b.name == name_or_index:
                return j
        raise KeyError(f"unknown block {name_or_index!r}")

    def scan_groups(self) -> tuple[tuple[int, ...], ...]:
        if self.groups is None:
            return tuple((j,) for j in range(len(self.blocks)))
        return self.groups

    def get(self, state, j):
        return state[self.blocks[j].slice]

    def with_block(self, state, j, value):
        out = np.array(state, dtype=float, copy=True)
        out[self.blocks[j].slice] = value
        return out

    # -- primitives ---------------------------------------------------------

    @abstractmethod
    def sample_prior(self, rng: RngStream, size: int) -> np.ndarray:
        """Joint prior draws, shape ``(size, dim)``."""

    @abstractmethod
    def conditional_prior(self, j: int, state, rng: RngStream, size: int) -> np.ndarray:
        """Draws of block ``j`` from its prior given the other blocks,
        shape ``(size, block_size)``."""

    @abstractmethod
    def simulate(self, theta, rng: RngStream) -> Dataset:
        """One dataset from the model at parameter ``theta``."""

    @abstractmethod
    def block_summary(self, j: int, data: Dataset, state) -> np.ndarray:
        pass

    def block_distance(self, j: int, a, b) -> float:
        return float(np.linalg.norm(np.asarray(a, float) - np.asarray(b, float)))

    @abstractmethod
    def block_cost(self, j: int, state) -> int:
        """Elementary variates per row of a block-``j`` reference table."""

    @abstractmethod
    def sim_cost(self, theta=None) -> int:
        """Elementary variates per joint prior-predictive simulation."""

    @abstractmethod
    def summary(self, data: Dataset) -> np.ndarray:
        """Global statistic used by vanilla ABC and SMC-ABC."""

    def distance(self, a, b) -> float:
        return float(np.linalg.norm(np.asarray(a, float) - np.asarray(b, float)))

    def has_exact(self, j: int) -> bool:
        return False

    def exact_conditional(self, j: int, state, observed, rng: RngStream) -> np.ndarray:
        raise NotImplementedError(f"no exact conditional for block {self.blocks[j].name}")

    def log_prior(self, theta) -> np.ndarray:
        """Joint prior log density (up to a constant) per row of ``theta``.

        Optional; needed only by the Metropolis-Hastings move of SMC-ABC.
        """
        raise NotImplementedError(f"{type(self).__name__} has no prior density")

    def in_support(self, theta) -> np.ndarray:
        """Boolean mask over rows of ``theta`` with positive prior density."""
        theta = np.atleast_2d(theta)
        return np.ones(theta.shape[0], dtype=bool)

    # -- vectorized hooks ---------------------------------------------------

    def block_table(self, j: int, state, observed, size: int, rng: RngStream):
        """Reference table for block ``j``: ``(candidates, distances)``.

        Candidates have shape ``(size, block_size)``; distances ``(size,)``.
        """
        cands = self.conditional_prior(j, state, rng, size)
        target = self.block_summary(j, observed, state)
        dists = np.empty(size)
        for r in range(size):
            st = self.with_block(state, j, cands[r])
            x = self.simulate(st, rng)
            dists[r] = self.block_distance(j, self.block_summary(j, x, st), target)
        return cands, nan_to_inf(dists)

    def group_table(self, group: Sequence[int], state, observed, size: int, rng: RngStream):
        """Reference tables for a group of conditionally independent blocks.

        Returns candidates ``(len(group), size, block_size)`` and distances
        ``(len(group), size)``.
        """
        tables = [self.block_table(j, state, observed, size, rng) for j in group]
        return np.stack([t[0] for t in tables]), np.stack([t[1] for t in tables])

    def simulate_distances(self, thetas, observed, rng: RngStream) -> np.ndarray:
        """Global-summary distance to ``observed`` of one simulation per row."""
        thetas = np.atleast_2d(thetas)
        target = self.summary(observed)
        out = np.empty(thetas.shape[0])
        for r, th in enumerate(thetas):
            out[r] = self.distance(self.summary(self.simulate(th, rng)), target)
        return nan_to_inf(out)

    def prior_table(self, observed, size: int, rng: RngStream):
        """Joint prior-predictive reference table ``(thetas, distances)``."""
        thetas = self.sample_prior(rng, size)
        return thetas, self.simulate_distances(thetas, observed, rng)

    def generate(self, rng: RngStream, theta=None):
        """Synthetic truth and data: ``(theta, observed)``."""
        if theta is None:
            theta = self.sample_prior(rng, 1)[0]
        theta = np.asarray(theta, dtype=float)
        return theta, self.simulate(theta, rng)

    def iteration_cost(self, rules: Mapping[int, ToleranceRule], state=None) -> int:
        """Variates used by one ABC-Gibbs sweep under best-of-N rules."""
        total = 0
        for j, rule in rules.items():
            if isinstance(rule, BestOfN):
                total += rule.n * self.block_cost(j, state)
        return total


class HierarchicalModel(Model):
    """A model with hyper-level blocks governing groups of unit blocks.

    ``groups`` must list each unit group and each hyper block in the
    update order (unit groups before the hyper block they inform).
    """

    hyper_blocks: tuple[int, ...] = ()
    unit_groups: tuple[tuple[int, ...], ...] = ()


def _family(name: str) -> str:
    head, _, tail = name.rpartition("_")
    return head if head and tail.isdigit() else name


def resolve_rules(model: Model, rules) -> dict[int, ToleranceRule]:
    """Map every block index to its tolerance rule.

    ``rules`` is a single rule for all blocks, or a mapping keyed by block
    name, by family name (``"mu"`` covers ``mu_1 ... mu_n``) or ``"default"``.
    """
    if isinstance(rules, (Fixed, BestOfN)):
        return {j: rules for j in range(len(model.blocks))}
    out = {}
    for j, b in enumerate(model.blocks):
        for key in (b.name, _family(b.name), "default"):
            if key in rules:
                out[j] = parse_rule(rules[key])
                break
        else:
            raise KeyError(f"no tolerance rule for block {b.name!r}")
    return out


def resolve_blocks(model: Model, names) -> set[int]:
    """Block indices selected by names or family names."""
    if not names:
        return set()
    names = set(names)
    return {
        j for j, b in enumerate(model.blocks) if b.name in names or _family(b.name) in names
    }
