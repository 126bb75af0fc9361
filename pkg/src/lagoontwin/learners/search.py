"""Hyperparameter search over the boosting space.

Default strategy is seeded random search: reproducible at desk scale, and
the argmin-over-trials contract is identical to fancier surrogates. A trial
whose objective raises is marked failed and the search continues.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from lagoontwin.errors import UsageError
from lagoontwin.learners.gbrt import HyperParams


@dataclass(frozen=True)
class SearchSpace:
    n_trees: tuple[int, int] = (10, 500)
    learning_rate: tuple[float, float] = (0.01, 0.3)  # sampled on log scale
    max_depth: tuple[int, int] = (2, 8)
    min_samples_leaf: tuple[int, int] = (1, 50)

    def sample(self, rng: np.random.Generator, seed: int) -> HyperParams:
        log_lo, log_hi = math.log(self.learning_rate[0]), math.log(self.learning_rate[1])
        return HyperParams(
            n_trees=int(rng.integers(self.n_trees[0], self.n_trees[1] + 1)),
            learning_rate=float(math.exp(rng.uniform(log_lo, log_hi))),
            max_depth=int(rng.integers(self.max_depth[0], self.max_depth[1] + 1)),
            min_samples_leaf=int(
                rng.integers(self.min_samples_leaf[0], self.min_samples_leaf[1] + 1)
            ),
            seed=seed,
        )


@dataclass(frozen=True)
class Trial:
    params: HyperParams
    score: float | None  # validation MAE; None when the trial failed
    error: str | None = None


def search(
    space: SearchSpace,
    objective: Callable[[HyperParams], float],
    budget: int,
    seed: int,
) -> tuple[HyperParams, list[Trial]]:
    """Seeded random search; returns (argmin params, full trial log)."""
    if budget < 1:
        raise UsageError("budget must be >= 1")
    rng = np.random.default_rng(seed)
    trials: list[Trial] = []
    for _ in range(budget):
        params = space.sample(rng, seed)
        try:
            score = float(objective(params))
        except Exception as exc:
            trials.append(Trial(params=params, score=None, error=str(exc)))
            continue
        trials.append(Trial(params=params, score=score))
    successes = [t for t in trials if t.score is not None]
    if not successes:
        raise UsageError("every search trial failed")
    best = min(successes, key=lambda t: t.score)
    return best.params, trials
