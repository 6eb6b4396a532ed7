"""Estimator-style wrappers so searches and selectors compose with scikit-learn tooling.

``fit`` takes a :class:`~microgrid_sizer.simulate.Scenario` (searches) or a Pareto
front (selectors); hyperparameters live in ``__init__`` and are exposed through
``get_params``/``set_params``. Fitted attributes carry a trailing underscore.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from . import candidates
from .optimize import (DEFAULT_OBJECTIVES, Evaluator, ParameterSpace, SearchConfig,
                       exhaustive_run, nsga2_run)
from .simulate import Scenario
from .validation import check_compositions, check_front


class _SearchBase(BaseEstimator):

    def _check_scenario(self, X):
        if not isinstance(X, Scenario):
            raise TypeError(f"fit expects a Scenario, got {type(X).__name__}")
        return X

    def _space(self):
        return self.space if self.space is not None else ParameterSpace()

    def _store(self, result, evaluator):
        self.result_ = result
        self.front_ = result.front
        self.points_ = result.points
        self.log_ = result.log
        self.n_simulations_ = result.n_simulations
        self.evaluator_ = evaluator
        return self

    def predict(self, X):
        """Objective vectors for compositions (rows of ``X``), simulating cache misses."""
        check_is_fitted(self, "front_")
        comps = check_compositions(X)
        results = self.evaluator_.evaluate_many(comps)
        return np.array([p.objectives for p, _ in results], dtype=np.float64)


class ExhaustiveSearch(_SearchBase):
    def __init__(self, space=None, objectives=DEFAULT_OBJECTIVES, n_jobs=1):
        self.space = space
        self.objectives = objectives
        self.n_jobs = n_jobs

    def fit(self, X, y=None):
        scenario = self._check_scenario(X)
        with Evaluator(scenario, tuple(self.objectives), self.n_jobs) as evaluator:
            result = exhaustive_run(scenario, self._space(), evaluator=evaluator)
        return self._store(result, evaluator)


class NSGA2Search(_SearchBase):
    """Archive-based NSGA-II over wind/solar/battery unit counts."""

    def __init__(self, population_size=50, max_evaluations=350, crossover_prob=0.9,
                 mutation_prob=1.0 / 3.0, mutation="creep", objectives=DEFAULT_OBJECTIVES,
                 space=None, random_state=0, n_jobs=1):
        self.population_size = population_size
        self.max_evaluations = max_evaluations
        self.crossover_prob = crossover_prob
        self.mutation_prob = mutation_prob
        self.mutation = mutation
        self.objectives = objectives
        self.space = space
        self.random_state = random_state
        self.n_jobs = n_jobs

    def search_config(self) -> SearchConfig:
        return SearchConfig(self.population_size, self.max_evaluations, self.crossover_prob,
                            self.mutation_prob, int(self.random_state), tuple(self.objectives),
                            self.mutation)

    def fit(self, X, y=None):
        scenario = self._check_scenario(X)
        config = self.search_config()
        with Evaluator(scenario, config.objectives, self.n_jobs) as evaluator:
            result = nsga2_run(scenario, self._space(), config, evaluator=evaluator)
        return self._store(result, evaluator)


class _SelectorBase(TransformerMixin, BaseEstimator):

    def fit(self, X, y=None):
        self.candidates_ = self._select(check_front(X))
        return self

    def transform(self, X):
        """Shortlist of ``X``; selectors are stateless, so this reselects on ``X``."""
        check_is_fitted(self, "candidates_")
        return self._select(check_front(X))


class ThresholdSelector(_SelectorBase):
    def __init__(self, budgets=candidates.DEFAULT_BUDGETS):
        self.budgets = budgets

    def _select(self, points):
        return candidates.threshold_select(points, list(self.budgets))


class GreedyDiversitySelector(_SelectorBase):
    def __init__(self, k=5):
        self.k = k

    def _select(self, points):
        return candidates.greedy_diversity(points, self.k)


class KMeansSelector(_SelectorBase):
    def __init__(self, k=5, random_state=0):
        self.k = k
        self.random_state = random_state

    def _select(self, points):
        return candidates.kmeans_select(points, self.k, seed=int(self.random_state))
