"""scikit-learn style wrappers around the torus dynamics.

Each row of ``X`` is one configuration: ``n**d`` columns of 0/1 states in
vertex-index order.  Nothing is learned in ``fit``; it validates the
parameters and the width of ``X`` so the objects drop into pipelines and
``get_params``/``set_params``/``clone`` behave as usual.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from . import dynamics
from .dynamics import MAJORITY, Rule
from .torus import TorusShape


def _rule(model: str, r: int | None) -> Rule:
    return Rule.majority() if model == MAJORITY else Rule(model, r)


class _TorusMixin:
    def _setup(self, X):
        shape = TorusShape(self.n, self.d)
        rule = _rule(self.model, self.r)
        rule.validate(shape)
        X = self._check_X(X, shape)
        self.shape_ = shape
        self.rule_ = rule
        self.n_features_in_ = shape.vertex_count
        return X

    def _check_X(self, X, shape: TorusShape) -> np.ndarray:
        X = check_array(X, dtype=None)
        if X.shape[1] != shape.vertex_count:
            raise ValueError(f"X has {X.shape[1]} columns, T_{shape.n}^{shape.d} has "
                             f"{shape.vertex_count} vertices")
        if not np.isin(X, (0, 1)).all():
            raise ValueError("X must contain only 0/1 states")
        return X.astype(bool)


class ThresholdStep(_TorusMixin, TransformerMixin, BaseEstimator):
    """Advance every configuration by ``rounds`` synchronous rounds."""

    def __init__(self, n=5, d=2, model="rbp", r=2, rounds=1):
        self.n = n
        self.d = d
        self.model = model
        self.r = r
        self.rounds = rounds

    def fit(self, X, y=None):
        self._setup(X)
        if self.rounds < 0:
            raise ValueError(f"rounds must be non-negative, got {self.rounds}")
        return self

    def transform(self, X):
        check_is_fitted(self, "shape_")
        state = self._check_X(X, self.shape_)
        for _ in range(self.rounds):
            state = dynamics.step_bits(self.shape_, state, self.rule_)
        return state.astype(np.int8)


class DynamoClassifier(_TorusMixin, ClassifierMixin, BaseEstimator):
    """Label each configuration 1 if it is a (monotone) dynamo, else 0.

    Rows the round budget cannot decide get -1 from :meth:`predict`.
    """

    def __init__(self, n=5, d=2, model="rbp", r=2, monotone=False, max_rounds=None):
        self.n = n
        self.d = d
        self.model = model
        self.r = r
        self.monotone = monotone
        self.max_rounds = max_rounds

    def fit(self, X, y=None):
        self._setup(X)
        self.classes_ = np.array([0, 1])
        return self

    def predict(self, X):
        check_is_fitted(self, "shape_")
        state = self._check_X(X, self.shape_)
        out = dynamics.simulate_batch(self.shape_, state, self.rule_, self.max_rounds)
        hit = out.dynamo & out.monotone if self.monotone else out.dynamo
        labels = hit.astype(np.int8)
        labels[~out.decided] = -1
        return labels
