"""scikit-learn style wrappers around the functional API.

Hyperparameters are constructor arguments (so ``get_params``/``set_params``
and ``clone`` work); fitted state ends in an underscore.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .classify import DEFAULT_TOL, classify
from .simulate import evolve


class InstabilityClassifier(BaseEstimator):
    """Classify a batch of models.

    >>> from trspec import ModelSpec
    >>> spec = ModelSpec.create([0.1, -0.2, 0.2], [[-8, 2, -9], [-5, -3, -10], [9, -9, -1]])
    >>> InstabilityClassifier().fit([spec]).predict([spec])[0]
    'TuringPattern'
    """

    def __init__(self, K_max=None, tol=DEFAULT_TOL):
        self.K_max = K_max
        self.tol = tol

    def fit(self, X, y=None):
        # nothing to learn; the verdict is a property of each model
        self.n_models_seen_ = len(X)
        return self

    def reports(self, X):
        return [classify(spec, K_max=self.K_max, tol=self.tol) for spec in X]

    def predict(self, X):
        return np.array([r.verdict.value for r in self.reports(X)], dtype=object)


class FourierEvolver(TransformerMixin, BaseEstimator):
    """Propagate Fourier states of one model by a fixed time ``t``."""

    def __init__(self, t=1.0):
        self.t = t

    def fit(self, spec, y=None):
        self.spec_ = spec
        return self

    def transform(self, states):
        return [evolve(self.spec_, s, self.t) for s in states]
