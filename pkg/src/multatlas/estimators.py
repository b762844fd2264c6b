"""scikit-learn style wrapper around the X-set pixel classifier.

Nothing is learned: ``fit`` only validates parameters and input shape, so
the estimator can sit in pipelines and grid searches over its settings.
"""
import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .atlas import IN_M, MAX_RENDER_PERIOD, NOT_DETECTED, build_yc, classify_parameter
from .dynamics import RENDER_BUDGET
from .orbits import DEFAULT_CONFIG, OrbitFinderConfig


def _as_params(X):
    """Accept a 1-d complex array or an (m, 2) real array of (re, im)."""
    a = np.asarray(X)
    if np.iscomplexobj(a):
        a = a.ravel()
        a = np.column_stack([a.real, a.imag])
    a = check_array(a, dtype=np.float64, ensure_2d=True)
    if a.shape[1] != 2:
        raise ValueError(f"expected 2 features (re, im), got {a.shape[1]}")
    return a[:, 0] + 1j * a[:, 1]


class XSetClassifier(ClassifierMixin, BaseEstimator):
    """Label parameters as IN_M (-1), NOT_DETECTED (0) or detecting period p.

    Parameters
    ----------
    max_period : int
        Highest orbit period searched.
    escape_budget : int
        Iterations of the escape test before a point counts as in M.
    margin : float
        The origin must sit deeper than this inside the hull.
    continuation : bool
        Seed each query from the previous one (useful for ordered inputs).
    finder : OrbitFinderConfig or None
    """

    def __init__(self, max_period=8, escape_budget=RENDER_BUDGET, margin=0.0,
                 continuation=True, finder=None):
        self.max_period = max_period
        self.escape_budget = escape_budget
        self.margin = margin
        self.continuation = continuation
        self.finder = finder

    def _validate(self):
        if not (isinstance(self.max_period, (int, np.integer)) and 1 <= self.max_period <= MAX_RENDER_PERIOD):
            raise ValueError(f"max_period must be an int in 1..{MAX_RENDER_PERIOD}")
        if not (isinstance(self.escape_budget, (int, np.integer)) and self.escape_budget >= 1):
            raise ValueError("escape_budget must be a positive int")
        if not (np.isfinite(self.margin) and self.margin >= 0):
            raise ValueError("margin must be finite and >= 0")
        if self.finder is not None and not isinstance(self.finder, OrbitFinderConfig):
            raise TypeError("finder must be an OrbitFinderConfig")

    def fit(self, X, y=None):
        self._validate()
        _as_params(X)
        self.n_features_in_ = 2
        self.classes_ = np.array([IN_M, NOT_DETECTED] + list(range(1, self.max_period + 1)))
        return self

    def predict(self, X):
        check_is_fitted(self, "classes_")
        cs = _as_params(X)
        cfg = self.finder or DEFAULT_CONFIG
        out = np.empty(len(cs), dtype=np.int64)
        prev = None
        for i, c in enumerate(cs):
            cls, roots, _ = classify_parameter(c, self.max_period, self.escape_budget,
                                               self.margin, cfg, prev)
            if self.continuation and roots:
                prev = (c, roots)
            out[i] = cls
        return out

    def decision_function(self, X):
        """Signed distance from 0 to the hull of repelling nu up to max_period.

        Negative means the origin is inside. Points of M are not special here.
        """
        check_is_fitted(self, "classes_")
        cfg = self.finder or DEFAULT_CONFIG
        return np.array([build_yc(c, self.max_period, cfg).origin_signed_distance
                         for c in _as_params(X)])
