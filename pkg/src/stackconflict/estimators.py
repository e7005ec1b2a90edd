"""scikit-learn style wrappers around the reward models and conflict regions."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .conflict import RewardGaps, aoc_analytic, batch_conflict_oracle, conflict_predicate
from .transforms import Model, SocialParams, transform_pair


class RewardTransformer(TransformerMixin, BaseEstimator):
    """Map true reward pairs ``(r_row, r_col)`` to effective reward pairs.

    Stateless apart from validating the coefficients in ``fit``. For pure
    altruism both players use their own coefficient.
    """

    def __init__(self, model="baseline", alpha_row=0.0, alpha_col=0.0):
        self.model = model
        self.alpha_row = alpha_row
        self.alpha_col = alpha_col

    def fit(self, X, y=None):
        X = check_array(X, ensure_min_features=2)
        if X.shape[1] != 2:
            raise ValueError(f"expected 2 columns (r_row, r_col), got {X.shape[1]}")
        self.params_ = SocialParams(self.model, self.alpha_row, self.alpha_col)
        self.n_features_in_ = 2
        return self

    def transform(self, X):
        check_is_fitted(self, "params_")
        X = check_array(X)
        if X.shape[1] != 2:
            raise ValueError(f"expected 2 columns (r_row, r_col), got {X.shape[1]}")
        p = self.params_
        r_row, r_col = X[:, 0], X[:, 1]
        new_row = transform_pair(r_row, r_col, p.alpha_row, p.alpha_col, p.kind)
        new_col = transform_pair(r_col, r_row, p.alpha_col, p.alpha_row, p.kind)
        return np.column_stack([np.broadcast_to(new_row, r_row.shape), np.broadcast_to(new_col, r_col.shape)])


class ConflictRegionClassifier(ClassifierMixin, BaseEstimator):
    """Predict whether coefficient pairs ``(alpha1, alpha2)`` produce conflict.

    ``method="analytic"`` uses the closed-form region; ``"equilibrium"`` solves
    the transformed canonical game. Near-tie points count as no conflict. The
    game is fixed by ``A`` and ``B``, so ``fit`` ignores ``y`` and only
    validates and stores ``aoc_``.
    """

    def __init__(self, model="aug", A=1.0, B=1.0, method="analytic"):
        self.model = model
        self.A = A
        self.B = B
        self.method = method

    def fit(self, X=None, y=None):
        if self.method not in ("analytic", "equilibrium"):
            raise ValueError("method must be 'analytic' or 'equilibrium'")
        self.model_ = Model.parse(self.model)
        self.gaps_ = RewardGaps(self.A, self.B)
        self.aoc_ = aoc_analytic(self.model_, self.gaps_)
        self.classes_ = np.array([False, True])
        self.n_features_in_ = 2
        return self

    def predict(self, X):
        check_is_fitted(self, "aoc_")
        X = check_array(X)
        if X.shape[1] != 2:
            raise ValueError(f"expected 2 columns (alpha1, alpha2), got {X.shape[1]}")
        hi = self.model_.upper
        if np.any(X < 0) or np.any(X > hi):
            raise ValueError(f"coefficients must lie in [0, {hi:g}]")
        if self.method == "analytic":
            return np.asarray(conflict_predicate(self.model_, self.gaps_, X[:, 0], X[:, 1]), dtype=bool)
        conflict, tie = batch_conflict_oracle(self.gaps_, self.model_, X[:, 0], X[:, 1])
        return conflict & ~tie
