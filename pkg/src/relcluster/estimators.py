"""scikit-learn style estimators over the relational clustering engine.

Estimators accept either a DatabaseInstance or a plain (n_samples,
n_features) array; arrays are wrapped as a single-relation instance (a
one-table join is trivially acyclic), so the estimators compose with
ordinary sklearn pipelines while the relational path needs no
materialization.
"""

from __future__ import annotations

import numbers
from typing import Optional

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin
from sklearn.exceptions import NotFittedError

from .clustering import kcenter_constant, kcenter_refined, kmeans_constant
from .errors import DomainError
from .gonzalez import diversity_solve, gonzalez_approx
from .relational import DatabaseInstance, Relation, build_join_tree, semi_join_reduce


def as_instance(X) -> DatabaseInstance:
    """Pass DatabaseInstance through; wrap arrays as a one-relation instance."""
    if isinstance(X, DatabaseInstance):
        return X
    arr = np.asarray(X, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2 or arr.shape[0] == 0:
        raise DomainError("X must be a DatabaseInstance or a non-empty 2-D array")
    attrs = [f"x{i}" for i in range(arr.shape[1])]
    rel = Relation("points", attrs, arr)
    tree = build_join_tree([rel], [])
    return semi_join_reduce(DatabaseInstance([rel], tree))


def _check_params(k, epsilon):
    if not isinstance(k, numbers.Integral) or k < 1:
        raise DomainError(f"n_clusters must be a positive integer, got {k!r}")
    if not 0 < epsilon < 1:
        raise DomainError(f"epsilon must be in (0, 1), got {epsilon!r}")


class _FittedMixin:
    def _centers(self) -> np.ndarray:
        if getattr(self, "cluster_centers_", None) is None:
            raise NotFittedError(f"{type(self).__name__} is not fitted")
        return self.cluster_centers_

    def transform(self, X) -> np.ndarray:
        """Distances from each row of X to each center."""
        centers = self._centers()
        pts = np.asarray(X, dtype=np.float64)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        diff = pts[:, None, :] - centers[None, :, :]
        return np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))

    def predict(self, X) -> np.ndarray:
        """Index of the nearest center for each row of X."""
        return np.argmin(self.transform(X), axis=1)

    def fit_predict(self, X, y=None) -> np.ndarray:
        self.fit(X)
        pred_on = X if not isinstance(X, DatabaseInstance) else self._fit_points_
        return self.predict(pred_on)


class RelationalKCenter(_FittedMixin, ClusterMixin, BaseEstimator):
    """k-center over a join: (2+eps)- or (2 sqrt(d)+eps)-approximate.

    Attributes after fit: cluster_centers_, cost_bound_ (certified upper
    bound on the k-center cost), solution_ (full run record).
    """

    def __init__(self, n_clusters=2, epsilon=0.3, refined=True, random_state=0):
        self.n_clusters = n_clusters
        self.epsilon = epsilon
        self.refined = refined
        self.random_state = random_state

    def fit(self, X, y=None):
        _check_params(self.n_clusters, self.epsilon)
        inst = as_instance(X)
        run = kcenter_refined if self.refined else kcenter_constant
        sol = run(inst, self.n_clusters, self.epsilon, self.random_state)
        self.solution_ = sol
        self.cluster_centers_ = np.asarray(sol.centers, dtype=np.float64)
        self.cost_bound_ = sol.cost_estimate
        self.n_features_in_ = inst.dim
        if not isinstance(X, DatabaseInstance):
            self._fit_points_ = np.asarray(X, dtype=np.float64)
        return self


class RelationalKMeans(_FittedMixin, ClusterMixin, BaseEstimator):
    """Constant-factor k-means (or k-median) over a join.

    Returns O(k log^3 n) centers, not k: the constant-factor guarantee with
    a certified cost bound is the point; feed the centers to any standard
    k-means reducer if exactly k are needed.
    """

    def __init__(self, n_clusters=2, epsilon=0.5, objective="kmeans", random_state=0):
        self.n_clusters = n_clusters
        self.epsilon = epsilon
        self.objective = objective
        self.random_state = random_state

    def fit(self, X, y=None):
        _check_params(self.n_clusters, self.epsilon)
        if self.objective not in ("kmeans", "kmedian"):
            raise DomainError(f"objective must be kmeans or kmedian, got {self.objective!r}")
        inst = as_instance(X)
        sol = kmeans_constant(
            inst,
            self.n_clusters,
            self.epsilon,
            power=2 if self.objective == "kmeans" else 1,
            seed=self.random_state,
        )
        self.solution_ = sol
        self.cluster_centers_ = np.asarray(sol.centers, dtype=np.float64)
        self.cost_bound_ = sol.cost_estimate
        self.n_features_in_ = inst.dim
        if not isinstance(X, DatabaseInstance):
            self._fit_points_ = np.asarray(X, dtype=np.float64)
        return self


class FarthestFirstSelector(BaseEstimator):
    """eps-approximate farthest-first selection of k diverse join results.

    With a diversity objective set, fit also evaluates it on the selection
    (value_, value_exact_).
    """

    def __init__(self, n_select=2, epsilon=0.2, objective=None, random_state=0):
        self.n_select = n_select
        self.epsilon = epsilon
        self.objective = objective
        self.random_state = random_state

    def fit(self, X, y=None):
        _check_params(self.n_select, self.epsilon)
        inst = as_instance(X)
        if self.objective is None:
            picks = gonzalez_approx(inst, self.n_select, self.epsilon, self.random_state)
            self.value_ = None
            self.value_exact_ = None
        else:
            picks, value, exact = diversity_solve(
                inst, self.n_select, self.objective, self.epsilon, self.random_state
            )
            self.value_ = value
            self.value_exact_ = exact
        self.selection_ = np.asarray(picks, dtype=np.float64)
        self.n_features_in_ = inst.dim
        return self

    def transform(self, X=None) -> np.ndarray:
        if getattr(self, "selection_", None) is None:
            raise NotFittedError(f"{type(self).__name__} is not fitted")
        return self.selection_
