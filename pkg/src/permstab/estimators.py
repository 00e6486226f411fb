"""scikit-learn style front ends for the rounding engine and the oracle.

Both estimators are transductive: ``fit`` solves the problem for the given
tuple and stores the answer, ``transform`` returns the repaired tuple. Calling
``transform`` on a different tuple re-runs the solver with the same parameters.
"""

from __future__ import annotations

from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .oracle import nearest_solution
from .perm import PermTuple
from .rounding import DEFAULT_RADIUS, round_tuple, round_tuple_even
from .validation import check_perm_tuple, check_radius, check_system

__all__ = ["CommutingRounder", "NearestSolutionOracle"]


class CommutingRounder(TransformerMixin, BaseEstimator):
    """Round an almost-commuting tuple to an exactly commuting one.

    Parameters
    ----------
    radius : int, default=6
        Window radius ``L`` used for regularity tests and stabilizer inference.
    even : bool, default=False
        Also make every output generator an even permutation.

    Attributes
    ----------
    rounded_ : PermTuple
        Commuting tuple produced by the last ``fit``.
    report_ : RoundingReport
        Displacement, leftover and component statistics of that run.
    """

    def __init__(self, radius: int = DEFAULT_RADIUS, even: bool = False):
        self.radius = radius
        self.even = even

    def _solve(self, t: PermTuple):
        L = check_radius(self.radius)
        return (round_tuple_even if self.even else round_tuple)(t, L)

    def fit(self, X, y=None):
        t = check_perm_tuple(X, min_rank=2)
        self.rounded_, self.report_ = self._solve(t)
        self._fit_input = t
        self.n_generators_ = t.rank
        self.degree_ = t.degree
        return self

    def transform(self, X) -> PermTuple:
        check_is_fitted(self, "report_")
        t = check_perm_tuple(X, min_rank=2)
        if t == self._fit_input:
            return self.rounded_
        return self._solve(t)[0]

    def score(self, X, y=None) -> float:
        """Negative max displacement, so that larger is better."""
        t = check_perm_tuple(X, min_rank=2)
        report = self.report_ if t == getattr(self, "_fit_input", None) else self._solve(t)[1]
        return -float(report.max_displacement)


class NearestSolutionOracle(TransformerMixin, BaseEstimator):
    """Exhaustive nearest exact solution (tiny degrees only).

    Parameters
    ----------
    system : RelatorSystem or None
        Relators to satisfy; ``None`` means all pairwise commutators.
    """

    def __init__(self, system=None):
        self.system = system

    def fit(self, X, y=None):
        t = check_perm_tuple(X)
        R = check_system(self.system, t.rank)
        self.result_ = nearest_solution(t, R)
        self.optimum_ = self.result_.optimum
        self._fit_input = t
        return self

    def transform(self, X) -> PermTuple:
        check_is_fitted(self, "result_")
        t = check_perm_tuple(X)
        if t == self._fit_input:
            return self.result_.witness
        return nearest_solution(t, check_system(self.system, t.rank)).witness
