"""scikit-learn style wrapper: planning happens in ``fit``, transforms in ``transform``."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_signal_matrix
from .oracle import FORWARD
from .planner import MODES, Planner, PlannerConfig
from .problem import BACKWARD, DftProblem, Signature
from .twiddle import KINDS


class FFTTransformer(TransformerMixin, BaseEstimator):
    """Row-wise DFT of a (n_samples, n) matrix through planned transforms.

    Parameters
    ----------
    mode : "estimate" or "measure"
        Planner mode; "measure" times candidate plans during ``fit``.
    twiddle : twiddle provider kind used by the plans.
    wisdom : optional wisdom text imported before planning.
    normalize_inverse : divide ``inverse_transform`` output by n.
    seed : seed for timing data.
    """

    def __init__(self, mode: str = "estimate", twiddle: str = "full", wisdom: str | None = None,
                 normalize_inverse: bool = True, seed: int = 0):
        self.mode = mode
        self.twiddle = twiddle
        self.wisdom = wisdom
        self.normalize_inverse = normalize_inverse
        self.seed = seed

    def fit(self, X, y=None):
        X = check_signal_matrix(X)
        if self.mode not in MODES or self.mode == "wisdom-only" and not self.wisdom:
            raise ValueError(f"mode must be 'estimate' or 'measure' (or 'wisdom-only' with wisdom), got {self.mode!r}")
        if self.twiddle not in KINDS:
            raise ValueError(f"twiddle must be one of {KINDS}, got {self.twiddle!r}")
        self.planner_ = Planner(PlannerConfig(mode=self.mode, twiddle=self.twiddle, seed=self.seed))
        if self.wisdom:
            self.planner_.import_wisdom(self.wisdom)
        self.n_features_in_ = X.shape[1]
        self.plan_ = self._plan(X.shape[0], FORWARD)
        return self

    def _plan(self, batch: int, sign: int):
        n = self.n_features_in_
        return self.planner_.plan(Signature(((n, 1, 1),), ((batch, n, n),), False, sign))

    def _run(self, X, sign: int) -> np.ndarray:
        check_is_fitted(self, "plan_")
        X = check_signal_matrix(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} samples per signal; the transformer was fitted for {self.n_features_in_}")
        n = self.n_features_in_
        flat = X.reshape(-1)
        out = np.empty_like(flat)
        prob = DftProblem(((n, 1, 1),), ((X.shape[0], n, n),), flat, out, 0, 0, sign)
        self.planner_.execute(prob)
        return out.reshape(X.shape)

    def transform(self, X) -> np.ndarray:
        """Forward DFT of every row."""
        return self._run(X, FORWARD)

    def inverse_transform(self, X) -> np.ndarray:
        """Backward DFT of every row, divided by n when ``normalize_inverse``."""
        Y = self._run(X, BACKWARD)
        return Y / self.n_features_in_ if self.normalize_inverse else Y

    def export_wisdom(self) -> str:
        check_is_fitted(self, "plan_")
        return self.planner_.export_wisdom()
