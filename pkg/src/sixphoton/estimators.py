"""scikit-learn style estimators over sixfold count tables.

Rows of ``X`` are count vectors (length ``2**n``, outcome order as in
:func:`sixphoton.qstate.outcome_labels`).  The analyses taking three bases
expect rows in the order H/V, D/A, L/R.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .montecarlo import CountTable, estimate_correlation, estimate_witness, noise_residual_correlation
from .optics import settings_for
from .qstate import add_white_noise, estimate_p_from_correlations, fidelity, parity_signs, reference_state
from .witness import REDUCED_IDENTITY, Verdict, WitnessReport, indicator_norm, psi6_witnesses, reduce_witness

BASES = ("HV", "DA", "LR")
#: perfect correlations of the target in the three bases
IDEAL_CORRELATIONS = (-1.0, 1.0, 1.0)


def _check_counts(X, n_rows=None):
    X = check_array(X, dtype=np.int64)
    if (X < 0).any():
        raise ValueError("counts must be non-negative")
    n = int(np.log2(X.shape[1]))
    if 2**n != X.shape[1]:
        raise ValueError(f"rows must have 2**n entries, got {X.shape[1]}")
    if n_rows is not None and X.shape[0] != n_rows:
        raise ValueError(f"expected {n_rows} rows (one per basis {BASES}), got {X.shape[0]}")
    if (X.sum(axis=1) == 0).any():
        raise ValueError("a count row has no events")
    return X, n


def _tables(X, n):
    return {b: CountTable(settings_for(b, n), row) for b, row in zip(BASES, X)}


class ParityCorrelation(TransformerMixin, BaseEstimator):
    """Stateless transformer: count rows -> (correlation, standard error)."""

    def fit(self, X, y=None):
        _check_counts(X)
        return self

    def transform(self, X):
        X, n = _check_counts(X)
        signs = parity_signs(n)
        n_ev = X.sum(axis=1)
        corr = X @ signs / n_ev
        return np.column_stack([corr, np.sqrt(np.clip(1 - corr**2, 0, None) / n_ev)])


class WhiteNoiseModel(BaseEstimator):
    """Fit the white-noise weight ``p`` from the three perfect-correlation settings.

    Attributes set by :meth:`fit`: ``correlations_``, ``standard_errors_``,
    ``p_``, ``fidelity_``, ``residuals_``, ``indicator_``, ``n_events_``.
    """

    def __init__(self, target="Psi6Plus"):
        self.target = target

    def fit(self, X, y=None):
        X, n = _check_counts(X, n_rows=3)
        ests = [estimate_correlation(t) for t in _tables(X, n).values()]
        self.correlations_ = np.array([e.value for e in ests])
        self.standard_errors_ = np.array([e.standard_error for e in ests])
        self.p_ = estimate_p_from_correlations(*self.correlations_)
        self.p_standard_error_ = float(np.sqrt((self.standard_errors_**2).sum()) / 3)
        ket = reference_state(self.target)
        self.fidelity_ = fidelity(add_white_noise(ket, self.p_), ket)
        self.residuals_ = (
            np.array(noise_residual_correlation(self.correlations_, self.p_, IDEAL_CORRELATIONS))
            if self.p_ < 1 else np.zeros(3)
        )
        tensor = dict(zip(("zzzzzz", "xxxxxx", "yyyyyy"), self.correlations_))
        self.indicator_ = indicator_norm(tensor, list(tensor))[0]
        self.n_events_ = X.sum(axis=1)
        return self

    def state(self):
        """Fitted density operator."""
        check_is_fitted(self, "p_")
        return add_white_noise(reference_state(self.target), self.p_)


class ReducedWitnessEstimator(BaseEstimator):
    """Three-setting witness expectation with a standard error.

    ``k`` is the significance multiplier: the verdict is "entangled" when
    ``expectation + k * standard_error < 0``.
    """

    def __init__(self, identity_constant=float(REDUCED_IDENTITY), k=0.0):
        self.identity_constant = identity_constant
        self.k = k

    def fit(self, X, y=None):
        X, n = _check_counts(X, n_rows=3)
        w_max, _ = psi6_witnesses(reference_state("Psi6Plus"))
        self.witness_ = reduce_witness(w_max, self.identity_constant)
        est = estimate_witness(self.witness_, _tables(X, n))
        self.expectation_ = est.value
        self.standard_error_ = est.standard_error
        self.report_ = WitnessReport(est.value, est.standard_error, self.k)
        return self

    @property
    def verdict_(self) -> Verdict:
        check_is_fitted(self, "report_")
        return self.report_.verdict
