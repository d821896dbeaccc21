"""Finite-order MMSE linear predictors from Yule-Walker equations.

The order-p predictor ``Xbar_{n,p} = sum_{k=1}^p b_{k,p} X_{n-k}`` has
coefficients ``B_p = R_p^{-1} r_p``. :func:`levinson_durbin` solves all orders
1..p_max in O(p_max^2) and :func:`yule_walker_dense` solves one order by LU with
partial pivoting, serving as its oracle.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from ._toeplitz import durbin
from .errors import Breakdown, PreconditionError, SingularSystem
from .process_model import ARCoefficients, CovarianceSequence, SINGULAR_FLOOR, _frozen

MONOTONE_SLACK = 1e-12


@dataclass(frozen=True, eq=False)
class ARPredictor:
    """Order-p predictor: coefficients ``b_{1..p,p}``, residual variance and
    reflection (partial autocorrelation) coefficients ``kappa_1..kappa_p``."""

    order: int
    coeffs: np.ndarray
    innovation_variance: float
    reflection: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _frozen(self.coeffs))
        object.__setattr__(self, "reflection", _frozen(self.reflection))
        if self.coeffs.size != self.order:
            raise ValueError(f"expected {self.order} coefficients, got {self.coeffs.size}")

    @property
    def sum_coeffs(self) -> float:
        return float(self.coeffs.sum())

    def residual_variance(self, R: CovarianceSequence) -> float:
        """``R_0 - sum_k b_{k,p} R_k``; equals ``innovation_variance`` for the R it was fit on."""
        return float(R.lags[0] - self.coeffs @ R.rhs(self.order))


def _check_order(R: CovarianceSequence, p: int):
    if p < 1:
        raise PreconditionError(f"order must be >= 1, got {p}")
    if p > R.max_lag:
        raise PreconditionError(f"order {p} exceeds the covariance prefix (max lag {R.max_lag})")


def yule_walker_dense(R: CovarianceSequence, p: int) -> ARPredictor:
    """Solve ``R_p B_p = r_p`` directly by Gaussian elimination with partial pivoting.

    Raises :class:`SingularSystem` if a pivot falls below ``1e-12 * R_0``.
    The returned predictor carries no reflection coefficients.
    """
    _check_order(R, p)
    r0 = R.lags[0]
    if r0 == 0:
        raise SingularSystem("covariance is identically zero")
    with warnings.catch_warnings():
        # exact zero pivots are reported below
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(R.toeplitz(p), check_finite=True)
    pivots = np.abs(np.diag(lu))
    if pivots.min() < SINGULAR_FLOOR * r0:
        raise SingularSystem(f"pivot {pivots.min():.3e} below {SINGULAR_FLOOR:g} * R_0 at order {p}")
    b = scipy.linalg.lu_solve((lu, piv), R.rhs(p))
    sigma2 = float(r0 - b @ R.rhs(p))
    return ARPredictor(p, b, sigma2)


def levinson_durbin(R: CovarianceSequence, p_max: int) -> list[ARPredictor]:
    """Predictors of orders 1..p_max via the Levinson-Durbin recursion.

    ``sigma_p^2 = sigma_{p-1}^2 (1 - kappa_p^2)``. Raises :class:`Breakdown`
    (carrying the order) when ``sigma_p^2 < 1e-12 * R_0``.
    """
    _check_order(R, p_max)
    r0 = R.lags[0]
    if r0 == 0:
        raise Breakdown("covariance is identically zero", order=0)
    trace = durbin(R.lags, p_max, floor=SINGULAR_FLOOR * r0)
    if trace.stopped_at is not None:
        p = trace.stopped_at
        raise Breakdown(
            f"residual variance {trace.sigma2[p]:.3e} below {SINGULAR_FLOOR:g} * R_0 at order {p}",
            order=p,
        )
    return [
        ARPredictor(m, trace.coeffs[m - 1], float(trace.sigma2[m]), trace.reflection[:m])
        for m in range(1, p_max + 1)
    ]


def baxter_gap(fitted: ARPredictor, truth: ARCoefficients) -> float:
    """``sum_{k=1}^p |b_{k,p} - b_k|``."""
    if len(truth) < fitted.order:
        raise PreconditionError(
            f"truth has {len(truth)} coefficients, predictor order is {fitted.order}"
        )
    return float(np.abs(fitted.coeffs - truth.coeffs[:fitted.order]).sum())


@dataclass(frozen=True)
class SigmaReport:
    orders: tuple
    sigma2: tuple
    nonincreasing: bool
    violations: tuple  # orders p where sigma_p^2 > sigma_{p-1}^2 + slack
    final_gap: float


def sigma_limit_check(predictors: list[ARPredictor], sigma_true: float,
                      slack: float = MONOTONE_SLACK) -> SigmaReport:
    """Check that residual variances decrease toward ``sigma_true``.

    Violations are collected, never raised.
    """
    orders = [f.order for f in predictors]
    if orders != sorted(orders):
        raise PreconditionError("predictors must be ordered by ascending order")
    s = [f.innovation_variance for f in predictors]
    bad = tuple(orders[i] for i in range(1, len(s)) if s[i] > s[i - 1] + slack)
    return SigmaReport(tuple(orders), tuple(s), not bad, bad, abs(s[-1] - sigma_true))
