"""Spectra of finite-order approximations and their convergence.

Two approximations of a process ``X_n`` are studied:

* the MA(p) truncation ``Xhat_{n,p} = sum_{l<=p} a_l nu_{n-l}`` with spectrum
  ``sigma^2 |A_0^p(lam)|^2``;
* the order-p predictor ``Xbar_{n,p} = sum_{k<=p} b_{k,p} X_{n-k}`` with spectrum
  ``|B_p(lam)|^2 S_X(lam)``, whose covariances ``Rbar_{k,p}`` are also
  available in closed form from the predictor coefficients.

L2 distances between spectra are computed from covariance differences via
Parseval and, independently, by midpoint quadrature of the spectra themselves.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import astuple, dataclass, fields
from typing import Callable, Iterable, TextIO

import numpy as np

from .errors import NearUnitRoot, PreconditionError, QuadratureNonConvergence
from .predictor import ARPredictor, baxter_gap, levinson_durbin
from .process_model import (
    DEFAULT_GRID,
    CovarianceSequence,
    ProcessSpec,
    WoldCoefficients,
    _check_frequency,
    _lags_of,
    covariance_from_wold,
    evaluate_spectrum,
    midpoint_grid,
    process_truth,
    spectral_density,
)

UNIT_ROOT_THRESHOLD = 1e-10


def _transfer(coeffs: np.ndarray, lam, start: int) -> np.ndarray:
    """``sum_j coeffs[j] exp(-2 pi i lam (j + start))``."""
    lam = np.asarray(lam, dtype=float)
    k = np.arange(start, start + coeffs.size)
    return np.exp(-2j * np.pi * np.multiply.outer(lam, k)) @ coeffs


def _scalar(x):
    return float(x) if np.ndim(x) == 0 else x


def ma_truncation_spectrum(a: WoldCoefficients, p: int, lam):
    """Spectral density ``sigma^2 |sum_{l=0}^p a_l e^{-2 pi i l lam}|^2`` of the MA(p) truncation."""
    if p < 0 or p > a.order:
        raise PreconditionError(f"truncation order {p} outside 0..{a.order}")
    lam = _check_frequency(lam)
    A = _transfer(a.coeffs[:p + 1], lam, start=0)
    return _scalar(a.innovation_variance * np.abs(A) ** 2)


def predictor_gain(fitted: ARPredictor, lam):
    """``|sum_k b_{k,p} e^{-2 pi i k lam}|^2``."""
    lam = _check_frequency(lam)
    return _scalar(np.abs(_transfer(fitted.coeffs, lam, start=1)) ** 2)


def _symmetric_lookup(r: np.ndarray, lags: np.ndarray) -> np.ndarray:
    lags = np.abs(lags)
    out = np.zeros(lags.shape)
    inside = lags < r.size
    out[inside] = r[lags[inside]]
    return out


def _filtered_covariance(r: np.ndarray, b: np.ndarray, ks: np.ndarray) -> np.ndarray:
    """Covariance of ``sum_j b_j X_{n-j}`` at lags ``ks``; ``r`` is zero past its end.

    Written term for term as ``sum_j b_j^2 R_k + sum_{t>=1} sum_j b_j b_{j+t} (R_{k-t} + R_{k+t})``.
    """
    ks = np.asarray(ks)
    out = (b @ b) * _symmetric_lookup(r, ks)
    for t in range(1, b.size):
        g = b[:-t] @ b[t:]
        out = out + g * (_symmetric_lookup(r, ks - t) + _symmetric_lookup(r, ks + t))
    return out


def predictor_covariance(R: CovarianceSequence, fitted: ARPredictor, k: int) -> float:
    """``Rbar_{k,p} = E[Xbar_{n,p} Xbar_{n-k,p}]`` from the predictor coefficients.

    Needs ``|k| + p <= K`` so every covariance referenced is stored.
    """
    if abs(k) + fitted.order > R.max_lag:
        raise PreconditionError(
            f"|k| + p = {abs(k) + fitted.order} exceeds the covariance prefix ({R.max_lag})"
        )
    return float(_filtered_covariance(R.lags, fitted.coeffs, np.array([k]))[0])


def predictor_covariances(R: CovarianceSequence, fitted: ARPredictor,
                          max_lag: int | None = None) -> np.ndarray:
    """``Rbar_{k,p}`` for ``k = 0..max_lag``, treating lags past the prefix as zero.

    That is exact when ``R`` is the covariance of a finite moving average whose
    support fits in the prefix (the case for everything :func:`process_truth`
    builds). The default ``max_lag = K + p`` covers the whole support.
    """
    if max_lag is None:
        max_lag = R.max_lag + fitted.order
    return _filtered_covariance(R.lags, fitted.coeffs, np.arange(max_lag + 1))


def predictor_spectrum(R: CovarianceSequence, fitted: ARPredictor, lam, form: str = "transfer"):
    """Spectral density of ``Xbar_{n,p}``.

    ``form="transfer"`` evaluates ``|B_p(lam)|^2 S_X(lam)``; ``form="covariance"``
    Fourier-sums :func:`predictor_covariances`. The two agree to rounding.
    """
    if form == "transfer":
        return _scalar(predictor_gain(fitted, lam) * spectral_density(R, lam))
    if form == "covariance":
        return spectral_density(predictor_covariances(R, fitted), lam)
    raise ValueError(f"unknown form {form!r}")


def tavc_true(R) -> float:
    """Time-average variance constant ``sum_{k in Z} R_k = R_0 + 2 sum_{k>=1} R_k``."""
    r = _lags_of(R)
    return float(r[0] + 2.0 * r[1:].sum())


def predictor_spectrum_origin(R: CovarianceSequence, fitted: ARPredictor) -> float:
    """``S_{Xbar_p}(0) = (sum_j b_{j,p})^2 sum_k R_k``, no quadrature involved."""
    return fitted.sum_coeffs ** 2 * tavc_true(R)


def tavc_ar_model(fitted: ARPredictor) -> float:
    """Origin value of the AR(p) model spectrum, ``sigma_p^2 / (1 - sum_k b_{k,p})^2``.

    Raises :class:`NearUnitRoot` when ``|1 - sum b| <= 1e-10``.
    """
    denom = 1.0 - fitted.sum_coeffs
    if abs(denom) <= UNIT_ROOT_THRESHOLD:
        raise NearUnitRoot(f"1 - sum(b) = {denom:.3e} at order {fitted.order}", order=fitted.order)
    return fitted.innovation_variance / denom ** 2


def ar_model_spectrum(fitted: ARPredictor, lam):
    """``sigma_p^2 / |1 - B_p(lam)|^2``, the spectrum of the fitted AR(p) model."""
    lam = _check_frequency(lam)
    denom = np.abs(1.0 - _transfer(fitted.coeffs, lam, start=1)) ** 2
    return _scalar(fitted.innovation_variance / denom)


def l2_distance_parseval(R1, R2) -> float:
    """L2 distance of two spectra from their covariances: ``sqrt(sum_{k in Z} dR_k^2)``.

    Accepts :class:`CovarianceSequence` or raw lag arrays; the shorter is
    zero-padded.
    """
    r1, r2 = _lags_of(R1), _lags_of(R2)
    n = max(r1.size, r2.size)
    d = np.zeros(n)
    d[:r1.size] += r1
    d[:r2.size] -= r2
    return math.sqrt(d[0] ** 2 + 2.0 * (d[1:] @ d[1:]))


def _rms(S1, S2, grid_size):
    lam = midpoint_grid(grid_size)
    diff = evaluate_spectrum(S1, lam) - evaluate_spectrum(S2, lam)
    return math.sqrt(np.mean(np.abs(diff) ** 2))


def l2_distance_quadrature(S1: Callable, S2: Callable, grid_size: int = DEFAULT_GRID,
                           tol: float = 1e-8) -> float:
    """Midpoint-rule ``(int |S1 - S2|^2 dlam)^(1/2)``, checked against a doubled grid."""
    if grid_size < 256:
        raise PreconditionError("grid_size must be >= 256")
    coarse = _rms(S1, S2, grid_size)
    fine = _rms(S1, S2, 2 * grid_size)
    if abs(fine - coarse) > tol:
        raise QuadratureNonConvergence(
            f"grid {grid_size} -> {2 * grid_size} moved the L2 distance by {abs(fine - coarse):.3e}"
        )
    return fine


def ma_truncation_l2_bound(a: WoldCoefficients, p: int) -> float:
    """Bound ``2 sigma^2 S sum_{k>p} |a_k|`` on the MA(p) truncation's L2 error,
    with ``S = sum_k |a_k|`` (stored prefix plus its tail bound)."""
    extra = a.tail_bound or 0.0
    tail = float(np.abs(a.coeffs[p + 1:]).sum()) + extra
    return 2.0 * a.innovation_variance * (a.l1_norm + extra) * tail


# ---------------------------------------------------------------------------
# Sweeps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConvergenceRow:
    p: int
    sigma2_p: float
    sum_b: float
    s0_predictor: float
    tavc_ar_model: float
    l2_ma: float | None
    l2_ar_predictor: float | None
    baxter_gap: float | None


CSV_HEADER = [f.name for f in fields(ConvergenceRow)]


def convergence_report(spec: ProcessSpec, p_max: int) -> list[ConvergenceRow]:
    """One :class:`ConvergenceRow` per order ``p = 1..p_max``.

    MA-truncation distance, predictor distance and coefficient gap need the
    Wold representation and are ``None`` for raw covariance specs.
    """
    if p_max < 1:
        raise PreconditionError("p_max must be >= 1")
    truth = process_truth(spec, min_lag=p_max)
    R = truth.covariance
    predictors = levinson_durbin(R, p_max)
    span = R.max_lag + p_max
    rbar = truth.predictable_covariance(span) if truth.wold is not None else None

    rows = []
    for f in predictors:
        p = f.order
        l2_ma = l2_ar = gap = None
        if truth.wold is not None:
            a_p = truth.wold.truncated(min(p, truth.wold.order))
            l2_ma = l2_distance_parseval(R, covariance_from_wold(a_p, R.max_lag))
            l2_ar = l2_distance_parseval(predictor_covariances(R, f, span), rbar)
            gap = baxter_gap(f, truth.ar)
        rows.append(ConvergenceRow(
            p=p,
            sigma2_p=f.innovation_variance,
            sum_b=f.sum_coeffs,
            s0_predictor=predictor_spectrum_origin(R, f),
            tavc_ar_model=tavc_ar_model(f),
            l2_ma=l2_ma,
            l2_ar_predictor=l2_ar,
            baxter_gap=gap,
        ))
    return rows


def _cell(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def write_rows_csv(rows: Iterable[ConvergenceRow], fh: TextIO) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for row in rows:
        w.writerow([_cell(x) for x in astuple(row)])


def rows_to_csv(rows: Iterable[ConvergenceRow]) -> str:
    buf = io.StringIO()
    write_rows_csv(rows, buf)
    return buf.getvalue()
