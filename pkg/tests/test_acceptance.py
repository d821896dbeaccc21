"""Acceptance gate. Each test prints one ``PASS``/``FAIL`` line; run with ``-s``
to see them inline (they are written past pytest's capture either way)."""

import time

import numpy as np
import pytest

from processes import AR1, ARMA11, MA1, ma1_coeff, ma1_sigma2, random_arma
from wssapprox.predictor import baxter_gap, levinson_durbin, sigma_limit_check, yule_walker_dense
from wssapprox.process_model import (
    ProcessSpec,
    covariance_from_spectral,
    covariance_from_wold,
    process_truth,
    spectrum_of,
)
from wssapprox.simulation import clt_experiment, tavc_suite
from wssapprox.spectral_analysis import (
    l2_distance_parseval,
    l2_distance_quadrature,
    ma_truncation_l2_bound,
    ma_truncation_spectrum,
    predictor_covariance,
    predictor_covariances,
    predictor_spectrum,
    predictor_spectrum_origin,
    tavc_ar_model,
)


@pytest.fixture
def verdict(capsys):
    def emit(number, title, ok, detail):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] {number:>2}. {title}: {detail}")
        assert ok, detail
    return emit


def strictly_decreasing(x):
    return bool(np.all(np.diff(x) < 0))


def test_01_levinson_matches_dense(verdict):
    rng = np.random.default_rng(20240601)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(200):
        spec = random_arma(rng)
        p_max = int(rng.integers(1, 31))
        R = process_truth(spec, min_lag=p_max).covariance
        for f in levinson_durbin(R, p_max):
            g = yule_walker_dense(R, f.order)
            worst = max(worst, float(np.abs(f.coeffs - g.coeffs).max()))
    elapsed = time.perf_counter() - start
    verdict(1, "Levinson-Durbin vs dense solve", worst <= 1e-9 and elapsed < 5,
            f"max |diff| = {worst:.2e} (tol 1e-9), runtime {elapsed:.2f} s (limit 5 s)")


def test_02_ma1_closed_form(verdict):
    worst_dense = worst_b = worst_s = 0.0
    for theta in (0.3, 0.5, 0.7):
        R = process_truth(ProcessSpec.ma_process(theta), min_lag=20).covariance
        for f in levinson_durbin(R, 20):
            p = f.order
            closed = np.array([ma1_coeff(theta, k, p) for k in range(1, p + 1)])
            # the closed form is checked against the dense oracle before it is used
            worst_dense = max(worst_dense, float(np.abs(yule_walker_dense(R, p).coeffs - closed).max()))
            worst_b = max(worst_b, float(np.abs(f.coeffs - closed).max()))
            worst_s = max(worst_s, abs(f.innovation_variance - ma1_sigma2(theta, p)))
    ok = max(worst_dense, worst_b, worst_s) <= 1e-9
    verdict(2, "MA(1) closed-form predictor", ok,
            f"dense-vs-closed {worst_dense:.1e}, coeffs {worst_b:.1e}, sigma2 {worst_s:.1e} (tol 1e-9)")


def test_03_sigma_monotone_and_limit(verdict):
    parts, ok = [], True
    for name, spec in (("MA(1)", MA1), ("ARMA(1,1)", ARMA11)):
        rep = sigma_limit_check(levinson_durbin(process_truth(spec, min_lag=40).covariance, 40), 1.0)
        ok &= rep.nonincreasing and rep.final_gap < 1e-6
        parts.append(f"{name} nonincreasing={rep.nonincreasing} |sigma_40^2 - 1|={rep.final_gap:.1e}")
    verdict(3, "residual variance monotone, limit 1", ok, "; ".join(parts))


def test_04_origin_convergence(verdict):
    t = process_truth(MA1, min_lag=40)
    err = np.array([abs(predictor_spectrum_origin(t.covariance, f) - 0.25)
                    for f in levinson_durbin(t.covariance, 40)])
    ta = process_truth(AR1, min_lag=1)
    ar_err = abs(predictor_spectrum_origin(ta.covariance, levinson_durbin(ta.covariance, 1)[0]) - 1.0)
    ok = strictly_decreasing(err) and err[-1] < 1e-6 and ar_err < 1e-9
    verdict(4, "predictor spectrum at origin", ok,
            f"MA(1) decreasing={strictly_decreasing(err)} err(40)={err[-1]:.1e}; AR(1) p=1 err={ar_err:.1e}")


def test_05_tavc_convergence(verdict):
    t = process_truth(MA1, min_lag=40)
    ma_err = abs(tavc_ar_model(levinson_durbin(t.covariance, 40)[-1]) - 2.25)
    ta = process_truth(AR1, min_lag=40)
    ar_err = max(abs(tavc_ar_model(f) - 4.0) for f in levinson_durbin(ta.covariance, 40))
    verdict(5, "AR-model TAVC", ma_err < 1e-6 and ar_err <= 1e-9,
            f"MA(1) p=40 err={ma_err:.1e} (tol 1e-6); AR(1) max err over p<=40 = {ar_err:.1e} (tol 1e-9)")


def test_06_ma_truncation_bound(verdict):
    t = process_truth(AR1)  # Wold weights 0.5^k
    a, R = t.wold, t.covariance
    worst_ratio = worst_gap = 0.0
    for p in range(31):
        approx = covariance_from_wold(a.truncated(p), t.max_lag)
        err = l2_distance_parseval(R, approx)
        bound = ma_truncation_l2_bound(a, p)
        quad = l2_distance_quadrature(spectrum_of(R), lambda lam: ma_truncation_spectrum(a, p, lam))
        worst_ratio = max(worst_ratio, err / bound)
        worst_gap = max(worst_gap, abs(err - quad))
    verdict(6, "MA-truncation L2 bound", worst_ratio <= 1 and worst_gap <= 1e-7,
            f"max err/bound = {worst_ratio:.3f} (<= 1), Parseval vs quadrature {worst_gap:.1e} (tol 1e-7)")


def test_07_ar_predictor_l2(verdict):
    t = process_truth(MA1, min_lag=40)
    span = t.max_lag + 40
    target = t.predictable_covariance(span)
    d = np.array([l2_distance_parseval(predictor_covariances(t.covariance, f, span), target)
                  for f in levinson_durbin(t.covariance, 40)])
    mono = bool(np.all(np.diff(d[4:]) <= 0))
    verdict(7, "AR-predictor spectrum L2 convergence", d[-1] < 1e-4 and mono,
            f"L2(p=40) = {d[-1]:.1e} (tol 1e-4), nonincreasing for p>=5: {mono}")


def test_08_baxter_gap(verdict):
    t = process_truth(MA1, min_lag=40)
    gaps = np.array([baxter_gap(f, t.ar) for f in levinson_durbin(t.covariance, 40)])
    verdict(8, "Baxter gap", gaps[-1] < 1e-6 and strictly_decreasing(gaps),
            f"gap(40) = {gaps[-1]:.1e} (tol 1e-6), strictly decreasing: {strictly_decreasing(gaps)}")


def test_09_predictor_covariance_two_paths(verdict):
    worst = 0.0
    for spec in (AR1, MA1, ARMA11):
        t = process_truth(spec, min_lag=20)
        R = t.covariance
        for f in levinson_durbin(R, 10):
            S = lambda lam, f=f: predictor_spectrum(R, f, lam, form="transfer")
            for k in range(-10, 11):
                worst = max(worst, abs(predictor_covariance(R, f, k) - covariance_from_spectral(S, k)))
    verdict(9, "predictor covariance vs inverse FT", worst <= 1e-8,
            f"max |diff| over |k|<=10, p<=10, 3 specs = {worst:.1e} (tol 1e-8)")


def test_10_clt(verdict):
    start = time.perf_counter()
    rep = clt_experiment(AR1, 10_000, 1000, 20240601)
    elapsed = time.perf_counter() - start
    rel = abs(rep.empirical_variance - 4.0) / 4.0
    ok = rel <= 0.10 and rep.kurtosis_ok and elapsed < 60
    verdict(10, "CLT for the sample mean", ok,
            f"Var = {rep.empirical_variance:.4f} (rel err {rel:.3f}, tol 0.10), "
            f"kurtosis = {rep.kurtosis:.3f} (in [2.5, 3.5]), runtime {elapsed:.1f} s (limit 60 s)")


@pytest.mark.slow
def test_11_tavc_suite(verdict):
    parts, ok = [], True
    for name, spec, order in (("AR(1)", AR1, 1), ("MA(1)", MA1, 10), ("ARMA(1,1)", ARMA11, 10)):
        res = tavc_suite(spec, 100_000, order, 100, 100, 20240601)
        hits = res.within(0.10)
        bm = sum(abs(e.value - res.target) <= 0.10 * res.target for e in res.batch_estimates)
        ok &= hits >= 95 and len(res.batch_estimates) == 100
        parts.append(f"{name} p={order}: {hits}/100 AR (batch means {bm}/100)")
    verdict(11, "TAVC estimation suite (>= 95/100 within 10%)", ok, "; ".join(parts))
