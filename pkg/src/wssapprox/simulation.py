"""Monte-Carlo layer: ARMA sample paths, covariance and AR fits from data,
TAVC estimators, and a CLT check on the sample mean.

All randomness goes through ``numpy.random.PCG64`` seeded with a 64-bit
integer. Per-replication seeds are split off a master seed with
``numpy.random.SeedSequence``, so an experiment is bit-reproducible from its
master seed and any single replication from its own recorded seed.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Iterable, TextIO

import numpy as np
import scipy.signal
import scipy.stats

from .errors import PreconditionError
from .predictor import ARPredictor, levinson_durbin
from .process_model import CovarianceSequence, ProcessSpec, _check_wold_available, process_truth
from .spectral_analysis import tavc_ar_model, tavc_true

RNG_ALGORITHM = "numpy.random.PCG64"
SEED_SPLIT_ALGORITHM = "numpy.random.SeedSequence.generate_state(uint64)"

MIN_REPLICATIONS = 100


@dataclass(frozen=True, eq=False)
class SamplePath:
    values: np.ndarray
    spec: ProcessSpec
    seed: int

    @property
    def n(self) -> int:
        return self.values.size


@dataclass(frozen=True)
class TavcEstimate:
    value: float
    method: str  # "ar_model" or "batch_means"
    order_or_batches: int
    n: int


def _check_seed(seed) -> int:
    seed = int(seed)
    if not 0 <= seed < 2 ** 64:
        raise PreconditionError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return seed


def derive_seeds(master_seed: int, count: int) -> list[int]:
    """Deterministically split ``master_seed`` into ``count`` 64-bit seeds."""
    state = np.random.SeedSequence(_check_seed(master_seed)).generate_state(count, dtype=np.uint64)
    return [int(s) for s in state]


def warmup_length(spec: ProcessSpec) -> int:
    return max(1000, 50 * (len(spec.ar) + len(spec.ma)))


def simulate_arma(spec: ProcessSpec, n: int, seed: int) -> SamplePath:
    """Draw ``n`` samples of the spec's ARMA process with Gaussian innovations.

    The recursion starts from zeros and the first :func:`warmup_length` samples
    are discarded.
    """
    if n < 1:
        raise PreconditionError("n must be >= 1")
    _check_wold_available(spec)
    seed = _check_seed(seed)
    burn = warmup_length(spec)
    rng = np.random.Generator(np.random.PCG64(seed))
    nu = math.sqrt(spec.innovation_variance) * rng.standard_normal(n + burn)
    x = scipy.signal.lfilter(spec.ma_polynomial, spec.ar_polynomial, nu)[burn:]
    x.setflags(write=False)
    return SamplePath(x, spec, seed)


def sample_autocovariance(path: SamplePath, max_lag: int) -> CovarianceSequence:
    """Biased estimator ``(1/n) sum_t (x_t - xbar)(x_{t+k} - xbar)``.

    The divisor n (rather than n - k) keeps every estimated Toeplitz matrix
    positive semidefinite.
    """
    n = path.n
    if not 0 <= max_lag < n:
        raise PreconditionError(f"max_lag must be in [0, n), got {max_lag} with n = {n}")
    x = path.values - path.values.mean()
    r = np.array([x[k:] @ x[:n - k] for k in range(max_lag + 1)]) / n
    return CovarianceSequence(r)


def fit_ar(path: SamplePath, p: int) -> ARPredictor:
    """Order-p Yule-Walker fit to the sample autocovariance; needs ``p < n/10``."""
    if not 1 <= p < path.n / 10:
        raise PreconditionError(f"order {p} must satisfy 1 <= p < n/10 (n = {path.n})")
    return levinson_durbin(sample_autocovariance(path, p), p)[-1]


def tavc_ar_estimate(path: SamplePath, p: int) -> TavcEstimate:
    """``sigma_hat_p^2 / (1 - sum_k b_hat_{k,p})^2`` from an order-p fit."""
    return TavcEstimate(tavc_ar_model(fit_ar(path, p)), "ar_model", p, path.n)


def tavc_batch_means(path: SamplePath, batch_count: int) -> TavcEstimate:
    """Batch size m = floor(n / batch_count) times the (ddof=1) variance of the
    batch means; trailing samples that do not fill a batch are dropped."""
    if batch_count < 2:
        raise PreconditionError("batch_count must be >= 2")
    m = path.n // batch_count
    if m < 1:
        raise PreconditionError(f"{batch_count} batches do not fit in n = {path.n}")
    means = path.values[:m * batch_count].reshape(batch_count, m).mean(axis=1)
    return TavcEstimate(float(m * means.var(ddof=1)), "batch_means", batch_count, path.n)


# ---------------------------------------------------------------------------
# Experiments
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SimulationRecord:
    """One CSV row: ``method,n,order_or_batches,estimate,target,rel_error,seed``."""

    method: str
    n: int
    order_or_batches: int
    estimate: float
    target: float
    seed: int

    @property
    def rel_error(self) -> float:
        return abs(self.estimate - self.target) / abs(self.target)


SIMULATION_CSV_HEADER = ["method", "n", "order_or_batches", "estimate", "target", "rel_error", "seed"]


def write_records_csv(records: Iterable[SimulationRecord], fh: TextIO) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(SIMULATION_CSV_HEADER)
    for r in records:
        w.writerow([r.method, r.n, r.order_or_batches, repr(float(r.estimate)),
                    repr(float(r.target)), repr(float(r.rel_error)), r.seed])


def spec_tavc(spec: ProcessSpec) -> float:
    return tavc_true(process_truth(spec).covariance)


@dataclass(frozen=True, eq=False)
class CLTReport:
    n: int
    statistics: np.ndarray  # sqrt(n) * sample mean, one per replication
    seeds: tuple
    empirical_variance: float
    target: float
    kurtosis: float

    @property
    def variance_ratio(self) -> float:
        return self.empirical_variance / self.target

    @property
    def kurtosis_ok(self) -> bool:
        return 2.5 <= self.kurtosis <= 3.5

    def records(self) -> list[SimulationRecord]:
        """Per-replication rows; ``estimate`` is ``n * xbar^2``, a one-draw estimate of the TAVC."""
        return [SimulationRecord("clt", self.n, 0, float(z * z), self.target, s)
                for z, s in zip(self.statistics, self.seeds)]


def clt_experiment(spec: ProcessSpec, n: int, replications: int, seed: int) -> CLTReport:
    """Distribution of ``sqrt(n) * mean(X_1..X_n)`` across independent paths.

    Reports its (ddof=1) variance against the TAVC and its standardized fourth
    moment (3 for a Gaussian limit).
    """
    if replications < MIN_REPLICATIONS:
        raise PreconditionError(f"replications must be >= {MIN_REPLICATIONS}, got {replications}")
    seeds = derive_seeds(seed, replications)
    stats = np.array([math.sqrt(n) * simulate_arma(spec, n, s).values.mean() for s in seeds])
    return CLTReport(
        n=n,
        statistics=stats,
        seeds=tuple(seeds),
        empirical_variance=float(stats.var(ddof=1)),
        target=spec_tavc(spec),
        kurtosis=float(scipy.stats.kurtosis(stats, fisher=False)),
    )


@dataclass(frozen=True)
class TavcSuiteResult:
    target: float
    ar_estimates: tuple
    batch_estimates: tuple
    seeds: tuple

    def within(self, rel_tol: float) -> int:
        """Number of replications whose AR estimate is within ``rel_tol`` of the target."""
        return sum(abs(e.value - self.target) <= rel_tol * self.target for e in self.ar_estimates)

    def records(self) -> list[SimulationRecord]:
        out = []
        for ar, bm, s in zip(self.ar_estimates, self.batch_estimates, self.seeds):
            out.append(SimulationRecord(ar.method, ar.n, ar.order_or_batches, ar.value, self.target, s))
            out.append(SimulationRecord(bm.method, bm.n, bm.order_or_batches, bm.value, self.target, s))
        return out


def tavc_suite(spec: ProcessSpec, n: int, order: int, batches: int,
               replications: int, seed: int) -> TavcSuiteResult:
    """AR-model and batch-means TAVC estimates on the same paths, one per derived seed."""
    if replications < 1:
        raise PreconditionError("replications must be >= 1")
    seeds = derive_seeds(seed, replications)
    ar, bm = [], []
    for s in seeds:
        path = simulate_arma(spec, n, s)
        ar.append(tavc_ar_estimate(path, order))
        bm.append(tavc_batch_means(path, batches))
    return TavcSuiteResult(spec_tavc(spec), tuple(ar), tuple(bm), tuple(seeds))
