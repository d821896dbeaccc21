"""Representations of a regular wide-sense-stationary process.

A process is carried around in one of four equivalent forms:

* its covariance sequence ``R_0..R_K`` (:class:`CovarianceSequence`),
* its Wold / MA-infinity weights ``a_0 = 1, a_1, ...`` (:class:`WoldCoefficients`),
* its AR-infinity weights ``b_1, b_2, ...`` (:class:`ARCoefficients`),
* its spectral density ``S(lam) = sum_k R_k exp(-2 pi i lam k)`` on ``(-1/2, 1/2]``.

Infinite sequences are stored as finite prefixes. Ground-truth processes are
described by a :class:`ProcessSpec` (AR / MA / ARMA polynomials, or a raw
covariance file), and :func:`process_truth` expands a spec into all the forms
at once with a prefix long enough that the dropped Wold tail is below
``DEFAULT_TAIL_TOL`` in l1.
"""

from __future__ import annotations

import csv
import enum
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from ._toeplitz import durbin
from .errors import (
    InvalidCovariance,
    NonInvertible,
    NonStationary,
    NotAvailable,
    PreconditionError,
    QuadratureNonConvergence,
    SpecParseError,
)

DEFAULT_TAIL_TOL = 1e-12
DEFAULT_GRID = 4096

# relative to R_0
PSD_TOL = 1e-9
SINGULAR_FLOOR = 1e-12

_MAX_PREFIX = 100_000


def _frozen(x) -> np.ndarray:
    arr = np.array(x, dtype=float)
    arr.setflags(write=False)
    return arr


# ---------------------------------------------------------------------------
# Domain types
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class CovarianceSequence:
    """Prefix ``R_0..R_K`` of a symmetric covariance sequence.

    Construction runs the Levinson-Durbin recursion over every leading Toeplitz
    block and rejects the sequence if some residual variance drops below
    ``-PSD_TOL * R_0``. Once a block becomes numerically singular the sequence is
    on the determinism boundary and the check stops there. The all-zero
    sequence is accepted as the covariance of the zero process.
    """

    lags: np.ndarray

    def __post_init__(self):
        r = _frozen(self.lags)
        if r.ndim != 1 or r.size == 0:
            raise InvalidCovariance("covariance lags must be a non-empty 1-D sequence")
        if not np.all(np.isfinite(r)):
            raise InvalidCovariance("covariance lags must be finite")
        object.__setattr__(self, "lags", r)
        if not np.any(r):
            return
        if r[0] <= 0:
            raise InvalidCovariance(f"R_0 must be positive, got {r[0]!r}")
        trace = durbin(r, r.size - 1, floor=SINGULAR_FLOOR * r[0])
        worst = trace.sigma2.min()
        if worst < -PSD_TOL * r[0]:
            p = int(np.argmin(trace.sigma2))
            raise InvalidCovariance(
                f"Toeplitz matrix of order {p} is not positive semidefinite "
                f"(residual variance {worst:.3e})"
            )

    @property
    def max_lag(self) -> int:
        return self.lags.size - 1

    @property
    def is_zero(self) -> bool:
        return not np.any(self.lags)

    def __len__(self):
        return self.lags.size

    def toeplitz(self, p: int) -> np.ndarray:
        """The p x p matrix ``[R_{|i-j|}]``."""
        if p > self.max_lag + 1:
            raise PreconditionError(f"order {p} needs lags up to {p - 1}, have {self.max_lag}")
        idx = np.arange(p)
        return self.lags[np.abs(idx[:, None] - idx[None, :])]

    def rhs(self, p: int) -> np.ndarray:
        """The vector ``[R_1 .. R_p]``."""
        if p > self.max_lag:
            raise PreconditionError(f"order {p} needs lags up to {p}, have {self.max_lag}")
        return self.lags[1:p + 1].copy()

    def extended(self, max_lag: int) -> np.ndarray:
        """Lags ``0..max_lag`` with zeros past the stored prefix."""
        out = np.zeros(max_lag + 1)
        n = min(max_lag + 1, self.lags.size)
        out[:n] = self.lags[:n]
        return out


@dataclass(frozen=True, eq=False)
class WoldCoefficients:
    """MA-infinity weights ``a_0 = 1, a_1, .., a_K`` and innovation variance.

    ``tail_bound`` is an upper estimate of ``sum_{k>K} |a_k|`` when the prefix
    came from a spec (0 for a finite MA), ``None`` when unknown.
    """

    coeffs: np.ndarray
    innovation_variance: float = 1.0
    tail_bound: float | None = None

    def __post_init__(self):
        a = _frozen(self.coeffs)
        if a.ndim != 1 or a.size == 0:
            raise ValueError("Wold coefficients must be a non-empty 1-D sequence")
        if a[0] != 1.0:
            raise ValueError(f"a_0 must be exactly 1, got {a[0]!r}")
        if not self.innovation_variance > 0:
            raise ValueError("innovation variance must be positive")
        object.__setattr__(self, "coeffs", a)
        object.__setattr__(self, "innovation_variance", float(self.innovation_variance))

    @property
    def order(self) -> int:
        return self.coeffs.size - 1

    @property
    def l1_norm(self) -> float:
        return float(np.abs(self.coeffs).sum())

    def truncated(self, p: int) -> "WoldCoefficients":
        if p > self.order:
            raise PreconditionError(f"truncation order {p} exceeds stored prefix {self.order}")
        tail = float(np.abs(self.coeffs[p + 1:]).sum()) + (self.tail_bound or 0.0)
        return WoldCoefficients(self.coeffs[:p + 1], self.innovation_variance, tail)


@dataclass(frozen=True, eq=False)
class ARCoefficients:
    """AR-infinity weights ``b_1..b_K`` (``coeffs[0]`` is ``b_1``)."""

    coeffs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _frozen(np.atleast_1d(self.coeffs)))

    def __len__(self):
        return self.coeffs.size


class ProcessKind(str, enum.Enum):
    AR = "ar"
    MA = "ma"
    ARMA = "arma"
    RAW_COVARIANCE = "covariance"


def _poly_roots(coeffs_low_first: np.ndarray) -> np.ndarray:
    c = np.trim_zeros(np.asarray(coeffs_low_first, dtype=float), "b")
    if c.size <= 1:
        return np.zeros(0, dtype=complex)
    return np.roots(c[::-1])


@dataclass(frozen=True)
class ProcessSpec:
    """Ground-truth process description.

    The process is ``X_n = sum_k ar[k-1] X_{n-k} + nu_n + sum_k ma[k-1] nu_{n-k}``
    with ``Var(nu_n) = innovation_variance``. ``kind == RAW_COVARIANCE`` instead
    points at a CSV of covariance lags.
    """

    kind: ProcessKind
    ar: tuple = ()
    ma: tuple = ()
    innovation_variance: float = 1.0
    covariance_file: Path | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", ProcessKind(self.kind))
        object.__setattr__(self, "ar", tuple(float(x) for x in self.ar))
        object.__setattr__(self, "ma", tuple(float(x) for x in self.ma))
        if not (self.innovation_variance > 0 and math.isfinite(self.innovation_variance)):
            raise ValueError("innovation_variance must be a positive finite number")
        if self.kind is ProcessKind.AR and self.ma:
            raise ValueError("an AR spec cannot carry MA coefficients")
        if self.kind is ProcessKind.MA and self.ar:
            raise ValueError("an MA spec cannot carry AR coefficients")
        if self.kind is ProcessKind.RAW_COVARIANCE:
            if self.covariance_file is None:
                raise ValueError("a covariance spec needs covariance_file")
            object.__setattr__(self, "covariance_file", Path(self.covariance_file))
        roots = _poly_roots(self.ar_polynomial)
        if roots.size and np.min(np.abs(roots)) <= 1.0:
            raise NonStationary(
                f"AR polynomial has a root of modulus {np.min(np.abs(roots)):.6g} <= 1"
            )

    @classmethod
    def white_noise(cls, innovation_variance=1.0):
        return cls(ProcessKind.MA, innovation_variance=innovation_variance)

    @classmethod
    def ar_process(cls, *phi, innovation_variance=1.0):
        return cls(ProcessKind.AR, ar=phi, innovation_variance=innovation_variance)

    @classmethod
    def ma_process(cls, *theta, innovation_variance=1.0):
        return cls(ProcessKind.MA, ma=theta, innovation_variance=innovation_variance)

    @classmethod
    def arma_process(cls, ar, ma, innovation_variance=1.0):
        return cls(ProcessKind.ARMA, ar=tuple(ar), ma=tuple(ma),
                   innovation_variance=innovation_variance)

    @property
    def ar_polynomial(self) -> np.ndarray:
        """``[1, -phi_1, .., -phi_q]`` (increasing powers of z)."""
        return np.concatenate([[1.0], -np.asarray(self.ar, dtype=float)])

    @property
    def ma_polynomial(self) -> np.ndarray:
        """``[1, theta_1, .., theta_q]`` (increasing powers of z)."""
        return np.concatenate([[1.0], np.asarray(self.ma, dtype=float)])

    @property
    def decay_rate(self) -> float:
        """Largest inverse-root modulus of the AR polynomial (0 for pure MA)."""
        roots = _poly_roots(self.ar_polynomial)
        return float(np.max(1.0 / np.abs(roots))) if roots.size else 0.0


# ---------------------------------------------------------------------------
# Conversions
# ---------------------------------------------------------------------------


def _lags_of(R) -> np.ndarray:
    if isinstance(R, CovarianceSequence):
        return R.lags
    return np.asarray(R, dtype=float)


def covariance_from_wold(a: WoldCoefficients, max_lag: int) -> CovarianceSequence:
    """``R_k = sigma^2 sum_n a_n a_{n-k}`` for ``k = 0..max_lag``.

    Weights past the stored prefix are taken as zero, so the result is the exact
    covariance of the truncated moving average.
    """
    if max_lag < 0:
        raise PreconditionError("max_lag must be >= 0")
    c = a.coeffs
    full = np.correlate(c, c, mode="full")[c.size - 1:]
    out = np.zeros(max_lag + 1)
    n = min(out.size, full.size)
    out[:n] = full[:n]
    return CovarianceSequence(a.innovation_variance * out)


def wold_to_ar(a: WoldCoefficients, max_order: int) -> ARCoefficients:
    """Invert the Wold filter as a formal power series.

    Returns ``b_1..b_max_order`` with ``(1 - sum b_k z^k)(sum a_k z^k) = 1`` up to
    degree ``max_order``, i.e. ``b_k = a_k - sum_{j=1}^{k-1} a_j b_{k-j}``.
    """
    if max_order < 0:
        raise PreconditionError("max_order must be >= 0")
    av = np.zeros(max_order + 1)
    n = min(av.size, a.coeffs.size)
    av[:n] = a.coeffs[:n]
    b = np.zeros(max_order + 1)  # b[0] unused
    for k in range(1, max_order + 1):
        # sum_{j=1}^{k-1} a_j b_{k-j}
        b[k] = av[k] - av[1:k] @ b[k - 1:0:-1]
    return ARCoefficients(b[1:])


def ar_to_wold(b: ARCoefficients, innovation_variance: float = 1.0,
               max_order: int = 0) -> WoldCoefficients:
    """Impulse response of ``1 / (1 - sum b_k z^k)`` up to degree ``max_order``."""
    if not innovation_variance > 0:
        raise PreconditionError("innovation_variance must be positive")
    bv = np.zeros(max_order + 1)
    n = min(max_order, len(b))
    bv[1:n + 1] = b.coeffs[:n]
    a = np.zeros(max_order + 1)
    a[0] = 1.0
    for k in range(1, max_order + 1):
        # b_k + sum_{j=1}^{k-1} b_j a_{k-j}
        a[k] = bv[k] + bv[1:k] @ a[k - 1:0:-1]
    return WoldCoefficients(a, innovation_variance)


def _check_frequency(lam):
    lam = np.asarray(lam, dtype=float)
    if np.any(lam <= -0.5) or np.any(lam > 0.5):
        raise PreconditionError("frequency must lie in (-1/2, 1/2]")
    return lam


def spectral_density(R, lam):
    """``S(lam) = R_0 + 2 sum_{k>=1} R_k cos(2 pi lam k)``.

    ``R`` may be a :class:`CovarianceSequence` or a plain array of lags (used for
    differences of covariances, which need not be PSD). ``lam`` may be an array.
    """
    r = _lags_of(R)
    lam = _check_frequency(lam)
    k = np.arange(1, r.size)
    phase = 2.0 * np.pi * np.multiply.outer(lam, k)
    s = r[0] + 2.0 * (np.cos(phase) @ r[1:])
    return float(s) if np.ndim(s) == 0 else s


def midpoint_grid(grid_size: int) -> np.ndarray:
    """Midpoints of ``grid_size`` equal cells covering ``(-1/2, 1/2]``."""
    return -0.5 + (np.arange(grid_size) + 0.5) / grid_size


def evaluate_spectrum(S: Callable, lam: np.ndarray) -> np.ndarray:
    vals = np.asarray(S(lam))
    if vals.shape != lam.shape:
        vals = np.array([S(float(x)) for x in lam])
    return vals


def _midpoint_coefficient(S, k, grid_size):
    lam = midpoint_grid(grid_size)
    val = np.mean(evaluate_spectrum(S, lam) * np.exp(2j * np.pi * lam * k))
    if abs(val.imag) >= 1e-9:
        raise QuadratureNonConvergence(
            f"inverse transform at lag {k} has imaginary part {val.imag:.3e}"
        )
    return float(val.real)


def covariance_from_spectral(S: Callable, k: int, grid_size: int = DEFAULT_GRID,
                             tol: float = 1e-8) -> float:
    """Midpoint-rule inverse Fourier transform ``int S(lam) exp(2 pi i lam k) dlam``.

    ``S`` should accept an array of frequencies; scalar-only callables are
    evaluated pointwise. The grid is doubled once and the two answers must agree
    within ``tol``.
    """
    if grid_size < 64 or grid_size % 2:
        raise PreconditionError("grid_size must be even and >= 64")
    coarse = _midpoint_coefficient(S, k, grid_size)
    fine = _midpoint_coefficient(S, k, 2 * grid_size)
    if abs(fine - coarse) > tol:
        raise QuadratureNonConvergence(
            f"lag {k}: grid {grid_size} -> {2 * grid_size} moved the result by {abs(fine - coarse):.3e}"
        )
    return fine


def spectrum_of(R) -> Callable:
    """Callable ``lam -> spectral_density(R, lam)``."""
    return lambda lam: spectral_density(R, lam)


# ---------------------------------------------------------------------------
# Specs -> ground truth
# ---------------------------------------------------------------------------


def _impulse_response(spec: ProcessSpec, length: int) -> np.ndarray:
    phi = np.asarray(spec.ar, dtype=float)
    theta = spec.ma_polynomial
    a = np.zeros(length + 1)
    q = phi.size
    for k in range(length + 1):
        acc = theta[k] if k < theta.size else 0.0
        m = min(k, q)
        if m:
            acc += phi[:m] @ a[k - m:k][::-1]
        a[k] = acc
    return a


def _search_length(spec: ProcessSpec, tol: float) -> int:
    rho = spec.decay_rate
    finite = len(spec.ma)
    if rho == 0.0:
        return finite
    extra = math.log(tol * 1e-8) / math.log(rho)
    return min(_MAX_PREFIX, int(math.ceil(extra)) + 50 * (len(spec.ar) + len(spec.ma)) + 100)


def _tail_sums(a: np.ndarray, rho: float) -> np.ndarray:
    """``tails[L] = sum_{k>L} |a_k|`` over the computed range plus an extrapolated remainder."""
    absa = np.abs(a)
    suffix = np.concatenate([np.cumsum(absa[::-1])[::-1][1:], [0.0]])
    if rho > 0:
        window = absa[-min(10, absa.size):].max()
        suffix = suffix + window * rho / (1.0 - rho)
    return suffix


def _check_wold_available(spec: ProcessSpec):
    if spec.kind is ProcessKind.RAW_COVARIANCE:
        raise NotAvailable("Wold coefficients are not available for a raw covariance spec")
    roots = _poly_roots(spec.ma_polynomial)
    if roots.size and np.min(np.abs(roots)) < 1.0:
        raise NonInvertible(
            f"MA polynomial has a root of modulus {np.min(np.abs(roots)):.6g} < 1; "
            "its impulse response is not the Wold decomposition"
        )


def wold_prefix_length(spec: ProcessSpec, tol: float = DEFAULT_TAIL_TOL) -> int:
    """Smallest K with ``sum_{k>K} |a_k| < tol`` for the spec's impulse response."""
    _check_wold_available(spec)
    length = _search_length(spec, tol)
    a = _impulse_response(spec, length)
    tails = _tail_sums(a, spec.decay_rate)
    below = np.nonzero(tails < tol)[0]
    if below.size == 0:
        raise PreconditionError(f"Wold tail does not fall below {tol} within {_MAX_PREFIX} terms")
    return int(below[0])


def wold_from_spec(spec: ProcessSpec, max_order: int | None = None) -> WoldCoefficients:
    """Impulse response ``a_0..a_max_order`` of the spec's ARMA filter.

    With ``max_order=None`` the prefix length comes from :func:`wold_prefix_length`.
    """
    _check_wold_available(spec)
    if max_order is None:
        max_order = wold_prefix_length(spec)
    length = max(max_order, _search_length(spec, DEFAULT_TAIL_TOL))
    a = _impulse_response(spec, length)
    tail = float(_tail_sums(a, spec.decay_rate)[max_order])
    return WoldCoefficients(a[:max_order + 1], spec.innovation_variance, tail)


@dataclass(frozen=True, eq=False)
class ProcessTruth:
    """Every representation of a spec's process, on matching prefixes.

    ``wold`` and ``ar`` are ``None`` for raw covariance specs.
    """

    spec: ProcessSpec
    covariance: CovarianceSequence
    wold: WoldCoefficients | None = None
    ar: ARCoefficients | None = None

    @property
    def max_lag(self) -> int:
        return self.covariance.max_lag

    def predictable_covariance(self, max_lag: int | None = None) -> np.ndarray:
        """Covariance of ``X_n - nu_n = sum_k b_k X_{n-k}``: ``R_k - sigma^2 a_|k|``."""
        if self.wold is None:
            raise NotAvailable("predictable part is not available for a raw covariance spec")
        if max_lag is None:
            max_lag = self.max_lag
        r = self.covariance.extended(max_lag)
        a = np.zeros(max_lag + 1)
        n = min(a.size, self.wold.coeffs.size)
        a[:n] = self.wold.coeffs[:n]
        return r - self.wold.innovation_variance * a


def process_truth(spec: ProcessSpec, min_lag: int = 0,
                  tol: float = DEFAULT_TAIL_TOL) -> ProcessTruth:
    """Expand ``spec`` into covariance, Wold and AR prefixes.

    The Wold prefix is long enough that its dropped l1 tail is below ``tol``;
    covariances are those of the truncated filter, stored out to
    ``max(prefix, min_lag)`` lags (they vanish beyond the prefix).
    """
    if spec.kind is ProcessKind.RAW_COVARIANCE:
        return ProcessTruth(spec, read_covariance_csv(spec.covariance_file))
    length = wold_prefix_length(spec, tol)
    a = wold_from_spec(spec, length)
    max_lag = max(length, min_lag)
    R = covariance_from_wold(a, max_lag)
    b = wold_to_ar(a, max_lag)
    return ProcessTruth(spec, R, a, b)


# ---------------------------------------------------------------------------
# File formats
# ---------------------------------------------------------------------------


def read_covariance_csv(path) -> CovarianceSequence:
    """Read ``k,R_k`` lines (k = 0, 1, 2, ... in order, no header)."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise SpecParseError(f"cannot read covariance file {path}: {exc}", "covariance_file") from exc
    lags = []
    for lineno, row in enumerate(csv.reader(text.splitlines()), start=1):
        if not row or not "".join(row).strip():
            continue
        if len(row) != 2:
            raise SpecParseError(f"{path}:{lineno}: expected 'k,R_k'", "covariance_file")
        try:
            k = int(row[0])
            value = float(row[1])
        except ValueError as exc:
            raise SpecParseError(f"{path}:{lineno}: {exc}", "covariance_file") from exc
        if k != len(lags):
            raise SpecParseError(
                f"{path}:{lineno}: expected lag {len(lags)}, got {k}", "covariance_file"
            )
        lags.append(value)
    if not lags:
        raise SpecParseError(f"{path}: no covariance lags", "covariance_file")
    try:
        return CovarianceSequence(lags)
    except InvalidCovariance as exc:
        raise SpecParseError(f"{path}: {exc}", "covariance_file") from exc


def write_covariance_csv(R: CovarianceSequence, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        for k, v in enumerate(R.lags):
            w.writerow([k, repr(float(v))])


def _number_list(obj, name) -> list:
    value = obj.get(name, [])
    if not isinstance(value, list) or not all(
        isinstance(x, (int, float)) and not isinstance(x, bool) for x in value
    ):
        raise SpecParseError(f"'{name}' must be a list of numbers", name)
    return value


def spec_from_dict(obj: dict, base_dir: Path | None = None) -> ProcessSpec:
    if not isinstance(obj, dict):
        raise SpecParseError("spec must be a JSON object")
    try:
        kind = ProcessKind(obj.get("kind"))
    except ValueError:
        raise SpecParseError(
            f"'kind' must be one of {[k.value for k in ProcessKind]}, got {obj.get('kind')!r}", "kind"
        ) from None
    ar = _number_list(obj, "ar")
    ma = _number_list(obj, "ma")
    var = obj.get("innovation_variance", 1.0)
    if isinstance(var, bool) or not isinstance(var, (int, float)) or not var > 0:
        raise SpecParseError("'innovation_variance' must be a positive number", "innovation_variance")
    cov_file = obj.get("covariance_file")
    if kind is ProcessKind.RAW_COVARIANCE:
        if not isinstance(cov_file, str):
            raise SpecParseError("'covariance_file' is required for kind 'covariance'", "covariance_file")
        cov_file = Path(cov_file)
        if base_dir is not None and not cov_file.is_absolute():
            cov_file = base_dir / cov_file
    else:
        cov_file = None
    try:
        return ProcessSpec(kind, tuple(ar), tuple(ma), float(var), cov_file)
    except NonStationary as exc:
        raise SpecParseError(str(exc), "ar") from exc
    except ValueError as exc:
        raise SpecParseError(str(exc), "kind") from exc


def load_spec(path) -> ProcessSpec:
    """Parse a JSON process spec; relative ``covariance_file`` paths resolve
    against the spec's directory."""
    path = Path(path)
    try:
        obj = json.loads(path.read_text())
    except OSError as exc:
        raise SpecParseError(f"cannot read spec {path}: {exc}", "spec") from exc
    except json.JSONDecodeError as exc:
        raise SpecParseError(f"{path}: invalid JSON: {exc}", "spec") from exc
    return spec_from_dict(obj, path.parent)


def spec_to_dict(spec: ProcessSpec) -> dict:
    out = {"kind": spec.kind.value, "ar": list(spec.ar), "ma": list(spec.ma),
           "innovation_variance": spec.innovation_variance}
    if spec.covariance_file is not None:
        out["covariance_file"] = str(spec.covariance_file)
    return out
