"""Finite-order moving-average and autoregressive approximations of regular
wide-sense-stationary processes, and numerical checks of how their spectral
densities converge (at the origin and in L2) as the order grows."""

__version__ = "0.1.0"

from .errors import (
    Breakdown,
    InvalidCovariance,
    NearUnitRoot,
    NonInvertible,
    NonStationary,
    NotAvailable,
    PreconditionError,
    QuadratureNonConvergence,
    SingularSystem,
    SpecParseError,
    WSSApproxError,
)
from .predictor import ARPredictor, baxter_gap, levinson_durbin, sigma_limit_check, yule_walker_dense
from .process_model import (
    ARCoefficients,
    CovarianceSequence,
    ProcessKind,
    ProcessSpec,
    WoldCoefficients,
    ar_to_wold,
    covariance_from_spectral,
    covariance_from_wold,
    load_spec,
    process_truth,
    spectral_density,
    wold_from_spec,
    wold_to_ar,
)
from .simulation import (
    SamplePath,
    TavcEstimate,
    clt_experiment,
    fit_ar,
    sample_autocovariance,
    simulate_arma,
    tavc_ar_estimate,
    tavc_batch_means,
)
from .spectral_analysis import (
    ConvergenceRow,
    convergence_report,
    l2_distance_parseval,
    l2_distance_quadrature,
    ma_truncation_spectrum,
    predictor_covariance,
    predictor_spectrum,
    predictor_spectrum_origin,
    tavc_ar_model,
    tavc_true,
)
