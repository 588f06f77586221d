"""relcov: relative covariate effects on survival margins under unknown
dependent censoring or competing risks.

The identifiable target is the ratio of the two partial covariate effects
on the risk-of-interest margin.  The package provides the nonparametric
kernel estimators of that ratio, copula-based competing-risks data
generators, (semi)parametric single-index baselines, closed-form and
quadrature reference values, cross-validated bandwidth selection, and a
bootstrap specification test, plus a CLI and a Monte Carlo campaign
harness.
"""

from .copulas import CopulaModel, cdf, conditional_inverse, partial1, tau_to_theta
from .datagen import (Dataset, SingleIndexDGP, TwoHazardsDGP, WeibullMargin,
                      risk_share, sample_single_index, sample_two_hazards)
from .errors import ConfigurationError, DataFormatError, EstimationError, NumericalError
from .estimators import (EtaEstimate, GridSpec, TrimConfig, conditional_hazard,
                         eta_bar, eta_lambda_bar, eta_m_at, eta_m_at_means, eta_pi_bar,
                         nelson_aalen, nelson_aalen_deriv_x, nelson_aalen_deriv_y,
                         nw_mean, nw_mean_deriv_x, nw_mean_deriv_y,
                         survival_deriv_x, survival_deriv_y, survival_nw)
from .baselines import RegressionFit, coeff_ratio, fit_cox, fit_po, fit_weibull_aft
from .inference import CVConfig, CVResult, TestResult, bootstrap_spec_test, cv_bandwidth
from .kernels import (EPANECHNIKOV, Kernel, KernelConfig, epanechnikov, epanechnikov_deriv,
                      scaled_weight, scaled_weight_deriv_x, scaled_weight_deriv_y)
from .harness import CampaignConfig, CampaignResult, emit_table, estimate_file, load_dataset, run_campaign
from . import oracle

__version__ = "0.1.0"

__all__ = [
    "CopulaModel", "cdf", "partial1", "conditional_inverse", "tau_to_theta",
    "Dataset", "WeibullMargin", "SingleIndexDGP", "TwoHazardsDGP",
    "sample_single_index", "sample_two_hazards", "risk_share",
    "KernelConfig", "Kernel", "EPANECHNIKOV", "epanechnikov", "epanechnikov_deriv",
    "scaled_weight", "scaled_weight_deriv_x", "scaled_weight_deriv_y",
    "GridSpec", "TrimConfig", "EtaEstimate",
    "conditional_hazard", "nelson_aalen", "survival_nw",
    "survival_deriv_x", "survival_deriv_y", "nelson_aalen_deriv_x", "nelson_aalen_deriv_y",
    "nw_mean", "nw_mean_deriv_x", "nw_mean_deriv_y",
    "eta_pi_bar", "eta_lambda_bar", "eta_m_at", "eta_m_at_means", "eta_bar",
    "RegressionFit", "fit_cox", "fit_weibull_aft", "fit_po", "coeff_ratio",
    "CVConfig", "CVResult", "cv_bandwidth", "TestResult", "bootstrap_spec_test",
    "CampaignConfig", "CampaignResult", "run_campaign", "estimate_file", "emit_table",
    "load_dataset", "oracle",
    "ConfigurationError", "DataFormatError", "NumericalError", "EstimationError",
]
