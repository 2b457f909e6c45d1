//! Nonparametric regression from repeated correlated measurements.
//!
//! The data model is the fixed-design growth-curve setup: m independent
//! experimental units are observed on a common grid of n points,
//! Y_j(t_i) = g(t_i) + eps_j(t_i), where the error process has a known
//! autocovariance R. The headline estimator projects the kernel-smoothing
//! representer onto the span of {R(., t_i)} in the reproducing kernel Hilbert
//! space of R, which amounts to weights m' = f' R^{-1} on the averaged
//! observations. Classical comparators (Gasser-Muller, Priestley-Chao,
//! Cheng-Lin) and an asymptotic weight approximation are built on the same
//! `LinearSmoother` representation so exact bias/variance/IMSE can be
//! evaluated uniformly for all of them.
//!
//! Modules:
//! - [`covariance`]: autocovariance models, Gram matrices, O(n) fast solves;
//! - [`kernels`]: kernels, moment constants, the scaled kernel and edge modes;
//! - [`designs`]: sampling grids and window machinery;
//! - [`estimators`]: weight vectors for every smoother;
//! - [`risk`]: exact and asymptotic risk, bandwidth selection;
//! - [`simulation`]: seeded Gaussian-process simulation and Monte Carlo runs;
//! - [`cli`]: the command-line front end (estimate/risk/bandwidth/bench/figure).

pub mod cli;
pub mod covariance;
pub mod designs;
pub mod estimators;
pub mod kernels;
pub mod quad;
pub mod risk;
pub mod simulation;

pub use covariance::{CovarianceError, CovarianceModel, GramMatrix};
pub use designs::{midpoint_design, regular_design, regular_uniform_design, DesignGrid};
pub use estimators::{
    asymptotic_projection_weights, build_smoother, cheng_lin_weights, estimate, gm_weights,
    priestley_chao_weights, projection_ou_closed, projection_weights, projection_wiener_closed,
    representer, EdgeCorrection, LinearSmoother, Method,
};
pub use kernels::{quartic_kernel, uniform_kernel, BoundaryMode, KernelSpec, ScaledKernel};
pub use risk::{
    asymptotic_constants, asymptotic_imse, exact_bias, exact_variance, optimal_bandwidth_closed,
    optimal_bandwidth_exact, residual_norm2, risk_report, sigma2_xh, variance_gap_limit,
    AsymptoticRisk, HoptVariant, ImseFlavor, RiskReport, WeightDensity,
};
pub use simulation::{
    make_dataset, monte_carlo_mise, normality_diagnostic, sample_gp, BandwidthChoice, Dataset,
    DesignKind, GrowthCurve, Scenario,
};
