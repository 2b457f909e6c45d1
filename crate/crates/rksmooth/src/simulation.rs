//! Seeded generation of repeated-measurement datasets Y_j(t_i) = g(t_i) +
//! eps_j(t_i) with Gaussian error processes, the benchmark growth curves,
//! Monte Carlo averaging, and the empirical normality diagnostic.
//!
//! Determinism contract: unit j of a dataset draws from the ChaCha8 stream
//! seeded with `seed ^ j`, so unit generation is order-independent;
//! replication r of a Monte Carlo run derives its dataset seed by a
//! SplitMix64 hash of (seed, r). Identical scenario (including seed) gives
//! bitwise identical output.

use std::fmt;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use thiserror::Error;

use crate::covariance::{CovarianceError, CovarianceModel};
use crate::designs::{midpoint_design, regular_uniform_design, DesignError, DesignGrid};
use crate::estimators::{build_smoother, EdgeCorrection, EstimatorError, Method};
use crate::kernels::KernelSpec;
use crate::quad::simpson_uniform;

#[derive(Debug, Error)]
pub enum SimulationError {
    #[error(transparent)]
    Covariance(#[from] CovarianceError),
    #[error(transparent)]
    Design(#[from] DesignError),
    #[error(transparent)]
    Estimator(#[from] EstimatorError),
    #[error("scenario needs {what} >= {min}, got {got}")]
    BadParameter { what: &'static str, min: usize, got: usize },
}

type CurveFn = dyn Fn(f64) -> f64 + Send + Sync;

/// The benchmark regression curves.
#[derive(Clone)]
pub enum GrowthCurve {
    /// g(x) = 10x^3 - 15x^4 + 6x^5.
    M1,
    /// g(x) = x + 0.5 exp(-80 (x - 0.5)^2).
    M2,
    Custom {
        value: Arc<CurveFn>,
        second_derivative: Option<Arc<CurveFn>>,
    },
}

impl fmt::Debug for GrowthCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::M1 => f.write_str("M1"),
            Self::M2 => f.write_str("M2"),
            Self::Custom { .. } => f.write_str("Custom"),
        }
    }
}

impl GrowthCurve {
    pub fn value(&self, x: f64) -> f64 {
        match self {
            Self::M1 => 10.0 * x.powi(3) - 15.0 * x.powi(4) + 6.0 * x.powi(5),
            Self::M2 => x + 0.5 * (-80.0 * (x - 0.5).powi(2)).exp(),
            Self::Custom { value, .. } => value(x),
        }
    }

    /// g''(x); analytic for M1/M2, a central difference for custom curves
    /// without a supplied second derivative.
    pub fn second_derivative(&self, x: f64) -> f64 {
        match self {
            Self::M1 => 60.0 * x - 180.0 * x.powi(2) + 120.0 * x.powi(3),
            Self::M2 => {
                let u = x - 0.5;
                let e = (-80.0 * u * u).exp();
                e * (12800.0 * u * u - 80.0)
            }
            Self::Custom { value, second_derivative } => match second_derivative {
                Some(g2) => g2(x),
                None => {
                    let d = 1e-4;
                    (value(x + d) - 2.0 * value(x) + value(x - d)) / (d * d)
                }
            },
        }
    }
}

/// Which design constructor a scenario uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DesignKind {
    /// t_i = (i - 0.5)/n.
    Midpoint,
    /// t_i = i/n.
    RegularUniform,
}

impl DesignKind {
    pub fn build(&self, n: usize) -> Result<DesignGrid, DesignError> {
        match self {
            DesignKind::Midpoint => midpoint_design(n),
            DesignKind::RegularUniform => regular_uniform_design(n),
        }
    }
}

/// Bandwidth specification of a scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BandwidthChoice {
    Fixed(f64),
    /// Resolve by minimizing the exact IMSE (done by the caller via the risk
    /// module so this module stays independent of it).
    OptimalExact,
}

/// A fully specified simulation setup.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub curve: GrowthCurve,
    pub model: CovarianceModel,
    pub n: usize,
    pub m: usize,
    pub design: DesignKind,
    pub kernel: KernelSpec,
    pub bandwidth: BandwidthChoice,
    pub replications: usize,
    pub seed: u64,
}

impl Scenario {
    fn validate(&self) -> Result<(), SimulationError> {
        if self.n < 2 {
            return Err(SimulationError::BadParameter { what: "n", min: 2, got: self.n });
        }
        if self.m < 1 {
            return Err(SimulationError::BadParameter { what: "m", min: 1, got: self.m });
        }
        if self.replications < 1 {
            return Err(SimulationError::BadParameter {
                what: "replications",
                min: 1,
                got: self.replications,
            });
        }
        Ok(())
    }
}

/// One generated dataset: the design, the per-point averages over the m
/// units, and optionally the raw m x n matrix.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub design: DesignGrid,
    pub ybar: Vec<f64>,
    pub raw: Option<Vec<Vec<f64>>>,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for replication `rep` of a run rooted at `seed`.
pub fn replication_seed(seed: u64, rep: u64) -> u64 {
    splitmix64(seed ^ splitmix64(rep.wrapping_add(1)))
}

/// Draws m independent paths of the centered Gaussian process with the given
/// Gram covariance: row j is L z_j with z_j standard normal, where L is the
/// Cholesky factor. Unit j uses the stream seeded with `seed ^ j`.
pub fn sample_gp(
    model: &CovarianceModel,
    design: &DesignGrid,
    m: usize,
    seed: u64,
) -> Result<Vec<Vec<f64>>, SimulationError> {
    let gram = model.gram(design);
    let l = gram.cholesky()?;
    let n = design.n();
    let rows = (0..m)
        .map(|j| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ j as u64);
            let z: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
            let mut row = vec![0.0; n];
            for i in 0..n {
                let mut acc = 0.0;
                for k in 0..=i {
                    acc += l[i * n + k] * z[k];
                }
                row[i] = acc;
            }
            row
        })
        .collect();
    Ok(rows)
}

/// Generates one dataset from a scenario: per-unit error paths added to the
/// regression curve, averaged over units in fixed index order.
pub fn make_dataset(scenario: &Scenario) -> Result<Dataset, SimulationError> {
    scenario.validate()?;
    let design = scenario.design.build(scenario.n)?;
    let errors = sample_gp(&scenario.model, &design, scenario.m, scenario.seed)?;
    let n = design.n();
    let g: Vec<f64> = design.points().iter().map(|&t| scenario.curve.value(t)).collect();
    let raw: Vec<Vec<f64>> = errors
        .into_iter()
        .map(|row| row.iter().zip(&g).map(|(e, gv)| e + gv).collect())
        .collect();
    let mut ybar = vec![0.0; n];
    for row in &raw {
        for (acc, v) in ybar.iter_mut().zip(row) {
            *acc += v;
        }
    }
    for v in &mut ybar {
        *v /= scenario.m as f64;
    }
    Ok(Dataset {
        design,
        ybar,
        raw: Some(raw),
    })
}

/// Result of a Monte Carlo risk run.
#[derive(Debug, Clone)]
pub struct MonteCarloMise {
    /// Average over replications of the integrated squared error.
    pub empirical_mise: f64,
    /// Per-replication integrated squared errors.
    pub per_rep_ise: Vec<f64>,
    /// Grid of x values.
    pub grid: Vec<f64>,
    /// Mean estimated curve over replications, per grid point.
    pub mean_curve: Vec<f64>,
    /// The seed the run was rooted at.
    pub seed: u64,
}

impl MonteCarloMise {
    /// Monte Carlo standard error of the empirical MISE.
    pub fn standard_error(&self) -> f64 {
        let r = self.per_rep_ise.len();
        if r < 2 {
            return f64::INFINITY;
        }
        let mean = self.empirical_mise;
        let var = self
            .per_rep_ise
            .iter()
            .map(|v| (v - mean) * (v - mean))
            .sum::<f64>()
            / (r as f64 - 1.0);
        (var / r as f64).sqrt()
    }
}

/// Runs `scenario.replications` simulations of the chosen method at a fixed
/// bandwidth and reports the empirical MISE and the mean curve.
///
/// Replications run in parallel but are independently seeded and reduced in
/// index order, so the output is bit-stable regardless of thread schedule.
pub fn monte_carlo_mise(
    scenario: &Scenario,
    method: Method,
    h: f64,
    edge: EdgeCorrection,
    grid_size: usize,
) -> Result<MonteCarloMise, SimulationError> {
    scenario.validate()?;
    let design = scenario.design.build(scenario.n)?;
    let grid: Vec<f64> = (0..grid_size)
        .map(|i| i as f64 / (grid_size as f64 - 1.0))
        .collect();
    let weights: Vec<Vec<f64>> = grid
        .par_iter()
        .map(|&x| {
            build_smoother(method, &scenario.model, &scenario.kernel, &design, x, h, edge)
                .map(|sm| sm.weights)
        })
        .collect::<Result<_, _>>()?;
    let g_grid: Vec<f64> = grid.iter().map(|&x| scenario.curve.value(x)).collect();
    let step = grid[1] - grid[0];

    let curves: Vec<Vec<f64>> = (0..scenario.replications)
        .into_par_iter()
        .map(|rep| {
            let mut rep_scenario = scenario.clone();
            rep_scenario.seed = replication_seed(scenario.seed, rep as u64);
            rep_scenario.replications = 1;
            let data = make_dataset(&rep_scenario)?;
            Ok(weights
                .iter()
                .map(|w| w.iter().zip(&data.ybar).map(|(a, b)| a * b).sum::<f64>())
                .collect())
        })
        .collect::<Result<_, SimulationError>>()?;

    let per_rep_ise: Vec<f64> = curves
        .iter()
        .map(|c| {
            let sq: Vec<f64> = c.iter().zip(&g_grid).map(|(e, g)| (e - g) * (e - g)).collect();
            simpson_uniform(&sq, step)
        })
        .collect();
    let empirical_mise = per_rep_ise.iter().sum::<f64>() / per_rep_ise.len() as f64;
    let mut mean_curve = vec![0.0; grid.len()];
    for c in &curves {
        for (acc, v) in mean_curve.iter_mut().zip(c) {
            *acc += v;
        }
    }
    for v in &mut mean_curve {
        *v /= curves.len() as f64;
    }
    Ok(MonteCarloMise {
        empirical_mise,
        per_rep_ise,
        grid,
        mean_curve,
        seed: scenario.seed,
    })
}

/// Outcome of the asymptotic-normality diagnostic.
#[derive(Debug, Clone, Copy)]
pub struct NormalityReport {
    /// Kolmogorov-Smirnov distance between the standardized replicates and
    /// the standard normal distribution.
    pub statistic: f64,
    /// 1.63 / sqrt(replications), the alpha ~ 0.01 KS band.
    pub threshold: f64,
    pub pass: bool,
    pub replications: usize,
}

/// Abramowitz-Stegun 7.1.26 error function (|error| < 1.5e-7), plenty for a
/// KS threshold of order 5e-2.
fn erf(x: f64) -> f64 {
    let sign = if x < 0.0 { -1.0 } else { 1.0 };
    let x = x.abs();
    let t = 1.0 / (1.0 + 0.3275911 * x);
    let y = 1.0
        - (((((1.061405429 * t - 1.453152027) * t) + 1.421413741) * t - 0.284496736) * t
            + 0.254829592)
            * t
            * (-x * x).exp();
    sign * y
}

fn standard_normal_cdf(z: f64) -> f64 {
    0.5 * (1.0 + erf(z / std::f64::consts::SQRT_2))
}

/// Kolmogorov-Smirnov distance of a sample against the standard normal.
fn ks_distance(sample: &mut [f64]) -> f64 {
    sample.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sample.len() as f64;
    let mut d = 0.0f64;
    for (i, &z) in sample.iter().enumerate() {
        let cdf = standard_normal_cdf(z);
        d = d.max((cdf - i as f64 / n).abs());
        d = d.max(((i as f64 + 1.0) / n - cdf).abs());
    }
    d
}

/// Simulates sqrt(m) (g_hat(x) - g(x)) / sqrt(R(x,x)) over the scenario's
/// replications with the projection estimator and tests it against the
/// standard normal via Kolmogorov-Smirnov. The bandwidth defaults to
/// m^{-1/3} unless the scenario fixes one.
pub fn normality_diagnostic(
    scenario: &Scenario,
    x: f64,
    edge: EdgeCorrection,
) -> Result<NormalityReport, SimulationError> {
    scenario.validate()?;
    let h = match scenario.bandwidth {
        BandwidthChoice::Fixed(h) => h,
        BandwidthChoice::OptimalExact => (scenario.m as f64).powf(-1.0 / 3.0),
    };
    let design = scenario.design.build(scenario.n)?;
    let sm = build_smoother(
        Method::ProjectionExact,
        &scenario.model,
        &scenario.kernel,
        &design,
        x,
        h,
        edge,
    )?;
    let gx = scenario.curve.value(x);
    let rxx = scenario.model.eval_cov(x, x)?;
    let scale = (scenario.m as f64).sqrt() / rxx.sqrt();
    let mut sample: Vec<f64> = (0..scenario.replications)
        .into_par_iter()
        .map(|rep| {
            let mut rep_scenario = scenario.clone();
            rep_scenario.seed = replication_seed(scenario.seed, rep as u64);
            rep_scenario.replications = 1;
            let data = make_dataset(&rep_scenario)?;
            let est: f64 = sm.weights.iter().zip(&data.ybar).map(|(a, b)| a * b).sum();
            Ok(scale * (est - gx))
        })
        .collect::<Result<_, SimulationError>>()?;
    let statistic = ks_distance(&mut sample);
    let threshold = 1.63 / (scenario.replications as f64).sqrt();
    Ok(NormalityReport {
        statistic,
        threshold,
        pass: statistic < threshold,
        replications: scenario.replications,
    })
}
