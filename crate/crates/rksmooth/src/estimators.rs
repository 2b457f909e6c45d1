//! Weight construction for all linear smoothers: the RKHS projection
//! estimator (dense solve, O(n) closed forms, asymptotic approximation) and
//! the classical comparators (Gasser-Muller, Priestley-Chao, Cheng-Lin).
//!
//! Every estimator here is linear in the averaged observations: g_hat(x) =
//! sum_i w_i(x) ybar(t_i). Weights are materialized explicitly so the exact
//! risk machinery can evaluate w' R w and bias sums for any method.

use thiserror::Error;

use crate::covariance::{CovarianceError, CovarianceModel};
use crate::designs::DesignGrid;
use crate::kernels::{BoundaryMode, KernelSpec, ScaledKernel};
use crate::quad::{gl32, integrate_adaptive, integrate_gl, QuadratureError};

#[derive(Debug, Error)]
pub enum EstimatorError {
    #[error(transparent)]
    Covariance(#[from] CovarianceError),
    #[error(transparent)]
    Kernel(#[from] crate::kernels::KernelError),
    #[error("representer quadrature failed: {0}")]
    Quadrature(#[from] QuadratureError),
    #[error("method {method:?} requires a {requires} covariance model")]
    ModelMismatch {
        method: Method,
        requires: &'static str,
    },
    #[error("closed form needs at least {needed} design points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("length mismatch: weights {weights}, data {data}")]
    LengthMismatch { weights: usize, data: usize },
}

/// The linear smoothers this crate knows how to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Projection weights from the dense Gram solve.
    ProjectionExact,
    /// Projection via the generalized-Wiener telescoping sums.
    ProjectionWienerClosed,
    /// Projection via the Ornstein-Uhlenbeck five-term expression.
    ProjectionOuClosed,
    /// Interior-rule approximation of the projection weights.
    ProjectionAsymptotic,
    GasserMuller,
    PriestleyChao,
    ChengLin,
}

impl Method {
    /// CLI spelling of the method.
    pub fn cli_name(&self) -> &'static str {
        match self {
            Method::ProjectionExact => "pro",
            Method::ProjectionWienerClosed | Method::ProjectionOuClosed => "pro-fast",
            Method::ProjectionAsymptotic => "pro-asym",
            Method::GasserMuller => "gm",
            Method::PriestleyChao => "pc",
            Method::ChengLin => "cl",
        }
    }

    /// Resolves a CLI name against a model ("pro-fast" picks the closed form
    /// that matches the model family).
    pub fn from_cli_name(name: &str, model: &CovarianceModel) -> Option<Method> {
        match name {
            "pro" => Some(Method::ProjectionExact),
            "pro-fast" => match model {
                CovarianceModel::GeneralizedWiener { .. } => Some(Method::ProjectionWienerClosed),
                CovarianceModel::OrnsteinUhlenbeck { .. } => Some(Method::ProjectionOuClosed),
                CovarianceModel::Custom { .. } => None,
            },
            "pro-asym" => Some(Method::ProjectionAsymptotic),
            "gm" => Some(Method::GasserMuller),
            "pc" => Some(Method::PriestleyChao),
            "cl" => Some(Method::ChengLin),
            _ => None,
        }
    }

    pub const CLI_NAMES: [&'static str; 6] = ["pro", "pro-fast", "pro-asym", "gm", "pc", "cl"];
}

/// Edge handling applied when building weights.
///
/// `RenormalizeKernel` renormalizes phi itself (mass one over [0, 1]);
/// `NormalizeWeightSum` builds weights from the raw kernel and divides the
/// vector by its sum, which is the protocol behind the published benchmark
/// tables (identical to kernel renormalization for the integral-type
/// weights, and the authentic variant for the projection estimator).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EdgeCorrection {
    None,
    RenormalizeKernel,
    #[default]
    NormalizeWeightSum,
}

impl EdgeCorrection {
    pub fn cli_name(&self) -> &'static str {
        match self {
            EdgeCorrection::None => "none",
            EdgeCorrection::RenormalizeKernel => "renorm",
            EdgeCorrection::NormalizeWeightSum => "wsum",
        }
    }

    pub fn from_cli_name(name: &str) -> Option<Self> {
        match name {
            "none" => Some(EdgeCorrection::None),
            "renorm" => Some(EdgeCorrection::RenormalizeKernel),
            "wsum" => Some(EdgeCorrection::NormalizeWeightSum),
            _ => None,
        }
    }

    fn boundary_mode(&self) -> BoundaryMode {
        match self {
            EdgeCorrection::RenormalizeKernel => BoundaryMode::CutAndRenormalize,
            _ => BoundaryMode::None,
        }
    }
}

/// A per-point weight vector w(x) tagged with its method.
#[derive(Debug, Clone)]
pub struct LinearSmoother {
    pub method: Method,
    pub x: f64,
    pub h: f64,
    pub weights: Vec<f64>,
}

impl LinearSmoother {
    /// g_hat(x) = w . ybar.
    pub fn estimate(&self, ybar: &[f64]) -> Result<f64, EstimatorError> {
        estimate(self, ybar)
    }

    pub fn weight_sum(&self) -> f64 {
        self.weights.iter().sum()
    }

    fn normalized(mut self) -> Self {
        let s = self.weight_sum();
        if s.abs() > 1e-300 {
            for w in &mut self.weights {
                *w /= s;
            }
        }
        self
    }
}

/// Samples of the representer f_{x,h}(t) = int_0^1 R(s, t) phi_{x,h}(s) ds on
/// the design.
#[derive(Debug, Clone)]
pub struct RepresenterSamples {
    pub values: Vec<f64>,
    pub x: f64,
    pub h: f64,
}

/// Integral of w(s) * phi(s) over [a, b] (clipped to the support of phi) by
/// 32-node Gauss-Legendre. The integrand is smooth on the clipped interval
/// because phi's edge kinks sit exactly at the support boundary.
fn integrate_phi_weighted<W: Fn(f64) -> f64>(sk: &ScaledKernel, a: f64, b: f64, w: W) -> f64 {
    let (lo, hi) = sk.support();
    let a = a.max(lo);
    let b = b.min(hi);
    if b <= a {
        return 0.0;
    }
    integrate_gl(|s| w(s) * sk.phi(s), a, b, gl32())
}

/// Evaluates the representer at a single point t.
fn representer_at(
    model: &CovarianceModel,
    sk: &ScaledKernel,
    design: &DesignGrid,
    t: f64,
) -> Result<f64, EstimatorError> {
    let (lo, hi) = sk.support();
    Ok(match model {
        CovarianceModel::GeneralizedWiener { beta, sigma2 } => {
            // f(t) = sigma2/(beta+1) [ int_0^t s^{beta+1} phi + t^{beta+1} int_t^1 phi ].
            let p = beta + 1.0;
            let head = integrate_phi_weighted(sk, lo, t.min(hi), |s| s.powf(p));
            let tail = t.powf(p) * sk.integral(t, 1.0);
            sigma2 / p * (head + tail)
        }
        CovarianceModel::OrnsteinUhlenbeck { lambda, sigma2 } => {
            let head = integrate_phi_weighted(sk, lo, t.min(hi), |s| (lambda * (s - t)).exp());
            let tail = integrate_phi_weighted(sk, t.max(lo), hi, |s| (-lambda * (s - t)).exp());
            sigma2 * (head + tail)
        }
        CovarianceModel::Custom { eval, .. } => {
            // Panels split at the diagonal kink s = t and at every design
            // point inside the window; each piece is integrated adaptively.
            let mut cuts = vec![lo];
            for &p in design.points() {
                if p > lo && p < hi {
                    cuts.push(p);
                }
            }
            if t > lo && t < hi {
                cuts.push(t);
            }
            cuts.push(hi);
            cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let mut acc = 0.0;
            for pair in cuts.windows(2) {
                let f = |s: f64| eval(s, t) * sk.phi(s);
                acc += integrate_adaptive(&f, pair[0], pair[1], 1e-12, 2048)?;
            }
            acc
        }
    })
}

/// f_{x,h} sampled at every design point; closed forms for the built-in
/// families, adaptive panel quadrature otherwise.
pub fn representer(
    model: &CovarianceModel,
    sk: &ScaledKernel,
    design: &DesignGrid,
) -> Result<RepresenterSamples, EstimatorError> {
    let values = design
        .points()
        .iter()
        .map(|&t| representer_at(model, sk, design, t))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(RepresenterSamples {
        values,
        x: sk.x(),
        h: sk.h(),
    })
}

/// Projection weights m_{x,h} solving R_{|T_n} m = f_{x,h}|T_n.
pub fn projection_weights(
    model: &CovarianceModel,
    sk: &ScaledKernel,
    design: &DesignGrid,
    fast: bool,
) -> Result<LinearSmoother, EstimatorError> {
    let f = representer(model, sk, design)?;
    let gram = model.gram(design);
    let weights = gram.solve(&f.values, fast)?;
    Ok(LinearSmoother {
        method: Method::ProjectionExact,
        x: sk.x(),
        h: sk.h(),
        weights,
    })
}

/// Projection weights for the generalized Wiener model assembled from the
/// telescoped interval integrals (the augmented grid carries t_0 = 0,
/// t_{n+1} = 1, the virtual observation ybar(t_{n+1}) = ybar(t_n) is folded
/// into the last weight, and ybar(t_0) = 0).
///
/// Note on the printed closed form: its global 1/(beta+1) prefactor is
/// inconsistent with the Gram-solve definition for beta > 0 (the telescoping
/// identity it is derived from needs increments of R(t,t) itself in the
/// denominators); the assembled weights below match the dense solve to
/// machine precision for all beta, which is the contract.
pub fn projection_wiener_closed_weights(
    beta: f64,
    sk: &ScaledKernel,
    design: &DesignGrid,
) -> Result<LinearSmoother, EstimatorError> {
    let n = design.n();
    let p = beta + 1.0;
    // P_i = int_{t_{i-1}}^{t_i} phi for i = 1..n+1 on the augmented grid.
    let seg_phi: Vec<f64> = (1..=n + 1)
        .map(|i| sk.integral(design.augmented(i - 1), design.augmented(i)))
        .collect();
    // Q_i = int_{t_i}^{t_{i+1}} (s^{beta+1} - t_{i+1}^{beta+1}) phi(s) ds and
    // gamma_i = t_{i+1}^{beta+1} - t_i^{beta+1}, for i = 0..n-1.
    let mut q_over_gamma = Vec::with_capacity(n);
    for i in 0..n {
        let a = design.augmented(i);
        let b = design.augmented(i + 1);
        let bp = b.powf(p);
        let q = integrate_phi_weighted(sk, a, b, |s| s.powf(p) - bp);
        let gamma = bp - a.powf(p);
        q_over_gamma.push(q / gamma);
    }
    let mut weights = vec![0.0; n];
    for k in 1..=n {
        let mut w = seg_phi[k - 1];
        if k == n {
            w += seg_phi[n]; // virtual observation shares the last weight
        }
        w += q_over_gamma[k - 1];
        if k < n {
            w -= q_over_gamma[k];
        }
        weights[k - 1] = w;
    }
    Ok(LinearSmoother {
        method: Method::ProjectionWienerClosed,
        x: sk.x(),
        h: sk.h(),
        weights,
    })
}

/// Closed-form generalized-Wiener estimate at x.
pub fn projection_wiener_closed(
    beta: f64,
    sk: &ScaledKernel,
    design: &DesignGrid,
    ybar: &[f64],
) -> Result<f64, EstimatorError> {
    projection_wiener_closed_weights(beta, sk, design)?.estimate(ybar)
}

/// Projection weights for the Ornstein-Uhlenbeck model from the five-term
/// closed form, generalized to arbitrary lambda by scaling the exponents and
/// the denominators 1 - e^{-2 lambda (t_{i+1} - t_i)}. Requires n >= 2.
pub fn projection_ou_closed_weights(
    lambda: f64,
    sk: &ScaledKernel,
    design: &DesignGrid,
) -> Result<LinearSmoother, EstimatorError> {
    let n = design.n();
    if n < 2 {
        return Err(EstimatorError::TooFewPoints { needed: 2, got: n });
    }
    let pts = design.points();
    // E_plus[i] / E_minus[i]: integrals of e^{+lambda s} phi / e^{-lambda s} phi
    // over [t_i, t_{i+1}], i = 0..n-2.
    let e_on = |sign: f64, a: f64, b: f64| integrate_phi_weighted(sk, a, b, |s| (sign * lambda * s).exp());
    let denom: Vec<f64> = pts
        .windows(2)
        .map(|w| 1.0 - (-2.0 * lambda * (w[1] - w[0])).exp())
        .collect();
    let mut weights = vec![0.0; n];
    for k in 0..n {
        let t = pts[k];
        let mut w = 0.0;
        if k == 0 {
            // ybar(t_1) * int_0^{t_2} e^{lambda (s - t_1)} phi ds.
            w += (-lambda * t).exp() * e_on(1.0, 0.0, pts[1]);
        } else if k == n - 1 {
            // ybar(t_n) * int_{t_{n-1}}^{1} e^{lambda (t_n - s)} phi ds.
            w += (lambda * t).exp() * e_on(-1.0, pts[n - 2], 1.0);
        } else {
            // Interior: int_{t_{k-1}}^{t_{k+1}} e^{lambda |s - t_k|} phi ds.
            w += (lambda * t).exp() * e_on(-1.0, pts[k - 1], t);
            w += (-lambda * t).exp() * e_on(1.0, t, pts[k + 1]);
        }
        // Difference sums: term i = k contributes with +, term i = k-1 with -.
        if k + 1 < n {
            w += (lambda * t).exp() / denom[k] * e_on(-1.0, pts[k], pts[k + 1]);
            w -= (-lambda * t).exp() / denom[k] * e_on(1.0, pts[k], pts[k + 1]);
        }
        if k > 0 {
            w -= (lambda * t).exp() / denom[k - 1] * e_on(-1.0, pts[k - 1], pts[k]);
            w += (-lambda * t).exp() / denom[k - 1] * e_on(1.0, pts[k - 1], pts[k]);
        }
        weights[k] = w;
    }
    Ok(LinearSmoother {
        method: Method::ProjectionOuClosed,
        x: sk.x(),
        h: sk.h(),
        weights,
    })
}

/// Closed-form Ornstein-Uhlenbeck estimate at x.
pub fn projection_ou_closed(
    lambda: f64,
    sk: &ScaledKernel,
    design: &DesignGrid,
    ybar: &[f64],
) -> Result<f64, EstimatorError> {
    projection_ou_closed_weights(lambda, sk, design)?.estimate(ybar)
}

/// Asymptotic approximation of the projection weights: interior indices in
/// the active window get (1/2) phi(t_i) (t_{i+1} - t_{i-1}); the first and
/// last design points and indices outside the window get zero. The leading
/// interior rule is model-free.
pub fn asymptotic_projection_weights(sk: &ScaledKernel, design: &DesignGrid) -> LinearSmoother {
    let n = design.n();
    let (active, _) = design.active_window(sk.x(), sk.h());
    let mut weights = vec![0.0; n];
    for i in active {
        if i == 0 || i == n - 1 {
            continue;
        }
        let spread = design.augmented(i + 2) - design.augmented(i);
        weights[i] = 0.5 * sk.phi(design.point(i)) * spread;
    }
    LinearSmoother {
        method: Method::ProjectionAsymptotic,
        x: sk.x(),
        h: sk.h(),
        weights,
    }
}

/// Gasser-Muller weights: w_i = int_{s_{i-1}}^{s_i} phi over the mid-interval
/// partition (exact antiderivative when the kernel provides one).
pub fn gm_weights(sk: &ScaledKernel, design: &DesignGrid) -> LinearSmoother {
    let s = design.gm_midpoints();
    let weights = s.windows(2).map(|w| sk.integral(w[0], w[1])).collect();
    LinearSmoother {
        method: Method::GasserMuller,
        x: sk.x(),
        h: sk.h(),
        weights,
    }
}

/// Priestley-Chao weights: w_i = (t_{i+1} - t_i) phi(t_i) with t_{n+1} = 1.
pub fn priestley_chao_weights(sk: &ScaledKernel, design: &DesignGrid) -> LinearSmoother {
    let n = design.n();
    let weights = (1..=n)
        .map(|i| (design.augmented(i + 1) - design.augmented(i)) * sk.phi(design.point(i - 1)))
        .collect();
    LinearSmoother {
        method: Method::PriestleyChao,
        x: sk.x(),
        h: sk.h(),
        weights,
    }
}

/// Cheng-Lin weights: the Gasser-Muller integrals taken between consecutive
/// design points, w_i = int_{t_{i-1}}^{t_i} phi with t_0 = 0.
pub fn cheng_lin_weights(sk: &ScaledKernel, design: &DesignGrid) -> LinearSmoother {
    let n = design.n();
    let weights = (1..=n)
        .map(|i| sk.integral(design.augmented(i - 1), design.augmented(i)))
        .collect();
    LinearSmoother {
        method: Method::ChengLin,
        x: sk.x(),
        h: sk.h(),
        weights,
    }
}

/// Dot product of the weights with the averaged observations.
pub fn estimate(sm: &LinearSmoother, ybar: &[f64]) -> Result<f64, EstimatorError> {
    if sm.weights.len() != ybar.len() {
        return Err(EstimatorError::LengthMismatch {
            weights: sm.weights.len(),
            data: ybar.len(),
        });
    }
    Ok(sm.weights.iter().zip(ybar).map(|(w, y)| w * y).sum())
}

/// Builds the weight vector for any method at (x, h) under an edge rule.
pub fn build_smoother(
    method: Method,
    model: &CovarianceModel,
    kernel: &KernelSpec,
    design: &DesignGrid,
    x: f64,
    h: f64,
    edge: EdgeCorrection,
) -> Result<LinearSmoother, EstimatorError> {
    let sk = ScaledKernel::new(kernel.clone(), x, h, edge.boundary_mode())?;
    let sm = match method {
        Method::ProjectionExact => projection_weights(model, &sk, design, true)?,
        Method::ProjectionWienerClosed => match model {
            CovarianceModel::GeneralizedWiener { beta, .. } => {
                projection_wiener_closed_weights(*beta, &sk, design)?
            }
            _ => {
                return Err(EstimatorError::ModelMismatch {
                    method,
                    requires: "generalized Wiener",
                })
            }
        },
        Method::ProjectionOuClosed => match model {
            CovarianceModel::OrnsteinUhlenbeck { lambda, .. } => {
                projection_ou_closed_weights(*lambda, &sk, design)?
            }
            _ => {
                return Err(EstimatorError::ModelMismatch {
                    method,
                    requires: "Ornstein-Uhlenbeck",
                })
            }
        },
        Method::ProjectionAsymptotic => asymptotic_projection_weights(&sk, design),
        Method::GasserMuller => gm_weights(&sk, design),
        Method::PriestleyChao => priestley_chao_weights(&sk, design),
        Method::ChengLin => cheng_lin_weights(&sk, design),
    };
    Ok(match edge {
        EdgeCorrection::NormalizeWeightSum => sm.normalized(),
        _ => sm,
    })
}
