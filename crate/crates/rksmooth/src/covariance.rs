//! Autocovariance models of the error process, their Gram matrices on a
//! design, jump functions, and linear solves against the Gram matrix.
//!
//! The generalized Wiener family R(s,t) = sigma^2 min(s,t)^{beta+1}/(beta+1)
//! and the Ornstein-Uhlenbeck family R(s,t) = sigma^2 exp(-lambda |s-t|) have
//! tridiagonal inverse Gram matrices, which gives O(n) solves; those fast
//! paths are cross-checked against the dense Cholesky route in the tests.

use std::fmt;
use std::sync::{Arc, OnceLock};

use serde::de::Error as _;
use serde::ser::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::designs::DesignGrid;

#[derive(Debug, Error)]
pub enum CovarianceError {
    #[error("argument {name} = {value} lies outside {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },
    #[error("Gram matrix is not positive definite (pivot {pivot} has value {value:.3e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
}

type CovFn = dyn Fn(f64, f64) -> f64 + Send + Sync;
type AlphaFn = dyn Fn(f64) -> f64 + Send + Sync;

/// Step for the one-sided finite-difference fallback of the jump function of
/// custom models; documented as approximate.
const ALPHA_FD_STEP: f64 = 1e-5;

/// An autocovariance model on the unit square.
#[derive(Clone)]
pub enum CovarianceModel {
    /// R(s,t) = sigma2 * min(s,t)^{beta+1} / (beta+1); beta = 0 is the
    /// classical Wiener process R(s,t) = sigma2 * min(s,t).
    GeneralizedWiener { beta: f64, sigma2: f64 },
    /// R(s,t) = sigma2 * exp(-lambda |s - t|).
    OrnsteinUhlenbeck { lambda: f64, sigma2: f64 },
    /// User-supplied covariance; `alpha` may be omitted, in which case the
    /// jump function falls back to a one-sided finite difference.
    Custom {
        eval: Arc<CovFn>,
        alpha: Option<Arc<AlphaFn>>,
    },
}

impl fmt::Debug for CovarianceModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::GeneralizedWiener { beta, sigma2 } => f
                .debug_struct("GeneralizedWiener")
                .field("beta", beta)
                .field("sigma2", sigma2)
                .finish(),
            Self::OrnsteinUhlenbeck { lambda, sigma2 } => f
                .debug_struct("OrnsteinUhlenbeck")
                .field("lambda", lambda)
                .field("sigma2", sigma2)
                .finish(),
            Self::Custom { .. } => f.write_str("Custom"),
        }
    }
}

impl CovarianceModel {
    /// Classical Wiener model (beta = 0).
    pub fn wiener(sigma2: f64) -> Self {
        Self::GeneralizedWiener { beta: 0.0, sigma2 }
    }

    /// R(s, t). Symmetric in its arguments; errors outside the unit square.
    pub fn eval_cov(&self, s: f64, t: f64) -> Result<f64, CovarianceError> {
        for (name, v) in [("s", s), ("t", t)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(CovarianceError::Domain {
                    name,
                    value: v,
                    domain: "[0, 1]",
                });
            }
        }
        Ok(self.eval_unchecked(s, t))
    }

    pub(crate) fn eval_unchecked(&self, s: f64, t: f64) -> f64 {
        match self {
            Self::GeneralizedWiener { beta, sigma2 } => {
                sigma2 * s.min(t).powf(beta + 1.0) / (beta + 1.0)
            }
            Self::OrnsteinUhlenbeck { lambda, sigma2 } => sigma2 * (-lambda * (s - t).abs()).exp(),
            Self::Custom { eval, .. } => eval(s, t),
        }
    }

    /// The jump function alpha(t) = R^{(0,1)}(t, t-) - R^{(0,1)}(t, t+) on the
    /// open interval. For custom models without a supplied alpha, a one-sided
    /// finite difference with step 1e-5 is used (approximate; alpha only
    /// enters asymptotic formulas, never the exact risk).
    pub fn jump_alpha(&self, t: f64) -> Result<f64, CovarianceError> {
        if !(t > 0.0 && t < 1.0) {
            return Err(CovarianceError::Domain {
                name: "t",
                value: t,
                domain: "(0, 1)",
            });
        }
        Ok(match self {
            Self::GeneralizedWiener { beta, sigma2 } => sigma2 * t.powf(*beta),
            Self::OrnsteinUhlenbeck { lambda, sigma2 } => 2.0 * sigma2 * lambda,
            Self::Custom { eval, alpha } => match alpha {
                Some(a) => a(t),
                None => {
                    let d = ALPHA_FD_STEP.min(0.25 * t.min(1.0 - t));
                    let left = (eval(t, t) - eval(t, t - d)) / d;
                    let right = (eval(t, t + d) - eval(t, t)) / d;
                    left - right
                }
            },
        })
    }

    /// Whether `jump_alpha` is exact for this model.
    pub fn has_exact_alpha(&self) -> bool {
        !matches!(self, Self::Custom { alpha: None, .. })
    }

    /// Whether an O(n) closed-form Gram solve exists.
    pub fn has_fast_solve(&self) -> bool {
        matches!(
            self,
            Self::GeneralizedWiener { .. } | Self::OrnsteinUhlenbeck { .. }
        )
    }

    /// Builds the Gram matrix R(t_i, t_j) on a design. The factorization is
    /// deferred until the first solve.
    pub fn gram(&self, design: &DesignGrid) -> GramMatrix {
        let n = design.n();
        let pts = design.points();
        let mut values = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let v = self.eval_unchecked(pts[i], pts[j]);
                values[i * n + j] = v;
                values[j * n + i] = v;
            }
        }
        GramMatrix {
            design: design.clone(),
            model: self.clone(),
            n,
            values,
            factor: OnceLock::new(),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct ModelJson {
    kind: String,
    params: serde_json::Map<String, serde_json::Value>,
}

impl Serialize for CovarianceModel {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut params = serde_json::Map::new();
        let kind = match self {
            Self::GeneralizedWiener { beta, sigma2 } => {
                params.insert("beta".into(), (*beta).into());
                params.insert("sigma2".into(), (*sigma2).into());
                "generalized-wiener"
            }
            Self::OrnsteinUhlenbeck { lambda, sigma2 } => {
                params.insert("lambda".into(), (*lambda).into());
                params.insert("sigma2".into(), (*sigma2).into());
                "ornstein-uhlenbeck"
            }
            Self::Custom { .. } => {
                return Err(S::Error::custom("custom covariance models are not serializable"))
            }
        };
        ModelJson { kind: kind.into(), params }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CovarianceModel {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = ModelJson::deserialize(deserializer)?;
        let get = |key: &str, default: Option<f64>| -> Result<f64, D::Error> {
            match raw.params.get(key) {
                Some(v) => v
                    .as_f64()
                    .ok_or_else(|| D::Error::custom(format!("params.{key} must be a number"))),
                None => default.ok_or_else(|| D::Error::custom(format!("missing params.{key}"))),
            }
        };
        let model = match raw.kind.as_str() {
            "wiener" => CovarianceModel::GeneralizedWiener {
                beta: 0.0,
                sigma2: get("sigma2", Some(1.0))?,
            },
            "generalized-wiener" => CovarianceModel::GeneralizedWiener {
                beta: get("beta", Some(0.0))?,
                sigma2: get("sigma2", Some(1.0))?,
            },
            "ornstein-uhlenbeck" => CovarianceModel::OrnsteinUhlenbeck {
                lambda: get("lambda", None)?,
                sigma2: get("sigma2", Some(1.0))?,
            },
            other => {
                return Err(D::Error::custom(format!(
                    "unknown covariance kind {other:?}; expected wiener, generalized-wiener or ornstein-uhlenbeck"
                )))
            }
        };
        match &model {
            CovarianceModel::GeneralizedWiener { beta, sigma2 } => {
                if *beta < 0.0 {
                    return Err(D::Error::custom("beta must be >= 0"));
                }
                if *sigma2 <= 0.0 {
                    return Err(D::Error::custom("sigma2 must be > 0"));
                }
            }
            CovarianceModel::OrnsteinUhlenbeck { lambda, sigma2 } => {
                if *lambda <= 0.0 {
                    return Err(D::Error::custom("lambda must be > 0"));
                }
                if *sigma2 <= 0.0 {
                    return Err(D::Error::custom("sigma2 must be > 0"));
                }
            }
            CovarianceModel::Custom { .. } => unreachable!(),
        }
        Ok(model)
    }
}

/// Dense symmetric Gram matrix with a lazily computed Cholesky factor.
///
/// The factor is produced once behind a `OnceLock`; afterwards reads are
/// lock-free, so concurrent solves are safe.
#[derive(Debug)]
pub struct GramMatrix {
    design: DesignGrid,
    model: CovarianceModel,
    n: usize,
    values: Vec<f64>,
    factor: OnceLock<Result<Vec<f64>, (usize, f64)>>,
}

impl GramMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn design(&self) -> &DesignGrid {
        &self.design
    }

    pub fn model(&self) -> &CovarianceModel {
        &self.model
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Lower-triangular Cholesky factor (row-major, dense). No jitter is ever
    /// added: a failed pivot is surfaced so the caller can decide.
    pub fn cholesky(&self) -> Result<&[f64], CovarianceError> {
        let r = self.factor.get_or_init(|| {
            let n = self.n;
            let mut l = vec![0.0; n * n];
            for i in 0..n {
                for j in 0..=i {
                    let mut sum = self.values[i * n + j];
                    for k in 0..j {
                        sum -= l[i * n + k] * l[j * n + k];
                    }
                    if i == j {
                        if sum <= 0.0 {
                            return Err((i, sum));
                        }
                        l[i * n + i] = sum.sqrt();
                    } else {
                        l[i * n + j] = sum / l[j * n + j];
                    }
                }
            }
            Ok(l)
        });
        match r {
            Ok(l) => Ok(l),
            Err((pivot, value)) => Err(CovarianceError::NotPositiveDefinite {
                pivot: *pivot,
                value: *value,
            }),
        }
    }

    /// Solves Gram * x = rhs. With `fast_path` and a generalized Wiener or
    /// Ornstein-Uhlenbeck model, the tridiagonal inverse is applied in O(n);
    /// otherwise two dense triangular solves against the Cholesky factor.
    pub fn solve(&self, rhs: &[f64], fast_path: bool) -> Result<Vec<f64>, CovarianceError> {
        if rhs.len() != self.n {
            return Err(CovarianceError::LengthMismatch {
                expected: self.n,
                got: rhs.len(),
            });
        }
        if fast_path {
            match &self.model {
                CovarianceModel::GeneralizedWiener { beta, sigma2 } => {
                    return self.solve_generalized_wiener(rhs, *beta, *sigma2)
                }
                CovarianceModel::OrnsteinUhlenbeck { lambda, sigma2 } => {
                    return self.solve_ornstein_uhlenbeck(rhs, *lambda, *sigma2)
                }
                CovarianceModel::Custom { .. } => {}
            }
        }
        let l = self.cholesky()?;
        let n = self.n;
        // Forward substitution L y = rhs.
        let mut y = rhs.to_vec();
        for i in 0..n {
            for k in 0..i {
                let v = y[k];
                y[i] -= l[i * n + k] * v;
            }
            y[i] /= l[i * n + i];
        }
        // Back substitution L' x = y.
        for i in (0..n).rev() {
            for k in (i + 1)..n {
                let v = y[k];
                y[i] -= l[k * n + i] * v;
            }
            y[i] /= l[i * n + i];
        }
        Ok(y)
    }

    /// O(n) solve for R(s,t) = sigma2 * min(s,t)^{beta+1}/(beta+1): the
    /// inverse is tridiagonal with entries given by increments of
    /// G(t) = sigma2 * t^{beta+1}/(beta+1).
    fn solve_generalized_wiener(
        &self,
        rhs: &[f64],
        beta: f64,
        sigma2: f64,
    ) -> Result<Vec<f64>, CovarianceError> {
        let pts = self.design.points();
        let n = self.n;
        if pts[0] <= 0.0 {
            return Err(CovarianceError::NotPositiveDefinite { pivot: 0, value: 0.0 });
        }
        let g = |t: f64| sigma2 * t.powf(beta + 1.0) / (beta + 1.0);
        // gamma_k = G(t_{k+1}) - G(t_k) with G(t_0) = 0; k = 0..n-1.
        let mut gamma = Vec::with_capacity(n);
        let mut prev = 0.0;
        for &t in pts {
            let gt = g(t);
            gamma.push(gt - prev);
            prev = gt;
        }
        let mut x = vec![0.0; n];
        for i in 0..n {
            let dv_prev = if i == 0 { rhs[0] } else { rhs[i] - rhs[i - 1] };
            x[i] = dv_prev / gamma[i];
            if i + 1 < n {
                x[i] -= (rhs[i + 1] - rhs[i]) / gamma[i + 1];
            }
        }
        Ok(x)
    }

    /// O(n) solve for the Ornstein-Uhlenbeck model via its tridiagonal
    /// inverse (Markov-process precision matrix).
    fn solve_ornstein_uhlenbeck(
        &self,
        rhs: &[f64],
        lambda: f64,
        sigma2: f64,
    ) -> Result<Vec<f64>, CovarianceError> {
        let pts = self.design.points();
        let n = self.n;
        if n == 1 {
            return Ok(vec![rhs[0] / sigma2]);
        }
        let rho: Vec<f64> = pts.windows(2).map(|w| (-lambda * (w[1] - w[0])).exp()).collect();
        let mut x = vec![0.0; n];
        for i in 0..n {
            let mut acc = 0.0;
            // Diagonal entry.
            let d = if i == 0 {
                1.0 / (1.0 - rho[0] * rho[0])
            } else if i == n - 1 {
                1.0 / (1.0 - rho[n - 2] * rho[n - 2])
            } else {
                let a = rho[i - 1] * rho[i - 1];
                let b = rho[i] * rho[i];
                (1.0 - a * b) / ((1.0 - a) * (1.0 - b))
            };
            acc += d * rhs[i];
            if i > 0 {
                acc -= rho[i - 1] / (1.0 - rho[i - 1] * rho[i - 1]) * rhs[i - 1];
            }
            if i + 1 < n {
                acc -= rho[i] / (1.0 - rho[i] * rho[i]) * rhs[i + 1];
            }
            x[i] = acc / sigma2;
        }
        Ok(x)
    }

    /// u' Gram^{-1} v; symmetric in (u, v), nonnegative for u = v.
    pub fn quadratic_form(&self, u: &[f64], v: &[f64]) -> Result<f64, CovarianceError> {
        if u.len() != self.n || v.len() != self.n {
            return Err(CovarianceError::LengthMismatch {
                expected: self.n,
                got: if u.len() != self.n { u.len() } else { v.len() },
            });
        }
        let x = self.solve(v, true)?;
        Ok(u.iter().zip(&x).map(|(a, b)| a * b).sum())
    }

    /// w' Gram w for an explicit weight vector (no inverse involved).
    pub fn bilinear(&self, u: &[f64], v: &[f64]) -> Result<f64, CovarianceError> {
        if u.len() != self.n || v.len() != self.n {
            return Err(CovarianceError::LengthMismatch {
                expected: self.n,
                got: if u.len() != self.n { u.len() } else { v.len() },
            });
        }
        let n = self.n;
        let mut acc = 0.0;
        for (i, ui) in u.iter().enumerate() {
            let row: f64 = self.values[i * n..(i + 1) * n]
                .iter()
                .zip(v)
                .map(|(r, vj)| r * vj)
                .sum();
            acc += ui * row;
        }
        Ok(acc)
    }
}
