//! Kernel functions on [-1, 1], their moment constants, and the scaled kernel
//! phi_{x,h}(s) = K((x-s)/h)/h together with the edge handling used when the
//! window [x-h, x+h] leaves the unit interval.

use std::fmt;
use std::sync::{Arc, OnceLock};

use thiserror::Error;

use crate::quad::{gl16, gl64, integrate_gl};

#[derive(Debug, Error)]
pub enum KernelError {
    #[error("bandwidth must lie in (0, 1), got {0}")]
    InvalidBandwidth(f64),
    #[error("evaluation point must lie in [0, 1], got {0}")]
    PointOutOfRange(f64),
}

/// Moment constants of a kernel: mass, first moment, and the constants that
/// drive the asymptotic risk formulas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelMoments {
    /// Integral of K over [-1, 1]; one for a probability kernel.
    pub mass: f64,
    /// Integral of t K(t); zero for even kernels.
    pub first: f64,
    /// B = integral of t^2 K(t): curvature constant of the leading bias.
    pub b: f64,
    /// A = integral of K^2: variance constant.
    pub a: f64,
    /// C_K = double integral of |u - v| K(u) K(v): variance-shrinkage constant.
    pub c_k: f64,
}

type KernelFn = dyn Fn(f64) -> f64 + Send + Sync;

/// A symmetric first-order kernel supported on [-1, 1].
///
/// The optional antiderivative enables exact integrals of the scaled kernel
/// (used by the Gasser-Muller weights and the kernel renormalization); when
/// absent, integrals fall back to Gauss-Legendre panels.
#[derive(Clone)]
pub struct KernelSpec {
    name: String,
    eval: Arc<KernelFn>,
    antiderivative: Option<Arc<KernelFn>>,
    moments: Arc<OnceLock<KernelMoments>>,
}

impl fmt::Debug for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KernelSpec").field("name", &self.name).finish()
    }
}

impl KernelSpec {
    pub fn new(name: impl Into<String>, eval: Arc<KernelFn>, antiderivative: Option<Arc<KernelFn>>) -> Self {
        Self {
            name: name.into(),
            eval,
            antiderivative,
            moments: Arc::new(OnceLock::new()),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// K(u); zero outside [-1, 1].
    pub fn eval(&self, u: f64) -> f64 {
        if !(-1.0..=1.0).contains(&u) {
            return 0.0;
        }
        (self.eval)(u)
    }

    pub fn has_antiderivative(&self) -> bool {
        self.antiderivative.is_some()
    }

    /// Integral of K over [a, b] (clipped to [-1, 1]); exact when the kernel
    /// carries a closed-form antiderivative, 16-node Gauss-Legendre otherwise.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        let lo = a.max(-1.0);
        let hi = b.min(1.0);
        if hi <= lo {
            return 0.0;
        }
        match &self.antiderivative {
            Some(anti) => anti(hi) - anti(lo),
            None => integrate_gl(|u| (self.eval)(u), lo, hi, gl16()),
        }
    }

    /// Moment constants, computed lazily: 64-node Gauss-Legendre on the two
    /// panels [-1, 0] and [0, 1]; C_K by the nested integral
    /// 2 * int K(u) int_{-1}^{u} (u - v) K(v) dv du, which keeps every
    /// integrand smooth despite the |u - v| kink.
    pub fn moments(&self) -> KernelMoments {
        *self.moments.get_or_init(|| {
            let rule = gl64();
            let two_panel = |f: &dyn Fn(f64) -> f64| {
                integrate_gl(f, -1.0, 0.0, rule) + integrate_gl(f, 0.0, 1.0, rule)
            };
            let k = |u: f64| (self.eval)(u);
            let mass = two_panel(&k);
            let first = two_panel(&|u| u * k(u));
            let b = two_panel(&|u| u * u * k(u));
            let a = two_panel(&|u| k(u) * k(u));
            let inner = |u: f64| {
                // int_{-1}^{u} (u - v) K(v) dv, split at 0 when it is inside.
                if u <= 0.0 {
                    integrate_gl(|v| (u - v) * k(v), -1.0, u, rule)
                } else {
                    integrate_gl(|v| (u - v) * k(v), -1.0, 0.0, rule)
                        + integrate_gl(|v| (u - v) * k(v), 0.0, u, rule)
                }
            };
            let c_k = 2.0 * two_panel(&|u| k(u) * inner(u));
            KernelMoments { mass, first, b, a, c_k }
        })
    }
}

/// The quartic (biweight) kernel K(u) = 15/16 (1 - u^2)^2 on [-1, 1], with its
/// exact antiderivative.
pub fn quartic_kernel() -> KernelSpec {
    KernelSpec::new(
        "quartic",
        Arc::new(|u: f64| 15.0 / 16.0 * (1.0 - u * u).powi(2)),
        Some(Arc::new(|u: f64| {
            let u = u.clamp(-1.0, 1.0);
            15.0 / 16.0 * (u - 2.0 * u.powi(3) / 3.0 + u.powi(5) / 5.0)
        })),
    )
}

/// The uniform kernel K = 1/2 on [-1, 1].
pub fn uniform_kernel() -> KernelSpec {
    KernelSpec::new(
        "uniform",
        Arc::new(|_u: f64| 0.5),
        Some(Arc::new(|u: f64| 0.5 * u.clamp(-1.0, 1.0))),
    )
}

/// Kernel lookup by the names accepted in CLI configs.
pub fn kernel_by_name(name: &str) -> Option<KernelSpec> {
    match name {
        "quartic" => Some(quartic_kernel()),
        "uniform" => Some(uniform_kernel()),
        _ => None,
    }
}

/// Edge handling for windows that leave [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BoundaryMode {
    /// Evaluate the raw scaled kernel; its mass over [0, 1] may be < 1.
    None,
    /// Restrict phi to [0, 1] and divide by its integral there, so that
    /// int_0^1 phi = 1 for every x.
    #[default]
    CutAndRenormalize,
}

/// The scaled kernel phi_{x,h}(s) = K((x - s)/h)/h, restricted to [0, 1].
#[derive(Debug, Clone)]
pub struct ScaledKernel {
    base: KernelSpec,
    x: f64,
    h: f64,
    boundary: BoundaryMode,
    support_lo: f64,
    support_hi: f64,
    /// Multiplier applied to phi: 1 for raw, 1/int_0^1 phi for renormalized.
    scale: f64,
}

impl ScaledKernel {
    pub fn new(base: KernelSpec, x: f64, h: f64, boundary: BoundaryMode) -> Result<Self, KernelError> {
        if !(h > 0.0 && h < 1.0) {
            return Err(KernelError::InvalidBandwidth(h));
        }
        if !(0.0..=1.0).contains(&x) {
            return Err(KernelError::PointOutOfRange(x));
        }
        let support_lo = (x - h).max(0.0);
        let support_hi = (x + h).min(1.0);
        let mut sk = Self {
            base,
            x,
            h,
            boundary,
            support_lo,
            support_hi,
            scale: 1.0,
        };
        if boundary == BoundaryMode::CutAndRenormalize {
            let mass = sk.raw_integral(0.0, 1.0);
            if mass > 0.0 {
                sk.scale = 1.0 / mass;
            }
        }
        Ok(sk)
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn boundary(&self) -> BoundaryMode {
        self.boundary
    }

    /// Support of phi inside [0, 1]: [max(0, x-h), min(1, x+h)].
    pub fn support(&self) -> (f64, f64) {
        (self.support_lo, self.support_hi)
    }

    /// True when the raw window [x-h, x+h] is contained in [0, 1].
    pub fn window_inside(&self) -> bool {
        self.x - self.h >= 0.0 && self.x + self.h <= 1.0
    }

    /// phi_{x,h}(s); zero outside the support.
    pub fn phi(&self, s: f64) -> f64 {
        if s < self.support_lo || s > self.support_hi {
            return 0.0;
        }
        self.scale * self.base.eval((self.x - s) / self.h) / self.h
    }

    fn raw_integral(&self, a: f64, b: f64) -> f64 {
        let lo = a.max(self.support_lo);
        let hi = b.min(self.support_hi);
        if hi <= lo {
            return 0.0;
        }
        // Substituting u = (x - s)/h maps [lo, hi] to [(x-hi)/h, (x-lo)/h].
        self.base.integral((self.x - hi) / self.h, (self.x - lo) / self.h)
    }

    /// Definite integral of phi over [a, b] (clipped to the support); exact
    /// when the base kernel has an antiderivative.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        self.scale * self.raw_integral(a, b)
    }
}
