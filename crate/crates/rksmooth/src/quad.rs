//! Numerical integration primitives: Gauss-Legendre rules, adaptive panel
//! quadrature, and composite Simpson on uniform grids.
//!
//! Everything in here is deterministic. The Gauss-Legendre nodes are computed
//! once per order by Newton iteration on the Legendre polynomial and cached.

use std::sync::OnceLock;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum QuadratureError {
    /// Adaptive refinement ran out of panel budget before reaching the
    /// requested tolerance. Carries the worst offending panel.
    #[error("quadrature panel budget exceeded; worst panel [{panel_lo}, {panel_hi}] with local error {local_error:.3e}")]
    BudgetExceeded {
        panel_lo: f64,
        panel_hi: f64,
        local_error: f64,
    },
}

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
///
/// Newton iteration on P_n with the three-term recurrence; accurate to
/// machine precision for the orders used here.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Evaluate P_n(x) and P_n'(x) by recurrence.
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 1 { x } else { p1 };
            dp = if n == 1 {
                1.0
            } else {
                n as f64 * (x * p1 - p0) / (x * x - 1.0)
            };
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn cached_rule(n: usize, cell: &'static OnceLock<(Vec<f64>, Vec<f64>)>) -> &'static (Vec<f64>, Vec<f64>) {
    cell.get_or_init(|| gauss_legendre(n))
}

pub fn gl16() -> &'static (Vec<f64>, Vec<f64>) {
    static CELL: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    cached_rule(16, &CELL)
}

pub fn gl32() -> &'static (Vec<f64>, Vec<f64>) {
    static CELL: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    cached_rule(32, &CELL)
}

pub fn gl64() -> &'static (Vec<f64>, Vec<f64>) {
    static CELL: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    cached_rule(64, &CELL)
}

/// Fixed-order Gauss-Legendre integral of `f` over [a, b].
/// Returns 0 when the interval is empty or inverted.
pub fn integrate_gl<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rule: &(Vec<f64>, Vec<f64>)) -> f64 {
    if b <= a {
        return 0.0;
    }
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let (nodes, weights) = rule;
    let mut acc = 0.0;
    for (x, w) in nodes.iter().zip(weights) {
        acc += w * f(mid + half * x);
    }
    half * acc
}

/// Adaptive bisection quadrature with a GL16 panel rule.
///
/// A panel is accepted when the two-half refinement agrees with the whole
/// panel to `tol` (relative to the running magnitude). `max_panels` bounds the
/// total number of accepted panels.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    tol: f64,
    max_panels: usize,
) -> Result<f64, QuadratureError> {
    if b <= a {
        return Ok(0.0);
    }
    let rule = gl16();
    let mut total = 0.0f64;
    let mut panels = 0usize;
    // Work stack of (lo, hi, whole-panel estimate).
    let mut stack = vec![(a, b, integrate_gl(f, a, b, rule))];
    let mut worst: (f64, f64, f64) = (a, b, f64::INFINITY);
    while let Some((lo, hi, whole)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let left = integrate_gl(f, lo, mid, rule);
        let right = integrate_gl(f, mid, hi, rule);
        let err = (left + right - whole).abs();
        let scale = total.abs().max(left.abs() + right.abs()).max(1e-300);
        if err <= tol * scale.max(1.0) || (hi - lo) < 1e-14 {
            total += left + right;
            panels += 1;
            if panels > max_panels {
                return Err(QuadratureError::BudgetExceeded {
                    panel_lo: worst.0,
                    panel_hi: worst.1,
                    local_error: worst.2,
                });
            }
        } else {
            if err > worst.2 || worst.2.is_infinite() {
                worst = (lo, hi, err);
            }
            stack.push((lo, mid, left));
            stack.push((mid, hi, right));
            if stack.len() > 4 * max_panels {
                return Err(QuadratureError::BudgetExceeded {
                    panel_lo: worst.0,
                    panel_hi: worst.1,
                    local_error: worst.2,
                });
            }
        }
    }
    Ok(total)
}

/// Composite Simpson rule applied to samples on a uniform grid.
///
/// With an even sample count the last interval is handled by the trapezoid
/// rule; two samples degenerate to a single trapezoid.
pub fn simpson_uniform(values: &[f64], step: f64) -> f64 {
    let n = values.len();
    assert!(n >= 2, "need at least two samples");
    if n == 2 {
        return 0.5 * step * (values[0] + values[1]);
    }
    // With an even count, handle the final interval by trapezoid.
    let odd_len = if n % 2 == 1 { n } else { n - 1 };
    let mut acc = values[0] + values[odd_len - 1];
    for (i, v) in values.iter().enumerate().take(odd_len - 1).skip(1) {
        acc += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
    }
    let mut total = acc * step / 3.0;
    if n.is_multiple_of(2) {
        total += 0.5 * step * (values[n - 2] + values[n - 1]);
    }
    total
}
