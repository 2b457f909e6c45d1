//! Sampling designs on [0, 1]: regular sequences generated by a density, the
//! midpoint grid used in the simulation study, Gasser-Muller mid-interval
//! partitions, and the active window of a kernel over a design.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum DesignError {
    #[error("design must contain at least one point")]
    Empty,
    #[error("design points must be strictly increasing (violation at index {index}: {prev} >= {next})")]
    NotIncreasing { index: usize, prev: f64, next: f64 },
    #[error("design point {value} at index {index} lies outside [0, 1]")]
    OutOfRange { index: usize, value: f64 },
}

type DensityFn = dyn Fn(f64) -> f64 + Send + Sync;

/// The generating density of a regular design, kept alongside the points so
/// the asymptotic formulas can evaluate f(x).
#[derive(Clone)]
pub struct GeneratorDensity {
    pub density: Arc<DensityFn>,
}

impl fmt::Debug for GeneratorDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("GeneratorDensity")
    }
}

/// An ordered grid t_1 < ... < t_n inside [0, 1].
#[derive(Debug, Clone)]
pub struct DesignGrid {
    points: Vec<f64>,
    generator: Option<GeneratorDensity>,
}

impl DesignGrid {
    /// Wraps explicit points after validating ordering and range.
    pub fn from_points(points: Vec<f64>) -> Result<Self, DesignError> {
        if points.is_empty() {
            return Err(DesignError::Empty);
        }
        for (i, &t) in points.iter().enumerate() {
            if !(0.0..=1.0).contains(&t) {
                return Err(DesignError::OutOfRange { index: i, value: t });
            }
            if i > 0 && points[i - 1] >= t {
                return Err(DesignError::NotIncreasing {
                    index: i,
                    prev: points[i - 1],
                    next: t,
                });
            }
        }
        Ok(Self { points, generator: None })
    }

    pub fn with_density(mut self, density: Arc<DensityFn>) -> Self {
        self.generator = Some(GeneratorDensity { density });
        self
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn point(&self, i: usize) -> f64 {
        self.points[i]
    }

    /// Generating density evaluated at x, when the design carries one.
    pub fn density_at(&self, x: f64) -> Option<f64> {
        self.generator.as_ref().map(|g| (g.density)(x))
    }

    /// t_i with the boundary conventions t_0 = 0 and t_{n+1} = 1; `i` runs
    /// from 0 to n + 1.
    pub fn augmented(&self, i: usize) -> f64 {
        let n = self.points.len();
        if i == 0 {
            0.0
        } else if i <= n {
            self.points[i - 1]
        } else {
            1.0
        }
    }

    /// sup_j (t_{j+1} - t_j) over the augmented grid with t_0 = 0, t_{n+1} = 1.
    pub fn sup_spacing(&self) -> f64 {
        let n = self.points.len();
        (0..=n)
            .map(|j| self.augmented(j + 1) - self.augmented(j))
            .fold(0.0, f64::max)
    }

    /// Gasser-Muller mid-interval boundaries s_0 = 0, s_n = 1 and
    /// s_i = (t_i + t_{i+1})/2 for interior i; length n + 1.
    pub fn gm_midpoints(&self) -> Vec<f64> {
        let n = self.points.len();
        let mut s = Vec::with_capacity(n + 1);
        s.push(0.0);
        for i in 0..n.saturating_sub(1) {
            s.push(0.5 * (self.points[i] + self.points[i + 1]));
        }
        s.push(1.0);
        s
    }

    /// The active index window I_{x,h} = { i : [t_{i-1}, t_{i+1}] meets the
    /// open interval (x-h, x+h) }, using the augmented boundary convention.
    /// Returns the contiguous 0-based index range together with its size
    /// N_{T_n}; the range may be empty.
    pub fn active_window(&self, x: f64, h: f64) -> (std::ops::Range<usize>, usize) {
        let n = self.points.len();
        let lo = x - h;
        let hi = x + h;
        let mut first = n;
        let mut last = 0usize;
        for i in 1..=n {
            let a = self.augmented(i - 1);
            let b = self.augmented(i + 1);
            // [a, b] intersects the open interval (lo, hi) iff a < hi and b > lo.
            if a < hi && b > lo {
                if first == n {
                    first = i - 1;
                }
                last = i;
            }
        }
        if first == n && last == 0 {
            (0..0, 0)
        } else {
            ((first..last), last - first)
        }
    }
}

/// Regular design generated by a quantile function: t_i = F^{-1}(i/n).
///
/// The output is validated; a non-monotone quantile is rejected.
pub fn regular_design<F: Fn(f64) -> f64>(f_inverse: F, n: usize) -> Result<DesignGrid, DesignError> {
    if n == 0 {
        return Err(DesignError::Empty);
    }
    let points: Vec<f64> = (1..=n).map(|i| f_inverse(i as f64 / n as f64)).collect();
    DesignGrid::from_points(points)
}

/// Regular design with the uniform density: t_i = i/n.
pub fn regular_uniform_design(n: usize) -> Result<DesignGrid, DesignError> {
    Ok(regular_design(|p| p, n)?.with_density(Arc::new(|_| 1.0)))
}

/// The midpoint grid t_i = (i - 0.5)/n of the simulation protocol.
pub fn midpoint_design(n: usize) -> Result<DesignGrid, DesignError> {
    if n == 0 {
        return Err(DesignError::Empty);
    }
    let points: Vec<f64> = (1..=n).map(|i| (i as f64 - 0.5) / n as f64).collect();
    Ok(DesignGrid::from_points(points)?.with_density(Arc::new(|_| 1.0)))
}
