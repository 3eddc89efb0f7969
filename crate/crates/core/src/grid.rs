//! Uniform partitions of `[0, 1]` and the discrete norms used throughout.
//!
//! A grid with `interior` points has `interior + 2` nodes `x_i = i * dx`,
//! `dx = 1 / (interior + 1)`. Grid functions carry both boundary nodes.

use alloc::vec::Vec;

use crate::math;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Grid {
    interior: usize,
}

impl Grid {
    pub fn new(interior: usize) -> Result<Self> {
        if interior < 1 {
            return Err(Error::domain("grid needs at least one interior point"));
        }
        Ok(Grid { interior })
    }

    pub fn interior(&self) -> usize {
        self.interior
    }

    /// Number of nodes including both endpoints.
    pub fn len(&self) -> usize {
        self.interior + 2
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dx(&self) -> f64 {
        1.0 / (self.interior as f64 + 1.0)
    }

    pub fn x(&self, i: usize) -> f64 {
        if i == self.interior + 1 {
            1.0
        } else {
            i as f64 * self.dx()
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.x(i)).collect()
    }

    /// Samples `g` on every node and pins both boundary values to zero.
    pub fn sample(&self, mut g: impl FnMut(f64) -> f64) -> Vec<f64> {
        let mut v: Vec<f64> = (0..self.len()).map(|i| g(self.x(i))).collect();
        v[0] = 0.0;
        let last = v.len() - 1;
        v[last] = 0.0;
        v
    }

    pub fn check(&self, values: &[f64]) -> Result<()> {
        if values.len() != self.len() {
            return Err(Error::domain(alloc::format!(
                "grid function has {} values, grid has {} nodes",
                values.len(),
                self.len()
            )));
        }
        Ok(())
    }

    /// Trapezoid rule over the nodes.
    pub fn trapezoid(&self, values: &[f64]) -> f64 {
        let n = values.len();
        if n < 2 {
            return 0.0;
        }
        let inner: f64 = values[1..n - 1].iter().sum();
        self.dx() * (inner + 0.5 * (values[0] + values[n - 1]))
    }

    pub fn l2_norm_sq(&self, values: &[f64]) -> f64 {
        let n = values.len();
        let inner: f64 = values[1..n - 1].iter().map(|v| v * v).sum();
        self.dx() * (inner + 0.5 * (values[0] * values[0] + values[n - 1] * values[n - 1]))
    }

    pub fn l2_norm(&self, values: &[f64]) -> f64 {
        math::sqrt(self.l2_norm_sq(values))
    }

    /// Squared forward-difference gradient norm `sum (u_{i+1} - u_i)^2 / dx`.
    pub fn h10_norm_sq(&self, values: &[f64]) -> f64 {
        let s: f64 = values.windows(2).map(|w| (w[1] - w[0]) * (w[1] - w[0])).sum();
        s / self.dx()
    }

    pub fn h10_norm(&self, values: &[f64]) -> f64 {
        math::sqrt(self.h10_norm_sq(values))
    }

    pub fn l2_distance(&self, a: &[f64], b: &[f64]) -> f64 {
        let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
        self.l2_norm(&diff)
    }

    pub fn h10_distance(&self, a: &[f64], b: &[f64]) -> f64 {
        let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
        self.h10_norm(&diff)
    }
}

/// Values with magnitude below this are treated as zeros when counting
/// sign changes.
pub const ZERO_SNAP: f64 = 1e-12;

/// Zeros of a Dirichlet grid function on `[0, 1]`: both endpoints plus one per
/// sign change among the interior values (snapped values are skipped).
pub fn count_zeros(values: &[f64]) -> usize {
    let mut zeros = 2;
    let mut last_sign = 0.0;
    for &v in &values[1..values.len() - 1] {
        if math::abs(v) < ZERO_SNAP {
            continue;
        }
        let s = math::signum(v);
        if last_sign != 0.0 && s != last_sign {
            zeros += 1;
        }
        last_sign = s;
    }
    zeros
}

/// Signs of the successive arches between zeros, in order.
pub fn arch_signs(values: &[f64]) -> Vec<f64> {
    let mut signs = Vec::new();
    for &v in &values[1..values.len() - 1] {
        if math::abs(v) < ZERO_SNAP {
            continue;
        }
        let s = math::signum(v);
        if signs.last() != Some(&s) {
            signs.push(s);
        }
    }
    signs
}
