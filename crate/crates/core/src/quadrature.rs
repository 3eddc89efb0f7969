//! Composite Gauss–Legendre quadrature with panel doubling.

use alloc::vec::Vec;

use crate::math;
use crate::{Error, Result};

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds the `n`-point rule by Newton iteration on `P_n`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = alloc::vec![0.0; n];
        let mut weights = alloc::vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Tricomi's initial guess for the i-th root
            let mut x = math::cos(math::PI * (i as f64 + 0.75) / (n as f64 + 0.5));
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if math::abs(dx) < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Composite rule over `panels` equal subintervals of `[a, b]`.
    pub fn integrate<F>(&self, f: &mut F, a: f64, b: f64, panels: usize) -> Result<f64>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        let h = (b - a) / panels as f64;
        let mut total = 0.0;
        for p in 0..panels {
            let lo = a + p as f64 * h;
            let mid = lo + 0.5 * h;
            let mut s = 0.0;
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                s += w * f(mid + 0.5 * h * x)?;
            }
            total += 0.5 * h * s;
        }
        Ok(total)
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoublingSettings {
    pub rel_tol: f64,
    /// Panels used by the first estimate.
    pub initial_panels: usize,
    pub max_doublings: u32,
}

impl Default for DoublingSettings {
    /// 32 initial nodes with the 16-point panel rule.
    fn default() -> Self {
        DoublingSettings {
            rel_tol: 1e-9,
            initial_panels: 2,
            max_doublings: 20,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadEstimate {
    pub value: f64,
    /// Absolute difference between the last two estimates.
    pub error_estimate: f64,
    pub nodes: usize,
}

/// Doubles the panel count until two successive estimates agree to
/// `rel_tol`.
pub fn integrate_doubling<F>(
    rule: &GaussLegendre,
    mut f: F,
    a: f64,
    b: f64,
    settings: &DoublingSettings,
) -> Result<QuadEstimate>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut panels = settings.initial_panels.max(1);
    let mut prev = rule.integrate(&mut f, a, b, panels)?;
    for _ in 0..settings.max_doublings {
        panels *= 2;
        let cur = rule.integrate(&mut f, a, b, panels)?;
        let diff = math::abs(cur - prev);
        if diff <= settings.rel_tol * math::abs(cur) || diff == 0.0 {
            return Ok(QuadEstimate {
                value: cur,
                error_estimate: diff,
                nodes: panels * rule.len(),
            });
        }
        prev = cur;
    }
    Err(Error::numerical(
        "quadrature did not converge within the doubling budget",
        prev,
    ))
}
