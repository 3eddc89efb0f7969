//! Time maps `tau_+/-(E) = int_0^{U_+/-(E)} (E - F(u))^{-1/2} du` and the
//! branch equations that fix equilibrium energies.
//!
//! With `y = sin(theta)` and `F(u) = E y^2` the map becomes
//! `2 sqrt(E) int_0^{pi/2} sin(theta) / |f(U(E sin^2 theta))| dtheta`, which has
//! a smooth integrand on the closed interval.

use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use crate::math;
use crate::nonlinearity::{NonlinearityModel, Sign};
use crate::quadrature::{integrate_doubling, DoublingSettings, GaussLegendre};
use crate::roots::{bisect_increasing, RootSettings};
use crate::{Error, Result};

/// Below this angle the integrand is replaced by its limit `sqrt(2 / f'(0))`.
pub const THETA_CUTOFF: f64 = 1e-4;

/// Target value of the branch functions.
pub const BRANCH_TARGET: f64 = core::f64::consts::FRAC_1_SQRT_2;

const PANEL_NODES: usize = 16;
const FIRST_UPPER_BRACKET: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TimeMapSettings {
    pub quadrature: DoublingSettings,
    pub root: RootSettings,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauEstimate {
    pub value: f64,
    pub error_estimate: f64,
    pub nodes: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeMapSample {
    pub energy: f64,
    pub tau_plus: f64,
    pub tau_minus: f64,
    /// Larger of the two quadrature error estimates.
    pub quad_error_estimate: f64,
}

/// Evaluates time maps for one model, reusing a single Gauss rule.
#[derive(Debug, Clone)]
pub struct TimeMap {
    model: NonlinearityModel,
    rule: GaussLegendre,
    settings: TimeMapSettings,
}

impl TimeMap {
    pub fn new(model: NonlinearityModel) -> Self {
        Self::with_settings(model, TimeMapSettings::default())
    }

    pub fn with_settings(model: NonlinearityModel, settings: TimeMapSettings) -> Self {
        TimeMap {
            model,
            rule: GaussLegendre::new(PANEL_NODES),
            settings,
        }
    }

    pub fn model(&self) -> &NonlinearityModel {
        &self.model
    }

    pub fn settings(&self) -> &TimeMapSettings {
        &self.settings
    }

    pub fn tau(&self, sign: Sign, energy: f64) -> Result<TauEstimate> {
        let ceiling = self.model.energy_ceiling(sign);
        if !(energy > 0.0 && energy < ceiling) {
            return Err(Error::domain(format!(
                "time map energy {energy} outside (0, {ceiling})"
            )));
        }
        let model = &self.model;
        let limit = math::sqrt(2.0 / model.slope_at_zero());
        let scale = 2.0 * math::sqrt(energy);
        let integrand = |theta: f64| -> Result<f64> {
            if theta < THETA_CUTOFF {
                return Ok(limit);
            }
            let y = math::sin(theta);
            let u = model.invert_potential(sign, energy * y * y)?;
            let fu = math::abs(model.value(u));
            if fu == 0.0 {
                return Err(Error::numerical("time map integrand hit f(U) = 0", theta));
            }
            Ok(scale * y / fu)
        };
        let est = integrate_doubling(
            &self.rule,
            integrand,
            0.0,
            core::f64::consts::FRAC_PI_2,
            &self.settings.quadrature,
        )?;
        Ok(TauEstimate {
            value: est.value,
            error_estimate: est.error_estimate,
            nodes: est.nodes,
        })
    }

    pub fn sample(&self, energy: f64) -> Result<TimeMapSample> {
        let p = self.tau(Sign::Plus, energy)?;
        let m = self.tau(Sign::Minus, energy)?;
        Ok(TimeMapSample {
            energy,
            tau_plus: p.value,
            tau_minus: m.value,
            quad_error_estimate: p.error_estimate.max(m.error_estimate),
        })
    }

    /// Checks `tau(E_i) < tau(E_{i+1})` beyond the quadrature error margin
    /// for every consecutive pair of `grid`.
    pub fn check_monotone(&self, sign: Sign, grid: &[f64]) -> Result<MonotoneCheck> {
        if grid.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::domain("energy grid must be strictly increasing"));
        }
        let values = grid
            .iter()
            .map(|&e| self.tau(sign, e))
            .collect::<Result<Vec<_>>>()?;
        let first_violation = values.windows(2).enumerate().find_map(|(i, w)| {
            let margin = w[0].error_estimate
                + w[1].error_estimate
                + self.settings.quadrature.rel_tol * math::abs(w[1].value);
            (w[0].value >= w[1].value - margin).then_some(MonotoneViolation {
                index: i,
                energies: (grid[i], grid[i + 1]),
                taus: (w[0].value, w[1].value),
            })
        });
        Ok(MonotoneCheck {
            holds: first_violation.is_none(),
            first_violation,
            taus: values.iter().map(|t| t.value).collect(),
        })
    }

    /// `h(E)` for the branch `(n, kind)`.
    pub fn branch_function(&self, n: u32, kind: BranchKind, energy: f64) -> Result<f64> {
        let (kp, km) = branch_weights(n, kind)?;
        let mut total = 0.0;
        if kp > 0.0 {
            total += kp * self.tau(Sign::Plus, energy)?.value;
        }
        if km > 0.0 {
            total += km * self.tau(Sign::Minus, energy)?.value;
        }
        Ok(total)
    }

    /// Unique root of `h(E) = 1/sqrt(2)`, `None` when `f'(0) < n^2 pi^2`,
    /// and `E = 0` when `f'(0)` equals `n^2 pi^2` to the root tolerance.
    pub fn solve_branch(&self, n: u32, kind: BranchKind) -> Result<Option<BranchSolution>> {
        branch_weights(n, kind)?;
        let slope = self.model.slope_at_zero();
        let lambda_n = eigenvalue(n);
        let tol = self.settings.root.residual_tol;
        if math::abs(slope - lambda_n) <= tol * lambda_n {
            return Ok(Some(BranchSolution {
                n,
                kind,
                energy: 0.0,
                residual: 0.0,
            }));
        }
        if slope < lambda_n {
            return Ok(None);
        }
        let h0 = n as f64 * tau_limit_at_zero(&self.model);
        let ceiling = self
            .model
            .energy_ceiling(Sign::Plus)
            .min(self.model.energy_ceiling(Sign::Minus));
        let mut hi = FIRST_UPPER_BRACKET;
        let h_hi = loop {
            if hi >= ceiling {
                return Err(Error::numerical(
                    format!("no upper bracket for branch {n}{kind} below the energy cap"),
                    hi,
                ));
            }
            let h = self.branch_function(n, kind, hi)?;
            if h > BRANCH_TARGET {
                break h;
            }
            hi *= 2.0;
        };
        let root = bisect_increasing(
            |e| self.branch_function(n, kind, e),
            BRANCH_TARGET,
            0.0,
            h0,
            hi,
            h_hi,
            &self.settings.root,
        )?;
        Ok(Some(BranchSolution {
            n,
            kind,
            energy: root.x,
            residual: root.residual,
        }))
    }

    /// Every nontrivial branch solution, ordered by `n` then kind.
    pub fn enumerate_branches(&self) -> Result<Vec<BranchSolution>> {
        let mut out = Vec::new();
        for n in 1..=max_branch_index(&self.model).max(tie_index(&self.model)) {
            for kind in BranchKind::for_index(n) {
                if let Some(sol) = self.solve_branch(n, *kind)? {
                    out.push(sol);
                }
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonotoneViolation {
    pub index: usize,
    pub energies: (f64, f64),
    pub taus: (f64, f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneCheck {
    pub holds: bool,
    pub first_violation: Option<MonotoneViolation>,
    pub taus: Vec<f64>,
}

/// Which branch equation a solution belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BranchKind {
    /// Odd `n`, starting upward.
    Plus,
    /// Odd `n`, starting downward.
    Minus,
    /// Even `n`; one energy, two profiles.
    Even,
}

impl BranchKind {
    pub fn for_index(n: u32) -> &'static [BranchKind] {
        if n % 2 == 1 {
            &[BranchKind::Plus, BranchKind::Minus]
        } else {
            &[BranchKind::Even]
        }
    }
}

impl fmt::Display for BranchKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BranchKind::Plus => "+",
            BranchKind::Minus => "-",
            BranchKind::Even => "e",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchSolution {
    pub n: u32,
    pub kind: BranchKind,
    pub energy: f64,
    /// `h(E) - 1/sqrt(2)`
    pub residual: f64,
}

impl BranchSolution {
    /// Zeros in `[0, 1]` of the matching profiles, endpoints included.
    pub fn predicted_zeros(&self) -> usize {
        self.n as usize + 1
    }

    /// Stationary profiles carried by this solution.
    pub fn profile_count(&self) -> usize {
        match self.kind {
            BranchKind::Even => 2,
            _ => 1,
        }
    }
}

fn branch_weights(n: u32, kind: BranchKind) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(Error::domain("branch index must be at least 1"));
    }
    let k = n.div_ceil(2) as f64;
    match (n % 2, kind) {
        (1, BranchKind::Plus) => Ok((k, k - 1.0)),
        (1, BranchKind::Minus) => Ok((k - 1.0, k)),
        (0, BranchKind::Even) => Ok((k, k)),
        _ => Err(Error::domain(format!(
            "branch kind {kind} does not match index parity of n = {n}"
        ))),
    }
}

/// `lambda_n = n^2 pi^2`, the `n`-th Dirichlet eigenvalue of `-d^2/dx^2`.
pub fn eigenvalue(n: u32) -> f64 {
    let n = n as f64;
    n * n * math::PI * math::PI
}

/// `pi / sqrt(2 f'(0))`, the value of both time maps as `E -> 0+`.
pub fn tau_limit_at_zero(model: &NonlinearityModel) -> f64 {
    math::PI / math::sqrt(2.0 * model.slope_at_zero())
}

/// Largest `n` with `n^2 pi^2 < f'(0)`.
pub fn max_branch_index(model: &NonlinearityModel) -> u32 {
    let slope = model.slope_at_zero();
    let mut n = (math::sqrt(slope) / math::PI) as u32 + 1;
    while n > 0 && eigenvalue(n) >= slope {
        n -= 1;
    }
    n
}

fn tie_index(model: &NonlinearityModel) -> u32 {
    let n = max_branch_index(model) + 1;
    let tol = RootSettings::default().residual_tol;
    if math::abs(model.slope_at_zero() - eigenvalue(n)) <= tol * eigenvalue(n) {
        n
    } else {
        0
    }
}

/// `2n + 1` stationary points, with `n` from [`max_branch_index`].
pub fn count_equilibria(model: &NonlinearityModel) -> usize {
    2 * max_branch_index(model) as usize + 1
}
