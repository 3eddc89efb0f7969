//! Stationary profiles `u'' + f(u) = 0`, `u(0) = u(1) = 0`, by shooting from
//! the branch energies, and the piecewise-parabolic equilibria of the
//! limiting inclusion `u'' + sgn(u) = 0`.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::grid::{arch_signs, count_zeros, Grid};
use crate::math;
use crate::nonlinearity::{NonlinearityModel, Sign};
use crate::timemap::{BranchKind, BranchSolution, TimeMap};
use crate::{Error, Result};

/// Default interior grid size for sweeps.
pub const DEFAULT_INTERIOR: usize = 1023;
/// Smallest interior grid size accepted by [`shoot_profile`].
pub const MIN_SHOOT_INTERIOR: usize = 255;
/// Integration substeps per grid cell.
pub const SUBSTEPS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShootSettings {
    /// Tolerance on `|u(1)|`.
    pub bc_tol: f64,
    /// Tolerance on `|(u')^2 / 2 + F(u) - E|` along the shot.
    pub hamiltonian_tol: f64,
}

impl Default for ShootSettings {
    fn default() -> Self {
        ShootSettings {
            bc_tol: 1e-6,
            hamiltonian_tol: 1e-6,
        }
    }
}

/// Names an equilibrium: `0`, or `v{n}+` / `v{n}-`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EquilibriumId {
    Zero,
    Branch { n: u32, sign: Sign },
}

impl EquilibriumId {
    pub fn branch(n: u32, sign: Sign) -> Self {
        EquilibriumId::Branch { n, sign }
    }

    /// Branch index, `0` for the zero equilibrium.
    pub fn index(&self) -> u32 {
        match self {
            EquilibriumId::Zero => 0,
            EquilibriumId::Branch { n, .. } => *n,
        }
    }

    /// Zeros in `[0, 1]` of a nontrivial profile.
    pub fn zero_count(&self) -> Option<usize> {
        match self {
            EquilibriumId::Zero => None,
            EquilibriumId::Branch { n, .. } => Some(*n as usize + 1),
        }
    }

    pub fn mirror(&self) -> Self {
        match *self {
            EquilibriumId::Zero => EquilibriumId::Zero,
            EquilibriumId::Branch { n, sign } => EquilibriumId::Branch {
                n,
                sign: sign.flip(),
            },
        }
    }
}

impl fmt::Display for EquilibriumId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EquilibriumId::Zero => f.write_str("0"),
            EquilibriumId::Branch { n, sign } => write!(f, "v{n}{}", sign.symbol()),
        }
    }
}

impl FromStr for EquilibriumId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "0" {
            return Ok(EquilibriumId::Zero);
        }
        let bad = || Error::Input(format!("`{s}` is not an equilibrium id like v1+ or 0"));
        let body = s.strip_prefix('v').ok_or_else(bad)?;
        let (digits, sign) = match body.as_bytes().last() {
            Some(b'+') => (&body[..body.len() - 1], Sign::Plus),
            Some(b'-') => (&body[..body.len() - 1], Sign::Minus),
            _ => return Err(bad()),
        };
        let n: u32 = digits.parse().map_err(|_| bad())?;
        if n == 0 {
            return Err(bad());
        }
        Ok(EquilibriumId::Branch { n, sign })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumProfile {
    pub id: EquilibriumId,
    pub grid: Grid,
    pub values: Vec<f64>,
    /// `u'(0)^2 / 2`
    pub energy: f64,
    pub zeros: usize,
    pub l2: f64,
    pub h10: f64,
    /// `|u(1)|` before the endpoint was pinned to zero.
    pub boundary_residual: f64,
    /// Largest deviation of `(u')^2 / 2 + F(u)` from `energy` along the shot.
    pub hamiltonian_drift: f64,
}

impl EquilibriumProfile {
    fn assemble(
        id: EquilibriumId,
        grid: Grid,
        values: Vec<f64>,
        energy: f64,
        boundary_residual: f64,
        hamiltonian_drift: f64,
    ) -> Self {
        let zeros = match id {
            EquilibriumId::Zero => grid.len(),
            _ => count_zeros(&values),
        };
        EquilibriumProfile {
            id,
            l2: grid.l2_norm(&values),
            h10: grid.h10_norm(&values),
            grid,
            values,
            energy,
            zeros,
            boundary_residual,
            hamiltonian_drift,
        }
    }

    pub fn zero(grid: Grid) -> Self {
        Self::assemble(EquilibriumId::Zero, grid, vec![0.0; grid.len()], 0.0, 0.0, 0.0)
    }

    /// Max-norm of the discrete residual `u_xx + f(u)` over interior nodes.
    pub fn residual(&self, model: &NonlinearityModel) -> f64 {
        let dx2 = self.grid.dx() * self.grid.dx();
        self.values
            .windows(3)
            .map(|w| math::abs((w[0] - 2.0 * w[1] + w[2]) / dx2 + model.value(w[1])))
            .fold(0.0, f64::max)
    }

    /// Location of the first interior zero, interpolated linearly.
    pub fn first_interior_zero(&self) -> Option<f64> {
        let v = &self.values;
        (1..v.len() - 2).find_map(|i| {
            (v[i] * v[i + 1] < 0.0).then(|| {
                let t = v[i] / (v[i] - v[i + 1]);
                self.grid.x(i) + t * self.grid.dx()
            })
        })
    }
}

struct Shot {
    values: Vec<f64>,
    endpoint: f64,
    drift: f64,
}

fn integrate_shot(model: &NonlinearityModel, grid: &Grid, slope: f64, energy: f64) -> Shot {
    let h = grid.dx() / SUBSTEPS as f64;
    let f = |u: f64| model.value(u);
    let mut u = 0.0;
    let mut v = slope;
    let mut values = Vec::with_capacity(grid.len());
    values.push(0.0);
    let mut drift: f64 = 0.0;
    for _ in 0..grid.len() - 1 {
        for _ in 0..SUBSTEPS {
            let (k1u, k1v) = (v, -f(u));
            let (k2u, k2v) = (v + 0.5 * h * k1v, -f(u + 0.5 * h * k1u));
            let (k3u, k3v) = (v + 0.5 * h * k2v, -f(u + 0.5 * h * k2u));
            let (k4u, k4v) = (v + h * k3v, -f(u + h * k3u));
            u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
            v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
            let ham = 0.5 * v * v + model.potential_value(u);
            drift = drift.max(math::abs(ham - energy));
        }
        values.push(u);
    }
    Shot {
        endpoint: u,
        values,
        drift,
    }
}

/// Shoots the profile of `branch` with `u'(0) = sign * sqrt(2E)`.
///
/// For odd `n` the sign must match the branch kind; even branches carry both
/// signs. A missed boundary condition gets one secant correction of `E`.
pub fn shoot_profile(
    model: &NonlinearityModel,
    branch: &BranchSolution,
    sign: Sign,
    interior: usize,
    settings: &ShootSettings,
) -> Result<EquilibriumProfile> {
    match (branch.kind, sign) {
        (BranchKind::Plus, Sign::Minus) | (BranchKind::Minus, Sign::Plus) => {
            return Err(Error::domain(format!(
                "branch {}{} cannot start with sign {sign}",
                branch.n, branch.kind
            )))
        }
        _ => {}
    }
    if interior < MIN_SHOOT_INTERIOR {
        return Err(Error::domain(format!(
            "shooting needs at least {MIN_SHOOT_INTERIOR} interior points"
        )));
    }
    if !(branch.energy > 0.0) {
        return Err(Error::domain(
            "zero-energy branch has only the trivial profile",
        ));
    }
    let grid = Grid::new(interior)?;
    let s = sign.factor();
    let shoot = |e: f64| integrate_shot(model, &grid, s * math::sqrt(2.0 * e), e);
    let mut energy = branch.energy;
    let mut shot = shoot(energy);
    if math::abs(shot.endpoint) > settings.bc_tol {
        let de = (1e-7 * energy).max(1e-14);
        let probe = shoot(energy + de);
        let slope = (probe.endpoint - shot.endpoint) / de;
        if slope != 0.0 && slope.is_finite() {
            let corrected = energy - shot.endpoint / slope;
            if corrected > 0.0 {
                energy = corrected;
                shot = shoot(energy);
            }
        }
        if math::abs(shot.endpoint) > settings.bc_tol {
            return Err(Error::ShootingMismatch {
                residual: math::abs(shot.endpoint),
                tolerance: settings.bc_tol,
            });
        }
    }
    if shot.drift > settings.hamiltonian_tol {
        return Err(Error::Structural(format!(
            "Hamiltonian drift {:e} exceeds {:e}",
            shot.drift, settings.hamiltonian_tol
        )));
    }
    let mut values = shot.values;
    let last = values.len() - 1;
    values[last] = 0.0;
    let a_lo = model.threshold(Sign::Minus);
    let a_hi = model.threshold(Sign::Plus);
    if values.iter().any(|&u| !(u > a_lo && u < a_hi)) {
        return Err(Error::Structural(
            "profile leaves the sign-threshold interval".to_string(),
        ));
    }
    let id = EquilibriumId::branch(branch.n, sign);
    let profile =
        EquilibriumProfile::assemble(id, grid, values, energy, math::abs(shot.endpoint), shot.drift);
    check_structure(&profile, branch.predicted_zeros(), sign)?;
    Ok(profile)
}

fn check_structure(profile: &EquilibriumProfile, zeros: usize, sign: Sign) -> Result<()> {
    if profile.zeros != zeros {
        return Err(Error::Structural(format!(
            "profile {} has {} zeros, expected {zeros}",
            profile.id, profile.zeros
        )));
    }
    let signs = arch_signs(&profile.values);
    let alternating = signs
        .iter()
        .enumerate()
        .all(|(q, &s)| s == if q.is_multiple_of(2) { sign.factor() } else { -sign.factor() });
    if !alternating {
        return Err(Error::Structural(format!(
            "profile {} arches do not alternate from {sign}",
            profile.id
        )));
    }
    Ok(())
}

/// Solves every branch and shoots every profile: the zero equilibrium first,
/// then `v1+, v1-, v2+, v2-, ...`.
pub fn enumerate_equilibria(
    timemap: &TimeMap,
    interior: usize,
    settings: &ShootSettings,
) -> Result<Vec<EquilibriumProfile>> {
    let grid = Grid::new(interior)?;
    let mut out = vec![EquilibriumProfile::zero(grid)];
    for branch in timemap.enumerate_branches()? {
        if branch.energy == 0.0 {
            continue;
        }
        let signs: &[Sign] = match branch.kind {
            BranchKind::Plus => &[Sign::Plus],
            BranchKind::Minus => &[Sign::Minus],
            BranchKind::Even => &[Sign::Plus, Sign::Minus],
        };
        for &sign in signs {
            out.push(shoot_profile(timemap.model(), &branch, sign, interior, settings)?);
        }
    }
    out.sort_by_key(|p| p.id);
    Ok(out)
}

/// Equilibrium of `u'' + sgn(u) = 0` with `n` equal arches, the first of sign
/// `sign`: `u = s_q (x - q/n)((q+1)/n - x) / 2` on `[q/n, (q+1)/n]`.
pub fn limit_profile(n: u32, sign: Sign, interior: usize) -> Result<EquilibriumProfile> {
    if n == 0 {
        return Err(Error::domain("limit profiles need n >= 1"));
    }
    let grid = Grid::new(interior)?;
    let nf = n as f64;
    let values = grid.sample(|x| {
        let q = ((x * nf) as u32).min(n - 1);
        let left = q as f64 / nf;
        let right = (q + 1) as f64 / nf;
        let s = if q.is_multiple_of(2) { sign.factor() } else { -sign.factor() };
        s * (x - left) * (right - x) / 2.0
    });
    let slope = 0.5 / nf;
    Ok(EquilibriumProfile::assemble(
        EquilibriumId::branch(n, sign),
        grid,
        values,
        0.5 * slope * slope,
        0.0,
        0.0,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceCriteria {
    /// Required terminal H1_0 distance.
    pub conv_tol: f64,
    /// Allowed increase of the distance from one entry to the next.
    pub trend_slack: f64,
    /// Lower bound on the H1_0 distance to the zero profile.
    pub zero_floor: f64,
}

impl Default for ConvergenceCriteria {
    fn default() -> Self {
        ConvergenceCriteria {
            conv_tol: 0.05,
            trend_slack: 0.0,
            zero_floor: 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub eps: f64,
    pub energy: f64,
    pub dist_l2: f64,
    pub dist_h10: f64,
    /// H1_0 distance to the zero profile.
    pub zero_h10: f64,
    pub first_zero: Option<f64>,
}

/// One entry of the Heaviside-limit sweep: the `(n, sign)` profile at `eps`
/// against the matching limit profile.
pub fn convergence_row(
    eps: f64,
    n: u32,
    sign: Sign,
    interior: usize,
    settings: &ShootSettings,
) -> Result<ConvergenceRow> {
    let model = NonlinearityModel::heaviside(eps)?;
    let kind = match (n % 2, sign) {
        (0, _) => BranchKind::Even,
        (_, Sign::Plus) => BranchKind::Plus,
        (_, Sign::Minus) => BranchKind::Minus,
    };
    let branch = TimeMap::new(model)
        .solve_branch(n, kind)?
        .filter(|b| b.energy > 0.0)
        .ok_or_else(|| Error::domain(format!("branch {n} does not exist at eps = {eps}")))?;
    let profile = shoot_profile(&model, &branch, sign, interior, settings)?;
    let limit = limit_profile(n, sign, interior)?;
    Ok(ConvergenceRow {
        eps,
        energy: profile.energy,
        dist_l2: profile.grid.l2_distance(&profile.values, &limit.values),
        dist_h10: profile.grid.h10_distance(&profile.values, &limit.values),
        zero_h10: profile.h10,
        first_zero: profile.first_interior_zero(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceSweep {
    pub rows: Vec<ConvergenceRow>,
    pub terminal_ok: bool,
    pub trend_ok: bool,
    pub away_from_zero: bool,
    /// Index of the first row whose distance rose beyond the slack.
    pub first_trend_break: Option<usize>,
}

impl ConvergenceSweep {
    pub fn assemble(rows: Vec<ConvergenceRow>, criteria: &ConvergenceCriteria) -> Self {
        let first_trend_break = rows
            .windows(2)
            .position(|w| {
                if criteria.trend_slack == 0.0 {
                    w[1].dist_h10 >= w[0].dist_h10
                } else {
                    w[1].dist_h10 > w[0].dist_h10 + criteria.trend_slack
                }
            })
            .map(|i| i + 1);
        ConvergenceSweep {
            terminal_ok: rows
                .last()
                .is_some_and(|r| r.dist_h10 < criteria.conv_tol),
            trend_ok: first_trend_break.is_none(),
            away_from_zero: rows.iter().all(|r| r.zero_h10 > criteria.zero_floor),
            first_trend_break,
            rows,
        }
    }

    pub fn passed(&self) -> bool {
        self.terminal_ok && self.trend_ok && self.away_from_zero
    }
}

/// Sequential sweep; every `eps` must admit branch `n`.
pub fn convergence_sweep(
    eps_list: &[f64],
    n: u32,
    sign: Sign,
    interior: usize,
    settings: &ShootSettings,
    criteria: &ConvergenceCriteria,
) -> Result<ConvergenceSweep> {
    check_sweep_domain(eps_list, n)?;
    let rows = eps_list
        .iter()
        .map(|&eps| convergence_row(eps, n, sign, interior, settings))
        .collect::<Result<Vec<_>>>()?;
    Ok(ConvergenceSweep::assemble(rows, criteria))
}

/// Rejects `eps` values whose slope `1/eps^2` does not exceed `n^2 pi^2`.
pub fn check_sweep_domain(eps_list: &[f64], n: u32) -> Result<()> {
    let lambda = crate::timemap::eigenvalue(n);
    let bad: Vec<String> = eps_list
        .iter()
        .filter(|&&e| !(e > 0.0 && 1.0 / (e * e) > lambda))
        .map(|e| e.to_string())
        .collect();
    if bad.is_empty() {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "branch {n} does not exist for eps = {}",
            bad.join(", ")
        )))
    }
}
