//! IMEX Euler integration of `u_t = u_xx + f(u)` on `(0, 1)` with
//! homogeneous Dirichlet data, plus the energy and absorbing-ball checks
//! evaluated along each run.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::equilibria::{EquilibriumId, EquilibriumProfile};
use crate::grid::Grid;
use crate::math;
use crate::nonlinearity::NonlinearityModel;
use crate::tridiag::Tridiagonal;
use crate::{Error, Result};

/// First Dirichlet eigenvalue of `-d^2/dx^2` on `(0, 1)`.
pub const LAMBDA_1: f64 = math::PI * math::PI;

#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    pub grid: Grid,
    pub values: Vec<f64>,
    pub time: f64,
}

impl FieldState {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        grid.check(&values)?;
        if values[0] != 0.0 || values[values.len() - 1] != 0.0 {
            return Err(Error::domain("field must vanish at both boundary nodes"));
        }
        Ok(FieldState {
            grid,
            values,
            time: 0.0,
        })
    }

    pub fn zero(grid: Grid) -> Self {
        FieldState {
            grid,
            values: vec![0.0; grid.len()],
            time: 0.0,
        }
    }

    pub fn from_fn(grid: Grid, g: impl FnMut(f64) -> f64) -> Result<Self> {
        Self::new(grid, grid.sample(g))
    }

    /// `amp * sin(k pi x)`.
    pub fn sine(grid: Grid, k: u32, amp: f64) -> Result<Self> {
        let kf = k as f64;
        Self::from_fn(grid, |x| amp * math::sin(kf * math::PI * x))
    }

    /// `sum_k coeffs[k-1] sin(k pi x)`.
    pub fn sine_series(grid: Grid, coeffs: &[f64]) -> Result<Self> {
        Self::from_fn(grid, |x| {
            coeffs
                .iter()
                .enumerate()
                .map(|(j, c)| c * math::sin((j + 1) as f64 * math::PI * x))
                .sum()
        })
    }

    pub fn from_profile(profile: &EquilibriumProfile) -> Self {
        FieldState {
            grid: profile.grid,
            values: profile.values.clone(),
            time: 0.0,
        }
    }

    /// Adds `amp * sin(k pi x)`.
    pub fn perturbed(&self, k: u32, amp: f64) -> Self {
        let kf = k as f64;
        let mut next = self.clone();
        let last = next.values.len() - 1;
        for (i, v) in next.values.iter_mut().enumerate().take(last).skip(1) {
            *v += amp * math::sin(kf * math::PI * self.grid.x(i));
        }
        next
    }

    pub fn l2_norm_sq(&self) -> f64 {
        self.grid.l2_norm_sq(&self.values)
    }

    pub fn h10_norm_sq(&self) -> f64 {
        self.grid.h10_norm_sq(&self.values)
    }
}

/// Largest admissible step: `0.25 / f'(0)`, which is `0.25 eps^2` for the
/// Heaviside family and `0.25 / lambda` otherwise.
pub fn dt_max(model: &NonlinearityModel) -> f64 {
    0.25 / model.lipschitz()
}

/// `V(u) = |u|_{H1_0}^2 / 2 - int F(u)`.
pub fn lyapunov(model: &NonlinearityModel, state: &FieldState) -> f64 {
    lyapunov_with(&state.grid, &state.values, |s| model.potential_value(s))
}

/// [`lyapunov`] with an arbitrary potential.
pub fn lyapunov_with(grid: &Grid, values: &[f64], potential: impl Fn(f64) -> f64) -> f64 {
    let pot: Vec<f64> = values.iter().map(|&u| potential(u)).collect();
    0.5 * grid.h10_norm_sq(values) - grid.trapezoid(&pot)
}

/// Per-step tolerance on increases of the Lyapunov functional.
pub fn lyapunov_tolerance(v: f64) -> f64 {
    1e-8 * (1.0 + math::abs(v))
}

/// Solves `(I - dt L) u_new = u_old + dt f(u_old)` with a factorization
/// reused across steps.
#[derive(Debug, Clone)]
pub struct ImexStepper {
    model: NonlinearityModel,
    grid: Grid,
    dt: f64,
    system: Tridiagonal,
    rhs: Vec<f64>,
}

impl ImexStepper {
    pub fn new(model: NonlinearityModel, grid: Grid, dt: f64) -> Result<Self> {
        let limit = dt_max(&model);
        if !(dt > 0.0 && dt <= limit * (1.0 + 1e-12)) {
            return Err(Error::domain(format!("time step {dt} outside (0, {limit}]")));
        }
        let r = dt / (grid.dx() * grid.dx());
        Ok(ImexStepper {
            model,
            grid,
            dt,
            system: Tridiagonal::constant(grid.interior(), -r, 1.0 + 2.0 * r)?,
            rhs: vec![0.0; grid.interior()],
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn model(&self) -> &NonlinearityModel {
        &self.model
    }

    pub fn step(&mut self, state: &mut FieldState) -> Result<()> {
        if state.grid != self.grid {
            return Err(Error::domain("state grid differs from the stepper grid"));
        }
        let n = self.grid.interior();
        for i in 0..n {
            let u = state.values[i + 1];
            self.rhs[i] = u + self.dt * self.model.value(u);
        }
        self.system.solve_in_place(&mut self.rhs);
        if self.rhs.iter().any(|v| !v.is_finite()) {
            return Err(Error::BlowUp { time: state.time });
        }
        state.values[1..=n].copy_from_slice(&self.rhs);
        state.time += self.dt;
        Ok(())
    }
}

/// One IMEX step of size `dt`.
pub fn step(model: &NonlinearityModel, state: &FieldState, dt: f64) -> Result<FieldState> {
    let mut next = state.clone();
    ImexStepper::new(*model, state.grid, dt)?.step(&mut next)?;
    Ok(next)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaptureSettings {
    /// L2 radius around an equilibrium that counts as capture.
    pub capture_tol: f64,
    /// Time the trajectory must stay inside the radius.
    pub dwell: f64,
    pub t_max: f64,
    /// Step size; `None` uses `min(dt_max, 1e-3)`.
    pub dt: Option<f64>,
}

impl Default for CaptureSettings {
    fn default() -> Self {
        CaptureSettings {
            capture_tol: 1e-3,
            dwell: 1.0,
            t_max: 50.0,
            dt: None,
        }
    }
}

impl CaptureSettings {
    pub fn step_size(&self, model: &NonlinearityModel) -> f64 {
        self.dt.unwrap_or_else(|| dt_max(model).min(1e-3))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Snapshot {
    pub time: f64,
    pub l2_sq: f64,
    pub h10_sq: f64,
    pub lyapunov: f64,
    /// `int_0^t |u|_{H1_0}^2 ds` by the trapezoid rule over steps.
    pub h10_integral: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Capture {
    pub id: EquilibriumId,
    /// Position in the equilibrium list handed to the run.
    pub index: usize,
    /// Time the trajectory entered the capture radius for good.
    pub time: f64,
    pub distance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LyapunovViolation {
    pub step: usize,
    pub time: f64,
    pub increase: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub dt: f64,
    pub steps: usize,
    pub initial_l2_sq: f64,
    pub snapshots: Vec<Snapshot>,
    pub captured: Option<Capture>,
    pub final_state: FieldState,
    pub first_lyapunov_violation: Option<LyapunovViolation>,
    /// Largest per-step increase of `V` (negative when `V` always fell).
    pub max_lyapunov_increase: f64,
    /// `sup (2 int |u| - |u|_{H1_0}^2)` over every step.
    pub dissipation_sup: f64,
    /// `sup |f(u)|_{L2}^2` over every step.
    pub forcing_sup: f64,
}

impl TrajectoryRecord {
    pub fn lyapunov_monotone(&self) -> bool {
        self.first_lyapunov_violation.is_none()
    }

    /// The absorbing-ball constant `K = sup(2 int |u| - |u|_{H1_0}^2)_+ / 2 + 1`.
    pub fn absorbing_constant(&self) -> f64 {
        0.5 * self.dissipation_sup.max(0.0) + 1.0
    }

    /// Checks `|u(t)|^2 <= e^{-lambda_1 t} |u(0)|^2 + K / lambda_1 + slack`
    /// at every snapshot.
    pub fn check_l2_bound(&self) -> EstimateCheck {
        let k = self.absorbing_constant();
        let slack = self.slack();
        let mut check = EstimateCheck::new(k);
        for s in &self.snapshots {
            let bound =
                math::exp(-LAMBDA_1 * s.time) * self.initial_l2_sq + k / LAMBDA_1 + slack;
            check.record(s.time, s.l2_sq, bound);
        }
        check
    }

    /// Checks `int_t^{t+r} |u|_{H1_0}^2 <= |u(0)|^2 e^{-lambda_1 t} + (1/lambda_1 + r) K`
    /// on windows starting at each snapshot, with `r` the smallest snapshot
    /// gap not below `window`.
    pub fn check_h10_mean(&self, window: f64) -> EstimateCheck {
        let k = self.absorbing_constant();
        let slack = self.slack();
        let mut check = EstimateCheck::new(k);
        for (i, s) in self.snapshots.iter().enumerate() {
            let Some(e) = self.snapshots[i..]
                .iter()
                .find(|e| e.time >= s.time + window * (1.0 - 1e-12))
            else {
                break;
            };
            let r = e.time - s.time;
            let lhs = e.h10_integral - s.h10_integral;
            let bound = self.initial_l2_sq * math::exp(-LAMBDA_1 * s.time)
                + (1.0 / LAMBDA_1 + r) * k
                + slack;
            check.record(s.time, lhs, bound);
        }
        check
    }

    /// Checks the uniform-Gronwall form
    /// `|u(t+r)|_{H1_0}^2 <= ((|u(0)|^2 e^{-lambda_1 t} + (1/lambda_1 + r) K) / r + Kbar) e^r`
    /// with `Kbar = sup |f(u)|_{L2}^2`.
    pub fn check_h10_pointwise(&self, window: f64) -> EstimateCheck {
        let k = self.absorbing_constant();
        let k_bar = self.forcing_sup;
        let slack = self.slack();
        let mut check = EstimateCheck::new(k);
        for (i, s) in self.snapshots.iter().enumerate() {
            let Some(e) = self.snapshots[i..]
                .iter()
                .find(|e| e.time >= s.time + window * (1.0 - 1e-12))
            else {
                break;
            };
            let r = e.time - s.time;
            let mean = self.initial_l2_sq * math::exp(-LAMBDA_1 * s.time) + (1.0 / LAMBDA_1 + r) * k;
            let bound = (mean / r + k_bar) * math::exp(r) + slack;
            check.record(e.time, e.h10_sq, bound);
        }
        check
    }

    fn slack(&self) -> f64 {
        1e-6 * (1.0 + self.initial_l2_sq)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateCheck {
    pub constant: f64,
    pub checked: usize,
    /// Smallest `bound - value` seen.
    pub min_margin: f64,
    /// Time of the first snapshot where the bound failed.
    pub first_failure: Option<f64>,
}

impl EstimateCheck {
    fn new(constant: f64) -> Self {
        EstimateCheck {
            constant,
            checked: 0,
            min_margin: f64::INFINITY,
            first_failure: None,
        }
    }

    fn record(&mut self, time: f64, value: f64, bound: f64) {
        self.checked += 1;
        let margin = bound - value;
        self.min_margin = self.min_margin.min(margin);
        if margin < 0.0 && self.first_failure.is_none() {
            self.first_failure = Some(time);
        }
    }

    pub fn holds(&self) -> bool {
        self.first_failure.is_none()
    }
}

struct Diagnostics<'a> {
    model: &'a NonlinearityModel,
    grid: Grid,
    scratch: Vec<f64>,
}

impl Diagnostics<'_> {
    /// `(h10^2, lyapunov, 2 int |u| - h10^2, |f(u)|^2)`.
    fn evaluate(&mut self, values: &[f64]) -> (f64, f64, f64, f64) {
        let g = &self.grid;
        let h10_sq = g.h10_norm_sq(values);
        for (s, &u) in self.scratch.iter_mut().zip(values) {
            *s = self.model.potential_value(u);
        }
        let v = 0.5 * h10_sq - g.trapezoid(&self.scratch);
        for (s, &u) in self.scratch.iter_mut().zip(values) {
            *s = math::abs(u);
        }
        let l1 = g.trapezoid(&self.scratch);
        for (s, &u) in self.scratch.iter_mut().zip(values) {
            let f = self.model.value(u);
            *s = f * f;
        }
        let f_sq = g.trapezoid(&self.scratch);
        (h10_sq, v, 2.0 * l1 - h10_sq, f_sq)
    }
}

/// Integrates from `u0` until it settles within `capture_tol` of one of
/// `equilibria` for `dwell` time units, or until `t_max`.
pub fn integrate_until_capture(
    model: &NonlinearityModel,
    u0: &FieldState,
    equilibria: &[EquilibriumProfile],
    settings: &CaptureSettings,
) -> Result<TrajectoryRecord> {
    if equilibria.is_empty() {
        return Err(Error::domain("capture needs at least one equilibrium"));
    }
    if !(settings.capture_tol > 0.0) {
        return Err(Error::domain("capture tolerance must be positive"));
    }
    if equilibria.iter().any(|e| e.grid != u0.grid) {
        return Err(Error::domain("equilibria live on a different grid"));
    }
    let targets: Vec<&[f64]> = equilibria.iter().map(|e| e.values.as_slice()).collect();
    let ids: Vec<EquilibriumId> = equilibria.iter().map(|e| e.id).collect();
    let mut run = Run::new(model, u0, settings, settings.t_max)?;
    let mut candidate: Option<(usize, f64)> = None;
    loop {
        let g = &run.state.grid;
        let nearest = targets
            .iter()
            .enumerate()
            .map(|(i, t)| (i, g.l2_distance(&run.state.values, t)))
            .filter(|(_, d)| *d < settings.capture_tol)
            .min_by(|a, b| a.1.total_cmp(&b.1));
        candidate = match (candidate, nearest) {
            (Some((i, since)), Some((j, _))) if i == j => Some((i, since)),
            (_, Some((j, _))) => Some((j, run.state.time)),
            (_, None) => None,
        };
        if let Some((i, since)) = candidate {
            if run.state.time - since >= settings.dwell * (1.0 - 1e-12) {
                let distance = g.l2_distance(&run.state.values, targets[i]);
                let mut record = run.finish();
                record.captured = Some(Capture {
                    id: ids[i],
                    index: i,
                    time: since,
                    distance,
                });
                return Ok(record);
            }
        }
        if !run.advance()? {
            return Ok(run.finish());
        }
    }
}

/// Integrates from `u0` up to time `t_end` without capture detection.
pub fn integrate_for(
    model: &NonlinearityModel,
    u0: &FieldState,
    t_end: f64,
    dt: f64,
) -> Result<TrajectoryRecord> {
    let settings = CaptureSettings {
        dt: Some(dt),
        t_max: t_end,
        ..CaptureSettings::default()
    };
    let mut run = Run::new(model, u0, &settings, t_end)?;
    while run.advance()? {}
    Ok(run.finish())
}

struct Run<'a> {
    stepper: ImexStepper,
    diag: Diagnostics<'a>,
    state: FieldState,
    t_end: f64,
    snapshot_every: f64,
    next_snapshot: f64,
    steps: usize,
    record: TrajectoryRecord,
    last_h10_sq: f64,
    last_v: f64,
    h10_integral: f64,
}

impl<'a> Run<'a> {
    fn new(
        model: &'a NonlinearityModel,
        u0: &FieldState,
        settings: &CaptureSettings,
        t_end: f64,
    ) -> Result<Self> {
        let dt = settings.step_size(model);
        let stepper = ImexStepper::new(*model, u0.grid, dt)?;
        let mut diag = Diagnostics {
            model,
            grid: u0.grid,
            scratch: vec![0.0; u0.grid.len()],
        };
        let (h10_sq, v, diss, f_sq) = diag.evaluate(&u0.values);
        let mut state = u0.clone();
        state.time = 0.0;
        let snapshot_every = dt.max(t_end / 1000.0);
        let first = Snapshot {
            time: 0.0,
            l2_sq: u0.l2_norm_sq(),
            h10_sq,
            lyapunov: v,
            h10_integral: 0.0,
        };
        Ok(Run {
            stepper,
            diag,
            t_end,
            snapshot_every,
            next_snapshot: snapshot_every,
            steps: 0,
            record: TrajectoryRecord {
                dt,
                steps: 0,
                initial_l2_sq: first.l2_sq,
                snapshots: vec![first],
                captured: None,
                final_state: FieldState::zero(u0.grid),
                first_lyapunov_violation: None,
                max_lyapunov_increase: f64::NEG_INFINITY,
                dissipation_sup: diss,
                forcing_sup: f_sq,
            },
            state,
            last_h10_sq: h10_sq,
            last_v: v,
            h10_integral: 0.0,
        })
    }

    /// Takes one step; `false` once `t_end` has been reached.
    fn advance(&mut self) -> Result<bool> {
        let dt = self.stepper.dt();
        if self.state.time + 0.5 * dt > self.t_end {
            return Ok(false);
        }
        self.stepper.step(&mut self.state)?;
        self.steps += 1;
        let (h10_sq, v, diss, f_sq) = self.diag.evaluate(&self.state.values);
        let rec = &mut self.record;
        let increase = v - self.last_v;
        rec.max_lyapunov_increase = rec.max_lyapunov_increase.max(increase);
        if increase > lyapunov_tolerance(self.last_v) && rec.first_lyapunov_violation.is_none() {
            rec.first_lyapunov_violation = Some(LyapunovViolation {
                step: self.steps,
                time: self.state.time,
                increase,
            });
        }
        rec.dissipation_sup = rec.dissipation_sup.max(diss);
        rec.forcing_sup = rec.forcing_sup.max(f_sq);
        self.h10_integral += 0.5 * dt * (self.last_h10_sq + h10_sq);
        self.last_h10_sq = h10_sq;
        self.last_v = v;
        if self.state.time >= self.next_snapshot * (1.0 - 1e-12) {
            self.push_snapshot();
            self.next_snapshot += self.snapshot_every;
        }
        Ok(true)
    }

    fn push_snapshot(&mut self) {
        self.record.snapshots.push(Snapshot {
            time: self.state.time,
            l2_sq: self.state.l2_norm_sq(),
            h10_sq: self.last_h10_sq,
            lyapunov: self.last_v,
            h10_integral: self.h10_integral,
        });
    }

    fn finish(mut self) -> TrajectoryRecord {
        if self.record.snapshots.last().map(|s| s.time) != Some(self.state.time) {
            self.push_snapshot();
        }
        self.record.steps = self.steps;
        self.record.final_state = self.state;
        self.record
    }
}

/// `sup_t |u_a(t) - u_b(t)|_{L2}` over `[0, t_end]` for two models started
/// from the same state with the same step.
pub fn trajectory_gap(
    a: &NonlinearityModel,
    b: &NonlinearityModel,
    u0: &FieldState,
    t_end: f64,
    dt: f64,
) -> Result<f64> {
    let mut sa = ImexStepper::new(*a, u0.grid, dt)?;
    let mut sb = ImexStepper::new(*b, u0.grid, dt)?;
    let mut ua = u0.clone();
    let mut ub = u0.clone();
    let mut gap: f64 = 0.0;
    while ua.time + 0.5 * dt <= t_end {
        sa.step(&mut ua)?;
        sb.step(&mut ub)?;
        gap = gap.max(u0.grid.l2_distance(&ua.values, &ub.values));
    }
    Ok(gap)
}

/// Gaps between the Heaviside trajectories at `eps` and `eps / 2` for each
/// entry of `eps_list`, all run with the step admissible at the smallest
/// `eps / 2`.
pub fn heaviside_gap_sweep(eps_list: &[f64], u0: &FieldState, t_end: f64) -> Result<Vec<f64>> {
    let smallest = eps_list.iter().copied().fold(f64::INFINITY, f64::min);
    let dt = dt_max(&NonlinearityModel::heaviside(smallest / 2.0)?).min(1e-3);
    eps_list
        .iter()
        .map(|&eps| {
            let a = NonlinearityModel::heaviside(eps)?;
            let b = NonlinearityModel::heaviside(eps / 2.0)?;
            trajectory_gap(&a, &b, u0, t_end, dt)
        })
        .collect()
}
