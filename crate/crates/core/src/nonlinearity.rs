//! Reaction terms `f`, their potentials `F(s) = int_0^s f`, and the inverse
//! branches of `F` on either side of the origin.
//!
//! Three concrete families are built in:
//!
//! * `LinearOracle(lambda)`: `f(s) = lambda s`. Not strictly concave; it exists
//!   because its time map is known in closed form.
//! * `SaturatingConcave(lambda)`: `f(s) = lambda s / (1 + |s|)`.
//! * `HeavisideApprox(eps)`: `f(s) = tanh(s / eps^2)`, a smooth odd
//!   approximation of the sign function whose slope at the origin is
//!   `1 / eps^2`.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::math;
use crate::roots::newton_bracketed;
use crate::{Error, Result};

/// Ceiling on potential levels handed to the inverse branches when the
/// potential is unbounded.
pub const ENERGY_CAP: f64 = 1e6;

/// Side of the origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "plus",
            Sign::Minus => "minus",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelKind {
    LinearOracle { lambda: f64 },
    SaturatingConcave { lambda: f64 },
    HeavisideApprox { eps: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonlinearityModel {
    kind: ModelKind,
    slope_at_zero: f64,
    a_minus: f64,
    a_plus: f64,
    e_minus: f64,
    e_plus: f64,
}

impl NonlinearityModel {
    pub fn new(kind: ModelKind) -> Result<Self> {
        let slope = match kind {
            ModelKind::LinearOracle { lambda } | ModelKind::SaturatingConcave { lambda } => {
                if !(lambda > 0.0 && lambda.is_finite()) {
                    return Err(Error::domain(format!(
                        "lambda must be positive and finite, got {lambda}"
                    )));
                }
                lambda
            }
            ModelKind::HeavisideApprox { eps } => {
                if !(eps > 0.0 && eps <= 1.0) {
                    return Err(Error::domain(format!("eps must lie in (0, 1], got {eps}")));
                }
                let slope = 1.0 / (eps * eps);
                if !slope.is_finite() {
                    return Err(Error::domain(format!("eps = {eps} gives an infinite slope")));
                }
                slope
            }
        };
        // all built-in families keep their sign on each half-line and have
        // potentials growing at least linearly
        Ok(NonlinearityModel {
            kind,
            slope_at_zero: slope,
            a_minus: f64::NEG_INFINITY,
            a_plus: f64::INFINITY,
            e_minus: f64::INFINITY,
            e_plus: f64::INFINITY,
        })
    }

    pub fn linear(lambda: f64) -> Result<Self> {
        Self::new(ModelKind::LinearOracle { lambda })
    }

    pub fn saturating(lambda: f64) -> Result<Self> {
        Self::new(ModelKind::SaturatingConcave { lambda })
    }

    pub fn heaviside(eps: f64) -> Result<Self> {
        Self::new(ModelKind::HeavisideApprox { eps })
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    /// `f'(0)`.
    pub fn slope_at_zero(&self) -> f64 {
        self.slope_at_zero
    }

    /// Sign-change threshold `a_+` or `a_-`.
    pub fn threshold(&self, sign: Sign) -> f64 {
        match sign {
            Sign::Plus => self.a_plus,
            Sign::Minus => self.a_minus,
        }
    }

    /// Potential limit `E_+` or `E_-` at the matching threshold.
    pub fn energy_limit(&self, sign: Sign) -> f64 {
        match sign {
            Sign::Plus => self.e_plus,
            Sign::Minus => self.e_minus,
        }
    }

    /// Largest energy accepted by the inverse branch on `sign`.
    pub fn energy_ceiling(&self, sign: Sign) -> f64 {
        self.energy_limit(sign).min(ENERGY_CAP)
    }

    /// `f(-s) = -f(s)` holds for every built-in family.
    pub fn is_odd(&self) -> bool {
        true
    }

    /// Lipschitz constant of `f` on the real line.
    pub fn lipschitz(&self) -> f64 {
        self.slope_at_zero
    }

    pub fn heaviside_eps(&self) -> Option<f64> {
        match self.kind {
            ModelKind::HeavisideApprox { eps } => Some(eps),
            _ => None,
        }
    }

    /// `f(s)` without input checks.
    #[inline]
    pub fn value(&self, s: f64) -> f64 {
        match self.kind {
            ModelKind::LinearOracle { lambda } => lambda * s,
            ModelKind::SaturatingConcave { lambda } => lambda * s / (1.0 + math::abs(s)),
            ModelKind::HeavisideApprox { eps } => math::tanh(s / (eps * eps)),
        }
    }

    pub fn eval(&self, s: f64) -> Result<f64> {
        if !s.is_finite() {
            return Err(Error::domain("f evaluated at a non-finite point"));
        }
        Ok(self.value(s))
    }

    /// `F(s)` without input checks, accurate in the relative sense near 0.
    #[inline]
    pub fn potential_value(&self, s: f64) -> f64 {
        match self.kind {
            ModelKind::LinearOracle { lambda } => 0.5 * lambda * s * s,
            ModelKind::SaturatingConcave { lambda } => lambda * x_minus_ln_1p(math::abs(s)),
            ModelKind::HeavisideApprox { eps } => {
                let e2 = eps * eps;
                e2 * ln_cosh(s / e2)
            }
        }
    }

    pub fn potential(&self, s: f64) -> Result<f64> {
        if !s.is_finite() {
            return Err(Error::domain("F evaluated at a non-finite point"));
        }
        Ok(self.potential_value(s))
    }

    /// Inversion tolerance on `|F(U(E)) - E|`.
    pub fn inversion_tolerance(e: f64) -> f64 {
        (100.0 * f64::EPSILON * math::abs(e)).max(1e-12)
    }

    /// `U_+(E)` or `U_-(E)`: the point on the `sign` side with `F(U) = E`.
    pub fn invert_potential(&self, sign: Sign, e: f64) -> Result<f64> {
        let ceiling = self.energy_ceiling(sign);
        if !(e >= 0.0 && e < ceiling) {
            return Err(Error::domain(format!(
                "potential level {e} outside [0, {ceiling})"
            )));
        }
        if e == 0.0 {
            return Ok(0.0);
        }
        let s = sign.factor();
        let phi = |w: f64| self.potential_value(s * w);
        let dphi = |w: f64| s * self.value(s * w);
        let guess = math::sqrt(2.0 * e / self.slope_at_zero);
        let mut hi = 2.0 * guess;
        let limit = math::abs(self.threshold(sign));
        let mut doublings = 0;
        while phi(hi) < e {
            hi *= 2.0;
            doublings += 1;
            if hi >= limit || doublings > 2000 || !hi.is_finite() {
                return Err(Error::numerical("could not bracket the inverse potential", hi));
            }
        }
        let w = newton_bracketed(phi, dphi, e, guess, 0.0, hi, 200)?;
        let residual = math::abs(phi(w) - e);
        if residual > Self::inversion_tolerance(e) {
            return Err(Error::numerical(
                format!("inverse potential residual {residual:e} too large"),
                s * w,
            ));
        }
        Ok(s * w)
    }

    pub fn invert_potential_plus(&self, e: f64) -> Result<f64> {
        self.invert_potential(Sign::Plus, e)
    }

    pub fn invert_potential_minus(&self, e: f64) -> Result<f64> {
        self.invert_potential(Sign::Minus, e)
    }

    /// `ln(1 - |f(s)|)`, computed without cancellation for the Heaviside
    /// family. Finite exactly when `|f(s)| < 1`.
    pub fn saturation_log_gap(&self, s: f64) -> f64 {
        match self.kind {
            ModelKind::HeavisideApprox { eps } => {
                // 1 - tanh|x| = 2 e^{-2|x|} / (1 + e^{-2|x|})
                let x = math::abs(s) / (eps * eps);
                if x < 0.5 {
                    math::ln_1p(-math::abs(math::tanh(x)))
                } else {
                    math::LN_2 - 2.0 * x - math::ln_1p(math::exp(-2.0 * x))
                }
            }
            _ => math::ln_1p(-math::abs(self.value(s))),
        }
    }

    pub fn validate_conditions(&self, grid: &SamplingGrid) -> Result<ConditionReport> {
        validate(self, grid)
    }
}

impl fmt::Display for NonlinearityModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            ModelKind::LinearOracle { lambda } => write!(f, "linear:lambda={lambda}"),
            ModelKind::SaturatingConcave { lambda } => write!(f, "sat:lambda={lambda}"),
            ModelKind::HeavisideApprox { eps } => write!(f, "heaviside:eps={eps}"),
        }
    }
}

impl FromStr for NonlinearityModel {
    type Err = Error;

    /// Parses `linear:lambda=2`, `sat:lambda=50` or `heaviside:eps=0.2`.
    fn from_str(spec: &str) -> Result<Self> {
        let (name, params) = spec
            .split_once(':')
            .ok_or_else(|| Error::Input(format!("model spec `{spec}` lacks `name:key=value`")))?;
        let (key, value) = params
            .split_once('=')
            .ok_or_else(|| Error::Input(format!("model parameter `{params}` lacks `=`")))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| Error::Input(format!("cannot parse `{value}` as a number")))?;
        let kind = match (name.trim(), key.trim()) {
            ("linear", "lambda") => ModelKind::LinearOracle { lambda: value },
            ("sat", "lambda") => ModelKind::SaturatingConcave { lambda: value },
            ("heaviside", "eps") => ModelKind::HeavisideApprox { eps: value },
            _ => return Err(Error::Input(format!("unknown model spec `{spec}`"))),
        };
        NonlinearityModel::new(kind).map_err(|e| Error::Input(e.to_string()))
    }
}

/// `x - ln(1 + x)` for `x >= 0`, by series near zero.
fn x_minus_ln_1p(x: f64) -> f64 {
    if x < 0.1 {
        let mut term = x * x;
        let mut sum = 0.0;
        let mut k = 2.0;
        let mut sign = 1.0;
        while k < 40.0 {
            let t = sign * term / k;
            sum += t;
            if math::abs(t) < 1e-18 * sum {
                break;
            }
            term *= x;
            sign = -sign;
            k += 1.0;
        }
        sum
    } else {
        x - math::ln_1p(x)
    }
}

/// `ln cosh x` without overflow and without cancellation near 0.
fn ln_cosh(x: f64) -> f64 {
    let x = math::abs(x);
    if x < 1.0 {
        let s = math::sinh(0.5 * x);
        math::ln_1p(2.0 * s * s)
    } else {
        x + math::ln_1p(math::exp(-2.0 * x)) - math::LN_2
    }
}

/// Symmetric sampling interval `[-half_width, half_width]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplingGrid {
    pub half_width: f64,
    pub points: usize,
}

impl Default for SamplingGrid {
    fn default() -> Self {
        SamplingGrid {
            half_width: 50.0,
            points: 2001,
        }
    }
}

impl SamplingGrid {
    fn samples(&self) -> Vec<f64> {
        let n = self.points;
        let h = 2.0 * self.half_width / (n - 1) as f64;
        (0..n)
            .map(|i| {
                let x = -self.half_width + i as f64 * h;
                if 2 * i + 1 == n {
                    0.0
                } else {
                    x
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Condition {
    /// Finite values everywhere on the sample.
    Continuity,
    ZeroAtOrigin,
    /// `f'(0)` positive, finite and matching a central difference.
    PositiveSlope,
    /// `sgn f(s) = sgn s` inside the thresholds.
    SignStructure,
    /// Non-decreasing on the sample.
    Monotone,
    /// Strictly concave for `s > 0`, strictly convex for `s < 0`.
    ConcaveConvex,
    /// `|f(s)| <= C1 + C2 |s|`.
    LinearGrowth,
    /// `limsup f(s)/s <= 0` as `|s| -> inf`.
    Dissipative,
    /// `|f(s)| < 1`.
    StrictlyBounded,
    /// `|f(s) - sgn s| < eps` for `|s| > eps`.
    HeavisideProximity,
}

impl Condition {
    pub const STANDING: [Condition; 7] = [
        Condition::Continuity,
        Condition::ZeroAtOrigin,
        Condition::PositiveSlope,
        Condition::SignStructure,
        Condition::ConcaveConvex,
        Condition::LinearGrowth,
        Condition::Dissipative,
    ];

    pub const HEAVISIDE_FAMILY: [Condition; 6] = [
        Condition::Monotone,
        Condition::ZeroAtOrigin,
        Condition::PositiveSlope,
        Condition::ConcaveConvex,
        Condition::StrictlyBounded,
        Condition::HeavisideProximity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Condition::Continuity => "continuity",
            Condition::ZeroAtOrigin => "zero-at-origin",
            Condition::PositiveSlope => "positive-slope",
            Condition::SignStructure => "sign-structure",
            Condition::Monotone => "monotone",
            Condition::ConcaveConvex => "concave-convex",
            Condition::LinearGrowth => "linear-growth",
            Condition::Dissipative => "dissipative",
            Condition::StrictlyBounded => "strictly-bounded",
            Condition::HeavisideProximity => "heaviside-proximity",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionCheck {
    pub condition: Condition,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport {
    pub checks: Vec<ConditionCheck>,
}

impl ConditionReport {
    pub fn passed(&self, condition: Condition) -> bool {
        self.checks
            .iter()
            .any(|c| c.condition == condition && c.passed)
    }

    pub fn all_pass(&self, conditions: &[Condition]) -> bool {
        conditions.iter().all(|&c| self.passed(c))
    }

    pub fn standing_assumptions_hold(&self) -> bool {
        self.all_pass(&Condition::STANDING)
    }

    pub fn heaviside_family_holds(&self) -> bool {
        self.all_pass(&Condition::HEAVISIDE_FAMILY)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ConditionCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

fn validate(model: &NonlinearityModel, grid: &SamplingGrid) -> Result<ConditionReport> {
    if grid.points < 1000 || !(grid.half_width > 0.0 && grid.half_width.is_finite()) {
        return Err(Error::domain(
            "validation grid needs at least 1000 points on a finite symmetric interval",
        ));
    }
    let xs = grid.samples();
    let fs: Vec<f64> = xs.iter().map(|&x| model.value(x)).collect();
    let mut checks = Vec::new();
    let mut push = |condition, passed, detail: String| {
        checks.push(ConditionCheck {
            condition,
            passed,
            detail,
        })
    };

    let finite = fs.iter().all(|v| v.is_finite());
    push(Condition::Continuity, finite, "all sampled values finite".to_string());

    let f0 = model.value(0.0);
    push(Condition::ZeroAtOrigin, f0 == 0.0, format!("f(0) = {f0:e}"));

    let slope = model.slope_at_zero();
    let h = 1e-6 / slope.max(1.0);
    let fd = (model.value(h) - model.value(-h)) / (2.0 * h);
    let slope_ok = slope > 0.0 && slope.is_finite() && math::abs(fd - slope) <= 1e-4 * slope;
    push(
        Condition::PositiveSlope,
        slope_ok,
        format!("f'(0) = {slope}, central difference {fd}"),
    );

    let a_minus = model.threshold(Sign::Minus);
    let a_plus = model.threshold(Sign::Plus);
    let sign_bad = xs.iter().zip(&fs).find(|(&x, &v)| {
        (x > 0.0 && x < a_plus && v <= 0.0) || (x < 0.0 && x > a_minus && v >= 0.0)
    });
    push(
        Condition::SignStructure,
        sign_bad.is_none(),
        match sign_bad {
            Some((x, v)) => format!("f({x}) = {v} has the wrong sign"),
            None => "sgn f = sgn s on the sample".to_string(),
        },
    );

    let mono_bad = xs
        .windows(2)
        .zip(fs.windows(2))
        .find(|(_, w)| w[1] < w[0])
        .map(|(x, _)| x[0]);
    push(
        Condition::Monotone,
        mono_bad.is_none(),
        match mono_bad {
            Some(x) => format!("f decreases after s = {x}"),
            None => "non-decreasing on the sample".to_string(),
        },
    );

    // Second differences: a triple counts against strictness when the second
    // difference is at rounding level while f itself still moves.
    let mut concave_bad: Option<String> = None;
    for i in 1..xs.len() - 1 {
        let (a, b, c) = (fs[i - 1], fs[i], fs[i + 1]);
        let noise = 8.0 * f64::EPSILON * (math::abs(a) + math::abs(b) + math::abs(c)) + 1e-300;
        let second = a - 2.0 * b + c;
        let first = c - a;
        let flat = math::abs(first) <= 1e3 * noise;
        let orient = if xs[i - 1] >= 0.0 {
            -1.0
        } else if xs[i + 1] <= 0.0 {
            1.0
        } else {
            continue;
        };
        let wrong_way = orient * second < -noise;
        let not_strict = math::abs(second) <= noise && !flat;
        if wrong_way || not_strict {
            concave_bad = Some(format!(
                "second difference {second:e} at s = {} is not strictly {}",
                xs[i],
                if orient < 0.0 { "concave" } else { "convex" }
            ));
            break;
        }
    }
    push(
        Condition::ConcaveConvex,
        concave_bad.is_none(),
        concave_bad.unwrap_or_else(|| "strict second differences of the right sign".to_string()),
    );

    let n = xs.len();
    let outer = |i: usize| i < n / 4 || i >= n - n / 4;
    let growth = |i: usize| math::abs(fs[i]) / (1.0 + math::abs(xs[i]));
    let inner_max = (0..n).filter(|&i| !outer(i)).map(growth).fold(0.0, f64::max);
    let outer_max = (0..n).filter(|&i| outer(i)).map(growth).fold(0.0, f64::max);
    push(
        Condition::LinearGrowth,
        outer_max <= 2.0 * inner_max,
        format!("max |f|/(1+|s|): inner {inner_max:e}, tail {outer_max:e}"),
    );

    let l = grid.half_width;
    let ratio = |s: f64| model.value(s) / s;
    let diss_ok = [l, -l].iter().all(|&end| {
        let far = ratio(end);
        let mid = ratio(end / 2.0);
        far <= 0.0 || far <= 0.75 * mid
    });
    push(
        Condition::Dissipative,
        diss_ok,
        format!(
            "f(s)/s at |s| = {}: {:e}, at |s| = {}: {:e}",
            l / 2.0,
            ratio(l / 2.0),
            l,
            ratio(l)
        ),
    );

    let gaps: Vec<f64> = xs.iter().map(|&x| model.saturation_log_gap(x)).collect();
    let bounded = gaps.iter().all(|g| g.is_finite());
    push(
        Condition::StrictlyBounded,
        bounded,
        if bounded {
            "|f| < 1 on the sample".to_string()
        } else {
            "|f| reaches 1 on the sample".to_string()
        },
    );

    match model.heaviside_eps() {
        Some(eps) => {
            let ln_eps = math::ln(eps);
            let near_ok = xs
                .iter()
                .zip(&gaps)
                .filter(|(x, _)| math::abs(**x) > eps)
                .all(|(_, g)| *g < ln_eps);
            let tail = 2.0 * math::exp(-2.0 / eps);
            push(
                Condition::HeavisideProximity,
                near_ok && tail < eps,
                format!("tail bound 2 exp(-2/eps) = {tail:e} against eps = {eps}"),
            );
        }
        None => push(
            Condition::HeavisideProximity,
            false,
            "not a Heaviside-approximating model".to_string(),
        ),
    }

    Ok(ConditionReport { checks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        let mut s = f(a) + f(b);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(a + i as f64 * h);
        }
        s * h / 3.0
    }

    #[test]
    fn eval_examples() {
        let sat = NonlinearityModel::saturating(50.0).unwrap();
        assert_eq!(sat.eval(0.0).unwrap(), 0.0);
        let lin = NonlinearityModel::linear(2.0).unwrap();
        assert_eq!(lin.eval(3.0).unwrap(), 6.0);
        let hv = NonlinearityModel::heaviside(0.2).unwrap();
        let v = hv.eval(1.0).unwrap();
        // tanh(25) = 1 - 2.8e-22 rounds to 1 in binary64
        assert!((v - 25f64.tanh()).abs() == 0.0);
        assert!((v - 1.0).abs() < 0.2);
        assert!(hv.eval(f64::NAN).is_err());
        assert!(hv.eval(f64::INFINITY).is_err());
    }

    #[test]
    fn potential_examples_against_simpson() {
        let lin = NonlinearityModel::linear(2.0).unwrap();
        assert_eq!(lin.potential(1.0).unwrap(), 1.0);
        let sat = NonlinearityModel::saturating(1.0).unwrap();
        let closed = sat.potential(1.0).unwrap();
        assert!((closed - (1.0 - 2f64.ln())).abs() < 1e-15);
        let quad = simpson(|r| sat.value(r), 0.0, 1.0, 2000);
        assert!((closed - quad).abs() < 1e-12);
        let hv = NonlinearityModel::heaviside(0.3).unwrap();
        for s in [-2.0, -0.05, 0.01, 0.4, 3.0] {
            let quad = simpson(|r| hv.value(r), 0.0, s, 20000);
            assert!((hv.potential(s).unwrap() - quad).abs() < 1e-10, "s={s}");
        }
        for m in [lin, sat, hv] {
            assert_eq!(m.potential(0.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn small_argument_potentials_are_relatively_accurate() {
        let sat = NonlinearityModel::saturating(3.0).unwrap();
        let s = 1e-9;
        let expected = 3.0 * (s * s / 2.0 - s * s * s / 3.0);
        assert!((sat.potential_value(s) / expected - 1.0).abs() < 1e-14);
        let hv = NonlinearityModel::heaviside(0.5).unwrap();
        let x = s / 0.25;
        let expected = 0.25 * (x * x / 2.0);
        assert!((hv.potential_value(s) / expected - 1.0).abs() < 1e-12);
    }

    #[test]
    fn inversion_examples() {
        let lin = NonlinearityModel::linear(2.0).unwrap();
        assert_eq!(lin.invert_potential_plus(0.0).unwrap(), 0.0);
        assert!((lin.invert_potential_plus(1.0).unwrap() - 1.0).abs() < 1e-15);
        let sat = NonlinearityModel::saturating(1.0).unwrap();
        let u = sat.invert_potential_plus(1.0 - 2f64.ln()).unwrap();
        assert!((u - 1.0).abs() < 1e-10);
        let um = sat.invert_potential_minus(1.0 - 2f64.ln()).unwrap();
        assert_eq!(um, -u);
        assert!(sat.invert_potential_plus(-1.0).is_err());
        assert!(sat.invert_potential_plus(ENERGY_CAP).is_err());
    }

    #[test]
    fn heaviside_inverse_matches_closed_form() {
        // F(u) = e2 ln cosh(u/e2)  =>  u = e2 acosh(exp(E/e2)),
        // with acosh(1 + t) = ln(1 + t + sqrt(t (2 + t))) to avoid cancellation
        let eps = 0.2;
        let e2 = eps * eps;
        let hv = NonlinearityModel::heaviside(eps).unwrap();
        for e in [1e-10, 1e-4, 0.05, 0.5, 7.0] {
            let u = hv.invert_potential_plus(e).unwrap();
            let t = (e / e2).exp_m1();
            let closed = e2 * (t + (t * (2.0 + t)).sqrt()).ln_1p();
            assert!((u - closed).abs() <= 1e-12 * closed.max(1e-3), "E={e}");
        }
    }

    #[test]
    fn validation_examples() {
        let grid = SamplingGrid::default();
        let hv = NonlinearityModel::heaviside(0.2)
            .unwrap()
            .validate_conditions(&grid)
            .unwrap();
        assert!(hv.heaviside_family_holds(), "{:?}", hv.failures().collect::<Vec<_>>());
        let lin = NonlinearityModel::linear(2.0)
            .unwrap()
            .validate_conditions(&grid)
            .unwrap();
        assert!(!lin.passed(Condition::ConcaveConvex));
        assert!(!lin.passed(Condition::Dissipative));
        let sat = NonlinearityModel::saturating(50.0)
            .unwrap()
            .validate_conditions(&grid)
            .unwrap();
        assert!(sat.standing_assumptions_hold(), "{:?}", sat.failures().collect::<Vec<_>>());
        assert!(!sat.passed(Condition::StrictlyBounded));
        let coarse = SamplingGrid {
            half_width: 10.0,
            points: 999,
        };
        assert!(NonlinearityModel::linear(1.0)
            .unwrap()
            .validate_conditions(&coarse)
            .is_err());
    }

    #[test]
    fn heaviside_slope_law() {
        let eps: Vec<f64> = (1..=20).map(|k| k as f64 / 20.0).collect();
        let slopes: Vec<f64> = eps
            .iter()
            .map(|&e| NonlinearityModel::heaviside(e).unwrap().slope_at_zero())
            .collect();
        for (e, s) in eps.iter().zip(&slopes) {
            assert!((s - 1.0 / (e * e)).abs() < 1e-12 * s);
        }
        assert!(slopes.windows(2).all(|w| w[1] < w[0]));
        assert!(NonlinearityModel::heaviside(1e-4).unwrap().slope_at_zero() >= 1e8);
    }

    #[test]
    fn spec_strings_round_trip() {
        for s in ["linear:lambda=2", "sat:lambda=50", "heaviside:eps=0.2"] {
            let m: NonlinearityModel = s.parse().unwrap();
            assert_eq!(m.to_string(), s);
        }
        assert!("heaviside:eps=1.5".parse::<NonlinearityModel>().is_err());
        assert!("cubic:a=1".parse::<NonlinearityModel>().is_err());
        assert!("sat".parse::<NonlinearityModel>().is_err());
    }

    fn any_model() -> impl Strategy<Value = NonlinearityModel> {
        prop_oneof![
            (0.1f64..200.0).prop_map(|l| NonlinearityModel::linear(l).unwrap()),
            (0.1f64..200.0).prop_map(|l| NonlinearityModel::saturating(l).unwrap()),
            (0.02f64..1.0).prop_map(|e| NonlinearityModel::heaviside(e).unwrap()),
        ]
    }

    proptest! {
        #[test]
        fn oddness(m in any_model(), s in -100.0f64..100.0) {
            prop_assert_eq!(m.value(-s), -m.value(s));
            prop_assert_eq!(m.potential_value(-s), m.potential_value(s));
        }

        #[test]
        fn inverse_consistency(m in any_model(), frac in 0.0f64..1.0, scale in -12i32..5) {
            let e = frac * 10f64.powi(scale);
            prop_assume!(e < m.energy_ceiling(Sign::Plus));
            let u = m.invert_potential_plus(e).unwrap();
            prop_assert!((m.potential_value(u) - e).abs() <= NonlinearityModel::inversion_tolerance(e));
            let v = m.invert_potential_minus(e).unwrap();
            prop_assert_eq!(v, -u);
        }

        #[test]
        fn potential_monotone_on_each_side(m in any_model(), a in 0.0f64..50.0, d in 1e-3f64..5.0) {
            prop_assert!(m.potential_value(a + d) > m.potential_value(a));
            prop_assert!(m.potential_value(-(a + d)) > m.potential_value(-a));
        }
    }
}
