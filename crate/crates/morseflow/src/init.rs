//! Initial conditions for `simulate`.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use morseflow_core::grid::Grid;
use morseflow_core::pde::FieldState;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{CliError, Result};
use crate::formats::read_xy_csv;

pub const SEED_ENV: &str = "MORSEFLOW_SEED";

/// Number of sine modes in a random initial condition.
pub const RANDOM_MODES: usize = 16;

/// The seed from `MORSEFLOW_SEED`, or 0 when unset.
pub fn default_seed() -> Result<u64> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Input(format!("{SEED_ENV}=`{v}` is not an unsigned integer"))),
        Err(std::env::VarError::NotPresent) => Ok(0),
        Err(e) => Err(CliError::Input(format!("{SEED_ENV}: {e}"))),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitSpec {
    /// `amp * sin(k pi x)`.
    Sine { k: u32, amp: f64 },
    /// Sine series with `c_k` uniform on `[-amp, amp]` divided by `k`.
    Random { seed: Option<u64>, amp: f64 },
    /// Samples `(x, u)` read from a CSV file.
    File(PathBuf),
}

fn params(body: &str) -> Result<Vec<(&str, &str)>> {
    body.split(',')
        .filter(|p| !p.is_empty())
        .map(|p| {
            p.split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| CliError::Input(format!("init parameter `{p}` lacks `=`")))
        })
        .collect()
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| CliError::Input(format!("init parameter {key}=`{value}` is malformed")))
}

impl FromStr for InitSpec {
    type Err = CliError;

    /// `sin:k=1,amp=0.01`, `random:seed=7,amp=2`, or a CSV path.
    fn from_str(s: &str) -> Result<Self> {
        if let Some(body) = s.strip_prefix("sin:") {
            let (mut k, mut amp) = (None, None);
            for (key, v) in params(body)? {
                match key {
                    "k" => k = Some(parse::<u32>(key, v)?),
                    "amp" => amp = Some(parse::<f64>(key, v)?),
                    _ => return Err(CliError::Input(format!("unknown sin parameter `{key}`"))),
                }
            }
            let k = k.filter(|&k| k > 0).ok_or_else(|| CliError::Input("sin needs k >= 1".into()))?;
            let amp = amp.ok_or_else(|| CliError::Input("sin needs amp".into()))?;
            return Ok(InitSpec::Sine { k, amp });
        }
        if let Some(body) = s.strip_prefix("random:") {
            let (mut seed, mut amp) = (None, None);
            for (key, v) in params(body)? {
                match key {
                    "seed" => seed = Some(parse::<u64>(key, v)?),
                    "amp" => amp = Some(parse::<f64>(key, v)?),
                    _ => return Err(CliError::Input(format!("unknown random parameter `{key}`"))),
                }
            }
            let amp = amp.ok_or_else(|| CliError::Input("random needs amp".into()))?;
            return Ok(InitSpec::Random { seed, amp });
        }
        Ok(InitSpec::File(PathBuf::from(s.strip_prefix("file:").unwrap_or(s))))
    }
}

impl fmt::Display for InitSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitSpec::Sine { k, amp } => write!(f, "sin:k={k},amp={amp}"),
            InitSpec::Random { seed: Some(s), amp } => write!(f, "random:seed={s},amp={amp}"),
            InitSpec::Random { seed: None, amp } => write!(f, "random:amp={amp}"),
            InitSpec::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

impl InitSpec {
    /// The seed this spec uses, if it is random.
    pub fn seed(&self, default: u64) -> Option<u64> {
        match self {
            InitSpec::Random { seed, .. } => Some(seed.unwrap_or(default)),
            _ => None,
        }
    }

    pub fn build(&self, grid: Grid, default_seed: u64) -> Result<FieldState> {
        if let Some(amp) = match self {
            InitSpec::Sine { amp, .. } | InitSpec::Random { amp, .. } => Some(*amp),
            InitSpec::File(_) => None,
        } {
            if !amp.is_finite() {
                return Err(CliError::Input("amplitude must be finite".into()));
            }
        }
        let state = match self {
            InitSpec::Sine { k, amp } => FieldState::sine(grid, *k, *amp)?,
            InitSpec::Random { seed, amp } => {
                FieldState::sine_series(grid, &random_coefficients(seed.unwrap_or(default_seed), *amp))?
            }
            InitSpec::File(path) => from_samples(grid, path)?,
        };
        Ok(state)
    }
}

/// `c_k = U[-amp, amp] / k` for `k = 1..=16`, drawn from ChaCha8.
pub fn random_coefficients(seed: u64, amp: f64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (1..=RANDOM_MODES)
        .map(|k| {
            let c: f64 = if amp > 0.0 { rng.gen_range(-amp..=amp) } else { 0.0 };
            c / k as f64
        })
        .collect()
}

/// Linear interpolation of CSV samples covering `[0, 1]`; both boundary
/// values must vanish.
fn from_samples(grid: Grid, path: &Path) -> Result<FieldState> {
    let (xs, us) = read_xy_csv(path)?;
    let bad = |msg: &str| CliError::Input(format!("{}: {msg}", path.display()));
    if xs.len() < 2 {
        return Err(bad("needs at least two samples"));
    }
    if xs.windows(2).any(|w| !(w[1] > w[0])) || us.iter().any(|u| !u.is_finite()) {
        return Err(bad("x must increase strictly and u must be finite"));
    }
    if xs[0] > 1e-12 || xs[xs.len() - 1] < 1.0 - 1e-12 {
        return Err(bad("samples must cover [0, 1]"));
    }
    if us[0].abs() > 1e-9 || us[us.len() - 1].abs() > 1e-9 {
        return Err(bad("u must vanish at x = 0 and x = 1"));
    }
    let mut j = 0;
    let values = grid.sample(|x| {
        while j + 2 < xs.len() && xs[j + 1] < x {
            j += 1;
        }
        let t = ((x - xs[j]) / (xs[j + 1] - xs[j])).clamp(0.0, 1.0);
        us[j] + t * (us[j + 1] - us[j])
    });
    Ok(FieldState::new(grid, values)?)
}
