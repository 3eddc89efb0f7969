//! Bracketing root finders for monotone scalar functions.

use crate::math;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootSettings {
    /// Stop once `|g(x) - target| <= residual_tol`.
    pub residual_tol: f64,
    pub max_iter: u32,
}

impl Default for RootSettings {
    fn default() -> Self {
        RootSettings {
            residual_tol: 1e-10,
            max_iter: 200,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    /// `g(x) - target`
    pub residual: f64,
    pub iterations: u32,
}

/// Bisection for a strictly increasing `g` on `[lo, hi]` with
/// `g_lo < target < g_hi`. Every midpoint value must stay inside the current
/// bracket image, otherwise the monotonicity assumption is reported as
/// broken.
pub fn bisect_increasing<G>(
    mut g: G,
    target: f64,
    mut lo: f64,
    mut g_lo: f64,
    mut hi: f64,
    mut g_hi: f64,
    settings: &RootSettings,
) -> Result<Root>
where
    G: FnMut(f64) -> Result<f64>,
{
    if !(g_lo <= target && target <= g_hi) {
        return Err(Error::domain("target is not bracketed"));
    }
    let mut best = if target - g_lo < g_hi - target {
        (lo, g_lo - target)
    } else {
        (hi, g_hi - target)
    };
    for it in 0..settings.max_iter {
        if math::abs(best.1) <= settings.residual_tol {
            return Ok(Root {
                x: best.0,
                residual: best.1,
                iterations: it,
            });
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let g_mid = g(mid)?;
        if !(g_lo <= g_mid && g_mid <= g_hi) {
            return Err(Error::numerical(
                "monotonicity violated during bisection",
                mid,
            ));
        }
        let r = g_mid - target;
        if math::abs(r) < math::abs(best.1) {
            best = (mid, r);
        }
        if r < 0.0 {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
            g_hi = g_mid;
        }
    }
    if math::abs(best.1) <= settings.residual_tol {
        return Ok(Root {
            x: best.0,
            residual: best.1,
            iterations: settings.max_iter,
        });
    }
    Err(Error::numerical(
        "bisection did not reach the residual tolerance",
        best.0,
    ))
}

/// Solves `phi(w) = target` for a strictly increasing `phi` with known
/// derivative `dphi > 0` on `[0, hi]`, using Newton steps safeguarded by the
/// bracket. Iterates until the bracket or the Newton step is at rounding
/// level, so the result is accurate in the relative sense even for tiny
/// targets.
pub fn newton_bracketed<P, D>(
    mut phi: P,
    mut dphi: D,
    target: f64,
    guess: f64,
    mut lo: f64,
    mut hi: f64,
    max_iter: u32,
) -> Result<f64>
where
    P: FnMut(f64) -> f64,
    D: FnMut(f64) -> f64,
{
    let mut w = if guess > lo && guess < hi {
        guess
    } else {
        0.5 * (lo + hi)
    };
    for _ in 0..max_iter {
        let r = phi(w) - target;
        if r == 0.0 {
            return Ok(w);
        }
        if r < 0.0 {
            lo = w;
        } else {
            hi = w;
        }
        let d = dphi(w);
        let mut next = w - r / d;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        let step = math::abs(next - w);
        w = next;
        if step <= 4.0 * f64::EPSILON * math::abs(w) || hi - lo <= 4.0 * f64::EPSILON * hi {
            return Ok(w);
        }
    }
    Err(Error::numerical("safeguarded Newton did not converge", w))
}
