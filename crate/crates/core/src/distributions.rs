//! Laws for the per-individual death probability and geometric lifetimes.
//!
//! Every sampler is an inverse-CDF transform of a single uniform draw, so a
//! sample can be replayed from the draw alone (see [`CModel::inverse_cdf`] and
//! [`geometric_from_uniform`]).
//!
//! Lifetimes live on {1, 2, ...} with `P(G >= m) = (1 - c)^(m - 1)`; this is
//! the single lifetime convention used throughout the crate.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::quadrature::{integrate, Tolerance};
use crate::rng::RngStream;

/// Relative tolerance for moments computed by quadrature.
pub const MOMENT_REL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CModel {
    /// Uniform on (0, a).
    Uniform { a: f64 },
    /// Density (1 - alpha) x^(-alpha) on (0, 1).
    PowerLaw { alpha: f64 },
    /// Point mass at c.
    Constant { c: f64 },
}

impl CModel {
    pub fn uniform(a: f64) -> Result<Self> {
        Self::Uniform { a }.validated()
    }

    pub fn power_law(alpha: f64) -> Result<Self> {
        Self::PowerLaw { alpha }.validated()
    }

    pub fn constant(c: f64) -> Result<Self> {
        Self::Constant { c }.validated()
    }

    pub fn validated(self) -> Result<Self> {
        match self {
            Self::Uniform { a } if !(a > 0.0 && a <= 1.0) => {
                Err(invalid("a", format!("must lie in (0, 1], got {a}")))
            }
            Self::PowerLaw { alpha } if !(alpha > 0.0 && alpha < 1.0) => {
                Err(invalid("alpha", format!("must lie in (0, 1), got {alpha}")))
            }
            Self::Constant { c } if !(c > 0.0 && c <= 1.0) => {
                Err(invalid("c", format!("must lie in (0, 1], got {c}")))
            }
            m => Ok(m),
        }
    }

    /// Maps a uniform draw `u` in (0, 1) to a sample of C.
    pub fn inverse_cdf(&self, u: f64) -> f64 {
        match *self {
            Self::Uniform { a } => a * u,
            // CDF(x) = x^(1 - alpha)
            Self::PowerLaw { alpha } => u.powf(1.0 / (1.0 - alpha)).max(f64::MIN_POSITIVE),
            Self::Constant { c } => c,
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            Self::Uniform { a } => (x / a).clamp(0.0, 1.0),
            Self::PowerLaw { alpha } => {
                if x <= 0.0 {
                    0.0
                } else if x >= 1.0 {
                    1.0
                } else {
                    x.powf(1.0 - alpha)
                }
            }
            Self::Constant { c } => {
                if x >= c {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    pub fn density(&self, x: f64) -> Result<f64> {
        match *self {
            Self::Uniform { a } => Ok(if x > 0.0 && x < a { 1.0 / a } else { 0.0 }),
            Self::PowerLaw { alpha } => Ok(if x > 0.0 && x < 1.0 {
                (1.0 - alpha) * x.powf(-alpha)
            } else {
                0.0
            }),
            Self::Constant { .. } => Err(Error::NoDensity),
        }
    }

    /// Draws one death probability. The point mass consumes no randomness.
    #[inline]
    pub fn sample(&self, rng: &mut RngStream) -> f64 {
        match self {
            Self::Constant { c } => *c,
            _ => self.inverse_cdf(rng.uniform()),
        }
    }

    /// E(1/C); `f64::INFINITY` when the expectation diverges.
    pub fn mean_inverse(&self) -> f64 {
        match *self {
            // ∫ (1/a) x^{-1} dx and ∫ (1-α) x^{-α-1} dx both diverge at 0
            Self::Uniform { .. } | Self::PowerLaw { .. } => f64::INFINITY,
            Self::Constant { c } => 1.0 / c,
        }
    }

    /// E((1 - C)^m).
    pub fn survival_moment(&self, m: u64) -> f64 {
        if m == 0 {
            return 1.0;
        }
        match *self {
            Self::Uniform { a } => {
                let k = (m + 1) as f64;
                // 1 - (1-a)^(m+1), without cancellation for small a
                let complement = -(k * (-a).ln_1p()).exp_m1();
                complement / (a * k)
            }
            Self::Constant { c } => (1.0 - c).powf(m as f64),
            Self::PowerLaw { alpha } => power_law_survival_moment(alpha, m),
        }
    }

    pub fn has_density(&self) -> bool {
        !matches!(self, Self::Constant { .. })
    }
}

/// E((1 - C)^m) for the power law by quadrature.
///
/// With x = u^β, β = 1/(1 - α), the weight (1 - α) x^(-α) dx becomes du, so
/// the integrand (1 - u^β)^m is bounded and smooth on [0, 1].
fn power_law_survival_moment(alpha: f64, m: u64) -> f64 {
    let beta = 1.0 / (1.0 - alpha);
    let m = m as f64;
    let integrand = |u: f64| (m * (-u.powf(beta)).ln_1p()).exp();
    // Past the point where the integrand is below e^-750 it underflows to 0;
    // cut the domain there so the adaptive scheme does not chase zeros.
    let cutoff = (-(-750.0 / m).exp_m1()).powf(1.0 / beta).min(1.0);
    integrate(integrand, 0.0, cutoff, Tolerance::relative(MOMENT_REL_TOL))
        .expect("bounded monotone integrand converges")
}

/// `(1 - c)^exponent`, with `0^0 = 1`.
#[inline]
pub fn survival_power(c: f64, exponent: u64) -> f64 {
    if exponent == 0 {
        1.0
    } else {
        (exponent as f64 * (-c).ln_1p()).exp()
    }
}

/// Geometric lifetime on {1, 2, ...} from one uniform draw:
/// `G = ceil(ln u / ln(1 - c))`, and `G = 1` when `c = 1`.
pub fn geometric_from_uniform(c: f64, u: f64) -> Result<u64> {
    if !(c > 0.0 && c <= 1.0) {
        return Err(invalid("c", format!("must lie in (0, 1], got {c}")));
    }
    if c == 1.0 {
        return Ok(1);
    }
    let g = (u.ln() / (-c).ln_1p()).ceil();
    Ok(if g < 1.0 { 1 } else { g as u64 })
}

pub fn sample_geometric(c: f64, rng: &mut RngStream) -> Result<u64> {
    if !(c > 0.0 && c <= 1.0) {
        return Err(invalid("c", format!("must lie in (0, 1], got {c}")));
    }
    geometric_from_uniform(c, rng.uniform())
}
