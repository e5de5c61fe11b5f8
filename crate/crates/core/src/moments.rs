//! Exact expectations and variances of the population size, the survival
//! dichotomy, and the expected number of high-c survivors.

use serde::Serialize;

use crate::distributions::CModel;
use crate::error::{invalid, Error, Result};
use crate::quadrature::{integrate, Tolerance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SurvivalClass {
    /// E(1/C) = ∞: the population size goes to infinity in probability.
    DivergesInProbability,
    /// E(1/C) < ∞: the population size has an a.s. finite limit in law.
    ConvergesInDistribution,
}

pub fn classify(model: &CModel) -> SurvivalClass {
    if model.mean_inverse().is_infinite() {
        SurvivalClass::DivergesInProbability
    } else {
        SurvivalClass::ConvergesInDistribution
    }
}

/// Alive-probabilities `p_k = E((1 - C)^(k - 1))` for k = 1..=n.
fn alive_probabilities(n: u64, model: &CModel) -> impl Iterator<Item = f64> + '_ {
    (1..=n).map(move |k| model.survival_moment(k - 1))
}

/// E|A_n| = 1 + Σ_{k=1..n} E((1 - C)^(k - 1)).
pub fn expected_size(n: u64, model: &CModel) -> f64 {
    1.0 + alive_probabilities(n, model).sum::<f64>()
}

/// Harmonic-sum form of E|A_n| for C uniform on (0, a):
/// `1 + (1/a) Σ 1/k - (1/a) Σ (1-a)^k / k`.
pub fn expected_size_uniform(n: u64, a: f64) -> Result<f64> {
    if n == 0 {
        return Err(invalid("n", "must be at least 1"));
    }
    if !(a > 0.0 && a <= 1.0) {
        return Err(invalid("a", format!("must lie in (0, 1], got {a}")));
    }
    let q = 1.0 - a;
    let mut harmonic = 0.0;
    let mut damped = 0.0;
    let mut qk = 1.0;
    for k in 1..=n {
        let kf = k as f64;
        qk *= q;
        harmonic += 1.0 / kf;
        damped += qk / kf;
    }
    Ok(1.0 + (harmonic - damped) / a)
}

/// Var|A_n| as a sum of independent Bernoulli variances.
pub fn variance_size(n: u64, model: &CModel) -> f64 {
    alive_probabilities(n, model).map(|p| p * (1.0 - p)).sum()
}

/// E|A_n| / ((1/a) ln n) for C uniform on (0, a).
pub fn growth_ratio(n: u64, a: f64) -> Result<f64> {
    if n < 2 {
        return Err(invalid("n", "must be at least 2"));
    }
    Ok(expected_size_uniform(n, a)? * a / (n as f64).ln())
}

/// ∫_b^1 f(x)/x dx: the expected number of indices i >= 1 with G_i >= i and
/// c_i > b. Never exceeds 1/b.
pub fn tail_count_bound(model: &CModel, b: f64) -> Result<f64> {
    if !(b > 0.0 && b < 1.0) {
        return Err(invalid("b", format!("must lie in (0, 1), got {b}")));
    }
    match *model {
        CModel::Uniform { a } => Ok(if b >= a { 0.0 } else { (a / b).ln() / a }),
        CModel::PowerLaw { alpha } => Ok((1.0 - alpha) / alpha * (b.powf(-alpha) - 1.0)),
        CModel::Constant { .. } => Err(Error::NoDensity),
    }
}

/// Same integral by quadrature; used for laws without a closed form.
pub fn tail_count_bound_quadrature(model: &CModel, b: f64) -> Result<f64> {
    if !(b > 0.0 && b < 1.0) {
        return Err(invalid("b", format!("must lie in (0, 1), got {b}")));
    }
    if !model.has_density() {
        return Err(Error::NoDensity);
    }
    integrate(
        |x| model.density(x).unwrap_or(0.0) / x,
        b,
        1.0,
        Tolerance::relative(1e-10),
    )
}

/// E(X_n) for the constant-c thinning chain with one arrival per step:
/// `E X_n = (1 - c) E X_{n-1} + 1`, `X_0 = 1`.
pub fn fms_expected_constant(c: f64, n: u64) -> f64 {
    (0..n).fold(1.0, |x, _| (1.0 - c) * x + 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform(a: f64) -> CModel {
        CModel::uniform(a).unwrap()
    }

    #[test]
    fn expected_size_examples() {
        for m in [uniform(0.4), CModel::constant(0.2).unwrap(), CModel::power_law(0.5).unwrap()] {
            assert_eq!(expected_size(0, &m), 1.0);
        }
        // 1 + (1 - 0.5^2)/0.5
        let c = CModel::constant(0.5).unwrap();
        assert!((expected_size(2, &c) - 2.5).abs() < 1e-15);
        // 1 + 1 + E(1 - C)
        assert!((expected_size(2, &uniform(0.5)) - 2.75).abs() < 1e-15);
    }

    #[test]
    fn harmonic_form_examples() {
        for a in [0.01, 0.3, 0.99] {
            assert!((expected_size_uniform(1, a).unwrap() - 2.0).abs() < 1e-12);
        }
        assert!((expected_size_uniform(2, 0.5).unwrap() - 2.75).abs() < 1e-15);
        let v = expected_size_uniform(10, 0.01).unwrap();
        // golden from the direct sum evaluated independently
        assert!((v - 10.778_948_000_517_062).abs() < 1e-9, "{v}");
        assert!(expected_size_uniform(0, 0.5).is_err());
        assert!(expected_size_uniform(5, 0.0).is_err());
    }

    #[test]
    fn harmonic_form_agrees_with_direct_sum() {
        for a in [0.01, 0.1, 0.5, 0.99] {
            for n in 1..=100 {
                let closed = expected_size_uniform(n, a).unwrap();
                let direct = expected_size(n, &uniform(a));
                assert!((closed - direct).abs() <= 1e-9 * direct, "n={n} a={a}");
            }
        }
    }

    #[test]
    fn constant_geometric_series() {
        for c in [0.05, 0.5, 1.0] {
            let m = CModel::constant(c).unwrap();
            for n in 0..60 {
                let exact = 1.0 + (1.0 - (1.0 - c).powi(n as i32)) / c;
                assert!((expected_size(n, &m) - exact).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn expected_size_non_decreasing() {
        for m in [uniform(0.1), CModel::power_law(0.7).unwrap(), CModel::constant(0.3).unwrap()] {
            let mut prev = 0.0;
            for n in 0..300 {
                let e = expected_size(n, &m);
                assert!(e >= prev);
                prev = e;
            }
        }
    }

    #[test]
    fn variance_examples() {
        for m in [uniform(0.2), CModel::constant(0.5).unwrap()] {
            assert_eq!(variance_size(1, &m), 0.0);
        }
        assert!((variance_size(2, &CModel::constant(0.5).unwrap()) - 0.25).abs() < 1e-15);
        let a: f64 = 0.1;
        let n = 10_000u64;
        let v = variance_size(n, &uniform(a));
        let scale = (n as f64).ln() / a;
        assert!(v > 0.5 * scale && v < 1.5 * scale, "{v}");
        // golden from an independent evaluation of Σ p_k (1 - p_k)
        assert!((v - 60.799_438_089_149_724).abs() < 1e-7, "{v}");
    }

    #[test]
    fn classification() {
        assert_eq!(classify(&uniform(0.5)), SurvivalClass::DivergesInProbability);
        assert_eq!(
            classify(&CModel::constant(0.5).unwrap()),
            SurvivalClass::ConvergesInDistribution
        );
        assert_eq!(
            classify(&CModel::power_law(0.5).unwrap()),
            SurvivalClass::DivergesInProbability
        );
    }

    #[test]
    fn growth_ratio_behaviour() {
        let ns = [100u64, 1_000, 10_000, 100_000, 1_000_000];
        let ratios: Vec<f64> = ns.iter().map(|&n| growth_ratio(n, 0.1).unwrap()).collect();
        assert!(ratios.windows(2).all(|w| w[1] > w[0]), "{ratios:?}");
        assert!(ratios[4] > 0.8 && ratios[4] < 1.0);
        assert!(growth_ratio(1, 0.1).is_err());
        // second sum vanishes as a → 1
        assert!((expected_size_uniform(2, 1.0).unwrap() - 2.5).abs() < 1e-15);
        assert!((expected_size_uniform(2, 1.0 - 1e-12).unwrap() - 2.5).abs() < 1e-9);
    }

    #[test]
    fn tail_bound_examples() {
        let v = tail_count_bound(&uniform(1.0), 0.1).unwrap();
        assert!((v - 10f64.ln()).abs() < 1e-14);
        assert!(tail_count_bound(&uniform(1.0), 1.0 - 1e-12).unwrap() < 1e-11);
        assert!(tail_count_bound(&CModel::constant(0.5).unwrap(), 0.1).is_err());
        assert!(tail_count_bound(&uniform(1.0), 0.0).is_err());
    }

    #[test]
    fn tail_bound_closed_form_matches_quadrature() {
        let models = [uniform(1.0), uniform(0.6), CModel::power_law(0.3).unwrap(), CModel::power_law(0.8).unwrap()];
        for m in models {
            for b in [0.01, 0.1, 0.5, 0.9] {
                let closed = tail_count_bound(&m, b).unwrap();
                let quad = tail_count_bound_quadrature(&m, b).unwrap();
                assert!((closed - quad).abs() <= 1e-9 * closed.max(1e-12), "{m:?} b={b}");
                assert!(closed <= 1.0 / b);
            }
        }
    }

    #[test]
    fn fms_recursion() {
        assert_eq!(fms_expected_constant(0.1, 0), 1.0);
        assert!((fms_expected_constant(0.1, 1) - 1.9).abs() < 1e-15);
        assert!((fms_expected_constant(0.005, 100_000) - 200.0).abs() < 1e-9);
        assert_eq!(fms_expected_constant(1.0, 10), 1.0);
    }
}
