//! Monte Carlo summaries and goodness-of-fit tests.
//!
//! - [`mc_mean_ci`]: mean, standard error, normal 95% interval.
//! - [`poisson_gof`]: binned chi-square test against Poisson(λ), plus the
//!   dispersion index (variance / mean).
//! - [`two_sample_ks_discrete`]: sup-distance between two empirical CDFs with
//!   a seeded permutation p-value, valid under heavy ties.

use std::io::Write;

use rand::seq::SliceRandom;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::rng::RngStream;

pub const MIN_EXPECTED_PER_BIN: f64 = 5.0;
pub const MIN_GOF_SAMPLES: usize = 100;
pub const MIN_PERMUTATIONS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanCI {
    pub mean: f64,
    pub stderr: f64,
    pub ci95: (f64, f64),
}

impl MeanCI {
    /// True if `value` lies within `k` standard errors of the mean.
    pub fn within(&self, value: f64, k: f64) -> bool {
        (self.mean - value).abs() <= k * self.stderr
    }
}

pub fn mean(samples: &[f64]) -> f64 {
    samples.iter().sum::<f64>() / samples.len() as f64
}

/// Unbiased sample variance.
pub fn sample_variance(samples: &[f64]) -> f64 {
    let m = mean(samples);
    samples.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (samples.len() as f64 - 1.0)
}

pub fn mc_mean_ci(samples: &[f64]) -> Result<MeanCI> {
    if samples.len() < 2 {
        return Err(Error::InsufficientSamples {
            needed: 2,
            got: samples.len(),
        });
    }
    let mean = mean(samples);
    let stderr = (sample_variance(samples) / samples.len() as f64).sqrt();
    Ok(MeanCI {
        mean,
        stderr,
        ci95: (mean - 1.96 * stderr, mean + 1.96 * stderr),
    })
}

pub fn counts_as_f64(counts: &[u64]) -> Vec<f64> {
    counts.iter().map(|&c| c as f64).collect()
}

/// Sample variance over sample mean; 0 for an all-zero sample.
pub fn dispersion_index(counts: &[u64]) -> f64 {
    let xs = counts_as_f64(counts);
    let m = mean(&xs);
    if m == 0.0 {
        return 0.0;
    }
    sample_variance(&xs) / m
}

/// Pearson correlation; `None` when either sample is constant.
pub fn correlation(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let (mx, my) = (mean(xs), mean(ys));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    (sxx > 0.0 && syy > 0.0).then(|| sxy / (sxx * syy).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GofReport {
    pub chi_square: f64,
    pub dof: u32,
    pub p_value: f64,
    pub dispersion_index: f64,
}

impl GofReport {
    pub const CSV_HEADER: &'static str = "chi_square,dof,p_value,dispersion";

    pub fn write_csv_row<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(
            out,
            "{},{},{},{}",
            self.chi_square, self.dof, self.p_value, self.dispersion_index
        )
    }
}

/// Chi-square test of `counts` against Poisson(λ).
///
/// Bins are built left to right, closing a bin once its expected count
/// reaches 5; the right tail `>= m + 1` is merged into the last bin when its
/// own expected count falls short. For small λ this gives `{0, ..., m, >= m+1}`.
pub fn poisson_gof(counts: &[u64], lambda: f64) -> Result<GofReport> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(invalid("lambda", format!("must be positive, got {lambda}")));
    }
    if counts.len() < MIN_GOF_SAMPLES {
        return Err(Error::InsufficientSamples {
            needed: MIN_GOF_SAMPLES,
            got: counts.len(),
        });
    }
    let n = counts.len() as f64;
    let max_seen = counts.iter().copied().max().unwrap_or(0);

    // (upper value of bin inclusive, expected count); last bin is open-ended
    let mut bins: Vec<(u64, f64)> = Vec::new();
    let mut pmf = (-lambda).exp();
    let mut cdf = 0.0;
    let mut acc = 0.0;
    let mut k = 0u64;
    loop {
        acc += n * pmf;
        cdf += pmf;
        let tail = n * (1.0 - cdf).max(0.0);
        if acc >= MIN_EXPECTED_PER_BIN {
            bins.push((k, acc));
            acc = 0.0;
            if tail < MIN_EXPECTED_PER_BIN {
                break;
            }
        } else if tail + acc < MIN_EXPECTED_PER_BIN {
            break;
        }
        k += 1;
        pmf *= lambda / k as f64;
        if k > max_seen.max(1) * 4 + 10_000 {
            break;
        }
    }
    if bins.len() < 2 {
        return Err(invalid(
            "counts",
            format!("too few samples for lambda = {lambda} to form two bins with expected count >= 5"),
        ));
    }
    // last bin absorbs everything to its right
    let covered: f64 = bins[..bins.len() - 1].iter().map(|b| b.1).sum();
    bins.last_mut().expect("at least two bins").1 = n - covered;

    let mut observed = vec![0u64; bins.len()];
    for &c in counts {
        let idx = bins.partition_point(|&(upper, _)| upper < c).min(bins.len() - 1);
        observed[idx] += 1;
    }
    let chi_square: f64 = observed
        .iter()
        .zip(&bins)
        .map(|(&o, &(_, e))| (o as f64 - e).powi(2) / e)
        .sum();
    let dof = (bins.len() - 1) as u32;
    Ok(GofReport {
        chi_square,
        dof,
        p_value: chi_square_sf(chi_square, dof as f64),
        dispersion_index: dispersion_index(counts),
    })
}

/// Lanczos approximation (g = 7, n = 9) of ln Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> f64 {
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        // reflection
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = COEF[0];
    let t = x + 7.5;
    for (i, &c) in COEF.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

/// Regularized upper incomplete gamma Q(s, x).
pub fn gamma_q(s: f64, x: f64) -> f64 {
    const EPS: f64 = 1e-15;
    const MAX_ITER: usize = 10_000;
    if x <= 0.0 {
        return 1.0;
    }
    let log_prefactor = s * x.ln() - x - ln_gamma(s);
    if x < s + 1.0 {
        // series for P(s, x)
        let mut term = 1.0 / s;
        let mut sum = term;
        let mut ap = s;
        for _ in 0..MAX_ITER {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if term.abs() < sum.abs() * EPS {
                break;
            }
        }
        (1.0 - sum * log_prefactor.exp()).clamp(0.0, 1.0)
    } else {
        // modified Lentz continued fraction for Q(s, x)
        let tiny = 1e-300;
        let mut b = x + 1.0 - s;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..MAX_ITER {
            let an = -(i as f64) * (i as f64 - s);
            b += 2.0;
            d = an * d + b;
            if d.abs() < tiny {
                d = tiny;
            }
            c = b + an / c;
            if c.abs() < tiny {
                c = tiny;
            }
            d = 1.0 / d;
            let delta = d * c;
            h *= delta;
            if (delta - 1.0).abs() < EPS {
                break;
            }
        }
        (log_prefactor.exp() * h).clamp(0.0, 1.0)
    }
}

/// Survival function of the chi-square distribution.
pub fn chi_square_sf(x: f64, dof: f64) -> f64 {
    gamma_q(0.5 * dof, 0.5 * x)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KsResult {
    pub distance: f64,
    pub p_value: f64,
}

/// Two-sample KS distance for integer data with a permutation p-value
/// `(1 + #{perm >= observed}) / (1 + permutations)`.
pub fn two_sample_ks_discrete(
    xs: &[i64],
    ys: &[i64],
    permutations: usize,
    rng: &mut RngStream,
) -> Result<KsResult> {
    if xs.is_empty() {
        return Err(Error::EmptyInput("xs"));
    }
    if ys.is_empty() {
        return Err(Error::EmptyInput("ys"));
    }
    if permutations < MIN_PERMUTATIONS {
        return Err(invalid(
            "permutations",
            format!("need at least {MIN_PERMUTATIONS}, got {permutations}"),
        ));
    }
    let mut support: Vec<i64> = xs.iter().chain(ys).copied().collect();
    support.sort_unstable();
    support.dedup();
    let rank = |v: i64| support.binary_search(&v).expect("value is in support");

    let mut pooled: Vec<usize> = xs.iter().chain(ys).map(|&v| rank(v)).collect();
    let mut total = vec![0usize; support.len()];
    for &r in &pooled {
        total[r] += 1;
    }
    let (nx, ny) = (xs.len(), ys.len());
    let mut first = vec![0usize; support.len()];

    let distance_of = |labels: &[usize], first: &mut [usize]| {
        first.iter_mut().for_each(|v| *v = 0);
        for &r in &labels[..nx] {
            first[r] += 1;
        }
        let (mut cx, mut cy, mut best) = (0usize, 0usize, 0.0f64);
        for (f, t) in first.iter().zip(&total) {
            cx += f;
            cy += t - f;
            best = best.max((cx as f64 / nx as f64 - cy as f64 / ny as f64).abs());
        }
        best
    };

    let observed = distance_of(&pooled, &mut first);
    let mut exceed = 0usize;
    for _ in 0..permutations {
        pooled.shuffle(rng);
        if distance_of(&pooled, &mut first) >= observed - 1e-12 {
            exceed += 1;
        }
    }
    Ok(KsResult {
        distance: observed,
        p_value: (1 + exceed) as f64 / (1 + permutations) as f64,
    })
}
