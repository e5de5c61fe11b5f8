//! The limiting point set `{(k, c_k) : G_k >= k}`, its rescaled box counts,
//! and the intensities those counts converge to.
//!
//! Two inclusion conventions coexist on purpose. [`sample_point_set`] keeps
//! index `k` when `G_k >= k`, i.e. with probability `(1 - c)^(k - 1)`. Box
//! counting keeps index `l` when `G_l > l`, i.e. with probability
//! `(1 - c)^l`, which is what the pre-limit box means below integrate. The
//! one-index shift disappears in the scaling limit.
//!
//! Box counts only visit indices inside the box's time window, so a count
//! costs `O(L (z - w))` regardless of how far out the window sits.

use std::io::Write;

use crate::distributions::{survival_power, CModel};
use crate::error::{invalid, Result};
use crate::quadrature::{integrate, Tolerance};
use crate::rng::RngStream;

pub const INTENSITY_REL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub index: u64,
    pub c: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    pub points: Vec<Point>,
    pub truncation: u64,
}

impl PointSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn count(&self, pred: impl Fn(&Point) -> bool) -> u64 {
        self.points.iter().filter(|p| pred(p)).count() as u64
    }

    /// Writes `k,c` rows.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "k,c")?;
        for p in &self.points {
            writeln!(out, "{},{}", p.index, p.c)?;
        }
        Ok(())
    }
}

/// Samples the points with index `k <= truncation`.
pub fn sample_point_set(model: &CModel, truncation: u64, rng: &mut RngStream) -> Result<PointSet> {
    let model = model.validated()?;
    let mut points = vec![Point {
        index: 0,
        c: model.sample(rng),
    }];
    for k in 1..=truncation {
        let c = model.sample(rng);
        if rng.bernoulli(survival_power(c, k - 1)) {
            points.push(Point { index: k, c });
        }
    }
    Ok(PointSet { points, truncation })
}

/// Upper bound on the expected number of points with index beyond the
/// truncation and `c > b`: `Σ_{i > K} (1 - b)^(i - 1) = (1 - b)^K / b`.
pub fn truncation_tail_bound(b: f64, truncation: u64) -> f64 {
    (truncation as f64 * (-b).ln_1p()).exp() / b
}

fn index_window(scale: u64, w: f64, z: f64) -> (u64, u64) {
    let l = scale as f64;
    let lo = (l * w).ceil().max(0.0) as u64;
    let hi = (l * z).floor().max(0.0) as u64;
    (lo, hi)
}

/// Box `L[w, z] × (lo/L, hi/L)` in (index, c)-space, uniform scaling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformBox {
    pub time: (f64, f64),
    pub c: (f64, f64),
    pub scale: u64,
}

impl UniformBox {
    pub fn new(time: (f64, f64), c: (f64, f64), scale: u64) -> Result<Self> {
        let (w, z) = time;
        let (lo, hi) = c;
        if !(w > 0.0 && z >= w && z.is_finite()) {
            return Err(invalid("time", format!("need 0 < w <= z, got [{w}, {z}]")));
        }
        if !(lo >= 0.0 && hi >= lo) {
            return Err(invalid("c", format!("need 0 <= lo <= hi, got ({lo}, {hi})")));
        }
        if scale == 0 {
            return Err(invalid("scale", "must be positive"));
        }
        if hi / scale as f64 > 1.0 {
            return Err(invalid(
                "c",
                format!("rescaled interval ({lo}/{scale}, {hi}/{scale}) leaves (0, 1)"),
            ));
        }
        Ok(Self { time, c, scale })
    }

    /// Integer indices `l` with `L w <= l <= L z` (inclusive; may be empty).
    pub fn index_window(&self) -> (u64, u64) {
        index_window(self.scale, self.time.0, self.time.1)
    }

    pub fn rescaled_c(&self) -> (f64, f64) {
        let l = self.scale as f64;
        (self.c.0 / l, self.c.1 / l)
    }
}

fn require_standard_uniform(model: &CModel) -> Result<()> {
    match model {
        CModel::Uniform { a } if *a == 1.0 => Ok(()),
        _ => Err(invalid("model", "box counts need C uniform on (0, 1)")),
    }
}

pub fn count_in_uniform_box(model: &CModel, bx: &UniformBox, rng: &mut RngStream) -> Result<u64> {
    Ok(count_in_uniform_boxes(model, std::slice::from_ref(bx), rng)?[0])
}

/// Counts for several boxes from one realization of the point set.
pub fn count_in_uniform_boxes(
    model: &CModel,
    boxes: &[UniformBox],
    rng: &mut RngStream,
) -> Result<Vec<u64>> {
    require_standard_uniform(model)?;
    let windows: Vec<_> = boxes.iter().map(UniformBox::index_window).collect();
    let intervals: Vec<_> = boxes.iter().map(UniformBox::rescaled_c).collect();
    Ok(count_shared(model, &windows, &intervals, rng))
}

/// Shared-realization counter. For every index in the union of windows one
/// c is drawn; the survival trial `G_l > l` is drawn only when the point
/// could land in some box.
fn count_shared(
    model: &CModel,
    windows: &[(u64, u64)],
    intervals: &[(f64, f64)],
    rng: &mut RngStream,
) -> Vec<u64> {
    let mut counts = vec![0u64; windows.len()];
    let Some(start) = windows.iter().filter(|(lo, hi)| lo <= hi).map(|w| w.0).min() else {
        return counts;
    };
    let end = windows.iter().map(|w| w.1).max().unwrap_or(0);
    let member = |l: u64, c: f64| {
        windows
            .iter()
            .zip(intervals)
            .map(move |(&(wlo, whi), &(clo, chi))| l >= wlo && l <= whi && c > clo && c < chi)
    };
    for l in start..=end {
        let c = model.sample(rng);
        if !member(l, c).any(|m| m) {
            continue;
        }
        if rng.bernoulli(survival_power(c, l)) {
            for (slot, hit) in counts.iter_mut().zip(member(l, c)) {
                *slot += hit as u64;
            }
        }
    }
    counts
}

/// Limit intensity `∫_lo^hi ∫_w^z e^{-sy} ds dy`, reduced to
/// `∫_lo^hi (e^{-yw} - e^{-yz}) / y dy`.
pub fn intensity_uniform_box(bx: &UniformBox) -> Result<f64> {
    let (w, z) = bx.time;
    let (lo, hi) = bx.c;
    if w == z || lo == hi {
        return Ok(0.0);
    }
    let span = z - w;
    integrate(
        |y| -(-y * w).exp() * (-y * span).exp_m1() / y,
        lo,
        hi,
        Tolerance::relative(INTENSITY_REL_TOL),
    )
}

/// Exact finite-L mean count `Σ_l ∫_{lo/L}^{hi/L} (1 - x)^l dx`.
pub fn prelimit_mean_uniform_box(bx: &UniformBox) -> f64 {
    let (l0, l1) = bx.index_window();
    let (x1, x2) = bx.rescaled_c();
    let (q1, q2) = ((-x1).ln_1p(), (-x2).ln_1p());
    (l0..=l1)
        .map(|l| {
            let k = (l + 1) as f64;
            ((k * q1).exp() - (k * q2).exp()) / k
        })
        .sum()
}

/// Box `L[w, z] × (a/L + b/L^β, a/L + d/L^β)` around location `a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawBox {
    pub location: f64,
    pub time: (f64, f64),
    pub offsets: (f64, f64),
    pub scale: u64,
    pub beta: f64,
}

/// The width exponent tied to the tail index: β = 1/(1 - α).
pub fn standard_beta(alpha: f64) -> f64 {
    1.0 / (1.0 - alpha)
}

/// The width exponent β = 1 + α, for which the finite-L mean count of a
/// box stays of order one as L grows (see `prelimit_mean_powerlaw_box`).
pub fn mean_preserving_beta(alpha: f64) -> f64 {
    1.0 + alpha
}

impl PowerLawBox {
    /// Box with the standard exponent β = 1/(1 - α).
    pub fn new(
        alpha: f64,
        location: f64,
        time: (f64, f64),
        offsets: (f64, f64),
        scale: u64,
    ) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(invalid("alpha", format!("must lie in (0, 1), got {alpha}")));
        }
        Self::with_beta(location, time, offsets, scale, standard_beta(alpha))
    }

    pub fn with_beta(
        location: f64,
        time: (f64, f64),
        offsets: (f64, f64),
        scale: u64,
        beta: f64,
    ) -> Result<Self> {
        let (w, z) = time;
        let (b, d) = offsets;
        if !(beta > 1.0 && beta.is_finite()) {
            return Err(invalid("beta", format!("must exceed 1, got {beta}")));
        }
        if !(location > 0.0 && location.is_finite()) {
            return Err(invalid("location", format!("must be positive, got {location}")));
        }
        if !(w > 0.0 && z >= w && z.is_finite()) {
            return Err(invalid("time", format!("need 0 < w <= z, got [{w}, {z}]")));
        }
        if !(d >= b && b.is_finite() && d.is_finite()) {
            return Err(invalid("offsets", format!("need b <= d, got ({b}, {d})")));
        }
        if scale == 0 {
            return Err(invalid("scale", "must be positive"));
        }
        let bx = Self {
            location,
            time,
            offsets,
            scale,
            beta,
        };
        let (lo, hi) = bx.rescaled_c();
        if !(lo > 0.0 && hi <= 1.0) {
            return Err(invalid(
                "offsets",
                format!("rescaled interval ({lo}, {hi}) leaves (0, 1)"),
            ));
        }
        Ok(bx)
    }

    pub fn index_window(&self) -> (u64, u64) {
        index_window(self.scale, self.time.0, self.time.1)
    }

    pub fn rescaled_c(&self) -> (f64, f64) {
        let l = self.scale as f64;
        let centre = self.location / l;
        let width = l.powf(self.beta);
        (centre + self.offsets.0 / width, centre + self.offsets.1 / width)
    }
}

pub fn count_in_powerlaw_box(alpha: f64, bx: &PowerLawBox, rng: &mut RngStream) -> Result<u64> {
    let model = CModel::power_law(alpha)?;
    let window = [bx.index_window()];
    let interval = [bx.rescaled_c()];
    Ok(count_shared(&model, &window, &interval, rng)[0])
}

/// Joint counts of boxes at distinct locations from one realization.
pub fn independence_counts(
    alpha: f64,
    boxes: &[PowerLawBox],
    rng: &mut RngStream,
) -> Result<Vec<u64>> {
    let model = CModel::power_law(alpha)?;
    validate_joint_boxes(boxes)?;
    let windows: Vec<_> = boxes.iter().map(PowerLawBox::index_window).collect();
    let intervals: Vec<_> = boxes.iter().map(PowerLawBox::rescaled_c).collect();
    Ok(count_shared(&model, &windows, &intervals, rng))
}

fn validate_joint_boxes(boxes: &[PowerLawBox]) -> Result<()> {
    let Some(first) = boxes.first() else {
        return Err(invalid("boxes", "need at least one box"));
    };
    for (i, a) in boxes.iter().enumerate() {
        if a.scale != first.scale || a.beta != first.beta {
            return Err(invalid("boxes", "all boxes must share L and β"));
        }
        for b in &boxes[i + 1..] {
            if a.location == b.location {
                return Err(invalid("boxes", format!("duplicate location {}", a.location)));
            }
            let (alo, ahi) = a.rescaled_c();
            let (blo, bhi) = b.rescaled_c();
            if alo < bhi && blo < ahi {
                return Err(invalid(
                    "boxes",
                    format!(
                        "rescaled c-intervals at locations {} and {} overlap",
                        a.location, b.location
                    ),
                ));
            }
        }
    }
    Ok(())
}

/// Smallest L that is guaranteed to keep the rescaled intervals of boxes at
/// distinct locations apart:
/// `ceil(((max|d| + max|b|) / min|a_i - a_j|)^(1/(β - 1)))`.
pub fn min_disjoint_scale(locations: &[f64], offsets: &[(f64, f64)], beta: f64) -> Result<u64> {
    if beta.is_nan() || beta <= 1.0 {
        return Err(invalid("beta", "must exceed 1"));
    }
    let mut gap = f64::INFINITY;
    for (i, a) in locations.iter().enumerate() {
        for b in &locations[i + 1..] {
            gap = gap.min((a - b).abs());
        }
    }
    if gap == 0.0 {
        return Err(invalid("locations", "must be distinct"));
    }
    if !gap.is_finite() {
        return Ok(1);
    }
    let max_d = offsets.iter().map(|o| o.1.abs()).fold(0.0, f64::max);
    let max_b = offsets.iter().map(|o| o.0.abs()).fold(0.0, f64::max);
    let l = ((max_d + max_b) / gap).powf(1.0 / (beta - 1.0)).ceil();
    Ok(l.max(1.0) as u64)
}

/// Limit intensity `(d - b) (1 - α) a^{-α} (e^{-aw} - e^{-az}) / a`.
pub fn intensity_powerlaw_box(alpha: f64, bx: &PowerLawBox) -> f64 {
    let a = bx.location;
    let (w, z) = bx.time;
    let (b, d) = bx.offsets;
    (d - b) * (1.0 - alpha) * a.powf(-alpha) * ((-a * w).exp() - (-a * z).exp()) / a
}

/// Exact finite-L mean count
/// `∫_J (1 - α) x^{-α} ((1 - x)^{l0} - (1 - x)^{l1 + 1}) / x dx`,
/// i.e. the geometric sum over the window done in closed form.
pub fn prelimit_mean_powerlaw_box(alpha: f64, bx: &PowerLawBox) -> Result<f64> {
    let (l0, l1) = bx.index_window();
    if l0 > l1 {
        return Ok(0.0);
    }
    let (lo, hi) = bx.rescaled_c();
    let (e0, e1) = (l0 as f64, (l1 + 1) as f64);
    integrate(
        |x| {
            let q = (-x).ln_1p();
            (1.0 - alpha) * x.powf(-alpha) * ((e0 * q).exp() - (e1 * q).exp()) / x
        },
        lo,
        hi,
        Tolerance::relative(INTENSITY_REL_TOL),
    )
}
