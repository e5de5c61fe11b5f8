use markedpop::moments::tail_count_bound;
use markedpop::point_process::{
    count_in_powerlaw_box, count_in_uniform_box, count_in_uniform_boxes, independence_counts,
    intensity_powerlaw_box, mean_preserving_beta, prelimit_mean_powerlaw_box,
    prelimit_mean_uniform_box, sample_point_set, PowerLawBox, UniformBox,
};
use markedpop::replicas::{map_replicas, Execution};
use markedpop::stats::{correlation, counts_as_f64, dispersion_index, mc_mean_ci};
use markedpop::{CModel, RngStream};

const EXEC: Execution = Execution::Parallel;

fn unit() -> CModel {
    CModel::uniform(1.0).unwrap()
}

fn uncorrelated(pairs: &[Vec<u64>]) -> (f64, f64) {
    let xs: Vec<f64> = pairs.iter().map(|p| p[0] as f64).collect();
    let ys: Vec<f64> = pairs.iter().map(|p| p[1] as f64).collect();
    (correlation(&xs, &ys).unwrap_or(0.0), 3.0 / (xs.len() as f64).sqrt())
}

#[test]
fn uniform_box_mean_matches_prelimit_sum() {
    let bx = UniformBox::new((1.0, 2.0), (1.0, 2.0), 200).unwrap();
    let counts = map_replicas(10_000, EXEC, |r| {
        count_in_uniform_box(&unit(), &bx, &mut RngStream::new(21, r)).unwrap()
    });
    let ci = mc_mean_ci(&counts_as_f64(&counts)).unwrap();
    assert!(ci.within(prelimit_mean_uniform_box(&bx), 3.0), "{ci:?}");
}

#[test]
fn uniform_counts_are_poisson_dispersed() {
    let bx = UniformBox::new((1.0, 2.0), (1.0, 2.0), 800).unwrap();
    let counts = map_replicas(10_000, EXEC, |r| {
        count_in_uniform_box(&unit(), &bx, &mut RngStream::new(22, r)).unwrap()
    });
    let d = dispersion_index(&counts);
    assert!((0.9..=1.1).contains(&d), "dispersion {d}");
}

#[test]
fn disjoint_time_windows_are_uncorrelated() {
    let boxes = [
        UniformBox::new((1.0, 2.0), (0.0, 2.0), 200).unwrap(),
        UniformBox::new((3.0, 4.0), (0.0, 2.0), 200).unwrap(),
    ];
    let pairs = map_replicas(10_000, EXEC, |r| {
        count_in_uniform_boxes(&unit(), &boxes, &mut RngStream::new(23, r)).unwrap()
    });
    let (rho, band) = uncorrelated(&pairs);
    assert!(rho.abs() <= band, "correlation {rho}");
}

#[test]
fn powerlaw_locations_are_uncorrelated() {
    let alpha = 0.5;
    let boxes = [
        PowerLawBox::new(alpha, 1.0, (1.0, 2.0), (0.0, 1.0), 200).unwrap(),
        PowerLawBox::new(alpha, 2.0, (1.0, 2.0), (0.0, 1.0), 200).unwrap(),
    ];
    let pairs = map_replicas(10_000, EXEC, |r| {
        independence_counts(alpha, &boxes, &mut RngStream::new(24, r)).unwrap()
    });
    let (rho, band) = uncorrelated(&pairs);
    assert!(rho.abs() <= band, "correlation {rho}");
}

#[test]
fn powerlaw_box_mean_matches_prelimit_sum() {
    let alpha = 0.5;
    for beta in [2.0, mean_preserving_beta(alpha)] {
        let bx = PowerLawBox::with_beta(1.0, (1.0, 2.0), (0.0, 1.0), 200, beta).unwrap();
        let counts = map_replicas(10_000, EXEC, |r| {
            count_in_powerlaw_box(alpha, &bx, &mut RngStream::new(25, r)).unwrap()
        });
        let ci = mc_mean_ci(&counts_as_f64(&counts)).unwrap();
        let expected = prelimit_mean_powerlaw_box(alpha, &bx).unwrap();
        assert!(ci.within(expected, 3.0), "beta {beta}: {ci:?} vs {expected}");
    }
}

#[test]
fn mean_preserving_width_approaches_intensity() {
    let alpha = 0.5;
    let beta = mean_preserving_beta(alpha);
    let bx = PowerLawBox::with_beta(1.0, (1.0, 2.0), (0.0, 1.0), 800, beta).unwrap();
    let target = intensity_powerlaw_box(alpha, &bx);
    let counts = map_replicas(10_000, EXEC, |r| {
        count_in_powerlaw_box(alpha, &bx, &mut RngStream::new(26, r)).unwrap()
    });
    let ci = mc_mean_ci(&counts_as_f64(&counts)).unwrap();
    assert!((ci.mean - target).abs() < 0.05 * target + 3.0 * ci.stderr, "{ci:?} vs {target}");
    let d = dispersion_index(&counts);
    assert!((0.9..=1.1).contains(&d), "dispersion {d}");
}

#[test]
fn tail_points_stay_finite_while_small_c_accumulate() {
    let b = 0.1;
    let counts = |k: u64, salt: u64| {
        map_replicas(1000, EXEC, move |r| {
            let pts = sample_point_set(&unit(), k, &mut RngStream::new(27 ^ salt, r)).unwrap();
            (pts.count(|p| p.c > b) as f64, pts.count(|p| p.c <= b) as f64)
        })
    };
    let big = counts(100_000, 0);
    let small = counts(1_000, 1);
    let high: Vec<f64> = big.iter().map(|c| c.0).collect();
    let ci = mc_mean_ci(&high).unwrap();
    // the k = 0 point is always present and lands above b with probability 1 - b
    let expected = (1.0 - b) + tail_count_bound(&unit(), b).unwrap();
    assert!(ci.within(expected, 3.0), "{ci:?} vs {expected}");
    let low_big = mc_mean_ci(&big.iter().map(|c| c.1).collect::<Vec<_>>()).unwrap().mean;
    let low_small = mc_mean_ci(&small.iter().map(|c| c.1).collect::<Vec<_>>()).unwrap().mean;
    assert!(low_big - low_small >= 100f64.ln() * 0.9, "{low_small} -> {low_big}");
}
