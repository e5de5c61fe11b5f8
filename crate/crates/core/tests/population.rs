use markedpop::moments::{expected_size, variance_size};
use markedpop::population::{simulate_forward, simulate_tilde};
use markedpop::replicas::{map_replicas, Execution};
use markedpop::stats::{mc_mean_ci, two_sample_ks_discrete};
use markedpop::{CModel, RngStream, SimConfig};
use proptest::prelude::*;

fn final_sizes(replicas: usize, f: impl Fn(u64) -> u64 + Sync + Send) -> Vec<f64> {
    map_replicas(replicas, Execution::Parallel, |r| f(r) as f64)
}

#[test]
fn tilde_mean_matches_expected_size() {
    let model = CModel::uniform(0.01).unwrap();
    let n = 10_000;
    let sizes = final_sizes(1000, |r| {
        simulate_tilde(&SimConfig::new(n, 11, r), &model).unwrap().final_size()
    });
    let ci = mc_mean_ci(&sizes).unwrap();
    let expected = expected_size(n, &model);
    assert!(ci.within(expected, 3.0), "{ci:?} vs {expected}");
}

#[test]
fn tilde_mean_at_hundred_within_variance_band() {
    let model = CModel::uniform(0.1).unwrap();
    let n = 100;
    let replicas = 10_000;
    let sizes = final_sizes(replicas, |r| {
        simulate_tilde(&SimConfig::new(n, 12, r), &model).unwrap().final_size()
    });
    let mean = mc_mean_ci(&sizes).unwrap().mean;
    let band = 3.0 * (variance_size(n, &model) / replicas as f64).sqrt();
    assert!((mean - expected_size(n, &model)).abs() <= band);
}

#[test]
fn forward_and_tilde_agree_in_distribution() {
    let model = CModel::uniform(0.1).unwrap();
    let forward: Vec<i64> = map_replicas(10_000, Execution::Parallel, |r| {
        simulate_forward(&SimConfig::new(50, 13, r), &model).unwrap().final_size() as i64
    });
    let tilde: Vec<i64> = map_replicas(10_000, Execution::Parallel, |r| {
        simulate_tilde(&SimConfig::new(50, 14, r), &model).unwrap().final_size() as i64
    });
    let ks = two_sample_ks_discrete(&forward, &tilde, 1000, &mut RngStream::new(15, 0)).unwrap();
    assert!(ks.p_value > 0.01, "{ks:?}");
}

#[test]
fn founders_add_their_survival() {
    let model = CModel::uniform(0.2).unwrap();
    let (n, m) = (30, 25);
    let sizes = final_sizes(10_000, |r| {
        let cfg = SimConfig::new(n, 16, r).with_initial_size(m);
        simulate_forward(&cfg, &model).unwrap().final_size()
    });
    let ci = mc_mean_ci(&sizes).unwrap();
    let expected = (m - 1) as f64 * model.survival_moment(n - 1) + expected_size(n, &model);
    assert!(ci.within(expected, 3.0), "{ci:?} vs {expected}");
}

#[test]
fn runs_are_reproducible() {
    let model = CModel::power_law(0.4).unwrap();
    let cfg = SimConfig::new(2_000, 17, 3).recording();
    assert_eq!(simulate_forward(&cfg, &model).unwrap(), simulate_forward(&cfg, &model).unwrap());
    assert_eq!(simulate_tilde(&cfg, &model).unwrap(), simulate_tilde(&cfg, &model).unwrap());
    let other = SimConfig::new(2_000, 17, 4);
    assert_ne!(
        simulate_forward(&cfg, &model).unwrap().sizes,
        simulate_forward(&other, &model).unwrap().sizes
    );
}

#[test]
fn alive_set_matches_size() {
    let model = CModel::uniform(0.3).unwrap();
    for r in 0..50 {
        let cfg = SimConfig::new(200, 18, r).recording();
        for traj in [simulate_forward(&cfg, &model).unwrap(), simulate_tilde(&cfg, &model).unwrap()] {
            assert_eq!(traj.alive_set().unwrap().len() as u64, traj.final_size());
        }
    }
}

fn any_model() -> impl Strategy<Value = CModel> {
    prop_oneof![
        (0.001f64..=1.0).prop_map(|a| CModel::uniform(a).unwrap()),
        (0.01f64..0.99).prop_map(|a| CModel::power_law(a).unwrap()),
        (0.001f64..=1.0).prop_map(|c| CModel::constant(c).unwrap()),
    ]
}

proptest! {
    #[test]
    fn tilde_sizes_never_decrease(model in any_model(), seed in any::<u64>(), n in 0u64..500) {
        let traj = simulate_tilde(&SimConfig::new(n, seed, 0), &model).unwrap();
        prop_assert_eq!(traj.sizes[0], 1);
        prop_assert!(traj.sizes.windows(2).all(|w| w[1] == w[0] || w[1] == w[0] + 1));
    }

    #[test]
    fn forward_gains_at_most_one(model in any_model(), seed in any::<u64>(), n in 1u64..500) {
        let traj = simulate_forward(&SimConfig::new(n, seed, 0), &model).unwrap();
        prop_assert_eq!(traj.sizes[1], 2);
        prop_assert!(traj.sizes.windows(2).all(|w| w[1] <= w[0] + 1 && w[1] >= 2));
    }
}
