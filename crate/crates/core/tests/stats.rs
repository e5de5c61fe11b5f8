use markedpop::population::simulate_tilde;
use markedpop::replicas::{map_replicas, Execution};
use markedpop::stats::two_sample_ks_discrete;
use markedpop::{CModel, RngStream, SimConfig};

#[test]
fn ks_self_consistency_on_tilde_sizes() {
    let model = CModel::uniform(0.1).unwrap();
    let sample = |seed: u64| -> Vec<i64> {
        map_replicas(10_000, Execution::Parallel, |r| {
            simulate_tilde(&SimConfig::new(50, seed, r), &model).unwrap().final_size() as i64
        })
    };
    let accepted = (0..100u64)
        .filter(|&trial| {
            let xs = sample(2 * trial);
            let ys = sample(2 * trial + 1);
            let mut rng = RngStream::new(41, trial);
            two_sample_ks_discrete(&xs, &ys, 1000, &mut rng).unwrap().p_value > 0.01
        })
        .count();
    assert!(accepted >= 98, "accepted {accepted}/100");
}
