//! The named experiments. Each one computes everything in memory and returns
//! the files to write plus the summary rows; nothing touches disk here.

use std::fmt::Write as _;

use super::config::{
    AccumulationPlan, BoxFamily, ComparePlan, DistEqPlan, FmsPlan, GrowthPlan, PoissonPlan,
};
use super::summary::SummaryRow;
use crate::baselines::{recurrence_stats, simulate_fms, DeathMode, FmsConfig};
use crate::distributions::CModel;
use crate::error::Result;
use crate::moments::{expected_size, fms_expected_constant, tail_count_bound};
use crate::point_process::{
    count_in_uniform_box, independence_counts, intensity_powerlaw_box, intensity_uniform_box,
    prelimit_mean_powerlaw_box, prelimit_mean_uniform_box, sample_point_set,
    truncation_tail_bound,
};
use crate::population::{simulate_forward, simulate_tilde, SimConfig, Trajectory};
use crate::replicas::{map_replicas, Execution};
use crate::rng::{derive_seed, RngStream};
use crate::stats::{
    correlation, counts_as_f64, mc_mean_ci, poisson_gof, two_sample_ks_discrete, GofReport,
};

#[derive(Debug, Default)]
pub struct Outputs {
    /// (file name, contents), written in this order.
    pub files: Vec<(String, String)>,
    pub summary: Vec<SummaryRow>,
}

impl Outputs {
    fn file(&mut self, name: impl Into<String>, contents: String) {
        self.files.push((name.into(), contents));
    }
}

fn trajectory_csv(traj: &Trajectory) -> String {
    let mut buf = Vec::new();
    traj.write_csv(&mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("csv is ascii")
}

fn collect<T: Send>(
    replicas: usize,
    exec: Execution,
    f: impl Fn(u64) -> Result<T> + Sync + Send,
) -> Result<Vec<T>> {
    map_replicas(replicas, exec, f).into_iter().collect()
}

/// Mean-size trajectories for each initial population size, with the exact
/// expectation alongside.
pub fn growth(plan: &GrowthPlan, seed: u64, replicas: usize, exec: Execution) -> Result<Outputs> {
    let mut out = Outputs::default();
    let model = plan.model;
    for &m in &plan.initial_sizes {
        let group_seed = derive_seed(seed, m);
        let runs = collect(replicas, exec, |i| {
            let cfg = SimConfig::new(plan.horizon, group_seed, i).with_initial_size(m);
            let traj = simulate_forward(&cfg, &model)?;
            let at: Vec<f64> = plan
                .checkpoints
                .iter()
                .map(|&t| traj.sizes[t as usize] as f64)
                .collect();
            Ok((at, (i == 0).then_some(traj)))
        })?;
        if let Some(first) = runs.first().and_then(|r| r.1.as_ref()) {
            out.file(format!("trajectory_m{m}.csv"), trajectory_csv(first));
        }
        let mut table = String::from("t,mean,stderr,expected\n");
        for (j, &t) in plan.checkpoints.iter().enumerate() {
            let samples: Vec<f64> = runs.iter().map(|r| r.0[j]).collect();
            let ci = mc_mean_ci(&samples)?;
            let expected = expected_with_founders(&model, t, m);
            let _ = writeln!(table, "{t},{},{},{expected}", ci.mean, ci.stderr);
            if t == plan.horizon {
                out.summary.push(SummaryRow::within(
                    format!("mean_size_m{m}_n{t}"),
                    ci.mean,
                    expected,
                    3.0 * ci.stderr,
                ));
            }
        }
        out.file(format!("growth_m{m}.csv"), table);
    }
    if let CModel::Uniform { a } = model {
        if plan.horizon >= 2 {
            let e = expected_size(plan.horizon, &model);
            out.summary.push(SummaryRow::info(
                "growth_ratio",
                e * a / (plan.horizon as f64).ln(),
            ));
        }
    }
    Ok(out)
}

/// E(size at t) with `m` founders: the `m - 1` extra founders each survive to
/// `t >= 1` with probability E((1 - C)^(t - 1)).
pub fn expected_with_founders(model: &CModel, t: u64, m: u64) -> f64 {
    if t == 0 {
        return m as f64;
    }
    (m - 1) as f64 * model.survival_moment(t - 1) + expected_size(t, model)
}

/// Heterogeneous population against the constant-c and random-environment
/// chains.
pub fn compare(plan: &ComparePlan, seed: u64, replicas: usize, exec: Execution) -> Result<Outputs> {
    let mut out = Outputs::default();
    let n = plan.horizon;
    let het_seed = derive_seed(seed, 1);
    let const_seed = derive_seed(seed, 2);
    let env_seed = derive_seed(seed, 3);

    let runs = collect(replicas, exec, |i| {
        let het = simulate_forward(&SimConfig::new(n, het_seed, i), &plan.model)?;
        let constant = simulate_fms(&FmsConfig {
            mode: DeathMode::Constant(plan.baseline_c),
            horizon: n,
            seed: const_seed,
            stream_id: i,
        })?;
        let env = simulate_fms(&FmsConfig {
            mode: DeathMode::RandomEnv(plan.model),
            horizon: n,
            seed: env_seed,
            stream_id: i,
        })?;
        let summary = (
            het.final_size() as f64,
            recurrence_stats(&constant, 1)?.time_avg,
            recurrence_stats(&env, 1)?.time_avg,
        );
        Ok((summary, (i == 0).then_some([het, constant, env])))
    })?;

    if let Some([het, constant, env]) = runs.first().and_then(|r| r.1.as_ref()) {
        out.file("trajectory_heterogeneous.csv", trajectory_csv(het));
        out.file("trajectory_constant.csv", trajectory_csv(constant));
        out.file("trajectory_random_env.csv", trajectory_csv(env));
    }
    let het = mc_mean_ci(&runs.iter().map(|r| r.0 .0).collect::<Vec<_>>())?;
    let cst = mc_mean_ci(&runs.iter().map(|r| r.0 .1).collect::<Vec<_>>())?;
    let env = mc_mean_ci(&runs.iter().map(|r| r.0 .2).collect::<Vec<_>>())?;

    out.summary.push(SummaryRow::within(
        "heterogeneous_final_mean",
        het.mean,
        expected_size(n, &plan.model),
        3.0 * het.stderr,
    ));
    if plan.baseline_c > 0.0 {
        let fixed_point = 1.0 / plan.baseline_c;
        out.summary.push(SummaryRow::in_range(
            "constant_time_avg",
            cst.mean,
            0.75 * fixed_point,
            1.25 * fixed_point,
        ));
    } else {
        out.summary.push(SummaryRow::info("constant_time_avg", cst.mean));
    }
    out.summary
        .push(SummaryRow::at_most("random_env_time_avg", env.mean, 10.0 * cst.mean));
    out.summary.push(SummaryRow::at_least(
        "heterogeneous_over_baselines",
        het.mean - cst.mean.max(env.mean),
        0.0,
    ));
    Ok(out)
}

/// Forward dynamics against the lifetime construction at one horizon.
pub fn dist_eq(plan: &DistEqPlan, seed: u64, replicas: usize, exec: Execution) -> Result<Outputs> {
    let mut out = Outputs::default();
    let fwd_seed = derive_seed(seed, 1);
    let tilde_seed = derive_seed(seed, 2);
    let sizes = collect(replicas, exec, |i| {
        let f = simulate_forward(&SimConfig::new(plan.horizon, fwd_seed, i), &plan.model)?;
        let t = simulate_tilde(&SimConfig::new(plan.horizon, tilde_seed, i), &plan.model)?;
        Ok((f.final_size() as i64, t.final_size() as i64))
    })?;
    let xs: Vec<i64> = sizes.iter().map(|s| s.0).collect();
    let ys: Vec<i64> = sizes.iter().map(|s| s.1).collect();
    let mut rng = RngStream::new(derive_seed(seed, 3), 0);
    let ks = two_sample_ks_discrete(&xs, &ys, plan.permutations, &mut rng)?;

    let max = xs.iter().chain(&ys).copied().max().unwrap_or(0);
    let mut hist = String::from("size,forward,tilde\n");
    for s in 0..=max {
        let fx = xs.iter().filter(|&&v| v == s).count();
        let fy = ys.iter().filter(|&&v| v == s).count();
        if fx + fy > 0 {
            let _ = writeln!(hist, "{s},{fx},{fy}");
        }
    }
    out.file("size_histogram.csv", hist);
    out.file(
        "ks_report.csv",
        format!("distance,p_value\n{},{}\n", ks.distance, ks.p_value),
    );

    let expected = expected_size(plan.horizon, &plan.model);
    let fx = mc_mean_ci(&counts_as_f64_i(&xs))?;
    let fy = mc_mean_ci(&counts_as_f64_i(&ys))?;
    out.summary.push(SummaryRow::info("ks_distance", ks.distance));
    out.summary.push(SummaryRow::at_least("ks_p_value", ks.p_value, 0.01));
    out.summary.push(SummaryRow::within("forward_mean", fx.mean, expected, 3.0 * fx.stderr));
    out.summary.push(SummaryRow::within("tilde_mean", fy.mean, expected, 3.0 * fy.stderr));
    Ok(out)
}

fn counts_as_f64_i(xs: &[i64]) -> Vec<f64> {
    xs.iter().map(|&x| x as f64).collect()
}

fn gof_csv(report: &GofReport) -> String {
    let mut buf = Vec::new();
    buf.extend_from_slice(GofReport::CSV_HEADER.as_bytes());
    buf.push(b'\n');
    report.write_csv_row(&mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("csv is ascii")
}

fn count_histogram(counts: &[u64]) -> String {
    let max = counts.iter().copied().max().unwrap_or(0);
    let mut freq = vec![0usize; max as usize + 1];
    for &c in counts {
        freq[c as usize] += 1;
    }
    let mut s = String::from("count,frequency\n");
    for (c, f) in freq.iter().enumerate() {
        let _ = writeln!(s, "{c},{f}");
    }
    s
}

/// Rescaled box counts at each scale: means against the exact finite-scale
/// mean and the limit intensity, dispersion, and a Poisson chi-square test
/// against the finite-scale mean.
pub fn poisson_gof_experiment(
    plan: &PoissonPlan,
    seed: u64,
    replicas: usize,
    exec: Execution,
) -> Result<Outputs> {
    let mut out = Outputs::default();
    let model = CModel::uniform(1.0)?;
    for (j, &scale) in plan.scales.iter().enumerate() {
        let scale_seed = derive_seed(seed, scale);
        // one count vector per location (a single one in the uniform case)
        let (counts, prelimit, limit): (Vec<Vec<u64>>, Vec<f64>, Vec<f64>) = match &plan.boxes {
            BoxFamily::Uniform(boxes) => {
                let bx = boxes[j];
                let c = collect(replicas, exec, |i| {
                    count_in_uniform_box(&model, &bx, &mut RngStream::new(scale_seed, i))
                })?;
                (vec![c], vec![prelimit_mean_uniform_box(&bx)], vec![intensity_uniform_box(&bx)?])
            }
            BoxFamily::PowerLaw { alpha, per_scale } => {
                let boxes = &per_scale[j];
                let joint = collect(replicas, exec, |i| {
                    independence_counts(*alpha, boxes, &mut RngStream::new(scale_seed, i))
                })?;
                let counts = (0..boxes.len())
                    .map(|b| joint.iter().map(|row| row[b]).collect())
                    .collect();
                let prelimit = boxes
                    .iter()
                    .map(|bx| prelimit_mean_powerlaw_box(*alpha, bx))
                    .collect::<Result<Vec<_>>>()?;
                let limit = boxes.iter().map(|bx| intensity_powerlaw_box(*alpha, bx)).collect();
                (counts, prelimit, limit)
            }
        };

        for (b, c) in counts.iter().enumerate() {
            let tag = if counts.len() > 1 {
                format!("L{scale}_loc{b}")
            } else {
                format!("L{scale}")
            };
            let ci = mc_mean_ci(&counts_as_f64(c))?;
            out.summary.push(SummaryRow::within(
                format!("mean_vs_prelimit_{tag}"),
                ci.mean,
                prelimit[b],
                3.0 * ci.stderr,
            ));
            out.summary.push(SummaryRow::within(
                format!("mean_vs_intensity_{tag}"),
                ci.mean,
                limit[b],
                0.05 * limit[b],
            ));
            out.file(format!("counts_{tag}.csv"), count_histogram(c));
            match poisson_gof(c, prelimit[b]) {
                Ok(report) => {
                    out.summary.push(SummaryRow::in_range(
                        format!("dispersion_{tag}"),
                        report.dispersion_index,
                        0.9,
                        1.1,
                    ));
                    out.summary.push(SummaryRow::at_least(
                        format!("gof_p_value_{tag}"),
                        report.p_value,
                        0.01,
                    ));
                    out.file(format!("gof_{tag}.csv"), gof_csv(&report));
                }
                Err(_) => {
                    // too few replicas for a binned test at this mean
                    out.summary.push(SummaryRow::info(
                        format!("dispersion_{tag}"),
                        crate::stats::dispersion_index(c),
                    ));
                }
            }
        }
        for a in 0..counts.len() {
            for b in a + 1..counts.len() {
                let r = correlation(&counts_as_f64(&counts[a]), &counts_as_f64(&counts[b]))
                    .unwrap_or(0.0);
                out.summary.push(SummaryRow::within(
                    format!("correlation_L{scale}_loc{a}_loc{b}"),
                    r,
                    0.0,
                    3.0 / (replicas as f64).sqrt(),
                ));
            }
        }
    }
    Ok(out)
}

/// High-c survivors stay finite while low-c survivors keep accumulating.
pub fn accumulation(
    plan: &AccumulationPlan,
    seed: u64,
    replicas: usize,
    exec: Execution,
) -> Result<Outputs> {
    let mut out = Outputs::default();
    let b = plan.threshold;
    let early = plan.early_truncation;
    let runs = collect(replicas, exec, |i| {
        let ps = sample_point_set(&plan.model, plan.truncation, &mut RngStream::new(seed, i))?;
        let high = ps.count(|p| p.index >= 1 && p.c > b);
        let low_early = ps.count(|p| p.index <= early && p.c <= b);
        let low = ps.count(|p| p.c <= b);
        Ok(((high, low_early, low), (i == 0).then_some(ps)))
    })?;
    if let Some(ps) = runs.first().and_then(|r| r.1.as_ref()) {
        let mut buf = Vec::new();
        ps.write_csv(&mut buf)?;
        out.file("points_replica0.csv", String::from_utf8(buf).expect("csv is ascii"));
    }
    let mut table = String::from("replica,high,low_early,low\n");
    for (i, r) in runs.iter().enumerate() {
        let (h, le, l) = r.0;
        let _ = writeln!(table, "{i},{h},{le},{l}");
    }
    out.file("accumulation.csv", table);

    let bound = tail_count_bound(&plan.model, b)?;
    let high = mc_mean_ci(&runs.iter().map(|r| r.0 .0 as f64).collect::<Vec<_>>())?;
    let low_early = mc_mean_ci(&runs.iter().map(|r| r.0 .1 as f64).collect::<Vec<_>>())?;
    let low = mc_mean_ci(&runs.iter().map(|r| r.0 .2 as f64).collect::<Vec<_>>())?;
    out.summary
        .push(SummaryRow::within("high_count_mean", high.mean, bound, 3.0 * high.stderr));
    out.summary.push(SummaryRow::at_most("tail_count_bound", bound, 1.0 / b));
    out.summary.push(SummaryRow::info(
        "truncation_tail_bound",
        truncation_tail_bound(b, plan.truncation),
    ));
    out.summary.push(SummaryRow::at_least(
        "low_count_growth",
        low.mean - low_early.mean,
        0.9 * (plan.truncation as f64 / early as f64).ln(),
    ));
    Ok(out)
}

/// Comparison chain statistics.
pub fn fms(plan: &FmsPlan, seed: u64, replicas: usize, exec: Execution) -> Result<Outputs> {
    let mut out = Outputs::default();
    let mode = match plan.model {
        CModel::Constant { c } => DeathMode::Constant(c),
        other => DeathMode::RandomEnv(other),
    };
    let runs = collect(replicas, exec, |i| {
        let traj = simulate_fms(&FmsConfig {
            mode,
            horizon: plan.horizon,
            seed,
            stream_id: i,
        })?;
        let stats = recurrence_stats(&traj, plan.level)?;
        Ok((stats, traj.final_size(), (i == 0).then_some(traj)))
    })?;
    if let Some(traj) = runs.first().and_then(|r| r.2.as_ref()) {
        out.file("trajectory_fms.csv", trajectory_csv(traj));
    }
    let mut table = String::from("replica,visits,max_size,time_avg\n");
    for (i, (s, _, _)) in runs.iter().enumerate() {
        let _ = writeln!(table, "{i},{},{},{}", s.visits, s.max_size, s.time_avg);
    }
    out.file("fms_stats.csv", table);

    let avg = mc_mean_ci(&runs.iter().map(|r| r.0.time_avg).collect::<Vec<_>>())?;
    let visits = mc_mean_ci(&runs.iter().map(|r| r.0.visits as f64).collect::<Vec<_>>())?;
    let fin = mc_mean_ci(&runs.iter().map(|r| r.1 as f64).collect::<Vec<_>>())?;
    out.summary.push(SummaryRow::info("time_avg_mean", avg.mean));
    out.summary.push(SummaryRow::info("visits_mean", visits.mean));
    if let DeathMode::Constant(c) = mode {
        out.summary.push(SummaryRow::within(
            "final_mean",
            fin.mean,
            fms_expected_constant(c, plan.horizon),
            3.0 * fin.stderr,
        ));
    } else {
        out.summary.push(SummaryRow::info("final_mean", fin.mean));
    }
    Ok(out)
}
