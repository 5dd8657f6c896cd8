use anytime::code::ToeplitzCode;
use anytime::control::{
    self, CodeSpec, Controller, FilterKind, Metric, NoiseModel, SimConfig,
};
use anytime::estimation::{steady_state_width, FeedbackMode, PlantModel, QuantizerConfig};

fn example_one(epsilon: f64, trials: usize) -> SimConfig {
    SimConfig {
        plant: PlantModel::new(vec![-2.0], 60.0, 2.0).unwrap(),
        code: CodeSpec { n: 15, k: 3, p: 0.5, seed: Some(21) },
        epsilon,
        quantizer: QuantizerConfig::new(3, 16.0).unwrap(),
        mode: FeedbackMode::NoFeedback,
        filter: FilterKind::Cuboid,
        horizon: 100,
        trials,
        controller: Controller::Deadbeat,
        noise: NoiseModel::Uniform,
        initial_radius: 1.0,
        seed: 3,
        sweep: None,
    }
}

fn example_two(bits: u32, filter: FilterKind) -> SimConfig {
    SimConfig {
        plant: PlantModel::new(vec![-2.0, -0.25, 0.5], 5.0, 5.0).unwrap(),
        code: CodeSpec { n: 15, k: bits as usize, p: 0.5, seed: None },
        epsilon: 0.3,
        quantizer: QuantizerConfig::new(bits, 1.0).unwrap(),
        mode: FeedbackMode::Feedback,
        filter,
        horizon: 100,
        trials: 20,
        controller: Controller::Deadbeat,
        noise: NoiseModel::TruncatedGaussian { sigma: 1.0, clip: 2.5 },
        initial_radius: 1.0,
        seed: 8,
        sweep: None,
    }
}

fn code_for(cfg: &SimConfig) -> ToeplitzCode {
    ToeplitzCode::sample(cfg.code_params(cfg.code_seed(0)).unwrap()).unwrap()
}

#[test]
fn noiseless_channel_stays_within_steady_state_bound() {
    let cfg = example_one(0.0, 50);
    let (summary, runs) = control::run_trials(&cfg, 0).unwrap();
    let ss = steady_state_width(&cfg.plant, 16.0, 2.0);
    let bound = control::noiseless_state_bound(&cfg.plant, &ss.widths);
    assert_eq!(summary.violations, 0);
    assert_eq!(summary.desync_rate, 0.0);
    for r in &runs {
        assert!(r.sup_abs() <= bound + 1e-9, "{} > {bound}", r.sup_abs());
    }
}

#[test]
fn closed_loop_is_far_below_open_loop_envelope() {
    let cfg = example_one(0.3, 100);
    let (_, runs) = control::run_trials(&cfg, 0).unwrap();
    let mut sups: Vec<f64> = runs.iter().map(|r| r.sup_abs()).collect();
    sups.sort_by(f64::total_cmp);
    let median = sups[sups.len() / 2];
    assert!(median.is_finite());
    // Open-loop noise alone reaches the order of 2^100 · 30.
    assert!(median < 1e3, "median {median}");
}

#[test]
fn lqr_cost_matches_csv_recomputation() {
    let cfg = example_two(3, FilterKind::Cuboid);
    let code = code_for(&cfg);
    let rec = control::run_closed_loop(&cfg, &code, 0).unwrap();
    let csv = rec.to_csv();
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let cols = |prefix: &str| -> Vec<usize> {
        header.iter().enumerate().filter(|(_, h)| h.starts_with(prefix)).map(|(i, _)| i).collect()
    };
    let (xs, us) = (cols("x_"), cols("u_"));
    assert_eq!((xs.len(), us.len()), (3, 3));
    let mut total = 0.0;
    let mut rows = 0;
    for line in lines {
        let f: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
        total += xs.iter().chain(&us).map(|&i| f[i] * f[i]).sum::<f64>();
        rows += 1;
    }
    assert_eq!(rows, cfg.horizon);
    let expect = total / (2.0 * rows as f64);
    let got = control::lqr_cost(&rec);
    assert!((got - expect).abs() <= 1e-9 * expect.max(1.0), "{got} vs {expect}");
}

#[test]
fn example_two_runs_for_every_rate_and_filter() {
    for filter in [FilterKind::Cuboid, FilterKind::Ellipsoid] {
        for bits in 2..=5 {
            let cfg = example_two(bits, filter);
            let (summary, _) = control::run_trials(&cfg, 0).unwrap();
            assert!(summary.lqr_cost.is_finite() && summary.lqr_cost > 0.0, "{filter:?} k = {bits}");
        }
    }
}

#[test]
fn trial_streams_do_not_depend_on_trial_count() {
    let mut cfg = example_one(0.3, 3);
    let (_, few) = control::run_trials(&cfg, 0).unwrap();
    cfg.trials = 6;
    let (_, more) = control::run_trials(&cfg, 0).unwrap();
    assert_eq!(&more[..3], &few[..]);
}

#[test]
fn sweep_ordering_and_single_code() {
    let cfg = example_one(0.3, 20);
    let one = control::run_code_sweep(&cfg, 1, Metric::MeanSupAbs).unwrap();
    assert_eq!(one.rows.len(), 1);
    assert_eq!(one.to_csv().lines().count(), 2);
    assert!(one.to_csv().starts_with("code_seed,metric\n"));
    let cdf = one.cdf();
    assert_eq!(cdf.len(), 1);
    assert_eq!(cdf[0].1, 1.0);
}

#[test]
fn fully_erased_channel_diverges() {
    let mut cfg = example_one(1.0, 1);
    cfg.horizon = 60;
    let rec = control::run_closed_loop(&cfg, &code_for(&cfg), 0).unwrap();
    assert!(rec.sup_abs() > 1e9);
}
