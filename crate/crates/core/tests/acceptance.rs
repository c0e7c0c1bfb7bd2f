//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any fails.

use std::process::ExitCode;
use std::time::Instant;

use rayon::prelude::*;
use unkloc::estimator::{estimate_coefficient, riemann_coefficient};
use unkloc::experiments::{run, ExperimentConfig, ExperimentResult, FieldSource, Mode};
use unkloc::noise::NoiseSpec;
use unkloc::rng::{derive_seed, TrialStreams};
use unkloc::sampling::{acquire, generate_trace, RenewalConfig, RenewalSpec, SpacingFamily};
use unkloc::BandlimitedField;

const SLOPE_WINDOW: (f64, f64) = (-1.3, -0.7);
const DECADES: [u64; 3] = [1_000, 10_000, 100_000];

type Check = fn() -> Outcome;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn renewal(family: &str, params: Vec<f64>, lambda: Option<f64>) -> RenewalConfig {
    RenewalConfig {
        family: family.into(),
        params,
        lambda,
    }
}

fn decay_config(mode: Mode, trials: u64, seed: u64) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(mode, FieldSource::BenchmarkB3, DECADES.to_vec());
    cfg.trials = Some(trials);
    cfg.master_seed = seed;
    cfg.noise = NoiseSpec::uniform(1.0).unwrap();
    cfg
}

fn slope_in_window(res: &ExperimentResult, metric: &str) -> Outcome {
    let means: Vec<String> = res
        .summary_for(metric)
        .iter()
        .map(|s| format!("{:.3e}", s.mean))
        .collect();
    match &res.slope {
        Some(fit) => outcome(
            (SLOPE_WINDOW.0..=SLOPE_WINDOW.1).contains(&fit.slope) && res.faults() == 0,
            format!(
                "slope {:.4} (95% CI [{:.4}, {:.4}]), means [{}], faults {}",
                fit.slope,
                fit.ci_low,
                fit.ci_high,
                means.join(", "),
                res.faults()
            ),
        ),
        None => outcome(false, format!("no slope: {:?}", res.slope_note)),
    }
}

fn distortion_decay() -> Outcome {
    let res = run(&decay_config(Mode::DistortionSweep, 1000, 1)).unwrap();
    slope_in_window(&res, "distortion")
}

fn bandwidth_detection() -> Outcome {
    let grid = vec![5_000, 10_000, 20_000, 50_000];
    let mut cfg = ExperimentConfig::new(Mode::BandwidthCurve, FieldSource::BenchmarkSparse, grid);
    cfg.trials = Some(100);
    cfg.master_seed = 2;
    cfg.noise = NoiseSpec::uniform(1.0).unwrap();
    cfg.bandwidth.delta = 0.1;
    let res = run(&cfg).unwrap();
    let rates: Vec<f64> = res.summary_for("success").iter().map(|s| s.mean).collect();
    let monotone = rates.windows(2).all(|w| w[0] <= w[1]);
    let last = *rates.last().unwrap();
    outcome(
        last >= 0.9 && monotone,
        format!("success rates {rates:?} over n = 5e3, 1e4, 2e4, 5e4"),
    )
}

fn grid_closeness() -> Outcome {
    let res = run(&decay_config(Mode::GridDeviation, 1000, 3)).unwrap();
    let scaled: Vec<f64> = res
        .summary_for("grid_deviation")
        .iter()
        .map(|s| s.n as f64 * s.mean)
        .collect();
    let max = scaled.iter().cloned().fold(f64::MIN, f64::max);
    let min = scaled.iter().cloned().fold(f64::MAX, f64::min);
    outcome(
        max / min < 10.0 && min > 0.0,
        format!("n * mean deviation {scaled:.4?}, max/min {:.3}", max / min),
    )
}

fn riemann_bound() -> Outcome {
    let field = BandlimitedField::benchmark_b3();
    let mut worst_ratio = 0.0f64;
    let mut worst_exact = 0.0f64;
    for k in -3i64..=3 {
        let c2 = field.modulated_derivative_sup(k);
        for m in 10..=1000 {
            let err = (riemann_coefficient(&field, m, k).unwrap() - field.coeff(k)).norm();
            worst_ratio = worst_ratio.max(m as f64 * err / c2);
        }
        for m in 2 * field.b() + 1..=1000 {
            let err = (riemann_coefficient(&field, m, k).unwrap() - field.coeff(k)).norm();
            worst_exact = worst_exact.max(err);
        }
    }
    outcome(
        worst_ratio <= 1.05 && worst_exact <= 1e-10,
        format!("max M*err/C2 {worst_ratio:.3e}, max grid error for M >= 7 {worst_exact:.3e}"),
    )
}

fn energy_decay() -> Outcome {
    let res = run(&decay_config(Mode::EnergyMse, 1000, 5)).unwrap();
    slope_in_window(&res, "energy_sq_error")
}

fn exact_recovery() -> Outcome {
    let fields = [
        FieldSource::BenchmarkB3,
        FieldSource::BenchmarkSparse,
        FieldSource::Random { b: 0, seed: 7 },
        FieldSource::Random { b: 1, seed: 8 },
        FieldSource::Random { b: 5, seed: 9 },
        FieldSource::Random { b: 16, seed: 10 },
    ];
    let mut worst = 0.0f64;
    let mut faults = 0;
    for source in fields {
        let b = source.load().unwrap().b() as u64;
        let mut grid = vec![2 * b + 1, 100, 1000];
        grid.sort_unstable();
        grid.dedup();
        let mut cfg = ExperimentConfig::new(Mode::DistortionSweep, source, grid);
        cfg.trials = Some(3);
        cfg.noise = NoiseSpec::zero();
        cfg.renewal = renewal("degenerate", vec![], Some(1.0));
        let res = run(&cfg).unwrap();
        faults += res.faults();
        worst = res.rows.iter().map(|r| r.value).fold(worst, f64::max);
    }
    outcome(
        worst < 1e-20 && faults == 0,
        format!("max distortion {worst:.3e} over 6 fields"),
    )
}

fn noise_floor() -> Outcome {
    let n = 10_000;
    let trials = 10_000u64;
    let ks = [0i64, 1, 3];
    let zero = BandlimitedField::zero(3);
    let noise = NoiseSpec::uniform(1.0).unwrap();
    let spec = RenewalSpec::new(n, SpacingFamily::Uniform).unwrap();
    let per_trial: Vec<([f64; 3], f64)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut streams = TrialStreams::new(derive_seed(7, n, t));
            let trace = generate_trace(&spec, &mut streams.spacing).unwrap();
            let trace = acquire(trace, &zero, &noise, &mut streams.noise).unwrap();
            let mut power = [0.0; 3];
            for (p, &k) in power.iter_mut().zip(&ks) {
                *p = estimate_coefficient(trace.readings(), k)
                    .unwrap()
                    .norm_sqr();
            }
            (power, 1.0 / trace.m() as f64)
        })
        .collect();
    let inv_m = per_trial.iter().map(|(_, r)| r).sum::<f64>() / trials as f64;
    let predicted = noise.variance() * inv_m;
    let mut ratios = [0.0; 3];
    for (i, r) in ratios.iter_mut().enumerate() {
        let mean = per_trial.iter().map(|(p, _)| p[i]).sum::<f64>() / trials as f64;
        *r = mean / predicted;
    }
    outcome(
        ratios.iter().all(|r| (r - 1.0).abs() <= 0.1),
        format!("mean |A|^2 / (sigma^2 E[1/M]) for k = 0, 1, 3: {ratios:.4?}"),
    )
}

fn distribution_free() -> Outcome {
    let mut details = Vec::new();
    let mut pass = true;
    for (name, cfg_renewal) in [
        ("triangular", renewal("triangular", vec![], None)),
        ("beta(2,3)", renewal("beta", vec![2.0, 3.0], Some(2.5))),
    ] {
        let mut cfg = decay_config(Mode::DistortionSweep, 300, 8);
        cfg.renewal = cfg_renewal;
        let res = run(&cfg).unwrap();
        let o = slope_in_window(&res, "distortion");
        pass &= o.pass;
        details.push(format!("{name}: {}", o.detail));
    }
    outcome(pass, details.join("; "))
}

fn main() -> ExitCode {
    let criteria: [(&str, Check); 8] = [
        ("1 distortion decays as 1/n", distortion_decay),
        ("2 bandwidth detection success", bandwidth_detection),
        ("3 sampling grid closeness", grid_closeness),
        ("4 Riemann sum error bound", riemann_bound),
        ("5 energy estimate MSE decay", energy_decay),
        ("6 exact recovery on the grid", exact_recovery),
        ("7 noise floor", noise_floor),
        ("8 spacing-law independence", distribution_free),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let o = check();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!(
            "{tag} criterion {name}: {} [{:.1}s]",
            o.detail,
            start.elapsed().as_secs_f64()
        );
        failed += usize::from(!o.pass);
    }
    if failed == 0 {
        println!("acceptance: all 8 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} of 8 criteria failed");
        ExitCode::FAILURE
    }
}
