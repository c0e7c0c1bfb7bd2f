use unkloc::experiments::{replay, run, run_with, ExperimentConfig, FieldSource, Mode, RunOptions};
use unkloc::noise::NoiseSpec;
use unkloc::sampling::RenewalConfig;

fn small(mode: Mode) -> ExperimentConfig {
    let field = match mode {
        Mode::BandwidthCurve => FieldSource::BenchmarkSparse,
        _ => FieldSource::BenchmarkB3,
    };
    let grid = match mode {
        Mode::BandwidthCurve => vec![5_000, 20_000],
        _ => vec![100, 1_000, 10_000],
    };
    let mut cfg = ExperimentConfig::new(mode, field, grid);
    cfg.trials = Some(20);
    cfg.master_seed = 42;
    cfg
}

const MODES: [Mode; 5] = [
    Mode::DistortionSweep,
    Mode::BandwidthCurve,
    Mode::GridDeviation,
    Mode::EnergyMse,
    Mode::RiemannError,
];

#[test]
fn replay_reproduces_rows_bit_exactly() {
    for mode in MODES {
        let cfg = small(mode);
        let res = run(&cfg).unwrap();
        for &(n, trial) in &[(cfg.n_grid[0], 0), (*cfg.n_grid.last().unwrap(), 17)] {
            let again = replay(&cfg, n, trial).unwrap();
            let original: Vec<_> = res
                .rows
                .iter()
                .filter(|r| r.n == n && r.trial == trial)
                .cloned()
                .collect();
            assert_eq!(again.len(), mode.metrics().len());
            for (a, b) in again.iter().zip(&original) {
                assert_eq!(
                    a.value.to_bits(),
                    b.value.to_bits(),
                    "{mode:?} n={n} trial={trial}"
                );
                assert_eq!(a.seed, b.seed);
            }
        }
    }
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let cfg = small(Mode::DistortionSweep);
    let one = run_with(&cfg, RunOptions { threads: Some(1) }).unwrap();
    let four = run_with(&cfg, RunOptions { threads: Some(4) }).unwrap();
    assert_eq!(one.rows.len(), four.rows.len());
    for (a, b) in one.rows.iter().zip(&four.rows) {
        assert_eq!((a.n, a.trial, a.metric), (b.n, b.trial, b.metric));
        assert_eq!(a.value.to_bits(), b.value.to_bits());
    }
}

#[test]
fn rows_are_ordered_by_n_then_trial() {
    let res = run(&small(Mode::RiemannError)).unwrap();
    let keys: Vec<_> = res.rows.iter().map(|r| (r.n, r.trial)).collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
}

#[test]
fn summary_mean_matches_rows() {
    for mode in MODES {
        let res = run(&small(mode)).unwrap();
        for s in &res.summary {
            let vals: Vec<f64> = res
                .rows
                .iter()
                .filter(|r| r.n == s.n && r.metric == s.metric)
                .map(|r| r.value)
                .collect();
            let mean = vals.iter().sum::<f64>() / vals.len() as f64;
            assert!(
                (mean - s.mean).abs() <= 1e-12 * mean.abs().max(1.0),
                "{mode:?} {}",
                s.metric
            );
            assert_eq!(s.count as usize, vals.len());
        }
    }
}

#[test]
fn noiseless_degenerate_sweep_is_exact_and_has_no_slope() {
    let mut cfg = ExperimentConfig::new(
        Mode::DistortionSweep,
        FieldSource::BenchmarkB3,
        vec![7, 100, 1000],
    );
    cfg.trials = Some(2);
    cfg.noise = NoiseSpec::zero();
    cfg.renewal = RenewalConfig {
        family: "degenerate".into(),
        params: vec![],
        lambda: Some(1.0),
    };
    let res = run(&cfg).unwrap();
    assert!(res.rows.iter().all(|r| r.value < 1e-20));
    assert!(res.slope.is_none());
    assert!(res
        .slope_note
        .as_deref()
        .unwrap()
        .contains("slope undefined"));
    assert_eq!(res.slope_json()["slope"], serde_json::Value::Null);
}

#[test]
fn files_have_the_documented_layout() {
    let res = run(&small(Mode::GridDeviation)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    res.save(dir.path()).unwrap();

    let rows = std::fs::read_to_string(dir.path().join("rows.csv")).unwrap();
    let mut lines = rows.lines();
    assert_eq!(lines.next(), Some("mode,n,trial,seed,metric,value"));
    assert!(lines.next().unwrap().starts_with("grid_deviation,100,0,"));
    assert_eq!(rows.lines().count(), 1 + 3 * 20);

    let summary = std::fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    assert!(summary.starts_with("mode,n,mean,stderr,count"));
    assert_eq!(summary.lines().count(), 1 + 3);

    let slope: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("slope.json")).unwrap())
            .unwrap();
    for key in ["slope", "ci_low", "ci_high"] {
        assert!(slope[key].is_f64(), "{key}");
    }
}

#[test]
fn replay_rejects_cells_outside_the_sweep() {
    let cfg = small(Mode::GridDeviation);
    assert!(replay(&cfg, 123, 0).is_err());
    assert!(replay(&cfg, 100, 20).is_err());
}

#[test]
fn bandwidth_curve_metrics_are_consistent() {
    let res = run(&small(Mode::BandwidthCurve)).unwrap();
    let value = |n, t, m: &str| {
        res.rows
            .iter()
            .find(|r| r.n == n && r.trial == t && r.metric == m)
            .unwrap()
            .value
    };
    for n in [5_000, 20_000] {
        for t in 0..20 {
            let success = value(n, t, "success");
            let stop = value(n, t, "stopping_check");
            let thr = value(n, t, "threshold_check");
            assert_eq!(success, stop * thr);
            if stop == 1.0 {
                assert_eq!(value(n, t, "detected_b"), 12.0);
            }
        }
    }
}

#[test]
fn shipped_configs_are_valid() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            let cfg = ExperimentConfig::from_toml(&std::fs::read_to_string(&path).unwrap())
                .unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            cfg.validate().unwrap();
            cfg.field.load().unwrap();
            seen += 1;
        }
    }
    assert_eq!(seen, 5);
}
