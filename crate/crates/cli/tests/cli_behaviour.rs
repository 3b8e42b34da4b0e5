use std::path::PathBuf;
use std::process::Command;

use proptest::prelude::*;

use ehcr_cli::alpha_scan::{alpha_scan, Mode, ScanSettings};
use ehcr_cli::app::{AppError, EXIT_CONFIG, EXIT_NONCONVERGENCE, EXIT_OK, EXIT_VALIDATION};
use ehcr_cli::config::{parse_config, Engines, Metrics, RunConfig};
use ehcr_cli::csv::{format_number, parse_table, write_metadata, write_rows};
use ehcr_cli::figures::Overrides;
use ehcr_cli::run::{Row, NUMERIC_COLUMNS};
use ehcr_cli::validate::{check_grid, check_grid_with, regression_grid};

fn tmp(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name)
}

fn ehcr(args: &[&str]) -> (u8, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_ehcr"))
        .args(args)
        .output()
        .expect("binary starts");
    let code = out.status.code().expect("exited normally") as u8;
    (code, String::from_utf8_lossy(&out.stderr).into_owned())
}

fn write_config(name: &str, text: &str) -> String {
    let path = tmp(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn corrupted_harvest_gain_is_caught() {
    // Odds ratio α/(1-α) scaled by 1.5 scales ρ by 1.5.
    let corrupt = |p: ehcr_core::SystemParams| {
        let odds = 1.5 * p.alpha() / (1.0 - p.alpha());
        let q = p.with_alpha(odds / (1.0 + odds)).unwrap();
        assert!((q.rho() / p.rho() - 1.5).abs() < 1e-12);
        q
    };
    let rows = check_grid_with(&regression_grid(&Overrides::default()), corrupt).unwrap();
    let failures = rows.iter().filter(|r| !r.pass).count();
    assert!(failures >= 1, "no point noticed the corrupted gain");
}

#[test]
fn few_trials_still_validate() {
    let o = Overrides {
        trials: Some(1000),
        ..Overrides::default()
    };
    let rows = check_grid(&regression_grid(&o)).unwrap();
    for r in &rows {
        assert!(
            r.pass,
            "point {} ({}): {} vs {} tol {}",
            r.index, r.figure, r.exact, r.simulated, r.tolerance
        );
    }
}

fn arb_value() -> impl Strategy<Value = Option<f64>> {
    prop_oneof![
        1 => Just(None),
        6 => (-300i32..300, 1.0f64..10.0, any::<bool>())
            .prop_map(|(e, m, neg)| Some(if neg { -m } else { m } * 10f64.powi(e))),
        1 => Just(Some(0.0)),
    ]
}

proptest! {
    #[test]
    fn csv_round_trips_at_twelve_digits(values in proptest::collection::vec(proptest::array::uniform9(arb_value()), 1..8)) {
        let rows: Vec<Row> = values
            .iter()
            .enumerate()
            .map(|(i, v)| Row {
                curve: format!("c{}", i % 3),
                value: i.to_string(),
                p_out_exact: v[0],
                p_out_asymptotic: v[1],
                p_out_mc: v[2],
                mc_std_error: v[3],
                tau_ds_exact: v[4],
                tau_dt_exact: v[5],
                tau_ds_mc: v[6],
                tau_dt_mc: v[7],
                truncation_upper: v[8],
                errors: Vec::new(),
            })
            .collect();
        let mut buf = Vec::new();
        write_metadata(&mut buf, "t", &[]).unwrap();
        write_rows(&mut buf, "alpha", &rows).unwrap();
        let table = parse_table(std::str::from_utf8(&buf).unwrap());
        prop_assert_eq!(table.rows.len(), rows.len());
        for (i, r) in rows.iter().enumerate() {
            for (name, want) in NUMERIC_COLUMNS.iter().zip(r.numeric_fields()) {
                let got = table.number(i, name);
                prop_assert_eq!(got.map(format_number), want.map(format_number), "{}", name);
                if let (Some(g), Some(w)) = (got, want) {
                    prop_assert!((g - w).abs() <= 5e-12 * w.abs(), "{} vs {}", g, w);
                }
            }
        }
    }
}

#[test]
fn sweep_header_reproduces_the_run() {
    let cfg = write_config(
        "rerun.cfg",
        "path_loss_exponent = 2.7\n\
         alpha = 0.4\n\
         pu_tx = -1,0.5\n\
         engines = exact,asymptotic,montecarlo\n\
         metrics = outage,throughput\n\
         gamma_th_db = 0\n\
         trials = 4000\n\
         seed = 99\n\
         sweep_variable = p_interference_dbw\n\
         sweep_start = -5\n\
         sweep_stop = 15\n\
         sweep_steps = 3\n",
    );
    let first = tmp("rerun_first.csv");
    let second = tmp("rerun_second.csv");
    let (code, err) = ehcr(&[
        "sweep",
        "--config",
        &cfg,
        "--output",
        first.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_OK, "{err}");
    let (code, err) = ehcr(&[
        "sweep",
        "--config",
        first.to_str().unwrap(),
        "--output",
        second.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_OK, "{err}");
    let (a, b) = (
        std::fs::read(&first).unwrap(),
        std::fs::read(&second).unwrap(),
    );
    assert!(!a.is_empty());
    assert_eq!(String::from_utf8(a).unwrap(), String::from_utf8(b).unwrap());
}

#[test]
fn configuration_errors_exit_one() {
    let unknown = write_config("unknown_key.cfg", "path_loss_exponent = 3\nbogus = 1\n");
    let (code, err) = ehcr(&["eval", "--config", &unknown]);
    assert_eq!(code, EXIT_CONFIG);
    assert!(err.contains("line 2"), "{err}");

    let no_exponent = write_config("no_exponent.cfg", "alpha = 0.5\n");
    assert_eq!(ehcr(&["eval", "--config", &no_exponent]).0, EXIT_CONFIG);

    let alpha = write_config("bad_alpha.cfg", "path_loss_exponent = 3\nalpha = 1\n");
    assert_eq!(ehcr(&["eval", "--config", &alpha]).0, EXIT_CONFIG);

    let mc = write_config("mc.cfg", "path_loss_exponent = 3\nengines = montecarlo\n");
    assert_eq!(
        ehcr(&["eval", "--config", &mc, "--trials", "5"]).0,
        EXIT_CONFIG
    );

    assert_eq!(ehcr(&["eval"]).0, EXIT_CONFIG);
    assert_eq!(
        ehcr(&["eval", "--config", "/nonexistent/path.cfg"]).0,
        EXIT_CONFIG
    );
    assert_eq!(ehcr(&["figure", "fig42"]).0, EXIT_CONFIG);
    assert_eq!(ehcr(&["validate", "--trials", "5"]).0, EXIT_CONFIG);
    assert_eq!(ehcr(&["validate", "--workers", "0"]).0, EXIT_CONFIG);
    assert_eq!(ehcr(&["frobnicate"]).0, EXIT_CONFIG);
    assert_eq!(ehcr(&["--help"]).0, EXIT_OK);
}

#[test]
fn unreachable_tolerance_exits_two() {
    let cfg = write_config("tight.cfg", "path_loss_exponent = 3\nengines = exact\n");
    let (code, err) = ehcr(&["eval", "--config", &cfg, "--tol", "1e-300"]);
    assert_eq!(code, EXIT_NONCONVERGENCE, "{err}");
    assert!(err.contains("did not converge"), "{err}");
}

#[test]
fn exit_codes_by_error_kind() {
    assert_eq!(AppError::Validation(1).exit_code(), EXIT_VALIDATION);
    assert_eq!(
        AppError::Numerical("x".into()).exit_code(),
        EXIT_NONCONVERGENCE
    );
    assert_eq!(
        AppError::Config(ehcr_cli::config::ConfigError::new("x")).exit_code(),
        EXIT_CONFIG
    );
}

#[test]
fn config_text_round_trips() {
    let c = RunConfig {
        alpha: 0.35,
        gamma_th_db: 3.5,
        engines: Engines {
            exact: false,
            asymptotic: true,
            montecarlo: true,
        },
        metrics: Metrics::THROUGHPUT,
        ..RunConfig::default()
    };
    assert_eq!(parse_config(&c.to_config_text()).unwrap(), c);
}

#[test]
fn rate_adaptive_optimum_is_interior() {
    let cfg = RunConfig {
        gamma_th_db: 0.0,
        engines: Engines {
            exact: true,
            asymptotic: false,
            montecarlo: false,
        },
        ..RunConfig::default()
    };
    let s = ScanSettings {
        mode: Mode::DelayTolerant,
        ..ScanSettings::default()
    };
    let scan = alpha_scan(&cfg, &s).unwrap();
    let best = scan.best_alpha();
    assert!(best > s.min && best < s.max, "argmax at {best}");
}
