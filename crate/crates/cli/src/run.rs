//! Evaluation of configured points and sweeps.

use rayon::prelude::*;

use ehcr_core::asymptotic::outage_asymptotic;
use ehcr_core::montecarlo::{estimate_ergodic_capacity, estimate_outage};
use ehcr_core::throughput::{throughput_delay_sensitive, throughput_delay_tolerant, ExactOutage};

use crate::config::{ConfigError, RunConfig, SweepValue};

/// One output row. `None` marks an engine that was not requested or failed;
/// failures are listed in `errors`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Row {
    pub curve: String,
    pub value: String,
    pub p_out_exact: Option<f64>,
    pub p_out_asymptotic: Option<f64>,
    pub p_out_mc: Option<f64>,
    pub mc_std_error: Option<f64>,
    pub tau_ds_exact: Option<f64>,
    pub tau_dt_exact: Option<f64>,
    pub tau_ds_mc: Option<f64>,
    pub tau_dt_mc: Option<f64>,
    pub truncation_upper: Option<f64>,
    pub errors: Vec<String>,
}

impl Row {
    pub fn numeric_fields(&self) -> [Option<f64>; 9] {
        [
            self.p_out_exact,
            self.p_out_asymptotic,
            self.p_out_mc,
            self.mc_std_error,
            self.tau_ds_exact,
            self.tau_dt_exact,
            self.tau_ds_mc,
            self.tau_dt_mc,
            self.truncation_upper,
        ]
    }
}

pub const NUMERIC_COLUMNS: [&str; 9] = [
    "p_out_exact",
    "p_out_asymptotic",
    "p_out_mc",
    "mc_std_error",
    "tau_ds_exact",
    "tau_dt_exact",
    "tau_ds_mc",
    "tau_dt_mc",
    "truncation_upper",
];

fn record<T>(errors: &mut Vec<String>, field: &str, r: ehcr_core::Result<T>) -> Option<T> {
    match r {
        Ok(v) => Some(v),
        Err(e) => {
            errors.push(format!("{field}: {e}"));
            None
        }
    }
}

/// Evaluates every requested engine at one fully specified point.
///
/// Parameter errors abort with a [`ConfigError`]; numerical failures leave the
/// affected fields empty and are listed in the row.
pub fn run_point(config: &RunConfig) -> Result<Row, ConfigError> {
    let point = config.resolve()?;
    let (p, gamma) = (&point.params, point.gamma_th);
    let e = config.engines;
    let m = config.metrics;
    let q = config.quadrature;
    q.validate()?;
    let mut row = Row::default();
    let errors = &mut row.errors;

    if e.exact && m.outage {
        row.p_out_exact = record(
            errors,
            "p_out_exact",
            ehcr_core::analytic::outage_exact(gamma, p, &q),
        );
    }
    if e.asymptotic && m.outage {
        row.p_out_asymptotic = record(errors, "p_out_asymptotic", outage_asymptotic(gamma, p));
    }
    if e.montecarlo {
        if let Some(est) = record(
            errors,
            "p_out_mc",
            estimate_outage(gamma, p, config.trials, config.seed),
        ) {
            if m.outage {
                row.p_out_mc = Some(est.mean);
                row.mc_std_error = Some(est.std_error);
            }
            if m.throughput {
                let fixed = |_: f64| Ok(est.mean);
                row.tau_ds_mc = record(
                    errors,
                    "tau_ds_mc",
                    throughput_delay_sensitive(gamma, p, &fixed),
                )
                .map(|t| t.value);
                let share = (1.0 - p.alpha()) / 2.0;
                row.tau_dt_mc = record(
                    errors,
                    "tau_dt_mc",
                    estimate_ergodic_capacity(p, config.trials, config.seed),
                )
                .map(|c| share * c.mean);
            }
        }
    }
    if e.exact && m.throughput {
        let exact = ExactOutage {
            params: p,
            quadrature: q,
        };
        row.tau_ds_exact = record(
            errors,
            "tau_ds_exact",
            throughput_delay_sensitive(gamma, p, &exact),
        )
        .map(|t| t.value);
        if let Some(t) = record(
            errors,
            "tau_dt_exact",
            throughput_delay_tolerant(p, &exact, &q),
        ) {
            row.tau_dt_exact = Some(t.value);
            row.truncation_upper = t.truncation_upper;
        }
    }
    Ok(row)
}

/// A labelled point waiting to be evaluated.
#[derive(Debug, Clone)]
pub struct Job {
    pub curve: String,
    pub value: Option<SweepValue>,
    pub config: RunConfig,
}

/// Jobs for every point of `config`'s sweep, tagged with `curve`.
pub fn sweep_jobs(curve: &str, config: &RunConfig) -> Result<Vec<Job>, ConfigError> {
    Ok(config
        .points()?
        .into_iter()
        .map(|(value, config)| Job {
            curve: curve.to_string(),
            value,
            config,
        })
        .collect())
}

/// Evaluates jobs on the current rayon pool and returns rows in job order.
///
/// All points are resolved before any engine runs, so a bad value anywhere in
/// the sweep is reported without partial output.
pub fn run_jobs(jobs: &[Job]) -> Result<Vec<Row>, ConfigError> {
    for j in jobs {
        j.config.resolve()?;
        j.config.quadrature.validate()?;
    }
    jobs.par_iter()
        .map(|j| {
            let mut row = run_point(&j.config)?;
            row.curve = j.curve.clone();
            row.value = j.value.map(|v| v.to_string()).unwrap_or_default();
            Ok(row)
        })
        .collect()
}

pub fn run_sweep(config: &RunConfig) -> Result<Vec<Row>, ConfigError> {
    run_jobs(&sweep_jobs("", config)?)
}
