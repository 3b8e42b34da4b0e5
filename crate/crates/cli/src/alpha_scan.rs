//! Off-line search for the harvesting fraction that maximizes throughput.

use std::io::{self, Write};

use rayon::prelude::*;

use ehcr_core::montecarlo::estimate_ergodic_capacity;
use ehcr_core::throughput::{
    throughput_delay_sensitive, throughput_delay_tolerant, ExactOutage, MonteCarloOutage,
};

use crate::config::{ConfigError, RunConfig};
use crate::csv::{format_number, write_metadata};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    DelaySensitive,
    DelayTolerant,
}

impl std::str::FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "ds" | "delay-sensitive" => Ok(Self::DelaySensitive),
            "dt" | "delay-tolerant" => Ok(Self::DelayTolerant),
            other => Err(format!(
                "unknown throughput mode `{other}` (expected ds or dt)"
            )),
        }
    }
}

impl Mode {
    fn name(self) -> &'static str {
        match self {
            Self::DelaySensitive => "ds",
            Self::DelayTolerant => "dt",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanSettings {
    pub mode: Mode,
    pub min: f64,
    pub max: f64,
    pub steps: usize,
    /// Golden-section refinement around the grid maximum.
    pub refine: bool,
}

impl Default for ScanSettings {
    fn default() -> Self {
        Self {
            mode: Mode::DelayTolerant,
            min: 0.05,
            max: 0.95,
            steps: 19,
            refine: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlphaScan {
    pub alphas: Vec<f64>,
    pub values: Vec<f64>,
    pub best_index: usize,
    pub refined: Option<(f64, f64)>,
}

impl AlphaScan {
    pub fn best_alpha(&self) -> f64 {
        self.alphas[self.best_index]
    }
    pub fn best_value(&self) -> f64 {
        self.values[self.best_index]
    }
}

/// Index of the largest value; ties go to the earliest (smallest α) entry.
pub fn grid_argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] || values[best].is_nan() {
            best = i;
        }
    }
    best
}

/// Maximizer of a unimodal `f` on `[lo, hi]` to within `tol`.
pub fn golden_section_max<E>(
    mut f: impl FnMut(f64) -> Result<f64, E>,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
) -> Result<(f64, f64), E> {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - r * (hi - lo);
    let mut b = lo + r * (hi - lo);
    let (mut fa, mut fb) = (f(a)?, f(b)?);
    while hi - lo > tol {
        if fa >= fb {
            hi = b;
            (b, fb) = (a, fa);
            a = hi - r * (hi - lo);
            fa = f(a)?;
        } else {
            lo = a;
            (a, fa) = (b, fb);
            b = lo + r * (hi - lo);
            fb = f(b)?;
        }
    }
    Ok(if fa >= fb { (a, fa) } else { (b, fb) })
}

/// Throughput at one α: exact engine when enabled, simulation otherwise.
pub fn throughput_at(config: &RunConfig, alpha: f64, mode: Mode) -> Result<f64, ScanError> {
    let c = RunConfig {
        alpha,
        sweep: None,
        ..config.clone()
    };
    let pt = c.resolve()?;
    let p = &pt.params;
    let q = c.quadrature;
    let v = if c.engines.exact {
        let exact = ExactOutage {
            params: p,
            quadrature: q,
        };
        match mode {
            Mode::DelaySensitive => throughput_delay_sensitive(pt.gamma_th, p, &exact)?.value,
            Mode::DelayTolerant => throughput_delay_tolerant(p, &exact, &q)?.value,
        }
    } else {
        match mode {
            Mode::DelaySensitive => {
                let mc = MonteCarloOutage {
                    params: p,
                    trials: c.trials,
                    base_seed: c.seed,
                };
                throughput_delay_sensitive(pt.gamma_th, p, &mc)?.value
            }
            Mode::DelayTolerant => {
                (1.0 - alpha) / 2.0 * estimate_ergodic_capacity(p, c.trials, c.seed)?.mean
            }
        }
    };
    Ok(v)
}

pub fn alpha_scan(config: &RunConfig, s: &ScanSettings) -> Result<AlphaScan, ScanError> {
    scan_with(s, |a| throughput_at(config, a, s.mode))
}

/// Grid scan of any throughput curve, with optional refinement.
pub fn scan_with(
    s: &ScanSettings,
    eval: impl Fn(f64) -> Result<f64, ScanError> + Sync,
) -> Result<AlphaScan, ScanError> {
    if !(0.0 < s.min && s.min < s.max && s.max < 1.0) {
        return Err(ConfigError::new(format!(
            "alpha bounds must satisfy 0 < min < max < 1, got [{}, {}]",
            s.min, s.max
        ))
        .into());
    }
    if s.steps < 2 {
        return Err(ConfigError::new("alpha scan needs at least 2 steps").into());
    }
    let last = (s.steps - 1) as f64;
    let alphas: Vec<f64> = (0..s.steps)
        .map(|i| s.min + (s.max - s.min) * i as f64 / last)
        .collect();
    let values = alphas
        .par_iter()
        .map(|&a| eval(a))
        .collect::<Result<Vec<_>, _>>()?;
    let best_index = grid_argmax(&values);
    let refined = if s.refine {
        let lo = alphas[best_index.saturating_sub(1)];
        let hi = alphas[(best_index + 1).min(alphas.len() - 1)];
        let (a, v) = golden_section_max(&eval, lo, hi, 1e-4)?;
        // Keep the grid point if refinement found nothing better.
        Some(if v >= values[best_index] {
            (a, v)
        } else {
            (alphas[best_index], values[best_index])
        })
    } else {
        None
    };
    Ok(AlphaScan {
        alphas,
        values,
        best_index,
        refined,
    })
}

#[derive(Debug)]
pub enum ScanError {
    Config(ConfigError),
    Numerical(ehcr_core::Error),
}

impl From<ConfigError> for ScanError {
    fn from(e: ConfigError) -> Self {
        Self::Config(e)
    }
}

impl From<ehcr_core::Error> for ScanError {
    fn from(e: ehcr_core::Error) -> Self {
        match e {
            ehcr_core::Error::InvalidParameter { .. } | ehcr_core::Error::LinkTooShort { .. } => {
                Self::Config(ConfigError::new(e.to_string()))
            }
            other => Self::Numerical(other),
        }
    }
}

pub fn write_scan<W: Write>(
    out: &mut W,
    config: &RunConfig,
    s: &ScanSettings,
    scan: &AlphaScan,
) -> io::Result<()> {
    let mut meta = config.to_lines();
    meta.retain(|(k, _)| k != "alpha");
    meta.extend([
        ("mode".to_string(), s.mode.name().to_string()),
        ("best_alpha".to_string(), scan.best_alpha().to_string()),
        ("best_value".to_string(), format_number(scan.best_value())),
    ]);
    if let Some((a, v)) = scan.refined {
        meta.push(("refined_alpha".to_string(), a.to_string()));
        meta.push(("refined_value".to_string(), format_number(v)));
    }
    write_metadata(out, "ehcr alpha-scan", &meta)?;
    writeln!(out, "alpha,tau_{}", s.mode.name())?;
    for (a, v) in scan.alphas.iter().zip(&scan.values) {
        writeln!(out, "{a},{}", format_number(*v))?;
    }
    Ok(())
}
