//! Exact-versus-simulated regression grid over the figure operating points.

use std::io::{self, Write};

use rayon::prelude::*;

use ehcr_core::analytic::outage_exact;
use ehcr_core::montecarlo::estimate_outage;
use ehcr_core::{Point, SystemParams};

use crate::config::{ConfigError, RunConfig};
use crate::csv::{format_number, write_metadata};
use crate::figures::{Overrides, FIG5_POSITIONS};

/// Absolute floor of the agreement tolerance.
pub const ABS_FLOOR: f64 = 0.005;

#[derive(Debug, Clone, PartialEq)]
pub struct GridPoint {
    pub figure: &'static str,
    pub config: RunConfig,
}

/// The 30 regression points: 9 from fig3, 6 fig4, 8 fig5, 6 fig6, 1 fig7.
///
/// Outage depends on the two powers only through `P_I / P_PUtx`, so the points
/// are spaced to give distinct ratios within each position and threshold.
pub fn regression_grid(overrides: &Overrides) -> Vec<GridPoint> {
    let base = RunConfig::default();
    let mut out = Vec::new();
    let mut push = |figure, mut c: RunConfig| {
        overrides.apply(&mut c);
        out.push(GridPoint { figure, config: c });
    };
    for g in [-10.0, 0.0, 10.0] {
        for pi in [-10.0, 10.0, 30.0] {
            push(
                "fig3",
                RunConfig {
                    gamma_th_db: g,
                    p_interference_dbw: pi,
                    ..base.clone()
                },
            );
        }
    }
    for (pu, pi) in [
        (-10.0, -6.0),
        (-10.0, 14.0),
        (0.0, -2.0),
        (0.0, 18.0),
        (10.0, 2.0),
        (10.0, 22.0),
    ] {
        push(
            "fig4",
            RunConfig {
                gamma_th_db: 0.0,
                p_putx_dbw: pu,
                p_interference_dbw: pi,
                ..base.clone()
            },
        );
    }
    for (x, y) in FIG5_POSITIONS {
        for pu in [-5.0, 15.0] {
            let mut c = RunConfig {
                p_putx_dbw: pu,
                ..base.clone()
            };
            c.layout.pu_tx_center = Point::new(x, y);
            push("fig5", c);
        }
    }
    for pi in [0.0, 10.0, 20.0] {
        for pu in [-7.5, 17.5] {
            push(
                "fig6",
                RunConfig {
                    p_interference_dbw: pi,
                    p_putx_dbw: pu,
                    ..base.clone()
                },
            );
        }
    }
    push(
        "fig7",
        RunConfig {
            gamma_th_db: 0.0,
            p_putx_dbw: 10.0,
            ..base.clone()
        },
    );
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckRow {
    pub index: usize,
    pub figure: &'static str,
    pub config: RunConfig,
    pub exact: f64,
    pub simulated: f64,
    pub std_error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Compares exact and simulated outage at every point; the simulator sees the
/// parameters after `perturb`, which is the identity outside mutation tests.
pub fn check_grid_with(
    grid: &[GridPoint],
    perturb: impl Fn(SystemParams) -> SystemParams + Sync,
) -> Result<Vec<CheckRow>, ValidateError> {
    for g in grid {
        g.config.resolve()?;
    }
    grid.par_iter()
        .enumerate()
        .map(|(index, g)| {
            let point = g.config.resolve()?;
            let c = &g.config;
            let exact = outage_exact(point.gamma_th, &point.params, &c.quadrature)?;
            let mc = estimate_outage(point.gamma_th, &perturb(point.params), c.trials, c.seed)?;
            let tolerance = ABS_FLOOR.max(3.0 * mc.std_error);
            Ok(CheckRow {
                index,
                figure: g.figure,
                config: c.clone(),
                exact,
                simulated: mc.mean,
                std_error: mc.std_error,
                tolerance,
                pass: (exact - mc.mean).abs() <= tolerance,
            })
        })
        .collect()
}

pub fn check_grid(grid: &[GridPoint]) -> Result<Vec<CheckRow>, ValidateError> {
    check_grid_with(grid, |p| p)
}

#[derive(Debug)]
pub enum ValidateError {
    Config(ConfigError),
    Numerical(ehcr_core::Error),
}

impl From<ConfigError> for ValidateError {
    fn from(e: ConfigError) -> Self {
        Self::Config(e)
    }
}

impl From<ehcr_core::Error> for ValidateError {
    fn from(e: ehcr_core::Error) -> Self {
        match e {
            ehcr_core::Error::InvalidParameter { .. } | ehcr_core::Error::LinkTooShort { .. } => {
                Self::Config(ConfigError::new(e.to_string()))
            }
            other => Self::Numerical(other),
        }
    }
}

/// Per-point table; depends only on the configuration, never on timing.
pub fn write_report<W: Write>(out: &mut W, rows: &[CheckRow]) -> io::Result<()> {
    let mut meta = Vec::new();
    if let Some(r) = rows.first() {
        let c = &r.config;
        meta.extend([
            ("trials".to_string(), c.trials.to_string()),
            ("seed".to_string(), c.seed.to_string()),
            ("rel_tol".to_string(), format!("{:e}", c.quadrature.rel_tol)),
            ("abs_tol".to_string(), format!("{:e}", c.quadrature.abs_tol)),
            (
                "path_loss_exponent".to_string(),
                c.path_loss_exponent.to_string(),
            ),
            ("abs_floor".to_string(), ABS_FLOOR.to_string()),
        ]);
    }
    write_metadata(out, "ehcr validate", &meta)?;
    writeln!(
        out,
        "point,figure,gamma_th_db,p_interference_dbw,p_putx_dbw,pu_tx,p_out_exact,p_out_mc,mc_std_error,tolerance,pass"
    )?;
    for r in rows {
        let c = &r.config;
        writeln!(
            out,
            "{},{},{},{},{},{};{},{},{},{},{},{}",
            r.index,
            r.figure,
            c.gamma_th_db,
            c.p_interference_dbw,
            c.p_putx_dbw,
            c.layout.pu_tx_center.x,
            c.layout.pu_tx_center.y,
            format_number(r.exact),
            format_number(r.simulated),
            format_number(r.std_error),
            format_number(r.tolerance),
            if r.pass { "PASS" } else { "FAIL" },
        )?;
    }
    Ok(())
}
