//! Built-in figure configurations.
//!
//! Axis ranges and legend sets are reconstructions: captions fix the operating
//! point of each figure but not its grid.

use std::fmt;
use std::str::FromStr;

use ehcr_core::Point;

use crate::config::{
    ConfigError, Engines, Metrics, RunConfig, SweepAxis, SweepValue, SweepVariable,
};
use crate::run::{sweep_jobs, Job};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FigureId {
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
    Fig8,
    Fig9,
}

impl FigureId {
    pub const ALL: [FigureId; 7] = [
        Self::Fig3,
        Self::Fig4,
        Self::Fig5,
        Self::Fig6,
        Self::Fig7,
        Self::Fig8,
        Self::Fig9,
    ];

    pub fn description(self) -> &'static str {
        match self {
            Self::Fig3 => "outage vs P_I, one curve per SIR threshold",
            Self::Fig4 => "throughputs vs P_I, one curve per PU transmit power",
            Self::Fig5 => "outage vs PU transmit power, one curve per PU_tx position",
            Self::Fig6 => "outage vs PU transmit power, one curve per P_I",
            Self::Fig7 => "throughputs vs PU transmit power, one curve per P_I",
            Self::Fig8 => "exact and large-system outage vs M = N, one curve per PU_tx position",
            Self::Fig9 => "throughputs vs alpha, one curve per M = N",
        }
    }
}

impl FromStr for FigureId {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        Self::ALL
            .into_iter()
            .find(|f| f.to_string() == s)
            .ok_or_else(|| {
                ConfigError::new(format!("unknown figure `{s}` (expected fig3 .. fig9)"))
            })
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = Self::ALL.iter().position(|x| x == self).unwrap() + 3;
        write!(f, "fig{n}")
    }
}

/// Settings a caller may impose on every curve of a preset.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Overrides {
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub rel_tol: Option<f64>,
    pub engines: Option<Engines>,
    pub path_loss_exponent: Option<f64>,
}

impl Overrides {
    pub fn apply(&self, c: &mut RunConfig) {
        if let Some(t) = self.trials {
            c.trials = t;
        }
        if let Some(s) = self.seed {
            c.seed = s;
        }
        if let Some(r) = self.rel_tol {
            c.quadrature.rel_tol = r;
            c.quadrature.abs_tol = r * 1e-3;
        }
        if let Some(e) = self.engines {
            c.engines = e;
        }
        if let Some(m) = self.path_loss_exponent {
            c.path_loss_exponent = m;
        }
    }
}

/// One curve of a figure.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub id: String,
    pub config: RunConfig,
}

pub struct Figure {
    pub id: FigureId,
    pub variable: SweepVariable,
    pub curves: Vec<Curve>,
}

impl Figure {
    pub fn jobs(&self) -> Result<Vec<Job>, ConfigError> {
        let mut out = Vec::new();
        for c in &self.curves {
            out.extend(sweep_jobs(&c.id, &c.config)?);
        }
        Ok(out)
    }
}

fn linear(variable: SweepVariable, start: f64, stop: f64, steps: usize) -> SweepAxis {
    SweepAxis::linear(variable, start, stop, steps).expect("preset grid")
}

fn position_label(p: Point) -> String {
    format!("pu_tx={};{}", p.x, p.y)
}

/// Transmit powers between -20 and 30 dBW in 2.5 dB steps.
fn pu_power_axis() -> SweepAxis {
    linear(SweepVariable::PPutxDbw, -20.0, 30.0, 21)
}

/// Interference limits between -10 and 30 dBW in 2 dB steps.
fn interference_axis() -> SweepAxis {
    linear(SweepVariable::PInterferenceDbw, -10.0, 30.0, 21)
}

pub const FIG5_POSITIONS: [(f64, f64); 4] = [(-1.0, 0.0), (0.0, 1.0), (1.0, 1.0), (2.0, -1.0)];
pub const FIG8_POSITIONS: [(f64, f64); 3] = [(-1.0, 0.0), (0.0, 1.0), (1.0, 1.0)];
pub const FIG9_COUNTS: [u32; 2] = [3, 15];

/// The preset's curves with `overrides` applied.
pub fn figure(id: FigureId, overrides: &Overrides) -> Figure {
    let base = RunConfig::default();
    let mut curves = Vec::new();
    let mut push = |label: String, mut c: RunConfig| {
        overrides.apply(&mut c);
        curves.push(Curve {
            id: label,
            config: c,
        });
    };
    let variable = match id {
        FigureId::Fig3 => {
            for g in [-10.0, 0.0, 10.0] {
                let c = RunConfig {
                    gamma_th_db: g,
                    sweep: Some(interference_axis()),
                    ..base.clone()
                };
                push(format!("gamma_th_db={g}"), c);
            }
            SweepVariable::PInterferenceDbw
        }
        FigureId::Fig4 => {
            for pu in [-10.0, 0.0, 10.0] {
                let c = RunConfig {
                    gamma_th_db: 0.0,
                    p_putx_dbw: pu,
                    metrics: Metrics::THROUGHPUT,
                    sweep: Some(interference_axis()),
                    ..base.clone()
                };
                push(format!("p_putx_dbw={pu}"), c);
            }
            SweepVariable::PInterferenceDbw
        }
        FigureId::Fig5 => {
            for (x, y) in FIG5_POSITIONS {
                let mut c = RunConfig {
                    sweep: Some(pu_power_axis()),
                    ..base.clone()
                };
                c.layout.pu_tx_center = Point::new(x, y);
                push(position_label(c.layout.pu_tx_center), c);
            }
            SweepVariable::PPutxDbw
        }
        FigureId::Fig6 => {
            for pi in [0.0, 10.0, 20.0] {
                let c = RunConfig {
                    p_interference_dbw: pi,
                    sweep: Some(pu_power_axis()),
                    ..base.clone()
                };
                push(format!("p_interference_dbw={pi}"), c);
            }
            SweepVariable::PPutxDbw
        }
        FigureId::Fig7 => {
            for pi in [0.0, 10.0, 20.0] {
                let c = RunConfig {
                    p_interference_dbw: pi,
                    gamma_th_db: 0.0,
                    metrics: Metrics::THROUGHPUT,
                    sweep: Some(pu_power_axis()),
                    ..base.clone()
                };
                push(format!("p_interference_dbw={pi}"), c);
            }
            SweepVariable::PPutxDbw
        }
        FigureId::Fig8 => {
            let counts = (1..=100)
                .map(|m| SweepValue::Scalar(f64::from(m)))
                .collect();
            let axis = SweepAxis::explicit(SweepVariable::MAndN, counts).expect("preset grid");
            for (x, y) in FIG8_POSITIONS {
                let mut c = RunConfig {
                    engines: Engines {
                        exact: true,
                        asymptotic: true,
                        montecarlo: false,
                    },
                    sweep: Some(axis.clone()),
                    ..base.clone()
                };
                c.layout.pu_tx_center = Point::new(x, y);
                push(position_label(c.layout.pu_tx_center), c);
            }
            SweepVariable::MAndN
        }
        FigureId::Fig9 => {
            let alphas = (1..=19)
                .map(|k| SweepValue::Scalar(f64::from(k) * 0.05))
                .collect();
            let axis = SweepAxis::explicit(SweepVariable::Alpha, alphas).expect("preset grid");
            for m in FIG9_COUNTS {
                let c = RunConfig {
                    gamma_th_db: 0.0,
                    m_receivers: m,
                    n_transmitters: m,
                    metrics: Metrics::THROUGHPUT,
                    sweep: Some(axis.clone()),
                    ..base.clone()
                };
                push(format!("m_and_n={m}"), c);
            }
            SweepVariable::Alpha
        }
    };
    Figure {
        id,
        variable,
        curves,
    }
}
