//! Flat `key = value` run configuration.
//!
//! Values are kept in display units (dB, dBW, coordinates). [`RunConfig::resolve`]
//! is the only place they are converted to the linear quantities the engines use.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use ehcr_core::montecarlo::{DEFAULT_TRIALS, MIN_TRIALS};
use ehcr_core::{
    channel_params, db_to_linear, NodeLayout, Point, QuadratureSettings, SystemParams,
};

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl ConfigError {
    pub fn new(message: impl Into<String>) -> Self {
        Self {
            line: None,
            message: message.into(),
        }
    }

    fn at(line: usize, message: impl Into<String>) -> Self {
        Self {
            line: Some(line),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

impl From<ehcr_core::Error> for ConfigError {
    fn from(e: ehcr_core::Error) -> Self {
        Self::new(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Engines {
    pub exact: bool,
    pub asymptotic: bool,
    pub montecarlo: bool,
}

impl Engines {
    pub const EXACT_AND_MC: Self = Self {
        exact: true,
        asymptotic: false,
        montecarlo: true,
    };
}

impl FromStr for Engines {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let mut e = Self {
            exact: false,
            asymptotic: false,
            montecarlo: false,
        };
        for name in s.split(',').map(str::trim).filter(|n| !n.is_empty()) {
            match name {
                "exact" => e.exact = true,
                "asymptotic" => e.asymptotic = true,
                "montecarlo" => e.montecarlo = true,
                other => return Err(format!("unknown engine `{other}`")),
            }
        }
        if !(e.exact || e.asymptotic || e.montecarlo) {
            return Err("no engine selected".into());
        }
        Ok(e)
    }
}

impl fmt::Display for Engines {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = [
            (self.exact, "exact"),
            (self.asymptotic, "asymptotic"),
            (self.montecarlo, "montecarlo"),
        ]
        .into_iter()
        .filter_map(|(on, n)| on.then_some(n))
        .collect();
        f.write_str(&names.join(","))
    }
}

/// Which quantities a run produces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Metrics {
    pub outage: bool,
    pub throughput: bool,
}

impl Metrics {
    pub const OUTAGE: Self = Self {
        outage: true,
        throughput: false,
    };
    pub const THROUGHPUT: Self = Self {
        outage: false,
        throughput: true,
    };
}

impl FromStr for Metrics {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let mut m = Self {
            outage: false,
            throughput: false,
        };
        for name in s.split(',').map(str::trim).filter(|n| !n.is_empty()) {
            match name {
                "outage" => m.outage = true,
                "throughput" => m.throughput = true,
                other => return Err(format!("unknown metric `{other}`")),
            }
        }
        if !(m.outage || m.throughput) {
            return Err("no metric selected".into());
        }
        Ok(m)
    }
}

impl fmt::Display for Metrics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.outage, self.throughput) {
            (true, true) => f.write_str("outage,throughput"),
            (true, false) => f.write_str("outage"),
            _ => f.write_str("throughput"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepVariable {
    PInterferenceDbw,
    PPutxDbw,
    MAndN,
    Alpha,
    GammaThDb,
    PuTxPosition,
}

impl SweepVariable {
    pub fn name(self) -> &'static str {
        match self {
            Self::PInterferenceDbw => "p_interference_dbw",
            Self::PPutxDbw => "p_putx_dbw",
            Self::MAndN => "m_and_n",
            Self::Alpha => "alpha",
            Self::GammaThDb => "gamma_th_db",
            Self::PuTxPosition => "pu_tx_position",
        }
    }
}

impl FromStr for SweepVariable {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "p_interference_dbw" => Self::PInterferenceDbw,
            "p_putx_dbw" => Self::PPutxDbw,
            "m_and_n" => Self::MAndN,
            "alpha" => Self::Alpha,
            "gamma_th_db" => Self::GammaThDb,
            "pu_tx_position" => Self::PuTxPosition,
            other => return Err(format!("unknown sweep variable `{other}`")),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SweepValue {
    Scalar(f64),
    Position(Point),
}

impl fmt::Display for SweepValue {
    /// Shortest representation that parses back to the same value; positions
    /// use `;` so the value fits one CSV field.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Scalar(v) => write!(f, "{v}"),
            Self::Position(p) => write!(f, "{};{}", p.x, p.y),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepAxis {
    pub variable: SweepVariable,
    pub values: Vec<SweepValue>,
}

impl SweepAxis {
    /// `steps` evenly spaced values from `start` to `stop` inclusive.
    pub fn linear(
        variable: SweepVariable,
        start: f64,
        stop: f64,
        steps: usize,
    ) -> Result<Self, ConfigError> {
        if steps < 2 {
            return Err(ConfigError::new(format!(
                "sweep_steps must be at least 2, got {steps}"
            )));
        }
        if variable == SweepVariable::PuTxPosition {
            return Err(ConfigError::new(
                "position sweeps take an explicit sweep_values list",
            ));
        }
        let last = (steps - 1) as f64;
        let values = (0..steps)
            .map(|i| SweepValue::Scalar(start + (stop - start) * i as f64 / last))
            .collect();
        let axis = Self { variable, values };
        axis.check()?;
        Ok(axis)
    }

    pub fn explicit(variable: SweepVariable, values: Vec<SweepValue>) -> Result<Self, ConfigError> {
        let axis = Self { variable, values };
        axis.check()?;
        Ok(axis)
    }

    fn check(&self) -> Result<(), ConfigError> {
        if self.values.len() < 2 {
            return Err(ConfigError::new("a sweep needs at least 2 values"));
        }
        for v in &self.values {
            match (self.variable, v) {
                (SweepVariable::PuTxPosition, SweepValue::Position(_)) => {}
                (SweepVariable::PuTxPosition, _) => {
                    return Err(ConfigError::new("pu_tx_position values must be x,y pairs"))
                }
                (_, SweepValue::Position(_)) => {
                    return Err(ConfigError::new(format!(
                        "{} values must be numbers",
                        self.variable.name()
                    )))
                }
                (SweepVariable::MAndN, SweepValue::Scalar(x))
                    if !(x.fract() == 0.0 && *x >= 1.0) =>
                {
                    return Err(ConfigError::new(format!(
                        "m_and_n values must be positive integers, got {x}"
                    )))
                }
                _ => {}
            }
        }
        Ok(())
    }
}

/// A fully specified run in display units.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub alpha: f64,
    pub eta: f64,
    pub p_interference_dbw: f64,
    pub p_putx_dbw: f64,
    pub m_receivers: u32,
    pub n_transmitters: u32,
    pub gamma_th_db: f64,
    pub path_loss_exponent: f64,
    pub layout: NodeLayout,
    pub engines: Engines,
    pub metrics: Metrics,
    pub trials: u64,
    pub seed: u64,
    pub quadrature: QuadratureSettings,
    pub sweep: Option<SweepAxis>,
}

pub const DEFAULT_PATH_LOSS_EXPONENT: f64 = 3.0;
pub const DEFAULT_SEED: u64 = 20_160_301;

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            alpha: 0.5,
            eta: 0.8,
            p_interference_dbw: 10.0,
            p_putx_dbw: 0.0,
            m_receivers: 3,
            n_transmitters: 3,
            gamma_th_db: -10.0,
            path_loss_exponent: DEFAULT_PATH_LOSS_EXPONENT,
            layout: NodeLayout::default().with_pu_tx(Point::new(0.0, 1.0)),
            engines: Engines::EXACT_AND_MC,
            metrics: Metrics::OUTAGE,
            trials: DEFAULT_TRIALS,
            seed: DEFAULT_SEED,
            quadrature: QuadratureSettings::default(),
            sweep: None,
        }
    }
}

/// Engine inputs for one parameter point, in linear units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolvedPoint {
    pub params: SystemParams,
    pub gamma_th: f64,
}

impl RunConfig {
    /// This configuration with one sweep value substituted.
    pub fn at(&self, value: &SweepValue) -> Result<Self, ConfigError> {
        let mut c = self.clone();
        c.sweep = None;
        let variable = self
            .sweep
            .as_ref()
            .ok_or_else(|| ConfigError::new("no sweep configured"))?
            .variable;
        match (variable, *value) {
            (SweepVariable::PInterferenceDbw, SweepValue::Scalar(v)) => c.p_interference_dbw = v,
            (SweepVariable::PPutxDbw, SweepValue::Scalar(v)) => c.p_putx_dbw = v,
            (SweepVariable::MAndN, SweepValue::Scalar(v)) => {
                c.m_receivers = v as u32;
                c.n_transmitters = v as u32;
            }
            (SweepVariable::Alpha, SweepValue::Scalar(v)) => c.alpha = v,
            (SweepVariable::GammaThDb, SweepValue::Scalar(v)) => c.gamma_th_db = v,
            (SweepVariable::PuTxPosition, SweepValue::Position(p)) => c.layout.pu_tx_center = p,
            _ => {
                return Err(ConfigError::new(format!(
                    "value {value} does not fit {}",
                    variable.name()
                )))
            }
        }
        Ok(c)
    }

    /// Converts to engine units; the only dB-to-linear conversion in a run.
    pub fn resolve(&self) -> Result<ResolvedPoint, ConfigError> {
        let channel = channel_params(&self.layout, self.path_loss_exponent)?;
        let params = SystemParams::new(
            self.alpha,
            self.eta,
            db_to_linear(self.p_interference_dbw),
            db_to_linear(self.p_putx_dbw),
            self.m_receivers,
            self.n_transmitters,
            channel,
        )?;
        self.quadrature.validate()?;
        if self.engines.montecarlo && self.trials < MIN_TRIALS {
            return Err(ConfigError::new(format!(
                "trials = {} is below the minimum of {MIN_TRIALS}",
                self.trials
            )));
        }
        let gamma_th = db_to_linear(self.gamma_th_db);
        if !(gamma_th >= 0.0 && gamma_th.is_finite()) {
            return Err(ConfigError::new(format!(
                "gamma_th_db = {} is not a usable threshold",
                self.gamma_th_db
            )));
        }
        Ok(ResolvedPoint { params, gamma_th })
    }

    /// Every sweep point (or the single point) in sweep order.
    pub fn points(&self) -> Result<Vec<(Option<SweepValue>, RunConfig)>, ConfigError> {
        match &self.sweep {
            None => Ok(vec![(None, self.clone())]),
            Some(axis) => axis
                .values
                .iter()
                .map(|v| Ok((Some(*v), self.at(v)?)))
                .collect(),
        }
    }

    /// `key = value` lines that parse back to this configuration.
    pub fn to_lines(&self) -> Vec<(String, String)> {
        let pos = |p: Point| format!("{},{}", p.x, p.y);
        let mut out = vec![
            ("alpha", self.alpha.to_string()),
            ("eta", self.eta.to_string()),
            ("p_interference_dbw", self.p_interference_dbw.to_string()),
            ("p_putx_dbw", self.p_putx_dbw.to_string()),
            ("m_receivers", self.m_receivers.to_string()),
            ("n_transmitters", self.n_transmitters.to_string()),
            ("gamma_th_db", self.gamma_th_db.to_string()),
            ("path_loss_exponent", self.path_loss_exponent.to_string()),
            ("ss", pos(self.layout.ss)),
            ("sr", pos(self.layout.sr)),
            ("sd", pos(self.layout.sd)),
            ("pu_tx", pos(self.layout.pu_tx_center)),
            ("pu_rx", pos(self.layout.pu_rx_center)),
            ("engines", self.engines.to_string()),
            ("metrics", self.metrics.to_string()),
            ("trials", self.trials.to_string()),
            ("seed", self.seed.to_string()),
            ("rel_tol", format!("{:e}", self.quadrature.rel_tol)),
            ("abs_tol", format!("{:e}", self.quadrature.abs_tol)),
        ];
        if let Some(axis) = &self.sweep {
            out.push(("sweep_variable", axis.variable.name().to_string()));
            let values: Vec<String> = axis.values.iter().map(|v| v.to_string()).collect();
            out.push(("sweep_values", values.join(" ")));
        }
        out.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
    }

    pub fn to_config_text(&self) -> String {
        self.to_lines()
            .into_iter()
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect()
    }
}

const KEYS: &[&str] = &[
    "alpha",
    "eta",
    "p_interference_dbw",
    "p_putx_dbw",
    "m_receivers",
    "n_transmitters",
    "gamma_th_db",
    "path_loss_exponent",
    "ss",
    "sr",
    "sd",
    "pu_tx",
    "pu_rx",
    "engines",
    "metrics",
    "trials",
    "seed",
    "rel_tol",
    "abs_tol",
    "sweep_variable",
    "sweep_start",
    "sweep_stop",
    "sweep_steps",
    "sweep_values",
];

fn parse_point(s: &str) -> Result<Point, String> {
    let (x, y) = s
        .split_once(',')
        .ok_or_else(|| format!("expected `x,y`, got `{s}`"))?;
    let coord = |c: &str| {
        c.trim()
            .parse::<f64>()
            .map_err(|e| format!("bad coordinate `{}`: {e}", c.trim()))
    };
    Ok(Point::new(coord(x)?, coord(y)?))
}

fn parse_num<T: FromStr>(s: &str) -> Result<T, String>
where
    T::Err: fmt::Display,
{
    s.parse::<T>().map_err(|e| format!("`{s}`: {e}"))
}

/// Parses a configuration file. `path_loss_exponent` is mandatory; every
/// other key defaults to [`RunConfig::default`].
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut entries: HashMap<&str, (usize, &str)> = HashMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            ConfigError::at(line_no, format!("expected `key = value`, got `{line}`"))
        })?;
        let (key, value) = (key.trim(), value.trim());
        if !KEYS.contains(&key) {
            return Err(ConfigError::at(line_no, format!("unknown key `{key}`")));
        }
        if let Some((first, _)) = entries.insert(key, (line_no, value)) {
            return Err(ConfigError::at(
                line_no,
                format!("`{key}` already set on line {first}"),
            ));
        }
    }

    let mut c = RunConfig::default();
    macro_rules! field {
        ($key:literal, $parse:expr, $slot:expr) => {
            if let Some(&(line, v)) = entries.get($key) {
                $slot = $parse(v).map_err(|e| ConfigError::at(line, format!("{}: {e}", $key)))?;
            }
        };
    }
    field!("alpha", parse_num::<f64>, c.alpha);
    field!("eta", parse_num::<f64>, c.eta);
    field!("p_interference_dbw", parse_num::<f64>, c.p_interference_dbw);
    field!("p_putx_dbw", parse_num::<f64>, c.p_putx_dbw);
    field!("m_receivers", parse_num::<u32>, c.m_receivers);
    field!("n_transmitters", parse_num::<u32>, c.n_transmitters);
    field!("gamma_th_db", parse_num::<f64>, c.gamma_th_db);
    field!("ss", parse_point, c.layout.ss);
    field!("sr", parse_point, c.layout.sr);
    field!("sd", parse_point, c.layout.sd);
    field!("pu_tx", parse_point, c.layout.pu_tx_center);
    field!("pu_rx", parse_point, c.layout.pu_rx_center);
    field!("engines", Engines::from_str, c.engines);
    field!("metrics", Metrics::from_str, c.metrics);
    field!("trials", parse_num::<u64>, c.trials);
    field!("seed", parse_num::<u64>, c.seed);
    field!("rel_tol", parse_num::<f64>, c.quadrature.rel_tol);
    field!("abs_tol", parse_num::<f64>, c.quadrature.abs_tol);
    match entries.get("path_loss_exponent") {
        Some(&(line, v)) => {
            c.path_loss_exponent = parse_num(v)
                .map_err(|e| ConfigError::at(line, format!("path_loss_exponent: {e}")))?
        }
        None => {
            return Err(ConfigError::new(
                "missing mandatory key `path_loss_exponent`",
            ))
        }
    }
    c.sweep = parse_sweep(&entries)?;
    Ok(c)
}

fn parse_sweep(entries: &HashMap<&str, (usize, &str)>) -> Result<Option<SweepAxis>, ConfigError> {
    let get = |k: &str| entries.get(k).copied();
    let variable = match get("sweep_variable") {
        Some((line, v)) => v
            .parse::<SweepVariable>()
            .map_err(|e| ConfigError::at(line, e))?,
        None => {
            for k in ["sweep_start", "sweep_stop", "sweep_steps", "sweep_values"] {
                if let Some((line, _)) = get(k) {
                    return Err(ConfigError::at(
                        line,
                        format!("`{k}` needs `sweep_variable`"),
                    ));
                }
            }
            return Ok(None);
        }
    };
    let var_line = get("sweep_variable").map(|(l, _)| l);
    let with_line = |line: Option<usize>, e: ConfigError| ConfigError { line, ..e };

    if let Some((line, list)) = get("sweep_values") {
        for k in ["sweep_start", "sweep_stop", "sweep_steps"] {
            if get(k).is_some() {
                return Err(ConfigError::at(
                    line,
                    format!("`sweep_values` conflicts with `{k}`"),
                ));
            }
        }
        let values = list
            .split_whitespace()
            .map(|tok| {
                if variable == SweepVariable::PuTxPosition {
                    parse_point(&tok.replace(';', ",")).map(SweepValue::Position)
                } else {
                    parse_num::<f64>(tok).map(SweepValue::Scalar)
                }
            })
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| ConfigError::at(line, format!("sweep_values: {e}")))?;
        return SweepAxis::explicit(variable, values)
            .map(Some)
            .map_err(|e| with_line(Some(line), e));
    }

    let need = |k: &str| {
        get(k).ok_or_else(|| ConfigError::new(format!("sweep needs `{k}` or `sweep_values`")))
    };
    let (ls, start) = need("sweep_start")?;
    let (lt, stop) = need("sweep_stop")?;
    let (ln, steps) = need("sweep_steps")?;
    let start = parse_num::<f64>(start).map_err(|e| ConfigError::at(ls, e))?;
    let stop = parse_num::<f64>(stop).map_err(|e| ConfigError::at(lt, e))?;
    let steps = parse_num::<usize>(steps).map_err(|e| ConfigError::at(ln, e))?;
    SweepAxis::linear(variable, start, stop, steps)
        .map(Some)
        .map_err(|e| with_line(var_line, e))
}

/// Configuration embedded in the `# key = value` metadata block of a sweep CSV.
pub fn parse_csv_header(text: &str) -> Result<RunConfig, ConfigError> {
    let body: String = text
        .lines()
        .map_while(|l| l.strip_prefix('#'))
        .filter(|l| l.contains('='))
        .map(|l| format!("{}\n", l.trim()))
        .collect();
    parse_config(&body)
}
