//! Delay-sensitive and delay-tolerant throughput.
//!
//! Both modes are written against [`OutageEvaluator`], so the exact, large-system
//! and simulated outage models share one implementation of each throughput
//! definition.

use crate::analytic::outage_exact;
use crate::asymptotic::outage_asymptotic;
use crate::error::{invalid, Error, Result};
use crate::montecarlo::estimate_outage;
use crate::params::SystemParams;
use crate::quadrature::{integrate, QuadratureSettings};

/// Survival level below which the delay-tolerant integral is truncated.
pub const TRUNCATION_SURVIVAL: f64 = 1e-6;

/// Doublings of the truncation point before the search gives up.
const MAX_DOUBLINGS: u32 = 80;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ThroughputMode {
    DelaySensitive,
    DelayTolerant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OutageSource {
    Exact,
    Asymptotic,
    MonteCarlo,
    /// Any other evaluator, e.g. a synthetic distribution in tests.
    Custom,
}

/// Outage probability as a function of the SIR threshold, i.e. the
/// distribution function of `min(Γ_R, Γ_D)`.
pub trait OutageEvaluator {
    fn outage(&self, gamma_th: f64) -> Result<f64>;

    fn source(&self) -> OutageSource {
        OutageSource::Custom
    }
}

impl<F> OutageEvaluator for F
where
    F: Fn(f64) -> Result<f64>,
{
    fn outage(&self, gamma_th: f64) -> Result<f64> {
        self(gamma_th)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ExactOutage<'a> {
    pub params: &'a SystemParams,
    pub quadrature: QuadratureSettings,
}

impl OutageEvaluator for ExactOutage<'_> {
    fn outage(&self, gamma_th: f64) -> Result<f64> {
        outage_exact(gamma_th, self.params, &self.quadrature)
    }
    fn source(&self) -> OutageSource {
        OutageSource::Exact
    }
}

#[derive(Debug, Clone, Copy)]
pub struct AsymptoticOutage<'a> {
    pub params: &'a SystemParams,
}

impl OutageEvaluator for AsymptoticOutage<'_> {
    fn outage(&self, gamma_th: f64) -> Result<f64> {
        outage_asymptotic(gamma_th, self.params)
    }
    fn source(&self) -> OutageSource {
        OutageSource::Asymptotic
    }
}

/// Simulated outage. Every call re-runs the simulation with the same seed, so
/// thresholds are compared on identical trials.
#[derive(Debug, Clone, Copy)]
pub struct MonteCarloOutage<'a> {
    pub params: &'a SystemParams,
    pub trials: u64,
    pub base_seed: u64,
}

impl OutageEvaluator for MonteCarloOutage<'_> {
    fn outage(&self, gamma_th: f64) -> Result<f64> {
        Ok(estimate_outage(gamma_th, self.params, self.trials, self.base_seed)?.mean)
    }
    fn source(&self) -> OutageSource {
        OutageSource::MonteCarlo
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThroughputResult {
    /// bits/s/Hz
    pub value: f64,
    pub mode: ThroughputMode,
    pub outage_source: OutageSource,
    /// Upper limit of the delay-tolerant integral.
    pub truncation_upper: Option<f64>,
}

/// Fraction of the slot spent on each hop's information transfer.
fn hop_share(p: &SystemParams) -> f64 {
    (1.0 - p.alpha()) / 2.0
}

/// `(1-α)/2 · log2(1+γ_th) · (1 - P_out(γ_th))`.
pub fn throughput_delay_sensitive<E: OutageEvaluator + ?Sized>(
    gamma_th: f64,
    p: &SystemParams,
    outage: &E,
) -> Result<ThroughputResult> {
    if !(gamma_th > 0.0 && gamma_th.is_finite()) {
        return Err(invalid(
            "gamma_th",
            format!("fixed-rate mode needs a positive threshold, got {gamma_th}"),
        ));
    }
    let p_out = outage.outage(gamma_th)?;
    let rate = gamma_th.ln_1p() / std::f64::consts::LN_2;
    Ok(ThroughputResult {
        value: hop_share(p) * rate * (1.0 - p_out),
        mode: ThroughputMode::DelaySensitive,
        outage_source: outage.source(),
        truncation_upper: None,
    })
}

/// `(1-α)/(2 ln 2) ∫_0^U (1 - P_out(x)) / (1 + x) dx`, with `U` the first
/// power of two (from 1) at which the survival `1 - P_out(U)` drops below
/// [`TRUNCATION_SURVIVAL`].
pub fn throughput_delay_tolerant<E: OutageEvaluator + ?Sized>(
    p: &SystemParams,
    outage: &E,
    quad: &QuadratureSettings,
) -> Result<ThroughputResult> {
    let mut upper = 1.0;
    let mut survival = 1.0 - outage.outage(upper)?;
    let mut doublings = 0;
    while survival >= TRUNCATION_SURVIVAL {
        doublings += 1;
        if doublings > MAX_DOUBLINGS {
            return Err(Error::TruncationSearch { upper, survival });
        }
        upper *= 2.0;
        survival = 1.0 - outage.outage(upper)?;
    }

    let mut first_error = None;
    let integral = integrate(
        |x| {
            if first_error.is_some() {
                return 0.0;
            }
            match outage.outage(x) {
                Ok(v) => (1.0 - v) / (1.0 + x),
                Err(e) => {
                    first_error = Some(e);
                    0.0
                }
            }
        },
        0.0,
        upper,
        quad,
    );
    if let Some(e) = first_error {
        return Err(e);
    }
    let integral = integral?;
    Ok(ThroughputResult {
        value: hop_share(p) / std::f64::consts::LN_2 * integral.value,
        mode: ThroughputMode::DelayTolerant,
        outage_source: outage.source(),
        truncation_upper: Some(upper),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{channel_params, NodeLayout};

    fn baseline() -> SystemParams {
        let c = channel_params(&NodeLayout::default(), 3.0).unwrap();
        SystemParams::new(0.5, 0.8, 10.0, 1.0, 3, 3, c).unwrap()
    }

    #[test]
    fn delay_sensitive_bounds() {
        let p = baseline();
        let never = |_: f64| Ok(0.0);
        let always = |_: f64| Ok(1.0);
        let r = throughput_delay_sensitive(1.0, &p, &never).unwrap();
        assert_eq!(r.value, 0.25);
        assert_eq!(r.outage_source, OutageSource::Custom);
        assert_eq!(
            throughput_delay_sensitive(1.0, &p, &always).unwrap().value,
            0.0
        );
        assert!(throughput_delay_sensitive(0.0, &p, &never).is_err());
        for g in [0.1, 3.0, 99.0] {
            let r = throughput_delay_sensitive(g, &p, &never).unwrap();
            assert!((r.value - 0.25 * (1.0 + g).log2()).abs() < 1e-15);
        }
    }

    #[test]
    fn delay_tolerant_synthetic_cdf() {
        let p = baseline();
        let cdf = |x: f64| Ok(x / (1.0 + x));
        let q = QuadratureSettings::default();
        let r = throughput_delay_tolerant(&p, &cdf, &q).unwrap();
        let u = r.truncation_upper.unwrap();
        assert_eq!(u, 2f64.powi(20));
        let expect = 0.25 / std::f64::consts::LN_2 * (1.0 - 1.0 / (1.0 + u));
        assert!((r.value - expect).abs() < 1e-8, "{} vs {expect}", r.value);
    }

    #[test]
    fn delay_tolerant_total_outage() {
        let p = baseline();
        let step = |_: f64| Ok(1.0);
        let r = throughput_delay_tolerant(&p, &step, &QuadratureSettings::default()).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.truncation_upper, Some(1.0));
    }

    #[test]
    fn broken_evaluator_fails_truncation() {
        let p = baseline();
        let stuck = |_: f64| Ok(0.5);
        match throughput_delay_tolerant(&p, &stuck, &QuadratureSettings::default()) {
            Err(Error::TruncationSearch { .. }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn tolerant_exceeds_sensitive_exact() {
        let p = baseline();
        let exact = ExactOutage {
            params: &p,
            quadrature: QuadratureSettings::default(),
        };
        let ds = throughput_delay_sensitive(1.0, &p, &exact).unwrap();
        let dt = throughput_delay_tolerant(&p, &exact, &QuadratureSettings::default()).unwrap();
        assert_eq!(dt.outage_source, OutageSource::Exact);
        assert!(dt.value > ds.value, "{} <= {}", dt.value, ds.value);
    }
}
