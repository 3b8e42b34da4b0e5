//! Large-system (M, N → ∞) outage probability.
//!
//! The aggregates `Z_p` are replaced by their means `N·P_PUtx·ν_p` and each
//! maximum `Y_q` by `ω_q(1 + ln M) + Ȳ_q` with `Ȳ_q ~ N(0, 2ω_q²)`. The two hop
//! SIRs are then independent and each success probability has a closed form.
//! Both hops share one kernel; the destination hop is the relay hop with
//! `ν1 → ν2, ω1 → ω2, λ1 → λ2, ν2 → ν3`.
//!
//! The formulas are defined for every `M, N >= 1` but only approximate the
//! exact outage in the large-system regime.

use crate::distributions::{erfcx, phi};
use crate::error::{invalid, Error, Result};
use crate::params::SystemParams;

/// Per-hop link means entering the shared kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HopLinks {
    /// PU power feeding the transmitter's harvester.
    pub nu_harvest: f64,
    /// Transmitter to PU-receiver interference link.
    pub omega: f64,
    /// Data link.
    pub lambda: f64,
    /// PU power interfering at the receiver.
    pub nu_interference: f64,
}

impl HopLinks {
    pub fn relay(p: &SystemParams) -> Self {
        let c = p.channel();
        Self {
            nu_harvest: c.nu1,
            omega: c.omega1,
            lambda: c.lambda1,
            nu_interference: c.nu2,
        }
    }

    pub fn destination(p: &SystemParams) -> Self {
        let c = p.channel();
        Self {
            nu_harvest: c.nu2,
            omega: c.omega2,
            lambda: c.lambda2,
            nu_interference: c.nu3,
        }
    }
}

/// Composite rates and normal-variable bounds of both hops.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticTerms {
    pub gamma_r: f64,
    pub gamma_d: f64,
    pub u_r: f64,
    pub u_r_star: f64,
    pub u_d: f64,
    pub u_d_star: f64,
}

#[derive(Debug, Clone, Copy)]
struct HopTerms {
    rate: f64,
    u: f64,
    u_star: f64,
}

fn hop_terms(gamma_th: f64, p: &SystemParams, links: &HopLinks) -> HopTerms {
    let n = f64::from(p.n_transmitters());
    let ln_m = f64::from(p.m_receivers()).ln();
    let u_star = -links.omega * (1.0 + ln_m);
    HopTerms {
        rate: p.p_putx() * n * links.nu_interference * gamma_th
            / (links.lambda * p.p_interference()),
        u: p.p_interference() / (p.rho() * n * p.p_putx() * links.nu_harvest) + u_star,
        u_star,
    }
}

pub fn asymptotic_terms(gamma_th: f64, p: &SystemParams) -> AsymptoticTerms {
    let r = hop_terms(gamma_th, p, &HopLinks::relay(p));
    let d = hop_terms(gamma_th, p, &HopLinks::destination(p));
    AsymptoticTerms {
        gamma_r: r.rate,
        gamma_d: d.rate,
        u_r: r.u,
        u_r_star: r.u_star,
        u_d: d.u,
        u_d_star: d.u_star,
    }
}

/// Success probability of one hop in the large-system model.
///
/// The interference-limited term `½ e^{ω²γ² − γω(1+ln M)} erfc(γω + u/(2ω))`
/// multiplies a possibly huge exponential by a vanishing tail. For a
/// non-negative erfc argument `a` it is evaluated as
/// `½ erfcx(a) · e^{−γ(u − u*) − u²/(4ω²)}`, whose exponent is never positive.
pub fn hop_success(gamma_th: f64, p: &SystemParams, links: &HopLinks) -> Result<f64> {
    if !(gamma_th >= 0.0) {
        return Err(invalid(
            "gamma_th",
            format!("must be non-negative, got {gamma_th}"),
        ));
    }
    let t = hop_terms(gamma_th, p, links);
    let w = links.omega;
    let a = t.rate * w + t.u / (2.0 * w);
    let interference_limited = if a >= 0.0 {
        let exponent = -t.rate * (t.u - t.u_star) - t.u * t.u / (4.0 * w * w);
        0.5 * erfcx(a) * exponent.exp()
    } else {
        let exponent = w * w * t.rate * t.rate + t.rate * t.u_star;
        0.5 * exponent.exp() * (1.0 - phi(a))
    };
    let harvest_limited = 0.5
        * (-links.nu_interference * gamma_th / (links.lambda * p.rho() * links.nu_harvest)).exp()
        * (phi(t.u / (2.0 * w)) - phi(t.u_star / (2.0 * w)));
    let v = interference_limited + harvest_limited;
    if !v.is_finite() {
        return Err(Error::Overflow("large-system hop success"));
    }
    if !(-1e-12..=1.0 + 1e-12).contains(&v) {
        return Err(Error::OutOfRange { value: v });
    }
    Ok(v.clamp(0.0, 1.0))
}

/// `Θ_R`: relay-hop success probability.
pub fn theta_r(gamma_th: f64, p: &SystemParams) -> Result<f64> {
    hop_success(gamma_th, p, &HopLinks::relay(p))
}

/// `Θ_D`: destination-hop success probability.
pub fn theta_d(gamma_th: f64, p: &SystemParams) -> Result<f64> {
    hop_success(gamma_th, p, &HopLinks::destination(p))
}

/// `1 − Θ_R·Θ_D`.
pub fn outage_asymptotic(gamma_th: f64, p: &SystemParams) -> Result<f64> {
    Ok(1.0 - theta_r(gamma_th, p)? * theta_d(gamma_th, p)?)
}
