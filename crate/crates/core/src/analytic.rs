//! Exact outage probability.
//!
//! Conditioned on the aggregate PU power at the relay `Z2 = z2`, the two hop
//! SIRs are independent. Each conditional success probability splits on which
//! branch of the transmit-power `min(·)` is active:
//!
//! * relay hop: `J_R,I` (harvest-limited, averaged over `Z1`) plus `J_R,II`
//!   (interference-limited, averaged over `Y1`);
//! * destination hop: `J_D,I` (closed form) plus `J_D,II` (one integral over `Y2`).
//!
//! The outage probability is one minus the average of their product over `Z2`.

use std::collections::HashMap;

use crate::distributions::{erlang_pdf, max_exp_pdf_product};
use crate::error::{invalid, Error, Result};
use crate::params::SystemParams;
use crate::quadrature::{integrate_semi_infinite_scaled, QuadratureSettings};

/// Inner integrals run this much tighter than the outer one.
const INNER_TIGHTENING: f64 = 10.0;

fn check_threshold(gamma_th: f64) -> Result<()> {
    if !(gamma_th >= 0.0) {
        return Err(invalid(
            "gamma_th",
            format!("must be non-negative, got {gamma_th}"),
        ));
    }
    Ok(())
}

/// `(1 - e^{-x})^m` without cancellation for small `x`.
fn one_minus_exp_pow(x: f64, m: u32) -> f64 {
    (-(-x).exp_m1()).powi(m as i32)
}

/// Relay hop, harvest-limited branch:
/// `Pr{X1 >= z2·γ/(Z1·ρ), Y1 <= P_I/(Z1·ρ)}`.
pub fn j_r_i(z2: f64, gamma_th: f64, p: &SystemParams, q: &QuadratureSettings) -> Result<f64> {
    check_threshold(gamma_th)?;
    let rho = p.rho();
    let c = p.channel();
    let m = p.m_receivers();
    let z1_spec = p.z_spec(1);
    let signal = z2 * gamma_th / (rho * c.lambda1);
    let interference = p.p_interference() / (rho * c.omega1);
    let integrand = |z1: f64| {
        let density = erlang_pdf(z1, &z1_spec);
        if density == 0.0 {
            return 0.0;
        }
        let pass_signal = if signal == 0.0 {
            1.0
        } else {
            (-signal / z1).exp()
        };
        pass_signal * one_minus_exp_pow(interference / z1, m) * density
    };
    Ok(integrate_semi_infinite_scaled(integrand, 0.0, z1_spec.mean(), q)?.value)
}

/// Relay hop, interference-limited branch:
/// `Pr{X1 >= Y1·z2·γ/P_I, Z1 >= P_I/(Y1·ρ)}`.
pub fn j_r_ii(z2: f64, gamma_th: f64, p: &SystemParams, q: &QuadratureSettings) -> Result<f64> {
    check_threshold(gamma_th)?;
    let rho = p.rho();
    let c = p.channel();
    let n = p.n_transmitters();
    let y1_spec = p.y_spec(1);
    let signal = z2 * gamma_th / (p.p_interference() * c.lambda1);
    let harvest = p.p_interference() / (p.p_putx() * c.nu1 * rho);
    let integrand = |y1: f64| {
        let density = max_exp_pdf_product(y1, &y1_spec);
        if density == 0.0 {
            return 0.0;
        }
        // Pr{Z1 >= P_I/(y1·ρ)}
        let harvest_ok = crate::distributions::gamma_q_int(n, harvest / y1);
        (-signal * y1).exp() * harvest_ok * density
    };
    Ok(integrate_semi_infinite_scaled(integrand, 0.0, y1_spec.expected_max(), q)?.value)
}

/// Destination hop, harvest-limited branch in closed form:
/// `(1 - e^{-P_I/(z2·ρ·ω2)})^M / (1 + P_PUtx·ν3·γ/(ρ·z2·λ2))^N`.
pub fn j_d_i(z2: f64, gamma_th: f64, p: &SystemParams) -> f64 {
    let c = p.channel();
    let rho = p.rho();
    if z2 <= 0.0 {
        // Relay transmit power cap rho·z2 vanishes: success only at zero threshold.
        return if gamma_th == 0.0 { 1.0 } else { 0.0 };
    }
    let below_cap = one_minus_exp_pow(p.p_interference() / (z2 * rho * c.omega2), p.m_receivers());
    let laplace = 1.0 + p.p_putx() * c.nu3 * gamma_th / (rho * z2 * c.lambda2);
    below_cap / laplace.powi(p.n_transmitters() as i32)
}

/// Destination hop, interference-limited branch:
/// `∫_{P_I/(ρ z2)}^∞ f_Y2(y) (1 + y·γ·P_PUtx·ν3/(P_I·λ2))^{-N} dy`.
pub fn j_d_ii(z2: f64, gamma_th: f64, p: &SystemParams, q: &QuadratureSettings) -> Result<f64> {
    check_threshold(gamma_th)?;
    let c = p.channel();
    let lower = p.p_interference() / (p.rho() * z2);
    if !lower.is_finite() {
        return Ok(0.0);
    }
    let y2_spec = p.y_spec(2);
    let n = p.n_transmitters() as i32;
    let slope = gamma_th * p.p_putx() * c.nu3 / (p.p_interference() * c.lambda2);
    let integrand = |y2: f64| {
        let density = max_exp_pdf_product(y2, &y2_spec);
        if density == 0.0 {
            return 0.0;
        }
        density / (1.0 + y2 * slope).powi(n)
    };
    Ok(integrate_semi_infinite_scaled(integrand, lower, c.omega2, q)?.value)
}

/// Conditional success probabilities of both hops at `Z2 = z2`.
pub fn hop_success_given_z2(
    z2: f64,
    gamma_th: f64,
    p: &SystemParams,
    q: &QuadratureSettings,
) -> Result<(f64, f64)> {
    let relay = j_r_i(z2, gamma_th, p, q)? + j_r_ii(z2, gamma_th, p, q)?;
    let dest = j_d_i(z2, gamma_th, p) + j_d_ii(z2, gamma_th, p, q)?;
    Ok((relay, dest))
}

/// Exact outage probability `1 - E_Z2[(J_R,I + J_R,II)(J_D,I + J_D,II)]`.
pub fn outage_exact(gamma_th: f64, p: &SystemParams, q: &QuadratureSettings) -> Result<f64> {
    check_threshold(gamma_th)?;
    q.validate()?;
    let inner = q.tightened(INNER_TIGHTENING);
    let z2_spec = p.z_spec(2);

    let mut cache: HashMap<u64, f64> = HashMap::new();
    let mut first_error: Option<Error> = None;
    let integrand = |z2: f64| {
        let density = erlang_pdf(z2, &z2_spec);
        if density == 0.0 || first_error.is_some() {
            return 0.0;
        }
        let product = match cache.get(&z2.to_bits()) {
            Some(&v) => v,
            None => match hop_success_given_z2(z2, gamma_th, p, &inner) {
                Ok((relay, dest)) => {
                    let v = relay * dest;
                    cache.insert(z2.to_bits(), v);
                    v
                }
                Err(e) => {
                    first_error = Some(e);
                    return 0.0;
                }
            },
        };
        product * density
    };
    let success = integrate_semi_infinite_scaled(integrand, 0.0, z2_spec.mean(), q);
    if let Some(e) = first_error {
        return Err(e);
    }
    let success = success?;
    let outage = 1.0 - success.value;
    let slack = 10.0 * q.tolerance_for(1.0);
    if !(outage >= -slack && outage <= 1.0 + slack) {
        return Err(Error::OutOfRange { value: outage });
    }
    Ok(outage.clamp(0.0, 1.0))
}
