//! Seeded Monte Carlo simulation of the network.
//!
//! Each trial draws its own ChaCha8 stream keyed by `(base_seed, trial_index)`,
//! so a trial's channel realization does not depend on how trials are split
//! across workers. Trials are grouped in fixed-size chunks whose partial sums
//! are reduced in chunk order, which keeps floating-point results bit-identical
//! for any thread count.

use std::ops::Range;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::distributions::sample_exponential;
use crate::error::{invalid, Error, Result};
use crate::params::SystemParams;

/// Fewest trials for which a normal-approximation standard error is reported.
pub const MIN_TRIALS: u64 = 1_000;

pub const DEFAULT_TRIALS: u64 = 1_000_000;

const CHUNK: u64 = 8_192;

/// One realization of every fading aggregate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelSample {
    /// SS→SR data link gain.
    pub x1: f64,
    /// SR→SD data link gain.
    pub x2: f64,
    /// Largest SS→PU receiver gain.
    pub y1: f64,
    /// Largest SR→PU receiver gain.
    pub y2: f64,
    /// Total PU power received at SS.
    pub z1: f64,
    /// Total PU power received at SR.
    pub z2: f64,
    /// Total PU power received at SD.
    pub z3: f64,
}

impl ChannelSample {
    /// Energy harvested by SS and SR over a slot of length `slot`.
    pub fn harvested_energy(&self, p: &SystemParams, slot: f64) -> (f64, f64) {
        let k = p.eta() * p.alpha() * slot;
        (k * self.z1, k * self.z2)
    }

    /// Transmit powers of SS and SR: the harvested energy spread over half the
    /// information phase, capped by the peak interference constraint.
    pub fn transmit_powers(&self, p: &SystemParams) -> (f64, f64) {
        let slot = 1.0;
        let (e_s, e_r) = self.harvested_energy(p, slot);
        let window = (1.0 - p.alpha()) * slot / 2.0;
        let cap = p.p_interference();
        (
            (e_s / window).min(cap / self.y1),
            (e_r / window).min(cap / self.y2),
        )
    }
}

/// Mean and standard error of a simulated quantity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub trials: u64,
    pub seed: u64,
}

impl MonteCarloEstimate {
    fn probability(hits: u64, trials: u64, seed: u64) -> Self {
        let mean = hits as f64 / trials as f64;
        Self {
            mean,
            std_error: (mean * (1.0 - mean) / trials as f64).sqrt(),
            trials,
            seed,
        }
    }
}

/// Per-trial generator factory for one base seed.
#[derive(Debug, Clone)]
pub struct TrialStreams {
    root: ChaCha8Rng,
    seed: u64,
}

impl TrialStreams {
    pub fn new(base_seed: u64) -> Self {
        Self {
            root: ChaCha8Rng::seed_from_u64(base_seed),
            seed: base_seed,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self, trial_index: u64) -> ChaCha8Rng {
        let mut rng = self.root.clone();
        rng.set_stream(trial_index);
        rng
    }

    /// Draws every fading variable for one trial.
    pub fn sample(&self, p: &SystemParams, trial_index: u64) -> ChannelSample {
        let mut rng = self.stream(trial_index);
        let c = p.channel();
        let m = p.m_receivers();
        let n = p.n_transmitters();
        let x1 = sample_exponential(c.lambda1, &mut rng);
        let x2 = sample_exponential(c.lambda2, &mut rng);
        let mut max_of = |mean: f64| {
            (0..m)
                .map(|_| sample_exponential(mean, &mut rng))
                .fold(0.0, f64::max)
        };
        let y1 = max_of(c.omega1);
        let y2 = max_of(c.omega2);
        let mut sum_of = |mean: f64| {
            (0..n)
                .map(|_| sample_exponential(mean, &mut rng))
                .sum::<f64>()
        };
        let z1 = p.p_putx() * sum_of(c.nu1);
        let z2 = p.p_putx() * sum_of(c.nu2);
        let z3 = p.p_putx() * sum_of(c.nu3);
        ChannelSample {
            x1,
            x2,
            y1,
            y2,
            z1,
            z2,
            z3,
        }
    }
}

/// Channel realization of trial `trial_index` under `base_seed`.
pub fn sample_network(p: &SystemParams, trial_index: u64, base_seed: u64) -> ChannelSample {
    TrialStreams::new(base_seed).sample(p, trial_index)
}

/// SIR at the relay and at the destination.
pub fn sir(s: &ChannelSample, p: &SystemParams) -> Result<(f64, f64)> {
    if !(s.z2 > 0.0) {
        return Err(Error::DegenerateSample(
            "zero interference power at the relay",
        ));
    }
    if !(s.z3 > 0.0) {
        return Err(Error::DegenerateSample(
            "zero interference power at the destination",
        ));
    }
    let (ps, pr) = s.transmit_powers(p);
    Ok((ps * s.x1 / s.z2, pr * s.x2 / s.z3))
}

fn check_trials(trials: u64) -> Result<()> {
    if trials < MIN_TRIALS {
        return Err(invalid(
            "trials",
            format!("at least {MIN_TRIALS} required, got {trials}"),
        ));
    }
    Ok(())
}

/// Runs `per_chunk` over fixed trial ranges in parallel and returns the
/// partial results in chunk order.
fn chunked<S, F>(trials: u64, per_chunk: F) -> Vec<S>
where
    S: Send,
    F: Fn(Range<u64>) -> S + Sync,
{
    let chunks = trials.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| per_chunk(c * CHUNK..((c + 1) * CHUNK).min(trials)))
        .collect()
}

/// End-to-end SIR `min(Γ_R, Γ_D)` of every trial in `range`.
fn min_sirs(streams: &TrialStreams, p: &SystemParams, range: Range<u64>) -> Result<Vec<f64>> {
    range
        .map(|t| {
            let (r, d) = sir(&streams.sample(p, t), p)?;
            Ok(r.min(d))
        })
        .collect()
}

/// Outage probability at several thresholds, all evaluated on the same trials.
pub fn estimate_outage_curve(
    gammas: &[f64],
    p: &SystemParams,
    trials: u64,
    base_seed: u64,
) -> Result<Vec<MonteCarloEstimate>> {
    check_trials(trials)?;
    if let Some(g) = gammas.iter().find(|g| !(**g >= 0.0)) {
        return Err(invalid(
            "gamma_th",
            format!("must be non-negative, got {g}"),
        ));
    }
    let streams = TrialStreams::new(base_seed);
    let partial = chunked(trials, |range| -> Result<Vec<u64>> {
        let mut hits = vec![0u64; gammas.len()];
        for s in min_sirs(&streams, p, range)? {
            for (h, g) in hits.iter_mut().zip(gammas) {
                if s < *g {
                    *h += 1;
                }
            }
        }
        Ok(hits)
    });
    let mut hits = vec![0u64; gammas.len()];
    for chunk in partial {
        for (h, c) in hits.iter_mut().zip(chunk?) {
            *h += c;
        }
    }
    Ok(hits
        .into_iter()
        .map(|h| MonteCarloEstimate::probability(h, trials, base_seed))
        .collect())
}

/// Fraction of trials with `min(Γ_R, Γ_D) < gamma_th`.
pub fn estimate_outage(
    gamma_th: f64,
    p: &SystemParams,
    trials: u64,
    base_seed: u64,
) -> Result<MonteCarloEstimate> {
    Ok(estimate_outage_curve(&[gamma_th], p, trials, base_seed)?[0])
}

/// Sample mean of `log2(1 + min(Γ_R, Γ_D))` in bits/s/Hz.
pub fn estimate_ergodic_capacity(
    p: &SystemParams,
    trials: u64,
    base_seed: u64,
) -> Result<MonteCarloEstimate> {
    check_trials(trials)?;
    let streams = TrialStreams::new(base_seed);
    let partial = chunked(trials, |range| -> Result<(f64, f64)> {
        Ok(capacity_moments(&min_sirs(&streams, p, range)?))
    });
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for chunk in partial {
        let (s, q) = chunk?;
        sum += s;
        sum_sq += q;
    }
    Ok(capacity_estimate(sum, sum_sq, trials, base_seed))
}

/// Sum and sum of squares of `log2(1 + sir)`.
fn capacity_moments(min_sirs: &[f64]) -> (f64, f64) {
    min_sirs.iter().fold((0.0, 0.0), |(sum, sum_sq), s| {
        let c = s.ln_1p() / std::f64::consts::LN_2;
        (sum + c, sum_sq + c * c)
    })
}

fn capacity_estimate(sum: f64, sum_sq: f64, trials: u64, seed: u64) -> MonteCarloEstimate {
    let n = trials as f64;
    let mean = sum / n;
    let var = ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0);
    MonteCarloEstimate {
        mean,
        std_error: (var / n).sqrt(),
        trials,
        seed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{max_exp_cdf, MaxExpSpec};
    use crate::geometry::{channel_params, NodeLayout};

    fn baseline() -> SystemParams {
        let c = channel_params(&NodeLayout::default(), 3.0).unwrap();
        SystemParams::new(0.5, 0.8, 10.0, 1.0, 3, 3, c).unwrap()
    }

    #[test]
    fn sir_hand_computed() {
        // rho = 1 needs alpha / (1 - alpha) = 1 / (2 eta): eta = 0.5, alpha = 0.5
        let c = channel_params(&NodeLayout::default(), 3.0).unwrap();
        let p = SystemParams::new(0.5, 0.5, 4.0, 1.0, 1, 1, c).unwrap();
        assert!((p.rho() - 1.0).abs() < 1e-15);
        let s = ChannelSample {
            x1: 3.0,
            x2: 1.0,
            y1: 1.0,
            y2: 1.0,
            z1: 2.0,
            z2: 6.0,
            z3: 1.0,
        };
        let (r, _) = sir(&s, &p).unwrap();
        assert!((r - 1.0).abs() < 1e-15);

        let big = ChannelSample { z1: 1e9, ..s };
        let (r, _) = sir(&big, &p).unwrap();
        assert!((r - 4.0 * 3.0 / (1.0 * 6.0)).abs() < 1e-15);

        let silent = ChannelSample { x1: 0.0, ..s };
        assert_eq!(sir(&silent, &p).unwrap().0, 0.0);

        let bad = ChannelSample { z3: 0.0, ..s };
        assert!(sir(&bad, &p).is_err());
    }

    #[test]
    fn sample_is_deterministic() {
        let p = baseline();
        let a = sample_network(&p, 42, 7);
        let b = sample_network(&p, 42, 7);
        assert_eq!(a, b);
        assert_ne!(a, sample_network(&p, 43, 7));
        assert_ne!(a, sample_network(&p, 42, 8));
    }

    #[test]
    fn z1_mean_and_y1_median() {
        let p = baseline();
        let streams = TrialStreams::new(99);
        let n = 200_000u64;
        let samples: Vec<ChannelSample> = (0..n).map(|t| streams.sample(&p, t)).collect();
        let mean_z1 = samples.iter().map(|s| s.z1).sum::<f64>() / n as f64;
        let expect = 3.0 * p.p_putx() * p.channel().nu1;
        // Erlang(3, 1) has standard deviation sqrt(3)
        assert!((mean_z1 - expect).abs() < 5.0 * 3f64.sqrt() / (n as f64).sqrt());

        let spec = MaxExpSpec::new(3, p.channel().omega1).unwrap();
        // invert (1 - e^{-y/ω})^3 = 1/2
        let median = -spec.mean() * (1.0 - 0.5f64.powf(1.0 / 3.0)).ln();
        assert!((max_exp_cdf(median, &spec) - 0.5).abs() < 1e-12);
        let below = samples.iter().filter(|s| s.y1 <= median).count() as f64 / n as f64;
        assert!((below - 0.5).abs() < 0.005);
    }

    #[test]
    fn outage_trivial_thresholds() {
        let p = baseline();
        let zero = estimate_outage(0.0, &p, 10_000, 1).unwrap();
        assert_eq!(zero.mean, 0.0);
        let all = estimate_outage(1e12, &p, 10_000, 1).unwrap();
        assert!(all.mean > 0.999);
        assert!(estimate_outage(0.1, &p, 999, 1).is_err());
    }

    #[test]
    fn coupled_monotone_curve() {
        let p = baseline();
        let g: Vec<f64> = (0..12)
            .map(|i| 10f64.powf((f64::from(i) - 6.0) / 3.0))
            .collect();
        let est = estimate_outage_curve(&g, &p, 20_000, 5).unwrap();
        for w in est.windows(2) {
            assert!(w[0].mean <= w[1].mean);
        }
    }

    #[test]
    fn std_error_scales_with_trials() {
        let p = baseline();
        let a = estimate_outage(0.1, &p, 50_000, 3).unwrap();
        let b = estimate_outage(0.1, &p, 200_000, 3).unwrap();
        let ratio = a.std_error / b.std_error;
        assert!((ratio - 2.0).abs() < 0.4, "{ratio}");
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let p = baseline();
        let run = |threads: usize| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| {
                    (
                        estimate_outage(0.3, &p, 30_000, 11).unwrap(),
                        estimate_ergodic_capacity(&p, 30_000, 11).unwrap(),
                    )
                })
        };
        let one = run(1);
        let four = run(4);
        assert_eq!(one.0, four.0);
        assert_eq!(one.1.mean.to_bits(), four.1.mean.to_bits());
        assert_eq!(one.1.std_error.to_bits(), four.1.std_error.to_bits());
    }

    #[test]
    fn ergodic_capacity_degenerate_cases() {
        let (sum, sum_sq) = capacity_moments(&[1.0; 4096]);
        let unit = capacity_estimate(sum, sum_sq, 4096, 0);
        assert_eq!(unit.mean, 1.0);
        assert_eq!(unit.std_error, 0.0);

        let p = baseline();
        let est = estimate_ergodic_capacity(&p, 5_000, 2).unwrap();
        assert!(est.mean > 0.0 && est.std_error > 0.0);
        let starved = p.with_p_interference(1e-300).unwrap();
        let est = estimate_ergodic_capacity(&starved, 5_000, 2).unwrap();
        assert!(est.mean < 1e-200);
    }
}
