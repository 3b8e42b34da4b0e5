//! Outage probability and throughput of an underlay cognitive decode-and-forward
//! relay network whose source and relay run on energy harvested from the
//! primary transmitters.
//!
//! Three independent engines evaluate the same model:
//!
//! * [`analytic`]: exact outage by nested adaptive quadrature,
//! * [`asymptotic`]: closed-form large-system outage,
//! * [`montecarlo`]: seeded, partition-independent simulation.
//!
//! All powers are linear (watts); decibel conversion belongs to callers.

pub mod analytic;
pub mod asymptotic;
pub mod distributions;
pub mod error;
pub mod geometry;
pub mod montecarlo;
pub mod params;
pub mod quadrature;
pub mod throughput;

pub use error::{Error, Result};
pub use geometry::{channel_params, ChannelParams, NodeLayout, Point};
pub use params::SystemParams;
pub use quadrature::QuadratureSettings;

/// `10^(db/10)`.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}
