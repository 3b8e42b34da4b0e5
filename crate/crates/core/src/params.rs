use crate::distributions::{ErlangSpec, MaxExpSpec};
use crate::error::{invalid, Result};
use crate::geometry::ChannelParams;

/// Scalar protocol and power parameters, all in linear units.
///
/// The relay splits the information phase equally between the two hops, so
/// the slot length cancels out of the harvested-to-transmit power ratio and
/// only `rho = 2·eta·alpha / (1 - alpha)` remains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    alpha: f64,
    eta: f64,
    p_interference: f64,
    p_putx: f64,
    m_receivers: u32,
    n_transmitters: u32,
    channel: ChannelParams,
}

impl SystemParams {
    pub fn new(
        alpha: f64,
        eta: f64,
        p_interference: f64,
        p_putx: f64,
        m_receivers: u32,
        n_transmitters: u32,
        channel: ChannelParams,
    ) -> Result<Self> {
        let p = Self {
            alpha,
            eta,
            p_interference,
            p_putx,
            m_receivers,
            n_transmitters,
            channel,
        };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(invalid(
                "alpha",
                format!("must lie in (0, 1), got {}", self.alpha),
            ));
        }
        if !(self.eta > 0.0 && self.eta < 1.0) {
            return Err(invalid(
                "eta",
                format!("must lie in (0, 1), got {}", self.eta),
            ));
        }
        if !(self.p_interference > 0.0 && self.p_interference.is_finite()) {
            return Err(invalid(
                "p_interference",
                format!("must be positive, got {}", self.p_interference),
            ));
        }
        if !(self.p_putx > 0.0 && self.p_putx.is_finite()) {
            return Err(invalid(
                "p_putx",
                format!("must be positive, got {}", self.p_putx),
            ));
        }
        if self.m_receivers == 0 {
            return Err(invalid("m_receivers", "must be at least 1"));
        }
        if self.n_transmitters == 0 {
            return Err(invalid("n_transmitters", "must be at least 1"));
        }
        self.channel.validate()
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn eta(&self) -> f64 {
        self.eta
    }
    pub fn p_interference(&self) -> f64 {
        self.p_interference
    }
    pub fn p_putx(&self) -> f64 {
        self.p_putx
    }
    pub fn m_receivers(&self) -> u32 {
        self.m_receivers
    }
    pub fn n_transmitters(&self) -> u32 {
        self.n_transmitters
    }
    pub fn channel(&self) -> &ChannelParams {
        &self.channel
    }

    /// Harvesting gain `2·eta·alpha / (1 - alpha)`.
    pub fn rho(&self) -> f64 {
        2.0 * self.eta * self.alpha / (1.0 - self.alpha)
    }

    pub fn with_alpha(self, alpha: f64) -> Result<Self> {
        Self { alpha, ..self }.checked()
    }
    pub fn with_p_interference(self, p_interference: f64) -> Result<Self> {
        Self {
            p_interference,
            ..self
        }
        .checked()
    }
    pub fn with_p_putx(self, p_putx: f64) -> Result<Self> {
        Self { p_putx, ..self }.checked()
    }
    pub fn with_counts(self, m_receivers: u32, n_transmitters: u32) -> Result<Self> {
        Self {
            m_receivers,
            n_transmitters,
            ..self
        }
        .checked()
    }
    pub fn with_channel(self, channel: ChannelParams) -> Result<Self> {
        Self { channel, ..self }.checked()
    }

    fn checked(self) -> Result<Self> {
        self.validate()?;
        Ok(self)
    }

    /// Aggregate PU power `Z_p` received at SS (1), SR (2) or SD (3).
    pub fn z_spec(&self, hop: usize) -> ErlangSpec {
        let nu = match hop {
            1 => self.channel.nu1,
            2 => self.channel.nu2,
            3 => self.channel.nu3,
            _ => panic!("no aggregate Z_{hop}"),
        };
        ErlangSpec::new(self.n_transmitters, self.p_putx * nu).expect("validated parameters")
    }

    /// Worst interference gain `Y_q` from SS (1) or SR (2) to the PU receivers.
    pub fn y_spec(&self, hop: usize) -> MaxExpSpec {
        let omega = match hop {
            1 => self.channel.omega1,
            2 => self.channel.omega2,
            _ => panic!("no maximum Y_{hop}"),
        };
        MaxExpSpec::new(self.m_receivers, omega).expect("validated parameters")
    }
}
