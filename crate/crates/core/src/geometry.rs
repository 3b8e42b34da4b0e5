//! Node placement and path-loss mapping.
//!
//! Every fading link is Rayleigh, so its power gain is exponential with mean
//! `d^-m`. All primary transmitters share one center point and all primary
//! receivers share another, so a single distance covers each PU link family.

use crate::error::{invalid, Error, Result};

/// A point on the plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

impl From<(f64, f64)> for Point {
    fn from((x, y): (f64, f64)) -> Self {
        Self::new(x, y)
    }
}

/// Positions of the secondary source, relay and destination and of the two
/// primary-user cluster centers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeLayout {
    pub ss: Point,
    pub sr: Point,
    pub sd: Point,
    pub pu_tx_center: Point,
    pub pu_rx_center: Point,
}

impl Default for NodeLayout {
    /// SS, SR, SD on the x axis at 0, 1, 2; PU receivers at (2, 1) and PU
    /// transmitters at (0, 1).
    fn default() -> Self {
        Self {
            ss: Point::new(0.0, 0.0),
            sr: Point::new(1.0, 0.0),
            sd: Point::new(2.0, 0.0),
            pu_tx_center: Point::new(0.0, 1.0),
            pu_rx_center: Point::new(2.0, 1.0),
        }
    }
}

impl NodeLayout {
    pub fn with_pu_tx(mut self, center: Point) -> Self {
        self.pu_tx_center = center;
        self
    }
}

/// Mean power gains of every link family.
///
/// `lambda*` are the secondary data links, `omega*` the secondary-to-PU-receiver
/// interference links and `nu*` the PU-transmitter links into SS, SR and SD.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    pub lambda1: f64,
    pub lambda2: f64,
    pub omega1: f64,
    pub omega2: f64,
    pub nu1: f64,
    pub nu2: f64,
    pub nu3: f64,
}

impl ChannelParams {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("lambda1", self.lambda1),
            ("lambda2", self.lambda2),
            ("omega1", self.omega1),
            ("omega2", self.omega2),
            ("nu1", self.nu1),
            ("nu2", self.nu2),
            ("nu3", self.nu3),
        ];
        for (name, v) in fields {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(
                    name,
                    format!("mean link gain must be positive, got {v}"),
                ));
            }
        }
        Ok(())
    }
}

fn link_gain(link: &'static str, a: Point, b: Point, m: f64) -> Result<f64> {
    let d = a.distance(b);
    if !(d >= 1.0) {
        return Err(Error::LinkTooShort { link, distance: d });
    }
    Ok(d.powf(-m))
}

/// Maps a layout and path-loss exponent `m` to the mean gain of every link.
pub fn channel_params(layout: &NodeLayout, m: f64) -> Result<ChannelParams> {
    if !(m > 0.0 && m.is_finite()) {
        return Err(invalid(
            "path_loss_exponent",
            format!("must be positive, got {m}"),
        ));
    }
    let l = layout;
    Ok(ChannelParams {
        lambda1: link_gain("SS-SR", l.ss, l.sr, m)?,
        lambda2: link_gain("SR-SD", l.sr, l.sd, m)?,
        omega1: link_gain("SS-PUrx", l.ss, l.pu_rx_center, m)?,
        omega2: link_gain("SR-PUrx", l.sr, l.pu_rx_center, m)?,
        nu1: link_gain("PUtx-SS", l.pu_tx_center, l.ss, m)?,
        nu2: link_gain("PUtx-SR", l.pu_tx_center, l.sr, m)?,
        nu3: link_gain("PUtx-SD", l.pu_tx_center, l.sd, m)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_layout_unit_data_links() {
        let c = channel_params(&NodeLayout::default(), 3.0).unwrap();
        assert_eq!(c.lambda1, 1.0);
        let c2 = channel_params(&NodeLayout::default(), 2.0).unwrap();
        assert_eq!(c2.lambda2, 1.0);
    }

    #[test]
    fn pu_tx_to_destination() {
        let c = channel_params(&NodeLayout::default(), 2.0).unwrap();
        assert!((c.nu3 - 0.2).abs() < 1e-15);
    }

    #[test]
    fn rejects_short_links() {
        let layout = NodeLayout::default().with_pu_tx(Point::new(0.5, 0.5));
        match channel_params(&layout, 3.0) {
            Err(Error::LinkTooShort { link, .. }) => assert_eq!(link, "PUtx-SS"),
            other => panic!("unexpected {other:?}"),
        }
        assert!(channel_params(&NodeLayout::default(), 0.0).is_err());
    }

    #[test]
    fn doubling_distance_quarters_gain() {
        let near = NodeLayout::default().with_pu_tx(Point::new(0.0, 1.5));
        let far = NodeLayout::default().with_pu_tx(Point::new(0.0, 3.0));
        let a = channel_params(&near, 2.0).unwrap();
        let b = channel_params(&far, 2.0).unwrap();
        assert_eq!(a.nu1 / 4.0, b.nu1);
    }

    #[test]
    fn swapping_centers_swaps_families() {
        let layout = NodeLayout::default();
        let mut swapped = layout;
        std::mem::swap(&mut swapped.pu_tx_center, &mut swapped.pu_rx_center);
        let a = channel_params(&layout, 3.0).unwrap();
        let b = channel_params(&swapped, 3.0).unwrap();
        assert_eq!((b.omega1, b.omega2), (a.nu1, a.nu2));
        assert_eq!((b.nu1, b.nu2), (a.omega1, a.omega2));
        assert_eq!((b.lambda1, b.lambda2), (a.lambda1, a.lambda2));
        let d = swapped.pu_tx_center.distance(swapped.sd);
        assert_eq!(b.nu3, d.powf(-3.0));
    }
}
