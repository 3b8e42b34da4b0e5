//! Globally adaptive Gauss–Kronrod quadrature on finite and semi-infinite
//! intervals.
//!
//! Each panel is evaluated with the nested 7-point Gauss / 15-point Kronrod
//! pair; the panel with the largest error estimate is bisected until the total
//! estimated error meets `max(abs_tol, rel_tol * |result|)`. Semi-infinite
//! ranges are mapped onto `[0, 1)` by `t = lower + s·u / (1 - u)`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{invalid, Error, Result};

/// Upper bound on the number of live panels before giving up.
const MAX_PANELS: usize = 5000;

/// Panels the interval is split into before adaptation starts.
const INITIAL_PANELS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSettings {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_depth: u32,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        Self {
            rel_tol: 1e-7,
            abs_tol: 1e-10,
            max_depth: 50,
        }
    }
}

impl QuadratureSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) {
            return Err(invalid("rel_tol", "must be positive"));
        }
        if !(self.abs_tol > 0.0) {
            return Err(invalid("abs_tol", "must be positive"));
        }
        if self.max_depth < 1 {
            return Err(invalid("max_depth", "must be at least 1"));
        }
        Ok(())
    }

    /// Settings `factor` times tighter, for integrals nested inside another.
    pub fn tightened(&self, factor: f64) -> Self {
        Self {
            rel_tol: self.rel_tol / factor,
            abs_tol: self.abs_tol / factor,
            max_depth: self.max_depth,
        }
    }

    pub fn tolerance_for(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error_estimate: f64,
    pub panels: usize,
}

// Kronrod abscissae on [0, 1] of the symmetric rule; odd indices are the
// Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    depth: u32,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gauss_kronrod<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64, depth: u32) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let sum = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * sum;
        if j % 2 == 1 {
            gauss += WG[j / 2] * sum;
        }
    }
    Panel {
        a,
        b,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
        depth,
    }
}

/// Adaptive integration of `f` over the finite interval `[a, b]`.
pub fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    settings: &QuadratureSettings,
) -> Result<Integral> {
    settings.validate()?;
    if !(a.is_finite() && b.is_finite()) {
        return Err(invalid("bounds", "finite interval required"));
    }
    if a == b {
        return Ok(Integral {
            value: 0.0,
            error_estimate: 0.0,
            panels: 0,
        });
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };

    let width = (hi - lo) / INITIAL_PANELS as f64;
    let mut heap: BinaryHeap<Panel> = (0..INITIAL_PANELS)
        .map(|i| {
            let pa = lo + width * i as f64;
            let pb = if i + 1 == INITIAL_PANELS {
                hi
            } else {
                pa + width
            };
            gauss_kronrod(&mut f, pa, pb, 0)
        })
        .collect();

    loop {
        let (value, error) = heap
            .iter()
            .fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error));
        if !value.is_finite() {
            return Err(Error::Overflow("quadrature integrand"));
        }
        let converged = error <= settings.tolerance_for(value);
        let worst = *heap.peek().expect("at least one panel");
        if converged || worst.error == 0.0 {
            return Ok(Integral {
                value: sign * value,
                error_estimate: error,
                panels: heap.len(),
            });
        }
        if worst.depth >= settings.max_depth || heap.len() >= MAX_PANELS {
            return Err(Error::NonConvergence {
                estimate: sign * value,
                error_estimate: error,
                panels: heap.len(),
            });
        }
        heap.pop();
        let mid = 0.5 * (worst.a + worst.b);
        heap.push(gauss_kronrod(&mut f, worst.a, mid, worst.depth + 1));
        heap.push(gauss_kronrod(&mut f, mid, worst.b, worst.depth + 1));
    }
}

/// `∫_lower^∞ f(t) dt` through the substitution `u = (t - lower)/(1 + t - lower)`.
pub fn integrate_semi_infinite<F: FnMut(f64) -> f64>(
    f: F,
    lower: f64,
    settings: &QuadratureSettings,
) -> Result<f64> {
    integrate_semi_infinite_scaled(f, lower, 1.0, settings).map(|r| r.value)
}

/// Same as [`integrate_semi_infinite`] with `t = lower + scale·u/(1-u)`.
///
/// Choosing `scale` near the integrand's natural length keeps its mass away
/// from the ends of `[0, 1)`.
pub fn integrate_semi_infinite_scaled<F: FnMut(f64) -> f64>(
    mut f: F,
    lower: f64,
    scale: f64,
    settings: &QuadratureSettings,
) -> Result<Integral> {
    if !(lower.is_finite()) {
        return Err(invalid("lower", "finite lower bound required"));
    }
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(invalid("scale", format!("must be positive, got {scale}")));
    }
    let mapped = |u: f64| {
        let one_minus = 1.0 - u;
        let t = lower + scale * u / one_minus;
        let jacobian = scale / (one_minus * one_minus);
        if !(t.is_finite() && jacobian.is_finite()) {
            return 0.0;
        }
        let v = f(t);
        if v == 0.0 {
            0.0
        } else {
            v * jacobian
        }
    };
    integrate(mapped, 0.0, 1.0, settings)
}
