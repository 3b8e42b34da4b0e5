//! Densities, distribution functions and samplers for the fading aggregates.
//!
//! * exponential link gains,
//! * Erlang sums of `N` i.i.d. exponentials (aggregate PU power),
//! * maxima of `M` i.i.d. exponentials (worst interference link),
//! * the error function family used by the large-system formulas.

use rand::distr::Open01;
use rand::Rng;

use crate::error::{invalid, Result};

const FRAC_2_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;
const FRAC_1_SQRT_PI: f64 = FRAC_2_SQRT_PI / 2.0;

/// Below this argument erf is summed as a power series; above it erfc comes
/// from the continued fraction.
const ERF_SERIES_LIMIT: f64 = 2.0;

/// Largest `M` for which [`max_exp_pdf`] evaluates the alternating binomial
/// sum; above it the product form is used.
pub const MAX_EXP_SUM_FORM_LIMIT: u32 = 30;

/// Sum of `shape` i.i.d. exponentials with mean `scale`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErlangSpec {
    shape: u32,
    scale: f64,
}

impl ErlangSpec {
    pub fn new(shape: u32, scale: f64) -> Result<Self> {
        if shape == 0 {
            return Err(invalid("shape", "Erlang shape must be at least 1"));
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(invalid("scale", format!("must be positive, got {scale}")));
        }
        Ok(Self { shape, scale })
    }

    pub fn shape(&self) -> u32 {
        self.shape
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn mean(&self) -> f64 {
        f64::from(self.shape) * self.scale
    }
}

/// Maximum of `count` i.i.d. exponentials with the given mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxExpSpec {
    count: u32,
    mean: f64,
}

impl MaxExpSpec {
    pub fn new(count: u32, mean: f64) -> Result<Self> {
        if count == 0 {
            return Err(invalid("count", "must be at least 1"));
        }
        if !(mean > 0.0 && mean.is_finite()) {
            return Err(invalid("mean", format!("must be positive, got {mean}")));
        }
        Ok(Self { count, mean })
    }

    pub fn count(&self) -> u32 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Expected value `mean * H_count`.
    pub fn expected_max(&self) -> f64 {
        self.mean * (1..=self.count).map(|k| 1.0 / f64::from(k)).sum::<f64>()
    }
}

/// `ln((n-1)!)`, i.e. `ln Γ(n)` for a positive integer.
pub fn ln_gamma_int(n: u32) -> f64 {
    (2..n).map(|k| f64::from(k).ln()).sum()
}

fn ln_factorial(n: u32) -> f64 {
    ln_gamma_int(n + 1)
}

// ---------------------------------------------------------------------------
// Incomplete gamma, integer shape.

/// Lower regularized incomplete gamma `P(n, x)` for integer `n >= 1`.
pub fn gamma_p_int(n: u32, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if n == 1 {
        return -(-x).exp_m1();
    }
    if x.is_infinite() {
        return 1.0;
    }
    if x < f64::from(n) {
        lower_tail_series(n, x)
    } else {
        1.0 - upper_tail_series(n, x)
    }
}

/// Upper regularized incomplete gamma `Q(n, x) = 1 - P(n, x)`.
pub fn gamma_q_int(n: u32, x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if n == 1 {
        return (-x).exp();
    }
    if x.is_infinite() {
        return 0.0;
    }
    if x < f64::from(n) {
        1.0 - lower_tail_series(n, x)
    } else {
        upper_tail_series(n, x)
    }
}

/// `e^-x Σ_{k>=n} x^k / k!`, accurate when `x < n` (terms decrease).
fn lower_tail_series(n: u32, x: f64) -> f64 {
    let mut term = (-x + f64::from(n) * x.ln() - ln_factorial(n)).exp();
    let mut sum = term;
    let mut k = n;
    while term > sum * 1e-17 {
        k += 1;
        term *= x / f64::from(k);
        sum += term;
    }
    sum.min(1.0)
}

/// `e^-x Σ_{k<n} x^k / k!`, accurate when `x >= n` (terms increase with k).
fn upper_tail_series(n: u32, x: f64) -> f64 {
    let top = n - 1;
    let mut term = (-x + f64::from(top) * x.ln() - ln_factorial(top)).exp();
    let mut sum = term;
    for k in (1..=top).rev() {
        term *= f64::from(k) / x;
        sum += term;
        if term < sum * 1e-17 {
            break;
        }
    }
    sum.min(1.0)
}

// ---------------------------------------------------------------------------
// Erlang.

/// Density of an Erlang aggregate at `z >= 0`.
pub fn erlang_pdf(z: f64, spec: &ErlangSpec) -> f64 {
    if z < 0.0 {
        return 0.0;
    }
    let x = z / spec.scale;
    if spec.shape == 1 {
        return (-x).exp() / spec.scale;
    }
    if z == 0.0 {
        return 0.0;
    }
    let n = spec.shape;
    (f64::from(n - 1) * x.ln() - x - ln_gamma_int(n)).exp() / spec.scale
}

/// Distribution function `P(N, z / scale)`.
pub fn erlang_cdf(z: f64, spec: &ErlangSpec) -> f64 {
    gamma_p_int(spec.shape, z / spec.scale)
}

/// Survival function `Q(N, z / scale)`.
pub fn erlang_sf(z: f64, spec: &ErlangSpec) -> f64 {
    gamma_q_int(spec.shape, z / spec.scale)
}

// ---------------------------------------------------------------------------
// Maximum of exponentials.

pub fn max_exp_cdf(y: f64, spec: &MaxExpSpec) -> f64 {
    if y <= 0.0 {
        return 0.0;
    }
    (-(-y / spec.mean).exp_m1()).powi(spec.count as i32)
}

/// Density of the maximum: the alternating binomial sum for
/// `M <= MAX_EXP_SUM_FORM_LIMIT`, the product form above it.
pub fn max_exp_pdf(y: f64, spec: &MaxExpSpec) -> f64 {
    if spec.count <= MAX_EXP_SUM_FORM_LIMIT {
        max_exp_pdf_sum(y, spec)
    } else {
        max_exp_pdf_product(y, spec)
    }
}

/// `M (1 - e^-y/ω)^(M-1) e^-y/ω / ω`.
pub fn max_exp_pdf_product(y: f64, spec: &MaxExpSpec) -> f64 {
    if y < 0.0 {
        return 0.0;
    }
    let m = spec.count;
    let r = y / spec.mean;
    let head = if m == 1 {
        1.0
    } else {
        (-(-r).exp_m1()).powi(m as i32 - 1)
    };
    f64::from(m) * head * (-r).exp() / spec.mean
}

/// `(M/ω) Σ_k C(M-1, k) (-1)^k e^-(k+1)y/ω`, accumulated in double-double
/// arithmetic. Plain f64 loses about six digits to cancellation at `M = 30`;
/// double-double stays below 1e-14 up to `M ≈ 60`. Returns NaN once the
/// binomial coefficients overflow `u128` (around `M = 125`).
pub fn max_exp_pdf_sum(y: f64, spec: &MaxExpSpec) -> f64 {
    if y < 0.0 {
        return 0.0;
    }
    let m = spec.count;
    let q = (-y / spec.mean).exp();
    let mut power = DoubleDouble::from(q);
    let mut binom: u128 = 1;
    let mut acc = DoubleDouble::from(0.0);
    for k in 0..m {
        let term = power.mul(DoubleDouble::from_u128(binom));
        acc = if k % 2 == 0 {
            acc.add(term)
        } else {
            acc.sub(term)
        };
        power = power.mul_f64(q);
        // C(M-1, k+1) = C(M-1, k) (M-1-k) / (k+1)
        binom = match binom.checked_mul(u128::from(m - 1 - k)) {
            Some(v) => v / u128::from(k + 1),
            None => return f64::NAN,
        };
    }
    f64::from(m) * acc.to_f64() / spec.mean
}

#[derive(Debug, Clone, Copy)]
struct DoubleDouble {
    hi: f64,
    lo: f64,
}

impl DoubleDouble {
    fn from(v: f64) -> Self {
        Self { hi: v, lo: 0.0 }
    }

    fn from_u128(v: u128) -> Self {
        let hi = v as f64;
        let rest = v as i128 - hi as i128;
        Self {
            hi,
            lo: rest as f64,
        }
    }

    fn two_sum(a: f64, b: f64) -> (f64, f64) {
        let s = a + b;
        let bb = s - a;
        (s, (a - (s - bb)) + (b - bb))
    }

    fn quick(hi: f64, lo: f64) -> Self {
        let s = hi + lo;
        Self {
            hi: s,
            lo: lo - (s - hi),
        }
    }

    fn add(self, o: Self) -> Self {
        let (s, e) = Self::two_sum(self.hi, o.hi);
        Self::quick(s, e + self.lo + o.lo)
    }

    fn sub(self, o: Self) -> Self {
        self.add(Self {
            hi: -o.hi,
            lo: -o.lo,
        })
    }

    fn mul(self, o: Self) -> Self {
        let p = self.hi * o.hi;
        let e = self.hi.mul_add(o.hi, -p);
        Self::quick(p, e + self.hi * o.lo + self.lo * o.hi)
    }

    fn mul_f64(self, b: f64) -> Self {
        let p = self.hi * b;
        let e = self.hi.mul_add(b, -p);
        Self::quick(p, e + self.lo * b)
    }

    fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

// ---------------------------------------------------------------------------
// Error function family.

/// The error function `2/√π ∫_0^x e^{-t²} dt`.
pub fn phi(x: f64) -> f64 {
    if x.is_nan() {
        return x;
    }
    if x < 0.0 {
        return -phi(-x);
    }
    if x < ERF_SERIES_LIMIT {
        erf_series(x)
    } else {
        1.0 - erfc(x)
    }
}

/// Complementary error function `1 - phi(x)`.
pub fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return x;
    }
    if x < 0.0 {
        return 2.0 - erfc(-x);
    }
    if x < ERF_SERIES_LIMIT {
        1.0 - erf_series(x)
    } else if x > 27.3 {
        // e^{-x²} underflows
        0.0
    } else {
        (-x * x).exp() * erfcx_continued_fraction(x)
    }
}

/// Scaled complementary error function `e^{x²} erfc(x)`.
pub fn erfcx(x: f64) -> f64 {
    if x.is_nan() {
        return x;
    }
    if x < 0.0 {
        return 2.0 * (x * x).exp() - erfcx(-x);
    }
    if x < ERF_SERIES_LIMIT {
        (x * x).exp() * (1.0 - erf_series(x))
    } else {
        erfcx_continued_fraction(x)
    }
}

/// `erf(x) = 2/√π · x e^{-x²} Σ (2x²)^n / (2n+1)!!`; every term is positive.
fn erf_series(x: f64) -> f64 {
    let two_x2 = 2.0 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut n = 0u32;
    while term > sum * 1e-17 {
        n += 1;
        term *= two_x2 / f64::from(2 * n + 1);
        sum += term;
    }
    FRAC_2_SQRT_PI * x * (-x * x).exp() * sum
}

/// Laplace continued fraction `1/√π · 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))`
/// evaluated with the modified Lentz algorithm. Converges quickly for `x >= 2`.
fn erfcx_continued_fraction(x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for k in 1..1000 {
        let a = f64::from(k) * 0.5;
        d = x + a * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = x + a / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    FRAC_1_SQRT_PI / f
}

// ---------------------------------------------------------------------------
// Samplers.

/// Inverse-CDF draw from an exponential with the given mean. The uniform is
/// taken on the open interval so draws are strictly positive.
pub fn sample_exponential<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> f64 {
    let u: f64 = rng.sample(Open01);
    -mean * u.ln()
}

/// Sum of `shape` exponential draws.
pub fn sample_erlang<R: Rng + ?Sized>(spec: &ErlangSpec, rng: &mut R) -> f64 {
    (0..spec.shape)
        .map(|_| sample_exponential(spec.scale, rng))
        .sum()
}

/// Maximum of `count` exponential draws.
pub fn sample_max_exp<R: Rng + ?Sized>(spec: &MaxExpSpec, rng: &mut R) -> f64 {
    (0..spec.count)
        .map(|_| sample_exponential(spec.mean, rng))
        .fold(0.0, f64::max)
}
