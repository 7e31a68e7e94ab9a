//! Standard normal density, distribution function, quantile and the
//! Gaussian isoperimetric profile `I(t) = φ(Φ⁻¹(t))`.
//!
//! The unchecked functions (`normal_*`, `iso_profile`) are the hot-path
//! versions used by the quadrature and sampling code. The `gauss_*`
//! wrappers validate their input and return [`Result`].

use crate::error::{Error, Result};
use crate::special::{erfc, ln_erfc};
use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// `1/√(2π)`.
pub const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;
/// `ln √(2π)`.
pub const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
/// Smallest probability accepted by the checked quantile.
pub const MIN_PROB: f64 = 1e-300;

/// Standard normal density.
#[inline]
pub fn normal_pdf(x: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * x * x).exp()
}

/// `ln φ(x)`.
#[inline]
pub fn ln_normal_pdf(x: f64) -> f64 {
    -0.5 * x * x - LN_SQRT_2PI
}

/// Standard normal distribution function, accurate in both tails.
#[inline]
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x * FRAC_1_SQRT_2)
}

/// `ln Φ(x)`, finite far into the lower tail.
pub fn ln_normal_cdf(x: f64) -> f64 {
    ln_erfc(-x * FRAC_1_SQRT_2) - std::f64::consts::LN_2
}

const A: [f64; 6] = [
    -3.969683028665376e+01,
    2.209460984245205e+02,
    -2.759285104469687e+02,
    1.383577518672690e+02,
    -3.066479806614716e+01,
    2.506628277459239e+00,
];
const B: [f64; 5] = [
    -5.447609879822406e+01,
    1.615858368580409e+02,
    -1.556989798598866e+02,
    6.680131188771972e+01,
    -1.328068155288572e+01,
];
const C: [f64; 6] = [
    -7.784894002430293e-03,
    -3.223964580411365e-01,
    -2.400758277161838e+00,
    -2.549732539343734e+00,
    4.374664141464968e+00,
    2.938163982698783e+00,
];
const D: [f64; 4] = [
    7.784695709041462e-03,
    3.224671290700398e-01,
    2.445134137142996e+00,
    3.754408661907416e+00,
];
const P_LOW: f64 = 0.02425;

// Rational initial guess, relative error about 1e-9.
fn acklam(p: f64) -> f64 {
    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    }
}

// Quantile for p <= 1/2.
fn lower_quantile(p: f64) -> f64 {
    if p == 0.5 {
        return 0.0;
    }
    let mut x = acklam(p);
    // Halley steps on ln Φ(x) = ln p; the log form keeps the lower tail stable.
    let lp = p.ln();
    for _ in 0..2 {
        let lc = ln_normal_cdf(x);
        // d/dx ln Φ = φ/Φ
        let h = (ln_normal_pdf(x) - lc).exp();
        let e = lc - lp;
        // second derivative of ln Φ is -h(x + h)
        let step = e / h;
        x -= step / (1.0 + 0.5 * step * (x + h));
    }
    x
}

/// Standard normal quantile `Φ⁻¹(p)`. Returns `∓∞` at 0 and 1 and NaN
/// outside `[0, 1]`.
pub fn normal_quantile(p: f64) -> f64 {
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        return f64::NAN;
    }
    if p == 0.0 {
        return f64::NEG_INFINITY;
    }
    if p == 1.0 {
        return f64::INFINITY;
    }
    if p <= 0.5 {
        lower_quantile(p)
    } else {
        -lower_quantile(1.0 - p)
    }
}

/// Gaussian isoperimetric profile `I(t) = φ(Φ⁻¹(t))`, with `I(0) = I(1) = 0`.
pub fn iso_profile(t: f64) -> f64 {
    if t <= 0.0 || t >= 1.0 {
        return 0.0;
    }
    let s = t.min(1.0 - t);
    normal_pdf(lower_quantile(s))
}

/// `I'(t) = -Φ⁻¹(t)`.
pub fn iso_profile_derivative(t: f64) -> f64 {
    -normal_quantile(t)
}

fn check_finite(x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite(x))
    }
}

fn check_prob(t: f64) -> Result<()> {
    check_finite(t)?;
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Domain(format!("probability {t} outside [0, 1]")));
    }
    Ok(())
}

/// A point of the isoperimetric profile.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ProfilePoint {
    pub t: f64,
    pub value: f64,
}

impl ProfilePoint {
    pub fn at(t: f64) -> Result<Self> {
        Ok(Self { t, value: gauss_iso_profile(t)? })
    }
}

/// Checked density.
pub fn gauss_density(x: f64) -> Result<f64> {
    check_finite(x)?;
    Ok(normal_pdf(x))
}

/// Checked distribution function.
pub fn gauss_cdf(x: f64) -> Result<f64> {
    check_finite(x)?;
    Ok(normal_cdf(x))
}

/// Checked quantile on the open interval `(0, 1)`.
pub fn gauss_quantile(t: f64) -> Result<f64> {
    check_prob(t)?;
    if t == 0.0 || t == 1.0 {
        return Err(Error::Domain(format!("quantile undefined at {t}")));
    }
    if t < MIN_PROB || 1.0 - t < MIN_PROB {
        return Err(Error::Underflow(t));
    }
    Ok(normal_quantile(t))
}

/// Checked isoperimetric profile on `[0, 1]`.
pub fn gauss_iso_profile(t: f64) -> Result<f64> {
    check_prob(t)?;
    Ok(iso_profile(t))
}

/// `I(t) / (t √(2 ln(1/t)))` for `t ∈ (0, 1/2)`, computed in log space so
/// it stays finite for tiny `t`.
pub fn iso_profile_ratio(t: f64) -> Result<f64> {
    check_finite(t)?;
    if !(t > 0.0 && t < 0.5) {
        return Err(Error::Domain(format!("ratio needs t in (0, 1/2), got {t}")));
    }
    let x = lower_quantile(t);
    let l = -t.ln();
    Ok((ln_normal_pdf(x) + l).exp() / (2.0 * l).sqrt())
}

/// `1 / (2 I(1/2)) = √(2π) / 2`, the best L1 Poincaré constant for
/// median-centred functions.
pub fn poincare_l1_constant() -> f64 {
    (2.0 * PI).sqrt() / 2.0
}
