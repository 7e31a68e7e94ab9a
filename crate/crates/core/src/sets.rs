//! Half-spaces, centered balls and slabs: Gaussian measure, Gaussian
//! perimeter and the isoperimetric margin `Per(A) − I(γ(A))`.

use crate::error::{Error, Result};
use crate::gaussian::{iso_profile, normal_cdf, normal_pdf, normal_quantile, LN_SQRT_2PI};
use crate::sampler::gaussian_map;
use crate::special::{gamma_p, unit_ball_volume};
use serde::Serialize;

/// Default Monte Carlo size for ball measures in dimension 3 and up.
pub const DEFAULT_MC_SAMPLES: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Shape {
    /// `{x₁ < r}`.
    HalfSpace { r: f64 },
    /// `{|x| < R}`.
    CenteredBall { radius: f64 },
    /// `{a < x₁ < b}`.
    Slab { a: f64, b: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaussianSet {
    pub shape: Shape,
    pub dim: usize,
}

/// A measure estimate with its standard error (zero when exact).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Self { value, std_error: 0.0 }
    }
}

/// Monte Carlo settings for measures without a closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McOptions {
    pub samples: usize,
    pub seed: u64,
}

impl Default for McOptions {
    fn default() -> Self {
        Self { samples: DEFAULT_MC_SAMPLES, seed: 0 }
    }
}

impl GaussianSet {
    pub fn half_space(r: f64, dim: usize) -> Result<Self> {
        Self::new(Shape::HalfSpace { r }, dim)
    }

    pub fn ball(radius: f64, dim: usize) -> Result<Self> {
        Self::new(Shape::CenteredBall { radius }, dim)
    }

    pub fn slab(a: f64, b: f64, dim: usize) -> Result<Self> {
        Self::new(Shape::Slab { a, b }, dim)
    }

    pub fn new(shape: Shape, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Domain("dimension must be at least 1".into()));
        }
        let ok = match shape {
            Shape::HalfSpace { r } => !r.is_nan(),
            Shape::CenteredBall { radius } => radius >= 0.0 && radius.is_finite(),
            Shape::Slab { a, b } => !a.is_nan() && !b.is_nan() && a <= b,
        };
        if !ok {
            return Err(Error::Domain(format!("invalid shape {shape:?}")));
        }
        Ok(Self { shape, dim })
    }

    /// True for `R = 0` and `a = b`, whose measure is zero.
    pub fn is_degenerate(&self) -> bool {
        match self.shape {
            Shape::HalfSpace { .. } => false,
            Shape::CenteredBall { radius } => radius == 0.0,
            Shape::Slab { a, b } => a == b,
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        match self.shape {
            Shape::HalfSpace { r } => x[0] < r,
            Shape::CenteredBall { radius } => x.iter().map(|v| v * v).sum::<f64>() < radius * radius,
            Shape::Slab { a, b } => a < x[0] && x[0] < b,
        }
    }

    /// Gaussian measure. Balls in dimension 3 and up are estimated by Monte
    /// Carlo with [`McOptions::default`].
    pub fn measure(&self) -> Result<Estimate> {
        self.measure_with(McOptions::default())
    }

    pub fn measure_with(&self, mc: McOptions) -> Result<Estimate> {
        if self.is_degenerate() {
            return Err(Error::Domain(format!("{:?} has Gaussian measure zero", self.shape)));
        }
        Ok(match self.shape {
            Shape::HalfSpace { r } => Estimate::exact(normal_cdf(r)),
            Shape::Slab { a, b } => Estimate::exact(normal_cdf(b) - normal_cdf(a)),
            Shape::CenteredBall { radius } => match self.dim {
                1 => Estimate::exact(2.0 * normal_cdf(radius) - 1.0),
                2 => Estimate::exact(-(-radius * radius / 2.0).exp_m1()),
                _ => {
                    if mc.samples < 2 {
                        return Err(Error::TooFewSamples { got: mc.samples, min: 2 });
                    }
                    let hits = gaussian_map(self.dim, mc.samples, mc.seed, |x| self.contains(x));
                    let n = mc.samples as f64;
                    let p = hits.iter().filter(|&&h| h).count() as f64 / n;
                    Estimate { value: p, std_error: (p * (1.0 - p) / n).sqrt() }
                }
            },
        })
    }

    /// Closed-form measure in every dimension, through the regularized
    /// incomplete gamma function. Used to cross-check the Monte Carlo path.
    pub fn exact_measure(&self) -> f64 {
        match self.shape {
            Shape::CenteredBall { radius } => gamma_p(self.dim as f64 / 2.0, radius * radius / 2.0),
            _ => self.measure_with(McOptions { samples: 2, seed: 0 }).map_or(0.0, |e| e.value),
        }
    }

    /// Gaussian perimeter `∫_{∂A} φ_n dH_{n−1}`.
    pub fn perimeter(&self) -> f64 {
        match self.shape {
            Shape::HalfSpace { r } => normal_pdf(r),
            Shape::Slab { a, b } => {
                if a == b {
                    0.0
                } else {
                    normal_pdf(a) + normal_pdf(b)
                }
            }
            Shape::CenteredBall { radius } => {
                if radius == 0.0 {
                    return 0.0;
                }
                let n = self.dim as f64;
                // n ϖ_n R^{n−1} (2π)^{−n/2} e^{−R²/2}, assembled in logs
                let log = (n * unit_ball_volume(self.dim)).ln() + (n - 1.0) * radius.ln()
                    - n * LN_SQRT_2PI
                    - radius * radius / 2.0;
                log.exp()
            }
        }
    }

    /// `Per(A) − I(γ(A))` with its Monte Carlo standard error.
    pub fn iso_margin(&self) -> Result<Margin> {
        self.iso_margin_with(McOptions::default())
    }

    pub fn iso_margin_with(&self, mc: McOptions) -> Result<Margin> {
        let m = self.measure_with(mc)?;
        if !(m.value > 0.0 && m.value < 1.0) {
            return Err(Error::Domain(format!("measure {} outside (0,1)", m.value)));
        }
        let per = self.perimeter();
        // δI ≈ |I′(m)| δm = |Φ⁻¹(m)| δm
        let se = normal_quantile(m.value).abs() * m.std_error;
        Ok(Margin { measure: m, perimeter: per, profile: iso_profile(m.value), value: per - iso_profile(m.value), std_error: se })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Margin {
    pub measure: Estimate,
    pub perimeter: f64,
    pub profile: f64,
    pub value: f64,
    pub std_error: f64,
}

/// Balls and slabs used by the default suite.
pub fn catalog_sets() -> Vec<GaussianSet> {
    let mut out = Vec::new();
    for &dim in &[2usize, 3, 4, 8] {
        for &radius in &[1.0, 1.5, 2.5] {
            out.push(GaussianSet::ball(radius, dim).expect("valid"));
        }
    }
    for &(a, b) in &[(-1.0, 1.0), (-3.0, 3.0), (-0.5, 2.0)] {
        out.push(GaussianSet::slab(a, b, 1).expect("valid"));
    }
    out
}
