use super::empirical::EmpiricalRearrangement;
use super::families::TestFunction;
use crate::error::{Error, Result};
use crate::gaussian::{normal_cdf, normal_pdf};
use crate::quantile::{neg_derivative, GridFunction, Interpolation, QuantileFunction};

/// `f°(x) = f*(Φ(x))` on the line, with `|∇f°|(x) = (−f*)′(Φ(x)) · I(Φ(x))`.
#[derive(Debug, Clone)]
pub struct Symmetrized {
    source: String,
    f_star: QuantileFunction,
    slope: GridFunction,
}

/// Builds `f°` from a piecewise-linear `f*`.
pub fn gaussian_symmetrization(f_star: &QuantileFunction, source: &str) -> Result<Symmetrized> {
    if f_star.interpolation() != Interpolation::Linear {
        return Err(Error::Unsupported(
            "symmetrization needs a piecewise-linear f*; rebuild step data first".into(),
        ));
    }
    Ok(Symmetrized {
        source: source.to_string(),
        slope: neg_derivative(f_star, 1)?,
        f_star: f_star.clone(),
    })
}

/// `f°` from an empirical rearrangement, through the block-linear rebuild.
pub fn symmetrize_empirical(e: &EmpiricalRearrangement, window: usize) -> Result<Symmetrized> {
    gaussian_symmetrization(&e.linear_f_star(window)?, &e.source)
}

impl Symmetrized {
    pub fn f_star(&self) -> &QuantileFunction {
        &self.f_star
    }

    /// `(−f*)′` as a step function on the knots of `f*`.
    pub fn slope(&self) -> &GridFunction {
        &self.slope
    }

    /// `|∇f°|` expressed in the mass coordinate `s = Φ(x)`:
    /// `(−f*)′(s) · I(s)`.
    pub fn grad_at_mass(&self, s: f64) -> f64 {
        self.slope.eval(s) * crate::gaussian::iso_profile(s)
    }
}

impl TestFunction for Symmetrized {
    fn id(&self) -> String {
        format!("sym({})", self.source)
    }
    fn dim(&self) -> usize {
        1
    }
    fn eval(&self, x: &[f64]) -> f64 {
        self.f_star.eval(normal_cdf(x[0]))
    }
    fn grad_norm(&self, x: &[f64]) -> f64 {
        // I(Φ(x)) = φ(x)
        self.slope.eval(normal_cdf(x[0])) * normal_pdf(x[0])
    }
    fn rearrangement_at(&self, s: f64) -> Option<f64> {
        Some(self.f_star.eval(s))
    }
}
