//! Logarithmic Sobolev inequalities: the Gaussian one in dimension `n`
//! and the two one-dimensional forms on the line.

use super::report::{tolerance_from_se, InequalityReport, ReportBuilder, TOLERANCE_FLOOR};
use crate::error::{Error, Result};
use crate::gaussian::{normal_pdf, LN_SQRT_2PI};
use crate::quadrature::{gl8_with_breaks, GaussHermite};
use crate::sampler::{batch_mean_se, gaussian_map, OneDim, TestFunction, DEFAULT_PARTITIONS};
use crate::sets::McOptions;
use crate::special::ln_gamma;

/// Gauss–Hermite order for smooth factors.
const HERMITE_NODES: usize = 80;
/// Half-width of the integration window for kinked factors.
const LINE_HALF_WIDTH: f64 = 40.0;
/// Integration window of the one-dimensional Lebesgue forms.
pub const ONE_DIM_WINDOW: f64 = 12.0;
/// Largest allowed `|f(±12)| / sup |f|` for the one-dimensional forms.
pub const DECAY_RATIO: f64 = 1e-6;

/// `x² ln|x|`, zero at `x = 0`.
fn sq_log(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x * x.abs().ln()
    }
}

/// Breakpoints at each kink plus a geometric ladder toward it, so that
/// `x² ln|x|`-type singularities integrate to full precision.
fn graded_breaks(kinks: &[f64]) -> Vec<f64> {
    let mut out = Vec::new();
    for &c in kinks {
        out.push(c);
        let mut h: f64 = 0.5;
        while h > 1e-14 {
            out.push(c - h);
            out.push(c + h);
            h *= 0.25;
        }
    }
    out
}

/// `(∫g², ∫g² ln|g|, ∫g′²)` against `γ₁`.
fn factor_moments(g: OneDim, gh: &GaussHermite) -> (f64, f64, f64) {
    let smooth = match g {
        OneDim::Exp { .. } | OneDim::Const { .. } => true,
        OneDim::Bump { sigma } => sigma >= 1.0,
        OneDim::Linear { .. } | OneDim::Ramp { .. } => false,
    };
    if smooth {
        (
            gh.integrate(|x| g.eval(x).powi(2)),
            gh.integrate(|x| sq_log(g.eval(x))),
            gh.integrate(|x| g.deriv(x).powi(2)),
        )
    } else {
        let breaks = graded_breaks(&g.kinks());
        let w = LINE_HALF_WIDTH;
        let q = |h: &dyn Fn(f64) -> f64| gl8_with_breaks(-w, w, &breaks, 64, |x| h(x) * normal_pdf(x));
        (q(&|x| g.eval(x).powi(2)), q(&|x| sq_log(g.eval(x))), q(&|x| g.deriv(x).powi(2)))
    }
}

/// `(‖f‖₂², ∫f² ln|f|, ‖∇f‖₂²)` for `f(x) = h(|x|)` under `γ_n`, through
/// the `χ_n` density of `|x|`.
fn radial_moments(h: OneDim, dim: usize) -> (f64, f64, f64) {
    let n = dim as f64;
    let ln_norm = (n / 2.0 - 1.0) * std::f64::consts::LN_2 + ln_gamma(n / 2.0);
    let density = |r: f64| {
        if r <= 0.0 {
            return if dim == 1 { (-ln_norm).exp() } else { 0.0 };
        }
        ((n - 1.0) * r.ln() - r * r / 2.0 - ln_norm).exp()
    };
    let mut breaks = graded_breaks(&[0.0]);
    breaks.extend(graded_breaks(&h.kinks()));
    let upper = 12.0 + n.sqrt();
    let q = |f: &dyn Fn(f64) -> f64| gl8_with_breaks(0.0, upper, &breaks, 64, |r| f(r) * density(r));
    (q(&|r| h.eval(r).powi(2)), q(&|r| sq_log(h.eval(r))), q(&|r| h.deriv(r).powi(2)))
}

fn finite(values: &[f64]) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::Domain("integrals of f^2 ln|f| or |grad f|^2 do not converge".into()))
    }
}

/// `RHS = ‖∇f‖₂² + ‖f‖₂² ln‖f‖₂`, treating `0 ln 0` as zero.
fn gross_rhs(b: f64, d: f64) -> f64 {
    if b == 0.0 {
        d
    } else {
        d + 0.5 * b * b.ln()
    }
}

/// `∫|f|² ln|f| dγ ≤ ∫|∇f|² dγ + ‖f‖₂² ln‖f‖₂`. Product-form and radial
/// functions use quadrature; anything else is estimated by Monte Carlo.
pub fn check_gross(f: &dyn TestFunction, mc: McOptions) -> Result<InequalityReport> {
    let mut r = ReportBuilder::new("gross", &f.id(), f.dim());
    if let Some(parts) = f.factors() {
        let gh = GaussHermite::new(HERMITE_NODES);
        let m: Vec<(f64, f64, f64)> = parts.iter().map(|&g| factor_moments(g, &gh)).collect();
        let b: f64 = m.iter().map(|v| v.0).product();
        let mut a = 0.0;
        let mut d = 0.0;
        for k in 0..m.len() {
            let others: f64 = m.iter().enumerate().filter(|(j, _)| *j != k).map(|(_, v)| v.0).product();
            a += m[k].1 * others;
            d += m[k].2 * others;
        }
        finite(&[a, b, d])?;
        r.scalar("integral", a, gross_rhs(b, d), TOLERANCE_FLOOR);
        r.note("quadrature: product");
        return Ok(r.grid(HERMITE_NODES).finish());
    }
    if let Some(h) = f.radial_profile() {
        let (b, a, d) = radial_moments(h, f.dim());
        finite(&[a, b, d])?;
        r.scalar("integral", a, gross_rhs(b, d), TOLERANCE_FLOOR);
        r.note("quadrature: radial");
        return Ok(r.finish());
    }
    let terms = gaussian_map(f.dim(), mc.samples, mc.seed, |x| {
        let v = f.eval(x);
        let g = f.grad_norm(x);
        (v * v, sq_log(v), g * g)
    });
    let parts = DEFAULT_PARTITIONS.min(terms.len().max(1));
    let n = terms.len();
    let margin_of = |s: &[(f64, f64, f64)]| {
        let k = s.len() as f64;
        let (b, a, d) = s.iter().fold((0.0, 0.0, 0.0), |acc, t| (acc.0 + t.0, acc.1 + t.1, acc.2 + t.2));
        (a / k, gross_rhs(b / k, d / k))
    };
    let per_batch: Vec<f64> = (0..parts)
        .map(|p| {
            let (lhs, rhs) = margin_of(&terms[p * n / parts..(p + 1) * n / parts]);
            rhs - lhs
        })
        .collect();
    let (lhs, rhs) = margin_of(&terms);
    finite(&[lhs, rhs])?;
    let (_, se) = batch_mean_se(&per_batch);
    r.scalar("integral", lhs, rhs, tolerance_from_se(se));
    r.note("monte-carlo");
    Ok(r.samples(mc.samples, mc.seed).finish())
}

/// Closed form of both sides for `e^{a x₁}`: each equals `2a² e^{2a²}`.
pub fn gross_exponential_oracle(a: f64) -> (f64, f64) {
    let e = (2.0 * a * a).exp();
    (2.0 * a * a * e, a * a * e + e * a * a)
}

/// Scales of the one-dimensional bump family `e^{−x²/(2s²)}`.
pub const BUMP_SCALES: [f64; 5] = [0.25, 0.5, 1.0, 1.5, 2.0];

/// On the line, with `A = ∫f² ln|f|`, `B = ‖f‖₂²`, `D = ‖f′‖₂²`:
/// Lebesgue form `A ≤ D + B ln √B`; Gaussian form (against `γ₁`)
/// `A ≤ D + B ln B + ln(2πe²)/4 · B`.
pub fn check_one_dim_ls(f: &dyn TestFunction) -> Result<InequalityReport> {
    if f.dim() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, got: f.dim() });
    }
    let w = ONE_DIM_WINDOW;
    let mut breaks = graded_breaks(&f.kinks());
    breaks.extend((-24..=24).map(|k| k as f64 * 0.5));
    let sup = (0..=2400).map(|k| f.eval(&[-w + k as f64 * 0.01]).abs()).fold(0.0, f64::max);
    let edge = f.eval(&[-w]).abs().max(f.eval(&[w]).abs());
    if !(sup > 0.0) || edge > DECAY_RATIO * sup {
        return Err(Error::Domain(format!(
            "{} does not decay on [-{w}, {w}]: |f| at the ends is {edge:e}, sup {sup:e}",
            f.id()
        )));
    }
    let q = |h: &dyn Fn(f64) -> f64| gl8_with_breaks(-w, w, &breaks, 16, h);
    let a = q(&|x| sq_log(f.eval(&[x])));
    let b = q(&|x| f.eval(&[x]).powi(2));
    let d = q(&|x| f.grad_norm(&[x]).powi(2));
    let wt = |x: f64| normal_pdf(x);
    let ag = q(&|x| sq_log(f.eval(&[x])) * wt(x));
    let bg = q(&|x| f.eval(&[x]).powi(2) * wt(x));
    let dg = q(&|x| f.grad_norm(&[x]).powi(2) * wt(x));
    finite(&[a, b, d, ag, bg, dg])?;
    // ln(2π e²)/4 = (2 ln √(2π) + 2)/4
    let shift = (2.0 * LN_SQRT_2PI + 2.0) / 4.0;
    let mut r = ReportBuilder::new("one-dim-ls", &f.id(), 1);
    r.scalar("lebesgue", a, gross_rhs(b, d), TOLERANCE_FLOOR);
    r.scalar("gaussian", ag, dg + bg * bg.ln() + shift * bg, TOLERANCE_FLOOR);
    Ok(r.finish())
}

/// `e^{−x²/(2s²)}` on the line.
#[derive(Debug, Clone, Copy)]
pub struct LineBump {
    pub scale: f64,
}

impl TestFunction for LineBump {
    fn id(&self) -> String {
        format!("bump{{s={}}}", self.scale)
    }
    fn dim(&self) -> usize {
        1
    }
    fn eval(&self, x: &[f64]) -> f64 {
        OneDim::Bump { sigma: self.scale }.eval(x[0])
    }
    fn grad_norm(&self, x: &[f64]) -> f64 {
        OneDim::Bump { sigma: self.scale }.deriv(x[0]).abs()
    }
    fn factors(&self) -> Option<Vec<OneDim>> {
        Some(vec![OneDim::Bump { sigma: self.scale }])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampler::{Constant, ExpFamily, Mixture, NormFamily, RadialBump, RampFamily, TensorProduct};
    use crate::suite::Verdict;
    use std::f64::consts::PI;

    #[test]
    fn constants_are_equality_cases() {
        for c in [0.5, 1.0, 2.0, 7.0] {
            let r = check_gross(&Constant { c, dim: 3 }, McOptions::default()).unwrap();
            assert!(r.worst_margin.abs() <= 1e-10, "{c}: {}", r.worst_margin);
            assert!((r.lhs_summary - c * c * f64::ln(c)).abs() <= 1e-12);
        }
    }

    #[test]
    fn exponential_matches_closed_form() {
        for a in [0.25, 0.5, 1.0] {
            let r = check_gross(&ExpFamily { a, dim: 2 }, McOptions::default()).unwrap();
            let (l, rr) = gross_exponential_oracle(a);
            assert!((r.lhs_summary - l).abs() <= 1e-6 * l, "{a}");
            assert!((r.rhs_summary - rr).abs() <= 1e-6 * rr, "{a}");
            assert!(r.worst_margin >= -1e-8, "{a}: {}", r.worst_margin);
        }
    }

    #[test]
    fn radial_bump_strict() {
        let r = check_gross(&RadialBump { sigma: 1.0, dim: 2 }, McOptions::default()).unwrap();
        assert!(r.worst_margin > 0.01);
        // the radial route agrees with the product route
        let (b, a, d) = radial_moments(OneDim::Bump { sigma: 1.0 }, 2);
        assert!((a - r.lhs_summary).abs() < 1e-10);
        assert!((gross_rhs(b, d) - r.rhs_summary).abs() < 1e-10);
    }

    #[test]
    fn norm_radial_moments() {
        // E|x|² = n and E|∇|x||² = 1
        for n in [1usize, 2, 4, 8] {
            let (b, _, d) = radial_moments(OneDim::Linear { a: 1.0, b: 0.0 }, n);
            assert!((b - n as f64).abs() < 1e-10, "{n}: {b}");
            assert!((d - 1.0).abs() < 1e-10);
        }
        let r = check_gross(&NormFamily { dim: 4 }, McOptions::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
    }

    #[test]
    fn kinked_and_monte_carlo_paths() {
        let r = check_gross(&RampFamily { r: 0.0, delta: 0.25, dim: 2 }, McOptions::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        let r = check_gross(&TensorProduct::alternating(1.5, 0.0, 0.5, 4), McOptions::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        let m = Mixture::seeded(4, 1.0, 7, 2);
        let r = check_gross(&m, McOptions { samples: 50_000, seed: 1 }).unwrap();
        assert_ne!(r.verdict, Verdict::Violated);
        assert!(r.tolerance > TOLERANCE_FLOOR);
    }

    #[test]
    fn bump_closed_forms() {
        let s: f64 = 1.0;
        let r = check_one_dim_ls(&LineBump { scale: s }).unwrap();
        let leb = &r.points[0];
        assert!((leb.lhs + s * PI.sqrt() / 4.0).abs() < 1e-12);
        let rhs = PI.sqrt() / (2.0 * s) + s * PI.sqrt() * 0.5 * (s * PI.sqrt()).ln();
        assert!((leb.rhs - rhs).abs() < 1e-12);
        // against γ₁ with k = 1 + 2/s²
        let k = 1.0 + 2.0 / (s * s);
        let gau = &r.points[1];
        assert!((gau.lhs + k.powf(-1.5) / (2.0 * s * s)).abs() < 1e-12);
    }

    #[test]
    fn bump_scales_hold() {
        for s in BUMP_SCALES {
            let r = check_one_dim_ls(&LineBump { scale: s }).unwrap();
            assert!(r.points.iter().all(|c| c.margin() >= -1e-8), "{s}");
        }
        assert!(check_one_dim_ls(&LineBump { scale: 4.0 }).is_err());
        assert!(check_one_dim_ls(&RadialBump { sigma: 1.0, dim: 2 }).is_err());
    }
}
