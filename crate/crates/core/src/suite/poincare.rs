//! Poincaré-type checks and the ratio reports for embeddings whose
//! constants are not explicit.

use super::report::{curve_tolerance, tolerance_from_se, InequalityReport, ReportBuilder};
use super::stats::{log_ranks, SortedSample};
use crate::error::{Error, Result};
use crate::gaussian::{iso_profile, normal_quantile, poincare_l1_constant};
use crate::quadrature::gl8;
use crate::quantile::{norm, norm_restricted, GridFunction, Interpolation, NormTag, QuantileFunction};
use crate::sampler::{batch_mean_se, mean_se, EmpiricalRearrangement, TestFunction};

/// Weighted norms of empirical `f*` are read on `[EMPIRICAL_RANK_FLOOR/N, 1]`.
pub const EMPIRICAL_RANK_FLOOR: f64 = 64.0;

fn builder(id: &str, e: &EmpiricalRearrangement) -> ReportBuilder {
    ReportBuilder::new(id, &e.source, e.dim).samples(e.n_samples, e.seed).grid(1)
}

fn batch_f_star(values: &[f64]) -> Result<QuantileFunction> {
    let mut v: Vec<f64> = values.iter().map(|x| x.abs()).collect();
    v.sort_unstable_by(|a, b| b.total_cmp(a));
    QuantileFunction::from_sorted_desc(v)
}

/// `∫|f − m| dγ ≤ (√(2π)/2) ∫|∇f| dγ` with `m = f*(1/2)` of the signed values.
pub fn check_poincare_l1(e: &EmpiricalRearrangement) -> InequalityReport {
    let sorted = e.signed_sorted_desc();
    let m = sorted[(e.n_samples / 2).max(1) - 1];
    let dev: Vec<f64> = e.values.iter().map(|v| (v - m).abs()).collect();
    let (lhs, se_l) = mean_se(&dev);
    let c = poincare_l1_constant();
    let (g, se_g) = mean_se(&e.grads);
    let mut r = builder("poincare-l1", e);
    r.scalar("integral", lhs, c * g, tolerance_from_se(se_l.max(c * se_g)));
    r.note(format!("median {m}"));
    r.finish()
}

/// `u*(t) = ∫_t^1 g(s) ds / I(s)` on the knots of `g`. Step cells are exact
/// (`∫_a^b ds/I = Φ⁻¹(b) − Φ⁻¹(a)`); linear cells add a Gauss–Legendre
/// term. The value at `t = 0` repeats the one at `t₁`.
pub fn dual_potential(g: &QuantileFunction) -> Result<QuantileFunction> {
    let m = g.cells();
    let knots = g.knots();
    let mut tail = vec![0.0; m + 1];
    for i in (1..=m).rev() {
        let (a, b) = (knots[i - 1], knots[i]);
        let cell = match g.interpolation() {
            Interpolation::Step => {
                let v = g.values()[i - 1];
                if v == 0.0 {
                    0.0
                } else {
                    v * (normal_quantile(b) - normal_quantile(a))
                }
            }
            Interpolation::Linear => {
                let (va, vb) = (g.values()[i - 1], g.values()[i]);
                if va == 0.0 && vb == 0.0 {
                    0.0
                } else {
                    let beta = (vb - va) / (b - a);
                    let alpha = va - beta * a;
                    let base = normal_quantile(b) - normal_quantile(a);
                    let lin = gl8(a, b, |s| s / iso_profile(s));
                    alpha * base + beta * lin
                }
            }
        };
        tail[i - 1] = if i == 1 { tail[1] } else { tail[i] + cell };
    }
    if tail.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("dual potential diverges; g must vanish near s = 1".into()));
    }
    QuantileFunction::new_clamped(GridFunction::linear(knots.to_vec(), tail)?)
}

/// Dual construction: `‖u*‖_{L^p(log)^{p/2}} / ‖g‖_{L^p}` for `g` supported
/// in `(0, 1/2]`. Judged against `cap` when one is given.
pub fn check_poincare_dual(id: &str, g: &QuantileFunction, p: f64, cap: Option<f64>) -> Result<InequalityReport> {
    let total = g.integral();
    let c = g.cell_of(0.5);
    let before = g.cumulative()[c - 1] + g.cell_partial_integral(c, 0.5);
    if total - before > 1e-14 * total.max(1.0) {
        return Err(Error::Domain(format!("g has mass {:e} beyond s = 1/2", total - before)));
    }
    let u = dual_potential(g)?;
    let lhs = norm(&u, NormTag::LpLogHalf(p))?;
    let rhs = norm(g, NormTag::Lp(p))?;
    let mut r = ReportBuilder::new("poincare-dual", id, 1).grid(g.knots().len());
    r.note(format!("p={p}"));
    if rhs == 0.0 {
        r.scalar("norms", lhs, rhs, super::report::TOLERANCE_FLOOR);
        return Ok(r.finish());
    }
    r.scalar("norms", lhs, rhs, super::report::TOLERANCE_FLOOR);
    Ok(r.finish_ratio(lhs / rhs, 0.0, cap))
}

fn feissner_parts(values: &[f64], grads: &[f64], p: f64) -> Result<(f64, f64)> {
    let f = batch_f_star(values)?;
    let lhs = norm(&f, NormTag::LpLogHalf(p))?.powf(p);
    let n = values.len() as f64;
    let rhs = grads.iter().map(|g| g.powf(p)).sum::<f64>() / n + values.iter().map(|v| v.abs().powf(p)).sum::<f64>() / n;
    Ok((lhs, rhs))
}

/// `∫₀¹ f*(s)^p (ln 1/s)^{p/2} ds` over `∫|∇f|^p + ∫|f|^p`, as a ratio.
pub fn check_feissner(e: &EmpiricalRearrangement, p: f64, cap: Option<f64>) -> Result<InequalityReport> {
    if !(p >= 1.0) {
        return Err(Error::Unsupported(format!("p = {p} below 1")));
    }
    let (lhs, rhs) = feissner_parts(&e.values, &e.grads, p)?;
    let per_batch = e
        .batches()
        .map(|(v, g)| feissner_parts(v, g, p).map(|(l, r)| l / r))
        .collect::<Result<Vec<f64>>>()?;
    let (_, se) = batch_mean_se(&per_batch);
    let mut r = builder("feissner", e);
    r.note(format!("p={p}"));
    r.scalar("integrals", lhs, rhs, tolerance_from_se(se * rhs));
    Ok(r.finish_ratio(lhs / rhs, se, cap))
}

/// LS norms of `f*` against the matching norm of `|∇f|`. `LS_Linf` is
/// asserted with constant one against the Lipschitz bound (or the sampled
/// maximum of `|∇f|` when no bound is known); `LS_Lp` is a ratio report.
pub fn check_ls_norms(
    e: &EmpiricalRearrangement,
    f: Option<&dyn TestFunction>,
    tag: NormTag,
    cap: Option<f64>,
    points: usize,
) -> Result<InequalityReport> {
    let n = e.n_samples as f64;
    let floor = |m: usize| (EMPIRICAL_RANK_FLOOR / m as f64).min(0.5);
    let lhs = norm_restricted(&e.f_star, tag, floor(e.n_samples))?;
    let id = format!("ls-norm-{tag}");
    let mut r = builder(&id, e);
    r.note(format!("t >= {:e}", floor(e.n_samples)));
    match tag {
        NormTag::LsLinf => {
            let (rhs, src) = match f.and_then(|f| f.lipschitz_bound()) {
                Some(l) => (l, "lipschitz bound"),
                None => (e.grad_star.values()[0], "sampled max"),
            };
            r.note(format!("rhs: {src}"));
            r.record("norm", lhs);
            // the sup sits at the extreme ranks, so judge each rank with its
            // own order-statistic error instead of the sup of a noisy curve
            let fs = SortedSample::new(e.f_star.values().to_vec());
            let m = e.n_samples;
            let k_min = (EMPIRICAL_RANK_FLOOR as usize).min(m - 1);
            let ranks = log_ranks(k_min, m - 1, points);
            for &k in &ranks {
                let t = k as f64 / n;
                let w = iso_profile(t) / t;
                let osc = fs.tail_mean(k) - fs.at(k + 1);
                let se = w * fs.tail_mean_se(k).hypot(fs.quantile_se(k + 1));
                r.point(t, w * osc, rhs, curve_tolerance(se, ranks.len()));
            }
            Ok(r.grid(ranks.len()).finish())
        }
        NormTag::LsLp(p) => {
            let per_batch = e
                .batches()
                .map(|(v, _)| batch_f_star(v).and_then(|q| norm_restricted(&q, tag, floor(v.len()))))
                .collect::<Result<Vec<f64>>>()?;
            let (_, se) = batch_mean_se(&per_batch);
            let rhs = (e.grads.iter().map(|g| g.powf(p)).sum::<f64>() / n).powf(1.0 / p);
            r.scalar("norm", lhs, rhs, tolerance_from_se(se));
            if rhs == 0.0 {
                return Ok(r.finish());
            }
            Ok(r.finish_ratio(lhs / rhs, se / rhs, cap))
        }
        other => Err(Error::Unsupported(format!("{other} is not an LS norm"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantile::{log_uniform_grid, uniform_grid};
    use crate::sampler::{sample_rearrangement, Constant, LinearFamily, NormFamily, RampFamily};
    use crate::special::gamma;
    use crate::suite::Verdict;

    #[test]
    fn poincare_constant_and_linear() {
        let e = sample_rearrangement(&Constant { c: 2.0, dim: 2 }, 5000, 1).unwrap();
        let r = check_poincare_l1(&e);
        assert_eq!((r.lhs_summary, r.rhs_summary), (0.0, 0.0));
        assert_eq!(r.verdict, Verdict::Holds);
        let e = sample_rearrangement(&LinearFamily { a: 1.0, b: 0.0, dim: 1 }, 400_000, 2).unwrap();
        let r = check_poincare_l1(&e);
        assert!((r.lhs_summary - 0.797_884_560_802_865_4).abs() < 4e-3);
        assert!((r.worst_margin - 0.455_429_576_512_634_9).abs() < r.tolerance);
    }

    #[test]
    fn dual_potential_of_indicator() {
        let knots = log_uniform_grid(2048, 1e-8).unwrap();
        let g = QuantileFunction::indicator(0.25, &knots).unwrap();
        let u = dual_potential(&g).unwrap();
        assert!((u.eval(0.1) - 0.607_061_815_348_518_7).abs() < 1e-4);
        let r = check_poincare_dual("chi", &g, 2.0, None).unwrap();
        assert_eq!(r.verdict, Verdict::Recorded);
        assert!(r.ratio.unwrap().is_finite() && r.ratio.unwrap() > 0.0);
    }

    #[test]
    fn dual_rejects_wide_support_and_handles_zero() {
        let knots = uniform_grid(100).unwrap();
        let g = QuantileFunction::indicator(0.75, &knots).unwrap();
        assert!(check_poincare_dual("x", &g, 2.0, None).is_err());
        let z = QuantileFunction::constant(0.0, knots).unwrap();
        let r = check_poincare_dual("zero", &z, 1.0, None).unwrap();
        assert_eq!((r.lhs_summary, r.rhs_summary), (0.0, 0.0));
        assert_ne!(r.verdict, Verdict::Violated);
    }

    #[test]
    fn dual_power_singularity_finite() {
        let mut knots: Vec<f64> = log_uniform_grid(4096, 2e-10).unwrap().iter().map(|t| t / 2.0).collect();
        knots.push(1.0);
        let mut values: Vec<f64> = knots[1..knots.len() - 1].iter().map(|t| t.powf(-0.25)).collect();
        values.push(0.0);
        let g = QuantileFunction::step(knots, values).unwrap();
        let r = check_poincare_dual("pow", &g, 2.0, None).unwrap();
        assert!(r.ratio.unwrap().is_finite());
    }

    #[test]
    fn feissner_constant_is_gamma() {
        let e = sample_rearrangement(&Constant { c: 1.5, dim: 1 }, 4000, 3).unwrap();
        for p in [1.0, 2.0, 4.0] {
            let r = check_feissner(&e, p, None).unwrap();
            assert!((r.ratio.unwrap() - gamma(p / 2.0 + 1.0)).abs() < 1e-9, "{p}");
        }
    }

    #[test]
    fn ls_norms() {
        let e = sample_rearrangement(&Constant { c: 1.0, dim: 2 }, 5000, 1).unwrap();
        let r = check_ls_norms(&e, None, NormTag::LsLinf, None, 128).unwrap();
        assert_eq!(r.lhs_summary, 0.0);
        let f = NormFamily { dim: 2 };
        let e = sample_rearrangement(&f, 100_000, 4).unwrap();
        let r = check_ls_norms(&e, Some(&f), NormTag::LsLinf, None, 128).unwrap();
        assert_ne!(r.verdict, Verdict::Violated, "{:?}", r);
        let g = RampFamily { r: 0.0, delta: 0.25, dim: 2 };
        let e = sample_rearrangement(&g, 100_000, 4).unwrap();
        let r = check_ls_norms(&e, Some(&g), NormTag::LsLp(2.0), None, 128).unwrap();
        assert_eq!(r.verdict, Verdict::Recorded);
        assert!(check_ls_norms(&e, None, NormTag::Lp(2.0), None, 128).is_err());
    }
}
