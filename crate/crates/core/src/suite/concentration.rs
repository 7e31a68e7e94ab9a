//! Square-exponential concentration of Lipschitz functions.

use super::report::{curve_tolerance, tolerance_from_se, InequalityReport, ReportBuilder};
use super::stats::{log_ranks, SortedSample};
use crate::error::{Error, Result};
use crate::quantile::{norm_restricted, NormTag, QuantileFunction};
use crate::sampler::{batch_mean_se, EmpiricalRearrangement};

/// `λ ‖∇f‖²_∞` used for the exponential integral.
pub const EXPONENT_SCALE: f64 = 0.2;
/// Smallest `t` of the pointwise bound.
pub const POINTWISE_T_MIN: f64 = 1e-4;

fn abs_sorted(values: &[f64]) -> Vec<f64> {
    let mut v: Vec<f64> = values.iter().map(|x| x.abs()).collect();
    v.sort_unstable_by(|a, b| b.total_cmp(a));
    v
}

/// `(∫₀^{1/2}, ∫₀¹)` of `e^{λ(f**(t) − f**(1/2))²}` over the sample ranks.
fn exp_integrals(sorted_desc: &[f64], lambda: f64) -> (f64, f64) {
    let n = sorted_desc.len();
    let half = (n / 2).max(1);
    let mut prefix = 0.0;
    let mut avg = Vec::with_capacity(n);
    for (i, v) in sorted_desc.iter().enumerate() {
        prefix += v;
        avg.push(prefix / (i + 1) as f64);
    }
    let mid = avg[half - 1];
    let (mut low, mut all) = (0.0, 0.0);
    for (i, a) in avg.iter().enumerate() {
        let term = (lambda * (a - mid).powi(2)).exp();
        all += term;
        if i < half {
            low += term;
        }
    }
    (low / n as f64, all / n as f64)
}

/// Three consequences of a Lipschitz bound `L`:
/// (a) `f**(t) − f**(1/2) ≤ 2L (ln 1/t)^{1/2}` on `[10⁻⁴, 1/2]`;
/// (b) `∫₀^{1/2} e^{λ(f**(t) − f**(1/2))²} dt ≤ (1/2)^{1−4λL²} / (1 − 4λL²)`
///     at `λL² = 0.2`, with the integral over `(0, 1]` recorded;
/// (c) `sup_t (f** − f*)(t)(ln 1/t)^{1/2} ≤ L`.
pub fn check_concentration(e: &EmpiricalRearrangement, lipschitz: Option<f64>, points: usize) -> Result<InequalityReport> {
    let l = lipschitz.ok_or_else(|| Error::Unsupported(format!("{} has no Lipschitz bound", e.source)))?;
    let n = e.n_samples;
    let nf = n as f64;
    let s = SortedSample::new(e.f_star.values().to_vec());
    let half = n / 2;
    let k_min = ((POINTWISE_T_MIN * nf).ceil() as usize).max(super::symmetrization::MIN_TAIL_RANK).min(half);
    let ranks = log_ranks(k_min, half, points);
    let mut r = ReportBuilder::new("concentration", &e.source, e.dim)
        .samples(n, e.seed)
        .grid(ranks.len());
    let mid = s.tail_mean(half);
    let mid_se = s.tail_mean_se(half);
    for &k in &ranks {
        let t = k as f64 / nf;
        let lhs = s.tail_mean(k) - mid;
        let rhs = 2.0 * l * (1.0 / t).ln().sqrt();
        r.labelled_point("pointwise", t, lhs, rhs, curve_tolerance(s.tail_mean_se(k).hypot(mid_se), ranks.len()));
    }

    let lambda = if l > 0.0 { EXPONENT_SCALE / (l * l) } else { EXPONENT_SCALE };
    let c = 4.0 * lambda * l * l;
    let bound = 0.5f64.powf(1.0 - c) / (1.0 - c);
    let (low, all) = exp_integrals(e.f_star.values(), lambda);
    let per_batch: Vec<(f64, f64)> = e.batches().map(|(v, _)| exp_integrals(&abs_sorted(v), lambda)).collect();
    let (_, se_low) = batch_mean_se(&per_batch.iter().map(|p| p.0).collect::<Vec<_>>());
    let (_, se_all) = batch_mean_se(&per_batch.iter().map(|p| p.1).collect::<Vec<_>>());
    r.scalar("exp-integral", low, bound, tolerance_from_se(se_low));
    r.record("exp_integral", all);
    r.record("exp_integral_se", se_all);
    r.record("lambda", lambda);

    let floor = |m: usize| (64.0 / m as f64).min(0.5);
    let ll = norm_restricted(&e.f_star, NormTag::LlogHalfInfInf, floor(n))?;
    let per_batch = e
        .batches()
        .map(|(v, _)| {
            QuantileFunction::from_sorted_desc(abs_sorted(v))
                .and_then(|q| norm_restricted(&q, NormTag::LlogHalfInfInf, floor(v.len())))
        })
        .collect::<Result<Vec<f64>>>()?;
    let (_, se) = batch_mean_se(&per_batch);
    r.scalar("LlogHalf", ll, l, tolerance_from_se(se));
    r.note(format!("L={l}"));
    Ok(r.finish())
}
