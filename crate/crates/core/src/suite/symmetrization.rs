//! Ledoux, Talenti, oscillation and Pólya–Szegő checks on empirical
//! rearrangements.

use super::report::{curve_tolerance, curve_z, tolerance_from_se, InequalityReport, ReportBuilder};
use super::stats::{log_ranks, rearranged_average, SortedSample};
use crate::error::{Error, Result};
use crate::gaussian::iso_profile;
use crate::quantile::{maximal_average, neg_derivative, QuantileFunction};
use crate::sampler::{batch_mean_se, mean_se, EmpiricalRearrangement};

/// Smallest rank used on curves that start near `t = 0`.
pub const MIN_TAIL_RANK: usize = 10;
/// Mass range of the Talenti comparison.
pub const TALENTI_RANGE: (f64, f64) = (0.02, 0.98);
/// Smallest sample size accepted by [`check_talenti`].
pub const TALENTI_MIN_SAMPLES: usize = 10_000;
/// Windows below this are flagged as noise-dominated.
pub const MIN_WINDOW: usize = 32;

/// Default block size for difference quotients of empirical `f*`.
pub fn default_window(n: usize) -> usize {
    (n / 200).max(MIN_WINDOW).min(n)
}

/// The weight `t / I(t)` of the oscillation inequality. It does not depend
/// on the dimension, and every dimension uses this one function.
pub fn oscillation_weight(t: f64) -> f64 {
    t / iso_profile(t)
}

fn sorted_abs_desc(values: &[f64]) -> Vec<f64> {
    let mut v: Vec<f64> = values.iter().map(|x| x.abs()).collect();
    v.sort_unstable_by(|a, b| b.total_cmp(a));
    v
}

/// `Σ_{i<N} I(i/N)(v₍ᵢ₎ − v₍ᵢ₊₁₎)`, the Stieltjes sum for `∫ I(λ_f(s)) ds`.
pub fn ledoux_sum(sorted_desc: &[f64]) -> f64 {
    let n = sorted_desc.len() as f64;
    sorted_desc
        .windows(2)
        .enumerate()
        .map(|(i, w)| iso_profile((i + 1) as f64 / n) * (w[0] - w[1]))
        .sum()
}

fn builder(id: &str, e: &EmpiricalRearrangement, grid: usize) -> ReportBuilder {
    ReportBuilder::new(id, &e.source, e.dim).samples(e.n_samples, e.seed).grid(grid)
}

/// `∫₀^∞ I(λ_f(s)) ds ≤ ∫|∇f| dγ`.
pub fn check_ledoux(e: &EmpiricalRearrangement) -> InequalityReport {
    let lhs = ledoux_sum(e.f_star.values());
    let rhs = *e.cumulative.last().unwrap();
    let per_batch: Vec<f64> = e.batches().map(|(v, _)| ledoux_sum(&sorted_abs_desc(v))).collect();
    let (_, se_l) = batch_mean_se(&per_batch);
    let (_, se_r) = mean_se(&e.grads);
    let mut b = builder("ledoux", e, 1);
    b.scalar("integral", lhs, rhs, tolerance_from_se(se_l.max(se_r)));
    b.finish()
}

/// Blockwise `(−f*)′(s) I(s) ≤ d/ds ∫_{|f|>f*(s)} |∇f|` on `s ∈ [0.02, 0.98]`.
/// On a block `[a, b]` the left side uses `min(I(a), I(b))`.
pub fn check_talenti(e: &EmpiricalRearrangement, window: usize) -> Result<InequalityReport> {
    let n = e.n_samples;
    if n < TALENTI_MIN_SAMPLES {
        return Err(Error::TooFewSamples { got: n, min: TALENTI_MIN_SAMPLES });
    }
    let slope = neg_derivative(&e.f_star, window)?;
    let knots = slope.knots();
    let nf = n as f64;
    let mut rows = Vec::new();
    let mut excluded = 0.0;
    for k in 0..slope.cells() {
        let (a, b) = (knots[k], knots[k + 1]);
        if a < TALENTI_RANGE.0 - 1e-12 || b > TALENTI_RANGE.1 + 1e-12 {
            excluded += b - a;
            continue;
        }
        let (ia, ib) = ((a * nf).round() as usize, (b * nf).round() as usize);
        let w = (ib - ia) as f64;
        let lhs = slope.values()[k] * iso_profile(a).min(iso_profile(b));
        let block: Vec<f64> = e.order[ia..ib].iter().map(|&j| e.grads[j]).collect();
        let (rhs, se_r) = mean_se(&block);
        let se_l = lhs / w.sqrt();
        rows.push((0.5 * (a + b), lhs, rhs, se_l.max(se_r)));
    }
    let mut r = builder("talenti", e, rows.len());
    let count = rows.len();
    for (t, lhs, rhs, se) in rows {
        r.point(t, lhs, rhs, curve_tolerance(se, count));
    }
    r.note(format!("window={window}; excluded mass {excluded:.4}"));
    if window < MIN_WINDOW {
        r.note(format!("window {window} below {MIN_WINDOW}: order-statistic noise dominates"));
    }
    Ok(r.finish())
}

/// `f**(t) − f*(t) ≤ (t/I(t)) |∇f|**(t)` at log-spaced `t = k/N`.
pub fn check_oscillation(e: &EmpiricalRearrangement, points: usize) -> InequalityReport {
    let n = e.n_samples;
    let f = SortedSample::new(e.f_star.values().to_vec());
    let g = SortedSample::new(e.grad_star.values().to_vec());
    let ranks = log_ranks(MIN_TAIL_RANK.min(n - 1), n - 1, points);
    let mut r = builder("oscillation", e, ranks.len());
    for &k in &ranks {
        let t = k as f64 / n as f64;
        let lhs = f.tail_mean(k) - f.at(k + 1);
        let se_l = f.tail_mean_se(k).hypot(f.quantile_se(k + 1));
        let w = oscillation_weight(t);
        let rhs = w * g.tail_mean(k);
        let se_r = w * g.tail_mean_se(k);
        r.point(t, lhs, rhs, curve_tolerance(se_l.max(se_r), ranks.len()));
    }
    r.finish()
}

/// Oscillation inequality between quadrature-exact rearrangements, at the
/// knots of `f_star` inside `[t_lo, t_hi]`.
pub fn check_oscillation_exact(
    function_id: &str,
    dim: usize,
    f_star: &QuantileFunction,
    grad_star: &QuantileFunction,
    t_lo: f64,
    t_hi: f64,
) -> InequalityReport {
    let ff = maximal_average(f_star);
    let gg = maximal_average(grad_star);
    let mut r = ReportBuilder::new("oscillation", function_id, dim).grid(f_star.knots().len());
    for &t in f_star.knots() {
        if t >= t_lo && t <= t_hi {
            let lhs = ff.eval(t) - f_star.eval(t);
            let rhs = oscillation_weight(t) * gg.eval(t);
            r.point(t, lhs, rhs, super::report::TOLERANCE_FLOOR);
        }
    }
    r.finish()
}

struct Blocks {
    /// Block masses.
    mass: Vec<f64>,
    /// `(−f*)′ I` per block, lower-bound form.
    value: Vec<f64>,
    /// Same, shifted down by `z σ` and clipped at zero.
    lower: Vec<f64>,
}

fn symmetrized_gradient_blocks(e: &EmpiricalRearrangement, window: usize, z: f64) -> Result<Blocks> {
    let slope = neg_derivative(&e.f_star, window)?;
    let knots = slope.knots();
    let nf = e.n_samples as f64;
    let mut out = Blocks { mass: Vec::new(), value: Vec::new(), lower: Vec::new() };
    for k in 0..slope.cells() {
        let (a, b) = (knots[k], knots[k + 1]);
        let w = ((b - a) * nf).round().max(1.0);
        let c = slope.values()[k] * iso_profile(a).min(iso_profile(b));
        out.mass.push(b - a);
        out.value.push(c);
        out.lower.push((c * (1.0 - z / w.sqrt())).max(0.0));
    }
    Ok(out)
}

fn lp(mass: &[f64], value: &[f64], p: f64) -> f64 {
    mass.iter().zip(value).map(|(m, v)| m * v.powf(p)).sum::<f64>().powf(1.0 / p)
}

/// `|∇f°|**(t) ≤ |∇f|**(t)` on log-spaced `t`, plus
/// `‖(−f*)′ I‖_X ≤ ‖∇f‖_X` for `X ∈ {L¹, L², L^∞}`. `|∇f°|` comes from
/// block slopes of `f*`; block noise inflates the rearranged curve, so each
/// tolerance adds the gap to a curve built from blocks lowered by `z σ`.
pub fn check_polya_szego(e: &EmpiricalRearrangement, window: usize, points: usize) -> Result<InequalityReport> {
    let n = e.n_samples;
    let g = SortedSample::new(e.grad_star.values().to_vec());
    let ranks = log_ranks(MIN_TAIL_RANK.min(n - 1), n, points);
    let blocks_count = n.div_ceil(window.max(1));
    let z = curve_z(ranks.len().max(blocks_count));
    let bl = symmetrized_gradient_blocks(e, window, z)?;
    let ts: Vec<f64> = ranks.iter().map(|&k| k as f64 / n as f64).collect();
    let lhs = rearranged_average(&bl.mass, &bl.value, &ts);
    let lower = rearranged_average(&bl.mass, &bl.lower, &ts);
    let k_total = ranks.len() + 3;
    let zr = curve_z(k_total);
    let mut r = builder("polya-szego", e, ranks.len());
    for (i, &k) in ranks.iter().enumerate() {
        let tol = (lhs[i] - lower[i]) + zr * g.tail_mean_se(k);
        r.point(ts[i], lhs[i], g.tail_mean(k), tol.max(super::report::TOLERANCE_FLOOR));
    }

    let (m1, se1) = mean_se(&e.grads);
    let l1 = lp(&bl.mass, &bl.value, 1.0);
    let l1_low = lp(&bl.mass, &bl.lower, 1.0);
    r.scalar("L1", l1, m1, ((l1 - l1_low) + zr * se1).max(super::report::TOLERANCE_FLOOR));

    let sq: Vec<f64> = e.grads.iter().map(|v| v * v).collect();
    let (m2, se2) = mean_se(&sq);
    let rhs2 = m2.sqrt();
    let se_rhs2 = if rhs2 > 0.0 { se2 / (2.0 * rhs2) } else { 0.0 };
    let l2 = lp(&bl.mass, &bl.value, 2.0);
    let l2_low = lp(&bl.mass, &bl.lower, 2.0);
    r.scalar("L2", l2, rhs2, ((l2 - l2_low) + zr * se_rhs2).max(super::report::TOLERANCE_FLOOR));

    let linf = bl.value.iter().cloned().fold(0.0, f64::max);
    let linf_low = bl.lower.iter().cloned().fold(0.0, f64::max);
    let sup = e.grad_star.values()[0];
    r.scalar("Linf", linf, sup, (linf - linf_low).max(super::report::TOLERANCE_FLOOR));
    r.note(format!("window={window}"));
    Ok(r.finish())
}
