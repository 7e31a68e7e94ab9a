use super::concentration::check_concentration;
use super::entropy::{
    calibrate_entropy_constant, check_entropy_display, check_entropy_lower_bound_quantile, check_truncation_friendly,
};
use super::poincare::{check_feissner, check_ls_norms, check_poincare_dual, check_poincare_l1};
use super::report::{InequalityReport, ReportBuilder};
use super::sobolev::{check_gross, check_one_dim_ls};
use super::symmetrization::{check_ledoux, check_oscillation, check_polya_szego, check_talenti, default_window};
use crate::error::{Error, Result};
use crate::quantile::{log_uniform_grid, GridFunction, Interpolation, NormTag, QuantileFunction, DEFAULT_GRID_MIN, DEFAULT_GRID_POINTS};
use crate::sampler::{analytic_quantile, family_catalog, BoxedFunction, EmpiricalRearrangement};
use crate::sets::McOptions;
use serde::Serialize;
use std::collections::BTreeMap;
use std::sync::OnceLock;

/// A registered check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CheckInfo {
    pub id: &'static str,
    /// Short label of the displayed inequality the check verifies.
    pub anchor: &'static str,
    pub description: &'static str,
    /// Whether the check reads an empirical rearrangement.
    pub needs_sample: bool,
}

const CHECKS: &[CheckInfo] = &[
    CheckInfo { id: "concentration", anchor: "eq. definida", description: "f**(t)-f**(1/2) <= 2L sqrt(ln 1/t), exponential integral, LlogHalf norm <= L", needs_sample: true },
    CheckInfo { id: "entropy", anchor: "eq. abecd", description: "entropy support bound, truncation restriction, entropy Polya-Szego display", needs_sample: true },
    CheckInfo { id: "feissner", anchor: "eq. launodos", description: "ratio of int f*^p (ln 1/s)^{p/2} to int |grad f|^p + int |f|^p", needs_sample: true },
    CheckInfo { id: "gross", anchor: "eq. launo", description: "int f^2 ln|f| <= int |grad f|^2 + |f|_2^2 ln |f|_2", needs_sample: false },
    CheckInfo { id: "ledoux", anchor: "eq. ledo", description: "int I(lambda_f(s)) ds <= int |grad f|", needs_sample: true },
    CheckInfo { id: "ls-linf", anchor: "eq. caso-inf", description: "sup (f**-f*) I(t)/t <= |grad f|_inf", needs_sample: true },
    CheckInfo { id: "ls-lp", anchor: "eq. corres", description: "ratio of |(f**-f*) I(t)/t|_p to |grad f|_p", needs_sample: true },
    CheckInfo { id: "one-dim-ls", anchor: "eq. level4, estuario", description: "one-dimensional log-Sobolev forms on the line, Lebesgue and Gaussian", needs_sample: false },
    CheckInfo { id: "oscillation", anchor: "eq. rea", description: "f**(t) - f*(t) <= (t/I(t)) |grad f|**(t)", needs_sample: true },
    CheckInfo { id: "poincare-dual", anchor: "eq. opti", description: "ratio of |u*|_{L^p(log)^{p/2}} to |g|_p for u*(t) = int_t^1 g/I", needs_sample: true },
    CheckInfo { id: "poincare-l1", anchor: "eq. poinca1", description: "int |f - m| <= sqrt(2 pi)/2 int |grad f|", needs_sample: true },
    CheckInfo { id: "polya-szego", anchor: "eq. pol", description: "|grad f°|**(t) <= |grad f|**(t) and norm forms in L1, L2, Linf", needs_sample: true },
    CheckInfo { id: "talenti", anchor: "eq. dosa", description: "(-f*)'(s) I(s) <= d/ds int_{|f|>f*(s)} |grad f| on s in [0.02, 0.98]", needs_sample: true },
];

/// The checks known to the suite, sorted by id.
#[derive(Debug, Clone, Copy, Default)]
pub struct CheckRegistry;

impl CheckRegistry {
    pub fn iter(&self) -> impl Iterator<Item = &'static CheckInfo> {
        CHECKS.iter()
    }

    pub fn get(&self, id: &str) -> Option<&'static CheckInfo> {
        CHECKS.iter().find(|c| c.id == id)
    }

    pub fn ids(&self) -> Vec<&'static str> {
        CHECKS.iter().map(|c| c.id).collect()
    }

    /// `id (anchor)`, one line per check.
    pub fn listing(&self) -> Vec<String> {
        CHECKS.iter().map(|c| format!("{} ({})", c.id, c.anchor)).collect()
    }
}

/// Settings shared by every check in a run.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckContext {
    pub n_samples: usize,
    pub seed: u64,
    /// Number of curve points per report.
    pub grid_size: usize,
    /// Block size for difference quotients; `None` picks `max(32, N/200)`.
    pub window: Option<usize>,
    /// Exponent of the Feissner and dual Poincaré ratios.
    pub p: f64,
    /// Exponent of the `LS_Lp` ratio.
    pub ls_p: f64,
    /// Ratio caps by check id.
    pub caps: BTreeMap<String, f64>,
}

impl Default for CheckContext {
    fn default() -> Self {
        Self {
            n_samples: 100_000,
            seed: 0,
            grid_size: 256,
            window: None,
            p: 2.0,
            ls_p: 2.0,
            caps: BTreeMap::new(),
        }
    }
}

impl CheckContext {
    pub fn window_for(&self, n: usize) -> usize {
        self.window.unwrap_or_else(|| default_window(n))
    }

    fn cap(&self, id: &str) -> Option<f64> {
        self.caps.get(id).copied()
    }
}

fn is_precondition(e: &Error) -> bool {
    matches!(
        e,
        Error::Unsupported(_) | Error::Domain(_) | Error::DimensionMismatch { .. } | Error::TooFewSamples { .. }
    )
}

fn need<'a>(sample: Option<&'a EmpiricalRearrangement>, id: &str) -> Result<&'a EmpiricalRearrangement> {
    sample.ok_or_else(|| Error::Unsupported(format!("{id} needs an empirical rearrangement")))
}

/// Analytic `f*` on the default grid when known, else the empirical one.
fn best_rearrangement(f: &BoxedFunction, e: &EmpiricalRearrangement) -> Result<QuantileFunction> {
    let knots = log_uniform_grid(DEFAULT_GRID_POINTS, DEFAULT_GRID_MIN)?;
    match analytic_quantile(f.as_ref(), knots) {
        Some(q) => q,
        None => Ok(e.f_star.clone()),
    }
}

/// `c` for the entropy display, calibrated once over the analytic
/// rearrangements of the default catalog on a fine log grid.
pub fn catalog_entropy_constant() -> f64 {
    static C: OnceLock<f64> = OnceLock::new();
    *C.get_or_init(|| {
        let knots = log_uniform_grid(4 * DEFAULT_GRID_POINTS, DEFAULT_GRID_MIN).expect("valid grid");
        let qs: Vec<QuantileFunction> = family_catalog()
            .iter()
            .filter_map(|f| analytic_quantile(f.as_ref(), knots.clone()).and_then(|q| q.ok()))
            .collect();
        calibrate_entropy_constant(&qs, DEFAULT_GRID_MIN)
    })
}

fn entropy_report(f: &BoxedFunction, e: &EmpiricalRearrangement, ctx: &CheckContext) -> Result<InequalityReport> {
    let mut b = ReportBuilder::new("entropy", &f.id(), f.dim());
    let q = best_rearrangement(f, e)?;
    let mut parts = Vec::new();
    match check_entropy_lower_bound_quantile(&f.id(), &q) {
        Ok(r) => parts.push(("support", r)),
        Err(err) => b.note(format!("support: {err}")),
    }
    let (t1, t2) = (e.f_star.eval(0.75), e.f_star.eval(0.25));
    if t1 < t2 {
        let n = ctx.n_samples.min(20_000);
        parts.push(("truncation", check_truncation_friendly(f.clone(), t1, t2, n, ctx.seed)?));
    } else {
        b.note("truncation: f* flat between masses 1/4 and 3/4");
    }
    if analytic_quantile(f.as_ref(), vec![0.0, 1.0]).is_some() {
        let c = catalog_entropy_constant();
        parts.push(("display", check_entropy_display(&f.id(), &q, c, DEFAULT_GRID_MIN, ctx.grid_size)?));
        b.record("c", c);
    } else {
        b.note("display: needs a closed-form rearrangement");
    }
    for (label, r) in parts {
        for mut c in r.points {
            c.label = format!("{label}:{}", c.label);
            b.labelled_point(&c.label, c.t.unwrap_or(f64::NAN), c.lhs, c.rhs, c.tolerance);
        }
        for (k, v) in r.recorded {
            b.record(&format!("{label}_{k}"), v);
        }
    }
    Ok(b.finish())
}

fn dual_input(f: &BoxedFunction, e: &EmpiricalRearrangement) -> Result<QuantileFunction> {
    let q = best_rearrangement(f, e)?;
    let g: &GridFunction = &q;
    let (lo, hi): (Vec<(f64, f64)>, bool) = match g.interpolation() {
        Interpolation::Linear => {
            // keep (0, 1/2 − ε] and drop to zero at 1/2
            let edge = 0.5 - 1e-12;
            let mut pts: Vec<(f64, f64)> = g.knots().iter().zip(g.values()).filter(|(t, _)| **t < edge).map(|(t, v)| (*t, *v)).collect();
            pts.push((edge, g.eval(edge)));
            pts.push((0.5, 0.0));
            (pts, true)
        }
        Interpolation::Step => {
            let mut pts: Vec<(f64, f64)> = (1..=g.cells()).filter(|&i| g.knots()[i] < 0.5).map(|i| (g.knots()[i], g.values()[i - 1])).collect();
            pts.push((0.5, g.eval(0.5)));
            (pts, false)
        }
    };
    let mut knots = vec![0.0];
    let mut values = Vec::new();
    if hi {
        values.push(g.values()[0]);
    }
    for (t, v) in lo {
        if t > 0.0 {
            knots.push(t);
            values.push(v);
        }
    }
    knots.push(1.0);
    values.push(0.0);
    if hi {
        QuantileFunction::linear(knots, values)
    } else {
        QuantileFunction::step(knots, values)
    }
}

/// Runs one check on one function. Unmet preconditions (no Lipschitz
/// bound, wrong dimension, too few samples, non-decaying input) give a
/// `not-applicable` report instead of an error.
pub fn run_check(
    id: &str,
    f: &BoxedFunction,
    sample: Option<&EmpiricalRearrangement>,
    ctx: &CheckContext,
) -> Result<InequalityReport> {
    let n = ctx.n_samples;
    let result = match id {
        "ledoux" => need(sample, id).map(check_ledoux),
        "talenti" => need(sample, id).and_then(|e| check_talenti(e, ctx.window_for(e.n_samples))),
        "oscillation" => need(sample, id).map(|e| check_oscillation(e, ctx.grid_size)),
        "polya-szego" => need(sample, id).and_then(|e| check_polya_szego(e, ctx.window_for(e.n_samples), ctx.grid_size)),
        "gross" => check_gross(f.as_ref(), McOptions { samples: n, seed: ctx.seed }),
        "one-dim-ls" => check_one_dim_ls(f.as_ref()),
        "poincare-l1" => need(sample, id).map(check_poincare_l1),
        "poincare-dual" => need(sample, id)
            .and_then(|e| dual_input(f, e))
            .and_then(|g| check_poincare_dual(&f.id(), &g, ctx.p, ctx.cap(id)))
            .map(|mut r| {
                r.dim = f.dim();
                r
            }),
        "feissner" => need(sample, id).and_then(|e| check_feissner(e, ctx.p, ctx.cap(id))),
        "ls-linf" => need(sample, id).and_then(|e| check_ls_norms(e, Some(f.as_ref()), NormTag::LsLinf, None, ctx.grid_size)),
        "ls-lp" => need(sample, id).and_then(|e| check_ls_norms(e, Some(f.as_ref()), NormTag::LsLp(ctx.ls_p), ctx.cap(id), ctx.grid_size)),
        "concentration" => need(sample, id).and_then(|e| check_concentration(e, f.lipschitz_bound(), ctx.grid_size)),
        "entropy" => need(sample, id).and_then(|e| entropy_report(f, e, ctx)),
        other => return Err(Error::Domain(format!("unknown check {other}"))),
    };
    let mut report = match result {
        Ok(r) => r,
        Err(e) if is_precondition(&e) => ReportBuilder::new(id, &f.id(), f.dim()).not_applicable(&e.to_string()),
        Err(e) => return Err(e),
    };
    report.inequality_id = id.to_string();
    report.n_samples = n;
    report.seed = ctx.seed;
    if report.grid_size != 0 && report.grid_size != ctx.grid_size {
        report.notes.push(format!("evaluation grid: {} points", report.grid_size));
    }
    report.grid_size = ctx.grid_size;
    Ok(report)
}
