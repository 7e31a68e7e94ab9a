use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;

/// Smallest tolerance, used by quadrature-only checks.
pub const TOLERANCE_FLOOR: f64 = 1e-9;

/// `3σ̂`, floored at [`TOLERANCE_FLOOR`].
pub fn tolerance_from_se(se: f64) -> f64 {
    (3.0 * se).max(TOLERANCE_FLOOR)
}

/// `z σ̂` with `z = max(3, Φ⁻¹(1 − 0.00135/K))`, floored. Keeps the
/// per-curve false-alarm rate at the single-point `3σ` level when `K`
/// points are compared.
pub fn curve_tolerance(se: f64, points: usize) -> f64 {
    (curve_z(points) * se).max(TOLERANCE_FLOOR)
}

pub fn curve_z(points: usize) -> f64 {
    let k = points.max(1) as f64;
    crate::gaussian::normal_quantile(1.0 - 0.00135 / k).max(3.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Holds,
    HoldsWithinTolerance,
    Violated,
    /// The check does not apply to this function (e.g. no Lipschitz bound).
    NotApplicable,
    /// A ratio with no configured cap: the value is recorded, not judged.
    Recorded,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::HoldsWithinTolerance => "holds-within-tolerance",
            Verdict::Violated => "violated",
            Verdict::NotApplicable => "not-applicable",
            Verdict::Recorded => "recorded",
        }
    }

    /// Verdict for a signed margin (RHS − LHS) and tolerance.
    pub fn from_margin(margin: f64, tolerance: f64) -> Self {
        if margin.is_nan() || margin < -tolerance {
            Verdict::Violated
        } else if margin >= 0.0 {
            Verdict::Holds
        } else {
            Verdict::HoldsWithinTolerance
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One LHS/RHS comparison, at a point `t` of a curve or as a scalar.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub label: String,
    pub t: Option<f64>,
    pub lhs: f64,
    pub rhs: f64,
    pub tolerance: f64,
}

impl Comparison {
    pub fn margin(&self) -> f64 {
        self.rhs - self.lhs
    }
}

/// Outcome of one verifier run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityReport {
    pub inequality_id: String,
    pub function_id: String,
    pub dim: usize,
    pub n_samples: usize,
    pub grid_size: usize,
    pub seed: u64,
    pub points: Vec<Comparison>,
    pub lhs_summary: f64,
    pub rhs_summary: f64,
    /// RHS − LHS at the point where `margin / tolerance` is smallest.
    pub worst_margin: f64,
    pub tolerance: f64,
    pub worst_label: String,
    pub worst_t: Option<f64>,
    /// `LHS / RHS` for ratio-type checks.
    pub ratio: Option<f64>,
    pub verdict: Verdict,
    /// Named auxiliary values, e.g. an integral reported alongside a bound.
    pub recorded: BTreeMap<String, f64>,
    pub notes: Vec<String>,
}

impl InequalityReport {
    /// Raises every tolerance to at least `floor` and re-derives the worst
    /// point and verdict. Recorded and not-applicable reports keep their
    /// verdict.
    pub fn with_tolerance_floor(mut self, floor: f64) -> Self {
        self.tolerance = self.tolerance.max(floor);
        if matches!(self.verdict, Verdict::Recorded | Verdict::NotApplicable) {
            return self;
        }
        for c in self.points.iter_mut() {
            c.tolerance = c.tolerance.max(floor);
        }
        // a capped ratio is judged on its cap alone
        let judged: Vec<&Comparison> = match self.points.last() {
            Some(c) if self.ratio.is_some() && c.label == "ratio-cap" => vec![c],
            _ => self.points.iter().collect(),
        };
        let worst = judged
            .into_iter()
            .min_by(|a, b| (a.margin() / a.tolerance).total_cmp(&(b.margin() / b.tolerance)))
            .cloned();
        if let Some(c) = worst {
            self.verdict = Verdict::from_margin(c.margin(), c.tolerance);
            self.lhs_summary = c.lhs;
            self.rhs_summary = c.rhs;
            self.worst_margin = c.margin();
            self.tolerance = c.tolerance;
            self.worst_label = c.label;
            self.worst_t = c.t;
        }
        self
    }
}

/// Collects comparisons and derives the verdict.
#[derive(Debug, Clone)]
pub struct ReportBuilder {
    inequality_id: String,
    function_id: String,
    dim: usize,
    n_samples: usize,
    grid_size: usize,
    seed: u64,
    points: Vec<Comparison>,
    recorded: BTreeMap<String, f64>,
    notes: Vec<String>,
}

impl ReportBuilder {
    pub fn new(inequality_id: &str, function_id: &str, dim: usize) -> Self {
        Self {
            inequality_id: inequality_id.to_string(),
            function_id: function_id.to_string(),
            dim,
            n_samples: 0,
            grid_size: 0,
            seed: 0,
            points: Vec::new(),
            recorded: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    pub fn samples(mut self, n: usize, seed: u64) -> Self {
        self.n_samples = n;
        self.seed = seed;
        self
    }

    pub fn grid(mut self, grid_size: usize) -> Self {
        self.grid_size = grid_size;
        self
    }

    pub fn point(&mut self, t: f64, lhs: f64, rhs: f64, tolerance: f64) {
        self.points.push(Comparison { label: "curve".into(), t: Some(t), lhs, rhs, tolerance });
    }

    pub fn scalar(&mut self, label: &str, lhs: f64, rhs: f64, tolerance: f64) {
        self.points.push(Comparison { label: label.into(), t: None, lhs, rhs, tolerance });
    }

    pub fn labelled_point(&mut self, label: &str, t: f64, lhs: f64, rhs: f64, tolerance: f64) {
        self.points.push(Comparison { label: label.into(), t: Some(t), lhs, rhs, tolerance });
    }

    pub fn record(&mut self, key: &str, value: f64) {
        self.recorded.insert(key.to_string(), value);
    }

    pub fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    pub fn points(&self) -> &[Comparison] {
        &self.points
    }

    fn worst(&self) -> Option<&Comparison> {
        self.points.iter().min_by(|a, b| {
            let ka = a.margin() / a.tolerance;
            let kb = b.margin() / b.tolerance;
            ka.total_cmp(&kb)
        })
    }

    fn base(self, verdict: Verdict, ratio: Option<f64>) -> InequalityReport {
        let worst = self.worst().cloned();
        let (lhs, rhs, margin, tol, label, t) = match worst {
            Some(c) => (c.lhs, c.rhs, c.margin(), c.tolerance, c.label.clone(), c.t),
            None => (0.0, 0.0, 0.0, TOLERANCE_FLOOR, String::new(), None),
        };
        InequalityReport {
            inequality_id: self.inequality_id,
            function_id: self.function_id,
            dim: self.dim,
            n_samples: self.n_samples,
            grid_size: self.grid_size,
            seed: self.seed,
            points: self.points,
            lhs_summary: lhs,
            rhs_summary: rhs,
            worst_margin: margin,
            tolerance: tol,
            worst_label: label,
            worst_t: t,
            ratio,
            verdict,
            recorded: self.recorded,
            notes: self.notes,
        }
    }

    /// Judges the worst comparison: violated iff its margin is below
    /// minus its tolerance.
    pub fn finish(self) -> InequalityReport {
        let verdict = match self.worst() {
            Some(c) => Verdict::from_margin(c.margin(), c.tolerance),
            None => Verdict::Holds,
        };
        self.base(verdict, None)
    }

    /// Ratio report: with a cap, the ratio is judged against it (margin
    /// `cap − ratio`); without one the verdict is [`Verdict::Recorded`].
    pub fn finish_ratio(mut self, ratio: f64, ratio_se: f64, cap: Option<f64>) -> InequalityReport {
        match cap {
            Some(cap) => {
                let tol = tolerance_from_se(ratio_se);
                self.points.push(Comparison { label: "ratio-cap".into(), t: None, lhs: ratio, rhs: cap, tolerance: tol });
                let v = Verdict::from_margin(cap - ratio, tol);
                let mut r = self.base(v, Some(ratio));
                let c = r.points.last().unwrap().clone();
                r.lhs_summary = c.lhs;
                r.rhs_summary = c.rhs;
                r.worst_margin = c.margin();
                r.tolerance = c.tolerance;
                r.worst_label = c.label;
                r.worst_t = None;
                r
            }
            None => {
                let mut r = self.base(Verdict::Recorded, Some(ratio));
                r.tolerance = tolerance_from_se(ratio_se);
                r
            }
        }
    }

    pub fn not_applicable(mut self, reason: &str) -> InequalityReport {
        self.notes.push(reason.to_string());
        self.points.clear();
        self.base(Verdict::NotApplicable, None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_rule() {
        assert_eq!(Verdict::from_margin(0.0, 1e-9), Verdict::Holds);
        assert_eq!(Verdict::from_margin(-1e-10, 1e-9), Verdict::HoldsWithinTolerance);
        assert_eq!(Verdict::from_margin(-2e-9, 1e-9), Verdict::Violated);
        assert_eq!(Verdict::from_margin(f64::NAN, 1.0), Verdict::Violated);
    }

    #[test]
    fn worst_point_uses_scaled_margin() {
        let mut b = ReportBuilder::new("x", "f", 1);
        b.point(0.1, 1.0, 1.5, 0.1); // margin 0.5, 5 tolerances
        b.point(0.2, 1.0, 0.99, 0.1); // margin -0.01, -0.1 tolerances
        b.point(0.3, 1.0, 1.0 - 0.05, 1.0); // margin -0.05, -0.05 tolerances
        let r = b.finish();
        assert_eq!(r.worst_t, Some(0.2));
        assert_eq!(r.verdict, Verdict::HoldsWithinTolerance);
        assert!((r.worst_margin + 0.01).abs() < 1e-15);
    }

    #[test]
    fn ratio_reports() {
        let r = ReportBuilder::new("x", "f", 1).finish_ratio(1.2, 0.0, None);
        assert_eq!(r.verdict, Verdict::Recorded);
        let r = ReportBuilder::new("x", "f", 1).finish_ratio(1.2, 0.0, Some(1.1));
        assert_eq!(r.verdict, Verdict::Violated);
        let r = ReportBuilder::new("x", "f", 1).finish_ratio(1.2, 0.0, Some(1.3));
        assert_eq!(r.verdict, Verdict::Holds);
    }

    #[test]
    fn tolerance_floor_rejudges() {
        let mut b = ReportBuilder::new("x", "f", 1);
        b.point(0.1, 1.0, 0.9, 0.01);
        b.point(0.2, 1.0, 1.2, 0.01);
        let r = b.finish();
        assert_eq!(r.verdict, Verdict::Violated);
        let r = r.with_tolerance_floor(0.5);
        assert_eq!(r.verdict, Verdict::HoldsWithinTolerance);
        assert_eq!(r.worst_t, Some(0.1));
        assert_eq!(r.tolerance, 0.5);
        let capped = ReportBuilder::new("x", "f", 1).finish_ratio(1.2, 0.0, Some(1.1)).with_tolerance_floor(0.2);
        assert_eq!(capped.verdict, Verdict::HoldsWithinTolerance);
        let rec = ReportBuilder::new("x", "f", 1).finish_ratio(1.2, 0.0, None).with_tolerance_floor(1.0);
        assert_eq!(rec.verdict, Verdict::Recorded);
    }

    #[test]
    fn curve_z_grows_with_points() {
        assert_eq!(curve_z(1), 3.0);
        assert!(curve_z(200) > 4.0);
    }
}
