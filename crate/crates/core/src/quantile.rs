//! Grid functions on `(0, 1]` and the operators applied to decreasing
//! rearrangements: maximal average, oscillation, difference quotients,
//! truncation, the Hardy operators and the weighted norms.
//!
//! A grid has knots `0 = t₀ < t₁ < … < t_M = 1`. A step function stores one
//! value per cell `(t_{i−1}, t_i]`; a piecewise-linear function stores one
//! value per knot, where the value at `t₀` is the limit at `0⁺`.

use crate::error::{Error, Result};
use crate::gaussian::iso_profile;
use crate::quadrature::gl8;
use serde::Serialize;
use std::fmt;
use std::io::Write;
use std::ops::Deref;

/// Number of grid points in [`default_grid`].
pub const DEFAULT_GRID_POINTS: usize = 2048;
/// Smallest positive knot of [`default_grid`].
pub const DEFAULT_GRID_MIN: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Interpolation {
    Step,
    Linear,
}

/// `0` followed by `points` log-uniform knots from `t_min` to `1`.
pub fn log_uniform_grid(points: usize, t_min: f64) -> Result<Vec<f64>> {
    if points < 2 || !(t_min > 0.0 && t_min < 1.0) {
        return Err(Error::InvalidGrid(format!(
            "log-uniform grid needs >= 2 points and t_min in (0,1), got {points}, {t_min}"
        )));
    }
    let l = t_min.ln();
    let mut knots = Vec::with_capacity(points + 1);
    knots.push(0.0);
    for k in 0..points {
        let frac = k as f64 / (points - 1) as f64;
        knots.push((l * (1.0 - frac)).exp());
    }
    knots[1] = t_min;
    knots[points] = 1.0;
    Ok(knots)
}

/// `0, 1/m, 2/m, …, 1`.
pub fn uniform_grid(m: usize) -> Result<Vec<f64>> {
    if m == 0 {
        return Err(Error::InvalidGrid("uniform grid needs at least one cell".into()));
    }
    let mut knots: Vec<f64> = (0..=m).map(|i| i as f64 / m as f64).collect();
    knots[m] = 1.0;
    Ok(knots)
}

/// 2048 log-uniform points on `[1e-6, 1]` plus the origin.
pub fn default_grid() -> Vec<f64> {
    log_uniform_grid(DEFAULT_GRID_POINTS, DEFAULT_GRID_MIN).expect("valid constants")
}

fn validate_knots(knots: &[f64]) -> Result<()> {
    if knots.len() < 2 {
        return Err(Error::InvalidGrid("need at least one cell".into()));
    }
    if knots[0] != 0.0 {
        return Err(Error::InvalidGrid(format!("first knot must be 0, got {}", knots[0])));
    }
    if *knots.last().unwrap() != 1.0 {
        return Err(Error::InvalidGrid(format!(
            "last knot must be 1, got {}",
            knots.last().unwrap()
        )));
    }
    if let Some(w) = knots.windows(2).find(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidGrid(format!(
            "knots not strictly increasing at {} -> {}",
            w[0], w[1]
        )));
    }
    Ok(())
}

/// A function on `(0, 1]` given by a grid and a step or linear rule.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridFunction {
    knots: Vec<f64>,
    values: Vec<f64>,
    interpolation: Interpolation,
}

impl GridFunction {
    pub fn new(knots: Vec<f64>, values: Vec<f64>, interpolation: Interpolation) -> Result<Self> {
        validate_knots(&knots)?;
        let want = match interpolation {
            Interpolation::Step => knots.len() - 1,
            Interpolation::Linear => knots.len(),
        };
        if values.len() != want {
            return Err(Error::DimensionMismatch { expected: want, got: values.len() });
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFinite(*v));
        }
        Ok(Self { knots, values, interpolation })
    }

    pub fn step(knots: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        Self::new(knots, values, Interpolation::Step)
    }

    pub fn linear(knots: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        Self::new(knots, values, Interpolation::Linear)
    }

    /// Linear function sampled from `f` at the knots. The value at `0⁺` is
    /// `f(0)` when finite, else `f(t₁)`.
    pub fn from_fn<F: Fn(f64) -> f64>(knots: Vec<f64>, f: F) -> Result<Self> {
        validate_knots(&knots)?;
        let mut values: Vec<f64> = knots.iter().map(|&t| f(t)).collect();
        if !values[0].is_finite() {
            values[0] = values[1];
        }
        Self::linear(knots, values)
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn interpolation(&self) -> Interpolation {
        self.interpolation
    }

    /// Number of cells `M`.
    pub fn cells(&self) -> usize {
        self.knots.len() - 1
    }

    /// Value attached to knot `i`: the node value for linear functions, the
    /// value of the cell ending at `t_i` for step functions (`v₁` at `t₀`).
    pub fn node_value(&self, i: usize) -> f64 {
        match self.interpolation {
            Interpolation::Linear => self.values[i],
            Interpolation::Step => self.values[i.max(1) - 1],
        }
    }

    /// Value just to the right of knot `i`.
    pub fn right_value(&self, i: usize) -> f64 {
        match self.interpolation {
            Interpolation::Linear => self.values[i],
            Interpolation::Step => self.values[i.min(self.cells() - 1)],
        }
    }

    /// Value at `s` inside cell `i` (1-based, `t_{i−1} < s ≤ t_i`).
    #[inline]
    pub fn cell_value(&self, i: usize, s: f64) -> f64 {
        match self.interpolation {
            Interpolation::Step => self.values[i - 1],
            Interpolation::Linear => {
                let (a, b) = (self.knots[i - 1], self.knots[i]);
                let (va, vb) = (self.values[i - 1], self.values[i]);
                va + (vb - va) * (s - a) / (b - a)
            }
        }
    }

    /// `∫_{t_{i−1}}^{s}` over part of cell `i`.
    #[inline]
    pub fn cell_partial_integral(&self, i: usize, s: f64) -> f64 {
        let a = self.knots[i - 1];
        match self.interpolation {
            Interpolation::Step => self.values[i - 1] * (s - a),
            Interpolation::Linear => {
                let b = self.knots[i];
                let (va, vb) = (self.values[i - 1], self.values[i]);
                let h = s - a;
                va * h + (vb - va) * h * h / (2.0 * (b - a))
            }
        }
    }

    /// Index of the cell containing `t` (1-based); `t ≤ 0` maps to cell 1.
    pub fn cell_of(&self, t: f64) -> usize {
        let i = self.knots.partition_point(|&k| k < t);
        i.clamp(1, self.cells())
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return self.node_value(0);
        }
        self.cell_value(self.cell_of(t), t.min(1.0))
    }

    /// Cumulative integrals `C_i = ∫₀^{t_i}`, with `C₀ = 0`.
    pub fn cumulative(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.knots.len());
        out.push(0.0);
        let mut acc = 0.0;
        for i in 1..self.knots.len() {
            acc += self.cell_partial_integral(i, self.knots[i]);
            out.push(acc);
        }
        out
    }

    pub fn integral(&self) -> f64 {
        *self.cumulative().last().unwrap()
    }

    /// Rearranges the function into a nonincreasing step function. Linear
    /// functions that are already nonincreasing are returned unchanged;
    /// otherwise each cell is replaced by its average before sorting.
    pub fn rearrange(&self) -> Result<QuantileFunction> {
        if self.values.iter().any(|&v| v < 0.0) {
            return Err(Error::InvalidValues("rearrangement of |f| needs nonnegative values".into()));
        }
        let nonincreasing = self.values.windows(2).all(|w| w[1] <= w[0]);
        if nonincreasing {
            return QuantileFunction::new(self.clone());
        }
        let mut cells: Vec<(f64, f64)> = (1..=self.cells())
            .map(|i| {
                let w = self.knots[i] - self.knots[i - 1];
                (self.cell_partial_integral(i, self.knots[i]) / w, w)
            })
            .collect();
        cells.sort_by(|a, b| b.0.total_cmp(&a.0));
        let mut knots = Vec::with_capacity(cells.len() + 1);
        knots.push(0.0);
        let mut acc = 0.0;
        for &(_, w) in &cells {
            acc += w;
            knots.push(acc);
        }
        *knots.last_mut().unwrap() = 1.0;
        // Rounding can collapse tiny cells; merge them.
        let mut k2 = vec![0.0];
        let mut v2 = Vec::new();
        for (i, &(v, _)) in cells.iter().enumerate() {
            if knots[i + 1] > *k2.last().unwrap() {
                k2.push(knots[i + 1]);
                v2.push(v);
            }
        }
        *k2.last_mut().unwrap() = 1.0;
        QuantileFunction::new(GridFunction::step(k2, v2)?)
    }

    /// Same function on a coarser grid of at most `max_points` knots, by
    /// evaluating at every `k`-th knot. Used to bound report sizes.
    pub fn subsample(&self, max_points: usize) -> Vec<(f64, f64)> {
        let n = self.knots.len();
        let stride = n.div_ceil(max_points.max(2)).max(1);
        let mut out: Vec<(f64, f64)> = (0..n)
            .step_by(stride)
            .map(|i| (self.knots[i], self.node_value(i)))
            .collect();
        if !(n - 1).is_multiple_of(stride) {
            out.push((1.0, self.node_value(n - 1)));
        }
        out
    }

    /// Two-column CSV dump with header `t,value`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "t,value")?;
        for (i, t) in self.knots.iter().enumerate() {
            writeln!(w, "{:e},{:e}", t, self.node_value(i))?;
        }
        Ok(())
    }
}

/// A nonincreasing, nonnegative [`GridFunction`]: the decreasing
/// rearrangement of some `|f|`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct QuantileFunction(GridFunction);

impl Deref for QuantileFunction {
    type Target = GridFunction;
    fn deref(&self) -> &GridFunction {
        &self.0
    }
}

impl QuantileFunction {
    pub fn new(g: GridFunction) -> Result<Self> {
        if let Some(v) = g.values.iter().find(|&&v| v < 0.0) {
            return Err(Error::InvalidValues(format!("negative value {v}")));
        }
        if let Some(w) = g.values.windows(2).find(|w| w[1] > w[0]) {
            return Err(Error::InvalidValues(format!(
                "values must be nonincreasing: {} then {}",
                w[0], w[1]
            )));
        }
        Ok(Self(g))
    }

    /// Like [`QuantileFunction::new`] but first removes rounding-level
    /// increases (relative size below `1e-12`) with a running minimum.
    pub fn new_clamped(mut g: GridFunction) -> Result<Self> {
        let scale = g.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let tol = 1e-12 * scale.max(f64::MIN_POSITIVE);
        for i in 0..g.values.len() {
            if g.values[i] < 0.0 && g.values[i] > -tol {
                g.values[i] = 0.0;
            }
            if i > 0 && g.values[i] > g.values[i - 1] && g.values[i] - g.values[i - 1] <= tol {
                g.values[i] = g.values[i - 1];
            }
        }
        Self::new(g)
    }

    pub fn step(knots: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        Self::new(GridFunction::step(knots, values)?)
    }

    pub fn linear(knots: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        Self::new(GridFunction::linear(knots, values)?)
    }

    /// Linear interpolant of an analytic `f*` on the given knots.
    pub fn from_fn<F: Fn(f64) -> f64>(knots: Vec<f64>, f: F) -> Result<Self> {
        Self::new_clamped(GridFunction::from_fn(knots, f)?)
    }

    /// Step function `s ↦ v₍ᵢ₎` on `((i−1)/N, i/N]` for values already sorted
    /// in descending order.
    pub fn from_sorted_desc(values: Vec<f64>) -> Result<Self> {
        let knots = uniform_grid(values.len())?;
        Self::step(knots, values)
    }

    /// `χ_(0,r)` as a step function on a grid containing `r` as a knot.
    pub fn indicator(r: f64, knots: &[f64]) -> Result<Self> {
        if !(r > 0.0 && r <= 1.0) {
            return Err(Error::Domain(format!("indicator support {r} outside (0,1]")));
        }
        let mut k: Vec<f64> = knots.iter().copied().filter(|&t| (t - r).abs() > 1e-15).collect();
        k.push(r);
        k.sort_by(|a, b| a.total_cmp(b));
        let values = k.windows(2).map(|w| if w[1] <= r { 1.0 } else { 0.0 }).collect();
        Self::step(k, values)
    }

    pub fn constant(c: f64, knots: Vec<f64>) -> Result<Self> {
        let n = knots.len();
        Self::linear(knots, vec![c; n])
    }

    pub fn into_inner(self) -> GridFunction {
        self.0
    }

    /// `λ(y) = |{s : q(s) > y}|`, the distribution function of the values.
    pub fn distribution(&self, y: f64) -> f64 {
        let g = &self.0;
        match g.interpolation {
            Interpolation::Step => {
                let k = g.values.partition_point(|&v| v > y);
                g.knots[k]
            }
            Interpolation::Linear => {
                // Nodes with value > y form a prefix.
                let k = g.values.partition_point(|&v| v > y);
                if k == 0 {
                    return 0.0;
                }
                if k == g.values.len() {
                    return 1.0;
                }
                let (a, b) = (g.knots[k - 1], g.knots[k]);
                let (va, vb) = (g.values[k - 1], g.values[k]);
                a + (b - a) * (va - y) / (va - vb)
            }
        }
    }

    /// Linear rebuild from block knots `t_{kw}`, so that the block slopes of
    /// the rebuild equal `neg_derivative(self, w)`.
    pub fn linear_rebuild(&self, window: usize) -> Result<Self> {
        if self.interpolation == Interpolation::Linear && window == 1 {
            return Ok(self.clone());
        }
        let idx = block_indices(self.cells(), window)?;
        let knots = idx.iter().map(|&i| self.knots[i]).collect();
        let values = idx.iter().map(|&i| self.node_value(i)).collect();
        Self::linear(knots, values)
    }
}

fn block_indices(cells: usize, window: usize) -> Result<Vec<usize>> {
    if window == 0 || window > cells {
        return Err(Error::Domain(format!("window {window} must be in 1..={cells}")));
    }
    let mut idx: Vec<usize> = (0..=cells).step_by(window).collect();
    if *idx.last().unwrap() != cells {
        // fold the short tail block into the previous one
        if idx.len() > 1 {
            idx.pop();
        }
        idx.push(cells);
    }
    Ok(idx)
}

/// `f**(t) = (1/t)∫₀ᵗ f*` at every knot, interpolated linearly.
pub fn maximal_average(q: &QuantileFunction) -> QuantileFunction {
    let g = hardy_p(q);
    QuantileFunction::new_clamped(g).expect("running average of a rearrangement is monotone")
}

/// `t ↦ f**(t) − f*(t)` at every knot. For step input the value at `t_i`
/// uses `f*(t_i⁺)`, which is the supremum over the adjacent cell.
pub fn oscillation(q: &QuantileFunction) -> GridFunction {
    let c = q.cumulative();
    let knots = q.knots.clone();
    let mut values = Vec::with_capacity(knots.len());
    values.push(0.0);
    for i in 1..knots.len() {
        values.push((c[i] / knots[i] - q.right_value(i)).max(0.0));
    }
    GridFunction::linear(knots, values).expect("finite values on a valid grid")
}

/// Block difference quotients of `−f*` over `window` cells, as a step
/// function on the block knots. A short final block is merged into the
/// previous one.
pub fn neg_derivative(q: &QuantileFunction, window: usize) -> Result<GridFunction> {
    let idx = block_indices(q.cells(), window)?;
    let knots: Vec<f64> = idx.iter().map(|&i| q.knots[i]).collect();
    let values = idx
        .windows(2)
        .map(|w| {
            let (a, b) = (q.knots[w[0]], q.knots[w[1]]);
            ((q.node_value(w[0]) - q.node_value(w[1])) / (b - a)).max(0.0)
        })
        .collect();
    GridFunction::step(knots, values)
}

/// `s ↦ min(max(f*(s) − t1, 0), t2 − t1)`. Linear inputs get extra knots
/// where a segment crosses a level, so the result is exact.
pub fn quantile_truncate(q: &QuantileFunction, t1: f64, t2: f64) -> Result<QuantileFunction> {
    if t1.is_nan() || t2.is_nan() || !(t1 >= 0.0) || !(t1 < t2) {
        return Err(Error::Domain(format!("truncation needs 0 <= t1 < t2, got {t1}, {t2}")));
    }
    let clamp = |v: f64| (v - t1).max(0.0).min(t2 - t1);
    match q.interpolation {
        Interpolation::Step => {
            QuantileFunction::step(q.knots.clone(), q.values.iter().map(|&v| clamp(v)).collect())
        }
        Interpolation::Linear => {
            let mut knots = vec![0.0];
            let mut values = vec![clamp(q.values[0])];
            for i in 1..q.knots.len() {
                let (a, b) = (q.knots[i - 1], q.knots[i]);
                let (va, vb) = (q.values[i - 1], q.values[i]);
                for level in [t2, t1] {
                    if va > level && vb < level {
                        let s = a + (b - a) * (va - level) / (va - vb);
                        if s > *knots.last().unwrap() && s < b {
                            knots.push(s);
                            values.push(clamp(level));
                        }
                    }
                }
                knots.push(b);
                values.push(clamp(vb));
            }
            QuantileFunction::new_clamped(GridFunction::linear(knots, values)?)
        }
    }
}

/// `P f(t) = (1/t)∫₀ᵗ f`, exact at the knots.
pub fn hardy_p(f: &GridFunction) -> GridFunction {
    let c = f.cumulative();
    let mut values = Vec::with_capacity(c.len());
    values.push(f.node_value(0));
    values.extend(c.iter().zip(&f.knots).skip(1).map(|(ci, t)| ci / t));
    GridFunction::linear(f.knots.clone(), values).expect("finite values on a valid grid")
}

/// `Q f(t) = ∫_t^1 f(s) ds/s`, exact at the knots `t_i`, `i ≥ 1`; the value
/// at `0⁺` repeats the one at `t₁`.
pub fn hardy_q(f: &GridFunction) -> GridFunction {
    tail_integral(f, |f, i| {
        let (a, b) = (f.knots[i - 1], f.knots[i]);
        match f.interpolation {
            Interpolation::Step => f.values[i - 1] * (b / a).ln(),
            Interpolation::Linear => {
                let beta = (f.values[i] - f.values[i - 1]) / (b - a);
                let alpha = f.values[i - 1] - beta * a;
                alpha * (b / a).ln() + beta * (b - a)
            }
        }
    }, |_| 1.0)
}

/// `Q̃ f(t) = (1 + ln 1/t)^{1/2} ∫_t^1 f(s) ds / (s (1 + ln 1/s)^{1/2})`.
pub fn hardy_q_tilde(f: &GridFunction) -> GridFunction {
    let w = |s: f64| (1.0 - s.ln()).sqrt();
    tail_integral(f, |f, i| {
        let (a, b) = (f.knots[i - 1], f.knots[i]);
        // ∫_a^b ds/(s √(1+ln 1/s)) = 2(√(1+ln 1/a) − √(1+ln 1/b))
        let log_part = 2.0 * (w(a) - w(b));
        match f.interpolation {
            Interpolation::Step => f.values[i - 1] * log_part,
            Interpolation::Linear => {
                let beta = (f.values[i] - f.values[i - 1]) / (b - a);
                let alpha = f.values[i - 1] - beta * a;
                alpha * log_part + beta * gl8(a, b, |s| 1.0 / w(s))
            }
        }
    }, w)
}

fn tail_integral(
    f: &GridFunction,
    cell: impl Fn(&GridFunction, usize) -> f64,
    outer: impl Fn(f64) -> f64,
) -> GridFunction {
    let m = f.cells();
    let mut tail = vec![0.0; m + 1];
    for i in (1..m).rev() {
        tail[i] = tail[i + 1] + cell(f, i + 1);
    }
    let mut values: Vec<f64> = (0..=m).map(|i| outer(f.knots[i].max(f.knots[1])) * tail[i]).collect();
    values[0] = values[1];
    GridFunction::linear(f.knots.clone(), values).expect("finite values on a valid grid")
}

/// Norms on rearrangements.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum NormTag {
    Lp(f64),
    Linf,
    /// `‖(f** − f*)(t) I(t)/t‖_{L^p}`.
    LsLp(f64),
    /// `sup (f** − f*)(t) I(t)/t`.
    LsLinf,
    /// `sup (f** − f*)(t) (ln 1/t)^{1/2}`.
    LlogHalfInfInf,
    /// `(∫₀¹ f*(s)^p (ln 1/s)^{p/2} ds)^{1/p}`.
    LpLogHalf(f64),
}

impl fmt::Display for NormTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormTag::Lp(p) => write!(f, "L{p}"),
            NormTag::Linf => write!(f, "Linf"),
            NormTag::LsLp(p) => write!(f, "LS_L{p}"),
            NormTag::LsLinf => write!(f, "LS_Linf"),
            NormTag::LlogHalfInfInf => write!(f, "LlogHalf_inf_inf"),
            NormTag::LpLogHalf(p) => write!(f, "L{p}logHalf"),
        }
    }
}

impl NormTag {
    fn exponent(&self) -> Option<f64> {
        match *self {
            NormTag::Lp(p) | NormTag::LsLp(p) | NormTag::LpLogHalf(p) => Some(p),
            _ => None,
        }
    }
}

/// `norm(q, tag)` over all of `(0, 1]`.
pub fn norm(q: &QuantileFunction, tag: NormTag) -> Result<f64> {
    norm_restricted(q, tag, 0.0)
}

/// The same norm with integrals and suprema restricted to `[t_min, 1]`.
/// Empirical rearrangements carry no information below about `1/N`, so
/// their weighted norms are read on `[c/N, 1]`.
pub fn norm_restricted(q: &QuantileFunction, tag: NormTag, t_min: f64) -> Result<f64> {
    if let Some(p) = tag.exponent() {
        if !(p >= 1.0) || !p.is_finite() {
            return Err(Error::Unsupported(format!("{tag}: exponent must be finite and >= 1")));
        }
    }
    if !(0.0..1.0).contains(&t_min) {
        return Err(Error::Domain(format!("t_min {t_min} outside [0,1)")));
    }
    let g: &GridFunction = q;
    let start = if t_min > 0.0 { g.cell_of(t_min) } else { 1 };
    let lo = |i: usize| if i == start { g.knots[i - 1].max(t_min) } else { g.knots[i - 1] };
    let cells = start..=g.cells();
    Ok(match tag {
        NormTag::Linf => {
            if t_min > 0.0 {
                g.eval(t_min)
            } else {
                g.node_value(0)
            }
        }
        NormTag::Lp(p) => {
            let mut acc = 0.0;
            for i in cells {
                let (a, b) = (lo(i), g.knots[i]);
                acc += match g.interpolation {
                    Interpolation::Step => g.values[i - 1].powf(p) * (b - a),
                    Interpolation::Linear => {
                        let (va, vb) = (g.cell_value(i, a), g.values[i]);
                        if (va - vb).abs() <= 1e-14 * va.abs().max(vb.abs()) {
                            va.powf(p) * (b - a)
                        } else {
                            (b - a) * (va.powf(p + 1.0) - vb.powf(p + 1.0)) / ((p + 1.0) * (va - vb))
                        }
                    }
                };
            }
            acc.powf(1.0 / p)
        }
        NormTag::LpLogHalf(p) => {
            let k = p / 2.0;
            let mut acc = 0.0;
            for i in cells {
                let (a, b) = (lo(i), g.knots[i]);
                acc += log_weighted_cell(|s| g.cell_value(i, s).powf(p), a, b, k);
            }
            acc.powf(1.0 / p)
        }
        NormTag::LsLp(p) => {
            let c = g.cumulative();
            let mut acc = 0.0;
            for i in cells {
                let (a, b) = (lo(i), g.knots[i]);
                let osc = |t: f64| {
                    ((c[i - 1] + g.cell_partial_integral(i, t)) / t - g.cell_value(i, t)).max(0.0)
                };
                acc += gl8(a, b, |t| (osc(t) * iso_profile(t) / t).powf(p));
            }
            acc.powf(1.0 / p)
        }
        NormTag::LsLinf => weighted_osc_sup(g, start, t_min, |t| iso_profile(t) / t),
        NormTag::LlogHalfInfInf => weighted_osc_sup(g, start, t_min, |t| (-t.ln()).sqrt()),
    })
}

// sup over cells of (f** − f*)(t)·w(t), for a weight w with w(t)/t decreasing.
fn weighted_osc_sup(g: &GridFunction, start: usize, t_min: f64, w: impl Fn(f64) -> f64) -> f64 {
    let c = g.cumulative();
    let mut best = 0.0f64;
    for i in start..=g.cells() {
        let a = g.knots[i - 1].max(t_min);
        let b = g.knots[i];
        let osc = |t: f64| (c[i - 1] + g.cell_partial_integral(i, t)) / t - g.cell_value(i, t);
        match g.interpolation {
            Interpolation::Step => {
                // On a step cell the oscillation is D/t with D ≥ 0, so the
                // weighted value decreases and the sup sits at the left end.
                if a > 0.0 {
                    best = best.max(osc(a) * w(a));
                }
            }
            Interpolation::Linear => {
                for k in 0..=8 {
                    let t = a + (b - a) * k as f64 / 8.0;
                    if t > 0.0 {
                        best = best.max(osc(t) * w(t));
                    }
                }
            }
        }
    }
    best
}

/// `∫_a^b f(s) (ln 1/s)^k ds` with `k > 0`, via `s = e^{−w²}` so the
/// integrand is smooth at `s = 1`; `a = 0` is handled with a truncated tail.
pub fn log_weighted_cell<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, k: f64) -> f64 {
    // ds = -2w e^{-w²} dw, (ln 1/s)^k = w^{2k}
    let integrand = |w: f64| {
        let s = (-w * w).exp();
        f(s) * w.powf(2.0 * k + 1.0) * 2.0 * s
    };
    let wb = (-b.ln()).max(0.0).sqrt();
    if a > 0.0 {
        let wa = (-a.ln()).sqrt();
        gl8(wb, wa, integrand)
    } else {
        // e^{-w²} below 1e-300 beyond w = 27; 32 panels cover the tail.
        let top = 27.0f64.max(wb + 1.0);
        crate::quadrature::gl8_composite(wb, top, 32, integrand)
    }
}

/// Kolmogorov distance `sup_y |λ_a(y) − λ_b(y)|` between the value
/// distributions of two rearrangements.
pub fn kolmogorov_distance(a: &QuantileFunction, b: &QuantileFunction) -> f64 {
    let mut d = 0.0f64;
    for y in a.values.iter().chain(b.values.iter()) {
        d = d.max((a.distribution(*y) - b.distribution(*y)).abs());
    }
    d
}

/// `sup_{s ∈ [lo, hi]} |a(s) − b(s)|`, evaluated at the knots of both
/// functions inside the window (and just right of each knot for steps).
pub fn sup_distance(a: &GridFunction, b: &GridFunction, lo: f64, hi: f64) -> f64 {
    let mut pts: Vec<f64> = a
        .knots
        .iter()
        .chain(b.knots.iter())
        .copied()
        .filter(|&t| t >= lo && t <= hi)
        .collect();
    pts.push(lo);
    pts.push(hi);
    let mut d = 0.0f64;
    for &t in &pts {
        for s in [t, (t * (1.0 + 1e-12)).min(hi)] {
            d = d.max((a.eval(s) - b.eval(s)).abs());
        }
    }
    d
}
