use crate::error::{Error, Result};
use crate::gaussian::{normal_cdf, normal_quantile};
use crate::quantile::QuantileFunction;
use crate::special::chi_square_upper_quantile;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

/// Dimensions exercised by the default catalog.
pub const CATALOG_DIMS: [usize; 4] = [1, 2, 4, 8];

/// A function on `ℝⁿ` together with the norm of its gradient.
pub trait TestFunction: Send + Sync + fmt::Debug {
    /// Family name with parameters, e.g. `F1{a=1;b=0}`.
    fn id(&self) -> String;
    fn dim(&self) -> usize;
    fn eval(&self, x: &[f64]) -> f64;
    fn grad_norm(&self, x: &[f64]) -> f64;

    /// An upper bound for `|∇f|`, when one is known.
    fn lipschitz_bound(&self) -> Option<f64> {
        None
    }

    /// Closed-form `f*(s)`, when one is known.
    fn rearrangement_at(&self, _s: f64) -> Option<f64> {
        None
    }

    /// One-dimensional factors `g_k` with `f(x) = Π g_k(x_k)`, when `f`
    /// has product form.
    fn factors(&self) -> Option<Vec<OneDim>> {
        None
    }

    /// Points where a one-dimensional restriction may have a kink.
    fn kinks(&self) -> Vec<f64> {
        Vec::new()
    }

    /// Profile `h` with `f(x) = h(|x|)`, when `f` is radial.
    fn radial_profile(&self) -> Option<OneDim> {
        None
    }
}

pub type BoxedFunction = Arc<dyn TestFunction>;

/// Evaluates `f` after checking the point's dimension.
pub fn eval_checked(f: &dyn TestFunction, x: &[f64]) -> Result<f64> {
    if x.len() != f.dim() {
        return Err(Error::DimensionMismatch { expected: f.dim(), got: x.len() });
    }
    Ok(f.eval(x))
}

/// Linear interpolant of the analytic rearrangement on `knots`.
pub fn analytic_quantile(f: &dyn TestFunction, knots: Vec<f64>) -> Option<Result<QuantileFunction>> {
    f.rearrangement_at(0.5)?;
    Some(QuantileFunction::from_fn(knots, |s| f.rearrangement_at(s).unwrap_or(f64::NAN)))
}

/// Building blocks for product-form functions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OneDim {
    Linear { a: f64, b: f64 },
    Exp { a: f64 },
    /// `clamp((r + δ − x)/δ, 0, 1)`.
    Ramp { r: f64, delta: f64 },
    /// `e^{−x²/(2σ²)}`.
    Bump { sigma: f64 },
    Const { c: f64 },
}

impl OneDim {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            OneDim::Linear { a, b } => a * x + b,
            OneDim::Exp { a } => (a * x).exp(),
            OneDim::Ramp { r, delta } => ((r + delta - x) / delta).clamp(0.0, 1.0),
            OneDim::Bump { sigma } => (-x * x / (2.0 * sigma * sigma)).exp(),
            OneDim::Const { c } => c,
        }
    }

    pub fn deriv(&self, x: f64) -> f64 {
        match *self {
            OneDim::Linear { a, .. } => a,
            OneDim::Exp { a } => a * (a * x).exp(),
            OneDim::Ramp { r, delta } => {
                if x > r && x < r + delta {
                    -1.0 / delta
                } else {
                    0.0
                }
            }
            OneDim::Bump { sigma } => -x / (sigma * sigma) * self.eval(x),
            OneDim::Const { .. } => 0.0,
        }
    }

    pub fn sup_abs(&self) -> Option<f64> {
        match *self {
            OneDim::Linear { a, b } => (a == 0.0).then_some(b.abs()),
            OneDim::Exp { a } => (a == 0.0).then_some(1.0),
            OneDim::Ramp { .. } | OneDim::Bump { .. } => Some(1.0),
            OneDim::Const { c } => Some(c.abs()),
        }
    }

    pub fn lipschitz(&self) -> Option<f64> {
        match *self {
            OneDim::Linear { a, .. } => Some(a.abs()),
            OneDim::Exp { a } => (a == 0.0).then_some(0.0),
            OneDim::Ramp { delta, .. } => Some(1.0 / delta),
            OneDim::Bump { sigma } => Some(1.0 / (sigma * std::f64::consts::E.sqrt())),
            OneDim::Const { .. } => Some(0.0),
        }
    }

    pub fn kinks(&self) -> Vec<f64> {
        match *self {
            OneDim::Linear { a, b } if a != 0.0 => vec![-b / a],
            OneDim::Ramp { r, delta } => vec![r, r + delta],
            _ => Vec::new(),
        }
    }

    fn label(&self) -> String {
        match *self {
            OneDim::Linear { a, b } => format!("lin(a={a};b={b})"),
            OneDim::Exp { a } => format!("exp(a={a})"),
            OneDim::Ramp { r, delta } => format!("ramp(r={r};delta={delta})"),
            OneDim::Bump { sigma } => format!("bump(sigma={sigma})"),
            OneDim::Const { c } => format!("const(c={c})"),
        }
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 {
        return Err(Error::Domain("dimension must be at least 1".into()));
    }
    Ok(())
}

fn first_coordinate_factors(g: OneDim, dim: usize) -> Vec<OneDim> {
    let mut v = vec![OneDim::Const { c: 1.0 }; dim];
    v[0] = g;
    v
}

/// F1: `a·x₁ + b`.
#[derive(Debug, Clone)]
pub struct LinearFamily {
    pub a: f64,
    pub b: f64,
    pub dim: usize,
}

impl TestFunction for LinearFamily {
    fn id(&self) -> String {
        format!("F1{{a={};b={}}}", self.a, self.b)
    }
    fn dim(&self) -> usize {
        self.dim
    }
    fn eval(&self, x: &[f64]) -> f64 {
        self.a * x[0] + self.b
    }
    fn grad_norm(&self, _x: &[f64]) -> f64 {
        self.a.abs()
    }
    fn lipschitz_bound(&self) -> Option<f64> {
        Some(self.a.abs())
    }
    fn rearrangement_at(&self, s: f64) -> Option<f64> {
        let a = self.a.abs();
        if a == 0.0 {
            return Some(self.b.abs());
        }
        if self.b == 0.0 {
            return Some(a * normal_quantile(1.0 - s / 2.0));
        }
        // λ(y) = Φ((b − y)/|a|) + Φ((−b − y)/|a|), decreasing in y
        let lambda = |y: f64| normal_cdf((self.b - y) / a) + normal_cdf((-self.b - y) / a);
        if s <= 0.0 {
            return Some(f64::INFINITY);
        }
        let (mut lo, mut hi) = (0.0, self.b.abs() + 40.0 * a);
        if lambda(lo) <= s {
            return Some(0.0);
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if lambda(mid) > s {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(0.5 * (lo + hi))
    }
    fn factors(&self) -> Option<Vec<OneDim>> {
        Some(first_coordinate_factors(OneDim::Linear { a: self.a, b: self.b }, self.dim))
    }
    fn kinks(&self) -> Vec<f64> {
        OneDim::Linear { a: self.a, b: self.b }.kinks()
    }
}

/// F2: `e^{a x₁}`.
#[derive(Debug, Clone)]
pub struct ExpFamily {
    pub a: f64,
    pub dim: usize,
}

impl TestFunction for ExpFamily {
    fn id(&self) -> String {
        format!("F2{{a={}}}", self.a)
    }
    fn dim(&self) -> usize {
        self.dim
    }
    fn eval(&self, x: &[f64]) -> f64 {
        (self.a * x[0]).exp()
    }
    fn grad_norm(&self, x: &[f64]) -> f64 {
        self.a.abs() * (self.a * x[0]).exp()
    }
    fn rearrangement_at(&self, s: f64) -> Option<f64> {
        Some((self.a.abs() * normal_quantile(1.0 - s)).exp())
    }
    fn factors(&self) -> Option<Vec<OneDim>> {
        Some(first_coordinate_factors(OneDim::Exp { a: self.a }, self.dim))
    }
}

/// F3: `clamp((r + δ − x₁)/δ, 0, 1)`, a smoothed indicator of `{x₁ < r}`.
#[derive(Debug, Clone)]
pub struct RampFamily {
    pub r: f64,
    pub delta: f64,
    pub dim: usize,
}

impl TestFunction for RampFamily {
    fn id(&self) -> String {
        format!("F3{{r={};delta={}}}", self.r, self.delta)
    }
    fn dim(&self) -> usize {
        self.dim
    }
    fn eval(&self, x: &[f64]) -> f64 {
        OneDim::Ramp { r: self.r, delta: self.delta }.eval(x[0])
    }
    fn grad_norm(&self, x: &[f64]) -> f64 {
        OneDim::Ramp { r: self.r, delta: self.delta }.deriv(x[0]).abs()
    }
    fn lipschitz_bound(&self) -> Option<f64> {
        Some(1.0 / self.delta)
    }
    fn rearrangement_at(&self, s: f64) -> Option<f64> {
        let x = normal_quantile(s);
        Some((1.0 - (x - self.r) / self.delta).clamp(0.0, 1.0))
    }
    fn factors(&self) -> Option<Vec<OneDim>> {
        Some(first_coordinate_factors(OneDim::Ramp { r: self.r, delta: self.delta }, self.dim))
    }
    fn kinks(&self) -> Vec<f64> {
        vec![self.r, self.r + self.delta]
    }
}

/// F4: `e^{−|x|²/(2σ²)}`.
#[derive(Debug, Clone)]
pub struct RadialBump {
    pub sigma: f64,
    pub dim: usize,
}

impl TestFunction for RadialBump {
    fn id(&self) -> String {
        format!("F4{{sigma={}}}", self.sigma)
    }
    fn dim(&self) -> usize {
        self.dim
    }
    fn eval(&self, x: &[f64]) -> f64 {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        (-r2 / (2.0 * self.sigma * self.sigma)).exp()
    }
    fn grad_norm(&self, x: &[f64]) -> f64 {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        r2.sqrt() / (self.sigma * self.sigma) * (-r2 / (2.0 * self.sigma * self.sigma)).exp()
    }
    fn lipschitz_bound(&self) -> Option<f64> {
        Some(1.0 / (self.sigma * std::f64::consts::E.sqrt()))
    }
    fn rearrangement_at(&self, s: f64) -> Option<f64> {
        // {f > y} is a centered ball; its radius² is the lower χ²_n quantile at s.
        if s >= 1.0 {
            return Some(0.0);
        }
        let r2 = chi_square_upper_quantile(self.dim, 1.0 - s);
        Some((-r2 / (2.0 * self.sigma * self.sigma)).exp())
    }
    fn factors(&self) -> Option<Vec<OneDim>> {
        Some(vec![OneDim::Bump { sigma: self.sigma }; self.dim])
    }
    fn radial_profile(&self) -> Option<OneDim> {
        Some(OneDim::Bump { sigma: self.sigma })
    }
}

/// F5: `|x|`.
#[derive(Debug, Clone)]
pub struct NormFamily {
    pub dim: usize,
}

impl TestFunction for NormFamily {
    fn id(&self) -> String {
        "F5".to_string()
    }
    fn dim(&self) -> usize {
        self.dim
    }
    fn eval(&self, x: &[f64]) -> f64 {
        x.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
    fn grad_norm(&self, x: &[f64]) -> f64 {
        if x.iter().all(|&v| v == 0.0) {
            0.0
        } else {
            1.0
        }
    }
    fn lipschitz_bound(&self) -> Option<f64> {
        Some(1.0)
    }
    fn rearrangement_at(&self, s: f64) -> Option<f64> {
        if s <= 0.0 {
            return Some(f64::INFINITY);
        }
        if s >= 1.0 {
            return Some(0.0);
        }
        Some(chi_square_upper_quantile(self.dim, s).sqrt())
    }
    fn radial_profile(&self) -> Option<OneDim> {
        Some(OneDim::Linear { a: 1.0, b: 0.0 })
    }
    fn kinks(&self) -> Vec<f64> {
        vec![0.0]
    }
}

/// F6: `Π g_k(x_k)`.
#[derive(Debug, Clone)]
pub struct TensorProduct {
    pub parts: Vec<OneDim>,
}

impl TensorProduct {
    /// Bumps of width `sigma` on even coordinates, ramps on odd ones.
    pub fn alternating(sigma: f64, r: f64, delta: f64, dim: usize) -> Self {
        let parts = (0..dim)
            .map(|k| if k % 2 == 0 { OneDim::Bump { sigma } } else { OneDim::Ramp { r, delta } })
            .collect();
        Self { parts }
    }
}

impl TestFunction for TensorProduct {
    fn id(&self) -> String {
        let labels: Vec<String> = self.parts.iter().map(|p| p.label()).collect();
        format!("F6{{{}}}", labels.join("*"))
    }
    fn dim(&self) -> usize {
        self.parts.len()
    }
    fn eval(&self, x: &[f64]) -> f64 {
        self.parts.iter().zip(x).map(|(g, &v)| g.eval(v)).product()
    }
    fn grad_norm(&self, x: &[f64]) -> f64 {
        let vals: Vec<f64> = self.parts.iter().zip(x).map(|(g, &v)| g.eval(v)).collect();
        let mut acc = 0.0;
        for (k, (part, &xk)) in self.parts.iter().zip(x).enumerate() {
            let mut term = part.deriv(xk);
            for (j, v) in vals.iter().enumerate() {
                if j != k {
                    term *= v;
                }
            }
            acc += term * term;
        }
        acc.sqrt()
    }
    fn lipschitz_bound(&self) -> Option<f64> {
        let mut acc = 0.0;
        for k in 0..self.parts.len() {
            let mut term = self.parts[k].lipschitz()?;
            for (j, p) in self.parts.iter().enumerate() {
                if j != k {
                    term *= p.sup_abs()?;
                }
            }
            acc += term * term;
        }
        Some(acc.sqrt())
    }
    fn factors(&self) -> Option<Vec<OneDim>> {
        Some(self.parts.clone())
    }
    fn kinks(&self) -> Vec<f64> {
        self.parts.iter().flat_map(|p| p.kinks()).collect()
    }
}

/// F7: `Σ w_k e^{−|x − c_k|²/(2σ²)}` with seeded weights and centers.
#[derive(Debug, Clone)]
pub struct Mixture {
    pub weights: Vec<f64>,
    pub centers: Vec<Vec<f64>>,
    pub sigma: f64,
    pub seed: u64,
}

impl Mixture {
    pub fn seeded(k: usize, sigma: f64, seed: u64, dim: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let unif = Uniform::new(0.5, 1.5).expect("valid range");
        let weights = (0..k).map(|_| unif.sample(&mut rng)).collect();
        let centers = (0..k)
            .map(|_| (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect())
            .collect();
        Self { weights, centers, sigma, seed }
    }
}

impl TestFunction for Mixture {
    fn id(&self) -> String {
        format!("F7{{k={};sigma={};seed={}}}", self.weights.len(), self.sigma, self.seed)
    }
    fn dim(&self) -> usize {
        self.centers.first().map_or(1, |c| c.len())
    }
    fn eval(&self, x: &[f64]) -> f64 {
        let s2 = 2.0 * self.sigma * self.sigma;
        self.weights
            .iter()
            .zip(&self.centers)
            .map(|(w, c)| {
                let d2: f64 = x.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum();
                w * (-d2 / s2).exp()
            })
            .sum()
    }
    fn grad_norm(&self, x: &[f64]) -> f64 {
        let s2 = self.sigma * self.sigma;
        let mut g = vec![0.0; x.len()];
        for (w, c) in self.weights.iter().zip(&self.centers) {
            let d2: f64 = x.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum();
            let e = w * (-d2 / (2.0 * s2)).exp();
            for k in 0..x.len() {
                g[k] -= e * (x[k] - c[k]) / s2;
            }
        }
        g.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
    fn lipschitz_bound(&self) -> Option<f64> {
        let l = 1.0 / (self.sigma * std::f64::consts::E.sqrt());
        Some(self.weights.iter().sum::<f64>() * l)
    }
}

/// The constant function `c`.
#[derive(Debug, Clone)]
pub struct Constant {
    pub c: f64,
    pub dim: usize,
}

impl TestFunction for Constant {
    fn id(&self) -> String {
        format!("const{{c={}}}", self.c)
    }
    fn dim(&self) -> usize {
        self.dim
    }
    fn eval(&self, _x: &[f64]) -> f64 {
        self.c
    }
    fn grad_norm(&self, _x: &[f64]) -> f64 {
        0.0
    }
    fn lipschitz_bound(&self) -> Option<f64> {
        Some(0.0)
    }
    fn rearrangement_at(&self, _s: f64) -> Option<f64> {
        Some(self.c.abs())
    }
    fn factors(&self) -> Option<Vec<OneDim>> {
        Some(first_coordinate_factors(OneDim::Const { c: self.c }, self.dim))
    }
}

/// `min(max(|f| − t1, 0), t2 − t1)`, with gradient `|∇f|·χ{t1 < |f| < t2}`.
#[derive(Debug, Clone)]
pub struct Truncated {
    pub inner: BoxedFunction,
    pub t1: f64,
    pub t2: f64,
}

impl Truncated {
    pub fn new(inner: BoxedFunction, t1: f64, t2: f64) -> Result<Self> {
        if !(t1 >= 0.0 && t1 < t2) {
            return Err(Error::Domain(format!("truncation needs 0 <= t1 < t2, got {t1}, {t2}")));
        }
        Ok(Self { inner, t1, t2 })
    }
}

impl TestFunction for Truncated {
    fn id(&self) -> String {
        format!("trunc({};{};{})", self.inner.id(), self.t1, self.t2)
    }
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn eval(&self, x: &[f64]) -> f64 {
        (self.inner.eval(x).abs() - self.t1).max(0.0).min(self.t2 - self.t1)
    }
    fn grad_norm(&self, x: &[f64]) -> f64 {
        let v = self.inner.eval(x).abs();
        if v > self.t1 && v < self.t2 {
            self.inner.grad_norm(x)
        } else {
            0.0
        }
    }
    fn lipschitz_bound(&self) -> Option<f64> {
        self.inner.lipschitz_bound()
    }
}

type Builder = dyn Fn(&BTreeMap<String, f64>, usize) -> Result<BoxedFunction> + Send + Sync;

/// A named family: default parameters and a constructor.
#[derive(Clone)]
pub struct FamilyBuilder {
    pub name: String,
    pub description: String,
    pub defaults: Vec<(String, f64)>,
    build: Arc<Builder>,
}

impl fmt::Debug for FamilyBuilder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FamilyBuilder")
            .field("name", &self.name)
            .field("defaults", &self.defaults)
            .finish()
    }
}

impl FamilyBuilder {
    pub fn new<F>(name: &str, description: &str, defaults: &[(&str, f64)], build: F) -> Self
    where
        F: Fn(&BTreeMap<String, f64>, usize) -> Result<BoxedFunction> + Send + Sync + 'static,
    {
        Self {
            name: name.to_string(),
            description: description.to_string(),
            defaults: defaults.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            build: Arc::new(build),
        }
    }

    /// Builds the member with the given overrides on top of the defaults.
    pub fn build(&self, overrides: &BTreeMap<String, f64>, dim: usize) -> Result<BoxedFunction> {
        check_dim(dim)?;
        let mut params: BTreeMap<String, f64> = self.defaults.iter().cloned().collect();
        for (k, v) in overrides {
            if !params.contains_key(k) {
                return Err(Error::Domain(format!("family {} has no parameter {k}", self.name)));
            }
            params.insert(k.clone(), *v);
        }
        (self.build)(&params, dim)
    }
}

/// Name-indexed family constructors, listed in sorted order.
#[derive(Debug, Clone, Default)]
pub struct FamilyRegistry {
    entries: BTreeMap<String, FamilyBuilder>,
}

fn positive(params: &BTreeMap<String, f64>, key: &str) -> Result<f64> {
    let v = params[key];
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::Domain(format!("{key} must be positive, got {v}")));
    }
    Ok(v)
}

impl FamilyRegistry {
    pub fn empty() -> Self {
        Self::default()
    }

    /// F1 to F7 plus the constant family.
    pub fn with_defaults() -> Self {
        let mut r = Self::empty();
        r.register(FamilyBuilder::new("F1", "linear a*x1 + b", &[("a", 1.0), ("b", 0.0)], |p, dim| {
            Ok(Arc::new(LinearFamily { a: p["a"], b: p["b"], dim }))
        }));
        r.register(FamilyBuilder::new("F2", "exponential exp(a*x1)", &[("a", 0.5)], |p, dim| {
            Ok(Arc::new(ExpFamily { a: p["a"], dim }))
        }));
        r.register(FamilyBuilder::new(
            "F3",
            "half-space ramp clamp((r+delta-x1)/delta, 0, 1)",
            &[("r", 0.0), ("delta", 0.25)],
            |p, dim| Ok(Arc::new(RampFamily { r: p["r"], delta: positive(p, "delta")?, dim })),
        ));
        r.register(FamilyBuilder::new("F4", "radial bump exp(-|x|^2/(2 sigma^2))", &[("sigma", 1.0)], |p, dim| {
            Ok(Arc::new(RadialBump { sigma: positive(p, "sigma")?, dim }))
        }));
        r.register(FamilyBuilder::new("F5", "euclidean norm |x|", &[], |_, dim| Ok(Arc::new(NormFamily { dim }))));
        r.register(FamilyBuilder::new(
            "F6",
            "tensor product: bumps on even coordinates, ramps on odd ones",
            &[("sigma", 1.5), ("r", 0.0), ("delta", 0.5)],
            |p, dim| {
                Ok(Arc::new(TensorProduct::alternating(
                    positive(p, "sigma")?,
                    p["r"],
                    positive(p, "delta")?,
                    dim,
                )))
            },
        ));
        r.register(FamilyBuilder::new(
            "F7",
            "seeded positive mixture of k radial bumps",
            &[("k", 4.0), ("sigma", 1.0), ("seed", 7.0)],
            |p, dim| {
                let k = p["k"];
                if !(k >= 1.0) || k.fract() != 0.0 {
                    return Err(Error::Domain(format!("k must be a positive integer, got {k}")));
                }
                let seed = p["seed"];
                if !(seed >= 0.0) || seed.fract() != 0.0 {
                    return Err(Error::Domain(format!("seed must be a nonnegative integer, got {seed}")));
                }
                Ok(Arc::new(Mixture::seeded(k as usize, positive(p, "sigma")?, seed as u64, dim)))
            },
        ));
        r.register(FamilyBuilder::new("const", "constant c", &[("c", 1.0)], |p, dim| {
            Ok(Arc::new(Constant { c: p["c"], dim }))
        }));
        r
    }

    /// Adds or replaces a family.
    pub fn register(&mut self, b: FamilyBuilder) {
        self.entries.insert(b.name.clone(), b);
    }

    pub fn get(&self, name: &str) -> Option<&FamilyBuilder> {
        self.entries.get(name)
    }

    pub fn names(&self) -> Vec<String> {
        self.entries.keys().cloned().collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &FamilyBuilder> {
        self.entries.values()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn build(&self, name: &str, overrides: &BTreeMap<String, f64>, dim: usize) -> Result<BoxedFunction> {
        self.get(name)
            .ok_or_else(|| Error::Domain(format!("unknown family {name}")))?
            .build(overrides, dim)
    }
}

/// Every default family member in every catalog dimension.
pub fn family_catalog() -> Vec<BoxedFunction> {
    let reg = FamilyRegistry::with_defaults();
    let mut out = Vec::new();
    for b in reg.iter() {
        for &dim in &CATALOG_DIMS {
            out.push(b.build(&BTreeMap::new(), dim).expect("defaults are valid"));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::normal_quantile;

    #[test]
    fn catalog_contents() {
        let cat = family_catalog();
        assert_eq!(cat.len(), 8 * CATALOG_DIMS.len());
        let ids: Vec<String> = cat.iter().map(|f| f.id()).collect();
        for fam in ["F1", "F2", "F3", "F4", "F5", "F6", "F7", "const"] {
            assert!(ids.iter().any(|i| i.starts_with(fam)), "{fam}");
        }
    }

    #[test]
    fn linear_rearrangement_closed_form() {
        let f = LinearFamily { a: 1.0, b: 0.0, dim: 2 };
        for &s in &[0.01, 0.3, 0.9] {
            assert_eq!(f.rearrangement_at(s).unwrap(), normal_quantile(1.0 - s / 2.0));
        }
        // shifted: bisection result satisfies λ(f*(s)) = s
        let g = LinearFamily { a: 2.0, b: 0.7, dim: 1 };
        for &s in &[0.05, 0.5, 0.95] {
            let y = g.rearrangement_at(s).unwrap();
            let lam = normal_cdf((0.7 - y) / 2.0) + normal_cdf((-0.7 - y) / 2.0);
            assert!((lam - s).abs() < 1e-12);
        }
    }

    #[test]
    fn ramp_lipschitz() {
        let f = RampFamily { r: 0.0, delta: 0.25, dim: 3 };
        assert_eq!(f.lipschitz_bound(), Some(4.0));
        for k in 0..200 {
            let x = [-1.0 + k as f64 * 0.01, 0.0, 0.0];
            assert!(f.grad_norm(&x) <= 4.0 + 1e-9);
        }
    }

    #[test]
    fn norm_family_gradient() {
        let f = NormFamily { dim: 4 };
        assert_eq!(f.grad_norm(&[0.1, -2.0, 0.0, 3.0]), 1.0);
        assert_eq!(f.grad_norm(&[0.0; 4]), 0.0);
    }

    #[test]
    fn tensor_gradient_matches_finite_differences() {
        let f = TensorProduct::alternating(1.5, 0.0, 0.5, 4);
        let x = [0.3, 0.2, -0.7, 0.1];
        let h = 1e-6;
        let mut g2 = 0.0;
        for k in 0..4 {
            let mut xp = x;
            let mut xm = x;
            xp[k] += h;
            xm[k] -= h;
            let d = (f.eval(&xp) - f.eval(&xm)) / (2.0 * h);
            g2 += d * d;
        }
        assert!((g2.sqrt() - f.grad_norm(&x)).abs() < 1e-7);
        assert!(f.grad_norm(&x) <= f.lipschitz_bound().unwrap());
    }

    #[test]
    fn mixture_gradient_and_bound() {
        let f = Mixture::seeded(4, 1.0, 7, 3);
        let x = [0.2, -0.4, 1.1];
        let h = 1e-6;
        let mut g2 = 0.0;
        for k in 0..3 {
            let mut xp = x;
            let mut xm = x;
            xp[k] += h;
            xm[k] -= h;
            let d = (f.eval(&xp) - f.eval(&xm)) / (2.0 * h);
            g2 += d * d;
        }
        assert!((g2.sqrt() - f.grad_norm(&x)).abs() < 1e-7);
        assert_eq!(f.id(), Mixture::seeded(4, 1.0, 7, 3).id());
        assert_eq!(f.weights, Mixture::seeded(4, 1.0, 7, 3).weights);
    }

    #[test]
    fn registry_grows_and_validates() {
        let mut r = FamilyRegistry::with_defaults();
        let n = r.len();
        r.register(FamilyBuilder::new("custom", "x1^2 clipped", &[], |_, dim| {
            Ok(Arc::new(Constant { c: 3.0, dim }))
        }));
        assert_eq!(r.len(), n + 1);
        let mut bad = BTreeMap::new();
        bad.insert("zzz".to_string(), 1.0);
        assert!(r.build("F1", &bad, 2).is_err());
        assert!(r.build("nope", &BTreeMap::new(), 2).is_err());
        assert!(r.build("F1", &BTreeMap::new(), 0).is_err());
        let mut neg = BTreeMap::new();
        neg.insert("delta".to_string(), -1.0);
        assert!(r.build("F3", &neg, 1).is_err());
        assert!(eval_checked(&NormFamily { dim: 2 }, &[1.0]).is_err());
    }

    #[test]
    fn radial_rearrangement_n2() {
        // n = 2, σ = 1: {f > y} = {|x|² < −2 ln y} has measure 1 − y, so f*(s) = 1 − s
        let f = RadialBump { sigma: 1.0, dim: 2 };
        for &s in &[0.1, 0.5, 0.9] {
            assert!((f.rearrangement_at(s).unwrap() - (1.0 - s)).abs() < 1e-10);
        }
    }
}
