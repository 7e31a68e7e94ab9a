use super::families::TestFunction;
use crate::error::{Error, Result};
use crate::quantile::{GridFunction, QuantileFunction};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use std::ops::Range;

/// Smallest sample size accepted by [`sample_rearrangement`].
pub const MIN_SAMPLES: usize = 1000;
/// Number of independent substreams a sample is split into. Fixed so the
/// output does not depend on the thread count.
pub const DEFAULT_PARTITIONS: usize = 20;

fn partition_ranges(n: usize, parts: usize) -> Vec<Range<usize>> {
    (0..parts).map(|p| (p * n / parts)..((p + 1) * n / parts)).collect()
}

/// Applies `g` to `n` standard Gaussian points in `ℝ^dim`. Partition `p`
/// draws from the ChaCha8 stream `p` of `seed`, so results are reproducible
/// from `(seed, n)` regardless of scheduling.
pub fn gaussian_map<T, G>(dim: usize, n: usize, seed: u64, g: G) -> Vec<T>
where
    T: Send,
    G: Fn(&[f64]) -> T + Sync,
{
    let ranges = partition_ranges(n, DEFAULT_PARTITIONS);
    let chunks: Vec<Vec<T>> = ranges
        .into_par_iter()
        .enumerate()
        .map(|(p, r)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(p as u64);
            let mut x = vec![0.0; dim];
            r.map(|_| {
                for v in x.iter_mut() {
                    *v = StandardNormal.sample(&mut rng);
                }
                g(&x)
            })
            .collect()
        })
        .collect();
    chunks.into_iter().flatten().collect()
}

/// Rearrangements of `|f|` and `|∇f|` from a seeded Gaussian sample, with
/// the cumulative gradient `G(i/N) = (1/N) Σ_{j≤i} |∇f(x₍ⱼ₎)|` taken in the
/// order of decreasing `|f|`.
#[derive(Debug, Clone)]
pub struct EmpiricalRearrangement {
    pub source: String,
    pub dim: usize,
    pub n_samples: usize,
    pub seed: u64,
    /// Signed values in draw order.
    pub values: Vec<f64>,
    /// `|∇f|` in draw order.
    pub grads: Vec<f64>,
    /// Sample indices sorted by decreasing `|f|`, ties by index.
    pub order: Vec<usize>,
    pub f_star: QuantileFunction,
    pub grad_star: QuantileFunction,
    /// `G` at `i/N` for `i = 0..=N`.
    pub cumulative: Vec<f64>,
    pub partitions: Vec<Range<usize>>,
}

/// Draws `n` Gaussian points and builds the empirical rearrangements.
pub fn sample_rearrangement(f: &dyn TestFunction, n: usize, seed: u64) -> Result<EmpiricalRearrangement> {
    if n < MIN_SAMPLES {
        return Err(Error::TooFewSamples { got: n, min: MIN_SAMPLES });
    }
    if f.dim() == 0 {
        return Err(Error::DimensionMismatch { expected: 1, got: 0 });
    }
    let pairs = gaussian_map(f.dim(), n, seed, |x| (f.eval(x), f.grad_norm(x)));
    let (values, grads): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    EmpiricalRearrangement::from_samples(f.id(), f.dim(), seed, values, grads)
}

impl EmpiricalRearrangement {
    /// Builds the rearrangements from signed values and gradient norms.
    pub fn from_samples(
        source: String,
        dim: usize,
        seed: u64,
        values: Vec<f64>,
        grads: Vec<f64>,
    ) -> Result<Self> {
        let n = values.len();
        if grads.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: grads.len() });
        }
        if n == 0 {
            return Err(Error::TooFewSamples { got: 0, min: 1 });
        }
        if let Some(v) = values.iter().chain(&grads).find(|v| !v.is_finite()) {
            return Err(Error::NonFinite(*v));
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.par_sort_unstable_by(|&i, &j| values[j].abs().total_cmp(&values[i].abs()).then(i.cmp(&j)));
        let f_sorted: Vec<f64> = order.iter().map(|&i| values[i].abs()).collect();
        let mut g_sorted = grads.clone();
        g_sorted.par_sort_unstable_by(|a, b| b.total_cmp(a));
        let mut cumulative = Vec::with_capacity(n + 1);
        cumulative.push(0.0);
        let nf = n as f64;
        let mut acc = 0.0;
        for &i in &order {
            acc += grads[i] / nf;
            cumulative.push(acc);
        }
        Ok(Self {
            source,
            dim,
            seed,
            n_samples: n,
            f_star: QuantileFunction::from_sorted_desc(f_sorted)?,
            grad_star: QuantileFunction::from_sorted_desc(g_sorted)?,
            values,
            grads,
            order,
            cumulative,
            partitions: partition_ranges(n, DEFAULT_PARTITIONS.min(n)),
        })
    }

    /// `G` as a linear grid function on `i/N`.
    pub fn cumulative_gradient(&self) -> GridFunction {
        GridFunction::linear(self.f_star.knots().to_vec(), self.cumulative.clone())
            .expect("cumulative sums are finite")
    }

    /// Plain mean of `|∇f|` in draw order.
    pub fn mean_grad(&self) -> f64 {
        self.grads.iter().sum::<f64>() / self.n_samples as f64
    }

    /// Signed values sorted in decreasing order: the rearrangement of `f`
    /// itself rather than of `|f|`.
    pub fn signed_sorted_desc(&self) -> Vec<f64> {
        let mut v = self.values.clone();
        v.par_sort_unstable_by(|a, b| b.total_cmp(a));
        v
    }

    /// Per-partition `(values, grads)` slices, for batch-means errors.
    pub fn batches(&self) -> impl Iterator<Item = (&[f64], &[f64])> {
        self.partitions
            .iter()
            .map(|r| (&self.values[r.clone()], &self.grads[r.clone()]))
    }

    /// Piecewise-linear rebuild of `f*` on blocks of `window` samples.
    pub fn linear_f_star(&self, window: usize) -> Result<QuantileFunction> {
        self.f_star.linear_rebuild(window)
    }
}

/// Mean and batch-means standard error of per-batch estimates.
pub fn batch_mean_se(estimates: &[f64]) -> (f64, f64) {
    let b = estimates.len() as f64;
    let mean = estimates.iter().sum::<f64>() / b;
    if estimates.len() < 2 {
        return (mean, 0.0);
    }
    let var = estimates.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (b - 1.0);
    (mean, (var / b).sqrt())
}

/// Sample mean and its standard error.
pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::normal_quantile;
    use crate::quantile::sup_distance;
    use crate::sampler::families::{Constant, LinearFamily, RampFamily};

    #[test]
    fn too_few_samples() {
        let f = Constant { c: 1.0, dim: 1 };
        assert!(matches!(sample_rearrangement(&f, 999, 1), Err(Error::TooFewSamples { .. })));
    }

    #[test]
    fn constant_function() {
        let e = sample_rearrangement(&Constant { c: 2.0, dim: 3 }, 2000, 3).unwrap();
        assert!(e.f_star.values().iter().all(|&v| v == 2.0));
        assert!(e.grad_star.values().iter().all(|&v| v == 0.0));
        assert!(e.cumulative.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn reproducible_and_thread_independent() {
        let f = LinearFamily { a: 1.0, b: 0.0, dim: 2 };
        let a = sample_rearrangement(&f, 5000, 11).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| sample_rearrangement(&f, 5000, 11).unwrap());
        assert_eq!(a.values, b.values);
        let c = sample_rearrangement(&f, 5000, 12).unwrap();
        assert_ne!(a.values, c.values);
    }

    #[test]
    fn prefix_sums_are_exact() {
        let f = RampFamily { r: 0.0, delta: 0.5, dim: 2 };
        let e = sample_rearrangement(&f, 4000, 5).unwrap();
        let n = e.n_samples as f64;
        for i in 1..=e.n_samples {
            let g = e.grads[e.order[i - 1]];
            assert_eq!(e.cumulative[i], e.cumulative[i - 1] + g / n);
        }
        let total = *e.cumulative.last().unwrap();
        assert!((total - e.mean_grad()).abs() <= 1e-12 * total.max(1.0));
        assert!(e.cumulative.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn abs_x1_matches_closed_form() {
        let f = LinearFamily { a: 1.0, b: 0.0, dim: 1 };
        let e = sample_rearrangement(&f, 100_000, 2024).unwrap();
        let exact = crate::quantile::GridFunction::from_fn(
            crate::quantile::uniform_grid(4000).unwrap(),
            |s| normal_quantile(1.0 - s / 2.0),
        )
        .unwrap();
        assert!(sup_distance(&e.f_star, &exact, 0.01, 0.99) <= 0.02);
    }

    #[test]
    fn sharp_ramp_plateau_mass() {
        // λ_f(1⁻) = γ{x₁ < r} → Φ(0) = 1/2 as δ → 0
        let f = RampFamily { r: 0.0, delta: 1e-6, dim: 2 };
        let e = sample_rearrangement(&f, 100_000, 9).unwrap();
        let plateau = e.values.iter().filter(|&&v| v >= 1.0).count() as f64 / e.n_samples as f64;
        assert!((plateau - 0.5).abs() < 3.0 * (0.25f64 / 1e5).sqrt() + 1e-6);
    }

    #[test]
    fn batch_errors() {
        let (m, se) = batch_mean_se(&[1.0, 1.0, 1.0]);
        assert_eq!((m, se), (1.0, 0.0));
        let (m, se) = mean_se(&[0.0, 2.0]);
        assert_eq!(m, 1.0);
        assert!((se - 1.0).abs() < 1e-15);
    }
}
