//! Standard errors for statistics of sorted samples.

/// A sample sorted in decreasing order with prefix sums of values and
/// squares, so tail means and their errors are O(1) per query.
#[derive(Debug, Clone)]
pub struct SortedSample {
    v: Vec<f64>,
    prefix: Vec<f64>,
    prefix_sq: Vec<f64>,
}

impl SortedSample {
    /// `values` must already be sorted in decreasing order.
    pub fn new(values: Vec<f64>) -> Self {
        debug_assert!(values.windows(2).all(|w| w[1] <= w[0]));
        let mut prefix = Vec::with_capacity(values.len() + 1);
        let mut prefix_sq = Vec::with_capacity(values.len() + 1);
        prefix.push(0.0);
        prefix_sq.push(0.0);
        let (mut a, mut b) = (0.0, 0.0);
        for &x in &values {
            a += x;
            b += x * x;
            prefix.push(a);
            prefix_sq.push(b);
        }
        Self { v: values, prefix, prefix_sq }
    }

    pub fn from_unsorted(mut values: Vec<f64>) -> Self {
        values.sort_unstable_by(|a, b| b.total_cmp(a));
        Self::new(values)
    }

    pub fn len(&self) -> usize {
        self.v.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.v
    }

    /// `v₍ₖ₎`, 1-based.
    pub fn at(&self, k: usize) -> f64 {
        self.v[k.clamp(1, self.v.len()) - 1]
    }

    /// Mean of the `k` largest values: the maximal average at `t = k/N`.
    pub fn tail_mean(&self, k: usize) -> f64 {
        let k = k.clamp(1, self.v.len());
        self.prefix[k] / k as f64
    }

    /// Standard error of [`Self::tail_mean`], from the asymptotic variance
    /// `Var((X − q)₊) / (t² N)` of the upper-tail mean at level `t`.
    pub fn tail_mean_se(&self, k: usize) -> f64 {
        let n = self.v.len() as f64;
        let k = k.clamp(1, self.v.len());
        let q = self.v[k - 1];
        let kf = k as f64;
        let m1 = (self.prefix[k] - kf * q) / n;
        let m2 = (self.prefix_sq[k] - 2.0 * q * self.prefix[k] + kf * q * q) / n;
        let var = (m2 - m1 * m1).max(0.0);
        let t = kf / n;
        var.sqrt() / (t * n.sqrt())
    }

    /// Standard error of the order statistic `v₍ₖ₎`: `√(t(1−t)/N)` times a
    /// local spacing estimate of the quantile slope.
    pub fn quantile_se(&self, k: usize) -> f64 {
        let n = self.v.len();
        let m = ((n as f64).sqrt() / 2.0).max(1.0) as usize;
        let lo = k.saturating_sub(m).max(1);
        let hi = (k + m).min(n);
        if hi <= lo {
            return 0.0;
        }
        let slope = (self.at(lo) - self.at(hi)) * n as f64 / (hi - lo) as f64;
        let t = k as f64 / n as f64;
        (t * (1.0 - t) / n as f64).sqrt() * slope
    }

    pub fn mean(&self) -> f64 {
        self.prefix[self.v.len()] / self.v.len() as f64
    }
}

/// Log-spaced integer ranks in `[k_min, k_max]`, at most `count` of them.
pub fn log_ranks(k_min: usize, k_max: usize, count: usize) -> Vec<usize> {
    let k_min = k_min.max(1);
    if k_max < k_min {
        return Vec::new();
    }
    let count = count.max(2);
    let (a, b) = ((k_min as f64).ln(), (k_max as f64).ln());
    let mut out: Vec<usize> = (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp().round() as usize)
        .map(|k| k.clamp(k_min, k_max))
        .collect();
    out.dedup();
    out
}

/// Running averages of the decreasing rearrangement of a block step
/// function, evaluated at `t`.
pub fn rearranged_average(mass: &[f64], value: &[f64], ts: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..value.len()).collect();
    idx.sort_by(|&i, &j| value[j].total_cmp(&value[i]));
    let mut out = Vec::with_capacity(ts.len());
    for &t in ts {
        let (mut acc, mut used) = (0.0, 0.0);
        for &i in &idx {
            let take = mass[i].min(t - used);
            if take <= 0.0 {
                break;
            }
            acc += value[i] * take;
            used += take;
        }
        out.push(acc / t);
    }
    out
}
