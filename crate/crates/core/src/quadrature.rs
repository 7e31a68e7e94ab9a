//! Fixed-order quadrature rules.

use std::f64::consts::PI;

/// Nodes of the 8-point Gauss–Legendre rule on `[-1, 1]` (positive half).
const GL8_X: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329_0,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL8_W: [f64; 4] = [
    0.362_683_783_378_362_0,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// `∫_a^b f` with the 8-point Gauss–Legendre rule.
#[inline]
pub fn gl8<F: FnMut(f64) -> f64>(a: f64, b: f64, mut f: F) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut acc = 0.0;
    for i in 0..4 {
        let d = h * GL8_X[i];
        acc += GL8_W[i] * (f(c - d) + f(c + d));
    }
    acc * h
}

/// Composite 8-point Gauss–Legendre over `panels` equal panels.
pub fn gl8_composite<F: FnMut(f64) -> f64>(a: f64, b: f64, panels: usize, mut f: F) -> f64 {
    let panels = panels.max(1);
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|k| {
            let lo = a + k as f64 * h;
            gl8(lo, lo + h, &mut f)
        })
        .sum()
}

/// Composite Gauss–Legendre over `[a, b]` split at the given breakpoints,
/// with `panels` panels between consecutive breakpoints.
pub fn gl8_with_breaks<F: FnMut(f64) -> f64>(
    a: f64,
    b: f64,
    breaks: &[f64],
    panels: usize,
    mut f: F,
) -> f64 {
    let mut pts = vec![a];
    let mut inner: Vec<f64> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
    inner.sort_by(|x, y| x.total_cmp(y));
    pts.extend(inner);
    pts.push(b);
    pts.windows(2)
        .map(|w| gl8_composite(w[0], w[1], panels, &mut f))
        .sum()
}

/// Gauss–Hermite rule for the standard Gaussian measure:
/// `∫ f dγ₁ ≈ Σ wᵢ f(xᵢ)` with `Σ wᵢ = 1`.
#[derive(Debug, Clone)]
pub struct GaussHermite {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussHermite {
    /// Rule with `n` nodes. Nodes of the physicists' polynomial `H_n` are
    /// found by Newton iteration on the orthonormal recurrence, then rescaled.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "need at least one node");
        let mut x_phys = vec![0.0; n];
        let mut w_phys = vec![0.0; n];
        let pim4 = PI.powf(-0.25);
        let m = n.div_ceil(2);
        let mut z = 0.0;
        for i in 0..m {
            z = match i {
                0 => (2.0 * n as f64 + 1.0).sqrt() - 1.85575 * (2.0 * n as f64 + 1.0).powf(-1.0 / 6.0),
                1 => z - 1.14 * (n as f64).powf(0.426) / z,
                2 => 1.86 * z - 0.86 * x_phys[0],
                3 => 1.91 * z - 0.91 * x_phys[1],
                _ => 2.0 * z - x_phys[i - 2],
            };
            let mut pp = 0.0;
            for _ in 0..100 {
                let mut p1 = pim4;
                let mut p2 = 0.0;
                for j in 0..n {
                    let p3 = p2;
                    p2 = p1;
                    let jf = j as f64;
                    p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
                }
                pp = (2.0 * n as f64).sqrt() * p2;
                let dz = p1 / pp;
                z -= dz;
                if dz.abs() <= 1e-15 * z.abs().max(1.0) {
                    break;
                }
            }
            x_phys[i] = z;
            w_phys[i] = 2.0 / (pp * pp);
            x_phys[n - 1 - i] = -z;
            w_phys[n - 1 - i] = w_phys[i];
        }
        let sqrt_pi = PI.sqrt();
        let nodes = x_phys.iter().rev().map(|x| x * std::f64::consts::SQRT_2).collect();
        let weights = w_phys.iter().rev().map(|w| w / sqrt_pi).collect();
        Self { nodes, weights }
    }

    /// `∫ f dγ₁`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}
