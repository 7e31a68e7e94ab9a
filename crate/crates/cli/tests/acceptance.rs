//! Acceptance gate. Runs criteria 1 to 12 in order and prints one PASS/FAIL
//! line each; exits nonzero if any fails. Runs without the test harness so
//! the lines are always shown and the timed criteria never share the CPU.

#![allow(clippy::excessive_precision)]

use gaussym::gaussian::{iso_profile, iso_profile_ratio, normal_cdf, normal_quantile};
use gaussym::quantile::{kolmogorov_distance, sup_distance, uniform_grid, GridFunction};
use gaussym::sampler::{
    family_catalog, sample_rearrangement, symmetrize_empirical, BoxedFunction, Constant, ExpFamily,
    FamilyRegistry, LinearFamily, RadialBump,
};
use gaussym::sets::{catalog_sets, GaussianSet, McOptions};
use gaussym::suite::{
    check_concentration, check_entropy_lower_bound, check_gross, check_ledoux, check_one_dim_ls,
    check_oscillation, check_poincare_l1, check_polya_szego, check_talenti, check_truncation_friendly,
    default_window, entropy, gross_exponential_oracle, run_check, CheckContext, DiscreteSpace,
    InequalityReport, LineBump, Verdict, BUMP_SCALES,
};
use gaussym_cli::{expected_rows, run, RunConfig, RunOptions};
use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

const SAMPLES: usize = 100_000;
const SEEDS: [u64; 3] = [0, 1, 2];

type Outcome = (bool, String);
type Criterion = (&'static str, fn() -> Outcome);

fn secs(d: Duration) -> String {
    format!("{:.2}s", d.as_secs_f64())
}

fn not_violated(r: &InequalityReport) -> bool {
    r.verdict != Verdict::Violated
}

fn profile_exactness() -> Outcome {
    let start = Instant::now();
    let centre = (iso_profile(0.5) - 1.0 / (2.0 * std::f64::consts::PI).sqrt()).abs();
    let sym = (1..=10_000)
        .map(|k| {
            let t = k as f64 / 10_001.0;
            (iso_profile(t) - iso_profile(1.0 - t)).abs()
        })
        .fold(0.0, f64::max);
    let h = 1e-3;
    let curvature = (0..=90)
        .map(|k| {
            let t = 0.05 + 0.01 * k as f64;
            let d2 = (iso_profile(t + h) - 2.0 * iso_profile(t) + iso_profile(t - h)) / (h * h);
            let want = -1.0 / iso_profile(t);
            ((d2 - want) / want).abs()
        })
        .fold(0.0, f64::max);
    let el = start.elapsed();
    (
        centre <= 1e-12 && sym <= 1e-12 && curvature <= 1e-4 && el < Duration::from_secs(1),
        format!("|I(1/2)-1/sqrt(2pi)|={centre:.1e} sym={sym:.1e} I''+1/I rel={curvature:.1e} in {}", secs(el)),
    )
}

/// `I(t) / (t √(2 ln 1/t))`, computed independently in multiprecision.
const RATIO_ORACLE: [(f64, f64); 4] = [
    (1e-3, 0.905_881_238_828_381_34),
    (1e-6, 0.941_370_155_647_779_42),
    (1e-9, 0.956_265_875_195_050_29),
    (1e-12, 0.964_696_341_401_414_93),
];

fn profile_asymptotics() -> Outcome {
    let got: Vec<f64> = RATIO_ORACLE.iter().map(|&(t, _)| iso_profile_ratio(t).unwrap()).collect();
    let ordered = got.windows(2).all(|w| (1.0 - w[1]).abs() < (1.0 - w[0]).abs());
    let err = got.iter().zip(&RATIO_ORACLE).map(|(g, (_, want))| (g - want).abs()).fold(0.0, f64::max);
    (ordered && err <= 1e-6, format!("ratios {got:.6?}, max deviation {err:.1e}, ordered={ordered}"))
}

fn isoperimetric() -> Outcome {
    let half = [-2.0, -1.0, 0.0, 1.0, 2.0]
        .iter()
        .map(|&r| {
            let h = GaussianSet::half_space(r, 1).unwrap();
            (h.perimeter() - iso_profile(normal_cdf(r))).abs()
        })
        .fold(0.0, f64::max);
    let sets = catalog_sets();
    let (analytic, mc): (Vec<&GaussianSet>, Vec<&GaussianSet>) = sets.iter().partition(|s| s.dim <= 2 || matches!(s.shape, gaussym::sets::Shape::Slab { .. }));
    let start = Instant::now();
    let analytic_ok = analytic.iter().all(|s| {
        let m = s.iso_margin().unwrap();
        m.std_error == 0.0 && m.value > 0.0
    });
    let t_analytic = start.elapsed();
    let start = Instant::now();
    let mut worst_z = f64::INFINITY;
    for s in &mc {
        let m = s.iso_margin_with(McOptions { samples: 1_000_000, seed: 0 }).unwrap();
        worst_z = worst_z.min(m.value / m.std_error);
    }
    let t_mc = start.elapsed();
    (
        half <= 1e-12
            && analytic_ok
            && worst_z > 3.0
            && t_analytic < Duration::from_secs(1)
            && t_mc < Duration::from_secs(10),
        format!(
            "half-space gap {half:.1e}; {} analytic sets positive={analytic_ok} in {}; {} MC balls min margin/se={worst_z:.1} in {}",
            analytic.len(),
            secs(t_analytic),
            mc.len(),
            secs(t_mc)
        ),
    )
}

fn rearrangement() -> Outcome {
    let f = LinearFamily { a: 1.0, b: 0.0, dim: 1 };
    let e = sample_rearrangement(&f, SAMPLES, 2024).unwrap();
    let exact = GridFunction::from_fn(uniform_grid(4000).unwrap(), |s| normal_quantile(1.0 - s / 2.0)).unwrap();
    let sup = sup_distance(&e.f_star, &exact, 0.01, 0.99);
    let mut ok = sup <= 0.02;
    let mut worst_k = 0.0f64;
    let mut slowest = Duration::ZERO;
    let reg = FamilyRegistry::with_defaults();
    for name in reg.names() {
        let start = Instant::now();
        let g = reg.build(&name, &BTreeMap::new(), 2).unwrap();
        let e = sample_rearrangement(g.as_ref(), SAMPLES, 11).unwrap();
        let sym = symmetrize_empirical(&e, default_window(SAMPLES)).unwrap();
        let e2 = sample_rearrangement(&sym, SAMPLES, 12).unwrap();
        let k = kolmogorov_distance(&e2.f_star, &e.f_star);
        let el = start.elapsed();
        worst_k = worst_k.max(k);
        slowest = slowest.max(el);
        ok &= k <= 0.02 && el < Duration::from_secs(5);
    }
    (ok, format!("F1 sup-distance {sup:.4}; max Kolmogorov distance of f° {worst_k:.4}; slowest family {}", secs(slowest)))
}

fn symmetrization_suite() -> Outcome {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    pool.install(|| {
        let start = Instant::now();
        let mut runs = 0;
        let mut violated = Vec::new();
        for f in family_catalog() {
            for seed in SEEDS {
                let e = sample_rearrangement(f.as_ref(), SAMPLES, seed).unwrap();
                let w = default_window(SAMPLES);
                let reports = [
                    check_ledoux(&e),
                    check_talenti(&e, w).unwrap(),
                    check_oscillation(&e, 256),
                    check_polya_szego(&e, w, 256).unwrap(),
                ];
                for r in reports {
                    runs += 1;
                    if !not_violated(&r) {
                        violated.push(format!("{} {} n={} seed={seed}", r.inequality_id, f.id(), f.dim()));
                    }
                }
            }
        }
        let el = start.elapsed();
        (
            violated.is_empty() && el < Duration::from_secs(120),
            format!("{runs} reports, violated: {violated:?}, single-threaded in {}", secs(el)),
        )
    })
}

fn gross() -> Outcome {
    let mc = McOptions { samples: SAMPLES, seed: 0 };
    let mut ok = true;
    let mut constant = 0.0f64;
    for dim in [1, 2, 4, 8] {
        let r = check_gross(&Constant { c: 1.7, dim }, mc).unwrap();
        constant = constant.max(r.worst_margin.abs());
    }
    ok &= constant <= 1e-10;
    let mut exp_margin = f64::INFINITY;
    let mut oracle_err = 0.0f64;
    for a in [0.25, 0.5, 1.0] {
        for dim in [1, 4] {
            let r = check_gross(&ExpFamily { a, dim }, mc).unwrap();
            let (lhs, rhs) = gross_exponential_oracle(a);
            exp_margin = exp_margin.min(r.worst_margin);
            oracle_err = oracle_err.max(((r.lhs_summary - lhs) / lhs).abs()).max(((r.rhs_summary - rhs) / rhs).abs());
        }
    }
    ok &= exp_margin >= -1e-8 && oracle_err <= 1e-6;
    let mut bump_margin = f64::INFINITY;
    for dim in [1, 2, 4, 8] {
        bump_margin = bump_margin.min(check_gross(&RadialBump { sigma: 1.0, dim }, mc).unwrap().worst_margin);
    }
    ok &= bump_margin > 0.0;
    (
        ok,
        format!("constant |margin| {constant:.1e}; F2 min margin {exp_margin:.1e}, oracle rel err {oracle_err:.1e}; F4 min margin {bump_margin:.3e}"),
    )
}

fn one_dim_ls() -> Outcome {
    let start = Instant::now();
    let mut worst = f64::INFINITY;
    for scale in BUMP_SCALES {
        let r = check_one_dim_ls(&LineBump { scale }).unwrap();
        worst = worst.min(r.points.iter().map(|c| c.margin()).fold(f64::INFINITY, f64::min));
    }
    let el = start.elapsed();
    (worst >= -1e-8 && el < Duration::from_secs(1), format!("min margin over both forms and {} scales {worst:.3e} in {}", BUMP_SCALES.len(), secs(el)))
}

fn poincare() -> Outcome {
    let f = LinearFamily { a: 1.0, b: 0.0, dim: 1 };
    let e = sample_rearrangement(&f, 4_000_000, 0).unwrap();
    let r = check_poincare_l1(&e);
    let lhs_err = (r.lhs_summary - (2.0 / std::f64::consts::PI).sqrt()).abs();
    let margin_err = (r.worst_margin - 0.455_429_576_512_634_90).abs();
    (
        lhs_err <= 1e-3 && margin_err <= r.tolerance && not_violated(&r),
        format!("LHS {:.5} (err {lhs_err:.1e}), margin {:.5} (err {margin_err:.1e}, tol {:.1e})", r.lhs_summary, r.worst_margin, r.tolerance),
    )
}

fn concentration() -> Outcome {
    let mut ok = true;
    let mut families = 0;
    let mut worst_spread = 0.0f64;
    let mut log_half_violations = 0;
    let mut failures = Vec::new();
    for f in family_catalog() {
        let Some(l) = f.lipschitz_bound() else { continue };
        families += 1;
        let mut integrals = Vec::new();
        for seed in SEEDS {
            let e = sample_rearrangement(f.as_ref(), SAMPLES, seed).unwrap();
            let r = check_concentration(&e, Some(l), 256).unwrap();
            let pointwise = r.points.iter().filter(|c| c.label == "pointwise").all(|c| c.margin() >= -c.tolerance);
            let exp_ok = r.points.iter().filter(|c| c.label == "exp-integral").all(|c| c.margin() >= -c.tolerance);
            let value = r.recorded["exp_integral"];
            if !(pointwise && exp_ok && value.is_finite()) {
                failures.push(format!("{} n={} seed={seed}", f.id(), f.dim()));
            }
            if r.points.iter().any(|c| c.label == "LlogHalf" && c.margin() < -c.tolerance) {
                log_half_violations += 1;
            }
            integrals.push(value);
        }
        let hi = integrals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lo = integrals.iter().cloned().fold(f64::INFINITY, f64::min);
        worst_spread = worst_spread.max(hi / lo - 1.0);
    }
    ok &= failures.is_empty() && worst_spread <= 0.05;
    (
        ok,
        format!(
            "{families} Lipschitz members x {} seeds, failures {failures:?}, max seed spread of exp integral {:.2}%, LlogHalf violations {log_half_violations}",
            SEEDS.len(),
            100.0 * worst_spread
        ),
    )
}

fn entropy_checks() -> Outcome {
    let space = DiscreteSpace::new(vec![0.5, 0.5]).unwrap();
    let g = [2.0, 0.0];
    let gap = (entropy(&space, &g).unwrap() - 2f64.ln()).abs();
    let r = check_entropy_lower_bound("two-point", &space, &g).unwrap();
    let mut ok = gap <= 1e-12 && r.worst_margin.abs() <= 1e-12;
    let mut checked = 0;
    let mut mismatches = 0.0;
    for f in family_catalog() {
        let e = sample_rearrangement(f.as_ref(), 20_000, 3).unwrap();
        let (t1, t2) = (e.f_star.eval(0.75), e.f_star.eval(0.25));
        if t1 >= t2 {
            continue;
        }
        let r = check_truncation_friendly(f.clone(), t1, t2, 20_000, 4).unwrap();
        let c = r.points.iter().find(|c| c.label == "identity-mismatches").unwrap();
        mismatches += c.lhs;
        checked += 1;
    }
    ok &= mismatches == 0.0 && checked > 0;
    (ok, format!("two-point |Ent - log 2| {gap:.1e}, report margin {:.1e}; restriction identity mismatches {mismatches} over {checked} members", r.worst_margin))
}

/// Ratios recorded on the first validated build: seed 0, N = 10⁵, n = 2,
/// exponent 2.
const RATIO_CAPS: [(&str, &str, f64); 15] = [
    ("feissner", "F1", 1.197_656_081_031_369_4),
    ("feissner", "F3", 0.415_208_609_113_522_14),
    ("feissner", "F4", 1.100_529_937_511_004_3),
    ("feissner", "F5", 1.332_467_524_871_212_1),
    ("feissner", "F6", 0.730_826_100_840_376_1),
    ("ls-lp", "F1", 0.503_332_844_670_745_2),
    ("ls-lp", "F3", 0.182_219_358_987_948_92),
    ("ls-lp", "F4", 0.322_428_296_604_140_35),
    ("ls-lp", "F5", 0.495_969_336_783_391_2),
    ("ls-lp", "F6", 0.246_592_040_139_892_4),
    ("poincare-dual", "F1", 1.851_354_459_897_465_2),
    ("poincare-dual", "F3", 1.758_050_496_262_509_2),
    ("poincare-dual", "F4", 1.807_901_461_096_748),
    ("poincare-dual", "F5", 1.841_217_001_876_657_2),
    ("poincare-dual", "F6", 1.787_651_157_545_930_8),
];

fn ratio_regressions() -> Outcome {
    let reg = FamilyRegistry::with_defaults();
    let mut ok = true;
    let mut worst = f64::NEG_INFINITY;
    let mut samples: BTreeMap<&str, (BoxedFunction, gaussym::EmpiricalRearrangement)> = BTreeMap::new();
    for (check, fam, cap) in RATIO_CAPS {
        let (f, e) = samples.entry(fam).or_insert_with(|| {
            let f = reg.build(fam, &BTreeMap::new(), 2).unwrap();
            let e = sample_rearrangement(f.as_ref(), SAMPLES, 0).unwrap();
            (f, e)
        });
        let mut ctx = CheckContext { seed: 0, ..Default::default() };
        ctx.caps.insert(check.to_string(), cap * 1.01);
        let r = run_check(check, f, Some(e), &ctx).unwrap();
        let ratio = r.ratio.unwrap_or(f64::NAN);
        let drift = ratio / cap - 1.0;
        worst = worst.max(drift);
        ok &= drift <= 0.01 && not_violated(&r);
    }
    (ok, format!("{} capped ratios, largest relative increase {:+.2e}", RATIO_CAPS.len(), worst))
}

fn determinism() -> Outcome {
    let reg = FamilyRegistry::with_defaults();
    let text = "checks = ledoux, talenti, oscillation, polya-szego, gross, poincare-l1, concentration, feissner\n\
                families = F1, F3{delta=0.1|0.25}, F7, const\n\
                dims = 1, 2\n\
                n_samples = 20000\n\
                grid_size = 64\n\
                seeds = 0, 1\n\
                format = csv\n";
    let cfg = RunConfig::parse(text, &reg).unwrap();
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    let opts = |d: &tempfile::TempDir| RunOptions { out_dir: Some(d.path().to_path_buf()), ..Default::default() };
    let want = expected_rows(&cfg);
    run(cfg.clone(), &reg, &opts(&dirs[0])).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    pool.install(|| run(cfg, &reg, &opts(&dirs[1])).unwrap());
    let a = std::fs::read(dirs[0].path().join("summary.csv")).unwrap();
    let b = std::fs::read(dirs[1].path().join("summary.csv")).unwrap();
    let rows = a.iter().filter(|&&c| c == b'\n').count() - 1;
    (a == b && rows == want, format!("{rows} of {want} rows, {} bytes, identical={}", a.len(), a == b))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("profile exactness", profile_exactness),
        ("profile asymptotics", profile_asymptotics),
        ("isoperimetric equality and margins", isoperimetric),
        ("rearrangement correctness", rearrangement),
        ("ledoux, talenti, oscillation, polya-szego suite", symmetrization_suite),
        ("gross log-Sobolev", gross),
        ("one-dimensional log-Sobolev forms", one_dim_ls),
        ("L1 Poincare", poincare),
        ("concentration chain", concentration),
        ("entropy support bound and truncation", entropy_checks),
        ("ratio regressions", ratio_regressions),
        ("determinism", determinism),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let (pass, detail) = match catch_unwind(AssertUnwindSafe(check)) {
            Ok(o) => o,
            Err(p) => {
                let msg = p
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                (false, format!("panicked: {msg}"))
            }
        };
        println!("{} criterion {:>2} {name}: {detail}", if pass { "PASS" } else { "FAIL" }, i + 1);
        if !pass {
            failed.push(i + 1);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all {} criteria pass", criteria.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failing criteria {failed:?}");
        ExitCode::FAILURE
    }
}
