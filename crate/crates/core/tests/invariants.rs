use gaussym::gaussian::{iso_profile, normal_cdf, normal_quantile};
use gaussym::quantile::{kolmogorov_distance, sup_distance, uniform_grid, GridFunction};
use gaussym::sampler::{sample_rearrangement, FamilyRegistry, LinearFamily};
use gaussym::sets::GaussianSet;
use gaussym::suite::{
    check_ledoux, check_oscillation, check_polya_szego, check_talenti, default_window, run_check, CheckContext,
    CheckRegistry, InequalityReport, Verdict,
};
use proptest::prelude::*;
use std::collections::BTreeMap;

#[test]
fn profile_second_difference_bound() {
    let h = 1e-4;
    for k in 0..=900 {
        let t = 0.05 + 0.001 * k as f64;
        let i = iso_profile(t);
        let d2 = (iso_profile(t + h) - 2.0 * i + iso_profile(t - h)) / (h * h);
        assert!((d2 + 1.0 / i).abs() <= 1e-4 * (1.0 + 1.0 / (i * i)), "t={t}");
    }
}

#[test]
fn profile_symmetric_on_uniform_grid() {
    for k in 1..=10_000 {
        let t = k as f64 / 10_001.0;
        assert!((iso_profile(t) - iso_profile(1.0 - t)).abs() <= 1e-12, "t={t}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn profile_ratios_strictly_monotone(mut ts in proptest::collection::vec(1e-8f64..0.999_999, 2..50)) {
        ts.sort_by(f64::total_cmp);
        ts.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
        for w in ts.windows(2) {
            let (s, t) = (w[0], w[1]);
            prop_assert!(iso_profile(s) / s > iso_profile(t) / t);
            prop_assert!(s / iso_profile(s) < t / iso_profile(t));
        }
    }

    #[test]
    fn half_space_margin_vanishes(r in -6.0f64..6.0, dim in 1usize..9) {
        let m = GaussianSet::half_space(r, dim).unwrap().iso_margin().unwrap();
        prop_assert!(m.value.abs() <= 1e-12);
        let mirrored = GaussianSet::half_space(-r, dim).unwrap().iso_margin().unwrap();
        prop_assert!((mirrored.profile - m.profile).abs() <= 1e-15);
    }

    #[test]
    fn round_trip_below_median(r in -6.0f64..0.0) {
        prop_assert!((normal_quantile(normal_cdf(r)) - r).abs() <= 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn constants_never_violate(c in -5.0f64..5.0, dim_ix in 0usize..4, seed in 0u64..1000) {
        let dim = [1usize, 2, 4, 8][dim_ix];
        let reg = FamilyRegistry::with_defaults();
        let mut p = BTreeMap::new();
        p.insert("c".to_string(), c);
        let f = reg.build("const", &p, dim).unwrap();
        let ctx = CheckContext { n_samples: 4000, seed, grid_size: 64, ..Default::default() };
        let e = sample_rearrangement(f.as_ref(), ctx.n_samples, seed).unwrap();
        for info in CheckRegistry.iter() {
            let r = run_check(info.id, &f, Some(&e), &ctx).unwrap();
            prop_assert_ne!(r.verdict, Verdict::Violated, "{}", info.id);
            if r.verdict != Verdict::NotApplicable && r.ratio.is_none() {
                prop_assert!(r.worst_margin >= -1e-12, "{} margin {}", info.id, r.worst_margin);
            }
        }
    }
}

fn symmetrization_reports(f: &dyn gaussym::TestFunction, n: usize, seed: u64) -> Vec<InequalityReport> {
    let e = sample_rearrangement(f, n, seed).unwrap();
    let w = default_window(n);
    vec![
        check_ledoux(&e),
        check_talenti(&e, w).unwrap(),
        check_oscillation(&e, 128),
        check_polya_szego(&e, w, 128).unwrap(),
    ]
}

#[test]
fn doubling_samples_keeps_verdicts() {
    let reg = FamilyRegistry::with_defaults();
    for name in ["F1", "F3", "F4", "F5", "F7"] {
        let f = reg.build(name, &BTreeMap::new(), 2).unwrap();
        for seed in 0..5 {
            let small = symmetrization_reports(f.as_ref(), 25_000, seed);
            let large = symmetrization_reports(f.as_ref(), 50_000, seed);
            for (a, b) in small.iter().zip(&large) {
                if a.verdict == Verdict::Holds {
                    assert_ne!(b.verdict, Verdict::Violated, "{} {name} seed {seed}", a.inequality_id);
                }
            }
        }
    }
}

#[test]
fn independent_seeds_agree() {
    let reg = FamilyRegistry::with_defaults();
    for name in reg.names() {
        let f = reg.build(&name, &BTreeMap::new(), 2).unwrap();
        let a = sample_rearrangement(f.as_ref(), 100_000, 1).unwrap();
        let b = sample_rearrangement(f.as_ref(), 100_000, 2).unwrap();
        assert!(kolmogorov_distance(&a.f_star, &b.f_star) <= 0.02, "{name}");
    }
}

#[test]
fn empirical_rearrangement_converges_at_root_n() {
    let f = LinearFamily { a: 1.0, b: 0.0, dim: 1 };
    let exact = GridFunction::from_fn(uniform_grid(4000).unwrap(), |s| normal_quantile(1.0 - s / 2.0)).unwrap();
    let err = |n: usize| -> f64 {
        (0..4u64)
            .map(|seed| sup_distance(&sample_rearrangement(&f, n, seed).unwrap().f_star, &exact, 0.05, 0.95))
            .sum::<f64>()
            / 4.0
    };
    let errs = [err(1_000), err(10_000), err(100_000)];
    let slope = (errs[2] / errs[0]).log10() / 2.0;
    assert!((-0.75..=-0.3).contains(&slope), "errors {errs:?}, slope {slope}");
}
