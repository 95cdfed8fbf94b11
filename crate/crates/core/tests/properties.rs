use proptest::prelude::*;
use rankdep_core::copula::{
    population_rho, rpv_measures, spearman_rho_classical, Copula, CopulaFamily, EmpiricalCopulaGrid,
};
use rankdep_core::mc::{simulate_null_quantiles, DEFAULT_PROBS};
use rankdep_core::ranks::{RankPositionVector, TiePolicy};
use rankdep_core::stats::{
    compute_statistic, dft_amplitudes, mfcc, t1_trace, t2_block_variance, t3_entropy, t4_amplitude_sum,
    t6_mfcc_sumsq, MfccParams, RankOrigin, StatParams, StatisticId,
};
use rankdep_core::survival::{
    cg_estimate, jackknife_variance, kaplan_meier_both, Cause, CgOptions, CompetingRisksData,
};
use rankdep_core::BivariateSample;

/// Distinct values in each column, so no ties.
fn sample_strategy(min: usize, max: usize) -> impl Strategy<Value = BivariateSample> {
    (min..=max)
        .prop_flat_map(|n| {
            let idx: Vec<usize> = (0..n).collect();
            (Just(idx.clone()).prop_shuffle(), Just(idx).prop_shuffle(), prop::collection::vec(0.0f64..0.5, n))
        })
        .prop_map(|(px, py, noise)| {
            let xs: Vec<f64> = px.iter().zip(&noise).map(|(&i, e)| i as f64 + e).collect();
            let ys: Vec<f64> = py.iter().map(|&i| i as f64 * 1.7 - 3.0).collect();
            BivariateSample::from_columns(&xs, &ys).unwrap()
        })
}

fn rpv_strategy(min: usize, max: usize) -> impl Strategy<Value = RankPositionVector> {
    (min..=max)
        .prop_flat_map(|n| Just((1..=n).collect::<Vec<usize>>()).prop_shuffle())
        .prop_map(|v| RankPositionVector::new(v).unwrap())
}

fn censored_strategy() -> impl Strategy<Value = CompetingRisksData> {
    prop::collection::vec((0.01f64..10.0, any::<bool>()), 1..60)
        .prop_map(|v| CompetingRisksData::from_pairs(&v).unwrap())
}

fn family_strategy() -> impl Strategy<Value = CopulaFamily> {
    prop_oneof![
        Just(CopulaFamily::Independence),
        (0.1f64..8.0).prop_map(|t| CopulaFamily::clayton(t).unwrap()),
        (0.2f64..10.0).prop_map(|t| CopulaFamily::frank(t).unwrap()),
        (-10.0f64..-0.2).prop_map(|t| CopulaFamily::frank(t).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn rpv_is_a_permutation(s in sample_strategy(2, 60)) {
        let rpv = RankPositionVector::from_sample(&s, TiePolicy::Error).unwrap();
        let mut sorted = rpv.as_slice().to_vec();
        sorted.sort_unstable();
        prop_assert_eq!(sorted, (1..=s.len()).collect::<Vec<_>>());
        prop_assert_eq!(rpv.inverse().inverse(), rpv);
    }

    #[test]
    fn statistics_ignore_monotone_transforms(s in sample_strategy(10, 40)) {
        let t = BivariateSample::new(
            s.pairs().iter().map(|&(x, y)| (x.exp(), 5.0 * y + y * y * y)).collect()
        ).unwrap();
        let p = StatParams::default();
        for id in StatisticId::ALL {
            if id == StatisticId::Tp {
                continue;
            }
            prop_assert_eq!(compute_statistic(id, &s, &p).unwrap(), compute_statistic(id, &t, &p).unwrap(), "{}", id);
        }
    }

    #[test]
    fn measure_paths_agree(rpv in rpv_strategy(2, 50)) {
        let m = rpv_measures(&rpv);
        let g = EmpiricalCopulaGrid::from_rpv(&rpv);
        prop_assert!((m.spearman_rho - spearman_rho_classical(&rpv)).abs() < 1e-12);
        prop_assert!((m.spearman_rho - g.spearman_rho()).abs() < 1e-12);
        prop_assert!((m.kendall_t - g.kendall_t()).abs() < 1e-12);
        prop_assert!((m.gini_g - g.gini_g()).abs() < 1e-12);
        for v in [m.spearman_rho, m.kendall_t, m.gini_g] {
            prop_assert!((-1.0 - 1e-12..=1.0 + 1e-12).contains(&v));
        }
    }

    #[test]
    fn empirical_copula_is_a_subcopula(rpv in rpv_strategy(2, 30)) {
        let g = EmpiricalCopulaGrid::from_rpv(&rpv);
        let n = g.n();
        for i in 0..=n {
            prop_assert_eq!(g.count(i, n) as usize, i);
            prop_assert_eq!(g.count(n, i) as usize, i);
            prop_assert_eq!(g.count(i, 0), 0);
        }
        for i in 1..=n {
            for j in 1..=n {
                let vol = g.count(i, j) + g.count(i - 1, j - 1) - g.count(i - 1, j) - g.count(i, j - 1);
                prop_assert_eq!(f64::from(vol) / n as f64, g.mass(i, j));
            }
        }
    }

    #[test]
    fn trace_is_the_fixed_point_count(rpv in rpv_strategy(1, 40)) {
        let m = rpv.matrix().materialize();
        let trace: usize = (0..rpv.len()).map(|i| m[i][i] as usize).sum();
        prop_assert_eq!(t1_trace(&rpv), trace);
    }

    #[test]
    fn parseval_and_normalization(rpv in rpv_strategy(2, 80)) {
        for origin in [RankOrigin::Zero, RankOrigin::One] {
            let a = dft_amplitudes(&rpv, origin);
            prop_assert!(a.parseval_relative_error() < 1e-10);
            prop_assert!((a.normalized.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
        let n = rpv.len();
        let one = dft_amplitudes(&rpv, RankOrigin::One);
        let energy: f64 = one.amplitudes.iter().map(|x| x * x).sum();
        let expected = (n * n * (n + 1) * (2 * n + 1)) as f64 / 6.0;
        prop_assert!((energy - expected).abs() / expected < 1e-10);
        prop_assert!((one.amplitudes[0] - (n * (n + 1) / 2) as f64).abs() < 1e-9);
    }

    #[test]
    fn rotation_keeps_amplitude_statistics(rpv in rpv_strategy(2, 60)) {
        let r = rpv.rotated();
        let o = RankOrigin::Zero;
        prop_assert!((t3_entropy(&rpv, o) - t3_entropy(&r, o)).abs() < 1e-10);
        let t4 = t4_amplitude_sum(&rpv, o);
        prop_assert!((t4 - t4_amplitude_sum(&r, o)).abs() < 1e-9 * t4);
    }

    #[test]
    fn mfcc_normalization_and_sign(rpv in rpv_strategy(4, 80)) {
        let params = MfccParams::default();
        let c = mfcc(&rpv, RankOrigin::Zero, &params).unwrap();
        prop_assert_eq!(c.coefficients.len(), params.num_filters);
        prop_assert!((c.normalized.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(t6_mfcc_sumsq(&rpv, RankOrigin::Zero, &params).unwrap() >= 0.0);
    }

    #[test]
    fn block_variance_is_nonnegative(s in sample_strategy(10, 60)) {
        prop_assert!(t2_block_variance(&s, 5, TiePolicy::Error).unwrap() >= 0.0);
    }

    #[test]
    fn copula_graphic_estimates_are_distribution_functions(d in censored_strategy(), c in family_strategy()) {
        let opts = CgOptions::default();
        let est = cg_estimate(&d, &c, &opts).unwrap();
        for w in [&est.f_hat, &est.g_hat] {
            prop_assert!(w.iter().all(|&v| (0.0..=1.0).contains(&v)));
            prop_assert!(w.windows(2).all(|p| p[0] <= p[1]));
        }
        for (&f, &g) in est.f_hat.iter().zip(&est.g_hat) {
            prop_assert!(f + g - c.cdf(f, g) <= 1.0 + opts.tol);
        }
    }

    #[test]
    fn independence_reduces_to_product_limit(d in censored_strategy()) {
        let cg = cg_estimate(&d, &CopulaFamily::Independence, &CgOptions::default()).unwrap();
        let km = kaplan_meier_both(&d);
        for (a, b) in cg.f_hat.iter().zip(&km.f_hat) {
            prop_assert!((a - b).abs() < 1e-6);
        }
    }

    #[test]
    fn jackknife_variance_is_nonnegative(d in censored_strategy(), c in family_strategy(), t in 0.0f64..10.0) {
        prop_assume!(d.len() >= 2);
        let v = jackknife_variance(&d, &c, &CgOptions::default(), t, Cause::X).unwrap();
        prop_assert!(v >= 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn null_tables_are_monotone(seed in any::<u64>(), n in 10usize..40) {
        let t = simulate_null_quantiles(StatisticId::T4, n, 200, &DEFAULT_PROBS, seed, &StatParams::default()).unwrap();
        prop_assert!(t.values.windows(2).all(|w| w[0] <= w[1]));
        prop_assert_eq!(t.iterations, 200);
        prop_assert_eq!(t.seed, seed);
    }

    #[test]
    fn population_rho_stays_in_range(c in family_strategy()) {
        let rho = population_rho(&c, 64).unwrap();
        prop_assert!((-1.0..=1.0).contains(&rho));
    }
}
