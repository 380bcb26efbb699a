use debtrank::contagion::losses_from_equity;
use debtrank::synthetic::{random_system, random_tree};
use debtrank::{
    run_contagion, run_original_debtrank, simulate_equity, step_generalized, ContagionState, RunConfig, System,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn system_strategy() -> impl Strategy<Value = (System, Vec<f64>)> {
    (2usize..20, 0.2f64..3.0, 0.1f64..0.6, any::<u64>(), 1e-3f64..0.5).prop_map(|(n, radius, link, seed, scale)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sys = random_system(n, radius, link, &mut rng);
        let h1 = (0..n).map(|_| rng.random_range(0.0..scale)).collect();
        (sys, h1)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn equity_route_agrees_with_loss_route((sys, h1) in system_strategy()) {
        let cfg = RunConfig::default();
        let res = run_contagion(&sys, &h1, &cfg).unwrap();
        let path = simulate_equity(&sys, &h1, &cfg).unwrap();
        let implied = losses_from_equity(&path, sys.equity0());
        for (t, h) in res.trajectory.iter().enumerate() {
            let Some(e) = implied.get(t + 1) else { break };
            for (a, b) in h.iter().zip(e) {
                prop_assert!((a - b).abs() < 1e-10, "t={} {} vs {}", t + 1, a, b);
            }
        }
    }

    #[test]
    fn original_debtrank_is_a_lower_bound((sys, h1) in system_strategy()) {
        let cfg = RunConfig::default();
        let gen = run_contagion(&sys, &h1, &cfg).unwrap();
        let orig = run_original_debtrank(&sys, &h1, &cfg).unwrap();
        for (o, g) in orig.h_final.iter().zip(&gen.h_final) {
            prop_assert!(*o <= *g + 1e-12);
        }
    }

    #[test]
    fn trajectories_are_monotone_and_defaults_absorbing((sys, h1) in system_strategy()) {
        let res = run_contagion(&sys, &h1, &RunConfig::default()).unwrap();
        for w in res.trajectory.windows(2) {
            for (a, b) in w[0].iter().zip(&w[1]) {
                prop_assert!(b >= a);
                if *a == 1.0 {
                    prop_assert_eq!(*b, 1.0);
                }
            }
        }
        let mut defaulted: Vec<usize> = res.defaulted().collect();
        defaulted.sort_unstable();
        let full: Vec<usize> = (0..sys.n()).filter(|&i| res.h_final[i] == 1.0).collect();
        prop_assert_eq!(defaulted, full);
    }

    #[test]
    fn trees_agree_for_single_shocks(n in 2usize..30, seed in any::<u64>(), shock in 0.01f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sys = random_tree(n, 1.0, &mut rng);
        let s = rng.random_range(0..n);
        let mut h1 = vec![0.0; n];
        h1[s] = shock;
        let cfg = RunConfig::default();
        let gen = run_contagion(&sys, &h1, &cfg).unwrap();
        let orig = run_original_debtrank(&sys, &h1, &cfg).unwrap();
        for (a, b) in gen.h_final.iter().zip(&orig.h_final) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }
}

#[test]
fn defaulted_bank_stops_propagating() {
    // Bank 1 defaults at t = 1. Its full loss reaches bank 0 once, at t = 2, and then
    // bank 1 drops out of the leverage matrix.
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let sys = random_system(2, 0.5, 1.0, &mut rng);
    let lambda01 = sys.lambda()[(0, 1)];
    let s1 = ContagionState::after_shock(&[0.0, 1.0]);
    let s2 = step_generalized(&s1, &sys);
    assert!((s2.h[0] - lambda01.min(1.0)).abs() < 1e-15);
    assert!(!s2.active_prev.contains(1));
    let s3 = step_generalized(&s2, &sys);
    assert_eq!(s3.h, s2.h);
}

/// Reference map where every bank propagates its full loss on every step.
fn double_counting(sys: &System, h1: &[f64], steps: usize) -> Vec<f64> {
    let mut h = h1.to_vec();
    for _ in 0..steps {
        let push = sys.lambda().matvec(&h);
        h = h.iter().zip(&push).map(|(a, b)| a + b).collect();
    }
    h
}

#[test]
fn full_repropagation_double_counts() {
    // chain 0 <- 1 <- 2: bank 2 shocked, path of length 2 to bank 0
    let sys = {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let base = random_system(3, 0.5, 0.0, &mut rng);
        let e = base.equity0().to_vec();
        let a = debtrank::DenseMatrix::from_fn(3, |i, j| match (i, j) {
            (0, 1) => 0.5 * e[0],
            (1, 2) => 0.4 * e[1],
            _ => 0.0,
        });
        base.with_exposures(debtrank::ExposureMatrix::new(a)).unwrap()
    };
    let h1 = [0.0, 0.0, 0.1];
    let gen = run_contagion(&sys, &h1, &RunConfig::default()).unwrap();
    let dc = double_counting(&sys, &h1, gen.steps);
    assert!(dc.iter().zip(&gen.h_final).any(|(d, g)| d > g));
    assert!(dc.iter().zip(&gen.h_final).all(|(d, g)| d >= g));
}
