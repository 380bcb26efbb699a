use debtrank::contagion::Mode;
use debtrank::scenarios::{descending_ranks, uniform_results};
use debtrank::synthetic::random_system;
use debtrank::{
    alpha_sweep, build_system, linear_fixed_point, run_impact_vulnerability, run_uniform_scenario, BankRecord,
    DenseMatrix, ExposureMatrix, RunConfig, System,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn close(a: f64, b: f64, tol: f64) {
    assert!((a - b).abs() <= tol, "{a} vs {b}");
}

fn two_bank() -> System {
    let rec = |id: &str, e: f64, ae: f64| BankRecord::new(id, id, e, ae, 0.0, 0.0, 0.0, None).unwrap();
    let a = DenseMatrix::from_rows(&[vec![0.0, 5.0], vec![4.0, 0.0]]).unwrap();
    build_system(
        vec![rec("B1", 10.0, 100.0), rec("B2", 20.0, 50.0)],
        ExposureMatrix::new(a),
    )
    .unwrap()
}

#[test]
fn uniform_two_bank() {
    let sys = [two_bank()];
    let cfg = RunConfig::default();
    let s = run_uniform_scenario(&sys, 0.01, &cfg).unwrap();
    close(s.per_system[0].direct_loss, 0.05, 1e-15);
    close(s.per_system[0].final_loss, 0.075, 1e-9);
    close(s.per_system[0].amplification, 1.5, 1e-8);

    let zero = run_uniform_scenario(&sys, 0.0, &cfg).unwrap();
    assert_eq!(zero.direct.mean, 0.0);
    assert_eq!(zero.final_.mean, 0.0);

    let sat = run_uniform_scenario(&sys, 1.0, &cfg).unwrap();
    assert_eq!(sat.direct.mean, 1.0);
    assert_eq!(sat.final_.mean, 1.0);
    assert_eq!(sat.amplification.mean, 1.0);
}

#[test]
fn sweep_two_bank() {
    let sys = [two_bank()];
    let rows = alpha_sweep(&sys, &[0.01, 0.02], &RunConfig::default()).unwrap();
    close(rows[0].final_.mean, 0.075, 1e-9);
    close(rows[1].final_.mean, 0.15, 1e-9);
    let rows = alpha_sweep(&sys, &[0.0], &RunConfig::default()).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].final_.max, 0.0);
    let rows = alpha_sweep(&sys, &[0.4, 0.8, 1.6], &RunConfig::default()).unwrap();
    assert!(rows.iter().all(|r| r.final_.mean == 1.0));
    assert!(alpha_sweep(&sys, &[], &RunConfig::default()).is_err());
}

#[test]
fn impact_vulnerability_two_bank() {
    let sys = [two_bank()];
    let iv = run_impact_vulnerability(&sys, 0.01, &RunConfig::default()).unwrap();
    // (I - Λ)^-1 = [[1, 0.5], [0.2, 1]] / 0.9
    let h_b1 = [0.1 / 0.9, 0.02 / 0.9];
    let h_b2 = [0.0125 / 0.9, 0.025 / 0.9];
    close(iv.impact[0], (10.0 * h_b1[0] + 20.0 * h_b1[1]) / 30.0, 1e-9);
    close(iv.impact[0], 0.051852, 1e-6);
    close(iv.impact[1], 0.023148, 1e-6);
    close(iv.vulnerability[0], (h_b1[0] + h_b2[0]) / 2.0, 1e-9);
    close(iv.vulnerability[0], 0.0625, 1e-9);
    assert_eq!(iv.impact_rank, vec![1, 2]);
    assert_eq!(iv.vulnerability_rank, vec![1, 2]);
}

#[test]
fn unreachable_bank_only_feels_its_own_shock() {
    // bank 2 lends to nobody, so no loss reaches it
    let rec = |id: &str| BankRecord::new(id, id, 10.0, 100.0, 0.0, 0.0, 0.0, None).unwrap();
    let a = DenseMatrix::from_rows(&[vec![0.0, 5.0, 2.0], vec![4.0, 0.0, 1.0], vec![0.0; 3]]).unwrap();
    let sys = [build_system(vec![rec("a"), rec("b"), rec("c")], ExposureMatrix::new(a)).unwrap()];
    let iv = run_impact_vulnerability(&sys, 0.02, &RunConfig::default()).unwrap();
    close(iv.vulnerability[2], 0.2 / 3.0, 1e-15);
}

#[test]
fn ranks_are_permutations() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let systems: Vec<System> = (0..3).map(|_| random_system(9, 0.8, 0.4, &mut rng)).collect();
    // ranks must be computed on identically-labelled systems
    let base = systems[0].clone();
    let systems: Vec<System> = systems
        .iter()
        .map(|s| base.with_exposures(s.exposures().clone()).unwrap())
        .collect();
    let iv = run_impact_vulnerability(&systems, 0.01, &RunConfig::default()).unwrap();
    for ranks in [&iv.impact_rank, &iv.vulnerability_rank] {
        let mut sorted = ranks.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (1..=9).collect::<Vec<_>>());
    }
    assert_eq!(iv.impact_rank, descending_ranks(&iv.impact, &iv.bank_ids));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn loss_curves_behave(seed in any::<u64>(), radius in 0.2f64..2.5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sys = [random_system(12, radius, 0.3, &mut rng)];
        let alphas: Vec<f64> = (0..=30).map(|k| k as f64 * 0.01).collect();
        let rows = alpha_sweep(&sys, &alphas, &RunConfig::default()).unwrap();
        for w in rows.windows(2) {
            prop_assert!(w[1].final_.mean >= w[0].final_.mean - 1e-12);
        }
        for r in &rows {
            let s = &r.per_system[0];
            prop_assert!(s.direct_loss <= s.final_loss + 1e-15);
            prop_assert!(s.final_loss <= 1.0);
            prop_assert!(s.amplification >= 1.0 - 1e-12);
            prop_assert!(r.final_.min <= r.final_.mean && r.final_.mean <= r.final_.max);
        }
    }

    #[test]
    fn impact_at_least_direct_and_linear_when_unclipped(seed in any::<u64>(), radius in 0.1f64..0.8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sys = random_system(8, radius, 0.4, &mut rng);
        let alpha = 1e-4;
        let iv = run_impact_vulnerability(std::slice::from_ref(&sys), alpha, &RunConfig::default()).unwrap();
        let e0 = sys.equity0();
        let total: f64 = e0.iter().sum();
        for b in 0..sys.n() {
            let mut h1 = vec![0.0; sys.n()];
            h1[b] = (alpha * sys.records()[b].external_assets / e0[b]).min(1.0);
            let direct = h1[b] * e0[b] / total;
            prop_assert!(iv.impact[b] >= direct - 1e-15);
            let h = linear_fixed_point(sys.lambda(), &h1).unwrap();
            let predicted: f64 = h.iter().zip(e0).map(|(h, e)| h * e).sum::<f64>() / total;
            prop_assert!((iv.impact[b] - predicted).abs() < 1e-8);
        }
    }
}

#[test]
fn debtrank_mode_is_selectable() {
    let sys = [two_bank()];
    let cfg = RunConfig::with_mode(Mode::Debtrank);
    let res = uniform_results(&sys, 0.01, &cfg).unwrap();
    let gen = uniform_results(&sys, 0.01, &RunConfig::default()).unwrap();
    assert!(res[0].final_loss() < gen[0].final_loss());
}
