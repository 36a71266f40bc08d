mod common;

use approx::assert_relative_eq;
use cachestp::analytic::{stp_total, ExactStp, NetworkParams};
use cachestp::content::{ContentParams, FileAllocation};
use cachestp::optimize::{
    baseline_scheme, capped_proportional, grad_matrix_dbdt, kkt_residual, optimize_asymptotic,
    optimize_full, optimize_placement_exact, optimize_placement_single_antenna,
    optimize_placement_upper, project_capped_simplex, search_allocations, AscentDirection,
    Baseline, InnerSolver, OptimizerConfig,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn net(n: u32, lambda_u: f64) -> NetworkParams {
    NetworkParams::new(1e-4, lambda_u, 4.0, n, 1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn projection_is_feasible_idempotent_and_nearest(
        raw in proptest::collection::vec(-2.0f64..3.0, 1..12),
        cap in 0.0f64..6.0,
        probes in proptest::collection::vec(0.0f64..1.0, 12),
    ) {
        let (p, u) = project_capped_simplex(&raw, cap).unwrap();
        prop_assert!(u >= 0.0);
        prop_assert!(p.iter().all(|&x| (0.0..=1.0).contains(&x)));
        prop_assert!(p.iter().sum::<f64>() <= cap + 1e-9);
        let (again, _) = project_capped_simplex(&p, cap).unwrap();
        for (a, b) in again.iter().zip(&p) {
            prop_assert!((a - b).abs() < 1e-9);
        }
        // Variational inequality against a feasible probe point.
        let mut y: Vec<f64> = probes[..raw.len()].to_vec();
        let s: f64 = y.iter().sum();
        if s > cap {
            y.iter_mut().for_each(|v| *v *= cap / s);
        }
        let vi: f64 = raw.iter().zip(&p).zip(&y).map(|((x, p), y)| (x - p) * (y - p)).sum();
        prop_assert!(vi <= 1e-9);
    }

    #[test]
    fn capped_proportional_fills_slots(
        f in 1usize..40,
        gamma in 0.0f64..2.5,
        frac in 0.0f64..1.0,
    ) {
        let q = cachestp::content::zipf_popularity(f, gamma).unwrap();
        let slots = ((f as f64) * frac) as usize;
        let pi = capped_proportional(&q, slots).unwrap();
        prop_assert!(pi.iter().all(|&x| (0.0..=1.0).contains(&x)));
        prop_assert!((pi.iter().sum::<f64>() - slots as f64).abs() < 1e-9);
        prop_assert!(pi.windows(2).all(|w| w[0] >= w[1] - 1e-15));
    }
}

#[test]
fn projection_examples() {
    let (p, u) = project_capped_simplex(&[0.5, 0.5, 0.5], 1.0).unwrap();
    for x in p {
        assert_relative_eq!(x, 1.0 / 3.0, max_relative = 1e-12);
    }
    assert_relative_eq!(u, 1.0 / 6.0, max_relative = 1e-12);
    assert!(project_capped_simplex(&[f64::NAN], 1.0).is_err());
}

#[test]
fn gradient_ascent_matches_water_filling() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let cfg = OptimizerConfig::default();
    for _ in 0..10 {
        let f = rng.random_range(4..=10);
        let c = rng.random_range(1..f - 1);
        let gamma = rng.random_range(0.2..1.6);
        let content = ContentParams::zipf(f, gamma, c, 1).unwrap();
        let alloc = FileAllocation::from_cached(f, 2..=f);
        let mut p = net(1, rng.random_range(1e-4..1e-2));
        p.tau = rng.random_range(0.3..5.0);
        let (wf, kkt) = optimize_placement_single_antenna(&alloc, &p, &content).unwrap();
        assert!(kkt < 1e-8, "water-filling KKT residual {kkt}");
        let ga = optimize_placement_exact(&alloc, &p, &content, &cfg).unwrap();
        assert!(ga.converged);
        assert_relative_eq!(ga.objective, wf.objective, max_relative = 1e-6);
    }
}

#[test]
fn water_filling_budget_and_errors() {
    let content = ContentParams::zipf(6, 0.8, 2, 1).unwrap();
    let alloc = FileAllocation::from_cached(6, 2..=6);
    let (sol, _) = optimize_placement_single_antenna(&alloc, &net(1, 1e-3), &content).unwrap();
    assert!(sol.placement.total() <= 2.0 + 1e-12);
    assert!(optimize_placement_single_antenna(&alloc, &net(2, 1e-3), &content).is_err());
    // Everything fits: each cached file is stored everywhere.
    let few = FileAllocation::from_cached(6, [5, 6]);
    let (sol, _) = optimize_placement_single_antenna(&few, &net(1, 1e-3), &content).unwrap();
    assert_eq!(sol.placement.values(), vec![1.0, 1.0]);
}

#[test]
fn derivative_direction_reaches_stationary_point() {
    let content = ContentParams::zipf(6, 0.6, 2, 2).unwrap();
    let alloc = FileAllocation::from_cached(6, 3..=6);
    let p = net(8, 5e-3);
    let cfg = OptimizerConfig {
        direction: AscentDirection::Derivative,
        ..OptimizerConfig::default()
    };
    let sol = optimize_placement_exact(&alloc, &p, &content, &cfg).unwrap();
    let k = ExactStp::new(&p).unwrap();
    let t = sol.placement.values();
    let grad: Vec<f64> = (3..=6)
        .zip(&t)
        .map(|(f, &ti)| content.popularity_of(f) * k.derivative(ti))
        .collect();
    assert!(kkt_residual(&t, &grad, 2.0) < 1e-3);
    assert_eq!(sol.gradient_residual, Some(0.0));
    let verbatim =
        optimize_placement_exact(&alloc, &p, &content, &OptimizerConfig::default()).unwrap();
    // The true gradient can only do as well or better on the exact objective.
    assert!(sol.objective >= verbatim.objective - 1e-9);
}

#[test]
fn dbdt_helper_is_kernel_derivative() {
    let p = net(5, 1e-3);
    assert_eq!(
        grad_matrix_dbdt(&p).unwrap(),
        ExactStp::new(&p).unwrap().system_matrix_derivative()
    );
}

#[test]
fn pruned_search_matches_full_enumeration() {
    let cfg = OptimizerConfig::default();
    for f in 3..=6 {
        for b in 1..=2 {
            for c in 1..=2 {
                if b + c > f {
                    continue;
                }
                for n in [1, 2] {
                    let content = ContentParams::zipf(f, 0.6, c, b).unwrap();
                    let p = net(n, 2e-3);
                    let pruned = optimize_full(&p, &content, &cfg).unwrap();
                    let all =
                        search_allocations(&p, &content, &cfg, 0..=f, InnerSolver::Exact).unwrap();
                    assert!(
                        pruned.alloc == all.alloc
                            || (pruned.objective - all.objective).abs() <= 1e-9 * all.objective,
                        "F={f} B={b} C={c} N={n}"
                    );
                    assert!(pruned.objective >= all.objective * (1.0 - 1e-9));
                }
            }
        }
    }
}

#[test]
fn asymptotic_allocation_is_optimal_for_its_objective() {
    let cfg = OptimizerConfig::default();
    for f in 3..=6 {
        for (b, c) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
            if b + c > f {
                continue;
            }
            let content = ContentParams::zipf(f, 0.8, c, b).unwrap();
            let p = net(2, 5e-3);
            let asym = optimize_asymptotic(&p, &content, &cfg).unwrap();
            let all =
                search_allocations(&p, &content, &cfg, 0..=f, InnerSolver::Asymptotic).unwrap();
            assert!(
                asym.objective >= all.objective * (1.0 - 1e-7),
                "F={f} B={b} C={c}"
            );
        }
    }
}

#[test]
fn enumeration_guard() {
    let content = ContentParams::zipf(40, 0.6, 10, 10).unwrap();
    let err = optimize_full(&net(1, 1e-3), &content, &OptimizerConfig::default()).unwrap_err();
    assert!(matches!(err, cachestp::Error::TooLarge(_)));
}

#[test]
fn upper_placement_respects_budget() {
    let content = ContentParams::zipf(30, 0.7, 5, 3).unwrap();
    let alloc = FileAllocation::top_backhaul(30, 3);
    let sol =
        optimize_placement_upper(&alloc, &net(4, 5e-3), &content, &OptimizerConfig::default())
            .unwrap();
    assert!(sol.converged);
    assert!(sol.placement.total() <= 5.0 + 1e-9);
    // More popular cached files never get less cache space.
    let t = sol.placement.values();
    assert!(t.windows(2).all(|w| w[0] >= w[1] - 1e-6));
}

#[test]
fn baselines_order_and_uc_invariance() {
    let p = NetworkParams::new(1e-4, 5e-3, 4.0, 8, 1.0);
    let cfg = OptimizerConfig::default();
    let mut uc = Vec::new();
    for gamma in [0.4, 0.8, 1.2] {
        let content = ContentParams::zipf(500, gamma, 30, 20).unwrap();
        let asym = optimize_asymptotic(&p, &content, &cfg).unwrap();
        let asym = stp_total(&asym.alloc, &asym.placement, &p, &content)
            .unwrap()
            .ase;
        let mpc = baseline_scheme(Baseline::Mpc, &p, &content)
            .unwrap()
            .objective;
        let iid = baseline_scheme(Baseline::Iid, &p, &content)
            .unwrap()
            .objective;
        let u = baseline_scheme(Baseline::Uc, &p, &content)
            .unwrap()
            .objective;
        assert!(
            asym >= mpc && mpc >= iid && iid >= u,
            "gamma {gamma}: {asym} {mpc} {iid} {u}"
        );
        uc.push(u);
    }
    assert!(uc.windows(2).all(|w| (w[0] - w[1]).abs() <= 1e-12 * w[0]));
    assert_eq!("IID".parse::<Baseline>().unwrap(), Baseline::Iid);
    assert!("lru"
        .parse::<Baseline>()
        .unwrap_err()
        .to_string()
        .contains("mpc, uc, iid"));
}
