mod common;

use approx::assert_abs_diff_eq;
use degroot_core::kernel::{objective_at, weights_from_positions};
use degroot_core::multidim::{mixed_population_variance, PopulationMix};
use degroot_core::precision::FOC_TOL;
use degroot_core::*;
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn profile_strategy(max_n: usize, max_m: usize) -> impl Strategy<Value = (Vec<usize>, usize)> {
    (2..=max_n, 1..=max_m).prop_flat_map(|(n, m)| (prop::collection::vec(1..=m, n), Just(m)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn stationary_matches_power_oracle(seed in any::<u64>(), n in 2usize..=12, density in 0.0f64..0.8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = common::random_primitive(&mut rng, n, density);
        let pi = stationary_distribution(&w).unwrap();
        prop_assert!(pi.residual(&w) < 1e-10);
        for (a, b) in pi.as_slice().iter().zip(common::power_oracle(&w)) {
            prop_assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn primitivity_matches_boolean_powers(seed in any::<u64>(), n in 2usize..=7, density in 0.05f64..0.6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let raw = DMatrix::from_fn(n, n, |i, j| {
            use rand::Rng;
            if rng.random_bool(density) || j == (i + 1) % n && rng.random_bool(0.5) { 1.0 } else { 0.0 }
        });
        if (0..n).all(|i| raw.row(i).sum() > 0.0) {
            let w = common::normalize(raw);
            prop_assert_eq!(w.is_strongly_connected_aperiodic(), common::boolean_power_primitive(&w));
        }
    }

    #[test]
    fn builders_are_row_stochastic(n in 4usize..=40, x in prop::collection::vec(0.01f64..0.99, 2..12)) {
        for w in [
            build_complete_equal(n).unwrap(),
            build_core_periphery(n).unwrap(),
            build_star(n).unwrap(),
            build_complete_self_weight(&x).unwrap(),
        ] {
            for i in 0..w.n() {
                let row = w.row(i);
                prop_assert!(row.iter().all(|v| *v >= 0.0));
                prop_assert!((row.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn self_weight_monotonicity(x in prop::collection::vec(0.05f64..0.95, 2..10), pick in any::<prop::sample::Index>()) {
        let i = pick.index(x.len());
        let before = stationary_complete_self_weight(&x).unwrap()[i];
        let mut y = x.clone();
        y[i] += 1e-4;
        let after = stationary_complete_self_weight(&y).unwrap()[i];
        prop_assert!(after > before);
        let solved = stationary_distribution(&build_complete_self_weight(&y).unwrap()).unwrap();
        prop_assert!(solved[i] > before);
    }

    #[test]
    fn consensus_is_affine(seed in any::<u64>(), n in 2usize..=10, a in -5.0f64..5.0, b in -5.0f64..5.0) {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = common::random_primitive(&mut rng, n, 0.4);
        let s: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
        let shifted: Vec<f64> = s.iter().map(|x| a * x + b).collect();
        let c = degroot_consensus(&w, &OpinionVector::new(s).unwrap()).unwrap();
        let c2 = degroot_consensus(&w, &OpinionVector::new(shifted).unwrap()).unwrap();
        prop_assert!((c2 - (a * c + b)).abs() < 1e-9);
    }

    #[test]
    fn foc_residuals(pi in 1e-3f64..1.0, kappa in 1e-2f64..1e2, a in 1e-2f64..1e2, p in 1.0f64..4.0, n in 1usize..=60) {
        for cost in [CostSpec::Linear { kappa }, CostSpec::Power { a, p }] {
            let tau = optimal_precision(pi, &cost).unwrap();
            prop_assert!((tau.powi(3) * cost.derivative(tau) - 2.0 * pi * pi).abs() < FOC_TOL);
            let social = social_precision(pi, &cost, n).unwrap();
            prop_assert!((social.powi(3) * cost.derivative(social) - 2.0 * n as f64 * pi * pi).abs() < FOC_TOL);
        }
    }

    #[test]
    fn precision_increases_with_influence(lo in 1e-3f64..0.5, gap in 1e-3f64..0.5, a in 0.1f64..10.0, p in 1.0f64..4.0) {
        let hi = lo + gap;
        for cost in [CostSpec::Linear { kappa: a }, CostSpec::Power { a, p }] {
            prop_assert!(optimal_precision(lo, &cost).unwrap() < optimal_precision(hi, &cost).unwrap());
        }
    }

    #[test]
    fn linear_cost_sublinearity(pi in 1e-3f64..0.5, kappa in 1e-2f64..1e2, n in 1usize..=100) {
        let cost = CostSpec::Linear { kappa };
        let t1 = optimal_precision(pi, &cost).unwrap();
        let t2 = optimal_precision(2.0 * pi, &cost).unwrap();
        prop_assert!((t2 / t1 - 2f64.powf(2.0 / 3.0)).abs() < 1e-9);
        let ratio = social_precision(pi, &cost, n).unwrap() / t1;
        prop_assert!((ratio - (n as f64).cbrt()).abs() < 1e-10);
    }

    #[test]
    fn free_riding_from_social_profile(seed in any::<u64>(), n in 2usize..=8, kappa in 0.5f64..8.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = common::random_primitive(&mut rng, n, 0.5);
        let pi = stationary_distribution(&w).unwrap();
        let costs = vec![CostSpec::Linear { kappa }; n];
        let social = precision::social_profile(&pi, &costs).unwrap();
        for i in 0..n {
            let own = optimal_precision(pi[i], &costs[i]).unwrap();
            let switched = social.with(i, own).unwrap();
            let before = agent_objective(&pi, &social, i, &costs[i]).unwrap();
            let after = agent_objective(&pi, &switched, i, &costs[i]).unwrap();
            prop_assert!(after < before);
        }
    }

    #[test]
    fn kernel_symmetry_and_range(a in -3.0f64..3.0, b in -3.0f64..3.0, alpha in 0.0f64..10.0) {
        let k = kernel_scalar(a, b, alpha);
        prop_assert_eq!(k, kernel_scalar(b, a, alpha));
        prop_assert!(k > 0.0 && k <= 1.0);
        prop_assert_eq!(kernel_scalar(a, a, alpha), 1.0);
        if alpha > 0.0 && (a - b).abs() > 1e-3 {
            prop_assert!(k < 1.0);
        }
    }

    #[test]
    fn kernel_limits((d, m) in profile_strategy(8, 4)) {
        let p = ChoiceProfile::new(d.clone(), m).unwrap();
        let n = d.len() as f64;
        let w = weights_from_choices(&p, 0.0).unwrap();
        prop_assert!(w.as_matrix().iter().all(|x| (x - 1.0 / n).abs() < 1e-15));
        let w = weights_from_choices(&p, f64::INFINITY).unwrap();
        for i in 0..d.len() {
            let group = d.iter().filter(|x| **x == d[i]).count() as f64;
            for j in 0..d.len() {
                let want = if d[i] == d[j] { 1.0 / group } else { 0.0 };
                prop_assert!((w.get(i, j) - want).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn kernel_matrices_are_row_stochastic(pos in prop::collection::vec(-3.0f64..3.0, 2..10), alpha in 0.0f64..20.0) {
        let w = weights_from_positions(&pos, alpha).unwrap();
        for i in 0..w.n() {
            prop_assert!((w.row(i).iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn objective_floor_and_relabeling((d, m) in profile_strategy(7, 4), alpha in 0.01f64..5.0) {
        let p = ChoiceProfile::new(d.clone(), m).unwrap();
        let obj = profile_objective(&p, alpha).unwrap();
        let n = d.len() as f64;
        prop_assert!(obj >= 1.0 / n - 1e-15);
        let flipped = ChoiceProfile::new(d.iter().map(|x| m + 1 - x).collect(), m).unwrap();
        prop_assert!((profile_objective(&flipped, alpha).unwrap() - obj).abs() < 1e-12);
        let shifted = ChoiceProfile::new(d.iter().map(|x| x + 1).collect(), m + 1).unwrap();
        prop_assert!((profile_objective(&shifted, alpha).unwrap() - obj).abs() < 1e-12);
    }

    #[test]
    fn best_response_is_optimal((d, m) in profile_strategy(5, 3), alpha in 0.01f64..5.0, pick in any::<prop::sample::Index>()) {
        let i = pick.index(d.len());
        let pos: Vec<f64> = d.iter().map(|x| *x as f64).collect();
        let r = best_dimension(i, &pos, m, alpha, TieRule::Lowest).unwrap();
        let mut best = f64::INFINITY;
        for c in 1..=m {
            let mut e = d.clone();
            e[i] = c;
            best = best.min(profile_objective(&ChoiceProfile::new(e, m).unwrap(), alpha).unwrap());
        }
        let mut e = d.clone();
        e[i] = r.choice;
        let got = profile_objective(&ChoiceProfile::new(e, m).unwrap(), alpha).unwrap();
        prop_assert!(got - best <= 1e-12);
    }

    #[test]
    fn population_variance_is_affine(pi in 0.01f64..1.0, n in 1usize..50, m in 1usize..6, tw in 0.01f64..5.0, ti in 0.01f64..20.0) {
        let v = |a: f64| mixed_population_variance(pi, &PopulationMix::new(a, n, m).unwrap(), tw, ti);
        for a in [0.0, 0.25, 0.5] {
            let h = 0.25;
            let second = v(a + 2.0 * h) - 2.0 * v(a + h) + v(a);
            prop_assert!(second.abs() <= 1e-12 * v(a).max(1.0));
        }
    }

    #[test]
    fn multiplex_choice_is_scale_invariant(
        layers in prop::collection::vec(prop::collection::vec(0.01f64..1.0, 5), 1..5),
        scale in 0.01f64..100.0,
        pick in any::<prop::sample::Index>(),
    ) {
        let to_influence = |v: &Vec<f64>| {
            let s: f64 = v.iter().sum();
            InfluenceVector::new(v.iter().map(|x| x / s).collect()).unwrap()
        };
        let base = MultiplexInfluence::new(layers.iter().map(to_influence).collect()).unwrap();
        let k = pick.index(layers.len());
        let mut scaled_layers = layers.clone();
        scaled_layers[k].iter_mut().for_each(|x| *x *= scale);
        let scaled = MultiplexInfluence::new(scaled_layers.iter().map(to_influence).collect()).unwrap();
        for i in 0..5 {
            prop_assert_eq!(multiplex_choice(&base, i).unwrap(), multiplex_choice(&scaled, i).unwrap());
        }
    }

    #[test]
    fn specialist_share_is_boundary_optimal(m in 1usize..8, ti in 0.01f64..50.0, tw in 0.01f64..50.0, n in 1usize..100) {
        let s = optimal_specialist_share(m, ti, tw).unwrap();
        prop_assume!(!s.degenerate);
        let grid = [0.0, 0.25, 0.5, 0.75, 1.0];
        let v = |a: f64| mixed_population_variance(0.1, &PopulationMix::new(a, n, m).unwrap(), tw, ti);
        let best = grid.iter().copied().min_by(|a, b| v(*a).total_cmp(&v(*b))).unwrap();
        prop_assert_eq!(s.alpha_star, best);
    }

    #[test]
    fn multidim_consensus_commutes_with_dimension_permutation(
        seed in any::<u64>(),
        rows in prop::collection::vec(prop::collection::vec(-5.0f64..5.0, 3), 4),
        shift in 0usize..3,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = common::random_primitive(&mut rng, 4, 0.5);
        let permuted: Vec<Vec<f64>> = rows.iter().map(|r| (0..3).map(|k| r[(k + shift) % 3]).collect()).collect();
        let a = multidim_consensus(&w, &StateEstimate::from_rows(rows).unwrap()).unwrap();
        let b = multidim_consensus(&w, &StateEstimate::from_rows(permuted).unwrap()).unwrap();
        for k in 0..3 {
            prop_assert!((b[k] - a[(k + shift) % 3]).abs() < 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn posterior_matches_enumeration(seed in any::<u64>(), shape in 0usize..6, alpha in 0.2f64..3.0, gamma in 0.3f64..1.0) {
        use rand::Rng;
        // (n, m, t) with m^(t·n) ≤ 4096.
        let (n, m, t) = [(3, 2, 1), (4, 3, 1), (6, 2, 2), (3, 4, 2), (2, 3, 3), (4, 2, 3)][shape];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let hist: Vec<Vec<usize>> = (0..n).map(|_| (0..t).map(|_| rng.random_range(1..=m)).collect()).collect();
        let mem = MemoryProfile::new(hist, m).unwrap();
        let params = KernelParams::new(alpha, gamma).unwrap();
        let w = weights_from_memories(&mem, &params).unwrap();
        let agent = rng.random_range(0..n);
        let got = consistent_memories(&w, agent, mem.history(agent), m, &params, kernel::uniform_prior).unwrap();
        let (want, expected) = common::brute_posterior(&w, agent, mem.history(agent), m, &params);
        let mut got_profiles: Vec<_> = got.posterior.iter().map(|(p, _)| p.clone()).collect();
        let mut want = want;
        let key = |p: &MemoryProfile| (0..p.n()).map(|j| p.history(j).to_vec()).collect::<Vec<_>>();
        got_profiles.sort_by_key(key);
        want.sort_by_key(key);
        prop_assert_eq!(got_profiles, want);
        for (a, b) in got.expected_choices.iter().zip(expected) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }
}

#[test]
fn closed_form_derivative_ordering() {
    // 0 > ∂π_core/∂n > ∂π_periphery/∂n for the core-periphery closed form.
    let core = |n: f64| n / (5.0 * n - 4.0);
    let periphery = |n: f64| 4.0 / (5.0 * n - 4.0);
    for n in 5..=100 {
        let n = n as f64;
        let dc = core(n + 1.0) - core(n);
        let dp = periphery(n + 1.0) - periphery(n);
        assert!(0.0 > dc && dc > dp, "n = {n}");
        let sc = stationary_core_periphery(n as usize).unwrap();
        assert_abs_diff_eq!(sc[n as usize - 1], core(n), epsilon = 1e-15);
    }
}

#[test]
fn objective_attains_floor_only_when_uniform() {
    assert_abs_diff_eq!(
        objective_at(&[3.0, 3.0, 1.0, 1.0], 1.0).unwrap(),
        0.25,
        epsilon = 1e-15
    );
    assert!(objective_at(&[1.0, 2.0, 2.0, 3.0], 1.0).unwrap() > 0.25 + 1e-3);
}
