use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use spatperm::mcmc::{
    run_chain, BoxGeometry, ChainConfig, HamiltonianSpec, Observables, PermutationState, PointSet,
};
use spatperm::oracle::{boltzmann_sn, brute_periodized_xi};
use spatperm::stats::{blocked_standard_error, mean};
use spatperm::verify::quenched_chi_square;
use spatperm::{Alpha, DispersionModel};

fn gaussian(d: usize) -> Arc<DispersionModel> {
    Arc::new(DispersionModel::gaussian(1.0, d).unwrap())
}

#[test]
fn two_point_swap_acceptance() {
    let r: f64 = 1.2;
    let g = BoxGeometry::new(60.0, 1).unwrap();
    let pts = PointSet::new(1, vec![5.0, 5.0 + r]).unwrap();
    let spec = HamiltonianSpec::one_body(gaussian(1));
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let trials = 200_000;
    let mut hits = 0;
    for _ in 0..trials {
        let mut st = PermutationState::new(&pts, g, &spec).unwrap();
        hits += usize::from(st.step_swap(&spec, &mut rng));
    }
    let p = (-r * r / 2.0).exp();
    let sigma = (p * (1.0 - p) / trials as f64).sqrt();
    assert!((hits as f64 / trials as f64 - p).abs() < 4.0 * sigma);
}

#[test]
fn identical_points_always_swap() {
    let g = BoxGeometry::new(5.0, 2).unwrap();
    let pts = PointSet::new(2, vec![1.0, 1.0, 1.0, 1.0]).unwrap();
    let spec = HamiltonianSpec::one_body(gaussian(2));
    let mut st = PermutationState::new(&pts, g, &spec).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    assert!((0..1000).all(|_| st.step_swap(&spec, &mut rng)));
}

#[test]
fn single_point_moves_always_accepted() {
    let g = BoxGeometry::new(5.0, 3).unwrap();
    let pts = PointSet::new(3, vec![1.0, 2.0, 3.0]).unwrap();
    let spec = HamiltonianSpec::one_body(gaussian(3));
    let mut st = PermutationState::new(&pts, g, &spec).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    assert!((0..1000).all(|_| st.step_point(&spec, 2.0, &mut rng)));
}

/// Empirical frequencies over `S₃` within 4 blocked σ of the exact law.
#[test]
fn three_point_detailed_balance() {
    let g = BoxGeometry::new(5.0, 2).unwrap();
    let coords = vec![0.3, 0.4, 1.1, 0.9, 0.5, 1.7];
    let model = gaussian(2);
    let exact = boltzmann_sn(&coords, &g, &model, Alpha::ZERO, 0.0);
    let spec = HamiltonianSpec::one_body(model);
    let mut st = PermutationState::new(&PointSet::new(2, coords).unwrap(), g, &spec).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let steps = 1_000_000;
    let mut series = vec![Vec::with_capacity(steps); exact.len()];
    for _ in 0..steps {
        st.step_swap(&spec, &mut rng);
        for (k, (p, _)) in exact.iter().enumerate() {
            series[k].push(f64::from(u8::from(st.perm() == p.as_slice())));
        }
    }
    for (k, (p, w)) in exact.iter().enumerate() {
        let m = mean(&series[k]);
        let e = blocked_standard_error(&series[k]);
        assert!((m - w).abs() < 4.0 * e, "{p:?}: {m} vs {w} (σ {e})");
    }
}

#[test]
fn quenched_five_points_chi_square() {
    for (a, pair) in [(0.0, 0.0), (1.0, 0.0), (f64::INFINITY, 0.0), (0.0, 0.1)] {
        let (chi2, p, dof) =
            quenched_chi_square(Alpha::new(a).unwrap(), pair, 200_000, 20, 77).unwrap();
        assert!(
            p > 0.01,
            "alpha={a} pair_a={pair}: chi2 {chi2} dof {dof} p {p}"
        );
    }
}

/// Annealed N = 2 on a 1-d ring: `P(transposition) = I/(L e^{−2ξ_Λ(0)} + I)`, `I = ∫₀^L e^{−2ξ_Λ(r)} dr`.
#[test]
fn annealed_two_points_transposition_probability() {
    let l = 2.0;
    let model = gaussian(1);
    let g = BoxGeometry::new(l, 1).unwrap();
    let m = 4000;
    let h = l / m as f64;
    // Periodic trapezoid rule: spectrally accurate for a smooth periodic integrand.
    let integral: f64 = (0..m)
        .map(|i| (-2.0 * brute_periodized_xi(&model, &[i as f64 * h], l, 8)).exp() * h)
        .sum();
    let self_w = (-2.0 * brute_periodized_xi(&model, &[0.0], l, 8)).exp();
    let exact = integral / (l * self_w + integral);
    let spec = HamiltonianSpec::one_body(model);
    let pts = PointSet::new(1, vec![0.2, 1.3]).unwrap();
    let mut cfg = ChainConfig::new(400_000, 21);
    cfg.burn_in = Some(1000);
    cfg.point_move_fraction = 0.5;
    cfg.max_displacement = 0.8;
    let obs = Observables {
        rho_windows: vec![(2, 2)],
    };
    let (trace, _) = run_chain(&pts, g, &spec, &cfg, &obs).unwrap();
    // ϱ_{2,2} = 2/L exactly when the pair is a 2-cycle.
    let ind: Vec<f64> = trace
        .column("rho_2_2")
        .unwrap()
        .iter()
        .map(|v| v * l / 2.0)
        .collect();
    let (mc, err) = (mean(&ind), blocked_standard_error(&ind));
    assert!(
        (mc - exact).abs() < 4.0 * err,
        "mc {mc} ± {err}, exact {exact}"
    );
}

#[test]
fn three_point_trace_matches_enumeration() {
    let g = BoxGeometry::new(4.0, 1).unwrap();
    let coords = vec![0.2, 0.9, 1.5];
    let model = gaussian(1);
    let exact: f64 = boltzmann_sn(&coords, &g, &model, Alpha::new(0.3).unwrap(), 0.0)
        .iter()
        .map(|(p, w)| {
            w * spatperm::cycles::cycle_stats(p, 4.0, &[])
                .unwrap()
                .rho(2, 2)
        })
        .sum();
    let spec = HamiltonianSpec::with_alpha(model, Alpha::new(0.3).unwrap());
    let mut cfg = ChainConfig::new(200_000, 5);
    cfg.burn_in = Some(100);
    let obs = Observables {
        rho_windows: vec![(2, 2)],
    };
    let (trace, _) = run_chain(&PointSet::new(1, coords).unwrap(), g, &spec, &cfg, &obs).unwrap();
    let s = trace.summary()["rho_2_2"];
    assert!(
        (s.mean - exact).abs() < 3.0 * s.blocked_error,
        "{} ± {} vs {exact}",
        s.mean,
        s.blocked_error
    );
}

#[test]
fn fixed_seed_reproduces_trace() {
    let g = BoxGeometry::new(3.0, 3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let pts =
        spatperm::mcmc::generate_points(&spatperm::mcmc::PointProcess::Poisson, &g, 12, &mut rng)
            .unwrap();
    let spec = HamiltonianSpec::one_body(gaussian(3));
    let mut cfg = ChainConfig::new(300, 9);
    cfg.point_move_fraction = 0.4;
    let obs = Observables {
        rho_windows: vec![(1, 3)],
    };
    let (a, _) = run_chain(&pts, g, &spec, &cfg, &obs).unwrap();
    let (b, _) = run_chain(&pts, g, &spec, &cfg, &obs).unwrap();
    assert_eq!(a, b);
    assert!(a.burn_in_sweeps >= 60);
    assert!(a.max_drift < 1e-8);
}
