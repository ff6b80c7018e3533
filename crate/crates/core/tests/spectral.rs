use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use spatperm::oracle::cycle_sum_log_z;
use spatperm::spectral::{cycle_weight_sums, partition_table, CacheKey};
use spatperm::stats::chi_square_test;
use spatperm::{build_mode_set, Alpha, DispersionModel, Error, ModeSet, PartitionTable};

#[test]
fn sampled_marginals_match_exact() {
    let modes = Arc::new(ModeSet::from_energies(1.0, 1, &[0.0, 0.4, 0.4, 0.9, 1.7]).unwrap());
    for a in [0.0, 0.5, f64::INFINITY] {
        let t = partition_table(Arc::clone(&modes), 7, Alpha::new(a).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let draws = 100_000;
        let mut counts = vec![vec![0.0; 8]; modes.len()];
        for _ in 0..draws {
            let s = t.sample_occupation(&mut rng);
            assert_eq!(s.counts.values().sum::<u64>(), 7);
            for (k, c) in counts.iter_mut().enumerate() {
                c[s.get(k) as usize] += 1.0;
            }
        }
        for (k, c) in counts.iter().enumerate() {
            let expected: Vec<f64> = t
                .occupation_marginal(k)
                .unwrap()
                .iter()
                .map(|p| p * draws as f64)
                .collect();
            let (chi2, p, dof) = chi_square_test(c, &expected, 5.0);
            assert!(p > 1e-4, "alpha={a} mode {k}: chi2 {chi2} dof {dof} p {p}");
        }
    }
}

#[test]
fn gaussian_box_dp_matches_cycle_sum() {
    let model = DispersionModel::gaussian(1.0, 3).unwrap();
    let modes = Arc::new(build_mode_set(&model, 10.0, 1e-12, 4_000_000).unwrap());
    let n = 117;
    let t = partition_table(Arc::clone(&modes), n, Alpha::ZERO).unwrap();
    let lz = cycle_sum_log_z(&cycle_weight_sums(&modes, n), n).unwrap();
    for m in [1, 10, 50, 117] {
        assert!(
            (t.log_z_at(m) - lz[m]).abs() <= 1e-10 * lz[m].abs().max(1.0),
            "m={m}"
        );
    }
}

#[test]
fn cache_round_trip_and_mismatch() {
    let model = DispersionModel::gaussian(1.0, 3).unwrap();
    let modes = Arc::new(build_mode_set(&model, 6.0, 1e-10, 4_000_000).unwrap());
    let t = partition_table(Arc::clone(&modes), 40, Alpha::new(0.5).unwrap()).unwrap();
    let key = CacheKey {
        model_hash: model.hash(),
        l: 6.0,
        n: 40,
        alpha: Alpha::new(0.5).unwrap(),
        tail_bound: 1e-10,
    };
    let path = std::env::temp_dir().join(format!("spatperm-cache-{}.bin", std::process::id()));
    t.save_cache(&path, &key).unwrap();
    let back = PartitionTable::load_cache(&path, Arc::clone(&modes), &key).unwrap();
    assert_eq!(back.log_z().to_bits(), t.log_z().to_bits());
    assert_eq!(
        back.occupation_marginal(3).unwrap(),
        t.occupation_marginal(3).unwrap()
    );
    let other = CacheKey {
        n: 41,
        ..key.clone()
    };
    assert!(matches!(
        PartitionTable::load_cache(&path, modes, &other),
        Err(Error::CacheMismatch(_))
    ));
    std::fs::remove_file(&path).ok();
}

#[test]
fn single_mode_log_z_is_zero_and_mgf_at_zero_is_one() {
    let modes = Arc::new(ModeSet::from_energies(1.0, 3, &[0.0]).unwrap());
    for n in [1, 5, 50] {
        let t = partition_table(Arc::clone(&modes), n, Alpha::ZERO).unwrap();
        assert_eq!(t.log_z(), 0.0);
        assert!((t.mgf_n0(0.0).unwrap() - 1.0).abs() < 1e-15);
    }
    let two = Arc::new(ModeSet::from_energies(1.0, 1, &[0.0, 1.0]).unwrap());
    let t = partition_table(two, 2, Alpha::ZERO).unwrap();
    let e = (-1.0f64).exp();
    assert!((t.log_z() - (1.0 + e + e * e).ln()).abs() < 1e-14);
}
