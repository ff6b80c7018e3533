//! Fixtures shared by the benchmarks.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use spatperm::mcmc::{
    generate_points, BoxGeometry, HamiltonianSpec, PermutationState, PointProcess,
};
use spatperm::{Alpha, DispersionModel};

pub fn gaussian(dim: usize) -> Arc<DispersionModel> {
    Arc::new(DispersionModel::gaussian(1.0, dim).expect("valid Gaussian"))
}

/// Poisson points at density `rho` in `d = 3`, identity permutation.
pub fn poisson_state(
    n: usize,
    rho: f64,
    alpha: Alpha,
    seed: u64,
) -> (PermutationState, HamiltonianSpec) {
    let side = (n as f64 / rho).cbrt();
    let geometry = BoxGeometry::new(side, 3).expect("positive side");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = generate_points(&PointProcess::Poisson, &geometry, n, &mut rng).expect("n > 0");
    let spec = HamiltonianSpec::with_alpha(gaussian(3), alpha);
    let state = PermutationState::new(&points, geometry, &spec).expect("finite energy");
    (state, spec)
}
