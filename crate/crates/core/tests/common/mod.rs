#![allow(dead_code)]

use avwc_core::channel::AvwcPair;
use avwc_core::{Distribution, StochasticMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn m(rows: &[&[f64]]) -> StochasticMatrix {
    StochasticMatrix::from_rows(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
}

/// Dirichlet(1) sample via normalized exponentials.
pub fn random_dist(rng: &mut impl Rng, n: usize) -> Distribution {
    let w: Vec<f64> = (0..n).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    Distribution::from_weights(&w).unwrap()
}

pub fn random_matrix(rng: &mut impl Rng, n_in: usize, n_out: usize) -> StochasticMatrix {
    let rows = (0..n_in)
        .map(|_| random_dist(rng, n_out))
        .collect::<Vec<_>>();
    StochasticMatrix::from_distributions(&rows).unwrap()
}

pub fn random_pair(rng: &mut impl Rng, nx: usize, ny: usize, nz: usize, ns: usize) -> AvwcPair {
    AvwcPair::from_matrices(
        (0..ns).map(|_| random_matrix(rng, nx, ny)).collect(),
        (0..ns).map(|_| random_matrix(rng, nx, nz)).collect(),
    )
    .unwrap()
}

/// Three inputs, binary outputs, two jammer states.
pub fn example_pair() -> AvwcPair {
    AvwcPair::from_matrices(
        vec![
            m(&[&[0.1, 0.9], &[0.7, 0.3], &[0.8, 0.2]]),
            m(&[&[0.2, 0.8], &[0.85, 0.15], &[0.9, 0.1]]),
        ],
        vec![
            m(&[&[0.25, 0.75], &[0.4, 0.6], &[0.6, 0.4]]),
            m(&[&[0.3, 0.7], &[0.45, 0.55], &[0.65, 0.35]]),
        ],
    )
    .unwrap()
}
