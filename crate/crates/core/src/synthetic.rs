//! Seeded synthetic spin datasets used by tests, benches and demos.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::model::{Dataset, EnumeratedModel, Spin};

fn random_spin(rng: &mut impl Rng) -> Spin {
    if rng.gen::<bool>() {
        1
    } else {
        -1
    }
}

fn flip_noise(case: &mut [Spin], flip_prob: f64, rng: &mut impl Rng) {
    for s in case {
        if rng.gen::<f64>() < flip_prob {
            *s = -*s;
        }
    }
}

/// `n` cases of width `dim`, each a noisy copy of one of `n_prototypes`
/// random prototypes (assigned round-robin).
pub fn prototype_dataset(n: usize, dim: usize, n_prototypes: usize, flip_prob: f64, seed: u64) -> Result<Dataset> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let protos: Vec<Vec<Spin>> = (0..n_prototypes.max(1))
        .map(|_| (0..dim).map(|_| random_spin(&mut rng)).collect())
        .collect();
    let cases = (0..n)
        .map(|i| {
            let mut c = protos[i % protos.len()].clone();
            flip_noise(&mut c, flip_prob, &mut rng);
            c
        })
        .collect();
    Dataset::new(cases)
}

/// Correlation structure of a square spin image class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StripePattern {
    /// Each row shares one random sign.
    Rows,
    /// Each column shares one random sign.
    Columns,
    /// Each 2×2 block shares one random sign.
    Blocks,
}

impl StripePattern {
    pub const ALL: [StripePattern; 3] = [StripePattern::Rows, StripePattern::Columns, StripePattern::Blocks];
}

/// `n` images of `side × side` spins whose pixel marginals are all zero but
/// whose pairwise correlations follow `pattern`.
pub fn stripe_dataset(pattern: StripePattern, n: usize, side: usize, flip_prob: f64, seed: u64) -> Result<Dataset> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cases = (0..n)
        .map(|_| {
            let groups: Vec<Spin> = (0..side * side).map(|_| random_spin(&mut rng)).collect();
            let mut img: Vec<Spin> = (0..side * side)
                .map(|p| {
                    let (r, c) = (p / side, p % side);
                    let g = match pattern {
                        StripePattern::Rows => r,
                        StripePattern::Columns => c,
                        StripePattern::Blocks => (r / 2) * side + c / 2,
                    };
                    groups[g]
                })
                .collect();
            flip_noise(&mut img, flip_prob, &mut rng);
            img
        })
        .collect();
    Dataset::new(cases)
}

/// Enumerated model with features drawn uniformly from `[−1, 1]`.
pub fn random_enumerated_model(n_visible: usize, n_hidden: usize, n_features: usize, seed: u64) -> Result<EnumeratedModel> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    EnumeratedModel::from_fn(n_visible, n_hidden, n_features, |_, _, row| {
        for g in row {
            *g = rng.gen_range(-1.0..1.0);
        }
    })
}
