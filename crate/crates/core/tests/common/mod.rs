#![allow(dead_code)]

pub mod figure;
pub mod props;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use rewlfp::mdp::random::{random_explicit_model, RandomModelConfig};
use rewlfp::ExplicitModel;

/// The random model corpus: at most 4 states, at most 2 actions, random
/// rational probabilities and rewards with occasional infinity.
pub fn corpus(count: usize, seed: u64) -> Vec<ExplicitModel> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| random_explicit_model(&mut rng, RandomModelConfig::default()))
        .collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
