//! Fixtures shared by the criterion benchmarks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rewlfp::mdp::random::{random_explicit_model, RandomModelConfig};
use rewlfp::pgcl::example_program;
use rewlfp::{ExplicitModel, ExtValue, Prog};

/// The example loop with reward 1 on the left branch.
pub fn example_loop() -> Prog {
    example_program(ExtValue::one())
}

/// A fixed batch of small random models.
pub fn random_models(count: usize) -> Vec<ExplicitModel> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    (0..count)
        .map(|_| random_explicit_model(&mut rng, RandomModelConfig::default()))
        .collect()
}

/// A nested loop whose wp grows with the budget squared.
pub const NESTED: &str = "while (x < 4) { y := 0; while (y < 3) { { y := y + 1 } [1/2] { tick(1) } }; x := x + 1 }";
