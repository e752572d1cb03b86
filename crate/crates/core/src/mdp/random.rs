//! Random finite MDPs for randomized testing.

use std::collections::HashMap;

use num_rational::BigRational;
use rand::seq::index::sample;
use rand::Rng;

use super::{ActionId, ExplicitMdp, ExplicitModel, Mdp, MemorylessScheduler, StateId, TableReward};
use crate::extreal::ExtValue;

#[derive(Debug, Clone, Copy)]
pub struct RandomModelConfig {
    pub max_states: usize,
    pub max_actions: usize,
    /// Probability that a state's reward is infinite.
    pub inf_reward_prob: f64,
}

impl Default for RandomModelConfig {
    fn default() -> Self {
        RandomModelConfig {
            max_states: 4,
            max_actions: 2,
            inf_reward_prob: 0.05,
        }
    }
}

/// A random model with 1..=max_states states. Every state enables the first
/// action; the others are enabled with probability 1/2. Each distribution has
/// one to three successors with random rational weights.
pub fn random_explicit_model<R: Rng + ?Sized>(rng: &mut R, cfg: RandomModelConfig) -> ExplicitModel {
    let n = rng.gen_range(1..=cfg.max_states.max(1));
    let k = rng.gen_range(1..=cfg.max_actions.max(1));
    let names: Vec<String> = (0..n).map(|i| format!("s{}", i)).collect();
    let actions: Vec<String> = (0..k).map(|i| format!("a{}", i)).collect();
    let mut records = Vec::new();
    for s in 0..n {
        for a in 0..k {
            if a > 0 && rng.gen_bool(0.5) {
                continue;
            }
            let support = rng.gen_range(1..=n.min(3));
            let targets = sample(rng, n, support);
            let weights: Vec<u32> = (0..support).map(|_| rng.gen_range(1..=6)).collect();
            let total: u32 = weights.iter().sum();
            for (t, w) in targets.iter().zip(weights) {
                records.push((StateId(s), ActionId(a), BigRational::new(w.into(), total.into()), StateId(t)));
            }
        }
    }
    let mdp = ExplicitMdp::from_parts(names, actions, records).expect("generated model is well formed");
    let mut rewards = TableReward::new();
    for s in 0..n {
        let v = if rng.gen_bool(cfg.inf_reward_prob) {
            ExtValue::infinity()
        } else {
            let num: u32 = rng.gen_range(0..=5);
            let den: u32 = rng.gen_range(1..=3);
            ExtValue::finite(BigRational::new(num.into(), den.into())).expect("nonnegative")
        };
        rewards.set(StateId(s), v);
    }
    ExplicitModel { mdp, rewards }
}

/// A memoryless scheduler picking a uniformly random enabled action in every
/// state.
pub fn random_memoryless_scheduler<R: Rng + ?Sized>(rng: &mut R, mdp: &ExplicitMdp) -> MemorylessScheduler<StateId, ActionId> {
    let mut table = HashMap::new();
    for s in mdp.states() {
        let acts = mdp.enabled_actions(&s);
        table.insert(s, acts[rng.gen_range(0..acts.len())]);
    }
    MemorylessScheduler::new(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn models_round_trip_through_text() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let m = random_explicit_model(&mut rng, RandomModelConfig::default());
            let again = ExplicitModel::parse(&m.to_text()).unwrap();
            assert_eq!(again, m);
        }
    }
}
