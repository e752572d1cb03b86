use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Mdp, MdpError, MemorylessScheduler, RewardFn};
use num_traits::ToPrimitive;

/// Result of a Monte Carlo run. When any sampled path collected an infinite
/// reward, `divergent` is set and `mean` is `+inf`.
#[derive(Debug, Clone, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub std_err: f64,
    pub trials: usize,
    pub divergent: bool,
}

/// Samples `trials` paths of `horizon` transitions from `s` under `sched` and
/// averages their rewards. Deterministic for a given seed.
pub fn monte_carlo_estimate<M, R>(
    mdp: &M,
    rew: &R,
    sched: &MemorylessScheduler<M::State, M::Action>,
    s: &M::State,
    horizon: usize,
    trials: usize,
    seed: u64,
) -> Result<McEstimate, MdpError>
where
    M: Mdp,
    R: RewardFn<M::State> + ?Sized,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sum = 0.0f64;
    let mut sum_sq = 0.0f64;
    let mut divergent = false;
    for _ in 0..trials {
        let mut state = s.clone();
        let mut total = rew.reward(&state).to_f64();
        for _ in 0..horizon {
            let enabled = mdp.enabled_actions(&state);
            let a = sched
                .action(&state, &enabled)
                .ok_or_else(|| MdpError::SchedulerUndefined(mdp.state_name(&state)))?;
            let dist = mdp.successors(&state, &a);
            let u: f64 = rng.gen();
            let mut acc = 0.0;
            let mut next = None;
            for (t, p) in dist.iter() {
                acc += p.to_f64().unwrap_or(0.0);
                if u < acc {
                    next = Some(t.clone());
                    break;
                }
            }
            // rounding can leave `acc` a hair below 1
            state = next.unwrap_or_else(|| dist.support().last().expect("nonempty").clone());
            total += rew.reward(&state).to_f64();
        }
        if total.is_infinite() {
            divergent = true;
        }
        sum += total;
        sum_sq += total * total;
    }
    if divergent {
        return Ok(McEstimate {
            mean: f64::INFINITY,
            std_err: f64::NAN,
            trials,
            divergent,
        });
    }
    let n = trials as f64;
    let mean = sum / n;
    let std_err = if trials > 1 {
        let var = ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0);
        (var / n).sqrt()
    } else {
        0.0
    };
    Ok(McEstimate {
        mean,
        std_err,
        trials,
        divergent,
    })
}
