//! Randomized property suites. Every property runs on 500 instances.

mod common;

use num_rational::BigRational;
use num_traits::One;
use proptest::prelude::*;
use rand::Rng;

use common::props::{self, skip_to_tick0};
use rewlfp::pgcl::{parse_program, ProgramState};
use rewlfp::wp::gen::{random_expectation, random_loop, random_loop_free, random_state, VARS};
use rewlfp::wp::{op_wp, wp, WpMode};

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 500,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn bellman_is_monotone(seed: u64, min: bool) {
        props::bellman_is_monotone(seed, min)?;
    }

    #[test]
    fn kleene_chain_is_monotone(seed: u64, min: bool, steps in 1usize..12) {
        props::kleene_chain_is_monotone(seed, min, steps)?;
    }

    #[test]
    fn park_certificates_bound_every_iterate(seed: u64, min: bool) {
        props::park_certificates_bound_every_iterate(seed, min)?;
    }

    #[test]
    fn path_probabilities_sum_to_one(seed: u64, n in 0usize..5) {
        props::path_probabilities_sum_to_one(seed, n)?;
    }

    #[test]
    fn demonic_below_angelic(seed: u64, budget in 0usize..5) {
        props::demonic_below_angelic(seed, budget)?;
    }

    #[test]
    fn substitution_law(seed: u64) {
        props::substitution_law(seed)?;
    }

    #[test]
    fn tick_zero_is_skip(seed: u64) {
        props::tick_zero_is_skip(seed)?;
    }

    #[test]
    fn wp_grows_with_budget(seed: u64, budget in 0usize..5) {
        let mut r = common::rng(seed);
        let c = random_loop(&mut r, 2);
        let x = random_expectation(&mut r, 2);
        let mode = if r.gen_bool(0.5) { WpMode::Demonic } else { WpMode::Angelic };
        let lo = wp(&c, &x, mode, budget);
        let hi = wp(&c, &x, mode, budget + 1);
        let s = random_state(&mut r);
        prop_assert!(lo.eval(&s) <= hi.eval(&s));
    }

    #[test]
    fn print_parse_round_trip(seed: u64) {
        let mut r = common::rng(seed);
        let c = if r.gen_bool(0.5) { random_loop_free(&mut r, 4, true) } else { random_loop(&mut r, 3) };
        let printed = c.to_string();
        let parsed = parse_program(&printed).unwrap();
        prop_assert_eq!(&parsed, &c);
        prop_assert_eq!(parsed.to_string(), printed);
    }

    #[test]
    fn explicit_zeros_are_invisible(seed: u64) {
        let mut r = common::rng(seed);
        let s = random_state(&mut r);
        let v = VARS[r.gen_range(0..VARS.len())];
        let with_zero = s.updated("fresh", BigRational::from_integer(0.into()));
        prop_assert_eq!(&with_zero, &s);
        let roundtrip = s.updated(v, BigRational::one()).updated(v, s.get(v));
        prop_assert_eq!(roundtrip, s);
    }
}

#[test]
fn tick_zero_is_skip_on_loops() {
    let c = parse_program("while (x < 3) { { skip } [1/2] { x := x + 1 }; skip }").unwrap();
    let t = skip_to_tick0(&c);
    let x = rewlfp::wp::Expectation::var("y");
    let s = ProgramState::new();
    for mode in [WpMode::Demonic, WpMode::Angelic] {
        for b in [0, 3, 10] {
            assert_eq!(wp(&c, &x, mode, b).eval(&s), wp(&t, &x, mode, b).eval(&s));
        }
        assert_eq!(op_wp(&c, &x, &s, mode, 30).unwrap(), op_wp(&t, &x, &s, mode, 30).unwrap());
    }
}
