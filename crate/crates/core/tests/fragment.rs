//! The reachable operational fragment of the example loop, compared with a
//! hand transcription of the drawn figure and with a committed golden dump.

mod common;

use common::figure::{check_embedding, check_golden, locate, start};
use rewlfp::opsem::{dump_fragment, Configuration};

#[test]
fn figure_embeds_exactly_in_depth_seven_dump() {
    check_embedding().unwrap();
}

#[test]
fn depth_six_dump_is_the_figure_plus_the_second_iteration() {
    let f = dump_fragment(&start(), 6);
    let ids = locate(&f, true).unwrap();
    assert!(f.find(&Configuration::Sink).is_none());
    let drawn: Vec<usize> = ids.values().copied().collect();
    // everything not drawn lies below the elided node s6
    let below_s6 = dump_fragment(&f.nodes[ids["s6"]].config, 2);
    for n in &f.nodes {
        if !drawn.contains(&n.id) {
            assert!(below_s6.find(&n.config).is_some(), "unexpected node {}", n.config);
        }
    }
    assert_eq!(f.nodes.len(), drawn.len() + below_s6.nodes.len() - 1);
}

#[test]
fn depth_six_dump_matches_golden_file() {
    check_golden().unwrap();
}
