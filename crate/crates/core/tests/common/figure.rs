//! Hand transcription of the drawn operational fragment of the example loop
//! (with `r = 1`), and the committed golden dump.
//!
//! Regenerate the golden file with `REWLFP_BLESS=1 cargo test --test fragment`.

use std::collections::{BTreeSet, HashMap};
use std::path::PathBuf;

use num_rational::BigRational;
use rewlfp::opsem::{dump_fragment, Configuration, Fragment, OpAction};
use rewlfp::pgcl::{example_program, parse_program, parse_state};
use rewlfp::ExtValue;

const LOOP: &str = "while (x = 0) { { tick(1) } [] { { skip } [1/2] { x := 1 } }; y := y + 1 }";

pub const GOLDEN_DEPTH: usize = 6;

pub fn golden_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden/fragment_depth6.txt")
}

pub fn start() -> Configuration {
    Configuration::running(example_program(ExtValue::one()), parse_state("x=0,y=0").unwrap())
}

fn running(prog: &str, state: &str) -> Configuration {
    let src = if prog.is_empty() { LOOP.to_string() } else { format!("{}; {}", prog, LOOP) };
    Configuration::running(parse_program(&src).unwrap(), parse_state(state).unwrap())
}

/// The drawn nodes. The figure draws the two routes to `y := y + 1` with
/// `x = 0, y = 0` as separate boxes; they are the same configuration and are
/// listed once here.
pub fn figure_nodes() -> Vec<(&'static str, Configuration)> {
    let body = "{ { tick(1) } [] { { skip } [1/2] { x := 1 } }; y := y + 1 }";
    vec![
        ("s0", running("", "x=0,y=0")),
        ("s1", running(body, "x=0,y=0")),
        ("s2", running("{ tick(1); y := y + 1 }", "x=0,y=0")),
        ("s3", running("{ { skip } [1/2] { x := 1 }; y := y + 1 }", "x=0,y=0")),
        ("s4", running("y := y + 1", "x=0,y=0")),
        ("s5", running("{ skip; y := y + 1 }", "x=0,y=0")),
        ("s6", running("", "x=0,y=1")),
        ("s7", running("{ x := 1; y := y + 1 }", "x=0,y=0")),
        ("s9", running("y := y + 1", "x=1,y=0")),
        ("s10", running("", "x=1,y=1")),
        ("term", Configuration::Terminated(parse_state("x=1,y=1").unwrap())),
        ("sink", Configuration::Sink),
    ]
}

/// Drawn edges `(from, action, probability, to)`. `s6` is drawn with an
/// ellipsis, so its successors are not part of the figure.
pub fn figure_edges() -> Vec<(&'static str, OpAction, BigRational, &'static str)> {
    let one = BigRational::from_integer(1.into());
    let half = BigRational::new(1.into(), 2.into());
    vec![
        ("s0", OpAction::N, one.clone(), "s1"),
        ("s1", OpAction::L, one.clone(), "s2"),
        ("s1", OpAction::R, one.clone(), "s3"),
        ("s2", OpAction::N, one.clone(), "s4"),
        ("s3", OpAction::N, half.clone(), "s5"),
        ("s3", OpAction::N, half, "s7"),
        ("s5", OpAction::N, one.clone(), "s4"),
        ("s4", OpAction::N, one.clone(), "s6"),
        ("s7", OpAction::N, one.clone(), "s9"),
        ("s9", OpAction::N, one.clone(), "s10"),
        ("s10", OpAction::N, one.clone(), "term"),
        ("term", OpAction::N, one.clone(), "sink"),
        ("sink", OpAction::N, one, "sink"),
    ]
}

/// Maps figure names to fragment ids.
pub fn locate(f: &Fragment, skip_sink: bool) -> Result<HashMap<&'static str, usize>, String> {
    figure_nodes()
        .into_iter()
        .filter(|(n, _)| !(skip_sink && *n == "sink"))
        .map(|(n, c)| f.find(&c).map(|id| (n, id)).ok_or_else(|| format!("{} = {} missing", n, c)))
        .collect()
}

fn edge_set(edges: impl IntoIterator<Item = (OpAction, BigRational, usize)>) -> BTreeSet<(String, BigRational, usize)> {
    edges.into_iter().map(|(a, p, t)| (a.name().to_string(), p, t)).collect()
}

/// Checks that the figure embeds exactly into the depth-7 dump: every drawn
/// node exists with the drawn reward, and every drawn expanded node has
/// exactly the drawn out-edges.
pub fn check_embedding() -> Result<(), String> {
    let f = dump_fragment(&start(), 7);
    let ids = locate(&f, false)?;
    if ids.values().collect::<BTreeSet<_>>().len() != ids.len() {
        return Err("two drawn nodes share a configuration".into());
    }
    for (name, _) in figure_nodes() {
        let id = ids[name];
        let want = if name == "s2" { ExtValue::one() } else { ExtValue::zero() };
        if f.nodes[id].reward != want {
            return Err(format!("reward of {} is {}", name, f.nodes[id].reward));
        }
        if name == "s6" {
            continue;
        }
        if !f.nodes[id].expanded {
            // only the sink sits at the depth bound
            if name != "sink" || f.nodes[id].depth != 7 {
                return Err(format!("{} unexpectedly unexpanded", name));
            }
            continue;
        }
        let drawn = edge_set(
            figure_edges().into_iter().filter(|e| e.0 == name).map(|(_, a, p, t)| (a, p, ids[t])),
        );
        if edge_set(f.out_edges(id)) != drawn {
            return Err(format!("edges of {} differ from the drawing", name));
        }
    }
    Ok(())
}

/// Compares the depth-6 dump with the committed golden text, rewriting the
/// file first when `REWLFP_BLESS` is set.
pub fn check_golden() -> Result<(), String> {
    let text = dump_fragment(&start(), GOLDEN_DEPTH).to_text();
    let path = golden_path();
    if std::env::var_os("REWLFP_BLESS").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).map_err(|e| e.to_string())?;
        std::fs::write(&path, &text).map_err(|e| e.to_string())?;
    }
    let golden = std::fs::read_to_string(&path).map_err(|e| format!("{}: {}", path.display(), e))?;
    if text == golden {
        Ok(())
    } else {
        Err("depth-6 dump differs from the golden file".into())
    }
}
