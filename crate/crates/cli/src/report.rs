//! Analysis reports: a line-oriented text form with a fixed field order, and
//! the same data as JSON.

use std::fmt::Write as _;
use std::path::Path;

use rewlfp::ExtValue;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub inputs: Vec<Input>,
    pub sections: Vec<Section>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Input {
    pub role: String,
    pub source: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Section {
    pub name: String,
    pub fields: Vec<Field>,
    pub tables: Vec<Table>,
    pub lines: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Field {
    pub key: String,
    pub value: String,
}

/// Iterates at one queried state.
#[derive(Debug, Clone, Serialize)]
pub struct Table {
    pub label: String,
    pub rows: Vec<(usize, String)>,
    pub verdict: String,
}

impl Report {
    pub fn new(command: String) -> Self {
        Report {
            command,
            inputs: Vec::new(),
            sections: Vec::new(),
        }
    }

    pub fn input_bytes(&mut self, role: &str, source: &str, bytes: &[u8]) {
        self.inputs.push(Input {
            role: role.to_string(),
            source: source.to_string(),
            sha256: hex::encode(Sha256::digest(bytes)),
        });
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "command {}", self.command);
        for i in &self.inputs {
            let _ = writeln!(out, "input {} {} sha256:{}", i.role, i.source, i.sha256);
        }
        for s in &self.sections {
            let _ = writeln!(out, "[{}]", s.name);
            for f in &s.fields {
                let _ = writeln!(out, "{} {}", f.key, f.value);
            }
            for t in &s.tables {
                let _ = writeln!(out, "table {}", t.label);
                for (k, v) in &t.rows {
                    let _ = writeln!(out, "  {} {}", k, v);
                }
                let _ = writeln!(out, "verdict {} {}", t.label, t.verdict);
            }
            for l in &s.lines {
                let _ = writeln!(out, "{}", l);
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize") + "\n"
    }
}

impl Section {
    pub fn new(name: &str) -> Self {
        Section {
            name: name.to_string(),
            fields: Vec::new(),
            tables: Vec::new(),
            lines: Vec::new(),
        }
    }

    pub fn field(&mut self, key: &str, value: impl ToString) {
        self.fields.push(Field {
            key: key.to_string(),
            value: value.to_string(),
        });
    }
}

/// Exact rendering by default; `--float` switches to shortest f64 form.
#[derive(Debug, Clone, Copy)]
pub struct Render {
    pub float: bool,
}

impl Render {
    pub fn value(&self, v: &ExtValue) -> String {
        if self.float && !v.is_infinite() {
            format!("{}", v.to_f64())
        } else {
            v.to_string()
        }
    }

    pub fn table(&self, label: String, seq: &[ExtValue], verdict: String) -> Table {
        Table {
            label,
            rows: seq.iter().enumerate().map(|(k, v)| (k, self.value(v))).collect(),
            verdict,
        }
    }
}

/// The verdict for one iterate sequence. A threshold crossing takes
/// precedence over exact convergence.
pub fn verdict(seq: &[ExtValue], converged_at: Option<usize>, threshold: Option<&ExtValue>) -> String {
    if let Some(t) = threshold {
        if let Some(k) = seq.iter().position(|v| v > t) {
            return format!("exceeds-threshold step={}", k);
        }
    }
    match converged_at {
        Some(k) => format!("converged-exact step={}", k),
        None => "lower-bound".to_string(),
    }
}

pub fn read_file(path: &Path) -> Result<(String, Vec<u8>), CliError> {
    let bytes = std::fs::read(path).map_err(|e| CliError::input(path.display(), e))?;
    let text = String::from_utf8(bytes.clone()).map_err(|e| CliError::input(path.display(), e))?;
    Ok((text, bytes))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_precedence() {
        let seq = [ExtValue::zero(), ExtValue::one(), ExtValue::from(5u64)];
        assert_eq!(verdict(&seq, Some(2), None), "converged-exact step=2");
        assert_eq!(verdict(&seq, Some(2), Some(&ExtValue::from(2u64))), "exceeds-threshold step=2");
        assert_eq!(verdict(&seq, None, Some(&ExtValue::from(9u64))), "lower-bound");
    }

    #[test]
    fn text_layout() {
        let mut r = Report::new("mdp solve x".into());
        r.input_bytes("model", "m.txt", b"abc");
        let mut s = Section::new("solve");
        s.field("mode", "min");
        s.tables.push(Render { float: false }.table("s0".into(), &[ExtValue::zero(), ExtValue::ratio(1, 2)], "lower-bound".into()));
        r.sections.push(s);
        let want = "command mdp solve x\n\
                    input model m.txt sha256:ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad\n\
                    [solve]\nmode min\ntable s0\n  0 0\n  1 1/2\nverdict s0 lower-bound\n";
        assert_eq!(r.to_text(), want);
        assert!(r.to_json().contains("\"verdict\": \"lower-bound\""));
    }

    #[test]
    fn float_rendering() {
        let f = Render { float: true };
        assert_eq!(f.value(&ExtValue::ratio(1, 4)), "0.25");
        assert_eq!(f.value(&ExtValue::infinity()), "inf");
    }
}
