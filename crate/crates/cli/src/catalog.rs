//! The `catalog` subcommand: every built-in fixture with its hand-derived
//! constants and a spec file that reproduces it through `analyze`.

use std::fmt::Write as _;

use serde::Serialize;
use slopekit::catalog::{function_fixtures, two_var_fixtures};
use slopekit::setval::mapping_fixtures;

use crate::analyze::Truth;
use crate::spec::{Kind, SpecFile};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Entry {
    pub name: String,
    pub kind: Kind,
    pub description: String,
    pub ground_truth: Vec<Truth>,
    pub spec: SpecFile,
}

fn truth(name: &str, value: f64) -> Truth {
    Truth { name: name.into(), value }
}

pub fn entries() -> Vec<Entry> {
    let mut out = Vec::new();
    for fx in function_fixtures() {
        let t = fx.truth;
        let mut ground_truth = vec![
            truth("er_modulus", t.er),
            truth("uniform_strict", t.uniform_strict),
            truth("strict_outer", t.strict_outer),
        ];
        if let Some(sd) = t.strict_outer_subdiff {
            ground_truth.push(truth("subdiff_strict_outer", sd));
        }
        out.push(Entry {
            name: fx.name.into(),
            kind: Kind::Function,
            description: fx.description.into(),
            ground_truth,
            spec: SpecFile::catalog(Kind::Function, fx.name),
        });
    }
    for fx in two_var_fixtures() {
        out.push(Entry {
            name: fx.name.into(),
            kind: Kind::TwoVarFunction,
            description: fx.description.into(),
            ground_truth: vec![truth("er2", fx.er)],
            spec: SpecFile::catalog(Kind::TwoVarFunction, fx.name),
        });
    }
    for fx in mapping_fixtures() {
        out.push(Entry {
            name: fx.name.into(),
            kind: Kind::Mapping,
            description: fx.description.into(),
            ground_truth: vec![truth("sr", fx.subregularity)],
            spec: SpecFile::catalog(Kind::Mapping, fx.name),
        });
    }
    out
}

pub fn entry(name: &str) -> Option<Entry> {
    entries().into_iter().find(|e| e.name == name)
}

pub fn render_table(entries: &[Entry]) -> String {
    let width = entries.iter().map(|e| e.name.len()).max().unwrap_or(4);
    let mut out = String::new();
    for e in entries {
        let truths = e.ground_truth.iter().map(|t| format!("{}={}", t.name, t.value)).collect::<Vec<_>>().join(" ");
        let _ = writeln!(out, "{:<width$}  {:<16}  {}", e.name, e.kind.as_str(), truths);
        let _ = writeln!(out, "{:<width$}  {}", "", e.description);
    }
    out
}
