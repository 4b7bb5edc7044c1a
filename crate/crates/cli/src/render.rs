//! Report emission. Every format carries the full band sequences.

use std::fmt::Write as _;

use clap::ValueEnum;
use serde::Serialize;
use slopekit::ExtReal;

use crate::analyze::{Quantity, Report};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
    Csv,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Table => "txt",
            Format::Csv => "csv",
        }
    }
}

pub fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn ext(v: Option<ExtReal>) -> String {
    match v {
        None => "n/a".into(),
        Some(v) if v.is_infinite() => "inf".into(),
        Some(v) => format!("{}", v.value()),
    }
}

fn yes_no(b: Option<bool>) -> &'static str {
    match b {
        Some(true) => "true",
        Some(false) => "false",
        None => "n/a",
    }
}

fn sequence(q: &Quantity) -> String {
    q.per_radius
        .iter()
        .map(|(r, v)| format!("{r}:{}", ext(Some(*v))))
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn render(report: &Report, format: Format) -> String {
    match format {
        Format::Json => json(report),
        Format::Table => table(report),
        Format::Csv => csv(report),
    }
}

fn table(r: &Report) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "input     {}", r.input);
    let _ = writeln!(out, "kind      {}", r.kind.as_str());
    let _ = writeln!(out, "base      {}", r.base);
    let _ = writeln!(out, "point     {}", r.point);
    let _ = writeln!(out, "points    {}", r.probe_points);
    let _ = writeln!(
        out,
        "schedule  rho0={} gamma={} steps={}  tol={}  criteria gamma={}",
        r.schedule.rho0, r.schedule.gamma, r.schedule.steps, r.tol, r.gamma
    );
    let _ = writeln!(out);
    let width = r.quantities.iter().map(|q| q.name.len()).max().unwrap_or(8).max(8);
    let _ = writeln!(out, "{:<width$}  {:<5}  {:<22}  {:<8}  {:<9}  per radius", "quantity", "at", "value", "monotone", "saturated");
    for q in &r.quantities {
        let _ = writeln!(
            out,
            "{:<width$}  {:<5}  {:<22}  {:<8}  {:<9}  {}",
            q.name,
            q.at,
            ext(q.value),
            yes_no(q.monotone),
            yes_no(q.saturated),
            sequence(q)
        );
    }
    let _ = writeln!(out);
    let _ = writeln!(out, "conditions (gamma = {}, zero floor = {})", r.verdict.config.gamma, r.verdict.config.zero_floor);
    for c in &r.verdict.conditions {
        let _ = writeln!(out, "  ({})  {:<6}  {:<22}  {}", c.label, yes_no(c.holds), ext(c.value), c.description);
    }
    let _ = writeln!(out, "audits");
    for a in &r.verdict.audits {
        let status = if !a.audited {
            "skipped"
        } else if a.antecedent == Some(true) {
            "checked"
        } else {
            "vacuous"
        };
        let _ = writeln!(out, "  {:<32}  {:<10}  {}", a.name, format!("{:?}", a.class).to_lowercase(), status);
    }
    if let Some(ls) = &r.limit_set {
        let _ = writeln!(
            out,
            "limit-set test: excludes origin = {}, threshold = {}, exhausted = {}",
            ls.excludes_origin, ls.threshold, ls.exhausted
        );
        for w in &ls.witnesses {
            let _ = writeln!(
                out,
                "  level {}  t={}  u={}  v={}  y*={}  x*={}  margin={}",
                w.level, w.t, w.u, w.v, w.ystar, w.xstar, w.margin
            );
        }
    }
    if let Some(c) = &r.conditions {
        let _ = writeln!(
            out,
            "(P1) {} over {} off-slice points; (P2) lower bound {}",
            if c.p1_ok { "holds" } else { "fails" },
            c.off_slice_samples,
            ext(Some(c.p2_lower_bound))
        );
    }
    if !r.ground_truth.is_empty() {
        let _ = writeln!(out, "ground truth");
        for t in &r.ground_truth {
            let _ = writeln!(out, "  {} = {}", t.name, t.value);
        }
    }
    for f in &r.flags {
        let _ = writeln!(out, "flag: {f}");
    }
    let _ = writeln!(out, "{}: {}", r.headline.property, if r.headline.holds { "yes" } else { "no" });
    out
}

fn csv(r: &Report) -> String {
    let mut out = String::from("section,name,at,rho,value\n");
    for q in &r.quantities {
        for (rho, v) in &q.per_radius {
            let _ = writeln!(out, "quantity,{},{},{},{}", q.name, q.at, rho, ext(Some(*v)));
        }
        let _ = writeln!(out, "quantity,{},{},reported,{}", q.name, q.at, ext(q.value));
    }
    for c in &r.verdict.conditions {
        let _ = writeln!(out, "condition,({}),base,{},{}", c.label, yes_no(c.holds), ext(c.value));
    }
    for t in &r.ground_truth {
        let _ = writeln!(out, "truth,{},base,,{}", t.name, t.value);
    }
    let _ = writeln!(out, "headline,{},base,,{}", r.headline.property, r.headline.holds);
    out
}
