//! The analysis input schema and its loader.
//!
//! A spec file is a JSON object with a `kind` and exactly one source: a
//! catalog `fixture` name, a `finite` value table, a `piecewise` linear table
//! or a finite `relation`. Unknown fields are rejected. The shorthand
//! `catalog:<name>` stands for `{"kind": ..., "fixture": "<name>"}` with the
//! kind looked up in the catalog.

use std::path::Path;

use serde::{Deserialize, Serialize};
use slopekit::catalog::{function_fixture, function_fixtures, two_var_fixture, two_var_fixtures, FunctionFixture, TwoVarFixture};
use slopekit::function::{OracleKind, Probe, ProbeFunction};
use slopekit::setval::{mapping_fixture, mapping_fixtures, MappingFixture, SetValuedMapping};
use slopekit::{ExtReal, FiniteMetricSpace, Grid, NormKind, RadiusSchedule, Vector};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Function,
    TwoVarFunction,
    Mapping,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Function => "function",
            Kind::TwoVarFunction => "two_var_function",
            Kind::Mapping => "mapping",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    pub kind: Kind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixture: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub finite: Option<FiniteSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub piecewise: Option<PiecewiseSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relation: Option<RelationSpec>,
    /// Base point coordinates; for fixtures and piecewise tables only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<ScheduleSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    /// Threshold of the criteria conditions.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSpec {
    pub rho0: f64,
    pub gamma: f64,
    pub steps: usize,
}

impl From<RadiusSchedule> for ScheduleSpec {
    fn from(s: RadiusSchedule) -> Self {
        ScheduleSpec { rho0: s.rho0, gamma: s.gamma, steps: s.steps }
    }
}

impl From<ScheduleSpec> for RadiusSchedule {
    fn from(s: ScheduleSpec) -> Self {
        RadiusSchedule { rho0: s.rho0, gamma: s.gamma, steps: s.steps }
    }
}

/// A finite metric space: a distance matrix, or points of `R^n` with a norm.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distances: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub norm: Option<NormKind>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiniteSpec {
    pub space: SpaceSpec,
    /// One value per point; `"inf"` for `+∞`.
    pub values: Vec<ExtReal>,
    /// Index of the base point.
    pub base: usize,
}

/// A continuous piecewise-linear function on the line given by its knots,
/// extended affinely beyond the outer knots and sampled on the knot range.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PiecewiseSpec {
    /// `[x, f(x)]` pairs with strictly increasing `x`.
    pub knots: Vec<[f64; 2]>,
    /// Grid spacing.
    pub h: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelationSpec {
    pub left: SpaceSpec,
    pub right: SpaceSpec,
    /// Graph pairs `[i, j]` meaning `j ∈ F(i)`.
    pub pairs: Vec<[usize; 2]>,
    pub base: [usize; 2],
}

/// What a spec resolves to.
pub enum Source {
    FunctionFixture(FunctionFixture),
    Finite(Probe<FiniteMetricSpace>),
    Piecewise { function: PiecewiseLinear, grid: Grid, base: f64 },
    TwoVarFixture(TwoVarFixture),
    MappingFixture(MappingFixture),
    Relation(SetValuedMapping<FiniteMetricSpace, FiniteMetricSpace>),
}

pub struct Loaded {
    /// `catalog:<name>` or the file path.
    pub label: String,
    pub spec: SpecFile,
    pub source: Source,
}

impl SpecFile {
    /// The spec of a catalog entry.
    pub fn catalog(kind: Kind, name: &str) -> Self {
        SpecFile {
            kind,
            fixture: Some(name.to_string()),
            finite: None,
            piecewise: None,
            relation: None,
            base: None,
            schedule: None,
            tol: None,
            gamma: None,
        }
    }
}

/// Kind of a catalog entry, if the name exists.
pub fn catalog_kind(name: &str) -> Option<Kind> {
    if function_fixtures().iter().any(|f| f.name == name) {
        Some(Kind::Function)
    } else if two_var_fixtures().iter().any(|f| f.name == name) {
        Some(Kind::TwoVarFunction)
    } else if mapping_fixtures().iter().any(|f| f.name == name) {
        Some(Kind::Mapping)
    } else {
        None
    }
}

/// Parses spec text with line, column and field path on failure.
pub fn parse_spec(text: &str, label: &str) -> Result<SpecFile, CliError> {
    let mut de = serde_json::Deserializer::from_str(text);
    let spec: SpecFile = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let field = e.path().to_string();
        let inner = e.into_inner();
        CliError::Schema {
            source_label: label.to_string(),
            line: inner.line(),
            column: inner.column(),
            field,
            message: strip_position(&inner.to_string()),
        }
    })?;
    de.end().map_err(|e| CliError::Schema {
        source_label: label.to_string(),
        line: e.line(),
        column: e.column(),
        field: ".".into(),
        message: strip_position(&e.to_string()),
    })?;
    Ok(spec)
}

fn strip_position(message: &str) -> String {
    match message.rfind(" at line ") {
        Some(i) => message[..i].to_string(),
        None => message.to_string(),
    }
}

/// Loads `catalog:<name>` or a spec file from disk.
pub fn load(input: &str) -> Result<Loaded, CliError> {
    if let Some(name) = input.strip_prefix("catalog:") {
        let kind = catalog_kind(name).ok_or_else(|| CliError::UnknownFixture(name.to_string()))?;
        return resolve(input.to_string(), SpecFile::catalog(kind, name));
    }
    let text = std::fs::read_to_string(Path::new(input))
        .map_err(|e| CliError::Io { path: input.to_string(), message: e.to_string() })?;
    let spec = parse_spec(&text, input)?;
    resolve(input.to_string(), spec)
}

fn invalid(label: &str, field: &str, message: impl Into<String>) -> CliError {
    CliError::Invalid { source_label: label.to_string(), field: field.to_string(), message: message.into() }
}

/// Checks the source fields against the kind and builds the input.
pub fn resolve(label: String, spec: SpecFile) -> Result<Loaded, CliError> {
    let sources: Vec<&str> = [
        spec.fixture.as_ref().map(|_| "fixture"),
        spec.finite.as_ref().map(|_| "finite"),
        spec.piecewise.as_ref().map(|_| "piecewise"),
        spec.relation.as_ref().map(|_| "relation"),
    ]
    .into_iter()
    .flatten()
    .collect();
    if sources.len() != 1 {
        return Err(invalid(
            &label,
            ".",
            format!("exactly one of fixture, finite, piecewise, relation is required, found {}", sources.len()),
        ));
    }
    if let Some(s) = spec.schedule {
        RadiusSchedule::from(s).validate().map_err(|e| invalid(&label, "schedule", e.to_string()))?;
    }
    if let Some(t) = spec.tol {
        if !(t > 0.0 && t.is_finite()) {
            return Err(invalid(&label, "tol", "must be positive"));
        }
    }
    if let Some(g) = spec.gamma {
        if !(g > 0.0 && g.is_finite()) {
            return Err(invalid(&label, "gamma", "must be positive"));
        }
    }
    let allowed = match spec.kind {
        Kind::Function => ["fixture", "finite", "piecewise"].as_slice(),
        Kind::TwoVarFunction => ["fixture"].as_slice(),
        Kind::Mapping => ["fixture", "relation"].as_slice(),
    };
    if !allowed.contains(&sources[0]) {
        return Err(invalid(
            &label,
            sources[0],
            format!("not a source for kind {}; expected one of {}", spec.kind.as_str(), allowed.join(", ")),
        ));
    }
    if spec.base.is_some() && (spec.finite.is_some() || spec.relation.is_some() || spec.kind == Kind::TwoVarFunction) {
        return Err(invalid(&label, "base", "base coordinates apply to function or mapping fixtures and piecewise tables"));
    }
    let source = match (spec.kind, &spec) {
        (Kind::Function, SpecFile { fixture: Some(name), .. }) => {
            let mut fx = function_fixture(name).ok_or_else(|| CliError::UnknownFixture(name.clone()))?;
            if let Some(b) = &spec.base {
                if b.len() != fx.space.dim {
                    return Err(invalid(&label, "base", format!("expected {} coordinates", fx.space.dim)));
                }
                fx.base = Vector::new(b);
            }
            Source::FunctionFixture(fx)
        }
        (Kind::Function, SpecFile { finite: Some(f), .. }) => {
            let space = build_space(&label, "finite.space", &f.space)?;
            Source::Finite(Probe::finite(space, f.values.clone(), f.base).map_err(|e| invalid(&label, "finite", e.to_string()))?)
        }
        (Kind::Function, SpecFile { piecewise: Some(p), .. }) => {
            let function = PiecewiseLinear::new(&p.knots).map_err(|m| invalid(&label, "piecewise.knots", m))?;
            let (lo, hi) = (p.knots[0][0], p.knots[p.knots.len() - 1][0]);
            let grid = Grid::new(1, lo, hi, p.h).map_err(|e| invalid(&label, "piecewise.h", e.to_string()))?;
            let base = match &spec.base {
                Some(b) if b.len() == 1 => b[0],
                Some(_) => return Err(invalid(&label, "base", "expected 1 coordinate")),
                None => 0.0,
            };
            Source::Piecewise { function, grid, base }
        }
        (Kind::TwoVarFunction, SpecFile { fixture: Some(name), .. }) => {
            Source::TwoVarFixture(two_var_fixture(name).ok_or_else(|| CliError::UnknownFixture(name.clone()))?)
        }
        (Kind::Mapping, SpecFile { fixture: Some(name), .. }) => {
            let mut fx = mapping_fixture(name).ok_or_else(|| CliError::UnknownFixture(name.clone()))?;
            if let Some(b) = &spec.base {
                if b.len() != 2 {
                    return Err(invalid(&label, "base", "expected coordinates [x, y]"));
                }
                fx.base = (b[0], b[1]);
            }
            Source::MappingFixture(fx)
        }
        (Kind::Mapping, SpecFile { relation: Some(r), .. }) => {
            let left = build_space(&label, "relation.left", &r.left)?;
            let right = build_space(&label, "relation.right", &r.right)?;
            let pairs: Vec<(usize, usize)> = r.pairs.iter().map(|p| (p[0], p[1])).collect();
            let f = SetValuedMapping::finite(left, right, &pairs, (r.base[0], r.base[1]))
                .map_err(|e| invalid(&label, "relation", e.to_string()))?;
            Source::Relation(f)
        }
        _ => unreachable!("source checked against kind"),
    };
    Ok(Loaded { label, spec, source })
}

fn build_space(label: &str, field: &str, s: &SpaceSpec) -> Result<FiniteMetricSpace, CliError> {
    match (&s.distances, &s.points) {
        (Some(d), None) => {
            if s.norm.is_some() {
                return Err(invalid(label, &format!("{field}.norm"), "a norm applies to points only"));
            }
            FiniteMetricSpace::new(d.clone()).map_err(|e| invalid(label, &format!("{field}.distances"), e.to_string()))
        }
        (None, Some(p)) => {
            let dim = p.first().map_or(0, Vec::len);
            if !(1..=3).contains(&dim) || p.iter().any(|q| q.len() != dim) {
                return Err(invalid(label, &format!("{field}.points"), "points need 1 to 3 coordinates each, all alike"));
            }
            let pts: Vec<Vector> = p.iter().map(|q| Vector::new(q)).collect();
            FiniteMetricSpace::from_points(&pts, s.norm.unwrap_or(NormKind::L2))
                .map_err(|e| invalid(label, &format!("{field}.points"), e.to_string()))
        }
        _ => Err(invalid(label, field, "exactly one of distances, points is required")),
    }
}

/// Continuous piecewise-linear `f : R → R`.
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewiseLinear {
    xs: Vec<f64>,
    fs: Vec<f64>,
    convex: bool,
}

impl PiecewiseLinear {
    pub fn new(knots: &[[f64; 2]]) -> Result<Self, String> {
        if knots.len() < 2 {
            return Err("at least two knots are required".into());
        }
        if knots.iter().flatten().any(|v| !v.is_finite()) {
            return Err("knots must be finite".into());
        }
        if knots.windows(2).any(|w| !(w[1][0] > w[0][0])) {
            return Err("knot abscissae must be strictly increasing".into());
        }
        let xs: Vec<f64> = knots.iter().map(|k| k[0]).collect();
        let fs: Vec<f64> = knots.iter().map(|k| k[1]).collect();
        let mut f = PiecewiseLinear { xs, fs, convex: true };
        f.convex = (1..f.xs.len() - 1).all(|i| f.slope(i - 1) <= f.slope(i) + 1e-12);
        Ok(f)
    }

    /// Slope of segment `k`, between knots `k` and `k + 1`.
    fn slope(&self, k: usize) -> f64 {
        (self.fs[k + 1] - self.fs[k]) / (self.xs[k + 1] - self.xs[k])
    }

    fn segment(&self, x: f64) -> usize {
        let n = self.xs.len();
        self.xs[1..n - 1].partition_point(|&k| k <= x)
    }

    fn knot_at(&self, x: f64) -> Option<usize> {
        let scale = 1e-12 * (1.0 + x.abs());
        self.xs.iter().position(|&k| (k - x).abs() <= scale)
    }
}

impl ProbeFunction for PiecewiseLinear {
    fn eval(&self, x: &Vector) -> ExtReal {
        let t = x.get(0);
        let k = self.segment(t);
        ExtReal::finite(self.fs[k] + self.slope(k) * (t - self.xs[k]))
    }

    /// `[left slope, right slope]` at an interior knot when it is a convex
    /// kink, empty at a concave one, and the segment slope elsewhere.
    fn subgradients(&self, x: &Vector) -> Option<Vec<Vector>> {
        let t = x.get(0);
        let last = self.xs.len() - 1;
        match self.knot_at(t) {
            Some(i) if i > 0 && i < last => {
                let (lo, hi) = (self.slope(i - 1), self.slope(i));
                if lo > hi + 1e-12 {
                    Some(Vec::new())
                } else {
                    let mut out = vec![Vector::scalar(lo)];
                    if hi != lo {
                        out.push(Vector::scalar(hi));
                    }
                    if lo < 0.0 && hi > 0.0 {
                        out.push(Vector::scalar(0.0));
                    }
                    Some(out)
                }
            }
            _ => Some(vec![Vector::scalar(self.slope(self.segment(t)))]),
        }
    }

    fn oracle_kind(&self) -> Option<OracleKind> {
        Some(if self.convex { OracleKind::Exact } else { OracleKind::GradientOnly })
    }

    fn is_convex(&self) -> bool {
        self.convex
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn piecewise_evaluation_and_subgradients() {
        let f = PiecewiseLinear::new(&[[-1.0, 1.0], [0.0, 0.0], [1.0, 2.0]]).unwrap();
        assert!(f.is_convex());
        assert_eq!(f.eval(&Vector::scalar(0.5)), ExtReal::finite(1.0));
        assert_eq!(f.eval(&Vector::scalar(2.0)), ExtReal::finite(4.0));
        let at_kink = f.subgradients(&Vector::scalar(0.0)).unwrap();
        assert_eq!(at_kink.len(), 3);
        let g = PiecewiseLinear::new(&[[-1.0, 0.0], [0.0, 1.0], [1.0, 0.0]]).unwrap();
        assert!(!g.is_convex());
        assert_eq!(g.subgradients(&Vector::scalar(0.0)), Some(Vec::new()));
        assert!(PiecewiseLinear::new(&[[0.0, 0.0], [0.0, 1.0]]).is_err());
    }

    #[test]
    fn schema_errors_carry_positions() {
        let err = parse_spec("{\n  \"kind\": \"function\",\n  \"fixtur\": \"abs\"\n}", "t.json").unwrap_err();
        match err {
            CliError::Schema { line, field, .. } => {
                assert_eq!(line, 3);
                assert_eq!(field, "fixtur");
            }
            e => panic!("{e}"),
        }
        let err = parse_spec("{\"kind\": \"function\", \"schedule\": {\"rho0\": \"x\"}}", "t.json").unwrap_err();
        assert!(matches!(err, CliError::Schema { ref field, .. } if field == "schedule.rho0"), "{err}");
    }

    #[test]
    fn sources_must_match_the_kind() {
        let spec = SpecFile::catalog(Kind::TwoVarFunction, "abs");
        assert!(resolve("x".into(), spec).is_err());
        let mut spec = SpecFile::catalog(Kind::Function, "abs");
        spec.piecewise = Some(PiecewiseSpec { knots: vec![[0.0, 0.0], [1.0, 1.0]], h: 0.5 });
        assert!(matches!(resolve("x".into(), spec), Err(CliError::Invalid { .. })));
        assert_eq!(catalog_kind("halfline-mapping"), Some(Kind::Mapping));
    }
}
