//! Run reports: a header plus a stream of typed records, emitted as JSON
//! lines or as CSV rows with a fixed column set.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::criteria::{
    CollectiveSteeringReport, GenuineSteeringReport, MonogamyOutcome, SteeringValue,
    TripartiteScanReport,
};
use crate::error::{Result, SteeringError};
use crate::scenarios::{
    EavesdropRecord, SecretSharingReport, ShotEstimate, SweepPoint, ThresholdResult,
};
use crate::selftest::GoldenCheck;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// CSV header, in output order.
pub const CSV_COLUMNS: [&str; 12] = [
    "scenario",
    "kind",
    "criterion",
    "target",
    "group",
    "parameter",
    "parameter_value",
    "value",
    "bound",
    "verdict",
    "aux",
    "detail",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Record {
    Steering(SteeringValue),
    Genuine(GenuineSteeringReport),
    Collective(CollectiveSteeringReport),
    Monogamy(MonogamyOutcome),
    Threshold(ThresholdResult),
    Eavesdrop(EavesdropRecord),
    Shots(ShotEstimate),
    SweepPoint(SweepPoint),
    Tripartite(TripartiteScanReport),
    SecretSharing(SecretSharingReport),
    Check(GoldenCheck),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Header {
    kind: String,
    tool_version: String,
    scenario: String,
    parameters: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    wall_time_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub tool_version: String,
    pub scenario: String,
    pub parameters: BTreeMap<String, f64>,
    pub records: Vec<Record>,
    /// Only filled in on request, so that default output is reproducible.
    pub wall_time_ms: Option<f64>,
}

impl RunReport {
    pub fn new(scenario: impl Into<String>) -> Self {
        Self {
            tool_version: TOOL_VERSION.to_owned(),
            scenario: scenario.into(),
            parameters: BTreeMap::new(),
            records: Vec::new(),
            wall_time_ms: None,
        }
    }

    /// Adds a parameter; non-finite values cannot be written as JSON.
    pub fn with_parameter(mut self, name: &str, value: f64) -> Result<Self> {
        if !value.is_finite() {
            return Err(SteeringError::invalid(format!("parameter {name} = {value} is not finite")));
        }
        self.parameters.insert(name.to_owned(), value);
        Ok(self)
    }

    pub fn push(&mut self, record: Record) {
        self.records.push(record);
    }

    /// Header line (`"kind": "run"`) followed by one line per record.
    pub fn to_json_lines(&self) -> Result<String> {
        let header = Header {
            kind: "run".to_owned(),
            tool_version: self.tool_version.clone(),
            scenario: self.scenario.clone(),
            parameters: self.parameters.clone(),
            wall_time_ms: self.wall_time_ms,
        };
        let mut out = to_line(&header)?;
        for r in &self.records {
            out.push_str(&to_line(r)?);
        }
        Ok(out)
    }

    pub fn from_json_lines(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let first = lines
            .next()
            .ok_or_else(|| SteeringError::Parse("empty report".into()))?;
        let header: Header = parse(first)?;
        if header.kind != "run" {
            return Err(SteeringError::Parse(format!(
                "first line has kind {:?}, expected \"run\"",
                header.kind
            )));
        }
        let records = lines.map(parse).collect::<Result<Vec<Record>>>()?;
        Ok(Self {
            tool_version: header.tool_version,
            scenario: header.scenario,
            parameters: header.parameters,
            records,
            wall_time_ms: header.wall_time_ms,
        })
    }

    /// All CSV rows, in record order. Each row matches [`CSV_COLUMNS`].
    pub fn csv_rows(&self) -> Vec<[String; 12]> {
        let mut rows = Vec::new();
        for r in &self.records {
            for row in record_rows(r) {
                rows.push(row.into_fields(&self.scenario));
            }
        }
        rows
    }
}

fn to_line<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string(value).map_err(|e| SteeringError::Parse(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn parse<T: for<'de> Deserialize<'de>>(line: &str) -> Result<T> {
    serde_json::from_str(line).map_err(|e| SteeringError::Parse(e.to_string()))
}

/// `{:.16e}`: 17 significant digits, enough to round-trip any f64.
pub fn format_number(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Default)]
struct Row {
    kind: &'static str,
    criterion: String,
    target: Option<usize>,
    group: String,
    parameter: String,
    parameter_value: Option<f64>,
    value: Option<f64>,
    bound: Option<f64>,
    verdict: Option<bool>,
    aux: Option<f64>,
    detail: String,
}

impl Row {
    fn into_fields(self, scenario: &str) -> [String; 12] {
        let num = |v: Option<f64>| v.map(format_number).unwrap_or_default();
        [
            scenario.to_owned(),
            self.kind.to_owned(),
            self.criterion,
            self.target.map(|t| t.to_string()).unwrap_or_default(),
            self.group,
            self.parameter,
            num(self.parameter_value),
            num(self.value),
            num(self.bound),
            self.verdict.map(|b| b.to_string()).unwrap_or_default(),
            num(self.aux),
            self.detail,
        ]
    }
}

fn join(sites: &[usize]) -> String {
    sites.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(" ")
}

fn steering_row(kind: &'static str, v: &SteeringValue) -> Row {
    Row {
        kind,
        criterion: v.criterion().name().to_owned(),
        target: Some(v.partition().target()),
        group: join(v.partition().steering_group()),
        value: Some(v.value()),
        bound: Some(v.bound()),
        verdict: Some(v.verdict()),
        detail: v.inequality().to_owned(),
        ..Row::default()
    }
}

fn collective_row(c: &CollectiveSteeringReport) -> Row {
    Row {
        kind: "collective",
        verdict: Some(c.collective),
        aux: c.best_subset_value(),
        detail: "aux = best proper-subset value".to_owned(),
        ..steering_row("collective", &c.full_group)
    }
}

fn monogamy_row(m: &MonogamyOutcome) -> Row {
    Row {
        kind: "monogamy",
        criterion: m.criterion.name().to_owned(),
        target: Some(m.target),
        group: format!("{} | {}", join(&m.group_a), join(&m.group_c)),
        value: Some(m.product),
        bound: Some(m.bound),
        verdict: Some(m.satisfied),
        aux: Some(m.sum),
        detail: "value = product, aux = sum".to_owned(),
        ..Row::default()
    }
}

fn record_rows(record: &Record) -> Vec<Row> {
    match record {
        Record::Steering(v) => vec![steering_row("steering", v)],
        Record::Genuine(g) => vec![Row {
            kind: "genuine",
            criterion: g.criterion().name().to_owned(),
            value: Some(g.sum()),
            bound: Some(g.bound()),
            verdict: Some(g.genuine()),
            detail: g.method_notes().to_owned(),
            ..Row::default()
        }],
        Record::Collective(c) => vec![collective_row(c)],
        Record::Monogamy(m) => vec![monogamy_row(m)],
        Record::Threshold(t) => vec![Row {
            kind: "threshold",
            criterion: t.criterion.name().to_owned(),
            parameter: t.parameter.clone(),
            parameter_value: Some(t.critical),
            value: Some(t.critical),
            bound: Some(t.bound),
            aux: Some(t.bracket.1 - t.bracket.0),
            detail: format!(
                "bracket [{}, {}] after {} iterations",
                format_number(t.bracket.0),
                format_number(t.bracket.1),
                t.iterations
            ),
            ..Row::default()
        }],
        Record::Eavesdrop(e) => vec![Row {
            kind: "eavesdrop",
            criterion: e.criterion.name().to_owned(),
            target: Some(1),
            group: "2 3".to_owned(),
            parameter: "eta".to_owned(),
            parameter_value: Some(e.eta),
            value: Some(e.value_a_prime),
            bound: Some(e.bound),
            verdict: Some(e.steering_a_prime),
            aux: Some(e.value_e),
            detail: format!("r = {}; aux = value for group 4 5", format_number(e.r)),
        }],
        Record::Shots(s) => vec![Row {
            kind: "shots",
            criterion: s.criterion.name().to_owned(),
            parameter: "shots".to_owned(),
            parameter_value: Some(s.shots as f64),
            value: Some(s.estimate),
            bound: Some(s.bound),
            verdict: Some(s.estimate < s.bound),
            aux: Some(s.standard_error),
            detail: format!("seed = {}; aux = standard error", s.seed),
            ..Row::default()
        }],
        Record::SweepPoint(p) => vec![Row {
            kind: "sweep_point",
            criterion: p.criterion.name().to_owned(),
            parameter: p.parameter.clone(),
            parameter_value: Some(p.parameter_value),
            value: Some(p.value),
            bound: Some(p.bound),
            verdict: Some(p.verdict),
            aux: p.aux.or(p.estimate),
            detail: match (p.estimate, p.standard_error) {
                (Some(_), Some(se)) => {
                    format!("index = {}; aux = estimate; standard_error = {}", p.index, format_number(se))
                }
                _ if p.aux.is_some() => format!("index = {}; aux = eavesdropper value", p.index),
                _ => format!("index = {}", p.index),
            },
            ..Row::default()
        }],
        Record::Tripartite(t) => t
            .steered
            .iter()
            .map(|v| Row {
                detail: format!(
                    "purity_asserted = {}; genuine_if_pure = {}",
                    t.purity_asserted, t.genuine_if_pure
                ),
                ..steering_row("tripartite", v)
            })
            .collect(),
        Record::SecretSharing(s) => s
            .targets
            .iter()
            .map(collective_row)
            .chain(s.monogamy.iter().map(monogamy_row))
            .map(|row| Row { kind: "secret_sharing", ..row })
            .collect(),
        Record::Check(c) => vec![Row {
            kind: "check",
            value: c.actual,
            bound: Some(c.expected),
            verdict: Some(c.passed),
            aux: Some(c.tolerance),
            detail: match &c.error {
                Some(e) => format!("{}: {e}", c.name),
                None => c.name.clone(),
            },
            ..Row::default()
        }],
    }
}
