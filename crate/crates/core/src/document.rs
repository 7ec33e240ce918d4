//! Problem and report documents (JSON), CSV export, and content fingerprints.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Issue, Result};
use crate::model::{
    self, Alternative, CriterionNode, CriterionTree, InteractionDeclaration, PerformanceTable,
    Problem, ThresholdSpec,
};
use crate::smaa::SmaaReport;
use crate::srf::{CardDeck, Elicitation};

pub const SCHEMA_VERSION: u32 = 1;
pub const ENGINE_VERSION: &str = concat!("outrank ", env!("CARGO_PKG_VERSION"));

/// Everything needed to run an analysis, as stored on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemDocument {
    pub schema_version: u32,
    #[serde(default)]
    pub name: String,
    pub criteria: Vec<CriterionNode>,
    pub alternatives: Vec<Alternative>,
    /// alternative id → criterion id → native value
    pub performances: BTreeMap<String, BTreeMap<String, f64>>,
    #[serde(default)]
    pub thresholds: ThresholdSpec,
    #[serde(default)]
    pub interactions: Vec<InteractionDeclaration>,
    #[serde(default)]
    pub decks: Vec<CardDeck>,
}

/// A document together with its validated problem and elicitation.
#[derive(Debug, Clone)]
pub struct LoadedProblem {
    pub document: ProblemDocument,
    pub problem: Problem,
    pub elicitation: Elicitation,
}

impl ProblemDocument {
    /// Validates the document, reporting problem and deck issues together.
    pub fn load(self) -> Result<LoadedProblem> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::SchemaVersion {
                found: self.schema_version,
                expected: SCHEMA_VERSION,
            });
        }
        let table = PerformanceTable {
            alternatives: self.alternatives.clone(),
            values: self.performances.clone(),
        };
        let problem = model::validate_problem(
            self.criteria.clone(),
            &table,
            &self.thresholds,
            &self.interactions,
        );
        let elicitation = match &problem {
            Ok(p) => Elicitation::new(p.tree(), &self.decks),
            Err(_) => CriterionTree::new(self.criteria.clone())
                .and_then(|tree| Elicitation::new(&tree, &self.decks)),
        };
        match (problem, elicitation) {
            (Ok(problem), Ok(elicitation)) => Ok(LoadedProblem {
                document: self,
                problem,
                elicitation,
            }),
            (problem, elicitation) => {
                let mut issues: Vec<Issue> = Vec::new();
                for err in [problem.err(), elicitation.err()].into_iter().flatten() {
                    match err {
                        Error::Invalid(i) => issues.extend(i.0),
                        other => return Err(other),
                    }
                }
                Err(Error::invalid(issues))
            }
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents always serialize")
    }

    /// SHA-256 of the compact canonical serialization.
    pub fn fingerprint(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("documents always serialize");
        hex::encode(Sha256::digest(&bytes))
    }
}

#[derive(Deserialize)]
struct VersionProbe {
    schema_version: Option<u32>,
}

fn deserialize<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        Error::Parse {
            path,
            line: inner.line(),
            column: inner.column(),
            message: inner.to_string(),
        }
    })
}

/// Parses and validates a problem document.
pub fn parse_problem(text: &str) -> Result<LoadedProblem> {
    if let Ok(VersionProbe {
        schema_version: Some(v),
    }) = serde_json::from_str::<VersionProbe>(text)
    {
        if v != SCHEMA_VERSION {
            return Err(Error::SchemaVersion {
                found: v,
                expected: SCHEMA_VERSION,
            });
        }
    }
    deserialize::<ProblemDocument>(text)?.load()
}

/// A report bound to the document it was computed from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub engine_version: String,
    pub problem_fingerprint: String,
    pub report: SmaaReport,
}

impl ReportDocument {
    pub fn new(document: &ProblemDocument, report: SmaaReport) -> Self {
        Self {
            engine_version: ENGINE_VERSION.to_string(),
            problem_fingerprint: document.fingerprint(),
            report,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(Error::InvalidArgument(format!("unknown format `{other}`"))),
        }
    }
}

pub fn write_report(doc: &ReportDocument, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(doc).expect("reports always serialize");
            s.push('\n');
            s
        }
        ReportFormat::Csv => write_csv(doc),
    }
}

/// One row per (node, relation, alternative): the alternative's row of the
/// frequency matrix, in percent with two decimals.
fn write_csv(doc: &ReportDocument) -> String {
    let report = &doc.report;
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["node".to_string(), "relation".into(), "alternative".into()];
    header.extend(report.alternatives.iter().cloned());
    w.write_record(&header).expect("in-memory write");
    for node in &report.nodes {
        for (relation, matrix) in [
            ("preference", &node.preference),
            ("indifference", &node.indifference),
            ("incomparability", &node.incomparability),
        ] {
            for (alt, row) in report.alternatives.iter().zip(matrix) {
                let mut record = vec![node.node.clone(), relation.to_string(), alt.clone()];
                record.extend(row.iter().map(|v| format!("{v:.2}")));
                w.write_record(&record).expect("in-memory write");
            }
        }
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is UTF-8")
}

pub fn parse_report(text: &str) -> Result<ReportDocument> {
    deserialize(text)
}

/// Aligned plain-text rendering of one matrix, for terminals.
pub fn format_matrix(alternatives: &[String], matrix: &[Vec<f64>]) -> String {
    let mut out = String::new();
    let _ = write!(out, "{:>6}", "");
    for a in alternatives {
        let _ = write!(out, "{a:>8}");
    }
    out.push('\n');
    for (a, row) in alternatives.iter().zip(matrix) {
        let _ = write!(out, "{a:>6}");
        for v in row {
            let _ = write!(out, "{v:>8.2}");
        }
        out.push('\n');
    }
    out
}
