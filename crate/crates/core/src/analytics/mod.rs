//! Corpus statistics and their mergeable accumulator.

pub mod lint;

use std::collections::BTreeMap;
use std::fmt::Write;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::pipeline::Pipeline;
use crate::taxonomy::Stage;

pub use lint::{
    has_warning, lint, lint_feedback_loops, lint_missing_stage, lint_pipeline_jungle, lint_tangled,
    Finding, LintConfig, Rule, Severity,
};

const N: usize = Stage::COUNT;

/// Counts of adjacent ordered stage pairs, indexed by [`Stage::index`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionMatrix {
    counts: [[u64; N]; N],
}

impl Default for TransitionMatrix {
    fn default() -> Self {
        TransitionMatrix {
            counts: [[0; N]; N],
        }
    }
}

impl TransitionMatrix {
    pub fn get(&self, from: Stage, to: Stage) -> u64 {
        self.counts[from.index()][to.index()]
    }

    pub fn add_pipeline(&mut self, p: &Pipeline) {
        for w in p.sequence.windows(2) {
            self.counts[w[0].stage.index()][w[1].stage.index()] += 1;
        }
    }

    pub fn merge(&mut self, other: &TransitionMatrix) {
        for (row, orow) in self.counts.iter_mut().zip(&other.counts) {
            for (c, o) in row.iter_mut().zip(orow) {
                *c += o;
            }
        }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn row(&self, from: Stage) -> &[u64; N] {
        &self.counts[from.index()]
    }

    /// Header row and first column carry stage codes.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("from\\to");
        for s in Stage::ALL {
            write!(out, ",{s}").unwrap();
        }
        out.push('\n');
        for from in Stage::ALL {
            out.push_str(from.code());
            for c in self.row(from) {
                write!(out, ",{c}").unwrap();
            }
            out.push('\n');
        }
        out
    }
}

impl Serialize for TransitionMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("TransitionMatrix", 2)?;
        let stages: Vec<&str> = Stage::ALL.iter().map(|s| s.code()).collect();
        st.serialize_field("stages", &stages)?;
        let rows: Vec<&[u64]> = self.counts.iter().map(|r| r.as_slice()).collect();
        st.serialize_field("counts", &rows)?;
        st.end()
    }
}

/// Presence fraction per stage over `pipelines`.
pub fn stage_frequency(pipelines: &[Pipeline]) -> Result<BTreeMap<Stage, f64>> {
    if pipelines.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mut presence = [0u64; N];
    for p in pipelines {
        add_presence(&mut presence, p);
    }
    Ok(frequencies(&presence, pipelines.len()))
}

fn add_presence(presence: &mut [u64; N], p: &Pipeline) {
    let mut seen = [false; N];
    for o in &p.sequence {
        seen[o.stage.index()] = true;
    }
    for (c, s) in presence.iter_mut().zip(seen) {
        *c += u64::from(s);
    }
}

fn frequencies(presence: &[u64; N], n: usize) -> BTreeMap<Stage, f64> {
    Stage::ALL
        .into_iter()
        .map(|s| (s, presence[s.index()] as f64 / n as f64))
        .collect()
}

pub fn transition_matrix(pipelines: &[Pipeline]) -> TransitionMatrix {
    let mut m = TransitionMatrix::default();
    for p in pipelines {
        m.add_pipeline(p);
    }
    m
}

/// A file that could not be analyzed.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Skipped {
    pub path: String,
    pub error: String,
}

/// A notebook cell left out because it did not parse.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct CellDiagnostic {
    pub path: String,
    pub cell_index: usize,
    pub message: String,
}

/// Dictionary coverage over all extracted calls.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Coverage {
    pub calls: usize,
    pub mapped: usize,
    #[serde(rename = "GEN")]
    pub generic: usize,
    #[serde(rename = "NoMatch")]
    pub no_match: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusReport {
    pub n_pipelines: usize,
    pub stage_frequency: BTreeMap<Stage, f64>,
    pub stage_counts: BTreeMap<Stage, u64>,
    pub transition: TransitionMatrix,
    pub lint: Vec<Finding>,
    pub pipelines: Vec<Pipeline>,
    pub coverage: Coverage,
    pub skipped: Vec<Skipped>,
    pub diagnostics: Vec<CellDiagnostic>,
}

impl CorpusReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Partial corpus report. `merge` is associative and commutative up to the
/// final canonical sort, so per-worker partials can be combined in any order.
#[derive(Debug, Clone, Default)]
pub struct CorpusAccumulator {
    presence: [u64; N],
    transition: TransitionMatrix,
    pipelines: Vec<Pipeline>,
    findings: Vec<Finding>,
    coverage: Coverage,
    skipped: Vec<Skipped>,
    diagnostics: Vec<CellDiagnostic>,
}

impl CorpusAccumulator {
    pub fn add_pipeline(&mut self, p: Pipeline, findings: Vec<Finding>) {
        add_presence(&mut self.presence, &p);
        self.transition.add_pipeline(&p);
        let calls: usize = p.sequence.iter().map(|o| o.call_count).sum();
        self.coverage.mapped += calls;
        self.coverage.generic += p.dropped.generic;
        self.coverage.no_match += p.dropped.no_match;
        self.coverage.calls += calls + p.dropped.generic + p.dropped.no_match;
        self.pipelines.push(p);
        self.findings.extend(findings);
    }

    pub fn add_skipped(&mut self, s: Skipped) {
        self.skipped.push(s);
    }

    pub fn add_diagnostic(&mut self, d: CellDiagnostic) {
        self.diagnostics.push(d);
    }

    pub fn merge(mut self, other: CorpusAccumulator) -> CorpusAccumulator {
        for (a, b) in self.presence.iter_mut().zip(other.presence) {
            *a += b;
        }
        self.transition.merge(&other.transition);
        self.pipelines.extend(other.pipelines);
        self.findings.extend(other.findings);
        self.coverage.calls += other.coverage.calls;
        self.coverage.mapped += other.coverage.mapped;
        self.coverage.generic += other.coverage.generic;
        self.coverage.no_match += other.coverage.no_match;
        self.skipped.extend(other.skipped);
        self.diagnostics.extend(other.diagnostics);
        self
    }

    pub fn n_pipelines(&self) -> usize {
        self.pipelines.len()
    }

    /// Canonical report; errors when no pipeline was added.
    pub fn finish(mut self) -> Result<CorpusReport> {
        let n = self.pipelines.len();
        if n == 0 {
            return Err(Error::EmptyCorpus);
        }
        self.pipelines.sort_by(|a, b| a.source.cmp(&b.source));
        // Stable: keeps per-file rule order.
        self.findings.sort_by(|a, b| a.source.cmp(&b.source));
        self.skipped.sort();
        self.diagnostics.sort();
        Ok(CorpusReport {
            n_pipelines: n,
            stage_frequency: frequencies(&self.presence, n),
            stage_counts: Stage::ALL
                .into_iter()
                .map(|s| (s, self.presence[s.index()]))
                .collect(),
            transition: self.transition,
            lint: self.findings,
            pipelines: self.pipelines,
            coverage: self.coverage,
            skipped: self.skipped,
            diagnostics: self.diagnostics,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::Level;
    use Stage::*;

    fn p(stages: &[Stage]) -> Pipeline {
        Pipeline::from_stages("t", Level::Low, stages)
    }

    #[test]
    fn frequency_example() {
        let f = stage_frequency(&[p(&[Acq, Prp, Mdl]), p(&[Acq, Prp]), p(&[Prp, Evl])]).unwrap();
        assert_eq!(f[&Prp], 1.0);
        assert_eq!(f[&Acq], 2.0 / 3.0);
        assert_eq!(f[&Mdl], 1.0 / 3.0);
        assert_eq!(f[&Evl], 1.0 / 3.0);
        assert_eq!(f[&Trn], 0.0);
        assert!(matches!(stage_frequency(&[]), Err(Error::EmptyCorpus)));
    }

    #[test]
    fn transition_example() {
        let m = transition_matrix(&[p(&[Acq, Prp, Acq]), p(&[Acq, Prp])]);
        assert_eq!(m.get(Acq, Prp), 2);
        assert_eq!(m.get(Prp, Acq), 1);
        assert_eq!(m.total(), 3);
        assert_eq!(transition_matrix(&[]).total(), 0);
    }

    #[test]
    fn csv_shape() {
        let csv = transition_matrix(&[p(&[Acq, Prp])]).to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 1 + Stage::COUNT);
        assert!(lines[0].starts_with("from\\to,LIB,ACQ"));
        assert!(lines[2].starts_with("ACQ,0,0,1"));
    }
}
