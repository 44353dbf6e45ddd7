//! Low-level (call-derived) and high-level (heading-derived) pipelines.

mod dot;
mod headings;

use serde::Serialize;

use crate::dictionary::ApiDictionary;
use crate::frontend::{extract_headings, CallEvent, SourceUnit};
use crate::taxonomy::Stage;

pub use dot::{to_dot, to_dot_merged};
pub use headings::{classify_heading, label_headings, HighLevelLabel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Low,
    High,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StageOccurrence {
    pub stage: Stage,
    /// k-th occurrence of this stage in the sequence, from 1.
    #[serde(rename = "occurrence")]
    pub occurrence_index: usize,
    #[serde(rename = "calls")]
    pub call_count: usize,
    /// First and last order index of the merged items.
    pub span: (usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Edge {
    pub from: Stage,
    pub to: Stage,
    pub count: usize,
}

/// Items left out of the sequence: calls mapped to GEN, and calls (or
/// headings) with no stage.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Dropped {
    #[serde(rename = "GEN")]
    pub generic: usize,
    #[serde(rename = "NoMatch")]
    pub no_match: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Pipeline {
    pub source: String,
    pub level: Level,
    pub sequence: Vec<StageOccurrence>,
    /// Distinct adjacent pairs in order of first appearance.
    pub edges: Vec<Edge>,
    pub dropped: Dropped,
}

/// Merges maximal runs of equal stages. Items are `(stage, order_index)`.
pub fn collapse<I>(items: I) -> Vec<StageOccurrence>
where
    I: IntoIterator<Item = (Stage, usize)>,
{
    let mut seen = [0usize; Stage::COUNT];
    let mut out: Vec<StageOccurrence> = Vec::new();
    for (stage, order) in items {
        if let Some(last) = out.last_mut() {
            if last.stage == stage {
                last.call_count += 1;
                last.span.1 = order;
                continue;
            }
        }
        seen[stage.index()] += 1;
        out.push(StageOccurrence {
            stage,
            occurrence_index: seen[stage.index()],
            call_count: 1,
            span: (order, order),
        });
    }
    out
}

/// Adjacent-pair multiset, ordered by first appearance.
pub fn edges_of(sequence: &[StageOccurrence]) -> Vec<Edge> {
    let mut edges: Vec<Edge> = Vec::new();
    for w in sequence.windows(2) {
        let (from, to) = (w[0].stage, w[1].stage);
        match edges.iter_mut().find(|e| e.from == from && e.to == to) {
            Some(e) => e.count += 1,
            None => edges.push(Edge { from, to, count: 1 }),
        }
    }
    edges
}

impl Pipeline {
    pub fn new(
        source: impl Into<String>,
        level: Level,
        sequence: Vec<StageOccurrence>,
        dropped: Dropped,
    ) -> Pipeline {
        let edges = edges_of(&sequence);
        Pipeline {
            source: source.into(),
            level,
            sequence,
            edges,
            dropped,
        }
    }

    /// Pipeline over an already-mapped stage list (order index = position).
    pub fn from_stages(source: impl Into<String>, level: Level, stages: &[Stage]) -> Pipeline {
        let items = stages.iter().copied().filter(|s| *s != Stage::Gen);
        let sequence = collapse(items.enumerate().map(|(i, s)| (s, i)));
        Pipeline::new(source, level, sequence, Dropped::default())
    }

    pub fn stages(&self) -> Vec<Stage> {
        self.sequence.iter().map(|o| o.stage).collect()
    }

    pub fn contains(&self, stage: Stage) -> bool {
        self.sequence.iter().any(|o| o.stage == stage)
    }

    pub fn occurrences(&self, stage: Stage) -> usize {
        self.sequence.iter().filter(|o| o.stage == stage).count()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("pipeline serializes")
    }
}

/// One call with its dictionary mapping (`None` = no match).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MappedCall {
    #[serde(flatten)]
    pub event: CallEvent,
    pub stage: Option<Stage>,
}

pub fn map_events(events: &[CallEvent], dict: &ApiDictionary) -> Vec<MappedCall> {
    events
        .iter()
        .map(|e| MappedCall {
            event: e.clone(),
            stage: dict.lookup(e),
        })
        .collect()
}

/// Maps calls, drops GEN and unmatched calls, and collapses runs. Dropped
/// calls do not break a run.
pub fn build_low_level(
    source: impl Into<String>,
    events: &[CallEvent],
    dict: &ApiDictionary,
) -> Pipeline {
    let mut dropped = Dropped::default();
    let mut kept = Vec::with_capacity(events.len());
    for e in events {
        match dict.lookup(e) {
            Some(Stage::Gen) => dropped.generic += 1,
            None => dropped.no_match += 1,
            Some(s) => kept.push((s, e.order_index)),
        }
    }
    Pipeline::new(source, Level::Low, collapse(kept), dropped)
}

/// Pipeline from classified headings; spans index the heading list.
pub fn build_high_level(source: impl Into<String>, unit: &SourceUnit) -> Pipeline {
    let headings = extract_headings(unit);
    let mut dropped = Dropped::default();
    let mut kept = Vec::new();
    for (i, (_, text)) in headings.iter().enumerate() {
        match classify_heading(text) {
            Some(s) => kept.push((s, i)),
            None => dropped.no_match += 1,
        }
    }
    Pipeline::new(source, Level::High, collapse(kept), dropped)
}
