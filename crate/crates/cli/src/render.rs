//! Human-readable renderings.

use std::fmt::Write;

use dspipe_core::analytics::{CellDiagnostic, CorpusReport, Skipped, TransitionMatrix};
use dspipe_core::pipeline::Pipeline;
use dspipe_core::project::ProjectModel;
use dspipe_core::taxonomy::Stage;

pub fn report_diagnostics(skipped: &[Skipped], diagnostics: &[CellDiagnostic]) {
    for s in skipped {
        eprintln!("{}: skipped: {}", s.path, s.error);
    }
    for d in diagnostics {
        eprintln!("{}: cell {} skipped: {}", d.path, d.cell_index, d.message);
    }
}

fn arrow_list(p: &Pipeline) -> String {
    let parts: Vec<String> = p
        .sequence
        .iter()
        .map(|o| format!("{}#{}", o.stage, o.occurrence_index))
        .collect();
    if parts.is_empty() {
        "(empty)".to_string()
    } else {
        parts.join(" -> ")
    }
}

pub fn pipeline_text(p: &Pipeline) -> String {
    let level = match p.level {
        dspipe_core::pipeline::Level::Low => "low",
        dspipe_core::pipeline::Level::High => "high",
    };
    format!(
        "{} ({level}): {}\ndropped: GEN {}, NoMatch {}\n",
        p.source,
        arrow_list(p),
        p.dropped.generic,
        p.dropped.no_match
    )
}

pub fn corpus_text(r: &CorpusReport) -> String {
    let mut out = format!("pipelines: {}\n", r.n_pipelines);
    writeln!(out, "stage  present  frequency").unwrap();
    for (s, f) in &r.stage_frequency {
        writeln!(out, "{:<5}  {:>7}  {:.4}", s.code(), r.stage_counts[s], f).unwrap();
    }
    let c = &r.coverage;
    writeln!(
        out,
        "calls: {} (mapped {}, GEN {}, NoMatch {})",
        c.calls, c.mapped, c.generic, c.no_match
    )
    .unwrap();
    writeln!(out, "lint findings: {}", r.lint.len()).unwrap();
    if !r.skipped.is_empty() {
        writeln!(out, "skipped files: {}", r.skipped.len()).unwrap();
    }
    out
}

/// Corpus-wide transitions as one merged digraph.
pub fn transition_dot(m: &TransitionMatrix) -> String {
    let mut out = String::from("digraph \"corpus\" {\n  rankdir=LR;\n");
    let used: Vec<Stage> = Stage::ALL
        .into_iter()
        .filter(|s| Stage::ALL.iter().any(|t| m.get(*s, *t) + m.get(*t, *s) > 0))
        .collect();
    for s in &used {
        writeln!(out, "  {s} [label=\"{s}\"];").unwrap();
    }
    for a in &used {
        for b in &used {
            let n = m.get(*a, *b);
            if n > 0 {
                writeln!(out, "  {a} -> {b} [label=\"{n}\"];").unwrap();
            }
        }
    }
    out.push_str("}\n");
    out
}

pub fn project_text(m: &ProjectModel) -> String {
    let mut out = format!("project {}\n", m.root);
    writeln!(
        out,
        "files: {} (skipped {})",
        m.files.len(),
        m.skipped.len()
    )
    .unwrap();
    writeln!(out, "modules: {}", m.modules.len()).unwrap();
    writeln!(out, "entry points: {}", m.entry_points.join(", ")).unwrap();
    let arts: Vec<String> = m
        .artifacts
        .iter()
        .map(|a| format!("{} ({:?})", a.path, a.kind))
        .collect();
    writeln!(out, "artifacts: {}", arts.join(", ")).unwrap();
    let coupling = serde_json::to_value(m.coupling).expect("coupling serializes");
    writeln!(
        out,
        "coupling: {} ({})",
        coupling.as_str().unwrap_or("?"),
        m.coupling_detail
    )
    .unwrap();
    let stages: Vec<&str> = m
        .high_level
        .sequence
        .iter()
        .map(|o| o.stage.code())
        .collect();
    writeln!(
        out,
        "high-level ({}): {}",
        m.high_level_method,
        stages.join(" -> ")
    )
    .unwrap();
    let yes_no = |b: bool| if b { "yes" } else { "no" };
    writeln!(
        out,
        "phases: development {}, post-development {}",
        yes_no(m.phases.development),
        yes_no(m.phases.post_development)
    )
    .unwrap();
    out
}
