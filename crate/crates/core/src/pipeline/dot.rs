use std::fmt::Write;

use super::Pipeline;

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// One node per stage occurrence (`STAGE#k`), chained in sequence order.
pub fn to_dot(p: &Pipeline) -> String {
    let mut out = String::new();
    writeln!(out, "digraph {} {{", quote(&p.source)).unwrap();
    out.push_str("  rankdir=LR;\n  node [shape=box];\n");
    for (i, occ) in p.sequence.iter().enumerate() {
        let label = format!("{}#{}", occ.stage.code(), occ.occurrence_index);
        writeln!(out, "  n{i} [label={}];", quote(&label)).unwrap();
    }
    for i in 1..p.sequence.len() {
        writeln!(out, "  n{} -> n{i};", i - 1).unwrap();
    }
    out.push_str("}\n");
    out
}

/// One node per distinct stage; edges labelled with their counts.
pub fn to_dot_merged(p: &Pipeline) -> String {
    let mut out = String::new();
    writeln!(out, "digraph {} {{", quote(&p.source)).unwrap();
    out.push_str("  rankdir=LR;\n  node [shape=box];\n");
    let mut stages = Vec::new();
    for occ in &p.sequence {
        if !stages.contains(&occ.stage) {
            stages.push(occ.stage);
        }
    }
    for s in &stages {
        writeln!(out, "  {} [label={}];", s.code(), quote(s.code())).unwrap();
    }
    for e in &p.edges {
        writeln!(
            out,
            "  {} -> {} [label=\"{}\"];",
            e.from.code(),
            e.to.code(),
            e.count
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}
