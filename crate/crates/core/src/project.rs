//! Whole-repository analysis: entry points, artifacts, coupling and a
//! heuristic project-level pipeline.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;
use walkdir::WalkDir;

use crate::analytics::Skipped;
use crate::corpus::{analyze_file, discover, is_hidden, rel_path, FileAnalysis, FileFilter};
use crate::dictionary::ApiDictionary;
use crate::error::{Error, Result};
use crate::frontend::{AstMetrics, SourceKind};
use crate::par;
use crate::pipeline::{Level, Pipeline};
use crate::taxonomy::Stage;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum ArtifactKind {
    Checkpoint,
    JsonModel,
    SavedSource,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Artifact {
    pub path: String,
    pub kind: ArtifactKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Coupling {
    Loose,
    Tight,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProjectFile {
    pub path: String,
    pub kind: SourceKind,
    pub metrics: AstMetrics,
    pub pipeline: Pipeline,
    /// Stage used to place the file in the project order.
    pub role: Option<Stage>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Phases {
    /// Model artifacts are present alongside training code.
    pub development: bool,
    /// Some code loads a saved model.
    pub post_development: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProjectModel {
    pub root: String,
    pub files: Vec<ProjectFile>,
    pub modules: BTreeMap<String, Vec<String>>,
    pub entry_points: Vec<String>,
    pub artifacts: Vec<Artifact>,
    pub contributors: Option<u32>,
    pub coupling: Coupling,
    pub coupling_detail: String,
    pub high_level: Pipeline,
    pub high_level_method: &'static str,
    pub phases: Phases,
    pub skipped: Vec<Skipped>,
}

impl ProjectModel {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("project serializes")
    }
}

/// Contributor count decides; entry points only corroborate.
pub fn classify_coupling(contributors: u32, entry_points: usize) -> Result<(Coupling, String)> {
    if contributors < 1 {
        return Err(Error::InvalidInput(
            "contributors must be at least 1".into(),
        ));
    }
    let coupling = if contributors >= 6 {
        Coupling::Loose
    } else {
        Coupling::Tight
    };
    let corroboration = match (coupling, entry_points) {
        (Coupling::Tight, 1 | 2) => "consistent with a tightly integrated pipeline",
        (Coupling::Loose, n) if n > 2 => "consistent with a modular pipeline",
        _ => "not corroborating",
    };
    let detail =
        format!("{contributors} contributors; {entry_points} entry point(s), {corroboration}");
    Ok((coupling, detail))
}

const CLI_PARSERS: &[&str] = &[
    "argparse.",
    "optparse.",
    "getopt.",
    "click.",
    "fire.Fire",
    "absl.app.run",
    "absl.flags.",
    "tensorflow.app.run",
    "tensorflow.compat.v1.app.run",
    "tensorflow.flags.",
    "tensorflow.app.flags.",
    "docopt.",
    "docopt",
    "typer.",
];

fn calls_cli_parser(a: &FileAnalysis) -> bool {
    a.calls.iter().any(|c| {
        CLI_PARSERS
            .iter()
            .any(|p| c.resolved_name == *p || (p.ends_with('.') && c.resolved_name.starts_with(p)))
    })
}

fn shell_tokens(text: &str) -> Vec<&str> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .flat_map(|l| l.split(|c: char| c.is_whitespace() || ";|&()\"'`=<>".contains(c)))
        .filter(|t| !t.is_empty())
        .collect()
}

fn module_path(rel: &str) -> Option<String> {
    rel.strip_suffix(".py").map(|s| s.replace('/', "."))
}

fn referenced_in_shell(rel: &str, scripts: &[(String, String)]) -> bool {
    let base = rel.rsplit('/').next().unwrap_or(rel);
    let module = module_path(rel);
    let module_base = module_path(base);
    scripts.iter().any(|(_, text)| {
        let toks = shell_tokens(text);
        toks.iter().enumerate().any(|(i, t)| {
            let t = t.strip_prefix("./").unwrap_or(t);
            if t == base || t == rel || t.ends_with(&format!("/{base}")) {
                return true;
            }
            i > 0
                && toks[i - 1] == "-m"
                && (module.as_deref() == Some(t) || module_base.as_deref() == Some(t))
        })
    })
}

/// Files with a main guard, a command-line parsing call, or a reference
/// from a shell script.
pub fn detect_entry_points(
    files: &[FileAnalysis],
    shell_scripts: &[(String, String)],
) -> Vec<String> {
    let mut out: Vec<String> = files
        .iter()
        .filter(|a| {
            a.main_guard || calls_cli_parser(a) || referenced_in_shell(&a.rel, shell_scripts)
        })
        .map(|a| a.rel.clone())
        .collect();
    out.sort();
    out
}

const CHECKPOINT_EXTENSIONS: &[&str] = &["ckpt", "h5", "pb", "onnx"];

/// Model artifacts among `paths` (relative), plus source files that build a
/// model without training or predicting.
pub fn detect_artifacts(paths: &[String], files: &[FileAnalysis]) -> Vec<Artifact> {
    let mut out = Vec::new();
    for rel in paths {
        let name = rel.rsplit('/').next().unwrap_or(rel).to_lowercase();
        let ext = name.rsplit_once('.').map(|(_, e)| e).unwrap_or("");
        if CHECKPOINT_EXTENSIONS.contains(&ext) || name.contains("ckpt") {
            out.push(Artifact {
                path: rel.clone(),
                kind: ArtifactKind::Checkpoint,
            });
        } else if ext == "json" && name.contains("model") {
            out.push(Artifact {
                path: rel.clone(),
                kind: ArtifactKind::JsonModel,
            });
        }
    }
    for a in files {
        let p = &a.pipeline;
        if p.contains(Stage::Mdl) && !p.contains(Stage::Trn) && !p.contains(Stage::Prd) {
            out.push(Artifact {
                path: a.rel.clone(),
                kind: ArtifactKind::SavedSource,
            });
        }
    }
    out.sort();
    out
}

const ROLE_KEYWORDS: &[(&str, Stage)] = &[
    ("download", Stage::Acq),
    ("data", Stage::Acq),
    ("preprocess", Stage::Prp),
    ("prep", Stage::Prp),
    ("model", Stage::Mdl),
    ("train", Stage::Trn),
    ("eval", Stage::Evl),
    ("test", Stage::Evl),
    ("predict", Stage::Prd),
    ("infer", Stage::Prd),
    ("demo", Stage::Prd),
];

/// Stage suggested by the file name; the highest-ordinal keyword wins.
pub fn filename_role(rel: &str) -> Option<Stage> {
    let name = rel.rsplit('/').next().unwrap_or(rel).to_lowercase();
    let stem = name.rsplit_once('.').map_or(name.as_str(), |(s, _)| s);
    ROLE_KEYWORDS
        .iter()
        .filter(|(k, _)| stem.contains(k))
        .map(|(_, s)| *s)
        .max_by_key(|s| s.ordinal())
}

/// Stage with the most calls; ties go to the lower ordinal.
pub fn dominant_stage(p: &Pipeline) -> Option<Stage> {
    let mut calls = [0usize; Stage::COUNT];
    for o in &p.sequence {
        calls[o.stage.index()] += o.call_count;
    }
    Stage::ALL
        .into_iter()
        .filter(|s| calls[s.index()] > 0)
        .min_by_key(|s| (std::cmp::Reverse(calls[s.index()]), s.ordinal()))
}

pub fn role_stage(rel: &str, p: &Pipeline) -> Option<Stage> {
    filename_role(rel).or_else(|| dominant_stage(p))
}

/// Project pipeline from per-file pipelines.
///
/// With entry points, each entry point contributes its whole sequence;
/// otherwise every file contributes its role stage. Contributions are
/// ordered by role ordinal (then path), concatenated and collapsed.
pub fn order_high_level(
    source: &str,
    files: &[(String, Pipeline)],
    entry_points: &[String],
) -> Pipeline {
    if let [(_, only)] = files {
        let mut p = only.clone();
        p.source = source.to_string();
        p.level = Level::High;
        return p;
    }
    let use_entries = !entry_points.is_empty();
    let mut parts: Vec<(u32, &str, Vec<Stage>)> = Vec::new();
    for (rel, p) in files {
        if use_entries && !entry_points.contains(rel) {
            continue;
        }
        let Some(role) = role_stage(rel, p) else {
            continue;
        };
        let stages = if use_entries && !p.sequence.is_empty() {
            p.stages()
        } else {
            vec![role]
        };
        parts.push((role.ordinal(), rel, stages));
    }
    parts.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
    let all: Vec<Stage> = parts.into_iter().flat_map(|(_, _, s)| s).collect();
    Pipeline::from_stages(source, Level::High, &all)
}

const LOADING_METHODS: &[&str] = &[
    "restore",
    "load_model",
    "load_weights",
    "load_state_dict",
    "from_pretrained",
];
const LOADING_CALLS: &[&str] = &["torch.load", "joblib.load", "pickle.load"];

fn loads_artifacts(a: &FileAnalysis) -> bool {
    a.calls.iter().any(|c| {
        LOADING_METHODS.contains(&c.method_name.as_str())
            || LOADING_CALLS.contains(&c.resolved_name.as_str())
    })
}

fn all_files(root: &Path) -> Vec<(String, std::path::PathBuf)> {
    let mut out: Vec<_> = WalkDir::new(root)
        .into_iter()
        .filter_entry(|e| e.depth() == 0 || !is_hidden(&e.file_name().to_string_lossy()))
        .filter_map(|e| e.ok())
        .filter(|e| e.file_type().is_file())
        .map(|e| (rel_path(root, e.path()), e.path().to_path_buf()))
        .collect();
    out.sort();
    out
}

/// Analyzes a repository. `contributors` is optional; without it coupling
/// is `unknown`.
pub fn analyze_project(
    root: &Path,
    contributors: Option<u32>,
    dict: &ApiDictionary,
    jobs: usize,
) -> Result<ProjectModel> {
    let meta = std::fs::metadata(root).map_err(|e| Error::io(root, e))?;
    if !meta.is_dir() {
        return Err(Error::InvalidInput(format!(
            "{} is not a directory",
            root.display()
        )));
    }
    let sources = discover(root, &FileFilter::Sources)?;
    if sources.is_empty() {
        return Err(Error::NoSourceFiles(root.to_path_buf()));
    }
    let results = par::map(&sources, jobs, |(path, rel)| analyze_file(path, rel, dict));
    let mut analyses = Vec::new();
    let mut skipped = Vec::new();
    for ((_, rel), r) in sources.iter().zip(results) {
        match r {
            Ok(a) => analyses.push(a),
            Err(e) => skipped.push(Skipped {
                path: rel.clone(),
                error: e.to_string(),
            }),
        }
    }
    if analyses.is_empty() {
        return Err(Error::NoSourceFiles(root.to_path_buf()));
    }

    let everything = all_files(root);
    let shell_scripts: Vec<(String, String)> = everything
        .iter()
        .filter(|(rel, _)| rel.ends_with(".sh"))
        .filter_map(|(rel, p)| std::fs::read_to_string(p).ok().map(|t| (rel.clone(), t)))
        .collect();
    let paths: Vec<String> = everything.into_iter().map(|(rel, _)| rel).collect();

    let entry_points = detect_entry_points(&analyses, &shell_scripts);
    let artifacts = detect_artifacts(&paths, &analyses);
    let (coupling, coupling_detail) = match contributors {
        Some(c) => classify_coupling(c, entry_points.len())?,
        None => (
            Coupling::Unknown,
            "contributor count not supplied".to_string(),
        ),
    };

    let root_name = root.file_name().map_or_else(
        || root.display().to_string(),
        |n| n.to_string_lossy().into_owned(),
    );
    let pipelines: Vec<(String, Pipeline)> = analyses
        .iter()
        .map(|a| (a.rel.clone(), a.pipeline.clone()))
        .collect();
    let high_level = order_high_level(&root_name, &pipelines, &entry_points);

    let has_model_artifact = artifacts
        .iter()
        .any(|a| a.kind != ArtifactKind::SavedSource);
    let phases = Phases {
        development: has_model_artifact && analyses.iter().any(|a| a.pipeline.contains(Stage::Trn)),
        post_development: analyses.iter().any(loads_artifacts),
    };

    let mut modules: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for a in &analyses {
        let dir = a.rel.rsplit_once('/').map_or(".", |(d, _)| d).to_string();
        modules.entry(dir).or_default().push(a.rel.clone());
    }

    let files = analyses
        .into_iter()
        .map(|a| ProjectFile {
            role: role_stage(&a.rel, &a.pipeline),
            path: a.rel,
            kind: a.unit.kind,
            metrics: a.metrics,
            pipeline: a.pipeline,
        })
        .collect();

    Ok(ProjectModel {
        root: root_name,
        files,
        modules,
        entry_points,
        artifacts,
        contributors,
        coupling,
        coupling_detail,
        high_level,
        high_level_method: "heuristic",
        phases,
        skipped,
    })
}
