//! File discovery and per-file analysis shared by corpus and project runs.

use std::path::{Path, PathBuf};

use regex::Regex;
use walkdir::WalkDir;

use crate::analytics::{
    lint, CellDiagnostic, CorpusAccumulator, CorpusReport, LintConfig, Skipped,
};
use crate::dictionary::ApiDictionary;
use crate::error::{Error, Result};
use crate::frontend::{load_source, parse_unit, AstMetrics, CallEvent, Diagnostic, SourceUnit};
use crate::par;
use crate::pipeline::{build_low_level, Pipeline};

/// Everything derived from one source file.
#[derive(Debug, Clone)]
pub struct FileAnalysis {
    /// Path relative to the analysis root, `/`-separated.
    pub rel: String,
    pub unit: SourceUnit,
    pub calls: Vec<CallEvent>,
    pub pipeline: Pipeline,
    pub metrics: AstMetrics,
    pub diagnostics: Vec<Diagnostic>,
    pub main_guard: bool,
}

pub fn analyze_unit(unit: SourceUnit, rel: &str, dict: &ApiDictionary) -> Result<FileAnalysis> {
    let parsed = parse_unit(&unit)?;
    let calls = parsed.calls();
    let pipeline = build_low_level(rel, &calls, dict);
    Ok(FileAnalysis {
        rel: rel.to_string(),
        metrics: parsed.metrics(),
        main_guard: parsed.has_main_guard(),
        diagnostics: parsed.diagnostics,
        calls,
        pipeline,
        unit,
    })
}

pub fn analyze_file(path: &Path, rel: &str, dict: &ApiDictionary) -> Result<FileAnalysis> {
    analyze_unit(load_source(path)?, rel, dict)
}

/// Which files a directory scan picks up.
#[derive(Debug, Clone)]
pub enum FileFilter {
    /// `.py` and `.ipynb`.
    Sources,
    /// A glob over the relative path (or the file name when the glob has no `/`).
    Glob { glob: String, regex: Regex },
}

impl FileFilter {
    pub fn glob(glob: &str) -> Result<FileFilter> {
        let regex = Regex::new(&glob_to_regex(glob))
            .map_err(|e| Error::InvalidInput(format!("bad glob '{glob}': {e}")))?;
        Ok(FileFilter::Glob {
            glob: glob.to_string(),
            regex,
        })
    }

    pub fn matches(&self, rel: &str) -> bool {
        match self {
            FileFilter::Sources => is_source_name(rel),
            FileFilter::Glob { glob, regex } => {
                if glob.contains('/') {
                    regex.is_match(rel)
                } else {
                    regex.is_match(rel.rsplit('/').next().unwrap_or(rel))
                }
            }
        }
    }
}

pub fn is_source_name(name: &str) -> bool {
    let lower = name.to_ascii_lowercase();
    lower.ends_with(".py") || lower.ends_with(".ipynb")
}

/// `**` spans directories, `*` and `?` do not, `{a,b}` alternates.
fn glob_to_regex(glob: &str) -> String {
    let mut re = String::from("^");
    let chars: Vec<char> = glob.chars().collect();
    let mut i = 0;
    let mut in_braces = false;
    while i < chars.len() {
        let c = chars[i];
        match c {
            '*' if chars.get(i + 1) == Some(&'*') => {
                if chars.get(i + 2) == Some(&'/') {
                    re.push_str("(?:.*/)?");
                    i += 3;
                } else {
                    re.push_str(".*");
                    i += 2;
                }
                continue;
            }
            '*' => re.push_str("[^/]*"),
            '?' => re.push_str("[^/]"),
            '{' => {
                in_braces = true;
                re.push_str("(?:");
            }
            '}' if in_braces => {
                in_braces = false;
                re.push(')');
            }
            ',' if in_braces => re.push('|'),
            c => re.push_str(&regex::escape(&c.to_string())),
        }
        i += 1;
    }
    re.push('$');
    re
}

pub(crate) fn rel_path(root: &Path, path: &Path) -> String {
    let rel = path.strip_prefix(root).unwrap_or(path);
    rel.components()
        .map(|c| c.as_os_str().to_string_lossy())
        .collect::<Vec<_>>()
        .join("/")
}

pub(crate) fn is_hidden(name: &str) -> bool {
    name.starts_with('.') && name != "." && name != ".."
}

/// Matching files under `root`, sorted by relative path. Hidden entries
/// (`.git`, `.ipynb_checkpoints`) are skipped. A file root yields itself,
/// named by its file name.
pub fn discover(root: &Path, filter: &FileFilter) -> Result<Vec<(PathBuf, String)>> {
    let meta = std::fs::metadata(root).map_err(|e| Error::io(root, e))?;
    if meta.is_file() {
        let name = root.file_name().map_or_else(
            || root.display().to_string(),
            |n| n.to_string_lossy().into_owned(),
        );
        return Ok(vec![(root.to_path_buf(), name)]);
    }
    let mut out = Vec::new();
    let walker = WalkDir::new(root)
        .follow_links(false)
        .into_iter()
        .filter_entry(|e| e.depth() == 0 || !is_hidden(&e.file_name().to_string_lossy()));
    for entry in walker {
        let entry = entry.map_err(|e| {
            let path = e.path().unwrap_or(root).to_path_buf();
            Error::io(path, e.into())
        })?;
        if !entry.file_type().is_file() {
            continue;
        }
        let rel = rel_path(root, entry.path());
        if filter.matches(&rel) {
            out.push((entry.path().to_path_buf(), rel));
        }
    }
    out.sort_by(|a, b| a.1.cmp(&b.1));
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct CorpusOptions {
    pub filter: FileFilter,
    pub jobs: usize,
    pub lint: LintConfig,
}

impl Default for CorpusOptions {
    fn default() -> Self {
        CorpusOptions {
            filter: FileFilter::Sources,
            jobs: 0,
            lint: LintConfig::default(),
        }
    }
}

fn accumulate(
    mut acc: CorpusAccumulator,
    file: &(PathBuf, String),
    dict: &ApiDictionary,
    cfg: &LintConfig,
) -> CorpusAccumulator {
    match analyze_file(&file.0, &file.1, dict) {
        Ok(a) => {
            for d in a.diagnostics {
                acc.add_diagnostic(CellDiagnostic {
                    path: a.rel.clone(),
                    cell_index: d.cell_index,
                    message: d.message,
                });
            }
            let findings = lint(&a.pipeline, cfg);
            acc.add_pipeline(a.pipeline, findings);
        }
        Err(e) => acc.add_skipped(Skipped {
            path: file.1.clone(),
            error: e.to_string(),
        }),
    }
    acc
}

/// Analyzes every matching file under `root`. Files that fail to load or
/// parse are listed under `skipped`.
pub fn analyze_corpus(
    root: &Path,
    dict: &ApiDictionary,
    opts: &CorpusOptions,
) -> Result<CorpusReport> {
    let files = discover(root, &opts.filter)?;
    par::fold_reduce(
        &files,
        opts.jobs,
        CorpusAccumulator::default,
        |acc, f| accumulate(acc, f, dict, &opts.lint),
        CorpusAccumulator::merge,
    )
    .finish()
}
