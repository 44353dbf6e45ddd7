//! `dspipe`: pipeline extraction, corpus statistics, lints and project
//! analysis for data-science Python code.
//!
//! Exit status: 0 success, 1 lint warnings, 2 operational error.

mod render;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use dspipe_core::analytics::{has_warning, lint, LintConfig, Rule};
use dspipe_core::corpus::{analyze_corpus, analyze_file, discover, CorpusOptions, FileFilter};
use dspipe_core::dictionary::{cohens_kappa, load_dictionary, ApiDictionary};
use dspipe_core::frontend::load_source;
use dspipe_core::pipeline::{build_high_level, map_events, to_dot, to_dot_merged};
use dspipe_core::project::analyze_project;

#[derive(Parser)]
#[command(
    name = "dspipe",
    version,
    about = "Reconstruct and lint data-science pipelines"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// API dictionary JSON; replaces the embedded seed dictionary.
    #[arg(long, global = true, env = "DSPIPE_DICT", value_name = "PATH")]
    dict: Option<PathBuf>,
    /// Output format. Defaults to `text` for lint and dict-validate, `json` elsewhere.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads; 0 uses available parallelism.
    #[arg(long, global = true, default_value_t = 0, value_name = "N")]
    jobs: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Pipeline of one script or notebook.
    Extract {
        path: PathBuf,
        /// Use notebook headings instead of API calls.
        #[arg(long)]
        high_level: bool,
        /// Include the mapped call log and AST metrics (JSON only).
        #[arg(long)]
        raw: bool,
        /// DOT: one node per distinct stage.
        #[arg(long)]
        merged: bool,
    },
    /// Statistics over every source file under a directory.
    Corpus {
        dir: PathBuf,
        /// Also write the transition matrix as CSV.
        #[arg(long, value_name = "OUT")]
        csv: Option<PathBuf>,
        /// Glob selecting files instead of `.py`/`.ipynb`.
        #[arg(long, value_name = "GLOB")]
        include: Option<String>,
    },
    /// Anti-pattern findings for a file or directory.
    Lint {
        path: PathBuf,
        /// Comma-separated rules (missing, feedback, jungle, tangled).
        #[arg(long, value_delimiter = ',')]
        rules: Option<Vec<String>>,
        /// PRP occurrences needed before PipelineJungle fires.
        #[arg(long, default_value_t = 3, value_name = "N", value_parser = clap::value_parser!(u64).range(1..))]
        jungle_min_runs: u64,
        /// Tangling score at which TangledStages fires.
        #[arg(long, default_value_t = 3, value_name = "N", value_parser = clap::value_parser!(u64).range(1..))]
        tangle_threshold: u64,
        /// Glob selecting files when PATH is a directory.
        #[arg(long, value_name = "GLOB")]
        include: Option<String>,
    },
    /// Repository structure and project-level pipeline.
    Project {
        dir: PathBuf,
        #[arg(long)]
        contributors: Option<u32>,
    },
    /// Cohen's kappa between two JSON label arrays.
    Kappa {
        labels_a: PathBuf,
        labels_b: PathBuf,
    },
    /// Validate a dictionary file (default: the active dictionary).
    DictValidate { path: Option<PathBuf> },
}

fn dictionary(global: &Global) -> Result<ApiDictionary> {
    match &global.dict {
        Some(path) => Ok(load_dictionary(path)?),
        None => Ok(ApiDictionary::seed()),
    }
}

fn filter(include: Option<&str>) -> Result<FileFilter> {
    Ok(match include {
        Some(glob) => FileFilter::glob(glob)?,
        None => FileFilter::Sources,
    })
}

fn file_name(path: &Path) -> String {
    path.file_name().map_or_else(
        || path.display().to_string(),
        |n| n.to_string_lossy().into_owned(),
    )
}

fn run(cli: Cli) -> Result<ExitCode> {
    let g = &cli.global;
    match cli.command {
        Command::Extract {
            path,
            high_level,
            raw,
            merged,
        } => {
            let dict = dictionary(g)?;
            let name = file_name(&path);
            let (pipeline, raw_log) = if high_level {
                let unit = load_source(&path)?;
                (build_high_level(name, &unit), None)
            } else {
                let a = analyze_file(&path, &name, &dict)?;
                for d in &a.diagnostics {
                    eprintln!("{}: cell {} skipped: {}", name, d.cell_index, d.message);
                }
                (a.pipeline, Some((a.calls, a.metrics)))
            };
            match g.format.unwrap_or(Format::Json) {
                Format::Json if raw => {
                    let (calls, metrics) = match raw_log {
                        Some((calls, metrics)) => (map_events(&calls, &dict), Some(metrics)),
                        None => (Vec::new(), None),
                    };
                    let doc = serde_json::json!({
                        "pipeline": pipeline,
                        "calls": calls,
                        "metrics": metrics,
                    });
                    println!("{}", serde_json::to_string_pretty(&doc)?);
                }
                Format::Json => println!("{}", pipeline.to_json()),
                Format::Dot if merged => print!("{}", to_dot_merged(&pipeline)),
                Format::Dot => print!("{}", to_dot(&pipeline)),
                Format::Text => print!("{}", render::pipeline_text(&pipeline)),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Corpus { dir, csv, include } => {
            let dict = dictionary(g)?;
            let opts = CorpusOptions {
                filter: filter(include.as_deref())?,
                jobs: g.jobs,
                ..CorpusOptions::default()
            };
            let report = analyze_corpus(&dir, &dict, &opts)?;
            render::report_diagnostics(&report.skipped, &report.diagnostics);
            if let Some(out) = csv {
                std::fs::write(&out, report.transition.to_csv())
                    .with_context(|| format!("writing {}", out.display()))?;
            }
            match g.format.unwrap_or(Format::Json) {
                Format::Json => println!("{}", report.to_json()),
                Format::Dot => print!("{}", render::transition_dot(&report.transition)),
                Format::Text => print!("{}", render::corpus_text(&report)),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Lint {
            path,
            rules,
            jungle_min_runs,
            tangle_threshold,
            include,
        } => {
            let dict = dictionary(g)?;
            let mut cfg = LintConfig {
                jungle_min_runs: jungle_min_runs as usize,
                tangle_threshold: tangle_threshold as usize,
                ..LintConfig::default()
            };
            if let Some(rules) = rules {
                cfg.rules = rules
                    .iter()
                    .map(|r| r.trim().parse::<Rule>())
                    .collect::<Result<_, _>>()?;
            }
            let findings = if path.is_dir() {
                let opts = CorpusOptions {
                    filter: filter(include.as_deref())?,
                    jobs: g.jobs,
                    lint: cfg,
                };
                let report = analyze_corpus(&path, &dict, &opts)?;
                render::report_diagnostics(&report.skipped, &report.diagnostics);
                report.lint
            } else {
                let files = discover(&path, &FileFilter::Sources)?;
                let Some((p, rel)) = files.first() else {
                    bail!("{}: not a source file", path.display());
                };
                let a = analyze_file(p, rel, &dict)?;
                lint(&a.pipeline, &cfg)
            };
            match g.format.unwrap_or(Format::Text) {
                Format::Json => println!("{}", serde_json::to_string_pretty(&findings)?),
                Format::Text => findings.iter().for_each(|f| println!("{f}")),
                Format::Dot => bail!("lint has no DOT output"),
            }
            Ok(if has_warning(&findings) {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            })
        }
        Command::Project { dir, contributors } => {
            let dict = dictionary(g)?;
            let model = analyze_project(&dir, contributors, &dict, g.jobs)?;
            render::report_diagnostics(&model.skipped, &[]);
            match g.format.unwrap_or(Format::Json) {
                Format::Json => println!("{}", model.to_json()),
                Format::Dot => print!("{}", to_dot(&model.high_level)),
                Format::Text => print!("{}", render::project_text(&model)),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Kappa { labels_a, labels_b } => {
            let a = read_labels(&labels_a)?;
            let b = read_labels(&labels_b)?;
            let report = cohens_kappa(&a, &b)?;
            match g.format.unwrap_or(Format::Json) {
                Format::Json => println!("{}", serde_json::to_string_pretty(&report)?),
                Format::Text => println!(
                    "kappa {:.4} ({}); po {:.4}, pe {:.4}, n {}",
                    report.kappa, report.interpretation, report.po, report.pe, report.n
                ),
                Format::Dot => bail!("kappa has no DOT output"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::DictValidate { path } => {
            let dict = match path {
                Some(p) => load_dictionary(p)?,
                None => dictionary(g)?,
            };
            let mut by_stage: BTreeMap<String, usize> = BTreeMap::new();
            for e in &dict.entries {
                *by_stage.entry(e.stage.code().to_string()).or_default() += 1;
            }
            match g.format.unwrap_or(Format::Text) {
                Format::Json => {
                    let doc = serde_json::json!({
                        "version": dict.version,
                        "entries": dict.entries.len(),
                        "by_stage": by_stage,
                    });
                    println!("{}", serde_json::to_string_pretty(&doc)?);
                }
                Format::Text => {
                    let parts: Vec<String> =
                        by_stage.iter().map(|(s, n)| format!("{s} {n}")).collect();
                    println!("ok: {} entries ({})", dict.entries.len(), parts.join(", "));
                }
                Format::Dot => bail!("dict-validate has no DOT output"),
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

/// Labels are JSON scalars; each is compared by its JSON text.
fn read_labels(path: &Path) -> Result<Vec<String>> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let Some(items) = value.as_array() else {
        bail!("{}: expected a JSON array of labels", path.display());
    };
    items
        .iter()
        .map(|v| match v {
            serde_json::Value::String(s) => Ok(s.clone()),
            serde_json::Value::Number(_) | serde_json::Value::Bool(_) => Ok(v.to_string()),
            _ => bail!(
                "{}: labels must be strings, numbers or booleans",
                path.display()
            ),
        })
        .collect()
}

/// The error chain, skipping causes already spelled out by their parent.
fn error_message(e: &anyhow::Error) -> String {
    let mut msg = e.to_string();
    for cause in e.chain().skip(1) {
        let c = cause.to_string();
        if !msg.contains(&c) {
            msg.push_str(": ");
            msg.push_str(&c);
        }
    }
    msg
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("dspipe: error: {}", error_message(&e));
            ExitCode::from(2)
        }
    }
}
