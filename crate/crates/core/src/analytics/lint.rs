//! Anti-pattern rules over a single pipeline.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::pipeline::Pipeline;
use crate::taxonomy::{is_feedback_edge, Stage};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Rule {
    MissingEvaluation,
    FeedbackLoop,
    PipelineJungle,
    TangledStages,
}

impl Rule {
    pub const ALL: [Rule; 4] = [
        Rule::MissingEvaluation,
        Rule::FeedbackLoop,
        Rule::PipelineJungle,
        Rule::TangledStages,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Rule::MissingEvaluation => "MissingEvaluation",
            Rule::FeedbackLoop => "FeedbackLoop",
            Rule::PipelineJungle => "PipelineJungle",
            Rule::TangledStages => "TangledStages",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Rule {
    type Err = Error;

    /// Accepts the rule name or a short alias (`missing`, `feedback`,
    /// `jungle`, `tangled`), case-insensitively.
    fn from_str(s: &str) -> Result<Rule> {
        let key: String = s
            .chars()
            .filter(|c| c.is_alphanumeric())
            .collect::<String>()
            .to_lowercase();
        match key.as_str() {
            "missingevaluation" | "missing" | "missingstage" => Ok(Rule::MissingEvaluation),
            "feedbackloop" | "feedback" => Ok(Rule::FeedbackLoop),
            "pipelinejungle" | "jungle" => Ok(Rule::PipelineJungle),
            "tangledstages" | "tangled" | "tangle" => Ok(Rule::TangledStages),
            _ => Err(Error::InvalidInput(format!("unknown lint rule '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Severity {
    Info,
    Warn,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Finding {
    pub source: String,
    pub rule: Rule,
    pub severity: Severity,
    pub detail: String,
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}: {}", self.source, self.rule, self.detail)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LintConfig {
    pub rules: BTreeSet<Rule>,
    pub required: Vec<Stage>,
    pub jungle_min_runs: usize,
    pub tangle_threshold: usize,
}

impl Default for LintConfig {
    fn default() -> Self {
        LintConfig {
            rules: Rule::ALL.into_iter().collect(),
            required: vec![Stage::Evl],
            jungle_min_runs: 3,
            tangle_threshold: 3,
        }
    }
}

fn finding(p: &Pipeline, rule: Rule, severity: Severity, detail: String) -> Finding {
    Finding {
        source: p.source.clone(),
        rule,
        severity,
        detail,
    }
}

/// One Warn per required stage absent from the sequence. When EVL is
/// required and absent but VIS is present, an extra Info notes that the
/// plots may serve as evaluation.
pub fn lint_missing_stage(p: &Pipeline, required: &[Stage]) -> Vec<Finding> {
    let mut out = Vec::new();
    for &s in required {
        if p.contains(s) {
            continue;
        }
        out.push(finding(
            p,
            Rule::MissingEvaluation,
            Severity::Warn,
            format!("no {} ({}) stage", s.display_name(), s.code()),
        ));
        if s == Stage::Evl && p.contains(Stage::Vis) {
            out.push(finding(
                p,
                Rule::MissingEvaluation,
                Severity::Info,
                "VIS present without EVL; plots may be standing in for evaluation".into(),
            ));
        }
    }
    out
}

/// One Info per distinct backward edge. Edges touching VIS are skipped.
pub fn lint_feedback_loops(p: &Pipeline) -> Vec<Finding> {
    p.edges
        .iter()
        .filter(|e| is_feedback_edge(e.from, e.to).unwrap_or(false))
        .map(|e| {
            finding(
                p,
                Rule::FeedbackLoop,
                Severity::Info,
                format!("{}→{} (count {})", e.from, e.to, e.count),
            )
        })
        .collect()
}

/// Warn when PRP occurs at least `min_runs` times and its interior
/// occurrences sit between at least two distinct (before, after) pairs.
pub fn lint_pipeline_jungle(p: &Pipeline, min_runs: usize) -> Vec<Finding> {
    let runs = p.occurrences(Stage::Prp);
    if runs == 0 || runs < min_runs {
        return Vec::new();
    }
    let mut pairs: Vec<(Stage, Stage)> = Vec::new();
    for w in p.sequence.windows(3) {
        if w[1].stage == Stage::Prp {
            let pair = (w[0].stage, w[2].stage);
            if !pairs.contains(&pair) {
                pairs.push(pair);
            }
        }
    }
    if pairs.len() < 2 {
        return Vec::new();
    }
    let listed: Vec<String> = pairs.iter().map(|(a, b)| format!("({a},{b})")).collect();
    vec![finding(
        p,
        Rule::PipelineJungle,
        Severity::Warn,
        format!("PRP occurs {runs} times, between {}", listed.join(", ")),
    )]
}

/// Warn when Σ(occurrences(s) − 1) reaches `threshold`.
pub fn lint_tangled(p: &Pipeline, threshold: usize) -> Vec<Finding> {
    let mut scatter = Vec::new();
    let mut score = 0;
    for s in Stage::ALL {
        let k = p.occurrences(s);
        if k > 1 {
            scatter.push(format!("{s} {}", k - 1));
            score += k - 1;
        }
    }
    if score == 0 || score < threshold {
        return Vec::new();
    }
    vec![finding(
        p,
        Rule::TangledStages,
        Severity::Warn,
        format!("tangling score {score} ({})", scatter.join(", ")),
    )]
}

/// All enabled rules, in rule order.
pub fn lint(p: &Pipeline, cfg: &LintConfig) -> Vec<Finding> {
    let mut out = Vec::new();
    for rule in &cfg.rules {
        match rule {
            Rule::MissingEvaluation => out.extend(lint_missing_stage(p, &cfg.required)),
            Rule::FeedbackLoop => out.extend(lint_feedback_loops(p)),
            Rule::PipelineJungle => out.extend(lint_pipeline_jungle(p, cfg.jungle_min_runs)),
            Rule::TangledStages => out.extend(lint_tangled(p, cfg.tangle_threshold)),
        }
    }
    out
}

pub fn has_warning(findings: &[Finding]) -> bool {
    findings.iter().any(|f| f.severity == Severity::Warn)
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
    fn missing_evaluation() {
        let f = lint_missing_stage(&p(&[Acq, Prp, Mdl, Trn, Prd]), &[Evl]);
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].rule, Rule::MissingEvaluation);
        assert!(lint_missing_stage(&p(&[Mdl, Evl]), &[Evl]).is_empty());
        assert!(lint_missing_stage(&p(&[Mdl]), &[]).is_empty());
        let with_vis = lint_missing_stage(&p(&[Mdl, Vis]), &[Evl]);
        assert_eq!(with_vis.len(), 2);
        assert_eq!(with_vis[1].severity, Severity::Info);
    }

    #[test]
    fn feedback() {
        let f = lint_feedback_loops(&p(&[Mdl, Trn, Prd, Mdl]));
        assert_eq!(f.len(), 1);
        assert!(f[0].detail.starts_with("PRD→MDL"));
        assert!(lint_feedback_loops(&p(&[Acq, Prp, Mdl, Trn, Evl, Prd])).is_empty());
        assert!(lint_feedback_loops(&p(&[Mdl, Vis, Prp])).is_empty());
    }

    #[test]
    fn jungle() {
        let s = [Acq, Prp, Mdl, Prp, Trn, Prp, Evl];
        let f = lint_pipeline_jungle(&p(&s), 3);
        assert_eq!(f.len(), 1);
        assert!(f[0].detail.contains("(ACQ,MDL), (MDL,TRN), (TRN,EVL)"));
        assert!(lint_pipeline_jungle(&p(&[Acq, Prp, Mdl]), 3).is_empty());
        assert!(lint_pipeline_jungle(&p(&s), 5).is_empty());
    }

    #[test]
    fn tangled() {
        let s = [Prp, Mdl, Prp, Mdl, Prp];
        let f = lint_tangled(&p(&s), 3);
        assert_eq!(f[0].detail, "tangling score 3 (PRP 2, MDL 1)");
        assert!(lint_tangled(&p(&[Acq, Prp, Mdl]), 3).is_empty());
        assert!(lint_tangled(&p(&s), 10).is_empty());
    }

    #[test]
    fn rule_names_parse() {
        for r in Rule::ALL {
            assert_eq!(r.name().parse::<Rule>().unwrap(), r);
        }
        assert_eq!("feedback".parse::<Rule>().unwrap(), Rule::FeedbackLoop);
        assert!("nope".parse::<Rule>().is_err());
    }
}
