use std::sync::LazyLock;

use regex::Regex;
use serde::Serialize;

use crate::frontend::SourceUnit;
use crate::taxonomy::Stage;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HighLevelLabel {
    pub cell_index: usize,
    pub heading: String,
    /// `None` when no keyword matches.
    pub stage: Option<Stage>,
}

/// Keyword table in priority order; the first matching row wins.
/// Patterns are matched against the lowercased heading.
const KEYWORDS: &[(Stage, &str)] = &[
    (
        Stage::Eda,
        r"exploratory|\beda\b|data exploration|explor(e|ing) (the )?data",
    ),
    (
        Stage::Acq,
        r"\b(load|loading|read|reading|import|importing|get|getting|fetch|fetching)( in)?( the)? (data|dataset|datasets|files?)\b|data (loading|acquisition|collection)|acquisition|download",
    ),
    (
        Stage::Lib,
        r"load(ing)? (the )?librar|librar(y|ies)|\bimport|packages|\bset ?up\b|dependencies",
    ),
    (Stage::Vis, r"visuali|\bplot|\bchart|\bgraph"),
    (Stage::Ftr, r"feature"),
    (Stage::Prp, r"\bsplit|train[- /]test|train[- /]val"),
    (
        Stage::Evl,
        r"evaluat|validation|\bmetric|\bscor(e|ing)|accuracy|performance",
    ),
    (Stage::Prd, r"predict|submission|submit|inference|forecast"),
    (Stage::Int, r"interpret|explainab|explanation"),
    (Stage::Dpl, r"deploy|serving"),
    (Stage::Cmn, r"communicat"),
    (Stage::Str, r"\bsav(e|ing)\b|storage|\bstor(e|ing)\b"),
    (Stage::Trn, r"\btrain|\bfit(ting)?\b"),
    (
        Stage::Mdl,
        r"model|architecture|network|classifier|regress|algorithm",
    ),
    (
        Stage::Prp,
        r"clean|pre-?process|prepar|wrangl|missing|imput|encod|normali[sz]|scal(e|ing)\b|transform",
    ),
];

static TABLE: LazyLock<Vec<(Stage, Regex)>> = LazyLock::new(|| {
    KEYWORDS
        .iter()
        .map(|(s, p)| (*s, Regex::new(p).expect("keyword pattern compiles")))
        .collect()
});

/// Stage for a notebook heading, or `None` (unclassified).
pub fn classify_heading(heading: &str) -> Option<Stage> {
    let lower = heading.to_lowercase();
    TABLE
        .iter()
        .find(|(_, re)| re.is_match(&lower))
        .map(|(s, _)| *s)
}

pub fn label_headings(unit: &SourceUnit) -> Vec<HighLevelLabel> {
    crate::frontend::extract_headings(unit)
        .into_iter()
        .map(|(cell_index, heading)| HighLevelLabel {
            cell_index,
            stage: classify_heading(&heading),
            heading,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let cases = [
            ("Exploratory Data Analysis", Some(Stage::Eda)),
            ("EDA", Some(Stage::Eda)),
            ("Load libraries", Some(Stage::Lib)),
            ("Importing Libraries", Some(Stage::Lib)),
            ("Loading the data", Some(Stage::Acq)),
            ("Read data", Some(Stage::Acq)),
            ("Data Visualization", Some(Stage::Vis)),
            ("Feature Engineering", Some(Stage::Ftr)),
            ("Train-test split", Some(Stage::Prp)),
            ("Model evaluation", Some(Stage::Evl)),
            ("Training the model", Some(Stage::Trn)),
            ("Model", Some(Stage::Mdl)),
            ("Submission", Some(Stage::Prd)),
            ("Data Cleaning", Some(Stage::Prp)),
            ("Acknowledgements", None),
            ("Conclusion", None),
        ];
        for (h, want) in cases {
            assert_eq!(classify_heading(h), want, "{h}");
        }
    }
}
