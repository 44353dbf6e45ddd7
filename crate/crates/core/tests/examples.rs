use dspipe_core::analytics::{
    lint_feedback_loops, lint_missing_stage, lint_pipeline_jungle, lint_tangled, stage_frequency,
    transition_matrix,
};
use dspipe_core::dictionary::{cohens_kappa, interpret_kappa, ApiDictionary};
use dspipe_core::frontend::{ast_metrics, extract_calls, extract_headings, CellKind, SourceUnit};
use dspipe_core::pipeline::{build_high_level, build_low_level, classify_heading, Level, Pipeline};
use dspipe_core::taxonomy::{is_feedback_edge, Layer, Stage};
use dspipe_core::Error;

use Stage::*;

fn script(text: &str) -> SourceUnit {
    SourceUnit::script("t.py", text)
}

fn names(unit: &SourceUnit) -> Vec<String> {
    extract_calls(unit)
        .unwrap()
        .calls
        .into_iter()
        .map(|c| c.resolved_name)
        .collect()
}

fn notebook(cells: &[(&str, &str)]) -> SourceUnit {
    let cells: Vec<serde_json::Value> = cells
        .iter()
        .map(|(kind, src)| serde_json::json!({"cell_type": kind, "source": src, "metadata": {}}))
        .collect();
    let doc =
        serde_json::json!({"nbformat": 4, "nbformat_minor": 5, "metadata": {}, "cells": cells});
    SourceUnit::notebook("nb.ipynb", &doc.to_string()).unwrap()
}

fn low(text: &str) -> Pipeline {
    let unit = script(text);
    build_low_level(
        "t.py",
        &extract_calls(&unit).unwrap().calls,
        &ApiDictionary::seed(),
    )
}

#[test]
fn stage_codes() {
    let mdl = Stage::from_code("MDL").unwrap();
    assert_eq!(mdl, Mdl);
    assert_eq!(mdl.display_name(), "Modeling");
    assert_eq!(mdl.layer(), Layer::ModelBuilding);
    assert_eq!(mdl.ordinal(), 50);
    assert_eq!(Stage::from_code("acq").unwrap(), Acq);
    let err = Stage::from_code("XYZ").unwrap_err();
    assert!(err.to_string().contains("XYZ"));
}

#[test]
fn feedback_edges() {
    assert!(is_feedback_edge(Evl, Mdl).unwrap());
    assert!(!is_feedback_edge(Mdl, Mdl).unwrap());
    assert!(!is_feedback_edge(Prp, Evl).unwrap());
    assert!(matches!(
        is_feedback_edge(Vis, Mdl),
        Err(Error::UnorderedStage("VIS"))
    ));
    assert!(is_feedback_edge(Mdl, Gen).is_err());
}

#[test]
fn notebook_cells_keep_order() {
    let nb = notebook(&[
        ("markdown", "# Intro"),
        ("code", "x = 1"),
        ("code", "y = 2"),
    ]);
    let idx: Vec<usize> = nb.cells.iter().map(|c| c.index).collect();
    let kinds: Vec<CellKind> = nb.cells.iter().map(|c| c.kind).collect();
    assert_eq!(idx, [0, 1, 2]);
    assert_eq!(kinds, [CellKind::Markdown, CellKind::Code, CellKind::Code]);
}

#[test]
fn script_is_one_cell() {
    let unit = script("import os\n");
    assert_eq!(unit.cells.len(), 1);
    assert_eq!(unit.cells[0].index, 0);
}

#[test]
fn malformed_notebook_cites_json_path() {
    let err = SourceUnit::notebook("bad.ipynb", r#"{"cells": "not-a-list"}"#).unwrap_err();
    match err {
        Error::MalformedNotebook { json_path, .. } => assert_eq!(json_path, "$.cells"),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn alias_substitution() {
    let n = names(&script("import pandas as pd\npd.read_csv('a.csv')\n"));
    assert_eq!(n, ["pandas.read_csv"]);
}

#[test]
fn aliases_persist_across_cells() {
    let nb = notebook(&[
        (
            "code",
            "import numpy as np\nfrom sklearn.linear_model import LogisticRegression as LR",
        ),
        ("markdown", "## Model"),
        ("code", "np.zeros(3)\nLR()"),
    ]);
    let calls = extract_calls(&nb).unwrap().calls;
    let got: Vec<(&str, usize)> = calls
        .iter()
        .map(|c| (c.resolved_name.as_str(), c.cell_index))
        .collect();
    assert_eq!(
        got,
        [
            ("numpy.zeros", 2),
            ("sklearn.linear_model.LogisticRegression", 2)
        ]
    );
}

#[test]
fn random_forest_calls_in_order() {
    let n = names(&script(
        "random_forest = RandomForestClassifier(n_estimators=100)\nrandom_forest.fit(train, train_labels)\n",
    ));
    assert_eq!(n, ["RandomForestClassifier", "random_forest.fit"]);
}

#[test]
fn arguments_before_enclosing_call() {
    let n = names(&script("model.fit(scaler.transform(X))\n"));
    assert_eq!(n, ["scaler.transform", "model.fit"]);
}

#[test]
fn broken_cell_is_skipped() {
    let nb = notebook(&[
        ("code", "pd.read_csv('x')"),
        ("code", "def (:"),
        ("code", "%matplotlib inline\nplt.show()"),
    ]);
    let ex = extract_calls(&nb).unwrap();
    assert_eq!(ex.calls.len(), 2);
    assert_eq!(ex.diagnostics.len(), 1);
    assert_eq!(ex.diagnostics[0].cell_index, 1);
}

#[test]
fn broken_script_is_an_error() {
    assert!(matches!(
        extract_calls(&script("def (:\n")),
        Err(Error::Syntax { .. })
    ));
}

#[test]
fn linearity_metrics() {
    let m = ast_metrics(&script("a = 1\nb = 2\nc = a + b\nprint(c)\nd = [c]\n")).unwrap();
    assert_eq!(m.control_nodes, 0);
    assert_eq!(m.linearity_ratio, 0.0);
    let m = ast_metrics(&script("while x:\n    if y:\n        pass\n")).unwrap();
    assert_eq!(m.control_nodes, 2);
}

#[test]
fn headings() {
    let nb = notebook(&[("markdown", "## Feature Engineering")]);
    assert_eq!(
        extract_headings(&nb),
        [(0, "Feature Engineering".to_string())]
    );
    assert!(extract_headings(&notebook(&[("code", "x = 1")])).is_empty());
    let nb = notebook(&[("code", "x = 1"), ("markdown", "# One\ntext\n## Two")]);
    assert_eq!(
        extract_headings(&nb),
        [(1, "One".to_string()), (1, "Two".to_string())]
    );
}

#[test]
fn dictionary_lookup() {
    let d = ApiDictionary::seed();
    assert_eq!(d.lookup_name("model.summary", "summary"), Some(Gen));
    assert_eq!(d.lookup_name("clf.fit", "fit"), Some(Trn));
    assert_eq!(
        d.lookup_name("LogisticRegression", "LogisticRegression"),
        Some(Mdl)
    );
    assert_eq!(d.lookup_name("frobnicate", "frobnicate"), None);
}

#[test]
fn dictionary_schema() {
    let one =
        r#"{"version":1,"entries":[{"pattern":"pandas.read_csv","match":"exact","stage":"ACQ"}]}"#;
    assert_eq!(ApiDictionary::from_json(one).unwrap().entries.len(), 1);
    let dup = r#"{"version":1,"entries":[
        {"pattern":"a.b","match":"exact","stage":"ACQ"},
        {"pattern":"a.b","match":"exact","stage":"PRP"}]}"#;
    assert!(matches!(
        ApiDictionary::from_json(dup),
        Err(Error::DictionarySchema { entry: Some(1), .. })
    ));
    let foo = r#"{"version":1,"entries":[{"pattern":"a.b","match":"exact","stage":"FOO"}]}"#;
    let err = ApiDictionary::from_json(foo).unwrap_err();
    assert!(err.to_string().contains("FOO"));
}

#[test]
fn kappa_examples() {
    let a = ["x", "y", "z", "x"];
    let r = cohens_kappa(&a, &a).unwrap();
    assert_eq!(r.kappa, 1.0);
    assert_eq!(r.interpretation, "Perfect agreement");
    let r = cohens_kappa(&["x", "x", "y", "y"], &["x", "y", "y", "y"]).unwrap();
    assert!((r.po - 0.75).abs() < 1e-12);
    assert!((r.pe - 0.5).abs() < 1e-12);
    assert!((r.kappa - 0.5).abs() < 1e-12);
    assert_eq!(r.interpretation, "Moderate agreement");
    assert_eq!(interpret_kappa(0.67), "Substantial agreement");
    assert!(matches!(
        cohens_kappa(&["x"], &["x", "y"]),
        Err(Error::LengthMismatch { .. })
    ));
    assert!(matches!(
        cohens_kappa::<&str>(&[], &[]),
        Err(Error::EmptyInput)
    ));
}

#[test]
fn kappa_band_boundaries() {
    assert_eq!(interpret_kappa(0.0), "Slight agreement");
    assert_eq!(interpret_kappa(0.20), "Slight agreement");
    assert_eq!(interpret_kappa(0.21), "Fair agreement");
    assert_eq!(interpret_kappa(0.40), "Fair agreement");
    assert_eq!(interpret_kappa(0.41), "Moderate agreement");
    assert_eq!(interpret_kappa(0.60), "Moderate agreement");
    assert_eq!(interpret_kappa(0.61), "Substantial agreement");
    assert_eq!(interpret_kappa(0.80), "Substantial agreement");
    assert_eq!(interpret_kappa(0.81), "Perfect agreement");
    assert_eq!(interpret_kappa(1.0), "Perfect agreement");
}

#[test]
fn collapse_and_edges() {
    let p = Pipeline::from_stages("x", Level::Low, &[Prp, Prp, Mdl, Mdl, Trn]);
    assert_eq!(p.stages(), [Prp, Mdl, Trn]);
    let e: Vec<(Stage, Stage, usize)> = p.edges.iter().map(|e| (e.from, e.to, e.count)).collect();
    assert_eq!(e, [(Prp, Mdl, 1), (Mdl, Trn, 1)]);
}

#[test]
fn random_forest_pipeline_repeats_modeling() {
    let p = low(
        "from sklearn.ensemble import RandomForestClassifier\n\
         random_forest = RandomForestClassifier(n_estimators=100, random_state=50, verbose=1, n_jobs=-1)\n\
         random_forest.fit(train, train_labels)\n\
         poly_features = scaler.fit_transform(poly_features)\n\
         poly_features_test = scaler.transform(poly_features_test)\n\
         random_forest_poly = RandomForestClassifier(n_estimators=100, random_state=50, verbose=1, n_jobs=-1)\n\
         random_forest_poly.fit(poly_features, train_labels)\n\
         pred = random_forest_poly.predict_proba(poly_features_test)[:,1]\n",
    );
    assert_eq!(p.stages(), [Mdl, Trn, Prp, Mdl, Trn, Prd]);
    assert_eq!(p.occurrences(Mdl), 2);
}

#[test]
fn generic_only_is_empty() {
    let p = low("model.summary()\nprint(1)\n");
    assert!(p.sequence.is_empty());
    assert_eq!(p.dropped.generic, 2);
}

#[test]
fn heading_classifier() {
    assert_eq!(classify_heading("Exploratory Data Analysis"), Some(Eda));
    assert_eq!(classify_heading("Load libraries"), Some(Lib));
    assert_eq!(classify_heading("Acknowledgements"), None);
}

#[test]
fn high_level_pipelines() {
    let nb = notebook(&[
        ("markdown", "# Load libraries"),
        ("markdown", "## EDA"),
        ("markdown", "## Feature Engineering"),
        ("markdown", "## Model"),
    ]);
    let p = build_high_level("nb", &nb);
    assert_eq!(p.level, Level::High);
    assert_eq!(p.stages(), [Lib, Eda, Ftr, Mdl]);
    assert!(build_high_level("nb", &notebook(&[("code", "x = 1")]))
        .sequence
        .is_empty());
    let nb = notebook(&[("markdown", "# Model\n# Training\n# Model")]);
    assert_eq!(build_high_level("nb", &nb).stages(), [Mdl, Trn, Mdl]);
}

fn p(stages: &[Stage]) -> Pipeline {
    Pipeline::from_stages("t", Level::Low, stages)
}

#[test]
fn frequencies() {
    let f = stage_frequency(&[p(&[Acq, Prp, Mdl]), p(&[Acq, Prp]), p(&[Prp, Evl])]).unwrap();
    assert_eq!(
        (f[&Prp], f[&Acq], f[&Mdl], f[&Evl]),
        (1.0, 2.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0)
    );
    let single = stage_frequency(&[p(&[Acq, Mdl])]).unwrap();
    assert_eq!((single[&Acq], single[&Mdl], single[&Trn]), (1.0, 1.0, 0.0));
}

#[test]
fn transitions() {
    let m = transition_matrix(&[p(&[Acq, Prp, Acq]), p(&[Acq, Prp])]);
    assert_eq!((m.get(Acq, Prp), m.get(Prp, Acq), m.total()), (2, 1, 3));
    let around: Vec<Pipeline> = [Acq, Str, Ftr, Mdl, Trn, Evl, Prd]
        .into_iter()
        .map(|s| p(&[s, Prp, s]))
        .collect();
    let m = transition_matrix(&around);
    for s in [Acq, Str, Ftr, Mdl, Trn, Evl, Prd] {
        assert!(m.get(s, Prp) > 0 && m.get(Prp, s) > 0);
    }
}

#[test]
fn lint_examples() {
    assert_eq!(
        lint_missing_stage(&p(&[Acq, Prp, Mdl, Trn, Prd]), &[Evl]).len(),
        1
    );
    assert!(lint_missing_stage(&p(&[Acq, Evl, Prd]), &[Evl]).is_empty());
    assert!(lint_missing_stage(&p(&[Acq]), &[]).is_empty());

    let f = lint_feedback_loops(&p(&[Mdl, Trn, Evl, Mdl]));
    assert!(f.iter().any(|f| f.detail.starts_with("EVL→MDL")));
    assert!(lint_feedback_loops(&p(&[Acq, Prp, Mdl, Trn, Evl, Prd])).is_empty());
    let f = lint_feedback_loops(&p(&[Mdl, Trn, Prd, Mdl]));
    assert_eq!(f.len(), 1);
    assert!(f[0].detail.starts_with("PRD→MDL"));

    let jungle = p(&[Acq, Prp, Mdl, Prp, Trn, Prp, Evl]);
    assert_eq!(lint_pipeline_jungle(&jungle, 3).len(), 1);
    assert!(lint_pipeline_jungle(&p(&[Acq, Prp, Mdl]), 3).is_empty());
    assert!(lint_pipeline_jungle(&jungle, 5).is_empty());

    let tangled = p(&[Prp, Mdl, Prp, Mdl, Prp]);
    assert_eq!(lint_tangled(&tangled, 3).len(), 1);
    assert!(lint_tangled(&p(&[Acq, Prp, Mdl]), 3).is_empty());
    assert!(lint_tangled(&tangled, 10).is_empty());
}
