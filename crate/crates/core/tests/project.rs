use std::fs;
use std::path::Path;

use dspipe_core::dictionary::ApiDictionary;
use dspipe_core::project::{analyze_project, ArtifactKind, Coupling};
use dspipe_core::taxonomy::Stage::*;
use dspipe_core::Error;

fn write(root: &Path, rel: &str, text: &str) {
    let path = root.join(rel);
    fs::create_dir_all(path.parent().unwrap()).unwrap();
    fs::write(path, text).unwrap();
}

#[test]
fn empty_directory_has_no_sources() {
    let dir = tempfile::tempdir().unwrap();
    let err = analyze_project(dir.path(), None, &ApiDictionary::seed(), 1).unwrap_err();
    assert!(matches!(err, Error::NoSourceFiles(_)));
}

#[test]
fn single_file_repo() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "main.py",
        "import pandas as pd\ndf = pd.read_csv('a')\nm = LogisticRegression()\nm.fit(df)\ndf2 = pd.read_csv('b')\n",
    );
    let model = analyze_project(dir.path(), Some(1), &ApiDictionary::seed(), 1).unwrap();
    assert_eq!(model.high_level.stages(), [Acq, Mdl, Trn, Acq]);
    assert_eq!(model.high_level.stages(), model.files[0].pipeline.stages());
    assert_eq!(model.coupling, Coupling::Tight);
    assert_eq!(model.high_level_method, "heuristic");
}

#[test]
fn entry_points_artifacts_and_modules() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    write(
        root,
        "train.py",
        "m = Sequential()\nm.fit(x)\nm.save('model.h5')\n",
    );
    write(
        root,
        "lib/layers.py",
        "def block(x):\n    return Dense(4)(x)\n\nnet = Sequential()\n",
    );
    write(root, "lib/util.py", "def helper():\n    return 1\n");
    write(
        root,
        "cli.py",
        "import argparse\np = argparse.ArgumentParser()\n",
    );
    write(
        root,
        "serve.py",
        "import joblib\nm = joblib.load('m.pkl')\nm.predict(x)\n",
    );
    write(root, "run.sh", "#!/bin/sh\npython train.py --epochs 3\n");
    write(root, "weights/model.ckpt", "");
    write(root, "export/model.json", "{}");
    write(root, ".ipynb_checkpoints/old.py", "import os\n");

    let dict = ApiDictionary::seed();
    let model = analyze_project(root, Some(8), &dict, 1).unwrap();
    assert_eq!(model.entry_points, ["cli.py", "train.py"]);
    assert_eq!(model.coupling, Coupling::Loose);
    let arts: Vec<(&str, ArtifactKind)> = model
        .artifacts
        .iter()
        .map(|a| (a.path.as_str(), a.kind))
        .collect();
    assert!(arts.contains(&("weights/model.ckpt", ArtifactKind::Checkpoint)));
    assert!(arts.contains(&("export/model.json", ArtifactKind::JsonModel)));
    assert!(arts.contains(&("lib/layers.py", ArtifactKind::SavedSource)));
    assert!(!arts.iter().any(|(p, _)| *p == "lib/util.py"));
    assert!(model.phases.development);
    assert!(model.phases.post_development);
    assert!(!model.files.iter().any(|f| f.path.starts_with('.')));

    let mut grouped: Vec<&String> = model.modules.values().flatten().collect();
    grouped.sort();
    let mut files: Vec<&String> = model.files.iter().map(|f| &f.path).collect();
    files.sort();
    assert_eq!(grouped, files);
    assert!(model.entry_points.iter().all(|e| files.contains(&e)));

    let again = analyze_project(root, Some(8), &dict, 4).unwrap();
    assert_eq!(model.to_json(), again.to_json());
}

#[test]
fn unknown_coupling_without_contributors() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "a.py", "import os\n");
    write(dir.path(), "b.py", "x = (\n");
    let model = analyze_project(dir.path(), None, &ApiDictionary::seed(), 1).unwrap();
    assert_eq!(model.coupling, Coupling::Unknown);
    assert_eq!(model.skipped.len(), 1);
    assert_eq!(model.skipped[0].path, "b.py");
    assert!(analyze_project(dir.path(), Some(0), &ApiDictionary::seed(), 1).is_err());
}
