use std::fmt::Write;
use std::hint::black_box;
use std::path::Path;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use dspipe_core::corpus::{analyze_corpus, CorpusOptions};
use dspipe_core::dictionary::ApiDictionary;
use dspipe_core::par;

const CALLS: &[&str] = &[
    "pd.read_csv('train.csv')",
    "df.fillna(0)",
    "scaler.fit_transform(X)",
    "RandomForestClassifier(n_estimators=10)",
    "model.fit(X, y)",
    "model.predict(X_test)",
    "accuracy_score(y, p)",
    "plt.plot(h)",
    "print(df.shape)",
];

fn synthetic_file(seed: usize, lines: usize) -> String {
    let mut out = String::from("import pandas as pd\nimport matplotlib.pyplot as plt\n");
    for i in 0..lines {
        let call = CALLS[(seed * 7 + i * 13 + i / 5) % CALLS.len()];
        if i % 40 == 0 {
            writeln!(out, "for k in range(3):\n    v{i} = {call}").unwrap();
        } else {
            writeln!(out, "v{i} = {call}").unwrap();
        }
    }
    out
}

fn build_corpus(root: &Path, files: usize, lines: usize) {
    for f in 0..files {
        std::fs::write(root.join(format!("f{f:03}.py")), synthetic_file(f, lines)).unwrap();
    }
}

fn corpus(c: &mut Criterion) {
    let dir = tempfile::tempdir().unwrap();
    build_corpus(dir.path(), 48, 500);
    let dict = ApiDictionary::seed();

    let mut group = c.benchmark_group("analyze_corpus");
    group.sample_size(10);
    let mut modes = vec![("sequential", 1)];
    if par::is_parallel_available() {
        modes.push(("parallel", 4));
    }
    for (name, jobs) in modes {
        let opts = CorpusOptions {
            jobs,
            ..CorpusOptions::default()
        };
        group.bench_with_input(BenchmarkId::from_parameter(name), &opts, |b, opts| {
            b.iter(|| black_box(analyze_corpus(dir.path(), &dict, opts).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, corpus);
criterion_main!(benches);
