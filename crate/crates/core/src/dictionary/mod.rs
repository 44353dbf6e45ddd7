//! API-name → stage dictionary and label-agreement auditing.
//!
//! Lookup precedence: exact name, then the longest dotted root prefix, then
//! the final method segment. Names that pass through a call or subscript
//! (`pandas.read_csv().dropna`) have an unknown receiver and are matched by
//! method segment only.

mod kappa;

use std::collections::{HashMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::frontend::CallEvent;
use crate::taxonomy::Stage;

pub use kappa::{cohens_kappa, interpret_kappa, AgreementReport};

const SEED_JSON: &str = include_str!("seed.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatchKind {
    Exact,
    RootPrefix,
    MethodSuffix,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DictEntry {
    pub pattern: String,
    #[serde(rename = "match")]
    pub match_kind: MatchKind,
    pub stage: Stage,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone)]
pub struct ApiDictionary {
    pub version: u32,
    pub entries: Vec<DictEntry>,
    exact: HashMap<String, Stage>,
    prefix: HashMap<String, Stage>,
    suffix: HashMap<String, Stage>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEntry {
    pattern: String,
    #[serde(rename = "match")]
    match_kind: MatchKind,
    stage: String,
    #[serde(default)]
    note: Option<String>,
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_alphabetic() || c == '_')
        && chars.all(|c| c.is_alphanumeric() || c == '_')
}

fn schema(entry: Option<usize>, message: impl Into<String>) -> Error {
    Error::DictionarySchema {
        entry,
        message: message.into(),
    }
}

impl ApiDictionary {
    pub fn from_entries(version: u32, entries: Vec<DictEntry>) -> Result<ApiDictionary> {
        if version != 1 {
            return Err(schema(None, format!("unsupported version {version}")));
        }
        let mut seen = HashSet::new();
        let mut exact = HashMap::new();
        let mut prefix = HashMap::new();
        let mut suffix = HashMap::new();
        for (i, e) in entries.iter().enumerate() {
            let valid = match e.match_kind {
                MatchKind::MethodSuffix => is_identifier(&e.pattern),
                MatchKind::Exact | MatchKind::RootPrefix => e.pattern.split('.').all(is_identifier),
            };
            if !valid {
                return Err(schema(Some(i), format!("invalid pattern '{}'", e.pattern)));
            }
            if !seen.insert((e.pattern.as_str(), e.match_kind)) {
                return Err(schema(
                    Some(i),
                    format!("duplicate pattern '{}' for this match kind", e.pattern),
                ));
            }
            let table = match e.match_kind {
                MatchKind::Exact => &mut exact,
                MatchKind::RootPrefix => &mut prefix,
                MatchKind::MethodSuffix => &mut suffix,
            };
            table.insert(e.pattern.clone(), e.stage);
        }
        Ok(ApiDictionary {
            version,
            entries,
            exact,
            prefix,
            suffix,
        })
    }

    pub fn from_json(text: &str) -> Result<ApiDictionary> {
        let doc: Value = serde_json::from_str(text).map_err(|e| schema(None, e.to_string()))?;
        let obj = doc
            .as_object()
            .ok_or_else(|| schema(None, "top level must be an object"))?;
        let version = obj
            .get("version")
            .and_then(Value::as_u64)
            .ok_or_else(|| schema(None, "missing integer 'version'"))?;
        let raw_entries = obj
            .get("entries")
            .and_then(Value::as_array)
            .ok_or_else(|| schema(None, "missing array 'entries'"))?;
        let mut entries = Vec::with_capacity(raw_entries.len());
        for (i, v) in raw_entries.iter().enumerate() {
            let raw: RawEntry =
                serde_json::from_value(v.clone()).map_err(|e| schema(Some(i), e.to_string()))?;
            let stage = Stage::from_code(&raw.stage)
                .map_err(|_| schema(Some(i), format!("unknown stage code '{}'", raw.stage)))?;
            entries.push(DictEntry {
                pattern: raw.pattern,
                match_kind: raw.match_kind,
                stage,
                note: raw.note,
            });
        }
        let version = u32::try_from(version).map_err(|_| schema(None, "version out of range"))?;
        ApiDictionary::from_entries(version, entries)
    }

    /// The embedded seed dictionary.
    pub fn seed() -> ApiDictionary {
        ApiDictionary::from_json(SEED_JSON).expect("embedded seed dictionary is valid")
    }

    pub fn seed_json() -> &'static str {
        SEED_JSON
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Doc<'a> {
            version: u32,
            entries: &'a [DictEntry],
        }
        serde_json::to_string_pretty(&Doc {
            version: self.version,
            entries: &self.entries,
        })
        .expect("dictionary serializes")
    }

    /// Stage for a resolved name and its method segment; `None` is no match.
    pub fn lookup_name(&self, resolved_name: &str, method_name: &str) -> Option<Stage> {
        let static_chain = !resolved_name.contains(['(', '[', '<']);
        if static_chain {
            if let Some(&s) = self.exact.get(resolved_name) {
                return Some(s);
            }
            let mut end = resolved_name.len();
            loop {
                if let Some(&s) = self.prefix.get(&resolved_name[..end]) {
                    return Some(s);
                }
                match resolved_name[..end].rfind('.') {
                    Some(i) => end = i,
                    None => break,
                }
            }
        }
        self.suffix.get(method_name).copied()
    }

    pub fn lookup(&self, event: &CallEvent) -> Option<Stage> {
        self.lookup_name(&event.resolved_name, &event.method_name)
    }
}

/// Reads and validates a dictionary file.
pub fn load_dictionary(path: impl AsRef<Path>) -> Result<ApiDictionary> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    ApiDictionary::from_json(&text)
}

/// Seed patterns deliberately mapped to GEN: recognised calls that perform no
/// pipeline stage. Reconstructed, not exhaustive.
pub const GENERIC_APIS: &[&str] = &[
    "print",
    "len",
    "range",
    "enumerate",
    "zip",
    "list",
    "dict",
    "str",
    "int",
    "float",
    "bool",
    "set",
    "tuple",
    "type",
    "sorted",
    "sum",
    "max",
    "min",
    "abs",
    "round",
    "map",
    "filter",
    "isinstance",
    "hasattr",
    "getattr",
    "setattr",
    "super",
    "iter",
    "next",
    "any",
    "all",
    "reversed",
    "repr",
    "format",
    "input",
    "display",
    "tqdm",
    "time.time",
    "gc.collect",
    "os.path.join",
    "tensorflow.Session",
    "tensorflow.compat.v1.Session",
    "tensorflow.InteractiveSession",
    "tensorflow.global_variables_initializer",
    "tensorflow.local_variables_initializer",
    "tensorflow.app.run",
    "tensorflow.reset_default_graph",
    "tensorflow.get_variable",
    "tensorflow.variable_scope",
    "tensorflow.name_scope",
    "tensorflow.device",
    "tensorflow.placeholder",
    "torch.no_grad",
    "torch.device",
    "torch.cuda.is_available",
    "eval",
    "exec",
    "compile",
    "vars",
    "dir",
    "help",
    "id",
    "hash",
    "callable",
    "divmod",
    "pow",
    "chr",
    "ord",
    "object",
    "property",
    "staticmethod",
    "classmethod",
    "slice",
    "frozenset",
    "bytes",
    "bytearray",
    "locals",
    "globals",
    "issubclass",
    "complex",
    "Exception",
    "ValueError",
    "TypeError",
    "KeyError",
    "RuntimeError",
    "NotImplementedError",
    "AssertionError",
    "os",
    "sys",
    "time",
    "datetime",
    "gc",
    "logging",
    "tqdm",
    "argparse",
    "json",
    "pickle",
    "joblib",
    "shutil",
    "copy",
    "collections",
    "itertools",
    "functools",
    "math",
    "string",
    "IPython",
    "tensorflow.flags",
    "tensorflow.app.flags",
    "tensorflow.compat.v1.flags",
    "absl",
    "torch.cuda",
    "subprocess",
    "pathlib",
    "typing",
    "warnings.warn",
    "summary",
    "append",
    "extend",
    "format",
    "keys",
    "items",
    "values",
    "get",
    "join",
    "close",
    "count_params",
    "get_layer",
    "get_config",
    "to",
    "cuda",
    "cpu",
    "item",
    "numpy",
    "tolist",
    "startswith",
    "endswith",
    "exists",
    "makedirs",
    "mkdir",
];
