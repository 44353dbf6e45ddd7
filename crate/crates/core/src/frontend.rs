//! Source loading, call extraction and syntax-tree metrics.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use dspipe_pyast::ast::{CmpOp, Constant, Expr, ExprKind, Stmt, StmtKind};
use dspipe_pyast::{parse_module, walk_body, Visitor};
use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SourceKind {
    Script,
    Notebook,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CellKind {
    Code,
    Markdown,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cell {
    /// Position in the notebook's `cells` array.
    pub index: usize,
    pub kind: CellKind,
    pub text: String,
    pub headings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SourceUnit {
    pub path: PathBuf,
    pub kind: SourceKind,
    pub cells: Vec<Cell>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CallEvent {
    pub raw_name: String,
    pub resolved_name: String,
    pub method_name: String,
    pub line: u32,
    pub cell_index: usize,
    pub order_index: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AstMetrics {
    pub total_nodes: usize,
    pub control_nodes: usize,
    pub linearity_ratio: f64,
}

/// A cell that could not be parsed and was left out of the analysis.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub cell_index: usize,
    pub message: String,
}

impl SourceUnit {
    pub fn script(path: impl Into<PathBuf>, text: impl Into<String>) -> SourceUnit {
        SourceUnit {
            path: path.into(),
            kind: SourceKind::Script,
            cells: vec![Cell {
                index: 0,
                kind: CellKind::Code,
                text: text.into(),
                headings: Vec::new(),
            }],
        }
    }

    /// Builds a unit from nbformat-4 JSON text. Raw cells are skipped.
    pub fn notebook(path: impl Into<PathBuf>, json: &str) -> Result<SourceUnit> {
        let path = path.into();
        let bad = |json_path: String, message: &str| Error::MalformedNotebook {
            path: path.clone(),
            json_path,
            message: message.to_string(),
        };
        let root: Value =
            serde_json::from_str(json).map_err(|e| bad("$".into(), &e.to_string()))?;
        let obj = root
            .as_object()
            .ok_or_else(|| bad("$".into(), "expected an object"))?;
        if let Some(v) = obj.get("nbformat") {
            if v.as_u64() != Some(4) {
                return Err(bad("$.nbformat".into(), "only nbformat 4 is supported"));
            }
        }
        let cells = obj
            .get("cells")
            .ok_or_else(|| bad("$.cells".into(), "missing"))?
            .as_array()
            .ok_or_else(|| bad("$.cells".into(), "expected an array"))?;
        let mut out = Vec::with_capacity(cells.len());
        for (i, cell) in cells.iter().enumerate() {
            let at = format!("$.cells[{i}]");
            let cell = cell
                .as_object()
                .ok_or_else(|| bad(at.clone(), "expected an object"))?;
            let kind = match cell.get("cell_type").and_then(Value::as_str) {
                Some("code") => Some(CellKind::Code),
                Some("markdown") => Some(CellKind::Markdown),
                Some("raw") => None,
                Some(_) => return Err(bad(format!("{at}.cell_type"), "unknown cell type")),
                None => return Err(bad(format!("{at}.cell_type"), "expected a string")),
            };
            let text = match cell.get("source") {
                Some(Value::String(s)) => s.clone(),
                Some(Value::Array(parts)) => {
                    let mut s = String::new();
                    for (j, p) in parts.iter().enumerate() {
                        s.push_str(p.as_str().ok_or_else(|| {
                            bad(format!("{at}.source[{j}]"), "expected a string")
                        })?);
                    }
                    s
                }
                Some(_) => return Err(bad(format!("{at}.source"), "expected a string or array")),
                None => return Err(bad(format!("{at}.source"), "missing")),
            };
            let Some(kind) = kind else { continue };
            let headings = match kind {
                CellKind::Markdown => markdown_headings(&text),
                CellKind::Code => Vec::new(),
            };
            out.push(Cell {
                index: i,
                kind,
                text,
                headings,
            });
        }
        Ok(SourceUnit {
            path,
            kind: SourceKind::Notebook,
            cells: out,
        })
    }
}

/// Reads a script or (by `.ipynb` extension) a notebook.
pub fn load_source(path: impl AsRef<Path>) -> Result<SourceUnit> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    if is_notebook(path) {
        SourceUnit::notebook(path, &text)
    } else {
        Ok(SourceUnit::script(path, text))
    }
}

pub fn is_notebook(path: &Path) -> bool {
    path.extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("ipynb"))
}

/// Heading lines of a markdown cell, markup removed. Fenced code is ignored.
pub fn markdown_headings(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut fence: Option<&str> = None;
    for line in text.lines() {
        let t = line.trim_start();
        for marker in ["```", "~~~"] {
            if t.starts_with(marker) {
                fence = match fence {
                    None => Some(marker),
                    Some(m) if m == marker => None,
                    other => other,
                };
            }
        }
        if fence.is_some() || !t.starts_with('#') {
            continue;
        }
        let heading = strip_markup(t.trim_start_matches('#'));
        if !heading.is_empty() {
            out.push(heading);
        }
    }
    out
}

fn strip_markup(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        match chars[i] {
            '<' => {
                // Inline HTML such as <a id="x"></a> carries no heading text.
                match chars[i..].iter().position(|&c| c == '>') {
                    Some(end) => i += end + 1,
                    None => {
                        out.push('<');
                        i += 1;
                    }
                }
            }
            '[' => {
                // [text](url) keeps only the text.
                let close = chars[i..].iter().position(|&c| c == ']').map(|p| p + i);
                match close {
                    Some(c) if chars.get(c + 1) == Some(&'(') => {
                        out.extend(&chars[i + 1..c]);
                        let paren = chars[c..].iter().position(|&ch| ch == ')');
                        i = paren.map_or(chars.len(), |p| c + p + 1);
                    }
                    _ => {
                        out.push('[');
                        i += 1;
                    }
                }
            }
            '_' if i > 0
                && chars[i - 1].is_alphanumeric()
                && chars.get(i + 1).is_some_and(|c| c.is_alphanumeric()) =>
            {
                out.push('_');
                i += 1;
            }
            '*' | '_' | '`' => i += 1,
            c => {
                out.push(c);
                i += 1;
            }
        }
    }
    let trimmed = out.trim().trim_end_matches('#').trim();
    trimmed.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// `(cell_index, heading)` for every heading, in document order.
pub fn extract_headings(unit: &SourceUnit) -> Vec<(usize, String)> {
    unit.cells
        .iter()
        .flat_map(|c| c.headings.iter().map(move |h| (c.index, h.clone())))
        .collect()
}

/// Blanks notebook magic and shell lines so line numbers are preserved.
fn strip_magics(text: &str) -> String {
    text.lines()
        .map(|l| {
            let t = l.trim_start();
            if t.starts_with('%') || t.starts_with('!') {
                ""
            } else {
                l
            }
        })
        .collect::<Vec<_>>()
        .join("\n")
}

/// Parsed code cells of one unit.
#[derive(Debug, Clone)]
pub struct ParsedUnit {
    pub cells: Vec<(usize, Vec<Stmt>)>,
    pub diagnostics: Vec<Diagnostic>,
}

/// Parses every code cell. A notebook cell that fails to parse is skipped
/// with a diagnostic; a script that fails to parse is an error.
pub fn parse_unit(unit: &SourceUnit) -> Result<ParsedUnit> {
    let mut parsed = ParsedUnit {
        cells: Vec::new(),
        diagnostics: Vec::new(),
    };
    for cell in unit.cells.iter().filter(|c| c.kind == CellKind::Code) {
        let result = match unit.kind {
            SourceKind::Script => parse_module(&cell.text),
            SourceKind::Notebook => parse_module(&strip_magics(&cell.text)),
        };
        match result {
            Ok(body) => parsed.cells.push((cell.index, body)),
            Err(source) if unit.kind == SourceKind::Script => {
                return Err(Error::Syntax {
                    path: unit.path.clone(),
                    source,
                })
            }
            Err(e) => parsed.diagnostics.push(Diagnostic {
                cell_index: cell.index,
                message: e.to_string(),
            }),
        }
    }
    Ok(parsed)
}

/// Import-alias environment: local name → qualified target.
#[derive(Debug, Clone, Default)]
pub struct AliasEnv {
    bindings: HashMap<String, String>,
}

impl AliasEnv {
    pub fn bind(&mut self, local: &str, target: String) {
        self.bindings.insert(local.to_string(), target);
    }

    /// Substitutes the root segment when it is bound.
    pub fn resolve(&self, name: &str) -> String {
        let (root, rest) = match name.find('.') {
            Some(i) => (&name[..i], &name[i..]),
            None => (name, ""),
        };
        match self.bindings.get(root) {
            Some(target) => format!("{target}{rest}"),
            None => name.to_string(),
        }
    }

    fn apply(&mut self, stmt: &Stmt) {
        match &stmt.kind {
            StmtKind::Import(names) => {
                for a in names {
                    match &a.asname {
                        Some(alias) => self.bind(alias, a.name.clone()),
                        None => {
                            let root = a.name.split('.').next().unwrap_or(&a.name);
                            self.bind(root, root.to_string());
                        }
                    }
                }
            }
            StmtKind::ImportFrom {
                module,
                names,
                level,
            } => {
                let mut base = ".".repeat(*level as usize);
                if let Some(m) = module {
                    base.push_str(m);
                }
                for a in names.iter().filter(|a| a.name != "*") {
                    let target = if base.ends_with('.') {
                        format!("{base}{}", a.name)
                    } else {
                        format!("{base}.{}", a.name)
                    };
                    self.bind(a.asname.as_deref().unwrap_or(&a.name), target);
                }
            }
            _ => {}
        }
    }
}

/// Rendering of a callee as an attribute chain, or `None` when the callee
/// is itself a call or subscript (`Dense(10)(x)`, `fns[0]()`).
pub fn callee_name(func: &Expr) -> Option<String> {
    match &func.kind {
        ExprKind::Name(id) => Some(id.clone()),
        ExprKind::Attribute { value, attr } => Some(format!("{}.{attr}", receiver_name(value))),
        _ => None,
    }
}

fn receiver_name(e: &Expr) -> String {
    match &e.kind {
        ExprKind::Name(id) => id.clone(),
        ExprKind::Attribute { value, attr } => format!("{}.{attr}", receiver_name(value)),
        ExprKind::Call { func, .. } => format!("{}()", receiver_name(func)),
        ExprKind::Subscript { value, .. } => format!("{}[]", receiver_name(value)),
        _ => "<expr>".to_string(),
    }
}

struct CallCollector<'a> {
    env: &'a mut AliasEnv,
    cell_index: usize,
    out: &'a mut Vec<CallEvent>,
}

impl Visitor for CallCollector<'_> {
    fn visit_stmt(&mut self, stmt: &Stmt) {
        self.env.apply(stmt);
    }

    fn visit_expr(&mut self, expr: &Expr) {
        let ExprKind::Call { func, .. } = &expr.kind else {
            return;
        };
        let Some(raw_name) = callee_name(func) else {
            return;
        };
        let resolved_name = if raw_name.starts_with("<expr>") {
            raw_name.clone()
        } else {
            self.env.resolve(&raw_name)
        };
        let method_name = raw_name.rsplit('.').next().unwrap_or(&raw_name).to_string();
        let order_index = self.out.len();
        self.out.push(CallEvent {
            raw_name,
            resolved_name,
            method_name,
            line: expr.loc.line,
            cell_index: self.cell_index,
            order_index,
        });
    }
}

impl ParsedUnit {
    /// Calls in evaluation order; the alias environment spans all cells.
    pub fn calls(&self) -> Vec<CallEvent> {
        let mut env = AliasEnv::default();
        let mut out = Vec::new();
        for (cell_index, body) in &self.cells {
            let mut c = CallCollector {
                env: &mut env,
                cell_index: *cell_index,
                out: &mut out,
            };
            walk_body(&mut c, body);
        }
        out
    }

    pub fn metrics(&self) -> AstMetrics {
        let mut m = MetricsCounter::default();
        for (_, body) in &self.cells {
            walk_body(&mut m, body);
        }
        let linearity_ratio = if m.total == 0 {
            0.0
        } else {
            m.control as f64 / m.total as f64
        };
        AstMetrics {
            total_nodes: m.total,
            control_nodes: m.control,
            linearity_ratio,
        }
    }

    /// Whether any cell has a top-level `if __name__ == "__main__":`.
    pub fn has_main_guard(&self) -> bool {
        self.cells
            .iter()
            .flat_map(|(_, body)| body)
            .any(|s| matches!(&s.kind, StmtKind::If { test, .. } if is_main_test(test)))
    }
}

fn is_main_test(test: &Expr) -> bool {
    let ExprKind::Compare {
        left,
        ops,
        comparators,
    } = &test.kind
    else {
        return false;
    };
    if ops.as_slice() != [CmpOp::Eq] || comparators.len() != 1 {
        return false;
    }
    let is_name = |e: &Expr| matches!(&e.kind, ExprKind::Name(n) if n == "__name__");
    let is_main =
        |e: &Expr| matches!(&e.kind, ExprKind::Constant(Constant::Str(s)) if s == "__main__");
    (is_name(left) && is_main(&comparators[0])) || (is_main(left) && is_name(&comparators[0]))
}

#[derive(Default)]
struct MetricsCounter {
    total: usize,
    control: usize,
}

impl Visitor for MetricsCounter {
    fn visit_stmt(&mut self, stmt: &Stmt) {
        self.total += 1;
        if matches!(
            stmt.kind,
            StmtKind::If { .. } | StmtKind::For { .. } | StmtKind::While { .. }
        ) {
            self.control += 1;
        }
    }

    fn visit_expr(&mut self, expr: &Expr) {
        self.total += 1;
        if matches!(expr.kind, ExprKind::IfExp { .. }) {
            self.control += 1;
        }
    }
}

/// Call events plus the cells that were skipped.
#[derive(Debug, Clone)]
pub struct Extraction {
    pub calls: Vec<CallEvent>,
    pub diagnostics: Vec<Diagnostic>,
}

pub fn extract_calls(unit: &SourceUnit) -> Result<Extraction> {
    let parsed = parse_unit(unit)?;
    Ok(Extraction {
        calls: parsed.calls(),
        diagnostics: parsed.diagnostics,
    })
}

pub fn ast_metrics(unit: &SourceUnit) -> Result<AstMetrics> {
    Ok(parse_unit(unit)?.metrics())
}
