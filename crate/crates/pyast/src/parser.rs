//! Recursive-descent parser for Python 3 source.
//!
//! Covers the statement and expression grammar up to 3.11 (including
//! `match`, walrus, positional-only parameters, `except*`), and f-strings
//! with the pre-3.12 quoting rules.

use crate::ast::*;
use crate::error::ParseError;
use crate::lexer::{tokenize, tokenize_from_line, StrTok, Tok, Token};

type PResult<T> = Result<T, ParseError>;

const HARD_KEYWORDS: [&str; 35] = [
    "False", "None", "True", "and", "as", "assert", "async", "await", "break", "class", "continue",
    "def", "del", "elif", "else", "except", "finally", "for", "from", "global", "if", "import",
    "in", "is", "lambda", "nonlocal", "not", "or", "pass", "raise", "return", "try", "while",
    "with", "yield",
];

const AUG_OPS: [(&str, BinOp); 13] = [
    ("+=", BinOp::Add),
    ("-=", BinOp::Sub),
    ("*=", BinOp::Mult),
    ("@=", BinOp::MatMult),
    ("/=", BinOp::Div),
    ("%=", BinOp::Mod),
    ("&=", BinOp::BitAnd),
    ("|=", BinOp::BitOr),
    ("^=", BinOp::BitXor),
    ("<<=", BinOp::LShift),
    (">>=", BinOp::RShift),
    ("**=", BinOp::Pow),
    ("//=", BinOp::FloorDiv),
];

/// Binary operator levels from loosest to tightest binding.
const BIN_LEVELS: [&[(&str, BinOp)]; 6] = [
    &[("|", BinOp::BitOr)],
    &[("^", BinOp::BitXor)],
    &[("&", BinOp::BitAnd)],
    &[("<<", BinOp::LShift), (">>", BinOp::RShift)],
    &[("+", BinOp::Add), ("-", BinOp::Sub)],
    &[
        ("*", BinOp::Mult),
        ("/", BinOp::Div),
        ("//", BinOp::FloorDiv),
        ("%", BinOp::Mod),
        ("@", BinOp::MatMult),
    ],
];

/// Maximum bracket/expression nesting accepted before giving up.
pub const MAX_NESTING: u32 = 100;

fn is_hard_keyword(s: &str) -> bool {
    HARD_KEYWORDS.contains(&s)
}

/// Parse a module into its statement list.
pub fn parse_module(src: &str) -> PResult<Vec<Stmt>> {
    let tokens = tokenize(src)?;
    let mut p = Parser::new(tokens);
    p.module()
}

/// Parse a single expression (the whole input must be one expression).
pub fn parse_expression(src: &str) -> PResult<Expr> {
    let wrapped = format!("({src}\n)");
    let tokens = tokenize(&wrapped)?;
    let mut p = Parser::new(tokens);
    let e = p.expression()?;
    p.skip_newlines();
    p.expect_end()?;
    Ok(e)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    nesting: u32,
}

impl Parser {
    fn new(tokens: Vec<Token>) -> Self {
        Parser {
            tokens,
            pos: 0,
            nesting: 0,
        }
    }

    // ---- token helpers -------------------------------------------------

    fn tok(&self) -> &Tok {
        self.tok_at(0)
    }

    fn tok_at(&self, off: usize) -> &Tok {
        let i = (self.pos + off).min(self.tokens.len() - 1);
        &self.tokens[i].tok
    }

    fn loc(&self) -> Loc {
        self.tokens[self.pos.min(self.tokens.len() - 1)].loc
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos.min(self.tokens.len() - 1)].clone();
        if self.pos < self.tokens.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn is_op(&self, op: &str) -> bool {
        matches!(self.tok(), Tok::Op(o) if *o == op)
    }

    fn is_op_at(&self, off: usize, op: &str) -> bool {
        matches!(self.tok_at(off), Tok::Op(o) if *o == op)
    }

    fn eat_op(&mut self, op: &str) -> bool {
        if self.is_op(op) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_op(&mut self, op: &str) -> PResult<()> {
        if self.eat_op(op) {
            Ok(())
        } else {
            self.error(format!("expected '{op}'"))
        }
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.tok(), Tok::Name(n) if n == kw)
    }

    fn is_kw_at(&self, off: usize, kw: &str) -> bool {
        matches!(self.tok_at(off), Tok::Name(n) if n == kw)
    }

    fn eat_kw(&mut self, kw: &str) -> bool {
        if self.is_kw(kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_kw(&mut self, kw: &str) -> PResult<()> {
        if self.eat_kw(kw) {
            Ok(())
        } else {
            self.error(format!("expected '{kw}'"))
        }
    }

    fn expect_name(&mut self) -> PResult<String> {
        match self.tok() {
            Tok::Name(n) if !is_hard_keyword(n) => {
                let n = n.clone();
                self.bump();
                Ok(n)
            }
            _ => self.error("expected a name"),
        }
    }

    fn expect_newline(&mut self) -> PResult<()> {
        match self.tok() {
            Tok::Newline => {
                self.bump();
                Ok(())
            }
            Tok::EndMarker => Ok(()),
            _ => self.error("invalid syntax"),
        }
    }

    fn skip_newlines(&mut self) {
        while matches!(self.tok(), Tok::Newline) {
            self.bump();
        }
    }

    fn expect_end(&mut self) -> PResult<()> {
        if matches!(self.tok(), Tok::EndMarker) {
            Ok(())
        } else {
            self.error("unexpected trailing input")
        }
    }

    fn error<T>(&self, msg: impl Into<String>) -> PResult<T> {
        let msg = msg.into();
        let found = match self.tok() {
            Tok::Name(n) => format!("name '{n}'"),
            Tok::Number(n) => format!("number {n}"),
            Tok::Str(_) => "string".to_string(),
            Tok::Op(o) => format!("'{o}'"),
            Tok::Newline => "newline".to_string(),
            Tok::Indent => "indent".to_string(),
            Tok::Dedent => "dedent".to_string(),
            Tok::EndMarker => "end of input".to_string(),
        };
        Err(ParseError::new(self.loc(), format!("{msg}, found {found}")))
    }

    fn enter(&mut self) -> PResult<()> {
        self.nesting += 1;
        if self.nesting > MAX_NESTING {
            return Err(ParseError::new(self.loc(), "too many nested expressions"));
        }
        Ok(())
    }

    fn leave(&mut self) {
        self.nesting -= 1;
    }

    /// Whether the current token can begin an expression.
    fn starts_expr(&self) -> bool {
        match self.tok() {
            Tok::Name(n) => {
                !is_hard_keyword(n)
                    || matches!(
                        n.as_str(),
                        "not" | "lambda" | "await" | "None" | "True" | "False" | "yield"
                    )
            }
            Tok::Number(_) | Tok::Str(_) => true,
            Tok::Op(o) => matches!(*o, "(" | "[" | "{" | "-" | "+" | "~" | "*" | "..."),
            _ => false,
        }
    }

    // ---- statements ----------------------------------------------------

    fn module(&mut self) -> PResult<Vec<Stmt>> {
        let mut body = Vec::new();
        loop {
            match self.tok() {
                Tok::EndMarker => break,
                Tok::Newline => {
                    self.bump();
                }
                _ => body.extend(self.statement()?),
            }
        }
        Ok(body)
    }

    fn statement(&mut self) -> PResult<Vec<Stmt>> {
        self.enter()?;
        let r = self.statement_inner();
        self.leave();
        r
    }

    fn statement_inner(&mut self) -> PResult<Vec<Stmt>> {
        if self.is_op("@") {
            return Ok(vec![self.decorated()?]);
        }
        if matches!(self.tok(), Tok::Indent) {
            return self.error("unexpected indent");
        }
        let kw = match self.tok() {
            Tok::Name(n) => n.clone(),
            _ => return self.simple_statements(),
        };
        let stmt = match kw.as_str() {
            "def" => self.funcdef(Vec::new(), false, self.loc())?,
            "class" => self.classdef(Vec::new(), self.loc())?,
            "if" => self.if_stmt()?,
            "while" => self.while_stmt()?,
            "for" => self.for_stmt(false, self.loc())?,
            "try" => self.try_stmt()?,
            "with" => self.with_stmt(false, self.loc())?,
            "async" => self.async_stmt(Vec::new())?,
            "match" => match self.try_match_stmt()? {
                Some(s) => s,
                None => return self.simple_statements(),
            },
            _ => return self.simple_statements(),
        };
        Ok(vec![stmt])
    }

    fn block(&mut self) -> PResult<Vec<Stmt>> {
        self.expect_op(":")?;
        if matches!(self.tok(), Tok::Newline) {
            self.bump();
            if !matches!(self.tok(), Tok::Indent) {
                return self.error("expected an indented block");
            }
            self.bump();
            let mut body = Vec::new();
            loop {
                match self.tok() {
                    Tok::Dedent => {
                        self.bump();
                        break;
                    }
                    Tok::EndMarker => break,
                    Tok::Newline => {
                        self.bump();
                    }
                    _ => body.extend(self.statement()?),
                }
            }
            Ok(body)
        } else {
            self.simple_statements()
        }
    }

    fn simple_statements(&mut self) -> PResult<Vec<Stmt>> {
        let mut out = vec![self.simple_statement()?];
        while self.eat_op(";") {
            if matches!(self.tok(), Tok::Newline | Tok::EndMarker) {
                break;
            }
            out.push(self.simple_statement()?);
        }
        self.expect_newline()?;
        Ok(out)
    }

    fn at_simple_end(&self) -> bool {
        matches!(self.tok(), Tok::Newline | Tok::EndMarker) || self.is_op(";")
    }

    fn simple_statement(&mut self) -> PResult<Stmt> {
        let loc = self.loc();
        let kw = match self.tok() {
            Tok::Name(n) => n.clone(),
            _ => String::new(),
        };
        let kind = match kw.as_str() {
            "pass" => {
                self.bump();
                StmtKind::Pass
            }
            "break" => {
                self.bump();
                StmtKind::Break
            }
            "continue" => {
                self.bump();
                StmtKind::Continue
            }
            "return" => {
                self.bump();
                if self.at_simple_end() {
                    StmtKind::Return(None)
                } else {
                    StmtKind::Return(Some(self.star_expressions()?))
                }
            }
            "raise" => {
                self.bump();
                if self.at_simple_end() {
                    StmtKind::Raise {
                        exc: None,
                        cause: None,
                    }
                } else {
                    let exc = self.expression()?;
                    let cause = if self.eat_kw("from") {
                        Some(self.expression()?)
                    } else {
                        None
                    };
                    StmtKind::Raise {
                        exc: Some(exc),
                        cause,
                    }
                }
            }
            "global" | "nonlocal" => {
                self.bump();
                let mut names = vec![self.expect_name()?];
                while self.eat_op(",") {
                    names.push(self.expect_name()?);
                }
                if kw == "global" {
                    StmtKind::Global(names)
                } else {
                    StmtKind::Nonlocal(names)
                }
            }
            "del" => {
                self.bump();
                let mut targets = vec![self.target_expr()?];
                while self.eat_op(",") {
                    if self.at_simple_end() {
                        break;
                    }
                    targets.push(self.target_expr()?);
                }
                StmtKind::Delete(targets)
            }
            "assert" => {
                self.bump();
                let test = self.expression()?;
                let msg = if self.eat_op(",") {
                    Some(self.expression()?)
                } else {
                    None
                };
                StmtKind::Assert { test, msg }
            }
            "import" => {
                self.bump();
                let mut names = vec![self.dotted_as_name()?];
                while self.eat_op(",") {
                    names.push(self.dotted_as_name()?);
                }
                StmtKind::Import(names)
            }
            "from" => self.import_from()?,
            _ => return self.expression_statement(),
        };
        Ok(Stmt { loc, kind })
    }

    fn dotted_name(&mut self) -> PResult<String> {
        let mut name = self.expect_name()?;
        while self.eat_op(".") {
            name.push('.');
            name.push_str(&self.expect_name()?);
        }
        Ok(name)
    }

    fn dotted_as_name(&mut self) -> PResult<Alias> {
        let name = self.dotted_name()?;
        let asname = if self.eat_kw("as") {
            Some(self.expect_name()?)
        } else {
            None
        };
        Ok(Alias { name, asname })
    }

    fn import_from(&mut self) -> PResult<StmtKind> {
        self.expect_kw("from")?;
        let mut level = 0;
        loop {
            if self.eat_op(".") {
                level += 1;
            } else if self.eat_op("...") {
                level += 3;
            } else {
                break;
            }
        }
        let module = if self.is_kw("import") {
            None
        } else {
            Some(self.dotted_name()?)
        };
        if module.is_none() && level == 0 {
            return self.error("expected module name");
        }
        self.expect_kw("import")?;
        let mut names = Vec::new();
        if self.eat_op("*") {
            names.push(Alias {
                name: "*".into(),
                asname: None,
            });
        } else {
            let parens = self.eat_op("(");
            loop {
                let name = self.expect_name()?;
                let asname = if self.eat_kw("as") {
                    Some(self.expect_name()?)
                } else {
                    None
                };
                names.push(Alias { name, asname });
                if !self.eat_op(",") {
                    break;
                }
                if parens && self.is_op(")") {
                    break;
                }
            }
            if parens {
                self.expect_op(")")?;
            }
        }
        Ok(StmtKind::ImportFrom {
            module,
            names,
            level,
        })
    }

    fn expression_statement(&mut self) -> PResult<Stmt> {
        let loc = self.loc();
        let first = if self.is_kw("yield") {
            self.yield_expr()?
        } else {
            self.star_expressions()?
        };
        if self.is_op("=") {
            let mut targets = vec![first];
            let value = loop {
                self.expect_op("=")?;
                let v = if self.is_kw("yield") {
                    self.yield_expr()?
                } else {
                    self.star_expressions()?
                };
                if self.is_op("=") {
                    targets.push(v);
                } else {
                    break v;
                }
            };
            return Ok(Stmt {
                loc,
                kind: StmtKind::Assign { targets, value },
            });
        }
        if let Some(&(_, op)) = AUG_OPS.iter().find(|(s, _)| self.is_op(s)) {
            self.bump();
            let value = if self.is_kw("yield") {
                self.yield_expr()?
            } else {
                self.star_expressions()?
            };
            return Ok(Stmt {
                loc,
                kind: StmtKind::AugAssign {
                    target: first,
                    op,
                    value,
                },
            });
        }
        if self.eat_op(":") {
            let annotation = self.expression()?;
            let value = if self.eat_op("=") {
                Some(if self.is_kw("yield") {
                    self.yield_expr()?
                } else {
                    self.star_expressions()?
                })
            } else {
                None
            };
            return Ok(Stmt {
                loc,
                kind: StmtKind::AnnAssign {
                    target: first,
                    annotation,
                    value,
                },
            });
        }
        Ok(Stmt {
            loc,
            kind: StmtKind::Expr(first),
        })
    }

    fn decorated(&mut self) -> PResult<Stmt> {
        let loc = self.loc();
        let mut decorators = Vec::new();
        while self.eat_op("@") {
            decorators.push(self.named_expression()?);
            self.expect_newline()?;
        }
        if self.is_kw("def") {
            self.funcdef(decorators, false, loc)
        } else if self.is_kw("class") {
            self.classdef(decorators, loc)
        } else if self.is_kw("async") {
            self.async_stmt(decorators)
        } else {
            self.error("expected function or class definition after decorator")
        }
    }

    fn async_stmt(&mut self, decorators: Vec<Expr>) -> PResult<Stmt> {
        let loc = self.loc();
        self.expect_kw("async")?;
        if self.is_kw("def") {
            self.funcdef(decorators, true, loc)
        } else if !decorators.is_empty() {
            self.error("expected 'def'")
        } else if self.is_kw("for") {
            self.for_stmt(true, loc)
        } else if self.is_kw("with") {
            self.with_stmt(true, loc)
        } else {
            self.error("expected 'def', 'for' or 'with' after 'async'")
        }
    }

    /// Skips a PEP 695 type-parameter list; the names carry no calls.
    fn skip_type_params(&mut self) -> PResult<()> {
        if !self.eat_op("[") {
            return Ok(());
        }
        let mut depth = 1;
        while depth > 0 {
            match self.bump().tok {
                Tok::Op("[") => depth += 1,
                Tok::Op("]") => depth -= 1,
                Tok::EndMarker => return self.error("unterminated type parameters"),
                _ => {}
            }
        }
        Ok(())
    }

    fn funcdef(&mut self, decorators: Vec<Expr>, is_async: bool, loc: Loc) -> PResult<Stmt> {
        self.expect_kw("def")?;
        let name = self.expect_name()?;
        self.skip_type_params()?;
        self.expect_op("(")?;
        let params = self.parameters(")", true)?;
        self.expect_op(")")?;
        let returns = if self.eat_op("->") {
            Some(self.expression()?)
        } else {
            None
        };
        let body = self.block()?;
        Ok(Stmt {
            loc,
            kind: StmtKind::FunctionDef {
                is_async,
                name,
                decorators,
                params: Box::new(params),
                returns,
                body,
            },
        })
    }

    fn classdef(&mut self, decorators: Vec<Expr>, loc: Loc) -> PResult<Stmt> {
        self.expect_kw("class")?;
        let name = self.expect_name()?;
        self.skip_type_params()?;
        let args = if self.eat_op("(") {
            self.call_arguments()?
        } else {
            Vec::new()
        };
        let body = self.block()?;
        Ok(Stmt {
            loc,
            kind: StmtKind::ClassDef {
                name,
                decorators,
                args,
                body,
            },
        })
    }

    fn parameters(&mut self, end: &str, annotations: bool) -> PResult<Parameters> {
        let mut params = Parameters::default();
        let mut after_star = false;
        while !self.is_op(end) {
            if self.eat_op("/") {
                params.posonly.append(&mut params.args);
            } else if self.eat_op("*") {
                after_star = true;
                if !self.is_op(",") && !self.is_op(end) {
                    let name = self.expect_name()?;
                    let annotation = self.param_annotation(annotations, true)?;
                    params.vararg = Some(Param {
                        name,
                        annotation,
                        default: None,
                    });
                }
            } else if self.eat_op("**") {
                let name = self.expect_name()?;
                let annotation = self.param_annotation(annotations, false)?;
                params.kwarg = Some(Param {
                    name,
                    annotation,
                    default: None,
                });
            } else {
                let name = self.expect_name()?;
                let annotation = self.param_annotation(annotations, false)?;
                let default = if self.eat_op("=") {
                    Some(self.expression()?)
                } else {
                    None
                };
                let p = Param {
                    name,
                    annotation,
                    default,
                };
                if after_star {
                    params.kwonly.push(p);
                } else {
                    params.args.push(p);
                }
            }
            if !self.eat_op(",") {
                break;
            }
        }
        Ok(params)
    }

    fn param_annotation(&mut self, allowed: bool, star: bool) -> PResult<Option<Expr>> {
        if allowed && self.eat_op(":") {
            if star && self.is_op("*") {
                return Ok(Some(self.star_expression()?));
            }
            Ok(Some(self.expression()?))
        } else {
            Ok(None)
        }
    }

    fn if_stmt(&mut self) -> PResult<Stmt> {
        // Also entered for `elif`, which nests as an `If` in `orelse`.
        let loc = self.loc();
        self.bump();
        let test = self.named_expression()?;
        let body = self.block()?;
        let orelse = if self.is_kw("elif") {
            vec![self.if_stmt()?]
        } else if self.eat_kw("else") {
            self.block()?
        } else {
            Vec::new()
        };
        Ok(Stmt {
            loc,
            kind: StmtKind::If { test, body, orelse },
        })
    }

    fn while_stmt(&mut self) -> PResult<Stmt> {
        let loc = self.loc();
        self.expect_kw("while")?;
        let test = self.named_expression()?;
        let body = self.block()?;
        let orelse = if self.eat_kw("else") {
            self.block()?
        } else {
            Vec::new()
        };
        Ok(Stmt {
            loc,
            kind: StmtKind::While { test, body, orelse },
        })
    }

    fn for_stmt(&mut self, is_async: bool, loc: Loc) -> PResult<Stmt> {
        self.expect_kw("for")?;
        let target = self.star_targets()?;
        self.expect_kw("in")?;
        let iter = self.star_expressions()?;
        let body = self.block()?;
        let orelse = if self.eat_kw("else") {
            self.block()?
        } else {
            Vec::new()
        };
        Ok(Stmt {
            loc,
            kind: StmtKind::For {
                is_async,
                target,
                iter,
                body,
                orelse,
            },
        })
    }

    fn try_stmt(&mut self) -> PResult<Stmt> {
        let loc = self.loc();
        self.expect_kw("try")?;
        let body = self.block()?;
        let mut handlers = Vec::new();
        let mut is_star = false;
        while self.is_kw("except") {
            let hloc = self.loc();
            self.bump();
            if self.eat_op("*") {
                is_star = true;
            }
            let (type_, name) = if self.is_op(":") {
                (None, None)
            } else {
                let t = self.expression()?;
                let name = if self.eat_kw("as") {
                    Some(self.expect_name()?)
                } else {
                    None
                };
                (Some(t), name)
            };
            let hbody = self.block()?;
            handlers.push(ExceptHandler {
                loc: hloc,
                type_,
                name,
                body: hbody,
            });
        }
        let orelse = if !handlers.is_empty() && self.eat_kw("else") {
            self.block()?
        } else {
            Vec::new()
        };
        let finalbody = if self.eat_kw("finally") {
            self.block()?
        } else {
            Vec::new()
        };
        if handlers.is_empty() && finalbody.is_empty() {
            return self.error("expected 'except' or 'finally' block");
        }
        Ok(Stmt {
            loc,
            kind: StmtKind::Try {
                is_star,
                body,
                handlers,
                orelse,
                finalbody,
            },
        })
    }

    fn with_stmt(&mut self, is_async: bool, loc: Loc) -> PResult<Stmt> {
        self.expect_kw("with")?;
        let items = match self.parenthesized_with_items() {
            Some(items) => items,
            None => {
                let mut items = vec![self.with_item()?];
                while self.eat_op(",") {
                    items.push(self.with_item()?);
                }
                items
            }
        };
        let body = self.block()?;
        Ok(Stmt {
            loc,
            kind: StmtKind::With {
                is_async,
                items,
                body,
            },
        })
    }

    /// `with (a as b, c as d):` form; restores the position on mismatch.
    fn parenthesized_with_items(&mut self) -> Option<Vec<WithItem>> {
        if !self.is_op("(") {
            return None;
        }
        let save = self.pos;
        let saved_nesting = self.nesting;
        let attempt = (|| -> PResult<Vec<WithItem>> {
            self.expect_op("(")?;
            let mut items = vec![self.with_item()?];
            while self.eat_op(",") {
                if self.is_op(")") {
                    break;
                }
                items.push(self.with_item()?);
            }
            self.expect_op(")")?;
            if !self.is_op(":") {
                return self.error("expected ':'");
            }
            Ok(items)
        })();
        match attempt {
            Ok(items) => Some(items),
            Err(_) => {
                self.pos = save;
                self.nesting = saved_nesting;
                None
            }
        }
    }

    fn with_item(&mut self) -> PResult<WithItem> {
        let context_expr = self.expression()?;
        let optional_vars = if self.eat_kw("as") {
            Some(self.target_expr()?)
        } else {
            None
        };
        Ok(WithItem {
            context_expr,
            optional_vars,
        })
    }

    // ---- match statement ----------------------------------------------

    /// `match` is a soft keyword: only a statement when followed by a subject,
    /// `:` and an indented block of `case` clauses.
    fn try_match_stmt(&mut self) -> PResult<Option<Stmt>> {
        let save = self.pos;
        let saved_nesting = self.nesting;
        let loc = self.loc();
        self.bump();
        let header = (|| -> PResult<Expr> {
            let first = self.star_named_expression()?;
            let subject = if self.is_op(",") {
                let mut elts = vec![first];
                while self.eat_op(",") {
                    if self.is_op(":") {
                        break;
                    }
                    elts.push(self.star_named_expression()?);
                }
                Expr::new(loc, ExprKind::Tuple(elts))
            } else {
                first
            };
            self.expect_op(":")?;
            if !matches!(self.tok(), Tok::Newline)
                || !matches!(self.tok_at(1), Tok::Indent)
                || !self.is_kw_at(2, "case")
            {
                return self.error("not a match statement");
            }
            Ok(subject)
        })();
        let subject = match header {
            Ok(s) => s,
            Err(_) => {
                self.pos = save;
                self.nesting = saved_nesting;
                return Ok(None);
            }
        };
        self.bump(); // newline
        self.bump(); // indent
        let mut cases = Vec::new();
        while self.eat_kw("case") {
            let pattern = self.patterns()?;
            let guard = if self.eat_kw("if") {
                Some(self.named_expression()?)
            } else {
                None
            };
            let body = self.block()?;
            cases.push(MatchCase {
                pattern,
                guard,
                body,
            });
            self.skip_newlines();
        }
        match self.tok() {
            Tok::Dedent => {
                self.bump();
            }
            Tok::EndMarker => {}
            _ => return self.error("expected 'case'"),
        }
        Ok(Some(Stmt {
            loc,
            kind: StmtKind::Match { subject, cases },
        }))
    }

    fn patterns(&mut self) -> PResult<Pattern> {
        let first = self.maybe_star_pattern()?;
        if self.is_op(",") {
            let mut items = vec![first];
            while self.eat_op(",") {
                if self.is_op(":") || self.is_kw("if") {
                    break;
                }
                items.push(self.maybe_star_pattern()?);
            }
            return Ok(Pattern::Sequence(items));
        }
        Ok(first)
    }

    fn maybe_star_pattern(&mut self) -> PResult<Pattern> {
        if self.eat_op("*") {
            let name = self.expect_name()?;
            return Ok(Pattern::Star(if name == "_" { None } else { Some(name) }));
        }
        self.pattern()
    }

    fn pattern(&mut self) -> PResult<Pattern> {
        self.enter()?;
        let r = self.pattern_inner();
        self.leave();
        r
    }

    fn pattern_inner(&mut self) -> PResult<Pattern> {
        let mut alts = vec![self.closed_pattern()?];
        while self.eat_op("|") {
            alts.push(self.closed_pattern()?);
        }
        let pat = if alts.len() == 1 {
            alts.pop().expect("one alternative")
        } else {
            Pattern::Or(alts)
        };
        if self.eat_kw("as") {
            let name = self.expect_name()?;
            return Ok(Pattern::As {
                pattern: Some(Box::new(pat)),
                name: Some(name),
            });
        }
        Ok(pat)
    }

    fn closed_pattern(&mut self) -> PResult<Pattern> {
        let loc = self.loc();
        match self.tok().clone() {
            Tok::Name(n) if n == "None" || n == "True" || n == "False" => {
                self.bump();
                Ok(Pattern::Singleton(match n.as_str() {
                    "None" => Constant::None,
                    "True" => Constant::Bool(true),
                    _ => Constant::Bool(false),
                }))
            }
            Tok::Number(_) | Tok::Str(_) => Ok(Pattern::Value(self.literal_pattern_expr()?)),
            Tok::Op("-") => Ok(Pattern::Value(self.literal_pattern_expr()?)),
            Tok::Name(n) if !is_hard_keyword(&n) => {
                self.bump();
                let mut expr = Expr::new(loc, ExprKind::Name(n.clone()));
                let mut dotted = false;
                while self.eat_op(".") {
                    let attr = self.expect_name()?;
                    expr = Expr::new(
                        loc,
                        ExprKind::Attribute {
                            value: Box::new(expr),
                            attr,
                        },
                    );
                    dotted = true;
                }
                if self.eat_op("(") {
                    return self.class_pattern(expr);
                }
                if dotted {
                    Ok(Pattern::Value(expr))
                } else if n == "_" {
                    Ok(Pattern::As {
                        pattern: None,
                        name: None,
                    })
                } else {
                    Ok(Pattern::As {
                        pattern: None,
                        name: Some(n),
                    })
                }
            }
            Tok::Op("(") => {
                self.bump();
                if self.eat_op(")") {
                    return Ok(Pattern::Sequence(Vec::new()));
                }
                let first = self.maybe_star_pattern()?;
                if self.eat_op(")") {
                    if matches!(first, Pattern::Star(_)) {
                        return Ok(Pattern::Sequence(vec![first]));
                    }
                    return Ok(first);
                }
                let mut items = vec![first];
                while self.eat_op(",") {
                    if self.is_op(")") {
                        break;
                    }
                    items.push(self.maybe_star_pattern()?);
                }
                self.expect_op(")")?;
                Ok(Pattern::Sequence(items))
            }
            Tok::Op("[") => {
                self.bump();
                let mut items = Vec::new();
                while !self.is_op("]") {
                    items.push(self.maybe_star_pattern()?);
                    if !self.eat_op(",") {
                        break;
                    }
                }
                self.expect_op("]")?;
                Ok(Pattern::Sequence(items))
            }
            Tok::Op("{") => {
                self.bump();
                let mut keys = Vec::new();
                let mut patterns = Vec::new();
                let mut rest = None;
                while !self.is_op("}") {
                    if self.eat_op("**") {
                        rest = Some(self.expect_name()?);
                    } else {
                        keys.push(self.mapping_key()?);
                        self.expect_op(":")?;
                        patterns.push(self.pattern()?);
                    }
                    if !self.eat_op(",") {
                        break;
                    }
                }
                self.expect_op("}")?;
                Ok(Pattern::Mapping {
                    keys,
                    patterns,
                    rest,
                })
            }
            _ => self.error("invalid pattern"),
        }
    }

    fn mapping_key(&mut self) -> PResult<Expr> {
        match self.tok() {
            Tok::Name(n) if n == "None" || n == "True" || n == "False" => self.atom(),
            Tok::Name(_) => {
                let loc = self.loc();
                let mut expr = Expr::new(loc, ExprKind::Name(self.expect_name()?));
                while self.eat_op(".") {
                    let attr = self.expect_name()?;
                    expr = Expr::new(
                        loc,
                        ExprKind::Attribute {
                            value: Box::new(expr),
                            attr,
                        },
                    );
                }
                Ok(expr)
            }
            _ => self.literal_pattern_expr(),
        }
    }

    /// Signed numbers, complex literals (`1 + 2j`) and strings.
    fn literal_pattern_expr(&mut self) -> PResult<Expr> {
        let loc = self.loc();
        if matches!(self.tok(), Tok::Str(_)) {
            return self.atom();
        }
        let mut left = if self.eat_op("-") {
            let operand = self.atom()?;
            Expr::new(
                loc,
                ExprKind::UnaryOp {
                    op: UnaryOp::USub,
                    operand: Box::new(operand),
                },
            )
        } else {
            self.atom()?
        };
        if self.is_op("+") || self.is_op("-") {
            let op = if self.eat_op("+") {
                BinOp::Add
            } else {
                self.bump();
                BinOp::Sub
            };
            let right = self.atom()?;
            left = Expr::new(
                loc,
                ExprKind::BinOp {
                    left: Box::new(left),
                    op,
                    right: Box::new(right),
                },
            );
        }
        Ok(left)
    }

    fn class_pattern(&mut self, cls: Expr) -> PResult<Pattern> {
        let mut patterns = Vec::new();
        let mut kwd_attrs = Vec::new();
        let mut kwd_patterns = Vec::new();
        while !self.is_op(")") {
            if matches!(self.tok(), Tok::Name(_)) && self.is_op_at(1, "=") {
                kwd_attrs.push(self.expect_name()?);
                self.bump();
                kwd_patterns.push(self.pattern()?);
            } else {
                patterns.push(self.pattern()?);
            }
            if !self.eat_op(",") {
                break;
            }
        }
        self.expect_op(")")?;
        Ok(Pattern::Class {
            cls,
            patterns,
            kwd_attrs,
            kwd_patterns,
        })
    }

    // ---- expressions ---------------------------------------------------

    fn star_expressions(&mut self) -> PResult<Expr> {
        let loc = self.loc();
        let first = self.star_expression()?;
        if !self.is_op(",") {
            return Ok(first);
        }
        let mut elts = vec![first];
        while self.eat_op(",") {
            if !self.starts_expr() || self.is_kw("yield") {
                break;
            }
            elts.push(self.star_expression()?);
        }
        Ok(Expr::new(loc, ExprKind::Tuple(elts)))
    }

    fn star_expression(&mut self) -> PResult<Expr> {
        if self.is_op("*") {
            let loc = self.loc();
            self.bump();
            let value = self.bitwise_or()?;
            return Ok(Expr::new(loc, ExprKind::Starred(Box::new(value))));
        }
        self.expression()
    }

    fn star_named_expression(&mut self) -> PResult<Expr> {
        if self.is_op("*") {
            let loc = self.loc();
            self.bump();
            let value = self.bitwise_or()?;
            return Ok(Expr::new(loc, ExprKind::Starred(Box::new(value))));
        }
        self.named_expression()
    }

    fn named_expression(&mut self) -> PResult<Expr> {
        if matches!(self.tok(), Tok::Name(n) if !is_hard_keyword(n)) && self.is_op_at(1, ":=") {
            let loc = self.loc();
            let name = self.expect_name()?;
            self.bump();
            let value = self.expression()?;
            return Ok(Expr::new(
                loc,
                ExprKind::NamedExpr {
                    target: Box::new(Expr::new(loc, ExprKind::Name(name))),
                    value: Box::new(value),
                },
            ));
        }
        self.expression()
    }

    fn expression(&mut self) -> PResult<Expr> {
        self.enter()?;
        let r = self.expression_inner();
        self.leave();
        r
    }

    fn expression_inner(&mut self) -> PResult<Expr> {
        if self.is_kw("lambda") {
            return self.lambda();
        }
        let loc = self.loc();
        let body = self.disjunction()?;
        if self.is_kw("if") {
            self.bump();
            let test = self.disjunction()?;
            self.expect_kw("else")?;
            let orelse = self.expression()?;
            return Ok(Expr::new(
                loc,
                ExprKind::IfExp {
                    test: Box::new(test),
                    body: Box::new(body),
                    orelse: Box::new(orelse),
                },
            ));
        }
        Ok(body)
    }

    fn lambda(&mut self) -> PResult<Expr> {
        let loc = self.loc();
        self.expect_kw("lambda")?;
        let params = self.parameters(":", false)?;
        self.expect_op(":")?;
        let body = self.expression()?;
        Ok(Expr::new(
            loc,
            ExprKind::Lambda {
                params: Box::new(params),
                body: Box::new(body),
            },
        ))
    }

    fn yield_expr(&mut self) -> PResult<Expr> {
        let loc = self.loc();
        self.expect_kw("yield")?;
        if self.eat_kw("from") {
            let value = self.expression()?;
            return Ok(Expr::new(loc, ExprKind::YieldFrom(Box::new(value))));
        }
        if !self.starts_expr() {
            return Ok(Expr::new(loc, ExprKind::Yield(None)));
        }
        let value = self.star_expressions()?;
        Ok(Expr::new(loc, ExprKind::Yield(Some(Box::new(value)))))
    }

    fn disjunction(&mut self) -> PResult<Expr> {
        let loc = self.loc();
        let first = self.conjunction()?;
        if !self.is_kw("or") {
            return Ok(first);
        }
        let mut values = vec![first];
        while self.eat_kw("or") {
            values.push(self.conjunction()?);
        }
        Ok(Expr::new(
            loc,
            ExprKind::BoolOp {
                op: BoolOp::Or,
                values,
            },
        ))
    }

    fn conjunction(&mut self) -> PResult<Expr> {
        let loc = self.loc();
        let first = self.inversion()?;
        if !self.is_kw("and") {
            return Ok(first);
        }
        let mut values = vec![first];
        while self.eat_kw("and") {
            values.push(self.inversion()?);
        }
        Ok(Expr::new(
            loc,
            ExprKind::BoolOp {
                op: BoolOp::And,
                values,
            },
        ))
    }

    fn inversion(&mut self) -> PResult<Expr> {
        if self.is_kw("not") {
            let loc = self.loc();
            self.bump();
            self.enter()?;
            let operand = self.inversion();
            self.leave();
            return Ok(Expr::new(
                loc,
                ExprKind::UnaryOp {
                    op: UnaryOp::Not,
                    operand: Box::new(operand?),
                },
            ));
        }
        self.comparison()
    }

    fn comparison_op(&mut self) -> Option<CmpOp> {
        let op = match self.tok() {
            Tok::Op("==") => CmpOp::Eq,
            Tok::Op("!=") => CmpOp::NotEq,
            Tok::Op("<") => CmpOp::Lt,
            Tok::Op("<=") => CmpOp::LtE,
            Tok::Op(">") => CmpOp::Gt,
            Tok::Op(">=") => CmpOp::GtE,
            Tok::Name(n) if n == "in" => CmpOp::In,
            Tok::Name(n) if n == "is" => {
                if self.is_kw_at(1, "not") {
                    self.bump();
                    CmpOp::IsNot
                } else {
                    CmpOp::Is
                }
            }
            Tok::Name(n) if n == "not" && self.is_kw_at(1, "in") => {
                self.bump();
                CmpOp::NotIn
            }
            _ => return None,
        };
        self.bump();
        Some(op)
    }

    fn comparison(&mut self) -> PResult<Expr> {
        let loc = self.loc();
        let left = self.bitwise_or()?;
        let mut ops = Vec::new();
        let mut comparators = Vec::new();
        while let Some(op) = self.comparison_op() {
            ops.push(op);
            comparators.push(self.bitwise_or()?);
        }
        if ops.is_empty() {
            return Ok(left);
        }
        Ok(Expr::new(
            loc,
            ExprKind::Compare {
                left: Box::new(left),
                ops,
                comparators,
            },
        ))
    }

    fn bitwise_or(&mut self) -> PResult<Expr> {
        self.binary(0)
    }

    fn binary(&mut self, level: usize) -> PResult<Expr> {
        if level == BIN_LEVELS.len() {
            return self.factor();
        }
        let loc = self.loc();
        let mut left = self.binary(level + 1)?;
        while let Some(&(_, op)) = BIN_LEVELS[level].iter().find(|(s, _)| self.is_op(s)) {
            self.bump();
            let right = self.binary(level + 1)?;
            left = Expr::new(
                loc,
                ExprKind::BinOp {
                    left: Box::new(left),
                    op,
                    right: Box::new(right),
                },
            );
        }
        Ok(left)
    }

    fn factor(&mut self) -> PResult<Expr> {
        let op = match self.tok() {
            Tok::Op("+") => UnaryOp::UAdd,
            Tok::Op("-") => UnaryOp::USub,
            Tok::Op("~") => UnaryOp::Invert,
            _ => return self.power(),
        };
        let loc = self.loc();
        self.bump();
        self.enter()?;
        let operand = self.factor();
        self.leave();
        Ok(Expr::new(
            loc,
            ExprKind::UnaryOp {
                op,
                operand: Box::new(operand?),
            },
        ))
    }

    fn power(&mut self) -> PResult<Expr> {
        let loc = self.loc();
        let base = if self.is_kw("await") {
            self.bump();
            let value = self.primary()?;
            Expr::new(loc, ExprKind::Await(Box::new(value)))
        } else {
            self.primary()?
        };
        if self.eat_op("**") {
            self.enter()?;
            let exp = self.factor();
            self.leave();
            return Ok(Expr::new(
                loc,
                ExprKind::BinOp {
                    left: Box::new(base),
                    op: BinOp::Pow,
                    right: Box::new(exp?),
                },
            ));
        }
        Ok(base)
    }

    fn primary(&mut self) -> PResult<Expr> {
        let loc = self.loc();
        let mut expr = self.atom()?;
        loop {
            if self.eat_op(".") {
                let attr = match self.tok() {
                    Tok::Name(n) => n.clone(),
                    _ => return self.error("expected attribute name"),
                };
                self.bump();
                expr = Expr::new(
                    loc,
                    ExprKind::Attribute {
                        value: Box::new(expr),
                        attr,
                    },
                );
            } else if self.eat_op("(") {
                self.enter()?;
                let args = self.call_arguments();
                self.leave();
                expr = Expr::new(
                    loc,
                    ExprKind::Call {
                        func: Box::new(expr),
                        args: args?,
                    },
                );
            } else if self.eat_op("[") {
                self.enter()?;
                let slice = self.slices();
                self.leave();
                expr = Expr::new(
                    loc,
                    ExprKind::Subscript {
                        value: Box::new(expr),
                        slice: Box::new(slice?),
                    },
                );
            } else {
                break;
            }
        }
        Ok(expr)
    }

    /// Arguments after `(`; consumes the closing `)`.
    fn call_arguments(&mut self) -> PResult<Vec<Argument>> {
        let mut args = Vec::new();
        while !self.is_op(")") {
            let loc = self.loc();
            if self.eat_op("*") {
                let value = self.expression()?;
                args.push(Argument::Positional(Expr::new(
                    loc,
                    ExprKind::Starred(Box::new(value)),
                )));
            } else if self.eat_op("**") {
                args.push(Argument::Keyword {
                    name: None,
                    value: self.expression()?,
                });
            } else if matches!(self.tok(), Tok::Name(n) if !is_hard_keyword(n))
                && self.is_op_at(1, "=")
            {
                let name = self.expect_name()?;
                self.bump();
                args.push(Argument::Keyword {
                    name: Some(name),
                    value: self.expression()?,
                });
            } else {
                let e = self.named_expression()?;
                if self.is_kw("for") || (self.is_kw("async") && self.is_kw_at(1, "for")) {
                    let generators = self.comprehension_clauses()?;
                    args.push(Argument::Positional(Expr::new(
                        loc,
                        ExprKind::GeneratorExp {
                            elt: Box::new(e),
                            generators,
                        },
                    )));
                } else {
                    args.push(Argument::Positional(e));
                }
            }
            if !self.eat_op(",") {
                break;
            }
        }
        self.expect_op(")")?;
        Ok(args)
    }

    /// Subscript contents after `[`; consumes the closing `]`.
    fn slices(&mut self) -> PResult<Expr> {
        let loc = self.loc();
        let first = self.slice_item()?;
        let result = if self.is_op(",") {
            let mut elts = vec![first];
            while self.eat_op(",") {
                if self.is_op("]") {
                    break;
                }
                elts.push(self.slice_item()?);
            }
            Expr::new(loc, ExprKind::Tuple(elts))
        } else {
            first
        };
        self.expect_op("]")?;
        Ok(result)
    }

    fn slice_item(&mut self) -> PResult<Expr> {
        let loc = self.loc();
        let lower = if self.is_op(":") {
            None
        } else {
            let e = self.star_named_expression()?;
            if !self.is_op(":") {
                return Ok(e);
            }
            Some(Box::new(e))
        };
        self.expect_op(":")?;
        let bound_end = |p: &Self| p.is_op(":") || p.is_op(",") || p.is_op("]");
        let upper = if bound_end(self) {
            None
        } else {
            Some(Box::new(self.expression()?))
        };
        let step = if self.eat_op(":") {
            if self.is_op(",") || self.is_op("]") {
                None
            } else {
                Some(Box::new(self.expression()?))
            }
        } else {
            None
        };
        Ok(Expr::new(loc, ExprKind::Slice { lower, upper, step }))
    }

    fn comprehension_clauses(&mut self) -> PResult<Vec<Comprehension>> {
        let mut out = Vec::new();
        loop {
            let is_async = if self.is_kw("async") && self.is_kw_at(1, "for") {
                self.bump();
                true
            } else {
                false
            };
            if !self.eat_kw("for") {
                break;
            }
            let target = self.star_targets()?;
            self.expect_kw("in")?;
            let iter = self.disjunction()?;
            let mut ifs = Vec::new();
            while self.eat_kw("if") {
                ifs.push(self.disjunction()?);
            }
            out.push(Comprehension {
                target,
                iter,
                ifs,
                is_async,
            });
        }
        Ok(out)
    }

    /// Assignment-style target list for `for` and comprehensions; stops at `in`.
    fn star_targets(&mut self) -> PResult<Expr> {
        let loc = self.loc();
        let first = self.star_target()?;
        if !self.is_op(",") {
            return Ok(first);
        }
        let mut elts = vec![first];
        while self.eat_op(",") {
            if !self.starts_expr() {
                break;
            }
            elts.push(self.star_target()?);
        }
        Ok(Expr::new(loc, ExprKind::Tuple(elts)))
    }

    fn star_target(&mut self) -> PResult<Expr> {
        if self.is_op("*") {
            let loc = self.loc();
            self.bump();
            let value = self.target_expr()?;
            return Ok(Expr::new(loc, ExprKind::Starred(Box::new(value))));
        }
        self.target_expr()
    }

    fn target_expr(&mut self) -> PResult<Expr> {
        self.bitwise_or()
    }

    fn atom(&mut self) -> PResult<Expr> {
        let loc = self.loc();
        match self.tok().clone() {
            Tok::Name(n) => {
                let kind = match n.as_str() {
                    "True" => ExprKind::Constant(Constant::Bool(true)),
                    "False" => ExprKind::Constant(Constant::Bool(false)),
                    "None" => ExprKind::Constant(Constant::None),
                    _ if is_hard_keyword(&n) => return self.error("invalid syntax"),
                    _ => ExprKind::Name(n),
                };
                self.bump();
                Ok(Expr::new(loc, kind))
            }
            Tok::Number(n) => {
                self.bump();
                Ok(Expr::new(loc, ExprKind::Constant(Constant::Number(n))))
            }
            Tok::Str(_) => self.strings(),
            Tok::Op("...") => {
                self.bump();
                Ok(Expr::new(loc, ExprKind::Constant(Constant::Ellipsis)))
            }
            Tok::Op("(") => {
                self.bump();
                self.enter()?;
                let r = self.paren_atom(loc);
                self.leave();
                r
            }
            Tok::Op("[") => {
                self.bump();
                self.enter()?;
                let r = self.list_atom(loc);
                self.leave();
                r
            }
            Tok::Op("{") => {
                self.bump();
                self.enter()?;
                let r = self.brace_atom(loc);
                self.leave();
                r
            }
            _ => self.error("invalid syntax"),
        }
    }

    fn at_comprehension(&self) -> bool {
        self.is_kw("for") || (self.is_kw("async") && self.is_kw_at(1, "for"))
    }

    fn paren_atom(&mut self, loc: Loc) -> PResult<Expr> {
        if self.eat_op(")") {
            return Ok(Expr::new(loc, ExprKind::Tuple(Vec::new())));
        }
        if self.is_kw("yield") {
            let e = self.yield_expr()?;
            self.expect_op(")")?;
            return Ok(e);
        }
        let first = self.star_named_expression()?;
        if self.at_comprehension() {
            let generators = self.comprehension_clauses()?;
            self.expect_op(")")?;
            return Ok(Expr::new(
                loc,
                ExprKind::GeneratorExp {
                    elt: Box::new(first),
                    generators,
                },
            ));
        }
        if self.eat_op(")") {
            return Ok(first);
        }
        let mut elts = vec![first];
        while self.eat_op(",") {
            if self.is_op(")") {
                break;
            }
            elts.push(self.star_named_expression()?);
        }
        self.expect_op(")")?;
        Ok(Expr::new(loc, ExprKind::Tuple(elts)))
    }

    fn list_atom(&mut self, loc: Loc) -> PResult<Expr> {
        if self.eat_op("]") {
            return Ok(Expr::new(loc, ExprKind::List(Vec::new())));
        }
        let first = self.star_named_expression()?;
        if self.at_comprehension() {
            let generators = self.comprehension_clauses()?;
            self.expect_op("]")?;
            return Ok(Expr::new(
                loc,
                ExprKind::ListComp {
                    elt: Box::new(first),
                    generators,
                },
            ));
        }
        let mut elts = vec![first];
        while self.eat_op(",") {
            if self.is_op("]") {
                break;
            }
            elts.push(self.star_named_expression()?);
        }
        self.expect_op("]")?;
        Ok(Expr::new(loc, ExprKind::List(elts)))
    }

    fn brace_atom(&mut self, loc: Loc) -> PResult<Expr> {
        if self.eat_op("}") {
            return Ok(Expr::new(loc, ExprKind::Dict(Vec::new())));
        }
        let first_item = if self.eat_op("**") {
            DictItem::Unpack(self.bitwise_or()?)
        } else {
            let key = self.star_named_expression()?;
            if !self.eat_op(":") {
                return self.set_rest(loc, key);
            }
            let value = self.expression()?;
            if self.at_comprehension() {
                let generators = self.comprehension_clauses()?;
                self.expect_op("}")?;
                return Ok(Expr::new(
                    loc,
                    ExprKind::DictComp {
                        key: Box::new(key),
                        value: Box::new(value),
                        generators,
                    },
                ));
            }
            DictItem::Pair(key, value)
        };
        let mut items = vec![first_item];
        while self.eat_op(",") {
            if self.is_op("}") {
                break;
            }
            if self.eat_op("**") {
                items.push(DictItem::Unpack(self.bitwise_or()?));
            } else {
                let key = self.expression()?;
                self.expect_op(":")?;
                let value = self.expression()?;
                items.push(DictItem::Pair(key, value));
            }
        }
        self.expect_op("}")?;
        Ok(Expr::new(loc, ExprKind::Dict(items)))
    }

    fn set_rest(&mut self, loc: Loc, first: Expr) -> PResult<Expr> {
        if self.at_comprehension() {
            let generators = self.comprehension_clauses()?;
            self.expect_op("}")?;
            return Ok(Expr::new(
                loc,
                ExprKind::SetComp {
                    elt: Box::new(first),
                    generators,
                },
            ));
        }
        let mut elts = vec![first];
        while self.eat_op(",") {
            if self.is_op("}") {
                break;
            }
            elts.push(self.star_named_expression()?);
        }
        self.expect_op("}")?;
        Ok(Expr::new(loc, ExprKind::Set(elts)))
    }

    /// One or more adjacent string tokens (implicit concatenation).
    fn strings(&mut self) -> PResult<Expr> {
        let loc = self.loc();
        let mut parts: Vec<Expr> = Vec::new();
        let mut any_f = false;
        let mut any_bytes = false;
        while let Tok::Str(s) = self.tok().clone() {
            let tloc = self.loc();
            self.bump();
            any_bytes |= s.bytes;
            if s.fstring {
                any_f = true;
                fstring_parts(&s, tloc, &mut parts)?;
            } else {
                let text = if s.raw {
                    s.body.clone()
                } else {
                    decode_escapes(&s.body)
                };
                push_literal(&mut parts, tloc, text);
            }
        }
        if any_f {
            parts.retain(
                |p| !matches!(&p.kind, ExprKind::Constant(Constant::Str(s)) if s.is_empty()),
            );
            return Ok(Expr::new(loc, ExprKind::JoinedStr(parts)));
        }
        let text: String = parts
            .into_iter()
            .map(|p| match p.kind {
                ExprKind::Constant(Constant::Str(s)) => s,
                _ => String::new(),
            })
            .collect();
        let c = if any_bytes {
            Constant::Bytes(text)
        } else {
            Constant::Str(text)
        };
        Ok(Expr::new(loc, ExprKind::Constant(c)))
    }
}

fn push_literal(parts: &mut Vec<Expr>, loc: Loc, text: String) {
    if let Some(Expr {
        kind: ExprKind::Constant(Constant::Str(prev)),
        ..
    }) = parts.last_mut()
    {
        prev.push_str(&text);
        return;
    }
    parts.push(Expr::new(loc, ExprKind::Constant(Constant::Str(text))));
}

/// Decodes backslash escapes in a non-raw string body.
pub(crate) fn decode_escapes(body: &str) -> String {
    let mut out = String::with_capacity(body.len());
    let mut chars = body.chars().peekable();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        let Some(e) = chars.next() else {
            out.push('\\');
            break;
        };
        match e {
            '\n' => {}
            '\\' => out.push('\\'),
            '\'' => out.push('\''),
            '"' => out.push('"'),
            'n' => out.push('\n'),
            't' => out.push('\t'),
            'r' => out.push('\r'),
            'a' => out.push('\x07'),
            'b' => out.push('\x08'),
            'f' => out.push('\x0c'),
            'v' => out.push('\x0b'),
            '0'..='7' => {
                let mut v = e.to_digit(8).unwrap_or(0);
                for _ in 0..2 {
                    match chars.peek().and_then(|d| d.to_digit(8)) {
                        Some(d) => {
                            v = v * 8 + d;
                            chars.next();
                        }
                        None => break,
                    }
                }
                out.push(char::from_u32(v).unwrap_or('\u{fffd}'));
            }
            'x' | 'u' | 'U' => {
                let n = match e {
                    'x' => 2,
                    'u' => 4,
                    _ => 8,
                };
                let hex: String = (0..n).filter_map(|_| chars.next()).collect();
                match u32::from_str_radix(&hex, 16).ok().and_then(char::from_u32) {
                    Some(ch) => out.push(ch),
                    None => {
                        out.push('\\');
                        out.push(e);
                        out.push_str(&hex);
                    }
                }
            }
            other => {
                out.push('\\');
                out.push(other);
            }
        }
    }
    out
}

/// Splits an f-string body into literal and `FormattedValue` parts.
fn fstring_parts(s: &StrTok, loc: Loc, parts: &mut Vec<Expr>) -> PResult<()> {
    let chars: Vec<char> = s.body.chars().collect();
    let mut i = 0;
    let end = fstring_segment(&chars, &mut i, s.raw, loc, parts, false)?;
    debug_assert_eq!(end, chars.len());
    Ok(())
}

/// Parses literal text and replacement fields until end of input or, when
/// `in_spec`, an unmatched `}`. Returns the stop index.
fn fstring_segment(
    chars: &[char],
    i: &mut usize,
    raw: bool,
    loc: Loc,
    parts: &mut Vec<Expr>,
    in_spec: bool,
) -> PResult<usize> {
    let mut lit = String::new();
    let line_at =
        |idx: usize| loc.line + chars[..idx].iter().filter(|c| **c == '\n').count() as u32;
    while *i < chars.len() {
        let c = chars[*i];
        if c == '{' {
            if !in_spec && chars.get(*i + 1) == Some(&'{') {
                lit.push('{');
                *i += 2;
                continue;
            }
            if !lit.is_empty() {
                push_literal(parts, loc, decode_lit(&lit, raw));
                lit.clear();
            }
            *i += 1;
            replacement_field(
                chars,
                i,
                raw,
                Loc {
                    line: line_at(*i),
                    col: 0,
                },
                parts,
            )?;
            continue;
        }
        if c == '}' {
            if in_spec {
                break;
            }
            if chars.get(*i + 1) == Some(&'}') {
                lit.push('}');
                *i += 2;
                continue;
            }
            return Err(ParseError::new(loc, "f-string: single '}' is not allowed"));
        }
        if c == '\\' && !raw {
            lit.push(c);
            if let Some(n) = chars.get(*i + 1) {
                lit.push(*n);
            }
            *i += 2;
            continue;
        }
        lit.push(c);
        *i += 1;
    }
    if !lit.is_empty() {
        push_literal(parts, loc, decode_lit(&lit, raw));
    }
    Ok(*i)
}

fn decode_lit(lit: &str, raw: bool) -> String {
    if raw {
        lit.to_string()
    } else {
        decode_escapes(lit)
    }
}

fn replacement_field(
    chars: &[char],
    i: &mut usize,
    raw: bool,
    loc: Loc,
    parts: &mut Vec<Expr>,
) -> PResult<()> {
    let start = *i;
    let mut depth = 0i32;
    let mut quote: Option<(char, bool)> = None;
    let mut debug_end: Option<usize> = None;
    let expr_end;
    loop {
        let Some(&c) = chars.get(*i) else {
            return Err(ParseError::new(loc, "f-string: expecting '}'"));
        };
        if let Some((q, triple)) = quote {
            if c == '\\' {
                *i += 2;
                continue;
            }
            if c == q {
                if !triple {
                    quote = None;
                } else if chars.get(*i + 1) == Some(&q) && chars.get(*i + 2) == Some(&q) {
                    quote = None;
                    *i += 2;
                }
            }
            *i += 1;
            continue;
        }
        match c {
            '\'' | '"' => {
                let triple = chars.get(*i + 1) == Some(&c) && chars.get(*i + 2) == Some(&c);
                quote = Some((c, triple));
                *i += if triple { 3 } else { 1 };
                continue;
            }
            '(' | '[' | '{' => depth += 1,
            ')' | ']' => depth -= 1,
            '}' if depth > 0 => depth -= 1,
            '}' | ':' if depth == 0 => {
                expr_end = *i;
                break;
            }
            '!' if depth == 0 && chars.get(*i + 1) != Some(&'=') => {
                expr_end = *i;
                break;
            }
            '=' if depth == 0 => {
                let prev = if *i > start { chars[*i - 1] } else { ' ' };
                let next = chars.get(*i + 1).copied().unwrap_or(' ');
                if next != '=' && !matches!(prev, '=' | '!' | '<' | '>') {
                    let mut j = *i + 1;
                    while chars.get(j).is_some_and(|c| c.is_whitespace()) {
                        j += 1;
                    }
                    if matches!(chars.get(j), Some('}' | '!' | ':')) {
                        debug_end = Some(j);
                        expr_end = *i;
                        *i = j;
                        break;
                    }
                }
                if next == '=' {
                    *i += 1;
                }
            }
            '#' => {
                return Err(ParseError::new(
                    loc,
                    "f-string expression part cannot include '#'",
                ))
            }
            _ => {}
        }
        *i += 1;
    }
    let expr_text: String = chars[start..expr_end].iter().collect();
    if expr_text.trim().is_empty() {
        return Err(ParseError::new(
            loc,
            "f-string: empty expression not allowed",
        ));
    }
    let value = parse_embedded(&expr_text, loc.line)?;
    if let Some(dend) = debug_end {
        let text: String = chars[start..dend].iter().collect();
        push_literal(parts, loc, text);
    }
    let mut conversion = None;
    if chars.get(*i) == Some(&'!') {
        match chars.get(*i + 1) {
            Some(&c @ ('s' | 'r' | 'a')) => conversion = Some(c),
            _ => {
                return Err(ParseError::new(
                    loc,
                    "f-string: invalid conversion character",
                ))
            }
        }
        *i += 2;
    }
    let mut format_spec = None;
    if chars.get(*i) == Some(&':') {
        *i += 1;
        let mut spec_parts = Vec::new();
        fstring_segment(chars, i, raw, loc, &mut spec_parts, true)?;
        format_spec = Some(Box::new(Expr::new(loc, ExprKind::JoinedStr(spec_parts))));
    }
    if chars.get(*i) != Some(&'}') {
        return Err(ParseError::new(loc, "f-string: expecting '}'"));
    }
    *i += 1;
    if debug_end.is_some() && conversion.is_none() && format_spec.is_none() {
        conversion = Some('r');
    }
    parts.push(Expr::new(
        value.loc,
        ExprKind::FormattedValue {
            value: Box::new(value),
            conversion,
            format_spec,
        },
    ));
    Ok(())
}

fn parse_embedded(text: &str, line: u32) -> PResult<Expr> {
    let wrapped = format!("({text})");
    let tokens = tokenize_from_line(&wrapped, line)?;
    let mut p = Parser::new(tokens);
    let e = p.star_expressions()?;
    p.skip_newlines();
    p.expect_end()?;
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn expr(src: &str) -> Expr {
        parse_expression(src).unwrap()
    }

    #[test]
    fn precedence_and_associativity() {
        let e = expr("a - b - c * d ** -e");
        let ExprKind::BinOp { left, op, right } = e.kind else {
            panic!()
        };
        assert_eq!(op, BinOp::Sub);
        assert!(matches!(left.kind, ExprKind::BinOp { op: BinOp::Sub, .. }));
        assert!(matches!(
            right.kind,
            ExprKind::BinOp {
                op: BinOp::Mult,
                ..
            }
        ));
    }

    #[test]
    fn boolop_is_flattened() {
        let e = expr("a or b or c and d");
        let ExprKind::BoolOp { op, values } = e.kind else {
            panic!()
        };
        assert_eq!(op, BoolOp::Or);
        assert_eq!(values.len(), 3);
    }

    #[test]
    fn comparison_chain() {
        let e = expr("a < b is not c not in d");
        let ExprKind::Compare { ops, .. } = e.kind else {
            panic!()
        };
        assert_eq!(ops, vec![CmpOp::Lt, CmpOp::IsNot, CmpOp::NotIn]);
    }

    #[test]
    fn call_chain_and_subscript() {
        let e = expr("pd.read_csv('a.csv').iloc[:, 1:3]");
        assert!(matches!(e.kind, ExprKind::Subscript { .. }));
    }

    #[test]
    fn fstring_parts_with_spec_and_debug() {
        let e = expr("f'a{b!r:>{w}}c' 'd'");
        let ExprKind::JoinedStr(parts) = e.kind else {
            panic!()
        };
        assert_eq!(parts.len(), 3);
        let e = expr("f'{y=}'");
        let ExprKind::JoinedStr(parts) = e.kind else {
            panic!()
        };
        assert_eq!(
            parts[0].kind,
            ExprKind::Constant(Constant::Str("y=".into()))
        );
        assert!(matches!(
            parts[1].kind,
            ExprKind::FormattedValue {
                conversion: Some('r'),
                ..
            }
        ));
    }

    #[test]
    fn elif_nests() {
        let m = parse_module("if a:\n    x\nelif b:\n    y\nelse:\n    z\n").unwrap();
        let StmtKind::If { orelse, .. } = &m[0].kind else {
            panic!()
        };
        assert!(matches!(orelse[0].kind, StmtKind::If { .. }));
    }

    #[test]
    fn match_is_soft_keyword() {
        let m = parse_module("match = 3\nmatch(x)\n").unwrap();
        assert_eq!(m.len(), 2);
        let m = parse_module("match p:\n    case [x, *rest] if x:\n        pass\n    case Point(x=0) | None:\n        pass\n    case _:\n        pass\n").unwrap();
        assert!(matches!(m[0].kind, StmtKind::Match { .. }));
    }

    #[test]
    fn parenthesized_with_items() {
        let m = parse_module("with (open(a) as f, open(b) as g):\n    pass\n").unwrap();
        let StmtKind::With { items, .. } = &m[0].kind else {
            panic!()
        };
        assert_eq!(items.len(), 2);
        let m = parse_module("with (yield x):\n    pass\n");
        assert!(m.is_ok());
    }

    #[test]
    fn parameters_all_kinds() {
        let m = parse_module(
            "def f(a, b=1, /, c: int = 2, *args, d, e=3, **kw) -> int:\n    return a\n",
        )
        .unwrap();
        let StmtKind::FunctionDef { params, .. } = &m[0].kind else {
            panic!()
        };
        assert_eq!(params.posonly.len(), 2);
        assert_eq!(params.args.len(), 1);
        assert!(params.vararg.is_some());
        assert_eq!(params.kwonly.len(), 2);
        assert!(params.kwarg.is_some());
    }

    #[test]
    fn python2_print_is_rejected() {
        assert!(parse_module("print 'hello'\n").is_err());
    }

    #[test]
    fn excessive_nesting_is_an_error_not_a_crash() {
        let src = format!("x = {}1{}\n", "(".repeat(500), ")".repeat(500));
        assert!(parse_module(&src).is_err());
    }

    #[test]
    fn escapes_are_decoded() {
        assert_eq!(decode_escapes(r"a\n\x41\101\\"), "a\nAA\\");
    }
}
