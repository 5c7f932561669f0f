//! Tokenizer and recursive-descent parsers for order formulas and
//! primitive positive formulas. Errors carry 1-based line and column.

use crate::error::{Error, Result};
use crate::formula::{Cmp, OrderFormula};
use crate::pp::{Atom, PPFormula};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Number(usize),
    /// Punctuation and operators, normalized to ASCII spelling.
    Sym(&'static str),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

const SYMBOLS: &[(&str, &str)] = &[
    (":=", ":="),
    ("<=", "<="),
    (">=", ">="),
    ("!=", "!="),
    ("≤", "<="),
    ("≥", ">="),
    ("≠", "!="),
    ("∧", "&"),
    ("∨", "|"),
    ("∃", "exists"),
    ("(", "("),
    (")", ")"),
    ("{", "{"),
    ("}", "}"),
    (",", ","),
    (";", ";"),
    (".", "."),
    (":", ":"),
    ("/", "/"),
    ("@", "@"),
    ("&", "&"),
    ("|", "|"),
    ("<", "<"),
    (">", ">"),
    ("=", "="),
];

pub fn tokenize(src: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let mut line = 1;
    let mut col = 1;
    let mut rest = src;
    while let Some(c) = rest.chars().next() {
        if c == '\n' {
            line += 1;
            col = 1;
            rest = &rest[1..];
            continue;
        }
        if c.is_whitespace() {
            col += 1;
            rest = &rest[c.len_utf8()..];
            continue;
        }
        if c == '#' {
            let end = rest.find('\n').unwrap_or(rest.len());
            rest = &rest[end..];
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let end = rest
                .find(|ch: char| !(ch.is_ascii_alphanumeric() || ch == '_'))
                .unwrap_or(rest.len());
            out.push(Token {
                tok: Tok::Ident(rest[..end].to_string()),
                line,
                col,
            });
            col += end;
            rest = &rest[end..];
            continue;
        }
        if c.is_ascii_digit() {
            let end = rest.find(|ch: char| !ch.is_ascii_digit()).unwrap_or(rest.len());
            let n = rest[..end].parse().map_err(|_| Error::Parse {
                line,
                col,
                msg: "number out of range".into(),
            })?;
            out.push(Token {
                tok: Tok::Number(n),
                line,
                col,
            });
            col += end;
            rest = &rest[end..];
            continue;
        }
        match SYMBOLS.iter().find(|(s, _)| rest.starts_with(s)) {
            Some((s, norm)) => {
                out.push(Token {
                    tok: Tok::Sym(norm),
                    line,
                    col,
                });
                col += s.chars().count();
                rest = &rest[s.len()..];
            }
            None => {
                return Err(Error::Parse {
                    line,
                    col,
                    msg: format!("unexpected character `{c}`"),
                })
            }
        }
    }
    Ok(out)
}

/// Cursor over a token stream; shared with the manifest parser.
pub struct Parser {
    toks: Vec<Token>,
    pos: usize,
    end: (usize, usize),
}

impl Parser {
    pub fn new(src: &str) -> Result<Self> {
        let toks = tokenize(src)?;
        let lines = src.split('\n').count();
        let last = src.rsplit('\n').next().unwrap_or("");
        Ok(Parser {
            toks,
            pos: 0,
            end: (lines, last.chars().count() + 1),
        })
    }

    pub fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    pub fn peek_at(&self, offset: usize) -> Option<&Tok> {
        self.toks.get(self.pos + offset).map(|t| &t.tok)
    }

    pub fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    pub fn location(&self) -> (usize, usize) {
        self.toks
            .get(self.pos)
            .map_or(self.end, |t| (t.line, t.col))
    }

    pub fn error(&self, msg: impl Into<String>) -> Error {
        let (line, col) = self.location();
        Error::Parse {
            line,
            col,
            msg: msg.into(),
        }
    }

    pub fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.tok.clone());
        self.pos += 1;
        t
    }

    pub fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Some(Tok::Sym(x)) if *x == s)
    }

    pub fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(x)) if x == kw)
    }

    pub fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub fn eat_keyword(&mut self, kw: &str) -> bool {
        if self.is_keyword(kw) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub fn expect_sym(&mut self, s: &str) -> Result<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{s}`, found {}", self.describe())))
        }
    }

    pub fn expect_keyword(&mut self, kw: &str) -> Result<()> {
        if self.eat_keyword(kw) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{kw}`, found {}", self.describe())))
        }
    }

    pub fn expect_ident(&mut self) -> Result<String> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.error(format!("expected identifier, found {}", self.describe()))),
        }
    }

    pub fn expect_number(&mut self) -> Result<usize> {
        match self.peek() {
            Some(Tok::Number(n)) => {
                let n = *n;
                self.pos += 1;
                Ok(n)
            }
            _ => Err(self.error(format!("expected number, found {}", self.describe()))),
        }
    }

    pub fn describe(&self) -> String {
        match self.peek() {
            None => "end of input".into(),
            Some(Tok::Ident(s)) => format!("`{s}`"),
            Some(Tok::Number(n)) => format!("`{n}`"),
            Some(Tok::Sym(s)) => format!("`{s}`"),
        }
    }

    fn peek_cmp(&self) -> Option<Cmp> {
        match self.peek() {
            Some(Tok::Sym(s)) => Cmp::from_symbol(s),
            _ => None,
        }
    }

    /// `or := and ('|' and)*`, literals `v ∘ w` over `vars`.
    pub fn order_formula(&mut self, vars: &[String]) -> Result<OrderFormula> {
        let mut parts = vec![self.order_conj(vars)?];
        while self.eat_sym("|") {
            parts.push(self.order_conj(vars)?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            OrderFormula::Or(parts)
        })
    }

    fn order_conj(&mut self, vars: &[String]) -> Result<OrderFormula> {
        let mut parts = vec![self.order_unary(vars)?];
        while self.eat_sym("&") {
            parts.push(self.order_unary(vars)?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            OrderFormula::And(parts)
        })
    }

    fn order_unary(&mut self, vars: &[String]) -> Result<OrderFormula> {
        if self.eat_sym("(") {
            let f = self.order_formula(vars)?;
            self.expect_sym(")")?;
            return Ok(f);
        }
        if self.eat_keyword("false") {
            return Ok(OrderFormula::False);
        }
        if self.eat_keyword("true") {
            return Ok(OrderFormula::True);
        }
        let lhs = self.variable(vars)?;
        let op = self
            .peek_cmp()
            .ok_or_else(|| self.error(format!("expected comparison, found {}", self.describe())))?;
        self.bump();
        let rhs = self.variable(vars)?;
        Ok(OrderFormula::lit(lhs, op, rhs))
    }

    fn variable(&mut self, vars: &[String]) -> Result<usize> {
        let loc = self.location();
        let name = self.expect_ident()?;
        vars.iter().position(|v| *v == name).ok_or(Error::Parse {
            line: loc.0,
            col: loc.1,
            msg: format!("unknown variable `{name}`"),
        })
    }

    /// `[exists v (, v)* .] atom (& atom)*`. Every variable must be free
    /// (listed in `free`) or bound by the quantifier prefix.
    pub fn pp_formula(&mut self, free: &[String]) -> Result<PPFormula> {
        if self.eat_sym("(") {
            let f = self.pp_formula(free)?;
            self.expect_sym(")")?;
            return Ok(f);
        }
        let mut vars: Vec<String> = free.to_vec();
        if self.eat_keyword("exists") || self.eat_sym("exists") {
            loop {
                let loc = self.location();
                let v = self.expect_ident()?;
                if vars.contains(&v) {
                    return Err(Error::Parse {
                        line: loc.0,
                        col: loc.1,
                        msg: format!("variable `{v}` bound twice"),
                    });
                }
                vars.push(v);
                if !self.eat_sym(",") {
                    break;
                }
            }
            self.eat_sym(".");
        }
        let parenthesized = self.eat_sym("(");
        let mut atoms = vec![self.pp_atom(&vars)?];
        while self.eat_sym("&") {
            atoms.push(self.pp_atom(&vars)?);
        }
        if parenthesized {
            self.expect_sym(")")?;
        }
        PPFormula::new(vars, free.len(), atoms).map_err(|e| self.error(e.to_string()))
    }

    fn pp_atom(&mut self, vars: &[String]) -> Result<Atom> {
        let loc = self.location();
        let name = self.expect_ident()?;
        if self.eat_sym("(") {
            let mut args = Vec::new();
            if !self.is_sym(")") {
                loop {
                    args.push(self.variable(vars)?);
                    if !self.eat_sym(",") {
                        break;
                    }
                }
            }
            self.expect_sym(")")?;
            return Ok(Atom::new(name, args));
        }
        let lhs = vars.iter().position(|v| *v == name).ok_or(Error::Parse {
            line: loc.0,
            col: loc.1,
            msg: format!("unknown variable `{name}`"),
        })?;
        let op = self
            .peek_cmp()
            .ok_or_else(|| self.error(format!("expected `(` or comparison, found {}", self.describe())))?;
        self.bump();
        let rhs = self.variable(vars)?;
        Ok(Atom::new(op.symbol(), vec![lhs, rhs]))
    }

    /// Disjunction of pp-formulas, each optionally parenthesized.
    pub fn ep_formula(&mut self, free: &[String]) -> Result<Vec<PPFormula>> {
        let mut out = vec![self.pp_formula(free)?];
        while self.eat_sym("|") {
            out.push(self.pp_formula(free)?);
        }
        Ok(out)
    }

    pub fn finish(&self) -> Result<()> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.error(format!("unexpected {}", self.describe())))
        }
    }
}

/// Parses a complete order formula over the given variable names.
pub fn parse_order_formula(src: &str, vars: &[String]) -> Result<OrderFormula> {
    let mut p = Parser::new(src)?;
    let f = p.order_formula(vars)?;
    p.finish()?;
    Ok(f)
}

/// Parses a complete pp-formula with the given free variables.
pub fn parse_pp_formula(src: &str, free: &[&str]) -> Result<PPFormula> {
    let free: Vec<String> = free.iter().map(|s| s.to_string()).collect();
    let mut p = Parser::new(src)?;
    let f = p.pp_formula(&free)?;
    p.finish()?;
    Ok(f)
}
