//! Manifest DSL: structure and instance declarations.
//!
//! ```text
//! # comment
//! structure A {
//!   rel Lt/2 := x1 < x2;
//!   rel M := @Rmix;
//! }
//! instance I over A { Lt(x, y); A.M(x, y, z); x = z; }
//! instance J over A, B { A.Lt(x, y); B.Lt(y, x); }
//! ```
//!
//! Relation bodies are order formulas over the positional variables
//! `x1..xk`; instance variables are free names.

use std::fmt;

use tcsp_core::formula::positional_names;
use tcsp_core::order::MAX_POINTS;
use tcsp_core::relation::relation_from_formula;
use tcsp_core::solvers::{CombinedInstance, Instance, Side};
use tcsp_core::syntax::Parser;
use tcsp_core::{builtin, Error, OrderFormula, Result, TemporalStructure};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RelationBody {
    Formula { arity: usize, formula: OrderFormula },
    Builtin(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationDecl {
    pub symbol: String,
    pub body: RelationBody,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructureDecl {
    pub name: String,
    pub relations: Vec<RelationDecl>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InstanceItem {
    Atom {
        structure: Option<String>,
        symbol: String,
        args: Vec<String>,
    },
    Equal(String, String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceDecl {
    pub name: String,
    pub over: Vec<String>,
    pub items: Vec<InstanceItem>,
}

/// An instance resolved against its structures.
#[derive(Debug, Clone)]
pub enum BuiltInstance {
    Single(Instance),
    Combined(CombinedInstance),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Manifest {
    pub structures: Vec<StructureDecl>,
    pub instances: Vec<InstanceDecl>,
}

pub fn parse_manifest(text: &str) -> Result<Manifest> {
    let mut p = Parser::new(text)?;
    let mut m = Manifest::default();
    while !p.at_end() {
        let loc = p.location();
        if p.eat_keyword("structure") {
            let s = parse_structure(&mut p)?;
            if m.structures.iter().any(|t| t.name == s.name) {
                return Err(parse_error(loc, format!("structure `{}` declared twice", s.name)));
            }
            m.structures.push(s);
        } else if p.eat_keyword("instance") {
            let i = parse_instance(&mut p, &m)?;
            if m.instances.iter().any(|t| t.name == i.name) {
                return Err(parse_error(loc, format!("instance `{}` declared twice", i.name)));
            }
            m.instances.push(i);
        } else {
            return Err(p.error(format!("expected `structure` or `instance`, found {}", p.describe())));
        }
    }
    Ok(m)
}

fn parse_error(loc: (usize, usize), msg: String) -> Error {
    Error::Parse {
        line: loc.0,
        col: loc.1,
        msg,
    }
}

fn parse_structure(p: &mut Parser) -> Result<StructureDecl> {
    let name = p.expect_ident()?;
    p.expect_sym("{")?;
    let mut relations: Vec<RelationDecl> = Vec::new();
    while !p.eat_sym("}") {
        let loc = p.location();
        p.expect_keyword("rel")?;
        let symbol = p.expect_ident()?;
        if relations.iter().any(|r| r.symbol == symbol) {
            return Err(parse_error(loc, format!("relation `{symbol}` declared twice in `{name}`")));
        }
        let arity = if p.eat_sym("/") {
            let k_loc = p.location();
            let k = p.expect_number()?;
            if k == 0 || k > MAX_POINTS {
                return Err(parse_error(k_loc, format!("invalid arity {k}")));
            }
            Some(k)
        } else {
            None
        };
        p.expect_sym(":=")?;
        let body = if p.eat_sym("@") {
            let b_loc = p.location();
            let b = p.expect_ident()?;
            let rel = builtin(&b).map_err(|_| parse_error(b_loc, format!("unknown builtin relation `@{b}`")))?;
            if let Some(k) = arity {
                if k != rel.arity() {
                    return Err(parse_error(
                        b_loc,
                        format!("`@{b}` has arity {}, declared {k}", rel.arity()),
                    ));
                }
            }
            RelationBody::Builtin(b)
        } else {
            let arity = arity.ok_or_else(|| parse_error(loc, format!("relation `{symbol}` needs an arity: `rel {symbol}/k`")))?;
            let formula = p.order_formula(&positional_names(arity))?;
            RelationBody::Formula { arity, formula }
        };
        relations.push(RelationDecl { symbol, body });
        if !p.eat_sym(";") && !p.is_sym("}") {
            return Err(p.error(format!("expected `;` or `}}`, found {}", p.describe())));
        }
    }
    Ok(StructureDecl { name, relations })
}

fn parse_instance(p: &mut Parser, m: &Manifest) -> Result<InstanceDecl> {
    let name = p.expect_ident()?;
    p.expect_keyword("over")?;
    let mut over = Vec::new();
    loop {
        let loc = p.location();
        let s = p.expect_ident()?;
        let Some(decl) = m.structures.iter().find(|d| d.name == s) else {
            return Err(parse_error(loc, format!("unknown structure `{s}`")));
        };
        if over.contains(&s) {
            return Err(parse_error(loc, format!("structure `{s}` listed twice")));
        }
        over.push(decl.name.clone());
        if !p.eat_sym(",") {
            break;
        }
    }
    if over.len() > 2 {
        return Err(p.error("an instance ranges over one or two structures"));
    }
    p.expect_sym("{")?;
    let mut items = Vec::new();
    while !p.eat_sym("}") {
        let loc = p.location();
        let first = p.expect_ident()?;
        let item = if p.eat_sym("=") {
            InstanceItem::Equal(first, p.expect_ident()?)
        } else {
            let (structure, symbol) = if p.eat_sym(".") {
                (Some(first), p.expect_ident()?)
            } else {
                (None, first)
            };
            p.expect_sym("(")?;
            let mut args = Vec::new();
            if !p.is_sym(")") {
                loop {
                    args.push(p.expect_ident()?);
                    if !p.eat_sym(",") {
                        break;
                    }
                }
            }
            p.expect_sym(")")?;
            check_atom(m, &over, structure.as_deref(), &symbol, args.len()).map_err(|msg| parse_error(loc, msg))?;
            InstanceItem::Atom { structure, symbol, args }
        };
        items.push(item);
        if !p.eat_sym(";") && !p.is_sym("}") {
            return Err(p.error(format!("expected `;` or `}}`, found {}", p.describe())));
        }
    }
    Ok(InstanceDecl { name, over, items })
}

fn decl_arity(r: &RelationDecl) -> usize {
    match &r.body {
        RelationBody::Formula { arity, .. } => *arity,
        RelationBody::Builtin(b) => builtin(b).map(|r| r.arity()).unwrap_or(0),
    }
}

fn check_atom(m: &Manifest, over: &[String], structure: Option<&str>, symbol: &str, args: usize) -> std::result::Result<(), String> {
    let target = match structure {
        Some(s) if over.iter().any(|o| o == s) => s,
        Some(s) => return Err(format!("structure `{s}` is not listed after `over`")),
        None if over.len() == 1 => over[0].as_str(),
        None => return Err(format!("atom `{symbol}` must be qualified in a combined instance")),
    };
    let decl = m.structures.iter().find(|d| d.name == target).expect("checked when parsing `over`");
    let rel = decl
        .relations
        .iter()
        .find(|r| r.symbol == symbol)
        .ok_or_else(|| format!("unknown symbol `{symbol}` in structure `{target}`"))?;
    let k = decl_arity(rel);
    if k != args {
        return Err(format!("`{target}.{symbol}` has arity {k} but is applied to {args} arguments"));
    }
    Ok(())
}

impl Manifest {
    pub fn structure_decl(&self, name: Option<&str>) -> Result<&StructureDecl> {
        match name {
            Some(n) => self
                .structures
                .iter()
                .find(|s| s.name == n)
                .ok_or_else(|| Error::Contract(format!("no structure named `{n}`"))),
            None => self
                .structures
                .first()
                .ok_or_else(|| Error::Contract("the manifest declares no structure".into())),
        }
    }

    /// Builds the named structure (or the first one) with the given arity cap.
    pub fn structure(&self, name: Option<&str>, arity_cap: usize) -> Result<TemporalStructure> {
        self.structure_decl(name)?.build(arity_cap)
    }

    pub fn instance_decl(&self, name: Option<&str>) -> Result<&InstanceDecl> {
        match name {
            Some(n) => self
                .instances
                .iter()
                .find(|s| s.name == n)
                .ok_or_else(|| Error::Contract(format!("no instance named `{n}`"))),
            None => self
                .instances
                .first()
                .ok_or_else(|| Error::Contract("the manifest declares no instance".into())),
        }
    }

    pub fn instance(&self, name: Option<&str>, arity_cap: usize) -> Result<BuiltInstance> {
        let decl = self.instance_decl(name)?;
        let structures = decl
            .over
            .iter()
            .map(|s| self.structure(Some(s), arity_cap))
            .collect::<Result<Vec<_>>>()?;
        if let [a] = &structures[..] {
            let mut inst = Instance::new(a.clone());
            for item in &decl.items {
                match item {
                    InstanceItem::Atom { symbol, args, .. } => {
                        let refs: Vec<&str> = args.iter().map(|s| s.as_str()).collect();
                        inst.add(symbol, &refs)?;
                    }
                    InstanceItem::Equal(x, y) => inst.add("=", &[x, y])?,
                }
            }
            return Ok(BuiltInstance::Single(inst));
        }
        let mut inst = CombinedInstance::new(structures[0].clone(), structures[1].clone());
        for item in &decl.items {
            match item {
                InstanceItem::Atom {
                    structure: Some(s),
                    symbol,
                    args,
                } => {
                    let side = if *s == decl.over[0] { Side::First } else { Side::Second };
                    let refs: Vec<&str> = args.iter().map(|s| s.as_str()).collect();
                    inst.add(side, symbol, &refs)?;
                }
                InstanceItem::Atom { structure: None, symbol, .. } => {
                    return Err(Error::Signature(format!("atom `{symbol}` must be qualified in a combined instance")))
                }
                // Equality is interpreted the same way on both sides.
                InstanceItem::Equal(x, y) => inst.add(Side::First, "=", &[x, y])?,
            }
        }
        Ok(BuiltInstance::Combined(inst))
    }
}

impl StructureDecl {
    pub fn build(&self, arity_cap: usize) -> Result<TemporalStructure> {
        let mut a = TemporalStructure::new(self.name.clone());
        for r in &self.relations {
            let rel = match &r.body {
                RelationBody::Builtin(b) => builtin(b)?,
                RelationBody::Formula { arity, formula } => relation_from_formula(*arity, formula, arity_cap)?,
            };
            if rel.arity() > arity_cap {
                return Err(Error::ArityCap {
                    arity: rel.arity(),
                    cap: arity_cap,
                });
            }
            a.add(r.symbol.clone(), rel)?;
        }
        Ok(a)
    }
}

impl fmt::Display for RelationDecl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.body {
            RelationBody::Builtin(b) => write!(f, "rel {} := @{b};", self.symbol),
            RelationBody::Formula { arity, formula } => {
                write!(f, "rel {}/{arity} := {};", self.symbol, formula.display(&positional_names(*arity)))
            }
        }
    }
}

impl fmt::Display for InstanceItem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InstanceItem::Equal(x, y) => write!(f, "{x} = {y};"),
            InstanceItem::Atom { structure, symbol, args } => {
                if let Some(s) = structure {
                    write!(f, "{s}.")?;
                }
                write!(f, "{symbol}({});", args.join(", "))
            }
        }
    }
}

/// Canonical text: one declaration per line, parsed back to an equal
/// manifest.
impl fmt::Display for Manifest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.structures {
            writeln!(f, "structure {} {{", s.name)?;
            for r in &s.relations {
                writeln!(f, "  {r}")?;
            }
            writeln!(f, "}}")?;
        }
        for i in &self.instances {
            writeln!(f, "instance {} over {} {{", i.name, i.over.join(", "))?;
            for item in &i.items {
                writeln!(f, "  {item}")?;
            }
            writeln!(f, "}}")?;
        }
        Ok(())
    }
}

/// Parses a relation given on the command line: `@Name` for a library
/// relation, otherwise an order formula over `x1..xk`.
pub fn parse_relation_arg(text: &str, arity: Option<usize>, arity_cap: usize) -> Result<tcsp_core::TemporalRelation> {
    if let Some(name) = text.trim().strip_prefix('@') {
        return builtin(name.trim());
    }
    let k = arity.ok_or_else(|| Error::Contract("a relation given as a formula needs --arity".into()))?;
    let mut p = Parser::new(text)?;
    let f = p.order_formula(&positional_names(k))?;
    p.finish()?;
    relation_from_formula(k, &f, arity_cap)
}

/// Whether `text` is a bare identifier (a symbol name rather than a formula).
pub fn is_identifier(text: &str) -> bool {
    text.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && text.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}
