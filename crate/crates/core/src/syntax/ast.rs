//! Syntax tree for FSP-lite compilation units.

use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Mod,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
}

impl BinOp {
    /// Binding strength, higher binds tighter. All binary operators are
    /// left-associative.
    pub fn precedence(self) -> u8 {
        match self {
            BinOp::Or => 1,
            BinOp::And => 2,
            BinOp::Eq | BinOp::Ne => 3,
            BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => 4,
            BinOp::Add | BinOp::Sub => 5,
            BinOp::Mul | BinOp::Div | BinOp::Mod => 6,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Mod => "%",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::And => "&&",
            BinOp::Or => "||",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnOp {
    Neg,
    Not,
}

/// Integer and boolean expressions share one tree; evaluation checks types.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Int(i64),
    /// A bound variable or a constant name.
    Var(String),
    Unary(UnOp, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn binary(op: BinOp, l: Expr, r: Expr) -> Expr {
        Expr::Binary(op, Box::new(l), Box::new(r))
    }

    pub fn vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::Int(_) => {}
            Expr::Var(v) => {
                out.insert(v.clone());
            }
            Expr::Unary(_, e) => e.vars(out),
            Expr::Binary(_, l, r) => {
                l.vars(out);
                r.vars(out);
            }
        }
    }
}

/// Either a declared range name or bounds written in place.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RangeRef {
    Named(String),
    Inline(i64, i64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LabelSeg {
    Word(String),
    /// `[expr]`
    Index(Expr),
    /// `[v:R]`, `[v:lo..hi]` or anonymous `[lo..hi]`; expands to one label
    /// per value and binds `var` for the rest of the branch.
    Bind { var: Option<String>, range: RangeRef },
}

/// A possibly indexed, dotted action label, e.g. `c[1].full.moveto[part]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelPattern(pub Vec<LabelSeg>);

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ActionElem {
    Label(LabelPattern),
    /// `{a, b[i]}`: one transition per member.
    Set(Vec<LabelPattern>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Branch {
    pub guard: Option<Expr>,
    /// Empty only for the terminal alternative `| END`.
    pub actions: Vec<ActionElem>,
    pub continuation: ProcExpr,
}

impl Branch {
    pub fn is_terminal(&self) -> bool {
        self.actions.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProcExpr {
    Stop,
    End,
    Error,
    Reference { name: String, args: Vec<Expr> },
    Choice(Vec<Branch>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Param {
    pub var: String,
    pub range: RangeRef,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalDef {
    pub name: String,
    pub params: Vec<Param>,
    pub body: ProcExpr,
}

/// A top-level process; the first local is the entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProcessDef {
    pub name: String,
    pub locals: Vec<LocalDef>,
}

impl ProcessDef {
    pub fn entry(&self) -> &LocalDef {
        &self.locals[0]
    }

    pub fn local(&self, name: &str) -> Option<(usize, &LocalDef)> {
        self.locals.iter().enumerate().find(|(_, l)| l.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    /// `c:`, `c[2]:` or replicated `c[1..N]:`.
    pub labeling: Option<LabelPattern>,
    pub target: String,
    pub args: Vec<Expr>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relabel {
    pub new: LabelPattern,
    pub old: LabelPattern,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompositeDef {
    pub name: String,
    pub components: Vec<Component>,
    pub relabels: Vec<Relabel>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProgressDef {
    pub name: String,
    pub actions: Vec<LabelPattern>,
}

/// A parsed compilation unit. Constants and range bounds are evaluated at
/// parse time.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Spec {
    pub constants: BTreeMap<String, i64>,
    pub ranges: BTreeMap<String, (i64, i64)>,
    pub process_defs: Vec<ProcessDef>,
    pub composite_defs: Vec<CompositeDef>,
    pub property_names: BTreeSet<String>,
    pub progress_defs: Vec<ProgressDef>,
}

impl Spec {
    pub fn process(&self, name: &str) -> Option<&ProcessDef> {
        self.process_defs.iter().find(|p| p.name == name)
    }

    pub fn composite(&self, name: &str) -> Option<&CompositeDef> {
        self.composite_defs.iter().find(|c| c.name == name)
    }

    pub fn is_property(&self, name: &str) -> bool {
        self.property_names.contains(name)
    }

    pub fn range_bounds(&self, r: &RangeRef) -> Option<(i64, i64)> {
        match r {
            RangeRef::Named(n) => self.ranges.get(n).copied(),
            RangeRef::Inline(lo, hi) => Some((*lo, *hi)),
        }
    }

    /// The last composite if any, otherwise the first process.
    pub fn default_target(&self) -> Option<&str> {
        self.composite_defs
            .last()
            .map(|c| c.name.as_str())
            .or_else(|| self.process_defs.first().map(|p| p.name.as_str()))
    }
}
