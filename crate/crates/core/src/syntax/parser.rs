//! Recursive descent parser for FSP-lite.
//!
//! `|` is the choice separator and `||` separates composite components,
//! except inside the parentheses of a `when` guard, where both mean
//! boolean disjunction.

use std::collections::{BTreeMap, HashSet};

use super::ast::*;
use super::eval::{eval_int, Env};
use super::token::{tokenize, Keyword, Punct, Token, TokenKind};
use super::ParseError;

pub fn parse(tokens: &[Token]) -> Result<Spec, ParseError> {
    let mut p = Parser {
        toks: tokens,
        pos: 0,
        spec: Spec::default(),
        names: HashSet::new(),
        in_guard: false,
        ref_sites: Vec::new(),
    };
    while !p.at_end() {
        p.item()?;
    }
    p.resolve()?;
    Ok(p.spec)
}

/// Parses a standalone expression; `|`/`||` are accepted as disjunction.
pub fn parse_expr(text: &str) -> Result<Expr, ParseError> {
    let toks = tokenize(text)?;
    let mut p = Parser {
        toks: &toks,
        pos: 0,
        spec: Spec::default(),
        names: HashSet::new(),
        in_guard: true,
        ref_sites: Vec::new(),
    };
    let e = p.expr()?;
    if !p.at_end() {
        return Err(p.unexpected("end of expression"));
    }
    Ok(e)
}

/// Where a process reference was written, for post-parse resolution.
struct RefSite {
    def: Option<usize>,
    name: String,
    arity: usize,
    line: usize,
    column: usize,
    composite: bool,
}

struct Parser<'t> {
    toks: &'t [Token],
    pos: usize,
    spec: Spec,
    names: HashSet<String>,
    in_guard: bool,
    ref_sites: Vec<RefSite>,
}

type PResult<T> = Result<T, ParseError>;

impl<'t> Parser<'t> {
    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn peek(&self) -> Option<&'t Token> {
        self.toks.get(self.pos)
    }

    fn peek_at(&self, n: usize) -> Option<&'t Token> {
        self.toks.get(self.pos + n)
    }

    fn peek_kind(&self) -> Option<TokenKind> {
        self.peek().map(|t| t.kind)
    }

    fn is_punct(&self, p: Punct) -> bool {
        self.peek_kind() == Some(TokenKind::Punct(p))
    }

    fn is_kw(&self, k: Keyword) -> bool {
        self.peek_kind() == Some(TokenKind::Keyword(k))
    }

    fn next(&mut self) -> Option<&'t Token> {
        let t = self.toks.get(self.pos);
        self.pos += 1;
        t
    }

    /// Position of the current token, or just past the last one at EOF.
    fn here(&self) -> (usize, usize) {
        match self.peek() {
            Some(t) => (t.line, t.column),
            None => match self.toks.last() {
                Some(t) => (t.line, t.column + t.text.chars().count()),
                None => (1, 1),
            },
        }
    }

    fn unexpected(&self, expected: &str) -> ParseError {
        let (line, column) = self.here();
        ParseError::Syntax {
            line,
            column,
            expected: expected.to_string(),
            found: self
                .peek()
                .map_or_else(|| "end of input".to_string(), |t| t.to_string()),
        }
    }

    fn eat(&mut self, p: Punct) -> bool {
        if self.is_punct(p) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, p: Punct) -> PResult<()> {
        if self.eat(p) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{}`", p.as_str())))
        }
    }

    fn expect_kind(&mut self, kind: TokenKind, what: &str) -> PResult<&'t Token> {
        match self.peek() {
            Some(t) if t.kind == kind => {
                self.pos += 1;
                Ok(t)
            }
            _ => Err(self.unexpected(what)),
        }
    }

    fn upper(&mut self) -> PResult<&'t Token> {
        self.expect_kind(TokenKind::UpperIdent, "process identifier")
    }

    fn declare(&mut self, tok: &Token) -> PResult<()> {
        if !self.names.insert(tok.text.clone()) {
            return Err(ParseError::DuplicateDefinition {
                name: tok.text.clone(),
                line: tok.line,
                column: tok.column,
            });
        }
        Ok(())
    }

    fn const_int(&self, e: &Expr, at: (usize, usize)) -> PResult<i64> {
        eval_int(e, &Env::new(), &self.spec.constants).map_err(|source| ParseError::Eval {
            source,
            line: at.0,
            column: at.1,
        })
    }

    // ---- items ----

    fn item(&mut self) -> PResult<()> {
        match self.peek_kind() {
            Some(TokenKind::Keyword(Keyword::Const)) => self.constant(),
            Some(TokenKind::Keyword(Keyword::Range)) => self.range_decl(),
            Some(TokenKind::Keyword(Keyword::Property)) => {
                self.pos += 1;
                let def = self.process_def()?;
                self.spec.property_names.insert(def);
                Ok(())
            }
            Some(TokenKind::Keyword(Keyword::Progress)) => self.progress(),
            Some(TokenKind::Punct(Punct::BarBar)) => self.composite(),
            Some(TokenKind::UpperIdent) => self.process_def().map(drop),
            _ => Err(self.unexpected("definition")),
        }
    }

    fn constant(&mut self) -> PResult<()> {
        self.pos += 1;
        let name = match self.peek_kind() {
            Some(TokenKind::UpperIdent | TokenKind::Ident) => self.next().unwrap(),
            _ => return Err(self.unexpected("constant name")),
        };
        self.declare(name)?;
        self.expect(Punct::Assign)?;
        let at = self.here();
        let e = self.expr()?;
        let v = self.const_int(&e, at)?;
        self.spec.constants.insert(name.text.clone(), v);
        Ok(())
    }

    fn range_decl(&mut self) -> PResult<()> {
        self.pos += 1;
        let name = self.upper()?;
        self.declare(name)?;
        self.expect(Punct::Assign)?;
        let (lo, hi) = self.bounds()?;
        self.spec.ranges.insert(name.text.clone(), (lo, hi));
        Ok(())
    }

    /// `expr .. expr`, evaluated against constants.
    fn bounds(&mut self) -> PResult<(i64, i64)> {
        let at = self.here();
        let lo = self.expr()?;
        self.expect(Punct::DotDot)?;
        self.bounds_from(lo, at)
    }

    fn bounds_from(&mut self, lo: Expr, at: (usize, usize)) -> PResult<(i64, i64)> {
        let hi_at = self.here();
        let hi = self.expr()?;
        let lo = self.const_int(&lo, at)?;
        let hi = self.const_int(&hi, hi_at)?;
        if lo > hi {
            return Err(ParseError::EmptyRange { lo, hi, line: at.0, column: at.1 });
        }
        Ok((lo, hi))
    }

    /// `R` (declared range) or `lo..hi`.
    fn range_ref(&mut self) -> PResult<RangeRef> {
        let at = self.here();
        let tok = self.peek();
        let e = self.expr()?;
        if self.eat(Punct::DotDot) {
            let (lo, hi) = self.bounds_from(e, at)?;
            return Ok(RangeRef::Inline(lo, hi));
        }
        match e {
            Expr::Var(name) if self.spec.ranges.contains_key(&name) => Ok(RangeRef::Named(name)),
            Expr::Var(name) => Err(ParseError::UnresolvedReference {
                name,
                line: at.0,
                column: at.1,
            }),
            _ => Err(ParseError::Syntax {
                line: at.0,
                column: at.1,
                expected: "range".into(),
                found: tok.map_or_else(|| "end of input".into(), |t| t.to_string()),
            }),
        }
    }

    fn progress(&mut self) -> PResult<()> {
        self.pos += 1;
        let name = self.upper()?;
        self.declare(name)?;
        self.expect(Punct::Assign)?;
        let actions = self.label_set(true)?;
        self.eat(Punct::Dot);
        self.spec.progress_defs.push(ProgressDef { name: name.text.clone(), actions });
        Ok(())
    }

    /// `{ pattern, ... }`, non-empty.
    fn label_set(&mut self, allow_bind: bool) -> PResult<Vec<LabelPattern>> {
        self.expect(Punct::LBrace)?;
        let mut out = Vec::new();
        loop {
            let at = self.here();
            let p = self.label_pattern()?;
            if !allow_bind && p.0.iter().any(|s| matches!(s, LabelSeg::Bind { .. })) {
                return Err(ParseError::Syntax {
                    line: at.0,
                    column: at.1,
                    expected: "label without binding index".into(),
                    found: "binding index in label set".into(),
                });
            }
            out.push(p);
            if !self.eat(Punct::Comma) {
                break;
            }
        }
        self.expect(Punct::RBrace)?;
        Ok(out)
    }

    fn composite(&mut self) -> PResult<()> {
        self.pos += 1;
        let name = self.upper()?;
        self.declare(name)?;
        self.expect(Punct::Assign)?;
        let parens = self.eat(Punct::LParen);
        let mut components = vec![self.component()?];
        while self.eat(Punct::BarBar) {
            components.push(self.component()?);
        }
        if parens {
            self.expect(Punct::RParen)?;
        }
        let mut relabels = Vec::new();
        if self.eat(Punct::Slash) {
            self.expect(Punct::LBrace)?;
            loop {
                let new = self.label_pattern()?;
                self.expect(Punct::Slash)?;
                let old = self.label_pattern()?;
                relabels.push(Relabel { new, old });
                if !self.eat(Punct::Comma) {
                    break;
                }
            }
            self.expect(Punct::RBrace)?;
        }
        self.expect(Punct::Dot)?;
        self.spec.composite_defs.push(CompositeDef {
            name: name.text.clone(),
            components,
            relabels,
        });
        Ok(())
    }

    fn component(&mut self) -> PResult<Component> {
        let labeling = if self.peek_kind() == Some(TokenKind::Ident) {
            let l = self.label_pattern()?;
            self.expect(Punct::Colon)?;
            Some(l)
        } else {
            None
        };
        let target = self.upper()?;
        let args = self.args()?;
        self.ref_sites.push(RefSite {
            def: None,
            name: target.text.clone(),
            arity: args.len(),
            line: target.line,
            column: target.column,
            composite: true,
        });
        Ok(Component { labeling, target: target.text.clone(), args })
    }

    /// Returns the definition name.
    fn process_def(&mut self) -> PResult<String> {
        let def_index = self.spec.process_defs.len();
        let first = self.upper()?;
        self.declare(first)?;
        let mut locals = Vec::new();
        let mut local_names = HashSet::new();
        let mut tok = first;
        loop {
            if !local_names.insert(tok.text.clone()) {
                return Err(ParseError::DuplicateDefinition {
                    name: tok.text.clone(),
                    line: tok.line,
                    column: tok.column,
                });
            }
            let params = self.params()?;
            self.expect(Punct::Assign)?;
            let body = self.proc_expr(def_index)?;
            locals.push(LocalDef { name: tok.text.clone(), params, body });
            if self.eat(Punct::Comma) {
                tok = self.upper()?;
            } else {
                self.expect(Punct::Dot)?;
                break;
            }
        }
        let name = first.text.clone();
        self.spec.process_defs.push(ProcessDef { name: name.clone(), locals });
        Ok(name)
    }

    fn params(&mut self) -> PResult<Vec<Param>> {
        let mut out = Vec::new();
        while self.eat(Punct::LBracket) {
            let var = self.expect_kind(TokenKind::Ident, "parameter name")?;
            self.expect(Punct::Colon)?;
            let range = self.range_ref()?;
            self.expect(Punct::RBracket)?;
            out.push(Param { var: var.text.clone(), range });
        }
        Ok(out)
    }

    fn args(&mut self) -> PResult<Vec<Expr>> {
        let mut out = Vec::new();
        while self.eat(Punct::LBracket) {
            out.push(self.expr()?);
            self.expect(Punct::RBracket)?;
        }
        Ok(out)
    }

    // ---- process expressions ----

    fn proc_expr(&mut self, def: usize) -> PResult<ProcExpr> {
        match self.peek_kind() {
            Some(TokenKind::Keyword(Keyword::Stop)) => {
                self.pos += 1;
                Ok(ProcExpr::Stop)
            }
            Some(TokenKind::Keyword(Keyword::End)) => {
                self.pos += 1;
                Ok(ProcExpr::End)
            }
            Some(TokenKind::Keyword(Keyword::Error)) => {
                self.pos += 1;
                Ok(ProcExpr::Error)
            }
            Some(TokenKind::UpperIdent) => {
                let name = self.next().unwrap();
                let args = self.args()?;
                self.ref_sites.push(RefSite {
                    def: Some(def),
                    name: name.text.clone(),
                    arity: args.len(),
                    line: name.line,
                    column: name.column,
                    composite: false,
                });
                Ok(ProcExpr::Reference { name: name.text.clone(), args })
            }
            Some(TokenKind::Punct(Punct::LParen)) => {
                self.pos += 1;
                let mut branches = vec![self.branch(def)?];
                while self.eat(Punct::Bar) {
                    branches.push(self.branch(def)?);
                }
                self.expect(Punct::RParen)?;
                Ok(ProcExpr::Choice(branches))
            }
            Some(TokenKind::Ident | TokenKind::Keyword(Keyword::When))
            | Some(TokenKind::Punct(Punct::LBrace)) => Ok(ProcExpr::Choice(vec![self.branch(def)?])),
            _ => Err(self.unexpected("process expression")),
        }
    }

    fn branch(&mut self, def: usize) -> PResult<Branch> {
        let guard = if self.is_kw(Keyword::When) {
            self.pos += 1;
            self.expect(Punct::LParen)?;
            let saved = std::mem::replace(&mut self.in_guard, true);
            let g = self.expr();
            self.in_guard = saved;
            let g = g?;
            self.expect(Punct::RParen)?;
            Some(g)
        } else {
            None
        };
        if self.is_kw(Keyword::End) {
            self.pos += 1;
            return Ok(Branch { guard, actions: Vec::new(), continuation: ProcExpr::End });
        }
        let mut actions = vec![self.action()?];
        self.expect(Punct::Arrow)?;
        while let Some(TokenKind::Ident | TokenKind::Punct(Punct::LBrace)) = self.peek_kind() {
            actions.push(self.action()?);
            self.expect(Punct::Arrow)?;
        }
        let continuation = self.proc_expr(def)?;
        Ok(Branch { guard, actions, continuation })
    }

    fn action(&mut self) -> PResult<ActionElem> {
        if self.is_punct(Punct::LBrace) {
            Ok(ActionElem::Set(self.label_set(false)?))
        } else {
            Ok(ActionElem::Label(self.label_pattern()?))
        }
    }

    fn label_pattern(&mut self) -> PResult<LabelPattern> {
        let first = self.expect_kind(TokenKind::Ident, "action label")?;
        let mut segs = vec![LabelSeg::Word(first.text.clone())];
        loop {
            if self.is_punct(Punct::Dot)
                && self.peek_at(1).is_some_and(|t| t.kind == TokenKind::Ident)
            {
                self.pos += 1;
                segs.push(LabelSeg::Word(self.next().unwrap().text.clone()));
            } else if self.eat(Punct::LBracket) {
                segs.push(self.index()?);
                self.expect(Punct::RBracket)?;
            } else {
                break;
            }
        }
        Ok(LabelPattern(segs))
    }

    fn index(&mut self) -> PResult<LabelSeg> {
        if self.peek_kind() == Some(TokenKind::Ident)
            && self.peek_at(1).is_some_and(|t| t.kind == TokenKind::Punct(Punct::Colon))
        {
            let var = self.next().unwrap().text.clone();
            self.pos += 1;
            let range = self.range_ref()?;
            return Ok(LabelSeg::Bind { var: Some(var), range });
        }
        let at = self.here();
        let e = self.expr()?;
        if self.eat(Punct::DotDot) {
            let (lo, hi) = self.bounds_from(e, at)?;
            return Ok(LabelSeg::Bind { var: None, range: RangeRef::Inline(lo, hi) });
        }
        Ok(LabelSeg::Index(e))
    }

    // ---- expressions ----

    pub(super) fn expr(&mut self) -> PResult<Expr> {
        self.binary(1)
    }

    fn binop(&self) -> Option<BinOp> {
        let TokenKind::Punct(p) = self.peek_kind()? else {
            return None;
        };
        Some(match p {
            Punct::Bar | Punct::BarBar if self.in_guard => BinOp::Or,
            Punct::And => BinOp::And,
            Punct::EqEq => BinOp::Eq,
            Punct::NotEq => BinOp::Ne,
            Punct::Lt => BinOp::Lt,
            Punct::Le => BinOp::Le,
            Punct::Gt => BinOp::Gt,
            Punct::Ge => BinOp::Ge,
            Punct::Plus => BinOp::Add,
            Punct::Minus => BinOp::Sub,
            Punct::Star => BinOp::Mul,
            Punct::Slash => BinOp::Div,
            Punct::Percent => BinOp::Mod,
            _ => return None,
        })
    }

    fn binary(&mut self, min_prec: u8) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        while let Some(op) = self.binop() {
            if op.precedence() < min_prec {
                break;
            }
            self.pos += 1;
            let rhs = self.binary(op.precedence() + 1)?;
            lhs = Expr::binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Expr> {
        if self.eat(Punct::Minus) {
            return Ok(Expr::Unary(UnOp::Neg, Box::new(self.unary()?)));
        }
        if self.eat(Punct::Not) {
            return Ok(Expr::Unary(UnOp::Not, Box::new(self.unary()?)));
        }
        match self.peek_kind() {
            Some(TokenKind::Int) => {
                let t = self.next().unwrap();
                let n = t.text.parse().map_err(|_| ParseError::Syntax {
                    line: t.line,
                    column: t.column,
                    expected: "64-bit integer".into(),
                    found: t.to_string(),
                })?;
                Ok(Expr::Int(n))
            }
            Some(TokenKind::Ident | TokenKind::UpperIdent) => {
                Ok(Expr::Var(self.next().unwrap().text.clone()))
            }
            Some(TokenKind::Punct(Punct::LParen)) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(Punct::RParen)?;
                Ok(e)
            }
            _ => Err(self.unexpected("expression")),
        }
    }

    // ---- resolution ----

    fn resolve(&mut self) -> PResult<()> {
        let entries: BTreeMap<&str, usize> = self
            .spec
            .process_defs
            .iter()
            .map(|d| (d.name.as_str(), d.entry().params.len()))
            .collect();
        for site in &self.ref_sites {
            let local = site
                .def
                .and_then(|d| self.spec.process_defs[d].local(&site.name))
                .map(|(_, l)| l.params.len());
            let expected = match local.or_else(|| entries.get(site.name.as_str()).copied()) {
                Some(n) => n,
                None if site.composite && self.spec.composite(&site.name).is_some() => 0,
                None => {
                    return Err(ParseError::UnresolvedReference {
                        name: site.name.clone(),
                        line: site.line,
                        column: site.column,
                    })
                }
            };
            if expected != site.arity {
                return Err(ParseError::ArityMismatch {
                    name: site.name.clone(),
                    expected,
                    found: site.arity,
                    line: site.line,
                    column: site.column,
                });
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_str;

    #[test]
    fn smallest_program() {
        let s = parse_str("P = STOP.").unwrap();
        assert_eq!(s.process_defs.len(), 1);
        assert_eq!(s.process_defs[0].locals[0].body, ProcExpr::Stop);
    }

    #[test]
    fn guards_and_bindings() {
        let s = parse_str(
            "range R = 1..3\nP[v:R] = (when (v==1 | v==2) a[v] -> P[v+1] | b[s:R] -> {c, d[s]} -> P[1]).",
        )
        .unwrap();
        let ProcExpr::Choice(bs) = &s.process_defs[0].locals[0].body else { panic!() };
        assert_eq!(bs.len(), 2);
        assert!(matches!(&bs[0].guard, Some(Expr::Binary(BinOp::Or, _, _))));
        assert_eq!(bs[1].actions.len(), 2);
        assert!(matches!(
            &bs[1].actions[0],
            ActionElem::Label(LabelPattern(segs)) if matches!(&segs[1], LabelSeg::Bind { var: Some(v), .. } if v == "s")
        ));
        assert!(matches!(&bs[1].actions[1], ActionElem::Set(m) if m.len() == 2));
    }

    #[test]
    fn dotted_labels_and_replication() {
        let s = parse_str(
            "const N = 2\nP = (c[1].full.moveto[1] -> STOP).\n||S = (c[1..N]:P || d:P)/{x.y/c}.",
        )
        .unwrap();
        let c = &s.composite_defs[0];
        assert_eq!(c.components.len(), 2);
        assert_eq!(
            c.components[0].labeling,
            Some(LabelPattern(vec![
                LabelSeg::Word("c".into()),
                LabelSeg::Bind { var: None, range: RangeRef::Inline(1, 2) }
            ]))
        );
        assert_eq!(c.relabels.len(), 1);
    }

    #[test]
    fn syntax_error_position() {
        let err = parse_str("P = (a -> P\n  | b -> ).").unwrap_err();
        assert_eq!(err.position(), (2, 10));
        assert!(matches!(err, ParseError::Syntax { .. }));
    }

    #[test]
    fn dangling_choice_bar_rejected() {
        let err = parse_str("P = (a -> P\n| ).").unwrap_err();
        assert_eq!(err.position(), (2, 3));
    }

    #[test]
    fn eof_error_position() {
        let err = parse_str("P = (a -> P)").unwrap_err();
        assert_eq!(err.position(), (1, 13));
    }

    #[test]
    fn duplicates_and_unresolved() {
        assert!(matches!(
            parse_str("P = STOP.\nP = STOP."),
            Err(ParseError::DuplicateDefinition { name, line: 2, .. }) if name == "P"
        ));
        assert!(matches!(
            parse_str("const P = 1\nP = STOP."),
            Err(ParseError::DuplicateDefinition { .. })
        ));
        assert!(matches!(
            parse_str("P = (a -> Q)."),
            Err(ParseError::UnresolvedReference { name, .. }) if name == "Q"
        ));
        assert!(matches!(
            parse_str("P = (a -> Q[1]), Q = STOP."),
            Err(ParseError::ArityMismatch { expected: 0, found: 1, .. })
        ));
        assert!(matches!(parse_str("||C = (X)."), Err(ParseError::UnresolvedReference { .. })));
    }

    #[test]
    fn forward_references_across_definitions() {
        assert!(parse_str("P = (a -> Q).\nQ = (b -> P).").is_ok());
        assert!(parse_str("||C = (D).\n||D = (P).\nP = STOP.").is_ok());
    }

    #[test]
    fn namespace_violations() {
        // lowercase process name, uppercase action
        assert!(parse_str("p = STOP.").is_err());
        assert!(parse_str("P = (A -> P).").is_err());
    }

    #[test]
    fn ranges_and_progress() {
        assert!(matches!(parse_str("range R = 3..1"), Err(ParseError::EmptyRange { .. })));
        assert!(parse_str("progress P = {}").is_err());
        let s = parse_str("progress U = {waitforunloading}\nprogress V = {a[1..2], b}.").unwrap();
        assert_eq!(s.progress_defs.len(), 2);
        assert!(matches!(
            parse_str("range R = 0..N"),
            Err(ParseError::Eval { .. })
        ));
    }

    #[test]
    fn terminal_alternative() {
        let s = parse_str("P = (a -> P | END).").unwrap();
        let ProcExpr::Choice(bs) = &s.process_defs[0].locals[0].body else { panic!() };
        assert!(bs[1].is_terminal());
    }

    #[test]
    fn bar_outside_guard_is_not_disjunction() {
        // `|` after an index expression ends the branch instead of extending it
        let s = parse_str("P = (a[1] -> P | b -> P).").unwrap();
        let ProcExpr::Choice(bs) = &s.process_defs[0].locals[0].body else { panic!() };
        assert_eq!(bs.len(), 2);
    }
}
