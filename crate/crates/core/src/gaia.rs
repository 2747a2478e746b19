//! Gaia role liveness expressions and their translation to FSP-lite.
//!
//! A role schema is a list of `Name = expr` definitions, the first being
//! the role itself. Operators: `.` sequence, `|` choice, postfix `*` and
//! `+`, `[x]` option, parentheses. Activities are lowercased to become
//! action labels.
//!
//! Translation builds the position (Glushkov) automaton of the inlined
//! entry expression and determinizes it by subset construction. Accepting
//! states get an `END` alternative, so complete traces (from the initial
//! state to an end state) are exactly the words of the expression.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use thiserror::Error;

use crate::syntax::{ActionElem, Branch, LabelPattern, LabelSeg, LocalDef, ProcExpr, ProcessDef, Spec};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LivenessExpr {
    Atom(String),
    Seq(Vec<LivenessExpr>),
    Choice(Vec<LivenessExpr>),
    Star(Box<LivenessExpr>),
    Plus(Box<LivenessExpr>),
    Optional(Box<LivenessExpr>),
    Ref(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GaiaError {
    #[error("{line}:{column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("{line}:{column}: unsupported operator `{operator}`{hint}")]
    Unsupported {
        line: usize,
        column: usize,
        operator: String,
        hint: &'static str,
    },
    #[error("unresolved reference `{0}`")]
    UnresolvedRef(String),
    #[error("cyclic reference through `{0}`")]
    CyclicRef(String),
    #[error("duplicate definition `{0}`")]
    Duplicate(String),
    #[error("no definitions")]
    Empty,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct GaiaOptions {
    /// Read `!` as choice. Off by default; `!` is not a standard Gaia
    /// operator.
    pub bang_as_choice: bool,
}

/// A role's liveness definitions; the first is the entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoleLiveness {
    pub role: String,
    pub definitions: Vec<(String, LivenessExpr)>,
    /// Lowercased action label -> activity name as written.
    pub activities: BTreeMap<String, String>,
}

impl RoleLiveness {
    pub fn get(&self, name: &str) -> Option<&LivenessExpr> {
        self.definitions.iter().find(|(n, _)| n == name).map(|(_, e)| e)
    }

    /// The same schema with `name` as its entry.
    pub fn with_entry(&self, name: &str) -> Option<RoleLiveness> {
        let i = self.definitions.iter().position(|(n, _)| n == name)?;
        let mut definitions = self.definitions.clone();
        let entry = definitions.remove(i);
        definitions.insert(0, entry);
        Some(RoleLiveness { role: name.to_string(), definitions, activities: self.activities.clone() })
    }

    /// The entry expression with every reference substituted.
    pub fn inlined(&self) -> LivenessExpr {
        self.inline(&self.definitions[0].1)
    }

    fn inline(&self, e: &LivenessExpr) -> LivenessExpr {
        use LivenessExpr::*;
        match e {
            Atom(a) => Atom(a.clone()),
            Ref(r) => self.inline(self.get(r).expect("references resolved at parse time")),
            Seq(v) => Seq(v.iter().map(|x| self.inline(x)).collect()),
            Choice(v) => Choice(v.iter().map(|x| self.inline(x)).collect()),
            Star(x) => Star(Box::new(self.inline(x))),
            Plus(x) => Plus(Box::new(self.inline(x))),
            Optional(x) => Optional(Box::new(self.inline(x))),
        }
    }
}

// ---- lexing ----

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Eq,
    Dot,
    Bar,
    Bang,
    Star,
    Plus,
    LBrack,
    RBrack,
    LParen,
    RParen,
}

struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, GaiaError> {
    let mut out = Vec::new();
    for (li, line) in text.lines().enumerate() {
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let (lno, col) = (li + 1, i + 1);
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            if c == '/' && chars.get(i + 1) == Some(&'/') {
                break;
            }
            if c.is_ascii_alphabetic() {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                out.push(Spanned { tok: Tok::Ident(word), line: lno, column: col });
                continue;
            }
            let tok = match c {
                '=' => Tok::Eq,
                '.' => Tok::Dot,
                '|' if chars.get(i + 1) == Some(&'|') => {
                    return Err(GaiaError::Unsupported {
                        line: lno,
                        column: col,
                        operator: "||".into(),
                        hint: " (interleaving is not supported)",
                    })
                }
                '|' => Tok::Bar,
                '!' => Tok::Bang,
                '*' => Tok::Star,
                '+' => Tok::Plus,
                '[' => Tok::LBrack,
                ']' => Tok::RBrack,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                'ω' => {
                    return Err(GaiaError::Unsupported {
                        line: lno,
                        column: col,
                        operator: "ω".into(),
                        hint: " (infinite repetition is not supported)",
                    })
                }
                other => {
                    return Err(GaiaError::Syntax {
                        line: lno,
                        column: col,
                        message: format!("unexpected character `{other}`"),
                    })
                }
            };
            out.push(Spanned { tok, line: lno, column: col });
            i += 1;
        }
    }
    Ok(out)
}

// ---- parsing ----

/// Identifiers are classified after all definitions are known.
enum Raw {
    Name(String),
    Seq(Vec<Raw>),
    Choice(Vec<Raw>),
    Star(Box<Raw>),
    Plus(Box<Raw>),
    Optional(Box<Raw>),
}

struct Parser<'a> {
    toks: &'a [Spanned],
    pos: usize,
    opts: GaiaOptions,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn err(&self, message: &str) -> GaiaError {
        let (line, column) = match self.toks.get(self.pos) {
            Some(s) => (s.line, s.column),
            None => self.toks.last().map_or((1, 1), |s| (s.line, s.column + 1)),
        };
        let found = match self.peek() {
            Some(t) => format!("{t:?}"),
            None => "end of input".into(),
        };
        GaiaError::Syntax { line, column, message: format!("expected {message}, found {found}") }
    }

    fn starts_definition(&self) -> bool {
        matches!(self.peek(), Some(Tok::Ident(_)))
            && matches!(self.toks.get(self.pos + 1).map(|s| &s.tok), Some(Tok::Eq))
    }

    fn definition(&mut self) -> Result<(String, Raw), GaiaError> {
        let name = match self.peek() {
            Some(Tok::Ident(n)) => n.clone(),
            _ => return Err(self.err("definition name")),
        };
        self.pos += 1;
        if self.peek() != Some(&Tok::Eq) {
            return Err(self.err("`=`"));
        }
        self.pos += 1;
        let e = self.choice()?;
        if self.pos < self.toks.len() && !self.starts_definition() {
            return Err(self.err("operator or new definition"));
        }
        Ok((name, e))
    }

    fn choice(&mut self) -> Result<Raw, GaiaError> {
        let mut alts = vec![self.seq()?];
        loop {
            match self.peek() {
                Some(Tok::Bar) => {}
                Some(Tok::Bang) if self.opts.bang_as_choice => {}
                Some(Tok::Bang) => {
                    let s = &self.toks[self.pos];
                    return Err(GaiaError::Unsupported {
                        line: s.line,
                        column: s.column,
                        operator: "!".into(),
                        hint: " (enable --gaia-bang-as-choice to read it as `|`)",
                    });
                }
                _ => break,
            }
            self.pos += 1;
            alts.push(self.seq()?);
        }
        Ok(if alts.len() == 1 { alts.pop().unwrap() } else { Raw::Choice(alts) })
    }

    fn seq(&mut self) -> Result<Raw, GaiaError> {
        let mut items = vec![self.postfix()?];
        while self.peek() == Some(&Tok::Dot) {
            self.pos += 1;
            items.push(self.postfix()?);
        }
        Ok(if items.len() == 1 { items.pop().unwrap() } else { Raw::Seq(items) })
    }

    fn postfix(&mut self) -> Result<Raw, GaiaError> {
        let mut e = self.primary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => e = Raw::Star(Box::new(e)),
                Some(Tok::Plus) => e = Raw::Plus(Box::new(e)),
                _ => break,
            }
            self.pos += 1;
        }
        Ok(e)
    }

    fn primary(&mut self) -> Result<Raw, GaiaError> {
        match self.peek() {
            Some(Tok::Ident(n)) if !self.starts_definition() => {
                let n = n.clone();
                self.pos += 1;
                Ok(Raw::Name(n))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let e = self.choice()?;
                if self.peek() != Some(&Tok::RParen) {
                    return Err(self.err("`)`"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(Tok::LBrack) => {
                self.pos += 1;
                let e = self.choice()?;
                if self.peek() != Some(&Tok::RBrack) {
                    return Err(self.err("`]`"));
                }
                self.pos += 1;
                Ok(Raw::Optional(Box::new(e)))
            }
            _ => Err(self.err("activity, reference, `(` or `[`")),
        }
    }
}

pub fn parse_liveness(text: &str) -> Result<RoleLiveness, GaiaError> {
    parse_liveness_with(text, GaiaOptions::default())
}

pub fn parse_liveness_with(text: &str, opts: GaiaOptions) -> Result<RoleLiveness, GaiaError> {
    let toks = lex(text)?;
    let mut p = Parser { toks: &toks, pos: 0, opts };
    let mut raw = Vec::new();
    while p.pos < toks.len() {
        raw.push(p.definition()?);
    }
    if raw.is_empty() {
        return Err(GaiaError::Empty);
    }
    let names: BTreeSet<&str> = raw.iter().map(|(n, _)| n.as_str()).collect();
    if names.len() != raw.len() {
        let mut seen = BTreeSet::new();
        let dup = raw.iter().find(|(n, _)| !seen.insert(n.as_str())).unwrap();
        return Err(GaiaError::Duplicate(dup.0.clone()));
    }
    let mut activities = BTreeMap::new();
    let mut definitions = Vec::new();
    for (name, r) in &raw {
        definitions.push((name.clone(), classify(r, &names, &mut activities)?));
    }
    let role = RoleLiveness { role: raw[0].0.clone(), definitions, activities };
    check_acyclic(&role)?;
    Ok(role)
}

fn classify(
    r: &Raw,
    defined: &BTreeSet<&str>,
    activities: &mut BTreeMap<String, String>,
) -> Result<LivenessExpr, GaiaError> {
    use LivenessExpr as L;
    let mut go = |x: &Raw| classify(x, defined, activities);
    Ok(match r {
        Raw::Name(n) if defined.contains(n.as_str()) => L::Ref(n.clone()),
        Raw::Name(n) if n.starts_with(|c: char| c.is_ascii_uppercase()) => {
            return Err(GaiaError::UnresolvedRef(n.clone()))
        }
        Raw::Name(n) => {
            let canon = n.to_ascii_lowercase();
            activities.entry(canon.clone()).or_insert_with(|| n.clone());
            L::Atom(canon)
        }
        Raw::Seq(v) => L::Seq(v.iter().map(&mut go).collect::<Result<_, _>>()?),
        Raw::Choice(v) => L::Choice(v.iter().map(&mut go).collect::<Result<_, _>>()?),
        Raw::Star(x) => L::Star(Box::new(go(x)?)),
        Raw::Plus(x) => L::Plus(Box::new(go(x)?)),
        Raw::Optional(x) => L::Optional(Box::new(go(x)?)),
    })
}

fn refs(e: &LivenessExpr, out: &mut Vec<String>) {
    use LivenessExpr::*;
    match e {
        Atom(_) => {}
        Ref(r) => out.push(r.clone()),
        Seq(v) | Choice(v) => v.iter().for_each(|x| refs(x, out)),
        Star(x) | Plus(x) | Optional(x) => refs(x, out),
    }
}

fn check_acyclic(role: &RoleLiveness) -> Result<(), GaiaError> {
    // 0 = unvisited, 1 = in progress, 2 = done
    fn visit(role: &RoleLiveness, name: &str, state: &mut HashMap<String, u8>) -> Result<(), GaiaError> {
        match state.get(name) {
            Some(2) => return Ok(()),
            Some(1) => return Err(GaiaError::CyclicRef(name.to_string())),
            _ => {}
        }
        state.insert(name.to_string(), 1);
        let mut rs = Vec::new();
        refs(role.get(name).unwrap(), &mut rs);
        for r in rs {
            visit(role, &r, state)?;
        }
        state.insert(name.to_string(), 2);
        Ok(())
    }
    let mut state = HashMap::new();
    for (n, _) in &role.definitions {
        visit(role, n, &mut state)?;
    }
    Ok(())
}

// ---- automaton construction ----

/// Position automaton data for a reference-free expression.
struct Positions {
    labels: Vec<String>,
    follow: Vec<BTreeSet<usize>>,
}

struct Summary {
    nullable: bool,
    first: BTreeSet<usize>,
    last: BTreeSet<usize>,
}

impl Positions {
    fn walk(&mut self, e: &LivenessExpr) -> Summary {
        use LivenessExpr::*;
        match e {
            Atom(a) => {
                let p = self.labels.len();
                self.labels.push(a.clone());
                self.follow.push(BTreeSet::new());
                Summary { nullable: false, first: BTreeSet::from([p]), last: BTreeSet::from([p]) }
            }
            Ref(r) => panic!("reference `{r}` must be inlined before translation"),
            Seq(v) => {
                let mut acc = Summary { nullable: true, first: BTreeSet::new(), last: BTreeSet::new() };
                for x in v {
                    let s = self.walk(x);
                    for &l in &acc.last {
                        self.follow[l].extend(s.first.iter().copied());
                    }
                    if acc.nullable {
                        acc.first.extend(s.first.iter().copied());
                    }
                    acc.last = if s.nullable { &acc.last | &s.last } else { s.last };
                    acc.nullable &= s.nullable;
                }
                acc
            }
            Choice(v) => {
                let mut acc = Summary { nullable: false, first: BTreeSet::new(), last: BTreeSet::new() };
                for x in v {
                    let s = self.walk(x);
                    acc.nullable |= s.nullable;
                    acc.first.extend(s.first);
                    acc.last.extend(s.last);
                }
                acc
            }
            Star(x) | Plus(x) => {
                let mut s = self.walk(x);
                for &l in &s.last {
                    self.follow[l].extend(s.first.iter().copied());
                }
                if matches!(e, Star(_)) {
                    s.nullable = true;
                }
                s
            }
            Optional(x) => {
                let mut s = self.walk(x);
                s.nullable = true;
                s
            }
        }
    }
}

/// A deterministic automaton; state 0 is initial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dfa {
    pub accepting: Vec<bool>,
    /// Per state, sorted by label.
    pub transitions: Vec<Vec<(String, usize)>>,
}

/// Subset construction over the position automaton of `e` (which must be
/// reference-free). States are numbered breadth-first, labels in order.
pub fn to_dfa(e: &LivenessExpr) -> Dfa {
    let mut pos = Positions { labels: Vec::new(), follow: Vec::new() };
    let top = pos.walk(e);
    // position sets; `None` marks the initial state
    let successors = |set: &BTreeSet<Option<usize>>| {
        let mut by_label: BTreeMap<&str, BTreeSet<Option<usize>>> = BTreeMap::new();
        for q in set {
            let next = match q {
                None => &top.first,
                Some(p) => &pos.follow[*p],
            };
            for &n in next {
                by_label.entry(pos.labels[n].as_str()).or_default().insert(Some(n));
            }
        }
        by_label
    };
    let accepts = |set: &BTreeSet<Option<usize>>| {
        set.iter().any(|q| match q {
            None => top.nullable,
            Some(p) => top.last.contains(p),
        })
    };

    let start = BTreeSet::from([None]);
    let mut index = HashMap::from([(start.clone(), 0usize)]);
    let mut sets = vec![start];
    let mut queue = VecDeque::from([0usize]);
    let mut transitions = Vec::new();
    let mut accepting = Vec::new();
    while let Some(i) = queue.pop_front() {
        let set = sets[i].clone();
        accepting.push(accepts(&set));
        let mut out = Vec::new();
        for (label, next) in successors(&set) {
            let j = *index.entry(next.clone()).or_insert_with(|| {
                sets.push(next);
                queue.push_back(sets.len() - 1);
                sets.len() - 1
            });
            out.push((label.to_string(), j));
        }
        transitions.push(out);
    }
    Dfa { accepting, transitions }
}

fn process_name(role: &str) -> String {
    let mut chars = role.chars();
    match chars.next() {
        Some(c) => c.to_ascii_uppercase().to_string() + chars.as_str(),
        None => "ROLE".into(),
    }
}

/// Renders the role's entry expression as a single FSP-lite process.
pub fn to_fsp(role: &RoleLiveness) -> Spec {
    let dfa = to_dfa(&role.inlined());
    let name = process_name(&role.role);
    let local_name = |i: usize| if i == 0 { name.clone() } else { format!("{name}_{i}") };
    let locals = dfa
        .transitions
        .iter()
        .enumerate()
        .map(|(i, ts)| {
            let mut branches: Vec<Branch> = ts
                .iter()
                .map(|(label, j)| Branch {
                    guard: None,
                    actions: vec![ActionElem::Label(LabelPattern(vec![LabelSeg::Word(label.clone())]))],
                    continuation: ProcExpr::Reference { name: local_name(*j), args: vec![] },
                })
                .collect();
            let body = match (branches.is_empty(), dfa.accepting[i]) {
                (true, true) => ProcExpr::End,
                (true, false) => ProcExpr::Stop,
                (false, accepting) => {
                    if accepting {
                        branches.push(Branch { guard: None, actions: vec![], continuation: ProcExpr::End });
                    }
                    ProcExpr::Choice(branches)
                }
            };
            LocalDef { name: local_name(i), params: vec![], body }
        })
        .collect();
    Spec {
        process_defs: vec![ProcessDef { name, locals }],
        ..Spec::default()
    }
}

/// Comment header mapping emitted labels back to activity names.
pub fn activity_table(role: &RoleLiveness) -> String {
    let mut out = format!("// liveness of role {}\n", role.role);
    for (canon, original) in &role.activities {
        out.push_str(&format!("//   {canon} <- {original}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use LivenessExpr::*;

    fn atom(a: &str) -> LivenessExpr {
        Atom(a.into())
    }

    #[test]
    fn plus_of_activity() {
        let r = parse_liveness("Wait = carrierWait+").unwrap();
        assert_eq!(r.definitions[0].1, Plus(Box::new(atom("carrierwait"))));
        assert_eq!(r.activities["carrierwait"], "carrierWait");
    }

    #[test]
    fn single_atom() {
        assert_eq!(parse_liveness("R = a").unwrap().definitions[0].1, atom("a"));
    }

    #[test]
    fn sequence_with_reference() {
        let r = parse_liveness(
            "Move_full = Move.(readUnloadSign.waitForUnloading.unloadCarrier)\nMove = (readSign. movetoNext)+",
        )
        .unwrap();
        assert_eq!(
            r.definitions[0].1,
            Seq(vec![
                Ref("Move".into()),
                Seq(vec![atom("readunloadsign"), atom("waitforunloading"), atom("unloadcarrier")])
            ])
        );
        assert_eq!(r.role, "Move_full");
    }

    #[test]
    fn definitions_may_continue_across_lines() {
        let r = parse_liveness("A = a.\n  b\nB = c").unwrap();
        assert_eq!(r.definitions.len(), 2);
        assert_eq!(r.definitions[0].1, Seq(vec![atom("a"), atom("b")]));
    }

    #[test]
    fn errors() {
        assert_eq!(parse_liveness("A = B.c"), Err(GaiaError::UnresolvedRef("B".into())));
        assert_eq!(parse_liveness("A = B\nB = A"), Err(GaiaError::CyclicRef("A".into())));
        assert!(matches!(parse_liveness("A = (a.b"), Err(GaiaError::Syntax { .. })));
        assert!(matches!(parse_liveness("A = a ! b"), Err(GaiaError::Unsupported { operator, .. }) if operator == "!"));
        assert!(matches!(parse_liveness("A = a || b"), Err(GaiaError::Unsupported { .. })));
        assert!(matches!(parse_liveness("A = a b"), Err(GaiaError::Syntax { line: 1, column: 7, .. })));
        assert_eq!(parse_liveness("A = a\nA = b"), Err(GaiaError::Duplicate("A".into())));
        assert_eq!(parse_liveness("// nothing"), Err(GaiaError::Empty));
    }

    #[test]
    fn bang_flag() {
        let r = parse_liveness_with("A = a ! b", GaiaOptions { bang_as_choice: true }).unwrap();
        assert_eq!(r.definitions[0].1, Choice(vec![atom("a"), atom("b")]));
    }

    #[test]
    fn precedence() {
        let r = parse_liveness("A = a.b | c*").unwrap();
        assert_eq!(
            r.definitions[0].1,
            Choice(vec![Seq(vec![atom("a"), atom("b")]), Star(Box::new(atom("c")))])
        );
    }

    #[test]
    fn dfa_for_plus() {
        let d = to_dfa(&Plus(Box::new(atom("carrierwait"))));
        assert_eq!(d.accepting, vec![false, true]);
        assert_eq!(d.transitions, vec![vec![("carrierwait".into(), 1)], vec![("carrierwait".into(), 1)]]);
    }

    #[test]
    fn dfa_for_sequence_plus() {
        let d = to_dfa(&Plus(Box::new(Seq(vec![atom("readsign"), atom("movetonext")]))));
        assert_eq!(d.accepting, vec![false, false, true]);
        assert_eq!(d.transitions[0], vec![("readsign".to_string(), 1)]);
        assert_eq!(d.transitions[1], vec![("movetonext".to_string(), 2)]);
        assert_eq!(d.transitions[2], vec![("readsign".to_string(), 1)]);
    }

    #[test]
    fn dfa_for_option() {
        let d = to_dfa(&Optional(Box::new(atom("a"))));
        assert_eq!(d.accepting, vec![true, true]);
        assert_eq!(d.transitions, vec![vec![("a".into(), 1)], vec![]]);
    }

    #[test]
    fn shared_first_labels_are_determinized() {
        // a.b | a.c: both alternatives start with `a`
        let d = to_dfa(&Choice(vec![Seq(vec![atom("a"), atom("b")]), Seq(vec![atom("a"), atom("c")])]));
        assert_eq!(d.transitions[0].len(), 1);
        assert_eq!(d.transitions[1].len(), 2);
    }

    #[test]
    fn fsp_rendering() {
        let spec = to_fsp(&parse_liveness("R = [a]").unwrap());
        let text = crate::syntax::format(&spec);
        assert_eq!(text, "R = (a -> R_1\n    | END),\nR_1 = END.\n");
    }
}
