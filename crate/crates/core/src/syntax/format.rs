//! Canonical FSP-lite printer. Output re-parses to a structurally equal
//! `Spec`.

use std::fmt::Write;

use super::ast::*;

pub fn format(spec: &Spec) -> String {
    let mut out = String::new();
    for (name, v) in &spec.constants {
        writeln!(out, "const {name} = {v}").unwrap();
    }
    for (name, (lo, hi)) in &spec.ranges {
        writeln!(out, "range {name} = {lo}..{hi}").unwrap();
    }
    for def in &spec.process_defs {
        sep(&mut out);
        if spec.is_property(&def.name) {
            out.push_str("property ");
        }
        for (i, local) in def.locals.iter().enumerate() {
            if i > 0 {
                out.push_str(",\n");
            }
            out.push_str(&local.name);
            for p in &local.params {
                write!(out, "[{}:{}]", p.var, range_ref(&p.range)).unwrap();
            }
            out.push_str(" = ");
            body(&mut out, &local.body);
        }
        out.push_str(".\n");
    }
    for c in &spec.composite_defs {
        sep(&mut out);
        let comps: Vec<String> = c
            .components
            .iter()
            .map(|comp| {
                let mut s = String::new();
                if let Some(l) = &comp.labeling {
                    write!(s, "{}:", pattern(l)).unwrap();
                }
                s.push_str(&comp.target);
                args(&mut s, &comp.args);
                s
            })
            .collect();
        write!(out, "||{} = ({})", c.name, comps.join(" || ")).unwrap();
        if !c.relabels.is_empty() {
            let pairs: Vec<String> = c
                .relabels
                .iter()
                .map(|r| format!("{}/{}", pattern(&r.new), pattern(&r.old)))
                .collect();
            write!(out, "/{{{}}}", pairs.join(", ")).unwrap();
        }
        out.push_str(".\n");
    }
    if !spec.progress_defs.is_empty() {
        sep(&mut out);
    }
    for p in &spec.progress_defs {
        let set: Vec<String> = p.actions.iter().map(pattern).collect();
        writeln!(out, "progress {} = {{{}}}", p.name, set.join(", ")).unwrap();
    }
    out
}

fn sep(out: &mut String) {
    if !out.is_empty() && !out.ends_with("\n\n") {
        out.push('\n');
    }
}

fn range_ref(r: &RangeRef) -> String {
    match r {
        RangeRef::Named(n) => n.clone(),
        RangeRef::Inline(lo, hi) => format!("{lo}..{hi}"),
    }
}

fn args(out: &mut String, args: &[Expr]) {
    for a in args {
        write!(out, "[{}]", format_expr(a)).unwrap();
    }
}

/// Top-level choices are laid out one branch per line.
fn body(out: &mut String, e: &ProcExpr) {
    match e {
        ProcExpr::Choice(bs) if bs.len() > 1 => {
            out.push('(');
            for (i, b) in bs.iter().enumerate() {
                if i > 0 {
                    out.push_str("\n    | ");
                }
                branch(out, b);
            }
            out.push(')');
        }
        _ => proc_expr(out, e),
    }
}

fn proc_expr(out: &mut String, e: &ProcExpr) {
    match e {
        ProcExpr::Stop => out.push_str("STOP"),
        ProcExpr::End => out.push_str("END"),
        ProcExpr::Error => out.push_str("ERROR"),
        ProcExpr::Reference { name, args: a } => {
            out.push_str(name);
            args(out, a);
        }
        ProcExpr::Choice(bs) => {
            out.push('(');
            for (i, b) in bs.iter().enumerate() {
                if i > 0 {
                    out.push_str(" | ");
                }
                branch(out, b);
            }
            out.push(')');
        }
    }
}

fn branch(out: &mut String, b: &Branch) {
    if let Some(g) = &b.guard {
        write!(out, "when ({}) ", format_expr(g)).unwrap();
    }
    if b.is_terminal() {
        out.push_str("END");
        return;
    }
    for a in &b.actions {
        match a {
            ActionElem::Label(p) => out.push_str(&pattern(p)),
            ActionElem::Set(ps) => {
                let s: Vec<String> = ps.iter().map(pattern).collect();
                write!(out, "{{{}}}", s.join(", ")).unwrap();
            }
        }
        out.push_str(" -> ");
    }
    proc_expr(out, &b.continuation);
}

fn pattern(p: &LabelPattern) -> String {
    let mut s = String::new();
    for seg in &p.0 {
        match seg {
            LabelSeg::Word(w) => {
                if !s.is_empty() {
                    s.push('.');
                }
                s.push_str(w);
            }
            LabelSeg::Index(e) => write!(s, "[{}]", format_expr(e)).unwrap(),
            LabelSeg::Bind { var: Some(v), range } => write!(s, "[{v}:{}]", range_ref(range)).unwrap(),
            LabelSeg::Bind { var: None, range } => write!(s, "[{}]", range_ref(range)).unwrap(),
        }
    }
    s
}

pub fn format_expr(e: &Expr) -> String {
    let mut s = String::new();
    expr(&mut s, e);
    s
}

fn expr(out: &mut String, e: &Expr) {
    match e {
        Expr::Int(n) => write!(out, "{n}").unwrap(),
        Expr::Var(v) => out.push_str(v),
        Expr::Unary(op, inner) => {
            out.push_str(match op {
                UnOp::Neg => "-",
                UnOp::Not => "!",
            });
            if matches!(**inner, Expr::Binary(..)) {
                out.push('(');
                expr(out, inner);
                out.push(')');
            } else {
                expr(out, inner);
            }
        }
        Expr::Binary(op, l, r) => {
            let prec = op.precedence();
            operand(out, l, |p| p < prec);
            write!(out, " {} ", op.symbol()).unwrap();
            operand(out, r, |p| p <= prec);
        }
    }
}

fn operand(out: &mut String, e: &Expr, needs_parens: impl Fn(u8) -> bool) {
    match e {
        Expr::Binary(op, ..) if needs_parens(op.precedence()) => {
            out.push('(');
            expr(out, e);
            out.push(')');
        }
        _ => expr(out, e),
    }
}
