//! Parse trees. Names are unresolved; types are inferred during elaboration.

use std::fmt;

use super::lexer::Span;
use crate::metalogic::{Quant, Restriction};
use crate::term::{infix_info, PREC_APP, PREC_ATOM};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TyAst {
    Name(String, Span),
    Arrow(Box<TyAst>, Box<TyAst>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TermAst {
    Name(String, Span),
    App(Box<TermAst>, Vec<TermAst>, Span),
    Lam(String, Option<TyAst>, Box<TermAst>, Span),
    Infix(String, Box<TermAst>, Box<TermAst>, Span),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Binder {
    pub name: String,
    pub ty: Option<TyAst>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FormulaAst {
    True(Span),
    False(Span),
    Eq(TermAst, TermAst, Span),
    Atom(TermAst, Restriction, Span),
    Spec {
        ctx: Vec<TermAst>,
        goal: TermAst,
        res: Restriction,
        span: Span,
    },
    And(Box<FormulaAst>, Box<FormulaAst>),
    Or(Box<FormulaAst>, Box<FormulaAst>),
    Imp(Box<FormulaAst>, Box<FormulaAst>),
    Quant(Quant, Vec<Binder>, Box<FormulaAst>, Span),
}

/// `nabla z̄, head := body`
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClauseAst {
    pub nablas: Vec<String>,
    pub head: TermAst,
    pub body: Option<FormulaAst>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SetValue {
    Num(u32),
    Word(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TacticAst {
    Induction(Vec<usize>),
    Intros(Vec<String>),
    Case {
        hyp: String,
        keep: bool,
    },
    Apply {
        target: String,
        args: Vec<Option<String>>,
        withs: Vec<(String, TermAst)>,
    },
    Search(Option<u32>),
    Split,
    Left,
    Right,
    Exists(TermAst),
    Assert(FormulaAst),
    Unfold,
    Inst {
        hyp: String,
        nominal: String,
        term: TermAst,
    },
    Cut {
        hyp: String,
        with: String,
    },
    Monotone {
        hyp: String,
        ctx: TermAst,
    },
    Clear(Vec<String>),
    Undo,
    Abort,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CommandKind {
    Specification(String),
    Kind(Vec<String>),
    Type(Vec<String>, TyAst),
    Define(Vec<(String, TyAst)>, Vec<ClauseAst>),
    Theorem(String, FormulaAst),
    Query(TermAst),
    Set(String, SetValue),
    Quit,
    Tactic(TacticAst),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Command {
    pub kind: CommandKind,
    pub span: Span,
}

/// Declarations of a `.sig` file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SigDecl {
    Kind(Vec<String>),
    Type(Vec<String>, TyAst),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SigFile {
    pub name: String,
    pub decls: Vec<SigDecl>,
}

/// `head :- body₁, …, bodyₙ.`
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModClause {
    pub head: TermAst,
    pub body: Vec<TermAst>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModFile {
    pub name: String,
    pub clauses: Vec<ModClause>,
}

impl TermAst {
    pub fn span(&self) -> Span {
        match self {
            TermAst::Name(_, s) | TermAst::App(_, _, s) | TermAst::Lam(_, _, _, s) | TermAst::Infix(_, _, _, s) => *s,
        }
    }

    /// Head name and arguments of an application spine.
    pub fn spine(&self) -> (&TermAst, Vec<&TermAst>) {
        match self {
            TermAst::App(h, args, _) => {
                let (h2, mut inner) = h.spine();
                inner.extend(args.iter());
                (h2, inner)
            }
            t => (t, Vec::new()),
        }
    }

    fn write(&self, prec: u8, out: &mut String) {
        match self {
            TermAst::Name(n, _) => {
                if infix_info(n).is_some() {
                    out.push('(');
                    out.push_str(n);
                    out.push(')');
                } else {
                    out.push_str(n);
                }
            }
            TermAst::Lam(x, ty, body, _) => {
                if prec > 0 {
                    out.push('(');
                }
                out.push_str(x);
                if let Some(ty) = ty {
                    out.push(':');
                    out.push_str(&ty.to_string());
                }
                out.push_str("\\ ");
                body.write(0, out);
                if prec > 0 {
                    out.push(')');
                }
            }
            TermAst::Infix(op, a, b, _) => {
                let p = infix_info(op).unwrap_or(1);
                if prec > p {
                    out.push('(');
                }
                a.write(p + 1, out);
                out.push(' ');
                out.push_str(op);
                out.push(' ');
                b.write(p, out);
                if prec > p {
                    out.push(')');
                }
            }
            TermAst::App(h, args, _) => {
                if prec > PREC_APP {
                    out.push('(');
                }
                h.write(PREC_ATOM, out);
                for a in args {
                    out.push(' ');
                    a.write(PREC_ATOM, out);
                }
                if prec > PREC_APP {
                    out.push(')');
                }
            }
        }
    }

    pub fn to_string_prec(&self, prec: u8) -> String {
        let mut out = String::new();
        self.write(prec, &mut out);
        out
    }
}

impl fmt::Display for TermAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_string_prec(0))
    }
}

impl fmt::Display for TyAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TyAst::Name(n, _) => write!(f, "{n}"),
            TyAst::Arrow(a, b) => match **a {
                TyAst::Arrow(..) => write!(f, "({a}) -> {b}"),
                _ => write!(f, "{a} -> {b}"),
            },
        }
    }
}

const F_IMP: u8 = 0;
const F_OR: u8 = 1;
const F_AND: u8 = 2;
const F_ATOM: u8 = 3;

impl FormulaAst {
    pub fn span(&self) -> Span {
        match self {
            FormulaAst::True(s)
            | FormulaAst::False(s)
            | FormulaAst::Eq(_, _, s)
            | FormulaAst::Atom(_, _, s)
            | FormulaAst::Spec { span: s, .. }
            | FormulaAst::Quant(_, _, _, s) => *s,
            FormulaAst::And(a, b) | FormulaAst::Or(a, b) | FormulaAst::Imp(a, b) => a.span().join(b.span()),
        }
    }

    fn write(&self, prec: u8, out: &mut String) {
        let open = |on: bool, out: &mut String| {
            if on {
                out.push('(')
            }
        };
        let close = |on: bool, out: &mut String| {
            if on {
                out.push(')')
            }
        };
        match self {
            FormulaAst::True(_) => out.push_str("true"),
            FormulaAst::False(_) => out.push_str("false"),
            FormulaAst::Eq(a, b, _) => {
                a.write(PREC_APP, out);
                out.push_str(" = ");
                b.write(PREC_APP, out);
            }
            FormulaAst::Atom(t, res, _) => {
                // A bare atom is printed above infix level so that it cannot
                // be confused with an equation.
                out.push_str(&t.to_string_prec(PREC_APP));
                if *res != Restriction::None {
                    out.push(' ');
                    out.push_str(&res.suffix());
                }
            }
            FormulaAst::Spec { ctx, goal, res, .. } => {
                out.push('{');
                if !ctx.is_empty() {
                    let items: Vec<String> = ctx.iter().map(|c| c.to_string()).collect();
                    out.push_str(&items.join(", "));
                    out.push_str(" |- ");
                }
                out.push_str(&goal.to_string());
                out.push('}');
                out.push_str(&res.suffix());
            }
            FormulaAst::And(a, b) => {
                open(prec > F_AND, out);
                a.write(F_AND, out);
                out.push_str(" /\\ ");
                b.write(F_ATOM, out);
                close(prec > F_AND, out);
            }
            FormulaAst::Or(a, b) => {
                open(prec > F_OR, out);
                a.write(F_OR, out);
                out.push_str(" \\/ ");
                b.write(F_AND, out);
                close(prec > F_OR, out);
            }
            FormulaAst::Imp(a, b) => {
                open(prec > F_IMP, out);
                a.write(F_OR, out);
                out.push_str(" -> ");
                b.write(F_IMP, out);
                close(prec > F_IMP, out);
            }
            FormulaAst::Quant(q, bs, body, _) => {
                open(prec > F_IMP, out);
                out.push_str(q.keyword());
                for b in bs {
                    out.push(' ');
                    match &b.ty {
                        Some(ty) => out.push_str(&format!("({} : {})", b.name, ty)),
                        None => out.push_str(&b.name),
                    }
                }
                out.push_str(", ");
                body.write(F_IMP, out);
                close(prec > F_IMP, out);
            }
        }
    }
}

impl fmt::Display for FormulaAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        self.write(F_IMP, &mut out);
        write!(f, "{out}")
    }
}

fn names(ns: &[String], sep: &str) -> String {
    ns.join(sep)
}

impl fmt::Display for TacticAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TacticAst::Induction(ns) => {
                let ns: Vec<String> = ns.iter().map(|n| n.to_string()).collect();
                write!(f, "induction on {}.", ns.join(" "))
            }
            TacticAst::Intros(ns) if ns.is_empty() => write!(f, "intros."),
            TacticAst::Intros(ns) => write!(f, "intros {}.", names(ns, " ")),
            TacticAst::Case { hyp, keep } => {
                write!(f, "case {hyp}{}.", if *keep { " (keep)" } else { "" })
            }
            TacticAst::Apply { target, args, withs } => {
                write!(f, "apply {target}")?;
                if !args.is_empty() {
                    let a: Vec<&str> = args.iter().map(|a| a.as_deref().unwrap_or("_")).collect();
                    write!(f, " to {}", a.join(" "))?;
                }
                if !withs.is_empty() {
                    let w: Vec<String> = withs.iter().map(|(x, t)| format!("{x} = {t}")).collect();
                    write!(f, " with {}", w.join(", "))?;
                }
                write!(f, ".")
            }
            TacticAst::Search(None) => write!(f, "search."),
            TacticAst::Search(Some(d)) => write!(f, "search {d}."),
            TacticAst::Split => write!(f, "split."),
            TacticAst::Left => write!(f, "left."),
            TacticAst::Right => write!(f, "right."),
            TacticAst::Exists(t) => write!(f, "exists {t}."),
            TacticAst::Assert(g) => write!(f, "assert {g}."),
            TacticAst::Unfold => write!(f, "unfold."),
            TacticAst::Inst { hyp, nominal, term } => write!(f, "inst {hyp} with {nominal} = {term}."),
            TacticAst::Cut { hyp, with } => write!(f, "cut {hyp} with {with}."),
            TacticAst::Monotone { hyp, ctx } => write!(f, "monotone {hyp} with {ctx}."),
            TacticAst::Clear(hs) => write!(f, "clear {}.", names(hs, " ")),
            TacticAst::Undo => write!(f, "undo."),
            TacticAst::Abort => write!(f, "abort."),
        }
    }
}

impl fmt::Display for ClauseAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.nablas.is_empty() {
            write!(f, "nabla {}, ", names(&self.nablas, " "))?;
        }
        write!(f, "{}", self.head)?;
        if let Some(b) = &self.body {
            write!(f, " := {b}")?;
        }
        Ok(())
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            CommandKind::Specification(s) => write!(f, "Specification \"{s}\"."),
            CommandKind::Kind(ns) => write!(f, "Kind {} type.", names(ns, ", ")),
            CommandKind::Type(ns, ty) => write!(f, "Type {} {ty}.", names(ns, ", ")),
            CommandKind::Define(ps, cls) => {
                let ps: Vec<String> = ps.iter().map(|(p, ty)| format!("{p} : {ty}")).collect();
                write!(f, "Define {} by", ps.join(", "))?;
                for (i, c) in cls.iter().enumerate() {
                    write!(f, "{}\n  {c}", if i == 0 { "" } else { ";" })?;
                }
                write!(f, ".")
            }
            CommandKind::Theorem(n, g) => write!(f, "Theorem {n} : {g}."),
            CommandKind::Query(t) => write!(f, "Query {t}."),
            CommandKind::Set(k, SetValue::Num(n)) => write!(f, "Set {k} {n}."),
            CommandKind::Set(k, SetValue::Word(w)) => write!(f, "Set {k} {w}."),
            CommandKind::Quit => write!(f, "Quit."),
            CommandKind::Tactic(t) => write!(f, "{t}"),
        }
    }
}
