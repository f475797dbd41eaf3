//! Reasoning-logic formulas.
//!
//! Quantifier binders share the de Bruijn index space with term-level λs:
//! inside `∀x. p (y\ f x y)` the occurrence of `x` is `Bound(1)`.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::term::{
    collect_free_names, instantiate, normalize, open_binders_at, shift, Permutation, Printer, Subst, Symbol, Term, Ty,
    Var, PREC_APP, PREC_ATOM,
};

/// Display name of a binder; ignored by equality.
#[derive(Clone, Debug, Default)]
pub struct Hint(pub String);

impl PartialEq for Hint {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}
impl Eq for Hint {}
impl Hash for Hint {
    fn hash<H: Hasher>(&self, _: &mut H) {}
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Quant {
    Forall,
    Exists,
    Nabla,
}

impl Quant {
    pub fn keyword(self) -> &'static str {
        match self {
            Quant::Forall => "forall",
            Quant::Exists => "exists",
            Quant::Nabla => "nabla",
        }
    }
}

/// Size annotation on an atom used by inductive arguments.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Restriction {
    #[default]
    None,
    /// `@`: the measured derivation of induction level `k`.
    Equal(u32),
    /// `*`: strictly smaller than the `@` one of the same level.
    Smaller(u32),
}

impl Restriction {
    /// Whether a hypothesis carrying `self` may stand for a premise that requires `need`.
    pub fn satisfies(self, need: Restriction) -> bool {
        match need {
            Restriction::None => true,
            Restriction::Equal(k) => matches!(self, Restriction::Equal(j) | Restriction::Smaller(j) if j == k),
            Restriction::Smaller(k) => self == Restriction::Smaller(k),
        }
    }

    pub fn suffix(self) -> String {
        match self {
            Restriction::None => String::new(),
            Restriction::Equal(k) => "@".repeat(k as usize),
            Restriction::Smaller(k) => "*".repeat(k as usize),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Eq(Term, Term),
    Atom {
        pred: Symbol,
        args: Vec<Term>,
        res: Restriction,
    },
    /// Specification judgment `{tail, ctx |- goal}`.
    Spec {
        ctx: Vec<Term>,
        tail: Option<Term>,
        goal: Term,
        res: Restriction,
    },
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Imp(Box<Formula>, Box<Formula>),
    Quant(Quant, Hint, Ty, Box<Formula>),
}

impl Formula {
    pub fn atom(pred: &str, args: Vec<Term>) -> Formula {
        Formula::Atom {
            pred: crate::term::sym(pred),
            args,
            res: Restriction::None,
        }
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }
    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }
    pub fn imp(a: Formula, b: Formula) -> Formula {
        Formula::Imp(Box::new(a), Box::new(b))
    }
    pub fn quant(q: Quant, hint: &str, ty: Ty, body: Formula) -> Formula {
        Formula::Quant(q, Hint(hint.to_string()), ty, Box::new(body))
    }

    /// Applies `f` to each term, passing the number of enclosing quantifiers.
    pub fn map_terms(&self, f: &mut dyn FnMut(&Term, u32) -> Term) -> Formula {
        self.map_at(0, f)
    }

    fn map_at(&self, d: u32, f: &mut dyn FnMut(&Term, u32) -> Term) -> Formula {
        match self {
            Formula::True | Formula::False => self.clone(),
            Formula::Eq(a, b) => Formula::Eq(f(a, d), f(b, d)),
            Formula::Atom { pred, args, res } => Formula::Atom {
                pred: pred.clone(),
                args: args.iter().map(|a| f(a, d)).collect(),
                res: *res,
            },
            Formula::Spec { ctx, tail, goal, res } => normalize_spec(
                ctx.iter().map(|a| f(a, d)).collect(),
                tail.as_ref().map(|t| f(t, d)),
                f(goal, d),
                *res,
            ),
            Formula::And(a, b) => Formula::and(a.map_at(d, f), b.map_at(d, f)),
            Formula::Or(a, b) => Formula::or(a.map_at(d, f), b.map_at(d, f)),
            Formula::Imp(a, b) => Formula::imp(a.map_at(d, f), b.map_at(d, f)),
            Formula::Quant(q, h, ty, body) => {
                Formula::Quant(*q, h.clone(), ty.clone(), Box::new(body.map_at(d + 1, f)))
            }
        }
    }

    /// Visits each term with the number of enclosing quantifiers.
    pub fn for_each_term(&self, f: &mut dyn FnMut(&Term, u32)) {
        self.each_at(0, f)
    }

    fn each_at(&self, d: u32, f: &mut dyn FnMut(&Term, u32)) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Eq(a, b) => {
                f(a, d);
                f(b, d)
            }
            Formula::Atom { args, .. } => args.iter().for_each(|a| f(a, d)),
            Formula::Spec { ctx, tail, goal, .. } => {
                ctx.iter().for_each(|a| f(a, d));
                if let Some(t) = tail {
                    f(t, d)
                }
                f(goal, d)
            }
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                a.each_at(d, f);
                b.each_at(d, f)
            }
            Formula::Quant(_, _, _, body) => body.each_at(d + 1, f),
        }
    }

    pub fn subst(&self, s: &Subst) -> Formula {
        if s.is_empty() {
            return self.clone();
        }
        self.map_terms(&mut |t, _| t.subst(s))
    }

    pub fn normalize(&self) -> Formula {
        self.map_terms(&mut |t, _| normalize(t))
    }

    /// Instantiates the outermost loose binder of a quantifier body with `arg`.
    pub fn instantiate(&self, arg: &Term) -> Formula {
        self.map_terms(&mut |t, d| normalize(&instantiate(t, d, arg)))
    }

    /// Instantiates the loose binders `0..terms.len()` (outermost first).
    pub fn open(&self, terms: &[Term]) -> Formula {
        self.map_terms(&mut |t, d| normalize(&open_binders_at(t, terms, d)))
    }

    pub fn shift(&self, by: u32) -> Formula {
        self.map_terms(&mut |t, d| shift(t, by, d))
    }

    pub fn permute(&self, p: &Permutation) -> Formula {
        if p.is_identity() {
            return self.clone();
        }
        self.map_terms(&mut |t, _| t.permute(p))
    }

    pub fn replace_nominal(&self, idx: u32, by: &Term) -> Formula {
        self.map_terms(&mut |t, _| normalize(&t.replace_nominal(idx, by)))
    }

    pub fn collect_nominals(&self, out: &mut BTreeMap<u32, Ty>) {
        self.for_each_term(&mut |t, _| t.collect_nominals(out));
    }

    pub fn nominals(&self) -> BTreeMap<u32, Ty> {
        let mut out = BTreeMap::new();
        self.collect_nominals(&mut out);
        out
    }

    pub fn collect_vars(&self, out: &mut Vec<Arc<Var>>) {
        self.for_each_term(&mut |t, _| t.collect_vars(out));
    }

    pub fn vars(&self) -> Vec<Arc<Var>> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    pub fn contains_var(&self, v: &Var) -> bool {
        let mut found = false;
        self.for_each_term(&mut |t, _| found |= t.contains_var(v));
        found
    }

    pub fn restriction(&self) -> Restriction {
        match self {
            Formula::Atom { res, .. } | Formula::Spec { res, .. } => *res,
            _ => Restriction::None,
        }
    }

    pub fn with_restriction(&self, r: Restriction) -> Formula {
        match self {
            Formula::Atom { pred, args, .. } => Formula::Atom {
                pred: pred.clone(),
                args: args.clone(),
                res: r,
            },
            Formula::Spec { ctx, tail, goal, .. } => Formula::Spec {
                ctx: ctx.clone(),
                tail: tail.clone(),
                goal: goal.clone(),
                res: r,
            },
            f => f.clone(),
        }
    }

    /// Removes every annotation.
    pub fn strip(&self) -> Formula {
        match self {
            Formula::Atom { .. } | Formula::Spec { .. } => self.with_restriction(Restriction::None),
            Formula::And(a, b) => Formula::and(a.strip(), b.strip()),
            Formula::Or(a, b) => Formula::or(a.strip(), b.strip()),
            Formula::Imp(a, b) => Formula::imp(a.strip(), b.strip()),
            Formula::Quant(q, h, ty, body) => Formula::Quant(*q, h.clone(), ty.clone(), Box::new(body.strip())),
            f => f.clone(),
        }
    }

    pub fn is_atomic(&self) -> bool {
        matches!(self, Formula::Atom { .. } | Formula::Spec { .. })
    }

    /// Splits a prefix of `∀`s and `->`s: returns binders, premises and conclusion.
    /// Premises and conclusion refer to all binders as loose indices.
    pub fn premises(&self) -> (Vec<(String, Ty)>, Vec<Formula>, Formula) {
        let mut binders = Vec::new();
        let mut f = self;
        while let Formula::Quant(Quant::Forall, h, ty, body) = f {
            binders.push((h.0.clone(), ty.clone()));
            f = body;
        }
        let mut prems = Vec::new();
        while let Formula::Imp(a, b) = f {
            prems.push((**a).clone());
            f = b;
        }
        (binders, prems, f.clone())
    }

    pub fn to_string_with(&self, p: &mut Printer) -> String {
        let mut out = String::new();
        print_formula(self, p, 0, &mut out);
        out
    }

    pub fn printer(&self) -> Printer {
        let mut taken = HashSet::new();
        self.for_each_term(&mut |t, _| collect_free_names(t, &mut taken));
        Printer::with_names(Vec::new(), taken)
    }
}

/// Builds a spec judgment, flattening `::` and `nil` in the context.
pub fn normalize_spec(ctx: Vec<Term>, tail: Option<Term>, goal: Term, res: Restriction) -> Formula {
    let mut items = ctx;
    let mut rest = tail;
    let mut extra = Vec::new();
    while let Some(t) = rest.clone() {
        let (h, args) = t.spine();
        match h {
            Term::Const(c, _) if &**c == "::" && args.len() == 2 => {
                extra.push(args[0].clone());
                rest = Some(args[1].clone());
            }
            Term::Const(c, _) if &**c == "nil" && args.is_empty() => rest = None,
            _ => break,
        }
    }
    items.extend(extra);
    Formula::Spec {
        ctx: items,
        tail: rest,
        goal,
        res,
    }
}

const F_IMP: u8 = 0;
const F_OR: u8 = 1;
const F_AND: u8 = 2;
const F_ATOM: u8 = 3;

fn print_formula(f: &Formula, p: &mut Printer, prec: u8, out: &mut String) {
    match f {
        Formula::True => out.push_str("true"),
        Formula::False => out.push_str("false"),
        Formula::Eq(a, b) => {
            out.push_str(&p.print_prec(a, PREC_APP));
            out.push_str(" = ");
            out.push_str(&p.print_prec(b, PREC_APP));
        }
        Formula::Atom { pred, args, res } => {
            out.push_str(pred);
            for a in args {
                out.push(' ');
                out.push_str(&p.print_prec(a, PREC_ATOM));
            }
            if *res != Restriction::None {
                out.push(' ');
                out.push_str(&res.suffix());
            }
        }
        Formula::Spec { ctx, tail, goal, res } => {
            out.push('{');
            let mut items: Vec<String> = Vec::new();
            if let Some(t) = tail {
                items.push(p.print(t));
            }
            items.extend(ctx.iter().map(|c| p.print(c)));
            if !items.is_empty() {
                out.push_str(&items.join(", "));
                out.push_str(" |- ");
            }
            out.push_str(&p.print(goal));
            out.push('}');
            out.push_str(&res.suffix());
        }
        Formula::And(a, b) => paren(prec > F_AND, out, |out| {
            print_formula(a, p, F_AND, out);
            out.push_str(" /\\ ");
            print_formula(b, p, F_ATOM, out);
        }),
        Formula::Or(a, b) => paren(prec > F_OR, out, |out| {
            print_formula(a, p, F_OR, out);
            out.push_str(" \\/ ");
            print_formula(b, p, F_AND, out);
        }),
        Formula::Imp(a, b) => paren(prec > F_IMP, out, |out| {
            print_formula(a, p, F_OR, out);
            out.push_str(" -> ");
            print_formula(b, p, F_IMP, out);
        }),
        Formula::Quant(q, ..) => paren(prec > F_IMP, out, |out| {
            out.push_str(q.keyword());
            let mut body = f;
            let mut pushed = 0;
            while let Formula::Quant(q2, h, ty, b) = body {
                if q2 != q {
                    break;
                }
                let name = p.fresh_name(&h.0);
                out.push(' ');
                // a ∇ variable's type is rarely recoverable from the body
                if *q == Quant::Nabla {
                    out.push_str(&format!("({name} : {ty})"));
                } else {
                    out.push_str(&name);
                }
                p.push(name);
                pushed += 1;
                body = b;
            }
            out.push_str(", ");
            print_formula(body, p, F_IMP, out);
            for _ in 0..pushed {
                p.pop();
            }
        }),
    }
}

fn paren(on: bool, out: &mut String, body: impl FnOnce(&mut String)) {
    if on {
        out.push('(');
    }
    body(out);
    if on {
        out.push(')');
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut p = self.printer();
        write!(f, "{}", self.to_string_with(&mut p))
    }
}
