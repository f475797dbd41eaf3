//! Elaboration of parse trees: name resolution and type inference.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use indexmap::IndexMap;

use super::ast::*;
use super::lexer::Span;
use crate::metalogic::{normalize_spec, DefClause, Formula, Quant, Restriction};
use crate::signature::{Signature, O, OLIST, PROP};
use crate::speclog::{check_clause, SpecClause};
use crate::term::{is_nominal_name, normalize, Fresh, Symbol, Term, Ty, Var, VarKind};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{span}: {message}")]
pub struct ElabError {
    pub span: Span,
    pub message: String,
}

type EResult<T> = Result<T, ElabError>;

fn err<T>(span: Span, message: impl Into<String>) -> EResult<T> {
    Err(ElabError {
        span,
        message: message.into(),
    })
}

/// Names available besides constants: eigenvariables and nominal constants
/// of the current sequent.
#[derive(Clone, Debug, Default)]
pub struct NameCtx {
    pub eigen: Vec<Arc<Var>>,
    pub nominals: BTreeMap<u32, Ty>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum FreeMode {
    Reject,
    /// Capitalized free names are clause variables.
    Universals,
    /// Capitalized free names become logic variables.
    Logic,
}

#[derive(Clone, Debug)]
enum TT {
    Const(Symbol, Ty),
    Nominal(u32, Ty),
    Bound(u32),
    Free(String, u32),
    Var(Arc<Var>),
    App(Box<TT>, Vec<TT>),
    Lam(String, Ty, Box<TT>),
}

#[derive(Clone, Debug)]
enum FT {
    True,
    False,
    Eq(TT, TT),
    Atom(Symbol, Vec<TT>, Restriction),
    Spec(Vec<(TT, Ty)>, TT, Restriction, Span),
    And(Box<FT>, Box<FT>),
    Or(Box<FT>, Box<FT>),
    Imp(Box<FT>, Box<FT>),
    Quant(Quant, String, Ty, Box<FT>),
}

struct Elab<'a> {
    sig: &'a Signature,
    names: &'a NameCtx,
    mode: FreeMode,
    tys: Vec<Option<Ty>>,
    scope: Vec<(String, Ty)>,
    free: IndexMap<String, Ty>,
    wildcards: u32,
    /// Spec context items whose type (`o` or `olist`) is decided last.
    pending: Vec<(Ty, bool)>,
    /// Binder types that must be determined, with their spans.
    binders: Vec<(String, Ty, Span)>,
}

fn is_var_name(s: &str) -> bool {
    s.starts_with(|c: char| c.is_uppercase() || c == '_')
}

impl<'a> Elab<'a> {
    fn new(sig: &'a Signature, names: &'a NameCtx, mode: FreeMode) -> Self {
        Elab {
            sig,
            names,
            mode,
            tys: Vec::new(),
            scope: Vec::new(),
            free: IndexMap::new(),
            wildcards: 0,
            pending: Vec::new(),
            binders: Vec::new(),
        }
    }

    fn tvar(&mut self) -> Ty {
        self.tys.push(None);
        Ty::Var(self.tys.len() as u32 - 1)
    }

    fn shallow(&self, ty: &Ty) -> Ty {
        let mut t = ty.clone();
        while let Ty::Var(v) = t {
            match &self.tys[v as usize] {
                Some(b) => t = b.clone(),
                None => break,
            }
        }
        t
    }

    fn resolve(&self, ty: &Ty) -> Ty {
        match self.shallow(ty) {
            Ty::Arrow(a, b) => Ty::arrow(self.resolve(&a), self.resolve(&b)),
            t => t,
        }
    }

    fn occurs(&self, v: u32, ty: &Ty) -> bool {
        match self.shallow(ty) {
            Ty::Var(w) => v == w,
            Ty::Arrow(a, b) => self.occurs(v, &a) || self.occurs(v, &b),
            Ty::Base(_) => false,
        }
    }

    fn unify_ty(&mut self, a: &Ty, b: &Ty, span: Span) -> EResult<()> {
        let (a, b) = (self.shallow(a), self.shallow(b));
        match (&a, &b) {
            (Ty::Var(x), Ty::Var(y)) if x == y => Ok(()),
            (Ty::Var(x), t) | (t, Ty::Var(x)) => {
                if self.occurs(*x, t) {
                    return err(span, "type error: cyclic type");
                }
                self.tys[*x as usize] = Some(t.clone());
                Ok(())
            }
            (Ty::Base(x), Ty::Base(y)) if x == y => Ok(()),
            (Ty::Arrow(a1, b1), Ty::Arrow(a2, b2)) => {
                self.unify_ty(a1, a2, span)?;
                self.unify_ty(b1, b2, span)
            }
            _ => err(
                span,
                format!("type error: expected {}, found {}", self.resolve(&b), self.resolve(&a)),
            ),
        }
    }

    fn name(&mut self, n: &str, span: Span) -> EResult<(TT, Ty)> {
        if let Some(pos) = self.scope.iter().rposition(|(m, _)| m == n) {
            let idx = (self.scope.len() - 1 - pos) as u32;
            return Ok((TT::Bound(idx), self.scope[pos].1.clone()));
        }
        if is_nominal_name(n) {
            let i: u32 = n[1..].parse().unwrap_or(0);
            return match self.names.nominals.get(&i) {
                Some(ty) => Ok((TT::Nominal(i, ty.clone()), ty.clone())),
                None => err(span, format!("unknown nominal constant {n}")),
            };
        }
        if let Some(v) = self.names.eigen.iter().find(|v| &*v.name == n) {
            return Ok((TT::Var(v.clone()), v.ty.clone()));
        }
        if n == "pi" {
            let a = self.tvar();
            let ty = Signature::pi_ty(a);
            return Ok((TT::Const(self.sig.symbol("pi"), ty.clone()), ty));
        }
        if let Some(ty) = self.sig.const_ty(n) {
            return Ok((TT::Const(self.sig.symbol(n), ty.clone()), ty.clone()));
        }
        if self.sig.pred_ty(n).is_some() {
            return err(span, format!("predicate {n} used as a term"));
        }
        if self.mode != FreeMode::Reject && is_var_name(n) {
            let key = if n == "_" {
                self.wildcards += 1;
                format!("_{}", self.wildcards)
            } else {
                n.to_string()
            };
            let ty = match self.free.get(&key) {
                Some(t) => t.clone(),
                None => {
                    let t = self.tvar();
                    self.free.insert(key.clone(), t.clone());
                    self.binders.push((n.to_string(), t.clone(), span));
                    t
                }
            };
            return Ok((TT::Free(key, self.scope.len() as u32), ty));
        }
        err(span, format!("unknown constant {n}"))
    }

    fn term(&mut self, t: &TermAst) -> EResult<(TT, Ty)> {
        match t {
            TermAst::Name(n, sp) => self.name(n, *sp),
            TermAst::App(h, args, _) => {
                let (th, mut ty) = self.term(h)?;
                let mut targs = Vec::new();
                for a in args {
                    let (ta, tya) = self.term(a)?;
                    let r = self.tvar();
                    let expect = Ty::arrow(tya, r.clone());
                    match self.shallow(&ty) {
                        Ty::Base(_) => return err(a.span(), format!("{h} is applied to too many arguments")),
                        _ => self.unify_ty(&expect, &ty, a.span())?,
                    }
                    targs.push(ta);
                    ty = r;
                }
                Ok((TT::App(Box::new(th), targs), ty))
            }
            TermAst::Infix(op, a, b, sp) => {
                let (th, tyh) = self.name(op, *sp)?;
                let (ta, tya) = self.term(a)?;
                let (tb, tyb) = self.term(b)?;
                let r = self.tvar();
                self.unify_ty(&Ty::arrows([tya, tyb], r.clone()), &tyh, *sp)?;
                Ok((TT::App(Box::new(th), vec![ta, tb]), r))
            }
            TermAst::Lam(x, ty, body, sp) => {
                let tx = match ty {
                    Some(ty) => self.ty(ty)?,
                    None => self.tvar(),
                };
                self.binders.push((x.clone(), tx.clone(), *sp));
                self.scope.push((x.clone(), tx.clone()));
                let r = self.term(body);
                self.scope.pop();
                let (tb, tyb) = r?;
                Ok((TT::Lam(x.clone(), tx.clone(), Box::new(tb)), Ty::arrow(tx, tyb)))
            }
        }
    }

    fn ty(&self, t: &TyAst) -> EResult<Ty> {
        elab_ty(self.sig, t)
    }

    fn formula(&mut self, f: &FormulaAst) -> EResult<FT> {
        Ok(match f {
            FormulaAst::True(_) => FT::True,
            FormulaAst::False(_) => FT::False,
            FormulaAst::Eq(a, b, sp) => {
                let (ta, tya) = self.term(a)?;
                let (tb, tyb) = self.term(b)?;
                self.unify_ty(&tyb, &tya, *sp)?;
                FT::Eq(ta, tb)
            }
            FormulaAst::Atom(t, res, sp) => {
                let (h, args) = t.spine();
                let pred = match h {
                    TermAst::Name(p, _) if !self.scope.iter().any(|(n, _)| n == p) => p,
                    _ => return err(*sp, format!("{t} is not an atomic formula")),
                };
                let Some(pty) = self.sig.pred_ty(pred).cloned() else {
                    if self.sig.const_ty(pred).is_some_and(|ty| ty.split().1.is_base(O)) {
                        return err(*sp, format!("{pred} is a specification predicate; write {{{t}}}"));
                    }
                    return err(*sp, format!("unknown predicate {pred}"));
                };
                let (dom, _) = pty.split();
                if dom.len() != args.len() {
                    return err(
                        *sp,
                        format!("{pred} expects {} arguments, given {}", dom.len(), args.len()),
                    );
                }
                let mut targs = Vec::new();
                for (a, d) in args.iter().zip(dom.iter()) {
                    let (ta, tya) = self.term(a)?;
                    self.unify_ty(&tya, d, a.span())?;
                    targs.push(ta);
                }
                FT::Atom(self.sig.symbol(pred), targs, *res)
            }
            FormulaAst::Spec { ctx, goal, res, span } => {
                let mut items = Vec::new();
                for c in ctx {
                    let (tc, ty) = self.term(c)?;
                    let bare = matches!(c, TermAst::Name(..));
                    self.pending.push((ty.clone(), bare));
                    items.push((tc, ty));
                }
                let (tg, tyg) = self.term(goal)?;
                self.unify_ty(&tyg, &Ty::base(O), goal.span())?;
                FT::Spec(items, tg, *res, *span)
            }
            FormulaAst::And(a, b) => FT::And(Box::new(self.formula(a)?), Box::new(self.formula(b)?)),
            FormulaAst::Or(a, b) => FT::Or(Box::new(self.formula(a)?), Box::new(self.formula(b)?)),
            FormulaAst::Imp(a, b) => FT::Imp(Box::new(self.formula(a)?), Box::new(self.formula(b)?)),
            FormulaAst::Quant(q, bs, body, sp) => {
                let mut tys = Vec::new();
                for b in bs {
                    let ty = match &b.ty {
                        Some(t) => self.ty(t)?,
                        None => self.tvar(),
                    };
                    self.binders.push((b.name.clone(), ty.clone(), *sp));
                    self.scope.push((b.name.clone(), ty.clone()));
                    tys.push(ty);
                }
                let inner = self.formula(body);
                self.scope.truncate(self.scope.len() - bs.len());
                let mut out = inner?;
                for (b, ty) in bs.iter().zip(tys).rev() {
                    out = FT::Quant(*q, b.name.clone(), ty, Box::new(out));
                }
                out
            }
        })
    }

    /// Decides pending context items and checks that every binder type is known.
    fn settle(&mut self) -> EResult<()> {
        for (ty, bare) in std::mem::take(&mut self.pending) {
            if let Ty::Var(_) = self.shallow(&ty) {
                let d = Ty::base(if bare { OLIST } else { O });
                self.unify_ty(&ty, &d, Span::default())?;
            }
        }
        for (n, ty, sp) in &self.binders {
            let r = self.resolve(ty);
            if has_tvar(&r) {
                return err(*sp, format!("cannot determine the type of {n}"));
            }
        }
        Ok(())
    }

    fn out_term(&self, t: &TT, logic: &HashMap<String, Arc<Var>>) -> Term {
        match t {
            TT::Const(c, ty) => Term::Const(c.clone(), self.resolve(ty)),
            TT::Nominal(i, ty) => Term::Nominal(*i, self.resolve(ty)),
            TT::Bound(i) => Term::Bound(*i),
            TT::Var(v) => Term::Var(v.clone()),
            TT::Free(n, depth) => match self.mode {
                FreeMode::Logic => Term::Var(logic[n].clone()),
                _ => {
                    let idx = self.free.get_index_of(n).unwrap() as u32;
                    Term::Bound(depth + self.free.len() as u32 - 1 - idx)
                }
            },
            TT::App(h, args) => Term::app(
                self.out_term(h, logic),
                args.iter().map(|a| self.out_term(a, logic)).collect(),
            ),
            TT::Lam(x, ty, b) => Term::lam(x, self.resolve(ty), self.out_term(b, logic)),
        }
    }

    fn out_formula(&self, f: &FT, logic: &HashMap<String, Arc<Var>>) -> EResult<Formula> {
        let t = |x: &TT| normalize(&self.out_term(x, logic));
        Ok(match f {
            FT::True => Formula::True,
            FT::False => Formula::False,
            FT::Eq(a, b) => Formula::Eq(t(a), t(b)),
            FT::Atom(p, args, res) => Formula::Atom {
                pred: p.clone(),
                args: args.iter().map(t).collect(),
                res: *res,
            },
            FT::Spec(items, g, res, sp) => {
                let mut ctx = Vec::new();
                let mut tail = None;
                for (it, ty) in items {
                    if self.resolve(ty).is_base(OLIST) {
                        if tail.is_some() {
                            return err(*sp, "a context may contain at most one context variable");
                        }
                        tail = Some(t(it));
                    } else if self.resolve(ty).is_base(O) {
                        ctx.push(t(it));
                    } else {
                        return err(*sp, "context items must have type o or olist");
                    }
                }
                normalize_spec(ctx, tail, t(g), *res)
            }
            FT::And(a, b) => Formula::and(self.out_formula(a, logic)?, self.out_formula(b, logic)?),
            FT::Or(a, b) => Formula::or(self.out_formula(a, logic)?, self.out_formula(b, logic)?),
            FT::Imp(a, b) => Formula::imp(self.out_formula(a, logic)?, self.out_formula(b, logic)?),
            FT::Quant(q, n, ty, b) => Formula::quant(*q, n, self.resolve(ty), self.out_formula(b, logic)?),
        })
    }

    fn universals(&self) -> Vec<(String, Ty)> {
        self.free.iter().map(|(n, ty)| (n.clone(), self.resolve(ty))).collect()
    }
}

fn has_tvar(t: &Ty) -> bool {
    match t {
        Ty::Var(_) => true,
        Ty::Arrow(a, b) => has_tvar(a) || has_tvar(b),
        Ty::Base(_) => false,
    }
}

pub fn elab_ty(sig: &Signature, t: &TyAst) -> EResult<Ty> {
    match t {
        TyAst::Name(n, sp) => {
            if !sig.kinds.contains(n.as_str()) {
                return err(*sp, format!("unknown type {n}"));
            }
            Ok(Ty::base(n))
        }
        TyAst::Arrow(a, b) => Ok(Ty::arrow(elab_ty(sig, a)?, elab_ty(sig, b)?)),
    }
}

/// Elaborates a closed term (up to the names in `names`), optionally
/// against an expected type.
pub fn elab_term(sig: &Signature, names: &NameCtx, t: &TermAst, expected: Option<&Ty>) -> EResult<Term> {
    let mut e = Elab::new(sig, names, FreeMode::Reject);
    let (tt, ty) = e.term(t)?;
    if let Some(x) = expected {
        e.unify_ty(&ty, x, t.span())?;
    }
    e.settle()?;
    if has_tvar(&e.resolve(&ty)) {
        return err(t.span(), format!("cannot determine the type of {t}"));
    }
    Ok(normalize(&e.out_term(&tt, &HashMap::new())))
}

pub fn elab_formula(sig: &Signature, names: &NameCtx, f: &FormulaAst) -> EResult<Formula> {
    let mut e = Elab::new(sig, names, FreeMode::Reject);
    let ft = e.formula(f)?;
    e.settle()?;
    e.out_formula(&ft, &HashMap::new())
}

/// A query goal of type `o`; capitalized free names become logic variables.
pub fn elab_query(sig: &Signature, t: &TermAst, fresh: &mut Fresh) -> EResult<(Term, Vec<Arc<Var>>)> {
    let names = NameCtx::default();
    let mut e = Elab::new(sig, &names, FreeMode::Logic);
    let (tt, ty) = e.term(t)?;
    e.unify_ty(&ty, &Ty::base(O), t.span())?;
    e.settle()?;
    let mut logic = HashMap::new();
    let mut vars = Vec::new();
    let ts = fresh.tick();
    for (n, ty) in e.universals() {
        let v = fresh.var(&n, ty, ts, VarKind::Logic);
        logic.insert(n, v.clone());
        vars.push(v);
    }
    Ok((normalize(&e.out_term(&tt, &logic)), vars))
}

pub fn elab_spec_clause(sig: &Signature, c: &ModClause) -> EResult<SpecClause> {
    let names = NameCtx::default();
    let mut e = Elab::new(sig, &names, FreeMode::Universals);
    let o = Ty::base(O);
    let (th, tyh) = e.term(&c.head)?;
    e.unify_ty(&tyh, &o, c.head.span())?;
    let mut tbody = Vec::new();
    for b in &c.body {
        let (tb, tyb) = e.term(b)?;
        e.unify_ty(&tyb, &o, b.span())?;
        tbody.push(tb);
    }
    e.settle()?;
    let logic = HashMap::new();
    let clause = SpecClause {
        vars: e.universals(),
        head: normalize(&e.out_term(&th, &logic)),
        body: tbody.iter().map(|b| normalize(&e.out_term(b, &logic))).collect(),
    };
    check_clause(sig, &clause).map_err(|m| ElabError {
        span: c.span,
        message: m,
    })?;
    Ok(clause)
}

/// Elaborates the clauses of a definition block; the predicates must
/// already be declared in `sig`.
pub fn elab_define(sig: &Signature, preds: &[Symbol], clauses: &[ClauseAst]) -> EResult<Vec<(Symbol, DefClause)>> {
    let names = NameCtx::default();
    let mut out = Vec::new();
    for c in clauses {
        let mut e = Elab::new(sig, &names, FreeMode::Universals);
        let mut nablas = Vec::new();
        for n in &c.nablas {
            let ty = e.tvar();
            e.binders.push((n.clone(), ty.clone(), c.span));
            e.scope.push((n.clone(), ty.clone()));
            nablas.push((n.clone(), ty));
        }
        let (h, args) = c.head.spine();
        let pred = match h {
            TermAst::Name(p, _) if preds.iter().any(|q| &**q == p) => sig.symbol(p),
            _ => {
                return err(
                    c.span,
                    format!("clause head {} is not a predicate of this definition", c.head),
                )
            }
        };
        let (dom, _) = sig.pred_ty(&pred).cloned().unwrap_or(Ty::base(PROP)).split();
        if dom.len() != args.len() {
            return err(
                c.span,
                format!("{pred} expects {} arguments, given {}", dom.len(), args.len()),
            );
        }
        let mut targs = Vec::new();
        for (a, d) in args.iter().zip(dom.iter()) {
            let (ta, tya) = e.term(a)?;
            e.unify_ty(&tya, d, a.span())?;
            targs.push(ta);
        }
        let body = match &c.body {
            Some(b) => Some(e.formula(b)?),
            None => None,
        };
        e.settle()?;
        let logic = HashMap::new();
        let head = targs.iter().map(|t| normalize(&e.out_term(t, &logic))).collect();
        let body = match body {
            Some(b) => e.out_formula(&b, &logic)?,
            None => Formula::True,
        };
        out.push((
            pred,
            DefClause {
                universals: e.universals(),
                nablas: nablas.into_iter().map(|(n, ty)| (n, e.resolve(&ty))).collect(),
                head,
                body,
            },
        ));
    }
    Ok(out)
}
