//! Unification lifted to formulas.

use std::collections::BTreeMap;

use crate::metalogic::Formula;
use crate::signature::{O, OLIST};
use crate::term::{Fresh, Subst, Term, Ty};
use crate::unify::{Mode, Unifier};

fn unify_terms(
    mode: Mode,
    nts: &BTreeMap<u32, u64>,
    fresh: &mut Fresh,
    s: &Subst,
    eqs: Vec<(Term, Term)>,
) -> Option<Subst> {
    let mut u = Unifier::new(mode, nts, fresh).with_subst(s.clone());
    u.unify_all(eqs).ok().map(|_| u.subst)
}

pub(crate) fn olist(items: &[Term], tail: Option<&Term>) -> Term {
    let o = Ty::base(O);
    let ol = Ty::base(OLIST);
    let cons = Term::cnst("::", Ty::arrows([o, ol.clone()], ol.clone()));
    let mut acc = tail.cloned().unwrap_or_else(|| Term::cnst("nil", ol));
    for it in items.iter().rev() {
        acc = Term::app(cons.clone(), vec![it.clone(), acc]);
    }
    acc
}

/// All ways of unifying `a` with `b`, ignoring annotations. Contexts of
/// specification judgments are compared as multisets: each item of `a` is
/// matched with a distinct item of `b`. With `weaken`, `b` may have further
/// items; otherwise the leftover items of `b` must be absorbed by the
/// context variable of `a`.
pub fn unify_formula(
    mode: Mode,
    nts: &BTreeMap<u32, u64>,
    fresh: &mut Fresh,
    s: &Subst,
    a: &Formula,
    b: &Formula,
    weaken: bool,
) -> Vec<Subst> {
    use Formula::*;
    match (a, b) {
        (True, True) | (False, False) => vec![s.clone()],
        (Eq(a1, a2), Eq(b1, b2)) => unify_terms(
            mode,
            nts,
            fresh,
            s,
            vec![(a1.clone(), b1.clone()), (a2.clone(), b2.clone())],
        )
        .into_iter()
        .collect(),
        (Atom { pred: p, args: xs, .. }, Atom { pred: q, args: ys, .. }) => {
            if p != q || xs.len() != ys.len() {
                return vec![];
            }
            let eqs = xs.iter().cloned().zip(ys.iter().cloned()).collect();
            unify_terms(mode, nts, fresh, s, eqs).into_iter().collect()
        }
        (
            Spec {
                ctx: ca,
                tail: ta,
                goal: ga,
                ..
            },
            Spec {
                ctx: cb,
                tail: tb,
                goal: gb,
                ..
            },
        ) => {
            let Some(s1) = unify_terms(mode, nts, fresh, s, vec![(ga.clone(), gb.clone())]) else {
                return vec![];
            };
            let mut out = Vec::new();
            let mut used = vec![false; cb.len()];
            match_items(
                mode,
                nts,
                fresh,
                &s1,
                ca,
                ta.as_ref(),
                cb,
                tb.as_ref(),
                weaken,
                0,
                &mut used,
                &mut out,
            );
            out
        }
        (And(a1, a2), And(b1, b2)) | (Or(a1, a2), Or(b1, b2)) | (Imp(a1, a2), Imp(b1, b2)) => {
            let mut out = Vec::new();
            for s1 in unify_formula(mode, nts, fresh, s, a1, b1, false) {
                out.extend(unify_formula(mode, nts, fresh, &s1, a2, b2, false));
            }
            out
        }
        (Quant(q1, _, t1, f1), Quant(q2, _, t2, f2)) if q1 == q2 && t1 == t2 => {
            unify_formula(mode, nts, fresh, s, f1, f2, false)
        }
        _ => vec![],
    }
}

#[allow(clippy::too_many_arguments)]
fn match_items(
    mode: Mode,
    nts: &BTreeMap<u32, u64>,
    fresh: &mut Fresh,
    s: &Subst,
    ca: &[Term],
    ta: Option<&Term>,
    cb: &[Term],
    tb: Option<&Term>,
    weaken: bool,
    i: usize,
    used: &mut Vec<bool>,
    out: &mut Vec<Subst>,
) {
    if out.len() >= 16 {
        return;
    }
    if i == ca.len() {
        let rest: Vec<Term> = cb
            .iter()
            .zip(used.iter())
            .filter(|(_, u)| !**u)
            .map(|(t, _)| t.clone())
            .collect();
        let done = if weaken {
            match (ta, tb) {
                (None, _) => Some(s.clone()),
                (Some(x), Some(y)) => unify_terms(mode, nts, fresh, s, vec![(x.clone(), y.clone())]),
                (Some(x), None) => unify_terms(mode, nts, fresh, s, vec![(x.clone(), olist(&[], None))]),
            }
        } else {
            match ta {
                None if rest.is_empty() && tb.is_none() => Some(s.clone()),
                None => None,
                Some(x) => unify_terms(mode, nts, fresh, s, vec![(x.clone(), olist(&rest, tb))]),
            }
        };
        if let Some(d) = done {
            if !out.contains(&d) {
                out.push(d);
            }
        }
        return;
    }
    for j in 0..cb.len() {
        if used[j] {
            continue;
        }
        if let Some(s1) = unify_terms(mode, nts, fresh, s, vec![(ca[i].clone(), cb[j].clone())]) {
            used[j] = true;
            match_items(mode, nts, fresh, &s1, ca, ta, cb, tb, weaken, i + 1, used, out);
            used[j] = false;
        }
    }
}
