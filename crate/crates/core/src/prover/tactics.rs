use std::collections::HashSet;
use std::sync::Arc;

use super::matching::unify_formula;
use super::search::search_goals;
use super::{Env, Tactic, TacticError, TacticResult};
use crate::metalogic::sequent::Sequent;
use crate::metalogic::{normalize_spec, Formula, Quant, Restriction};
use crate::speclog::{context_subsumed, spec_case};
use crate::term::{abstract_var, Fresh, Subst, Term, Ty, Var, VarKind};
use crate::unify::{case_unify, CaseEnv, Mode, Unifier, UnifyError, DEFAULT_NOMINAL_CAP};

fn err<T>(msg: impl Into<String>) -> TacticResult<T> {
    Err(TacticError::new(msg))
}

pub(super) fn run(env: &Env, fresh: &mut Fresh, seq: Sequent, t: &Tactic) -> TacticResult<Vec<Sequent>> {
    let reserved = env.reserved_names();
    let out = match t {
        Tactic::Induction(ns) => induction(seq, ns)?,
        Tactic::Intros(names) => vec![intros(seq, names, fresh, &reserved)?],
        Tactic::Case { hyp, keep } => case(env, fresh, seq, hyp, *keep, &reserved)?,
        Tactic::Apply { target, args, withs } => vec![apply(env, fresh, seq, target, args, withs, &reserved)?],
        Tactic::Search(d) => {
            let depth = d.unwrap_or(env.settings.search_depth);
            if super::search::search_goal(env, &seq, depth, fresh) {
                vec![]
            } else {
                return err("search failed");
            }
        }
        Tactic::Split => match seq.goal.clone() {
            Formula::And(a, b) => {
                let mut l = seq.clone();
                l.goal = *a;
                let mut r = seq;
                r.goal = *b;
                vec![l, r]
            }
            _ => return err("goal is not a conjunction"),
        },
        Tactic::Left | Tactic::Right => match &seq.goal {
            Formula::Or(a, b) => {
                let mut s = seq.clone();
                s.goal = if *t == Tactic::Left {
                    (**a).clone()
                } else {
                    (**b).clone()
                };
                vec![s]
            }
            _ => return err("goal is not a disjunction"),
        },
        Tactic::Exists(w) => match &seq.goal {
            Formula::Quant(Quant::Exists, _, ty, body) => {
                if let Some(wt) = w.ty() {
                    if wt != *ty {
                        return err(format!("witness has type {wt}, expected {ty}"));
                    }
                }
                let mut s = seq.clone();
                s.goal = body.instantiate(w);
                vec![s]
            }
            _ => return err("goal is not existential"),
        },
        Tactic::Assert(f) => {
            let mut first = seq.clone();
            first.goal = f.clone();
            let mut second = seq;
            second.add_hyp(f.clone());
            vec![first, second]
        }
        Tactic::Unfold => vec![unfold(env, fresh, seq, &reserved)?],
        Tactic::Inst { hyp, nominal, term } => vec![inst(seq, hyp, *nominal, term)?],
        Tactic::Cut { hyp, with } => vec![cut(seq, hyp, with)?],
        Tactic::Monotone { hyp, ctx } => vec![monotone(seq, hyp, ctx)?],
        Tactic::Clear(names) => {
            let mut s = seq;
            for n in names {
                if s.remove_hyp(n).is_none() {
                    return err(format!("no hypothesis {n}"));
                }
            }
            vec![s]
        }
    };
    Ok(out)
}

/// Excludes from every variable the nominal constants its type cannot
/// contain.
pub(super) fn prune_by_type(sig: &crate::signature::Signature, seq: &mut Sequent, fresh: &mut Fresh) {
    let noms = seq.nominals();
    if noms.is_empty() {
        return;
    }
    let mut s = Subst::new();
    for v in seq.vars() {
        let add: Vec<u32> = noms
            .iter()
            .filter(|(n, ty)| v.may_contain(**n, seq.nominal_ts(**n)) && !sig.subordinate(ty, &v.ty))
            .map(|(n, _)| *n)
            .collect();
        if add.is_empty() {
            continue;
        }
        let mut excluded = v.excluded.clone();
        excluded.extend(add);
        let w = fresh.var_excluding(&v.name, v.ty.clone(), v.ts, v.kind, excluded);
        s.insert(&v, Term::Var(w));
    }
    if !s.is_empty() {
        seq.subst(&s);
    }
}

fn hyp<'a>(seq: &'a Sequent, name: &str) -> TacticResult<&'a Formula> {
    seq.hyp(name)
        .map(|h| &h.formula)
        .ok_or_else(|| TacticError::new(format!("no hypothesis {name}")))
}

fn max_level(f: &Formula, acc: &mut u32) {
    match f {
        Formula::Atom { res, .. } | Formula::Spec { res, .. } => {
            if let Restriction::Equal(k) | Restriction::Smaller(k) = res {
                *acc = (*acc).max(*k);
            }
        }
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
            max_level(a, acc);
            max_level(b, acc);
        }
        Formula::Quant(_, _, _, b) => max_level(b, acc),
        _ => {}
    }
}

/// Marks premise `n` (under any prefix of `∀`/`∇`) with `res`.
fn mark_premise(f: &Formula, n: usize, res: Restriction) -> TacticResult<Formula> {
    match f {
        Formula::Quant(q @ (Quant::Forall | Quant::Nabla), h, ty, body) => Ok(Formula::Quant(
            *q,
            h.clone(),
            ty.clone(),
            Box::new(mark_premise(body, n, res)?),
        )),
        Formula::Imp(a, b) if n == 1 => {
            if !a.is_atomic() {
                return err("the induction premise is not atomic");
            }
            Ok(Formula::imp(a.with_restriction(res), (**b).clone()))
        }
        Formula::Imp(a, b) if n > 1 => Ok(Formula::imp((**a).clone(), mark_premise(b, n - 1, res)?)),
        _ => err("goal has too few premises"),
    }
}

fn conjuncts(f: &Formula, out: &mut Vec<Formula>) {
    match f {
        Formula::And(a, b) => {
            conjuncts(a, out);
            conjuncts(b, out);
        }
        f => out.push(f.clone()),
    }
}

/// Induction on premise `ns[i]` of the `i`-th conjunct of the goal; several
/// positions give mutual induction with hypotheses `IH`, `IH1`, ….
fn induction(mut seq: Sequent, ns: &[usize]) -> TacticResult<Vec<Sequent>> {
    if ns.is_empty() {
        return err("induction expects an argument position");
    }
    if ns.contains(&0) {
        return err("premises are numbered from 1");
    }
    let mut parts = Vec::new();
    if ns.len() == 1 {
        parts.push(seq.goal.clone());
    } else {
        conjuncts(&seq.goal, &mut parts);
        if parts.len() != ns.len() {
            return err(format!(
                "goal has {} conjuncts but {} positions were given",
                parts.len(),
                ns.len()
            ));
        }
    }
    let mut level = 0;
    for f in seq.formulas() {
        max_level(f, &mut level);
    }
    let k = level + 1;
    let mut goals = Vec::new();
    for (f, n) in parts.iter().zip(ns) {
        let ih = mark_premise(f, *n, Restriction::Smaller(k))?;
        goals.push(mark_premise(f, *n, Restriction::Equal(k))?);
        let name = std::iter::once("IH".to_string())
            .chain((1..).map(|j| format!("IH{j}")))
            .find(|n| seq.hyp(n).is_none())
            .unwrap();
        seq.add_named(&name, ih);
    }
    seq.goal = goals.into_iter().reduce(Formula::and).unwrap();
    Ok(vec![seq])
}

fn intros(mut seq: Sequent, names: &[String], fresh: &mut Fresh, reserved: &HashSet<String>) -> TacticResult<Sequent> {
    let mut names = names.iter();
    let mut changed = false;
    loop {
        match seq.goal.clone() {
            Formula::Quant(Quant::Forall, h, ty, body) => {
                let hint = names.next().cloned().unwrap_or(h.0);
                let v = seq.new_eigen(&hint, ty, fresh, reserved);
                seq.goal = body.instantiate(&Term::Var(v));
            }
            Formula::Quant(Quant::Nabla, _, ty, body) => {
                let goal = seq.goal.clone();
                let n = seq.formula_fresh_nominal(&goal, fresh);
                seq.goal = body.instantiate(&Term::Nominal(n, ty));
            }
            Formula::Imp(a, b) => {
                match names.next() {
                    Some(n) if seq.hyp(n).is_none() => {
                        seq.add_named(n, *a);
                    }
                    Some(n) => return err(format!("hypothesis name {n} is taken")),
                    None => {
                        seq.add_hyp(*a);
                    }
                }
                seq.goal = *b;
            }
            _ => break,
        }
        changed = true;
    }
    if !changed {
        return err("nothing to introduce");
    }
    Ok(seq)
}

/// Adds `f` as hypotheses, splitting conjunctions and opening `∃` and `∇`.
fn add_flattened(seq: &mut Sequent, f: Formula, fresh: &mut Fresh, reserved: &HashSet<String>) {
    match f {
        Formula::True => {}
        Formula::And(a, b) => {
            add_flattened(seq, *a, fresh, reserved);
            add_flattened(seq, *b, fresh, reserved);
        }
        Formula::Quant(Quant::Exists, h, ty, body) => {
            let v = seq.new_eigen(&h.0, ty, fresh, reserved);
            add_flattened(seq, body.instantiate(&Term::Var(v)), fresh, reserved);
        }
        Formula::Quant(Quant::Nabla, _, ty, body) => {
            let whole = Formula::Quant(Quant::Nabla, Default::default(), ty.clone(), body.clone());
            let n = seq.formula_fresh_nominal(&whole, fresh);
            add_flattened(seq, body.instantiate(&Term::Nominal(n, ty)), fresh, reserved);
        }
        f => {
            seq.add_hyp(f);
        }
    }
}

/// Marks atoms of predicates in `block` with `*k`, outside negative positions.
fn mark_smaller(f: &Formula, block: &[crate::term::Symbol], k: u32) -> Formula {
    match f {
        Formula::Atom { pred, .. } if block.contains(pred) => f.with_restriction(Restriction::Smaller(k)),
        Formula::And(a, b) => Formula::and(mark_smaller(a, block, k), mark_smaller(b, block, k)),
        Formula::Or(a, b) => Formula::or(mark_smaller(a, block, k), mark_smaller(b, block, k)),
        Formula::Imp(a, b) => Formula::imp((**a).clone(), mark_smaller(b, block, k)),
        Formula::Quant(q, h, ty, b) => Formula::Quant(*q, h.clone(), ty.clone(), Box::new(mark_smaller(b, block, k))),
        f => f.clone(),
    }
}

fn case(
    env: &Env,
    fresh: &mut Fresh,
    mut seq: Sequent,
    name: &str,
    keep: bool,
    reserved: &HashSet<String>,
) -> TacticResult<Vec<Sequent>> {
    let f = hyp(&seq, name)?.clone();
    if !keep {
        seq.remove_hyp(name);
    }
    let mut out = match &f {
        Formula::True => vec![seq],
        Formula::False => vec![],
        Formula::And(..) | Formula::Quant(Quant::Exists | Quant::Nabla, ..) => {
            add_flattened(&mut seq, f.clone(), fresh, reserved);
            vec![seq]
        }
        Formula::Or(a, b) => {
            let mut l = seq.clone();
            add_flattened(&mut l, (**a).clone(), fresh, reserved);
            let mut r = seq;
            add_flattened(&mut r, (**b).clone(), fresh, reserved);
            vec![l, r]
        }
        Formula::Eq(a, b) => {
            let mut u = Unifier::new(Mode::Case, &seq.nominal_ts, fresh);
            match u.unify(a, b) {
                Ok(()) => {
                    let s = u.subst;
                    seq.subst(&s);
                    vec![seq]
                }
                Err(UnifyError::Failure(_)) => vec![],
                Err(UnifyError::Indeterminate(m)) => return err(m),
            }
        }
        Formula::Atom { pred, args, res } => {
            let Some(def) = env.defs.get(pred) else {
                return err(format!("{pred} has no definition"));
            };
            let cenv = CaseEnv {
                mode: Mode::Case,
                nominal_ts: &seq.nominal_ts,
                in_scope: seq.nominals(),
                cap: DEFAULT_NOMINAL_CAP,
            };
            let mut out = Vec::new();
            for c in &def.clauses {
                let sols = case_unify(&cenv, &Subst::new(), fresh, args, &c.pattern())
                    .map_err(|e| TacticError::new(e.to_string()))?;
                for sol in sols {
                    let mut s = seq.clone();
                    for (n, _) in &sol.new_nominals {
                        s.nominal_ts.insert(*n, 0);
                    }
                    s.subst(&sol.subst);
                    let mut binders = sol.universals.clone();
                    for (n, (_, ty)) in sol.nablas.iter().zip(c.nablas.iter()) {
                        binders.push(Term::Nominal(*n, ty.clone()));
                    }
                    let mut body = c.body.open(&binders);
                    if let Restriction::Equal(k) | Restriction::Smaller(k) = res {
                        body = mark_smaller(&body, &def.block, *k);
                    }
                    add_flattened(&mut s, body, fresh, reserved);
                    out.push(s);
                }
            }
            out
        }
        Formula::Spec { ctx, tail, goal, res } => {
            let cases = spec_case(&env.spec, ctx, tail.as_ref(), goal, *res, fresh, &seq.nominal_ts)
                .map_err(|e| TacticError::new(e.to_string()))?;
            let mut out = Vec::new();
            for c in cases {
                let mut s = seq.clone();
                for (n, _, ts) in &c.new_nominals {
                    s.nominal_ts.insert(*n, *ts);
                }
                s.subst(&c.subst);
                for h in c.hyps {
                    s.add_hyp(h.subst(&c.subst));
                }
                out.push(s);
            }
            out
        }
        Formula::Imp(..) | Formula::Quant(Quant::Forall, ..) => {
            return err(format!("cannot perform case analysis on {f}"));
        }
    };
    for s in &mut out {
        s.tidy_names(fresh, reserved);
    }
    Ok(out)
}

/// Abstracts the logic variables of `f` under existential quantifiers.
fn close_logic(f: Formula) -> Formula {
    let logic: Vec<Arc<Var>> = {
        let mut seen: Vec<Arc<Var>> = Vec::new();
        for v in f.vars() {
            if v.kind == VarKind::Logic && !seen.contains(&v) {
                seen.push(v);
            }
        }
        seen
    };
    logic.iter().rev().fold(f, |acc, v| {
        let body = acc.map_terms(&mut |t, d| abstract_var(t, v, d));
        Formula::quant(Quant::Exists, &v.name, v.ty.clone(), body)
    })
}

fn unfold(env: &Env, fresh: &mut Fresh, mut seq: Sequent, reserved: &HashSet<String>) -> TacticResult<Sequent> {
    let Formula::Atom { pred, args, .. } = &seq.goal else {
        return err("goal is not an atom");
    };
    let Some(def) = env.defs.get(pred) else {
        return err(format!("{pred} has no definition"));
    };
    let cenv = CaseEnv {
        mode: Mode::Match,
        nominal_ts: &seq.nominal_ts,
        in_scope: seq.nominals(),
        cap: DEFAULT_NOMINAL_CAP,
    };
    for c in &def.clauses {
        let sols = match case_unify(&cenv, &Subst::new(), fresh, args, &c.pattern()) {
            Ok(s) => s,
            Err(e) => return err(e.to_string()),
        };
        if let Some(sol) = sols.into_iter().next() {
            let mut binders = sol.universals.clone();
            for (n, (_, ty)) in sol.nablas.iter().zip(c.nablas.iter()) {
                binders.push(Term::Nominal(*n, ty.clone()));
            }
            for (n, _) in &sol.new_nominals {
                seq.nominal_ts.insert(*n, 0);
            }
            seq.goal = close_logic(c.body.open(&binders).subst(&sol.subst));
            seq.tidy_names(fresh, reserved);
            return Ok(seq);
        }
    }
    err("no clause matches the goal")
}

/// Binders, ∇ types, premises and conclusion of a lemma.
type LemmaParts = (Vec<(String, Ty)>, Vec<Ty>, Vec<Formula>, Formula);

/// Splits `∀x̄. ∇z̄. A₁ → … → B` into its binders, premises and conclusion.
fn lemma_parts(f: &Formula) -> LemmaParts {
    let (binders, _, _) = f.premises();
    let mut body = f;
    for _ in 0..binders.len() {
        if let Formula::Quant(_, _, _, b) = body {
            body = b;
        }
    }
    let mut nablas = Vec::new();
    while let Formula::Quant(Quant::Nabla, _, ty, b) = body {
        nablas.push(ty.clone());
        body = b;
    }
    let mut prems = Vec::new();
    while let Formula::Imp(a, b) = body {
        prems.push((**a).clone());
        body = b;
    }
    (binders, nablas, prems, body.clone())
}

/// Injective assignments of nominal constants to ∇ binders: constants of the
/// sequent first, then new ones.
fn nabla_assignments(seq: &Sequent, tys: &[Ty]) -> Vec<Vec<(u32, bool)>> {
    if tys.is_empty() {
        return vec![vec![]];
    }
    let existing = seq.nominals();
    let first_new = seq.unused_nominal();
    let mut out = Vec::new();
    let mut cur: Vec<(u32, bool)> = Vec::new();
    fn go(
        i: usize,
        tys: &[Ty],
        existing: &std::collections::BTreeMap<u32, Ty>,
        next_new: u32,
        cur: &mut Vec<(u32, bool)>,
        out: &mut Vec<Vec<(u32, bool)>>,
    ) {
        if out.len() >= 64 {
            return;
        }
        if i == tys.len() {
            out.push(cur.clone());
            return;
        }
        for (n, ty) in existing {
            if *ty == tys[i] && !cur.iter().any(|(m, _)| m == n) {
                cur.push((*n, false));
                go(i + 1, tys, existing, next_new, cur, out);
                cur.pop();
            }
        }
        cur.push((next_new, true));
        go(i + 1, tys, existing, next_new + 1, cur, out);
        cur.pop();
    }
    go(0, tys, &existing, first_new, &mut cur, &mut out);
    // prefer assignments using fewer new constants, then sequent order
    out.sort_by_key(|a| a.iter().filter(|(_, new)| *new).count());
    out
}

fn apply(
    env: &Env,
    fresh: &mut Fresh,
    seq: Sequent,
    target: &str,
    args: &[Option<String>],
    withs: &[(String, Term)],
    reserved: &HashSet<String>,
) -> TacticResult<Sequent> {
    let f = match seq.hyp(target) {
        Some(h) => h.formula.clone(),
        None => match env.lemmas.get(target) {
            Some(f) => f.clone(),
            None => return err(format!("unknown lemma or hypothesis {target}")),
        },
    };
    let parts = lemma_parts(&f);
    if args.len() != parts.2.len() {
        return err(format!(
            "{target} expects {} arguments, got {}",
            parts.2.len(),
            args.len()
        ));
    }
    let mut first_err = None;
    for assignment in nabla_assignments(&seq, &parts.1) {
        let mut fr = fresh.clone();
        match apply_with(
            env,
            &mut fr,
            seq.clone(),
            target,
            &parts,
            &assignment,
            args,
            withs,
            reserved,
        ) {
            Ok(s) => {
                *fresh = fr;
                return Ok(s);
            }
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    Err(first_err.unwrap_or_else(|| TacticError::new("apply failed")))
}

#[allow(clippy::too_many_arguments)]
fn apply_with(
    env: &Env,
    fresh: &mut Fresh,
    mut seq: Sequent,
    target: &str,
    (binders, nablas, prems, concl): &LemmaParts,
    assignment: &[(u32, bool)],
    args: &[Option<String>],
    withs: &[(String, Term)],
    reserved: &HashSet<String>,
) -> TacticResult<Sequent> {
    for (n, new) in assignment {
        if *new {
            let ts = fresh.tick();
            seq.nominal_ts.insert(*n, ts);
        }
    }
    let ts = fresh.tick();
    let excluded: Vec<u32> = assignment.iter().map(|(n, _)| *n).collect();
    let vars: Vec<Arc<Var>> = binders
        .iter()
        .map(|(n, ty)| fresh.var_excluding(n, ty.clone(), ts, VarKind::Logic, excluded.clone()))
        .collect();
    let mut terms: Vec<Term> = vars.iter().map(|v| Term::Var(v.clone())).collect();
    for ((n, _), ty) in assignment.iter().zip(nablas.iter()) {
        terms.push(Term::Nominal(*n, ty.clone()));
    }
    let mut s = Subst::new();
    for (name, t) in withs {
        let Some(i) = binders.iter().position(|(n, _)| n == name) else {
            return err(format!("{target} has no variable {name}"));
        };
        if let Some(tt) = t.ty() {
            if tt != binders[i].1 {
                return err(format!("{name} has type {}, got {tt}", binders[i].1));
            }
        }
        s.insert(&vars[i], t.clone());
    }
    let prems: Vec<Formula> = prems.iter().map(|p| p.open(&terms)).collect();
    let concl = concl.open(&terms);
    let mut pending = Vec::new();
    for (p, a) in prems.iter().zip(args) {
        let Some(name) = a else {
            pending.push(p.clone());
            continue;
        };
        let h = hyp(&seq, name)?;
        if !h.restriction().satisfies(p.restriction()) {
            return err(format!(
                "{name} does not satisfy the annotation {} required by {target}",
                p.restriction().suffix()
            ));
        }
        let p = p.subst(&s).strip();
        let h = h.strip();
        let mut sols = unify_formula(Mode::Match, &seq.nominal_ts, fresh, &s, &p, &h, false);
        if sols.is_empty() {
            // the hypothesis may hold in a smaller context than the premise
            sols = unify_formula(Mode::Match, &seq.nominal_ts, fresh, &s, &h, &p, true);
        }
        match sols.into_iter().next() {
            Some(s2) => s = s2,
            None => return err(format!("{name} does not match premise {p}")),
        }
    }
    if !pending.is_empty() {
        let goals: Vec<Formula> = pending.iter().map(|p| p.subst(&s)).collect();
        match search_goals(env, &seq, &goals, env.settings.search_depth, fresh, &s) {
            Some(s2) => s = s2,
            None => return err("could not prove the remaining premises by search"),
        }
    }
    let mut result = concl.subst(&s);
    let mut leftovers = Subst::new();
    for v in result.vars() {
        if v.kind == VarKind::Logic && !leftovers.contains(&v) {
            let e = seq.new_eigen(&v.name, v.ty.clone(), fresh, reserved);
            leftovers.insert(&v, Term::Var(e));
        }
    }
    result = result.subst(&leftovers);
    seq.add_hyp(result);
    seq.tidy_names(fresh, reserved);
    Ok(seq)
}

/// Adds a copy of a specification judgment with a nominal constant replaced
/// by a term whose support lies within that of the judgment.
fn inst(mut seq: Sequent, name: &str, n: u32, t: &Term) -> TacticResult<Sequent> {
    let f = hyp(&seq, name)?.clone();
    if !matches!(f, Formula::Spec { .. }) {
        return err("inst applies to specification judgments");
    }
    let supp = f.nominals();
    let Some(nty) = supp.get(&n) else {
        return err(format!("n{n} does not occur in {name}"));
    };
    if let Some(tt) = t.ty() {
        if tt != *nty {
            return err(format!("n{n} has type {nty}, got {tt}"));
        }
    }
    let ts = seq.nominal_ts(n);
    if t.support().contains(&n) || t.vars().iter().any(|v| v.may_contain(n, ts)) {
        return err(format!("n{n} would escape into its own instance"));
    }
    for m in t.support() {
        if !supp.contains_key(&m) {
            return err(format!("n{m} is not in the support of {name}"));
        }
    }
    if f.vars().iter().any(|v| v.may_contain(n, ts)) {
        return err(format!("a variable of {name} may depend on n{n}"));
    }
    seq.add_hyp(f.replace_nominal(n, t));
    Ok(seq)
}

fn cut(mut seq: Sequent, name: &str, with: &str) -> TacticResult<Sequent> {
    let Formula::Spec { ctx, tail, goal, res } = hyp(&seq, name)?.clone() else {
        return err(format!("{name} is not a specification judgment"));
    };
    let Formula::Spec {
        ctx: c2,
        tail: t2,
        goal: g2,
        ..
    } = hyp(&seq, with)?.clone()
    else {
        return err(format!("{with} is not a specification judgment"));
    };
    let Some(i) = ctx.iter().position(|x| *x == g2) else {
        return err(format!("{} is not in the context of {name}", g2));
    };
    let mut rest = ctx.clone();
    rest.remove(i);
    if !context_subsumed(&c2, t2.as_ref(), &rest, tail.as_ref()) {
        return err(format!("the context of {with} is not contained in that of {name}"));
    }
    let f = Formula::Spec {
        ctx: rest,
        tail,
        goal,
        res,
    };
    seq.add_hyp(f);
    Ok(seq)
}

fn monotone(mut seq: Sequent, name: &str, ctx: &Term) -> TacticResult<Sequent> {
    let Formula::Spec {
        ctx: items,
        tail,
        goal,
        res,
    } = hyp(&seq, name)?.clone()
    else {
        return err(format!("{name} is not a specification judgment"));
    };
    let Formula::Spec {
        ctx: new_items,
        tail: new_tail,
        ..
    } = normalize_spec(vec![], Some(ctx.clone()), goal.clone(), res)
    else {
        unreachable!()
    };
    if !context_subsumed(&items, tail.as_ref(), &new_items, new_tail.as_ref()) {
        return err("the new context does not contain the old one");
    }
    seq.add_hyp(normalize_spec(new_items, new_tail, goal, res));
    Ok(seq)
}
