//! Depth-bounded proof search: hypotheses first, then unfolding of
//! definitions, then backchaining on specification clauses.

use std::collections::BTreeMap;
use std::sync::Arc;

use super::matching::unify_formula;
use super::Env;
use crate::metalogic::sequent::Sequent;
use crate::metalogic::{Formula, Quant, Restriction};
use crate::speclog::{Fact, Solver};
use crate::term::{normalize, Fresh, Subst, Term, VarKind};
use crate::unify::{case_unify, injections, CaseEnv, Mode, Unifier, DEFAULT_NOMINAL_CAP};

#[derive(Clone)]
struct Goal {
    f: Formula,
    depth: u32,
    hyps: Arc<Vec<Formula>>,
    nts: Arc<BTreeMap<u32, u64>>,
}

struct Searcher<'a> {
    env: &'a Env,
    fresh: &'a mut Fresh,
    steps: u64,
}

const MAX_STEPS: u64 = 200_000;
const SPEC_SOLUTIONS: usize = 8;

/// Splits conjunctions of a new hypothesis.
fn flatten(f: Formula, out: &mut Vec<Formula>) {
    match f {
        Formula::And(a, b) => {
            flatten(*a, out);
            flatten(*b, out);
        }
        Formula::True => {}
        f => out.push(f),
    }
}

impl Searcher<'_> {
    fn go(&mut self, mut stack: Vec<Goal>, s: &Subst, k: &mut dyn FnMut(&Subst) -> bool) -> bool {
        let Some(g) = stack.pop() else {
            return k(s);
        };
        self.steps += 1;
        if self.steps > MAX_STEPS {
            return false;
        }
        if g.hyps.contains(&Formula::False) {
            return self.go(stack, s, k);
        }
        let f = g.f.subst(s);
        if matches!(f, Formula::Quant(..) | Formula::Or(..) | Formula::Imp(..)) {
            let stripped = f.strip();
            for h in g.hyps.iter().filter(|h| !h.is_atomic()) {
                let h = h.subst(s).strip();
                for s2 in unify_formula(Mode::Match, &g.nts, self.fresh, s, &h, &stripped, true) {
                    if self.go(stack.clone(), &s2, k) {
                        return true;
                    }
                }
            }
        }
        match &f {
            Formula::True => self.go(stack, s, k),
            Formula::False => false,
            Formula::Eq(a, b) => {
                let mut u = Unifier::new(Mode::Match, &g.nts, self.fresh).with_subst(s.clone());
                match u.unify(a, b) {
                    Ok(()) => {
                        let s2 = u.subst;
                        self.go(stack, &s2, k)
                    }
                    Err(_) => false,
                }
            }
            Formula::And(a, b) => {
                stack.push(Goal {
                    f: (**b).clone(),
                    ..g.clone()
                });
                stack.push(Goal { f: (**a).clone(), ..g });
                self.go(stack, s, k)
            }
            Formula::Or(a, b) => {
                let mut left = stack.clone();
                left.push(Goal {
                    f: (**a).clone(),
                    ..g.clone()
                });
                if self.go(left, s, k) {
                    return true;
                }
                stack.push(Goal { f: (**b).clone(), ..g });
                self.go(stack, s, k)
            }
            Formula::Quant(q, h, ty, body) => {
                let mut nts = (*g.nts).clone();
                let arg = match q {
                    Quant::Exists | Quant::Forall => {
                        let kind = if *q == Quant::Exists {
                            VarKind::Logic
                        } else {
                            VarKind::Eigen
                        };
                        let ts = self.fresh.tick();
                        Term::Var(self.fresh.var(&h.0, ty.clone(), ts, kind))
                    }
                    Quant::Nabla => {
                        let mut tmp = Sequent::new(Formula::True);
                        tmp.nominal_ts = nts.clone();
                        let n = tmp.formula_fresh_nominal(&f, self.fresh);
                        nts = tmp.nominal_ts;
                        Term::Nominal(n, ty.clone())
                    }
                };
                stack.push(Goal {
                    f: body.instantiate(&arg),
                    nts: Arc::new(nts),
                    ..g
                });
                self.go(stack, s, k)
            }
            Formula::Imp(a, b) => {
                let mut hyps = (*g.hyps).clone();
                flatten((**a).clone(), &mut hyps);
                stack.push(Goal {
                    f: (**b).clone(),
                    hyps: Arc::new(hyps),
                    ..g
                });
                self.go(stack, s, k)
            }
            Formula::Atom { .. } | Formula::Spec { .. } => self.atomic(stack, g, f, s, k),
        }
    }

    fn atomic(&mut self, stack: Vec<Goal>, g: Goal, f: Formula, s: &Subst, k: &mut dyn FnMut(&Subst) -> bool) -> bool {
        let need = f.restriction();
        let stripped = f.strip();
        let goal_vars = f.vars();
        for h in g.hyps.iter() {
            if !h.is_atomic() || !h.restriction().satisfies(need) {
                continue;
            }
            let h = h.subst(s).strip();
            let mut dst = stripped.nominals();
            let src = h.nominals();
            dst.extend(src.clone());
            let vars: Vec<_> = h.vars().into_iter().chain(goal_vars.iter().cloned()).collect();
            let nts = g.nts.clone();
            let movable = |n: u32| {
                let ts = nts.get(&n).copied().unwrap_or(u64::MAX);
                !vars.iter().any(|v| v.may_contain(n, ts))
            };
            let Ok(perms) = injections(&src, &dst, &movable, DEFAULT_NOMINAL_CAP) else {
                continue;
            };
            let mut tried: Vec<Formula> = Vec::new();
            for p in perms {
                let hp = h.permute(&p);
                if tried.contains(&hp) {
                    continue;
                }
                tried.push(hp.clone());
                for s2 in unify_formula(Mode::Match, &g.nts, self.fresh, s, &hp, &stripped, true) {
                    if self.go(stack.clone(), &s2, k) {
                        return true;
                    }
                }
            }
        }
        if g.depth == 0 || need != Restriction::None {
            return false;
        }
        match &f {
            Formula::Atom { pred, args, .. } => {
                let Some(def) = self.env.defs.get(pred) else {
                    return false;
                };
                let mut in_scope = BTreeMap::new();
                for h in g.hyps.iter() {
                    h.collect_nominals(&mut in_scope);
                }
                let cenv = CaseEnv {
                    mode: Mode::Match,
                    nominal_ts: &g.nts,
                    in_scope,
                    cap: DEFAULT_NOMINAL_CAP,
                };
                for c in &def.clauses {
                    let Ok(sols) = case_unify(&cenv, s, self.fresh, args, &c.pattern()) else {
                        continue;
                    };
                    for sol in sols {
                        let mut binders = sol.universals.clone();
                        for (n, (_, ty)) in sol.nablas.iter().zip(c.nablas.iter()) {
                            binders.push(Term::Nominal(*n, ty.clone()));
                        }
                        let body = c.body.open(&binders);
                        let mut nts = (*g.nts).clone();
                        for (n, _) in &sol.new_nominals {
                            nts.insert(*n, 0);
                        }
                        let mut next = stack.clone();
                        next.push(Goal {
                            f: body,
                            depth: g.depth - 1,
                            hyps: g.hyps.clone(),
                            nts: Arc::new(nts),
                        });
                        if self.go(next, &sol.subst, k) {
                            return true;
                        }
                    }
                }
                false
            }
            Formula::Spec { ctx, tail, goal, .. } => {
                let facts = facts_from(&g.hyps, s);
                let sols = {
                    let mut solver = Solver::new(&self.env.spec, &facts, self.fresh, (*g.nts).clone());
                    solver.solve_all(ctx, tail.as_ref(), goal, s, g.depth, SPEC_SOLUTIONS)
                };
                for s2 in sols {
                    if self.go(stack.clone(), &s2, k) {
                        return true;
                    }
                }
                false
            }
            _ => false,
        }
    }
}

/// Atoms usable by the specification solver: atomic judgments among the
/// hypotheses and memberships in a context variable.
fn facts_from(hyps: &[Formula], s: &Subst) -> Vec<Fact> {
    let mut out = Vec::new();
    for h in hyps {
        match h.subst(s) {
            Formula::Spec { ctx, tail, goal, .. } => out.push(Fact {
                ctx,
                tail,
                atom: normalize(&goal),
            }),
            Formula::Atom { pred, args, .. } if &*pred == "member" && args.len() == 2 => out.push(Fact {
                ctx: vec![],
                tail: Some(args[1].clone()),
                atom: args[0].clone(),
            }),
            _ => {}
        }
    }
    out
}

/// Searches for a proof of all `goals` in the context of `seq`, returning
/// the instantiation of logic variables that was used.
pub fn search_goals(
    env: &Env,
    seq: &Sequent,
    goals: &[Formula],
    depth: u32,
    fresh: &mut Fresh,
    s: &Subst,
) -> Option<Subst> {
    let mut hyps = Vec::new();
    for h in &seq.hyps {
        flatten(h.formula.clone(), &mut hyps);
    }
    let hyps = Arc::new(hyps);
    let nts = Arc::new(seq.nominal_ts.clone());
    let stack: Vec<Goal> = goals
        .iter()
        .rev()
        .map(|f| Goal {
            f: f.clone(),
            depth,
            hyps: hyps.clone(),
            nts: nts.clone(),
        })
        .collect();
    let mut searcher = Searcher { env, fresh, steps: 0 };
    let mut found = None;
    searcher.go(stack, s, &mut |s2| {
        found = Some(s2.clone());
        true
    });
    found
}

pub fn search_goal(env: &Env, seq: &Sequent, depth: u32, fresh: &mut Fresh) -> bool {
    search_goals(env, seq, std::slice::from_ref(&seq.goal), depth, fresh, &Subst::new()).is_some()
}
