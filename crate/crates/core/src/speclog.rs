//! The specification logic: hereditary Harrop clauses over object formulas
//! of type `o`, with `=>`, `&` and `pi`.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::metalogic::{normalize_spec, Formula, Restriction};
use crate::signature::{Signature, O};
use crate::term::{apply_normal, normalize, open_binders, Fresh, Subst, Term, Ty, VarKind};
use crate::unify::{Mode, Unifier, UnifyError};

/// `∀x̄. head :- body₁, …, bodyₙ`; head and body refer to `vars` as loose
/// indices, outermost first.
#[derive(Clone, Debug, PartialEq)]
pub struct SpecClause {
    pub vars: Vec<(String, Ty)>,
    pub head: Term,
    pub body: Vec<Term>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SpecDb {
    pub name: String,
    pub clauses: Vec<SpecClause>,
}

impl SpecDb {
    pub fn head_symbol(c: &SpecClause) -> Option<&str> {
        match c.head.spine().0 {
            Term::Const(s, _) => Some(s),
            _ => None,
        }
    }

    /// Clauses whose head predicate is `pred`.
    pub fn clauses_for<'a>(&'a self, pred: &'a str) -> impl Iterator<Item = &'a SpecClause> + 'a {
        self.clauses.iter().filter(move |c| Self::head_symbol(c) == Some(pred))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveOutcome {
    Success(Subst),
    Failure,
    DepthExhausted,
}

/// An atom available to the solver whenever the current context contains
/// `ctx` and has tail `tail`.
#[derive(Clone, Debug)]
pub struct Fact {
    pub ctx: Vec<Term>,
    pub tail: Option<Term>,
    pub atom: Term,
}

#[derive(Clone, Debug)]
struct Goal {
    ctx: Arc<Vec<Term>>,
    tail: Option<Term>,
    goal: Term,
    depth: u32,
}

pub struct Solver<'a> {
    db: &'a SpecDb,
    facts: &'a [Fact],
    pub fresh: &'a mut Fresh,
    pub nominal_ts: BTreeMap<u32, u64>,
    pub exhausted: bool,
    steps: u64,
    max_steps: u64,
}

impl<'a> Solver<'a> {
    pub fn new(db: &'a SpecDb, facts: &'a [Fact], fresh: &'a mut Fresh, nominal_ts: BTreeMap<u32, u64>) -> Self {
        Solver {
            db,
            facts,
            fresh,
            nominal_ts,
            exhausted: false,
            steps: 0,
            max_steps: 2_000_000,
        }
    }

    fn next_nominal(&self, extra: &Term) -> u32 {
        let mut m: BTreeMap<u32, Ty> = BTreeMap::new();
        extra.collect_nominals(&mut m);
        let a = m.keys().max().copied().unwrap_or(0);
        let b = self.nominal_ts.keys().max().copied().unwrap_or(0);
        a.max(b) + 1
    }

    fn unify(&mut self, subst: &Subst, a: &Term, b: &Term) -> Option<Subst> {
        let mut u = Unifier::new(Mode::Match, &self.nominal_ts, self.fresh).with_subst(subst.clone());
        match u.unify(a, b) {
            Ok(()) => Some(u.subst),
            Err(UnifyError::Failure(_)) | Err(UnifyError::Indeterminate(_)) => None,
        }
    }

    /// Runs the goals in `stack` (last is next); calls `k` on each solution
    /// until it returns `true`.
    fn go(&mut self, mut stack: Vec<Goal>, subst: &Subst, k: &mut dyn FnMut(&Subst) -> bool) -> bool {
        let Some(g) = stack.pop() else {
            return k(subst);
        };
        self.steps += 1;
        if self.steps > self.max_steps {
            self.exhausted = true;
            return false;
        }
        let t = normalize(&g.goal.subst(subst));
        let (h, args) = t.spine();
        if let Term::Const(c, cty) = h {
            match (&**c, args.len()) {
                ("pi", 1) => {
                    let n = self.next_nominal(&t);
                    let ty = match &args[0] {
                        Term::Lam(l) => l.ty.clone(),
                        _ => cty
                            .split()
                            .0
                            .first()
                            .and_then(|a| a.split().0.first().cloned())
                            .unwrap_or(Ty::base("?")),
                    };
                    let ts = self.fresh.tick();
                    self.nominal_ts.insert(n, ts);
                    let body = apply_normal(args[0].clone(), vec![Term::Nominal(n, ty)]);
                    stack.push(Goal { goal: body, ..g });
                    return self.go(stack, subst, k);
                }
                ("=>", 2) => {
                    let mut ctx = (*g.ctx).clone();
                    ctx.push(args[0].clone());
                    stack.push(Goal {
                        ctx: Arc::new(ctx),
                        tail: g.tail.clone(),
                        goal: args[1].clone(),
                        depth: g.depth,
                    });
                    return self.go(stack, subst, k);
                }
                ("&", 2) => {
                    stack.push(Goal {
                        goal: args[1].clone(),
                        ..g.clone()
                    });
                    stack.push(Goal {
                        goal: args[0].clone(),
                        ..g
                    });
                    return self.go(stack, subst, k);
                }
                _ => {}
            }
        } else {
            // goal with a flexible head: cannot be backchained on
            return false;
        }
        if g.depth == 0 {
            self.exhausted = true;
            return false;
        }
        for item in g.ctx.iter() {
            if let Some(s) = self.unify(subst, item, &t) {
                if self.go(stack.clone(), &s, k) {
                    return true;
                }
            }
        }
        let tail = g.tail.as_ref().map(|x| normalize(&x.subst(subst)));
        let facts = self.facts;
        for f in facts {
            if f.tail.as_ref().map(|x| normalize(&x.subst(subst))) != tail {
                continue;
            }
            let have: Vec<Term> = g.ctx.iter().map(|x| normalize(&x.subst(subst))).collect();
            if !f.ctx.iter().all(|c| have.contains(&normalize(&c.subst(subst)))) {
                continue;
            }
            if let Some(s) = self.unify(subst, &f.atom, &t) {
                if self.go(stack.clone(), &s, k) {
                    return true;
                }
            }
        }
        let pred = match h {
            Term::Const(c, _) => c.clone(),
            _ => unreachable!(),
        };
        let db = self.db;
        for c in db.clauses_for(&pred) {
            let ts = self.fresh.tick();
            let vars: Vec<Term> = c
                .vars
                .iter()
                .map(|(n, ty)| Term::Var(self.fresh.var(n, ty.clone(), ts, VarKind::Logic)))
                .collect();
            let head = open_binders(&c.head, &vars);
            if let Some(s) = self.unify(subst, &head, &t) {
                let mut next = stack.clone();
                for b in c.body.iter().rev() {
                    next.push(Goal {
                        ctx: g.ctx.clone(),
                        tail: g.tail.clone(),
                        goal: open_binders(b, &vars),
                        depth: g.depth - 1,
                    });
                }
                if self.go(next, &s, k) {
                    return true;
                }
            }
        }
        false
    }

    /// Enumerates up to `limit` solutions of `{tail, ctx |- goal}`.
    pub fn solve_all(
        &mut self,
        ctx: &[Term],
        tail: Option<&Term>,
        goal: &Term,
        subst: &Subst,
        depth: u32,
        limit: usize,
    ) -> Vec<Subst> {
        let mut out = Vec::new();
        let g = Goal {
            ctx: Arc::new(ctx.to_vec()),
            tail: tail.cloned(),
            goal: goal.clone(),
            depth,
        };
        self.go(vec![g], subst, &mut |s| {
            if !out.contains(s) {
                out.push(s.clone());
            }
            out.len() >= limit
        });
        out
    }
}

/// Depth-bounded proof search for `ctx |- goal`, returning the first answer.
pub fn solve(
    db: &SpecDb,
    ctx: &[Term],
    goal: &Term,
    depth: u32,
    fresh: &mut Fresh,
    nominal_ts: &BTreeMap<u32, u64>,
) -> SolveOutcome {
    let mut solver = Solver::new(db, &[], fresh, nominal_ts.clone());
    let sols = solver.solve_all(ctx, None, goal, &Subst::new(), depth, 1);
    match sols.into_iter().next() {
        Some(s) => SolveOutcome::Success(s),
        None if solver.exhausted => SolveOutcome::DepthExhausted,
        None => SolveOutcome::Failure,
    }
}

/// One case of an analysis on a specification judgment.
#[derive(Clone, Debug)]
pub struct SpecCase {
    pub subst: Subst,
    pub hyps: Vec<Formula>,
    /// Nominals introduced for `pi` premises, with their timestamps.
    pub new_nominals: Vec<(u32, Ty, u64)>,
}

/// Case analysis on `{tail, ctx |- goal}`: one case per program clause whose
/// head unifies with the goal, then one per context item, then membership in
/// the context variable.
pub fn spec_case(
    db: &SpecDb,
    ctx: &[Term],
    tail: Option<&Term>,
    goal: &Term,
    res: Restriction,
    fresh: &mut Fresh,
    nominal_ts: &BTreeMap<u32, u64>,
) -> Result<Vec<SpecCase>, UnifyError> {
    let body_res = match res {
        Restriction::Equal(k) | Restriction::Smaller(k) => Restriction::Smaller(k),
        Restriction::None => Restriction::None,
    };
    let pred = match goal.spine().0 {
        Term::Const(c, _) => c.clone(),
        _ => return Err(UnifyError::Indeterminate(format!("cannot analyse {goal}"))),
    };
    // nominals the judgment cannot mention; clause variables need not either
    let mut support = BTreeMap::new();
    let mut old_vars = Vec::new();
    for t in ctx.iter().chain(tail).chain(std::iter::once(goal)) {
        t.collect_nominals(&mut support);
        t.collect_vars(&mut old_vars);
    }
    let irrelevant: Vec<u32> = nominal_ts
        .iter()
        .filter(|(n, ts)| !support.contains_key(n) && !old_vars.iter().any(|v| v.may_contain(**n, **ts)))
        .map(|(n, _)| *n)
        .collect();
    let mut out = Vec::new();
    for c in db.clauses_for(&pred) {
        let ts = fresh.tick();
        let vars: Vec<Term> = c
            .vars
            .iter()
            .map(|(n, ty)| Term::Var(fresh.var_excluding(n, ty.clone(), ts, VarKind::Eigen, irrelevant.clone())))
            .collect();
        let head = open_binders(&c.head, &vars);
        let mut u = Unifier::new(Mode::Case, nominal_ts, fresh);
        match u.unify(&head, goal) {
            Ok(()) => {}
            Err(UnifyError::Failure(_)) => continue,
            Err(e) => return Err(e),
        }
        let s = u.subst;
        let mut case = SpecCase {
            subst: s.clone(),
            hyps: Vec::new(),
            new_nominals: Vec::new(),
        };
        let mut next_nom = nominal_ts.keys().max().copied().unwrap_or(0) + 1;
        let ctx_s: Vec<Term> = ctx.iter().map(|t| t.subst(&s)).collect();
        let tail_s = tail.map(|t| t.subst(&s));
        for b in &c.body {
            let b = open_binders(b, &vars).subst(&s);
            decompose(
                nominal_ts,
                &ctx_s,
                tail_s.as_ref(),
                b,
                body_res,
                fresh,
                &mut next_nom,
                &mut case,
            );
        }
        out.push(case);
    }
    for item in ctx {
        let mut u = Unifier::new(Mode::Case, nominal_ts, fresh);
        match u.unify(item, goal) {
            Ok(()) => out.push(SpecCase {
                subst: u.subst,
                hyps: Vec::new(),
                new_nominals: Vec::new(),
            }),
            Err(UnifyError::Failure(_)) => {}
            Err(e) => return Err(e),
        }
    }
    if let Some(l) = tail {
        out.push(SpecCase {
            subst: Subst::new(),
            hyps: vec![Formula::atom("member", vec![goal.clone(), l.clone()])],
            new_nominals: Vec::new(),
        });
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn decompose(
    nominal_ts: &BTreeMap<u32, u64>,
    ctx: &[Term],
    tail: Option<&Term>,
    g: Term,
    res: Restriction,
    fresh: &mut Fresh,
    next_nom: &mut u32,
    case: &mut SpecCase,
) {
    let g = normalize(&g);
    let (h, args) = g.spine();
    if let Term::Const(c, cty) = h {
        match (&**c, args.len()) {
            ("pi", 1) => {
                let ty = match &args[0] {
                    Term::Lam(l) => l.ty.clone(),
                    _ => cty.split().0[0].split().0[0].clone(),
                };
                let mut support = BTreeMap::new();
                let mut vars = Vec::new();
                for t in ctx.iter().chain(tail).chain(std::iter::once(&g)) {
                    t.collect_nominals(&mut support);
                    t.collect_vars(&mut vars);
                }
                let taken = |n: u32| support.contains_key(&n) || case.new_nominals.iter().any(|(m, _, _)| *m == n);
                let reusable = (1..*next_nom).find(|&n| {
                    !taken(n)
                        && nominal_ts
                            .get(&n)
                            .is_some_and(|&ts| !vars.iter().any(|v| v.may_contain(n, ts)))
                });
                let n = match reusable {
                    Some(n) => n,
                    None => {
                        let mut n = *next_nom;
                        while taken(n) {
                            n += 1;
                        }
                        *next_nom = n + 1;
                        case.new_nominals.push((n, ty.clone(), fresh.tick()));
                        n
                    }
                };
                let body = apply_normal(args[0].clone(), vec![Term::Nominal(n, ty)]);
                decompose(nominal_ts, ctx, tail, body, res, fresh, next_nom, case);
                return;
            }
            ("=>", 2) => {
                let mut ctx2 = ctx.to_vec();
                ctx2.push(args[0].clone());
                decompose(nominal_ts, &ctx2, tail, args[1].clone(), res, fresh, next_nom, case);
                return;
            }
            ("&", 2) => {
                decompose(nominal_ts, ctx, tail, args[0].clone(), res, fresh, next_nom, case);
                decompose(nominal_ts, ctx, tail, args[1].clone(), res, fresh, next_nom, case);
                return;
            }
            _ => {}
        }
    }
    case.hyps.push(normalize_spec(ctx.to_vec(), tail.cloned(), g, res));
}

/// Whether every object formula in `a` (with tail `ta`) occurs in `b` (with
/// tail `tb`), allowing weakening, permutation and contraction.
pub fn context_subsumed(a: &[Term], ta: Option<&Term>, b: &[Term], tb: Option<&Term>) -> bool {
    let tails_ok = match (ta, tb) {
        (None, _) => true,
        (Some(x), Some(y)) => x == y,
        (Some(_), None) => false,
    };
    tails_ok && a.iter().all(|x| b.contains(x))
}

/// The type `o`.
pub fn o_ty() -> Ty {
    Ty::base(O)
}

/// Checks that each clause head has type `o` and an atomic predicate head.
pub fn check_clause(sig: &Signature, c: &SpecClause) -> Result<(), String> {
    match c.head.spine().0 {
        Term::Const(p, _) => match sig.const_ty(p) {
            Some(ty) if ty.split().1 == o_ty() => Ok(()),
            _ => Err(format!("{p} is not a specification predicate")),
        },
        _ => Err(format!("clause head {} is not atomic", c.head)),
    }
}
