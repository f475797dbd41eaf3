//! Higher-order pattern unification with nominal constants.
//!
//! Nominal constants behave like constants that a metavariable may mention
//! only when its permissions allow it (see [`Var::may_contain`]); otherwise
//! the dependency has to be expressed through explicit arguments, which is
//! what pruning and raising maintain. Equations outside the pattern fragment
//! are postponed and retried once other equations have made progress; if
//! nothing else can be done they are reported as [`UnifyOutcome::Indeterminate`].

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::sync::Arc;

use crate::term::{
    apply_normal, eta_reduce, eta_short, open_binders, shift, Fresh, Permutation, Subst, Term, Ty, Var, VarKind,
};

/// Which variables are instantiatable.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Case analysis: eigenvariables and logic variables are both flexible.
    Case,
    /// Matching: only logic variables are flexible, eigenvariables are rigid.
    Match,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UnifyError {
    Failure(String),
    Indeterminate(String),
}

impl std::fmt::Display for UnifyError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            UnifyError::Failure(m) => write!(f, "unification failure: {m}"),
            UnifyError::Indeterminate(m) => write!(f, "unification problem outside the supported fragment: {m}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UnifyOutcome {
    Success(Subst),
    Failure(String),
    Indeterminate(String),
}

impl UnifyOutcome {
    pub fn is_success(&self) -> bool {
        matches!(self, UnifyOutcome::Success(_))
    }
}

/// Equations plus the nominal timestamps needed to decide dependencies.
#[derive(Clone, Debug, Default)]
pub struct UnifyProblem {
    pub equations: Vec<(Term, Term)>,
    pub nominal_ts: BTreeMap<u32, u64>,
}

/// Solves a problem with logic and eigen variables both flexible.
pub fn unify(problem: &UnifyProblem, fresh: &mut Fresh) -> UnifyOutcome {
    let mut u = Unifier::new(Mode::Case, &problem.nominal_ts, fresh);
    match u.unify_all(problem.equations.clone()) {
        Ok(()) => UnifyOutcome::Success(u.subst),
        Err(UnifyError::Failure(m)) => UnifyOutcome::Failure(m),
        Err(UnifyError::Indeterminate(m)) => UnifyOutcome::Indeterminate(m),
    }
}

pub struct Unifier<'a> {
    pub mode: Mode,
    nominal_ts: &'a BTreeMap<u32, u64>,
    pub fresh: &'a mut Fresh,
    pub subst: Subst,
}

type Res<T> = Result<T, UnifyError>;

fn fail<T>(msg: impl Into<String>) -> Res<T> {
    Err(UnifyError::Failure(msg.into()))
}

fn indet<T>(msg: impl Into<String>) -> Res<T> {
    Err(UnifyError::Indeterminate(msg.into()))
}

impl<'a> Unifier<'a> {
    pub fn new(mode: Mode, nominal_ts: &'a BTreeMap<u32, u64>, fresh: &'a mut Fresh) -> Self {
        Unifier {
            mode,
            nominal_ts,
            fresh,
            subst: Subst::new(),
        }
    }

    pub fn with_subst(mut self, s: Subst) -> Self {
        self.subst = s;
        self
    }

    pub fn flexible(&self, v: &Var) -> bool {
        match self.mode {
            Mode::Case => true,
            Mode::Match => v.kind == VarKind::Logic,
        }
    }

    /// Timestamp of a nominal; unknown nominals can never be captured.
    pub fn nominal_ts(&self, n: u32) -> u64 {
        self.nominal_ts.get(&n).copied().unwrap_or(u64::MAX)
    }

    fn may_contain(&self, v: &Var, n: u32) -> bool {
        v.may_contain(n, self.nominal_ts(n))
    }

    pub fn unify(&mut self, l: &Term, r: &Term) -> Res<()> {
        self.unify_all(vec![(l.clone(), r.clone())])
    }

    pub fn unify_all(&mut self, eqs: Vec<(Term, Term)>) -> Res<()> {
        let mut work: VecDeque<(Term, Term)> = eqs.into();
        let mut deferred: Vec<(Term, Term, String)> = Vec::new();
        let mut mark = self.subst.len();
        loop {
            while let Some((l, r)) = work.pop_front() {
                let l = l.subst(&self.subst);
                let r = r.subst(&self.subst);
                match self.step(&l, &r, &mut work) {
                    Ok(()) => {}
                    Err(UnifyError::Indeterminate(m)) => deferred.push((l, r, m)),
                    Err(e) => return Err(e),
                }
            }
            if deferred.is_empty() {
                return Ok(());
            }
            if self.subst.len() == mark {
                let (_, _, m) = deferred.swap_remove(0);
                return indet(m);
            }
            mark = self.subst.len();
            work.extend(deferred.drain(..).map(|(l, r, _)| (l, r)));
        }
    }

    fn step(&mut self, l: &Term, r: &Term, work: &mut VecDeque<(Term, Term)>) -> Res<()> {
        if l == r {
            return Ok(());
        }
        match (l, r) {
            (Term::Lam(a), Term::Lam(b)) => {
                work.push_back((a.body.clone(), b.body.clone()));
                return Ok(());
            }
            (Term::Lam(a), t) | (t, Term::Lam(a)) => {
                work.push_back((a.body.clone(), eta_expand(t)));
                return Ok(());
            }
            _ => {}
        }
        let (lh, la) = l.spine();
        let (rh, ra) = r.spine();
        let lflex = self.flex_head(lh);
        let rflex = self.flex_head(rh);
        let under_applied =
            |v: &Option<Arc<Var>>, args: &[Term]| v.as_ref().is_some_and(|v| v.ty.split().0.len() > args.len());
        if under_applied(&lflex, la) || under_applied(&rflex, ra) {
            work.push_back((eta_expand(l), eta_expand(r)));
            return Ok(());
        }
        match (lflex, rflex) {
            (Some(x), Some(y)) if x == y => self.flex_same(&x, la, ra, l, r),
            (Some(x), Some(y)) => {
                let lp = self.pattern_args(&x, la);
                let rp = self.pattern_args(&y, ra);
                let first = match lp {
                    Some(args) => self.solve(&x, &args, r),
                    None => indet(format!("{l} = {r}")),
                };
                match first {
                    Err(UnifyError::Indeterminate(m)) => match rp {
                        Some(args) => self.solve(&y, &args, &l.subst(&self.subst)),
                        None => indet(m),
                    },
                    other => other,
                }
            }
            (Some(x), None) => match self.pattern_args(&x, la) {
                Some(args) => self.solve(&x, &args, r),
                None => indet(format!("{l} = {r}")),
            },
            (None, Some(y)) => match self.pattern_args(&y, ra) {
                Some(args) => self.solve(&y, &args, l),
                None => indet(format!("{l} = {r}")),
            },
            (None, None) => {
                if !rigid_heads_equal(lh, rh) || la.len() != ra.len() {
                    return fail(format!("{l} and {r} have different heads"));
                }
                for (a, b) in la.iter().zip(ra.iter()) {
                    work.push_back((a.clone(), b.clone()));
                }
                Ok(())
            }
        }
    }

    fn flex_head(&self, h: &Term) -> Option<Arc<Var>> {
        match h {
            Term::Var(v) if self.flexible(v) => Some(v.clone()),
            _ => None,
        }
    }

    /// Pattern arguments: distinct bound variables or nominals the head cannot mention directly.
    fn pattern_args(&self, x: &Var, args: &[Term]) -> Option<Vec<Term>> {
        let mut out: Vec<Term> = Vec::with_capacity(args.len());
        for a in args {
            let a = eta_reduce(a);
            match &a {
                Term::Bound(_) => {}
                Term::Nominal(n, _) if !self.may_contain(x, *n) => {}
                _ => return None,
            }
            if out.contains(&a) {
                return None;
            }
            out.push(a);
        }
        Some(out)
    }

    fn flex_same(&mut self, x: &Arc<Var>, la: &[Term], ra: &[Term], l: &Term, r: &Term) -> Res<()> {
        let (Some(pa), Some(pb)) = (self.pattern_args(x, la), self.pattern_args(x, ra)) else {
            return indet(format!("{l} = {r}"));
        };
        if pa == pb {
            return Ok(());
        }
        let keep: Vec<usize> = (0..pa.len()).filter(|&i| pa[i] == pb[i]).collect();
        self.prune_to(x, &keep, &[]);
        Ok(())
    }

    /// Binds `v ↦ λz1..zk. v' z_keep.. extra..` and returns the fresh `v'`.
    fn prune_to(&mut self, v: &Arc<Var>, keep: &[usize], extra: &[(u32, Ty)]) -> Arc<Var> {
        self.prune_restrict(v, keep, extra, v.ts, &[])
    }

    fn prune_restrict(
        &mut self,
        v: &Arc<Var>,
        keep: &[usize],
        extra: &[(u32, Ty)],
        ts: u64,
        excluded: &[u32],
    ) -> Arc<Var> {
        let (doms, res) = v.ty.split();
        let n = doms.len();
        let new_ty = Ty::arrows(
            keep.iter()
                .map(|&i| doms[i].clone())
                .chain(extra.iter().map(|(_, t)| t.clone()))
                .collect::<Vec<_>>(),
            res,
        );
        let mut excl = v.excluded.clone();
        excl.extend_from_slice(excluded);
        let nv = self.fresh.var_excluding(&v.name, new_ty, ts.min(v.ts), v.kind, excl);
        let args: Vec<Term> = keep
            .iter()
            .map(|&i| Term::Bound((n - 1 - i) as u32))
            .chain(extra.iter().map(|(m, t)| Term::Nominal(*m, t.clone())))
            .collect();
        let mut body = Term::app(Term::Var(nv.clone()), args);
        for (i, d) in doms.iter().enumerate().rev() {
            body = Term::lam(&format!("z{}", i + 1), d.clone(), body);
        }
        self.subst.bind(v, eta_short(&body));
        nv
    }

    /// Solves `x args = t` for pattern arguments `args`.
    fn solve(&mut self, x: &Arc<Var>, args: &[Term], t: &Term) -> Res<()> {
        let body = self.invert(x, args, t, 0, true)?;
        let (doms, _) = x.ty.split();
        if doms.len() != args.len() {
            return indet(format!("{x:?} is not fully applied", x = x.name));
        }
        let mut sol = body;
        for (i, d) in doms.iter().enumerate().rev() {
            sol = Term::lam(&format!("x{}", i + 1), d.clone(), sol);
        }
        let sol = sol.subst(&self.subst);
        if self.subst.contains(x) {
            // x was restricted while inverting; unify its new value instead.
            let cur = Term::app(Term::Var(x.clone()), args.to_vec()).subst(&self.subst);
            let goal = apply_normal(sol, args.to_vec());
            return self.unify(&cur, &goal);
        }
        self.subst.bind(x, eta_short(&sol));
        Ok(())
    }

    fn err(&self, rigid: bool, msg: String) -> UnifyError {
        if rigid {
            UnifyError::Failure(msg)
        } else {
            UnifyError::Indeterminate(msg)
        }
    }

    /// Abstracts `args` out of `t`; `k` counts binders entered inside `t`.
    fn invert(&mut self, x: &Arc<Var>, args: &[Term], t: &Term, k: u32, rigid: bool) -> Res<Term> {
        let n = args.len() as u32;
        let arg_pos = |a: &Term| {
            args.iter()
                .position(|b| b == a)
                .map(|p| Term::Bound(k + n - 1 - p as u32))
        };
        match t {
            Term::Const(..) => Ok(t.clone()),
            Term::Nominal(m, _) => {
                if let Some(b) = arg_pos(t) {
                    Ok(b)
                } else if self.may_contain(x, *m) {
                    Ok(t.clone())
                } else {
                    Err(self.err(
                        rigid,
                        format!("nominal n{m} cannot occur in the instantiation of {}", x.name),
                    ))
                }
            }
            Term::Bound(i) => {
                if *i < k {
                    Ok(t.clone())
                } else if let Some(b) = arg_pos(&Term::Bound(i - k)) {
                    Ok(b)
                } else {
                    Err(self.err(rigid, format!("bound variable escapes its scope in {}", x.name)))
                }
            }
            Term::Lam(l) => {
                let body = self.invert(x, args, &l.body, k + 1, rigid)?;
                Ok(Term::lam(&l.hint, l.ty.clone(), body))
            }
            Term::Var(_) | Term::App(..) => {
                let (h, hargs) = t.spine();
                match h {
                    Term::Var(v) if v == x => {
                        if rigid {
                            fail(format!("{} occurs in {t}", x.name))
                        } else {
                            indet(format!("{} occurs under a flexible term in {t}", x.name))
                        }
                    }
                    Term::Var(v) if self.subst.contains(v) => {
                        // restricted earlier in this inversion
                        let t = t.subst(&self.subst);
                        self.invert(x, args, &t, k, rigid)
                    }
                    Term::Var(v) if self.flexible(v) && v.ty.split().0.len() > hargs.len() => {
                        let d = v.ty.split().0[hargs.len()].clone();
                        self.invert(x, args, &Term::lam("z", d, eta_expand(t)), k, rigid)
                    }
                    Term::Var(v) if self.flexible(v) => self.invert_flex(x, args, v, hargs, k, rigid),
                    Term::Var(v) => {
                        if !self.rigid_var_allowed(x, v) {
                            return Err(self.err(rigid, format!("{} cannot depend on {}", x.name, v.name)));
                        }
                        let mapped = self.invert_args(x, args, hargs, k, rigid)?;
                        Ok(Term::app(h.clone(), mapped))
                    }
                    _ => {
                        let head = self.invert(x, args, h, k, rigid)?;
                        let mapped = self.invert_args(x, args, hargs, k, rigid)?;
                        Ok(Term::app(head, mapped))
                    }
                }
            }
        }
    }

    fn invert_args(&mut self, x: &Arc<Var>, args: &[Term], hargs: &[Term], k: u32, rigid: bool) -> Res<Vec<Term>> {
        hargs.iter().map(|a| self.invert(x, args, a, k, rigid)).collect()
    }

    /// Whether a rigid variable may appear in the instantiation of `x`.
    fn rigid_var_allowed(&self, x: &Var, v: &Var) -> bool {
        v.ts <= x.ts && x.excluded.iter().all(|&m| !self.may_contain(v, m))
    }

    fn invert_flex(
        &mut self,
        x: &Arc<Var>,
        args: &[Term],
        v: &Arc<Var>,
        vargs: &[Term],
        k: u32,
        rigid: bool,
    ) -> Res<Term> {
        let n = args.len() as u32;
        let needs_restrict = x.ts < v.ts || x.excluded.iter().any(|m| !v.excluded.contains(m));
        let extra: Vec<(u32, Ty)> = args
            .iter()
            .filter_map(|a| match a {
                Term::Nominal(m, ty) if self.may_contain(v, *m) && !self.may_contain(x, *m) => Some((*m, ty.clone())),
                _ => None,
            })
            .collect();
        let is_pattern = self.pattern_args(v, vargs).is_some();
        let mut mapped: Vec<Option<Term>> = Vec::with_capacity(vargs.len());
        for a in vargs {
            match self.invert(x, args, a, k, false) {
                Ok(m) => mapped.push(Some(m)),
                Err(UnifyError::Indeterminate(msg)) | Err(UnifyError::Failure(msg)) => {
                    if is_pattern && rigid {
                        mapped.push(None);
                    } else {
                        return indet(msg);
                    }
                }
            }
        }
        let pruned = mapped.iter().any(Option::is_none);
        if !pruned && !needs_restrict && extra.is_empty() {
            let kept: Vec<Term> = mapped.into_iter().map(Option::unwrap).collect();
            return Ok(Term::app(Term::Var(v.clone()), kept));
        }
        let keep: Vec<usize> = (0..mapped.len()).filter(|&i| mapped[i].is_some()).collect();
        let nv = self.prune_restrict(v, &keep, &extra, x.ts, &x.excluded);
        let mut out: Vec<Term> = mapped.into_iter().flatten().collect();
        for (m, _) in &extra {
            let p = args
                .iter()
                .position(|b| matches!(b, Term::Nominal(q, _) if q == m))
                .unwrap();
            out.push(Term::Bound(k + n - 1 - p as u32));
        }
        Ok(Term::app(Term::Var(nv), out))
    }
}

fn eta_expand(t: &Term) -> Term {
    apply_normal(shift(t, 1, 0), vec![Term::Bound(0)])
}

fn rigid_heads_equal(a: &Term, b: &Term) -> bool {
    match (a, b) {
        (Term::Const(x, _), Term::Const(y, _)) => x == y,
        (Term::Nominal(x, _), Term::Nominal(y, _)) => x == y,
        (Term::Bound(x), Term::Bound(y)) => x == y,
        (Term::Var(x), Term::Var(y)) => x == y,
        _ => false,
    }
}

// ---------------------------------------------------------------------------
// Permutations

/// Values whose nominal constants can be enumerated and renamed.
pub trait Nominals: Sized {
    fn nominals(&self) -> BTreeMap<u32, Ty>;
    fn permute(&self, p: &Permutation) -> Self;
}

impl Nominals for Term {
    fn nominals(&self) -> BTreeMap<u32, Ty> {
        let mut out = BTreeMap::new();
        crate::term::normalize(self).collect_nominals(&mut out);
        out
    }
    fn permute(&self, p: &Permutation) -> Self {
        Term::permute(self, p)
    }
}

/// Default bound on the number of nominal constants considered at once.
pub const DEFAULT_NOMINAL_CAP: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("too many nominal constants to enumerate permutations ({found} > {cap})")]
pub struct TooManyNominals {
    pub found: usize,
    pub cap: usize,
}

/// All type-preserving injections from `src` into `dst` (as permutations),
/// keeping fixed every nominal for which `movable` is false.
pub fn injections(
    src: &BTreeMap<u32, Ty>,
    dst: &BTreeMap<u32, Ty>,
    movable: &dyn Fn(u32) -> bool,
    cap: usize,
) -> Result<Vec<Permutation>, TooManyNominals> {
    let found = src.len().max(dst.len());
    if found > cap {
        return Err(TooManyNominals { found, cap });
    }
    let src: Vec<(u32, Ty)> = src.iter().map(|(a, b)| (*a, b.clone())).collect();
    let mut out = Vec::new();
    let mut chosen: Vec<(u32, u32)> = Vec::new();
    let mut used = BTreeSet::new();
    fn go(
        i: usize,
        src: &[(u32, Ty)],
        dst: &BTreeMap<u32, Ty>,
        movable: &dyn Fn(u32) -> bool,
        chosen: &mut Vec<(u32, u32)>,
        used: &mut BTreeSet<u32>,
        out: &mut Vec<Permutation>,
    ) {
        if i == src.len() {
            if let Some(p) = Permutation::from_injection(chosen) {
                if p.pairs().all(|(a, b)| a == b || (movable(a) && movable(b))) {
                    out.push(p);
                }
            }
            return;
        }
        let (a, ty) = &src[i];
        let targets: Vec<u32> = if movable(*a) {
            dst.iter().filter(|(_, t)| *t == ty).map(|(b, _)| *b).collect()
        } else {
            vec![*a]
        };
        for b in targets {
            if used.contains(&b) {
                continue;
            }
            used.insert(b);
            chosen.push((*a, b));
            go(i + 1, src, dst, movable, chosen, used, out);
            chosen.pop();
            used.remove(&b);
        }
    }
    go(0, &src, dst, movable, &mut chosen, &mut used, &mut out);
    Ok(out)
}

/// A permutation `p` with `h.permute(p) == g`, if one exists.
pub fn hyp_match<T: Nominals + PartialEq>(h: &T, g: &T) -> Option<Permutation> {
    hyp_match_with(h, g, &|_| true, DEFAULT_NOMINAL_CAP).ok().flatten()
}

pub fn hyp_match_with<T: Nominals + PartialEq>(
    h: &T,
    g: &T,
    movable: &dyn Fn(u32) -> bool,
    cap: usize,
) -> Result<Option<Permutation>, TooManyNominals> {
    let hs = h.nominals();
    let gs = g.nominals();
    if hs.len() != gs.len() {
        return Ok(None);
    }
    for p in injections(&hs, &gs, movable, cap)? {
        if h.permute(&p) == *g {
            return Ok(Some(p));
        }
    }
    Ok(None)
}

// ---------------------------------------------------------------------------
// Case analysis against clause heads with ∇-bound variables

/// A clause head `∀x̄. ∇z̄. H`; `head` refers to the binders as loose
/// de Bruijn indices, universals outermost, the last ∇ variable innermost.
#[derive(Clone, Debug)]
pub struct HeadPattern {
    pub universals: Vec<(String, Ty)>,
    pub nablas: Vec<(String, Ty)>,
    pub head: Vec<Term>,
}

/// Context for [`case_unify`].
#[derive(Clone, Debug)]
pub struct CaseEnv<'a> {
    pub mode: Mode,
    pub nominal_ts: &'a BTreeMap<u32, u64>,
    /// Nominal constants already present (candidates for ∇ variables).
    pub in_scope: BTreeMap<u32, Ty>,
    pub cap: usize,
}

#[derive(Clone, Debug)]
pub struct CaseSolution {
    pub subst: Subst,
    /// Instantiations of the clause's universal variables.
    pub universals: Vec<Term>,
    /// Nominals assigned to the ∇ variables, in order.
    pub nablas: Vec<u32>,
    /// Nominals that did not occur before this step, with the timestamp they receive.
    pub new_nominals: Vec<(u32, Ty)>,
}

/// Unifies `atom` (argument list) against a clause head, enumerating the
/// assignments of the head's ∇ variables to nominal constants that are either
/// present already or fresh. Universals may not mention the nominals given
/// to the ∇ variables.
pub fn case_unify(
    env: &CaseEnv<'_>,
    base: &Subst,
    fresh: &mut Fresh,
    atom: &[Term],
    head: &HeadPattern,
) -> Result<Vec<CaseSolution>, UnifyError> {
    let mut candidates: BTreeMap<u32, Ty> = env.in_scope.clone();
    for a in atom {
        a.collect_nominals(&mut candidates);
    }
    let mut next_fresh = candidates.keys().max().copied().unwrap_or(0) + 1;
    for m in env.nominal_ts.keys() {
        next_fresh = next_fresh.max(m + 1);
    }
    let mut fresh_pool: Vec<(u32, Ty)> = Vec::new();
    for (_, ty) in &head.nablas {
        fresh_pool.push((next_fresh, ty.clone()));
        next_fresh += 1;
    }
    if candidates.len() + fresh_pool.len() > env.cap {
        return Err(UnifyError::Indeterminate(
            TooManyNominals {
                found: candidates.len() + fresh_pool.len(),
                cap: env.cap,
            }
            .to_string(),
        ));
    }
    let assignments = nabla_assignments(&head.nablas, &candidates, &fresh_pool);
    let mut out: Vec<CaseSolution> = Vec::new();
    for assign in assignments {
        let mut ts = env.nominal_ts.clone();
        let mut new_nominals = Vec::new();
        for (m, ty) in &assign {
            if !candidates.contains_key(m) {
                ts.insert(*m, 0);
                new_nominals.push((*m, ty.clone()));
            }
        }
        let excluded: Vec<u32> = assign.iter().map(|(m, _)| *m).collect();
        let kind = match env.mode {
            Mode::Case => VarKind::Eigen,
            Mode::Match => VarKind::Logic,
        };
        let uts = fresh.tick();
        let universals: Vec<Term> = head
            .universals
            .iter()
            .map(|(name, ty)| Term::Var(fresh.var_excluding(name, ty.clone(), uts, kind, excluded.clone())))
            .collect();
        let mut all = universals.clone();
        all.extend(assign.iter().map(|(m, ty)| Term::Nominal(*m, ty.clone())));
        let eqs: Vec<(Term, Term)> = atom
            .iter()
            .zip(head.head.iter())
            .map(|(a, h)| (a.clone(), open_binders(h, &all)))
            .collect();
        let mut u = Unifier::new(env.mode, &ts, fresh).with_subst(base.clone());
        match u.unify_all(eqs) {
            Ok(()) => {
                let subst = u.subst;
                let universals = universals.iter().map(|t| t.subst(&subst)).collect();
                out.push(CaseSolution {
                    subst,
                    universals,
                    nablas: excluded,
                    new_nominals,
                });
            }
            Err(UnifyError::Failure(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// Injective assignments of ∇ variables to candidates or fresh nominals.
/// Fresh nominals are used in order so that assignments differing only by a
/// renaming of fresh names are generated once.
fn nabla_assignments(
    nablas: &[(String, Ty)],
    candidates: &BTreeMap<u32, Ty>,
    fresh_pool: &[(u32, Ty)],
) -> Vec<Vec<(u32, Ty)>> {
    let mut out = Vec::new();
    let mut cur: Vec<(u32, Ty)> = Vec::new();
    fn go(
        i: usize,
        nablas: &[(String, Ty)],
        candidates: &BTreeMap<u32, Ty>,
        fresh_pool: &[(u32, Ty)],
        fresh_used: usize,
        cur: &mut Vec<(u32, Ty)>,
        out: &mut Vec<Vec<(u32, Ty)>>,
    ) {
        if i == nablas.len() {
            out.push(cur.clone());
            return;
        }
        let ty = &nablas[i].1;
        for (m, mty) in candidates {
            if mty == ty && !cur.iter().any(|(c, _)| c == m) {
                cur.push((*m, ty.clone()));
                go(i + 1, nablas, candidates, fresh_pool, fresh_used, cur, out);
                cur.pop();
            }
        }
        if fresh_used < fresh_pool.len() {
            cur.push((fresh_pool[fresh_used].0, ty.clone()));
            go(i + 1, nablas, candidates, fresh_pool, fresh_used + 1, cur, out);
            cur.pop();
        }
    }
    go(0, nablas, candidates, fresh_pool, 0, &mut cur, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{normalize, Fresh, Ty};

    fn tm() -> Ty {
        Ty::base("tm")
    }
    fn c() -> Term {
        Term::cnst("c", tm())
    }
    fn app() -> Term {
        Term::cnst("app", Ty::arrows([tm(), tm()], tm()))
    }
    fn abs() -> Term {
        Term::cnst("abs", Ty::arrow(Ty::arrow(tm(), tm()), tm()))
    }
    fn n(i: u32) -> Term {
        Term::nominal(i, tm())
    }
    fn ap(h: Term, a: Vec<Term>) -> Term {
        Term::app(h, a)
    }

    struct Ctx {
        fresh: Fresh,
    }
    impl Ctx {
        fn new() -> Self {
            Ctx { fresh: Fresh::new(0) }
        }
        fn v(&mut self, name: &str, ty: Ty) -> Arc<Var> {
            self.fresh.var(name, ty, 10, VarKind::Logic)
        }
        fn solve(&mut self, l: Term, r: Term) -> UnifyOutcome {
            let p = UnifyProblem {
                equations: vec![(l, r)],
                nominal_ts: BTreeMap::new(),
            };
            unify(&p, &mut self.fresh)
        }
    }

    fn check_equalizes(out: &UnifyOutcome, l: &Term, r: &Term) -> Subst {
        match out {
            UnifyOutcome::Success(s) => {
                assert_eq!(
                    normalize(&l.subst(s)),
                    normalize(&r.subst(s)),
                    "unifier does not equalize"
                );
                s.clone()
            }
            o => panic!("expected success, got {o:?}"),
        }
    }

    #[test]
    fn beta_clause_problem() {
        let mut cx = Ctx::new();
        let b = cx.v("B", tm());
        let r = cx.v("R", Ty::arrow(tm(), tm()));
        let m = cx.v("M", tm());
        let l = Term::var(&b);
        let rhs = ap(Term::var(&r), vec![Term::var(&m)]);
        let out = cx.solve(l.clone(), rhs.clone());
        let s = check_equalizes(&out, &l, &rhs);
        assert_eq!(s.get(&b), Some(&rhs));
        assert!(!s.contains(&r) && !s.contains(&m));
    }

    #[test]
    fn nominal_extension_problems() {
        let mut cx = Ctx::new();
        let b = cx.v("B", Ty::arrow(tm(), tm()));
        let r = cx.v("R", Ty::arrows([tm(), tm()], tm()));
        let m = cx.v("M", tm());
        let l = ap(Term::var(&b), vec![n(1)]);
        let rhs = ap(Term::var(&r), vec![Term::var(&m), n(1)]);
        let out = cx.solve(l.clone(), rhs.clone());
        let s = check_equalizes(&out, &l, &rhs);
        assert!(s.contains(&b));

        let b = cx.v("B", Ty::arrow(tm(), tm()));
        let r = cx.v("R", Ty::arrow(tm(), tm()));
        let m = cx.v("M", Ty::arrow(tm(), tm()));
        let l = ap(Term::var(&b), vec![n(1)]);
        let rhs = ap(Term::var(&r), vec![ap(Term::var(&m), vec![n(1)])]);
        let out = cx.solve(l.clone(), rhs.clone());
        let s = check_equalizes(&out, &l, &rhs);
        let expect = Term::lam(
            "y",
            tm(),
            ap(Term::var(&r), vec![ap(Term::var(&m), vec![Term::Bound(0)])]),
        );
        assert_eq!(s.get(&b), Some(&expect));
    }

    #[test]
    fn clash_and_occurs() {
        let mut cx = Ctx::new();
        let x = cx.v("X", tm());
        let y = cx.v("Y", tm());
        let t = cx.v("T", tm());
        let r = cx.v("R", Ty::arrow(tm(), tm()));
        let out = cx.solve(
            ap(app(), vec![Term::var(&x), Term::var(&y)]),
            ap(abs(), vec![Term::var(&r)]),
        );
        assert!(matches!(out, UnifyOutcome::Failure(_)));
        let _ = t;
        let out = cx.solve(Term::var(&x), ap(app(), vec![Term::var(&x), c()]));
        assert!(matches!(out, UnifyOutcome::Failure(_)));
    }

    #[test]
    fn nominal_escape_fails() {
        let mut cx = Ctx::new();
        let x = cx.v("X", tm());
        let out = cx.solve(Term::var(&x), n(1));
        assert!(matches!(out, UnifyOutcome::Failure(_)));
    }

    #[test]
    fn pruning_under_flex() {
        // X n1 = f (Y n1 n2) forces Y to ignore its second argument.
        let mut cx = Ctx::new();
        let x = cx.v("X", Ty::arrow(tm(), tm()));
        let y = cx.v("Y", Ty::arrows([tm(), tm()], tm()));
        let l = ap(Term::var(&x), vec![n(1)]);
        let r = ap(app(), vec![c(), ap(Term::var(&y), vec![n(1), n(2)])]);
        let out = cx.solve(l.clone(), r.clone());
        let s = check_equalizes(&out, &l, &r);
        assert!(s.contains(&y));
    }

    #[test]
    fn flex_flex_same_var() {
        let mut cx = Ctx::new();
        let x = cx.v("X", Ty::arrows([tm(), tm()], tm()));
        let l = ap(Term::var(&x), vec![n(1), n(2)]);
        let r = ap(Term::var(&x), vec![n(2), n(1)]);
        let out = cx.solve(l.clone(), r.clone());
        check_equalizes(&out, &l, &r);
    }

    #[test]
    fn lambda_and_eta() {
        let mut cx = Ctx::new();
        let r = cx.v("R", Ty::arrow(tm(), tm()));
        let lhs = ap(abs(), vec![Term::var(&r)]);
        let rhs = ap(abs(), vec![Term::lam("x", tm(), ap(app(), vec![Term::Bound(0), c()]))]);
        let out = cx.solve(lhs.clone(), rhs.clone());
        check_equalizes(&out, &lhs, &rhs);
    }

    #[test]
    fn non_pattern_is_indeterminate() {
        let mut cx = Ctx::new();
        let r = cx.v("R", Ty::arrow(tm(), tm()));
        let m = cx.v("M", tm());
        let out = cx.solve(ap(Term::var(&r), vec![Term::var(&m)]), ap(app(), vec![c(), c()]));
        assert!(matches!(out, UnifyOutcome::Indeterminate(_)));
    }

    #[test]
    fn match_mode_keeps_eigen_rigid() {
        let mut fresh = Fresh::new(0);
        let e = fresh.var("E", tm(), 1, VarKind::Eigen);
        let x = fresh.var("X", tm(), 5, VarKind::Logic);
        let ts = BTreeMap::new();
        let mut u = Unifier::new(Mode::Match, &ts, &mut fresh);
        assert!(u.unify(&Term::var(&e), &c()).is_err());
        assert!(u.unify(&Term::var(&x), &Term::var(&e)).is_ok());
        // a logic variable older than an eigenvariable cannot capture it
        let old = u.fresh.var("Old", tm(), 0, VarKind::Logic);
        assert!(u.unify(&Term::var(&old), &Term::var(&e)).is_err());
    }

    #[test]
    fn hyp_match_examples() {
        let p = |a: Term, b: Term| ap(Term::cnst("p", Ty::arrows([tm(), tm()], Ty::base("o"))), vec![a, b]);
        assert_eq!(hyp_match(&p(n(1), n(2)), &p(n(2), n(1))), Some(Permutation::swap(1, 2)));
        let pc = ap(Term::cnst("p", Ty::arrow(tm(), Ty::base("o"))), vec![c()]);
        assert_eq!(hyp_match(&pc, &pc), Some(Permutation::identity()));
        assert_eq!(hyp_match(&p(n(1), n(1)), &p(n(1), n(2))), None);
    }

    fn name_head() -> HeadPattern {
        HeadPattern {
            universals: vec![],
            nablas: vec![("x".into(), tm())],
            head: vec![Term::Bound(0)],
        }
    }

    fn fresh_head() -> HeadPattern {
        // ∀E. ∇x. fresh x E: E is Bound(1), x is Bound(0)
        HeadPattern {
            universals: vec![("E".into(), tm())],
            nablas: vec![("x".into(), tm())],
            head: vec![Term::Bound(0), Term::Bound(1)],
        }
    }

    fn case_env(ts: &BTreeMap<u32, u64>) -> CaseEnv<'_> {
        CaseEnv {
            mode: Mode::Case,
            nominal_ts: ts,
            in_scope: BTreeMap::new(),
            cap: DEFAULT_NOMINAL_CAP,
        }
    }

    #[test]
    fn case_unify_name_and_fresh() {
        let ts: BTreeMap<u32, u64> = [(1, 1), (2, 2)].into_iter().collect();
        let env = case_env(&ts);
        let mut fresh = Fresh::new(100);

        let sols = case_unify(&env, &Subst::new(), &mut fresh, &[n(1)], &name_head()).unwrap();
        assert_eq!(sols.len(), 1);
        assert_eq!(sols[0].nablas, vec![1]);
        assert!(sols[0].subst.is_empty());

        let cc = ap(app(), vec![c(), c()]);
        let sols = case_unify(&env, &Subst::new(), &mut fresh, &[cc], &name_head()).unwrap();
        assert!(sols.is_empty());

        let bad = ap(app(), vec![n(1), c()]);
        let sols = case_unify(&env, &Subst::new(), &mut fresh, &[n(1), bad], &fresh_head()).unwrap();
        assert!(sols.is_empty());

        let good = ap(app(), vec![n(2), c()]);
        let sols = case_unify(&env, &Subst::new(), &mut fresh, &[n(1), good.clone()], &fresh_head()).unwrap();
        assert_eq!(sols.len(), 1);
        assert_eq!(sols[0].universals, vec![good]);
    }

    #[test]
    fn case_unify_eigen_becomes_fresh_nominal() {
        let ts = BTreeMap::new();
        let env = case_env(&ts);
        let mut fresh = Fresh::new(100);
        let e = fresh.var("E", tm(), 5, VarKind::Eigen);
        let sols = case_unify(&env, &Subst::new(), &mut fresh, &[Term::var(&e)], &name_head()).unwrap();
        assert_eq!(sols.len(), 1);
        assert_eq!(sols[0].subst.get(&e), Some(&n(1)));
        assert_eq!(sols[0].new_nominals.len(), 1);
    }
}
