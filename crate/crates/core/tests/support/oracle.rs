//! Brute-force unification oracle over a small ground grammar.
//!
//! Terms use their own representation (binary application, de Bruijn
//! indices) and their own normalizer so that verdicts do not depend on the
//! code under test. Signature: `a, b : i`, `f : i -> i -> i`,
//! `g : (i -> i) -> i`, nominal constants `n1` (timestamp 10) and `n2`
//! (timestamp 20). Metavariables have type `i -> … -> i` with at most two
//! arguments.

use std::collections::BTreeMap;
use std::sync::Arc;

use nabla_core::term::{eta_short, normalize, Fresh, Subst, Term, Ty, Var, VarKind};
use nabla_core::unify::{unify, UnifyOutcome, UnifyProblem};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum O {
    Con(&'static str),
    Nom(u32),
    Bv(u32),
    Mv(usize),
    Lam(Box<O>),
    App(Box<O>, Box<O>),
}

use O::*;

pub fn app(h: O, args: Vec<O>) -> O {
    args.into_iter().fold(h, |h, a| App(Box::new(h), Box::new(a)))
}

fn lam(n: usize, body: O) -> O {
    (0..n).fold(body, |b, _| Lam(Box::new(b)))
}

fn shift(t: &O, by: i64, cut: u32) -> O {
    match t {
        Bv(i) if *i >= cut => Bv((*i as i64 + by) as u32),
        Lam(b) => Lam(Box::new(shift(b, by, cut + 1))),
        App(h, a) => App(Box::new(shift(h, by, cut)), Box::new(shift(a, by, cut))),
        t => t.clone(),
    }
}

fn subst_bv(t: &O, k: u32, s: &O) -> O {
    match t {
        Bv(i) if *i == k => shift(s, k as i64, 0),
        Bv(i) if *i > k => Bv(i - 1),
        Lam(b) => Lam(Box::new(subst_bv(b, k + 1, s))),
        App(h, a) => App(Box::new(subst_bv(h, k, s)), Box::new(subst_bv(a, k, s))),
        t => t.clone(),
    }
}

/// β-normal form followed by η-reduction.
pub fn norm(t: &O) -> O {
    eta(&beta(t))
}

fn beta(t: &O) -> O {
    match t {
        Lam(b) => Lam(Box::new(beta(b))),
        App(h, a) => {
            let h = beta(h);
            let a = beta(a);
            match h {
                Lam(b) => beta(&subst_bv(&b, 0, &a)),
                h => App(Box::new(h), Box::new(a)),
            }
        }
        t => t.clone(),
    }
}

fn free_in(t: &O, k: u32) -> bool {
    match t {
        Bv(i) => *i == k,
        Lam(b) => free_in(b, k + 1),
        App(h, a) => free_in(h, k) || free_in(a, k),
        _ => false,
    }
}

fn eta(t: &O) -> O {
    match t {
        Lam(b) => {
            let b = eta(b);
            if let App(h, a) = &b {
                if **a == Bv(0) && !free_in(h, 0) {
                    return shift(h, -1, 0);
                }
            }
            Lam(Box::new(b))
        }
        App(h, a) => App(Box::new(eta(h)), Box::new(eta(a))),
        t => t.clone(),
    }
}

/// Replaces metavariables by their values where assigned.
pub fn inst(t: &O, vals: &[Option<O>]) -> O {
    match t {
        Mv(i) => vals.get(*i).cloned().flatten().unwrap_or(Mv(*i)),
        Lam(b) => Lam(Box::new(inst(b, vals))),
        App(h, a) => App(Box::new(inst(h, vals)), Box::new(inst(a, vals))),
        t => t.clone(),
    }
}

fn spine(t: &O) -> (&O, Vec<&O>) {
    let mut args = Vec::new();
    let mut h = t;
    while let App(f, a) = h {
        args.push(&**a);
        h = f;
    }
    args.reverse();
    (h, args)
}

/// Whether two normal terms, possibly containing unassigned metavariables,
/// could still become equal. Any subterm headed by a metavariable matches.
pub fn compatible(l: &O, r: &O) -> bool {
    let (lh, la) = spine(l);
    let (rh, ra) = spine(r);
    if matches!(lh, Mv(_)) || matches!(rh, Mv(_)) {
        return true;
    }
    match (lh, rh) {
        (Lam(a), Lam(b)) => la.is_empty() && ra.is_empty() && compatible(a, b),
        (Lam(_), _) | (_, Lam(_)) => true,
        _ => lh == rh && la.len() == ra.len() && la.iter().zip(&ra).all(|(x, y)| compatible(x, y)),
    }
}

pub fn nominals(t: &O, out: &mut Vec<u32>) {
    match t {
        Nom(n) => {
            if !out.contains(n) {
                out.push(*n)
            }
        }
        Lam(b) => nominals(b, out),
        App(h, a) => {
            nominals(h, out);
            nominals(a, out);
        }
        _ => {}
    }
}

pub const NOMINAL_TS: [(u32, u64); 2] = [(1, 10), (2, 20)];

#[derive(Clone, Debug)]
pub struct MVar {
    pub arity: usize,
    pub ts: u64,
    pub excluded: Vec<u32>,
}

impl MVar {
    pub fn new(arity: usize, ts: u64) -> Self {
        MVar {
            arity,
            ts,
            excluded: Vec::new(),
        }
    }

    pub fn allowed(&self) -> Vec<u32> {
        NOMINAL_TS
            .iter()
            .filter(|(n, ts)| *ts < self.ts && !self.excluded.contains(n))
            .map(|(n, _)| *n)
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct Problem {
    pub vars: Vec<MVar>,
    pub lhs: O,
    pub rhs: O,
}

/// A ground assignment is a unifier when it respects nominal permissions
/// and makes both sides of every equation βη-equal.
pub fn solves(vars: &[MVar], eqs: &[(O, O)], vals: &[O]) -> bool {
    for (v, t) in vars.iter().zip(vals) {
        let mut ns = Vec::new();
        nominals(t, &mut ns);
        let allowed = v.allowed();
        if ns.iter().any(|n| !allowed.contains(n)) {
            return false;
        }
    }
    let vals: Vec<Option<O>> = vals.iter().cloned().map(Some).collect();
    eqs.iter().all(|(l, r)| norm(&inst(l, &vals)) == norm(&inst(r, &vals)))
}

pub fn is_unifier(p: &Problem, vals: &[O]) -> bool {
    solves(&p.vars, &[(p.lhs.clone(), p.rhs.clone())], vals)
}

/// Candidate values for a metavariable: `λx̄. t` with `t` of height at most
/// one over constants, permitted nominals and the arguments.
pub fn universe(v: &MVar) -> Vec<O> {
    let mut atoms = vec![Con("a"), Con("b")];
    atoms.extend(v.allowed().into_iter().map(Nom));
    atoms.extend((0..v.arity as u32).map(Bv));
    let mut bodies = atoms.clone();
    for x in &atoms {
        for y in &atoms {
            bodies.push(app(Con("f"), vec![x.clone(), y.clone()]));
        }
    }
    for x in atoms.iter().map(|t| shift(t, 1, 0)).chain([Bv(0)]) {
        bodies.push(app(Con("g"), vec![Lam(Box::new(x))]));
    }
    bodies.into_iter().map(|b| lam(v.arity, b)).collect()
}

/// Exhaustive search for a unifier in the product of [`universe`]s, pruning
/// partial assignments that already produce a rigid clash.
pub fn search_eqs(vars: &[MVar], eqs: &[(O, O)], limit: usize) -> Vec<Vec<O>> {
    let unis: Vec<Vec<O>> = vars.iter().map(universe).collect();
    let mut out = Vec::new();
    let mut cur: Vec<Option<O>> = vec![None; vars.len()];
    #[allow(clippy::too_many_arguments)]
    fn go(
        vars: &[MVar],
        eqs: &[(O, O)],
        unis: &[Vec<O>],
        i: usize,
        cur: &mut Vec<Option<O>>,
        out: &mut Vec<Vec<O>>,
        limit: usize,
    ) {
        if out.len() >= limit {
            return;
        }
        if i == unis.len() {
            let vals: Vec<O> = cur.iter().map(|v| v.clone().unwrap()).collect();
            if solves(vars, eqs, &vals) {
                out.push(vals);
            }
            return;
        }
        for c in &unis[i] {
            cur[i] = Some(c.clone());
            if eqs
                .iter()
                .all(|(l, r)| compatible(&norm(&inst(l, cur)), &norm(&inst(r, cur))))
            {
                go(vars, eqs, unis, i + 1, cur, out, limit);
            }
        }
        cur[i] = None;
    }
    go(vars, eqs, &unis, 0, &mut cur, &mut out, limit);
    out
}

pub fn search(p: &Problem, limit: usize) -> Vec<Vec<O>> {
    search_eqs(&p.vars, &[(p.lhs.clone(), p.rhs.clone())], limit)
}

// ---------------------------------------------------------------------------
// Translation to and from the prover's terms

fn i_ty() -> Ty {
    Ty::base("i")
}

fn var_ty(arity: usize) -> Ty {
    Ty::arrows(vec![i_ty(); arity], i_ty())
}

fn cnst(name: &str) -> Term {
    let ty = match name {
        "f" => Ty::arrows([i_ty(), i_ty()], i_ty()),
        "g" => Ty::arrow(var_ty(1), i_ty()),
        _ => i_ty(),
    };
    Term::cnst(name, ty)
}

pub struct Translated {
    pub vars: Vec<Arc<Var>>,
    pub problem: UnifyProblem,
}

fn to_term(t: &O, vars: &[Arc<Var>]) -> Term {
    match t {
        Con(c) => cnst(c),
        Nom(n) => Term::nominal(*n, i_ty()),
        Bv(i) => Term::Bound(*i),
        Mv(i) => Term::var(&vars[*i]),
        Lam(b) => Term::lam("x", i_ty(), to_term(b, vars)),
        App(..) => {
            let (h, args) = spine(t);
            Term::app(to_term(h, vars), args.into_iter().map(|a| to_term(a, vars)).collect())
        }
    }
}

pub fn translate(p: &Problem, fresh: &mut Fresh) -> Translated {
    let vars: Vec<Arc<Var>> = p
        .vars
        .iter()
        .enumerate()
        .map(|(i, v)| fresh.var(&format!("X{i}"), var_ty(v.arity), v.ts, VarKind::Logic))
        .collect();
    let problem = UnifyProblem {
        equations: vec![(to_term(&p.lhs, &vars), to_term(&p.rhs, &vars))],
        nominal_ts: NOMINAL_TS.into_iter().collect(),
    };
    Translated { vars, problem }
}

/// Converts a ground prover term back.
pub fn from_term(t: &Term) -> Option<O> {
    from_open_term(t, &[])
}

/// Converts a prover term whose variables are among `vars`.
pub fn from_open_term(t: &Term, vars: &[Arc<Var>]) -> Option<O> {
    Some(match t {
        Term::Const(c, _) => Con(match &**c {
            "a" => "a",
            "b" => "b",
            "f" => "f",
            "g" => "g",
            _ => return None,
        }),
        Term::Nominal(n, _) => Nom(*n),
        Term::Bound(i) => Bv(*i),
        Term::Var(v) => Mv(vars.iter().position(|w| w == v)?),
        Term::App(h, a) => app(
            from_open_term(h, vars)?,
            a.iter().map(|x| from_open_term(x, vars)).collect::<Option<_>>()?,
        ),
        Term::Lam(l) => Lam(Box::new(from_open_term(&l.body, vars)?)),
    })
}

/// Instantiates the variables left open by a unifier. `rich` uses a value
/// mentioning every nominal the variable may contain, so that a unifier
/// which lets a nominal escape is caught by the permission check.
pub fn ground(theta: &Subst, tr: &Translated, rich: bool) -> Option<Vec<O>> {
    let mut residual: Vec<Arc<Var>> = Vec::new();
    for v in &tr.vars {
        let t = theta.get(v).cloned().unwrap_or_else(|| Term::var(v));
        t.collect_vars(&mut residual);
    }
    let mut g = Subst::new();
    for r in residual {
        if g.contains(&r) {
            continue;
        }
        let (doms, _) = r.ty.split();
        let mut body = cnst("a");
        if rich {
            for (n, ts) in NOMINAL_TS {
                if r.may_contain(n, ts) {
                    body = Term::app(cnst("f"), vec![Term::nominal(n, i_ty()), body]);
                }
            }
        }
        let mut val = body;
        for d in doms.iter().rev() {
            val = Term::lam("y", d.clone(), val);
        }
        g.insert(&r, val);
    }
    tr.vars
        .iter()
        .map(|v| {
            let t = theta.get(v).cloned().unwrap_or_else(|| Term::var(v));
            from_term(&normalize(&t.subst(&g)))
        })
        .collect()
}

/// Whether the prover's substitution equalizes the normalized sides.
pub fn equalizes(theta: &Subst, tr: &Translated) -> bool {
    tr.problem
        .equations
        .iter()
        .all(|(l, r)| eta_short(&normalize(&l.subst(theta))) == eta_short(&normalize(&r.subst(theta))))
}

// ---------------------------------------------------------------------------
// Problem generation

struct Gen<'a> {
    rng: &'a mut ChaCha8Rng,
    vars: &'a [MVar],
}

impl Gen<'_> {
    /// A pattern argument for `var`: a bound variable or a nominal the
    /// variable cannot mention directly, as raising guarantees.
    fn arg(&mut self, var: usize, depth_binders: u32, used: &mut Vec<O>) -> O {
        // occasionally leave the pattern fragment
        if self.rng.random_bool(0.02) {
            let cands: Vec<usize> = (0..self.vars.len()).filter(|&i| self.vars[i].arity == 0).collect();
            if !cands.is_empty() {
                return Mv(cands[self.rng.random_range(0..cands.len())]);
            }
        }
        let allowed = self.vars[var].allowed();
        let mut pool: Vec<O> = [1, 2].into_iter().filter(|n| !allowed.contains(n)).map(Nom).collect();
        pool.extend((0..depth_binders).map(Bv));
        pool.retain(|t| !used.contains(t));
        if pool.is_empty() {
            return Con("a");
        }
        let t = pool[self.rng.random_range(0..pool.len())].clone();
        used.push(t.clone());
        t
    }

    fn flex(&mut self, binders: u32) -> O {
        let i = self.rng.random_range(0..self.vars.len());
        let mut used = Vec::new();
        let args = (0..self.vars[i].arity)
            .map(|_| self.arg(i, binders, &mut used))
            .collect();
        app(Mv(i), args)
    }

    fn term(&mut self, height: u32, binders: u32) -> O {
        let leaf = height == 0 || self.rng.random_bool(0.35);
        if leaf {
            return match self.rng.random_range(0..10) {
                0..=3 => self.flex(binders),
                4 => Con("a"),
                5 => Con("b"),
                6 => Nom(1),
                7 => Nom(2),
                _ if binders > 0 => Bv(self.rng.random_range(0..binders)),
                _ => Con("a"),
            };
        }
        if self.rng.random_bool(0.75) {
            let x = self.term(height - 1, binders);
            let y = self.term(height - 1, binders);
            app(Con("f"), vec![x, y])
        } else {
            let b = self.term(height - 1, binders + 1);
            app(Con("g"), vec![Lam(Box::new(b))])
        }
    }

    /// Rebuilds `t` replacing some subterms by fresh flexible terms.
    fn perturb(&mut self, t: &O, binders: u32) -> O {
        if !matches!(t, Lam(_)) && self.rng.random_bool(0.2) {
            return self.flex(binders);
        }
        match t {
            App(..) => {
                let (h, args) = spine(t);
                if matches!(h, Mv(_)) {
                    return t.clone();
                }
                let h = h.clone();
                let args = args.into_iter().map(|a| self.perturb(a, binders)).collect();
                app(h, args)
            }
            Lam(b) => Lam(Box::new(self.perturb(b, binders + 1))),
            t => t.clone(),
        }
    }
}

/// Deterministic sample of `n` problems: ≤ 3 metavariables, ≤ 2 nominal
/// constants, sides of height ≤ 3.
pub fn problems(seed: u64, n: usize) -> Vec<Problem> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let k = rng.random_range(1..=3);
            let vars: Vec<MVar> = (0..k)
                .map(|_| {
                    let ts = [5, 15, 25, 25][rng.random_range(0..4)];
                    // raised over the nominals it cannot mention directly
                    let room = NOMINAL_TS.iter().filter(|(_, n)| *n >= ts).count();
                    let arity = [0, 0, 0, 1, 1, 2][rng.random_range(0..6)].min(room);
                    MVar::new(arity, ts)
                })
                .collect();
            let mut g = Gen {
                rng: &mut rng,
                vars: &vars,
            };
            let h = g.rng.random_range(0..=3);
            let lhs = g.term(h, 0);
            let rhs = if g.rng.random_bool(0.5) {
                g.perturb(&lhs, 0)
            } else {
                let h = g.rng.random_range(0..=3);
                g.term(h, 0)
            };
            Problem { vars, lhs, rhs }
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Comparison

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// Both agree the problem is unifiable.
    Unifiable,
    /// Both agree there is no unifier.
    NotUnifiable,
    Indeterminate,
    Discrepancy(String),
}

pub fn judge(p: &Problem) -> Verdict {
    let mut fresh = Fresh::new(100);
    let tr = translate(p, &mut fresh);
    match unify(&tr.problem, &mut fresh) {
        UnifyOutcome::Indeterminate(_) => Verdict::Indeterminate,
        UnifyOutcome::Success(theta) => {
            if !equalizes(&theta, &tr) {
                return Verdict::Discrepancy("unifier does not equalize the sides".into());
            }
            for rich in [false, true] {
                match ground(&theta, &tr, rich) {
                    Some(w) if is_unifier(p, &w) => {}
                    Some(_) => return Verdict::Discrepancy(format!("ground instance (rich={rich}) is not a unifier")),
                    None => return Verdict::Discrepancy("unifier is not closed by grounding".into()),
                }
            }
            Verdict::Unifiable
        }
        UnifyOutcome::Failure(m) => match search(p, 1).into_iter().next() {
            Some(w) => Verdict::Discrepancy(format!("reported failure ({m}) but {w:?} unifies")),
            None => Verdict::NotUnifiable,
        },
    }
}

pub fn render(t: &O) -> String {
    fn go(t: &O, names: &mut Vec<String>) -> String {
        match t {
            Con(c) => c.to_string(),
            Nom(n) => format!("n{n}"),
            Bv(i) => names
                .get(names.len().wrapping_sub(1 + *i as usize))
                .cloned()
                .unwrap_or(format!("#{i}")),
            Mv(i) => format!("X{i}"),
            Lam(b) => {
                let x = format!("x{}", names.len());
                names.push(x.clone());
                let s = format!("({x}\\ {})", go(b, names));
                names.pop();
                s
            }
            App(..) => {
                let (h, args) = spine(t);
                let mut s = format!("({}", go(h, names));
                for a in args {
                    s.push(' ');
                    s.push_str(&go(a, names));
                }
                s.push(')');
                s
            }
        }
    }
    go(t, &mut Vec::new())
}

/// Whether every ground unifier of `p` found in the universe factors
/// through `theta`: for each one there is an instantiation of the variables
/// `theta` leaves open that reproduces it. Returns the number checked.
pub fn factors_through(p: &Problem, tr: &Translated, theta: &Subst, limit: usize) -> Result<usize, String> {
    let mut residual: Vec<Arc<Var>> = Vec::new();
    let images: Vec<Term> = tr
        .vars
        .iter()
        .map(|v| theta.get(v).cloned().unwrap_or_else(|| Term::var(v)))
        .collect();
    for t in &images {
        t.collect_vars(&mut residual);
    }
    let rvars: Vec<MVar> = residual
        .iter()
        .map(|v| MVar {
            arity: v.ty.split().0.len(),
            ts: v.ts,
            excluded: v.excluded.clone(),
        })
        .collect();
    let images: Vec<O> = images
        .iter()
        .map(|t| from_open_term(&normalize(t), &residual).ok_or_else(|| format!("cannot read back {t}")))
        .collect::<Result<_, _>>()?;
    let sigmas = search(p, limit);
    for sigma in &sigmas {
        let eqs: Vec<(O, O)> = images.iter().cloned().zip(sigma.iter().cloned()).collect();
        if search_eqs(&rvars, &eqs, 1).is_empty() {
            let shown: Vec<String> = sigma.iter().map(render).collect();
            return Err(format!("unifier [{}] is not an instance", shown.join(", ")));
        }
    }
    Ok(sigmas.len())
}

#[allow(dead_code)]
pub fn nominal_map() -> BTreeMap<u32, u64> {
    NOMINAL_TS.into_iter().collect()
}

/// Unifies `p` and checks the result against every ground unifier found
/// within `limit`; panics on failure.
pub fn mgu_check(p: &Problem) -> usize {
    let mut fresh = Fresh::new(100);
    let tr = translate(p, &mut fresh);
    let UnifyOutcome::Success(theta) = unify(&tr.problem, &mut fresh) else {
        panic!("{} = {} should succeed", render(&p.lhs), render(&p.rhs));
    };
    factors_through(p, &tr, &theta, 400).unwrap_or_else(|e| panic!("{} = {}: {e}", render(&p.lhs), render(&p.rhs)))
}

/// B = R M, B n1 = R M n1 and B n1 = R (M n1), with no variable able to
/// mention n1 directly.
pub fn extension_shapes() -> Vec<Problem> {
    use O::*;
    vec![
        Problem {
            vars: vec![MVar::new(0, 5), MVar::new(1, 5), MVar::new(0, 5)],
            lhs: Mv(0),
            rhs: app(Mv(1), vec![Mv(2)]),
        },
        Problem {
            vars: vec![MVar::new(1, 5), MVar::new(2, 5), MVar::new(0, 5)],
            lhs: app(Mv(0), vec![Nom(1)]),
            rhs: app(Mv(1), vec![Mv(2), Nom(1)]),
        },
        Problem {
            vars: vec![MVar::new(1, 5), MVar::new(1, 5), MVar::new(1, 5)],
            lhs: app(Mv(0), vec![Nom(1)]),
            rhs: app(Mv(1), vec![app(Mv(2), vec![Nom(1)])]),
        },
    ]
}
