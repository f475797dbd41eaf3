//! Simply typed λ-tree syntax.
//!
//! Bound variables are de Bruijn indices; abstractions keep a name hint that
//! is only consulted by the printer. Nominal constants are identified by
//! their index and printed `n1`, `n2`, ...; metavariables (eigenvariables and
//! logic variables) are shared `Arc<Var>` values compared by identity.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

pub type Symbol = Arc<str>;

pub fn sym(s: &str) -> Symbol {
    Arc::from(s)
}

/// Timestamp given to variables that may contain any nominal constant.
pub const TS_TOP: u64 = u64::MAX / 2;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Ty {
    Base(Symbol),
    Arrow(Arc<Ty>, Arc<Ty>),
    /// Placeholder used only during type inference.
    Var(u32),
}

impl Ty {
    pub fn base(name: &str) -> Ty {
        Ty::Base(sym(name))
    }

    pub fn arrow(dom: Ty, cod: Ty) -> Ty {
        Ty::Arrow(Arc::new(dom), Arc::new(cod))
    }

    /// `arrows([a, b], c)` is `a -> b -> c`.
    pub fn arrows<I>(args: I, result: Ty) -> Ty
    where
        I: IntoIterator<Item = Ty>,
        I::IntoIter: DoubleEndedIterator,
    {
        args.into_iter().rev().fold(result, |acc, a| Ty::arrow(a, acc))
    }

    /// Splits `a1 -> ... -> an -> r` into `([a1, ..., an], r)` with `r` not an arrow.
    pub fn split(&self) -> (Vec<Ty>, Ty) {
        let mut args = Vec::new();
        let mut cur = self;
        while let Ty::Arrow(d, c) = cur {
            args.push((**d).clone());
            cur = c;
        }
        (args, cur.clone())
    }

    pub fn arity(&self) -> usize {
        self.split().0.len()
    }

    /// Result type after applying `n` arguments.
    pub fn drop_args(&self, n: usize) -> Option<Ty> {
        let mut cur = self;
        for _ in 0..n {
            match cur {
                Ty::Arrow(_, c) => cur = c,
                _ => return None,
            }
        }
        Some(cur.clone())
    }

    pub fn is_base(&self, name: &str) -> bool {
        matches!(self, Ty::Base(b) if &**b == name)
    }
}

impl fmt::Display for Ty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ty::Base(b) => write!(f, "{b}"),
            Ty::Var(v) => write!(f, "?t{v}"),
            Ty::Arrow(d, c) => {
                if matches!(**d, Ty::Arrow(..)) {
                    write!(f, "({d}) -> {c}")
                } else {
                    write!(f, "{d} -> {c}")
                }
            }
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum VarKind {
    /// Universally quantified proof variable; rigid except during case analysis.
    Eigen,
    /// Instantiatable variable created by apply, search and unfold.
    Logic,
}

/// A metavariable.
///
/// `ts` and `excluded` together decide which nominal constants the variable's
/// instantiation may mention directly: nominal `n` is allowed iff its
/// timestamp is strictly smaller than `ts` and `n` is not excluded.
/// Dependencies on any other nominal must go through explicit arguments.
#[derive(Clone, Debug)]
pub struct Var {
    pub id: u64,
    pub name: Symbol,
    pub ty: Ty,
    pub ts: u64,
    pub kind: VarKind,
    pub excluded: Vec<u32>,
}

impl Var {
    pub fn may_contain(&self, nominal: u32, nominal_ts: u64) -> bool {
        nominal_ts < self.ts && !self.excluded.contains(&nominal)
    }
}

impl PartialEq for Var {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id
    }
}
impl Eq for Var {}
impl Hash for Var {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.id.hash(state)
    }
}

/// Session-owned counter for fresh identifiers and timestamps.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Fresh {
    next: u64,
}

impl Fresh {
    pub fn new(start: u64) -> Self {
        Fresh { next: start }
    }

    pub fn tick(&mut self) -> u64 {
        self.next += 1;
        self.next
    }

    pub fn peek(&self) -> u64 {
        self.next
    }

    pub fn var(&mut self, name: &str, ty: Ty, ts: u64, kind: VarKind) -> Arc<Var> {
        Arc::new(Var {
            id: self.tick(),
            name: sym(name),
            ty,
            ts,
            kind,
            excluded: Vec::new(),
        })
    }

    pub fn var_excluding(&mut self, name: &str, ty: Ty, ts: u64, kind: VarKind, excluded: Vec<u32>) -> Arc<Var> {
        let mut excluded = excluded;
        excluded.sort_unstable();
        excluded.dedup();
        Arc::new(Var {
            id: self.tick(),
            name: sym(name),
            ty,
            ts,
            kind,
            excluded,
        })
    }
}

#[derive(Clone, Debug)]
pub struct Lam {
    pub hint: Symbol,
    pub ty: Ty,
    pub body: Term,
}

#[derive(Clone, Debug)]
pub enum Term {
    Const(Symbol, Ty),
    Nominal(u32, Ty),
    Bound(u32),
    Var(Arc<Var>),
    /// Head is never itself an application and the argument list is non-empty.
    App(Arc<Term>, Arc<[Term]>),
    Lam(Arc<Lam>),
}

impl PartialEq for Term {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Term::Const(a, _), Term::Const(b, _)) => a == b,
            (Term::Nominal(a, _), Term::Nominal(b, _)) => a == b,
            (Term::Bound(a), Term::Bound(b)) => a == b,
            (Term::Var(a), Term::Var(b)) => a == b,
            (Term::App(h1, a1), Term::App(h2, a2)) => h1 == h2 && a1 == a2,
            (Term::Lam(l1), Term::Lam(l2)) => l1.ty == l2.ty && l1.body == l2.body,
            _ => false,
        }
    }
}
impl Eq for Term {}

impl Hash for Term {
    fn hash<H: Hasher>(&self, state: &mut H) {
        std::mem::discriminant(self).hash(state);
        match self {
            Term::Const(c, _) => c.hash(state),
            Term::Nominal(n, _) => n.hash(state),
            Term::Bound(i) => i.hash(state),
            Term::Var(v) => v.hash(state),
            Term::App(h, a) => {
                h.hash(state);
                a.hash(state);
            }
            Term::Lam(l) => l.body.hash(state),
        }
    }
}

impl Term {
    pub fn cnst(name: &str, ty: Ty) -> Term {
        Term::Const(sym(name), ty)
    }

    pub fn nominal(idx: u32, ty: Ty) -> Term {
        Term::Nominal(idx, ty)
    }

    pub fn var(v: &Arc<Var>) -> Term {
        Term::Var(v.clone())
    }

    /// Builds an application, flattening nested heads. Does not β-reduce.
    pub fn app(head: Term, args: Vec<Term>) -> Term {
        if args.is_empty() {
            return head;
        }
        match head {
            Term::App(h, a) => {
                let mut all: Vec<Term> = a.to_vec();
                all.extend(args);
                Term::App(h, all.into())
            }
            h => Term::App(Arc::new(h), args.into()),
        }
    }

    pub fn lam(hint: &str, ty: Ty, body: Term) -> Term {
        Term::Lam(Arc::new(Lam {
            hint: sym(hint),
            ty,
            body,
        }))
    }

    /// Head and arguments of a (normal) term.
    pub fn spine(&self) -> (&Term, &[Term]) {
        match self {
            Term::App(h, a) => (h, a),
            t => (t, &[]),
        }
    }

    pub fn head_var(&self) -> Option<&Arc<Var>> {
        match self.spine().0 {
            Term::Var(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_lam(&self) -> bool {
        matches!(self, Term::Lam(_))
    }

    /// Type of the term given the types of enclosing binders (innermost last).
    pub fn ty_in(&self, binders: &mut Vec<Ty>) -> Option<Ty> {
        match self {
            Term::Const(_, t) | Term::Nominal(_, t) => Some(t.clone()),
            Term::Var(v) => Some(v.ty.clone()),
            Term::Bound(i) => {
                let n = binders.len();
                binders.get(n.checked_sub(*i as usize + 1)?).cloned()
            }
            Term::App(h, a) => h.ty_in(binders)?.drop_args(a.len()),
            Term::Lam(l) => {
                binders.push(l.ty.clone());
                let body = l.body.ty_in(binders);
                binders.pop();
                Some(Ty::arrow(l.ty.clone(), body?))
            }
        }
    }

    /// Type of a term with no loose bound variables.
    pub fn ty(&self) -> Option<Ty> {
        self.ty_in(&mut Vec::new())
    }

    /// Whether the term has loose bound variables with index >= `depth`.
    pub fn has_loose_bound(&self, depth: u32) -> bool {
        match self {
            Term::Bound(i) => *i >= depth,
            Term::App(h, a) => h.has_loose_bound(depth) || a.iter().any(|x| x.has_loose_bound(depth)),
            Term::Lam(l) => l.body.has_loose_bound(depth + 1),
            _ => false,
        }
    }

    pub fn mentions_bound(&self, idx: u32) -> bool {
        match self {
            Term::Bound(i) => *i == idx,
            Term::App(h, a) => h.mentions_bound(idx) || a.iter().any(|x| x.mentions_bound(idx)),
            Term::Lam(l) => l.body.mentions_bound(idx + 1),
            _ => false,
        }
    }

    pub fn contains_var(&self, v: &Var) -> bool {
        match self {
            Term::Var(w) => **w == *v,
            Term::App(h, a) => h.contains_var(v) || a.iter().any(|x| x.contains_var(v)),
            Term::Lam(l) => l.body.contains_var(v),
            _ => false,
        }
    }

    pub fn collect_vars(&self, out: &mut Vec<Arc<Var>>) {
        match self {
            Term::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone())
                }
            }
            Term::App(h, a) => {
                h.collect_vars(out);
                a.iter().for_each(|x| x.collect_vars(out));
            }
            Term::Lam(l) => l.body.collect_vars(out),
            _ => {}
        }
    }

    pub fn vars(&self) -> Vec<Arc<Var>> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    pub fn collect_nominals(&self, out: &mut BTreeMap<u32, Ty>) {
        match self {
            Term::Nominal(n, t) => {
                out.entry(*n).or_insert_with(|| t.clone());
            }
            Term::App(h, a) => {
                h.collect_nominals(out);
                a.iter().for_each(|x| x.collect_nominals(out));
            }
            Term::Lam(l) => l.body.collect_nominals(out),
            _ => {}
        }
    }

    /// Nominal constants occurring in the β-normal form.
    pub fn support(&self) -> BTreeSet<u32> {
        let mut out = BTreeMap::new();
        normalize(self).collect_nominals(&mut out);
        out.into_keys().collect()
    }

    /// Capture-avoiding replacement of the substitution's variables followed by β-normalization.
    pub fn subst(&self, s: &Subst) -> Term {
        norm_with(self, s)
    }

    pub fn permute(&self, p: &Permutation) -> Term {
        if p.is_identity() {
            return self.clone();
        }
        self.map_leaves(&mut |t| match t {
            Term::Nominal(n, ty) => Some(Term::Nominal(p.apply(*n), ty.clone())),
            _ => None,
        })
    }

    /// Rebuilds the term replacing leaves for which `f` returns `Some`.
    /// The replacement is inserted verbatim (no shifting, no normalization).
    pub fn map_leaves(&self, f: &mut dyn FnMut(&Term) -> Option<Term>) -> Term {
        match self {
            Term::App(h, a) => {
                let h2 = h.map_leaves(f);
                let a2: Vec<Term> = a.iter().map(|x| x.map_leaves(f)).collect();
                Term::app(h2, a2)
            }
            Term::Lam(l) => Term::Lam(Arc::new(Lam {
                hint: l.hint.clone(),
                ty: l.ty.clone(),
                body: l.body.map_leaves(f),
            })),
            t => f(t).unwrap_or_else(|| t.clone()),
        }
    }

    /// Replaces a nominal constant by a term (no capture possible: `by` is closed).
    pub fn replace_nominal(&self, idx: u32, by: &Term) -> Term {
        normalize(&self.map_leaves(&mut |t| match t {
            Term::Nominal(n, _) if *n == idx => Some(by.clone()),
            _ => None,
        }))
    }

    /// Size in nodes.
    pub fn size(&self) -> usize {
        match self {
            Term::App(h, a) => h.size() + a.iter().map(Term::size).sum::<usize>(),
            Term::Lam(l) => 1 + l.body.size(),
            _ => 1,
        }
    }
}

/// Shifts loose bound variables `>= cutoff` up by `by`.
pub fn shift(t: &Term, by: u32, cutoff: u32) -> Term {
    if by == 0 {
        return t.clone();
    }
    match t {
        Term::Bound(i) if *i >= cutoff => Term::Bound(i + by),
        Term::App(h, a) => Term::App(
            Arc::new(shift(h, by, cutoff)),
            a.iter().map(|x| shift(x, by, cutoff)).collect(),
        ),
        Term::Lam(l) => Term::Lam(Arc::new(Lam {
            hint: l.hint.clone(),
            ty: l.ty.clone(),
            body: shift(&l.body, by, cutoff + 1),
        })),
        t => t.clone(),
    }
}

/// Replaces `Bound(depth)` by `arg` and lowers the indices above it.
pub fn instantiate(t: &Term, depth: u32, arg: &Term) -> Term {
    match t {
        Term::Bound(i) if *i == depth => shift(arg, depth, 0),
        Term::Bound(i) if *i > depth => Term::Bound(i - 1),
        Term::App(h, a) => Term::app(
            instantiate(h, depth, arg),
            a.iter().map(|x| instantiate(x, depth, arg)).collect(),
        ),
        Term::Lam(l) => Term::Lam(Arc::new(Lam {
            hint: l.hint.clone(),
            ty: l.ty.clone(),
            body: instantiate(&l.body, depth + 1, arg),
        })),
        t => t.clone(),
    }
}

/// β-normal form.
pub fn normalize(t: &Term) -> Term {
    norm_with(t, &Subst::default())
}

fn norm_with(t: &Term, s: &Subst) -> Term {
    match t {
        Term::Var(v) => match s.get(v) {
            Some(r) => r.clone(),
            None => t.clone(),
        },
        Term::App(h, a) => {
            let h = norm_with(h, s);
            let a: Vec<Term> = a.iter().map(|x| norm_with(x, s)).collect();
            apply_normal(h, a)
        }
        Term::Lam(l) => Term::Lam(Arc::new(Lam {
            hint: l.hint.clone(),
            ty: l.ty.clone(),
            body: norm_with(&l.body, s),
        })),
        t => t.clone(),
    }
}

/// Applies a normal head to normal arguments, reducing redexes hereditarily.
pub fn apply_normal(head: Term, args: Vec<Term>) -> Term {
    let mut head = head;
    let mut rest = args.into_iter();
    loop {
        match head {
            Term::Lam(l) => match rest.next() {
                Some(arg) => head = normalize(&instantiate(&l.body, 0, &arg)),
                None => return Term::Lam(l),
            },
            h => return Term::app(h, rest.collect()),
        }
    }
}

/// Contracts `λx. t x` to `t` when `x` is not free in `t`, recursively at the top.
pub fn eta_reduce(t: &Term) -> Term {
    match t {
        Term::Lam(l) => {
            let body = eta_reduce(&l.body);
            if let Term::App(h, a) = &body {
                if let Some((last, init)) = a.split_last() {
                    if *last == Term::Bound(0) && !h.mentions_bound(0) && !init.iter().any(|x| x.mentions_bound(0)) {
                        let f = Term::app((**h).clone(), init.to_vec());
                        return lower(&f);
                    }
                }
            }
            Term::lam(&l.hint, l.ty.clone(), body)
        }
        t => t.clone(),
    }
}

/// Eta-reduces every subterm.
pub fn eta_short(t: &Term) -> Term {
    match t {
        Term::App(h, a) => Term::app(eta_short(h), a.iter().map(eta_short).collect()),
        Term::Lam(l) => eta_reduce(&Term::lam(&l.hint, l.ty.clone(), eta_short(&l.body))),
        t => t.clone(),
    }
}

/// Replaces the loose indices `0..terms.len()` by `terms` (listed outermost
/// first) and normalizes.
pub fn open_binders(t: &Term, terms: &[Term]) -> Term {
    normalize(&open_binders_at(t, terms, 0))
}

/// As [`open_binders`] for a term sitting under `depth` further binders; does not normalize.
pub fn open_binders_at(t: &Term, terms: &[Term], depth: u32) -> Term {
    let n = terms.len() as u32;
    match t {
        Term::Bound(i) if *i >= depth && *i < depth + n => {
            let idx = (n - 1 - (i - depth)) as usize;
            shift(&terms[idx], depth, 0)
        }
        Term::Bound(i) if *i >= depth + n => Term::Bound(i - n),
        Term::App(h, a) => Term::app(
            open_binders_at(h, terms, depth),
            a.iter().map(|x| open_binders_at(x, terms, depth)).collect(),
        ),
        Term::Lam(l) => Term::lam(&l.hint, l.ty.clone(), open_binders_at(&l.body, terms, depth + 1)),
        t => t.clone(),
    }
}

/// Replaces `v` by the bound variable `Bound(depth)` (counted from outside `t`).
pub fn abstract_var(t: &Term, v: &Var, depth: u32) -> Term {
    match t {
        Term::Var(w) if w.id == v.id => Term::Bound(depth),
        Term::App(h, a) => Term::app(
            abstract_var(h, v, depth),
            a.iter().map(|x| abstract_var(x, v, depth)).collect(),
        ),
        Term::Lam(l) => Term::lam(&l.hint, l.ty.clone(), abstract_var(&l.body, v, depth + 1)),
        t => t.clone(),
    }
}

/// Lowers loose indices by one; caller guarantees `Bound(0)` does not occur.
fn lower(t: &Term) -> Term {
    instantiate(t, 0, &Term::Bound(0))
}

/// Finite map from metavariables to closed normal terms.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Subst {
    map: BTreeMap<u64, (Arc<Var>, Term)>,
}

impl Subst {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn single(v: &Arc<Var>, t: Term) -> Self {
        let mut s = Subst::new();
        s.map.insert(v.id, (v.clone(), t));
        s
    }

    pub fn get(&self, v: &Var) -> Option<&Term> {
        self.map.get(&v.id).map(|(_, t)| t)
    }

    pub fn contains(&self, v: &Var) -> bool {
        self.map.contains_key(&v.id)
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Arc<Var>, &Term)> {
        self.map.values().map(|(v, t)| (v, t))
    }

    /// Adds `v ↦ t`, applying the new binding to the existing range so the
    /// substitution stays idempotent. `t` must already be normal under `self`.
    pub fn bind(&mut self, v: &Arc<Var>, t: Term) {
        let single = Subst::single(v, t.clone());
        for (_, r) in self.map.values_mut() {
            if r.contains_var(v) {
                *r = r.subst(&single);
            }
        }
        self.map.insert(v.id, (v.clone(), t));
    }

    /// Inserts without propagating; used when building substitutions by hand.
    pub fn insert(&mut self, v: &Arc<Var>, t: Term) {
        self.map.insert(v.id, (v.clone(), t));
    }

    /// `self` followed by `other`.
    pub fn compose(&self, other: &Subst) -> Subst {
        let mut out = Subst::new();
        for (v, t) in self.iter() {
            out.map.insert(v.id, (v.clone(), t.subst(other)));
        }
        for (v, t) in other.iter() {
            out.map.entry(v.id).or_insert_with(|| (v.clone(), t.clone()));
        }
        out
    }

    pub fn restrict(&self, keep: &[Arc<Var>]) -> Subst {
        let mut out = Subst::new();
        for v in keep {
            if let Some(t) = self.get(v) {
                out.insert(v, t.clone());
            }
        }
        out
    }
}

/// Finite, type-preserving bijection on nominal constants.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Permutation {
    map: BTreeMap<u32, u32>,
}

impl Permutation {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn swap(a: u32, b: u32) -> Self {
        let mut map = BTreeMap::new();
        if a != b {
            map.insert(a, b);
            map.insert(b, a);
        }
        Permutation { map }
    }

    /// Extends an injective partial map to a bijection on its domain ∪ range.
    /// Returns `None` if `pairs` is not injective.
    pub fn from_injection(pairs: &[(u32, u32)]) -> Option<Self> {
        let mut fwd = BTreeMap::new();
        let mut used = BTreeSet::new();
        for &(a, b) in pairs {
            if let Some(&prev) = fwd.get(&a) {
                if prev != b {
                    return None;
                }
                continue;
            }
            if !used.insert(b) {
                return None;
            }
            fwd.insert(a, b);
        }
        // Close the cycles: every range element that is not in the domain is
        // sent back along the chain to a domain element that is not in the range.
        let dom: BTreeSet<u32> = fwd.keys().copied().collect();
        let mut free_targets: Vec<u32> = dom.difference(&used).copied().collect();
        let mut extra: Vec<u32> = used.difference(&dom).copied().collect();
        extra.sort_unstable();
        free_targets.sort_unstable();
        for (x, y) in extra.into_iter().zip(free_targets) {
            fwd.insert(x, y);
        }
        fwd.retain(|a, b| a != b);
        Some(Permutation { map: fwd })
    }

    pub fn apply(&self, n: u32) -> u32 {
        self.map.get(&n).copied().unwrap_or(n)
    }

    pub fn is_identity(&self) -> bool {
        self.map.is_empty()
    }

    pub fn inverse(&self) -> Permutation {
        Permutation {
            map: self.map.iter().map(|(a, b)| (*b, *a)).collect(),
        }
    }

    pub fn pairs(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.map.iter().map(|(a, b)| (*a, *b))
    }

    pub fn moves(&self, n: u32) -> bool {
        self.map.contains_key(&n)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.map.is_empty() {
            return write!(f, "id");
        }
        let parts: Vec<String> = self.map.iter().map(|(a, b)| format!("n{a}->n{b}")).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

/// Replaces `v` by `v' n1 ... nk` where `v'` is fresh with the nominals'
/// types prefixed onto `v`'s type. `v'` may not mention the given nominals
/// directly; any dependency on them goes through the explicit arguments.
pub fn raise(v: &Arc<Var>, noms: &[(u32, Ty)], fresh: &mut Fresh) -> (Arc<Var>, Term) {
    let ty = Ty::arrows(noms.iter().map(|(_, t)| t.clone()), v.ty.clone());
    let mut excluded = v.excluded.clone();
    excluded.extend(noms.iter().map(|(n, _)| *n));
    let nv = fresh.var_excluding(&v.name, ty, v.ts, v.kind, excluded);
    let args = noms.iter().map(|(n, t)| Term::Nominal(*n, t.clone())).collect();
    let t = Term::app(Term::Var(nv.clone()), args);
    (nv, t)
}

// ---------------------------------------------------------------------------
// Printing

/// Infix constants of the object-formula language with (precedence, right-assoc).
pub fn infix_info(name: &str) -> Option<u8> {
    match name {
        "=>" => Some(1),
        "&" => Some(2),
        "::" => Some(3),
        _ => None,
    }
}

pub const PREC_APP: u8 = 4;
pub const PREC_ATOM: u8 = 5;

/// Pretty printer with capture-avoiding names for bound variables.
pub struct Printer {
    names: Vec<String>,
    taken: HashSet<String>,
}

impl Printer {
    pub fn for_term(t: &Term) -> Self {
        let mut taken = HashSet::new();
        collect_free_names(t, &mut taken);
        Printer {
            names: Vec::new(),
            taken,
        }
    }

    pub fn with_names(names: Vec<String>, taken: HashSet<String>) -> Self {
        Printer { names, taken }
    }

    pub fn fresh_name(&self, hint: &str) -> String {
        let base: &str = if hint.is_empty() || hint == "_" { "x" } else { hint };
        let clash = |n: &str| self.taken.contains(n) || self.names.iter().any(|m| m == n) || is_nominal_name(n);
        if !clash(base) {
            return base.to_string();
        }
        let stem = base.trim_end_matches(|c: char| c.is_ascii_digit());
        let stem = if stem.is_empty() { "x" } else { stem };
        (1..).map(|i| format!("{stem}{i}")).find(|n| !clash(n)).unwrap()
    }

    pub fn push(&mut self, name: String) {
        self.names.push(name);
    }

    pub fn pop(&mut self) {
        self.names.pop();
    }

    pub fn print(&mut self, t: &Term) -> String {
        let mut out = String::new();
        self.go(t, 0, &mut out);
        out
    }

    pub fn print_prec(&mut self, t: &Term, prec: u8) -> String {
        let mut out = String::new();
        self.go(t, prec, &mut out);
        out
    }

    fn go(&mut self, t: &Term, prec: u8, out: &mut String) {
        match t {
            Term::Const(c, _) => {
                if infix_info(c).is_some() {
                    out.push('(');
                    out.push_str(c);
                    out.push(')');
                } else {
                    out.push_str(c)
                }
            }
            Term::Nominal(n, _) => out.push_str(&format!("n{n}")),
            Term::Var(v) => out.push_str(&v.name),
            Term::Bound(i) => {
                let n = self.names.len();
                match n.checked_sub(*i as usize + 1) {
                    Some(k) => out.push_str(&self.names[k]),
                    None => out.push_str(&format!("#{i}")),
                }
            }
            Term::Lam(l) => {
                let name = self.fresh_name(&l.hint);
                let paren = prec > 0;
                if paren {
                    out.push('(');
                }
                out.push_str(&name);
                // a vacuous binder's type cannot be inferred when read back
                if !l.body.mentions_bound(0) {
                    out.push_str(&format!(" : {}", l.ty));
                }
                out.push_str("\\ ");
                self.names.push(name);
                self.go(&l.body, 0, out);
                self.names.pop();
                if paren {
                    out.push(')');
                }
            }
            Term::App(h, args) => {
                if let (Term::Const(c, _), 2) = (&**h, args.len()) {
                    if let Some(p) = infix_info(c) {
                        let paren = prec > p;
                        if paren {
                            out.push('(');
                        }
                        self.go(&args[0], p + 1, out);
                        out.push(' ');
                        out.push_str(c);
                        out.push(' ');
                        self.go(&args[1], p, out);
                        if paren {
                            out.push(')');
                        }
                        return;
                    }
                }
                let paren = prec > PREC_APP;
                if paren {
                    out.push('(');
                }
                self.go(h, PREC_ATOM, out);
                for a in args.iter() {
                    out.push(' ');
                    self.go(a, PREC_ATOM, out);
                }
                if paren {
                    out.push(')');
                }
            }
        }
    }
}

pub fn is_nominal_name(s: &str) -> bool {
    s.len() > 1 && s.starts_with('n') && s[1..].chars().all(|c| c.is_ascii_digit()) && !s[1..].starts_with('0')
}

pub fn collect_free_names(t: &Term, out: &mut HashSet<String>) {
    match t {
        Term::Const(c, _) => {
            out.insert(c.to_string());
        }
        Term::Var(v) => {
            out.insert(v.name.to_string());
        }
        Term::App(h, a) => {
            collect_free_names(h, out);
            a.iter().for_each(|x| collect_free_names(x, out));
        }
        Term::Lam(l) => collect_free_names(&l.body, out),
        _ => {}
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut p = Printer::for_term(self);
        write!(f, "{}", p.print(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tm() -> Ty {
        Ty::base("tm")
    }
    fn ty() -> Ty {
        Ty::base("ty")
    }
    fn c() -> Term {
        Term::cnst("c", tm())
    }
    fn app_c() -> Term {
        Term::cnst("app", Ty::arrows([tm(), tm()], tm()))
    }

    #[test]
    fn beta_identity() {
        let id = Term::lam("x", tm(), Term::Bound(0));
        assert_eq!(normalize(&Term::app(id, vec![c()])), c());
    }

    #[test]
    fn beta_clause_body() {
        // R ↦ λx. app x x, M ↦ c, then R M ⇒ app c c
        let mut f = Fresh::default();
        let r = f.var("R", Ty::arrow(tm(), tm()), 1, VarKind::Logic);
        let m = f.var("M", tm(), 1, VarKind::Logic);
        let body = Term::app(Term::var(&r), vec![Term::var(&m)]);
        let mut s = Subst::new();
        s.insert(
            &r,
            Term::lam("x", tm(), Term::app(app_c(), vec![Term::Bound(0), Term::Bound(0)])),
        );
        s.insert(&m, c());
        assert_eq!(body.subst(&s), Term::app(app_c(), vec![c(), c()]));
    }

    #[test]
    fn encoded_term_is_normal() {
        let arr = Term::cnst("arr", Ty::arrows([ty(), ty()], ty()));
        let i = Term::cnst("i", ty());
        let abs = Term::cnst("abs", Ty::arrows([ty(), Ty::arrow(tm(), tm())], tm()));
        let t = Term::app(
            abs.clone(),
            vec![
                Term::app(arr, vec![i.clone(), i.clone()]),
                Term::lam(
                    "f",
                    tm(),
                    Term::app(
                        abs,
                        vec![
                            i,
                            Term::lam("x", tm(), Term::app(app_c(), vec![Term::Bound(1), Term::Bound(0)])),
                        ],
                    ),
                ),
            ],
        );
        assert_eq!(normalize(&t), t);
        assert_eq!(t.to_string(), "abs (arr i i) (f\\ abs i (x\\ app f x))");
    }

    #[test]
    fn substitute_examples() {
        let mut f = Fresh::default();
        let x = f.var("X", tm(), 1, VarKind::Logic);
        let t = Term::app(app_c(), vec![Term::var(&x), Term::var(&x)]);
        assert_eq!(t.subst(&Subst::single(&x, c())), Term::app(app_c(), vec![c(), c()]));
        assert_eq!(t.subst(&Subst::new()), t);

        // {B ↦ λy. R (M y)} on B x gives R (M x)
        let b = f.var("B", Ty::arrow(tm(), tm()), 1, VarKind::Logic);
        let r = f.var("R", Ty::arrow(tm(), tm()), 1, VarKind::Logic);
        let m = f.var("M", Ty::arrow(tm(), tm()), 1, VarKind::Logic);
        let xc = Term::cnst("x", tm());
        let sol = Term::lam(
            "y",
            tm(),
            Term::app(Term::var(&r), vec![Term::app(Term::var(&m), vec![Term::Bound(0)])]),
        );
        let got = Term::app(Term::var(&b), vec![xc.clone()]).subst(&Subst::single(&b, sol));
        assert_eq!(got, Term::app(Term::var(&r), vec![Term::app(Term::var(&m), vec![xc])]));
    }

    #[test]
    fn permute_and_support() {
        let n1 = Term::nominal(1, tm());
        let n2 = Term::nominal(2, tm());
        let t = Term::app(app_c(), vec![n1.clone(), n2.clone()]);
        let sw = Permutation::swap(1, 2);
        assert_eq!(t.permute(&sw), Term::app(app_c(), vec![n2.clone(), n1.clone()]));
        assert_eq!(t.permute(&Permutation::identity()), t);
        let cc = Term::app(app_c(), vec![c(), c()]);
        assert_eq!(cc.permute(&sw), cc);

        let t2 = Term::app(app_c(), vec![n1.clone(), Term::lam("x", tm(), n2)]);
        assert_eq!(t2.support(), BTreeSet::from([1, 2]));
        assert!(cc.support().is_empty());
        let redex = Term::app(Term::lam("x", tm(), Term::Bound(0)), vec![n1]);
        assert_eq!(redex.support(), BTreeSet::from([1]));
    }

    #[test]
    fn raise_shapes() {
        let mut f = Fresh::default();
        let x = f.var("X", tm(), 5, VarKind::Eigen);
        let (x1, t) = raise(&x, &[(1, tm())], &mut f);
        assert_eq!(x1.ty, Ty::arrow(tm(), tm()));
        assert_eq!(t, Term::app(Term::var(&x1), vec![Term::nominal(1, tm())]));
        assert!(!x1.may_contain(1, 0));

        let (x0, t0) = raise(&x, &[], &mut f);
        assert_eq!(t0, Term::var(&x0));
        assert_eq!(x0.ty, tm());

        let (x2, _) = raise(&x, &[(1, tm()), (2, ty())], &mut f);
        assert_eq!(x2.ty, Ty::arrows([tm(), ty()], tm()));
    }

    #[test]
    fn raising_soundness() {
        let mut f = Fresh::default();
        let x = f.var("X", tm(), 5, VarKind::Eigen);
        let (x1, raised) = raise(&x, &[(1, tm())], &mut f);
        let target = Term::app(app_c(), vec![Term::nominal(1, tm()), c()]);
        let abstracted = Term::lam("y", tm(), Term::app(app_c(), vec![Term::Bound(0), c()]));
        assert_eq!(raised.subst(&Subst::single(&x1, abstracted)), target);
    }

    #[test]
    fn permutation_from_injection() {
        let p = Permutation::from_injection(&[(1, 2)]).unwrap();
        assert_eq!(p.apply(1), 2);
        assert_eq!(p.apply(2), 1);
        assert!(Permutation::from_injection(&[(1, 3), (2, 3)]).is_none());
        let q = Permutation::from_injection(&[(1, 2), (2, 3)]).unwrap();
        assert_eq!((q.apply(1), q.apply(2), q.apply(3)), (2, 3, 1));
    }

    #[test]
    fn eta() {
        let f = Term::cnst("f", Ty::arrow(tm(), tm()));
        let t = Term::lam("x", tm(), Term::app(f.clone(), vec![Term::Bound(0)]));
        assert_eq!(eta_reduce(&t), f);
        let g = Term::lam("x", tm(), Term::app(app_c(), vec![Term::Bound(0), Term::Bound(0)]));
        assert_eq!(eta_reduce(&g), g);
    }
}
