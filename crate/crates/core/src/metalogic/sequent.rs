//! Sequents: named hypotheses, a goal, and the timestamps of the nominal
//! constants in scope.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::sync::Arc;

use super::formula::Formula;
use crate::term::{Fresh, Subst, Term, Ty, Var, VarKind};

#[derive(Clone, Debug, PartialEq)]
pub struct Hyp {
    pub name: String,
    pub formula: Formula,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Sequent {
    pub hyps: Vec<Hyp>,
    pub goal: Formula,
    pub nominal_ts: BTreeMap<u32, u64>,
    next_hyp: u32,
}

impl Sequent {
    pub fn new(goal: Formula) -> Self {
        let mut s = Sequent {
            hyps: Vec::new(),
            goal,
            nominal_ts: BTreeMap::new(),
            next_hyp: 1,
        };
        for n in s.goal.nominals().keys() {
            s.nominal_ts.insert(*n, 0);
        }
        s
    }

    pub fn hyp(&self, name: &str) -> Option<&Hyp> {
        self.hyps.iter().find(|h| h.name == name)
    }

    pub fn remove_hyp(&mut self, name: &str) -> Option<Hyp> {
        let i = self.hyps.iter().position(|h| h.name == name)?;
        Some(self.hyps.remove(i))
    }

    fn name_taken(&self, n: &str) -> bool {
        self.hyps.iter().any(|h| h.name == n)
    }

    /// Adds a hypothesis under the next free `Hk` name.
    pub fn add_hyp(&mut self, f: Formula) -> String {
        loop {
            let n = format!("H{}", self.next_hyp);
            self.next_hyp += 1;
            if !self.name_taken(&n) {
                self.hyps.push(Hyp {
                    name: n.clone(),
                    formula: f,
                });
                return n;
            }
        }
    }

    /// Adds a hypothesis named `base`, or `base1`, `base2`, … if taken.
    pub fn add_named(&mut self, base: &str, f: Formula) -> String {
        let name = if !self.name_taken(base) {
            base.to_string()
        } else {
            (1..)
                .map(|i| format!("{base}{i}"))
                .find(|n| !self.name_taken(n))
                .unwrap()
        };
        self.hyps.push(Hyp {
            name: name.clone(),
            formula: f,
        });
        name
    }

    /// Replaces hypothesis `name` by `fs`, the first keeping the name.
    pub fn replace_hyp(&mut self, name: &str, fs: Vec<Formula>) {
        let Some(i) = self.hyps.iter().position(|h| h.name == name) else {
            return;
        };
        let old = self.hyps.remove(i);
        let mut iter = fs.into_iter();
        if let Some(first) = iter.next() {
            self.hyps.insert(
                i,
                Hyp {
                    name: old.name,
                    formula: first,
                },
            );
        }
        for f in iter {
            self.add_hyp(f);
        }
    }

    pub fn formulas(&self) -> impl Iterator<Item = &Formula> {
        self.hyps.iter().map(|h| &h.formula).chain(std::iter::once(&self.goal))
    }

    /// Variables in the sequent, in order of first appearance.
    pub fn vars(&self) -> Vec<Arc<Var>> {
        let mut out: Vec<Arc<Var>> = Vec::new();
        for f in self.formulas() {
            for v in f.vars() {
                if !out.contains(&v) {
                    out.push(v);
                }
            }
        }
        out
    }

    pub fn nominals(&self) -> BTreeMap<u32, Ty> {
        let mut out = BTreeMap::new();
        for f in self.formulas() {
            f.collect_nominals(&mut out);
        }
        out
    }

    pub fn nominal_ts(&self, n: u32) -> u64 {
        self.nominal_ts.get(&n).copied().unwrap_or(u64::MAX)
    }

    pub fn subst(&mut self, s: &Subst) {
        if s.is_empty() {
            return;
        }
        for h in &mut self.hyps {
            h.formula = h.formula.subst(s);
        }
        self.goal = self.goal.subst(s);
    }

    /// A nominal not in the support of `f` that no variable of `f` may
    /// contain. Registers it (with a new timestamp if it is new).
    pub fn formula_fresh_nominal(&mut self, f: &Formula, fresh: &mut Fresh) -> u32 {
        let supp = f.nominals();
        let vars = f.vars();
        for i in 1.. {
            if supp.contains_key(&i) {
                continue;
            }
            if let Some(&ts) = self.nominal_ts.get(&i) {
                if vars.iter().any(|v| v.may_contain(i, ts)) {
                    continue;
                }
                return i;
            }
            self.nominal_ts.insert(i, fresh.tick());
            return i;
        }
        unreachable!()
    }

    /// The smallest nominal index not used anywhere in the sequent so far.
    pub fn unused_nominal(&self) -> u32 {
        let used = self.nominals();
        (1..)
            .find(|i| !used.contains_key(i) && !self.nominal_ts.contains_key(i))
            .unwrap()
    }

    /// A variable name based on `hint` that is not used in the sequent or in `reserved`.
    pub fn fresh_var_name(&self, hint: &str, reserved: &HashSet<String>) -> String {
        let taken: HashSet<String> = self.vars().iter().map(|v| v.name.to_string()).collect();
        pick_name(hint, &|n| taken.contains(n) || reserved.contains(n))
    }

    /// Gives distinct variables distinct names.
    pub fn tidy_names(&mut self, fresh: &mut Fresh, reserved: &HashSet<String>) {
        let mut seen: HashSet<String> = HashSet::new();
        let mut s = Subst::new();
        let vars = self.vars();
        let all: HashSet<String> = vars.iter().map(|v| v.name.to_string()).collect();
        for v in vars {
            let name = v.name.to_string();
            if !seen.contains(&name) && !reserved.contains(&name) {
                seen.insert(name);
                continue;
            }
            let new = pick_name(&name, &|n| seen.contains(n) || all.contains(n) || reserved.contains(n));
            let nv = fresh.var_excluding(&new, v.ty.clone(), v.ts, v.kind, v.excluded.clone());
            seen.insert(new);
            s.insert(&v, Term::Var(nv));
        }
        self.subst(&s);
    }

    /// Creates an eigenvariable with a name unused in the sequent.
    pub fn new_eigen(&self, hint: &str, ty: Ty, fresh: &mut Fresh, reserved: &HashSet<String>) -> Arc<Var> {
        let name = self.fresh_var_name(hint, reserved);
        let ts = fresh.tick();
        fresh.var(&name, ty, ts, VarKind::Eigen)
    }

    pub fn display(&self, annotations: bool) -> String {
        let mut out = String::new();
        let vars = self.vars();
        if !vars.is_empty() {
            let names: Vec<String> = vars.iter().map(|v| v.name.to_string()).collect();
            out.push_str(&format!("Variables: {}\n", names.join(" ")));
        }
        for h in &self.hyps {
            let f = if annotations {
                h.formula.clone()
            } else {
                h.formula.strip()
            };
            out.push_str(&format!("{} : {}\n", h.name, f));
        }
        out.push_str("============================\n ");
        let g = if annotations {
            self.goal.clone()
        } else {
            self.goal.strip()
        };
        out.push_str(&g.to_string());
        out.push('\n');
        out
    }
}

fn pick_name(hint: &str, clash: &dyn Fn(&str) -> bool) -> String {
    let base = if hint.is_empty() || hint == "_" { "X" } else { hint };
    if !clash(base) && !crate::term::is_nominal_name(base) {
        return base.to_string();
    }
    let stem = base.trim_end_matches(|c: char| c.is_ascii_digit());
    let stem = if stem.is_empty() { "X" } else { stem };
    (1..)
        .map(|i| format!("{stem}{i}"))
        .find(|n| !clash(n) && !crate::term::is_nominal_name(n))
        .unwrap()
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display(true))
    }
}
