//! Types and constants shared by the specification and reasoning levels.

use indexmap::{IndexMap, IndexSet};

use crate::term::{sym, Symbol, Ty};

pub const O: &str = "o";
pub const OLIST: &str = "olist";
pub const PROP: &str = "prop";

#[derive(Clone, Debug, PartialEq)]
pub struct Signature {
    pub kinds: IndexSet<Symbol>,
    /// Term constants, including specification predicates (result type `o`).
    pub consts: IndexMap<Symbol, Ty>,
    /// Reasoning-level predicates (result type `prop`).
    pub preds: IndexMap<Symbol, Ty>,
}

impl Default for Signature {
    fn default() -> Self {
        Self::new()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SigError {
    #[error("unknown type {0}")]
    UnknownType(String),
    #[error("{0} is already declared")]
    Duplicate(String),
    #[error("name {0} is reserved for nominal constants")]
    Reserved(String),
}

impl Signature {
    pub fn new() -> Self {
        let mut s = Signature {
            kinds: IndexSet::new(),
            consts: IndexMap::new(),
            preds: IndexMap::new(),
        };
        for k in [O, OLIST, PROP] {
            s.kinds.insert(sym(k));
        }
        let o = Ty::base(O);
        let ol = Ty::base(OLIST);
        s.consts
            .insert(sym("=>"), Ty::arrows([o.clone(), o.clone()], o.clone()));
        s.consts.insert(sym("&"), Ty::arrows([o.clone(), o.clone()], o.clone()));
        s.consts
            .insert(sym("::"), Ty::arrows([o.clone(), ol.clone()], ol.clone()));
        s.consts.insert(sym("nil"), ol.clone());
        s.preds.insert(sym("member"), Ty::arrows([o, ol], Ty::base(PROP)));
        s
    }

    /// The polymorphic universal quantifier of specifications, `pi : (A -> o) -> o`.
    pub fn pi_ty(a: Ty) -> Ty {
        Ty::arrow(Ty::arrow(a, Ty::base(O)), Ty::base(O))
    }

    pub fn check_ty(&self, ty: &Ty) -> Result<(), SigError> {
        match ty {
            Ty::Base(b) if self.kinds.contains(b) => Ok(()),
            Ty::Base(b) => Err(SigError::UnknownType(b.to_string())),
            Ty::Arrow(a, b) => {
                self.check_ty(a)?;
                self.check_ty(b)
            }
            Ty::Var(_) => Ok(()),
        }
    }

    pub fn add_kind(&mut self, name: &str) -> Result<(), SigError> {
        if !self.kinds.insert(sym(name)) {
            return Err(SigError::Duplicate(name.to_string()));
        }
        Ok(())
    }

    pub fn add_const(&mut self, name: &str, ty: Ty) -> Result<(), SigError> {
        if crate::term::is_nominal_name(name) {
            return Err(SigError::Reserved(name.to_string()));
        }
        self.check_ty(&ty)?;
        if name == "pi" || self.consts.contains_key(name) || self.preds.contains_key(name) {
            return Err(SigError::Duplicate(name.to_string()));
        }
        self.consts.insert(sym(name), ty);
        Ok(())
    }

    pub fn add_pred(&mut self, name: &str, ty: Ty) -> Result<(), SigError> {
        if crate::term::is_nominal_name(name) {
            return Err(SigError::Reserved(name.to_string()));
        }
        self.check_ty(&ty)?;
        if self.consts.contains_key(name) || self.preds.contains_key(name) {
            return Err(SigError::Duplicate(name.to_string()));
        }
        self.preds.insert(sym(name), ty);
        Ok(())
    }

    pub fn const_ty(&self, name: &str) -> Option<&Ty> {
        self.consts.get(name)
    }

    pub fn pred_ty(&self, name: &str) -> Option<&Ty> {
        self.preds.get(name)
    }

    /// Whether a term of type `outer` can mention a nominal constant of type
    /// `inner`: the target of `inner` must reach that of `outer` through
    /// argument positions of constants.
    pub fn subordinate(&self, inner: &Ty, outer: &Ty) -> bool {
        let (Ty::Base(a), Ty::Base(b)) = (inner.split().1, outer.split().1) else {
            return true;
        };
        let mut seen = vec![a.clone()];
        let mut todo = vec![a];
        while let Some(x) = todo.pop() {
            if x == b {
                return true;
            }
            for ty in self.consts.values() {
                let (args, Ty::Base(target)) = ty.split() else { continue };
                if seen.contains(&target) {
                    continue;
                }
                if args.iter().any(|t| matches!(t.split().1, Ty::Base(ref y) if *y == x)) {
                    seen.push(target.clone());
                    todo.push(target);
                }
            }
        }
        false
    }

    pub fn symbol(&self, name: &str) -> Symbol {
        self.consts
            .get_key_value(name)
            .or_else(|| self.preds.get_key_value(name))
            .map(|(k, _)| k.clone())
            .unwrap_or_else(|| sym(name))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subordination() {
        let mut s = Signature::new();
        s.add_kind("tm").unwrap();
        s.add_kind("ty").unwrap();
        let (tm, ty) = (Ty::base("tm"), Ty::base("ty"));
        s.add_const("arr", Ty::arrows([ty.clone(), ty.clone()], ty.clone()))
            .unwrap();
        s.add_const("abs", Ty::arrow(Ty::arrow(tm.clone(), tm.clone()), tm.clone()))
            .unwrap();
        s.add_const("of", Ty::arrows([tm.clone(), ty.clone()], Ty::base(O)))
            .unwrap();
        assert!(s.subordinate(&tm, &tm));
        assert!(!s.subordinate(&tm, &ty));
        assert!(s.subordinate(&tm, &Ty::base(OLIST)));
        assert!(s.subordinate(&ty, &Ty::arrow(tm.clone(), Ty::base(O))));
        assert!(!s.subordinate(&Ty::base(O), &tm));
    }
}
