//! Fixed-point definitions.

use indexmap::IndexMap;

use super::formula::{Formula, Quant};
use crate::signature::{O, OLIST, PROP};
use crate::term::{sym, Symbol, Term, Ty};
use crate::unify::HeadPattern;

/// `∀x̄. ∇z̄. p t̄ := body`. Head arguments and the body refer to the
/// universals (outermost) and then the ∇ variables as loose indices.
#[derive(Clone, Debug, PartialEq)]
pub struct DefClause {
    pub universals: Vec<(String, Ty)>,
    pub nablas: Vec<(String, Ty)>,
    pub head: Vec<Term>,
    pub body: Formula,
}

impl DefClause {
    pub fn pattern(&self) -> HeadPattern {
        HeadPattern {
            universals: self.universals.clone(),
            nablas: self.nablas.clone(),
            head: self.head.clone(),
        }
    }

    pub fn binder_count(&self) -> usize {
        self.universals.len() + self.nablas.len()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Definition {
    pub pred: Symbol,
    pub ty: Ty,
    pub clauses: Vec<DefClause>,
    /// Predicates defined together with this one.
    pub block: Vec<Symbol>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum DefError {
    #[error("{0} is already defined")]
    Duplicate(String),
    #[error("definition of {pred} is not stratified: {occ} occurs negatively")]
    NotStratified { pred: String, occ: String },
    #[error("clause head for {0} is not defined in this block")]
    ForeignHead(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct DefDb {
    pub defs: IndexMap<Symbol, Definition>,
}

impl Default for DefDb {
    fn default() -> Self {
        Self::new()
    }
}

impl DefDb {
    /// A database holding only `member`.
    pub fn new() -> Self {
        let mut db = DefDb { defs: IndexMap::new() };
        db.defs.insert(sym("member"), member_definition());
        db
    }

    pub fn get(&self, pred: &str) -> Option<&Definition> {
        self.defs.get(pred)
    }

    /// Adds a block of mutually recursive definitions.
    pub fn add_block(&mut self, preds: Vec<(Symbol, Ty)>, clauses: Vec<(Symbol, DefClause)>) -> Result<(), DefError> {
        let names: Vec<Symbol> = preds.iter().map(|(p, _)| p.clone()).collect();
        for p in &names {
            if self.defs.contains_key(p) {
                return Err(DefError::Duplicate(p.to_string()));
            }
        }
        for (p, c) in &clauses {
            if !names.contains(p) {
                return Err(DefError::ForeignHead(p.to_string()));
            }
            check_positive(&c.body, &names, true).map_err(|occ| DefError::NotStratified {
                pred: p.to_string(),
                occ,
            })?;
        }
        for (p, ty) in preds {
            let cls = clauses
                .iter()
                .filter(|(q, _)| *q == p)
                .map(|(_, c)| c.clone())
                .collect();
            self.defs.insert(
                p.clone(),
                Definition {
                    pred: p,
                    ty,
                    clauses: cls,
                    block: names.clone(),
                },
            );
        }
        Ok(())
    }
}

fn check_positive(f: &Formula, block: &[Symbol], pos: bool) -> Result<(), String> {
    match f {
        Formula::Atom { pred, .. } if !pos && block.contains(pred) => Err(pred.to_string()),
        Formula::And(a, b) | Formula::Or(a, b) => {
            check_positive(a, block, pos)?;
            check_positive(b, block, pos)
        }
        Formula::Imp(a, b) => {
            check_positive(a, block, !pos)?;
            check_positive(b, block, pos)
        }
        Formula::Quant(_, _, _, b) => check_positive(b, block, pos),
        _ => Ok(()),
    }
}

/// `member A (A :: L)` and `member A (B :: L) := member A L`.
fn member_definition() -> Definition {
    let o = Ty::base(O);
    let ol = Ty::base(OLIST);
    let cons = |a: Term, l: Term| {
        Term::app(
            Term::cnst("::", Ty::arrows([o.clone(), ol.clone()], ol.clone())),
            vec![a, l],
        )
    };
    let first = DefClause {
        universals: vec![("A".into(), o.clone()), ("L".into(), ol.clone())],
        nablas: vec![],
        head: vec![Term::Bound(1), cons(Term::Bound(1), Term::Bound(0))],
        body: Formula::True,
    };
    let rest = DefClause {
        universals: vec![
            ("A".into(), o.clone()),
            ("B".into(), o.clone()),
            ("L".into(), ol.clone()),
        ],
        nablas: vec![],
        head: vec![Term::Bound(2), cons(Term::Bound(1), Term::Bound(0))],
        body: Formula::atom("member", vec![Term::Bound(2), Term::Bound(0)]),
    };
    Definition {
        pred: sym("member"),
        ty: Ty::arrows([o, ol], Ty::base(PROP)),
        clauses: vec![first, rest],
        block: vec![sym("member")],
    }
}

/// Wraps `body` in `∃` for each binder index in `indices` (outermost first).
pub fn close_exists(body: Formula, binders: &[(String, Ty)]) -> Formula {
    binders
        .iter()
        .rev()
        .fold(body, |f, (n, ty)| Formula::quant(Quant::Exists, n, ty.clone(), f))
}
