//! Interactive tactic engine.

mod matching;
mod search;
mod session;
mod tactics;

use std::collections::HashSet;

use indexmap::IndexMap;

use crate::metalogic::sequent::Sequent;
use crate::metalogic::{DefDb, Formula};
use crate::signature::Signature;
use crate::speclog::SpecDb;
use crate::term::{Fresh, Term};

pub use matching::unify_formula;
pub use search::{search_goal, search_goals};
pub use session::{Session, SessionError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Settings {
    pub search_depth: u32,
    pub query_depth: u32,
    pub print_annotations: bool,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            search_depth: 5,
            query_depth: 10,
            print_annotations: true,
        }
    }
}

/// Everything a proof may refer to: signature, definitions, the loaded
/// specification and previously proved lemmas.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Env {
    pub sig: Signature,
    pub defs: DefDb,
    pub spec: SpecDb,
    pub lemmas: IndexMap<String, Formula>,
    pub settings: Settings,
}

impl Env {
    /// Names that eigenvariables must not shadow.
    pub fn reserved_names(&self) -> HashSet<String> {
        self.sig
            .consts
            .keys()
            .chain(self.sig.preds.keys())
            .map(|s| s.to_string())
            .chain(["pi".to_string()])
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Tactic {
    Induction(Vec<usize>),
    Intros(Vec<String>),
    Case {
        hyp: String,
        keep: bool,
    },
    Apply {
        target: String,
        args: Vec<Option<String>>,
        withs: Vec<(String, Term)>,
    },
    Search(Option<u32>),
    Split,
    Left,
    Right,
    Exists(Term),
    Assert(Formula),
    Unfold,
    Inst {
        hyp: String,
        nominal: u32,
        term: Term,
    },
    Cut {
        hyp: String,
        with: String,
    },
    Monotone {
        hyp: String,
        ctx: Term,
    },
    Clear(Vec<String>),
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{0}")]
pub struct TacticError(pub String);

impl TacticError {
    pub fn new(msg: impl Into<String>) -> Self {
        TacticError(msg.into())
    }
}

pub type TacticResult<T> = Result<T, TacticError>;

/// An unfinished proof: the remaining subgoals, the first one current.
#[derive(Clone, Debug, PartialEq)]
pub struct ProofState {
    pub name: String,
    pub formula: Formula,
    pub goals: Vec<Sequent>,
    pub fresh: Fresh,
}

impl ProofState {
    pub fn new(name: &str, formula: Formula) -> Self {
        ProofState {
            name: name.to_string(),
            goals: vec![Sequent::new(formula.clone())],
            formula,
            fresh: Fresh::new(0),
        }
    }

    pub fn is_done(&self) -> bool {
        self.goals.is_empty()
    }

    pub fn current(&self) -> Option<&Sequent> {
        self.goals.first()
    }

    /// Runs `t` on the current subgoal; on error the state is unchanged.
    pub fn apply(&mut self, env: &Env, t: &Tactic) -> TacticResult<()> {
        let Some(seq) = self.goals.first().cloned() else {
            return Err(TacticError::new("no subgoals remain"));
        };
        let mut fresh = self.fresh.clone();
        let mut new = tactics::run(env, &mut fresh, seq, t)?;
        for s in &mut new {
            tactics::prune_by_type(&env.sig, s, &mut fresh);
        }
        new.retain(|s| !s.hyps.iter().any(|h| h.formula == Formula::False) && s.goal != Formula::True);
        self.fresh = fresh;
        self.goals.splice(0..1, new);
        Ok(())
    }

    pub fn display(&self, annotations: bool) -> String {
        match self.goals.first() {
            None => format!("Proof of {} completed.\n", self.name),
            Some(seq) => {
                let mut out = seq.display(annotations);
                if self.goals.len() > 1 {
                    out.push('\n');
                    for (i, g) in self.goals.iter().enumerate().skip(1) {
                        let f = if annotations { g.goal.clone() } else { g.goal.strip() };
                        out.push_str(&format!("Subgoal {} is:\n {}\n", i + 1, f));
                    }
                }
                out
            }
        }
    }
}
