use std::sync::Arc;

use super::{Env, ProofState, Tactic, TacticError};
use crate::metalogic::Formula;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SessionError {
    #[error("no proof in progress")]
    NoProof,
    #[error("a proof is already in progress")]
    ProofInProgress,
    #[error("nothing to undo")]
    NothingToUndo,
    #[error("{0} is already a lemma")]
    DuplicateLemma(String),
    #[error("{0}")]
    Tactic(#[from] TacticError),
}

/// Observable state of a session, used for undo.
#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub env: Arc<Env>,
    pub proof: Option<ProofState>,
}

/// A prover session: the environment, the proof in progress and the
/// history needed to undo every state change.
#[derive(Clone, Debug, Default)]
pub struct Session {
    env: Arc<Env>,
    proof: Option<ProofState>,
    history: Vec<Snapshot>,
}

impl Session {
    pub fn new(env: Env) -> Self {
        Session {
            env: Arc::new(env),
            proof: None,
            history: Vec::new(),
        }
    }

    pub fn env(&self) -> &Env {
        &self.env
    }

    pub fn proof(&self) -> Option<&ProofState> {
        self.proof.as_ref()
    }

    pub fn snapshot(&self) -> Snapshot {
        Snapshot {
            env: self.env.clone(),
            proof: self.proof.clone(),
        }
    }

    /// Records the current state so that the next change can be undone.
    pub fn checkpoint(&mut self) {
        let s = self.snapshot();
        self.history.push(s);
    }

    /// Changes the environment (undoably).
    pub fn update_env<T, E>(&mut self, f: impl FnOnce(&mut Env) -> Result<T, E>) -> Result<T, E> {
        let mut env = (*self.env).clone();
        let out = f(&mut env)?;
        self.checkpoint();
        self.env = Arc::new(env);
        Ok(out)
    }

    pub fn start_theorem(&mut self, name: &str, f: Formula) -> Result<(), SessionError> {
        if self.proof.is_some() {
            return Err(SessionError::ProofInProgress);
        }
        if self.env.lemmas.contains_key(name) {
            return Err(SessionError::DuplicateLemma(name.to_string()));
        }
        self.checkpoint();
        self.proof = Some(ProofState::new(name, f));
        Ok(())
    }

    /// Runs a tactic; returns `true` when it completed the proof.
    pub fn tactic(&mut self, t: &Tactic) -> Result<bool, SessionError> {
        let Some(p) = &self.proof else {
            return Err(SessionError::NoProof);
        };
        let mut next = p.clone();
        next.apply(&self.env, t)?;
        self.checkpoint();
        if next.is_done() {
            let mut env = (*self.env).clone();
            env.lemmas.insert(next.name.clone(), next.formula.clone());
            self.env = Arc::new(env);
            self.proof = None;
            Ok(true)
        } else {
            self.proof = Some(next);
            Ok(false)
        }
    }

    /// Drops the proof in progress (undoably).
    pub fn abort(&mut self) -> Result<(), SessionError> {
        if self.proof.is_none() {
            return Err(SessionError::NoProof);
        }
        self.checkpoint();
        self.proof = None;
        Ok(())
    }

    pub fn undo(&mut self) -> Result<(), SessionError> {
        let s = self.history.pop().ok_or(SessionError::NothingToUndo)?;
        self.env = s.env;
        self.proof = s.proof;
        Ok(())
    }

    pub fn history_len(&self) -> usize {
        self.history.len()
    }

    pub fn display(&self) -> String {
        match &self.proof {
            Some(p) => p.display(self.env.settings.print_annotations),
            None => String::new(),
        }
    }
}
