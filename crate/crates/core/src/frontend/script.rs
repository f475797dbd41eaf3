//! Command execution and script checking.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::ast::{Command, CommandKind, SetValue, SigDecl, TacticAst, TermAst};
use super::elab::{elab_define, elab_formula, elab_query, elab_spec_clause, elab_term, elab_ty, NameCtx};
use super::lexer::Span;
use super::parser::{parse_commands, parse_mod, parse_sig};
use crate::metalogic::sequent::Sequent;
use crate::metalogic::Formula;
use crate::prover::{Env, Session, Tactic};
use crate::signature::{Signature, OLIST};
use crate::speclog::{solve, SolveOutcome, SpecDb};
use crate::term::{is_nominal_name, Fresh, Term, Ty};

/// Finds the `.sig`/`.mod` text of a named specification.
pub trait SpecLoader: Send {
    fn load(&self, name: &str) -> Result<(String, String), String>;
}

/// Looks for `<name>.sig` and `<name>.mod` in a list of directories.
#[derive(Clone, Debug, Default)]
pub struct FsLoader {
    pub dirs: Vec<PathBuf>,
}

impl FsLoader {
    pub fn new(dirs: Vec<PathBuf>) -> Self {
        FsLoader { dirs }
    }
}

impl SpecLoader for FsLoader {
    fn load(&self, name: &str) -> Result<(String, String), String> {
        for d in &self.dirs {
            let sig = d.join(format!("{name}.sig"));
            let md = d.join(format!("{name}.mod"));
            if sig.exists() && md.exists() {
                let read = |p: &Path| std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()));
                return Ok((read(&sig)?, read(&md)?));
            }
        }
        Err(format!("specification {name} not found"))
    }
}

/// Specifications held in memory, keyed by name.
#[derive(Clone, Debug, Default)]
pub struct MemLoader {
    pub specs: Vec<(String, String, String)>,
}

impl SpecLoader for MemLoader {
    fn load(&self, name: &str) -> Result<(String, String), String> {
        self.specs
            .iter()
            .find(|(n, _, _)| n == name)
            .map(|(_, s, m)| (s.clone(), m.clone()))
            .ok_or_else(|| format!("specification {name} not found"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ErrorKind {
    Parse,
    Check,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{span}: {message}")]
pub struct CommandError {
    pub kind: ErrorKind,
    pub span: Span,
    pub message: String,
}

impl CommandError {
    fn check(span: Span, message: impl ToString) -> Self {
        CommandError {
            kind: ErrorKind::Check,
            span,
            message: message.to_string(),
        }
    }

    fn at(span: Span) -> impl Fn(String) -> Self {
        move |m| CommandError::check(span, m)
    }
}

/// Adds the declarations and clauses of a specification to `sig`.
pub fn load_spec(sig: &mut Signature, name: &str, sig_text: &str, mod_text: &str) -> Result<SpecDb, String> {
    let sf = parse_sig(sig_text).map_err(|e| format!("{name}.sig:{e}"))?;
    for d in &sf.decls {
        match d {
            SigDecl::Kind(ns) => {
                for n in ns {
                    sig.add_kind(n).map_err(|e| format!("{name}.sig: {e}"))?;
                }
            }
            SigDecl::Type(ns, ty) => {
                let ty = elab_ty(sig, ty).map_err(|e| format!("{name}.sig:{e}"))?;
                for n in ns {
                    sig.add_const(n, ty.clone()).map_err(|e| format!("{name}.sig: {e}"))?;
                }
            }
        }
    }
    let mf = parse_mod(mod_text).map_err(|e| format!("{name}.mod:{e}"))?;
    let mut clauses = Vec::new();
    for c in &mf.clauses {
        clauses.push(elab_spec_clause(sig, c).map_err(|e| format!("{name}.mod:{e}"))?);
    }
    Ok(SpecDb {
        name: name.to_string(),
        clauses,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QueryOutcome {
    Success,
    Failure,
    DepthExhausted,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryResult {
    pub outcome: QueryOutcome,
    pub bindings: Vec<(String, String)>,
}

impl QueryResult {
    pub fn render(&self) -> String {
        match self.outcome {
            QueryOutcome::Success => {
                let mut text = String::from("Found solution:\n");
                for (x, v) in &self.bindings {
                    text.push_str(&format!("{x} = {v}\n"));
                }
                text
            }
            QueryOutcome::Failure => "No solution.\n".into(),
            QueryOutcome::DepthExhausted => "Search depth exhausted.\n".into(),
        }
    }
}

/// Result of executing one command.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Executed {
    pub output: String,
    /// Name of the theorem whose proof this command completed.
    pub completed: Option<String>,
    pub quit: bool,
}

/// A prover session together with a way to find specifications.
pub struct Runner {
    pub session: Session,
    loader: Box<dyn SpecLoader>,
}

impl Runner {
    pub fn new(loader: Box<dyn SpecLoader>) -> Self {
        Runner {
            session: Session::new(Env::default()),
            loader,
        }
    }

    pub fn env(&self) -> &Env {
        self.session.env()
    }

    pub fn load_spec_named(&mut self, name: &str) -> Result<usize, String> {
        let (s, m) = self.loader.load(name)?;
        self.load_spec_text(name, &s, &m)
    }

    pub fn load_spec_text(&mut self, name: &str, sig_text: &str, mod_text: &str) -> Result<usize, String> {
        if !self.env().spec.name.is_empty() {
            return Err(format!("specification {} is already loaded", self.env().spec.name));
        }
        if self.session.proof().is_some() {
            return Err("a proof is in progress".into());
        }
        self.session.update_env(|env| {
            let db = load_spec(&mut env.sig, name, sig_text, mod_text)?;
            let n = db.clauses.len();
            env.spec = db;
            Ok(n)
        })
    }

    fn names(&self) -> (NameCtx, Option<Sequent>) {
        match self.session.proof().and_then(|p| p.current()) {
            Some(seq) => (
                NameCtx {
                    eigen: seq.vars(),
                    nominals: seq.nominals(),
                },
                Some(seq.clone()),
            ),
            None => (NameCtx::default(), None),
        }
    }

    /// Translates a parsed tactic against the current subgoal.
    pub fn elab_tactic(&self, t: &TacticAst, span: Span) -> Result<Tactic, CommandError> {
        let (names, seq) = self.names();
        let Some(seq) = seq else {
            return Err(CommandError::check(span, "no proof in progress"));
        };
        let sig = &self.env().sig;
        let e = |x| CommandError::check(span, x);
        Ok(match t {
            TacticAst::Induction(ns) => Tactic::Induction(ns.clone()),
            TacticAst::Intros(ns) => Tactic::Intros(ns.clone()),
            TacticAst::Case { hyp, keep } => Tactic::Case {
                hyp: hyp.clone(),
                keep: *keep,
            },
            TacticAst::Apply { target, args, withs } => {
                let f = seq
                    .hyp(target)
                    .map(|h| h.formula.clone())
                    .or_else(|| self.env().lemmas.get(target).cloned());
                let binders = f.map(|f| f.premises().0).unwrap_or_default();
                let mut ws = Vec::new();
                for (x, t) in withs {
                    let ty = binders.iter().find(|(n, _)| n == x).map(|(_, ty)| ty.clone());
                    let term = elab_term(sig, &names, t, ty.as_ref()).map_err(|m| e(m.to_string()))?;
                    ws.push((x.clone(), term));
                }
                Tactic::Apply {
                    target: target.clone(),
                    args: args.clone(),
                    withs: ws,
                }
            }
            TacticAst::Search(d) => Tactic::Search(*d),
            TacticAst::Split => Tactic::Split,
            TacticAst::Left => Tactic::Left,
            TacticAst::Right => Tactic::Right,
            TacticAst::Exists(t) => {
                let ty = match &seq.goal {
                    Formula::Quant(_, _, ty, _) => Some(ty.clone()),
                    _ => None,
                };
                Tactic::Exists(elab_term(sig, &names, t, ty.as_ref()).map_err(|m| e(m.to_string()))?)
            }
            TacticAst::Assert(f) => Tactic::Assert(elab_formula(sig, &names, f).map_err(|m| e(m.to_string()))?),
            TacticAst::Unfold => Tactic::Unfold,
            TacticAst::Inst { hyp, nominal, term } => {
                if !is_nominal_name(nominal) {
                    return Err(e(format!("{nominal} is not a nominal constant")));
                }
                let idx: u32 = nominal[1..].parse().map_err(|_| e(format!("bad nominal {nominal}")))?;
                let ty = names.nominals.get(&idx).cloned();
                Tactic::Inst {
                    hyp: hyp.clone(),
                    nominal: idx,
                    term: elab_term(sig, &names, term, ty.as_ref()).map_err(|m| e(m.to_string()))?,
                }
            }
            TacticAst::Cut { hyp, with } => Tactic::Cut {
                hyp: hyp.clone(),
                with: with.clone(),
            },
            TacticAst::Monotone { hyp, ctx } => Tactic::Monotone {
                hyp: hyp.clone(),
                ctx: elab_term(sig, &names, ctx, Some(&Ty::base(OLIST))).map_err(|m| e(m.to_string()))?,
            },
            TacticAst::Clear(hs) => Tactic::Clear(hs.clone()),
            TacticAst::Undo | TacticAst::Abort => return Err(e("not a proof tactic".into())),
        })
    }

    /// Animates a specification goal; capitalized names are logic variables.
    pub fn query(&self, t: &TermAst) -> Result<QueryResult, super::elab::ElabError> {
        let mut fresh = Fresh::new(0);
        let env = self.env();
        let (goal, vars) = elab_query(&env.sig, t, &mut fresh)?;
        let r = solve(
            &env.spec,
            &[],
            &goal,
            env.settings.query_depth,
            &mut fresh,
            &Default::default(),
        );
        Ok(match r {
            SolveOutcome::Success(s) => QueryResult {
                outcome: QueryOutcome::Success,
                bindings: vars
                    .iter()
                    .map(|v| (v.name.to_string(), Term::Var(v.clone()).subst(&s).to_string()))
                    .collect(),
            },
            SolveOutcome::Failure => QueryResult {
                outcome: QueryOutcome::Failure,
                bindings: vec![],
            },
            SolveOutcome::DepthExhausted => QueryResult {
                outcome: QueryOutcome::DepthExhausted,
                bindings: vec![],
            },
        })
    }

    pub fn exec(&mut self, cmd: &Command) -> Result<Executed, CommandError> {
        let span = cmd.span;
        let at = CommandError::at(span);
        let mut out = Executed::default();
        let in_proof = self.session.proof().is_some();
        let top_level = |name: &str| {
            if in_proof {
                Err(CommandError::check(
                    span,
                    format!("{name} is not allowed inside a proof"),
                ))
            } else {
                Ok(())
            }
        };
        match &cmd.kind {
            CommandKind::Specification(name) => {
                top_level("Specification")?;
                let n = self.load_spec_named(name).map_err(&at)?;
                out.output = format!("Loaded specification {name} ({n} clauses).\n");
            }
            CommandKind::Kind(ns) => {
                top_level("Kind")?;
                self.session
                    .update_env(|env| {
                        ns.iter()
                            .try_for_each(|n| env.sig.add_kind(n))
                            .map_err(|e| e.to_string())
                    })
                    .map_err(&at)?;
            }
            CommandKind::Type(ns, ty) => {
                top_level("Type")?;
                self.session
                    .update_env(|env| {
                        let ty = elab_ty(&env.sig, ty).map_err(|e| e.to_string())?;
                        ns.iter()
                            .try_for_each(|n| env.sig.add_const(n, ty.clone()))
                            .map_err(|e| e.to_string())
                    })
                    .map_err(&at)?;
            }
            CommandKind::Define(preds, clauses) => {
                top_level("Define")?;
                self.session
                    .update_env(|env| {
                        let mut syms = Vec::new();
                        for (p, ty) in preds {
                            let ty = elab_ty(&env.sig, ty).map_err(|e| e.to_string())?;
                            if !ty.split().1.is_base(crate::signature::PROP) {
                                return Err(format!("{p} must have result type prop"));
                            }
                            env.sig.add_pred(p, ty.clone()).map_err(|e| e.to_string())?;
                            syms.push((env.sig.symbol(p), ty));
                        }
                        let names: Vec<_> = syms.iter().map(|(s, _)| s.clone()).collect();
                        let cls = elab_define(&env.sig, &names, clauses).map_err(|e| e.to_string())?;
                        env.defs.add_block(syms, cls).map_err(|e| e.to_string())
                    })
                    .map_err(&at)?;
            }
            CommandKind::Theorem(name, f) => {
                top_level("Theorem")?;
                let f = elab_formula(&self.env().sig, &NameCtx::default(), f).map_err(|e| at(e.to_string()))?;
                self.session.start_theorem(name, f).map_err(|e| at(e.to_string()))?;
                out.output = self.session.display();
            }
            CommandKind::Query(t) => {
                out.output = self.query(t).map_err(|e| at(e.to_string()))?.render();
            }
            CommandKind::Set(k, v) => {
                let (k, v) = (k.clone(), v.clone());
                self.session
                    .update_env(move |env| {
                        match (k.as_str(), &v) {
                            ("search_depth", SetValue::Num(n)) => env.settings.search_depth = *n,
                            ("query_depth", SetValue::Num(n)) => env.settings.query_depth = *n,
                            ("print_annotations", SetValue::Word(w)) if w == "on" || w == "off" => {
                                env.settings.print_annotations = w == "on"
                            }
                            _ => return Err(format!("unknown option or bad value: {k}")),
                        }
                        Ok(())
                    })
                    .map_err(&at)?;
            }
            CommandKind::Quit => out.quit = true,
            CommandKind::Tactic(TacticAst::Undo) => {
                self.session.undo().map_err(|e| at(e.to_string()))?;
                out.output = self.session.display();
            }
            CommandKind::Tactic(TacticAst::Abort) => {
                self.session.abort().map_err(|e| at(e.to_string()))?;
            }
            CommandKind::Tactic(t) => {
                let name = self.session.proof().map(|p| p.name.clone());
                let tac = self.elab_tactic(t, span)?;
                let done = self.session.tactic(&tac).map_err(|e| at(e.to_string()))?;
                if done {
                    let name = name.unwrap_or_default();
                    out.output = format!("Proof of {name} completed.\n");
                    out.completed = Some(name);
                } else {
                    out.output = self.session.display();
                }
            }
        }
        Ok(out)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RunMode {
    Batch,
    Interactive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    pub file: String,
    pub line: u32,
    pub col: u32,
    pub end_line: u32,
    pub end_col: u32,
    pub kind: ErrorKind,
    pub theorem: Option<String>,
    pub command: Option<String>,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub file: String,
    pub theorems: Vec<String>,
    pub failures: Vec<Failure>,
    pub exit_code: i32,
}

impl Report {
    pub fn render(&self) -> String {
        let mut out = String::new();
        for t in &self.theorems {
            out.push_str(&format!("{}: theorem {t} checked\n", self.file));
        }
        for f in &self.failures {
            out.push_str(&format!("{}:{}:{}: error: {}\n", f.file, f.line, f.col, f.message));
            if let Some(c) = &f.command {
                out.push_str(&format!("  in: {c}\n"));
            }
        }
        out.push_str(&format!(
            "{}: {} theorem(s) checked, {} failure(s)\n",
            self.file,
            self.theorems.len(),
            self.failures.len()
        ));
        out
    }
}

fn failure(
    file: &str,
    span: Span,
    kind: ErrorKind,
    theorem: Option<String>,
    command: Option<String>,
    message: String,
) -> Failure {
    Failure {
        file: file.to_string(),
        line: span.line,
        col: span.col,
        end_line: span.end_line,
        end_col: span.end_col,
        kind,
        theorem,
        command,
        message,
    }
}

/// Checks the commands of `src`, stopping at the first failure.
pub fn run_source(runner: &mut Runner, file: &str, src: &str, mode: RunMode) -> Report {
    let mut report = Report {
        file: file.to_string(),
        ..Default::default()
    };
    let cmds = match parse_commands(src) {
        Ok(c) => c,
        Err(e) => {
            report.failures.push(failure(
                file,
                e.span,
                ErrorKind::Parse,
                None,
                None,
                format!("syntax error: {}", e.message),
            ));
            report.exit_code = 2;
            return report;
        }
    };
    for c in &cmds {
        let theorem = runner.session.proof().map(|p| p.name.clone());
        match runner.exec(c) {
            Ok(x) => {
                if let Some(t) = x.completed {
                    report.theorems.push(t);
                }
                if x.quit {
                    break;
                }
            }
            Err(e) => {
                let theorem = match &c.kind {
                    CommandKind::Theorem(n, _) => Some(n.clone()),
                    _ => theorem,
                };
                report
                    .failures
                    .push(failure(file, e.span, e.kind, theorem, Some(c.to_string()), e.message));
                report.exit_code = 1;
                return report;
            }
        }
    }
    if mode == RunMode::Batch {
        if let Some(p) = runner.session.proof() {
            let span = cmds.last().map(|c| c.span).unwrap_or_default();
            report.failures.push(failure(
                file,
                span,
                ErrorKind::Check,
                Some(p.name.clone()),
                None,
                format!("proof of {} is incomplete", p.name),
            ));
            report.exit_code = 1;
        }
    }
    report
}

/// Reads and checks a `.thm` file.
pub fn run_script(runner: &mut Runner, path: &Path, mode: RunMode) -> std::io::Result<Report> {
    let src = std::fs::read_to_string(path)?;
    let file = path
        .file_name()
        .map(|f| f.to_string_lossy().into_owned())
        .unwrap_or_default();
    Ok(run_source(runner, &file, &src, mode))
}

/// One independent batch check.
#[derive(Clone, Debug)]
pub struct Job {
    pub file: String,
    pub src: String,
    /// Directories searched for specifications.
    pub dirs: Vec<PathBuf>,
    /// Specification loaded before the script runs: name, signature, module.
    pub preload: Option<(String, String, String)>,
}

impl Job {
    pub fn from_path(path: &Path, dirs: Vec<PathBuf>) -> std::io::Result<Job> {
        Ok(Job {
            file: path
                .file_name()
                .map(|f| f.to_string_lossy().into_owned())
                .unwrap_or_default(),
            src: std::fs::read_to_string(path)?,
            dirs,
            preload: None,
        })
    }

    pub fn run(&self) -> Report {
        let mut runner = Runner::new(Box::new(FsLoader::new(self.dirs.clone())));
        if let Some((name, sig, md)) = &self.preload {
            if let Err(e) = runner.load_spec_text(name, sig, md) {
                return Report {
                    file: self.file.clone(),
                    failures: vec![failure(&self.file, Span::default(), ErrorKind::Check, None, None, e)],
                    exit_code: 2,
                    ..Default::default()
                };
            }
        }
        run_source(&mut runner, &self.file, &self.src, RunMode::Batch)
    }
}

/// Checks independent scripts, on the thread pool when the `parallel`
/// feature is enabled. Reports are in input order.
pub fn check_jobs(jobs: &[Job]) -> Vec<Report> {
    crate::par::par_map(jobs, Job::run)
}

pub fn check_jobs_sequential(jobs: &[Job]) -> Vec<Report> {
    crate::par::seq_map(jobs, Job::run)
}

/// The bundled theorem files, sorted by name.
pub fn corpus_jobs() -> std::io::Result<Vec<Job>> {
    let dir = corpus_dir();
    let mut paths: Vec<PathBuf> = std::fs::read_dir(&dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "thm"))
        .collect();
    paths.sort();
    paths.iter().map(|p| Job::from_path(p, vec![dir.clone()])).collect()
}

/// Directory of the bundled example corpus.
pub fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

pub fn corpus_runner() -> Runner {
    Runner::new(Box::new(FsLoader::new(vec![corpus_dir()])))
}
