//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

mod support;

use std::path::PathBuf;
use std::time::{Duration, Instant};

use nabla_core::frontend::ast::{CommandKind, TacticAst};
use nabla_core::frontend::elab::{elab_formula, NameCtx};
use nabla_core::frontend::{corpus_dir, corpus_jobs, parse_commands, parse_formula, FsLoader, Runner};
use nabla_core::metalogic::sequent::Sequent;
use nabla_core::par::par_map;
use support::oracle::{extension_shapes, judge, mgu_check, problems, render, Verdict};

const SCRIPT_LIMIT: Duration = Duration::from_secs(10);
const ANIMATION_LIMIT: Duration = Duration::from_secs(1);
const SWEEP_SIZE: usize = 10_000;
const SWEEP_SEED: u64 = 2024;
/// Indeterminate verdicts allowed in the sweep, in percent.
const MAX_INDETERMINATE_PCT: f64 = 5.0;
const MIN_MUTATIONS: usize = 10;

type Check = Result<String, String>;

fn runner() -> Runner {
    Runner::new(Box::new(FsLoader::new(vec![corpus_dir()])))
}

fn corpus() -> Check {
    let jobs = corpus_jobs().map_err(|e| e.to_string())?;
    let mut slowest = Duration::ZERO;
    let mut theorems = 0;
    for job in &jobs {
        let t = Instant::now();
        let r = job.run();
        let dt = t.elapsed();
        slowest = slowest.max(dt);
        if r.exit_code != 0 {
            return Err(format!("{}:\n{}", job.file, r.render()));
        }
        if dt >= SCRIPT_LIMIT {
            return Err(format!("{} took {dt:?}", job.file));
        }
        theorems += r.theorems.len();
    }
    if jobs.len() < 5 {
        return Err(format!("only {} scripts", jobs.len()));
    }
    Ok(format!(
        "{} scripts, {theorems} theorems, slowest {slowest:?}",
        jobs.len()
    ))
}

const NAME_FRESH: &str = "
Kind tm type.
Type c tm.
Type app tm -> tm -> tm.
Define name : tm -> prop by nabla x, name x.
Define fresh : tm -> tm -> prop by nabla x, fresh x E.
Theorem a : nabla x, name x -> false.
intros. case H1. abort.
Theorem b : name (app c c) -> false.
intros. case H1.
Theorem c : nabla x, fresh x (app x c) -> false.
intros. case H1.
Theorem d : nabla x y, fresh x (app y c) -> false.
intros. case H1. abort.
";

/// `case` on name/fresh atoms: how many subgoals each produced.
fn name_fresh() -> Check {
    let mut r = runner();
    let mut branches = Vec::new();
    for cmd in parse_commands(NAME_FRESH).map_err(|e| e.to_string())? {
        let is_case = matches!(cmd.kind, CommandKind::Tactic(TacticAst::Case { .. }));
        let out = r.exec(&cmd).map_err(|e| e.to_string())?;
        if is_case {
            let open = if out.completed.is_some() {
                0
            } else {
                r.session.proof().map_or(0, |p| p.goals.len())
            };
            branches.push(open);
        }
    }
    if branches == [1, 0, 0, 1] {
        Ok("name n1 and fresh n1 (app n2 c) succeed; name (app c c) and fresh n1 (app n1 c) are empty".into())
    } else {
        Err(format!("case branches {branches:?}, expected [1, 0, 0, 1]"))
    }
}

struct Sweep {
    total: usize,
    unifiable: usize,
    not_unifiable: usize,
    indeterminate: usize,
    not_equalizing: Vec<String>,
    other: Vec<String>,
}

fn sweep() -> Sweep {
    let ps = problems(SWEEP_SEED, SWEEP_SIZE);
    let verdicts = par_map(&ps, judge);
    let mut s = Sweep {
        total: ps.len(),
        unifiable: 0,
        not_unifiable: 0,
        indeterminate: 0,
        not_equalizing: vec![],
        other: vec![],
    };
    for (p, v) in ps.iter().zip(verdicts) {
        match v {
            Verdict::Unifiable => s.unifiable += 1,
            Verdict::NotUnifiable => s.not_unifiable += 1,
            Verdict::Indeterminate => s.indeterminate += 1,
            Verdict::Discrepancy(m) => {
                let line = format!("{} = {}: {m}", render(&p.lhs), render(&p.rhs));
                if m.contains("does not equalize") {
                    s.not_equalizing.push(line);
                } else {
                    s.other.push(line);
                }
            }
        }
    }
    s
}

fn shapes() -> Check {
    let mut n = 0;
    for p in extension_shapes() {
        let p2 = p.clone();
        n += std::panic::catch_unwind(move || mgu_check(&p2))
            .map_err(|_| format!("{} = {}", render(&p.lhs), render(&p.rhs)))?;
    }
    Ok(format!(
        "3 shapes, {n} ground unifiers factor through the computed ones"
    ))
}

fn animation() -> Check {
    let mut r = runner();
    let src = "Specification \"stlc\".\nQuery of (abs (arr i i) (f\\ abs i (x\\ app f x))) T.\n";
    let cmds = parse_commands(src).map_err(|e| e.to_string())?;
    r.exec(&cmds[0]).map_err(|e| e.to_string())?;
    if r.env().settings.query_depth != 10 {
        return Err(format!("query depth is {}", r.env().settings.query_depth));
    }
    let t = Instant::now();
    let out = r.exec(&cmds[1]).map_err(|e| e.to_string())?;
    let dt = t.elapsed();
    if !out.output.contains("T = arr (arr i i) (arr i i)") {
        return Err(out.output);
    }
    if dt >= ANIMATION_LIMIT {
        return Err(format!("took {dt:?}"));
    }
    Ok(format!("T = arr (arr i i) (arr i i) in {dt:?}"))
}

fn mutations() -> Check {
    let dir = corpus_dir().join("mutations");
    let mut paths: Vec<PathBuf> = std::fs::read_dir(&dir)
        .map_err(|e| e.to_string())?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "thm"))
        .collect();
    paths.sort();
    let mut reasons = Vec::new();
    for p in &paths {
        let src = std::fs::read_to_string(p).map_err(|e| e.to_string())?;
        let expect = src
            .lines()
            .next()
            .and_then(|l| l.strip_prefix("% expect: "))
            .ok_or_else(|| format!("{}: no expectation line", p.display()))?
            .to_string();
        let report = nabla_core::frontend::Job::from_path(p, vec![dir.clone(), corpus_dir()])
            .map_err(|e| e.to_string())?
            .run();
        let first = report.failures.first().map(|f| f.message.clone()).unwrap_or_default();
        if report.exit_code != 1 || !first.contains(&expect) {
            return Err(format!(
                "{}: exit {}, first error {first:?}",
                p.display(),
                report.exit_code
            ));
        }
        reasons.push(expect);
    }
    let has = |s: &str| reasons.iter().any(|r| r.contains(s));
    let kinds = [
        ("restriction", "annotation"),
        ("lemma arguments", "does not match premise"),
        ("inst escape", "escape"),
    ];
    for (what, needle) in kinds {
        if !has(needle) {
            return Err(format!("no {what} mutation"));
        }
    }
    if paths.len() < MIN_MUTATIONS {
        return Err(format!("only {} mutations", paths.len()));
    }
    Ok(format!("{} mutations rejected for the expected reason", paths.len()))
}

/// Runs every corpus command; after each state change, undoes it and checks
/// the state matches, then redoes it.
fn undo() -> Check {
    let mut steps = 0;
    for job in corpus_jobs().map_err(|e| e.to_string())? {
        let mut r = runner();
        for cmd in parse_commands(&job.src).map_err(|e| e.to_string())? {
            let undoable = !matches!(
                cmd.kind,
                CommandKind::Query(_) | CommandKind::Quit | CommandKind::Tactic(TacticAst::Undo)
            );
            let before = r.session.snapshot();
            let shown = r.session.display();
            r.exec(&cmd)
                .map_err(|e| format!("{}: {cmd}: {}", job.file, e.message))?;
            if !undoable {
                continue;
            }
            let after = r.session.snapshot();
            r.session.undo().map_err(|e| e.to_string())?;
            if r.session.snapshot() != before || r.session.display() != shown {
                return Err(format!("{}: undo of `{cmd}` is not exact", job.file));
            }
            r.exec(&cmd)
                .map_err(|e| format!("{}: redo {cmd}: {}", job.file, e.message))?;
            if r.session.snapshot() != after {
                return Err(format!("{}: redo of `{cmd}` differs", job.file));
            }
            steps += 1;
        }
    }
    Ok(format!("{steps} state changes undone exactly"))
}

fn seq_round_trip(r: &Runner, seq: &Sequent) -> Result<(), String> {
    let names = NameCtx {
        eigen: seq.vars(),
        nominals: seq.nominals(),
    };
    for f in seq.hyps.iter().map(|h| &h.formula).chain([&seq.goal]) {
        let f = f.strip();
        let text = f.to_string();
        let ast = parse_formula(&text).map_err(|e| format!("{text}: {e}"))?;
        let back = elab_formula(&r.env().sig, &names, &ast).map_err(|e| format!("{text}: {e}"))?;
        if back != f {
            return Err(format!("{text} reads back as {back}"));
        }
    }
    Ok(())
}

/// Commands print and re-parse to themselves; so does every formula of
/// every proof state reached by the corpus.
fn round_trip() -> Check {
    let (mut cmds_n, mut states) = (0, 0);
    for job in corpus_jobs().map_err(|e| e.to_string())? {
        let mut r = runner();
        for cmd in parse_commands(&job.src).map_err(|e| e.to_string())? {
            let text = cmd.to_string();
            let again = parse_commands(&text).map_err(|e| format!("{text}: {e}"))?;
            if again != [cmd.clone()] {
                return Err(format!("{}: `{text}` reparses differently", job.file));
            }
            cmds_n += 1;
            r.exec(&cmd).map_err(|e| e.message)?;
            if let Some(p) = r.session.proof() {
                for seq in &p.goals {
                    seq_round_trip(&r, seq).map_err(|e| format!("{}: {e}", job.file))?;
                    states += 1;
                }
            }
        }
    }
    Ok(format!("{cmds_n} commands, {states} sequents"))
}

fn main() {
    let mut failed = 0;
    let mut report = |name: &str, c: Check| match c {
        Ok(d) => println!("PASS {name}: {d}"),
        Err(d) => {
            failed += 1;
            println!("FAIL {name}: {d}");
        }
    };
    report("corpus checks, each script under 10 s", corpus());
    report("case on name/fresh atoms", name_fresh());

    let t = Instant::now();
    let s = sweep();
    let dt = t.elapsed();
    let counts = format!(
        "{} problems in {dt:?}: {} unifiable, {} not unifiable, {} indeterminate",
        s.total, s.unifiable, s.not_unifiable, s.indeterminate
    );
    let listed = |v: &[String]| v.iter().take(5).cloned().collect::<Vec<_>>().join("\n  ");
    report(
        "oracle sweep has no discrepancies",
        if s.total >= SWEEP_SIZE && s.other.is_empty() && s.not_equalizing.is_empty() {
            Ok(counts.clone())
        } else {
            Err(format!("{counts}\n  {}", listed(&s.other)))
        },
    );
    report(
        "every success unifier equalizes both sides",
        if s.not_equalizing.is_empty() {
            Ok(format!("{} unifiers checked", s.unifiable))
        } else {
            Err(listed(&s.not_equalizing))
        },
    );
    let pct = 100.0 * s.indeterminate as f64 / s.total as f64;
    report(
        "indeterminate below 5%",
        if pct < MAX_INDETERMINATE_PCT {
            Ok(format!("{pct:.2}%"))
        } else {
            Err(format!("{pct:.2}%"))
        },
    );
    report("extension shapes get most general unifiers", shapes());
    report("animation at depth 10 under 1 s", animation());
    report("mutations fail checking", mutations());
    report("undo is exact across the corpus", undo());
    report("print/parse round-trip across the corpus", round_trip());

    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
