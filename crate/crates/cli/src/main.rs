use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use nabla_core::frontend::{check_jobs, corpus_dir, is_complete, parse_commands, serve, FsLoader, Job, Runner, Server};

/// Interactive prover for λ-tree syntax with ∇ and nominal constants.
#[derive(Parser, Debug)]
#[command(name = "nabla", version, about)]
struct Cli {
    /// Theorem files to check in batch mode; omit for the interactive loop.
    files: Vec<PathBuf>,
    /// Preload the specification `<basename>.sig` / `<basename>.mod`.
    #[arg(long, value_name = "BASENAME")]
    spec: Option<PathBuf>,
    /// Speak the JSON session protocol on standard input/output.
    #[arg(long)]
    serve: bool,
    /// Report batch results as JSON.
    #[arg(long)]
    json_errors: bool,
}

fn search_dirs(file: Option<&Path>) -> Vec<PathBuf> {
    let mut dirs = Vec::new();
    if let Some(f) = file {
        dirs.push(f.parent().map(Path::to_path_buf).unwrap_or_default());
    }
    dirs.push(PathBuf::from("."));
    dirs.push(corpus_dir());
    dirs
}

fn read_spec(spec: &Path) -> Result<(String, String, String), String> {
    let name = spec
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .ok_or_else(|| format!("bad specification name {}", spec.display()))?;
    let dir = spec.parent().map(Path::to_path_buf).unwrap_or_default();
    let read = |ext: &str| {
        let p = dir.join(format!("{name}.{ext}"));
        std::fs::read_to_string(&p).map_err(|e| format!("{}: {e}", p.display()))
    };
    let (sig, md) = (read("sig")?, read("mod")?);
    Ok((name, sig, md))
}

fn runner_for(cli: &Cli) -> Result<Runner, String> {
    let mut runner = Runner::new(Box::new(FsLoader::new(search_dirs(None))));
    if let Some(spec) = &cli.spec {
        let (name, sig, md) = read_spec(spec)?;
        runner.load_spec_text(&name, &sig, &md)?;
    }
    Ok(runner)
}

fn batch(cli: &Cli) -> ExitCode {
    let preload = match cli.spec.as_deref().map(read_spec).transpose() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("nabla: {e}");
            return ExitCode::from(2);
        }
    };
    let mut jobs = Vec::new();
    for path in &cli.files {
        match Job::from_path(path, search_dirs(Some(path))) {
            Ok(mut job) => {
                job.file = path.display().to_string();
                job.preload = preload.clone();
                jobs.push(job);
            }
            Err(e) => {
                eprintln!("nabla: {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
    }
    let reports = check_jobs(&jobs);
    for r in &reports {
        if cli.json_errors {
            println!("{}", serde_json::to_string(r).unwrap());
        } else {
            print!("{}", r.render());
        }
    }
    let code = reports.iter().map(|r| r.exit_code).max().unwrap_or(0);
    ExitCode::from(code as u8)
}

fn repl(runner: &mut Runner) -> io::Result<()> {
    let stdin = io::stdin();
    let mut out = io::stdout();
    let mut buf = String::new();
    write!(out, "nabla> ")?;
    out.flush()?;
    for line in stdin.lock().lines() {
        buf.push_str(&line?);
        buf.push('\n');
        if !is_complete(&buf) {
            continue;
        }
        match parse_commands(&buf) {
            Err(e) => writeln!(out, "Error: {e}")?,
            Ok(cmds) => {
                for c in &cmds {
                    match runner.exec(c) {
                        Ok(r) => {
                            write!(out, "{}", r.output)?;
                            if r.quit {
                                return Ok(());
                            }
                        }
                        Err(e) => {
                            writeln!(out, "Error: {}", e.message)?;
                            break;
                        }
                    }
                }
            }
        }
        buf.clear();
        write!(out, "\nnabla> ")?;
        out.flush()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if !cli.files.is_empty() && !cli.serve {
        return batch(&cli);
    }
    let mut runner = match runner_for(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("nabla: {e}");
            return ExitCode::from(2);
        }
    };
    let result = if cli.serve {
        let mut server = Server::new(runner);
        let stdin = io::stdin();
        serve(&mut server, stdin.lock(), io::stdout())
    } else {
        repl(&mut runner)
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("nabla: {e}");
            ExitCode::from(2)
        }
    }
}
