//! Surface syntax: lexing, parsing, elaboration into core terms and
//! formulas, script execution and the JSON session protocol.

pub mod ast;
pub mod elab;
pub mod lexer;
pub mod parser;
pub mod protocol;
pub mod script;

pub use lexer::Span;
pub use parser::{parse_command, parse_commands, parse_formula, parse_mod, parse_sig, parse_term, ParseError};
pub use protocol::{serve, state_view, Server, StateView};
pub use script::{
    check_jobs, check_jobs_sequential, corpus_dir, corpus_jobs, corpus_runner, load_spec, run_script, run_source,
    FsLoader, Job, MemLoader, Report, RunMode, Runner, SpecLoader,
};

/// Whether `src` ends with a complete command (its last token is a period).
pub fn is_complete(src: &str) -> bool {
    match lexer::tokenize(src) {
        Ok(toks) => toks.len() >= 2 && toks[toks.len() - 2].tok == lexer::Tok::Dot,
        Err(_) => false,
    }
}
