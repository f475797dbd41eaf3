//! Newline-delimited JSON session protocol.
//!
//! Each request is `{"id": int, "method": string, "params": object}` and is
//! answered by `{"id", "result"}` or `{"id", "error": {"code", "message"}}`.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::ast::CommandKind;
use super::parser::{parse_command, parse_commands, parse_formula, parse_term};
use super::script::Runner;
use crate::metalogic::Restriction;
use crate::prover::Session;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypView {
    pub label: String,
    pub formula: String,
    pub annotation: Option<String>,
}

/// Serializable view of a session's current proof state.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateView {
    pub theorem: Option<String>,
    pub subgoals: usize,
    pub goal: Option<String>,
    pub hypotheses: Vec<HypView>,
    pub variables: Vec<String>,
    pub nominals: Vec<String>,
    pub text: String,
}

pub fn state_view(session: &Session) -> StateView {
    let ann = session.env().settings.print_annotations;
    let Some(p) = session.proof() else {
        return StateView::default();
    };
    let mut v = StateView {
        theorem: Some(p.name.clone()),
        subgoals: p.goals.len(),
        text: session.display(),
        ..Default::default()
    };
    if let Some(seq) = p.current() {
        let show = |f: &crate::metalogic::Formula| if ann { f.to_string() } else { f.strip().to_string() };
        v.goal = Some(show(&seq.goal));
        v.hypotheses = seq
            .hyps
            .iter()
            .map(|h| HypView {
                label: h.name.clone(),
                formula: show(&h.formula),
                annotation: match h.formula.restriction() {
                    Restriction::None => None,
                    r => Some(r.suffix()),
                },
            })
            .collect();
        v.variables = seq.vars().iter().map(|x| x.name.to_string()).collect();
        v.nominals = seq.nominals().keys().map(|n| format!("n{n}")).collect();
    }
    v
}

const PARSE_ERROR: i64 = -32700;
const INVALID_REQUEST: i64 = -32600;
const UNKNOWN_METHOD: i64 = -32601;
const INVALID_PARAMS: i64 = -32602;
const FAILED: i64 = 1;

struct RpcError(i64, String);

pub struct Server {
    pub runner: Runner,
}

fn str_param<'a>(params: &'a Value, key: &str) -> Result<&'a str, RpcError> {
    params
        .get(key)
        .and_then(Value::as_str)
        .ok_or_else(|| RpcError(INVALID_PARAMS, format!("missing string parameter \"{key}\"")))
}

impl Server {
    pub fn new(runner: Runner) -> Self {
        Server { runner }
    }

    fn state(&self) -> Value {
        serde_json::to_value(state_view(&self.runner.session)).unwrap()
    }

    /// Handles one request line and returns the response object.
    pub fn handle_line(&mut self, line: &str) -> Value {
        let req: Value = match serde_json::from_str(line) {
            Ok(v) => v,
            Err(e) => {
                return json!({"id": null, "error": {"code": PARSE_ERROR, "message": format!("malformed JSON: {e}")}})
            }
        };
        let id = match req.get("id") {
            Some(Value::Number(n)) if n.is_i64() => Value::Number(n.clone()),
            Some(Value::Null) | None => Value::Null,
            Some(_) => {
                return json!({"id": null, "error": {"code": INVALID_REQUEST, "message": "id must be an integer"}})
            }
        };
        let Some(method) = req.get("method").and_then(Value::as_str) else {
            return json!({"id": id, "error": {"code": INVALID_REQUEST, "message": "missing method"}});
        };
        let params = req.get("params").cloned().unwrap_or(json!({}));
        match self.dispatch(method, &params) {
            Ok(result) => json!({"id": id, "result": result}),
            Err(RpcError(code, message)) => json!({"id": id, "error": {"code": code, "message": message}}),
        }
    }

    fn dispatch(&mut self, method: &str, params: &Value) -> Result<Value, RpcError> {
        let fail = |e: String| RpcError(FAILED, e);
        match method {
            "load_spec" => {
                let name = str_param(params, "name")?;
                let n = match (
                    params.get("sig").and_then(Value::as_str),
                    params.get("mod").and_then(Value::as_str),
                ) {
                    (Some(s), Some(m)) => self.runner.load_spec_text(name, s, m),
                    _ => self.runner.load_spec_named(name),
                }
                .map_err(fail)?;
                Ok(json!({"spec": name, "clauses": n}))
            }
            "start_theorem" => {
                let name = str_param(params, "name")?;
                let text = str_param(params, "formula")?;
                let f = parse_formula(text).map_err(|e| fail(e.to_string()))?;
                let cmd = super::ast::Command {
                    kind: CommandKind::Theorem(name.to_string(), f),
                    span: Default::default(),
                };
                self.runner.exec(&cmd).map_err(|e| fail(e.message))?;
                Ok(json!({"state": self.state()}))
            }
            "tactic" => {
                let text = str_param(params, "text")?;
                let cmd = parse_command(text).map_err(|e| fail(e.to_string()))?;
                if !matches!(cmd.kind, CommandKind::Tactic(_)) {
                    return Err(fail(format!("not a tactic: {text}")));
                }
                if self.runner.session.proof().is_none() {
                    return Err(fail("no proof in progress".into()));
                }
                let r = self.runner.exec(&cmd).map_err(|e| fail(e.message))?;
                Ok(json!({"state": self.state(), "completed": r.completed, "output": r.output}))
            }
            "state" => Ok(json!({"state": self.state()})),
            "undo" => {
                self.runner.session.undo().map_err(|e| fail(e.to_string()))?;
                Ok(json!({"state": self.state()}))
            }
            "query" => {
                let text = str_param(params, "goal")?;
                let t = parse_term(text).map_err(|e| fail(e.to_string()))?;
                let r = self.runner.query(&t).map_err(|e| fail(e.to_string()))?;
                let bindings: serde_json::Map<String, Value> = r
                    .bindings
                    .iter()
                    .map(|(k, v)| (k.clone(), Value::String(v.clone())))
                    .collect();
                Ok(json!({"outcome": r.outcome, "bindings": bindings}))
            }
            "list_lemmas" => {
                let lemmas: Vec<Value> = self
                    .runner
                    .env()
                    .lemmas
                    .iter()
                    .map(|(n, f)| json!({"name": n, "formula": f.to_string()}))
                    .collect();
                Ok(json!({"lemmas": lemmas}))
            }
            "command" => {
                let text = str_param(params, "text")?;
                let cmds = parse_commands(text).map_err(|e| fail(e.to_string()))?;
                let mut outputs = Vec::new();
                for c in &cmds {
                    let r = self.runner.exec(c).map_err(|e| fail(e.message))?;
                    outputs.push(r.output);
                }
                Ok(json!({"outputs": outputs, "state": self.state()}))
            }
            _ => Err(RpcError(UNKNOWN_METHOD, format!("unknown method {method}"))),
        }
    }
}

/// Serves requests from `input` until end of input, strictly in order.
pub fn serve<R: BufRead, W: Write>(server: &mut Server, input: R, mut output: W) -> std::io::Result<()> {
    for line in input.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let resp = server.handle_line(&line);
        writeln!(output, "{resp}")?;
        output.flush()?;
    }
    Ok(())
}
