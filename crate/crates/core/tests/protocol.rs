use nabla_core::frontend::ast::CommandKind;
use nabla_core::frontend::{corpus_dir, corpus_jobs, parse_commands, serve, state_view, FsLoader, Runner, Server};
use serde_json::{json, Value};

fn server() -> Server {
    Server::new(Runner::new(Box::new(FsLoader::new(vec![corpus_dir()]))))
}

fn call(s: &mut Server, id: i64, method: &str, params: Value) -> Value {
    let req = json!({"id": id, "method": method, "params": params}).to_string();
    let resp = s.handle_line(&req);
    assert_eq!(resp["id"], json!(id), "{resp}");
    resp
}

fn ok(s: &mut Server, id: i64, method: &str, params: Value) -> Value {
    let resp = call(s, id, method, params);
    assert!(resp.get("error").is_none(), "{method}: {resp}");
    resp["result"].clone()
}

#[test]
fn malformed_json_answers_with_null_id() {
    let mut s = server();
    let r = s.handle_line("{\"id\": 3, \"method\": ");
    assert_eq!(r["id"], Value::Null);
    assert!(r["error"]["message"].as_str().unwrap().contains("malformed"));
}

#[test]
fn unknown_method_is_an_error() {
    let mut s = server();
    let r = call(&mut s, 4, "frobnicate", json!({}));
    assert!(r["error"]["message"].as_str().unwrap().contains("unknown method"));
}

#[test]
fn tactic_without_theorem() {
    let mut s = server();
    let r = call(&mut s, 1, "tactic", json!({"text": "intros."}));
    assert_eq!(r["error"]["message"], "no proof in progress");
}

#[test]
fn state_after_start_theorem() {
    let mut s = server();
    ok(&mut s, 1, "load_spec", json!({"name": "lambda"}));
    let stmt = "forall E V1 V2, {eval E V1} -> {eval E V2} -> V1 = V2";
    ok(&mut s, 2, "start_theorem", json!({"name": "eval_det", "formula": stmt}));
    let st = ok(&mut s, 3, "state", json!({}))["state"].clone();
    assert_eq!(st["goal"], stmt);
    assert_eq!(st["hypotheses"], json!([]));
    assert_eq!(st["subgoals"], 1);

    let r = ok(&mut s, 4, "tactic", json!({"text": "intros."}));
    let hyps = r["state"]["hypotheses"].as_array().unwrap();
    assert_eq!(hyps.len(), 2);
    assert_eq!(hyps[0]["label"], "H1");
    let r = ok(&mut s, 5, "undo", json!({}));
    assert_eq!(r["state"]["goal"], stmt);
}

#[test]
fn annotations_and_nominals_are_reported() {
    let mut s = server();
    ok(&mut s, 1, "load_spec", json!({"name": "lambda"}));
    ok(
        &mut s,
        2,
        "start_theorem",
        json!({"name": "t", "formula": "forall E V, {eval E V} -> {eval E V}"}),
    );
    ok(&mut s, 3, "tactic", json!({"text": "induction on 1."}));
    let st = ok(&mut s, 4, "tactic", json!({"text": "intros."}))["state"].clone();
    assert_eq!(st["hypotheses"][1]["annotation"], "@");
    ok(&mut s, 5, "command", json!({"text": "abort."}));

    ok(
        &mut s,
        6,
        "start_theorem",
        json!({"name": "u", "formula": "nabla x, {value (abs y\\ x)} -> false"}),
    );
    let st = ok(&mut s, 7, "tactic", json!({"text": "intros."}))["state"].clone();
    assert_eq!(st["nominals"], json!(["n1"]));
}

#[test]
fn query_and_lemmas() {
    let mut s = server();
    ok(&mut s, 1, "load_spec", json!({"name": "stlc"}));
    let r = ok(
        &mut s,
        2,
        "query",
        json!({"goal": "of (abs (arr i i) (f\\ abs i (x\\ app f x))) T"}),
    );
    assert_eq!(r["outcome"], "success");
    assert_eq!(r["bindings"]["T"], "arr (arr i i) (arr i i)");
    let r = ok(
        &mut s,
        3,
        "query",
        json!({"goal": "of (app (abs i (x\\ x)) (abs i (x\\ x))) T"}),
    );
    assert_eq!(r["outcome"], "failure");
    assert_eq!(ok(&mut s, 4, "list_lemmas", json!({}))["lemmas"], json!([]));
}

/// Drives every corpus script through the protocol, one request per command,
/// and through a runner directly, comparing serialized states throughout.
#[test]
fn protocol_matches_repl_on_corpus() {
    for job in corpus_jobs().unwrap() {
        let mut repl = Runner::new(Box::new(FsLoader::new(vec![corpus_dir()])));
        let mut s = server();
        for (i, cmd) in parse_commands(&job.src).unwrap().into_iter().enumerate() {
            repl.exec(&cmd).unwrap();
            let id = i as i64;
            let resp = match &cmd.kind {
                CommandKind::Specification(name) => ok(&mut s, id, "load_spec", json!({"name": name})),
                CommandKind::Theorem(name, f) => ok(
                    &mut s,
                    id,
                    "start_theorem",
                    json!({"name": name, "formula": f.to_string()}),
                ),
                CommandKind::Tactic(_) => ok(&mut s, id, "tactic", json!({"text": cmd.to_string()})),
                _ => ok(&mut s, id, "command", json!({"text": cmd.to_string()})),
            };
            let want = serde_json::to_value(state_view(&repl.session)).unwrap();
            if let Some(st) = resp.get("state") {
                assert_eq!(st, &want, "{}: {cmd}", job.file);
            }
            assert_eq!(ok(&mut s, -1, "state", json!({}))["state"], want);
        }
        let lemmas = ok(&mut s, -2, "list_lemmas", json!({}))["lemmas"]
            .as_array()
            .unwrap()
            .len();
        assert_eq!(lemmas, repl.env().lemmas.len());
    }
}

#[test]
fn serve_answers_in_order() {
    let mut s = server();
    let input = [
        json!({"id": 1, "method": "load_spec", "params": {"name": "lambda"}}).to_string(),
        String::new(),
        "not json".to_string(),
        json!({"id": 2, "method": "list_lemmas"}).to_string(),
    ]
    .join("\n");
    let mut out = Vec::new();
    serve(&mut s, input.as_bytes(), &mut out).unwrap();
    let lines: Vec<Value> = String::from_utf8(out)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[0]["id"], 1);
    assert_eq!(lines[1]["id"], Value::Null);
    assert_eq!(lines[2]["id"], 2);
}
