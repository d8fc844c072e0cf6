use std::path::PathBuf;
use std::process::{Command, Output};

use jsonschema::JSONSchema;
use serde_json::Value;

fn hb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hb"))
        .args(args)
        .env_remove("HB_GUARD_MAX")
        .output()
        .expect("hb runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn parse(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout));
    })
}

fn assert_schema(name: &str, value: &Value) {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("schemas").join(format!("{name}.schema.json"));
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let compiled = JSONSchema::compile(&schema).expect("schema compiles");
    let msgs: Vec<String> = match compiled.validate(value) {
        Ok(()) => return,
        Err(errors) => errors.map(|e| format!("{} at {}", e, e.instance_path)).collect(),
    };
    panic!("{name} schema rejects output: {msgs:?}");
}

/// Runs, expects exit 0, checks the schema and returns the JSON.
fn ok_json(schema: &str, args: &[&str]) -> Value {
    let out = hb(args);
    assert_eq!(code(&out), 0, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    let v = parse(&out);
    assert_schema(schema, &v);
    v
}

#[test]
fn subgroups_of_klein_with_class_filter() {
    let v = ok_json("subgroups", &["subgroups", "2", "2", "--class", "E1"]);
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0]["elements"], serde_json::json!([[0, 1, 0, 1], [1, 2, 1, 2]]));
    assert_eq!(rows[0]["class"], "E1");
}

#[test]
fn subgroup_blocks_partition_the_listing() {
    let all = ok_json("subgroups", &["subgroups", "6", "4"]);
    let cyc = ok_json("subgroups", &["subgroups", "6", "4", "--cyclic"]);
    let two = ok_json("subgroups", &["subgroups", "6", "4", "--two-gen"]);
    let idx = |v: &Value| v.as_array().unwrap().iter().map(|r| r["index"].as_u64().unwrap()).collect::<Vec<_>>();
    let mut joined = idx(&cyc);
    joined.extend(idx(&two));
    assert_eq!(joined, idx(&all));
    assert!(two.as_array().unwrap().iter().all(|r| r["generators"].as_array().unwrap().len() == 2));
}

#[test]
fn oracle_agrees() {
    let v = ok_json("subgroups-oracle", &["subgroups", "4", "4", "--oracle"]);
    assert_eq!(v["agree"], true);
    assert_eq!(v["counts"]["enumerated"], v["counts"]["oracle"]);
    assert_eq!(v["counts"]["duplicates"], 0);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&hb(&["subgroups", "3", "2"])), 2);
    assert_eq!(code(&hb(&["domain", "4", "4", "99"])), 2);
    assert_eq!(code(&hb(&["verify-all", "64", "64"])), 2);
    assert_eq!(code(&hb(&["subgroups", "2", "2", "--class", "E9"])), 2);
    assert_eq!(code(&hb(&["descriptor", "2", "2", "3", "2"])), 2);
    assert_eq!(code(&hb(&["nonsense"])), 2);
}

#[test]
fn guard_override_from_environment() {
    let run = |guard: &str| {
        Command::new(env!("CARGO_BIN_EXE_hb"))
            .args(["subgroups", "4", "4"])
            .env("HB_GUARD_MAX", guard)
            .output()
            .unwrap()
    };
    assert_eq!(code(&run("8")), 2);
    assert_eq!(code(&run("16")), 0);
    assert_eq!(code(&run("lots")), 2);
}

#[test]
fn domains() {
    let v = ok_json("domain", &["domain", "4", "4", "0", "--verify"]);
    assert_eq!(v["report"]["pass"], true);
    let v = ok_json("domain", &["domain", "2", "2", "0"]);
    assert_eq!(v["domain"]["pieces"], serde_json::json!([[[0, 1], [1, 1], [0, 1], [1, 1]]]));
    assert!(v.get("report").is_none());
}

fn first_index(n: &str, m: &str, class: &str) -> String {
    let v = ok_json("subgroups", &["subgroups", n, m, "--class", class]);
    v[0]["index"].to_string()
}

#[test]
fn witness_match_and_refusal() {
    let e1 = first_index("4", "4", "E1");
    let v = ok_json("witness", &["witness", "4", "4", &e1]);
    assert_eq!(v["match"], true);
    let v = ok_json("witness", &["witness", "4", "4", &e1, "--ambient-scale", "3"]);
    assert_eq!(v["match"], true);
    assert_eq!(v["grid"], serde_json::json!([48, 48]));
    let e2 = first_index("4", "4", "E2");
    let out = hb(&["witness", "4", "4", &e2]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("class"));
}

#[test]
fn characters_and_pretty_table() {
    let e1 = first_index("4", "4", "E1");
    let v = ok_json("characters", &["characters", "4", "4", &e1]);
    assert_eq!(v["orthogonal"], true);
    assert_eq!(v["rows"].as_array().unwrap().len(), v["elements"].as_array().unwrap().len());
    let out = hb(&["characters", "4", "4", &e1, "--pretty"]);
    assert_eq!(code(&out), 0);
    assert!(serde_json::from_slice::<Value>(&out.stdout).is_err());
    assert!(String::from_utf8_lossy(&out.stdout).contains("label"));
}

#[test]
fn induction_from_a_to_the_klein_group() {
    let a = first_index("2", "2", "E1");
    let d = first_index("2", "2", "E4");
    let v = ok_json("induce", &["induce", "2", "2", &a, &d, "1"]);
    assert_eq!(v["total"], 2);
    assert_eq!(v["pass"], true);
    assert_eq!(v["multiplicities"].as_array().unwrap().len(), 2);
    assert_eq!(code(&hb(&["induce", "2", "2", &d, &a, "0,0"])), 3);
    assert_eq!(code(&hb(&["induce", "2", "2", &a, &d, "7"])), 2);
}

#[test]
fn descriptors() {
    let a = first_index("2", "2", "E1");
    let v = ok_json("descriptor", &["descriptor", "2", "2", &a, "1"]);
    assert!(!v["orbit_note"].as_str().unwrap().is_empty());
    let b = first_index("2", "2", "E2");
    assert_eq!(code(&hb(&["descriptor", "2", "2", &b, "0"])), 3);
}

#[test]
fn verify_all_small_and_tampered() {
    let v = ok_json("verify-all", &["verify-all", "4", "2", "--trials", "5"]);
    assert_eq!(v["pass"], true);
    let out = hb(&["verify-all", "4", "2", "--trials", "5", "--tamper-gamma"]);
    assert_eq!(code(&out), 4);
    let v = parse(&out);
    assert_schema("verify-all", &v);
    assert_eq!(v["pass"], false);
    assert!(v["checks"]["invariants"]["passed"].as_u64() < v["checks"]["invariants"]["checked"].as_u64());
}

#[test]
fn repeated_runs_are_byte_identical() {
    for args in [&["subgroups", "6", "6"][..], &["characters", "4", "4", "12"], &["domain", "6", "4", "5", "--verify"]] {
        let (a, b) = (hb(args), hb(args));
        assert_eq!(code(&a), 0, "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn help_documents_index_order() {
    let out = hb(&["subgroups", "--help"]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("cyclic subgroups first"), "{text}");
}
