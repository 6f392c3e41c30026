mod common;

use common::s;
use otmlab::cli::run_cli;
use otmlab::problems::Poset;

struct Ran {
    code: i32,
    out: String,
    err: String,
}

fn cli(args: &[&str]) -> Ran {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run_cli(std::iter::once("otmlab").chain(args.iter().copied()), &mut out, &mut err);
    Ran {
        code,
        out: String::from_utf8(out).unwrap(),
        err: String::from_utf8(err).unwrap(),
    }
}

#[test]
fn run_copy_on_a_singleton() {
    let r = cli(&["run", "--program", "copy", "--input", "{{}}"]);
    assert_eq!(r.code, 0, "{}", r.err);
    assert_eq!(r.out, "[2]\n{{}}\n");
}

#[test]
fn run_on_a_raw_code() {
    let r = cli(&["run", "--program", "copy", "--code", "[2,5,6]"]);
    assert_eq!(r.code, 0, "{}", r.err);
    assert_eq!(r.out.lines().next(), Some("[2,5,6]"));
}

#[test]
fn run_with_an_oracle() {
    let r = cli(&["run", "--program", "oracle_roundtrip", "--input", "{{{}}}", "--oracle", "ac"]);
    assert_eq!(r.code, 0, "{}", r.err);
    let without = cli(&["run", "--program", "oracle_roundtrip", "--input", "{{{}}}"]);
    assert_eq!(without.code, 1);
    assert!(without.err.contains("error[otm-vm]"), "{}", without.err);
}

#[test]
fn asm_prints_the_canonical_form() {
    let a = cli(&["asm", "flipflop"]);
    assert_eq!(a.code, 0);
    let path = std::env::temp_dir().join(format!("otmlab-cli-{}.otm", std::process::id()));
    std::fs::write(&path, &a.out).unwrap();
    let b = cli(&["asm", path.to_str().unwrap()]);
    std::fs::write(&path, "#halt 1\n0 0 0 0 -> 1 0 0 Q S S 1\n").unwrap();
    let bad = cli(&["asm", path.to_str().unwrap()]);
    std::fs::remove_file(&path).unwrap();
    assert_eq!(b.out, a.out);
    assert_eq!(bad.code, 2);
    assert!(bad.err.contains("error[asm]") && bad.err.contains(":2:"), "{}", bad.err);
}

#[test]
fn reduce_a_chain_to_its_top() {
    let chain = Poset::build(&s("{{},{{}},{{{}}}}"), &[(0, 1), (1, 2), (0, 2)]);
    let top = Poset::from_set(&chain).unwrap().items()[2].clone();
    for policy in ["canonical", "adversarial"] {
        let r = cli(&["reduce", "--witness", "zl_from_wo", "--input", &chain.to_literal(), "--policy", policy]);
        assert_eq!(r.code, 0, "{}", r.err);
        assert_eq!(r.out.trim(), top.to_literal());
    }
}

#[test]
fn reduce_rejects_instances_outside_the_domain() {
    let r = cli(&["reduce", "--witness", "acp_from_ac", "--input", "{{}}"]);
    assert_ne!(r.code, 0);
    assert!(!r.err.is_empty());
}

#[test]
fn verify_passes_and_prints_json_lines() {
    let r = cli(&["verify", "--witness", "acp_from_ac", "--max-rank", "2", "--seeds", "3"]);
    assert_eq!(r.code, 0, "{}", r.err);
    let lines: Vec<serde_json::Value> = r.out.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines[0]["seeds"], serde_json::json!([1, 2, 3]));
    assert_eq!(lines.len() - 1, lines[0]["instances"].as_u64().unwrap() as usize);
}

#[test]
fn verify_composed_witnesses() {
    let r = cli(&["verify", "--witness", "acp_from_ac+ac_from_zl", "--max-rank", "2", "--max-carrier", "3"]);
    assert_eq!(r.code, 0, "{}", r.err);
    let bad = cli(&["verify", "--witness", "acp_from_ac+zl_from_wo"]);
    assert_ne!(bad.code, 0);
}

#[test]
fn output_is_deterministic() {
    let args = ["verify", "--witness", "ac_from_zl", "--max-rank", "2", "--max-carrier", "3"];
    let a = cli(&[&args[..], &["--jobs", "4"]].concat());
    let b = cli(&[&args[..], &["--jobs", "4"]].concat());
    let serial = cli(&[&args[..], &["--jobs", "1"]].concat());
    assert_eq!(a.code, 0);
    assert_eq!(a.out, b.out);
    assert_eq!(a.out, serial.out);
    let run = ["run", "--program", "rightmarch", "--input", "{}", "--trace", "--max-limits", "3"];
    assert_eq!(cli(&run).out, cli(&run).out);
}

#[test]
fn tracing_does_not_change_the_outcome() {
    for (prog, input) in [("copy", "{{},{{}}}"), ("rightmarch", "{}"), ("flipflop", "{}")] {
        let quiet = cli(&["run", "--program", prog, "--input", input, "--max-limits", "2"]);
        let loud = cli(&["run", "--program", prog, "--input", input, "--max-limits", "2", "--trace"]);
        assert_eq!(quiet.code, loud.code, "{prog}");
        assert_eq!(quiet.err, loud.err, "{prog}");
        assert!(loud.out.ends_with(&quiet.out), "{prog}");
        let trace_lines = loud.out.lines().count() - quiet.out.lines().count();
        assert!(trace_lines > 0);
        for line in loud.out.lines().take(trace_lines) {
            let v: serde_json::Value = serde_json::from_str(line).unwrap();
            assert!(v["event"].is_string());
        }
    }
}

#[test]
fn gen_lists_one_instance_per_line() {
    let r = cli(&["gen", "--problem", "acp", "--max-rank", "2", "--max-carrier", "2"]);
    assert_eq!(r.code, 0);
    for line in r.out.lines() {
        let x: otmlab::SetValue = line.parse().unwrap();
        assert!(otmlab::problems::Problem::AcPrime.in_domain(&x));
    }
}

#[test]
fn exit_codes() {
    assert_eq!(cli(&["frobnicate"]).code, 2);
    assert_eq!(cli(&["run", "--program", "copy"]).code, 2);
    assert_eq!(cli(&["run", "--program", "copy", "--input", "{{}"]).code, 2);
    assert_eq!(cli(&["run", "--program", "no_such_program", "--input", "{}"]).code, 2);
    assert_eq!(cli(&["reduce", "--witness", "nope", "--input", "{}"]).code, 2);
    assert_eq!(cli(&["verify", "--witness", "ac_from_acp", "--max-rank", "4"]).code, 2);
    // fuel runs out on a program that never halts
    assert_eq!(cli(&["run", "--program", "rightmarch", "--input", "{}"]).code, 1);
    assert_eq!(cli(&["--help"]).code, 0);
}
