use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::Arc;

use kanalg::corpus::{adjunction_instances, boolean_lattice, chain, cospan_category, filter_functor, finset_inclusion, random_set_functor, rng};
use kanalg::fincat::{finset_op, Functor, ObjectId};
use kanalg::theory::builtin;
use serde_json::{json, Value};

fn data() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data")
}

fn run(args: &[&str], envs: &[(&str, &str)]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_kanalg"))
        .args(args)
        .current_dir(data())
        .envs(envs.iter().copied())
        .output()
        .expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).unwrap(), String::from_utf8(out.stderr).unwrap())
}

fn parse(stdout: &str) -> Value {
    serde_json::from_str(stdout).expect("stdout is JSON")
}

fn manifest(kind: &str, key: &str, doc: Value) -> Value {
    json!({ "kind": kind, "version": 1, key: doc })
}

// every bundled file, built from the library
fn bundled() -> Vec<(String, Value)> {
    let mut out = Vec::new();
    let cat = |c: &kanalg::fincat::FinCategory| serde_json::to_value(c.to_doc()).unwrap();
    out.push(("chain3.category.json".into(), manifest("category", "category", cat(&chain(3)))));
    out.push(("cospan.category.json".into(), manifest("category", "category", cat(&cospan_category()))));
    // id . f rewritten to another endomorphism with the same endpoints
    let fs = finset_op(3).unwrap().category;
    let mut broken = fs.to_doc();
    let id = broken.identities["2"].clone();
    let endos: Vec<String> =
        broken.morphisms.iter().filter(|m| m.dom == "2" && m.cod == "2" && m.name != id).map(|m| m.name.clone()).collect();
    for t in broken.composition.iter_mut() {
        if t[0] == id && t[1] == endos[0] {
            t[2] = endos[1].clone();
        }
    }
    out.push(("broken-identity.category.json".into(), manifest("category", "category", serde_json::to_value(broken).unwrap())));

    let diamond = Arc::new(boolean_lattice(2));
    let fdoc = |f: &Functor| serde_json::to_value(f.to_doc()).unwrap();
    out.push(("diamond-identity.functor.json".into(), manifest("functor", "functor", fdoc(&Functor::identity(diamond.clone())))));
    out.push(("finset-2-3.functor.json".into(), manifest("functor", "functor", fdoc(&finset_inclusion(2, 3).unwrap()))));
    let cospan = Arc::new(cospan_category());
    out.push(("cospan-terminal.functor.json".into(), manifest("functor", "functor", fdoc(&Functor::to_terminal(cospan.clone())))));

    let sdoc = |p: &kanalg::setval::SetFunctor| serde_json::to_value(p.to_doc()).unwrap();
    let x = filter_functor(diamond.clone(), diamond.object("{0}").unwrap());
    out.push(("diamond-filter.set.json".into(), manifest("set_functor", "set_functor", sdoc(&x))));
    let mut r = rng(3);
    let p = random_set_functor(&mut r, cospan, 3);
    out.push(("cospan-random.set.json".into(), manifest("set_functor", "set_functor", sdoc(&p))));
    let top = filter_functor(diamond.clone(), ObjectId(0));
    out.push(("diamond-bottom-filter.set.json".into(), manifest("set_functor", "set_functor", sdoc(&top))));

    for name in ["pointed", "semilattice"] {
        let doc = serde_json::to_value(builtin(name, 3).unwrap().to_doc()).unwrap();
        out.push((format!("{name}3.clone.json"), manifest("clone", "clone", doc)));
    }
    for inst in adjunction_instances().unwrap() {
        let (code, stdout, _) = run(&["instance", &inst.name], &[]);
        assert_eq!(code, 0);
        out.push((format!("{}.instance.json", inst.name), parse(&stdout)));
    }
    out
}

fn canonical(v: &Value) -> String {
    serde_json::to_string_pretty(v).unwrap() + "\n"
}

#[test]
fn bundled_data_is_current() {
    let bless = std::env::var_os("KANALG_BLESS").is_some();
    for (name, value) in bundled() {
        let path = data().join(&name);
        if bless {
            std::fs::write(&path, canonical(&value)).unwrap();
            continue;
        }
        let text = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing {name}; rerun with KANALG_BLESS=1"));
        assert_eq!(text, canonical(&value), "{name} is stale");
    }
}

fn data_files() -> Vec<PathBuf> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(data())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    files.sort();
    files
}

#[test]
fn bundled_files_round_trip_and_validate() {
    let files = data_files();
    assert!(files.len() >= 10);
    for path in files {
        let text = std::fs::read_to_string(&path).unwrap();
        let once: Value = serde_json::from_str(&text).unwrap();
        let twice: Value = serde_json::from_str(&canonical(&once)).unwrap();
        assert_eq!(once, twice);
        let name = path.file_name().unwrap().to_str().unwrap();
        let (code, stdout, _) = run(&["validate", name], &[]);
        let expected = if name.starts_with("broken") { 2 } else { 0 };
        assert_eq!(code, expected, "{name}: {stdout}");
    }
}

#[test]
fn broken_identity_is_named() {
    let (code, stdout, _) = run(&["validate", "broken-identity.category.json"], &[]);
    assert_eq!(code, 2);
    let report = parse(&stdout);
    assert_eq!(report["valid"], json!(false));
    let laws: Vec<&str> = report["violations"].as_array().unwrap().iter().map(|v| v["law"].as_str().unwrap()).collect();
    assert!(laws.iter().any(|l| l.contains("identity")), "{laws:?}");
}

#[test]
fn free_trivial_rank_four() {
    let (code, stdout, _) = run(&["free", "--theory", "trivial", "--rank", "4", "--gens", "2"], &[]);
    assert_eq!(code, 0);
    let report = parse(&stdout);
    assert_eq!(report["sizes"], json!([1, 2, 4, 8]));
    let golden = std::fs::read_to_string(data().join("golden").join("free-trivial-4-2.txt")).unwrap();
    assert_eq!(stdout, golden);
}

#[test]
fn output_is_identical_across_thread_counts() {
    let args = ["free", "--theory", "semilattice", "--rank", "4", "--gens", "2"];
    let (_, one, _) = run(&args, &[("KANALG_THREADS", "1")]);
    let (_, four, _) = run(&args, &[("KANALG_THREADS", "4")]);
    let (_, again, _) = run(&args, &[]);
    assert_eq!(one, four);
    assert_eq!(one, again);
    let (code, _, _) = run(&args, &[("KANALG_THREADS", "zero")]);
    assert_eq!(code, 2);
}

#[test]
fn arity_overflow_has_its_own_exit_code() {
    let (code, stdout, _) = run(&["free", "--theory", "pointed", "--rank", "3", "--gens", "3"], &[]);
    assert_eq!(code, 3);
    assert!(parse(&stdout)["error"].as_str().unwrap().contains("arity"));
}

#[test]
fn theory_from_a_clone_file() {
    let (code, stdout, _) = run(&["free", "--theory", "pointed3.clone.json", "--rank", "3", "--gens", "1"], &[]);
    assert_eq!(code, 0);
    assert_eq!(parse(&stdout)["sizes"], json!([1, 2, 4]));
    let (code, _, _) = run(&["free", "--theory", "pointed3.clone.json", "--rank", "4", "--gens", "1"], &[]);
    assert_eq!(code, 2);
    let (code, stdout, _) = run(&["stability", "--theory", "semilattice3.clone.json", "--rank", "2", "--gens", "1"], &[]);
    assert_eq!(code, 0, "{stdout}");
}

#[test]
fn checks_on_bundled_instances() {
    for inst in adjunction_instances().unwrap() {
        let file = format!("{}.instance.json", inst.name);
        let (code, stdout, _) = run(&["check", "final", "--instance", &file], &[]);
        assert_eq!(code, 0, "{file}: {stdout}");
        let (code, stdout, _) = run(&["check", "adjunction", "--instance", &file], &[]);
        assert_eq!(code, 0, "{file}: {stdout}");
        assert_eq!(parse(&stdout)["adjunction"], json!(true));
    }
}

#[test]
fn checks_report_both_directions() {
    let (code, _, _) = run(&["check", "cofiltered", "--category", "chain3.category.json"], &[]);
    assert_eq!(code, 0);
    // a cospan with no cone over it is not weakly cofiltered
    let (code, stdout, _) = run(&["check", "cofiltered", "--category", "cospan.category.json"], &[]);
    assert_eq!(code, 1);
    assert!(parse(&stdout)["cospan"].is_object());
    let (code, _, _) = run(&["check", "final", "--functor", "diamond-identity.functor.json"], &[]);
    assert_eq!(code, 0);
    let (code, _, _) = run(&["check", "wpc", "--functor", "diamond-identity.functor.json"], &[]);
    assert_eq!(code, 0);
    let (code, _, _) = run(&["check", "cofiltered", "--functor", "finset-2-3.functor.json", "--at", "1"], &[]);
    assert_eq!(code, 0);
    let (code, _, _) = run(&["check", "products", "--x", "diamond-filter.set.json"], &[]);
    assert_eq!(code, 0);
    let (code, _, _) = run(&["check", "products", "--x", "cospan-random.set.json", "--f", "cospan-terminal.functor.json"], &[]);
    assert_eq!(code, 0);
}

#[test]
fn colimit_and_extension_reports() {
    let (code, stdout, _) = run(&["colim", "--functor", "diamond-filter.set.json"], &[]);
    assert_eq!(code, 0);
    assert_eq!(parse(&stdout)["num_classes"], json!(1));
    let (code, stdout, _) =
        run(&["lan", "--f", "diamond-identity.functor.json", "--x", "diamond-filter.set.json", "--at", "{0,1}"], &[]);
    assert_eq!(code, 0);
    assert_eq!(parse(&stdout)["classes"].as_array().unwrap().len(), 1);
    let (code, stdout, _) = run(&["lan", "--f", "cospan-terminal.functor.json", "--x", "cospan-random.set.json"], &[]);
    assert_eq!(code, 0);
    assert!(parse(&stdout)["extension"]["sets"].is_object());
    let (code, _, _) = run(&["lan", "--f", "diamond-identity.functor.json", "--x", "cospan-random.set.json"], &[]);
    assert_eq!(code, 2);
}

#[test]
fn oracle_and_stability_commands() {
    for theory in ["trivial", "pointed", "semilattice", "f2", "mset2", "mset-idem"] {
        let (code, stdout, _) = run(&["oracle-compare", "--theory", theory, "--rank", "4", "--gens", "2"], &[]);
        assert_eq!(code, 0, "{theory}: {stdout}");
        assert_eq!(parse(&stdout)["isomorphic"], json!(true));
    }
    let (code, _, _) = run(&["stability", "--theory", "f2", "--rank", "3", "--gens", "2"], &[]);
    assert_eq!(code, 0);
}

#[test]
fn malformed_input_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("extra.json");
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(data().join("chain3.category.json")).unwrap()).unwrap();
    v["category"]["colour"] = json!("red");
    std::fs::write(&path, v.to_string()).unwrap();
    let (code, _, _) = run(&["validate", path.to_str().unwrap()], &[]);
    assert_eq!(code, 2);
    v["category"].as_object_mut().unwrap().remove("colour");
    v["version"] = json!(7);
    std::fs::write(&path, v.to_string()).unwrap();
    let (code, _, _) = run(&["validate", path.to_str().unwrap()], &[]);
    assert_eq!(code, 2);
    let (code, _, _) = run(&["free", "--theory", "groups", "--rank", "3", "--gens", "1"], &[]);
    assert_eq!(code, 2);
    let (code, _, _) = run(&["frobnicate"], &[]);
    assert_eq!(code, 2);
}

#[test]
fn pretty_table_goes_to_stderr() {
    let args = ["free", "--theory", "trivial", "--rank", "3", "--gens", "1"];
    let (_, plain, quiet) = run(&args, &[]);
    let mut pretty_args = args.to_vec();
    pretty_args.push("--pretty");
    let (code, stdout, table) = run(&pretty_args, &[]);
    assert_eq!(code, 0);
    assert_eq!(plain, stdout);
    assert!(quiet.is_empty());
    assert!(table.contains("A^1") && table.contains("holds"), "{table}");
}
