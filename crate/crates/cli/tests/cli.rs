use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_curtainlab"))
        .args(args)
        .current_dir(dir)
        .env_remove("CURTAINLAB_BUDGET")
        .output()
        .unwrap()
}

fn doc(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| {
        panic!(
            "{e}: {}{}",
            String::from_utf8_lossy(&o.stdout),
            String::from_utf8_lossy(&o.stderr)
        )
    })
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn cube_distance() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["query", "q3", "dist", "000", "111"]);
    assert_eq!(code(&o), 0);
    let d = doc(&o);
    assert_eq!(d["result"], 3);
    assert_eq!(d["manifest"]["command"], "query dist");
    assert_eq!(d["manifest"]["seed"], 7);
}

#[test]
fn input_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        code(&run(dir.path(), &["query", "q3", "dist", "000", "121"])),
        2
    );
    assert_eq!(code(&run(dir.path(), &["query", "nonesuch", "product"])), 2);
    assert_eq!(code(&run(dir.path(), &["frobnicate"])), 2);

    std::fs::write(
        dir.path().join("bad.json"),
        "{\"vertices\": [\"a\", \"b\"],\n \"edges\": [[\"a\", \"b\"],]}\n",
    )
    .unwrap();
    let o = run(dir.path(), &["build", "--graph", "bad.json"]);
    assert_eq!(code(&o), 2);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("bad.json at line 2, column"), "{err}");

    // outside the guard of a RAAG window
    let o = run(
        dir.path(),
        &["--horizon", "6", "query", "tof", "dist", "e", "z^3"],
    );
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains('z'));
}

#[test]
fn build_a_graph_and_query_the_document() {
    let dir = tempfile::tempdir().unwrap();
    let input = r#"{"vertices": ["000","100","010","110","001","101","011","111"],
        "edges": [["000","100"],["000","010"],["000","001"],["100","110"],["100","101"],
                  ["010","110"],["010","011"],["001","101"],["001","011"],["110","111"],
                  ["101","111"],["011","111"]]}"#;
    std::fs::write(dir.path().join("q3.json"), input).unwrap();
    let o = run(dir.path(), &["build", "--graph", "q3.json", "--out", "out"]);
    assert_eq!(code(&o), 0);
    let r = &doc(&o)["result"];
    assert_eq!(
        (
            r["vertices"].as_u64(),
            r["walls"].as_u64(),
            r["guard"].as_u64()
        ),
        (Some(8), Some(3), Some(3))
    );

    let o = run(
        dir.path(),
        &["query", "out/complex.json", "walls", "000", "110"],
    );
    assert_eq!(doc(&o)["result"]["count"], 2);
    let o = run(
        dir.path(),
        &["query", "out/complex.json", "gate", "111", "000", "100"],
    );
    assert_eq!(doc(&o)["result"], "100");
    let o = run(
        dir.path(),
        &["query", "out/complex.json", "hull", "000", "110"],
    );
    assert_eq!(doc(&o)["result"]["size"], 4);
}

#[test]
fn tree_of_flats_build_writes_window_and_system() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("tof.json"),
        r#"{"generators": ["x", "y", "z"], "commuting_pairs": [["x", "y"]]}"#,
    )
    .unwrap();
    let o = run(
        dir.path(),
        &[
            "build",
            "--raag",
            "tof.json",
            "--horizon",
            "6",
            "--out",
            "w",
        ],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = &doc(&o)["result"];
    assert_eq!(r["guard"], 2);
    assert_eq!(r["system"]["kind"], "tree-of-flats");
    assert!(dir.path().join("w/system.json").is_file());

    let o = run(dir.path(), &["verify", "behrstock", "w/system.json"]);
    assert_eq!(code(&o), 0);
    assert!(doc(&o)["result"]["lambda"].as_u64().is_some());

    // x z x z⁻¹ skewers the wall of the edge e–x at the first power
    let o = run(
        dir.path(),
        &[
            "query",
            "w/complex.json",
            "curtain",
            "e",
            "x",
            "--wall",
            "--out",
            "c.json",
        ],
    );
    assert_eq!(code(&o), 0);
    let o = run(
        dir.path(),
        &[
            "query",
            "w/complex.json",
            "skewers",
            "--element",
            "x z x z^-1",
            "--curtain",
            "c.json",
        ],
    );
    assert_eq!(doc(&o)["result"]["m"], 1);
    let o = run(
        dir.path(),
        &[
            "query",
            "w/complex.json",
            "flips",
            "--element",
            "z",
            "--curtain",
            "c.json",
        ],
    );
    let r = &doc(&o)["result"];
    assert_eq!(
        (r["flips_plus"].as_bool(), r["flips_minus"].as_bool()),
        (Some(true), Some(false))
    );
}

#[test]
fn products_report_two_families() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["query", "f2xz", "product"]);
    let fams = doc(&o)["result"]["families"].as_array().unwrap().clone();
    assert_eq!(fams.len(), 2);
    let o = run(dir.path(), &["query", "f2", "product"]);
    assert!(doc(&o)["result"].is_null());
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "verify",
        "curtain-axioms",
        "f2",
        "--horizon",
        "6",
        "--random",
        "20",
        "--seed",
        "3",
    ];
    let (a, b) = (run(dir.path(), &args), run(dir.path(), &args));
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let c = run(
        dir.path(),
        &[
            "verify",
            "curtain-axioms",
            "f2",
            "--horizon",
            "6",
            "--random",
            "20",
            "--seed",
            "4",
        ],
    );
    assert_eq!(doc(&c)["result"]["checked"], 20);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn median_oracle_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        dir.path(),
        &[
            "verify",
            "median-oracle",
            "--random",
            "5",
            "--max-vertices",
            "60",
            "--seed",
            "7",
        ],
    );
    assert_eq!(code(&o), 0);
    let r = &doc(&o)["result"];
    assert_eq!(r["pass"], true);
    assert_eq!(r["graphs"], 5);
}

#[test]
fn broken_curtain_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        dir.path(),
        &[
            "--E", "1", "query", "path20", "curtain", "0", "19", "--out", "c.json",
        ],
    );
    assert_eq!(code(&o), 0);
    let mut d: Value = doc(&o);
    assert_eq!(d["result"]["axioms"]["covers"], true);
    let ok = run(
        dir.path(),
        &["verify", "curtain-axioms", "path20", "--curtain", "c.json"],
    );
    assert_eq!(code(&ok), 0);

    // move the far end of the plus side into the minus side
    let plus = d["result"]["curtain"]["plus"].as_array_mut().unwrap();
    let v = plus.pop().unwrap();
    d["result"]["curtain"]["minus"]
        .as_array_mut()
        .unwrap()
        .push(v);
    std::fs::write(
        dir.path().join("c.json"),
        serde_json::to_string(&d).unwrap(),
    )
    .unwrap();
    let o = run(
        dir.path(),
        &["verify", "curtain-axioms", "path20", "--curtain", "c.json"],
    );
    assert_eq!(code(&o), 1);
    assert_eq!(doc(&o)["result"]["failures"], 1);
}

#[test]
fn recipe_certificate_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        dir.path(),
        &[
            "--horizon",
            "10",
            "recipe",
            "f2",
            "--set",
            "a,b",
            "--out",
            "cert.json",
        ],
    );
    assert_eq!(code(&o), 0);
    assert_eq!(doc(&o)["result"]["certificate"]["element_w"], "a");
    let v = run(dir.path(), &["verify", "recipe-roundtrip", "cert.json"]);
    assert_eq!(code(&v), 0);
    assert_eq!(doc(&v)["result"]["pass"], true);

    let o = run(
        dir.path(),
        &["recipe", "z2", "--set", "a,b", "--out", "none.json"],
    );
    assert!(doc(&o)["result"]["certificate"].is_null());
    assert_eq!(
        code(&run(
            dir.path(),
            &["verify", "recipe-roundtrip", "none.json"]
        )),
        2
    );
}

#[test]
fn budget_caps_exit_with_three() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        code(&run(
            dir.path(),
            &["--budget", "100", "query", "tof", "dist", "e", "x"]
        )),
        3
    );
    let o = Command::new(env!("CARGO_BIN_EXE_curtainlab"))
        .args(["query", "tof", "dist", "e", "x"])
        .current_dir(dir.path())
        .env("CURTAINLAB_BUDGET", "100")
        .output()
        .unwrap();
    assert_eq!(code(&o), 3);
}
