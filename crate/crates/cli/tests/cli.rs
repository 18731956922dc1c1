use std::process::{Command, Output};

fn kldihedral(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kldihedral")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

#[test]
fn klmult_examples() {
    assert_eq!(stdout(&kldihedral(&["klmult", "--n", "4", "t", "st"])), "tst + t\n");
    assert_eq!(stdout(&kldihedral(&["klmult", "--n", "4", "s", "w0"])), "2·w0\n");
    let json = stdout(&kldihedral(&["klmult", "--n", "4", "t", "st", "--format", "json"]));
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["coeffs"]["tst"], 1);
    assert_eq!(v["basis"], "KL");
}

#[test]
fn parse_errors_exit_2_with_position() {
    let out = kldihedral(&["klmult", "--n", "4", "s", "sxt"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("position 1"));
    assert_eq!(code(&kldihedral(&["cells", "--n", "2"])), 2);
    assert_eq!(code(&kldihedral(&["cellrep", "--n", "4", "--cell", "Lq"])), 2);
    assert_eq!(code(&kldihedral(&["frobnicate"])), 2);
    assert_eq!(code(&kldihedral(&["klmult", "--n", "4", "s", "t", "--format", "dot"])), 2);
}

#[test]
fn cells_outputs() {
    let out = kldihedral(&["cells", "--n", "4", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let left = v["left_cells"].as_object().unwrap();
    assert_eq!(left.len(), 4);
    assert_eq!(v["left_cells"]["Le"], serde_json::json!(["e"]));
    assert_eq!(v["j_order"], serde_json::json!(["J1", "J2", "J3"]));

    let dot = stdout(&kldihedral(&["cells", "--n", "3", "--format", "dot"]));
    assert!(dot.starts_with("digraph"));
    assert!(dot.trim_end().ends_with('}'));
    assert_eq!(dot.matches('{').count(), dot.matches('}').count());
}

#[test]
fn cellrep_examples() {
    let text = stdout(&kldihedral(&["cellrep", "--n", "4", "--cell", "Ls"]));
    assert!(text.contains("basis (s, sts, ts)"));
    assert!(text.contains("[2 0 1]"));
    assert!(text.contains("decomposition: V(1,-1) ⊕ V(4,1)"));
    let le = stdout(&kldihedral(&["cellrep", "--n", "4", "--cell", "Le"]));
    assert!(le.contains("decomposition: V(-1,-1)"));
    let json = stdout(&kldihedral(&["cellrep", "--n", "5", "--cell", "Lw0", "--format", "json"]));
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["matrices"]["s"], serde_json::json!([[2]]));
    assert_eq!(v["matrices"]["t"], serde_json::json!([[2]]));
    assert_eq!(v["decomposition"], serde_json::json!({"V(1,1)": 1}));
    let all = stdout(&kldihedral(&["cellrep", "--n", "4", "--cell", "Ls", "--all", "--format", "json"]));
    let v: serde_json::Value = serde_json::from_str(&all).unwrap();
    assert_eq!(v["matrices"]["w0"], serde_json::json!([[0, 0, 0], [0, 0, 0], [0, 0, 0]]));
}

#[test]
fn decompose_file_and_stdin() {
    let dir = std::env::temp_dir().join(format!("kldihedral-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("pair.json");
    std::fs::write(
        &path,
        r#"{"n":4,"rank":3,"theta_s":[[2,0,1],[0,2,1],[0,0,0]],"theta_t":[[0,0,0],[0,0,0],[1,1,2]]}"#,
    )
    .unwrap();
    let p = path.to_str().unwrap();
    assert_eq!(stdout(&kldihedral(&["decompose", "--n", "4", p])), "V(1,-1) ⊕ V(4,1)\n");
    let json = stdout(&kldihedral(&["decompose", "--n", "4", p, "--format", "json"]));
    assert_eq!(serde_json::from_str::<serde_json::Value>(&json).unwrap(), serde_json::json!({"V(1,-1)":1,"V(4,1)":1}));
    assert_eq!(code(&kldihedral(&["decompose", "--n", "5", p])), 1);

    std::fs::write(&path, r#"{"n":4,"rank":3,"theta_s":[[2,0,1],"#).unwrap();
    let out = kldihedral(&["decompose", "--n", "4", p]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("position"));

    std::fs::write(&path, r#"{"n":4,"rank":1,"theta_s":[[1]],"theta_t":[[1]]}"#).unwrap();
    assert_eq!(code(&kldihedral(&["decompose", p])), 1);

    use std::io::Write;
    let mut child = Command::new(env!("CARGO_BIN_EXE_kldihedral"))
        .args(["decompose", "-"])
        .stdin(std::process::Stdio::piped())
        .stdout(std::process::Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(br#"{"n":4,"rank":2,"theta_s":[[2,2],[0,0]],"theta_t":[[0,0],[1,2]]}"#)
        .unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(stdout(&out), "V(4,1)\n");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn classify_summaries() {
    let out = kldihedral(&["classify", "--n", "4", "--ranks", "1,2,3", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let counts: Vec<usize> = v["sections"].as_array().unwrap().iter().map(|s| s["candidates"].as_array().unwrap().len()).collect();
    assert_eq!(counts, [2, 1, 1]);
    assert_eq!(v["sections"][1]["candidates"][0]["tag"]["citation"], "Thm. noSimple");
    assert_eq!(v["sections"][2]["candidates"][0]["tag"]["kind"], "REALIZED_CELL");

    let five = stdout(&kldihedral(&["classify", "--n", "5", "--ranks", "2"]));
    assert!(five.contains("0 candidate(s)"));

    let no_f7 = stdout(&kldihedral(&["classify", "--n", "4", "--ranks", "2", "--no-filter", "F7"]));
    assert!(no_f7.contains("[[1, 1], [1, 1]]  [[1, 1], [1, 1]]"));
    assert_eq!(code(&kldihedral(&["classify", "--n", "4", "--no-filter", "F5"])), 2);
    assert_eq!(code(&kldihedral(&["classify", "--n", "4", "--no-filter", "F9"])), 2);
    assert_eq!(code(&kldihedral(&["classify", "--n", "4", "--ranks", "7"])), 2);
}

#[test]
fn classify_guard_exit_3() {
    let out = kldihedral(&["classify", "--n", "4", "--ranks", "3", "--max-states", "10"]);
    assert_eq!(code(&out), 3);
    assert!(stdout(&out).contains("RESOURCE GUARD TRIPPED"));
}

#[test]
fn classify_is_byte_identical_across_jobs() {
    let one = kldihedral(&["classify", "--n", "6", "--ranks", "1,2,3", "--jobs", "1", "--format", "json"]);
    let many = Command::new(env!("CARGO_BIN_EXE_kldihedral"))
        .args(["classify", "--n", "6", "--ranks", "1,2,3", "--format", "json"])
        .env("KLDIHEDRAL_JOBS", "8")
        .output()
        .unwrap();
    assert_eq!(code(&one), 0);
    assert_eq!(one.stdout, many.stdout);
}

#[test]
fn knowledge_override_and_output_file() {
    let dir = std::env::temp_dir().join(format!("kldihedral-know-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let table = dir.join("k.json");
    std::fs::write(
        &table,
        r#"{"version":2,"entries":[{"id":"x","n":"n ≡ 0 mod 2","theta_s":[[2,2],[0,0]],"theta_t":[[0,0],[1,2]],"status":"MATRIX_ADMISSIBLE_UNREALIZED","citation":"local note"}]}"#,
    )
    .unwrap();
    let report = dir.join("report.txt");
    let out = kldihedral(&[
        "classify", "--n", "4", "--ranks", "2", "--knowledge", table.to_str().unwrap(), "-o", report.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    assert!(std::fs::read_to_string(&report).unwrap().contains("MATRIX_ADMISSIBLE_UNREALIZED(local note)"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn verify_suites() {
    let out = kldihedral(&["verify", "--suite", "quick"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let text = stdout(&out);
    for i in 1..=12 {
        assert!(text.contains(&format!("A{i} PASS")), "{text}");
    }
    let out = kldihedral(&["verify", "--suite", "paper", "--only", "A6", "--expect-annihilator", "0,-4,10,-6,2"]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("A6 FAIL"));
    let json = stdout(&kldihedral(&["verify", "--suite", "quick", "--only", "A3", "--format", "json"]));
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["checks"][0]["id"], "A3");
    assert_eq!(code(&kldihedral(&["verify", "--only", "A99"])), 2);
}
