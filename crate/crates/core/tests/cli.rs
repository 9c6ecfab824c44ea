use std::path::PathBuf;
use std::process::{Command, Output};

const EXAMPLE: &str = r#"{"field":"Q","space":{"diagonal":[["-1","1"],["-1","-1"]]},"degree":5,"task":"rank"}"#;

const SL2: &str = r#"{"space":{"flip":3},"degree":4,"task":"envelope","bracket":{"kind":"classical","constants":[
    [["0","0","0"],["0","0","1"],["-2","0","0"]],
    [["0","0","-1"],["0","0","0"],["0","2","0"]],
    [["2","0","0"],["0","-2","0"],["0","0","0"]]]}}"#;

fn write_config(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("braidtower-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn braidtower(config: &PathBuf, extra: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_braidtower"));
    cmd.arg("--config").arg(config).args(extra);
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn rank_prints_the_truncation_qualifier() {
    let cfg = write_config("rank.json", EXAMPLE);
    let out = braidtower(&cfg, &[], &[]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("combinatorial rank 2 (at truncation 5)"), "{}", stdout(&out));
}

#[test]
fn nichols_task_prints_dims_basis_and_relations() {
    let cfg = write_config("nichols.json", EXAMPLE);
    let out = braidtower(&cfg, &["--task", "nichols"], &[]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("graded dims: (1,2,2,2,1,0)"), "{text}");
    assert!(text.contains("total dimension 8"), "{text}");
    for w in ["x2.x1.x2.x1", "x1.x2.x1", "x2.x1.x2"] {
        assert!(text.lines().any(|l| l.trim() == w), "basis word {w} missing:\n{text}");
    }
    assert!(text.contains("x1.x2.x1.x2 + x2.x1.x2.x1"), "{text}");
}

#[test]
fn check_on_flip_passes() {
    let cfg = write_config("check.json", r#"{"space":{"flip":2},"degree":4,"task":"check"}"#);
    let out = braidtower(&cfg, &[], &[]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(!stdout(&out).contains("FAIL"));
}

#[test]
fn json_report_is_schema_stable() {
    let cfg = write_config("json.json", EXAMPLE);
    let out = braidtower(&cfg, &["--json", "--degree", "4"], &[]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    for key in ["task", "field", "degree", "config", "summary", "tables", "listings", "stages", "verdicts"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["degree"], 4);
    assert_eq!(v["config"]["degree"], 4);
    assert_eq!(v["task"], "rank");
}

#[test]
fn exit_codes() {
    let sl2 = write_config("sl2.json", SL2);
    assert_eq!(braidtower(&sl2, &[], &[]).status.code(), Some(0));
    let perturbed = write_config(
        "perturbed.json",
        &SL2.replace(r#"["-2","0","0"]"#, r#"["-3","0","0"]"#).replace(r#"[["2","0","0"]"#, r#"[["3","0","0"]"#),
    );
    let out = braidtower(&perturbed, &[], &[]);
    assert_eq!(out.status.code(), Some(1), "{}", stdout(&out));
    assert!(stdout(&out).contains("FAIL"));

    let unknown = write_config("unknown.json", r#"{"space":{"flip":2},"task":"check","extra":1}"#);
    assert_eq!(braidtower(&unknown, &[], &[]).status.code(), Some(2));
    let zero = write_config("zero.json", r#"{"space":{"diagonal":[["0"]]},"task":"check"}"#);
    let out = braidtower(&zero, &[], &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("invalid braiding"));
    assert_eq!(braidtower(&PathBuf::from("/nonexistent/job.json"), &[], &[]).status.code(), Some(2));

    // The example needs two steps; a one-stage cap cannot reach stabilization.
    let cfg = write_config("cap.json", EXAMPLE);
    assert_eq!(braidtower(&cfg, &[], &[("BRAIDTOWER_MAX_STAGES", "1")]).status.code(), Some(3));
}

#[test]
fn reconstruct_and_oracle_tasks() {
    let cfg = write_config(
        "reconstruct.json",
        r#"{"space":{"diagonal":[["-1","1"],["-1","-1"]]},"task":"reconstruct","bracket":{"kind":"trivial"}}"#,
    );
    let out = braidtower(&cfg, &[], &[]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(stdout(&out).contains("dim P(A) = 2, dim U(P(A)) = 8, rank φ = 8"), "{}", stdout(&out));
    let sl2 = write_config("sl2-oracle.json", SL2);
    let out = braidtower(&sl2, &["--task", "oracle-compare"], &[]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(stdout(&out).contains("PBW filtered dims: (1,4,10,20,35)"));
}
