use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_unramified"));
    c.env_remove("UNRAMIFIED_CACHE_DIR");
    c
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn run_stdin(args: &[&str], input: &str) -> Output {
    let mut child = bin()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    // the child may exit before reading its input
    let _ = child.stdin.take().unwrap().write_all(input.as_bytes());
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn status_of(o: &Output) -> String {
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    v["verdict"]["status"].as_str().unwrap().to_string()
}

#[test]
fn bern_examples() {
    let o = run(&["bern", "7"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "2\t6\n4\t3\n");
    assert_eq!(stdout(&run(&["bern", "1217", "--k", "784"])), "784\t0\n");
    let o = run(&["bern", "9", "--k", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("not an odd prime"), "{}", stderr(&o));
    for m in ["naive", "voronoi", "fast", "series"] {
        assert_eq!(
            stdout(&run(&["bern", "157", "--method", m, "--k", "110"])),
            "110\t0\n"
        );
    }
}

#[test]
fn irregular_examples() {
    assert_eq!(stdout(&run(&["irregular", "--max-p", "40"])), "37\t32\n");
    assert_eq!(stdout(&run(&["irregular", "--max-p", "8"])), "");
    let out = stdout(&run(&["irregular", "--max-p", "1300", "--jobs", "2"]));
    assert!(out.lines().any(|l| l == "1217\t784,866,1118"), "{out}");
    assert!(out.lines().any(|l| l == "157\t62,110"));
}

#[test]
fn congruence_sweep_examples() {
    let o = run(&["congruence-sweep", "--max-p", "100"]);
    assert_eq!((o.status.code(), stdout(&o)), (Some(0), String::new()));
    let o = run(&[
        "congruence-sweep",
        "--max-p",
        "100",
        "--inject",
        "37:2,4,18,20",
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(
        stdout(&o),
        "37\tsum-two\t18,20\n37\tcollision\t2,20\t4,18\n"
    );
}

#[test]
fn criteria_examples() {
    let exc = fixture("exceptional.tsv");
    let exc = exc.to_str().unwrap();
    for p in ["1217", "7069", "9829"] {
        let o = run(&["criteria", "gk", p, "--pairing", exc]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        assert_eq!(status_of(&o), "FAILS");
    }
    assert_eq!(
        status_of(&run(&["criteria", "gk", "11", "--pairing", "/dev/null"])),
        "HOLDS"
    );
    let full = fixture("synth_full_37.tsv");
    let o = run(&[
        "criteria",
        "height",
        "37",
        "--pairing",
        full.to_str().unwrap(),
    ]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["bound_exact"], 19);
    let o = run(&[
        "criteria",
        "height",
        "37",
        "--pairing",
        full.to_str().unwrap(),
        "--format",
        "tsv",
    ]);
    assert!(stdout(&o).lines().any(|l| l == "bound_exact\t19"));
    let o = run(&[
        "criteria",
        "greenberg",
        "37",
        "--pairing",
        full.to_str().unwrap(),
    ]);
    assert_eq!(status_of(&o), "HOLDS");
}

#[test]
fn surjectivity_and_hypothesis_overrides() {
    let table = "B 1217 784 866 3\nB 1217 784 1118 1\nB 1217 866 1118 1\n";
    let args = ["criteria", "gk", "1217", "--pairing", "-"];
    assert_eq!(status_of(&run_stdin(&args, table)), "CONDITIONAL");
    let yes = [&args[..], &["--surjective", "yes"]].concat();
    assert_eq!(status_of(&run_stdin(&yes, table)), "HOLDS");
    let no_v = [&yes[..], &["--vandiver", "unknown"]].concat();
    assert_eq!(status_of(&run_stdin(&no_v, table)), "CONDITIONAL");
    let o = run_stdin(&[&args[..], &["--vandiver", "maybe"]].concat(), table);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn data_errors_exit_two() {
    let args = ["criteria", "gk", "157", "--pairing", "-"];
    let cases = [
        ("B 157 62 64 1\n", "outside the irregular set"),
        ("B 157 62 110 157\n", "not reduced"),
        ("# ok\nB 157 62 110\n", "line 2"),
        ("E 157 4 62 1\n", "E(4,62)"),
        ("B 157 62 110 0\nE 157 95 110 3\n", "nonzero"),
    ];
    for (input, needle) in cases {
        let o = run_stdin(&args, input);
        assert_eq!(o.status.code(), Some(2), "{input:?}");
        assert!(stderr(&o).contains(needle), "{input:?}: {}", stderr(&o));
    }
    assert_eq!(
        run(&["criteria", "gk", "157", "--pairing", "/nonexistent"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["criteria", "gk", "158", "--pairing", "/dev/null"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["criteria", "frob", "157", "--pairing", "/dev/null"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(&["report", "--max-p", "100"]).status.code(), Some(2));
    // lines for other primes only need to be well formed
    let o = run_stdin(&args, "B 1217 784 866 0\n");
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn cache_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let first = run(&["irregular", "--max-p", "400", "--cache", d]);
    let cache = std::fs::read_to_string(dir.path().join("irregular.tsv")).unwrap();
    assert!(cache.starts_with("# unramified irregular-cache v"));
    assert!(cache.lines().any(|l| l == "157\t62,110"));
    let second = bin()
        .args(["irregular", "--max-p", "400"])
        .env("UNRAMIFIED_CACHE_DIR", d)
        .output()
        .unwrap();
    assert_eq!(first.stdout, second.stdout);

    // a corrupted entry is dropped and recomputed
    let broken = cache.replace("157\t62,110", "157\t62,112");
    std::fs::write(dir.path().join("irregular.tsv"), broken).unwrap();
    let third = run(&["irregular", "--max-p", "400", "--cache", d]);
    assert_eq!(first.stdout, third.stdout);
    let healed = std::fs::read_to_string(dir.path().join("irregular.tsv")).unwrap();
    assert!(healed.lines().any(|l| l == "157\t62,110"));
}

#[test]
fn unwritable_cache_warns_and_continues() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "not a directory").unwrap();
    let o = run(&[
        "irregular",
        "--max-p",
        "40",
        "--cache",
        blocker.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "37\t32\n");
    assert!(stderr(&o).contains("warning"), "{}", stderr(&o));
}

#[test]
fn report_is_job_independent() {
    let exc = fixture("exceptional.tsv");
    let args = [
        "report",
        "--max-p",
        "700",
        "--pairing",
        exc.to_str().unwrap(),
    ];
    let a = run(&[&args[..], &["--jobs", "1"]].concat());
    let b = run(&[&args[..], &["--jobs", "4"]].concat());
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert_eq!(text.lines().count(), 122);
    let tsv = run(&[&args[..], &["--format", "tsv"]].concat());
    assert_eq!(stdout(&tsv).lines().count(), 123);
}
