use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

fn fixture(name: &str) -> String {
    let core = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name);
    if core.exists() {
        return core.to_string_lossy().into_owned();
    }
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name).to_string_lossy().into_owned()
}

fn htnact(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_htnact")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn scripted_act_reproduces_the_golden_trace() {
    let o = htnact(&["act", &fixture("rover.htn"), &fixture("rover.prob"), "--choices", &fixture("walkthrough.choices")]);
    assert_eq!(code(&o), 0);
    let golden = std::fs::read_to_string(fixture("walkthrough.golden.json")).unwrap();
    assert_eq!(stdout(&o), golden);
}

#[test]
fn act_on_the_walkthrough_scenario() {
    let o = htnact(&[
        "act",
        &fixture("rover.htn"),
        &fixture("rover.prob"),
        &fixture("walkthrough.evt"),
        "--choices",
        &fixture("walkthrough.choices"),
    ]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    let kinds: Vec<&str> = out.lines().filter_map(|l| l.trim().strip_prefix("\"kind\": ")).collect();
    assert_eq!(&kinds[..4], ["\"initial\",", "\"observation\",", "\"reduction\",", "\"reduction\","]);
    assert!(out.contains("\"8:calibrate\",\n    \"9:moveCams\",\n    \"B:monitor\""));
}

#[test]
fn writes_the_trace_to_a_file() {
    let path = std::env::temp_dir().join(format!("htnact-cli-{}.json", std::process::id()));
    let o = htnact(&["act", &fixture("rover.htn"), &fixture("rover.prob"), "--out", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert!(text.contains("\"outcome\": \"successful\""));
}

#[test]
fn same_seed_gives_identical_exports() {
    let args = ["act", &fixture("rover.htn"), &fixture("rover.prob"), "--seed", "11"];
    let a = htnact(&args);
    let b = htnact(&args);
    assert_eq!(code(&a), code(&b));
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).contains("\"seed\": 11"));
}

#[test]
fn exit_codes() {
    let blocked = htnact(&["act", &fixture("grounded.htn"), &fixture("grounded.prob")]);
    assert_eq!(code(&blocked), 2);
    let budget = htnact(&["act", &fixture("rover.htn"), &fixture("rover.prob"), "--max-iterations", "2"]);
    assert_eq!(code(&budget), 3);
    let invalid = htnact(&["act", &fixture("clash.htn"), &fixture("walk.prob")]);
    assert_eq!(code(&invalid), 4);
    assert!(String::from_utf8_lossy(&invalid.stderr).contains("symbol has both an operator and methods"));
    let missing = htnact(&["plan", "no-such.htn", &fixture("rover.prob")]);
    assert_eq!(code(&missing), 4);
    assert_eq!(code(&htnact(&["frobnicate"])), 4);
    assert_eq!(code(&htnact(&["--help"])), 0);
}

#[test]
fn exhaustive_is_only_for_verify() {
    let o = htnact(&["act", &fixture("rover.htn"), &fixture("rover.prob"), "--strategy", "exhaustive"]);
    assert_eq!(code(&o), 4);
}

#[test]
fn plan_lists_solutions() {
    let o = htnact(&["plan", &fixture("rover.htn"), &fixture("rover.prob"), "--depth", "3"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "B:monitor 1:estabConn 4:extData(loc1) 5:sendExtData(loc1) 3:breakConn\n");
    let primitive = htnact(&["plan", &fixture("grounded.htn"), &fixture("walk.prob")]);
    assert_eq!(stdout(&primitive), "A:walk(home)\n");
    assert_eq!(code(&htnact(&["plan", &fixture("rover.htn"), &fixture("rover.prob"), "--depth", "0"])), 4);
}

#[test]
fn verify_suites() {
    let o = htnact(&["verify", &fixture("rover.htn"), &fixture("rover.prob"), "--suite", "acting-only"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("PASS acting-only"));
    assert!(stdout(&o).contains("witness: 8·9·B·1·4·5·3\n"));

    let o = htnact(&[
        "verify",
        &fixture("rover.htn"),
        &fixture("rover.prob"),
        &fixture("walkthrough.evt"),
        "--suite",
        "dtrace-soundness",
    ]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));

    let o = htnact(&["verify", "--random", "5", "--seed", "3", "--suite", "equivalence"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));

    let o = htnact(&[
        "verify",
        &fixture("rover-jump.htn"),
        &fixture("rover-jump.prob"),
        "--suite",
        "jumps",
        "--target",
        "calibrate, moveCams, monitor, estabConn, extData(loc1), sendExtData(loc1), breakConn",
    ]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));

    let o = htnact(&["verify", &fixture("rover.htn"), &fixture("rover.prob"), "--suite", "jumps"]);
    assert_eq!(code(&o), 5);
    assert!(stdout(&o).starts_with("FAIL jumps"));
}

#[test]
fn interactive_reads_tasks_per_iteration() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_htnact"))
        .args(["act", &fixture("rover.htn"), &fixture("rover.prob"), "--interactive"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(b"monitor\n\n").unwrap();
    let o = child.wait_with_output().unwrap();
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stderr).contains("[0]> "));
    assert!(stdout(&o).contains("\"A:monitor\""));
}
