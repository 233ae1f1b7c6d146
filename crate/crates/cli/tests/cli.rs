use std::process::{Command, Output};

const STANDARD: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/standard.toml");

fn spherule(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spherule")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn full_minor() {
    let o = spherule(&["-f", STANDARD, "minor", "--rows", "0,*,1,2", "--cols", "0,*,1,2"]);
    assert!(o.status.success());
    assert!(stdout(&o).lines().any(|l| l.ends_with("-63")), "{}", stdout(&o));
}

#[test]
fn connection_matrix_has_every_entry() {
    let o = spherule(&["-f", STANDARD, "gm", "--lambda", "3/2,5/4"]);
    assert!(o.status.success());
    let out = stdout(&o);
    for k in ["{1}", "{2}", "{1,2}"] {
        for j in ["{1}", "{2}", "{1,2}"] {
            assert!(out.contains(&format!("K={k} J={j} ")), "missing K={k} J={j}");
        }
    }
    assert!(out.contains("K={1} J={1}      dr2_1      13/32"));
}

#[test]
fn single_entry_and_negative_exponents() {
    let o = spherule(&["-f", STANDARD, "gm", "--K", "2", "--J", "1", "--lambda", "-3/2,5/4"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).lines().skip(1).all(|l| l.starts_with("K={2} J={1}")));
}

#[test]
fn wronskian_agrees() {
    let o = spherule(&["-f", STANDARD, "wronskian", "--lambda", "3/2,5/4"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("agree         true"));
}

#[test]
fn verify_is_deterministic() {
    let a = spherule(&["verify", "--suite", "exact", "--seed", "7"]);
    let b = spherule(&["verify", "--suite", "exact", "--seed", "7"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(!stdout(&a).contains("FAIL"));
}

#[test]
fn thread_count_does_not_change_output() {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_spherule"))
            .env("SPHERULE_THREADS", threads)
            .args(["verify", "--suite", "exact", "--seed", "3"])
            .output()
            .unwrap()
    };
    assert_eq!(run("1").stdout, run("4").stdout);
}

#[test]
fn input_errors_exit_with_two() {
    let o = spherule(&["-f", STANDARD, "minor", "--rows", "0,9", "--cols", "0,1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = spherule(&["-f", STANDARD, "gm", "--lambda", "1/2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("m = 2"));
    let o = spherule(&["-f", "/nonexistent.toml", "check"]);
    assert_eq!(o.status.code(), Some(2));
    let o = spherule(&["check"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn csv_output() {
    let dir = std::env::temp_dir().join(format!("spherule-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("basis.csv");
    let o = spherule(&["-f", STANDARD, "--csv", path.to_str().unwrap(), "basis", "--nbc"]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().next(), Some("key,entry,value"));
    assert!(text.contains("\"{1,2}\",weight,2"), "{text}");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn format_round_trips() {
    let o = spherule(&["-f", STANDARD, "format", "--alpha"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("alpha = [0, -4]"));
}
