use std::process::Command;

fn finsler(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_finsler")).args(args).output().unwrap()
}

#[test]
fn list_examples_names_every_entry() {
    let out = finsler(&["list-examples"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for e in finsler_jet::registry::catalogue() {
        assert!(text.contains(&e.name), "{} missing", e.name);
    }
}

#[test]
fn holding_run_exits_zero_with_identical_json() {
    let args = ["run", "--example", "euclidean3", "--points", "5", "--json", "-"];
    let a = finsler(&args);
    let b = finsler(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["schemaVersion"], 1);
}

#[test]
fn failing_check_exits_one_and_names_it() {
    let out = finsler(&["run", "--example", "ex32", "--points", "5", "--checks", "closed-forms"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("closed-forms"), "{err}");
}

#[test]
fn errors_exit_two() {
    assert_eq!(finsler(&["run", "--example", "nope"]).status.code(), Some(2));
    assert_eq!(finsler(&["run", "--example", "euclidean2", "--points", "0"]).status.code(), Some(2));
    assert_eq!(finsler(&["run"]).status.code(), Some(2));
}

#[test]
fn saved_report_reruns_to_the_same_report() {
    let dir = std::env::temp_dir().join(format!("finsler-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let first = dir.join("first.json");
    let out = finsler(&["run", "--example", "ex31", "--points", "4", "--seed", "7", "--checks", "identities,sigma-t", "--json", first.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let again = finsler(&["run", first.to_str().unwrap(), "--json", "-"]);
    let saved = std::fs::read_to_string(&first).unwrap();
    assert_eq!(String::from_utf8(again.stdout).unwrap(), saved);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn check_identities_holds_on_a_registry_metric() {
    let out = finsler(&["check-identities", "--example", "ex51", "--points", "5"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout).unwrap().contains("identities"));
}
