use std::path::PathBuf;
use std::process::{Command, Output};

fn corrko(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_corrko"))
        .args(args)
        .env_remove("CORRKO_MAX_VERTICES")
        .env_remove("CORRKO_MAX_W")
        .env_remove("CORRKO_MAX_STATES")
        .output()
        .expect("run corrko")
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("corrko-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn simulate_report_is_deterministic() {
    let a = corrko(&["report", "simulate", "--seed", "5", "--format", "rows"]);
    let b = corrko(&["report", "simulate", "--seed", "5", "--format", "rows"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).starts_with("# "));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(corrko(&["report", "no-such-experiment"]).status.code(), Some(2));
    assert_eq!(corrko(&["solve", "/nonexistent/instance.txt"]).status.code(), Some(2));
    assert_eq!(corrko(&["acceptance", "--criterion", "99"]).status.code(), Some(2));
}

#[test]
fn cap_errors_suggest_a_remedy() {
    let inst = tmp("adaptgap.txt");
    let o = corrko(&["gen", "adaptgap", "--height", "4", "--out", inst.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let o = corrko(&["oracle", inst.to_str().unwrap(), "--caps", "vertices=2"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("--caps"), "{err}");
}

#[test]
fn oracle_policy_round_trips_through_simulate() {
    let inst = tmp("random.txt");
    let pol = tmp("random.policy");
    let (i, p) = (inst.to_str().unwrap(), pol.to_str().unwrap());
    assert!(corrko(&["gen", "random", "--n", "4", "--b", "4", "--w", "5", "--seed", "1", "--out", i]).status.success());
    let o = corrko(&["oracle", i, "--kind", "adaptive", "--policy-out", p, "--format", "rows"]);
    assert_eq!(o.status.code(), Some(0));
    let opt = stdout(&o)
        .lines()
        .find_map(|l| l.strip_prefix("field\tadaptive optimum\t").map(str::to_string))
        .unwrap();
    let o = corrko(&["simulate", i, p, "--trials", "500", "--format", "rows"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains(&format!("field\texact value\t{opt}\n")));
}

#[test]
fn csko_emits_a_checked_policy() {
    let inst = tmp("csko.txt");
    let pol = tmp("csko.policy");
    let (i, p) = (inst.to_str().unwrap(), pol.to_str().unwrap());
    assert!(corrko(&["gen", "random", "--n", "5", "--b", "4", "--w", "6", "--seed", "3", "--out", i]).status.success());
    for algo in ["poly-logw", "cancel", "decompose"] {
        let o = corrko(&["csko", i, "--algo", algo, "--policy-out", p]);
        assert_eq!(o.status.code(), Some(0), "{algo}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(stdout(&o).contains("drawn policy value"));
        let o = corrko(&["simulate", i, p, "--trials", "100"]);
        assert_eq!(o.status.code(), Some(0));
    }
}

#[test]
fn solve_checks_feasibility() {
    let inst = tmp("ko.txt");
    let i = inst.to_str().unwrap();
    assert!(corrko(&["gen", "knap-orient", "--n", "6", "--b", "8", "--out", i]).status.success());
    let exact = stdout(&corrko(&["solve", i, "--format", "rows"]));
    assert!(exact.contains("check\tfeasible\tpass"));
    let lag = corrko(&["solve", i, "--algo", "lagrangian"]);
    assert_eq!(lag.status.code(), Some(0));
    assert_eq!(corrko(&["solve", i, "--algo", "bucketing"]).status.code(), Some(2));
}
