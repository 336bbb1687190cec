use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_hybrid-hopf");

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/configs").join(name)
}

fn write_config(dir: &TempDir, body: &str) -> PathBuf {
    let p = dir.path().join("run.toml");
    fs::write(&p, body).unwrap();
    p
}

fn run(args: &[&str], cfg: &Path, out: &Path) -> i32 {
    Command::new(BIN)
        .args(args)
        .arg("--config")
        .arg(cfg)
        .arg("--out")
        .arg(out)
        .arg("-q")
        .env_remove("HYBRID_HOPF_OUT")
        .status()
        .unwrap()
        .code()
        .unwrap()
}

fn json(path: PathBuf) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

const PP: &str = r#"
[model]
builtin = "predator_prey"
params = { delta1 = 1.0, delta2 = 1.0, lambda = 0.3, alpha1 = 0.2, alpha2 = 0.6 }
"#;

#[test]
fn classify_exit_codes() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("pp");
    assert_eq!(run(&["classify"], &config("predator_prey.toml"), &out), 0);
    assert_eq!(json(out.join("classification.json"))["type"], "ES");

    let out = dir.path().join("classical");
    assert_eq!(run(&["classify"], &config("classical_hopf.toml"), &out), 2);
    assert!(out.join("assumptions.json").exists());
    assert!(!out.join("classification.json").exists());

    let cfg = write_config(
        &dir,
        "[model]\nbuiltin = \"synthetic_nf\"\nparams = { a = -1.0, b = 1.0, c = 1.0, d = 0.0 }\n",
    );
    let out = dir.path().join("degenerate");
    assert_eq!(run(&["classify"], &cfg, &out), 3);
    assert_eq!(json(out.join("classification.json"))["type"], "Degenerate");
}

#[test]
fn polynomial_model_classifies_and_verifies() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("c");
    assert_eq!(run(&["classify"], &config("rotating_drift.toml"), &out), 0);
    let c = json(out.join("classification.json"));
    assert_eq!(c["type"], "EU");
    assert_eq!(c["direction"], 1);
    let out = dir.path().join("v");
    assert_eq!(run(&["verify"], &config("rotating_drift.toml"), &out), 0);
    assert!(out.join("verify.json").exists());
    assert!(fs::read_to_string(out.join("orbit.csv")).unwrap().lines().count() > 10);
}

#[test]
fn continuation_branch_and_wrong_direction() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("branch");
    assert_eq!(run(&["continue"], &config("predator_prey_branch.toml"), &out), 0);
    let table = fs::read_to_string(out.join("branch.csv")).unwrap();
    assert_eq!(table.lines().count(), 9);
    let summary = fs::read_to_string(out.join("branch_summary.txt")).unwrap();
    let exponent: f64 = summary
        .split("|mu|^")
        .nth(1)
        .and_then(|s| s.split_whitespace().next())
        .unwrap()
        .parse()
        .unwrap();
    assert!((exponent - 0.5).abs() < 0.05, "{summary}");
    assert!(out.join("orbit_007.csv").exists());

    let cfg = write_config(&dir, PP);
    let out = dir.path().join("wrong");
    assert_eq!(run(&["continue", "--mu-grid=-1e-3,-2e-3"], &cfg, &out), 1);
    assert_eq!(fs::read_to_string(out.join("branch.csv")).unwrap().lines().count(), 1);
    assert!(fs::read_to_string(out.join("branch_summary.txt")).unwrap().contains("lost at mu"));

    let out = dir.path().join("single");
    assert_eq!(run(&["continue", "--mu-grid=1e-3"], &cfg, &out), 0);
    assert_eq!(fs::read_to_string(out.join("branch.csv")).unwrap().lines().count(), 2);
    assert!(fs::read_to_string(out.join("branch_summary.txt")).unwrap().contains("skipped"));
}

#[test]
fn eco_sweep_is_all_es_and_deterministic() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(run(&["eco-sweep"], &config("eco_sweep.toml"), &a), 0);
    assert_eq!(run(&["eco-sweep"], &config("eco_sweep.toml"), &b), 0);
    let sa = fs::read(a.join("sweep.csv")).unwrap();
    assert_eq!(sa, fs::read(b.join("sweep.csv")).unwrap());
    assert_eq!(
        fs::read_to_string(a.join("sweep_summary.txt")).unwrap().trim(),
        "rows: 1000, non-ES: 0, nonnegative margin: 0"
    );

    let cfg = write_config(&dir, "command = \"eco-sweep\"\n");
    let one = dir.path().join("one");
    assert_eq!(run(&["eco-sweep", "--samples", "1", "--seed", "3"], &cfg, &one), 0);
    assert_eq!(fs::read_to_string(one.join("sweep.csv")).unwrap().lines().count(), 2);
}

#[test]
fn repeated_classify_is_byte_identical() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    run(&["classify"], &config("rotating_drift.toml"), &a);
    run(&["classify"], &config("rotating_drift.toml"), &b);
    for f in ["assumptions.json", "coefficients.json", "classification.json"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn config_errors_exit_64() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("o");
    let bad = [
        format!("unknown_key = 1\n{PP}"),
        format!("tol = 1e-2\n{PP}"),
        "command = \"classify\"\n".to_string(),
        format!("command = \"eco-sweep\"\n{PP}"),
        "[model]\nbuiltin = \"no_such_model\"\n".to_string(),
        "[model]\nbuiltin = \"predator_prey\"\nparams = { delta1 = 1.0, delta2 = 1.0, lambda = 0.3, alpha1 = 0.5, alpha2 = 0.6 }\n"
            .to_string(),
    ];
    for body in &bad {
        let cfg = write_config(&dir, body);
        assert_eq!(run(&["classify"], &cfg, &out), 64, "{body}");
    }
    let cfg = write_config(&dir, PP);
    assert_eq!(run(&["classify", "--tol", "0.5"], &cfg, &out), 64);
    assert_eq!(run(&["no-such-command"], &cfg, &out), 64);
}

#[test]
fn output_directory_from_environment() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("from_env");
    let status = Command::new(BIN)
        .args(["classify", "-q", "--config"])
        .arg(config("predator_prey.toml"))
        .env("HYBRID_HOPF_OUT", &out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    assert!(out.join("classification.json").exists());
}

#[test]
fn truncated_run_and_domain_exit() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("t");
    assert_eq!(run(&["truncated"], &config("truncated.toml"), &out), 0);
    let rows = fs::read_to_string(out.join("truncated.csv")).unwrap();
    assert_eq!(rows.lines().next(), Some("tau,r,z"));
    assert!(out.join("truncated.json").exists());

    // unstable cycle: the reduced flow leaves the domain
    let cfg = write_config(
        &dir,
        r#"command = "truncated"
[model]
builtin = "synthetic_nf"
params = { a = -1.0, b = 1.0, c = -1.0, d = -1.0 }
[truncated]
epsilon = 0.1
mu_tilde = 0.25
x0 = [0.2, 0.0]
horizon = 200.0
"#,
    );
    let out = dir.path().join("leave");
    assert_eq!(run(&["truncated"], &cfg, &out), 1);
}
