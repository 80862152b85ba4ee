use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn stripe(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stripe"))
        .arg("--out")
        .arg(out)
        .args(args)
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

/// A copy of a shipped config with one line replaced.
fn edited(dir: &Path, name: &str, from: &str, to: &str) -> PathBuf {
    let text = fs::read_to_string(config(name)).unwrap();
    assert!(text.contains(from), "{from} not in {name}");
    let path = dir.join(name);
    fs::write(&path, text.replacen(from, to, 1)).unwrap();
    path
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn shipped_configs_succeed_and_write_their_files() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [(&[&str], &[&str]); 5] = [
        (&["solve-follower"], &["solution.json", "iterates.csv"]),
        (&["solve-stripe"], &["equilibrium.json", "rounds.csv"]),
        (&["verify-bounds"], &["bounds.json", "bounds.csv", "counterexamples.jsonl"]),
        (&["scenario", "contract"], &["contract.json", "sweep.csv"]),
        (&["scenario", "meta"], &["meta.json", "adaptation.csv"]),
    ];
    let names = ["follower.toml", "stripe.toml", "bounds.toml", "contract.toml", "meta.toml"];
    for ((cmd, files), name) in cases.iter().zip(names) {
        let out = dir.path().join(name);
        let mut args = cmd.to_vec();
        let path = config(name);
        args.push(path.to_str().unwrap());
        let o = stripe(&out, &args);
        assert_eq!(code(&o), 0, "{name}: {}", String::from_utf8_lossy(&o.stderr));
        for f in files.iter().chain(&["run.log"]) {
            assert!(out.join(f).is_file(), "{name}: missing {f}");
        }
    }
    let bounds = fs::read_to_string(dir.path().join("bounds.toml/counterexamples.jsonl")).unwrap();
    assert!(bounds.is_empty());
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    for run in ["a", "b"] {
        let o = stripe(&dir.path().join(run), &["solve-follower", config("follower.toml").to_str().unwrap()]);
        assert_eq!(code(&o), 0);
    }
    for f in ["solution.json", "iterates.csv"] {
        let a = fs::read(dir.path().join("a").join(f)).unwrap();
        let b = fs::read(dir.path().join("b").join(f)).unwrap();
        assert_eq!(a, b, "{f} differs");
    }
}

#[test]
fn seed_override_changes_scenarios_reproducibly() {
    let dir = tempfile::tempdir().unwrap();
    let path = config("follower.toml");
    let run = |name: &str, seed: Option<&str>| {
        let mut args = vec![];
        if let Some(s) = seed {
            args.extend(["--seed", s]);
        }
        args.extend(["solve-follower", path.to_str().unwrap()]);
        assert_eq!(code(&stripe(&dir.path().join(name), &args)), 0);
        fs::read(dir.path().join(name).join("solution.json")).unwrap()
    };
    let base = run("base", None);
    let a = run("a", Some("99"));
    let b = run("b", Some("99"));
    assert_eq!(a, b);
    assert_ne!(a, base);
}

#[test]
fn missing_config_is_a_usage_error_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = stripe(&out, &["solve-stripe", "no/such/file.toml"]);
    assert_eq!(code(&o), 2);
    assert!(!out.exists());
}

#[test]
fn invalid_configs_exit_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("solve-stripe", edited(dir.path(), "stripe.toml", "gamma = 0.5", "gamma = 0.0")),
        ("verify-bounds", edited(dir.path(), "bounds.toml", "checks = [\"deviation\", \"performance_reduction\", \"compromise\"]", "checks = []")),
        ("solve-follower", edited(dir.path(), "follower.toml", "seed = 11", "seed = 11\ncolour = 3")),
    ];
    for (cmd, path) in cases {
        let out = dir.path().join(format!("out-{cmd}"));
        let o = stripe(&out, &[cmd, path.to_str().unwrap()]);
        assert_eq!(code(&o), 2, "{cmd}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(!out.exists());
    }
}

#[test]
fn unknown_scenario_and_bad_overrides_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let o = stripe(&dir.path().join("x"), &["scenario", "auction", config("contract.toml").to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    let o = stripe(
        &dir.path().join("y"),
        &["--seed", "3", "scenario", "contract", config("contract.toml").to_str().unwrap()],
    );
    assert_eq!(code(&o), 2);
    let o = stripe(
        &dir.path().join("z"),
        &["--epsilon", "0.1", "scenario", "meta", config("meta.toml").to_str().unwrap()],
    );
    assert_eq!(code(&o), 2);
}

#[test]
fn huge_design_cost_keeps_the_primitive_distribution() {
    let dir = tempfile::tempdir().unwrap();
    let path = edited(dir.path(), "stripe.toml", "gamma = 0.5", "gamma = 1e6");
    let path = {
        // Brute force is not needed here.
        let text = fs::read_to_string(&path).unwrap();
        let cut = text.find("[brute_force]").unwrap();
        fs::write(&path, &text[..cut]).unwrap();
        path
    };
    let out = dir.path().join("out");
    let o = stripe(&out, &["solve-stripe", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let eq = json(&out.join("equilibrium.json"));
    let mu = eq["solution"]["equilibrium"]["mu_hat"].as_array().unwrap();
    assert!((mu[0].as_f64().unwrap() - 0.9).abs() < 1e-4);
    assert!((mu[1].as_f64().unwrap() - 0.1).abs() < 1e-4);
}

#[test]
fn deviation_at_the_anticipated_distribution_passes() {
    let dir = tempfile::tempdir().unwrap();
    let path = edited(
        dir.path(),
        "bounds.toml",
        "checks = [\"deviation\", \"performance_reduction\", \"compromise\"]",
        "checks = [\"deviation\"]\nmu_equals_mu_bar = true\ninstances = 3",
    );
    let text = fs::read_to_string(&path).unwrap().replacen("instances = 20\n", "", 1);
    fs::write(&path, text).unwrap();
    let out = dir.path().join("out");
    let o = stripe(&out, &["verify-bounds", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(fs::read_to_string(out.join("counterexamples.jsonl")).unwrap().is_empty());
}

#[test]
fn epsilon_override_replaces_the_contract_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = stripe(&out, &["--epsilon", "0.01", "scenario", "contract", config("contract.toml").to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let rows = fs::read_to_string(out.join("sweep.csv")).unwrap();
    // Header, the ε = 0 reference and the override.
    assert_eq!(rows.lines().count(), 3, "{rows}");
}
