use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fermi-euler"))
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn manifest(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const EULER: &str = r#"
times = [0.0, 0.02]
[profile]
kind = "bump"
beta = 5.0
mu0 = 0.3
amplitude = 0.2
width = 0.3
alpha = 0.0
[euler]
cells = 64
t_final = 0.02
"#;

#[test]
fn checks_pass_and_print_one_line_per_item() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "c.toml", "seed = 3\n");
    let out = tmp.path().join("out");
    let o = run(&["checks", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    let text = stdout(&o);
    let lines: Vec<_> = text.lines().filter(|l| l.starts_with("PASS") || l.starts_with("FAIL")).collect();
    assert_eq!(lines.len(), 16, "{text}");
    assert!(lines.iter().all(|l| l.starts_with("PASS")));
    assert!(out.join("checks.json").exists() && out.join("checks.csv").exists());
    assert_eq!(manifest(&out)["seed"], 3);
}

#[test]
fn a_failing_check_sets_exit_code_one_and_is_reported() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "c.toml", "[tolerances]\nvirial = 0.0\n");
    let out = tmp.path().join("out");
    let o = run(&["checks", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    let line = text.lines().find(|l| l.contains("eos.virial")).unwrap();
    assert!(line.starts_with("FAIL"), "{line}");
    let m = manifest(&out);
    assert_eq!(m["summary"]["passed"], false);
    assert_eq!(m["summary"]["failures"][0], "eos.virial");
    assert_eq!(m["tolerances"]["virial"], 0.0);
}

#[test]
fn invalid_configs_exit_with_code_two() {
    let tmp = tempfile::tempdir().unwrap();
    let cases = [
        ("unknown_key.toml", "sizez = [64]\n", "sizez"),
        ("bad_window.toml", "sizes = [64]\nwindows = [48]\n", "window"),
        ("bad_tol.toml", "[tolerances]\nnonsense = 1.0\n", "nonsense"),
        ("bad_cfl.toml", "[euler]\ncfl = 1.5\n", "CFL"),
        ("negative_beta.toml", "[profile]\nkind = \"constant\"\nbeta = -1.0\nalpha = 0.0\nmu = 0.1\n", "one-phase"),
    ];
    for (name, text, needle) in cases {
        let cfg = write_config(tmp.path(), name, text);
        let o = run(&["euler-run", "--config", cfg.to_str().unwrap(), "--out", tmp.path().join("x").to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(2), "{name}");
        assert!(stderr(&o).contains(needle), "{name}: {}", stderr(&o));
    }
    let missing = run(&["checks", "--config", tmp.path().join("nope.toml").to_str().unwrap()]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn config_kind_must_match_the_subcommand() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "k.toml", "kind = \"checks\"\n");
    let o = run(&["euler-run", "--config", cfg.to_str().unwrap(), "--out", tmp.path().join("o").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("'checks'"), "{}", stderr(&o));
}

#[test]
fn reruns_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "e.toml", EULER);
    let mut hashes = Vec::new();
    for d in ["a", "b"] {
        let out = tmp.path().join(d);
        let o = run(&["euler-run", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        let mut m = manifest(&out);
        // the echoed output directory is the only intended difference
        m["config"]["out_dir"] = Value::Null;
        hashes.push(m);
    }
    assert_eq!(hashes[0], hashes[1]);
    let outputs = hashes[0]["outputs"].as_array().unwrap();
    let files: Vec<_> = outputs.iter().map(|o| o["file"].as_str().unwrap()).collect();
    assert_eq!(files, ["euler_T0.000000.csv", "euler_T0.020000.csv"]);
    for d in ["a", "b"] {
        for f in &files {
            assert_eq!(fs::read(tmp.path().join("a").join(f)).unwrap(), fs::read(tmp.path().join(d).join(f)).unwrap());
        }
    }
}

#[test]
fn direct_eos_flag_agrees_with_the_table() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "e.toml", EULER);
    let read_last = |d: &str, extra: &[&str]| -> Vec<f64> {
        let out = tmp.path().join(d);
        let mut args = vec!["euler-run", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()];
        args.extend_from_slice(extra);
        let o = run(&args);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        let text = fs::read_to_string(out.join("euler_T0.020000.csv")).unwrap();
        text.lines().skip(1).flat_map(|l| l.split(',').skip(1).map(|v| v.parse::<f64>().unwrap()).collect::<Vec<_>>()).collect()
    };
    let table = read_last("table", &[]);
    let direct = read_last("direct", &["--direct-eos"]);
    assert_eq!(table.len(), direct.len());
    let worst = table.iter().zip(&direct).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    assert!(worst < 1e-6, "{worst}");
    assert_eq!(manifest(&tmp.path().join("direct"))["config"]["euler"]["direct_eos"], true);
}

#[test]
fn every_subcommand_runs_on_a_small_config() {
    let tmp = tempfile::tempdir().unwrap();
    let small = r#"
sizes = [128]
ell_ratio = 8
times = [0.0, 0.01]
[profile]
kind = "wave"
beta0 = 5.0
beta1 = 0.5
mu0 = 0.3
mu1 = 0.1
alpha0 = 0.0
alpha1 = 0.2
[rate]
rho = [0.2, 0.4, 3]
e = [0.05, 0.2, 3]
"#;
    let cfg = write_config(tmp.path(), "s.toml", small);
    let expect = [
        ("hydro-compare", vec!["errors.csv", "slopes.csv", "trends.json"]),
        ("entropy-track", vec!["entropy.csv"]),
        ("micro-run", vec!["fields_L128_T0.000000.csv", "state_L128_T0.010000.snap", "assumptions.json"]),
        ("rate-scan", vec!["rate_scan.csv"]),
    ];
    for (cmd, files) in expect {
        let out = tmp.path().join(cmd);
        let o = run(&[cmd, "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{cmd}: {}", stderr(&o));
        for f in files {
            assert!(out.join(f).exists(), "{cmd}: missing {f}");
        }
        let m = manifest(&out);
        assert_eq!(m["kind"], cmd);
        assert_eq!(m["input_hash"].as_str().unwrap().len(), 64);
    }

    let table = format!("{small}\n[euler.table]\nrho_range = [0.15, 0.35]\nexcess_range = [0.002, 0.06]\nresolution = [16, 16]\n");
    let cfg = write_config(tmp.path(), "t.toml", &table);
    let out = tmp.path().join("eos-table");
    let o = run(&["eos-table", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(out.join("eos_table.bin").exists() && out.join("eos_table_preview.csv").exists());
    let bare = write_config(tmp.path(), "bare.toml", "");
    let o = run(&["eos-table", "--config", bare.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}
