use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use sha2::{Digest, Sha256};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_spatperm"))
}

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("spatperm-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&d);
    fs::create_dir_all(&d).unwrap();
    d
}

fn run(args: &[&str], out: &Path) -> Output {
    bin().args(args).arg("--out").arg(out).output().unwrap()
}

fn csv_rows(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

fn column(path: &Path, name: &str) -> Vec<f64> {
    let (h, rows) = csv_rows(path);
    let c = h
        .iter()
        .position(|x| x == name)
        .unwrap_or_else(|| panic!("no column {name} in {h:?}"));
    rows.iter().map(|r| r[c].parse().unwrap()).collect()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn sha(path: &Path) -> String {
    hex::encode(Sha256::digest(fs::read(path).unwrap()))
}

fn assert_ok(o: &Output) {
    assert!(
        o.status.success(),
        "exit {:?}\n{}",
        o.status.code(),
        String::from_utf8_lossy(&o.stderr)
    );
}

// ζ(3/2) to 16 digits.
const ZETA_3_2: f64 = 2.612_375_348_685_488;

#[test]
fn thermo_critical_density_matches_zeta_closed_form() {
    let d = scratch("rhoc");
    let o = run(
        &[
            "thermo",
            "--quantity",
            "rhoc",
            "--model",
            "gaussian",
            "--dim",
            "3",
            "--beta",
            "1",
        ],
        &d,
    );
    assert_ok(&o);
    let v = column(&d.join("thermo_rhoc.csv"), "value");
    assert_eq!(v.len(), 1);
    let oracle = ZETA_3_2 * (4.0 * std::f64::consts::PI).powf(-1.5);
    assert!((v[0] - oracle).abs() < 1e-10, "{} vs {oracle}", v[0]);
    let m = json(&d.join("thermo_rhoc.manifest.json"));
    assert_eq!(m["command"], "thermo");
    assert_eq!(m["outputs"][0], "thermo_rhoc.csv");
    assert!(m["seed"].is_u64());
    assert_eq!(m["config"]["seed"], m["seed"]);
    assert!(m["model_hash"].as_str().unwrap().len() >= 16);
}

#[test]
fn nonnegative_mu_exits_with_domain_code() {
    let d = scratch("p0mu0");
    let o = run(&["thermo", "--quantity", "p0", "--mu", "-0.5,0"], &d);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("mu < 0"), "{err}");
}

#[test]
fn tc_shift_constant_is_about_037() {
    let d = scratch("tcshift");
    assert_ok(&run(&["thermo", "--quantity", "tcshift"], &d));
    let v = column(&d.join("thermo_tcshift.csv"), "value")[0];
    assert!((v - 0.37).abs() < 0.005, "{v}");
    // (4/3) ζ(3/2)^{−4/3}
    let linear = 4.0 / 3.0 * ZETA_3_2.powf(-4.0 / 3.0);
    assert!((v - linear).abs() < 1e-6, "{v} vs {linear}");
}

#[test]
fn pressure_grid_and_bound_columns() {
    let d = scratch("grids");
    assert_ok(&run(
        &[
            "thermo",
            "--quantity",
            "palpha",
            "--mu-range=-1:-0.2:5",
            "--alpha",
            "0,1,inf",
        ],
        &d,
    ));
    let (h, rows) = csv_rows(&d.join("thermo_palpha.csv"));
    assert_eq!(h, ["alpha", "mu", "value", "est_error"]);
    assert_eq!(rows.len(), 15);
    assert_eq!(rows[14][0], "inf");
    assert_ok(&run(
        &[
            "thermo",
            "--quantity",
            "bound",
            "--alpha",
            "inf",
            "--rho",
            "0.01,0.5",
        ],
        &d,
    ));
    let (h, rows) = csv_rows(&d.join("thermo_bound.csv"));
    assert_eq!(h, ["alpha", "rho", "value", "est_error", "vacuous"]);
    assert_eq!(rows[0][4], "true");
    assert_eq!(rows[1][4], "false");
}

#[test]
fn spectral_single_mode_and_mgf_at_zero() {
    let d = scratch("single");
    assert_ok(&run(
        &[
            "spectral",
            "--task",
            "logZ",
            "--energies",
            "0",
            "-L",
            "1",
            "-N",
            "7",
            "--dim",
            "1",
        ],
        &d,
    ));
    let lz = column(&d.join("spectral_logZ.csv"), "log_z");
    assert_eq!(lz.len(), 8);
    assert!(lz.iter().all(|v| v.abs() < 1e-14), "{lz:?}");

    assert_ok(&run(
        &[
            "spectral", "--task", "mgf", "--lambda", "0", "-L", "4", "-N", "10",
        ],
        &d,
    ));
    let m = column(&d.join("spectral_mgf.csv"), "value")[0];
    assert!((m - 1.0).abs() < 1e-12, "{m}");
}

#[test]
fn spectral_two_mode_log_z_by_enumeration() {
    let d = scratch("twomode");
    assert_ok(&run(
        &[
            "spectral",
            "--task",
            "logZ",
            "--energies",
            "0,1",
            "-L",
            "1",
            "-N",
            "2",
            "--dim",
            "1",
            "--alpha",
            "0",
        ],
        &d,
    ));
    let lz = column(&d.join("spectral_logZ.csv"), "log_z");
    // Occupations (2,0), (1,1), (0,2) with weights 1, e^{−1}, e^{−2}.
    let oracle = (1.0 + (-1.0f64).exp() + (-2.0f64).exp()).ln();
    assert!((lz[2] - oracle).abs() < 1e-12, "{} vs {oracle}", lz[2]);
}

#[test]
fn cycle_density_with_penalty_is_unsupported() {
    let d = scratch("rhoalpha");
    let o = run(
        &[
            "spectral",
            "--task",
            "rho",
            "--m",
            "1",
            "--n",
            "2",
            "--energies",
            "0,1",
            "-L",
            "1",
            "-N",
            "2",
            "--dim",
            "1",
            "--alpha",
            "1",
        ],
        &d,
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unsupported"));
}

#[test]
fn spectral_samples_are_sparse_and_seeded() {
    let d = scratch("sample");
    assert_ok(&run(
        &[
            "spectral", "--task", "sample", "--count", "5", "-L", "5", "-N", "20", "--seed", "9",
        ],
        &d,
    ));
    let first = sha(&d.join("spectral_sample.csv"));
    let (_, rows) = csv_rows(&d.join("spectral_sample.csv"));
    assert_eq!(rows.len(), 5);
    for r in &rows {
        let total: u64 = r[1]
            .split(' ')
            .map(|p| p.split_once(':').unwrap().1.parse::<u64>().unwrap())
            .sum();
        assert_eq!(total, 20);
    }
    assert_ok(&run(
        &[
            "spectral", "--task", "sample", "--count", "5", "-L", "5", "-N", "20", "--seed", "9",
        ],
        &d,
    ));
    assert_eq!(first, sha(&d.join("spectral_sample.csv")));
}

#[test]
fn mc_zero_sweeps_gives_empty_trace_and_manifest() {
    let d = scratch("mc0");
    assert_ok(&run(
        &["mc", "-L", "5", "-N", "4", "--sweeps", "0", "--seed", "1"],
        &d,
    ));
    let (h, rows) = csv_rows(&d.join("mc.trace.csv"));
    assert_eq!(h, ["sweep", "n2", "energy", "max_cycle"]);
    assert!(rows.is_empty());
    let m = json(&d.join("mc.manifest.json"));
    let outs: Vec<&str> = m["outputs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    assert!(outs.contains(&"mc.trace.csv") && outs.contains(&"mc.summary.json"));
    for o in outs {
        assert!(d.join(o).exists(), "{o}");
    }
    assert_eq!(
        json(&d.join("mc.summary.json"))["manifest"],
        "mc.manifest.json"
    );
}

#[test]
fn mc_fixed_seed_rerun_is_identical() {
    let d1 = scratch("mcseed1");
    let d2 = scratch("mcseed2");
    let args = [
        "mc",
        "-L",
        "5",
        "-N",
        "12",
        "--sweeps",
        "300",
        "--rho",
        "1:2",
        "--chains",
        "3",
        "--point-move-fraction",
        "0.3",
        "--seed",
        "77",
    ];
    assert_ok(&run(&args, &d1));
    let mut with_threads = args.to_vec();
    with_threads.extend(["--threads", "1"]);
    assert_ok(&run(&with_threads, &d2));
    assert_eq!(sha(&d1.join("mc.trace.csv")), sha(&d2.join("mc.trace.csv")));
    assert_eq!(column(&d1.join("mc.trace.csv"), "sweep").len(), 900);
}

#[test]
fn two_point_quenched_acceptance() {
    let d = scratch("twopoint");
    let r = 1.0;
    fs::write(
        d.join("pts.csv"),
        format!("1.0,1.0,1.0\n{},1.0,1.0\n", 1.0 + r),
    )
    .unwrap();
    let pts = d.join("pts.csv");
    assert_ok(&run(
        &[
            "mc",
            "-L",
            "20",
            "-N",
            "2",
            "--points",
            pts.to_str().unwrap(),
            "--sweeps",
            "100000",
            "--burn-in",
            "0",
            "--seed",
            "4",
        ],
        &d,
    ));
    let s = json(&d.join("mc.summary.json"));
    // From the identity a swap is accepted with a = e^{−r²/2}; back to it always.
    // Stationary weights 1 : a give the overall rate 2a/(1 + a).
    let a = (-r * r / 2.0f64).exp();
    let expected = 2.0 * a / (1.0 + a);
    let rate = s["acceptance"]["swap"]["rate"].as_f64().unwrap();
    let attempted = s["acceptance"]["swap"]["attempted"].as_f64().unwrap();
    assert_eq!(attempted, 200_000.0);
    assert!((rate - expected).abs() < 0.01, "{rate} vs {expected}");
    let n2 = s["observables"]["n2"]["mean"].as_f64().unwrap();
    assert!((n2 - a / (1.0 + a)).abs() < 0.01, "{n2}");
}

#[test]
fn config_file_fields_and_unknown_keys() {
    let d = scratch("config");
    fs::write(
        d.join("run.toml"),
        "sweeps = 50\nside = 4.0\nparticles = 8\nrho_windows = [[1, 1]]\n[model]\ndim = 2\n",
    )
    .unwrap();
    let cfg = d.join("run.toml");
    assert_ok(&run(
        &[
            "mc",
            "--config",
            cfg.to_str().unwrap(),
            "--sweeps",
            "20",
            "--seed",
            "2",
        ],
        &d,
    ));
    let m = json(&d.join("mc.manifest.json"));
    assert_eq!(m["config"]["sweeps"], 20);
    assert_eq!(m["config"]["model"]["dim"], 2);
    assert_eq!(column(&d.join("mc.trace.csv"), "rho_1_1").len(), 20);

    fs::write(d.join("bad.json"), r#"{"quantity": "rhoc", "betta": 2}"#).unwrap();
    let o = run(
        &["thermo", "--config", d.join("bad.json").to_str().unwrap()],
        &d,
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("betta"));
}

#[test]
fn replay_reproduces_exact_outputs_bit_for_bit() {
    let d = scratch("replay");
    assert_ok(&run(
        &["thermo", "--quantity", "p0", "--mu", "-1,-0.3,-0.01"],
        &d.join("a"),
    ));
    let o = bin()
        .args(["replay"])
        .arg(d.join("a/thermo_p0.manifest.json"))
        .arg("--out")
        .arg(d.join("b"))
        .output()
        .unwrap();
    assert_ok(&o);
    assert_eq!(
        sha(&d.join("a/thermo_p0.csv")),
        sha(&d.join("b/thermo_p0.csv"))
    );

    assert_ok(&run(
        &["mc", "-L", "4", "-N", "6", "--sweeps", "100"],
        &d.join("c"),
    ));
    let o = bin()
        .args(["replay"])
        .arg(d.join("c/mc.manifest.json"))
        .arg("--out")
        .arg(d.join("e"))
        .output()
        .unwrap();
    assert_ok(&o);
    assert_eq!(
        sha(&d.join("c/mc.trace.csv")),
        sha(&d.join("e/mc.trace.csv"))
    );
    assert_eq!(
        json(&d.join("c/mc.manifest.json"))["seed"],
        json(&d.join("e/mc.manifest.json"))["seed"]
    );
}

#[test]
fn cycle_bound_two_points_and_budget() {
    let d = scratch("bound");
    let r: f64 = 1.3;
    fs::write(d.join("p.csv"), format!("0,0,0\n{r},0,0\n")).unwrap();
    let p = d.join("p.csv");
    assert_ok(&run(
        &[
            "cycle-bound",
            "--points",
            p.to_str().unwrap(),
            "--n-max",
            "2",
        ],
        &d,
    ));
    let s = column(&d.join("cycle_bound.csv"), "partial_sum");
    assert_eq!(s[0], 1.0);
    assert!((s[1] - (1.0 + (-2.0 * r * r / 4.0).exp())).abs() < 1e-14);
    let o = run(
        &[
            "cycle-bound",
            "--points",
            p.to_str().unwrap(),
            "--n-max",
            "2",
            "--node-budget",
            "1",
        ],
        &d,
    );
    assert_eq!(o.status.code(), Some(3));
    assert!(d.join("cycle_bound.csv").exists());
}

#[test]
fn verify_oracle_small_passes() {
    let d = scratch("verify");
    let o = run(&["verify", "--suite", "oracle_small"], &d);
    assert_ok(&o);
    let r = json(&d.join("verify_oracle_small.json"));
    let crit = r["criteria"].as_array().unwrap();
    assert!(!crit.is_empty());
    for c in crit {
        assert_eq!(c["pass"], true, "{c}");
        for k in ["id", "measured", "target", "tolerance"] {
            assert!(c.get(k).is_some(), "{k} missing");
        }
    }
}

#[test]
fn unknown_suite_is_rejected() {
    let d = scratch("badsuite");
    let o = run(&["verify", "--suite", "no_such_suite"], &d);
    assert_eq!(o.status.code(), Some(2));
}
