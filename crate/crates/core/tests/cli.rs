use std::path::Path;
use std::process::{Command, Output};

use scm::experiment::{read_table, Table};

fn scm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_scm"))
        .args(args)
        .env_remove("SCM_WORKERS")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const SMALL: &str = r#"
[scheme]
codebook = "scm"
m = 4
k = 1
variant = "d4"
constellation = "psk"
order = 4

[channel]
model = "rician"
k = 2.0
n_rx = 2
rho = 0.3
tau = 0.3

[sweep]
snr_db = [0.0, 4.0, 8.0]
seed = 11
max_trials = 5000
target_bit_errors = 100
trials = 50
"#;

fn write_config(dir: &Path, body: &str) -> String {
    let p = dir.join("exp.toml");
    std::fs::write(&p, body).unwrap();
    p.display().to_string()
}

#[test]
fn codebook_scm73() {
    let o = scm(&["codebook", "--scheme", "scm", "--m", "7", "--k", "3"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines.len(), 10);
    assert_eq!(lines[9], "dmin=4");
}

#[test]
fn codebook_sm4_is_the_one_hot_table() {
    let o = scm(&["codebook", "--scheme", "sm", "--m", "4"]);
    assert!(o.status.success());
    assert_eq!(
        stdout(&o),
        "label codeword weight\n00 1000 1\n01 0100 1\n10 0010 1\n11 0001 1\ndmin=2\n"
    );
}

#[test]
fn bad_codebook_parameters_exit_2() {
    let o = scm(&["codebook", "--scheme", "sm", "--m", "6"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());
    assert!(o.stdout.is_empty());
}

#[test]
fn missing_config_leaves_no_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    let o = scm(&["ber", "--config", "/definitely/not/here.toml", "--out", out.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(!o.stderr.is_empty());
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn unknown_key_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &SMALL.replace("seed = 11", "seed = 11\nsed = 3"));
    let out = dir.path().join("x.csv");
    let o = scm(&["ber", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn ber_is_deterministic_and_replayable() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let a = dir.path().join("a.csv");
    let b = dir.path().join("sub/b.csv");
    let c = dir.path().join("c.csv");
    let o = scm(&["ber", "--config", &cfg, "--seed", "7", "--workers", "1", "--out", a.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let o = scm(&["ber", "--config", &cfg, "--seed", "7", "--workers", "3", "--out", b.to_str().unwrap()]);
    assert!(o.status.success());
    let bytes = std::fs::read(&a).unwrap();
    assert_eq!(bytes, std::fs::read(&b).unwrap());
    assert!(bytes.starts_with(b"snr_db,trials,bit_errors,ber,ci95_low,ci95_high\n"));

    let Table::Ber(rows) = read_table(&bytes).unwrap() else { panic!("wrong table") };
    assert_eq!(rows.len(), 3);
    assert!(rows[0].ber > rows[2].ber);

    let sidecar: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("a.json")).unwrap()).unwrap();
    assert_eq!(sidecar["seed"], 7);
    assert_eq!(sidecar["command"], "ber");
    assert_eq!(sidecar["tool"], "scm");

    let o = scm(&["replay", dir.path().join("a.json").to_str().unwrap(), "--out", c.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(bytes, std::fs::read(&c).unwrap());
}

#[test]
fn capacity_and_bounds_headers() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let cap = dir.path().join("cap.csv");
    let o = scm(&["capacity", "--config", &cfg, "--out", cap.to_str().unwrap()]);
    assert!(o.status.success());
    let bytes = std::fs::read(&cap).unwrap();
    assert!(bytes.starts_with(b"snr_db,capacity_bits,std_err\n"));
    assert!(matches!(read_table(&bytes).unwrap(), Table::Capacity(r) if r.len() == 3));

    let perfect = dir.path().join("b0.csv");
    let icsi = dir.path().join("b1.csv");
    let grid = "20,30,40,50";
    assert!(scm(&["bounds", "--config", &cfg, "--snr", grid, "--out", perfect.to_str().unwrap()]).status.success());
    assert!(scm(&["bounds", "--config", &cfg, "--snr", grid, "--gamma2", "0.01", "--out", icsi.to_str().unwrap()])
        .status
        .success());
    let Table::Bounds(p) = read_table(&std::fs::read(&perfect).unwrap()).unwrap() else { panic!() };
    let Table::Bounds(i) = read_table(&std::fs::read(&icsi).unwrap()).unwrap() else { panic!() };
    // perfect CSI keeps falling by decades; imperfect CSI flattens out
    assert!(p[3].ber_ub < 0.05 * p[2].ber_ub);
    assert!(i[3].ber_ub > 0.8 * i[2].ber_ub);
    assert!(p.iter().all(|r| r.capacity_lb.is_finite()));
    assert!(i.iter().all(|r| r.capacity_lb.is_nan()));
}

#[test]
fn conditional_ser_from_flags() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cs.csv");
    let o = scm(&[
        "conditional-ser", "--n-rx", "2", "--snr", "0,10", "--trials", "4000", "--seed", "3", "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let Table::ConditionalSer(rows) = read_table(&std::fs::read(&out).unwrap()).unwrap() else { panic!() };
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0].n_correct + rows[0].n_wrong, 4000);
}

#[test]
fn ber_without_config_is_rejected() {
    let o = scm(&["ber", "--snr", "0", "--out", "/tmp/never.csv"]);
    assert_eq!(o.status.code(), Some(2));
}
