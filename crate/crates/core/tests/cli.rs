use std::path::Path;
use std::process::{Command, Output};

use chaoscomm::config::Config;
use proptest::prelude::*;

fn chaoscomm(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chaoscomm")).current_dir(dir).args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn validate_echo_round_trips() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "a.cfg", "experiment = mask\nseed = 4\nnode1.tau_f = 0.02\n");
    let out = chaoscomm(tmp.path(), &["validate", "--config", &cfg, "--echo"]);
    assert!(out.status.success());
    let echoed = String::from_utf8(out.stdout).unwrap();
    assert!(echoed.contains("seed = 4\n"));
    assert!(echoed.contains("node.tau_f = 0.018  # paper\n"));
    let again = write(tmp.path(), "b.cfg", &echoed);
    let out2 = chaoscomm(tmp.path(), &["validate", "--config", &again, "--echo"]);
    assert_eq!(String::from_utf8(out2.stdout).unwrap(), echoed);
}

#[test]
fn config_errors_exit_2_with_every_line() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "bad.cfg", "experiment = simulate\nnode.alpha = 0\nsim.transient = 5\n");
    let out = chaoscomm(tmp.path(), &["simulate", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 2: node.alpha: alpha must be > 0"), "{err}");
    assert!(err.contains("line 3: sim.transient"), "{err}");
    assert!(!tmp.path().join("out").exists());
}

#[test]
fn subcommand_must_match_config() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "ber.cfg", "experiment = ber\n");
    let out = chaoscomm(tmp.path(), &["mask", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("subcommand is `mask`"));
}

#[test]
fn missing_config_file_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let out = chaoscomm(tmp.path(), &["ber", "--config", "nowhere.cfg"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unsynchronized_receiver_is_a_runtime_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "m.cfg", "experiment = mask\nmask.bits = 4\nsim.transient = 0.5\nnode1.kappa_f = 3\n");
    let out = chaoscomm(tmp.path(), &["mask", "--config", &cfg, "--out", "m"]);
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stdout));
    assert!(String::from_utf8(out.stderr).unwrap().contains("correlation"));
}

#[test]
fn ber_writes_csv_svg_and_summary() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "b.cfg",
        "experiment = ber\nber.schemes = bpsk,dcsk\nber.ebn0_db = 0,8\nber.bits_per_point = 10000\n",
    );
    let out = chaoscomm(tmp.path(), &["ber", "--config", &cfg, "--out", "res", "--svg", "--seed", "3"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 1);
    let csv = std::fs::read_to_string(tmp.path().join("res/ber.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "scheme,channel,ebn0_db,bits,errors,ber,ci_lo,ci_hi");
    assert_eq!(lines.len(), 5);
    assert!(lines[1].starts_with("bpsk,awgn,0,10000,"));
    assert!(std::fs::read_to_string(tmp.path().join("res/ber.svg")).unwrap().starts_with("<svg"));
}

#[test]
fn complexity_reads_a_trajectory_file() {
    let tmp = tempfile::tempdir().unwrap();
    let sim =
        write(tmp.path(), "s.cfg", "experiment = simulate\nsim.duration = 1.2\nsim.transient = 1\nsim.csv_every = 1\n");
    assert!(chaoscomm(tmp.path(), &["simulate", "--config", &sim, "--out", "sim"]).status.success());
    let cfg = write(
        tmp.path(),
        "c.cfg",
        "experiment = complexity\ncomplexity.input = sim/trajectory.csv\ncomplexity.columns = node1\n",
    );
    let out = chaoscomm(tmp.path(), &["complexity", "--config", &cfg, "--out", "cx"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let kv = std::fs::read_to_string(tmp.path().join("cx/complexity.txt")).unwrap();
    assert!(kv.contains("channels=1\n"));
    assert!(kv.contains("neural_complexity_bits=none\n"));
    assert!(kv.contains("param.step=1.00000000e-5\n"), "{kv}");
}

#[test]
fn thread_count_does_not_change_results() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "b.cfg", "experiment = ber\nber.ebn0_db = 2,4,6\nber.bits_per_point = 10000\n");
    let run = |threads: &str, out: &str| {
        let o = Command::new(env!("CARGO_BIN_EXE_chaoscomm"))
            .current_dir(tmp.path())
            .env("CHAOSCOMM_THREADS", threads)
            .args(["ber", "--config", &cfg, "--out", out])
            .output()
            .unwrap();
        assert!(o.status.success());
        std::fs::read(tmp.path().join(out).join("ber.csv")).unwrap()
    };
    assert_eq!(run("1", "one"), run("3", "three"));
}

fn safe_text() -> impl Strategy<Value = String> {
    "[a-z0-9_/.]{1,12}"
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn normalized_config_is_a_fixed_point(
        seed in 0u64..1_000_000,
        gain in 0.01f64..5.0,
        step in 1e-7f64..1e-4,
        grid in prop::collection::vec(-10.0f64..30.0, 1..6),
        dir in safe_text(),
        svg in any::<bool>(),
        node in 0usize..4,
        tau in 0.001f64..0.05,
    ) {
        let grid: Vec<String> = grid.iter().map(|v| v.to_string()).collect();
        let text = format!(
            "experiment = ber\nseed = {seed}\nnode.gain = {gain}\nsim.step = {step:e}\nber.ebn0_db = {}\nout.dir = {dir}\nout.svg = {svg}\nnode{node}.tau_f = {tau}\n",
            grid.join(",")
        );
        let a = Config::parse(&text).unwrap();
        let n = a.normalize();
        let b = Config::parse(&n).unwrap();
        prop_assert_eq!(b.normalize(), n.clone());
        prop_assert_eq!(b.float("node.gain"), gain);
        prop_assert_eq!(b.float("sim.step"), step);
        prop_assert_eq!(b.int("seed"), seed);
    }
}
