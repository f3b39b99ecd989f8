//! End-to-end tests against the built binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn binary() -> &'static str {
    env!("CARGO_BIN_EXE_ratiolist")
}

fn run_ok(args: &[&str]) -> Output {
    let out = Command::new(binary()).args(args).output().expect("spawn");
    assert!(
        out.status.success(),
        "command failed: {:?}\nstdout: {}\nstderr: {}",
        args,
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn scratch_dir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join("ratiolist-cli-tests").join(name);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn capacity_text_output_contains_closed_form() {
    let out = run_ok(&["capacity", "--channel", "bec:0.3"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("[capacity] ok"), "{text}");
    assert!(text.contains("capacity_bits"), "{text}");
    assert!(text.contains("6.9999999"), "{text}"); // 0.7 bits
    assert!(text.contains("wall_clock_secs"), "{text}");
}

#[test]
fn capacity_of_the_reference_bsc_prints_its_known_value() {
    let out = run_ok(&["capacity", "--channel", "bsc:0.11"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("5.0008404"), "0.50009 bits expected: {text}");
}

#[test]
fn iterated_log_ratio_flows_through_exact() {
    let out = run_ok(&[
        "exact",
        "--channel",
        "bsc:0.2",
        "--code",
        "random:12",
        "--n",
        "3",
        "--metric",
        "hamming",
        "--ratio",
        "iterated-log",
        "--seed",
        "2",
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("ratio                    iterated_log"), "{text}");
    // r = ln 12 = 2.4849, permitted list floor(12/r) = 4
    assert!(text.contains("list_size                4"), "{text}");
    assert!(text.contains("identity_residual"), "{text}");
}

#[test]
fn capacity_erasures_only_support_search() {
    let out = run_ok(&[
        "capacity",
        "--channel",
        "bec:0.3",
        "--metric",
        "erasures-only",
        "--n",
        "2",
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("erasures_only_bits_per_use 7.0000000000000007e-1"), "{text}");
    let exhaustive_line = text
        .lines()
        .find(|l| l.trim_start().starts_with("exhaustive"))
        .unwrap();
    assert!(exhaustive_line.ends_with("true"), "{text}");
}

#[test]
fn records_output_is_byte_identical_across_reruns() {
    let dir = scratch_dir("repro");
    let out_a = dir.join("a.records");
    let out_b = dir.join("b.records");
    let args = |path: &Path| {
        vec![
            "simulate".to_string(),
            "--channel".into(),
            "bsc:0.11".into(),
            "--metric".into(),
            "matched".into(),
            "--n".into(),
            "8".into(),
            "--rate-bits".into(),
            "0.5".into(),
            "--theta-bits".into(),
            "0.25".into(),
            "--trials".into(),
            "2000".into(),
            "--seed".into(),
            "7".into(),
            "--spectrum-trials".into(),
            "500".into(),
            "--format".into(),
            "records".into(),
            "--out".into(),
            path.display().to_string(),
        ]
    };
    run_ok(&args(&out_a).iter().map(String::as_str).collect::<Vec<_>>());
    run_ok(&args(&out_b).iter().map(String::as_str).collect::<Vec<_>>());
    let a = read(&out_a);
    assert_eq!(a, read(&out_b));
    assert!(a.contains("command=simulate"));
    assert!(a.contains("rank_spectrum_q01="));
    assert!(!a.contains("wall_clock"));
}

#[test]
fn sweep_csv_has_header_and_one_row_per_grid_point() {
    let dir = scratch_dir("sweep");
    let out = dir.join("sweep.csv");
    run_ok(&[
        "sweep",
        "--channel",
        "bsc:0.11",
        "--n",
        "4,6",
        "--rate-bits",
        "0.4,0.6",
        "--theta-bits",
        "0.25",
        "--trials",
        "200",
        "--seed",
        "5",
        "--format",
        "csv",
        "--out",
        out.to_str().unwrap(),
    ]);
    let csv = read(&out);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 1 + 4, "header plus 2x2 grid rows: {csv}");
    assert!(lines[0].starts_with("command,version,rng,status,grid_index,"));
    for (i, line) in lines[1..].iter().enumerate() {
        assert!(line.contains(&format!("sweep,0.1.0,splitmix64-counter-v1,ok,{i},")));
    }
}

#[test]
fn empty_sweep_grid_yields_header_only_csv() {
    let dir = scratch_dir("empty-sweep");
    let out = dir.join("empty.csv");
    run_ok(&[
        "sweep",
        "--channel",
        "bsc:0.11",
        "--n",
        "",
        "--rate-bits",
        "0.5",
        "--theta-bits",
        "0.25",
        "--format",
        "csv",
        "--out",
        out.to_str().unwrap(),
    ]);
    let csv = read(&out);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 1, "header only: {csv}");
    assert!(lines[0].starts_with("command,version,rng,status,grid_index,"));
    assert!(lines[0].ends_with("counting_std_err"));
}

#[test]
fn config_file_drives_a_run_and_flags_override() {
    let dir = scratch_dir("config");
    let cfg = dir.join("exp.cfg");
    std::fs::write(
        &cfg,
        "# experiment\nchannel = bsc:0.11\nn = 6\nrate-bits = 0.5\ntheta-bits = 0.25\n\
         trials = 500\nseed = 11\n",
    )
    .unwrap();
    let out_file = dir.join("run.records");
    run_ok(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--trials",
        "250",
        "--format",
        "records",
        "--out",
        out_file.to_str().unwrap(),
    ]);
    let records = read(&out_file);
    assert!(records.contains("trials=250"), "flag beats file: {records}");
    assert!(records.contains("seed=11"), "file fills gaps: {records}");
}

#[test]
fn channel_and_codebook_files_round_trip_through_exact() {
    let dir = scratch_dir("files");
    let channel_file = dir.join("channel.txt");
    std::fs::write(&channel_file, "# 2x2\n2 2\n0.8 0.2\n0.2 0.8\n").unwrap();
    let code_file = dir.join("code.txt");
    std::fs::write(&code_file, "3 4\n0 0 0\n0 1 1\n1 0 1\n1 1 0\n").unwrap();
    let out = run_ok(&[
        "exact",
        "--channel",
        channel_file.to_str().unwrap(),
        "--code",
        code_file.to_str().unwrap(),
        "--metric",
        "hamming",
        "--ratio",
        "constant:2",
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("identity_residual        0.0000000000000000e0"), "{text}");
}

#[test]
fn bounds_reports_all_three_bounds() {
    let out = run_ok(&[
        "bounds",
        "--channel",
        "bsc:0.2",
        "--code",
        "random:8",
        "--metric",
        "hamming",
        "--n",
        "4",
        "--rate-bits",
        "0.75",
        "--theta-bits",
        "0.25",
        "--seed",
        "3",
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    for key in ["fano_floor", "rc_upper", "converse_ratio_rhs_nats"] {
        assert!(text.contains(key), "{key} missing from: {text}");
    }
}

#[test]
fn idbound_prints_the_list_overflow_floor() {
    let out = run_ok(&[
        "idbound",
        "--capacity-bits",
        "0.5",
        "--id-eps-bits",
        "0.1",
        "--id-delta-bits",
        "0.2",
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("1.6666666666666663e-1") || text.contains("1.6666666666666666e-1"),
        "{text}");
}

#[test]
fn invalid_inputs_fail_with_nonzero_status() {
    let cases: Vec<Vec<&str>> = vec![
        vec!["capacity"],                              // missing channel
        vec!["capacity", "--channel", "bsc:1.5"],      // invalid probability
        vec!["simulate", "--channel", "bsc:0.1"],      // missing n/rate
        vec!["exact", "--channel", "bsc:0.1", "--code", "/no/such/file"],
        vec!["bounds", "--channel", "bsc:0.1", "--code", "random:4", "--n", "3",
             "--rate-bits", "0.2", "--theta-bits", "0.4"], // rate below theta
        vec!["sweep", "--channel", "bsc:0.1", "--n", "4", "--rate-bits", "0.5",
             "--theta-bits", "0.25", "--format", "csv"], // csv without --out
    ];
    for args in cases {
        let out = Command::new(binary()).args(&args).output().expect("spawn");
        assert!(!out.status.success(), "expected failure for {args:?}");
    }
}
