//! Acceptance criterion 9: byte-identical re-runs for identical inputs and
//! seeds, across JSON and CSV outputs and for both file-based and random
//! channels.

use std::path::Path;
use std::process::Command;

fn sdof() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sdof"))
}

fn example_channel_json() -> &'static str {
    r#"{
  "n_t": 3,
  "n_r1": 2,
  "n_r2": 2,
  "n_e": 1,
  "p_bar": 100.0,
  "h1": [[[1.0, 0.0], [0.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0], [0.0, 0.0]]],
  "h2": [[[0.0, 0.0], [1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 0.0], [1.0, 0.0]]]
}"#
}

fn run_to_file(args: &[&str], out: &Path) -> Vec<u8> {
    let status = sdof()
        .args(args)
        .arg("--out")
        .arg(out)
        .status()
        .expect("binary runs");
    assert!(status.success(), "command {args:?} failed");
    std::fs::read(out).expect("output written")
}

#[test]
fn criterion_9_byte_identical_reruns() {
    let dir = tempfile::tempdir().unwrap();
    let channel = dir.path().join("channel.json");
    std::fs::write(&channel, example_channel_json()).unwrap();
    let channel = channel.to_str().unwrap();

    let cases: Vec<Vec<&str>> = vec![
        vec!["region", "--input", channel, "--format", "json"],
        vec!["gsvd", "--input", channel, "--format", "json"],
        vec![
            "scheme", "--input", channel, "--target", "0,1,1", "--format", "json",
        ],
        vec![
            "sweep", "--input", channel, "--target", "0,1,1", "--format", "csv", "--seed", "3",
        ],
        vec![
            "sweep", "--input", channel, "--target", "0,1,1", "--format", "json", "--seed", "3",
        ],
        vec![
            "certify", "--input", channel, "--target", "0,1,1", "--format", "json", "--seed", "7",
        ],
        vec!["converse", "--input", channel, "--format", "json"],
        vec![
            "region", "--random", "4x3x3", "--ne", "1", "--seed", "11", "--format", "json",
        ],
        vec![
            "sweep", "--random", "4x3x3", "--ne", "1", "--seed", "11", "--target", "0,1,1",
            "--format", "csv",
        ],
    ];
    for (i, args) in cases.iter().enumerate() {
        let a = run_to_file(args, &dir.path().join(format!("a{i}")));
        let b = run_to_file(args, &dir.path().join(format!("b{i}")));
        assert_eq!(a, b, "re-run of {args:?} differed");
        assert!(!a.is_empty());
    }
    println!("criterion 9 (byte-identical re-runs across formats and seeds): PASS");
}
