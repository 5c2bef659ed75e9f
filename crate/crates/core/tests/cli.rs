use std::process::{Command, Output};

use wmub_core::cli::{run, BasisRow, CheckRow, LineRow, OutputDocument, PartitionRow};

const BIN: &str = env!("CARGO_BIN_EXE_wmub");

fn wmub(args: &str) -> Output {
    Command::new(BIN)
        .args(args.split_whitespace())
        .output()
        .expect("binary runs")
}

fn stdout(args: &str) -> String {
    let out = wmub(args);
    assert_eq!(out.status.code(), Some(0), "{args}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn golden(name: &str) -> String {
    let path = format!("{}/tests/golden/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn lines_matches_golden() {
    assert_eq!(stdout("lines --d1 3 --d2 5"), golden("table1_lines_d15.txt"));
}

#[test]
fn wmub_matches_golden() {
    assert_eq!(stdout("wmub --d1 3 --d2 5"), golden("table2_wmub_d15.txt"));
}

#[test]
fn partitions_match_golden() {
    assert_eq!(
        stdout("partitions --d1 3 --d2 5"),
        golden("table3_partition_lines_d15.txt")
    );
    assert_eq!(
        stdout("partitions --d1 3 --d2 5 --side bases"),
        golden("table4_partition_bases_d15.txt")
    );
}

#[test]
fn json_round_trips() {
    let text = stdout("lines --d1 3 --d2 7 --format json");
    let doc: OutputDocument<LineRow> = serde_json::from_str(&text).unwrap();
    assert_eq!((doc.d, doc.d1, doc.d2, doc.rows.len()), (21, 3, 7, 32));
    assert_eq!(doc.kind, "lines");
    assert_eq!(doc.to_json(), text);

    let text = stdout("wmub --d1 3 --d2 5 --format json");
    let doc: OutputDocument<BasisRow> = serde_json::from_str(&text).unwrap();
    assert_eq!(doc.rows[3].label, "X(10,12|12,13)");
    assert_eq!(doc.to_json(), text);

    let text = stdout("partitions --d1 3 --d2 5 --side bases --format json");
    let doc: OutputDocument<PartitionRow> = serde_json::from_str(&text).unwrap();
    assert_eq!(doc.rows[3].members, vec![4, 9, 13, 19]);
    assert_eq!(doc.to_json(), text);
}

#[test]
fn output_is_deterministic() {
    for args in [
        "lines --d1 5 --d2 7 --format csv",
        "wmub --d1 3 --d2 11 --format json",
        "partitions --d1 3 --d2 5 --side lines --format csv",
    ] {
        assert_eq!(stdout(args), stdout(args), "{args}");
    }
}

#[test]
fn csv_quotes_matrix_labels() {
    let text = stdout("lines --d1 3 --d2 5 --format csv");
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("index,generator,matrix,component1,component1_label,component2,component2_label")
    );
    assert_eq!(
        lines.nth(3),
        Some("4,\"L(3,7)\",\"g(10,12|12,13)\",\"L1(0,1)\",,\"L2(1,3)\",\"g(0,1|-1,-2)\"")
    );
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(reader.records().count(), 24);
}

#[test]
fn verify_passes_and_summarizes() {
    let out = stdout("verify --d1 3 --d2 5");
    assert_eq!(
        out.lines().last(),
        Some("pairs: 276 | d1^{-1/2}:36 d2^{-1/2}:60 d^{-1/2}:180 | duality: OK | redundancy: 1/2")
    );
    let json = stdout("verify --d1 3 --d2 7 --json");
    let doc: OutputDocument<CheckRow> = serde_json::from_str(&json).unwrap();
    assert!(doc.rows.iter().all(|c| c.passed));
}

#[test]
fn verify_fails_below_rounding_noise() {
    let out = wmub("verify --d1 3 --d2 5 --tolerance 1e-15");
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.starts_with("verification failed at "), "{err}");
}

#[test]
fn invalid_dims_exit_two() {
    for args in [
        "lines --d1 5 --d2 5",
        "lines --d1 5 --d2 3",
        "wmub --d1 2 --d2 5",
        "verify --d1 3 --d2 9",
    ] {
        let out = wmub(args);
        assert_eq!(out.status.code(), Some(2), "{args}");
        let err = String::from_utf8(out.stderr).unwrap();
        assert!(
            err.contains("d1 and d2 must be distinct odd primes with d1<d2"),
            "{err}"
        );
    }
}

#[test]
fn usage_errors_exit_two() {
    for args in ["", "lines --d1 3", "lines --d1 3 --d2 5 --format xml", "frobnicate"] {
        assert_eq!(wmub(args).status.code(), Some(2), "{args:?}");
    }
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(
        ["wmub", "verify", "--d1", "3", "--d2", "5", "--tolerance", "-1"],
        &mut out,
        &mut err,
    );
    assert_eq!(code, 2);
}

#[test]
fn in_process_run_matches_binary() {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(["wmub", "wmub", "--d1", "3", "--d2", "5"], &mut out, &mut err);
    assert_eq!(code, 0);
    assert!(err.is_empty());
    assert_eq!(String::from_utf8(out).unwrap(), golden("table2_wmub_d15.txt"));
}
