//! End-to-end tests of the `harmonic` binary.

use std::process::{Command, Output};

fn harmonic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_harmonic"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

#[test]
fn search_desk_range_prints_published_hits() {
    let dir = tempfile::tempdir().unwrap();
    let cp = dir.path().join("cp.json");
    let out = dir.path().join("hits.csv");
    let output = harmonic(&[
        "search",
        "--n-list",
        "2..46",
        "--from",
        "47",
        "--to",
        "1000",
        "--threads",
        "2",
        "--checkpoint",
        cp.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "stderr: {}", stderr(&output));
    let text = stdout(&output);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 17);
    assert_eq!(lines[0], "61,6,10");
    assert!(lines.contains(&"577,24,24"));
    assert_eq!(lines[16], "911,19,47");
    // hit log got the same rows plus a header
    let logged = std::fs::read_to_string(&out).unwrap();
    assert_eq!(logged, format!("p,N,m\n{}\n", lines.join("\n")));
}

#[test]
fn search_single_n_window() {
    let dir = tempfile::tempdir().unwrap();
    let output = harmonic(&[
        "search",
        "--n-list",
        "24",
        "--from",
        "130",
        "--to",
        "140",
        "--checkpoint",
        dir.path().join("cp.json").to_str().unwrap(),
        "--out",
        dir.path().join("h.csv").to_str().unwrap(),
    ]);
    assert!(output.status.success());
    assert_eq!(stdout(&output), "137,24,5\n");
}

#[test]
fn search_empty_range_is_fine() {
    let dir = tempfile::tempdir().unwrap();
    let output = harmonic(&[
        "search",
        "--from",
        "47",
        "--to",
        "47",
        "--checkpoint",
        dir.path().join("cp.json").to_str().unwrap(),
        "--out",
        dir.path().join("h.csv").to_str().unwrap(),
    ]);
    assert!(output.status.success());
    assert_eq!(stdout(&output), "");
}

#[test]
fn eval_prints_p_n_m_residue_method() {
    let cases = [
        (
            &["eval", "--p", "61", "--n", "6", "--method", "formula"][..],
            "61 6 10 0 formula\n",
        ),
        (
            &["eval", "--p", "19", "--n", "9", "--method", "pipeline"][..],
            "19 9 2 11 pipeline\n",
        ),
        (
            &["eval", "--p", "7", "--n", "2", "--method", "oracle"][..],
            "7 1 2 5 oracle\n",
        ),
        (
            &["eval", "--p", "9973", "--n", "100", "--method", "direct"][..],
            // value pinned by the oracle path below
            "",
        ),
    ];
    for (args, expect) in cases {
        let output = harmonic(args);
        assert!(output.status.success(), "args {args:?}");
        if !expect.is_empty() {
            assert_eq!(stdout(&output), expect, "args {args:?}");
        }
    }
    // direct and oracle agree on the same index
    let direct = stdout(&harmonic(&[
        "eval", "--p", "9973", "--n", "100", "--method", "direct",
    ]));
    let oracle = stdout(&harmonic(&[
        "eval", "--p", "9973", "--n", "100", "--method", "oracle",
    ]));
    assert_eq!(
        direct.split_whitespace().nth(3),
        oracle.split_whitespace().nth(3)
    );
}

#[test]
fn eval_usage_errors_exit_2() {
    let output = harmonic(&["eval", "--p", "61", "--n", "7", "--method", "formula"]);
    assert_eq!(output.status.code(), Some(2));
    assert!(stderr(&output).contains("supported N"));

    let output = harmonic(&["eval", "--p", "91", "--n", "6", "--method", "formula"]);
    assert_eq!(output.status.code(), Some(2));

    let output = harmonic(&["eval", "--p", "43", "--n", "24", "--method", "pipeline"]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn scan_finds_published_examples() {
    let output = harmonic(&["scan", "--k", "12", "--r", "1", "--n-max", "200"]);
    assert!(output.status.success());
    assert_eq!(
        stdout(&output),
        "k,r,n,divisor,divisor_is_prime\n12,1,10,121,false\n"
    );

    let output = harmonic(&[
        "scan",
        "--k",
        "2",
        "--r",
        "1",
        "--n-max",
        "600",
        "--primes-only",
    ]);
    assert!(output.status.success());
    assert!(stdout(&output).contains("2,1,546,1093,true"));

    let output = harmonic(&["scan", "--k", "1", "--r", "0", "--n-max", "5"]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn verify_known_below_one_million_passes() {
    let output = harmonic(&["verify-known", "--max-p", "1000000"]);
    assert!(output.status.success(), "stderr: {}", stderr(&output));
    let text = stdout(&output);
    assert!(text.contains("N=3  p=11"));
    assert!(text.contains("0 failures"));
    assert!(!text.contains("FAIL"));
}

#[test]
fn verify_known_deep_cross_checks_all_classes() {
    // tiny --max-p so the deep pass supplies the large formula zeros and
    // the direct-summation cross-checks of every brute-force-class entry
    let output = harmonic(&["verify-known", "--max-p", "100", "--deep"]);
    assert!(output.status.success(), "stderr: {}", stderr(&output));
    let text = stdout(&output);
    assert!(text.contains("p=31251349243"));
    assert!(text.contains("deep-formula"));
    assert!(text.contains("p=212084723"));
    assert!(text.contains("deep-direct"));
    assert!(text.contains("0 failures"));
}

#[test]
fn report_shapes_and_figure_data() {
    let dir = tempfile::tempdir().unwrap();
    let hits = dir.path().join("hits.csv");
    std::fs::write(
        &hits,
        "p,N,m\n61,6,10\n137,23,5\n137,24,5\n1093,2,546\n1093,4,273\n",
    )
    .unwrap();
    let output = harmonic(&["report", "--hits", hits.to_str().unwrap(), "--figure-data"]);
    assert!(output.status.success());
    let text = stdout(&output);
    assert!(text.contains("# hits per N\nN,p\n2,1093\n4,1093\n6,61\n23,137\n24,137\n"));
    assert!(text.contains(
        "# least divisor per N, ascending p\np,N\n61,6\n137,23\n137,24\n1093,2\n1093,4\n"
    ));
    let figure: Vec<&str> = text
        .lines()
        .skip_while(|l| *l != "rank,log_p")
        .skip(1)
        .collect();
    assert_eq!(figure.len(), 5);
    let logs: Vec<f64> = figure
        .iter()
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert!(logs.windows(2).all(|w| w[0] <= w[1]));
    assert!(logs.iter().all(|&v| v > 0.0));

    let output = harmonic(&[
        "report",
        "--hits",
        hits.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert!(output.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&output)).unwrap();
    assert_eq!(doc["per_n"]["6"], serde_json::json!([61]));
    assert_eq!(doc["least_divisors"][0]["p"], 61);
}

#[test]
fn report_empty_file_is_empty_report() {
    let dir = tempfile::tempdir().unwrap();
    let hits = dir.path().join("empty.csv");
    std::fs::write(&hits, "").unwrap();
    let output = harmonic(&["report", "--hits", hits.to_str().unwrap()]);
    assert!(output.status.success());
}

#[test]
fn report_names_malformed_line() {
    let dir = tempfile::tempdir().unwrap();
    let hits = dir.path().join("bad.csv");
    std::fs::write(&hits, "p,N,m\n61,6,10\noops\n").unwrap();
    let output = harmonic(&["report", "--hits", hits.to_str().unwrap()]);
    assert!(!output.status.success());
    assert!(stderr(&output).contains("line 3"));
}

#[test]
fn resume_after_interrupt_via_cli_matches_single_run() {
    let dir = tempfile::tempdir().unwrap();
    let cp = dir.path().join("cp.json");
    let out = dir.path().join("hits.csv");
    let run = |extra_to: &str| {
        harmonic(&[
            "search",
            "--n-list",
            "2..46",
            "--from",
            "47",
            "--to",
            extra_to,
            "--chunk-size",
            "200",
            "--checkpoint",
            cp.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ])
    };
    // same range twice: the second run resumes a finished checkpoint
    let first = run("2000");
    assert!(first.status.success());
    let second = run("2000");
    assert!(second.status.success());
    assert_eq!(stdout(&first), stdout(&second));
    // altered N set is refused
    let refused = harmonic(&[
        "search",
        "--n-list",
        "2..10",
        "--from",
        "47",
        "--to",
        "2000",
        "--checkpoint",
        cp.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(refused.status.code(), Some(1));
    assert!(stderr(&refused).contains("refusing to resume"));
}
