//! Criterion 11 of the acceptance gate: every command, rerun with the same
//! inputs and master seed, writes byte-identical output files. Criteria
//! 1 through 10 live in the core crate's acceptance tests.

mod common;

use common::{assert_dirs_identical, run_ok};

#[test]
fn criterion_11_reruns_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();

    let synth = [
        "synth", "--nodes", "40", "--communities", "3", "--snapshots", "4", "--p-in", "0.3",
        "--p-out", "0.03", "--churn", "0.1", "--seed", "9", "--out",
    ];
    run_ok(&[&synth[..], &["s1"]].concat(), dir);
    run_ok(&[&synth[..], &["s2"]].concat(), dir);
    assert_dirs_identical(&dir.join("s1"), &dir.join("s2"));

    let ingest = ["ingest", "--input", "s1/graph.txt", "--out"];
    let stdout_a = run_ok(&[&ingest[..], &["i1"]].concat(), dir);
    let stdout_b = run_ok(&[&ingest[..], &["i2"]].concat(), dir);
    assert_eq!(stdout_a, stdout_b, "ingest stdout differs between reruns");
    assert_dirs_identical(&dir.join("i1"), &dir.join("i2"));

    // sampling-based embedder plus per-pair maps: covers the RNG-heavy path
    std::fs::write(
        dir.join("embed.cfg"),
        "walks_per_node=2\nwalk_length=10\nwindow=3\n",
    )
    .unwrap();
    let embed = [
        "embed", "--config", "embed.cfg", "--input", "s1/graph.txt", "--model", "HeterLT",
        "--embedder", "randwalk", "--dim", "6", "--smoothing", "wct", "--theta", "0.4", "--seed",
        "21", "--out",
    ];
    run_ok(&[&embed[..], &["e1"]].concat(), dir);
    run_ok(&[&embed[..], &["e2"]].concat(), dir);
    assert_dirs_identical(&dir.join("e1"), &dir.join("e2"));

    // all five models through the full protocol, including factorization
    let evaluate = [
        "evaluate", "--input", "s1/graph.txt", "--model", "all", "--embedder", "tsvd", "--dim",
        "6", "--repeats", "2", "--seed", "5", "--out",
    ];
    run_ok(&[&evaluate[..], &["v1"]].concat(), dir);
    run_ok(&[&evaluate[..], &["v2"]].concat(), dir);
    assert_dirs_identical(&dir.join("v1"), &dir.join("v2"));

    let sweep = [
        "sweep-dim", "--input", "s1/graph.txt", "--model", "RET", "--embedder", "tsvd", "--dims",
        "4,6", "--repeats", "2", "--seed", "5", "--out",
    ];
    run_ok(&[&sweep[..], &["w1"]].concat(), dir);
    run_ok(&[&sweep[..], &["w2"]].concat(), dir);
    assert_dirs_identical(&dir.join("w1"), &dir.join("w2"));

    println!(
        "ACCEPTANCE 11 PASS synth, ingest, embed, evaluate, and sweep-dim reruns each produced byte-identical outputs"
    );
}
