//! The command-line tool as a black box: documents, exit codes and
//! diagnostics.

mod common;

use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use common::{pq, WORKED_MMODULE, WORKED_PQ};
use robinson::document::TreeDocument;
use robinson::fixtures::{flat_abc, non_robinson_four, worked_example};
use robinson::io::{write_matrix, Layout, Separator};
use robinson::DissimilarityMatrix;

fn robinson(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_robinson"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child
        .stdin
        .take()
        .unwrap()
        .write_all(stdin.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn text(m: &DissimilarityMatrix) -> String {
    write_matrix(m, Layout::Full, Separator::Space)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn temp_file(name: &str, contents: &str) -> PathBuf {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn recognize_accepts_the_worked_example() {
    let o = robinson(&["recognize"], &text(&worked_example()));
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["order"], serde_json::json!((1..=12).collect::<Vec<_>>()));
    assert_eq!(v["tree"]["kind"], "pq");

    let o = robinson(&["recognize", "-f", "ascii"], &text(&worked_example()));
    assert_eq!(
        stdout(&o),
        format!("order: 1 2 3 4 5 6 7 8 9 10 11 12\n{WORKED_PQ}\n")
    );
}

#[test]
fn recognize_exit_codes() {
    let o = robinson(&["recognize"], &text(&non_robinson_four()));
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).is_empty());
    assert!(stderr(&o).starts_with("not Robinson"), "{}", stderr(&o));

    let o = robinson(&["recognize"], "0 1 2\n1 0 3\n2 4 0\n");
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3, column 3"), "{}", stderr(&o));

    let o = robinson(&["recognize"], "0 1\n1 zero\n");
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 2, column 3"), "{}", stderr(&o));

    let o = robinson(&["recognize", "-i", "/nonexistent/matrix.txt"], "");
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(robinson(&["frobnicate"], "").status.code(), Some(2));
}

#[test]
fn tree_renderings() {
    let w = text(&worked_example());
    let o = robinson(&["tree", "-t", "pq", "-f", "ascii"], &w);
    assert_eq!(stdout(&o).trim_end(), WORKED_PQ);
    let o = robinson(&["tree", "--tree", "mmodule", "--format", "ascii"], &w);
    assert_eq!(stdout(&o).trim_end(), WORKED_MMODULE);

    let o = robinson(&["tree", "-t", "dendrogram", "-f", "json"], &w);
    let doc = TreeDocument::from_json(&stdout(&o)).unwrap();
    let mut weights: Vec<u64> = doc
        .to_dendrogram(worked_example().scale())
        .unwrap()
        .clusters()
        .iter()
        .map(|c| c.1.raw())
        .collect();
    weights.sort();
    weights.dedup();
    assert_eq!(weights, [1, 2, 5, 6]);

    let o = robinson(&["tree", "-t", "pq", "-f", "dot"], &w);
    assert!(stdout(&o).starts_with("digraph pq {"));
}

#[test]
fn dendrogram_needs_no_robinson_input() {
    let bad = text(&non_robinson_four());
    assert_eq!(
        robinson(&["tree", "-t", "dendrogram"], &bad).status.code(),
        Some(0)
    );
    assert_eq!(robinson(&["tree", "-t", "pq"], &bad).status.code(), Some(1));
    assert_eq!(
        robinson(&["tree", "-t", "mmodule"], &bad).status.code(),
        Some(1)
    );
}

#[test]
fn singleton_matrix_gives_a_leaf() {
    for kind in ["pq", "mmodule", "dendrogram"] {
        let o = robinson(&["tree", "-t", kind], "0\n");
        assert_eq!(o.status.code(), Some(0), "{kind}: {}", stderr(&o));
        let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
        assert_eq!(
            v["root"],
            serde_json::json!({"type": "leaf", "point": 1}),
            "{kind}"
        );
    }
}

#[test]
fn translate_both_ways() {
    let matrix = temp_file("worked.txt", &text(&worked_example()));
    let m = matrix.to_str().unwrap();
    let pq_doc = stdout(&robinson(&["tree", "-t", "pq"], &text(&worked_example())));

    let o = robinson(&["translate", "-m", m, "-f", "ascii"], &pq_doc);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim_end(), WORKED_MMODULE);

    let mt_doc = stdout(&robinson(&["translate", "-m", m], &pq_doc));
    let o = robinson(&["translate", "-m", m, "--to", "pq"], &mt_doc);
    let back = TreeDocument::from_json(&stdout(&o))
        .unwrap()
        .to_pq()
        .unwrap();
    assert!(back.equivalent(&pq(WORKED_PQ)));

    let flat = temp_file("flat.txt", &text(&flat_abc()));
    let flat_mt = stdout(&robinson(&["tree", "-t", "mmodule"], &text(&flat_abc())));
    let o = robinson(
        &["translate", "-m", flat.to_str().unwrap(), "-f", "ascii"],
        &flat_mt,
    );
    assert_eq!(stdout(&o).trim_end(), "Q[ 1 2 3 ]");

    // A tree of a different matrix is refused.
    let o = robinson(&["translate", "-m", flat.to_str().unwrap()], &pq_doc);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("point 4"), "{}", stderr(&o));
}

#[test]
fn generate_is_seeded_and_robinson() {
    assert_eq!(stdout(&robinson(&["generate", "-n", "1"], "")), "0\n");
    let a = robinson(
        &[
            "generate",
            "-n",
            "30",
            "--seed",
            "4",
            "--profile",
            "tie-heavy",
        ],
        "",
    );
    let b = robinson(
        &[
            "generate",
            "-n",
            "30",
            "--seed",
            "4",
            "--profile",
            "tie-heavy",
        ],
        "",
    );
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(robinson(&["recognize"], &stdout(&a)).status.code(), Some(0));
    let up = robinson(&["generate", "-n", "5", "--upper"], "");
    assert_eq!(
        stdout(&up)
            .lines()
            .map(|l| l.split(' ').count())
            .collect::<Vec<_>>(),
        [5, 4, 3, 2, 1]
    );
    assert_eq!(
        robinson(&["generate", "-n", "0"], "").status.code(),
        Some(2)
    );
    assert_eq!(
        robinson(&["generate", "-n", "3", "--profile", "spiky"], "")
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn bench_tables() {
    let o = robinson(&["bench", "-r", "0"], "");
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 1, "header only");
    let o = robinson(&["bench", "--sizes", "16", "-r", "2"], "");
    assert_eq!(stdout(&o).lines().count(), 2);
    let o = robinson(&["bench", "--sizes", "8,16", "-r", "1"], "");
    assert!(stdout(&o).contains("8->16"));
}
