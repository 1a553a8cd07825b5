use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output};

use mlcentrality::cli::{ConvergenceOutput, NetworkInfo, RankOutput};
use mlcentrality::ingest::{write_edge_list, RandomNetwork};

fn mlcent(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mlcent")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn temp_file(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("mlcent-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::File::create(&path).unwrap().write_all(contents.as_bytes()).unwrap();
    path
}

#[test]
fn rank_example1_top10() {
    let o = mlcent(&["rank", "--builtin", "example1", "--measure", "mtc", "--beta", "1", "--mode", "exact", "--top", "10"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let lines: Vec<_> = out.lines().collect();
    assert_eq!(lines.len(), 11);
    assert_eq!(lines[0], "rank,node,layer,score");
    assert_eq!(lines[1], "1,2,2,17.2450");
    assert_eq!(lines[10], "10,4,2,4.2550");
}

#[test]
fn katz_both_modes_agree_at_full_dimension() {
    let o = mlcent(&["rank", "--builtin", "example1", "--measure", "mkc", "--alpha", "0.5rel", "--mode", "both"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let mut rows = out.lines();
    assert_eq!(rows.next().unwrap(), "rank,node,layer,exact,krylov,abs_diff");
    let mut count = 0;
    for row in rows {
        let diff: f64 = row.rsplit(',').next().unwrap().parse().unwrap();
        assert!(diff <= 1e-8, "{row}");
        count += 1;
    }
    assert_eq!(count, 10);
}

#[test]
fn json_output_round_trips() {
    let o = mlcent(&["rank", "--builtin", "example1", "--measure", "msc-res", "--mode", "both", "--format", "json", "--augment", "ones"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let doc: RankOutput = serde_json::from_str(&text).unwrap();
    let again = serde_json::to_string_pretty(&doc).unwrap() + "\n";
    assert_eq!(again, text);
    assert_eq!(doc.scores[0].score, 1.2165);
    assert!(doc.diagnostics.unwrap().lambda_max.is_some());
}

#[test]
fn output_is_reproducible_across_thread_counts() {
    // More than 4096 rows, so sparse products take the parallel path.
    let a = RandomNetwork { n_nodes: 2100, n_layers: 2, n_edges: 6000, weights: Some((0.5, 1.5)), seed: 5 }
        .build()
        .unwrap();
    let mut text = Vec::new();
    write_edge_list(&a, &mut text).unwrap();
    let path = temp_file("big.mlnet", std::str::from_utf8(&text).unwrap());
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_mlcent"))
            .env("MLCENT_THREADS", threads)
            .args(["rank", "--input", path.to_str().unwrap(), "--mode", "krylov", "--m", "8", "--measure", "mkc", "--precision", "15", "--format", "json"])
            .output()
            .unwrap()
    };
    let (one, four) = (run("1"), run("4"));
    assert!(one.status.success(), "{}", stderr(&one));
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(run("1").stdout, one.stdout);
    assert_eq!(run("zero").status.code(), Some(3));
}

#[test]
fn exit_codes() {
    let empty = temp_file("empty.mlnet", "mlnet 3 2 undirected unweighted\n");
    let o = mlcent(&["rank", "--input", empty.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("zero tensor"));

    let broken = temp_file("broken.mlnet", "mlnet 3 2 undirected unweighted\n1 1 2\n");
    let o = mlcent(&["rank", "--input", broken.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 2"));

    assert_eq!(mlcent(&["rank", "--input", "/nonexistent/file.mlnet"]).status.code(), Some(2));
    assert_eq!(mlcent(&["rank", "--builtin", "example1", "--measure", "mkc", "--alpha", "1.5rel"]).status.code(), Some(3));
    assert_eq!(mlcent(&["rank", "--builtin", "example1", "--beta", "1e6"]).status.code(), Some(4));

    let huge = temp_file("huge.mlnet", "mlnet 5001 1 undirected unweighted\n1 1 2 1\n");
    let o = mlcent(&["convergence", "--input", huge.to_str().unwrap(), "--m-max", "2"]);
    assert_eq!(o.status.code(), Some(5));
    assert!(stderr(&o).contains("--stabilize"));
    let o = mlcent(&["rank", "--input", huge.to_str().unwrap(), "--mode", "krylov", "--stabilize", "--m-max", "3", "--top", "2"]);
    assert!(o.status.success(), "{}", stderr(&o));
}

#[test]
fn convergence_table() {
    let o = mlcent(&["convergence", "--builtin", "example1", "--measure", "mtc", "--beta", "1", "--m-max", "10", "--format", "json"]);
    assert!(o.status.success());
    let doc: ConvergenceOutput = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc.rows.len(), 10);
    assert!(doc.rows[9].error <= 1e-8);
    assert!(doc.rows[9].error < doc.rows[0].error);

    let o = mlcent(&["convergence", "--builtin", "example1", "--m-max", "1"]);
    let out = stdout(&o);
    assert_eq!(out.lines().collect::<Vec<_>>().len(), 2);
    assert!(out.starts_with("m,inf_error\n1,"));
}

#[test]
fn info_summaries() {
    let o = mlcent(&["info", "--builtin", "example1"]);
    let out = stdout(&o);
    for needle in ["n_nodes,5", "n_layers,2", "edges,11", "symmetric,true", "lambda_max,2.455929"] {
        assert!(out.contains(needle), "{needle} missing in\n{out}");
    }

    let empty = temp_file("zero.mlnet", "mlnet 2 2 undirected unweighted\n");
    let o = mlcent(&["info", "--input", empty.to_str().unwrap(), "--format", "json"]);
    assert!(o.status.success());
    let info: NetworkInfo = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(info.lambda_max.is_none());
    assert!(info.lambda_error.unwrap().contains("zero tensor"));

    // 2 intralayer edges plus one coupling edge per node between the two layers.
    let coupled = temp_file("coupled.mlnet", "mlnet 3 2 undirected unweighted\ncouple 1\n1 1 2 1\n2 2 3 2\n");
    let o = mlcent(&["info", "--input", coupled.to_str().unwrap(), "--format", "json"]);
    let info: NetworkInfo = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(info.edges, 5);
}

#[test]
fn subgraph_nodes_and_pairs() {
    let o = mlcent(&["rank", "--builtin", "example1", "--measure", "msc-exp", "--nodes", "5:1,5:2,4:2", "--mode", "krylov", "--m", "4", "--block-size", "2", "--augment", "random"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let rows: Vec<_> = out.lines().skip(1).collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[0].starts_with("1,5,1,2.500") && rows[1].starts_with("2,5,2,2.500"));

    let o = mlcent(&["rank", "--builtin", "example1", "--measure", "pair", "--from", "5:1", "--to", "4:1", "--pair-resolvent", "--format", "json"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let doc: RankOutput = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(doc.diagnostics.unwrap().value.is_some());
}
