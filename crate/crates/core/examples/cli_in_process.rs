//! Drives the `mlcent` command line in-process and parses its JSON output.

use mlcentrality::cli::{run_from_args, NetworkInfo, RankOutput};

fn run(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("mlcent").chain(args.iter().copied());
    let code = run_from_args(argv, &mut out, &mut err);
    if !err.is_empty() {
        eprint!("{}", String::from_utf8_lossy(&err));
    }
    (code, String::from_utf8(out).unwrap())
}

fn main() {
    let (_, csv) = run(&["rank", "--builtin", "example1", "--measure", "mkc", "--mode", "both", "--top", "5"]);
    print!("{csv}");

    let (_, json) = run(&["rank", "--builtin", "example1", "--measure", "msc-exp", "--format", "json", "--top", "3"]);
    let doc: RankOutput = serde_json::from_str(&json).unwrap();
    println!("\nmsc-exp leader: {:?}", doc.ranking.first());

    let (_, json) = run(&["info", "--builtin", "example1", "--format", "json"]);
    let info: NetworkInfo = serde_json::from_str(&json).unwrap();
    println!("lambda_max = {:?}", info.lambda_max);

    let (code, _) = run(&["rank", "--builtin", "example1", "--measure", "mkc", "--alpha", "2rel"]);
    println!("divergent alpha exits with {code}");
}
