use mlcentrality::ingest::{add_interlayer_coupling, parse_edge_list, write_edge_list, NetworkFile, ParseOptions};

const TEXT: &str = "\
# two layers of a directed, weighted network
mlnet 4 2 directed weighted
1 1 2 1 0.5
2 1 3 1 1.5
3 1 1 1 2.0
1 2 4 2 1.0
4 2 4 1 0.25
";

fn main() -> mlcentrality::Result<()> {
    let file = NetworkFile::parse(TEXT.as_bytes(), ParseOptions::default())?;
    println!("header: {:?}", file.header);
    println!("{} edge records", file.edges.len());

    let a = file.to_tensor()?;
    println!("nnz = {}, symmetric = {}", a.nnz(), a.is_symmetric());

    let coupled = add_interlayer_coupling(&a, 1.0)?;
    println!("after coupling every node to itself across layers: nnz = {}", coupled.nnz());

    let mut out = Vec::new();
    write_edge_list(&coupled, &mut out)?;
    print!("\n{}", String::from_utf8_lossy(&out));
    let back = parse_edge_list(out.as_slice(), ParseOptions { strict: true })?;
    assert_eq!(back, coupled);

    // Errors carry the offending line.
    let bad = "mlnet 4 2 directed weighted\n1 1 9 1 1.0\n";
    if let Err(err) = parse_edge_list(bad.as_bytes(), ParseOptions::default()) {
        println!("\nrejected: {err}");
    }
    Ok(())
}
