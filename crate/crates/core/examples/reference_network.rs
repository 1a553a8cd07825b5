//! Scores the builtin 5-node, 2-layer network with all four node measures, exactly and
//! with a full-dimension Krylov run.
//!
//! ```text
//! cargo run --example reference_network
//! ```

use mlcentrality::centrality::{MeasureKind, MeasureRequest, Mode};
use mlcentrality::ingest::builtin_example1;
use mlcentrality::tensor::TensorIndex;

fn main() -> mlcentrality::Result<()> {
    let a = builtin_example1();
    let full = Mode::Krylov { m: a.dims().len() };

    let measures = [
        MeasureKind::TotalCommunicabilityPerNode,
        MeasureKind::KatzCentrality,
        MeasureKind::SubgraphCentralityExp,
        MeasureKind::SubgraphCentralityRes,
    ];
    let mut columns = Vec::new();
    for kind in measures {
        let request = MeasureRequest::new(kind);
        let exact = request.evaluate(&a, Mode::Exact)?;
        let krylov = request.evaluate(&a, full)?;
        let worst = exact
            .scores
            .iter()
            .zip(&krylov.scores)
            .map(|(e, k)| (e.score - k.score).abs())
            .fold(0.0, f64::max);
        println!("{:8} krylov vs exact: {worst:.2e}", kind.short_name());
        columns.push(exact);
    }

    println!();
    print!("{:>7}", "(i,l)");
    for kind in measures {
        print!("{:>10}", kind.short_name());
    }
    println!();
    for layer in 1..=a.n_layers() {
        for node in 1..=a.n_nodes() {
            let idx = TensorIndex::new(node, layer);
            print!("{:>7}", format!("({node},{layer})"));
            for report in &columns {
                print!("{:>10.4}", report.score(idx).unwrap());
            }
            println!();
        }
    }
    Ok(())
}
