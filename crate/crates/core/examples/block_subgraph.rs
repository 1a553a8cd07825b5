//! Subgraph centralities of a handful of node-layer pairs with the block Krylov
//! process, and the pairwise communicabilities that come with them for free.

use mlcentrality::centrality::{subgraph_centralities, BlockOptions, Mode};
use mlcentrality::ingest::RandomNetwork;
use mlcentrality::krylov::{Augmentation, DEFAULT_AUGMENTATION_SEED};
use mlcentrality::matrix_functions::FunctionSpec;
use mlcentrality::tensor::TensorIndex;

fn main() -> mlcentrality::Result<()> {
    let a = RandomNetwork { n_nodes: 50, n_layers: 4, n_edges: 400, weights: None, seed: 11 }.build()?;
    let nodes: Vec<TensorIndex> = [(3, 1), (17, 1), (17, 2), (42, 3), (8, 4), (29, 4)]
        .into_iter()
        .map(|(n, l)| TensorIndex::new(n, l))
        .collect();
    let spec = FunctionSpec::Exp { beta: 0.5 };
    let block = BlockOptions { block_size: 3, augmentation: Augmentation::Random { seed: DEFAULT_AUGMENTATION_SEED } };

    let exact = subgraph_centralities(&a, &nodes, &spec, Mode::Exact, block)?;
    for m in [2, 4, 8] {
        let approx = subgraph_centralities(&a, &nodes, &spec, Mode::Krylov { m }, block)?;
        let err = exact
            .scores
            .iter()
            .zip(&approx.scores)
            .map(|(e, k)| (e.score - k.score).abs())
            .fold(0.0, f64::max);
        println!("m = {m}: max error {err:.2e}");
    }

    let approx = subgraph_centralities(&a, &nodes, &spec, Mode::Krylov { m: 8 }, block)?;
    let pairs = approx.pairwise.as_ref().expect("subgraph measures carry pairwise values");
    println!("\npairwise communicability (m = 8)");
    for (i, row) in pairs.iter().enumerate() {
        let label = format!("({},{})", nodes[i].node, nodes[i].layer);
        let cells: Vec<String> = row.iter().map(|v| format!("{v:8.4}")).collect();
        println!("{label:>8} {}", cells.join(" "));
    }
    Ok(())
}
