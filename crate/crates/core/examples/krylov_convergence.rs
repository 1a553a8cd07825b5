//! Error of the global Krylov approximation to `exp(beta A) *_2 ones` as the number of
//! steps grows, on a random network with 640 node-layer pairs.

use mlcentrality::centrality::{total_communicability_per_node, Mode, ShiftConvention};
use mlcentrality::ingest::RandomNetwork;

fn main() -> mlcentrality::Result<()> {
    let a = RandomNetwork { n_nodes: 20, n_layers: 32, n_edges: 674, weights: Some((1.0, 5.0)), seed: 0xe2 }.build()?;
    let beta = 0.4;
    let exact = total_communicability_per_node(&a, beta, Mode::Exact, ShiftConvention::Full)?;

    println!("{:>3}  {:>12}  top-10 overlap", "m", "inf error");
    for m in 1..=12 {
        let approx = total_communicability_per_node(&a, beta, Mode::Krylov { m }, ShiftConvention::Full)?;
        let err = exact
            .scores
            .iter()
            .zip(&approx.scores)
            .map(|(e, k)| (e.score - k.score).abs())
            .fold(0.0, f64::max);
        let overlap = approx.top(10).iter().filter(|i| exact.top(10).contains(i)).count();
        println!("{m:>3}  {err:>12.3e}  {overlap}/10");
    }
    Ok(())
}
