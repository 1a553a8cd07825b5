//! Dominant eigenvalue of a few networks by power iteration.
//!
//! The estimate feeds relative Katz damping (`alpha = c / lambda_max`), so it is checked
//! here against a dense symmetric eigensolver.

use mlcentrality::ingest::{builtin_example1, parse_edge_list, RandomNetwork};
use mlcentrality::matrix_functions::{estimate_lambda_max, DEFAULT_LAMBDA_MAX_ITER, DEFAULT_LAMBDA_TOL};
use mlcentrality::tensor::AdjacencyTensor;
use nalgebra::SymmetricEigen;

fn report(name: &str, a: &AdjacencyTensor) -> mlcentrality::Result<()> {
    let est = estimate_lambda_max(a, DEFAULT_LAMBDA_TOL, DEFAULT_LAMBDA_MAX_ITER)?;
    let reference = SymmetricEigen::new(a.to_dense()).eigenvalues.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    println!(
        "{name:<10} lambda_max = {:.10}  dense = {reference:.10}  iterations = {:>4}  residual = {:.1e}",
        est.lambda_max, est.iterations, est.residual
    );
    Ok(())
}

fn main() -> mlcentrality::Result<()> {
    report("example1", &builtin_example1())?;
    for seed in [1, 2, 3] {
        let a = RandomNetwork { n_nodes: 40, n_layers: 3, n_edges: 300, weights: Some((0.1, 1.0)), seed }.build()?;
        report(&format!("random#{seed}"), &a)?;
    }
    // A bipartite network has eigenvalues +rho and -rho of equal magnitude.
    let path = parse_edge_list("mlnet 4 1 undirected unweighted\n1 1 2 1\n2 1 3 1\n3 1 4 1\n".as_bytes(), Default::default())?;
    report("path P4", &path)
}
