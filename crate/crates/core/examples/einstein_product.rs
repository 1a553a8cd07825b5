// Einstein products on a small random tensor, checked against the dense matrix view.

use mlcentrality::ingest::RandomNetwork;
use mlcentrality::tensor::{BlockVector, TensorIndex};

fn main() -> mlcentrality::Result<()> {
    let a = RandomNetwork { n_nodes: 4, n_layers: 3, n_edges: 15, weights: Some((0.5, 2.0)), seed: 7 }.build()?;
    let dense = a.to_dense();

    let a2 = a.einstein_tt(&a)?;
    let diff = (a2.to_dense() - &dense * &dense).abs().max();
    println!("A *_2 A vs mat(A)^2: {diff:.1e}");

    let a3 = a.power(3)?;
    println!("trace(A^3) = {:.6}  (6x the weighted triangle count)", a3.trace());
    println!("||A||_F = {:.6}  <A, A> = {:.6}", a.frobenius_norm(), a.inner_product(&a)?);

    // Contracting with a unit block vector extracts one column of the tensor.
    let e = BlockVector::unit(a.dims(), TensorIndex::new(2, 3))?;
    let col = a.einstein_tv(&e)?;
    for idx in a.dims().indices() {
        let v = col.get(idx)?;
        if v != 0.0 {
            println!("A[{},{},2,3] = {v:.4}", idx.node, idx.layer);
        }
    }
    Ok(())
}
