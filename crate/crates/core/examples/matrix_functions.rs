use mlcentrality::ingest::builtin_example1;
use mlcentrality::matrix_functions::{
    apply_spec, dense_expm, effective_diameter, exp_coefficients, resolvent_coefficients, FunctionSpec,
};

// Dense tensor functions on the reference network, and how many walk lengths each
// function effectively weighs.
fn main() -> mlcentrality::Result<()> {
    let h = builtin_example1().to_dense();

    let e = dense_expm(&h, 1.0)?;
    println!("exp(A): entry (1,1),(1,1) = {:.6}, its row sum = {:.6}", e[(0, 0)], e.row(0).sum());

    for spec in [
        FunctionSpec::Exp { beta: 0.5 },
        FunctionSpec::Exp0 { beta: 0.5 },
        FunctionSpec::Resolvent { alpha: 0.2 },
        FunctionSpec::Resolvent0 { alpha: 0.2 },
        FunctionSpec::PowerSeries { coefficients: vec![1.0, 0.5] },
    ] {
        let f = apply_spec(&h, &spec)?;
        println!("{:<50} trace = {:>9.5}", format!("{spec:?}"), f.trace());
    }

    // Past a damping of 1/lambda_max the resolvent series diverges.
    match apply_spec(&h, &FunctionSpec::Resolvent { alpha: 0.5 }) {
        Ok(_) => println!("alpha = 0.5 accepted"),
        Err(err) => println!("alpha = 0.5 rejected: {err}"),
    }

    println!("\ndelta = 1e-3");
    for beta in [0.5, 1.0, 2.0, 4.0] {
        let d = effective_diameter(&exp_coefficients(beta, 200), 1e-3)?;
        println!("  exp, beta = {beta:<4}  diameter {d}");
    }
    for alpha in [0.1, 0.3, 0.9] {
        let d = effective_diameter(&resolvent_coefficients(alpha, 2000), 1e-3)?;
        println!("  res, alpha = {alpha:<3}  diameter {d}");
    }
    Ok(())
}
