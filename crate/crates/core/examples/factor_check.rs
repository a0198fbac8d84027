//! Factor decision, period and ergodic components.
//!
//!     cargo run --example factor_check

use fcs::fixtures::classical_chain;
use fcs::peripheral::{ergodic_components, is_factor, Level};

fn report(name: &str, p: &[Vec<f64>], pi: Option<&[f64]>) -> fcs::Result<()> {
    let phi = classical_chain(p, pi)?.reduced()?;
    let v = is_factor(&phi)?;
    println!(
        "{name:>10}: factor {} period {} center dim {} (iii) {} (iv) {}",
        v.is_factor, v.period, v.center_dim, v.condition_iii, v.condition_iv
    );
    for c in ergodic_components(&phi, Level::FixedPoints)? {
        println!("{:>12}blocks {:?} weight {:.4}", "", c.blocks, c.weight);
    }
    Ok(())
}

fn main() -> fcs::Result<()> {
    report("mixing", &[vec![0.4, 0.6], vec![0.8, 0.2]], None)?;
    report(
        "periodic",
        &[vec![0.0, 1.0], vec![1.0, 0.0]],
        Some(&[0.5, 0.5]),
    )?;
    report(
        "mixture",
        &[vec![1.0, 0.0], vec![0.0, 1.0]],
        Some(&[0.3, 0.7]),
    )?;
    // state 2 is transient and drops out of the support
    report(
        "transient",
        &[
            vec![0.5, 0.5, 0.0],
            vec![0.5, 0.5, 0.0],
            vec![0.2, 0.3, 0.5],
        ],
        None,
    )?;
    Ok(())
}
