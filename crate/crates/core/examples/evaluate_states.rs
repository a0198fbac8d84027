//! Expectation values, window densities and correlations.
//!
//!     cargo run --example evaluate_states

use fcs::fixtures::classical_chain;
use fcs::linalg::{real_diag, CMat};
use fcs::peripheral::clustering_rate;

fn main() -> fcs::Result<()> {
    let phi = classical_chain(&[vec![0.4, 0.6], vec![0.8, 0.2]], None)?;
    let z = real_diag(&[1.0, -1.0]);

    println!("<Z>        = {:.6}", phi.evaluate_word(std::slice::from_ref(&z))?.re);
    println!(
        "<Z ⊗ Z>    = {:.6}",
        phi.evaluate_word(&[z.clone(), z.clone()])?.re
    );
    let d2 = phi.window_density(2)?;
    println!("tr D_2     = {:.6}", d2.trace().re);

    for n in 1..=6 {
        let c = phi.correlation(&z, &z, n)?;
        println!("<Z_0 Z_{n}> = {:+.3e}", c.re);
    }
    println!("clustering rate = {:.6}", clustering_rate(&phi)?);

    // a word with an identity in the middle equals the shorter correlation
    let id = CMat::identity(2, 2);
    let w = phi.evaluate_word(&[z.clone(), id, z])?;
    println!("<Z ⊗ I ⊗ Z> = {:.6}", w.re);
    Ok(())
}
