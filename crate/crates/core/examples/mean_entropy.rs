//! Mean entropy from window densities.
//!
//!     cargo run --example mean_entropy

use fcs::fixtures::{classical_chain, product_state, stationary};
use fcs::linalg::real_diag;
use fcs::markovtype::mean_entropy_estimate;

fn main() -> fcs::Result<()> {
    let phi = product_state(&real_diag(&[0.25, 0.75]))?;
    let (h, diffs) = mean_entropy_estimate(&phi, Some(6))?;
    println!(
        "product: s = {h:.9} (−Σ p ln p = {:.9})",
        -(0.25f64 * 0.25f64.ln() + 0.75 * 0.75f64.ln())
    );
    println!("  S(n+1) − S(n): {diffs:.6?}");

    let p = vec![vec![0.4, 0.6], vec![0.8, 0.2]];
    let pi = stationary(&p);
    let rate: f64 = -(0..2)
        .map(|i| {
            pi[i]
                * p[i]
                    .iter()
                    .filter(|&&x| x > 0.0)
                    .map(|&x| x * x.ln())
                    .sum::<f64>()
        })
        .sum::<f64>();
    let (h, _) = mean_entropy_estimate(&classical_chain(&p, None)?, Some(8))?;
    println!("chain: s = {h:.9} (entropy rate {rate:.9})");
    Ok(())
}
