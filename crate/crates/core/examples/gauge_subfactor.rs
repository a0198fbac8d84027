//! Fixed-point subalgebra of a gauge group and the restricted type.
//!
//!     cargo run --example gauge_subfactor

use fcs::fixtures::example_product_three_level;
use fcs::gauge::{diagonal_cyclic, invariant_subalgebra, subfactor_report};
use fcs::markovtype::MarkovSpec;

fn main() -> fcs::Result<()> {
    let phi = example_product_three_level(0.5)?;
    let spec = MarkovSpec::from_triple(&phi)?;
    // ℤ₃ × ℤ₂ acting by phases on the second and third basis vectors
    let g = diagonal_cyclic(3, &[(1, 3), (2, 2)], 1e-12)?;
    println!("group order {}", g.order());
    for n in 1..=3 {
        let inv = invariant_subalgebra(&g, n, 1e-10)?;
        println!("  {n} sites: invariant dimension {}", inv.dim);
    }
    let r = subfactor_report(&phi, &spec, &g)?;
    println!(
        "ambient {} λ = {:?}",
        r.ambient.label.as_str(),
        r.ambient.lambda
    );
    println!(
        "restricted {} λ = {:?}",
        r.restricted_label.as_str(),
        r.restricted_lambda
    );
    println!("index {:?}", r.index);
    if let Some(note) = r.note {
        println!("note: {note}");
    }
    Ok(())
}
