//! Spectrum groups and factor types of quantum Markov states.
//!
//!     cargo run --example markov_types

use fcs::fixtures::{diagonal_markov, example_product_three_level, solve_diagonal_markov};
use fcs::markovtype::{classify_exact, classify_type, MarkovSpec, TypeOptions};
use fcs::FcsTriple;

fn show(name: &str, phi: &FcsTriple) -> fcs::Result<()> {
    let spec = MarkovSpec::from_triple(phi)?;
    let g = spec.spectrum_group(phi.tolerances());
    let t = classify_type(phi, Some(&spec), TypeOptions::default())?;
    println!("{name}");
    println!(
        "  range blocks (m, d): {:?}",
        spec.range
            .mults
            .iter()
            .zip(&spec.range.dims)
            .collect::<Vec<_>>()
    );
    println!("  generators: {:?}", g.generators);
    println!("  group: {:?} λ = {:?}", g.kind, g.lambda);
    println!("  type: {} λ = {:?}", t.label.as_str(), t.lambda);
    Ok(())
}

fn main() -> fcs::Result<()> {
    show(
        "three-level product, λ = 1/2",
        &example_product_three_level(0.5)?,
    )?;
    show("diagonal chain (0.4, 0.2)", &diagonal_markov(0.4, 0.2)?)?;
    let (l1, l2) = solve_diagonal_markov(0.5, 3.0)?;
    show(
        &format!("diagonal chain ({l1:.6}, {l2:.6})"),
        &diagonal_markov(l1, l2)?,
    )?;

    // ln 2 and −ln 6 generate a dense subgroup: log 2 / log 3 is irrational
    let exact = classify_exact(&[(2, 1), (3, 1)], &[vec![1, 0], vec![-1, -1]])?;
    println!("exact: {:?}", exact.kind);
    Ok(())
}
