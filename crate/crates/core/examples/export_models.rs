//! Writes the bundled model files.
//!
//!     cargo run --example export_models -- crates/core/models

use std::path::PathBuf;

use fcs::cli::model::{
    from_matrix, ExactRational, GaugeSpec, MarkovHint, ModelFile, SCHEMA_VERSION,
};
use fcs::fixtures::{
    classical_chain, diagonal_markov, example_product_three_level, product_markov, product_state,
    random_markov, solve_diagonal_markov,
};
use fcs::linalg::{c, real_diag, CMat};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn markov(mut m: ModelFile) -> ModelFile {
    m.markov = Some(MarkovHint { range_blocks: None });
    m
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "models".into()));
    std::fs::create_dir_all(&dir)?;
    let mut out: Vec<(&str, ModelFile)> = Vec::new();

    out.push((
        "product.json",
        ModelFile::from_triple(&product_state(&real_diag(&[0.3, 0.7]))?),
    ));
    out.push((
        "classical_identity.json",
        ModelFile::from_triple(&classical_chain(
            &[vec![1.0, 0.0], vec![0.0, 1.0]],
            Some(&[0.5, 0.5]),
        )?),
    ));
    out.push((
        "classical_period2.json",
        ModelFile::from_triple(&classical_chain(
            &[vec![0.0, 1.0], vec![1.0, 0.0]],
            Some(&[0.5, 0.5]),
        )?),
    ));
    out.push((
        "classical_chain.json",
        ModelFile::from_triple(&classical_chain(&[vec![0.4, 0.6], vec![0.8, 0.2]], None)?),
    ));
    out.push((
        "tracial.json",
        markov(ModelFile::from_triple(&product_markov(&real_diag(&[
            0.5, 0.5,
        ]))?)),
    ));

    let mut three = markov(ModelFile::from_triple(&example_product_three_level(0.5)?));
    three.gauge = Some(GaugeSpec::DiagonalCyclic {
        phases: vec![[2, 3], [3, 2]],
    });
    out.push(("three_level_product.json", three));

    let mut diag = markov(ModelFile::from_triple(&diagonal_markov(0.4, 0.2)?));
    diag.markov = Some(MarkovHint {
        range_blocks: Some(vec![[1, 1], [1, 1]]),
    });
    // ln 2 and −ln 6 over the basis {2, 3}
    diag.exact_rational = Some(ExactRational {
        basis: vec![[2, 1], [3, 1]],
        generators: vec![vec![1, 0], vec![-1, -1]],
    });
    out.push(("diagonal_markov.json", diag));

    let (l1, l2) = solve_diagonal_markov(0.5, 3.0)?;
    let mut root = markov(ModelFile::from_triple(&diagonal_markov(l1, l2)?));
    root.gauge = Some(GaugeSpec::DiagonalCyclic {
        phases: vec![[2, 6]],
    });
    out.push(("diagonal_markov_half.json", root));

    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut rotated = markov(ModelFile::from_triple(&random_markov(&mut rng, 2, false)?));
    rotated.gauge = Some(GaugeSpec::Unitaries {
        generators: vec![from_matrix(&real_diag(&[1.0, -1.0]))],
    });
    out.push(("noncovariant.json", rotated));

    // Choi matrix of A ⊗ c ↦ tr(A·diag(1.2, −0.2))·c on 𝔠 = ℂ
    out.push((
        "bad_choi.json",
        ModelFile {
            schema_version: SCHEMA_VERSION,
            site_dim: 2,
            memory_dims: vec![1],
            kraus: None,
            choi: Some(from_matrix(&real_diag(&[1.2, -0.2]))),
            rho: vec![from_matrix(&real_diag(&[1.0]))],
            markov: None,
            gauge: None,
            exact_rational: None,
            tolerances: None,
        },
    ));

    let mut bad_rho =
        ModelFile::from_triple(&classical_chain(&[vec![0.4, 0.6], vec![0.8, 0.2]], None)?);
    bad_rho.rho = vec![
        from_matrix(&CMat::from_element(1, 1, c(0.5, 0.0))),
        from_matrix(&CMat::from_element(1, 1, c(0.5, 0.0))),
    ];
    out.push(("bad_rho.json", bad_rho));

    for (name, m) in out {
        let path = dir.join(name);
        std::fs::write(&path, m.to_json() + "\n")?;
        println!("wrote {}", path.display());
    }
    Ok(())
}
