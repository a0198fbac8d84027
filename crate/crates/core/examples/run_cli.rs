//! Drives the `fcstool` commands in-process on the bundled models.
//!
//!     cargo run --example run_cli
//!     cargo run --bin fcstool -- classify crates/core/models/diagonal_markov.json

use std::path::Path;

fn main() {
    let models = Path::new(env!("CARGO_MANIFEST_DIR")).join("models");
    let runs: [&[&str]; 5] = [
        &["validate", "product.json"],
        &["check-factor", "classical_period2.json"],
        &["classify", "diagonal_markov.json"],
        &["correlations", "--max-n", "6", "classical_chain.json"],
        &["gauge", "three_level_product.json"],
    ];
    for args in runs {
        let (cmd, file) = args.split_at(args.len() - 1);
        let path = models.join(file[0]);
        let mut argv = vec!["fcstool"];
        argv.extend_from_slice(cmd);
        let p = path.to_string_lossy().into_owned();
        argv.push(&p);
        let (code, out) = fcs::cli::run(argv);
        println!("$ fcstool {} {}  (exit {code})", cmd.join(" "), file[0]);
        println!("{out}");
    }
}
