use fcs::algebra::{minimal_projections, AlgElement, FdAlgebra};
use fcs::cli::model::ModelFile;
use fcs::cpmap::compress_kraus;
use fcs::fixtures::{product_state, random_density, random_triple, random_unitary};
use fcs::gauge::{character_count, diagonal_cyclic, twirl_projector};
use fcs::linalg::{self, c, real_diag, CMat};
use fcs::markovtype::{classify_subgroup, GroupKind, Mode};
use fcs::peripheral::states_equal;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn triple(seed: u64) -> fcs::FcsTriple {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        if let Some(t) = random_triple(&mut rng) {
            return t;
        }
    }
}

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMat {
    CMat::from_fn(rows, cols, |_, _| {
        c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn product_state_factorizes(seed in any::<u64>(), n in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dens = random_density(&mut rng, 2);
        let phi = product_state(&dens).unwrap();
        let word: Vec<CMat> = (0..n).map(|_| random_matrix(&mut rng, 2, 2)).collect();
        let expected = word.iter().fold(c(1.0, 0.0), |acc, a| acc * (&dens * a).trace());
        let got = phi.evaluate_word(&word).unwrap();
        prop_assert!((got - expected).norm() < 1e-12);
    }

    #[test]
    fn windows_are_consistent_densities(seed in any::<u64>()) {
        let phi = triple(seed);
        let d = phi.site_dim();
        let d2 = phi.window_density(2).unwrap();
        let d3 = phi.window_density(3).unwrap();
        prop_assert!((d3.trace().re - 1.0).abs() < 1e-10);
        prop_assert!(linalg::min_hermitian_eigenvalue(&d3) > -1e-10);
        let left = linalg::ptrace(&d3, &[d, d, d], &[false, false, true]);
        let right = linalg::ptrace(&d3, &[d, d, d], &[true, false, false]);
        prop_assert!(linalg::frob(&(left - &d2)) < 1e-10);
        prop_assert!(linalg::frob(&(right - &d2)) < 1e-10);
    }

    #[test]
    fn reduction_keeps_the_state(seed in any::<u64>()) {
        let phi = triple(seed);
        let red = phi.reduced().unwrap();
        prop_assert!(red.memory().rep_dim() <= phi.memory().rep_dim());
        prop_assert!(states_equal(&phi, &phi, None).unwrap());
        prop_assert!(states_equal(&phi, &red, None).unwrap());
    }

    #[test]
    fn compressed_kraus_define_the_same_map(seed in any::<u64>(), count in 1usize..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut kraus: Vec<CMat> = (0..count).map(|_| random_matrix(&mut rng, 2, 6)).collect();
        // a dependent member
        kraus.push(&kraus[0] * c(0.5, -0.25));
        let x = random_matrix(&mut rng, 6, 6);
        let apply = |ks: &[CMat]| ks.iter().fold(CMat::zeros(2, 2), |acc, k| acc + k * &x * k.adjoint());
        let out = compress_kraus(kraus.clone());
        prop_assert!(out.len() <= count.min(12));
        prop_assert!(linalg::frob(&(apply(&out) - apply(&kraus))) < 1e-10);
    }

    #[test]
    fn minimal_projections_partition_unity(seed in any::<u64>(), spectrum in prop::collection::vec(0u8..3, 2..6)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = spectrum.len();
        let alg = FdAlgebra::full(n).unwrap();
        let u = random_unitary(&mut rng, n);
        let vals: Vec<f64> = spectrum.iter().map(|&s| s as f64).collect();
        let a = &u * real_diag(&vals) * u.adjoint();
        let family = vec![AlgElement::from_blocks(&alg, vec![a]).unwrap()];
        let ps = minimal_projections(&alg, &family, 1e-9, 1e-7).unwrap();
        let mut distinct = vals.clone();
        distinct.sort_by(f64::total_cmp);
        distinct.dedup();
        prop_assert_eq!(ps.len(), distinct.len());
        let mut sum = CMat::zeros(n, n);
        for (i, p) in ps.iter().enumerate() {
            prop_assert!(p.is_projection(1e-9));
            for q in &ps[i + 1..] {
                prop_assert!((p * q).max_abs() < 1e-9);
            }
            sum += p.block(0);
        }
        prop_assert!(linalg::frob(&(sum - CMat::identity(n, n))) < 1e-9);
    }

    #[test]
    fn integer_multiples_give_a_discrete_group(a in 0.05f64..3.0, ks in prop::collection::vec(-40i64..40, 1..6)) {
        prop_assume!(ks.iter().any(|&k| k != 0));
        let gens: Vec<f64> = ks.iter().map(|&k| k as f64 * a).collect();
        let g = classify_subgroup(&gens, Mode::Floating, 1e-9, 1_000_000);
        let gcd = ks.iter().fold(0u64, |acc, &k| fcs::rational::gcd(acc, k.unsigned_abs()));
        prop_assert_eq!(g.kind, GroupKind::Discrete);
        let found = g.generator.unwrap();
        prop_assert!((found - gcd as f64 * a).abs() < 1e-8 * (1.0 + found));
        for &x in &gens {
            prop_assert!(g.contains(x, 1e-8));
        }
    }

    #[test]
    fn twirl_rank_is_the_character_count(p in 1usize..4, k in 2u64..5, n in 1usize..4) {
        let d = 3;
        let g = diagonal_cyclic(d, &[(p - 1, k)], 1e-12).unwrap();
        let ch = g.charges(1e-9).unwrap();
        let proj = twirl_projector(&g, n).unwrap();
        let rank = linalg::hermitian_eigenvalues(&proj).iter().filter(|&&v| v > 0.5).count();
        prop_assert_eq!(rank, character_count(&ch, n));
    }

    #[test]
    fn model_files_round_trip(seed in any::<u64>()) {
        let phi = triple(seed);
        let m = ModelFile::from_triple(&phi);
        let back = ModelFile::parse(m.to_json().as_bytes()).unwrap();
        prop_assert_eq!(&back, &m);
        let t = back.triple().unwrap();
        prop_assert!(states_equal(&phi, &t, None).unwrap());
    }

    #[test]
    fn gauge_twirl_fixes_invariant_elements(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = diagonal_cyclic(2, &[(1, 2)], 1e-12).unwrap();
        let proj = twirl_projector(&g, 1).unwrap();
        let z = random_unitary(&mut rng, 2)[(0, 0)];
        let diag = CMat::from_fn(2, 2, |i, j| if i == j { z * c((i + 1) as f64, 0.0) } else { c(0.0, 0.0) });
        let v = linalg::flatten(&diag);
        prop_assert!((&proj * &v - &v).norm() < 1e-12);
    }
}

#[test]
fn cli_validate_accepts_written_models() {
    let dir = std::env::temp_dir().join(format!("fcs-invariants-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    for seed in 0..4u64 {
        let path = dir.join(format!("m{seed}.json"));
        std::fs::write(&path, ModelFile::from_triple(&triple(seed)).to_json()).unwrap();
        let (code, out) = fcs::cli::run([
            "fcstool",
            "--format",
            "machine",
            "validate",
            path.to_str().unwrap(),
        ]);
        assert_eq!(code, 0, "{out}");
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["status"], "ok");
    }
    let (code, _) = fcs::cli::run([
        "fcstool",
        "validate",
        dir.join("missing.json").to_str().unwrap(),
    ]);
    assert_eq!(code, 1);
    std::fs::remove_dir_all(&dir).ok();
}
