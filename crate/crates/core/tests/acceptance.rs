//! Acceptance run: one PASS/FAIL line per criterion.

use std::time::Instant;

use fcs::fixtures::{
    classical_chain, diagonal_markov, example_product_three_level, product_markov, random_markov,
    random_triple, solve_diagonal_markov, stationary,
};
use fcs::gauge::{diagonal_cyclic, invariant_subalgebra, subfactor_report};
use fcs::linalg::{self, real_diag, unit, CMat};
use fcs::markovtype::{
    classify_subgroup, classify_type, mean_entropy_estimate, GroupKind, MarkovSpec, Mode,
    TypeLabel, TypeOptions,
};
use fcs::peripheral::{clustering_rate, is_factor};
use fcs::{Error, Tolerances};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20_240_601;
const RUNTIME_LIMIT_S: f64 = 10.0;

struct Line {
    pass: bool,
    detail: String,
}

fn line(pass: bool, detail: impl Into<String>) -> Line {
    Line {
        pass,
        detail: detail.into(),
    }
}

/// Matrix units `e_{I,J}` on `n` sites of `ℂ³` with equal count of index 1
/// mod 3 and of index 2 mod 2, by brute force.
fn selection_rule_count(n: usize) -> usize {
    let words: Vec<Vec<usize>> = (0..3usize.pow(n as u32))
        .map(|mut k| {
            let mut w = vec![0; n];
            for slot in w.iter_mut().rev() {
                *slot = k % 3;
                k /= 3;
            }
            w
        })
        .collect();
    let key = |w: &Vec<usize>| {
        let twos = w.iter().filter(|&&s| s == 1).count() % 3;
        let threes = w.iter().filter(|&&s| s == 2).count() % 2;
        (twos, threes)
    };
    let keys: Vec<_> = words.iter().map(key).collect();
    keys.iter()
        .map(|a| keys.iter().filter(|b| *b == a).count())
        .sum()
}

fn criterion_1() -> Line {
    let t0 = Instant::now();
    let run = || -> fcs::Result<Line> {
        let phi = example_product_three_level(0.5)?;
        let spec = MarkovSpec::from_triple(&phi)?;
        let t11_ok =
            linalg::max_abs(&(&spec.t_blocks[0][0] - real_diag(&[0.4, 0.4, 0.2]))) <= 1e-12;
        let g = diagonal_cyclic(3, &[(1, 3), (2, 2)], 1e-10)?;
        let rep = subfactor_report(&phi, &spec, &g)?;
        let amb = rep.ambient.lambda.unwrap_or(f64::NAN);
        let res = rep.restricted_lambda.unwrap_or(f64::NAN);
        let mut dims_ok = true;
        for n in 1..=4 {
            let got = invariant_subalgebra(&g, n, 1e-10)?.dim;
            dims_ok &= got == selection_rule_count(n);
        }
        let secs = t0.elapsed().as_secs_f64();
        let pass = t11_ok
            && rep.ambient.label == TypeLabel::IIILambda
            && (amb - 0.5).abs() <= 1e-9
            && rep.restricted_label == TypeLabel::IIILambda
            && (res - 0.25).abs() <= 1e-9
            && rep.index == Some(6)
            && dims_ok
            && secs < RUNTIME_LIMIT_S;
        Ok(line(
            pass,
            format!(
                "ambient {:?} λ={amb:.12}, restricted {:?} λ={res:.12}, index {:?}, window dims match: {dims_ok}, {secs:.2}s",
                rep.ambient.label, rep.restricted_label, rep.index
            ),
        ))
    };
    run().unwrap_or_else(|e| line(false, format!("error: {e}")))
}

fn criterion_2() -> Line {
    let t0 = Instant::now();
    let run = || -> fcs::Result<Line> {
        let phi = diagonal_markov(0.4, 0.2)?;
        let spec = MarkovSpec::from_triple(&phi)?;
        let gens = spec.spectrum_group(phi.tolerances()).generators;
        let has_ln2 = gens.iter().any(|g| (g - 2f64.ln()).abs() <= 1e-12);
        let has_ln6 = gens.iter().any(|g| (g + 6f64.ln()).abs() <= 1e-12);
        let v = classify_type(&phi, Some(&spec), TypeOptions::default())?;

        let (l1, l2) = solve_diagonal_markov(0.5, 3.0)?;
        let root = diagonal_markov(l1, l2)?;
        let rspec = MarkovSpec::from_triple(&root)?;
        let rv = classify_type(&root, Some(&rspec), TypeOptions::default())?;
        let lam = rv.lambda.unwrap_or(f64::NAN);
        let g = diagonal_cyclic(2, &[(1, 6)], 1e-10)?;
        let rep = subfactor_report(&root, &rspec, &g)?;
        let rl = rep.restricted_lambda.unwrap_or(f64::NAN);
        let secs = t0.elapsed().as_secs_f64();
        let pass = has_ln2
            && has_ln6
            && v.label == TypeLabel::III1
            && rv.label == TypeLabel::IIILambda
            && (lam - 0.5).abs() <= 1e-8
            && rep.restricted_label == TypeLabel::IIILambda
            && (rl - lam.powi(3)).abs() <= 1e-8
            && rep.index == Some(6)
            && secs < RUNTIME_LIMIT_S;
        Ok(line(
            pass,
            format!(
                "ln2 {has_ln2}, -ln6 {has_ln6}, (0.4,0.2) → {:?}; root-solved → {:?} λ={lam:.10}, restricted λ={rl:.10}, index {:?}, {secs:.2}s",
                v.label, rv.label, rep.index
            ),
        ))
    };
    run().unwrap_or_else(|e| line(false, format!("error: {e}")))
}

fn criterion_3() -> Line {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (mut cases, mut agree, mut inconsistent, mut other, mut draws) = (0, 0, 0, 0, 0);
    let mut factors = 0;
    let mut first_error: Option<String> = None;
    while cases < 200 && draws < 20_000 {
        draws += 1;
        let Some(phi) = random_triple(&mut rng) else {
            continue;
        };
        cases += 1;
        match is_factor(&phi) {
            Ok(v) => {
                if v.condition_iii == v.condition_iv {
                    agree += 1;
                }
                if v.is_factor {
                    factors += 1;
                }
            }
            Err(Error::InternalConsistency(_)) => inconsistent += 1,
            Err(e) => {
                other += 1;
                first_error.get_or_insert(e.to_string());
            }
        }
    }
    let pass = cases >= 200 && agree == cases && inconsistent == 0 && other == 0;
    line(
        pass,
        format!(
            "{agree}/{cases} agree ({factors} factors), internal-consistency errors {inconsistent}, other errors {other}{}",
            first_error.map(|e| format!(", first: {e}")).unwrap_or_default()
        ),
    )
}

/// Primitivity of the chain restricted to the support of `pi` (strongly
/// connected and aperiodic), by Wielandt's bound on the support graph.
fn perron_frobenius_oracle(p: &[Vec<f64>], pi: &[f64]) -> bool {
    let supp: Vec<usize> = (0..p.len()).filter(|&i| pi[i] > 1e-12).collect();
    let k = supp.len();
    let adj: Vec<Vec<bool>> = supp
        .iter()
        .map(|&i| supp.iter().map(|&j| p[i][j] > 0.0).collect())
        .collect();
    let mut power = adj.clone();
    for _ in 1..(k - 1) * (k - 1) + 1 {
        power = (0..k)
            .map(|i| {
                (0..k)
                    .map(|j| (0..k).any(|m| power[i][m] && adj[m][j]))
                    .collect()
            })
            .collect();
    }
    power.iter().all(|row| row.iter().all(|&x| x))
}

fn random_stochastic(rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    loop {
        let masked = rng.gen_bool(0.7);
        let p: Vec<Vec<f64>> = (0..3)
            .map(|_| {
                let row: Vec<f64> = (0..3)
                    .map(|_| {
                        if masked && rng.gen_bool(0.5) {
                            0.0
                        } else {
                            rng.gen_range(0.05..1.0)
                        }
                    })
                    .collect();
                let s: f64 = row.iter().sum();
                row.iter().map(|x| x / s.max(1e-300)).collect()
            })
            .collect();
        if p.iter().all(|r| r.iter().sum::<f64>() > 0.5) {
            return p;
        }
    }
}

fn criterion_4() -> Line {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
    let (mut cases, mut agree, mut errors) = (0, 0, 0);
    let mut factors = 0;
    let mut worst_word: f64 = 0.0;
    let mut first_err = None;
    while cases < 120 {
        let p = random_stochastic(&mut rng);
        let pi = stationary(&p);
        cases += 1;
        let phi = match classical_chain(&p, Some(&pi)) {
            Ok(t) => t,
            Err(e) => {
                errors += 1;
                first_err.get_or_insert(e.to_string());
                continue;
            }
        };
        let oracle = perron_frobenius_oracle(&p, &pi);
        match phi.reduced().and_then(|m| is_factor(&m)) {
            Ok(v) => {
                if v.is_factor == oracle {
                    agree += 1;
                }
                if v.is_factor {
                    factors += 1;
                }
            }
            Err(e) => {
                errors += 1;
                first_err.get_or_insert(e.to_string());
            }
        }
        // diagonal words of length 3
        for w in 0..27usize {
            let word = [w / 9, (w / 3) % 3, w % 3];
            let mats: Vec<CMat> = word.iter().map(|&s| unit(3, s, s)).collect();
            let got = phi.evaluate_word(&mats).map(|z| z.re).unwrap_or(f64::NAN);
            let want = pi[word[0]] * p[word[0]][word[1]] * p[word[1]][word[2]];
            worst_word = worst_word.max((got - want).abs());
        }
    }
    let ident = classical_chain(&[vec![1.0, 0.0], vec![0.0, 1.0]], Some(&[0.5, 0.5]))
        .and_then(|t| is_factor(&t))
        .map(|v| v.center_dim);
    let swap = classical_chain(&[vec![0.0, 1.0], vec![1.0, 0.0]], Some(&[0.5, 0.5]))
        .and_then(|t| is_factor(&t))
        .map(|v| v.center_dim);
    let pass =
        agree == cases && errors == 0 && worst_word <= 1e-12 && ident == Ok(2) && swap == Ok(2);
    line(
        pass,
        format!(
            "{agree}/{cases} agree with the oracle ({factors} factors), errors {errors}{}, word residual {worst_word:.2e}, center_dim I₂ {:?}, swap {:?}",
            first_err.map(|e| format!(" (first: {e})")).unwrap_or_default(),
            ident.ok(),
            swap.ok()
        ),
    )
}

fn markov_specs() -> Vec<(fcs::FcsTriple, fcs::Result<MarkovSpec>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 2);
    (0..60)
        .filter_map(|k| {
            let d = 2 + k % 2;
            let lattice = k % 4 == 0;
            let phi = random_markov(&mut rng, d, lattice).ok()?;
            let spec = MarkovSpec::from_triple(&phi);
            Some((phi, spec))
        })
        .collect()
}

fn criterion_5(specs: &[(fcs::FcsTriple, fcs::Result<MarkovSpec>)]) -> Line {
    let mut worst: f64 = 0.0;
    let mut ok = 0;
    let mut failures = Vec::new();
    for (phi, spec) in specs {
        let res = spec
            .as_ref()
            .map_err(Clone::clone)
            .and_then(|s| Ok(s.reconstruction_residual_against(&phi.window_density(3)?)));
        match res {
            Ok(r) => {
                worst = worst.max(r);
                if r <= 1e-10 {
                    ok += 1;
                }
            }
            Err(e) => failures.push(e.to_string()),
        }
    }
    let pass = specs.len() >= 50 && ok == specs.len();
    line(
        pass,
        format!(
            "{ok}/{} specs reconstruct, worst ‖ΔD₃‖_F {worst:.2e}{}",
            specs.len(),
            failures
                .first()
                .map(|e| format!(", first error: {e}"))
                .unwrap_or_default()
        ),
    )
}

fn criterion_6(specs: &[(fcs::FcsTriple, fcs::Result<MarkovSpec>)]) -> Line {
    let tol = Tolerances::default();
    let (mut ok, mut kinds) = (0, [0usize; 4]);
    let mut total = 0;
    for (_, spec) in specs {
        let Ok(spec) = spec else { continue };
        total += 1;
        let group = spec.spectrum_group(&tol);
        kinds[match group.kind {
            GroupKind::Trivial => 0,
            GroupKind::Discrete => 1,
            GroupKind::FullLine => 2,
            GroupKind::Undetermined => 3,
        }] += 1;
        let mut inside = group.kind != GroupKind::Undetermined;
        let mut pool = group.generators.clone();
        let p = spec.num_blocks();
        for n in 2..=4 {
            for x in 0..p {
                for y in 0..p {
                    let w = spec.window_spectrum(n, x, y).unwrap_or_default();
                    inside &= w.iter().all(|&v| group.contains(v, 1e-9));
                    pool.extend(w);
                }
            }
        }
        let widened = classify_subgroup(&pool, Mode::Floating, tol.commensurate, tol.q_max);
        if inside && widened.same_as(&group, 1e-9) {
            ok += 1;
        }
    }
    let pass = total >= 50 && ok == total;
    line(
        pass,
        format!(
            "{ok}/{total} specs consistent (trivial {}, discrete {}, full line {}, undetermined {})",
            kinds[0], kinds[1], kinds[2], kinds[3]
        ),
    )
}

fn criterion_7() -> Line {
    let run = || -> fcs::Result<Line> {
        let opts = TypeOptions::default();
        let tracial = product_markov(&real_diag(&[0.5, 0.5]))?;
        let l_tr = classify_type(&tracial, Some(&MarkovSpec::from_triple(&tracial)?), opts)?.label;
        let pure = product_markov(&real_diag(&[1.0, 0.0]))?;
        let v_pure = classify_type(&pure, MarkovSpec::from_triple(&pure).ok().as_ref(), opts)?;
        let half = product_markov(&real_diag(&[0.5, 0.5, 0.0, 0.0]))?;
        let l_half = classify_type(&half, Some(&MarkovSpec::from_triple(&half)?), opts)?.label;

        let p = [vec![0.5, 0.5], vec![0.3, 0.7]];
        let chain = classical_chain(&p, None)?;
        let rate = clustering_rate(&chain)?;
        let a = unit(2, 0, 0);
        let pa = chain.evaluate(&a)?.re;
        let c1 = (chain.correlation(&a, &a, 1)?.re - pa * pa).abs();
        let mut bound_ok = true;
        for n in 1..=20 {
            let cn = (chain.correlation(&a, &a, n)?.re - pa * pa).abs();
            bound_ok &= cn <= c1 * rate.powi(n as i32 - 1) * (1.0 + 1e-6) + 1e-14;
        }
        let pass = l_tr == TypeLabel::II1
            && v_pure.label == TypeLabel::IInf
            && v_pure.evidence.mean_entropy.abs() <= 1e-9
            && l_half == TypeLabel::IIInf
            && (rate - 0.2).abs() <= 1e-9
            && bound_ok;
        Ok(line(
            pass,
            format!(
                "tracial {l_tr:?}, pure {:?} (h={:.1e}), half-rank {l_half:?}, rate {rate:.12}, decay bound {bound_ok}",
                v_pure.label, v_pure.evidence.mean_entropy
            ),
        ))
    };
    run().unwrap_or_else(|e| line(false, format!("error: {e}")))
}

fn criterion_8() -> Line {
    let run = || -> fcs::Result<Line> {
        let psi = [0.2, 0.3, 0.5];
        let prod = product_markov(&real_diag(&psi))?;
        let (h_prod, _) = mean_entropy_estimate(&prod, None)?;
        let s_psi: f64 = psi.iter().map(|x| -x * x.ln()).sum();

        let p = vec![vec![0.4, 0.6], vec![0.8, 0.2]];
        let pi = stationary(&p);
        let chain = classical_chain(&p, Some(&pi))?;
        let (h_chain, _) = mean_entropy_estimate(&chain, Some(10))?;
        let rate: f64 = (0..2)
            .map(|i| {
                pi[i]
                    * p[i]
                        .iter()
                        .map(|&q| if q > 0.0 { -q * q.ln() } else { 0.0 })
                        .sum::<f64>()
            })
            .sum();
        let pass = (h_prod - s_psi).abs() <= 1e-9 && (h_chain - rate).abs() <= 1e-6;
        Ok(line(
            pass,
            format!(
                "product |Δ| {:.2e}, chain |Δ| {:.2e} (rate {rate:.9})",
                (h_prod - s_psi).abs(),
                (h_chain - rate).abs()
            ),
        ))
    };
    run().unwrap_or_else(|e| line(false, format!("error: {e}")))
}

fn main() {
    let specs = markov_specs();
    let results = [
        ("1 three-level gauge subfactor", criterion_1()),
        ("2 diagonal Markov spectra and subfactor", criterion_2()),
        (
            "3 conditions (iii)/(iv) agree on random triples",
            criterion_3(),
        ),
        (
            "4 classical chains against the Perron-Frobenius oracle",
            criterion_4(),
        ),
        ("5 three-site density reconstruction", criterion_5(&specs)),
        (
            "6 window spectra inside the classified group",
            criterion_6(&specs),
        ),
        ("7 type decision fixtures", criterion_7()),
        ("8 mean entropy", criterion_8()),
    ];
    let mut failed = 0;
    for (name, l) in &results {
        println!(
            "criterion {name}: {} ({})",
            if l.pass { "PASS" } else { "FAIL" },
            l.detail
        );
        if !l.pass {
            failed += 1;
        }
    }
    println!(
        "acceptance: {}/{} passed",
        results.len() - failed,
        results.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
