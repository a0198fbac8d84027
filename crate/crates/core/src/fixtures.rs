//! Ready-made triples: product states, classical chains, the two worked
//! Markov examples, and seeded random generators for property suites.

use nalgebra::QR;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::algebra::{FdAlgebra, StateOnAlgebra};
use crate::cpmap::{product_state_kraus, slice_map_kraus, CpMap};
use crate::error::{Error, Result};
use crate::fcs::FcsTriple;
use crate::linalg::{self, c, hermitian_fn, kron, r, real_diag, CMat, CVec};
use crate::tol::Tolerances;

/// Product state `⊗ ψ` with density `dens`, generated on `𝔠 = ℂ`.
pub fn product_state(dens: &CMat) -> Result<FcsTriple> {
    let tol = Tolerances::default();
    let mem = FdAlgebra::new(&[1])?;
    let e = CpMap::from_kraus(product_state_kraus(dens), dens.nrows(), &mem, &tol)?;
    FcsTriple::new(e, StateOnAlgebra::tracial(&mem), tol)
}

/// Product state presented as a quantum Markov state on `𝔠 = M_d` with
/// `E(A ⊗ B) = A·ψ(B)` and `ρ = ψ`.
pub fn product_markov(dens: &CMat) -> Result<FcsTriple> {
    let tol = Tolerances::default();
    let d = dens.nrows();
    let mem = FdAlgebra::full(d)?;
    let e = CpMap::from_kraus(slice_map_kraus(dens), d, &mem, &tol)?;
    let rho = StateOnAlgebra::new(&mem, vec![dens.clone()], tol.psd)?;
    FcsTriple::new(e, rho, tol)
}

/// Kraus operators of the classical chain map `E(e_kl ⊗ f_j) = δ_kl P_kj f_k`
/// for a row-stochastic `P`.
pub fn classical_chain_map(p: &[Vec<f64>]) -> Result<CpMap> {
    let k = p.len();
    let mem = FdAlgebra::new(&vec![1; k])?;
    let mut kraus = Vec::new();
    for (a, row) in p.iter().enumerate() {
        if row.len() != k {
            return Err(Error::ShapeMismatch(
                "transition matrix must be square".into(),
            ));
        }
        for (j, &pj) in row.iter().enumerate() {
            if pj < 0.0 {
                return Err(Error::InvalidState(format!(
                    "negative transition probability P[{a}][{j}]"
                )));
            }
            if pj > 0.0 {
                let mut m = CMat::zeros(k, k * k);
                m[(a, a * k + j)] = r(pj.sqrt());
                kraus.push(m);
            }
        }
    }
    if kraus.is_empty() {
        kraus.push(CMat::zeros(k, k * k));
    }
    CpMap::from_kraus(kraus, k, &mem, &Tolerances::default())
}

/// A stationary vector `πP = π` by lazy power iteration from the uniform
/// distribution.
pub fn stationary(p: &[Vec<f64>]) -> Vec<f64> {
    let k = p.len();
    let mut pi = vec![1.0 / k as f64; k];
    for _ in 0..200_000 {
        let mut next = vec![0.0; k];
        for i in 0..k {
            for j in 0..k {
                next[j] += pi[i] * p[i][j];
            }
        }
        let lazy: Vec<f64> = pi.iter().zip(&next).map(|(a, b)| 0.5 * (a + b)).collect();
        let delta: f64 = lazy.iter().zip(&pi).map(|(a, b)| (a - b).abs()).sum();
        pi = lazy;
        if delta < 1e-16 {
            break;
        }
    }
    let s: f64 = pi.iter().sum();
    pi.iter().map(|x| x / s).collect()
}

/// Classical Markov chain with transition matrix `p` and initial law `pi`
/// (the stationary vector by default).
pub fn classical_chain(p: &[Vec<f64>], pi: Option<&[f64]>) -> Result<FcsTriple> {
    let e = classical_chain_map(p)?;
    let pi = pi.map(<[f64]>::to_vec).unwrap_or_else(|| stationary(p));
    let blocks = pi.iter().map(|&x| real_diag(&[x])).collect();
    let rho = StateOnAlgebra::new(e.memory(), blocks, 1e-10)?;
    FcsTriple::new(e, rho, Tolerances::default())
}

/// The three-level product state with density `diag(1, 1, λ)/(2 + λ)`,
/// presented as a Markov state on `M_3`.
pub fn example_product_three_level(lambda: f64) -> Result<FcsTriple> {
    let s = 2.0 + lambda;
    product_markov(&real_diag(&[1.0 / s, 1.0 / s, lambda / s]))
}

/// The two-level Markov state whose conditional expectation onto the
/// diagonal has `E((11,11)) = λ₁e₁₁`, `E((12,12)) = (1−λ₁)e₁₁`,
/// `E((21,21)) = (1−λ₂)e₂₂`, `E((22,22)) = λ₂e₂₂`.
pub fn diagonal_markov(l1: f64, l2: f64) -> Result<FcsTriple> {
    let tol = Tolerances::default();
    let mem = FdAlgebra::full(2)?;
    let sigma = [[l1, 1.0 - l1], [1.0 - l2, l2]];
    let mut kraus = Vec::new();
    for (i, row) in sigma.iter().enumerate() {
        for (j, &s) in row.iter().enumerate() {
            if s > 0.0 {
                let mut k = CMat::zeros(2, 4);
                k[(i, i * 2 + j)] = r(s.sqrt());
                kraus.push(k);
            }
        }
    }
    let e = CpMap::from_kraus(kraus, 2, &mem, &tol)?;
    let pi = stationary(&[sigma[0].to_vec(), sigma[1].to_vec()]);
    let rho = StateOnAlgebra::new(&mem, vec![real_diag(&pi)], tol.psd)?;
    FcsTriple::new(e, rho, tol)
}

/// `(λ₁, λ₂)` with `log λ₁ − log λ₂ = log λ` and
/// `log λ₁ + log λ₂ − log(1−λ₁) − log(1−λ₂) = n·log λ`, by bisection.
pub fn solve_diagonal_markov(lambda: f64, n: f64) -> Result<(f64, f64)> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::Precondition("λ must lie in (0, 1)".into()));
    }
    let f = |l2: f64| {
        let l1 = lambda * l2;
        l1.ln() + l2.ln() - (1.0 - l1).ln() - (1.0 - l2).ln() - n * lambda.ln()
    };
    let (mut lo, mut hi) = (1e-300f64, 1.0 - 1e-16);
    if f(lo) > 0.0 || f(hi) < 0.0 {
        return Err(Error::Numerical("no root in (0, 1)".into()));
    }
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-17 {
            break;
        }
    }
    let l2 = 0.5 * (lo + hi);
    Ok((lambda * l2, l2))
}

pub fn random_unitary<R: Rng>(rng: &mut R, n: usize) -> CMat {
    let g = CMat::from_fn(n, n, |_, _| {
        c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    let qr = QR::new(g);
    qr.q()
}

/// Random positive definite matrix with unit trace.
pub fn random_density<R: Rng>(rng: &mut R, n: usize) -> CMat {
    let g = CMat::from_fn(n, n, |_, _| {
        c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    let m = &g * g.adjoint() + CMat::identity(n, n) * r(0.05);
    let t = m.trace();
    m / t
}

/// Seeded random unital CP map on `𝔠 = ⊕ M_{dᵢ}` with `d = 2`: every Kraus
/// operator maps into a single block, either reading from a permuted block
/// (reducible and periodic cases) or with entries optionally masked to zero,
/// normalized blockwise. The state is
/// the limit of the lazy iteration `ρ ← (ρ + ρ∘E_I)/2`. Returns `None` when
/// the draw fails or the triple is not minimal.
pub fn random_triple<R: Rng>(rng: &mut R) -> Option<FcsTriple> {
    const SHAPES: [&[usize]; 5] = [&[1], &[2], &[1, 1], &[1, 1, 1], &[1, 1, 1, 1]];
    let dims = SHAPES[rng.gen_range(0..SHAPES.len())];
    let d = 2;
    let mem = FdAlgebra::new(dims).ok()?;
    let n = mem.rep_dim();
    let masked = rng.gen_bool(0.6);
    // block b reads only memory block σ(b): a permutation of the blocks
    let sigma: Option<Vec<usize>> = (dims.len() > 1 && rng.gen_bool(0.4)).then(|| {
        let mut p: Vec<usize> = (0..dims.len()).collect();
        p.shuffle(rng);
        p
    });
    let mut kraus = Vec::new();
    for b in 0..dims.len() {
        let (o, db) = (mem.offset(b), dims[b]);
        let count = rng.gen_range(1..=3);
        let mut ks = Vec::new();
        for _ in 0..count {
            let mut k = CMat::zeros(n, d * n);
            for row in o..o + db {
                for col in 0..d * n {
                    if let Some(p) = &sigma {
                        let i = col % n;
                        let src = p[b];
                        if i < mem.offset(src) || i >= mem.offset(src) + dims[src] {
                            continue;
                        }
                    }
                    if masked && rng.gen_bool(0.6) {
                        continue;
                    }
                    k[(row, col)] = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                }
            }
            ks.push(k);
        }
        let mut s = CMat::zeros(db, db);
        for k in &ks {
            let rows = k.rows(o, db).into_owned();
            s += &rows * rows.adjoint();
        }
        if linalg::min_hermitian_eigenvalue(&s) < 1e-3 {
            return None;
        }
        let inv_sqrt = hermitian_fn(&s, |x| 1.0 / x.sqrt());
        for k in ks {
            let mut out = CMat::zeros(n, d * n);
            let rows = &inv_sqrt * k.rows(o, db);
            out.rows_mut(o, db).copy_from(&rows);
            kraus.push(out);
        }
    }
    let tol = Tolerances::default();
    let e = CpMap::from_kraus(kraus, d, &mem, &tol).ok()?;
    let rho = invariant_state(&e, &tol)?;
    let t = FcsTriple::new(e, rho, tol).ok()?;
    t.is_minimal().then_some(t)
}

/// An invariant state of `E_I` by lazy power iteration from the normalized trace.
pub fn invariant_state(e: &CpMap, tol: &Tolerances) -> Option<StateOnAlgebra> {
    let mem = e.memory();
    let t = e.transfer();
    let tt = t.transpose();
    let mut w: CVec = StateOnAlgebra::tracial(mem).functional_coords();
    for _ in 0..200_000 {
        let next = (&w + &tt * &w) * r(0.5);
        let delta = (&next - &w).norm();
        w = next;
        if delta < 1e-15 {
            break;
        }
    }
    let elem = mem.from_coords(&w);
    let blocks: Vec<CMat> = elem
        .blocks()
        .iter()
        .map(|m| {
            let h = m.transpose();
            (&h + h.adjoint()) * r(0.5)
        })
        .collect();
    let total: f64 = blocks.iter().map(|b| b.trace().re).sum();
    let blocks = blocks.into_iter().map(|b| b / r(total)).collect();
    let rho = StateOnAlgebra::new(mem, blocks, 1e-9).ok()?;
    (crate::cpmap::invariance_residual(&rho, e) <= tol.alg).then_some(rho)
}

/// Block layout `(mᵢ, dᵢ)` of the range of a random Markov map.
pub type Layout = Vec<(usize, usize)>;

/// All layouts with `Σ mᵢdᵢ = d`.
pub fn layouts(d: usize) -> Vec<Layout> {
    fn rec(left: usize, cur: &mut Layout, out: &mut Vec<Layout>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for m in 1..=left {
            for di in 1..=left / m {
                cur.push((m, di));
                rec(left - m * di, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(d, &mut Vec::new(), &mut out);
    out
}

/// Quantum Markov state on `M_d` built from prescribed `T_ij ∈ M_{mᵢ} ⊗ M_{dⱼ}`
/// (`Σⱼ tr T_ij = 1`), in the basis rotated by the unitary `u`.
///
/// With `hᵢ = Σⱼ Tr_{dⱼ} T_ij`, block `i` of `E` slices the first site with
/// `ωᵢ = ⊕ⱼ T_ij ⊗ hⱼ` on `ℂ^{mᵢ} ⊗ ℂ^d`.
pub fn markov_from_t(layout: &Layout, t: &[Vec<CMat>], u: &CMat) -> Result<FcsTriple> {
    let tol = Tolerances::default();
    let d: usize = layout.iter().map(|(m, di)| m * di).sum();
    let p = layout.len();
    let mut offsets = Vec::with_capacity(p);
    let mut off = 0;
    for &(m, di) in layout {
        offsets.push(off);
        off += m * di;
    }
    let h: Vec<CMat> = (0..p)
        .map(|i| {
            let mi = layout[i].0;
            let mut acc = CMat::zeros(mi, mi);
            for (j, tij) in t[i].iter().enumerate() {
                acc += linalg::partial_trace_second(tij, mi, layout[j].1);
            }
            acc
        })
        .collect();
    let mut kraus = Vec::new();
    for i in 0..p {
        let (mi, di) = layout[i];
        // ω_i on ℂ^{m_i} ⊗ ℂ^d, site-2 index in block j ordered (μ_j, κ_j)
        let mut omega = CMat::zeros(mi * d, mi * d);
        for j in 0..p {
            let (mj, dj) = layout[j];
            // T_ij ⊗ h_j on (μ_i, κ_j, μ_j) → reorder to (μ_i, μ_j, κ_j)
            let local = linalg::permute_factors(&kron(&t[i][j], &h[j]), &[mi, dj, mj], &[0, 2, 1]);
            let mut idx = Vec::with_capacity(mi * mj * dj);
            for mu in 0..mi {
                for s2 in offsets[j]..offsets[j] + mj * dj {
                    idx.push(mu * d + s2);
                }
            }
            for (a, &ra) in idx.iter().enumerate() {
                for (b, &rb) in idx.iter().enumerate() {
                    omega[(ra, rb)] = local[(a, b)];
                }
            }
        }
        let (vals, vecs) = linalg::hermitian_eig(&omega);
        for (s, &lam) in vals.iter().enumerate() {
            if lam <= 1e-15 {
                continue;
            }
            let w = vecs.column(s);
            for cm in 0..mi {
                let mut k = CMat::zeros(d, d * d);
                for kappa in 0..di {
                    let row = offsets[i] + cm * di + kappa;
                    for mu in 0..mi {
                        let s1 = offsets[i] + mu * di + kappa;
                        for t2 in 0..d {
                            k[(row, s1 * d + t2)] = w[mu * d + t2].conj() * r(lam.sqrt());
                        }
                    }
                }
                kraus.push(k);
            }
        }
    }
    let uu = kron(u, u);
    let kraus: Vec<CMat> = kraus.into_iter().map(|k| u * k * uu.adjoint()).collect();
    let mem = FdAlgebra::full(d)?;
    let e = CpMap::from_kraus(kraus, d, &mem, &tol)?;
    let rho = invariant_state(&e, &tol)
        .ok_or_else(|| Error::Numerical("no invariant state found".into()))?;
    FcsTriple::new(e, rho, tol)
}

/// Random quantum Markov state on `M_d`. With `lattice` the data has a single
/// block whose `T` eigenvalues are `c·λᵏ`, so the spectrum group is discrete.
pub fn random_markov<R: Rng>(rng: &mut R, d: usize, lattice: bool) -> Result<FcsTriple> {
    let layout: Layout = if lattice {
        if rng.gen_bool(0.5) {
            vec![(1, d)]
        } else {
            vec![(d, 1)]
        }
    } else {
        let all = layouts(d);
        all[rng.gen_range(0..all.len())].clone()
    };
    let p = layout.len();
    let mut t: Vec<Vec<CMat>> = Vec::with_capacity(p);
    if lattice {
        let lambda = rng.gen_range(0.2..0.9f64);
        let size = layout[0].0 * layout[0].1;
        let exps: Vec<f64> = (0..size)
            .map(|_| lambda.powi(rng.gen_range(0..4)))
            .collect();
        let s: f64 = exps.iter().sum();
        let v = random_unitary(rng, size);
        let diag = real_diag(&exps.iter().map(|x| x / s).collect::<Vec<_>>());
        t.push(vec![&v * diag * v.adjoint()]);
    } else {
        for i in 0..p {
            let mi = layout[i].0;
            let mut row: Vec<CMat> = (0..p)
                .map(|j| random_density(rng, mi * layout[j].1))
                .collect();
            let weights: Vec<f64> = (0..p).map(|_| rng.gen_range(0.2..1.0)).collect();
            let total: f64 = weights.iter().sum();
            for (tij, w) in row.iter_mut().zip(&weights) {
                *tij *= r(w / total);
            }
            t.push(row);
        }
    }
    let u = random_unitary(rng, d);
    markov_from_t(&layout, &t, &u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn root_solved_pair_meets_both_equations() {
        let (l1, l2) = solve_diagonal_markov(0.5, 3.0).unwrap();
        assert!((l1.ln() - l2.ln() - 0.5f64.ln()).abs() < 1e-12);
        let second = l1.ln() + l2.ln() - (1.0 - l1).ln() - (1.0 - l2).ln();
        assert!((second - 3.0 * 0.5f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn layouts_of_three() {
        let all = layouts(3);
        assert!(all.contains(&vec![(1, 3)]));
        assert!(all.contains(&vec![(3, 1)]));
        assert!(all.contains(&vec![(1, 1), (1, 2)]));
        assert!(all
            .iter()
            .all(|l| l.iter().map(|(m, d)| m * d).sum::<usize>() == 3));
    }

    #[test]
    fn random_triples_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut got = 0;
        for _ in 0..40 {
            if let Some(t) = random_triple(&mut rng) {
                assert!(t.is_minimal());
                got += 1;
            }
        }
        assert!(got > 5);
    }

    #[test]
    fn random_markov_builds() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for d in 2..=3 {
            for lattice in [false, true] {
                random_markov(&mut rng, d, lattice).unwrap();
            }
        }
    }
}
