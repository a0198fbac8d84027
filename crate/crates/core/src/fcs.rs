//! The finitely correlated state generated by a triple `(𝔠, E, ρ)`.

use std::sync::OnceLock;

use crate::algebra::{generated_algebra, AlgElement, FdAlgebra, StateOnAlgebra};
use crate::cpmap::{invariance_residual, CpMap};
use crate::error::{Error, Result};
use crate::linalg::{self, kron, CMat, CVec, C64};
use crate::tol::Tolerances;

/// Largest number of complex entries a window computation may allocate.
pub const WINDOW_BUDGET: usize = 1 << 22;

#[derive(Debug, Clone)]
pub struct C0Info {
    /// Orthonormal coordinate basis of `𝔠₀`.
    pub basis: Vec<CVec>,
    /// Number of iterations after which the span stopped growing.
    pub n: usize,
}

#[derive(Debug, Clone)]
pub struct FcsTriple {
    e: CpMap,
    rho: StateOnAlgebra,
    tol: Tolerances,
    transfer: OnceLock<CMat>,
    c0: OnceLock<C0Info>,
    minimal: OnceLock<bool>,
}

impl FcsTriple {
    /// Checks `ρ ∘ E_I = ρ`. Non-minimal triples are accepted with a warning.
    pub fn new(e: CpMap, rho: StateOnAlgebra, tol: Tolerances) -> Result<Self> {
        if rho.algebra() != e.memory() {
            return Err(Error::ShapeMismatch(
                "state and map live on different memory algebras".into(),
            ));
        }
        let res = invariance_residual(&rho, &e);
        if res > tol.alg {
            return Err(Error::RhoNotInvariant(res));
        }
        let t = Self::assemble(e, rho, tol);
        if !t.is_minimal() {
            log::warn!("triple is not minimal; factor analysis will refuse it");
        }
        Ok(t)
    }

    pub(crate) fn assemble(e: CpMap, rho: StateOnAlgebra, tol: Tolerances) -> Self {
        Self {
            e,
            rho,
            tol,
            transfer: OnceLock::new(),
            c0: OnceLock::new(),
            minimal: OnceLock::new(),
        }
    }

    pub fn map(&self) -> &CpMap {
        &self.e
    }

    pub fn rho(&self) -> &StateOnAlgebra {
        &self.rho
    }

    pub fn memory(&self) -> &FdAlgebra {
        self.e.memory()
    }

    pub fn site_dim(&self) -> usize {
        self.e.site_dim()
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    pub fn with_tolerances(&self, tol: Tolerances) -> Self {
        Self::assemble(self.e.clone(), self.rho.clone(), tol)
    }

    /// Matrix of `E_I` in matrix-unit coordinates.
    pub fn transfer(&self) -> &CMat {
        self.transfer.get_or_init(|| self.e.transfer())
    }

    pub fn c0(&self) -> &C0Info {
        self.c0.get_or_init(|| compute_c0(&self.e, self.tol.alg))
    }

    pub fn is_minimal(&self) -> bool {
        *self.minimal.get_or_init(|| {
            let elems: Vec<AlgElement> = self
                .c0()
                .basis
                .iter()
                .map(|v| self.memory().from_coords(v))
                .collect();
            generated_algebra(self.memory(), &elems, self.tol.alg).len()
                == self.memory().linear_dim()
        })
    }

    pub fn require_minimal(&self) -> Result<()> {
        if self.is_minimal() {
            Ok(())
        } else {
            Err(Error::NotMinimal)
        }
    }

    /// `φ(A₁ ⊗ ⋯ ⊗ A_n)` for an elementary tensor.
    pub fn evaluate_word(&self, word: &[CMat]) -> Result<C64> {
        let out = self.e.apply_word(word, &self.memory().identity())?;
        Ok(self.rho.evaluate(&out))
    }

    /// `φ` on a sum of weighted elementary tensors of equal length.
    pub fn evaluate_tensors(&self, terms: &[(C64, Vec<CMat>)]) -> Result<C64> {
        let mut acc = C64::new(0.0, 0.0);
        for (w, word) in terms {
            acc += w * self.evaluate_word(word)?;
        }
        Ok(acc)
    }

    /// `φ(X)` for a full observable on `(ℂ^d)^{⊗n}`.
    pub fn evaluate(&self, obs: &CMat) -> Result<C64> {
        let n = window_length(self.site_dim(), obs.nrows())
            .filter(|_| obs.is_square())
            .ok_or_else(|| {
                Error::ShapeMismatch(format!(
                    "observable of size {}x{} is not a window over site dimension {}",
                    obs.nrows(),
                    obs.ncols(),
                    self.site_dim()
                ))
            })?;
        let dens = self.window_density(n)?;
        Ok((dens * obs).trace())
    }

    /// Density matrix `D_n` of `φ` restricted to `n` consecutive sites.
    pub fn window_density(&self, n: usize) -> Result<CMat> {
        Ok(self.window_densities(n)?.pop().expect("n ≥ 1"))
    }

    /// `D_1, …, D_{n_max}` in one pass.
    pub fn window_densities(&self, n_max: usize) -> Result<Vec<CMat>> {
        window_densities_with(
            &self.e,
            &self.rho.densities().to_dense(),
            &self.memory().identity(),
            n_max,
        )
    }

    /// `φ(A ⊗ I^{⊗(n−a)} ⊗ B)` for `A` on `a` sites and `B` on `b` sites.
    pub fn correlation(&self, a: &CMat, b: &CMat, n: usize) -> Result<C64> {
        let d = self.site_dim();
        let la = window_length(d, a.nrows())
            .ok_or_else(|| Error::ShapeMismatch("A is not a window observable".into()))?;
        let lb = window_length(d, b.nrows())
            .ok_or_else(|| Error::ShapeMismatch("B is not a window observable".into()))?;
        if n < la {
            return Err(Error::Precondition(format!(
                "gap {n} shorter than the support of A ({la})"
            )));
        }
        let mem = self.memory();
        let id = mem.identity().to_dense();
        let eb = self.e.regroup(lb);
        let mut y = mem.compress_dense(&eb.apply_dense(&kron(b, &id)));
        for _ in 0..(n - la) {
            y = self.e.transfer_apply(&y);
        }
        let ea = self.e.regroup(la);
        let x = mem.compress_dense(&ea.apply_dense(&kron(a, &y.to_dense())));
        Ok(self.rho.evaluate(&x))
    }

    /// The same state on the support of `ρ`: every block is compressed to
    /// the eigenvectors of its density above `tol.psd`, empty blocks dropped.
    pub fn support_form(&self) -> Result<FcsTriple> {
        let mem = self.memory();
        let n = mem.rep_dim();
        let d = self.site_dim();
        let mut dims = Vec::new();
        let mut pieces: Vec<(usize, CMat)> = Vec::new();
        for (b, dens) in self.rho.densities().blocks().iter().enumerate() {
            let (vals, vecs) = linalg::hermitian_eig(dens);
            let keep: Vec<usize> = (0..vals.len())
                .filter(|&k| vals[k] > self.tol.psd)
                .collect();
            if keep.is_empty() {
                continue;
            }
            let w = CMat::from_fn(vals.len(), keep.len(), |i, j| vecs[(i, keep[j])]);
            dims.push(keep.len());
            pieces.push((b, w));
        }
        if dims == mem.dims() && pieces.iter().all(|(_, w)| w.ncols() == w.nrows()) {
            return Ok(self.clone());
        }
        let new_mem = FdAlgebra::new(&dims)?;
        let nn = new_mem.rep_dim();
        let mut w = CMat::zeros(n, nn);
        for (k, (b, piece)) in pieces.iter().enumerate() {
            w.view_mut((mem.offset(*b), new_mem.offset(k)), piece.shape())
                .copy_from(piece);
        }
        let mut lifted = CMat::zeros(d * n, d * nn);
        for a in 0..d {
            lifted.view_mut((a * n, a * nn), (n, nn)).copy_from(&w);
        }
        let kraus: Vec<CMat> = self
            .e
            .kraus()
            .iter()
            .map(|k| w.adjoint() * k * &lifted)
            .collect();
        let e = CpMap::from_kraus(crate::cpmap::compress_kraus(kraus), d, &new_mem, &self.tol)?;
        let blocks: Vec<CMat> = pieces
            .iter()
            .map(|(b, piece)| piece.adjoint() * &self.rho.densities().blocks()[*b] * piece)
            .collect();
        let rho = StateOnAlgebra::new(&new_mem, blocks, self.tol.psd.max(1e-9))?;
        FcsTriple::new(e, rho, self.tol)
    }

    /// Minimal form of the support form: faithful `ρ` and `𝔠₀ = 𝔠`.
    pub fn reduced(&self) -> Result<FcsTriple> {
        self.support_form()?.minimal_form()
    }

    /// An equivalent minimal triple: the memory is cut down to the algebra
    /// generated by `𝔠₀`, one copy per multiplicity. Requires that algebra to
    /// be invariant under every `E(A ⊗ ·)`.
    pub fn minimal_form(&self) -> Result<FcsTriple> {
        if self.is_minimal() {
            return Ok(self.clone());
        }
        let mem = self.memory();
        let n = mem.rep_dim();
        let d = self.site_dim();
        let elems: Vec<AlgElement> = self.c0().basis.iter().map(|v| mem.from_coords(v)).collect();
        let span: Vec<CMat> = generated_algebra(mem, &elems, self.tol.alg)
            .iter()
            .map(|v| mem.from_coords(v).to_dense())
            .collect();
        let span_vecs: Vec<CVec> = span.iter().map(linalg::flatten).collect();
        let mut leak: f64 = 0.0;
        for x in &span {
            for k in 0..d {
                for l in 0..d {
                    let img = self.e.apply_dense(&kron(&linalg::unit(d, k, l), x));
                    leak = leak.max(linalg::distance_to_span(&span_vecs, &linalg::flatten(&img)));
                }
            }
        }
        if leak > 1e-8 {
            return Err(Error::Unsupported(format!(
                "the algebra generated by the reachable space is not invariant (residual {leak:.3e})"
            )));
        }
        let rd = crate::algebra::subalgebra_decomposition(&span)?;
        let new_mem = FdAlgebra::new(&rd.dims)?;
        let nn = new_mem.rep_dim();
        let copy = |k: usize, s: usize| {
            rd.v.columns(rd.offsets[k] + s * rd.dims[k], rd.dims[k])
                .into_owned()
        };
        let mut kraus = Vec::new();
        for kr in self.e.kraus() {
            for k in 0..rd.dims.len() {
                let wk = copy(k, 0);
                for k2 in 0..rd.dims.len() {
                    for s in 0..rd.mults[k2] {
                        let w2 = copy(k2, s);
                        let mut lifted = CMat::zeros(d * n, d * rd.dims[k2]);
                        for a in 0..d {
                            lifted
                                .view_mut((a * n, a * rd.dims[k2]), (n, rd.dims[k2]))
                                .copy_from(&w2);
                        }
                        let piece = wk.adjoint() * kr * lifted;
                        if piece.iter().all(|z| z.norm() <= 1e-15) {
                            continue;
                        }
                        let mut out = CMat::zeros(nn, d * nn);
                        for a in 0..d {
                            out.view_mut(
                                (new_mem.offset(k), a * nn + new_mem.offset(k2)),
                                (rd.dims[k], rd.dims[k2]),
                            )
                            .copy_from(&piece.columns(a * rd.dims[k2], rd.dims[k2]));
                        }
                        kraus.push(out);
                    }
                }
            }
        }
        let e = CpMap::from_kraus(crate::cpmap::compress_kraus(kraus), d, &new_mem, &self.tol)?;
        let dens = self.rho.densities().to_dense();
        let blocks: Vec<CMat> = (0..rd.dims.len())
            .map(|k| {
                let mut acc = CMat::zeros(rd.dims[k], rd.dims[k]);
                for s in 0..rd.mults[k] {
                    let w = copy(k, s);
                    acc += w.adjoint() * &dens * w;
                }
                acc
            })
            .collect();
        let rho = StateOnAlgebra::new(&new_mem, blocks, self.tol.psd.max(1e-9))?;
        let t = FcsTriple::new(e, rho, self.tol)?;
        t.require_minimal()?;
        Ok(t)
    }

    /// The same state viewed on blocks of `m` sites, generated by `E^{(m)}`.
    pub fn regroup(&self, m: usize) -> Result<FcsTriple> {
        if m == 0 {
            return Err(Error::Precondition(
                "regrouping length must be positive".into(),
            ));
        }
        if m == 1 {
            return Ok(self.clone());
        }
        Ok(Self::assemble(
            self.e.regroup(m),
            self.rho.clone(),
            self.tol,
        ))
    }
}

/// `n` with `d^n = size`, if any.
pub fn window_length(d: usize, size: usize) -> Option<usize> {
    let mut n = 0;
    let mut p = 1usize;
    while p < size {
        p = p.checked_mul(d)?;
        n += 1;
    }
    (p == size && n >= 1).then_some(n)
}

/// Smallest subspace of `𝔠` containing `I` and invariant under every
/// `E(e_kl ⊗ ·)`, with the number of growth steps.
pub fn compute_c0(e: &CpMap, tol: f64) -> C0Info {
    let mem = e.memory();
    let d = e.site_dim();
    let letters: Vec<CMat> = (0..d)
        .flat_map(|k| (0..d).map(move |l| linalg::unit(d, k, l)))
        .collect();
    let mut basis = Vec::new();
    linalg::extend_basis(&mut basis, &mem.identity().coords(), tol);
    let mut frontier: Vec<CVec> = basis.clone();
    let mut n = 0;
    while !frontier.is_empty() && basis.len() < mem.linear_dim() {
        let mut next = Vec::new();
        for v in &frontier {
            let c = mem.from_coords(v);
            for a in &letters {
                let img = e.apply(a, &c).expect("letter shapes match");
                if linalg::extend_basis(&mut basis, &img.coords(), tol) {
                    next.push(basis.last().expect("just pushed").clone());
                }
            }
        }
        if next.is_empty() {
            break;
        }
        n += 1;
        frontier = next;
    }
    C0Info { basis, n }
}

/// Window densities `D_k[a,b] = tr(R_k[a,b]·C)` with `R_0 = r0` and
/// `R_{k+1} = Σ (I ⊗ K)* R_k (I ⊗ K)`, so that `tr(D_n X) = ρ(E^{(n)}(X ⊗ C))`.
pub fn window_densities_with(
    e: &CpMap,
    r0: &CMat,
    fin: &AlgElement,
    n_max: usize,
) -> Result<Vec<CMat>> {
    if n_max == 0 {
        return Err(Error::Precondition("window length must be positive".into()));
    }
    let d = e.site_dim();
    let n = e.memory().rep_dim();
    let mut sites = 1usize;
    for k in 1..=n_max {
        sites = sites.saturating_mul(d);
        let side = sites.saturating_mul(n);
        if side.saturating_mul(side) > WINDOW_BUDGET {
            return Err(Error::WindowTooLarge {
                n: k,
                entries: side.saturating_mul(side),
            });
        }
    }
    let c = fin.to_dense();
    let kraus: Vec<(CMat, CMat)> = e.kraus().iter().map(|k| (k.adjoint(), k.clone())).collect();
    let mut r = r0.clone();
    let mut s = 1usize;
    let mut out = Vec::with_capacity(n_max);
    for _ in 0..n_max {
        let dn = d * n;
        let mut next = CMat::zeros(s * dn, s * dn);
        for a in 0..s {
            for b in 0..s {
                let blk = r.view((a * n, b * n), (n, n)).into_owned();
                if blk.iter().all(|z| z.norm_sqr() == 0.0) {
                    continue;
                }
                let mut acc = CMat::zeros(dn, dn);
                for (kd, k) in &kraus {
                    acc += kd * &blk * k;
                }
                next.view_mut((a * dn, b * dn), (dn, dn)).copy_from(&acc);
            }
        }
        r = next;
        s *= d;
        let mut dens = CMat::zeros(s, s);
        for a in 0..s {
            for b in 0..s {
                dens[(a, b)] = (r.view((a * n, b * n), (n, n)) * &c).trace();
            }
        }
        out.push(dens);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cpmap::product_state_kraus;
    use crate::linalg::{max_abs, r, real_diag, unit};

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn chain(p: [[f64; 2]; 2], pi: [f64; 2]) -> FcsTriple {
        let mem = FdAlgebra::new(&[1, 1]).unwrap();
        let mut kraus = Vec::new();
        for k in 0..2 {
            for j in 0..2 {
                let mut m = CMat::zeros(2, 4);
                m[(k, k * 2 + j)] = r(p[k][j].sqrt());
                kraus.push(m);
            }
        }
        let e = CpMap::from_kraus(kraus, 2, &mem, &tol()).unwrap();
        let rho = StateOnAlgebra::new(&mem, vec![real_diag(&[pi[0]]), real_diag(&[pi[1]])], 1e-10)
            .unwrap();
        FcsTriple::new(e, rho, tol()).unwrap()
    }

    fn product(dens: &[f64]) -> FcsTriple {
        let mem = FdAlgebra::new(&[1]).unwrap();
        let e = CpMap::from_kraus(
            product_state_kraus(&real_diag(dens)),
            dens.len(),
            &mem,
            &tol(),
        )
        .unwrap();
        FcsTriple::new(e, StateOnAlgebra::tracial(&mem), tol()).unwrap()
    }

    #[test]
    fn identity_window_has_unit_expectation() {
        let t = chain([[0.5, 0.5], [0.3, 0.7]], [0.375, 0.625]);
        for n in 1..=4 {
            let id = CMat::identity(1 << n, 1 << n);
            assert!((t.evaluate(&id).unwrap().re - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn dense_and_word_evaluation_agree() {
        let t = chain([[0.5, 0.5], [0.3, 0.7]], [0.375, 0.625]);
        let word = vec![unit(2, 0, 0), unit(2, 1, 1), unit(2, 1, 1)];
        let direct = t.evaluate_word(&word).unwrap().re;
        let dense = kron(&kron(&word[0], &word[1]), &word[2]);
        assert!((t.evaluate(&dense).unwrap().re - direct).abs() < 1e-14);
    }

    #[test]
    fn product_state_factorizes() {
        let t = product(&[0.3, 0.7]);
        let a = real_diag(&[1.0, 2.0]);
        let b = CMat::from_row_slice(2, 2, &[r(0.0), r(1.0), r(1.0), r(0.5)]);
        let val = t.evaluate(&kron(&a, &b)).unwrap();
        let expect = (0.3 + 1.4) * (0.7 * 0.5);
        assert!((val.re - expect).abs() < 1e-14);
        for n in 1..5 {
            assert!((t.correlation(&a, &b, n).unwrap().re - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn c0_examples() {
        let p = product(&[0.5, 0.5]);
        assert_eq!(p.c0().basis.len(), 1);
        assert_eq!(p.c0().n, 0);
        assert!(p.is_minimal());
        let swap = chain([[0.0, 1.0], [1.0, 0.0]], [0.5, 0.5]);
        assert_eq!(swap.c0().basis.len(), 2);
        assert!(swap.is_minimal());
    }

    #[test]
    fn redundant_memory_is_not_minimal() {
        let mem = FdAlgebra::new(&[1, 1]).unwrap();
        // E(A ⊗ (x, y)) = ψ(A)·x·(1, 1)
        let mut kraus = Vec::new();
        for a in 0..2 {
            let mut m = CMat::zeros(2, 4);
            m[(0, a * 2)] = r(0.5f64.sqrt());
            kraus.push(m.clone());
            let mut m2 = CMat::zeros(2, 4);
            m2[(1, a * 2)] = r(0.5f64.sqrt());
            kraus.push(m2);
        }
        let e = CpMap::from_kraus(kraus, 2, &mem, &tol()).unwrap();
        let rho =
            StateOnAlgebra::new(&mem, vec![real_diag(&[1.0]), real_diag(&[0.0])], 1e-10).unwrap();
        let t = FcsTriple::new(e, rho, tol()).unwrap();
        assert_eq!(t.c0().basis.len(), 1);
        assert!(!t.is_minimal());
    }

    #[test]
    fn regrouped_evaluation_matches_flat() {
        let t = chain([[0.4, 0.6], [0.8, 0.2]], [4.0 / 7.0, 3.0 / 7.0]);
        let t2 = t.regroup(2).unwrap();
        let d4 = t.window_density(4).unwrap();
        let d4b = t2.window_density(2).unwrap();
        assert!(max_abs(&(d4 - d4b)) < 1e-14);
    }

    #[test]
    fn minimal_form_preserves_the_state() {
        // classical chain carried on the full 2×2 memory
        let mem = FdAlgebra::full(2).unwrap();
        let p: [[f64; 2]; 2] = [[0.4, 0.6], [0.8, 0.2]];
        let mut kraus = Vec::new();
        for i in 0..2 {
            for j in 0..2 {
                let mut k = CMat::zeros(2, 4);
                k[(i, i * 2 + j)] = r(p[i][j].sqrt());
                kraus.push(k);
            }
        }
        let e = CpMap::from_kraus(kraus, 2, &mem, &tol()).unwrap();
        let rho =
            StateOnAlgebra::new(&mem, vec![real_diag(&[4.0 / 7.0, 3.0 / 7.0])], 1e-10).unwrap();
        let t = FcsTriple::new(e, rho, tol()).unwrap();
        assert!(!t.is_minimal());
        let m = t.minimal_form().unwrap();
        assert!(m.is_minimal());
        assert_eq!(m.memory().dims(), vec![1, 1]);
        let a = t.window_density(3).unwrap();
        let b = m.window_density(3).unwrap();
        assert!(max_abs(&(a - b)) < 1e-14);
    }

    #[test]
    fn window_length_detection() {
        assert_eq!(window_length(2, 8), Some(3));
        assert_eq!(window_length(3, 8), None);
        assert_eq!(window_length(2, 1), None);
    }
}
