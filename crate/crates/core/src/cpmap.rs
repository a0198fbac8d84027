//! Completely positive maps `E : M_d ⊗ 𝔠 → 𝔠` in Kraus form.
//!
//! Each Kraus operator is an `n × (d·n)` matrix where `n` is the
//! representation dimension of `𝔠`; the domain index `(a, i)` of `ℂ^d ⊗ ℂ^n`
//! is flattened as `a·n + i`. `E(X) = Σ_k K_k X K_k*`.

use crate::algebra::{AlgElement, FdAlgebra, StateOnAlgebra};
use crate::error::{Error, Result};
use crate::linalg::{self, kron, max_abs, r, CMat, CVec};
use crate::tol::Tolerances;

#[derive(Debug, Clone, PartialEq)]
pub struct CpMap {
    d: usize,
    memory: FdAlgebra,
    kraus: Vec<CMat>,
}

impl CpMap {
    /// Validates shapes, block compatibility, the Choi certificate and
    /// unitality.
    pub fn from_kraus(
        kraus: Vec<CMat>,
        d: usize,
        memory: &FdAlgebra,
        tol: &Tolerances,
    ) -> Result<Self> {
        let map = Self::from_kraus_unchecked(kraus, d, memory)?;
        map.validate(tol)?;
        Ok(map)
    }

    /// Shape checks only. Used for maps derived from an already validated one.
    pub fn from_kraus_unchecked(kraus: Vec<CMat>, d: usize, memory: &FdAlgebra) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidDim(0));
        }
        if kraus.is_empty() {
            return Err(Error::ShapeMismatch("no Kraus operators".into()));
        }
        let n = memory.rep_dim();
        for (i, k) in kraus.iter().enumerate() {
            if k.nrows() != n || k.ncols() != d * n {
                return Err(Error::ShapeMismatch(format!(
                    "Kraus operator {i} is {}x{}, expected {n}x{}",
                    k.nrows(),
                    k.ncols(),
                    d * n
                )));
            }
        }
        Ok(Self {
            d,
            memory: memory.clone(),
            kraus,
        })
    }

    /// Builds the map from a Choi matrix `Σ vec(K) vec(K)*` of size
    /// `(n·d·n)²`, decomposing it into Kraus operators.
    pub fn from_choi(choi: &CMat, d: usize, memory: &FdAlgebra, tol: &Tolerances) -> Result<Self> {
        let n = memory.rep_dim();
        let size = n * d * n;
        if choi.nrows() != size || choi.ncols() != size {
            return Err(Error::ShapeMismatch(format!(
                "Choi matrix is {}x{}, expected {size}x{size}",
                choi.nrows(),
                choi.ncols()
            )));
        }
        let herm = linalg::hermitian_residual(choi);
        if herm > tol.psd {
            return Err(Error::ChoiNotPsd(-herm));
        }
        let (vals, vecs) = linalg::hermitian_eig(choi);
        let floor = vals.first().copied().unwrap_or(0.0);
        if floor < -tol.psd * size as f64 {
            return Err(Error::ChoiNotPsd(floor));
        }
        let scale = vals.last().copied().unwrap_or(0.0).max(1.0);
        let mut kraus = Vec::new();
        for (i, &v) in vals.iter().enumerate() {
            if v > tol.psd * scale {
                let col: CVec = vecs.column(i) * r(v.sqrt());
                kraus.push(linalg::unflatten(&col, n, d * n));
            }
        }
        if kraus.is_empty() {
            kraus.push(CMat::zeros(n, d * n));
        }
        Self::from_kraus(kraus, d, memory, tol)
    }

    fn validate(&self, tol: &Tolerances) -> Result<()> {
        let floor = self.choi_min_eigenvalue();
        let size = self.choi_dim();
        if floor < -tol.psd * size as f64 {
            return Err(Error::ChoiNotPsd(floor));
        }
        let mut worst = 0.0f64;
        let dn = self.d * self.memory.rep_dim();
        for a in 0..self.d {
            for b in 0..self.d {
                for c in self.memory.basis() {
                    let x = kron(&linalg::unit(self.d, a, b), &c.to_dense());
                    debug_assert_eq!(x.nrows(), dn);
                    worst = worst.max(self.memory.off_block_residual(&self.apply_dense(&x)));
                }
            }
        }
        if worst > tol.alg {
            return Err(Error::OutputNotInAlgebra(worst));
        }
        let unital = self.unitality_residual();
        if unital > tol.alg {
            return Err(Error::NotUnital(unital));
        }
        Ok(())
    }

    pub fn site_dim(&self) -> usize {
        self.d
    }

    pub fn memory(&self) -> &FdAlgebra {
        &self.memory
    }

    pub fn kraus(&self) -> &[CMat] {
        &self.kraus
    }

    fn choi_dim(&self) -> usize {
        let n = self.memory.rep_dim();
        n * self.d * n
    }

    /// `Σ vec(K) vec(K)*`.
    pub fn choi(&self) -> CMat {
        let size = self.choi_dim();
        let mut out = CMat::zeros(size, size);
        for k in &self.kraus {
            let v = linalg::flatten(k);
            out += &v * v.adjoint();
        }
        out
    }

    /// Smallest Choi eigenvalue, computed from the Gram matrix of the Kraus
    /// vectors (same nonzero spectrum, much smaller when the Kraus rank is low).
    pub fn choi_min_eigenvalue(&self) -> f64 {
        let vs: Vec<CVec> = self.kraus.iter().map(linalg::flatten).collect();
        let m = vs.len();
        let mut gram = CMat::zeros(m, m);
        for i in 0..m {
            for j in 0..m {
                gram[(i, j)] = vs[i].dotc(&vs[j]);
            }
        }
        let floor = linalg::min_hermitian_eigenvalue(&gram);
        if m < self.choi_dim() {
            floor.min(0.0)
        } else {
            floor
        }
    }

    pub fn unitality_residual(&self) -> f64 {
        let n = self.memory.rep_dim();
        let id = CMat::identity(self.d * n, self.d * n);
        max_abs(&(self.apply_dense(&id) - CMat::identity(n, n)))
    }

    /// `Σ K X K*` for a dense `X` on `ℂ^d ⊗ ℂ^n`.
    pub fn apply_dense(&self, x: &CMat) -> CMat {
        let n = self.memory.rep_dim();
        let mut out = CMat::zeros(n, n);
        for k in &self.kraus {
            out += k * x * k.adjoint();
        }
        out
    }

    /// Dual map `E*(R) = Σ K* R K` on densities.
    pub fn apply_dual(&self, rho: &CMat) -> CMat {
        let dn = self.d * self.memory.rep_dim();
        let mut out = CMat::zeros(dn, dn);
        for k in &self.kraus {
            out += k.adjoint() * rho * k;
        }
        out
    }

    /// `E(A ⊗ C)`.
    pub fn apply(&self, a: &CMat, c: &AlgElement) -> Result<AlgElement> {
        if a.nrows() != self.d || a.ncols() != self.d {
            return Err(Error::ShapeMismatch(format!(
                "site operator is {}x{}, expected {}x{}",
                a.nrows(),
                a.ncols(),
                self.d,
                self.d
            )));
        }
        if c.algebra() != &self.memory {
            return Err(Error::ShapeMismatch(
                "memory element from another algebra".into(),
            ));
        }
        let x = kron(a, &c.to_dense());
        Ok(self.memory.compress_dense(&self.apply_dense(&x)))
    }

    /// `E_I(C) = E(I ⊗ C)`.
    pub fn transfer_apply(&self, c: &AlgElement) -> AlgElement {
        self.apply(&CMat::identity(self.d, self.d), c)
            .expect("shapes fixed by construction")
    }

    /// Matrix of `E_I` on the coordinates of `𝔠`.
    pub fn transfer(&self) -> CMat {
        let basis = self.memory.basis();
        let m = basis.len();
        let mut t = CMat::zeros(m, m);
        for (j, b) in basis.iter().enumerate() {
            t.set_column(j, &self.transfer_apply(b).coords());
        }
        t
    }

    /// `E(A₁ ⊗ E(A₂ ⊗ ⋯ E(A_n ⊗ C)⋯))`.
    pub fn apply_word(&self, word: &[CMat], c: &AlgElement) -> Result<AlgElement> {
        if word.is_empty() {
            return Err(Error::ShapeMismatch("empty word".into()));
        }
        let mut acc = c.clone();
        for a in word.iter().rev() {
            acc = self.apply(a, &acc)?;
        }
        Ok(acc)
    }

    /// The `M`-step map `E^{(M)} : M_{d^M} ⊗ 𝔠 → 𝔠`, with Kraus operators
    /// compressed to a linearly independent set.
    pub fn regroup(&self, m: usize) -> CpMap {
        assert!(m >= 1, "regrouping length must be positive");
        let mut acc = self.clone();
        for _ in 1..m {
            acc = acc.then(self);
        }
        acc
    }

    /// `E^{(2)}`-style composition: the map `A ⊗ B ⊗ C ↦ self(A ⊗ inner(B ⊗ C))`.
    pub fn then(&self, inner: &CpMap) -> CpMap {
        let id = CMat::identity(self.d, self.d);
        let mut kraus = Vec::with_capacity(self.kraus.len() * inner.kraus.len());
        for k1 in &self.kraus {
            for k2 in &inner.kraus {
                kraus.push(k1 * kron(&id, k2));
            }
        }
        CpMap {
            d: self.d * inner.d,
            memory: self.memory.clone(),
            kraus: compress_kraus(kraus),
        }
    }

    /// Restriction to the blocks selected by a central projection that is
    /// invariant under the map.
    pub fn restrict_blocks(&self, blocks: &[usize]) -> Result<CpMap> {
        let sub = self.memory.sub_algebra(blocks)?;
        let mut idx = Vec::new();
        for &b in blocks {
            let o = self.memory.offset(b);
            idx.extend(o..o + self.memory.blocks()[b].dim);
        }
        let n = self.memory.rep_dim();
        let mut cols = Vec::new();
        for a in 0..self.d {
            for &i in &idx {
                cols.push(a * n + i);
            }
        }
        let kraus = self
            .kraus
            .iter()
            .map(|k| k.select_rows(&idx).select_columns(&cols))
            .collect();
        Ok(CpMap {
            d: self.d,
            memory: sub,
            kraus: compress_kraus(kraus),
        })
    }
}

/// Replaces a Kraus family by an equivalent linearly independent one from
/// the eigen-decomposition of the smaller Gram matrix of the stacked
/// vectorizations. Directions with weight `≤ 1e-14·max(1, λ_max)` are dropped.
pub fn compress_kraus(kraus: Vec<CMat>) -> Vec<CMat> {
    let (rows, cols) = (kraus[0].nrows(), kraus[0].ncols());
    if kraus.len() <= 1 {
        return kraus;
    }
    let len = rows * cols;
    let mut stacked = CMat::zeros(len, kraus.len());
    for (j, k) in kraus.iter().enumerate() {
        stacked.set_column(j, &linalg::flatten(k));
    }
    let outer = len <= kraus.len();
    let gram = if outer {
        &stacked * stacked.adjoint()
    } else {
        stacked.adjoint() * &stacked
    };
    let (vals, vecs) = linalg::hermitian_eig(&gram);
    let cut = 1e-14 * vals.last().copied().unwrap_or(0.0).max(1.0);
    let mut out = Vec::new();
    for (j, &v) in vals.iter().enumerate().rev() {
        if v <= cut {
            break;
        }
        let col: CVec = if outer {
            vecs.column(j) * r(v.sqrt())
        } else {
            &stacked * vecs.column(j)
        };
        out.push(linalg::unflatten(&col, rows, cols));
    }
    if out.is_empty() {
        out.push(CMat::zeros(rows, cols));
    }
    out
}

/// `max_C |ρ(E_I(C)) − ρ(C)|` over the matrix-unit basis.
pub fn invariance_residual(rho: &StateOnAlgebra, e: &CpMap) -> f64 {
    e.memory()
        .basis()
        .iter()
        .map(|c| (rho.evaluate(&e.transfer_apply(c)) - rho.evaluate(c)).norm())
        .fold(0.0, f64::max)
}

pub fn check_invariance(rho: &StateOnAlgebra, e: &CpMap, tol: &Tolerances) -> (bool, f64) {
    let res = invariance_residual(rho, e);
    (res <= tol.alg, res)
}

/// Outcome of the conditional-expectation test.
#[derive(Debug, Clone)]
pub struct CondExpCheck {
    pub is_conditional_expectation: bool,
    pub unital_residual: f64,
    pub range_dim: usize,
    /// Failure of `ran(E)` to be closed under products and adjoints.
    pub algebra_residual: f64,
    /// `E(C ⊗ I) − C` over a basis of the range.
    pub fix_residual: f64,
    /// `E((C₁⊗I) X (C₂⊗I)) − C₁ E(X) C₂`.
    pub bimodule_residual: f64,
    /// Distance between `ran(E)` and the prescribed subalgebra, if any.
    pub range_residual: Option<f64>,
    /// Orthonormal (Hilbert-Schmidt) basis of `ran(E)`.
    pub range_basis: Vec<CMat>,
}

/// Range of `E : M_d ⊗ M_d → M_d` as an orthonormal basis.
pub fn range_basis(e: &CpMap, tol: f64) -> Vec<CMat> {
    let d = e.site_dim();
    let mut basis: Vec<CVec> = Vec::new();
    for a in 0..d {
        for b in 0..d {
            let ea = linalg::unit(d, a, b);
            for k in 0..d {
                for l in 0..d {
                    let x = kron(&ea, &linalg::unit(d, k, l));
                    linalg::extend_basis(&mut basis, &linalg::flatten(&e.apply_dense(&x)), tol);
                }
            }
        }
    }
    basis.iter().map(|v| linalg::unflatten(v, d, d)).collect()
}

/// Tests whether `E : M_d ⊗ M_d → M_d` is a conditional expectation onto its
/// range (and, when `target` is given, whether that range equals the span of
/// `target`).
pub fn check_conditional_expectation(
    e: &CpMap,
    target: Option<&[CMat]>,
    tol: &Tolerances,
) -> Result<CondExpCheck> {
    let d = e.site_dim();
    if e.memory().num_blocks() != 1 || e.memory().rep_dim() != d {
        return Err(Error::Precondition(format!(
            "conditional-expectation test needs memory M_{d}"
        )));
    }
    let unital = e.unitality_residual();
    let range = range_basis(e, tol.alg);
    let range_vecs: Vec<CVec> = range.iter().map(linalg::flatten).collect();

    let mut algebra_residual = 0.0f64;
    for a in &range {
        algebra_residual = algebra_residual.max(linalg::distance_to_span(
            &range_vecs,
            &linalg::flatten(&a.adjoint()),
        ));
        for b in &range {
            algebra_residual = algebra_residual.max(linalg::distance_to_span(
                &range_vecs,
                &linalg::flatten(&(a * b)),
            ));
        }
    }

    let id = CMat::identity(d, d);
    let mut fix_residual = 0.0f64;
    for c in &range {
        fix_residual = fix_residual.max(max_abs(&(e.apply_dense(&kron(c, &id)) - c)));
    }

    let mut bimodule_residual = 0.0f64;
    for a in 0..d {
        for b in 0..d {
            for k in 0..d {
                for l in 0..d {
                    let x = kron(&linalg::unit(d, a, b), &linalg::unit(d, k, l));
                    let ex = e.apply_dense(&x);
                    for c in &range {
                        let cl = kron(c, &id);
                        let left = e.apply_dense(&(&cl * &x)) - c * &ex;
                        let right = e.apply_dense(&(&x * &cl)) - &ex * c;
                        bimodule_residual =
                            bimodule_residual.max(max_abs(&left)).max(max_abs(&right));
                    }
                }
            }
        }
    }

    let range_residual = target.map(|t| {
        let tv: Vec<CVec> = t.iter().map(linalg::flatten).collect();
        let tb = linalg::orthonormalize(&tv, tol.alg);
        let mut res = 0.0f64;
        for v in &tv {
            res = res.max(linalg::distance_to_span(&range_vecs, v));
        }
        for v in &range_vecs {
            res = res.max(linalg::distance_to_span(&tb, v));
        }
        res
    });

    let ok = unital <= tol.alg
        && algebra_residual <= tol.alg.sqrt().min(1e-6)
        && fix_residual <= tol.alg
        && bimodule_residual <= tol.alg
        && range_residual.is_none_or(|x| x <= tol.alg.sqrt().min(1e-6));
    Ok(CondExpCheck {
        is_conditional_expectation: ok,
        unital_residual: unital,
        range_dim: range.len(),
        algebra_residual,
        fix_residual,
        bimodule_residual,
        range_residual,
        range_basis: range,
    })
}

/// Kraus row vectors of a purification of the state with density `dens`,
/// giving the product-state map `E(A ⊗ c) = tr(dens·A) c` on `𝔠 = ℂ`.
pub fn product_state_kraus(dens: &CMat) -> Vec<CMat> {
    let d = dens.nrows();
    let (vals, vecs) = linalg::hermitian_eig(dens);
    let mut out = Vec::new();
    for (i, &v) in vals.iter().enumerate() {
        if v > 0.0 {
            let row = vecs.column(i).adjoint() * r(v.sqrt());
            out.push(CMat::from_row_slice(1, d, row.as_slice()));
        }
    }
    out
}

/// Kraus operators of `E(A ⊗ B) = A·tr(dens·B)` on `M_d ⊗ M_d → M_d`.
pub fn slice_map_kraus(dens: &CMat) -> Vec<CMat> {
    let d = dens.nrows();
    let id = CMat::identity(d, d);
    product_state_kraus(dens)
        .into_iter()
        .map(|row| kron(&id, &row))
        .collect()
}
