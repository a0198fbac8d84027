//! Finite-dimensional C*-algebras `⊕ᵢ M_{dᵢ}`, their elements and states.
//!
//! An algebra is represented concretely on `⊕ᵢ ℂ^{dᵢ}`; elements are stored
//! densely block by block. Coordinates used for spans and ranks are the
//! concatenated column-major block entries, so the coordinate inner product is
//! the Hilbert-Schmidt inner product.

use std::collections::HashSet;
use std::ops::{Add, Mul, Sub};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{self, c, frob, hermitian_eig, max_abs, r, CMat, CVec, C64, ONE};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub label: String,
    pub dim: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FdAlgebra {
    blocks: Vec<Block>,
}

impl FdAlgebra {
    /// Direct sum of full matrix algebras with default labels `b0, b1, …`.
    pub fn new(dims: &[usize]) -> Result<Self> {
        let labels: Vec<String> = (0..dims.len()).map(|i| format!("b{i}")).collect();
        Self::with_labels(dims, &labels)
    }

    pub fn with_labels(dims: &[usize], labels: &[String]) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::EmptyAlgebra);
        }
        if labels.len() != dims.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} labels for {} blocks",
                labels.len(),
                dims.len()
            )));
        }
        let mut seen = HashSet::new();
        let mut blocks = Vec::with_capacity(dims.len());
        for (i, (&dim, label)) in dims.iter().zip(labels).enumerate() {
            if dim == 0 {
                return Err(Error::InvalidDim(i));
            }
            if !seen.insert(label.clone()) {
                return Err(Error::DuplicateLabel(label.clone()));
            }
            blocks.push(Block {
                label: label.clone(),
                dim,
            });
        }
        Ok(Self { blocks })
    }

    /// The full matrix algebra `M_d`.
    pub fn full(d: usize) -> Result<Self> {
        Self::new(&[d])
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn dims(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.dim).collect()
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// `Σ dᵢ²`, the complex dimension of the algebra.
    pub fn linear_dim(&self) -> usize {
        self.blocks.iter().map(|b| b.dim * b.dim).sum()
    }

    /// `Σ dᵢ`, the dimension of the representation space.
    pub fn rep_dim(&self) -> usize {
        self.blocks.iter().map(|b| b.dim).sum()
    }

    /// Offset of block `i` in the representation space.
    pub fn offset(&self, i: usize) -> usize {
        self.blocks[..i].iter().map(|b| b.dim).sum()
    }

    /// Offset of block `i` in coordinate space.
    pub fn coord_offset(&self, i: usize) -> usize {
        self.blocks[..i].iter().map(|b| b.dim * b.dim).sum()
    }

    pub fn zero(&self) -> AlgElement {
        AlgElement {
            algebra: self.clone(),
            blocks: self
                .blocks
                .iter()
                .map(|b| CMat::zeros(b.dim, b.dim))
                .collect(),
        }
    }

    pub fn identity(&self) -> AlgElement {
        AlgElement {
            algebra: self.clone(),
            blocks: self
                .blocks
                .iter()
                .map(|b| CMat::identity(b.dim, b.dim))
                .collect(),
        }
    }

    /// Central projection onto block `i`.
    pub fn block_unit(&self, i: usize) -> AlgElement {
        let mut e = self.zero();
        e.blocks[i] = CMat::identity(self.blocks[i].dim, self.blocks[i].dim);
        e
    }

    /// Matrix unit `e_{kl}` inside block `b`.
    pub fn matrix_unit(&self, b: usize, k: usize, l: usize) -> AlgElement {
        let mut e = self.zero();
        e.blocks[b][(k, l)] = ONE;
        e
    }

    /// Matrix-unit basis, ordered like the coordinates.
    pub fn basis(&self) -> Vec<AlgElement> {
        let mut out = Vec::with_capacity(self.linear_dim());
        for (b, blk) in self.blocks.iter().enumerate() {
            for l in 0..blk.dim {
                for k in 0..blk.dim {
                    out.push(self.matrix_unit(b, k, l));
                }
            }
        }
        out
    }

    pub fn from_coords(&self, v: &CVec) -> AlgElement {
        let mut e = self.zero();
        let mut off = 0;
        for (b, blk) in self.blocks.iter().enumerate() {
            let n = blk.dim * blk.dim;
            e.blocks[b] = CMat::from_column_slice(blk.dim, blk.dim, &v.as_slice()[off..off + n]);
            off += n;
        }
        e
    }

    /// Embeds a dense matrix on the representation space, checking that its
    /// off-block entries vanish within `tol`.
    pub fn from_dense(&self, m: &CMat, tol: f64) -> Result<AlgElement> {
        let n = self.rep_dim();
        if m.nrows() != n || m.ncols() != n {
            return Err(Error::ShapeMismatch(format!(
                "dense matrix {}x{} for representation dimension {n}",
                m.nrows(),
                m.ncols()
            )));
        }
        let residual = self.off_block_residual(m);
        if residual > tol {
            return Err(Error::OutputNotInAlgebra(residual));
        }
        Ok(self.compress_dense(m))
    }

    /// Block-diagonal part of a dense matrix, discarding everything else.
    pub fn compress_dense(&self, m: &CMat) -> AlgElement {
        let mut e = self.zero();
        for (b, blk) in self.blocks.iter().enumerate() {
            let o = self.offset(b);
            e.blocks[b] = m.view((o, o), (blk.dim, blk.dim)).into_owned();
        }
        e
    }

    pub fn off_block_residual(&self, m: &CMat) -> f64 {
        let mut inside = CMat::zeros(m.nrows(), m.ncols());
        for (b, blk) in self.blocks.iter().enumerate() {
            let o = self.offset(b);
            inside
                .view_mut((o, o), (blk.dim, blk.dim))
                .copy_from(&m.view((o, o), (blk.dim, blk.dim)));
        }
        max_abs(&(m - inside))
    }

    /// Sub-algebra made of the selected blocks.
    pub fn sub_algebra(&self, blocks: &[usize]) -> Result<FdAlgebra> {
        let dims: Vec<usize> = blocks.iter().map(|&b| self.blocks[b].dim).collect();
        let labels: Vec<String> = blocks
            .iter()
            .map(|&b| self.blocks[b].label.clone())
            .collect();
        FdAlgebra::with_labels(&dims, &labels)
    }
}

/// Convenience wrapper matching the operation name used across the crate.
pub fn make_algebra(dims: &[usize]) -> Result<FdAlgebra> {
    FdAlgebra::new(dims)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlgElement {
    algebra: FdAlgebra,
    blocks: Vec<CMat>,
}

impl AlgElement {
    pub fn from_blocks(algebra: &FdAlgebra, blocks: Vec<CMat>) -> Result<Self> {
        if blocks.len() != algebra.num_blocks() {
            return Err(Error::ShapeMismatch(format!(
                "{} blocks for an algebra with {}",
                blocks.len(),
                algebra.num_blocks()
            )));
        }
        for (i, (m, b)) in blocks.iter().zip(algebra.blocks()).enumerate() {
            if m.nrows() != b.dim || m.ncols() != b.dim {
                return Err(Error::ShapeMismatch(format!(
                    "block {i} is {}x{}, expected {}x{}",
                    m.nrows(),
                    m.ncols(),
                    b.dim,
                    b.dim
                )));
            }
        }
        Ok(Self {
            algebra: algebra.clone(),
            blocks,
        })
    }

    pub fn algebra(&self) -> &FdAlgebra {
        &self.algebra
    }

    pub fn blocks(&self) -> &[CMat] {
        &self.blocks
    }

    pub fn block(&self, i: usize) -> &CMat {
        &self.blocks[i]
    }

    pub fn adjoint(&self) -> Self {
        Self {
            algebra: self.algebra.clone(),
            blocks: self.blocks.iter().map(|m| m.adjoint()).collect(),
        }
    }

    pub fn scale(&self, z: C64) -> Self {
        Self {
            algebra: self.algebra.clone(),
            blocks: self.blocks.iter().map(|m| m * z).collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        self.blocks.iter().map(|m| m.trace()).sum()
    }

    /// Largest entry modulus; the yardstick for tolerance checks.
    pub fn max_abs(&self) -> f64 {
        self.blocks.iter().map(max_abs).fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.blocks
            .iter()
            .map(|m| frob(m).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// Operator norm: the largest singular value over blocks.
    pub fn norm(&self) -> f64 {
        self.blocks
            .iter()
            .map(|m| {
                m.clone()
                    .singular_values()
                    .iter()
                    .copied()
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }

    pub fn is_self_adjoint(&self, tol: f64) -> bool {
        self.blocks
            .iter()
            .all(|m| linalg::hermitian_residual(m) <= tol)
    }

    pub fn is_projection(&self, tol: f64) -> bool {
        self.is_self_adjoint(tol) && (&(self * self) - self).max_abs() <= tol
    }

    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    pub fn coords(&self) -> CVec {
        let mut v = Vec::with_capacity(self.algebra.linear_dim());
        for m in &self.blocks {
            v.extend_from_slice(m.as_slice());
        }
        CVec::from_vec(v)
    }

    /// Block-diagonal matrix on the representation space.
    pub fn to_dense(&self) -> CMat {
        let n = self.algebra.rep_dim();
        let mut out = CMat::zeros(n, n);
        for (b, m) in self.blocks.iter().enumerate() {
            let o = self.algebra.offset(b);
            out.view_mut((o, o), (m.nrows(), m.ncols())).copy_from(m);
        }
        out
    }

    /// Selected blocks as an element of the sub-algebra.
    pub fn restrict(&self, blocks: &[usize]) -> Result<AlgElement> {
        let sub = self.algebra.sub_algebra(blocks)?;
        Ok(AlgElement {
            algebra: sub,
            blocks: blocks.iter().map(|&b| self.blocks[b].clone()).collect(),
        })
    }
}

impl<'a> Add<&'a AlgElement> for &'a AlgElement {
    type Output = AlgElement;
    fn add(self, rhs: &AlgElement) -> AlgElement {
        AlgElement {
            algebra: self.algebra.clone(),
            blocks: self
                .blocks
                .iter()
                .zip(&rhs.blocks)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl<'a> Sub<&'a AlgElement> for &'a AlgElement {
    type Output = AlgElement;
    fn sub(self, rhs: &AlgElement) -> AlgElement {
        AlgElement {
            algebra: self.algebra.clone(),
            blocks: self
                .blocks
                .iter()
                .zip(&rhs.blocks)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl<'a> Mul<&'a AlgElement> for &'a AlgElement {
    type Output = AlgElement;
    fn mul(self, rhs: &AlgElement) -> AlgElement {
        AlgElement {
            algebra: self.algebra.clone(),
            blocks: self
                .blocks
                .iter()
                .zip(&rhs.blocks)
                .map(|(a, b)| a * b)
                .collect(),
        }
    }
}

/// A state on `⊕ᵢ M_{dᵢ}` given by per-block density matrices `Dᵢ`, so that
/// `ρ(C) = Σᵢ tr(Dᵢ Cᵢ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateOnAlgebra {
    densities: AlgElement,
}

impl StateOnAlgebra {
    pub fn new(algebra: &FdAlgebra, densities: Vec<CMat>, tol: f64) -> Result<Self> {
        let d = AlgElement::from_blocks(algebra, densities)?;
        Self::from_element(d, tol)
    }

    pub fn from_element(densities: AlgElement, tol: f64) -> Result<Self> {
        for (i, m) in densities.blocks().iter().enumerate() {
            let herm = linalg::hermitian_residual(m);
            if herm > tol {
                return Err(Error::InvalidState(format!(
                    "density of block {i} is not Hermitian (residual {herm:.3e})"
                )));
            }
            let floor = linalg::min_hermitian_eigenvalue(m);
            if floor < -tol {
                return Err(Error::InvalidState(format!(
                    "density of block {i} has negative eigenvalue {floor:.3e}"
                )));
            }
        }
        let tr = densities.trace();
        if (tr - ONE).norm() > tol {
            return Err(Error::InvalidState(format!(
                "total trace {:.12} differs from 1",
                tr.re
            )));
        }
        Ok(Self { densities })
    }

    /// Normalized trace on the representation space.
    pub fn tracial(algebra: &FdAlgebra) -> Self {
        let n = algebra.rep_dim() as f64;
        Self {
            densities: algebra.identity().scale(r(1.0 / n)),
        }
    }

    pub fn algebra(&self) -> &FdAlgebra {
        self.densities.algebra()
    }

    pub fn densities(&self) -> &AlgElement {
        &self.densities
    }

    pub fn evaluate(&self, c: &AlgElement) -> C64 {
        self.densities
            .blocks()
            .iter()
            .zip(c.blocks())
            .map(|(d, x)| (d * x).trace())
            .sum()
    }

    /// Coordinates of the functional: `ρ(C) = ⟨w, coords(C)⟩` (unconjugated
    /// pairing), i.e. `w` holds the transposed densities.
    pub fn functional_coords(&self) -> CVec {
        let mut v = Vec::with_capacity(self.algebra().linear_dim());
        for d in self.densities.blocks() {
            v.extend_from_slice(d.transpose().as_slice());
        }
        CVec::from_vec(v)
    }

    pub fn from_functional_coords(algebra: &FdAlgebra, w: &CVec, tol: f64) -> Result<Self> {
        let e = algebra.from_coords(w);
        let blocks = e.blocks().iter().map(|m| m.transpose()).collect();
        Self::new(algebra, blocks, tol)
    }

    /// Restriction to the blocks of a central projection, renormalized.
    pub fn restrict(&self, blocks: &[usize], tol: f64) -> Result<Self> {
        let sub = self.densities.restrict(blocks)?;
        let w = sub.trace().re;
        if w <= 0.0 {
            return Err(Error::InvalidState(
                "restriction to zero-weight blocks".into(),
            ));
        }
        Self::from_element(sub.scale(r(1.0 / w)), tol)
    }
}

/// Von Neumann entropy `−Σᵢ tr(Dᵢ log Dᵢ)` in nats.
pub fn entropy(rho: &StateOnAlgebra) -> f64 {
    rho.densities()
        .blocks()
        .iter()
        .map(linalg::entropy_of_density)
        .sum()
}

/// Minimal projections of the unital *-algebra generated by a commuting
/// family of self-adjoint elements.
///
/// A random real combination of the family is diagonalized first; each
/// eigenspace is then split further by every family member so accidental
/// degeneracies of the combination cannot merge distinct joint eigenspaces.
/// Subspaces from different blocks with the same joint eigenvalues belong to
/// the same minimal projection.
pub fn minimal_projections(
    algebra: &FdAlgebra,
    family: &[AlgElement],
    tol: f64,
    gap: f64,
) -> Result<Vec<AlgElement>> {
    for f in family {
        if f.algebra() != algebra {
            return Err(Error::ShapeMismatch(
                "family element from another algebra".into(),
            ));
        }
        if !f.is_self_adjoint(tol.max(gap)) {
            return Err(Error::Precondition(
                "minimal_projections requires self-adjoint elements".into(),
            ));
        }
    }
    let mut worst = 0.0f64;
    for (i, a) in family.iter().enumerate() {
        for b in &family[i + 1..] {
            worst = worst.max(a.commutator(b).max_abs());
        }
    }
    if worst > tol.max(gap) {
        return Err(Error::NonCommuting(worst));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_f00d);
    let coeffs: Vec<f64> = family.iter().map(|_| rng.gen_range(0.5..1.5)).collect();
    let mut combo = algebra.zero();
    for (f, &cf) in family.iter().zip(&coeffs) {
        combo = &combo + &f.scale(r(cf));
    }
    let scale = family.iter().map(|f| f.max_abs()).fold(1.0, f64::max);
    let gap = gap * scale;

    // (block, orthonormal columns, joint eigenvalue tuple)
    let mut pieces: Vec<(usize, CMat, Vec<f64>)> = Vec::new();
    for b in 0..algebra.num_blocks() {
        let dim = algebra.blocks()[b].dim;
        let mut subspaces = split_by(&CMat::identity(dim, dim), combo.block(b), gap);
        for f in family {
            subspaces = subspaces
                .into_iter()
                .flat_map(|w| split_by(&w, f.block(b), gap))
                .collect();
        }
        for w in subspaces {
            let tuple = family
                .iter()
                .map(|f| (w.adjoint() * f.block(b) * &w).trace().re / w.ncols() as f64)
                .collect();
            pieces.push((b, w, tuple));
        }
    }

    let mut classes: Vec<(Vec<f64>, AlgElement)> = Vec::new();
    for (b, w, tuple) in pieces {
        let proj = &w * w.adjoint();
        let slot = classes.iter_mut().find(|(t, _)| {
            t.iter()
                .zip(&tuple)
                .all(|(x, y)| (x - y).abs() <= gap.max(1e3 * tol))
        });
        match slot {
            Some((_, p)) => p.blocks[b] += proj,
            None => {
                let mut p = algebra.zero();
                p.blocks[b] = proj;
                classes.push((tuple, p));
            }
        }
    }
    Ok(classes.into_iter().map(|(_, p)| p).collect())
}

/// Splits the subspace spanned by the orthonormal columns of `w` into the
/// eigenspaces of `w* h w`, clustering eigenvalues closer than `gap`.
fn split_by(w: &CMat, h: &CMat, gap: f64) -> Vec<CMat> {
    let compressed = w.adjoint() * h * w;
    let (vals, vecs) = hermitian_eig(&compressed);
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=vals.len() {
        if i == vals.len() || vals[i] - vals[i - 1] > gap {
            let cols = vecs.columns(start, i - start).into_owned();
            out.push(w * cols);
            start = i;
        }
    }
    out
}

/// Orthonormal coordinate basis of the unital *-algebra generated by
/// `generators` (closure under adjoints and products).
pub fn generated_algebra(algebra: &FdAlgebra, generators: &[AlgElement], tol: f64) -> Vec<CVec> {
    let mut basis: Vec<CVec> = Vec::new();
    linalg::extend_basis(&mut basis, &algebra.identity().coords(), tol);
    for g in generators {
        linalg::extend_basis(&mut basis, &g.coords(), tol);
        linalg::extend_basis(&mut basis, &g.adjoint().coords(), tol);
    }
    loop {
        let elems: Vec<AlgElement> = basis.iter().map(|v| algebra.from_coords(v)).collect();
        let before = basis.len();
        'outer: for a in &elems {
            for b in &elems {
                linalg::extend_basis(&mut basis, &(a * b).coords(), tol);
                if basis.len() == algebra.linear_dim() {
                    break 'outer;
                }
            }
        }
        if basis.len() == before || basis.len() == algebra.linear_dim() {
            return basis;
        }
    }
}

/// Block structure of a unital *-subalgebra `𝔇 = ⊕ᵢ M_{dᵢ}` of `M_d`.
///
/// In the basis given by the columns of `v`, block `i` occupies
/// `offsets[i] .. offsets[i] + mᵢdᵢ` and `𝔇` acts there as `I_{mᵢ} ⊗ M_{dᵢ}`;
/// the local index of `(μ, κ)` with `μ < mᵢ`, `κ < dᵢ` is `μ·dᵢ + κ`.
#[derive(Debug, Clone)]
pub struct RangeDecomposition {
    pub dims: Vec<usize>,
    pub mults: Vec<usize>,
    pub offsets: Vec<usize>,
    /// Minimal central projections `zᵢ` of `𝔇`.
    pub projections: Vec<CMat>,
    pub v: CMat,
}

impl RangeDecomposition {
    pub fn num_blocks(&self) -> usize {
        self.dims.len()
    }

    /// Whether `v` is a permutation matrix up to phases.
    pub fn is_standard_basis(&self, tol: f64) -> bool {
        let n = self.v.nrows();
        (0..n).all(|j| {
            let col = self.v.column(j);
            let big = col.iter().filter(|z| z.norm() > tol).count();
            big == 1 && col.iter().any(|z| (z.norm() - 1.0).abs() <= tol)
        })
    }
}

/// Block dimensions, multiplicities and adapted basis of the unital
/// *-subalgebra spanned by `range`.
pub fn subalgebra_decomposition(range: &[CMat]) -> Result<RangeDecomposition> {
    let d = range
        .first()
        .map(|m| m.nrows())
        .ok_or(Error::EmptyAlgebra)?;
    // center: combinations commuting with every spanning element
    let rdim = range.len();
    let mut a = CMat::zeros(rdim * d * d, rdim);
    for (j, rj) in range.iter().enumerate() {
        for (k, rk) in range.iter().enumerate() {
            let comm = rj * rk - rk * rj;
            a.view_mut((k * d * d, j), (d * d, 1))
                .copy_from(&linalg::flatten(&comm));
        }
    }
    let gram = a.adjoint() * &a;
    let (vals, vecs) = hermitian_eig(&gram);
    let scale = vals.last().copied().unwrap_or(1.0).max(1.0);
    let full = FdAlgebra::full(d)?;
    let mut family = Vec::new();
    for (i, &v) in vals.iter().enumerate() {
        if v > 1e-14 * scale {
            continue;
        }
        let mut z = CMat::zeros(d, d);
        for (j, rj) in range.iter().enumerate() {
            z += rj * vecs[(j, i)];
        }
        let adj = z.adjoint();
        family.push(AlgElement::from_blocks(&full, vec![(&z + &adj) * r(0.5)])?);
        family.push(AlgElement::from_blocks(
            &full,
            vec![(&z - &adj) * c(0.0, -0.5)],
        )?);
    }
    let mut zs: Vec<CMat> = minimal_projections(&full, &family, 1e-8, 1e-7)?
        .into_iter()
        .map(|p| p.block(0).clone())
        .collect();
    zs.sort_by_key(|z| (0..d).find(|&i| z[(i, i)].re > 1e-6).unwrap_or(d));

    let mut rng = ChaCha8Rng::seed_from_u64(0x0d15_ea5e);
    let mut dims = Vec::new();
    let mut mults = Vec::new();
    let mut offsets = Vec::new();
    let mut v = CMat::zeros(d, d);
    let mut off = 0;
    for z in &zs {
        let sub_vecs: Vec<CVec> = range.iter().map(|rj| linalg::flatten(&(z * rj))).collect();
        let sub: Vec<CMat> = linalg::span_basis(&sub_vecs, 1e-8)
            .iter()
            .map(|v| linalg::unflatten(v, d, d))
            .collect();
        let di = (sub.len() as f64).sqrt().round() as usize;
        let rank = z.trace().re.round() as usize;
        if di == 0 || di * di != sub.len() || !rank.is_multiple_of(di) {
            return Err(Error::RangeNotAlgebra(1.0));
        }
        let mi = rank / di;
        let project = |x: &CMat| -> CMat {
            let mut out = CMat::zeros(d, d);
            for b in &sub {
                out += b * (b.adjoint() * x).trace();
            }
            out
        };
        let (zvals, zvecs) = hermitian_eig(z);
        let w: CMat = zvecs.columns(d - rank, rank).into_owned();
        debug_assert!(zvals[d - rank] > 0.5);

        let diag: Vec<f64> = (0..d).map(|k| 1.0 + k as f64).collect();
        let mut h = project(&linalg::real_diag(&diag));
        let mut pieces = None;
        for _ in 0..16 {
            let (hv, hw) = hermitian_eig(&(w.adjoint() * &h * &w));
            let groups = cluster_sorted(&hv, 1e-7);
            if groups.len() == di && groups.iter().all(|g| g.len() == mi) {
                pieces = Some(
                    groups
                        .iter()
                        .map(|g| &w * hw.columns(g[0], g.len()))
                        .collect::<Vec<CMat>>(),
                );
                break;
            }
            let mut extra = CMat::zeros(d, d);
            for b in &sub {
                let herm = (b + b.adjoint()) * r(0.5);
                extra += herm * r(rng.gen_range(-1.0..1.0));
            }
            h += extra;
        }
        let pieces = pieces
            .ok_or_else(|| Error::Numerical("no generic element found in the range".into()))?;
        let p: Vec<CMat> = pieces.iter().map(|w| w * w.adjoint()).collect();

        let ones = CMat::from_element(d, d, r(1.0));
        let mut x = project(&ones);
        let mut units = Vec::with_capacity(di);
        for _ in 0..16 {
            units.clear();
            for pk in &p {
                let wk = &p[0] * &x * pk;
                let norm2 = (&wk * wk.adjoint()).trace().re / mi as f64;
                if norm2 < 1e-10 {
                    break;
                }
                units.push((wk / r(norm2.sqrt())).adjoint());
            }
            if units.len() == di {
                break;
            }
            let mut extra = CMat::zeros(d, d);
            for b in &sub {
                extra += b * c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
            x = project(&extra);
        }
        if units.len() != di {
            return Err(Error::Numerical(
                "could not build matrix units for the range".into(),
            ));
        }
        for s in 0..mi {
            let us = pieces[0].column(s).into_owned();
            for (k, ek1) in units.iter().enumerate() {
                v.set_column(off + s * di + k, &(ek1 * &us));
            }
        }
        dims.push(di);
        mults.push(mi);
        offsets.push(off);
        off += rank;
    }
    if off != d {
        return Err(Error::RangeNotAlgebra(1.0));
    }
    let unit_res = max_abs(&(v.adjoint() * &v - CMat::identity(d, d)));
    if unit_res > 1e-8 {
        return Err(Error::Numerical(format!(
            "adapted basis is not unitary (residual {unit_res:.3e})"
        )));
    }
    Ok(RangeDecomposition {
        dims,
        mults,
        offsets,
        projections: zs,
        v,
    })
}

/// Groups of indices of an ascending list whose consecutive gaps are ≤ `gap`.
fn cluster_sorted(vals: &[f64], gap: f64) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = Vec::new();
    for (i, &v) in vals.iter().enumerate() {
        match out.last_mut() {
            Some(g) if v - vals[*g.last().expect("nonempty")] <= gap => g.push(i),
            _ => out.push(vec![i]),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::real_diag;

    const TOL: f64 = 1e-10;

    #[test]
    fn make_algebra_examples() {
        let m2 = make_algebra(&[2]).unwrap();
        assert_eq!(m2.linear_dim(), 4);
        let cc = make_algebra(&[1, 1]).unwrap();
        assert_eq!(cc.linear_dim(), 2);
        assert_eq!(cc.rep_dim(), 2);
        let m3 = make_algebra(&[3]).unwrap();
        assert_eq!(m3.linear_dim(), 9);
        assert!(m3.identity().is_projection(TOL));
    }

    #[test]
    fn make_algebra_errors() {
        assert_eq!(make_algebra(&[]), Err(Error::EmptyAlgebra));
        assert_eq!(make_algebra(&[2, 0]), Err(Error::InvalidDim(1)));
        let labels = vec!["a".to_string(), "a".to_string()];
        assert!(matches!(
            FdAlgebra::with_labels(&[1, 1], &labels),
            Err(Error::DuplicateLabel(_))
        ));
    }

    #[test]
    fn minimal_projections_of_unit_only() {
        let cc = make_algebra(&[1, 1]).unwrap();
        let ps = minimal_projections(&cc, &[cc.identity()], TOL, 1e-8).unwrap();
        assert_eq!(ps.len(), 1);
        assert!((&ps[0] - &cc.identity()).max_abs() < TOL);
    }

    #[test]
    fn minimal_projections_of_sign_element() {
        let cc = make_algebra(&[1, 1]).unwrap();
        let s = AlgElement::from_blocks(&cc, vec![real_diag(&[1.0]), real_diag(&[-1.0])]).unwrap();
        let ps = minimal_projections(&cc, &[s], TOL, 1e-8).unwrap();
        assert_eq!(ps.len(), 2);
        let sum = &ps[0] + &ps[1];
        assert!((&sum - &cc.identity()).max_abs() < TOL);
        assert!((&ps[0] * &ps[1]).max_abs() < TOL);
        assert!(ps.iter().all(|p| p.is_projection(TOL)));
    }

    #[test]
    fn minimal_projections_inside_matrix_block() {
        let m3 = make_algebra(&[3]).unwrap();
        let h = AlgElement::from_blocks(&m3, vec![real_diag(&[2.0, 2.0, 5.0])]).unwrap();
        let ps = minimal_projections(&m3, &[h], TOL, 1e-8).unwrap();
        let mut ranks: Vec<f64> = ps.iter().map(|p| p.trace().re.round()).collect();
        ranks.sort_by(f64::total_cmp);
        assert_eq!(ranks, vec![1.0, 2.0]);
    }

    #[test]
    fn non_commuting_family_rejected() {
        let m2 = make_algebra(&[2]).unwrap();
        let x = &m2.matrix_unit(0, 0, 1) + &m2.matrix_unit(0, 1, 0);
        let z = &m2.matrix_unit(0, 0, 0) - &m2.matrix_unit(0, 1, 1);
        assert!(matches!(
            minimal_projections(&m2, &[x, z], TOL, 1e-8),
            Err(Error::NonCommuting(_))
        ));
    }

    #[test]
    fn entropy_examples() {
        let m2 = make_algebra(&[2]).unwrap();
        let pure = StateOnAlgebra::new(&m2, vec![real_diag(&[1.0, 0.0])], TOL).unwrap();
        assert!(entropy(&pure).abs() < 1e-14);
        let mixed = StateOnAlgebra::tracial(&m2);
        assert!((entropy(&mixed) - 2f64.ln()).abs() < 1e-14);
        let m3 = make_algebra(&[3]).unwrap();
        let d = StateOnAlgebra::new(&m3, vec![real_diag(&[0.4, 0.4, 0.2])], TOL).unwrap();
        let expected = -(0.8 * 0.4f64.ln() + 0.2 * 0.2f64.ln());
        assert!((entropy(&d) - expected).abs() < 1e-14);
    }

    #[test]
    fn state_validation() {
        let m2 = make_algebra(&[2]).unwrap();
        assert!(StateOnAlgebra::new(&m2, vec![real_diag(&[0.7, 0.7])], TOL).is_err());
        assert!(StateOnAlgebra::new(&m2, vec![real_diag(&[1.2, -0.2])], TOL).is_err());
    }

    #[test]
    fn generated_algebra_of_diagonal_is_abelian() {
        let m3 = make_algebra(&[3]).unwrap();
        let h = AlgElement::from_blocks(&m3, vec![real_diag(&[1.0, 2.0, 3.0])]).unwrap();
        assert_eq!(generated_algebra(&m3, &[h], TOL).len(), 3);
        let x = &m3.matrix_unit(0, 0, 1) + &m3.matrix_unit(0, 1, 2);
        assert_eq!(generated_algebra(&m3, &[x], TOL).len(), 9);
    }
}
