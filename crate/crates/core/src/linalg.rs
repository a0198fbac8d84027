//! Dense complex linear algebra helpers on top of `nalgebra`.

use nalgebra::{DMatrix, DVector, Schur, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn r(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn real_diag(values: &[f64]) -> CMat {
    let n = values.len();
    let mut m = CMat::zeros(n, n);
    for (i, &v) in values.iter().enumerate() {
        m[(i, i)] = r(v);
    }
    m
}

pub fn unit(n: usize, i: usize, j: usize) -> CMat {
    let mut m = CMat::zeros(n, n);
    m[(i, j)] = ONE;
    m
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

pub fn frob(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn hermitian_residual(m: &CMat) -> f64 {
    max_abs(&(m - m.adjoint()))
}

/// Eigen-decomposition of a Hermitian matrix (symmetrized first).
/// Eigenvalues ascending, eigenvectors in matching columns.
pub fn hermitian_eig(m: &CMat) -> (Vec<f64>, CMat) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), CMat::zeros(0, 0));
    }
    let h = (m + m.adjoint()) * r(0.5);
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMat::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        vectors.set_column(k, &eig.eigenvectors.column(i));
    }
    (values, vectors)
}

pub fn hermitian_eigenvalues(m: &CMat) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let h = (m + m.adjoint()) * r(0.5);
    let mut v: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

pub fn min_hermitian_eigenvalue(m: &CMat) -> f64 {
    hermitian_eigenvalues(m).first().copied().unwrap_or(0.0)
}

/// Applies a real function to the spectrum of a Hermitian matrix.
pub fn hermitian_fn(m: &CMat, f: impl Fn(f64) -> f64) -> CMat {
    let (vals, vecs) = hermitian_eig(m);
    let d = real_diag(&vals.iter().map(|&v| f(v)).collect::<Vec<_>>());
    &vecs * d * vecs.adjoint()
}

/// All eigenvalues of a general square matrix via the complex Schur form.
pub fn eigenvalues(m: &CMat) -> Result<Vec<C64>> {
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    let schur = Schur::try_new(m.clone(), 1e-15, 100_000)
        .ok_or_else(|| Error::Numerical("Schur decomposition did not converge".into()))?;
    let (_, t) = schur.unpack();
    Ok((0..t.nrows()).map(|i| t[(i, i)]).collect())
}

/// Right singular vectors for the `k` smallest singular values, with those
/// singular values, from the eigen-decomposition of `m* m`.
pub fn smallest_right_singular(m: &CMat, k: usize) -> (Vec<f64>, Vec<CVec>) {
    let (vals, vecs) = hermitian_eig(&(m.adjoint() * m));
    let take = k.min(vals.len());
    let sv = vals[..take].iter().map(|&v| v.max(0.0).sqrt()).collect();
    let v = (0..take).map(|i| vecs.column(i).into_owned()).collect();
    (sv, v)
}

/// Orthonormal basis of the span of `vectors` by modified Gram-Schmidt with
/// one re-orthogonalization pass. A vector is dropped when its residual falls
/// below `tol * max(1, |v|)`.
pub fn orthonormalize(vectors: &[CVec], tol: f64) -> Vec<CVec> {
    let mut basis: Vec<CVec> = Vec::new();
    for v in vectors {
        if let Some(u) = residual_unit(&basis, v, tol) {
            basis.push(u);
        }
    }
    basis
}

/// Orthonormal basis of the span, taking the vectors in order of
/// decreasing norm so that small inputs do not set directions.
pub fn span_basis(vectors: &[CVec], tol: f64) -> Vec<CVec> {
    let mut sorted: Vec<&CVec> = vectors.iter().collect();
    sorted.sort_by(|x, y| y.norm().total_cmp(&x.norm()));
    let mut basis: Vec<CVec> = Vec::new();
    for v in sorted {
        if let Some(u) = residual_unit(&basis, v, tol) {
            basis.push(u);
        }
    }
    basis
}

/// Extends an orthonormal basis with `v` if `v` is not already in its span.
pub fn extend_basis(basis: &mut Vec<CVec>, v: &CVec, tol: f64) -> bool {
    match residual_unit(basis, v, tol) {
        Some(u) => {
            basis.push(u);
            true
        }
        None => false,
    }
}

fn residual_unit(basis: &[CVec], v: &CVec, tol: f64) -> Option<CVec> {
    let scale = v.norm().max(1.0);
    let mut w = v.clone();
    for _ in 0..2 {
        for b in basis {
            let proj = b.dotc(&w);
            w.axpy(-proj, b, ONE);
        }
    }
    let n = w.norm();
    if n > tol * scale {
        Some(w / r(n))
    } else {
        None
    }
}

/// Distance from `v` to the span of an orthonormal basis.
pub fn distance_to_span(basis: &[CVec], v: &CVec) -> f64 {
    let mut w = v.clone();
    for _ in 0..2 {
        for b in basis {
            let proj = b.dotc(&w);
            w.axpy(-proj, b, ONE);
        }
    }
    w.norm()
}

pub fn rank(vectors: &[CVec], tol: f64) -> usize {
    orthonormalize(vectors, tol).len()
}

/// Column-major vectorization.
pub fn flatten(m: &CMat) -> CVec {
    CVec::from_column_slice(m.as_slice())
}

pub fn unflatten(v: &CVec, rows: usize, cols: usize) -> CMat {
    CMat::from_column_slice(rows, cols, v.as_slice())
}

/// Partial trace over the second factor of a space `a ⊗ b`.
pub fn partial_trace_second(m: &CMat, a: usize, b: usize) -> CMat {
    let mut out = CMat::zeros(a, a);
    for i in 0..a {
        for j in 0..a {
            let mut s = ZERO;
            for k in 0..b {
                s += m[(i * b + k, j * b + k)];
            }
            out[(i, j)] = s;
        }
    }
    out
}

/// Partial trace over the first factor of a space `a ⊗ b`.
pub fn partial_trace_first(m: &CMat, a: usize, b: usize) -> CMat {
    let mut out = CMat::zeros(b, b);
    for k in 0..a {
        out += m.view((k * b, k * b), (b, b));
    }
    out
}

fn digits(mut idx: usize, dims: &[usize], out: &mut [usize]) {
    for k in (0..dims.len()).rev() {
        out[k] = idx % dims[k];
        idx /= dims[k];
    }
}

fn compose(digits: &[usize], dims: &[usize], keep: impl Fn(usize) -> bool) -> usize {
    let mut idx = 0;
    for k in 0..dims.len() {
        if keep(k) {
            idx = idx * dims[k] + digits[k];
        }
    }
    idx
}

/// Partial trace over the factors flagged in `traced` of a matrix on
/// `⊗ₖ ℂ^{dims[k]}` (first factor most significant).
pub fn ptrace(m: &CMat, dims: &[usize], traced: &[bool]) -> CMat {
    let kept: usize = dims
        .iter()
        .zip(traced)
        .filter(|(_, &t)| !t)
        .map(|(d, _)| d)
        .product();
    let n: usize = dims.iter().product();
    let mut out = CMat::zeros(kept, kept);
    let mut dr = vec![0; dims.len()];
    let mut dc = vec![0; dims.len()];
    for row in 0..n {
        digits(row, dims, &mut dr);
        for col in 0..n {
            digits(col, dims, &mut dc);
            if (0..dims.len()).all(|k| !traced[k] || dr[k] == dc[k]) {
                let (a, b) = (
                    compose(&dr, dims, |k| !traced[k]),
                    compose(&dc, dims, |k| !traced[k]),
                );
                out[(a, b)] += m[(row, col)];
            }
        }
    }
    out
}

/// Reorders tensor factors: factor `k` of the result is factor `perm[k]` of `m`.
pub fn permute_factors(m: &CMat, dims: &[usize], perm: &[usize]) -> CMat {
    let n: usize = dims.iter().product();
    let new_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    let mut map = vec![0; n];
    let mut dg = vec![0; dims.len()];
    for (idx, slot) in map.iter_mut().enumerate() {
        digits(idx, dims, &mut dg);
        let permuted: Vec<usize> = perm.iter().map(|&p| dg[p]).collect();
        *slot = compose(&permuted, &new_dims, |_| true);
    }
    let mut out = CMat::zeros(n, n);
    for row in 0..n {
        for col in 0..n {
            out[(map[row], map[col])] = m[(row, col)];
        }
    }
    out
}

/// Principal submatrix on the given indices.
pub fn principal(m: &CMat, idx: &[usize]) -> CMat {
    m.select_rows(idx).select_columns(idx)
}

/// Von Neumann entropy of a positive matrix in nats. Diagonal input (the
/// common case for classical fixtures) skips the eigen-decomposition.
pub fn entropy_of_density(m: &CMat) -> f64 {
    let n = m.nrows();
    let off_diag = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .any(|(i, j)| m[(i, j)].norm() > 1e-14);
    let vals: Vec<f64> = if off_diag {
        hermitian_eigenvalues(m)
    } else {
        (0..n).map(|i| m[(i, i)].re).collect()
    };
    vals.iter()
        .filter(|&&p| p > 1e-300)
        .map(|&p| -p * p.ln())
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigenvalues_of_swap() {
        let mut m = CMat::zeros(2, 2);
        m[(0, 1)] = ONE;
        m[(1, 0)] = ONE;
        let mut ev: Vec<f64> = eigenvalues(&m).unwrap().iter().map(|z| z.re).collect();
        ev.sort_by(f64::total_cmp);
        assert!((ev[0] + 1.0).abs() < 1e-12 && (ev[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gram_schmidt_drops_dependent() {
        let a = CVec::from_vec(vec![ONE, ZERO, ONE]);
        let b = CVec::from_vec(vec![r(2.0), ZERO, r(2.0)]);
        let cc = CVec::from_vec(vec![ZERO, c(0.0, 1.0), ZERO]);
        assert_eq!(rank(&[a, b, cc], 1e-10), 2);
    }

    #[test]
    fn partial_traces() {
        let a = real_diag(&[0.25, 0.75]);
        let b = real_diag(&[0.1, 0.2, 0.7]);
        let ab = kron(&a, &b);
        assert!(frob(&(partial_trace_second(&ab, 2, 3) - &a)) < 1e-14);
        assert!(frob(&(partial_trace_first(&ab, 2, 3) - &b)) < 1e-14);
    }

    #[test]
    fn generic_partial_trace_and_permutation() {
        let a = real_diag(&[0.25, 0.75]);
        let b = real_diag(&[0.1, 0.2, 0.7]);
        let cm = CMat::from_row_slice(2, 2, &[r(0.5), c(0.0, 0.1), c(0.0, -0.1), r(0.5)]);
        let abc = kron(&kron(&a, &b), &cm);
        let dims = [2, 3, 2];
        assert!(frob(&(ptrace(&abc, &dims, &[false, true, false]) - kron(&a, &cm))) < 1e-14);
        let swapped = permute_factors(&abc, &dims, &[2, 0, 1]);
        assert!(frob(&(swapped - kron(&kron(&cm, &a), &b))) < 1e-14);
    }

    #[test]
    fn null_space_of_rank_deficient() {
        let m = real_diag(&[1.0, 0.0, 2.0]);
        let (sv, v) = smallest_right_singular(&m, 1);
        assert!(sv[0] < 1e-14);
        assert!((v[0][1].norm() - 1.0).abs() < 1e-12);
    }
}
