//! Finite gauge groups acting on the site algebra, covariance of `E`,
//! gauge-invariant window algebras and restricted modular spectra.

use std::collections::HashMap;

use serde::Serialize;

use crate::cpmap::CpMap;
use crate::error::{Error, Result};
use crate::fcs::{FcsTriple, WINDOW_BUDGET};
use crate::linalg::{self, kron, max_abs, CMat, CVec, C64};
use crate::markovtype::{
    classify_subgroup, classify_type, dedup_reals, local_faithfulness, GroupKind, MarkovSpec, Mode,
    SpectrumGroup, TypeLabel, TypeOptions, TypeVerdict,
};
use crate::peripheral::is_factor;
use crate::tol::Tolerances;

pub const DEFAULT_MAX_ORDER: usize = 1024;

/// Largest `dⁿ` for which the twirl projector is formed explicitly.
pub const TWIRL_LIMIT: usize = 27;

/// Cap on distinct log differences tracked per state of the restricted
/// spectrum recursion.
const VALUE_CAP: usize = 20_000;

#[derive(Debug, Clone)]
pub struct GaugeGroup {
    d: usize,
    elements: Vec<CMat>,
    generators: Vec<CMat>,
    abelian: bool,
}

impl GaugeGroup {
    pub fn site_dim(&self) -> usize {
        self.d
    }

    /// Elements in discovery order; the first is `I`.
    pub fn elements(&self) -> &[CMat] {
        &self.elements
    }

    pub fn generators(&self) -> &[CMat] {
        &self.generators
    }

    pub fn is_abelian(&self) -> bool {
        self.abelian
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.elements.len() == 1
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        self.generators
            .iter()
            .all(|g| (0..self.d).all(|i| (0..self.d).all(|j| i == j || g[(i, j)].norm() <= tol)))
    }

    /// Charges of the standard basis vectors for a diagonal group: for each
    /// generator of order `o`, the residue `r` with phase `e^{2πir/o}`.
    pub fn charges(&self, tol: f64) -> Result<Charges> {
        if !self.is_diagonal(tol) {
            return Err(Error::Unsupported(
                "charges need a diagonal gauge group".into(),
            ));
        }
        let mut moduli = Vec::with_capacity(self.generators.len());
        let mut table = vec![Vec::with_capacity(self.generators.len()); self.d];
        for g in &self.generators {
            let o = element_order(g, tol, self.order()).ok_or_else(|| {
                Error::InternalConsistency("generator order does not divide the group order".into())
            })?;
            moduli.push(o as u64);
            for (s, row) in table.iter_mut().enumerate() {
                let turns = g[(s, s)].arg() / std::f64::consts::TAU * o as f64;
                let k = turns.round();
                if (turns - k).abs() > 1e-6 {
                    return Err(Error::InternalConsistency(format!(
                        "phase of basis vector {s} is not an o-th root of unity"
                    )));
                }
                row.push((k as i64).rem_euclid(o as i64) as u64);
            }
        }
        Ok(Charges { moduli, table })
    }
}

/// Charge vectors of the standard basis under a diagonal abelian group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Charges {
    pub moduli: Vec<u64>,
    /// `table[s][k]` is the residue of basis vector `s` for generator `k`.
    pub table: Vec<Vec<u64>>,
}

impl Charges {
    fn add(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter()
            .zip(b)
            .zip(&self.moduli)
            .map(|((x, y), m)| (x + y) % m)
            .collect()
    }

    fn sub(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter()
            .zip(b)
            .zip(&self.moduli)
            .map(|((x, y), m)| (x + m - y) % m)
            .collect()
    }

    fn zero(&self) -> Vec<u64> {
        vec![0; self.moduli.len()]
    }

    /// Charge of a word of basis indices.
    pub fn of_word(&self, word: &[usize]) -> Vec<u64> {
        word.iter()
            .fold(self.zero(), |acc, &s| self.add(&acc, &self.table[s]))
    }
}

fn element_order(g: &CMat, tol: f64, bound: usize) -> Option<usize> {
    let id = CMat::identity(g.nrows(), g.ncols());
    let mut p = g.clone();
    for k in 1..=bound {
        if max_abs(&(&p - &id)) <= tol {
            return Some(k);
        }
        p = &p * g;
    }
    None
}

/// The finite group generated by `gens`, deduplicated within `tol`.
pub fn close_group(gens: &[CMat], max_order: usize, tol: f64) -> Result<GaugeGroup> {
    let d = gens
        .first()
        .map(|g| g.nrows())
        .ok_or_else(|| Error::Precondition("at least one generator is required".into()))?;
    for g in gens {
        if g.nrows() != d || g.ncols() != d {
            return Err(Error::ShapeMismatch(
                "generators must be square of equal size".into(),
            ));
        }
        let res = max_abs(&(g.adjoint() * g - CMat::identity(d, d)));
        if res > tol {
            return Err(Error::NotUnitary(res));
        }
    }
    let mut elements = vec![CMat::identity(d, d)];
    let mut frontier = 0;
    while frontier < elements.len() {
        let x = elements[frontier].clone();
        frontier += 1;
        for g in gens {
            let y = g * &x;
            if !elements.iter().any(|e| max_abs(&(e - &y)) <= tol) {
                if elements.len() == max_order {
                    return Err(Error::GroupTooLarge(max_order));
                }
                elements.push(y);
            }
        }
    }
    let abelian = gens
        .iter()
        .all(|a| gens.iter().all(|b| max_abs(&(a * b - b * a)) <= tol));
    Ok(GaugeGroup {
        d,
        elements,
        generators: gens.to_vec(),
        abelian,
    })
}

/// Diagonal group generated by `diag(…, e^{2πi/k}, …)` at each `(position, modulus)`;
/// positions are 0-based.
pub fn diagonal_cyclic(d: usize, phases: &[(usize, u64)], tol: f64) -> Result<GaugeGroup> {
    let mut gens = Vec::with_capacity(phases.len());
    for &(pos, k) in phases {
        if pos >= d || k == 0 {
            return Err(Error::Precondition(format!(
                "invalid phase ({pos}, {k}) for d = {d}"
            )));
        }
        let mut g = CMat::identity(d, d);
        g[(pos, pos)] = C64::from_polar(1.0, std::f64::consts::TAU / k as f64);
        gens.push(g);
    }
    if gens.is_empty() {
        gens.push(CMat::identity(d, d));
    }
    close_group(&gens, DEFAULT_MAX_ORDER, tol)
}

/// Worst violation of `E(g⊗g · X · (g⊗g)*) = g E(X) g*` over matrix units `X`
/// and group elements `g`.
pub fn covariance_residual(e: &CpMap, g: &GaugeGroup) -> Result<f64> {
    let d = e.site_dim();
    if e.memory().rep_dim() != d || g.site_dim() != d {
        return Err(Error::Precondition(
            "covariance needs E : M_d ⊗ 𝔠 → 𝔠 with 𝔠 ⊆ M_d".into(),
        ));
    }
    let mut worst: f64 = 0.0;
    for u in g.elements() {
        let uu = kron(u, u);
        for a in 0..d * d {
            for b in 0..d * d {
                let x = linalg::unit(d * d, a, b);
                let lhs = e.apply_dense(&(&uu * &x * uu.adjoint()));
                let rhs = u * e.apply_dense(&x) * u.adjoint();
                worst = worst.max(max_abs(&(lhs - rhs)));
            }
        }
    }
    Ok(worst)
}

pub fn check_covariance(e: &CpMap, g: &GaugeGroup, tol: f64) -> Result<(bool, f64)> {
    let res = covariance_residual(e, g)?;
    Ok((res <= tol, res))
}

/// Gauge-invariant part of the window algebra on `n` sites.
#[derive(Debug, Clone)]
pub struct InvariantSubalgebra {
    pub n: usize,
    pub dim: usize,
    /// Matrix units `(row word, column word)` as flattened indices, when the
    /// group is diagonal; lexicographic.
    pub units: Option<Vec<(usize, usize)>>,
    /// Orthonormal basis in the vectorized `dⁿ × dⁿ` space, otherwise.
    pub basis: Option<Vec<CVec>>,
}

fn word_of(mut idx: usize, d: usize, n: usize) -> Vec<usize> {
    let mut w = vec![0; n];
    for k in (0..n).rev() {
        w[k] = idx % d;
        idx /= d;
    }
    w
}

/// `Σ_χ |{words of charge χ}|²` on `n` sites.
pub fn character_count(ch: &Charges, n: usize) -> usize {
    let mut counts: HashMap<Vec<u64>, usize> = HashMap::new();
    counts.insert(ch.zero(), 1);
    for _ in 0..n {
        let mut next: HashMap<Vec<u64>, usize> = HashMap::new();
        for (c, k) in &counts {
            for row in &ch.table {
                *next.entry(ch.add(c, row)).or_default() += k;
            }
        }
        counts = next;
    }
    counts.values().map(|k| k * k).sum()
}

/// Twirl projector `(1/|G|) Σ_g Ad g^{⊗n}` on vectorized `dⁿ × dⁿ` matrices.
pub fn twirl_projector(g: &GaugeGroup, n: usize) -> Result<CMat> {
    let d = g.site_dim();
    let side = d
        .checked_pow(n as u32)
        .filter(|&s| s <= TWIRL_LIMIT)
        .ok_or(Error::WindowTooLarge {
            n,
            entries: d.saturating_pow(4 * n as u32),
        })?;
    let mut p = CMat::zeros(side * side, side * side);
    for u in g.elements() {
        let mut un = CMat::identity(1, 1);
        for _ in 0..n {
            un = kron(&un, u);
        }
        // column-major vec(U X U*) = (conj(U) ⊗ U) vec(X)
        p += kron(&un.map(|z| z.conj()), &un);
    }
    Ok(p / C64::new(g.order() as f64, 0.0))
}

pub fn invariant_subalgebra(g: &GaugeGroup, n: usize, tol: f64) -> Result<InvariantSubalgebra> {
    if n == 0 {
        return Err(Error::Precondition("window length must be positive".into()));
    }
    let d = g.site_dim();
    if g.is_diagonal(tol) {
        let side = d.checked_pow(n as u32).unwrap_or(usize::MAX);
        if side.saturating_mul(side) > WINDOW_BUDGET {
            return Err(Error::WindowTooLarge {
                n,
                entries: side.saturating_mul(side),
            });
        }
        let ch = g.charges(tol)?;
        let charge: Vec<Vec<u64>> = (0..side).map(|i| ch.of_word(&word_of(i, d, n))).collect();
        let mut units = Vec::new();
        for i in 0..side {
            for j in 0..side {
                if charge[i] == charge[j] {
                    units.push((i, j));
                }
            }
        }
        return Ok(InvariantSubalgebra {
            n,
            dim: units.len(),
            units: Some(units),
            basis: None,
        });
    }
    let p = twirl_projector(g, n)?;
    let h = (&p + p.adjoint()) * C64::new(0.5, 0.0);
    let (vals, vecs) = linalg::hermitian_eig(&h);
    let basis: Vec<CVec> = vals
        .iter()
        .enumerate()
        .filter(|(_, &v)| v > 0.5)
        .map(|(k, _)| vecs.column(k).into_owned())
        .collect();
    Ok(InvariantSubalgebra {
        n,
        dim: basis.len(),
        units: None,
        basis: Some(basis),
    })
}

/// Restricted spectrum together with the stabilization diagnostic.
#[derive(Debug, Clone, Serialize)]
pub struct RestrictedSpectrum {
    pub group: SpectrumGroup,
    /// Windows examined.
    pub windows: usize,
    /// Classification unchanged over the last `|G|` windows.
    pub converged: bool,
}

/// Log eigenvalues of `T_ij` with the charge of their eigenvectors.
type ChargedLogs = Vec<Vec<Vec<(f64, Vec<u64>)>>>;

fn charged_logs(spec: &MarkovSpec, ch: &Charges, tol: &Tolerances) -> Result<ChargedLogs> {
    let rd = &spec.range;
    let d = spec.d;
    // standard basis index of each adapted basis vector
    let perm: Vec<usize> = (0..d)
        .map(|j| {
            let col = rd.v.column(j);
            (0..d)
                .max_by(|&a, &b| col[a].norm().total_cmp(&col[b].norm()))
                .expect("d ≥ 1")
        })
        .collect();
    let p = rd.num_blocks();
    let mut out = vec![vec![Vec::new(); p]; p];
    for i in 0..p {
        for j in 0..p {
            let t = &spec.t_blocks[i][j];
            let dj = rd.dims[j];
            let local: Vec<&Vec<u64>> = (0..dj)
                .map(|k| &ch.table[perm[rd.offsets[j] + k]])
                .collect();
            let mut sectors: Vec<(Vec<u64>, Vec<usize>)> = Vec::new();
            for (k, c) in local.iter().enumerate() {
                match sectors.iter_mut().find(|(s, _)| s == *c) {
                    Some((_, idx)) => idx.push(k),
                    None => sectors.push(((*c).clone(), vec![k])),
                }
            }
            for a in 0..dj {
                for b in 0..dj {
                    if local[a] != local[b] && t[(a, b)].norm() > tol.alg {
                        return Err(Error::NotCovariant(t[(a, b)].norm()));
                    }
                }
            }
            for (c, idx) in sectors {
                let sub = linalg::principal(t, &idx);
                for v in linalg::hermitian_eigenvalues(&sub) {
                    if v > tol.psd {
                        out[i][j].push((v.ln(), c.clone()));
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Modular spectrum on the gauge-invariant subalgebra: log differences of
/// pairs of paths with common ends and equal total charge, over windows up to
/// `2|G|`, classified in floating mode.
///
/// Scope: diagonal gauge groups and ranges with trivial multiplicities in the
/// standard basis. A `T_ij` mixing charge sectors is reported as a covariance
/// failure.
pub fn restricted_spectrum_group(
    spec: &MarkovSpec,
    g: &GaugeGroup,
    tol: &Tolerances,
) -> Result<RestrictedSpectrum> {
    if g.is_trivial() {
        return Ok(RestrictedSpectrum {
            group: spec.spectrum_group(tol),
            windows: 0,
            converged: true,
        });
    }
    if !g.is_diagonal(tol.alg) {
        return Err(Error::Unsupported(
            "restricted spectra are computed for diagonal gauge groups".into(),
        ));
    }
    if spec.range.mults.iter().any(|&m| m != 1) || !spec.range.is_standard_basis(1e-9) {
        return Err(Error::Unsupported(
            "restricted spectra need a range with trivial multiplicities in the standard basis"
                .into(),
        ));
    }
    let ch = g.charges(tol.alg)?;
    let logs = charged_logs(spec, &ch, tol)?;
    let p = spec.num_blocks();
    let order = g.order();
    let n_max = 2 * order;
    type Key = (usize, usize, Vec<u64>);
    let mut pool: Vec<f64> = Vec::new();
    let mut history: Vec<(GroupKind, Option<f64>)> = Vec::new();
    let mut windows = 0;
    let mut last = classify_subgroup(&[], Mode::Floating, tol.commensurate, tol.q_max);
    let mut states: Vec<HashMap<Key, Vec<f64>>> = (0..p)
        .map(|x| {
            let mut m = HashMap::new();
            m.insert((x, x, ch.zero()), vec![0.0]);
            m
        })
        .collect();
    let mut capped = false;
    for n in 1..=n_max {
        for start in states.iter_mut() {
            let mut next: HashMap<Key, Vec<f64>> = HashMap::new();
            for ((bi, bj, c), vals) in start.iter() {
                for (ti, li) in logs[*bi].iter().enumerate() {
                    for (tj, lj) in logs[*bj].iter().enumerate() {
                        for (a, ca) in li {
                            for (b, cb) in lj {
                                let key = (ti, tj, ch.add(c, &ch.sub(ca, cb)));
                                let entry = next.entry(key).or_default();
                                entry.extend(vals.iter().map(|v| v + a - b));
                            }
                        }
                    }
                }
            }
            for vals in next.values_mut() {
                *vals = dedup_reals(std::mem::take(vals));
                if vals.len() > VALUE_CAP {
                    capped = true;
                }
            }
            *start = next;
        }
        if capped {
            break;
        }
        windows = n;
        let zero = ch.zero();
        for start in &states {
            for y in 0..p {
                if let Some(vals) = start.get(&(y, y, zero.clone())) {
                    pool.extend(vals.iter().copied());
                }
            }
        }
        pool = dedup_reals(std::mem::take(&mut pool))
            .into_iter()
            .filter(|v| v.abs() > 1e-12)
            .collect();
        last = classify_subgroup(&pool, Mode::Floating, tol.commensurate, tol.q_max);
        history.push((last.kind, last.lambda));
    }
    let converged = history.len() > order && {
        let tail = &history[history.len() - order - 1..];
        tail.iter().all(|(k, l)| {
            *k == tail[0].0
                && match (l, tail[0].1) {
                    (Some(a), Some(b)) => (a - b).abs() <= 1e-9,
                    (None, None) => true,
                    _ => false,
                }
        })
    };
    if !converged {
        let note = if capped {
            format!("value cap reached after {windows} windows")
        } else {
            format!("classification still changing after {windows} windows")
        };
        last.reason = Some(note);
    }
    Ok(RestrictedSpectrum {
        group: last,
        windows,
        converged,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Preconditions {
    pub covariant: bool,
    pub covariance_residual: f64,
    pub ambient_factor: bool,
    pub faithful: bool,
    pub strongly_clustering: bool,
}

impl Preconditions {
    pub fn all(&self) -> bool {
        self.covariant && self.ambient_factor && self.faithful && self.strongly_clustering
    }

    pub fn first_failure(&self) -> Option<&'static str> {
        if !self.covariant {
            Some("covariance")
        } else if !self.ambient_factor {
            Some("ambient factor")
        } else if !self.faithful {
            Some("faithfulness")
        } else if !self.strongly_clustering {
            Some("strong clustering")
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SubfactorReport {
    pub ambient: TypeVerdict,
    pub preconditions: Preconditions,
    /// `(n, dim)` of the invariant window algebras.
    pub invariant_dims: Vec<(usize, usize)>,
    pub restricted: RestrictedSpectrum,
    pub restricted_label: TypeLabel,
    pub restricted_lambda: Option<f64>,
    pub index: Option<usize>,
    pub note: Option<String>,
}

/// Ambient type, restricted spectrum and index of the gauge-invariant
/// subfactor.
pub fn subfactor_report(
    phi: &FcsTriple,
    spec: &MarkovSpec,
    g: &GaugeGroup,
) -> Result<SubfactorReport> {
    let tol = *phi.tolerances();
    let (covariant, covariance_residual) = check_covariance(phi.map(), g, tol.alg)?;
    if !covariant {
        return Err(Error::NotCovariant(covariance_residual));
    }
    let factor = is_factor(&phi.reduced()?)?;
    let (faithful, _) = local_faithfulness(phi, 3)?;
    let pre = Preconditions {
        covariant,
        covariance_residual,
        ambient_factor: factor.is_factor,
        faithful,
        strongly_clustering: factor.is_factor && factor.period == 1,
    };
    if let Some(what) = pre.first_failure() {
        return Err(Error::Precondition(format!("{what} check failed")));
    }
    let ambient = classify_type(phi, Some(spec), TypeOptions::default())?;
    let mut invariant_dims = Vec::new();
    for n in 1..=4 {
        match invariant_subalgebra(g, n, tol.alg) {
            Ok(s) => invariant_dims.push((n, s.dim)),
            Err(Error::WindowTooLarge { .. }) => break,
            Err(e) => return Err(e),
        }
    }
    let restricted = restricted_spectrum_group(spec, g, &tol)?;
    let (restricted_label, restricted_lambda) = match restricted.group.kind {
        GroupKind::Trivial => (TypeLabel::II1, None),
        GroupKind::Discrete => (TypeLabel::IIILambda, restricted.group.lambda),
        GroupKind::FullLine => (TypeLabel::III1, None),
        GroupKind::Undetermined => (TypeLabel::Undetermined, None),
    };
    let in_scope = g.is_trivial() || (g.is_abelian() && g.is_diagonal(tol.alg));
    let (index, note) = if in_scope {
        (Some(g.order()), None)
    } else {
        (
            None,
            Some("index reported only for diagonal abelian gauge groups".into()),
        )
    };
    Ok(SubfactorReport {
        ambient,
        preconditions: pre,
        invariant_dims,
        restricted,
        restricted_label,
        restricted_lambda,
        index,
        note,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{diagonal_markov, example_product_three_level, solve_diagonal_markov};
    use crate::linalg::real_diag;

    const TOL: f64 = 1e-10;

    #[test]
    fn closes_small_groups() {
        let g = close_group(&[real_diag(&[1.0, -1.0])], 64, TOL).unwrap();
        assert_eq!(g.order(), 2);
        let g = diagonal_cyclic(3, &[(1, 3), (2, 2)], TOL).unwrap();
        assert_eq!(g.order(), 6);
        assert!(g.is_abelian());
        let mut rot = CMat::identity(2, 2);
        rot[(1, 1)] = C64::from_polar(1.0, 1.0);
        assert_eq!(
            close_group(&[rot], 64, TOL).unwrap_err(),
            Error::GroupTooLarge(64)
        );
    }

    #[test]
    fn parity_invariants() {
        let g = close_group(&[real_diag(&[1.0, -1.0])], 64, TOL).unwrap();
        let s = invariant_subalgebra(&g, 2, TOL).unwrap();
        assert_eq!(s.dim, 8);
        assert_eq!(character_count(&g.charges(TOL).unwrap(), 2), 8);
        let p = twirl_projector(&g, 2).unwrap();
        assert!(max_abs(&(&p * &p - &p)) < 1e-12);
        let rank = linalg::hermitian_eigenvalues(&p)
            .iter()
            .filter(|&&v| v > 0.5)
            .count();
        assert_eq!(rank, 8);
    }

    #[test]
    fn covariant_examples() {
        let phi = diagonal_markov(0.4, 0.2).unwrap();
        let g = diagonal_cyclic(2, &[(1, 5)], TOL).unwrap();
        assert!(check_covariance(phi.map(), &g, TOL).unwrap().0);
        let psi = example_product_three_level(0.5).unwrap();
        let g = diagonal_cyclic(3, &[(1, 3), (2, 2)], TOL).unwrap();
        assert!(check_covariance(psi.map(), &g, TOL).unwrap().0);
    }

    #[test]
    fn three_level_subfactor() {
        let phi = example_product_three_level(0.5).unwrap();
        let spec = MarkovSpec::from_triple(&phi).unwrap();
        let g = diagonal_cyclic(3, &[(1, 3), (2, 2)], TOL).unwrap();
        let rep = subfactor_report(&phi, &spec, &g).unwrap();
        assert_eq!(rep.ambient.label, TypeLabel::IIILambda);
        assert!((rep.ambient.lambda.unwrap() - 0.5).abs() < 1e-9);
        assert_eq!(rep.restricted_label, TypeLabel::IIILambda);
        assert!((rep.restricted_lambda.unwrap() - 0.25).abs() < 1e-9);
        assert!(rep.restricted.converged);
        assert_eq!(rep.index, Some(6));
    }

    #[test]
    fn diagonal_markov_subfactor() {
        let (l1, l2) = solve_diagonal_markov(0.5, 3.0).unwrap();
        let phi = diagonal_markov(l1, l2).unwrap();
        let spec = MarkovSpec::from_triple(&phi).unwrap();
        let g = diagonal_cyclic(2, &[(1, 6)], TOL).unwrap();
        let rep = subfactor_report(&phi, &spec, &g).unwrap();
        assert!((rep.ambient.lambda.unwrap() - 0.5).abs() < 1e-8);
        assert!((rep.restricted_lambda.unwrap() - 0.125).abs() < 1e-8);
        assert_eq!(rep.index, Some(6));
    }

    #[test]
    fn trivial_group_keeps_ambient() {
        let phi = example_product_three_level(0.5).unwrap();
        let spec = MarkovSpec::from_triple(&phi).unwrap();
        let g = close_group(&[CMat::identity(3, 3)], 8, TOL).unwrap();
        let rep = subfactor_report(&phi, &spec, &g).unwrap();
        assert_eq!(rep.index, Some(1));
        assert_eq!(rep.restricted_lambda, rep.ambient.lambda);
    }
}
