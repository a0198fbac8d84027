//! Peripheral spectrum of the transfer operator, ergodic components and the
//! factor decision.

use std::f64::consts::PI;

use crate::algebra::{minimal_projections, AlgElement, StateOnAlgebra};
use crate::error::{Error, Result};
use crate::fcs::{window_densities_with, FcsTriple, WINDOW_BUDGET};
use crate::linalg::{self, max_abs, r, CMat, CVec, C64};
use crate::rational::{best_rational, lcm};
use crate::tol::Tolerances;

#[derive(Debug, Clone)]
pub struct PeripheralEigenvalue {
    pub value: C64,
    pub multiplicity: usize,
    /// Order of `value` as a root of unity.
    pub order: u64,
    /// Orthonormal coordinate basis of the eigenspace.
    pub eigenvectors: Vec<CVec>,
}

#[derive(Debug, Clone)]
pub struct SpectralReport {
    /// All eigenvalues of `E_I`, by modulus descending then argument ascending.
    pub eigenvalues: Vec<C64>,
    pub peripheral: Vec<PeripheralEigenvalue>,
    /// Orthonormal coordinate basis of `L(E)`.
    pub l_basis: Vec<CVec>,
    /// Orthonormal coordinate basis of `L₁(E)`.
    pub l1_basis: Vec<CVec>,
    pub period: u64,
    pub l_closed_residual: f64,
    pub l_central_residual: f64,
    /// `E_I` maps each minimal projection of `L(E)` onto another one.
    pub permutes_projections: bool,
}

impl SpectralReport {
    pub fn is_trivial(&self) -> bool {
        self.peripheral.len() == 1 && self.peripheral[0].multiplicity == 1
    }

    /// Largest modulus among non-peripheral eigenvalues.
    pub fn subleading_modulus(&self) -> f64 {
        let n_per: usize = self.peripheral.iter().map(|p| p.multiplicity).sum();
        self.eigenvalues.get(n_per).map_or(0.0, |z| z.norm())
    }
}

/// Eigenvalue sort key: modulus descending, then argument ascending.
fn sort_spectrum(v: &mut [C64]) {
    v.sort_by(|a, b| {
        b.norm()
            .total_cmp(&a.norm())
            .then(a.arg().total_cmp(&b.arg()))
    });
}

/// Spectral data of `E_I` without the minimality requirement.
pub fn spectral_data(phi: &FcsTriple) -> Result<SpectralReport> {
    let tol = phi.tolerances();
    let t = phi.transfer();
    let ld = t.nrows();
    let mut eigenvalues = linalg::eigenvalues(t)?;
    sort_spectrum(&mut eigenvalues);

    let mut clusters: Vec<(C64, usize)> = Vec::new();
    for &z in eigenvalues.iter().filter(|z| z.norm() > 1.0 - tol.per) {
        match clusters
            .iter_mut()
            .find(|(c, _)| (c - z).norm() <= tol.per.max(1e-7))
        {
            Some((c, k)) => {
                *c = (*c * r(*k as f64) + z) / r(*k as f64 + 1.0);
                *k += 1;
            }
            None => clusters.push((z, 1)),
        }
    }

    let mut peripheral = Vec::new();
    let mut l_vecs = Vec::new();
    let mut l1_basis = Vec::new();
    let mut period = 1u64;
    for (value, k) in clusters {
        let value = value / r(value.norm());
        let shifted = t - CMat::identity(ld, ld) * value;
        let (sv, vecs) = linalg::smallest_right_singular(&shifted, k);
        let worst = sv.iter().copied().fold(0.0, f64::max);
        if worst > 1e-6 {
            return Err(Error::Diagnostic(format!(
                "peripheral eigenvalue {value} has a deficient eigenspace (singular value {worst:.3e})"
            )));
        }
        let theta = value.arg() / (2.0 * PI);
        let (_, q) = best_rational(theta, ld as u64)
            .filter(|&(p, q)| (theta - p as f64 / q as f64).abs() <= tol.per)
            .ok_or_else(|| Error::PeriodNotFound(format!("{value}")))?;
        period = lcm(period, q);
        let eigenvectors = linalg::orthonormalize(&vecs, 1e-8);
        if q == 1 {
            l1_basis.extend(eigenvectors.iter().cloned());
        }
        l_vecs.extend(eigenvectors.iter().cloned());
        peripheral.push(PeripheralEigenvalue {
            value,
            multiplicity: k,
            order: q,
            eigenvectors,
        });
    }
    let l_basis = linalg::orthonormalize(&l_vecs, 1e-8);
    let l1_basis = linalg::orthonormalize(&l1_basis, 1e-8);

    let mem = phi.memory();
    let id = mem.identity().coords();
    if linalg::distance_to_span(&l1_basis, &id) > 1e-7 * id.norm() {
        return Err(Error::Diagnostic(
            "identity is not a fixed point of the transfer operator".into(),
        ));
    }

    let elems: Vec<AlgElement> = l_basis.iter().map(|v| mem.from_coords(v)).collect();
    let mut l_closed_residual = 0.0f64;
    for a in &elems {
        for b in &elems {
            l_closed_residual =
                l_closed_residual.max(linalg::distance_to_span(&l_basis, &(a * b).coords()));
        }
    }
    let l_central_residual = elems
        .iter()
        .map(|e| max_abs(&(e.to_dense() - central_part(e).to_dense())))
        .fold(0.0, f64::max);

    let mut report = SpectralReport {
        eigenvalues,
        peripheral,
        l_basis,
        l1_basis,
        period,
        l_closed_residual,
        l_central_residual,
        permutes_projections: true,
    };
    let pi = projections_of(phi, &report.l_basis, tol)?;
    report.permutes_projections = pi.iter().all(|q| {
        let img = phi.map().transfer_apply(q);
        pi.iter().any(|p| (&img - p).max_abs() <= 1e-7)
    });
    Ok(report)
}

/// `SpectralReport` for a minimal triple, refusing inputs that violate the
/// standing assumptions (non-minimal, or `L(E)` not a central subalgebra).
pub fn peripheral_spectrum(phi: &FcsTriple) -> Result<SpectralReport> {
    phi.require_minimal()?;
    let report = spectral_data(phi)?;
    if report.l_closed_residual > 1e-7 {
        return Err(Error::Diagnostic(format!(
            "L(E) is not closed under products (residual {:.3e})",
            report.l_closed_residual
        )));
    }
    if report.l_central_residual > 1e-7 {
        return Err(Error::Diagnostic(format!(
            "L(E) is not central (residual {:.3e})",
            report.l_central_residual
        )));
    }
    if !report.permutes_projections {
        return Err(Error::Diagnostic(
            "the transfer operator does not permute the minimal projections of L(E)".into(),
        ));
    }
    Ok(report)
}

/// Projection of an element onto the center: block `i` replaced by its
/// normalized trace times the identity.
fn central_part(e: &AlgElement) -> AlgElement {
    let blocks = e
        .blocks()
        .iter()
        .map(|m| CMat::identity(m.nrows(), m.nrows()) * (m.trace() / r(m.nrows() as f64)))
        .collect();
    AlgElement::from_blocks(e.algebra(), blocks).expect("same shapes")
}

/// Minimal projections of the central algebra spanned by `basis`, snapped to
/// exact sums of block identities.
fn projections_of(phi: &FcsTriple, basis: &[CVec], tol: &Tolerances) -> Result<Vec<AlgElement>> {
    let mem = phi.memory();
    let mut family = Vec::new();
    for v in basis {
        let c = central_part(&mem.from_coords(v));
        let adj = c.adjoint();
        family.push((&c + &adj).scale(r(0.5)));
        family.push((&c - &adj).scale(C64::new(0.0, -0.5)));
    }
    let projections = minimal_projections(mem, &family, tol.alg.max(1e-8), tol.cluster.max(1e-7))?;
    Ok(projections
        .iter()
        .map(|p| {
            let mut q = mem.zero();
            for b in 0..mem.num_blocks() {
                let w = p.block(b).trace().re / p.block(b).nrows() as f64;
                if w > 0.5 {
                    q = &q + &mem.block_unit(b);
                }
            }
            q
        })
        .collect())
}

/// Blocks carrying a central projection.
pub fn support_blocks(q: &AlgElement) -> Vec<usize> {
    (0..q.blocks().len())
        .filter(|&b| q.block(b)[(0, 0)].re > 0.5)
        .collect()
}

/// Which eigenspace the decomposition is taken over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    /// `L(E)`, giving factor components on the chain regrouped by the period.
    Peripheral,
    /// `L₁(E)`, giving the translation-invariant decomposition `Σ ρ(P) φ_P`.
    FixedPoints,
}

#[derive(Debug, Clone)]
pub struct Component {
    pub projection: AlgElement,
    pub blocks: Vec<usize>,
    pub weight: f64,
    /// Sites per step of the component's chain.
    pub regrouping: usize,
    pub state: FcsTriple,
}

/// The minimal projections `Π` of `L(E)` (or of `L₁(E)`).
pub fn minimal_projections_of(
    phi: &FcsTriple,
    report: &SpectralReport,
    level: Level,
) -> Result<Vec<AlgElement>> {
    let basis = match level {
        Level::Peripheral => &report.l_basis,
        Level::FixedPoints => &report.l1_basis,
    };
    projections_of(phi, basis, phi.tolerances())
}

/// Decomposition `φ = Σ ρ(Q) φ_Q`. With [`Level::Peripheral`] each
/// component lives on the chain regrouped by the period and has trivial
/// peripheral spectrum (verified); the weighted sum is checked against `φ`
/// on windows of up to three steps.
pub fn ergodic_components(phi: &FcsTriple, level: Level) -> Result<Vec<Component>> {
    let report = peripheral_spectrum(phi)?;
    components_from(phi, &report, level)
}

pub(crate) fn components_from(
    phi: &FcsTriple,
    report: &SpectralReport,
    level: Level,
) -> Result<Vec<Component>> {
    let tol = *phi.tolerances();
    let m = match level {
        Level::Peripheral => report.period as usize,
        Level::FixedPoints => 1,
    };
    let pi = minimal_projections_of(phi, report, level)?;
    let base = phi.map().regroup(m);
    let mut out = Vec::new();
    for q in pi {
        let weight = phi.rho().evaluate(&q).re;
        if weight <= tol.wt {
            log::warn!("dropping component with weight {weight:.3e}");
            continue;
        }
        let blocks = support_blocks(&q);
        let e_q = base.restrict_blocks(&blocks)?;
        let rho_q = phi.rho().restrict(&blocks, tol.psd.max(1e-9))?;
        let state = FcsTriple::new(e_q, rho_q, tol)?;
        if level == Level::Peripheral {
            let ev = linalg::eigenvalues(state.transfer())?;
            let n_per = ev.iter().filter(|z| z.norm() > 1.0 - tol.per).count();
            if n_per != 1 {
                return Err(Error::InternalConsistency(format!(
                    "component on blocks {blocks:?} has {n_per} peripheral eigenvalues"
                )));
            }
        }
        out.push(Component {
            projection: q,
            blocks,
            weight,
            regrouping: m,
            state,
        });
    }
    verify_decomposition(phi, &out, m)?;
    Ok(out)
}

fn verify_decomposition(phi: &FcsTriple, comps: &[Component], m: usize) -> Result<()> {
    let d = phi.site_dim();
    let n = phi.memory().rep_dim();
    let mut steps = 0;
    for k in 1..=3usize {
        let side = d.checked_pow((k * m) as u32).map(|s| s * n);
        if side.is_none_or(|s| s * s > WINDOW_BUDGET) {
            break;
        }
        steps = k;
    }
    if steps == 0 {
        log::warn!("decomposition check skipped: window of one period exceeds the budget");
        return Ok(());
    }
    let direct = phi.window_densities(steps * m)?;
    let mut mixed: Vec<CMat> = (1..=steps)
        .map(|k| CMat::zeros(d.pow((k * m) as u32), d.pow((k * m) as u32)))
        .collect();
    for c in comps {
        let st = &c.state;
        let dens = window_densities_with(
            st.map(),
            &st.rho().densities().to_dense(),
            &st.memory().identity(),
            steps,
        )?;
        for (acc, dk) in mixed.iter_mut().zip(dens) {
            *acc += dk * r(c.weight);
        }
    }
    let mut worst = 0.0f64;
    for (k, acc) in mixed.iter().enumerate() {
        worst = worst.max(max_abs(&(acc - &direct[(k + 1) * m - 1])));
    }
    if worst > phi.tolerances().alg.max(1e-10) * 10.0 {
        return Err(Error::InternalConsistency(format!(
            "weighted components differ from the state by {worst:.3e}"
        )));
    }
    Ok(())
}

/// Decides whether two finitely correlated states agree on every window of
/// length at most `l_star`, treating the pair as a weighted automaton over
/// the matrix-unit alphabet. Default `l_star` is `(dim 𝔠₁ + dim 𝔠₂)²`.
pub fn states_equal(a: &FcsTriple, b: &FcsTriple, l_star: Option<usize>) -> Result<bool> {
    Ok(first_difference(a, b, l_star)?.is_none())
}

/// Length of the shortest window on which the states differ, if any.
pub fn first_difference(
    a: &FcsTriple,
    b: &FcsTriple,
    l_star: Option<usize>,
) -> Result<Option<usize>> {
    if a.site_dim() != b.site_dim() {
        return Err(Error::ShapeMismatch(format!(
            "site dimensions {} and {} differ",
            a.site_dim(),
            b.site_dim()
        )));
    }
    let eq = a.tolerances().eq.max(b.tolerances().eq);
    let (ma, mb) = (a.memory(), b.memory());
    let (la, lb) = (ma.linear_dim(), mb.linear_dim());
    let l_star = l_star.unwrap_or((la + lb) * (la + lb));
    let d = a.site_dim();
    let letters: Vec<CMat> = (0..d)
        .flat_map(|k| (0..d).map(move |l| linalg::unit(d, k, l)))
        .collect();

    let mut functional = Vec::with_capacity(la + lb);
    functional.extend(a.rho().functional_coords().iter().copied());
    functional.extend(b.rho().functional_coords().iter().map(|z| -z));
    let functional = CVec::from_vec(functional);

    let join = |x: &AlgElement, y: &AlgElement| {
        let mut v = Vec::with_capacity(la + lb);
        v.extend(x.coords().iter().copied());
        v.extend(y.coords().iter().copied());
        CVec::from_vec(v)
    };
    let split = |v: &CVec| {
        let x = ma.from_coords(&CVec::from_column_slice(&v.as_slice()[..la]));
        let y = mb.from_coords(&CVec::from_column_slice(&v.as_slice()[la..]));
        (x, y)
    };

    let mut basis = Vec::new();
    let start = join(&ma.identity(), &mb.identity());
    linalg::extend_basis(&mut basis, &start, 1e-10);
    let mut frontier = basis.clone();
    for depth in 1..=l_star {
        let mut next = Vec::new();
        for v in &frontier {
            let (x, y) = split(v);
            for e in &letters {
                let img = join(&a.map().apply(e, &x)?, &b.map().apply(e, &y)?);
                let value = functional.transpose() * &img;
                if value[(0, 0)].norm() > eq * img.norm().max(1.0) {
                    return Ok(Some(depth));
                }
                if linalg::extend_basis(&mut basis, &img, 1e-10) {
                    next.push(basis.last().expect("just pushed").clone());
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    Ok(None)
}

#[derive(Debug, Clone)]
pub struct FactorVerdict {
    pub is_factor: bool,
    pub period: u64,
    /// Minimal projections of `L(E)`.
    pub pi: Vec<AlgElement>,
    pub components: Vec<Component>,
    /// Equality classes of component states, as indices into `components`.
    pub bar_pi: Vec<Vec<usize>>,
    pub center_dim: usize,
    /// Condition (iii): `dim(L(E) ∩ 𝔠₀) = 1`.
    pub condition_iii: bool,
    pub intersection_dim: usize,
    /// Condition (iv): a single class of equal component states.
    pub condition_iv: bool,
    /// Largest distance of a class projection from `𝔠₀`.
    pub class_residual: f64,
    /// `|φ(A γⁿ(B)) − φ(A)φ(B)|` on the regrouped chain for `n = 1..=20`.
    pub clustering_probe: Vec<f64>,
    /// Whether zero-weight projections were removed before the test.
    pub support_reduced: bool,
    pub tolerances: Tolerances,
}

/// Restriction of the triple to the projection `S = Σ {Q ∈ Π : ρ(Q) > ε_wt}`.
fn reduce_to_support(phi: &FcsTriple, pi: &[AlgElement]) -> Result<Option<FcsTriple>> {
    let tol = *phi.tolerances();
    let mut blocks = Vec::new();
    for q in pi {
        if phi.rho().evaluate(q).re > tol.wt {
            blocks.extend(support_blocks(q));
        }
    }
    blocks.sort_unstable();
    if blocks.len() == phi.memory().num_blocks() {
        return Ok(None);
    }
    let e = phi.map().restrict_blocks(&blocks)?;
    let rho: StateOnAlgebra = phi.rho().restrict(&blocks, tol.psd.max(1e-9))?;
    Ok(Some(FcsTriple::new(e, rho, tol)?))
}

/// Factor decision by conditions (iii) and (iv), which must agree.
pub fn is_factor(phi: &FcsTriple) -> Result<FactorVerdict> {
    let full_report = peripheral_spectrum(phi)?;
    let pi = minimal_projections_of(phi, &full_report, Level::Peripheral)?;
    let reduced = reduce_to_support(phi, &pi)?;
    let support_reduced = reduced.is_some();
    let (work, report) = match reduced {
        Some(t) => {
            let rep = spectral_data(&t)?;
            (t, rep)
        }
        None => (phi.clone(), full_report.clone()),
    };
    let tol = *work.tolerances();

    let c0 = &work.c0().basis;
    let mut joint = report.l_basis.clone();
    joint.extend(c0.iter().cloned());
    let span = linalg::rank(&joint, 1e-8);
    let intersection_dim = report.l_basis.len() + c0.len() - span;
    let condition_iii = intersection_dim == 1;

    let components = components_from(&work, &report, Level::Peripheral)?;
    let k = components.len();
    let mut equal = vec![vec![false; k]; k];
    for i in 0..k {
        equal[i][i] = true;
        for j in i + 1..k {
            let e = states_equal(&components[i].state, &components[j].state, None)?;
            equal[i][j] = e;
            equal[j][i] = e;
        }
    }
    let bar_pi = equality_classes(&equal)?;
    let condition_iv = bar_pi.len() == 1;
    if condition_iii != condition_iv {
        return Err(Error::InternalConsistency(format!(
            "condition (iii) gives {condition_iii} (intersection dimension {intersection_dim}) \
             but condition (iv) gives {condition_iv} ({} classes)",
            bar_pi.len()
        )));
    }
    let center_dim = bar_pi.len();
    if center_dim > phi.memory().num_blocks() {
        return Err(Error::InternalConsistency(format!(
            "center dimension {center_dim} exceeds the number of memory blocks"
        )));
    }

    let mem = work.memory();
    let mut class_residual = 0.0f64;
    for class in &bar_pi {
        let mut bar_q = mem.zero();
        for &i in class {
            for &b in &components[i].blocks {
                bar_q = &bar_q + &mem.block_unit(b);
            }
        }
        class_residual = class_residual.max(linalg::distance_to_span(c0, &bar_q.coords()));
    }
    if class_residual > 1e-7 {
        log::warn!("class projection lies outside C0 (distance {class_residual:.3e})");
    }

    let clustering_probe = clustering_probe(&work, report.period as usize).unwrap_or_default();

    Ok(FactorVerdict {
        is_factor: condition_iii,
        period: full_report.period,
        pi,
        components,
        bar_pi,
        center_dim,
        condition_iii,
        intersection_dim,
        condition_iv,
        class_residual,
        clustering_probe,
        support_reduced,
        tolerances: tol,
    })
}

/// Connected components of the equality graph; each must be a clique.
fn equality_classes(equal: &[Vec<bool>]) -> Result<Vec<Vec<usize>>> {
    let k = equal.len();
    let mut seen = vec![false; k];
    let mut classes = Vec::new();
    for s in 0..k {
        if seen[s] {
            continue;
        }
        let mut class = vec![s];
        seen[s] = true;
        let mut i = 0;
        while i < class.len() {
            let u = class[i];
            for v in 0..k {
                if equal[u][v] && !seen[v] {
                    seen[v] = true;
                    class.push(v);
                }
            }
            i += 1;
        }
        class.sort_unstable();
        for &u in &class {
            for &v in &class {
                if !equal[u][v] {
                    return Err(Error::InternalConsistency(format!(
                        "component states {u} and {v} are linked but not equal"
                    )));
                }
            }
        }
        classes.push(class);
    }
    Ok(classes)
}

/// Correlation deviations for a diagonal one-site observable on the chain
/// regrouped by `m`.
fn clustering_probe(phi: &FcsTriple, m: usize) -> Result<Vec<f64>> {
    let g = phi.regroup(m.max(1))?;
    let dg = g.site_dim();
    let a = linalg::real_diag(&(0..dg).map(|i| 1.0 / (1.0 + i as f64)).collect::<Vec<_>>());
    let mean = g.evaluate(&a)?;
    (1..=20)
        .map(|n| Ok((g.correlation(&a, &a, n)? - mean * mean).norm()))
        .collect()
}

/// `|bar-Π|`, the dimension of the center of the generated von Neumann algebra.
pub fn center_dimension(phi: &FcsTriple) -> Result<usize> {
    Ok(is_factor(phi)?.center_dim)
}

/// Largest modulus among the non-peripheral eigenvalues of `E_I` (0 if none).
pub fn clustering_rate(phi: &FcsTriple) -> Result<f64> {
    if !is_factor(phi)?.is_factor {
        return Err(Error::NotFactor);
    }
    Ok(spectral_data(phi)?.subleading_modulus())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::FdAlgebra;
    use crate::cpmap::{product_state_kraus, CpMap};
    use crate::linalg::real_diag;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn chain(p: [[f64; 2]; 2], pi: [f64; 2]) -> FcsTriple {
        let mem = FdAlgebra::new(&[1, 1]).unwrap();
        let mut kraus = Vec::new();
        for k in 0..2 {
            for j in 0..2 {
                if p[k][j] > 0.0 {
                    let mut m = CMat::zeros(2, 4);
                    m[(k, k * 2 + j)] = r(p[k][j].sqrt());
                    kraus.push(m);
                }
            }
        }
        let e = CpMap::from_kraus(kraus, 2, &mem, &tol()).unwrap();
        let rho = StateOnAlgebra::new(&mem, vec![real_diag(&[pi[0]]), real_diag(&[pi[1]])], 1e-10)
            .unwrap();
        FcsTriple::new(e, rho, tol()).unwrap()
    }

    fn product() -> FcsTriple {
        let mem = FdAlgebra::new(&[1]).unwrap();
        let e = CpMap::from_kraus(
            product_state_kraus(&real_diag(&[0.3, 0.7])),
            2,
            &mem,
            &tol(),
        )
        .unwrap();
        FcsTriple::new(e, StateOnAlgebra::tracial(&mem), tol()).unwrap()
    }

    #[test]
    fn product_state_spectrum() {
        let rep = peripheral_spectrum(&product()).unwrap();
        assert_eq!(rep.peripheral.len(), 1);
        assert_eq!(rep.period, 1);
        assert_eq!(rep.l_basis.len(), 1);
        assert!(is_factor(&product()).unwrap().is_factor);
        assert_eq!(clustering_rate(&product()).unwrap(), 0.0);
    }

    #[test]
    fn period_two_chain() {
        let t = chain([[0.0, 1.0], [1.0, 0.0]], [0.5, 0.5]);
        let rep = peripheral_spectrum(&t).unwrap();
        assert_eq!(rep.period, 2);
        assert_eq!(rep.l_basis.len(), 2);
        assert_eq!(rep.l1_basis.len(), 1);
        let v = is_factor(&t).unwrap();
        assert!(!v.is_factor);
        assert_eq!(v.center_dim, 2);
        assert_eq!(v.components.len(), 2);
        assert_eq!(v.components[0].regrouping, 2);
    }

    #[test]
    fn decoupled_chain() {
        let t = chain([[1.0, 0.0], [0.0, 1.0]], [0.5, 0.5]);
        let rep = peripheral_spectrum(&t).unwrap();
        assert_eq!(rep.period, 1);
        assert_eq!(rep.l1_basis.len(), 2);
        let v = is_factor(&t).unwrap();
        assert!(!v.is_factor);
        assert_eq!(v.center_dim, 2);
        let comps = ergodic_components(&t, Level::FixedPoints).unwrap();
        assert_eq!(comps.len(), 2);
        assert!(!states_equal(&comps[0].state, &comps[1].state, None).unwrap());
        assert_eq!(
            first_difference(&comps[0].state, &comps[1].state, None).unwrap(),
            Some(1)
        );
    }

    #[test]
    fn decoupled_chain_with_pure_weight_is_factor() {
        let t = chain([[1.0, 0.0], [0.0, 1.0]], [1.0, 0.0]);
        let v = is_factor(&t).unwrap();
        assert!(v.is_factor);
        assert!(v.support_reduced);
    }

    #[test]
    fn aperiodic_chain_rate() {
        let t = chain([[0.5, 0.5], [0.3, 0.7]], [0.375, 0.625]);
        assert!(is_factor(&t).unwrap().is_factor);
        assert!((clustering_rate(&t).unwrap() - 0.2).abs() < 1e-12);
    }

    #[test]
    fn state_equals_itself() {
        let t = chain([[0.5, 0.5], [0.3, 0.7]], [0.375, 0.625]);
        assert!(states_equal(&t, &t, None).unwrap());
    }
}
