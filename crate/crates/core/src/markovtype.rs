//! Translation-invariant quantum Markov states: the `T_ij` data of the local
//! densities, the closed subgroup of ℝ generated by log-eigenvalue
//! differences, and the factor-type verdict.

use serde::Serialize;

use crate::algebra::subalgebra_decomposition;
pub use crate::algebra::RangeDecomposition;
use crate::cpmap::{check_conditional_expectation, range_basis, CpMap};
use crate::error::{Error, Result};
use crate::fcs::FcsTriple;
use crate::linalg::{self, max_abs, r, CMat, CVec};
use crate::peripheral::is_factor;
use crate::rational::{factorize, gcd, integer_relation, lcm};
use crate::tol::Tolerances;

/// Block dimensions, multiplicities and adapted basis of `ran(E)`.
pub fn range_decomposition(e: &CpMap, tol: &Tolerances) -> Result<RangeDecomposition> {
    let d = e.site_dim();
    if e.memory().num_blocks() != 1 || e.memory().rep_dim() != d {
        return Err(Error::Precondition(format!(
            "range decomposition needs E : M_{d} ⊗ M_{d} → M_{d}"
        )));
    }
    let range = range_basis(e, tol.alg);
    let range_vecs: Vec<CVec> = range.iter().map(linalg::flatten).collect();
    let mut closure = 0.0f64;
    for a in &range {
        closure = closure.max(linalg::distance_to_span(
            &range_vecs,
            &linalg::flatten(&a.adjoint()),
        ));
        for b in &range {
            closure = closure.max(linalg::distance_to_span(
                &range_vecs,
                &linalg::flatten(&(a * b)),
            ));
        }
    }
    if closure > 1e-8 {
        return Err(Error::RangeNotAlgebra(closure));
    }

    subalgebra_decomposition(&range)
}

/// Log-eigenvalues `t_k^{(ij)}` of the `T_ij`.
#[derive(Debug, Clone, Serialize)]
pub struct LogSpectra {
    /// `t[i][j]`: logs of the nonzero eigenvalues of `T_ij`, ascending.
    pub t: Vec<Vec<Vec<f64>>>,
    /// Some `T_ij` has a zero eigenvalue (omitted from `t`).
    pub non_faithful: bool,
}

#[derive(Debug, Clone)]
pub struct MarkovSpec {
    pub d: usize,
    pub range: RangeDecomposition,
    /// `t_blocks[i][j] = T_ij` on `ℂ^{mᵢ} ⊗ ℂ^{dⱼ}`.
    pub t_blocks: Vec<Vec<CMat>>,
    /// `ρ(zᵢ)`.
    pub weights: Vec<f64>,
    pub logs: LogSpectra,
    /// Frobenius distance between the reconstructed and direct three-site densities.
    pub reconstruction_residual: f64,
}

impl MarkovSpec {
    /// Validates the Markov structure of `φ` and extracts its `T_ij`.
    pub fn from_triple(phi: &FcsTriple) -> Result<Self> {
        let tol = *phi.tolerances();
        let e = phi.map();
        let d = e.site_dim();
        let chk = check_conditional_expectation(e, None, &tol)?;
        if !chk.is_conditional_expectation {
            return Err(Error::NotConditionalExpectation(format!(
                "unital {:.1e}, algebra {:.1e}, fix {:.1e}, bimodule {:.1e}",
                chk.unital_residual, chk.algebra_residual, chk.fix_residual, chk.bimodule_residual
            )));
        }
        let d1 = phi.window_density(1)?;
        let mismatch = max_abs(&(d1 - phi.rho().densities().block(0)));
        if mismatch > tol.alg.max(1e-10) * 10.0 {
            return Err(Error::RhoMismatch(mismatch));
        }
        let range = range_decomposition(e, &tol)?;
        let t_blocks = extract_tij_from(phi, &range, tol.wt)?;
        let weights = range
            .projections
            .iter()
            .map(|z| (phi.rho().densities().block(0) * z).trace().re)
            .collect::<Vec<_>>();
        let logs = log_spectra(&t_blocks, tol.psd);
        let mut spec = MarkovSpec {
            d,
            range,
            t_blocks,
            weights,
            logs,
            reconstruction_residual: f64::NAN,
        };
        let d3 = phi.window_density(3)?;
        spec.reconstruction_residual = spec.reconstruction_residual_against(&d3);
        if spec.reconstruction_residual > 1e-10 {
            return Err(Error::ReconstructionFailed(spec.reconstruction_residual));
        }
        Ok(spec)
    }

    pub fn num_blocks(&self) -> usize {
        self.range.num_blocks()
    }

    /// `‖D₃^{reconstructed} − D₃^{direct}‖_F` on `bar𝔇 ⊗ M_d ⊗ 𝔇`.
    pub fn reconstruction_residual_against(&self, d3: &CMat) -> f64 {
        let rd = &self.range;
        let d = self.d;
        let v3 = linalg::kron(&linalg::kron(&rd.v, &rd.v), &rd.v);
        let dt = v3.adjoint() * d3 * &v3;
        let mut sq = 0.0;
        for i1 in 0..rd.num_blocks() {
            for i3 in 0..rd.num_blocks() {
                let (m1, k1, m3, k3) = (rd.mults[i1], rd.dims[i1], rd.mults[i3], rd.dims[i3]);
                let mut idx = Vec::with_capacity(m1 * k1 * d * m3 * k3);
                for s1 in rd.offsets[i1]..rd.offsets[i1] + m1 * k1 {
                    for s2 in 0..d {
                        for s3 in rd.offsets[i3]..rd.offsets[i3] + m3 * k3 {
                            idx.push((s1 * d + s2) * d + s3);
                        }
                    }
                }
                let block = linalg::principal(&dt, &idx);
                let direct = linalg::ptrace(
                    &block,
                    &[m1, k1, d, m3, k3],
                    &[false, true, false, true, false],
                );
                let mut rec = CMat::zeros(m1 * d * k3, m1 * d * k3);
                for i2 in 0..rd.num_blocks() {
                    let (m2, k2) = (rd.mults[i2], rd.dims[i2]);
                    let pair = linalg::kron(&self.t_blocks[i1][i2], &self.t_blocks[i2][i3]);
                    let local = linalg::permute_factors(&pair, &[m1, k2, m2, k3], &[0, 2, 1, 3])
                        * r(self.weights[i1]);
                    let mut at = Vec::with_capacity(m1 * m2 * k2 * k3);
                    for mu1 in 0..m1 {
                        for s2 in rd.offsets[i2]..rd.offsets[i2] + m2 * k2 {
                            for ka3 in 0..k3 {
                                at.push((mu1 * d + s2) * k3 + ka3);
                            }
                        }
                    }
                    for (a, &ra) in at.iter().enumerate() {
                        for (b, &rb) in at.iter().enumerate() {
                            rec[(ra, rb)] = local[(a, b)];
                        }
                    }
                }
                sq += (direct - rec).iter().map(|z| z.norm_sqr()).sum::<f64>();
            }
        }
        sq.sqrt()
    }

    pub fn group_generators(&self) -> Vec<f64> {
        group_generators(&self.logs)
    }

    /// The four-index generators together with the three-factor window
    /// differences. Both lie in the same group; the latter include the
    /// cycle combinations `t^{(ii)} + t^{(jj)} − t^{(ij)} − t^{(ji)}`.
    pub fn generator_pool(&self) -> Vec<f64> {
        let p = self.num_blocks();
        let mut all = self.group_generators();
        for x in 0..p {
            for y in 0..p {
                all.extend(window_spectrum(&self.logs, 3, x, y).unwrap_or_default());
            }
        }
        dedup_reals(all)
            .into_iter()
            .filter(|g| g.abs() > 1e-12)
            .collect()
    }

    /// The spectrum group of the modular flow, classified in floating mode.
    pub fn spectrum_group(&self, tol: &Tolerances) -> SpectrumGroup {
        classify_subgroup(
            &self.generator_pool(),
            Mode::Floating,
            tol.commensurate,
            tol.q_max,
        )
    }

    pub fn window_spectrum(&self, n: usize, x: usize, y: usize) -> Result<Vec<f64>> {
        window_spectrum(&self.logs, n, x, y)
    }
}

/// `T_ij` read off the two-site density, compressed to `zᵢ ⊗ zⱼ`, traced over
/// the `dᵢ` part of site 1 and the `mⱼ` part of site 2, divided by `ρ(zᵢ)`.
pub fn extract_tij(phi: &FcsTriple, range: &RangeDecomposition) -> Result<Vec<Vec<CMat>>> {
    extract_tij_from(phi, range, phi.tolerances().wt)
}

fn extract_tij_from(phi: &FcsTriple, rd: &RangeDecomposition, wt: f64) -> Result<Vec<Vec<CMat>>> {
    let d = phi.site_dim();
    let d2 = phi.window_density(2)?;
    let v2 = linalg::kron(&rd.v, &rd.v);
    let dt = v2.adjoint() * d2 * &v2;
    let rho = phi.rho().densities().block(0).clone();
    let p = rd.num_blocks();
    let mut out = Vec::with_capacity(p);
    for i in 0..p {
        let w = (&rho * &rd.projections[i]).trace().re;
        if w <= wt {
            return Err(Error::UnreachableBlock(i));
        }
        let (mi, di) = (rd.mults[i], rd.dims[i]);
        let mut row = Vec::with_capacity(p);
        for j in 0..p {
            let (mj, dj) = (rd.mults[j], rd.dims[j]);
            let mut idx = Vec::with_capacity(mi * di * mj * dj);
            for s1 in rd.offsets[i]..rd.offsets[i] + mi * di {
                for s2 in rd.offsets[j]..rd.offsets[j] + mj * dj {
                    idx.push(s1 * d + s2);
                }
            }
            let block = linalg::principal(&dt, &idx);
            let t = linalg::ptrace(&block, &[mi, di, mj, dj], &[false, true, true, false]);
            row.push(t / r(w));
        }
        out.push(row);
    }
    Ok(out)
}

/// Logs of the eigenvalues of each `T_ij`; eigenvalues `≤ zero_tol` are
/// dropped and flagged.
pub fn log_spectra(t: &[Vec<CMat>], zero_tol: f64) -> LogSpectra {
    let mut non_faithful = false;
    let logs = t
        .iter()
        .map(|row| {
            row.iter()
                .map(|m| {
                    let vals = linalg::hermitian_eigenvalues(m);
                    let mut out = Vec::with_capacity(vals.len());
                    for v in vals {
                        if v > zero_tol {
                            out.push(v.ln());
                        } else {
                            non_faithful = true;
                        }
                    }
                    out
                })
                .collect()
        })
        .collect();
    LogSpectra {
        t: logs,
        non_faithful,
    }
}

/// Sorts and merges values closer than `1e-12·max(1, |v|)`.
pub fn dedup_reals(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    let mut out: Vec<f64> = Vec::with_capacity(v.len());
    for x in v {
        match out.last() {
            Some(&y) if (x - y).abs() <= 1e-12 * x.abs().max(1.0) => {}
            _ => out.push(x),
        }
    }
    out
}

/// Sums `t^{(x i₂)} + t^{(i₂ i₃)} + ⋯ + t^{(iₙ y)}` over paths with `n` factors.
pub fn path_sums(logs: &LogSpectra, n: usize, x: usize, y: usize) -> Vec<f64> {
    let p = logs.t.len();
    let mut cur: Vec<Vec<f64>> = (0..p)
        .map(|i| if i == x { vec![0.0] } else { Vec::new() })
        .collect();
    for _ in 0..n {
        let mut next: Vec<Vec<f64>> = vec![Vec::new(); p];
        for (i, sums) in cur.iter().enumerate() {
            if sums.is_empty() {
                continue;
            }
            for (j, tij) in logs.t[i].iter().enumerate() {
                for s in sums {
                    for t in tij {
                        next[j].push(s + t);
                    }
                }
            }
        }
        cur = next.into_iter().map(dedup_reals).collect();
    }
    cur.swap_remove(y)
}

/// Generators `t^{(i₁i₂)} + t^{(i₂i₄)} − t^{(i₁i₃)} − t^{(i₃i₄)}` over all
/// indices, deduplicated, zeros removed.
pub fn group_generators(logs: &LogSpectra) -> Vec<f64> {
    let p = logs.t.len();
    let mut all = Vec::new();
    for x in 0..p {
        for y in 0..p {
            let s = path_sums(logs, 2, x, y);
            for a in &s {
                for b in &s {
                    all.push(a - b);
                }
            }
        }
    }
    dedup_reals(all)
        .into_iter()
        .filter(|g| g.abs() > 1e-12)
        .collect()
}

/// Differences of path sums with `n` factors from block `x` to block `y`:
/// the spectrum of the modular flow on the window algebra with these ends.
pub fn window_spectrum(logs: &LogSpectra, n: usize, x: usize, y: usize) -> Result<Vec<f64>> {
    let p = logs.t.len();
    if n < 2 {
        return Err(Error::Precondition("window spectra need n ≥ 2".into()));
    }
    if x >= p || y >= p {
        return Err(Error::Precondition(format!(
            "block index out of range (p = {p})"
        )));
    }
    let s = path_sums(logs, n, x, y);
    let mut out = Vec::with_capacity(s.len() * s.len());
    for a in &s {
        for b in &s {
            out.push(a - b);
        }
    }
    Ok(dedup_reals(out))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Floating,
    ExactRational,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupKind {
    Trivial,
    Discrete,
    FullLine,
    Undetermined,
}

/// A closed subgroup of ℝ: `{0}`, `(log λ)ℤ`, or ℝ.
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumGroup {
    pub kind: GroupKind,
    /// `λ ∈ (0,1)` with `G = (log λ)ℤ`, when discrete.
    pub lambda: Option<f64>,
    /// `|log λ|`, when discrete.
    pub generator: Option<f64>,
    pub generators: Vec<f64>,
    pub mode: Mode,
    pub tolerance: f64,
    pub q_max: u64,
    pub reason: Option<String>,
}

impl SpectrumGroup {
    fn new(kind: GroupKind, generators: &[f64], mode: Mode, tol: f64, q_max: u64) -> Self {
        Self {
            kind,
            lambda: None,
            generator: None,
            generators: generators.to_vec(),
            mode,
            tolerance: tol,
            q_max,
            reason: None,
        }
    }

    fn discrete(mut self, a: f64) -> Self {
        self.kind = GroupKind::Discrete;
        self.generator = Some(a.abs());
        self.lambda = Some((-a.abs()).exp());
        self
    }

    fn undetermined(mut self, why: String) -> Self {
        self.kind = GroupKind::Undetermined;
        self.reason = Some(why);
        self
    }

    /// Whether `x` lies in the group within `tol`.
    pub fn contains(&self, x: f64, tol: f64) -> bool {
        match self.kind {
            GroupKind::Trivial => x.abs() <= tol,
            GroupKind::FullLine => x.is_finite(),
            GroupKind::Discrete => {
                let a = self.generator.expect("discrete group has a generator");
                (x - (x / a).round() * a).abs() <= tol
            }
            GroupKind::Undetermined => false,
        }
    }

    /// Same kind and, when discrete, the same `λ` within `tol`.
    pub fn same_as(&self, other: &SpectrumGroup, tol: f64) -> bool {
        self.kind == other.kind
            && match (self.lambda, other.lambda) {
                (Some(a), Some(b)) => (a - b).abs() <= tol,
                (None, None) => true,
                _ => false,
            }
    }
}

/// Floating-mode classification. A generator `g` is commensurate with the
/// current base `a` when some continued-fraction convergent `p/q` of `g/a`
/// with `q ≤ q_max` satisfies `|q·g − p·a| ≤ tol`; the base then becomes
/// `a/q`.
pub fn classify_subgroup(generators: &[f64], mode: Mode, tol: f64, q_max: u64) -> SpectrumGroup {
    let base = SpectrumGroup::new(GroupKind::Trivial, generators, mode, tol, q_max);
    if generators.iter().any(|g| !g.is_finite()) {
        return base.undetermined("non-finite generator".into());
    }
    let mut nonzero: Vec<f64> = generators
        .iter()
        .copied()
        .filter(|g| g.abs() > tol)
        .collect();
    if nonzero.is_empty() {
        return base;
    }
    nonzero.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
    let a = nonzero[0].abs();
    let mut rel: Vec<(i64, u64)> = Vec::with_capacity(nonzero.len());
    for &g in &nonzero[1..] {
        match integer_relation(g, a, tol, q_max) {
            Some(pq) => rel.push(pq),
            None => {
                let mut out = base;
                out.kind = GroupKind::FullLine;
                return out;
            }
        }
    }
    let mut l: u64 = 1;
    for &(_, q) in &rel {
        l = lcm(l, q);
        if l > q_max {
            return base.undetermined(format!("common denominator exceeds {q_max}"));
        }
    }
    // a·ℤ + Σ (pᵢ/qᵢ)·a·ℤ = (k/l)·a·ℤ with k = gcd(l, pᵢ·l/qᵢ)
    let mut k = l;
    for &(p, q) in &rel {
        k = gcd(k, p.unsigned_abs() * (l / q));
    }
    base.discrete(a * k as f64 / l as f64)
}

/// Exact classification of generators `Σ_b c_b log(r_b)` with integer
/// coefficients `c` over positive rationals `r_b = num/den`.
pub fn classify_exact(basis: &[(u64, u64)], generators: &[Vec<i64>]) -> Result<SpectrumGroup> {
    let mut primes: Vec<u64> = Vec::new();
    let mut exps: Vec<Vec<(u64, i64)>> = Vec::new();
    for &(num, den) in basis {
        if num == 0 || den == 0 {
            return Err(Error::Parse("basis rationals must be positive".into()));
        }
        let mut e: Vec<(u64, i64)> = factorize(num)
            .into_iter()
            .map(|(p, k)| (p, k as i64))
            .collect();
        e.extend(factorize(den).into_iter().map(|(p, k)| (p, -(k as i64))));
        for &(p, _) in &e {
            if !primes.contains(&p) {
                primes.push(p);
            }
        }
        exps.push(e);
    }
    primes.sort_unstable();
    let mut rows: Vec<Vec<i128>> = Vec::new();
    let mut floats = Vec::new();
    for g in generators {
        if g.len() != basis.len() {
            return Err(Error::ShapeMismatch(format!(
                "generator has {} coefficients for a basis of {}",
                g.len(),
                basis.len()
            )));
        }
        let mut row = vec![0i128; primes.len()];
        for (b, &cb) in g.iter().enumerate() {
            for &(p, k) in &exps[b] {
                let idx = primes.binary_search(&p).expect("collected above");
                row[idx] += cb as i128 * k as i128;
            }
        }
        floats.push(
            row.iter()
                .zip(&primes)
                .map(|(&k, &p)| k as f64 * (p as f64).ln())
                .sum::<f64>(),
        );
        rows.push(row);
    }
    let base = SpectrumGroup::new(GroupKind::Trivial, &floats, Mode::ExactRational, 0.0, 0);
    let lattice = hermite_rows(rows);
    Ok(match lattice.len() {
        0 => base,
        1 => {
            let v = &lattice[0];
            let val: f64 = v
                .iter()
                .zip(&primes)
                .map(|(&k, &p)| k as f64 * (p as f64).ln())
                .sum();
            base.discrete(val)
        }
        _ => {
            let mut out = base;
            out.kind = GroupKind::FullLine;
            out
        }
    })
}

/// Row-echelon basis of the integer lattice spanned by `rows` (nonzero rows
/// only), by repeated Euclidean elimination.
fn hermite_rows(mut rows: Vec<Vec<i128>>) -> Vec<Vec<i128>> {
    rows.retain(|r| r.iter().any(|&x| x != 0));
    let cols = rows.first().map_or(0, |r| r.len());
    let mut out = Vec::new();
    for col in 0..cols {
        loop {
            let mut live: Vec<usize> = (0..rows.len()).filter(|&i| rows[i][col] != 0).collect();
            if live.len() <= 1 {
                break;
            }
            live.sort_by_key(|&i| rows[i][col].abs());
            let pivot = live[0];
            for &i in &live[1..] {
                let q = rows[i][col] / rows[pivot][col];
                let prow = rows[pivot].clone();
                for (x, y) in rows[i].iter_mut().zip(&prow) {
                    *x -= q * y;
                }
            }
        }
        if let Some(i) = (0..rows.len()).find(|&i| rows[i][col] != 0) {
            out.push(rows.swap_remove(i));
        }
        rows.retain(|r| r.iter().any(|&x| x != 0));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TypeLabel {
    #[serde(rename = "I_inf")]
    IInf,
    #[serde(rename = "II_1")]
    II1,
    #[serde(rename = "II_inf")]
    IIInf,
    #[serde(rename = "III_lambda")]
    IIILambda,
    #[serde(rename = "III_1")]
    III1,
    #[serde(rename = "undetermined")]
    Undetermined,
}

impl TypeLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            TypeLabel::IInf => "I_inf",
            TypeLabel::II1 => "II_1",
            TypeLabel::IIInf => "II_inf",
            TypeLabel::IIILambda => "III_lambda",
            TypeLabel::III1 => "III_1",
            TypeLabel::Undetermined => "undetermined",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TypeEvidence {
    pub is_factor: bool,
    pub locally_faithful: bool,
    pub min_window_eigenvalue: f64,
    /// Spectrum group trivial on the support of the data.
    pub tracial_on_support: Option<bool>,
    pub mean_entropy: f64,
    pub entropy_differences: Vec<f64>,
    pub group: Option<SpectrumGroup>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TypeVerdict {
    pub label: TypeLabel,
    pub lambda: Option<f64>,
    pub reason: Option<String>,
    pub evidence: TypeEvidence,
}

/// Mean-entropy threshold below which a factor state counts as pure.
pub const PURITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, Default)]
pub struct TypeOptions {
    pub entropy_n_max: Option<usize>,
    pub faithfulness_n_max: Option<usize>,
}

/// Factor-type decision for a factor state, using the Markov data when given.
pub fn classify_type(
    phi: &FcsTriple,
    spec: Option<&MarkovSpec>,
    opts: TypeOptions,
) -> Result<TypeVerdict> {
    let tol = *phi.tolerances();
    if !is_factor(&phi.reduced()?)?.is_factor {
        return Err(Error::NotFactor);
    }
    let (mean_entropy, entropy_differences) = mean_entropy_estimate(phi, opts.entropy_n_max)?;
    let (locally_faithful, min_eig) =
        local_faithfulness(phi, opts.faithfulness_n_max.unwrap_or(3))?;
    let mut evidence = TypeEvidence {
        is_factor: true,
        locally_faithful,
        min_window_eigenvalue: min_eig,
        tracial_on_support: None,
        mean_entropy,
        entropy_differences,
        group: None,
    };
    let verdict = |label, lambda, reason: Option<String>, evidence| TypeVerdict {
        label,
        lambda,
        reason,
        evidence,
    };
    if mean_entropy.abs() <= PURITY_TOL {
        return Ok(verdict(TypeLabel::IInf, None, None, evidence));
    }
    let Some(spec) = spec else {
        let why = if locally_faithful {
            "no quantum Markov structure; the type machinery covers Markov states only"
        } else {
            "not locally faithful and no quantum Markov structure"
        };
        return Ok(verdict(
            TypeLabel::Undetermined,
            None,
            Some(why.into()),
            evidence,
        ));
    };
    let group = spec.spectrum_group(&tol);
    evidence.tracial_on_support = Some(group.kind == GroupKind::Trivial);
    evidence.group = Some(group.clone());
    if locally_faithful {
        return Ok(match group.kind {
            GroupKind::Trivial => verdict(TypeLabel::II1, None, None, evidence),
            GroupKind::Discrete => verdict(TypeLabel::IIILambda, group.lambda, None, evidence),
            GroupKind::FullLine => verdict(TypeLabel::III1, None, None, evidence),
            GroupKind::Undetermined => {
                let why = group.reason.clone();
                verdict(TypeLabel::Undetermined, None, why, evidence)
            }
        });
    }
    if group.kind == GroupKind::Trivial {
        return Ok(verdict(TypeLabel::IIInf, None, None, evidence));
    }
    Ok(verdict(
        TypeLabel::Undetermined,
        None,
        Some("not locally faithful and not tracial on its support".into()),
        evidence,
    ))
}

/// Default window for the entropy estimate: the largest `n` with `dⁿ ≤ 256`,
/// at least 2.
pub fn default_entropy_window(d: usize) -> usize {
    let mut n = 0;
    let mut p = 1usize;
    while p * d <= 256 {
        p *= d;
        n += 1;
    }
    n.max(2)
}

/// `S(φ|[1,n]) − S(φ|[1,n−1])` at `n = n_max`, with all successive differences.
pub fn mean_entropy_estimate(phi: &FcsTriple, n_max: Option<usize>) -> Result<(f64, Vec<f64>)> {
    let n_max = n_max.unwrap_or_else(|| default_entropy_window(phi.site_dim()));
    if n_max < 2 {
        return Err(Error::Precondition("mean entropy needs n_max ≥ 2".into()));
    }
    let dens = phi.window_densities(n_max)?;
    let mut prev = 0.0;
    let mut diffs = Vec::with_capacity(n_max);
    for dn in &dens {
        let s = linalg::entropy_of_density(dn);
        diffs.push(s - prev);
        prev = s;
    }
    Ok((*diffs.last().expect("n_max ≥ 2"), diffs))
}

/// Whether every window density up to `n_max` is faithful, with the smallest
/// eigenvalue seen.
pub fn local_faithfulness(phi: &FcsTriple, n_max: usize) -> Result<(bool, f64)> {
    if n_max == 0 {
        return Err(Error::Precondition("n_max must be positive".into()));
    }
    let mut lowest = f64::INFINITY;
    for dn in phi.window_densities(n_max)? {
        lowest = lowest.min(linalg::min_hermitian_eigenvalue(&dn));
    }
    Ok((lowest > phi.tolerances().psd, lowest))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{
        diagonal_markov, example_product_three_level, product_markov, random_markov,
    };
    use crate::linalg::real_diag;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn three_level_product_data() {
        let phi = example_product_three_level(0.5).unwrap();
        let spec = MarkovSpec::from_triple(&phi).unwrap();
        assert_eq!(spec.range.dims, vec![3]);
        assert_eq!(spec.range.mults, vec![1]);
        assert!(max_abs(&(&spec.t_blocks[0][0] - real_diag(&[0.4, 0.4, 0.2]))) < 1e-12);
        let g = spec.group_generators();
        assert!(g.iter().any(|x| (x - 2f64.ln()).abs() < 1e-12));
        let group = spec.spectrum_group(&tol());
        assert_eq!(group.kind, GroupKind::Discrete);
        assert!((group.lambda.unwrap() - 0.5).abs() < 1e-9);
    }

    #[test]
    fn diagonal_markov_data() {
        let phi = diagonal_markov(0.4, 0.2).unwrap();
        let spec = MarkovSpec::from_triple(&phi).unwrap();
        assert_eq!(spec.range.dims, vec![1, 1]);
        assert_eq!(spec.range.mults, vec![1, 1]);
        let expect = [[0.4, 0.6], [0.8, 0.2]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((spec.t_blocks[i][j][(0, 0)].re - expect[i][j]).abs() < 1e-12);
            }
        }
        let g = spec.spectrum_group(&tol()).generators;
        assert!(g.iter().any(|x| (x - 2f64.ln()).abs() < 1e-12));
        assert!(g.iter().any(|x| (x + 6f64.ln()).abs() < 1e-12));
        assert_eq!(spec.spectrum_group(&tol()).kind, GroupKind::FullLine);
    }

    #[test]
    fn zero_mode_flagged() {
        let logs = log_spectra(&[vec![real_diag(&[0.5, 0.5, 0.0])]], 1e-10);
        assert!(logs.non_faithful);
        assert_eq!(logs.t[0][0].len(), 2);
        assert!(group_generators(&logs).is_empty());
    }

    #[test]
    fn subgroup_classification() {
        let t = 1e-9;
        let q = 1_000_000;
        let g = classify_subgroup(&[2f64.ln()], Mode::Floating, t, q);
        assert!((g.lambda.unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(
            classify_subgroup(&[2f64.ln(), 3f64.ln()], Mode::Floating, t, q).kind,
            GroupKind::FullLine
        );
        let a = 0.9f64.ln();
        let g = classify_subgroup(&[2.0 * a, 3.0 * a], Mode::Floating, t, q);
        assert!((g.generator.unwrap() - a.abs()).abs() < 1e-12);
        assert_eq!(
            classify_subgroup(&[], Mode::Floating, t, q).kind,
            GroupKind::Trivial
        );
        assert_eq!(
            classify_subgroup(&[f64::NAN], Mode::Floating, t, q).kind,
            GroupKind::Undetermined
        );
    }

    #[test]
    fn exact_classification() {
        let basis = [(2, 1), (3, 1), (4, 1)];
        let g = classify_exact(&basis, &[vec![1, 0, 0], vec![0, 0, 1]]).unwrap();
        assert_eq!(g.kind, GroupKind::Discrete);
        assert!((g.lambda.unwrap() - 0.5).abs() < 1e-15);
        let g = classify_exact(&basis, &[vec![1, 0, 0], vec![0, 1, 0]]).unwrap();
        assert_eq!(g.kind, GroupKind::FullLine);
        let g = classify_exact(&basis, &[vec![2, 0, -1]]).unwrap();
        assert_eq!(g.kind, GroupKind::Trivial);
    }

    #[test]
    fn window_two_equals_generators() {
        let phi = diagonal_markov(0.4, 0.2).unwrap();
        let spec = MarkovSpec::from_triple(&phi).unwrap();
        let mut pooled = Vec::new();
        for x in 0..2 {
            for y in 0..2 {
                pooled.extend(spec.window_spectrum(2, x, y).unwrap());
            }
        }
        let pooled: Vec<f64> = dedup_reals(pooled)
            .into_iter()
            .filter(|g| g.abs() > 1e-12)
            .collect();
        assert_eq!(pooled, spec.group_generators());
    }

    #[test]
    fn type_fixtures() {
        let tracial = product_markov(&real_diag(&[1.0 / 3.0; 3])).unwrap();
        let spec = MarkovSpec::from_triple(&tracial).unwrap();
        let v = classify_type(&tracial, Some(&spec), TypeOptions::default()).unwrap();
        assert_eq!(v.label, TypeLabel::II1);

        let pure = product_markov(&real_diag(&[1.0, 0.0])).unwrap();
        let v = classify_type(&pure, None, TypeOptions::default()).unwrap();
        assert_eq!(v.label, TypeLabel::IInf);

        let half = product_markov(&real_diag(&[0.5, 0.5, 0.0, 0.0])).unwrap();
        let spec = MarkovSpec::from_triple(&half).unwrap();
        let v = classify_type(&half, Some(&spec), TypeOptions::default()).unwrap();
        assert_eq!(v.label, TypeLabel::IIInf);

        let phi = example_product_three_level(0.5).unwrap();
        let spec = MarkovSpec::from_triple(&phi).unwrap();
        let v = classify_type(&phi, Some(&spec), TypeOptions::default()).unwrap();
        assert_eq!(v.label, TypeLabel::IIILambda);
        assert!((v.lambda.unwrap() - 0.5).abs() < 1e-9);
    }

    #[test]
    fn random_specs_reconstruct() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for k in 0..12 {
            let phi = random_markov(&mut rng, 2 + k % 2, k % 3 == 0).unwrap();
            let spec = MarkovSpec::from_triple(&phi).unwrap();
            assert!(spec.reconstruction_residual <= 1e-10);
        }
    }
}
