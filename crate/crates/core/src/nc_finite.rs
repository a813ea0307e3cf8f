//! Finite-dimensional candidate Lorentzian spectral triples: axiom checks,
//! causal-cone membership `J[D, a] <= 0`, cone sampling and the induced
//! order on states.
//!
//! When `J` commutes with a unital algebra, every central block of
//! `J[D, a]` is traceless, so a semidefinite `J[D, a]` must vanish and the
//! cone is the linear subspace `{a : [D, a] = 0}`. Random rays almost never
//! hit such a subspace, so the sampler starts from the kernel of
//! `x -> J[D, sum_i x_i b_i]` and only then tries grid and random directions.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    anticommutator, commutator, from_pairs, hermitian_defect, hermitian_eigenvalues, identity, max_abs, to_pairs,
    CMatrix, C64,
};
use crate::spectral_matrix::is_negative_semidefinite;

/// Default tolerance for axiom checks and cone membership.
pub const NC_TOL: f64 = 1e-9;

pub type MatrixJson = Vec<Vec<[f64; 2]>>;

/// JSON layout of a triple.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TripleDocument {
    pub algebra_basis: Vec<MatrixJson>,
    #[serde(rename = "D")]
    pub d: MatrixJson,
    #[serde(rename = "J")]
    pub j: MatrixJson,
    #[serde(default)]
    pub chirality: Option<MatrixJson>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FiniteTriple {
    pub algebra_basis: Vec<CMatrix>,
    pub d: CMatrix,
    pub j: CMatrix,
    pub chirality: Option<CMatrix>,
}

impl FiniteTriple {
    /// Checks shapes only; the axioms are left to [`validate_triple`].
    pub fn new(algebra_basis: Vec<CMatrix>, d: CMatrix, j: CMatrix, chirality: Option<CMatrix>) -> Result<Self> {
        let n = d.nrows();
        let square = |m: &CMatrix, what: &str| {
            if m.nrows() != n || m.ncols() != n {
                Err(Error::Shape(format!(
                    "{what} is {}x{}, expected {n}x{n}",
                    m.nrows(),
                    m.ncols()
                )))
            } else if !crate::linalg::is_finite(m) {
                Err(Error::Numeric(format!("{what} has non-finite entries")))
            } else {
                Ok(())
            }
        };
        square(&d, "D")?;
        square(&j, "J")?;
        if let Some(g) = &chirality {
            square(g, "chirality")?;
        }
        if algebra_basis.is_empty() {
            return Err(Error::Shape("algebra basis is empty".into()));
        }
        for (i, b) in algebra_basis.iter().enumerate() {
            square(b, &format!("algebra_basis[{i}]"))?;
        }
        Ok(Self {
            algebra_basis,
            d,
            j,
            chirality,
        })
    }

    pub fn from_document(doc: &TripleDocument) -> Result<Self> {
        let basis = doc
            .algebra_basis
            .iter()
            .map(|m| from_pairs(m))
            .collect::<Result<Vec<_>>>()?;
        let chirality = doc.chirality.as_ref().map(|m| from_pairs(m)).transpose()?;
        Self::new(basis, from_pairs(&doc.d)?, from_pairs(&doc.j)?, chirality)
    }

    pub fn to_document(&self) -> TripleDocument {
        TripleDocument {
            algebra_basis: self.algebra_basis.iter().map(to_pairs).collect(),
            d: to_pairs(&self.d),
            j: to_pairs(&self.j),
            chirality: self.chirality.as_ref().map(to_pairs),
        }
    }

    pub fn dim_h(&self) -> usize {
        self.d.nrows()
    }

    /// `J [D, a]`.
    pub fn causal_operator(&self, a: &CMatrix) -> CMatrix {
        &self.j * commutator(&self.d, a)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxiomStatus {
    Pass,
    Fail,
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomCheck {
    pub axiom: String,
    pub status: AxiomStatus,
    pub max_violation: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub checks: Vec<AxiomCheck>,
}

impl ValidationReport {
    /// No checked axiom failed.
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != AxiomStatus::Fail)
    }

    pub fn status(&self, axiom: &str) -> Option<AxiomStatus> {
        self.checks.iter().find(|c| c.axiom == axiom).map(|c| c.status)
    }
}

/// Checks the structural axioms one by one. Violations are max-abs entry
/// norms, compared against `tol * (1 + scale)` with `scale` the largest
/// entry of the matrices involved.
pub fn validate_triple(t: &FiniteTriple, tol: f64) -> Result<ValidationReport> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::Range(format!("tolerance must be finite and > 0, got {tol}")));
    }
    let n = t.dim_h();
    let id = identity(n);
    let scale = t
        .algebra_basis
        .iter()
        .chain([&t.d, &t.j])
        .chain(t.chirality.iter())
        .map(max_abs)
        .fold(1.0, f64::max);
    let limit = tol * (1.0 + scale * scale);
    let mut checks = Vec::new();
    let mut push = |axiom: &str, violation: f64| {
        let status = if violation <= limit {
            AxiomStatus::Pass
        } else {
            AxiomStatus::Fail
        };
        checks.push(AxiomCheck {
            axiom: axiom.into(),
            status,
            max_violation: Some(violation),
        });
    };
    let over_basis = |f: &dyn Fn(&CMatrix) -> f64| t.algebra_basis.iter().map(f).fold(0.0, f64::max);

    push("algebra_basis_hermitian", over_basis(&hermitian_defect));
    push("algebra_contains_identity", distance_to_span(&t.algebra_basis, &id));
    push("j_involution", crate::linalg::max_abs_diff(&(&t.j * &t.j), &id));
    push("j_hermitian", hermitian_defect(&t.j));
    push(
        "j_commutes_with_algebra",
        over_basis(&|b| max_abs(&commutator(&t.j, b))),
    );
    push(
        "d_adjoint_equals_minus_jdj",
        max_abs(&(t.d.adjoint() + &t.j * &t.d * &t.j)),
    );
    match &t.chirality {
        Some(g) => {
            push("chirality_hermitian", hermitian_defect(g));
            push("chirality_involution", crate::linalg::max_abs_diff(&(g * g), &id));
            push(
                "chirality_commutes_with_algebra",
                over_basis(&|b| max_abs(&commutator(g, b))),
            );
            push("chirality_anticommutes_with_j", max_abs(&anticommutator(g, &t.j)));
            push("chirality_anticommutes_with_d", max_abs(&anticommutator(g, &t.d)));
        }
        None => {
            for axiom in [
                "chirality_hermitian",
                "chirality_involution",
                "chirality_commutes_with_algebra",
                "chirality_anticommutes_with_j",
                "chirality_anticommutes_with_d",
            ] {
                checks.push(AxiomCheck {
                    axiom: axiom.into(),
                    status: AxiomStatus::NotApplicable,
                    max_violation: None,
                });
            }
        }
    }
    for axiom in ["compact_resolvent", "unitization"] {
        checks.push(AxiomCheck {
            axiom: axiom.into(),
            status: AxiomStatus::NotApplicable,
            max_violation: None,
        });
    }
    Ok(ValidationReport { checks })
}

/// Flattens a complex matrix into real coordinates `(re, im)` entrywise.
fn realify(m: &CMatrix) -> Vec<f64> {
    m.iter().flat_map(|z| [z.re, z.im]).collect()
}

/// Real Gram-Schmidt over the Hilbert-Schmidt inner product `Re tr(A* B)`;
/// returns an orthonormal basis of the real span.
fn orthonormal_basis(mats: &[CMatrix]) -> Vec<CMatrix> {
    let mut out: Vec<CMatrix> = Vec::new();
    for m in mats {
        let mut v = m.clone();
        for _ in 0..2 {
            for e in &out {
                let proj = real_inner(e, &v);
                v -= e.scale(proj);
            }
        }
        let norm = real_inner(&v, &v).sqrt();
        if norm > 1e-10 * (1.0 + real_inner(m, m).sqrt()) {
            out.push(v.unscale(norm));
        }
    }
    out
}

fn real_inner(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.re * y.re + x.im * y.im).sum()
}

fn distance_to_span(mats: &[CMatrix], target: &CMatrix) -> f64 {
    let mut v = target.clone();
    for e in orthonormal_basis(mats) {
        let proj = real_inner(&e, &v);
        v -= e.scale(proj);
    }
    max_abs(&v)
}

/// Real dimension of the span of a set of matrices.
pub fn real_span_dimension(mats: &[CMatrix]) -> usize {
    orthonormal_basis(mats).len()
}

/// Axiom (f): `J[D, a]` negative semidefinite within `tol`.
pub fn cone_membership(t: &FiniteTriple, a: &CMatrix, tol: f64) -> Result<bool> {
    let n = t.dim_h();
    if a.nrows() != n || a.ncols() != n {
        return Err(Error::Shape(format!(
            "element is {}x{}, expected {n}x{n}",
            a.nrows(),
            a.ncols()
        )));
    }
    if hermitian_defect(a) > tol * (1.0 + max_abs(a)) {
        return Err(Error::Domain("cone elements must be Hermitian".into()));
    }
    is_negative_semidefinite(&t.causal_operator(a), tol)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub random_directions: usize,
    /// Largest algebra dimension for which the full `{-1,0,1}^k` grid is tried.
    pub max_grid_dimension: usize,
    pub bisection_steps: usize,
    pub seed: u64,
    pub tol: f64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            random_directions: 64,
            max_grid_dimension: 8,
            bisection_steps: 40,
            seed: 0,
            tol: NC_TOL,
        }
    }
}

/// Members found by the sampler, with the orthonormal Hermitian basis they
/// were expressed in.
#[derive(Debug, Clone, PartialEq)]
pub struct ConeSample {
    pub basis: Vec<CMatrix>,
    pub members: Vec<CMatrix>,
    /// Kernel directions of `a -> J[D, a]`; each spans a line inside the cone.
    pub kernel: Vec<CMatrix>,
    pub candidates_tested: usize,
}

fn combine(basis: &[CMatrix], x: &[f64]) -> CMatrix {
    let n = basis[0].nrows();
    let mut m = CMatrix::zeros(n, n);
    for (b, c) in basis.iter().zip(x) {
        m += b.scale(*c);
    }
    m
}

/// Samples the causal cone inside the Hermitian part of the algebra.
pub fn sample_cone(t: &FiniteTriple, cfg: &SamplerConfig) -> Result<ConeSample> {
    let hermitian: Vec<CMatrix> = t.algebra_basis.iter().map(crate::linalg::hermitian_part).collect();
    let basis = orthonormal_basis(&hermitian);
    let k = basis.len();
    if k == 0 {
        return Err(Error::Domain("algebra has no Hermitian part".into()));
    }
    let mut members = Vec::new();
    let mut tested = 0usize;
    let mut test = |a: CMatrix, members: &mut Vec<CMatrix>| -> Result<bool> {
        tested += 1;
        let ok = cone_membership(t, &a, cfg.tol)?;
        if ok {
            members.push(a);
        }
        Ok(ok)
    };

    // kernel of x -> J[D, sum x_i b_i], as a real linear map
    let images: Vec<Vec<f64>> = basis.iter().map(|b| realify(&t.causal_operator(b))).collect();
    let rows = images[0].len().max(k);
    let map = DMatrix::<f64>::from_fn(rows, k, |r, c| images[c].get(r).copied().unwrap_or(0.0));
    let svd = map.svd(false, true);
    let v_t = svd.v_t.as_ref().ok_or_else(|| Error::Numeric("SVD failed".into()))?;
    let sigma_max = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let mut kernel = Vec::new();
    for (i, s) in svd.singular_values.iter().enumerate() {
        if *s <= cfg.tol * (1.0 + sigma_max) {
            let x: Vec<f64> = v_t.row(i).iter().copied().collect();
            let a = combine(&basis, &x);
            test(a.clone(), &mut members)?;
            test(-a.clone(), &mut members)?;
            kernel.push(a);
        }
    }

    if k <= cfg.max_grid_dimension {
        let total = 3usize.pow(k as u32);
        for code in 0..total {
            let mut c = code;
            let x: Vec<f64> = (0..k)
                .map(|_| {
                    let digit = c % 3;
                    c /= 3;
                    digit as f64 - 1.0
                })
                .collect();
            if x.iter().all(|v| *v == 0.0) {
                continue;
            }
            test(combine(&basis, &x), &mut members)?;
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let anchor = members
        .iter()
        .fold(CMatrix::zeros(t.dim_h(), t.dim_h()), |acc, m| acc + m);
    let anchor_ok = !members.is_empty() && cone_membership(t, &anchor, cfg.tol)?;
    for _ in 0..cfg.random_directions {
        let x: Vec<f64> = (0..k).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let r = combine(&basis, &x);
        if test(r.clone(), &mut members)? || !anchor_ok {
            continue;
        }
        // bisect on the segment anchor -> r for the last member
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..cfg.bisection_steps {
            let mid = 0.5 * (lo + hi);
            let p = &anchor + (&r - &anchor).scale(mid);
            if cone_membership(t, &p, cfg.tol)? {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        // steps of tolerance size only reproduce the anchor up to rounding
        if lo > 1e-6 {
            test(&anchor + (&r - &anchor).scale(lo), &mut members)?;
        }
    }
    Ok(ConeSample {
        basis,
        members,
        kernel,
        candidates_tested: tested,
    })
}

/// `count` random nonnegative combinations of sampled members.
pub fn random_cone_members(sample: &ConeSample, count: usize, seed: u64) -> Vec<CMatrix> {
    let mut generators: Vec<CMatrix> = sample.members.clone();
    for v in &sample.kernel {
        generators.push(v.clone());
        generators.push(-v.clone());
    }
    if generators.is_empty() {
        return Vec::new();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let picks = rng.gen_range(1..=generators.len().min(4));
            let n = generators[0].nrows();
            let mut m = CMatrix::zeros(n, n);
            for _ in 0..picks {
                let g = &generators[rng.gen_range(0..generators.len())];
                m += g.scale(rng.gen_range(0.0..2.0));
            }
            m
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegeneracyReport {
    pub algebra_dimension: usize,
    pub cone_span_dimension: usize,
    pub kernel_dimension: usize,
    pub members_found: usize,
    pub candidates_tested: usize,
    /// Cone span is a strict subspace: no causal structure separates states.
    pub degenerate: bool,
    /// Cone spans only multiples of the identity.
    pub constants_only: bool,
}

pub fn cone_degeneracy_report(t: &FiniteTriple, cfg: &SamplerConfig) -> Result<DegeneracyReport> {
    let sample = sample_cone(t, cfg)?;
    Ok(degeneracy_of(t, &sample))
}

fn degeneracy_of(t: &FiniteTriple, sample: &ConeSample) -> DegeneracyReport {
    let span = real_span_dimension(&sample.members);
    let id = identity(t.dim_h());
    let constants_only = span == 1 && distance_to_span(&sample.members, &id) <= 1e-9;
    DegeneracyReport {
        algebra_dimension: sample.basis.len(),
        cone_span_dimension: span,
        kernel_dimension: sample.kernel.len(),
        members_found: sample.members.len(),
        candidates_tested: sample.candidates_tested,
        degenerate: span < sample.basis.len(),
        constants_only,
    }
}

/// Density matrix acting on the algebra by `a -> tr(rho a)`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVec {
    rho: CMatrix,
}

impl StateVec {
    pub const TOL: f64 = 1e-12;

    pub fn new(rho: CMatrix) -> Result<Self> {
        if rho.nrows() != rho.ncols() {
            return Err(Error::Shape("density matrix must be square".into()));
        }
        if hermitian_defect(&rho) > Self::TOL {
            return Err(Error::Domain("density matrix must be Hermitian".into()));
        }
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > Self::TOL || tr.im.abs() > Self::TOL {
            return Err(Error::Domain(format!("density matrix has trace {tr}, expected 1")));
        }
        let min = hermitian_eigenvalues(&rho)?.first().copied().unwrap_or(0.0);
        if min < -Self::TOL {
            return Err(Error::Domain(format!("density matrix has negative eigenvalue {min}")));
        }
        Ok(Self { rho })
    }

    /// Pure state `|v><v| / <v, v>`.
    pub fn pure(v: &[C64]) -> Result<Self> {
        let col = nalgebra::DVector::from_column_slice(v);
        let norm = col.norm_squared();
        if norm == 0.0 {
            return Err(Error::Domain("zero vector".into()));
        }
        let mut rho = &col * col.adjoint();
        rho.unscale_mut(norm);
        // symmetrize away rounding
        let rho = crate::linalg::hermitian_part(&rho);
        let tr = rho.trace().re;
        Self::new(rho.unscale(tr))
    }

    /// `(1 - lambda) self + lambda other`.
    pub fn mix(&self, other: &StateVec, lambda: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::Range(format!("mixing weight {lambda} outside [0, 1]")));
        }
        Self::new(self.rho.scale(1.0 - lambda) + other.rho.scale(lambda))
    }

    pub fn rho(&self) -> &CMatrix {
        &self.rho
    }

    pub fn eval(&self, a: &CMatrix) -> f64 {
        (&self.rho * a).trace().re
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateRelation {
    Leq,
    Geq,
    Both,
    IncomparableOnSample,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateOrderReport {
    pub relation: StateRelation,
    pub sample_size: usize,
    /// Sample element with `chi(a) > xi(a)`, refuting `chi <= xi`.
    pub refutes_leq: Option<usize>,
    /// Sample element with `chi(a) < xi(a)`, refuting `xi <= chi`.
    pub refutes_geq: Option<usize>,
    pub warnings: Vec<String>,
}

/// Compares two states on a sample of cone members. A refutation is
/// certain; `leq`/`geq` are only relative to the sample.
pub fn state_order(
    t: &FiniteTriple,
    chi: &StateVec,
    xi: &StateVec,
    sample: &[CMatrix],
    tol: f64,
) -> Result<StateOrderReport> {
    let n = t.dim_h();
    if chi.rho.nrows() != n || xi.rho.nrows() != n {
        return Err(Error::Shape(format!("states must be {n}x{n}")));
    }
    for (i, a) in sample.iter().enumerate() {
        let member = cone_membership(t, a, tol).map_err(|e| match e {
            Error::Domain(m) => Error::Precondition(format!("sample[{i}]: {m}")),
            other => other,
        })?;
        if !member {
            return Err(Error::Precondition(format!("sample[{i}] is not in the causal cone")));
        }
    }
    let mut refutes_leq = None;
    let mut refutes_geq = None;
    for (i, a) in sample.iter().enumerate() {
        let (x, y) = (chi.eval(a), xi.eval(a));
        let slack = tol * (1.0 + max_abs(a));
        if refutes_leq.is_none() && x > y + slack {
            refutes_leq = Some(i);
        }
        if refutes_geq.is_none() && y > x + slack {
            refutes_geq = Some(i);
        }
    }
    let relation = match (refutes_leq, refutes_geq) {
        (None, None) => StateRelation::Both,
        (None, Some(_)) => StateRelation::Leq,
        (Some(_), None) => StateRelation::Geq,
        (Some(_), Some(_)) => StateRelation::IncomparableOnSample,
    };
    let mut warnings = vec!["leq/geq verdicts hold on the sample only; refutations are exact".to_string()];
    let hermitian: Vec<CMatrix> = t.algebra_basis.iter().map(crate::linalg::hermitian_part).collect();
    let algebra_dim = real_span_dimension(&hermitian);
    let span = real_span_dimension(sample);
    if span < algebra_dim {
        warnings.push(format!(
            "sample spans {span} of {algebra_dim} algebra dimensions: the cone is degenerate and the order may collapse"
        ));
    }
    Ok(StateOrderReport {
        relation,
        sample_size: sample.len(),
        refutes_leq,
        refutes_geq,
        warnings,
    })
}

/// Small fixtures used by tests and documentation.
pub mod fixtures {
    use super::*;
    use crate::linalg::c64;

    fn diag(v: &[C64]) -> CMatrix {
        CMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(v))
    }

    fn real_diag(v: &[f64]) -> CMatrix {
        diag(&v.iter().map(|x| c64(*x, 0.0)).collect::<Vec<_>>())
    }

    /// Basis of the diagonal algebra on `C^n`.
    pub fn diagonal_algebra(n: usize) -> Vec<CMatrix> {
        (0..n)
            .map(|i| {
                let mut v = vec![0.0; n];
                v[i] = 1.0;
                real_diag(&v)
            })
            .collect()
    }

    /// Diagonal algebra on `C^2`, `J = diag(1, -1)`, `D = [[0, m], [conj m, 0]]`.
    pub fn toy_2x2(m: C64) -> FiniteTriple {
        let d = CMatrix::from_row_slice(2, 2, &[c64(0.0, 0.0), m, m.conj(), c64(0.0, 0.0)]);
        FiniteTriple::new(diagonal_algebra(2), d, real_diag(&[1.0, -1.0]), None).unwrap()
    }

    /// Diagonal algebra on `C^3` with `D` coupling only the first two sites:
    /// the cone is `{a_1 = a_2}`.
    pub fn partial_3x3(m: C64) -> FiniteTriple {
        let z = c64(0.0, 0.0);
        let d = CMatrix::from_row_slice(3, 3, &[z, m, z, m.conj(), z, z, z, z, z]);
        FiniteTriple::new(diagonal_algebra(3), d, real_diag(&[1.0, -1.0, 1.0]), None).unwrap()
    }

    /// `D = 0`: every Hermitian element is causal.
    pub fn zero_dirac(n: usize) -> FiniteTriple {
        let mut j = vec![1.0; n];
        if n > 1 {
            j[n - 1] = -1.0;
        }
        FiniteTriple::new(diagonal_algebra(n), CMatrix::zeros(n, n), real_diag(&j), None).unwrap()
    }

    /// Diagonal anti-Hermitian `D = diag(i, 2i)` with `J = diag(1, -1)`:
    /// commutes with the algebra, so the cone is full.
    pub fn imaginary_diagonal() -> FiniteTriple {
        let d = diag(&[c64(0.0, 1.0), c64(0.0, 2.0)]);
        FiniteTriple::new(diagonal_algebra(2), d, real_diag(&[1.0, -1.0]), None).unwrap()
    }

    pub fn diagonal_state(p: &[f64]) -> StateVec {
        StateVec::new(real_diag(p)).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use crate::linalg::c64;

    fn rdiag(v: &[f64]) -> CMatrix {
        CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            v.len(),
            v.iter().map(|x| c64(*x, 0.0)),
        ))
    }

    #[test]
    fn toy_triple_validates() {
        let r = validate_triple(&toy_2x2(c64(0.7, -0.2)), NC_TOL).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.status("compact_resolvent"), Some(AxiomStatus::NotApplicable));
        assert_eq!(r.status("chirality_involution"), Some(AxiomStatus::NotApplicable));
    }

    #[test]
    fn wrong_j_fails_krein_condition() {
        let mut t = toy_2x2(c64(1.0, 0.0));
        t.j = identity(2);
        let r = validate_triple(&t, NC_TOL).unwrap();
        assert_eq!(r.status("d_adjoint_equals_minus_jdj"), Some(AxiomStatus::Fail));
        assert!(!r.passed());
    }

    #[test]
    fn identity_only_algebra_passes() {
        let t = FiniteTriple::new(vec![identity(2)], CMatrix::zeros(2, 2), rdiag(&[1.0, -1.0]), None).unwrap();
        assert!(validate_triple(&t, NC_TOL).unwrap().passed());
    }

    #[test]
    fn chirality_checks() {
        let mut t = zero_dirac(2);
        t.chirality = Some(rdiag(&[1.0, 1.0]));
        let r = validate_triple(&t, NC_TOL).unwrap();
        assert_eq!(r.status("chirality_involution"), Some(AxiomStatus::Pass));
        assert_eq!(r.status("chirality_anticommutes_with_j"), Some(AxiomStatus::Fail));
    }

    #[test]
    fn shape_errors() {
        assert!(matches!(
            FiniteTriple::new(vec![identity(3)], CMatrix::zeros(2, 2), identity(2), None),
            Err(Error::Shape(_))
        ));
        let t = toy_2x2(c64(1.0, 0.0));
        assert!(matches!(
            cone_membership(&t, &identity(3), NC_TOL),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn membership_examples() {
        let t = toy_2x2(c64(0.5, 0.5));
        assert!(cone_membership(&t, &identity(2), NC_TOL).unwrap());
        assert!(!cone_membership(&t, &rdiag(&[1.0, 3.0]), NC_TOL).unwrap());
        let ev = hermitian_eigenvalues(&t.causal_operator(&rdiag(&[1.0, 3.0]))).unwrap();
        let expect = 2.0 * 0.5f64.hypot(0.5);
        assert!((ev[0] + expect).abs() < 1e-12 && (ev[1] - expect).abs() < 1e-12);
        assert!(cone_membership(&t, &identity(2).scale(3.5), NC_TOL).unwrap());
        let mut skew = CMatrix::zeros(2, 2);
        skew[(0, 1)] = c64(1.0, 0.0);
        assert!(matches!(cone_membership(&t, &skew, NC_TOL), Err(Error::Domain(_))));
    }

    #[test]
    fn degeneracy_examples() {
        let cfg = SamplerConfig::default();
        let r = cone_degeneracy_report(&toy_2x2(c64(1.0, 0.0)), &cfg).unwrap();
        assert_eq!((r.algebra_dimension, r.cone_span_dimension), (2, 1));
        assert!(r.degenerate && r.constants_only);

        let r = cone_degeneracy_report(&zero_dirac(2), &cfg).unwrap();
        assert_eq!(r.cone_span_dimension, 2);
        assert!(!r.degenerate);

        let t = imaginary_diagonal();
        assert!(validate_triple(&t, NC_TOL).unwrap().passed());
        let r = cone_degeneracy_report(&t, &cfg).unwrap();
        assert!(!r.degenerate);

        let r = cone_degeneracy_report(&partial_3x3(c64(0.3, 1.0)), &cfg).unwrap();
        assert_eq!((r.algebra_dimension, r.cone_span_dimension), (3, 2));
        assert!(r.degenerate && !r.constants_only);
    }

    #[test]
    fn cone_closure() {
        for t in [
            toy_2x2(c64(1.0, 0.5)),
            partial_3x3(c64(0.2, 0.0)),
            zero_dirac(3),
            imaginary_diagonal(),
        ] {
            let sample = sample_cone(&t, &SamplerConfig::default()).unwrap();
            let members = random_cone_members(&sample, 200, 7);
            let mut rng = ChaCha8Rng::seed_from_u64(1);
            for pair in members.chunks(2) {
                assert!(cone_membership(&t, &(&pair[0] + &pair[1]), NC_TOL).unwrap());
                assert!(cone_membership(&t, &pair[0].scale(rng.gen_range(0.0..10.0)), NC_TOL).unwrap());
            }
        }
    }

    #[test]
    fn state_order_examples() {
        let toy = toy_2x2(c64(1.0, 0.0));
        let chi = diagonal_state(&[0.25, 0.75]);
        let xi = diagonal_state(&[0.9, 0.1]);
        let sample = sample_cone(&toy, &SamplerConfig::default()).unwrap().members;
        let r = state_order(&toy, &chi, &chi, &sample, NC_TOL).unwrap();
        assert_eq!(r.relation, StateRelation::Both);
        let r = state_order(&toy, &chi, &xi, &sample, NC_TOL).unwrap();
        assert_eq!(r.relation, StateRelation::Both);
        assert_eq!(r.warnings.len(), 2);

        let flat = zero_dirac(2);
        let full = sample_cone(&flat, &SamplerConfig::default()).unwrap().members;
        let r = state_order(&flat, &chi, &xi, &full, NC_TOL).unwrap();
        assert_eq!(r.relation, StateRelation::IncomparableOnSample);
        assert!(r.refutes_leq.is_some() && r.refutes_geq.is_some());
        assert_eq!(
            state_order(&flat, &xi, &xi, &full, NC_TOL).unwrap().relation,
            StateRelation::Both
        );

        let bad = vec![rdiag(&[0.0, 1.0])];
        assert!(matches!(
            state_order(&toy, &chi, &xi, &bad, NC_TOL),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn partial_cone_orders_states() {
        // cone {a1 = a2, a3 free}: states compare through the weight on site 3
        let t = partial_3x3(c64(1.0, 0.0));
        let sample = vec![identity(3), rdiag(&[0.0, 0.0, 1.0]), rdiag(&[1.0, 1.0, 0.0])];
        let chi = diagonal_state(&[0.5, 0.3, 0.2]);
        let xi = diagonal_state(&[0.1, 0.1, 0.8]);
        let r = state_order(&t, &chi, &xi, &sample, NC_TOL).unwrap();
        assert_eq!(r.relation, StateRelation::IncomparableOnSample);
        // only a3 >= 0 directions: sample {1, e3}
        let r = state_order(&t, &chi, &xi, &sample[..2], NC_TOL).unwrap();
        assert_eq!(r.relation, StateRelation::Leq);
        let mid = chi.mix(&xi, 0.5).unwrap();
        assert_eq!(
            state_order(&t, &chi, &mid, &sample[..2], NC_TOL).unwrap().relation,
            StateRelation::Leq
        );
        assert_eq!(
            state_order(&t, &mid, &xi, &sample[..2], NC_TOL).unwrap().relation,
            StateRelation::Leq
        );
    }

    #[test]
    fn states_validate() {
        assert!(StateVec::new(rdiag(&[0.5, 0.6])).is_err());
        assert!(StateVec::new(rdiag(&[1.5, -0.5])).is_err());
        let s = StateVec::pure(&[c64(1.0, 0.0), c64(0.0, 1.0)]).unwrap();
        assert!((s.eval(&identity(2)) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn document_round_trip() {
        let t = toy_2x2(c64(0.3, -0.4));
        let doc = t.to_document();
        let back = FiniteTriple::from_document(&doc).unwrap();
        assert_eq!(t, back);
        let json = serde_json::to_string(&doc).unwrap();
        assert!(json.contains("\"D\"") && json.contains("\"chirality\":null"));
        let parsed: TripleDocument = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed, doc);
    }
}
