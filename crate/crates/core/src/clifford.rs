//! Gamma matrices for signature `(-, +, ..., +)`.
//!
//! Flat generators come from the Jordan-Wigner tensor construction on
//! `floor(n/2)` qubits: Hermitian Euclidean generators `e_a` are built from
//! Pauli strings and the time generator is rotated to `gamma^0 = i e_0`, which
//! makes it anti-Hermitian with square `-1`. The construction is deterministic,
//! so the same `n` always yields bit-identical matrices.

use crate::error::{Error, Result};
use crate::linalg::{anticommutator, c64, identity, kron_all, max_abs, pauli_x, pauli_y, pauli_z, CMatrix};

/// Flat gamma matrices of an `n`-dimensional spacetime.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaSet {
    n: usize,
    d: usize,
    gammas: Vec<CMatrix>,
    chirality: Option<CMatrix>,
}

impl GammaSet {
    pub fn dimension(&self) -> usize {
        self.n
    }

    /// Spinor dimension `2^floor(n/2)`.
    pub fn spinor_dim(&self) -> usize {
        self.d
    }

    pub fn gammas(&self) -> &[CMatrix] {
        &self.gammas
    }

    pub fn gamma(&self, a: usize) -> &CMatrix {
        &self.gammas[a]
    }

    /// Present iff `n` is even.
    pub fn chirality(&self) -> Option<&CMatrix> {
        self.chirality.as_ref()
    }

    /// The flat fundamental symmetry `J = i gamma^0`.
    pub fn fundamental_symmetry(&self) -> CMatrix {
        self.gammas[0].map(|z| z * c64(0.0, 1.0))
    }

    /// Largest entrywise deviation of `{gamma^a, gamma^b}` from `2 eta^{ab}`.
    pub fn anticommutation_defect(&self) -> f64 {
        let eta: Vec<f64> = (0..self.n).map(|a| if a == 0 { -1.0 } else { 1.0 }).collect();
        anticommutation_defect(&self.gammas, &eta)
    }
}

/// Largest deviation of `{g_a, g_b}` from `2 diag(metric)_{ab}`.
pub fn anticommutation_defect(gammas: &[CMatrix], diag_metric: &[f64]) -> f64 {
    let d = gammas.first().map_or(0, |g| g.nrows());
    let mut worst: f64 = 0.0;
    for a in 0..gammas.len() {
        for b in a..gammas.len() {
            let mut ac = anticommutator(&gammas[a], &gammas[b]);
            if a == b {
                ac -= identity(d).scale(2.0 * diag_metric[a]);
            }
            worst = worst.max(max_abs(&ac));
        }
    }
    worst
}

/// Builds the flat gamma set for dimension `n >= 2`.
pub fn build_flat_gammas(n: usize) -> Result<GammaSet> {
    if n < 2 {
        return Err(Error::Dimension(format!("spacetime dimension must be >= 2, got {n}")));
    }
    let k = n / 2;
    let d = 1usize << k;
    let string = |j: usize, middle: CMatrix| -> CMatrix {
        let mut factors = Vec::with_capacity(k);
        factors.extend(std::iter::repeat_n(pauli_z(), j));
        factors.push(middle);
        factors.extend(std::iter::repeat_n(identity(2), k - j - 1));
        kron_all(&factors)
    };
    let mut euclid = Vec::with_capacity(n);
    for j in 0..k {
        euclid.push(string(j, pauli_x()));
        euclid.push(string(j, pauli_y()));
    }
    if n % 2 == 1 {
        euclid.push(kron_all(&vec![pauli_z(); k]));
    }
    let mut gammas = euclid;
    gammas[0] = gammas[0].map(|z| z * c64(0.0, 1.0));
    let mut gs = GammaSet {
        n,
        d,
        gammas,
        chirality: None,
    };
    if n.is_multiple_of(2) {
        gs.chirality = Some(chirality_of(&gs.gammas));
    }
    Ok(gs)
}

fn chirality_of(gammas: &[CMatrix]) -> CMatrix {
    let n = gammas.len();
    let d = gammas[0].nrows();
    // (-i)^(n/2 + 1)
    let phase = match (n / 2 + 1) % 4 {
        0 => c64(1.0, 0.0),
        1 => c64(0.0, -1.0),
        2 => c64(-1.0, 0.0),
        _ => c64(0.0, 1.0),
    };
    let product = gammas.iter().fold(identity(d), |acc, g| acc * g);
    product.map(|z| z * phase)
}

/// The grading `(-i)^(n/2+1) gamma^0 ... gamma^(n-1)` for even `n`.
pub fn chirality_element(gs: &GammaSet) -> Result<CMatrix> {
    if !gs.n.is_multiple_of(2) {
        return Err(Error::Parity(format!(
            "chirality requires even dimension, got n = {}",
            gs.n
        )));
    }
    Ok(chirality_of(&gs.gammas))
}

/// Validates a diagonal inverse metric against signature `(-, +, ..., +)`.
pub fn check_signature(g_inv_diag: &[f64], n: usize) -> Result<()> {
    if g_inv_diag.len() != n {
        return Err(Error::Shape(format!(
            "expected {n} inverse-metric components, got {}",
            g_inv_diag.len()
        )));
    }
    if g_inv_diag.iter().any(|g| !g.is_finite()) {
        return Err(Error::Numeric("non-finite inverse-metric component".into()));
    }
    if g_inv_diag[0] >= 0.0 {
        return Err(Error::Signature(format!(
            "g^00 must be negative, got {}",
            g_inv_diag[0]
        )));
    }
    if let Some((i, g)) = g_inv_diag.iter().enumerate().skip(1).find(|(_, g)| **g <= 0.0) {
        return Err(Error::Signature(format!("g^{i}{i} must be positive, got {g}")));
    }
    Ok(())
}

/// Curved gammas at one point of a spacetime with diagonal inverse metric.
#[derive(Debug, Clone, PartialEq)]
pub struct PointGammas {
    pub curved: Vec<CMatrix>,
    /// `J = i gamma^0` with the curved `gamma^0`; `J^2 = -g^00`.
    pub j_op: CMatrix,
    pub g_inv_diag: Vec<f64>,
}

impl PointGammas {
    pub fn dimension(&self) -> usize {
        self.curved.len()
    }

    pub fn spinor_dim(&self) -> usize {
        self.j_op.nrows()
    }

    pub fn anticommutation_defect(&self) -> f64 {
        anticommutation_defect(&self.curved, &self.g_inv_diag)
    }
}

/// Scales the flat set by the diagonal vielbein `sqrt(|g^{aa}|)`.
pub fn curved_gammas(gs: &GammaSet, g_inv_diag: &[f64]) -> Result<PointGammas> {
    check_signature(g_inv_diag, gs.n)?;
    let curved: Vec<CMatrix> = gs
        .gammas
        .iter()
        .zip(g_inv_diag)
        .map(|(g, gi)| g.scale(gi.abs().sqrt()))
        .collect();
    let j_op = curved[0].map(|z| z * c64(0.0, 1.0));
    Ok(PointGammas {
        curved,
        j_op,
        g_inv_diag: g_inv_diag.to_vec(),
    })
}
