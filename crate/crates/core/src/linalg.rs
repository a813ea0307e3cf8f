//! Small complex-matrix helpers shared by the geometric modules.

use nalgebra::{Complex, DMatrix, Schur};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;

#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

pub fn identity(d: usize) -> CMatrix {
    CMatrix::identity(d, d)
}

pub fn pauli_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c64(0., 0.), c64(1., 0.), c64(1., 0.), c64(0., 0.)])
}

pub fn pauli_y() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c64(0., 0.), c64(0., -1.), c64(0., 1.), c64(0., 0.)])
}

pub fn pauli_z() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c64(1., 0.), c64(0., 0.), c64(0., 0.), c64(-1., 0.)])
}

/// Kronecker product of a list of factors, left to right.
pub fn kron_all(factors: &[CMatrix]) -> CMatrix {
    factors.iter().fold(identity(1), |acc, f| acc.kronecker(f))
}

pub fn anticommutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b + b * a
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

/// Largest entry modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    max_abs(&(a - b))
}

pub fn is_finite(m: &CMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn hermitian_defect(m: &CMatrix) -> f64 {
    max_abs_diff(m, &m.adjoint())
}

pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

fn require_square(m: &CMatrix) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::Shape(format!(
            "expected a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

/// Eigenvalues of the Hermitian part of `m`, ascending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Result<Vec<f64>> {
    require_square(m)?;
    if !is_finite(m) {
        return Err(Error::Numeric("matrix has non-finite entries".into()));
    }
    let mut ev: Vec<f64> = hermitian_part(m).symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

/// Complex eigenvalues of a general square matrix, sorted by (re, im).
pub fn general_eigenvalues(m: &CMatrix) -> Result<Vec<C64>> {
    require_square(m)?;
    if !is_finite(m) {
        return Err(Error::Numeric("matrix has non-finite entries".into()));
    }
    let ev = Schur::try_new(m.clone(), f64::EPSILON, 10_000)
        .and_then(|s| s.eigenvalues())
        .ok_or_else(|| Error::Numeric("Schur iteration did not converge".into()))?;
    let mut ev: Vec<C64> = ev.iter().copied().collect();
    ev.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(ev)
}

/// Trace of `m^k` by repeated multiplication.
pub fn trace_of_power(m: &CMatrix, k: usize) -> C64 {
    let mut acc = identity(m.nrows());
    for _ in 0..k {
        acc = &acc * m;
    }
    acc.trace()
}

/// Coefficients `c_0..c_d` of `prod (x - r_i)`, written as
/// `x^d + c_1 x^{d-1} + ... + c_d`.
pub fn monic_from_roots(roots: &[C64]) -> Vec<C64> {
    let mut coeffs = vec![c64(1.0, 0.0)];
    for r in roots {
        let mut next = coeffs.clone();
        next.push(c64(0.0, 0.0));
        for (k, c) in coeffs.iter().enumerate() {
            next[k + 1] -= r * c;
        }
        coeffs = next;
    }
    coeffs
}

/// Row-major nested `[re, im]` pairs, the JSON layout used for matrices.
pub fn to_pairs(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

pub fn from_pairs(rows: &[Vec<[f64; 2]>]) -> Result<CMatrix> {
    let nrows = rows.len();
    if nrows == 0 {
        return Err(Error::Shape("empty matrix".into()));
    }
    let ncols = rows[0].len();
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::Shape("ragged matrix rows".into()));
    }
    Ok(CMatrix::from_fn(nrows, ncols, |i, j| c64(rows[i][j][0], rows[i][j][1])))
}
