//! The causal matrix `J[D,f] = gamma^0 gamma^mu f_mu` at a point, its
//! chirality-extended form `gamma^0 gamma^mu f_mu - a gamma^0 gamma`, and
//! the closed forms for its power traces and characteristic polynomial.
//!
//! With `alpha = g^{0 mu} f_mu` and
//! `beta = g^00 (g^{mu nu} f_mu f_nu + a^2)` the spectrum is
//! `alpha +- sqrt(alpha^2 - beta)`, each with multiplicity `d/2`, so the
//! matrix is negative semidefinite iff `alpha <= 0` and `beta >= 0`.

use serde::{Deserialize, Serialize};

use crate::clifford::{check_signature, GammaSet, PointGammas};
use crate::error::{Error, Result};
use crate::exact::diagonal_quadratic_form;
use crate::identities::binomial_f64;
use crate::linalg::{c64, hermitian_eigenvalues, CMatrix, C64};

/// Default tolerance for the eigenvalue semidefiniteness test.
pub const NSD_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaBeta {
    pub alpha: f64,
    pub beta: f64,
    /// `a >= 0`; zero is plain causality, one the distance constraint.
    pub steepness: f64,
}

impl AlphaBeta {
    /// `alpha^2 - beta`, the discriminant of the two eigenvalues.
    pub fn discriminant(&self) -> f64 {
        self.alpha * self.alpha - self.beta
    }

    /// Margin `min(-alpha, beta)`; nonnegative iff the criterion holds.
    pub fn margin(&self) -> f64 {
        (-self.alpha).min(self.beta)
    }
}

/// Evaluates `alpha` and `beta` for a diagonal inverse metric. The sign of
/// `beta` is exact even under heavy cancellation.
pub fn alpha_beta(g_inv_diag: &[f64], grad_f: &[f64], steepness: f64) -> Result<AlphaBeta> {
    check_signature(g_inv_diag, grad_f.len())?;
    if grad_f.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric("non-finite gradient component".into()));
    }
    if !(steepness.is_finite() && steepness >= 0.0) {
        return Err(Error::Range(format!(
            "steepness must be finite and >= 0, got {steepness}"
        )));
    }
    let alpha = g_inv_diag[0] * grad_f[0];
    let norm = diagonal_quadratic_form(g_inv_diag, grad_f, steepness * steepness);
    Ok(AlphaBeta {
        alpha,
        beta: g_inv_diag[0] * norm,
        steepness,
    })
}

/// `alpha <= 0 && beta >= 0`, boundary included.
pub fn causal_criterion(ab: &AlphaBeta) -> bool {
    ab.alpha <= 0.0 && ab.beta >= 0.0
}

/// `gamma^0 sum_mu c_mu gamma^mu` for arbitrary complex coefficients.
fn slashed(gammas: &[CMatrix], coeffs: &[C64]) -> CMatrix {
    let d = gammas[0].nrows();
    let mut s = CMatrix::zeros(d, d);
    for (g, c) in gammas.iter().zip(coeffs) {
        if *c != c64(0.0, 0.0) {
            s += g.map(|z| z * c);
        }
    }
    &gammas[0] * s
}

/// Builds `gamma^0 gamma^mu f_mu - a gamma^0 gamma` from curved gammas.
pub fn causal_matrix(pg: &PointGammas, grad_f: &[f64], steepness: f64, chirality: Option<&CMatrix>) -> Result<CMatrix> {
    if grad_f.len() != pg.dimension() {
        return Err(Error::Shape(format!(
            "gradient has {} components, spacetime dimension is {}",
            grad_f.len(),
            pg.dimension()
        )));
    }
    let coeffs: Vec<C64> = grad_f.iter().map(|&v| c64(v, 0.0)).collect();
    let mut m = slashed(&pg.curved, &coeffs);
    if steepness != 0.0 {
        let chi = chirality
            .ok_or_else(|| Error::Parity("steepness > 0 needs the chirality element (even dimension)".into()))?;
        m -= (&pg.curved[0] * chi).scale(steepness);
    }
    Ok(m)
}

/// A flat-metric matrix `gamma^0 gamma^mu f_mu` whose `(alpha, beta)` take
/// the requested values. When `beta > alpha^2` no real gradient exists and
/// the spatial component is taken imaginary; the algebra behind the trace
/// and determinant formulas only uses the anticommutation relations, so the
/// matrix still serves as an independent brute-force oracle.
pub fn realize_alpha_beta(gs: &GammaSet, alpha: f64, beta: f64) -> CMatrix {
    let disc = alpha * alpha - beta;
    let f1 = if disc >= 0.0 {
        c64(disc.sqrt(), 0.0)
    } else {
        c64(0.0, (-disc).sqrt())
    };
    let mut coeffs = vec![c64(0.0, 0.0); gs.dimension()];
    coeffs[0] = c64(-alpha, 0.0);
    coeffs[1] = f1;
    slashed(gs.gammas(), &coeffs)
}

fn check_spinor_dim(d: usize) -> Result<()> {
    if d < 2 || !d.is_power_of_two() {
        return Err(Error::Dimension(format!(
            "spinor dimension must be a power of two >= 2, got {d}"
        )));
    }
    Ok(())
}

/// Closed form for `a_k = tr(M^k)`, `0 <= k <= d`.
pub fn trace_power_formula(d: usize, ab: &AlphaBeta, k: usize) -> Result<f64> {
    check_spinor_dim(d)?;
    if k > d {
        return Err(Error::Range(format!("power k = {k} exceeds spinor dimension {d}")));
    }
    if k == 0 {
        return Ok(d as f64);
    }
    let two_alpha = 2.0 * ab.alpha;
    let sum: f64 = (0..=k / 2)
        .map(|j| {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            sign * (k as f64 / (k - j) as f64)
                * binomial_f64((k - j) as i64, j as i64)
                * two_alpha.powi((k - 2 * j) as i32)
                * ab.beta.powi(j as i32)
        })
        .sum();
    Ok(d as f64 / 2.0 * sum)
}

/// `a_k` via `a_k = 2 alpha a_{k-1} - beta a_{k-2}`; returns `a_0..=a_kmax`.
pub fn trace_power_recurrence(d: usize, ab: &AlphaBeta, k_max: usize) -> Result<Vec<f64>> {
    check_spinor_dim(d)?;
    let mut a = vec![d as f64, d as f64 * ab.alpha];
    for k in 2..=k_max {
        a.push(2.0 * ab.alpha * a[k - 1] - ab.beta * a[k - 2]);
    }
    a.truncate(k_max + 1);
    Ok(a)
}

/// Coefficients of `det(lambda - M) = lambda^d + c_1 lambda^{d-1} + ... + c_d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharPoly {
    pub d: usize,
    /// `c_0 ..= c_d`, `c_0 = 1`.
    pub coeffs: Vec<f64>,
}

impl CharPoly {
    /// Vieta route: for a real-rooted polynomial, all roots are `<= 0`
    /// iff every `c_k >= 0`.
    pub fn all_coefficients_nonnegative(&self) -> bool {
        self.coeffs.iter().all(|&c| c >= 0.0)
    }
}

pub fn charpoly_formula(d: usize, ab: &AlphaBeta) -> Result<CharPoly> {
    check_spinor_dim(d)?;
    let half = (d / 2) as i64;
    let two_alpha = 2.0 * ab.alpha;
    let coeffs = (0..=d)
        .map(|k| {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let s: f64 = (0..=k / 2)
                .map(|i| {
                    binomial_f64(half, (k - i) as i64)
                        * binomial_f64((k - i) as i64, i as i64)
                        * two_alpha.powi((k - 2 * i) as i32)
                        * ab.beta.powi(i as i32)
                })
                .sum();
            sign * s
        })
        .collect();
    Ok(CharPoly { d, coeffs })
}

/// Relative tolerance used by [`newton_check`].
pub const NEWTON_REL_TOL: f64 = 1e-10;

/// Checks `a_k + a_{k-1} c_1 + ... + a_1 c_{k-1} + k c_k = 0` for
/// `k = 1..=d`, each to relative `1e-10` of the summed term magnitudes.
/// `traces` holds `a_1 ..= a_d`.
pub fn newton_check(traces: &[f64], coeffs: &CharPoly) -> Result<bool> {
    let d = coeffs.d;
    if traces.len() != d || coeffs.coeffs.len() != d + 1 {
        return Err(Error::Shape(format!(
            "need {d} traces and {} coefficients, got {} and {}",
            d + 1,
            traces.len(),
            coeffs.coeffs.len()
        )));
    }
    let a = |k: usize| traces[k - 1];
    let c = &coeffs.coeffs;
    for k in 1..=d {
        let mut residual = a(k) + k as f64 * c[k];
        let mut scale = a(k).abs() + (k as f64 * c[k]).abs();
        for i in 1..k {
            let t = a(k - i) * c[i];
            residual += t;
            scale += t.abs();
        }
        if residual.abs() > NEWTON_REL_TOL * scale {
            return Ok(false);
        }
    }
    Ok(true)
}

/// True iff the largest eigenvalue of the Hermitian part of `m` is at most
/// `tol * (1 + max |lambda|)`. For the Hermitian causal matrices this is the
/// ordinary eigenvalue test; in general it decides `<phi, M phi> <= 0`.
pub fn is_negative_semidefinite(m: &CMatrix, tol: f64) -> Result<bool> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::Range(format!("tolerance must be finite and > 0, got {tol}")));
    }
    let ev = hermitian_eigenvalues(m)?;
    Ok(nsd_from_eigenvalues(&ev, tol))
}

pub(crate) fn nsd_from_eigenvalues(ev: &[f64], tol: f64) -> bool {
    let scale = ev.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let top = ev.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    ev.is_empty() || top <= tol * (1.0 + scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::{build_flat_gammas, curved_gammas};
    use crate::linalg::{general_eigenvalues, max_abs, monic_from_roots, trace_of_power};

    fn mink(n: usize) -> Vec<f64> {
        let mut g = vec![1.0; n];
        g[0] = -1.0;
        g
    }

    #[test]
    fn alpha_beta_examples() {
        let ab = alpha_beta(&mink(2), &[1.0, 0.0], 0.0).unwrap();
        assert_eq!((ab.alpha, ab.beta), (-1.0, 1.0));
        let ab = alpha_beta(&mink(2), &[0.0, 1.0], 0.0).unwrap();
        assert_eq!((ab.alpha, ab.beta), (0.0, -1.0));
        let ab = alpha_beta(&mink(2), &[2.0, 0.0], 1.0).unwrap();
        assert_eq!((ab.alpha, ab.beta), (-2.0, 3.0));
    }

    #[test]
    fn alpha_beta_errors() {
        assert!(matches!(
            alpha_beta(&[1.0, 1.0], &[1.0, 0.0], 0.0),
            Err(Error::Signature(_))
        ));
        assert!(matches!(alpha_beta(&mink(2), &[1.0, 0.0], -1.0), Err(Error::Range(_))));
    }

    #[test]
    fn alpha_is_g00_f0_for_diagonal_metric() {
        let g = [-3.0, 2.0, 0.5];
        let ab = alpha_beta(&g, &[0.7, -1.1, 4.0], 0.0).unwrap();
        assert_eq!(ab.alpha, -3.0 * 0.7);
    }

    #[test]
    fn criterion_examples() {
        let mk = |alpha, beta| AlphaBeta {
            alpha,
            beta,
            steepness: 0.0,
        };
        assert!(causal_criterion(&mk(-1.0, 1.0)));
        assert!(!causal_criterion(&mk(0.0, -1.0)));
        assert!(causal_criterion(&mk(0.0, 0.0)));
    }

    #[test]
    fn zero_gradient_gives_zero_matrix() {
        let gs = build_flat_gammas(4).unwrap();
        let pg = curved_gammas(&gs, &mink(4)).unwrap();
        let m = causal_matrix(&pg, &[0.0; 4], 0.0, None).unwrap();
        assert_eq!(max_abs(&m), 0.0);
        assert!(is_negative_semidefinite(&m, NSD_TOL).unwrap());
    }

    #[test]
    fn trace_is_two_alpha_in_two_dims() {
        let gs = build_flat_gammas(2).unwrap();
        let pg = curved_gammas(&gs, &mink(2)).unwrap();
        let m = causal_matrix(&pg, &[1.0, 0.0], 0.0, None).unwrap();
        assert!((m.trace() - c64(-2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn steepness_without_chirality_is_parity_error() {
        let gs = build_flat_gammas(3).unwrap();
        let pg = curved_gammas(&gs, &mink(3)).unwrap();
        assert!(matches!(
            causal_matrix(&pg, &[1.0, 0.0, 0.0], 1.0, None),
            Err(Error::Parity(_))
        ));
    }

    #[test]
    fn four_dim_spectrum_is_two_double_roots() {
        let gs = build_flat_gammas(4).unwrap();
        let pg = curved_gammas(&gs, &mink(4)).unwrap();
        let grad = [0.8, -0.3, 0.25, 1.1];
        let m = causal_matrix(&pg, &grad, 0.0, None).unwrap();
        let ab = alpha_beta(&mink(4), &grad, 0.0).unwrap();
        let r = ab.discriminant().sqrt();
        let mut want = vec![ab.alpha - r, ab.alpha - r, ab.alpha + r, ab.alpha + r];
        want.sort_by(f64::total_cmp);
        let got = hermitian_eigenvalues(&m).unwrap();
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() < 1e-12);
        }
    }

    #[test]
    fn trace_formula_d2() {
        let ab = AlphaBeta {
            alpha: 0.7,
            beta: -1.3,
            steepness: 0.0,
        };
        assert!((trace_power_formula(2, &ab, 1).unwrap() - 2.0 * 0.7).abs() < 1e-15);
        let want = 4.0 * 0.49 + 2.0 * 1.3;
        assert!((trace_power_formula(2, &ab, 2).unwrap() - want).abs() < 1e-14);
    }

    #[test]
    fn trace_formula_d8_k5_against_matrix_power() {
        let ab = AlphaBeta {
            alpha: -0.3,
            beta: 0.7,
            steepness: 0.0,
        };
        let gs = build_flat_gammas(6).unwrap();
        let m = realize_alpha_beta(&gs, ab.alpha, ab.beta);
        let brute = trace_of_power(&m, 5);
        assert!(brute.im.abs() < 1e-12);
        let formula = trace_power_formula(8, &ab, 5).unwrap();
        assert!((brute.re - formula).abs() <= 1e-12 * (1.0 + formula.abs()));
    }

    #[test]
    fn trace_formula_range_and_dimension_errors() {
        let ab = AlphaBeta {
            alpha: 0.0,
            beta: 0.0,
            steepness: 0.0,
        };
        assert!(matches!(trace_power_formula(4, &ab, 5), Err(Error::Range(_))));
        assert!(matches!(trace_power_formula(6, &ab, 1), Err(Error::Dimension(_))));
    }

    #[test]
    fn recurrence_agrees_with_closed_form() {
        let ab = AlphaBeta {
            alpha: -1.25,
            beta: 0.375,
            steepness: 0.0,
        };
        for d in [2usize, 4, 8] {
            let rec = trace_power_recurrence(d, &ab, d).unwrap();
            for k in 0..=d {
                let closed = trace_power_formula(d, &ab, k).unwrap();
                assert!((closed - rec[k]).abs() <= 1e-12 * (1.0 + closed.abs()), "d={d} k={k}");
            }
        }
    }

    #[test]
    fn charpoly_specialisations_numeric() {
        let ab = AlphaBeta {
            alpha: -0.6,
            beta: 0.2,
            steepness: 0.0,
        };
        for d in [2usize, 4, 8] {
            let cp = charpoly_formula(d, &ab).unwrap();
            let df = d as f64;
            assert_eq!(cp.coeffs[0], 1.0);
            assert!((cp.coeffs[1] + df * ab.alpha).abs() < 1e-14);
            let want = -df * ab.alpha * ab.beta.powi((d / 2 - 1) as i32);
            assert!((cp.coeffs[d - 1] - want).abs() < 1e-12);
        }
        let zero_alpha = AlphaBeta {
            alpha: 0.0,
            beta: 0.9,
            steepness: 0.0,
        };
        let cp = charpoly_formula(8, &zero_alpha).unwrap();
        assert!((cp.coeffs[2] - 4.0 * 0.9).abs() < 1e-14);
    }

    #[test]
    fn charpoly_matches_numerical_eigenvalues() {
        let gs = build_flat_gammas(4).unwrap();
        for &(alpha, beta) in &[(-0.5, 0.1), (0.3, -2.0), (1.0, 3.0)] {
            let m = realize_alpha_beta(&gs, alpha, beta);
            let roots = general_eigenvalues(&m).unwrap();
            let from_roots = monic_from_roots(&roots);
            let cp = charpoly_formula(
                4,
                &AlphaBeta {
                    alpha,
                    beta,
                    steepness: 0.0,
                },
            )
            .unwrap();
            for (c, r) in cp.coeffs.iter().zip(&from_roots) {
                assert!((r.re - c).abs() < 1e-9 * (1.0 + c.abs()) && r.im.abs() < 1e-9);
            }
        }
    }

    #[test]
    fn newton_check_examples() {
        let ab = AlphaBeta {
            alpha: 0.45,
            beta: -0.8,
            steepness: 0.0,
        };
        let d = 4;
        let traces: Vec<f64> = (1..=d).map(|k| trace_power_formula(d, &ab, k).unwrap()).collect();
        let mut cp = charpoly_formula(d, &ab).unwrap();
        assert!(newton_check(&traces, &cp).unwrap());
        cp.coeffs[2] += 1e-3;
        assert!(!newton_check(&traces, &cp).unwrap());
        assert!(matches!(newton_check(&traces[..2], &cp), Err(Error::Shape(_))));
    }

    #[test]
    fn newton_first_identity_by_hand() {
        // k = 1: d alpha + 1 * (-d alpha) = 0
        let cp = CharPoly {
            d: 1,
            coeffs: vec![1.0, -2.0 * 0.3],
        };
        assert!(newton_check(&[2.0 * 0.3], &cp).unwrap());
    }

    #[test]
    fn nsd_examples() {
        let gs = build_flat_gammas(2).unwrap();
        let neg = realize_alpha_beta(&gs, -1.0, 1.0);
        assert!(is_negative_semidefinite(&neg, NSD_TOL).unwrap());
        let pos = realize_alpha_beta(&gs, 1.0, 1.0);
        assert!(!is_negative_semidefinite(&pos, NSD_TOL).unwrap());
        let bad = CMatrix::from_element(2, 2, c64(f64::NAN, 0.0));
        assert!(matches!(
            is_negative_semidefinite(&bad, NSD_TOL),
            Err(Error::Numeric(_))
        ));
    }

    #[test]
    fn boundary_perturbation_flips_verdict() {
        // Null gradient (beta = 0) is causal; tilting it by 1e-6 either way
        // moves beta across zero and the eigenvalue verdict follows.
        let gs = build_flat_gammas(4).unwrap();
        let g = mink(4);
        let pg = curved_gammas(&gs, &g).unwrap();
        for (f0, expect) in [(1.0, true), (1.0 + 1e-6, true), (1.0 - 1e-6, false)] {
            let grad = [f0, 1.0, 0.0, 0.0];
            let ab = alpha_beta(&g, &grad, 0.0).unwrap();
            let m = causal_matrix(&pg, &grad, 0.0, None).unwrap();
            assert_eq!(causal_criterion(&ab), expect);
            assert_eq!(is_negative_semidefinite(&m, NSD_TOL).unwrap(), expect);
        }
    }

    #[test]
    fn vieta_cross_check() {
        let ab = AlphaBeta {
            alpha: -0.9,
            beta: 0.5,
            steepness: 0.0,
        };
        assert!(charpoly_formula(8, &ab).unwrap().all_coefficients_nonnegative());
        let ab = AlphaBeta {
            alpha: -0.9,
            beta: -0.5,
            steepness: 0.0,
        };
        assert!(!charpoly_formula(8, &ab).unwrap().all_coefficients_nonnegative());
    }

    #[test]
    fn flipping_time_orientation_flips_verdict() {
        // J[D,f] = J (-i c(df)); reversing the time orientation replaces J by
        // -J while the Dirac operator stays put.
        let gs = build_flat_gammas(4).unwrap();
        let g = mink(4);
        let pg = curved_gammas(&gs, &g).unwrap();
        let grad = [1.5, 0.2, -0.4, 0.9];
        let m = causal_matrix(&pg, &grad, 0.0, None).unwrap();
        let mut cdf = CMatrix::zeros(4, 4);
        for (gm, f) in pg.curved.iter().zip(&grad) {
            cdf += gm.scale(*f);
        }
        let commutator = cdf.map(|z| z * c64(0.0, -1.0));
        let via_j = &pg.j_op * &commutator;
        assert!(crate::linalg::max_abs_diff(&via_j, &m) < 1e-12);
        assert!(is_negative_semidefinite(&m, NSD_TOL).unwrap());
        let flipped = pg.j_op.scale(-1.0) * &commutator;
        assert!(!is_negative_semidefinite(&flipped, NSD_TOL).unwrap());
        assert!(is_negative_semidefinite(&flipped.scale(-1.0), NSD_TOL).unwrap());
    }
}
