//! Randomized cross-checks of the trace and characteristic-polynomial
//! formulas against brute-force matrices, plus the exact identities.

use num::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::clifford::build_flat_gammas;
use crate::error::{Error, Result};
use crate::identities::{
    binomial_f64, combinatorial_failures, newton_identities_hold_at, rational_from_f64, trace_power_poly,
};
use crate::linalg::{general_eigenvalues, monic_from_roots, trace_of_power};
use crate::spectral_matrix::{charpoly_formula, realize_alpha_beta, trace_power_formula, AlphaBeta};

pub const TRACE_REL_TOL: f64 = 1e-9;
pub const CHARPOLY_REL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub d: usize,
    pub trials: usize,
    pub seed: u64,
    /// Largest `|tr(M^k) - a_k| / (d rho^k)`, `rho` the spectral radius.
    pub trace_max_rel_error: f64,
    /// Largest `|c_k - c_k(eig)| / (C(d, k) rho^k)`.
    pub charpoly_max_rel_error: f64,
    pub recurrence_exact: bool,
    pub newton_exact: bool,
    pub combinatorial_failures: usize,
}

impl IdentityReport {
    pub fn traces_pass(&self) -> bool {
        self.trace_max_rel_error <= TRACE_REL_TOL && self.recurrence_exact
    }

    pub fn charpoly_pass(&self) -> bool {
        self.charpoly_max_rel_error <= CHARPOLY_REL_TOL
    }

    pub fn newton_pass(&self) -> bool {
        self.newton_exact
    }

    pub fn combinatorial_pass(&self) -> bool {
        self.combinatorial_failures == 0
    }
}

fn spectral_radius(ab: &AlphaBeta) -> f64 {
    let disc = ab.discriminant();
    if disc >= 0.0 {
        ab.alpha.abs() + disc.sqrt()
    } else {
        ab.beta.sqrt()
    }
}

fn exact_recurrence_matches(d: u32, alpha: &BigRational, beta: &BigRational) -> bool {
    let two = BigRational::from_integer(2.into());
    let mut prev = BigRational::from_integer(d.into());
    let mut cur = alpha * BigRational::from_integer(d.into());
    let closed: Vec<BigRational> = (0..=d).map(|k| trace_power_poly(d, k).eval(alpha, beta)).collect();
    if closed[0] != prev || closed[1] != cur {
        return false;
    }
    for c in closed.iter().skip(2) {
        let next = &two * alpha * &cur - beta * &prev;
        if &next != c {
            return false;
        }
        prev = cur;
        cur = next;
    }
    true
}

/// Runs `trials` random `(alpha, beta)` with `alpha` in `[-2, 2]` and `beta`
/// in `[-2, 4]`, so both real and complex spectra occur. Exact checks use the
/// rational values of the sampled floats. Exact work is only done for
/// `d <= 8`; larger `d` report exact checks as vacuously true.
pub fn verify_identities(d: usize, trials: usize, seed: u64) -> Result<IdentityReport> {
    if d < 2 || !d.is_power_of_two() || d > 64 {
        return Err(Error::Dimension(format!(
            "d must be a power of two in [2, 64], got {d}"
        )));
    }
    if trials == 0 {
        return Err(Error::Config("trials must be >= 1".into()));
    }
    let n = 2 * d.trailing_zeros() as usize;
    let gs = build_flat_gammas(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = IdentityReport {
        d,
        trials,
        seed,
        trace_max_rel_error: 0.0,
        charpoly_max_rel_error: 0.0,
        recurrence_exact: true,
        newton_exact: true,
        combinatorial_failures: combinatorial_failures(16).len(),
    };
    for _ in 0..trials {
        let ab = AlphaBeta {
            alpha: rng.gen_range(-2.0..2.0),
            beta: rng.gen_range(-2.0..4.0),
            steepness: 0.0,
        };
        let m = realize_alpha_beta(&gs, ab.alpha, ab.beta);
        let rho = spectral_radius(&ab).max(1e-300);
        for k in 1..=d {
            let brute = trace_of_power(&m, k);
            let formula = trace_power_formula(d, &ab, k)?;
            let err = (brute.re - formula).hypot(brute.im) / (d as f64 * rho.powi(k as i32));
            report.trace_max_rel_error = report.trace_max_rel_error.max(err);
        }
        let roots = general_eigenvalues(&m)?;
        let numeric = monic_from_roots(&roots);
        let formula = charpoly_formula(d, &ab)?;
        for k in 1..=d {
            let scale = binomial_f64(d as i64, k as i64) * rho.powi(k as i32);
            let err = (numeric[k].re - formula.coeffs[k]).hypot(numeric[k].im) / scale;
            report.charpoly_max_rel_error = report.charpoly_max_rel_error.max(err);
        }
        if d <= 8 {
            let a = rational_from_f64(ab.alpha).expect("finite");
            let b = rational_from_f64(ab.beta).expect("finite");
            report.recurrence_exact &= exact_recurrence_matches(d as u32, &a, &b);
            report.newton_exact &= newton_identities_hold_at(d as u32, &a, &b);
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_pass_for_small_d() {
        for d in [2, 4, 8] {
            let r = verify_identities(d, 20, 3).unwrap();
            assert!(
                r.traces_pass() && r.charpoly_pass() && r.newton_pass() && r.combinatorial_pass(),
                "{r:?}"
            );
        }
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(matches!(verify_identities(6, 1, 0), Err(Error::Dimension(_))));
        assert!(matches!(verify_identities(4, 0, 0), Err(Error::Config(_))));
    }

    #[test]
    fn deterministic() {
        assert_eq!(
            verify_identities(4, 10, 9).unwrap(),
            verify_identities(4, 10, 9).unwrap()
        );
    }
}
