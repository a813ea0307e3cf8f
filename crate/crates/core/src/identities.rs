//! Exact rational versions of the trace and characteristic-polynomial
//! formulas for `M = gamma^0 gamma^mu f_mu`, as bivariate polynomials in
//! `alpha` and `beta`.

use std::collections::BTreeMap;

use num::{BigInt, BigRational, One, Signed, Zero};

/// `C(n, k)` with the convention `C(n, k) = 0` for `k < 0` or `k > n`.
pub fn binomial(n: i64, k: i64) -> BigInt {
    if n < 0 || k < 0 || k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Same convention as [`binomial`], in floating point.
pub fn binomial_f64(n: i64, k: i64) -> f64 {
    if n < 0 || k < 0 || k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc.round()
}

/// Polynomial in `alpha` and `beta` with rational coefficients, keyed by
/// `(power of alpha, power of beta)`. Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BiPoly {
    terms: BTreeMap<(u32, u32), BigRational>,
}

impl BiPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: BigRational) -> Self {
        Self::monomial(c, 0, 0)
    }

    pub fn monomial(c: BigRational, alpha_pow: u32, beta_pow: u32) -> Self {
        let mut p = Self::zero();
        p.add_term(c, alpha_pow, beta_pow);
        p
    }

    pub fn alpha() -> Self {
        Self::monomial(BigRational::one(), 1, 0)
    }

    pub fn beta() -> Self {
        Self::monomial(BigRational::one(), 0, 1)
    }

    fn add_term(&mut self, c: BigRational, a: u32, b: u32) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry((a, b)).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&(a, b));
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, alpha_pow: u32, beta_pow: u32) -> BigRational {
        self.terms
            .get(&(alpha_pow, beta_pow))
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &BigRational)> {
        self.terms.iter()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&(a, b), c) in &other.terms {
            out.add_term(c.clone(), a, b);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-BigRational::one()))
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        let mut out = Self::zero();
        for (&(a, b), c) in &self.terms {
            out.add_term(c * s, a, b);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (&(a1, b1), c1) in &self.terms {
            for (&(a2, b2), c2) in &other.terms {
                out.add_term(c1 * c2, a1 + a2, b1 + b2);
            }
        }
        out
    }

    pub fn eval(&self, alpha: &BigRational, beta: &BigRational) -> BigRational {
        self.terms.iter().fold(BigRational::zero(), |acc, (&(a, b), c)| {
            acc + c * num::pow(alpha.clone(), a as usize) * num::pow(beta.clone(), b as usize)
        })
    }
}

fn rat(n: BigInt) -> BigRational {
    BigRational::from_integer(n)
}

fn int(n: i64) -> BigRational {
    rat(BigInt::from(n))
}

/// Closed form `a_k = (d/2) sum_j (-1)^j k/(k-j) C(k-j, j) (2 alpha)^(k-2j) beta^j`,
/// with `a_0 = d`.
pub fn trace_power_poly(d: u32, k: u32) -> BiPoly {
    if k == 0 {
        return BiPoly::constant(int(d as i64));
    }
    let half_d = BigRational::new(BigInt::from(d), BigInt::from(2));
    let mut p = BiPoly::zero();
    for j in 0..=k / 2 {
        let sign = if j % 2 == 0 { int(1) } else { int(-1) };
        let ratio = BigRational::new(BigInt::from(k), BigInt::from(k - j));
        let binom = rat(binomial((k - j) as i64, j as i64));
        let two_pow = rat(BigInt::from(2).pow(k - 2 * j));
        let c = &half_d * sign * ratio * binom * two_pow;
        p.add_term(c, k - 2 * j, j);
    }
    p
}

/// `a_0 = d`, `a_1 = d alpha`, `a_k = 2 alpha a_{k-1} - beta a_{k-2}`.
pub fn trace_recurrence_polys(d: u32, k_max: u32) -> Vec<BiPoly> {
    let mut out = vec![BiPoly::constant(int(d as i64))];
    if k_max >= 1 {
        out.push(BiPoly::monomial(int(d as i64), 1, 0));
    }
    let two_alpha = BiPoly::monomial(int(2), 1, 0);
    let beta = BiPoly::beta();
    for k in 2..=k_max as usize {
        let next = two_alpha.mul(&out[k - 1]).sub(&beta.mul(&out[k - 2]));
        out.push(next);
    }
    out
}

/// `c_k = (-1)^k sum_i C(d/2, k-i) C(k-i, i) (2 alpha)^(k-2i) beta^i`.
pub fn charpoly_poly(d: u32, k: u32) -> BiPoly {
    let half_d = (d / 2) as i64;
    let sign = if k.is_multiple_of(2) { int(1) } else { int(-1) };
    let mut p = BiPoly::zero();
    for i in 0..=k / 2 {
        let c = &sign
            * rat(binomial(half_d, (k - i) as i64))
            * rat(binomial((k - i) as i64, i as i64))
            * rat(BigInt::from(2).pow(k - 2 * i));
        p.add_term(c, k - 2 * i, i);
    }
    p
}

/// `a_k + a_{k-1} c_1 + ... + a_1 c_{k-1} + k c_k` built from the two closed
/// forms; identically zero when both formulas are right.
pub fn newton_residual_poly(d: u32, k: u32) -> BiPoly {
    let mut r = trace_power_poly(d, k).add(&charpoly_poly(d, k).scale(&int(k as i64)));
    for i in 1..k {
        r = r.add(&trace_power_poly(d, k - i).mul(&charpoly_poly(d, i)));
    }
    r
}

/// Newton identities evaluated at a rational point; true iff every residual
/// is exactly zero for `k = 1..=d`.
pub fn newton_identities_hold_at(d: u32, alpha: &BigRational, beta: &BigRational) -> bool {
    let a: Vec<BigRational> = (0..=d).map(|k| trace_power_poly(d, k).eval(alpha, beta)).collect();
    let c: Vec<BigRational> = (0..=d).map(|k| charpoly_poly(d, k).eval(alpha, beta)).collect();
    (1..=d as usize).all(|k| {
        let mut r = &a[k] + &c[k] * int(k as i64);
        for i in 1..k {
            r += &a[k - i] * &c[i];
        }
        r.is_zero()
    })
}

/// `sum_i C(k, 2i) C(i, j) = k/(k-j) 2^(k-2j-1) C(k-j, j)`, checked after
/// clearing denominators: `2 (k-j) lhs == k 2^(k-2j) C(k-j, j)`.
pub fn combinatorial_identity_holds(k: u32, j: u32) -> bool {
    assert!(k >= 1 && j <= k / 2);
    let lhs: BigInt = (0..=k / 2)
        .map(|i| binomial(k as i64, 2 * i as i64) * binomial(i as i64, j as i64))
        .sum();
    let left = lhs * BigInt::from(2 * (k - j));
    let right = BigInt::from(k) * BigInt::from(2).pow(k - 2 * j) * binomial((k - j) as i64, j as i64);
    left == right
}

/// Every `(k, j)` with `1 <= k <= k_max`, `0 <= j <= k/2` for which the
/// combinatorial relation fails; empty means verified.
pub fn combinatorial_failures(k_max: u32) -> Vec<(u32, u32)> {
    (1..=k_max)
        .flat_map(|k| (0..=k / 2).map(move |j| (k, j)))
        .filter(|&(k, j)| !combinatorial_identity_holds(k, j))
        .collect()
}

/// Exact rational value of a finite float.
pub fn rational_from_f64(x: f64) -> Option<BigRational> {
    BigRational::from_float(x)
}

/// Largest absolute coefficient, handy for reporting residual sizes.
pub fn max_abs_coefficient(p: &BiPoly) -> BigRational {
    p.terms().map(|(_, c)| c.abs()).max().unwrap_or_else(BigRational::zero)
}
