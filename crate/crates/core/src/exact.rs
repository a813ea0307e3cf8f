//! Sign-exact evaluation of diagonal quadratic forms.
//!
//! Steep-function gradients can have components near 1e17 whose squares
//! cancel to O(1); a plain f64 sum gets the sign of the result wrong. The
//! float result is kept whenever a forward error bound certifies its sign,
//! otherwise the sum is recomputed exactly over dyadic rationals.

use num::bigint::Sign;
use num::{BigInt, Float, Signed, ToPrimitive, Zero};

/// `sum_i weights[i] * values[i]^2 + extra`, with the sign of the result
/// always correct and the magnitude accurate to a few ulps.
pub fn diagonal_quadratic_form(weights: &[f64], values: &[f64], extra: f64) -> f64 {
    debug_assert_eq!(weights.len(), values.len());
    let mut sum = extra;
    let mut abs_sum = extra.abs();
    for (w, v) in weights.iter().zip(values) {
        let t = w * v * v;
        sum += t;
        abs_sum += t.abs();
    }
    let terms = weights.len() + 1;
    // Each product carries two roundings, each addition one.
    let bound = (3 * terms + 2) as f64 * f64::EPSILON * abs_sum;
    if sum.is_finite() && sum.abs() > bound {
        return sum;
    }
    exact_form(weights, values, extra)
}

fn decode(x: f64) -> (BigInt, i32) {
    let (mantissa, exponent, sign) = Float::integer_decode(x);
    let m = BigInt::from(mantissa);
    (if sign < 0 { -m } else { m }, exponent as i32)
}

fn exact_form(weights: &[f64], values: &[f64], extra: f64) -> f64 {
    let mut terms: Vec<(BigInt, i32)> = Vec::with_capacity(weights.len() + 1);
    for (w, v) in weights.iter().zip(values) {
        let (mw, ew) = decode(*w);
        let (mv, ev) = decode(*v);
        terms.push((mw * &mv * &mv, ew + 2 * ev));
    }
    terms.push(decode(extra));
    let min_exp = terms.iter().filter(|t| !t.0.is_zero()).map(|t| t.1).min();
    let Some(min_exp) = min_exp else {
        return 0.0;
    };
    let total: BigInt = terms
        .into_iter()
        .filter(|t| !t.0.is_zero())
        .map(|(m, e)| m << ((e - min_exp) as usize))
        .sum();
    dyadic_to_f64(&total, min_exp)
}

/// Approximates `m * 2^e`, preserving the sign exactly.
fn dyadic_to_f64(m: &BigInt, e: i32) -> f64 {
    if m.is_zero() {
        return 0.0;
    }
    let negative = m.sign() == Sign::Minus;
    let mut mag = m.abs();
    let mut exp = e as i64;
    let bits = mag.bits() as i64;
    if bits > 62 {
        let shift = bits - 62;
        mag >>= shift as usize;
        exp += shift;
    }
    let mut value = mag.to_f64().unwrap_or(f64::MAX);
    // Scale in bounded steps so intermediate powers stay finite.
    while exp > 0 {
        let step = exp.min(1000);
        value *= 2f64.powi(step as i32);
        exp -= step;
    }
    while exp < 0 {
        let step = (-exp).min(1000);
        value *= 2f64.powi(-(step as i32));
        exp += step;
    }
    if value == 0.0 {
        // Underflow: keep the sign meaningful.
        value = f64::MIN_POSITIVE;
    }
    if negative {
        -value
    } else {
        value
    }
}
