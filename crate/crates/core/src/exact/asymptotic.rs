//! Gaussian asymptotics and upper bounds for `e_N(1^n) = C(n, N)`.

use std::f64::consts::PI;

use super::binomial::{binomial_row, elem_sym, ln_biguint};
use super::ExactError;

fn check_p(p: f64) -> Result<(), ExactError> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(ExactError::Domain(format!("p = {p} is not in (0, 1)")))
    }
}

/// Log of the leading-order approximation to `C(n, N)` with `x = (N - pn)/√n`:
///
/// `-½ln(2π) - x²/(2p(1-p)) + N ln((1-p)/p) - n ln(1-p) - ½ ln n - ½ ln(p(1-p))`.
pub fn ln_elem_sym_asymptotic(n: u64, big_n: u64, p: f64) -> Result<f64, ExactError> {
    check_p(p)?;
    let (nf, nn) = (n as f64, big_n as f64);
    let x = (nn - p * nf) / nf.sqrt();
    let q = 1.0 - p;
    Ok(-0.5 * (2.0 * PI).ln() - x * x / (2.0 * p * q) + nn * (q / p).ln()
        - nf * q.ln()
        - 0.5 * nf.ln()
        - 0.5 * (p * q).ln())
}

/// The approximation itself; overflows to `inf` for large `n`, use the log form there.
pub fn elem_sym_asymptotic(n: u64, big_n: u64, p: f64) -> Result<f64, ExactError> {
    ln_elem_sym_asymptotic(n, big_n, p).map(f64::exp)
}

/// `asymptotic / exact - 1`, computed in log space.
pub fn asymptotic_relative_error(n: u64, big_n: u64, p: f64) -> Result<f64, ExactError> {
    if big_n > n {
        return Err(ExactError::Domain(format!("N = {big_n} exceeds n = {n}")));
    }
    let exact = ln_biguint(&elem_sym(big_n as i64, n as i64));
    Ok((ln_elem_sym_asymptotic(n, big_n, p)? - exact).exp_m1())
}

/// Log of the bound's right side without the constant `C`:
/// `N ln((1-p)/p) - n ln(1-p) - ½ ln n - c (N - pn)²/n`.
fn ln_bound_shape(n: u64, big_n: i64, p: f64, c: f64) -> f64 {
    let (nf, nn) = (n as f64, big_n as f64);
    let q = 1.0 - p;
    nn * (q / p).ln() - nf * q.ln() - 0.5 * nf.ln() - c * (nn - p * nf).powi(2) / nf
}

/// Whether `e_N(1^n) <= C exp(N ln((1-p)/p) - n ln(1-p) - ½ ln n) exp(-c(N-pn)²/n)`.
///
/// Vacuously true for `N` outside `[0, n]`.
pub fn elem_sym_upper_bound(n: u64, big_n: i64, p: f64, big_c: f64, c: f64) -> bool {
    if big_n < 0 || big_n as u64 > n {
        return true;
    }
    let lhs = ln_biguint(&elem_sym(big_n, n as i64));
    lhs <= big_c.ln() + ln_bound_shape(n, big_n, p, c)
}

/// `max_N e_N(1^n) / bound_shape(n, N)` over `N in [0, n]`.
pub fn bound_ratio_max(n: u64, p: f64, c: f64) -> f64 {
    binomial_row(n)
        .iter()
        .enumerate()
        .map(|(nn, e)| ln_biguint(e) - ln_bound_shape(n, nn as i64, p, c))
        .fold(f64::NEG_INFINITY, f64::max)
        .exp()
}

/// Multiplicative slack applied to the constant found at the calibration size.
pub const BOUND_CALIBRATION_SLACK: f64 = 1.05;

/// Constants `(C, c)` for the upper bound, fitted at `n = n_cal`.
///
/// `c` is half the Gaussian rate `1/(2p(1-p))`; `C` is the worst ratio at `n_cal`
/// times [`BOUND_CALIBRATION_SLACK`].
pub fn calibrate_upper_bound(p: f64, n_cal: u64) -> Result<(f64, f64), ExactError> {
    check_p(p)?;
    let c = 1.0 / (4.0 * p * (1.0 - p));
    Ok((BOUND_CALIBRATION_SLACK * bound_ratio_max(n_cal, p, c), c))
}

/// Checks the bound for every `N in [0, n]`, returning the first failing `N`.
pub fn upper_bound_holds_for_all(n: u64, p: f64, big_c: f64, c: f64) -> Result<(), i64> {
    let row = binomial_row(n);
    let ln_c = big_c.ln();
    for (nn, e) in row.iter().enumerate() {
        if ln_biguint(e) > ln_c + ln_bound_shape(n, nn as i64, p, c) {
            return Err(nn as i64);
        }
    }
    Ok(())
}
