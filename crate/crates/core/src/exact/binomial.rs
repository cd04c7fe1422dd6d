//! Elementary symmetric polynomials at the principal specialization `1^n`.

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};

/// `e_r(1^n)`: the binomial coefficient `C(n, r)`, zero outside `0 <= r <= n`.
pub fn elem_sym(r: i64, n: i64) -> BigUint {
    if n < 0 || r < 0 || r > n {
        return BigUint::zero();
    }
    let r = r.min(n - r) as u64;
    let n = n as u64;
    let mut acc = BigUint::one();
    for i in 0..r {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Full row `C(n, 0..=n)`.
pub fn binomial_row(n: u64) -> Vec<BigUint> {
    let mut row = Vec::with_capacity(n as usize + 1);
    let mut cur = BigUint::one();
    row.push(cur.clone());
    for i in 0..n {
        cur = cur * (n - i) / (i + 1);
        row.push(cur.clone());
    }
    row
}

/// Natural log of a positive big integer, accurate to f64 precision.
pub fn ln_biguint(x: &BigUint) -> f64 {
    assert!(!x.is_zero(), "log of zero");
    let bits = x.bits();
    if bits <= 1000 {
        x.to_f64().unwrap().ln()
    } else {
        let shift = bits - 64;
        let top = (x >> shift).to_f64().unwrap();
        top.ln() + shift as f64 * std::f64::consts::LN_2
    }
}

/// Memoized rows of binomial coefficients, shared by the determinant evaluations.
#[derive(Debug, Default, Clone)]
pub struct BinomialCache {
    rows: HashMap<u64, Vec<BigInt>>,
}

impl BinomialCache {
    pub fn new() -> Self {
        Self::default()
    }

    /// `e_r(1^n)` as a signed integer, zero outside the support.
    pub fn get(&mut self, r: i64, n: i64) -> BigInt {
        if n < 0 || r < 0 || r > n {
            return BigInt::zero();
        }
        let row = self.rows.entry(n as u64).or_insert_with(|| {
            binomial_row(n as u64).into_iter().map(BigInt::from).collect()
        });
        row[r as usize].clone()
    }
}
