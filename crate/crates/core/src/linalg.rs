//! Floating-point determinants in log space, and Gauss–Legendre rules.

/// Sign and natural log of the absolute value of a real number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedLog {
    pub sign: f64,
    pub ln_abs: f64,
}

impl SignedLog {
    pub const ZERO: SignedLog = SignedLog {
        sign: 0.0,
        ln_abs: f64::NEG_INFINITY,
    };

    pub fn from_f64(v: f64) -> Self {
        if v == 0.0 {
            Self::ZERO
        } else {
            Self {
                sign: v.signum(),
                ln_abs: v.abs().ln(),
            }
        }
    }

    pub fn to_f64(self) -> f64 {
        if self.sign == 0.0 {
            0.0
        } else {
            self.sign * self.ln_abs.exp()
        }
    }

    pub fn mul(self, other: Self) -> Self {
        if self.sign == 0.0 || other.sign == 0.0 {
            Self::ZERO
        } else {
            Self {
                sign: self.sign * other.sign,
                ln_abs: self.ln_abs + other.ln_abs,
            }
        }
    }
}

/// Determinant of a square matrix whose entries are given in signed-log form.
///
/// Every row is divided by its largest magnitude before partial-pivot elimination, and the
/// scales are added back in log space, so entries spanning hundreds of orders of magnitude
/// do not overflow.
pub fn log_det(entries: &[Vec<SignedLog>]) -> SignedLog {
    let n = entries.len();
    if n == 0 {
        return SignedLog { sign: 1.0, ln_abs: 0.0 };
    }
    let mut ln_scale = 0.0;
    let mut a: Vec<Vec<f64>> = Vec::with_capacity(n);
    for row in entries {
        debug_assert_eq!(row.len(), n);
        let m = row
            .iter()
            .filter(|e| e.sign != 0.0)
            .map(|e| e.ln_abs)
            .fold(f64::NEG_INFINITY, f64::max);
        if m == f64::NEG_INFINITY {
            return SignedLog::ZERO;
        }
        ln_scale += m;
        a.push(
            row.iter()
                .map(|e| if e.sign == 0.0 { 0.0 } else { e.sign * (e.ln_abs - m).exp() })
                .collect(),
        );
    }
    let mut sign = 1.0;
    let mut ln_abs = ln_scale;
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        if a[piv][col] == 0.0 {
            return SignedLog::ZERO;
        }
        if piv != col {
            a.swap(piv, col);
            sign = -sign;
        }
        let p = a[col][col];
        sign *= p.signum();
        ln_abs += p.abs().ln();
        for r in col + 1..n {
            let f = a[r][col] / p;
            if f != 0.0 {
                for c in col..n {
                    a[r][c] -= f * a[col][c];
                }
            }
        }
    }
    SignedLog { sign, ln_abs }
}

/// Plain determinant of a small real matrix.
pub fn det(m: &[Vec<f64>]) -> f64 {
    let e: Vec<Vec<SignedLog>> = m
        .iter()
        .map(|r| r.iter().map(|&v| SignedLog::from_f64(v)).collect())
        .collect();
    log_det(&e).to_f64()
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for j in 2..=n {
                let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pn1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pn1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Composite Gauss–Legendre rule on `[lo, hi]` with `panels` equal panels.
pub fn composite_rule(lo: f64, hi: f64, panels: usize, order: usize) -> (Vec<f64>, Vec<f64>) {
    let (gx, gw) = gauss_legendre(order);
    let h = (hi - lo) / panels as f64;
    let mut xs = Vec::with_capacity(panels * order);
    let mut ws = Vec::with_capacity(panels * order);
    for p in 0..panels {
        let mid = lo + (p as f64 + 0.5) * h;
        for (x, w) in gx.iter().zip(&gw) {
            xs.push(mid + 0.5 * h * x);
            ws.push(0.5 * h * w);
        }
    }
    (xs, ws)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_determinants() {
        assert!((det(&[vec![2.0, 1.0], vec![1.0, 3.0]]) - 5.0).abs() < 1e-12);
        assert!((det(&[vec![0.0, 1.0], vec![1.0, 0.0]]) + 1.0).abs() < 1e-12);
        assert_eq!(det(&[vec![1.0, 2.0], vec![2.0, 4.0]]), 0.0);
        let m = vec![
            vec![1.0, 2.0, 3.0],
            vec![0.0, 4.0, 5.0],
            vec![1.0, 0.0, 6.0],
        ];
        assert!((det(&m) - 22.0).abs() < 1e-10);
    }

    #[test]
    fn huge_entries() {
        // diag(e^800, e^-700) has log-det 100
        let e = vec![
            vec![SignedLog { sign: 1.0, ln_abs: 800.0 }, SignedLog::ZERO],
            vec![SignedLog::ZERO, SignedLog { sign: -1.0, ln_abs: -700.0 }],
        ];
        let d = log_det(&e);
        assert_eq!(d.sign, -1.0);
        assert!((d.ln_abs - 100.0).abs() < 1e-9);
    }

    #[test]
    fn gauss_legendre_exactness() {
        for n in 1..12 {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13);
            // exact for degree 2n-1
            let deg = 2 * n - 2;
            let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
            assert!((q - 2.0 / (deg as f64 + 1.0)).abs() < 1e-12, "n={n}");
        }
        let (x, w) = composite_rule(0.0, std::f64::consts::PI, 4, 8);
        let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.sin()).sum();
        assert!((q - 2.0).abs() < 1e-12);
    }
}
