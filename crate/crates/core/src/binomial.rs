//! Exact binomial coefficients and big-integer to float conversions.

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, ToPrimitive, Zero};

/// Pascal's triangle, grown row by row on demand and kept for reuse.
#[derive(Debug, Clone)]
pub struct PascalTable {
    rows: Vec<Vec<BigUint>>,
}

impl Default for PascalTable {
    fn default() -> Self {
        Self::new()
    }
}

impl PascalTable {
    pub fn new() -> Self {
        PascalTable {
            rows: vec![vec![BigUint::one()]],
        }
    }

    pub fn with_rows(n: usize) -> Self {
        let mut t = Self::new();
        t.ensure(n);
        t
    }

    fn ensure(&mut self, n: usize) {
        while self.rows.len() <= n {
            let prev = self.rows.last().expect("row 0 always present");
            let mut next = Vec::with_capacity(prev.len() + 1);
            next.push(BigUint::one());
            for w in prev.windows(2) {
                next.push(&w[0] + &w[1]);
            }
            next.push(BigUint::one());
            self.rows.push(next);
        }
    }

    /// C(n, k), zero when k > n.
    pub fn get(&mut self, n: usize, k: usize) -> BigUint {
        if k > n {
            return BigUint::zero();
        }
        self.ensure(n);
        self.rows[n][k].clone()
    }

    /// Read-only lookup into rows already built.
    pub fn cached(&self, n: usize, k: usize) -> Option<&BigUint> {
        self.rows.get(n).and_then(|row| row.get(k))
    }

    pub fn row(&mut self, n: usize) -> &[BigUint] {
        self.ensure(n);
        &self.rows[n]
    }

    pub fn rows_built(&self) -> usize {
        self.rows.len()
    }
}

/// C(n, k) by the multiplicative formula; exact at every step.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Central binomial coefficient C(2n, n).
pub fn central_binomial(n: u64) -> BigUint {
    binomial(2 * n, n)
}

/// `num / den` as an `f64`, accurate to double precision even when both
/// operands are far outside the `f64` range.
pub fn ratio_to_f64(num: &BigInt, den: &BigInt) -> f64 {
    assert!(!den.is_zero(), "division by zero");
    if num.is_zero() {
        return 0.0;
    }
    let negative = (num.sign() == Sign::Minus) != (den.sign() == Sign::Minus);
    let n = num.magnitude();
    let d = den.magnitude();
    let v = ratio_biguint(n, d);
    if negative {
        -v
    } else {
        v
    }
}

pub fn ratio_biguint(n: &BigUint, d: &BigUint) -> f64 {
    assert!(!d.is_zero(), "division by zero");
    if n.is_zero() {
        return 0.0;
    }
    let e = n.bits() as i64 - d.bits() as i64;
    let k = 64 - e;
    let q = if k >= 0 {
        (n << (k as u64)) / d
    } else {
        n / (d << ((-k) as u64))
    };
    let q = q.to_f64().expect("quotient fits in f64");
    scale_pow2(q, -k)
}

fn scale_pow2(x: f64, e: i64) -> f64 {
    let mut x = x;
    let mut e = e;
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
    }
    x * 2f64.powi(e as i32)
}

/// Natural logarithm of a positive big integer.
pub fn ln_biguint(x: &BigUint) -> f64 {
    assert!(!x.is_zero(), "logarithm of zero");
    let bits = x.bits();
    if bits <= 64 {
        return x.to_f64().expect("small value").ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().expect("64-bit head");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}
