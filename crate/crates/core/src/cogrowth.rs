//! Truncated power series with exact coefficients and the cogrowth machinery
//! for non-backtracking closed walks.
//!
//! With `G(t) = Σ g_n tⁿ` counting closed walks and `F(t) = Σ f_n tⁿ`
//! counting closed walks without backtracking on `2r` letters,
//!
//! ```text
//! F(t) = (1 - t²)/(1 + (2r-1)t²) · G(t / (1 + (2r-1)t²)).
//! ```
//!
//! On `ℤ²` this gives `f_{2n} + 3 f_{2n-2} = A_{2n} - A_{2n-2}` where `A_{2n}`
//! is the coefficient of `t^{2n}` in `G(t / (1 + 3t²))`.

use std::ops::{Add, Mul, Sub};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Num, One, Signed, Zero};
use serde::Serialize;

use crate::binomial::{central_binomial, ln_biguint, PascalTable};
use crate::counting::{nonbacktracking_counts_upto, CountOptions};
use crate::presentation::AbelianPresentation;
use crate::{Error, Execution, Result};

/// Power series truncated after `t^order`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Series<T> {
    coeffs: Vec<T>,
}

pub type IntSeries = Series<BigInt>;
pub type RationalSeries = Series<BigRational>;

impl<T: Num + Clone> Series<T> {
    /// Pads with zeros or truncates to `order`.
    pub fn new(mut coeffs: Vec<T>, order: usize) -> Self {
        coeffs.resize(order + 1, T::zero());
        Series { coeffs }
    }

    pub fn zero(order: usize) -> Self {
        Self::new(Vec::new(), order)
    }

    pub fn one(order: usize) -> Self {
        Self::new(vec![T::one()], order)
    }

    /// The series `t`.
    pub fn t(order: usize) -> Self {
        Self::new(vec![T::zero(), T::one()], order)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> T {
        self.coeffs.get(k).cloned().unwrap_or_else(T::zero)
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn truncate(&self, order: usize) -> Self {
        Self::new(self.coeffs.clone(), order)
    }

    pub fn scale(&self, c: &T) -> Self {
        Series {
            coeffs: self.coeffs.iter().map(|x| x.clone() * c.clone()).collect(),
        }
    }

    /// `self(inner)`; `inner` must have zero constant term.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        if !inner.coeff(0).is_zero() {
            return Err(Error::NonzeroConstantTerm);
        }
        let order = self.order().min(inner.order());
        // Horner: a0 + h(a1 + h(a2 + ...))
        let mut acc = Self::zero(order);
        for a in self.coeffs[..=order].iter().rev() {
            acc = &acc * inner;
            acc.coeffs[0] = acc.coeffs[0].clone() + a.clone();
        }
        Ok(acc)
    }

    /// `num / den` expanded to `order`; `den` must have an invertible
    /// constant term in `T`.
    pub fn rational_expand(num: &[T], den: &[T], order: usize) -> Result<Self> {
        let d0 = den.first().cloned().unwrap_or_else(T::zero);
        if d0.is_zero() {
            return Err(Error::InvalidParameter(
                "denominator needs a nonzero constant term".into(),
            ));
        }
        let mut out: Vec<T> = Vec::with_capacity(order + 1);
        for k in 0..=order {
            let mut c = num.get(k).cloned().unwrap_or_else(T::zero);
            for (j, dj) in den.iter().enumerate().skip(1).take(k) {
                c = c - dj.clone() * out[k - j].clone();
            }
            let q = c.clone() / d0.clone();
            if q.clone() * d0.clone() != c {
                return Err(Error::InvalidParameter(
                    "expansion leaves the coefficient ring".into(),
                ));
            }
            out.push(q);
        }
        Ok(Series { coeffs: out })
    }
}

impl<T: Num + Clone> Mul for &Series<T> {
    type Output = Series<T>;

    fn mul(self, rhs: &Series<T>) -> Series<T> {
        let order = self.order().min(rhs.order());
        let mut out = vec![T::zero(); order + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(order + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate().take(order + 1 - i) {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Series { coeffs: out }
    }
}

impl<T: Num + Clone> Add for &Series<T> {
    type Output = Series<T>;

    fn add(self, rhs: &Series<T>) -> Series<T> {
        let order = self.order().min(rhs.order());
        Series {
            coeffs: (0..=order).map(|k| self.coeff(k) + rhs.coeff(k)).collect(),
        }
    }
}

impl<T: Num + Clone> Sub for &Series<T> {
    type Output = Series<T>;

    fn sub(self, rhs: &Series<T>) -> Series<T> {
        let order = self.order().min(rhs.order());
        Series {
            coeffs: (0..=order).map(|k| self.coeff(k) - rhs.coeff(k)).collect(),
        }
    }
}

impl IntSeries {
    pub fn to_rational(&self) -> RationalSeries {
        Series {
            coeffs: self
                .coeffs
                .iter()
                .map(|c| BigRational::from_integer(c.clone()))
                .collect(),
        }
    }
}

impl RationalSeries {
    /// The integer series, if every coefficient is an integer.
    pub fn to_integers(&self) -> Option<IntSeries> {
        self.coeffs
            .iter()
            .map(|c| c.is_integer().then(|| c.to_integer()))
            .collect::<Option<Vec<_>>>()
            .map(|coeffs| Series { coeffs })
    }
}

pub fn series_mul<T: Num + Clone>(a: &Series<T>, b: &Series<T>) -> Series<T> {
    a * b
}

pub fn series_compose<T: Num + Clone>(outer: &Series<T>, inner: &Series<T>) -> Result<Series<T>> {
    outer.compose(inner)
}

pub fn series_rational_expand<T: Num + Clone>(
    num: &[T],
    den: &[T],
    order: usize,
) -> Result<Series<T>> {
    Series::rational_expand(num, den, order)
}

fn int(x: i64) -> BigInt {
    BigInt::from(x)
}

/// `t / (1 + (2r-1)t²)`.
pub fn h_series(r: usize, order: usize) -> IntSeries {
    let q = 2 * r as i64 - 1;
    IntSeries::rational_expand(&[int(0), int(1)], &[int(1), int(0), int(q)], order)
        .expect("unit constant term")
}

/// `(1 - t²) / (1 + (2r-1)t²)`.
pub fn prefactor_series(r: usize, order: usize) -> IntSeries {
    let q = 2 * r as i64 - 1;
    IntSeries::rational_expand(&[int(1), int(0), int(-1)], &[int(1), int(0), int(q)], order)
        .expect("unit constant term")
}

/// Non-backtracking closed walk series from the closed walk series.
pub fn bartholdi_transform(g: &IntSeries, r: usize, order: usize) -> Result<IntSeries> {
    if r == 0 {
        return Err(Error::InvalidParameter(
            "need at least one generator".into(),
        ));
    }
    if g.order() < order {
        return Err(Error::InvalidParameter(format!(
            "input series known to order {} only, {order} requested",
            g.order()
        )));
    }
    let inner = g.truncate(order).compose(&h_series(r, order))?;
    Ok(&prefactor_series(r, order) * &inner)
}

/// `G(t) = Σ C(2n, n)² t^{2n}`, the closed walk series of `ℤ²`.
pub fn g_series_z2(order: usize) -> IntSeries {
    let coeffs = (0..=order)
        .map(|m| {
            if m % 2 == 1 {
                BigInt::zero()
            } else {
                let c = central_binomial(m as u64 / 2);
                BigInt::from(&c * &c)
            }
        })
        .collect();
    IntSeries::new(coeffs, order)
}

/// `A_{2n}` for `n = 0..=n_max` (index `n` holds `A_{2n}`):
/// `A_{2n} = Σ_{k=1}^{n} C(2k,k)² C(n+k-1, 2k-1) (-3)^{n-k}`, `A_0 = 1`.
pub fn a_coefficients(n_max: usize) -> Vec<BigInt> {
    a_coefficients_with(n_max, Execution::default())
}

pub fn a_coefficients_with(n_max: usize, exec: Execution) -> Vec<BigInt> {
    let pascal = PascalTable::with_rows(2 * n_max);
    let powers: Vec<BigInt> = std::iter::successors(Some(BigInt::one()), |p| Some(p * -3))
        .take(n_max + 1)
        .collect();
    exec.map_indexed(n_max + 1, |n| {
        if n == 0 {
            return BigInt::one();
        }
        let mut acc = BigInt::zero();
        for k in 1..=n {
            let c = pascal.cached(2 * k, k).expect("row built");
            let m = pascal.cached(n + k - 1, 2 * k - 1).expect("row built");
            acc += BigInt::from(c * c * m) * &powers[n - k];
        }
        acc
    })
}

/// `f_n` for `n = 0..=2 n_max` on `ℤ²` by `f_{2n} = A_{2n} - A_{2n-2} - 3 f_{2n-2}`.
pub fn f_recurrence(n_max: usize) -> IntSeries {
    f_from_a(&a_coefficients(n_max))
}

pub fn f_from_a(a: &[BigInt]) -> IntSeries {
    let n_max = a.len().saturating_sub(1);
    let mut coeffs = vec![BigInt::zero(); 2 * n_max + 1];
    coeffs[0] = BigInt::one();
    for n in 1..=n_max {
        coeffs[2 * n] = &a[n] - &a[n - 1] - &coeffs[2 * n - 2] * 3;
    }
    IntSeries::new(coeffs, 2 * n_max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GrigorchukBranch {
    /// `α > √(2r-1)`: `β = α + (2r-1)/α`.
    AboveThreshold,
    /// Otherwise: the constant `2√(2r-1)/(2r)`, taken as printed.
    Printed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrigorchukValue {
    pub beta: f64,
    pub branch: GrigorchukBranch,
}

/// Closed walk growth rate `β` from the cogrowth `α` on `2r` letters.
pub fn grigorchuk_beta(alpha: f64, r: usize) -> Result<GrigorchukValue> {
    if alpha.is_nan() || alpha <= 0.0 || r == 0 {
        return Err(Error::InvalidParameter(format!(
            "need α > 0 and r >= 1, got α = {alpha}, r = {r}"
        )));
    }
    let q = (2 * r - 1) as f64;
    Ok(if alpha > q.sqrt() {
        GrigorchukValue {
            beta: alpha + q / alpha,
            branch: GrigorchukBranch::AboveThreshold,
        }
    } else {
        GrigorchukValue {
            beta: 2.0 * q.sqrt() / (2 * r) as f64,
            branch: GrigorchukBranch::Printed,
        }
    })
}

/// Inverts the first branch: the root `α > √(2r-1)` of `α + (2r-1)/α = β`.
pub fn grigorchuk_alpha(beta: f64, r: usize) -> Result<f64> {
    let q = (2 * r as i64 - 1) as f64;
    let disc = beta * beta - 4.0 * q;
    if r == 0 || disc < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "β = {beta} is below 2√(2r-1) for r = {r}"
        )));
    }
    Ok((beta + disc.sqrt()) / 2.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SharpSigma {
    pub r: usize,
    /// `(√(2r-1) + 1)/(r - 1)`.
    pub sigma2: f64,
    /// `(1/√(2r-1)) [1 + ((r + √(2r-1))/(r - √(2r-1)))^{1/2}]`.
    pub sigma2_bracket: f64,
}

pub fn sharp_sigma(r: usize) -> Result<SharpSigma> {
    if r < 2 {
        return Err(Error::InvalidParameter("σ² needs r >= 2".into()));
    }
    let rf = r as f64;
    let s = (2.0 * rf - 1.0).sqrt();
    Ok(SharpSigma {
        r,
        sigma2: (s + 1.0) / (rf - 1.0),
        sigma2_bracket: (1.0 + ((rf + s) / (rf - s)).sqrt()) / s,
    })
}

/// `4/(3(√3+1)π)`: the limit of `f_{2n} · 2n / 3^{2n}` on `ℤ²` predicted
/// with `σ² = √3 + 1`.
pub fn sharp_constant() -> f64 {
    4.0 / (3.0 * (3f64.sqrt() + 1.0) * std::f64::consts::PI)
}

/// `4/(3π)`: the same limit from the local limit theorem for the
/// non-backtracking walk on `ℤ²`, whose steps have correlation `1/3` and
/// hence variance 1 per coordinate. The exact ratios converge to this value.
pub fn diffusive_constant() -> f64 {
    4.0 / (3.0 * std::f64::consts::PI)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SharpRow {
    pub two_n: usize,
    #[serde(serialize_with = "crate::counting::ser_bigint")]
    pub f: BigInt,
    pub ratio: f64,
}

/// `f_{2n} · 2n / 3^{2n}` from exact `f_{2n}`, scaled through logarithms.
pub fn sharp_ratio(f: &BigInt, two_n: usize) -> f64 {
    if f.is_zero() || two_n == 0 {
        return 0.0;
    }
    let sign = if f.is_negative() { -1.0 } else { 1.0 };
    let ln = ln_biguint(f.magnitude()) + (two_n as f64).ln() - two_n as f64 * 3f64.ln();
    sign * ln.exp()
}

/// `(2n, f_{2n}, f_{2n}·2n/3^{2n})` for `n = 1..=n_max`.
pub fn sharp_ratio_report(n_max: usize) -> Vec<SharpRow> {
    let f = f_recurrence(n_max);
    (1..=n_max)
        .map(|n| {
            let fv = f.coeff(2 * n);
            SharpRow {
                two_n: 2 * n,
                ratio: sharp_ratio(&fv, 2 * n),
                f: fv,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SharpBounds {
    pub r: usize,
    pub n_max: u64,
    /// `min_n N'_e(n) n^{r/2} / (2r-1)^n` over even `2 <= n <= n_max` with `N'_e(n) > 0`.
    pub c1: f64,
    /// `max_n max_v N'_v(n) n^{r/2} / (2r-1)^n` over the same range.
    pub c2: f64,
}

/// Empirical constants of the two-sided bound on non-backtracking counts.
pub fn sharp_bounds_report(
    p: &AbelianPresentation,
    n_max: u64,
    opts: &CountOptions,
) -> Result<SharpBounds> {
    let r = p.rank();
    let tables = nonbacktracking_counts_upto(p, n_max, opts)?;
    let e = p.identity();
    let q = BigUint::from(2 * r as u64 - 1);
    let mut c1 = f64::INFINITY;
    let mut c2: f64 = 0.0;
    for t in tables.iter().filter(|t| t.length >= 2 && t.length % 2 == 0) {
        let n = t.length;
        let scale = |x: &BigUint| {
            if x.is_zero() {
                return 0.0;
            }
            (ln_biguint(x) + 0.5 * r as f64 * (n as f64).ln() - ln_biguint(&q.pow(n as u32))).exp()
        };
        let at_e = t.get(&e);
        if !at_e.is_zero() {
            c1 = c1.min(scale(&at_e));
        }
        if let Some(m) = t.counts.values().max() {
            c2 = c2.max(scale(m));
        }
    }
    Ok(SharpBounds { r, n_max, c1, c2 })
}
