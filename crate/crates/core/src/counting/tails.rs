//! Tail bounds for the word length of long random words.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde::Serialize;

use super::sampler::{batch_rng, batches, LetterSource, BATCH_SIZE};
use crate::binomial::ratio_biguint;
use crate::{Error, Execution, Result};

/// Constant in the one-dimensional tail bound, per sign of the endpoint.
pub const K_ONE_SIDED: f64 = 1.35;
/// Constant in the rank-`r` tail bound (twice [`K_ONE_SIDED`]).
pub const K_TWO_SIDED: f64 = 2.7;

/// Exponential moment bound for a sum of bounded pairwise independent
/// variables: `P(S_n > ε s_n) <= exp(-tε + t²/2 · (1 + t d / (2 s_n)))`.
pub fn kolmogorov_bound(t: f64, eps: f64, d: f64, s_n: f64) -> Result<f64> {
    if !(t * d > 0.0 && t * d <= s_n) {
        return Err(Error::InvalidParameter(format!(
            "need 0 < t·d <= s_n, got t·d = {}, s_n = {s_n}",
            t * d
        )));
    }
    if eps.is_nan() || eps <= 0.0 {
        return Err(Error::InvalidParameter("need ε > 0".into()));
    }
    Ok((-t * eps + 0.5 * t * t * (1.0 + 0.5 * t * d / s_n)).exp())
}

/// Fraction bound `2K / n^{c - 1/2}` on words `w ∈ {a, a⁻¹}^n` with
/// `|w| > c √(n ln n)`.
pub fn tail_bound_1d(n: u64, c: f64) -> f64 {
    tail_bound_1d_with(n, c, K_ONE_SIDED)
}

pub fn tail_bound_1d_with(n: u64, c: f64, k: f64) -> f64 {
    2.0 * k / (n as f64).powf(c - 0.5)
}

/// `Σ_{|n - 2k| > ℓ} C(n, k)`: words of length `n` over one generator whose
/// exponent sum exceeds `ℓ` in absolute value.
pub fn tail_count_exact_1d(n: u64, ell: f64) -> BigUint {
    let mut c = BigUint::one();
    let mut total = BigUint::zero();
    for k in 0..=n {
        if ((n as f64) - 2.0 * k as f64).abs() > ell {
            total += &c;
        }
        c = c * (n - k) / (k + 1);
    }
    total
}

pub fn tail_fraction_exact_1d(n: u64, ell: f64) -> f64 {
    ratio_biguint(&tail_count_exact_1d(n, ell), &(BigUint::one() << n))
}

/// Fraction bound `r K / (c √(n ln n))^{c - 1/2}` on words of length `n` with
/// `|w|_G > r c √(n ln n)`, for any abelian group on `r` generators.
pub fn tail_bound_zr(n: u64, c: f64, r: usize) -> Result<f64> {
    tail_bound_zr_with(n, c, r, K_TWO_SIDED)
}

pub fn tail_bound_zr_with(n: u64, c: f64, r: usize, k: f64) -> Result<f64> {
    if c <= 0.5 {
        return Err(Error::InvalidParameter(format!(
            "tail bound needs c > 1/2, got {c}"
        )));
    }
    if n < 2 {
        return Err(Error::InvalidParameter("tail bound needs n >= 2".into()));
    }
    let nf = n as f64;
    Ok(r as f64 * k / (c * (nf * nf.ln()).sqrt()).powf(c - 0.5))
}

/// `f(n) = √(n ln n)`, `g(n) = (n ln n)^{1/(2r)}` and `c₀ = r/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AssumptionFunctions {
    pub r: usize,
    pub c0: f64,
}

impl AssumptionFunctions {
    pub fn f(&self, n: f64) -> f64 {
        (n * n.ln()).sqrt()
    }

    pub fn g(&self, n: f64) -> f64 {
        (n * n.ln()).powf(1.0 / (2.0 * self.r as f64))
    }
}

pub fn assumption_functions(r: usize) -> AssumptionFunctions {
    AssumptionFunctions {
        r,
        c0: r as f64 / 2.0,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum TailCount {
    Exact(#[serde(serialize_with = "crate::counting::ser_big")] BigUint),
    Sampled {
        hits: u64,
        samples: u64,
        seed: u64,
        ci_low: f64,
        ci_high: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailReport {
    pub n: u64,
    pub c: f64,
    pub r: usize,
    pub threshold: f64,
    pub exceed: TailCount,
    /// Exact fraction, or the point estimate when sampled.
    pub fraction: f64,
    pub bound_value: f64,
    /// Exact fraction, or the upper confidence limit, is within the bound.
    pub holds: bool,
}

/// Exact one-dimensional tail against `2K / n^{c-1/2}`.
pub fn tail_report_1d(n: u64, c: f64) -> TailReport {
    let threshold = c * ((n as f64) * (n as f64).ln()).sqrt();
    let count = tail_count_exact_1d(n, threshold);
    let fraction = ratio_biguint(&count, &(BigUint::one() << n));
    let bound_value = tail_bound_1d(n, c);
    TailReport {
        n,
        c,
        r: 1,
        threshold,
        exceed: TailCount::Exact(count),
        fraction,
        bound_value,
        holds: fraction <= bound_value,
    }
}

/// Wilson score interval for `hits` successes in `m` trials.
pub fn wilson_interval(hits: u64, m: u64, z: f64) -> (f64, f64) {
    if m == 0 {
        return (0.0, 1.0);
    }
    let m = m as f64;
    let p = hits as f64 / m;
    let z2 = z * z;
    let centre = (p + z2 / (2.0 * m)) / (1.0 + z2 / m);
    let half = z / (1.0 + z2 / m) * (p * (1.0 - p) / m + z2 / (4.0 * m * m)).sqrt();
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Monte Carlo tail on `ℤ^r`: fraction of uniform words of length `n` whose
/// endpoint has L1 norm above `r c √(n ln n)`, with a 95% Wilson interval.
pub fn sampled_tail_zr(
    r: usize,
    n: u64,
    c: f64,
    samples: u64,
    seed: u64,
    exec: Execution,
) -> Result<TailReport> {
    let bound_value = tail_bound_zr(n, c, r)?;
    let nf = n as f64;
    let threshold = r as f64 * c * (nf * nf.ln()).sqrt();
    let source = LetterSource::new(r);
    let sizes = batches(samples);
    let hits: u64 = exec
        .map_indexed(sizes.len(), |b| {
            let mut rng = batch_rng(seed, b as u64);
            let mut scratch = Vec::with_capacity(n as usize);
            let mut pos = vec![0i64; r];
            let mut hits = 0u64;
            for _ in 0..sizes[b] {
                source.fill_ordinals(&mut rng, n as usize, &mut scratch);
                pos.iter_mut().for_each(|x| *x = 0);
                for &o in &scratch {
                    pos[(o / 2) as usize] += if o % 2 == 0 { 1 } else { -1 };
                }
                let l1: i64 = pos.iter().map(|x| x.abs()).sum();
                if l1 as f64 > threshold {
                    hits += 1;
                }
            }
            hits
        })
        .into_iter()
        .sum();
    debug_assert!(sizes.iter().all(|&s| s <= BATCH_SIZE));
    let (ci_low, ci_high) = wilson_interval(hits, samples, 1.96);
    Ok(TailReport {
        n,
        c,
        r,
        threshold,
        exceed: TailCount::Sampled {
            hits,
            samples,
            seed,
            ci_low,
            ci_high,
        },
        fraction: hits as f64 / samples as f64,
        bound_value,
        holds: ci_high <= bound_value,
    })
}

/// Exact tail count for the two-generator free abelian group, for tests.
pub fn tail_count_exact_z2(n: u64, ell: f64) -> BigInt {
    // endpoint (x, y) = ((u + v)/2, (u - v)/2) with u, v independent ±1 walks
    let row: Vec<BigUint> = {
        let mut c = BigUint::one();
        let mut v = Vec::with_capacity(n as usize + 1);
        for k in 0..=n {
            v.push(c.clone());
            c = c * (n - k) / (k + 1);
        }
        v
    };
    let mut total = BigInt::zero();
    for (i, cu) in row.iter().enumerate() {
        let u = 2 * i as i64 - n as i64;
        for (j, cv) in row.iter().enumerate() {
            let v = 2 * j as i64 - n as i64;
            let l1 = ((u + v) / 2).abs() + ((u - v) / 2).abs();
            if l1 as f64 > ell {
                total += BigInt::from(cu * cv);
            }
        }
    }
    total
}
