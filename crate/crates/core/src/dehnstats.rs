//! The Dehn function `D(n)` and its mean variants: exact by enumeration for
//! small `n`, Monte Carlo estimates with confidence intervals for large `n`,
//! plus the `n (ln n)²` bound checks.
//!
//! Populations, for a presentation on `r` generators:
//!
//! * `S_G(n)`: words of length `n` equal to the identity, `N_e(n)` of them
//!   with total area `A_e(n)`; `D_smean(n) = A_e(n) / N_e(n)` (0 if empty).
//! * `B_G(n)`: the union of `S_G(m)` for `m <= n`; `D(n)` is the largest area
//!   in `B_G(n)` and `D_mean(n)` the average area over it.
//! * all `(2r)^n` words of length `n`, closed through a combing;
//!   `D_osmean(n) = A(n) / (2r)^n` where `A(n) = Σ_v A_v(n)` sums by endpoint.
//! * lazy words of length `n`: a closed word of length `m` appears `C(n, m)`
//!   times, so the lazy mean is `Σ C(n,m) A_e(m) / Σ C(n,m) N_e(m)`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::area::{area_closed, winding_l1, AreaOptions};
use crate::binomial::{binomial, central_binomial, ln_biguint};
use crate::combing::GeodesicCombing;
use crate::counting::{batch_rng, batches, LetterSource};
use crate::presentation::{AbelianPresentation, BallDistances, CanonicalForm};
use crate::words::{Letter, Word};
use crate::{Error, Execution, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum DehnKind {
    #[serde(rename = "D")]
    Dehn,
    #[serde(rename = "mean")]
    Mean,
    #[serde(rename = "smean")]
    Smean,
    #[serde(rename = "osmean")]
    Osmean,
    #[serde(rename = "lazy-mean")]
    LazyMean,
}

impl fmt::Display for DehnKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DehnKind::Dehn => "D",
            DehnKind::Mean => "mean",
            DehnKind::Smean => "smean",
            DehnKind::Osmean => "osmean",
            DehnKind::LazyMean => "lazy-mean",
        })
    }
}

impl FromStr for DehnKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "D" | "d" | "dehn" => Ok(DehnKind::Dehn),
            "mean" => Ok(DehnKind::Mean),
            "smean" => Ok(DehnKind::Smean),
            "osmean" => Ok(DehnKind::Osmean),
            "lazy" | "lazy-mean" => Ok(DehnKind::LazyMean),
            _ => Err(Error::Parse(format!("unknown kind {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampledValue {
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub std_error: f64,
    pub samples: u64,
    pub seed: u64,
    /// Words drawn, including rejected ones.
    pub trials: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DehnValue {
    Exact(BigRational),
    /// Certified interval when some areas are only bounded.
    Bounds {
        lower: BigRational,
        upper: BigRational,
    },
    Sampled(SampledValue),
}

impl DehnValue {
    fn from_bounds(lower: BigRational, upper: BigRational) -> Self {
        if lower == upper {
            DehnValue::Exact(lower)
        } else {
            DehnValue::Bounds { lower, upper }
        }
    }

    /// Exact value, estimate, or the upper end of an interval.
    pub fn point(&self) -> f64 {
        match self {
            DehnValue::Exact(q) => rational_to_f64(q),
            DehnValue::Bounds { upper, .. } => rational_to_f64(upper),
            DehnValue::Sampled(s) => s.estimate,
        }
    }

    pub fn exact(&self) -> Option<&BigRational> {
        match self {
            DehnValue::Exact(q) => Some(q),
            _ => None,
        }
    }
}

impl fmt::Display for DehnValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DehnValue::Exact(q) => write!(f, "{q}"),
            DehnValue::Bounds { lower, upper } => write!(f, "[{lower},{upper}]"),
            DehnValue::Sampled(s) => write!(f, "{}", s.estimate),
        }
    }
}

impl Serialize for DehnValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            DehnValue::Exact(q) => s.serialize_str(&q.to_string()),
            DehnValue::Bounds { lower, upper } => {
                let mut st = s.serialize_struct("Bounds", 2)?;
                st.serialize_field("lower", &lower.to_string())?;
                st.serialize_field("upper", &upper.to_string())?;
                st.end()
            }
            DehnValue::Sampled(v) => v.serialize(s),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DehnReport {
    pub n: u64,
    pub kind: DehnKind,
    pub value: DehnValue,
    /// `value / (n (ln n)²)`, omitted for `n < 2`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub normalized: Option<f64>,
}

impl DehnReport {
    fn new(n: u64, kind: DehnKind, value: DehnValue) -> Self {
        let normalized = normalize(n, value.point());
        DehnReport {
            n,
            kind,
            value,
            normalized,
        }
    }
}

/// `x / (n (ln n)²)` for `n >= 2`.
pub fn normalize(n: u64, x: f64) -> Option<f64> {
    (n >= 2).then(|| x / h(n as f64))
}

/// `h(n) = n (ln n)²`.
pub fn h(n: f64) -> f64 {
    n * n.ln() * n.ln()
}

pub fn rational_to_f64(q: &BigRational) -> f64 {
    crate::binomial::ratio_to_f64(q.numer(), q.denom())
}

fn ratio(num: u64, den: u64) -> BigRational {
    if den == 0 {
        BigRational::zero()
    } else {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
}

fn ratio_big(num: BigUint, den: BigUint) -> BigRational {
    if den.is_zero() {
        BigRational::zero()
    } else {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumOptions {
    /// Largest `(2r)^n` an exact enumeration may cover.
    pub max_words: u64,
    pub area: AreaOptions,
    pub exec: Execution,
}

impl Default for EnumOptions {
    fn default() -> Self {
        EnumOptions {
            max_words: 1 << 26,
            area: AreaOptions::default(),
            exec: Execution::default(),
        }
    }
}

fn check_budget(r: usize, n: u64, max_words: u64) -> Result<()> {
    let ok = (2 * r as u64)
        .checked_pow(n as u32)
        .is_some_and(|w| w <= max_words);
    if ok {
        Ok(())
    } else {
        Err(Error::BudgetExceeded {
            what: "enumeration",
            limit: max_words,
        })
    }
}

/// Closed words of one length: how many, their area sums and the largest area.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct LengthStats {
    pub length: u64,
    pub count: u64,
    pub area_lower: u64,
    pub area_upper: u64,
    pub max_lower: u64,
    pub max_upper: u64,
}

impl LengthStats {
    fn add(&mut self, lower: u64, upper: u64) {
        self.count += 1;
        self.area_lower += lower;
        self.area_upper += upper;
        self.max_lower = self.max_lower.max(lower);
        self.max_upper = self.max_upper.max(upper);
    }

    fn merge(&mut self, o: &LengthStats) {
        self.count += o.count;
        self.area_lower += o.area_lower;
        self.area_upper += o.area_upper;
        self.max_lower = self.max_lower.max(o.max_lower);
        self.max_upper = self.max_upper.max(o.max_upper);
    }

    pub fn is_exact(&self) -> bool {
        self.area_lower == self.area_upper
    }
}

struct ClosedSearch<'a> {
    p: &'a AbelianPresentation,
    n_max: usize,
    letters: Vec<Letter>,
    ball: Option<BallDistances>,
    z2: bool,
    area: AreaOptions,
}

impl ClosedSearch<'_> {
    fn dist(&self, pos: &[i64]) -> u64 {
        match &self.ball {
            None => pos.iter().map(|x| x.unsigned_abs()).sum(),
            Some(b) => b
                .get(&self.p.canonical_form(pos))
                .map_or(u64::MAX, u64::from),
        }
    }

    fn record(&self, prefix: &[Letter], stats: &mut [LengthStats]) -> Result<()> {
        let (lo, hi) = if self.z2 {
            let a = winding_l1(prefix)?;
            (a, a)
        } else {
            let w = Word::from_letters_unchecked(prefix.to_vec());
            let a = area_closed(self.p, &w, &self.area)?;
            (a.lower, a.upper)
        };
        stats[prefix.len()].add(lo, hi);
        Ok(())
    }

    /// Depth-first search over prefixes that can still return within `n_max`.
    /// Prefixes reaching `split` are handed to `tasks` instead of expanded.
    fn walk(
        &self,
        prefix: &mut Vec<Letter>,
        pos: &mut Vec<i64>,
        split: usize,
        stats: &mut [LengthStats],
        tasks: &mut Option<&mut Vec<(Vec<Letter>, Vec<i64>)>>,
    ) -> Result<()> {
        let k = prefix.len();
        if let Some(t) = tasks {
            if k == split {
                t.push((prefix.clone(), pos.clone()));
                return Ok(());
            }
        }
        if self.dist(pos) == 0 {
            self.record(prefix, stats)?;
        }
        if k == self.n_max {
            return Ok(());
        }
        let left = (self.n_max - k - 1) as u64;
        for &l in &self.letters {
            let g = l.generator().expect("no pauses") - 1;
            pos[g] += l.sign();
            if self.dist(pos) <= left {
                prefix.push(l);
                self.walk(prefix, pos, split, stats, tasks)?;
                prefix.pop();
            }
            pos[g] -= l.sign();
        }
        Ok(())
    }
}

/// Per-length statistics of closed words for every length `0..=n_max`.
pub fn closed_word_stats(
    p: &AbelianPresentation,
    n_max: u64,
    opts: &EnumOptions,
) -> Result<Vec<LengthStats>> {
    check_budget(p.rank(), n_max, opts.max_words)?;
    let r = p.rank();
    let search = ClosedSearch {
        p,
        n_max: n_max as usize,
        letters: p.alphabet().letters().collect(),
        ball: (!p.is_free_abelian()).then(|| p.ball_distances(n_max)),
        z2: p.is_standard_z2(),
        area: opts.area,
    };
    let fresh = || {
        (0..=n_max)
            .map(|m| LengthStats {
                length: m,
                ..LengthStats::default()
            })
            .collect::<Vec<_>>()
    };
    let mut stats = fresh();
    let split = (n_max as usize).min(3);
    let mut tasks = Vec::new();
    search.walk(
        &mut Vec::new(),
        &mut vec![0; r],
        split,
        &mut stats,
        &mut Some(&mut tasks),
    )?;
    let partial = opts.exec.map_slice(&tasks, |(prefix, pos)| {
        let mut local = fresh();
        let mut prefix = prefix.clone();
        let mut pos = pos.clone();
        search
            .walk(&mut prefix, &mut pos, usize::MAX, &mut local, &mut None)
            .map(|_| local)
    });
    for local in partial {
        for (s, l) in stats.iter_mut().zip(&local?) {
            s.merge(l);
        }
    }
    Ok(stats)
}

fn sphere_quotient(s: &LengthStats) -> (BigRational, BigRational) {
    (ratio(s.area_lower, s.count), ratio(s.area_upper, s.count))
}

fn report_from_bounds(n: u64, kind: DehnKind, (lo, hi): (BigRational, BigRational)) -> DehnReport {
    DehnReport::new(n, kind, DehnValue::from_bounds(lo, hi))
}

/// `D(n)` for `n = 0..=n_max`.
pub fn dehn_exact(
    p: &AbelianPresentation,
    n_max: u64,
    opts: &EnumOptions,
) -> Result<Vec<DehnReport>> {
    let stats = closed_word_stats(p, n_max, opts)?;
    Ok(dehn_from_stats(&stats))
}

pub fn dehn_from_stats(stats: &[LengthStats]) -> Vec<DehnReport> {
    let (mut lo, mut hi) = (0u64, 0u64);
    stats
        .iter()
        .map(|s| {
            lo = lo.max(s.max_lower);
            hi = hi.max(s.max_upper);
            report_from_bounds(s.length, DehnKind::Dehn, (ratio(lo, 1), ratio(hi, 1)))
        })
        .collect()
}

pub fn smean_exact(p: &AbelianPresentation, n: u64, opts: &EnumOptions) -> Result<DehnReport> {
    let stats = closed_word_stats(p, n, opts)?;
    Ok(smean_from_stats(&stats[n as usize]))
}

pub fn smean_from_stats(s: &LengthStats) -> DehnReport {
    report_from_bounds(s.length, DehnKind::Smean, sphere_quotient(s))
}

pub fn mean_exact(p: &AbelianPresentation, n: u64, opts: &EnumOptions) -> Result<DehnReport> {
    let stats = closed_word_stats(p, n, opts)?;
    Ok(mean_from_stats(&stats[..=n as usize]))
}

/// Mean over the ball made of all lengths in `stats`.
pub fn mean_from_stats(stats: &[LengthStats]) -> DehnReport {
    let n = stats.last().map_or(0, |s| s.length);
    let count: u64 = stats.iter().map(|s| s.count).sum();
    let lo: u64 = stats.iter().map(|s| s.area_lower).sum();
    let hi: u64 = stats.iter().map(|s| s.area_upper).sum();
    report_from_bounds(n, DehnKind::Mean, (ratio(lo, count), ratio(hi, count)))
}

pub fn lazy_mean(p: &AbelianPresentation, n: u64, opts: &EnumOptions) -> Result<DehnReport> {
    let stats = closed_word_stats(p, n, opts)?;
    Ok(lazy_mean_from_stats(&stats[..=n as usize]))
}

pub fn lazy_mean_from_stats(stats: &[LengthStats]) -> DehnReport {
    let n = stats.last().map_or(0, |s| s.length);
    let (mut lo, mut hi, mut count) = (BigUint::zero(), BigUint::zero(), BigUint::zero());
    for s in stats {
        let c = binomial(n, s.length);
        lo += &c * s.area_lower;
        hi += &c * s.area_upper;
        count += &c * s.count;
    }
    report_from_bounds(
        n,
        DehnKind::LazyMean,
        (ratio_big(lo, count.clone()), ratio_big(hi, count)),
    )
}

/// Words of length `n` grouped by endpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct EndpointStats {
    pub count: u64,
    pub area_lower: u64,
    pub area_upper: u64,
}

/// `N_v(n)` and `A_v(n)` for every endpoint `v`, with open paths closed
/// through `c`.
pub fn open_area_by_endpoint(
    p: &AbelianPresentation,
    c: &GeodesicCombing,
    n: u64,
    opts: &EnumOptions,
) -> Result<BTreeMap<CanonicalForm, EndpointStats>> {
    check_budget(p.rank(), n, opts.max_words)?;
    let r = p.rank();
    let q = 2 * r;
    let split = (n as usize).min(3);
    let n_prefixes = q.pow(split as u32);
    let z2 = p.is_standard_z2();
    let partial = opts.exec.map_indexed(n_prefixes, |t| {
        let mut out: HashMap<CanonicalForm, EndpointStats> = HashMap::new();
        let mut backs: HashMap<CanonicalForm, Vec<Letter>> = HashMap::new();
        let mut digits = vec![0usize; n as usize];
        let mut rest = t;
        for d in digits[..split].iter_mut().rev() {
            *d = rest % q;
            rest /= q;
        }
        let mut buf: Vec<Letter> = Vec::with_capacity(2 * n as usize);
        loop {
            buf.clear();
            buf.extend(digits.iter().map(|&o| Letter::from_ordinal(o, r)));
            let mut pos = vec![0i64; r];
            for l in &buf {
                pos[l.generator().expect("no pauses") - 1] += l.sign();
            }
            let end = p.canonical_form(&pos);
            let back = backs
                .entry(end.clone())
                .or_insert_with(|| c.comb_to(&end).inverse().into_letters());
            buf.extend_from_slice(back);
            let (lo, hi) = if z2 {
                let a = winding_l1(&buf)?;
                (a, a)
            } else {
                let a = area_closed(p, &Word::from_letters_unchecked(buf.clone()), &opts.area)?;
                (a.lower, a.upper)
            };
            let e = out.entry(end).or_default();
            e.count += 1;
            e.area_lower += lo;
            e.area_upper += hi;
            // odometer over the suffix
            let mut i = n as usize;
            loop {
                if i == split {
                    return Ok(out);
                }
                i -= 1;
                digits[i] += 1;
                if digits[i] < q {
                    break;
                }
                digits[i] = 0;
            }
        }
    });
    let mut merged: BTreeMap<CanonicalForm, EndpointStats> = BTreeMap::new();
    for part in partial {
        for (v, s) in part? {
            let e = merged.entry(v).or_default();
            e.count += s.count;
            e.area_lower += s.area_lower;
            e.area_upper += s.area_upper;
        }
    }
    Ok(merged)
}

pub fn osmean_exact(
    p: &AbelianPresentation,
    c: &GeodesicCombing,
    n: u64,
    opts: &EnumOptions,
) -> Result<DehnReport> {
    let by_end = open_area_by_endpoint(p, c, n, opts)?;
    let total = BigUint::from(2 * p.rank() as u64).pow(n as u32);
    let lo: BigUint = by_end.values().map(|s| BigUint::from(s.area_lower)).sum();
    let hi: BigUint = by_end.values().map(|s| BigUint::from(s.area_upper)).sum();
    Ok(report_from_bounds(
        n,
        DehnKind::Osmean,
        (ratio_big(lo, total.clone()), ratio_big(hi, total)),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleOptions {
    /// Total words drawn by rejection sampling before giving up.
    pub max_trials: u64,
    /// Normal quantile for the confidence interval.
    pub z: f64,
    pub area: AreaOptions,
    pub exec: Execution,
}

impl Default for SampleOptions {
    fn default() -> Self {
        SampleOptions {
            max_trials: 4_000_000_000,
            z: 1.96,
            area: AreaOptions::default(),
            exec: Execution::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    m: u64,
    sum: u128,
    sum_sq: u128,
    trials: u64,
}

impl Moments {
    fn add(&mut self, a: u64) {
        self.m += 1;
        self.sum += a as u128;
        self.sum_sq += (a as u128) * (a as u128);
    }

    fn merge(&mut self, o: &Moments) {
        self.m += o.m;
        self.sum += o.sum;
        self.sum_sq += o.sum_sq;
        self.trials += o.trials;
    }

    fn value(&self, seed: u64, z: f64) -> SampledValue {
        let m = self.m as f64;
        let mean = self.sum as f64 / m;
        let var = if self.m > 1 {
            ((self.sum_sq as f64) - m * mean * mean).max(0.0) / (m - 1.0)
        } else {
            0.0
        };
        let se = (var / m).sqrt();
        SampledValue {
            estimate: mean,
            ci_low: mean - z * se,
            ci_high: mean + z * se,
            std_error: se,
            samples: self.m,
            seed,
            trials: self.trials,
        }
    }
}

fn exact_area(
    p: &AbelianPresentation,
    letters: &[Letter],
    z2: bool,
    area: &AreaOptions,
) -> Result<u64> {
    if z2 {
        return winding_l1(letters);
    }
    let a = area_closed(p, &Word::from_letters_unchecked(letters.to_vec()), area)?;
    a.value().ok_or_else(|| {
        Error::InvalidParameter(format!(
            "sampling needs exact areas, got [{}, {}]",
            a.lower, a.upper
        ))
    })
}

/// Monte Carlo `D_osmean(n)` from `samples` uniform words.
pub fn osmean_sampled(
    p: &AbelianPresentation,
    c: &GeodesicCombing,
    n: u64,
    samples: u64,
    seed: u64,
    opts: &SampleOptions,
) -> Result<DehnReport> {
    if samples == 0 {
        return Err(Error::InvalidParameter("need at least one sample".into()));
    }
    let r = p.rank();
    let source = LetterSource::new(r);
    let z2 = p.is_standard_z2();
    let sizes = batches(samples);
    let parts = opts.exec.map_indexed(sizes.len(), |b| -> Result<Moments> {
        let mut rng = batch_rng(seed, b as u64);
        let mut ords = Vec::with_capacity(n as usize);
        let mut buf = Vec::with_capacity(2 * n as usize);
        let mut mo = Moments::default();
        for _ in 0..sizes[b] {
            source.fill_ordinals(&mut rng, n as usize, &mut ords);
            buf.clear();
            let mut pos = vec![0i64; r];
            for &o in &ords {
                let l = Letter::from_ordinal(o as usize, r);
                pos[o as usize / 2] += l.sign();
                buf.push(l);
            }
            let end = p.canonical_form(&pos);
            buf.extend(c.comb_to(&end).inverse().into_letters());
            mo.add(exact_area(p, &buf, z2, &opts.area)?);
            mo.trials += 1;
        }
        Ok(mo)
    });
    let mut total = Moments::default();
    for part in parts {
        total.merge(&part?);
    }
    Ok(DehnReport::new(
        n,
        DehnKind::Osmean,
        DehnValue::Sampled(total.value(seed, opts.z)),
    ))
}

/// Closure test on raw `u64` draws for `ℤ²` with two bits per letter (low
/// bits first, ordinal `bit1 bit0`): in the rotated coordinates `u = x + y`,
/// `v = x - y` every letter moves both by ±1, with `u` decreasing iff `bit0`
/// is set and `v` decreasing iff `bit0 != bit1`.
fn z2_closed_raw(raw: &[u64], n: usize) -> bool {
    const LOW: u64 = 0x5555_5555_5555_5555;
    let (mut du, mut dv) = (0usize, 0usize);
    for (i, &x) in raw.iter().enumerate() {
        let letters = (n - 32 * i).min(32);
        let mask = if letters == 32 {
            u64::MAX
        } else {
            (1u64 << (2 * letters)) - 1
        };
        du += (x & LOW & mask).count_ones() as usize;
        dv += ((x ^ (x >> 1)) & LOW & mask).count_ones() as usize;
    }
    2 * du == n && 2 * dv == n
}

/// Monte Carlo `D_smean(n)` from `samples` closed words, drawn uniformly from
/// `S_G(n)` by rejection.
pub fn smean_sampled(
    p: &AbelianPresentation,
    n: u64,
    samples: u64,
    seed: u64,
    opts: &SampleOptions,
) -> Result<DehnReport> {
    if samples == 0 {
        return Err(Error::InvalidParameter("need at least one sample".into()));
    }
    if n % 2 == 1 && p.relators().iter().all(|w| w.len() % 2 == 0) {
        // every closed word has even length: the sphere is empty
        return Ok(DehnReport::new(
            n,
            DehnKind::Smean,
            DehnValue::Exact(BigRational::zero()),
        ));
    }
    let r = p.rank();
    let source = LetterSource::new(r);
    let z2 = p.is_standard_z2();
    let e = p.identity();
    let sizes = batches(samples);
    let n_us = n as usize;
    let parts = opts.exec.map_indexed(sizes.len(), |b| -> Result<Moments> {
        let budget = (opts.max_trials as u128 * sizes[b] as u128 / samples as u128) as u64;
        let mut rng = batch_rng(seed, b as u64);
        let mut ords = Vec::with_capacity(n_us);
        let mut raw = vec![0u64; n_us.div_ceil(32)];
        let mut buf = Vec::with_capacity(n_us);
        let mut mo = Moments::default();
        while mo.m < sizes[b] {
            if mo.trials >= budget.max(1) {
                return Err(Error::BudgetExceeded {
                    what: "rejection",
                    limit: opts.max_trials,
                });
            }
            mo.trials += 1;
            if z2 {
                use rand::RngCore;
                for x in raw.iter_mut() {
                    *x = rng.next_u64();
                }
                if !z2_closed_raw(&raw, n_us) {
                    continue;
                }
                buf.clear();
                for i in 0..n_us {
                    let o = (raw[i / 32] >> (2 * (i % 32))) & 3;
                    buf.push(Letter::from_ordinal(o as usize, 2));
                }
            } else {
                source.fill_ordinals(&mut rng, n_us, &mut ords);
                let mut pos = vec![0i64; r];
                buf.clear();
                for &o in &ords {
                    let l = Letter::from_ordinal(o as usize, r);
                    pos[o as usize / 2] += l.sign();
                    buf.push(l);
                }
                if p.canonical_form(&pos) != e {
                    continue;
                }
            }
            mo.add(exact_area(p, &buf, z2, &opts.area)?);
        }
        Ok(mo)
    });
    let mut total = Moments::default();
    for part in parts {
        total.merge(&part?);
    }
    Ok(DehnReport::new(
        n,
        DehnKind::Smean,
        DehnValue::Sampled(total.value(seed, opts.z)),
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelationRow {
    pub n: u64,
    pub mean: DehnValue,
    pub max_smean: DehnValue,
    /// `None` when interval-valued areas leave the comparison undecided.
    pub holds: Option<bool>,
}

/// `D_mean(n) <= max_{m <= n} D_smean(m)` for `n = 0..=n_max`.
pub fn relation_check(
    p: &AbelianPresentation,
    n_max: u64,
    opts: &EnumOptions,
) -> Result<Vec<RelationRow>> {
    let stats = closed_word_stats(p, n_max, opts)?;
    Ok(relation_from_stats(&stats))
}

pub fn relation_from_stats(stats: &[LengthStats]) -> Vec<RelationRow> {
    let mut best_lo = BigRational::zero();
    let mut best_hi = BigRational::zero();
    let mut rows = Vec::with_capacity(stats.len());
    for (i, s) in stats.iter().enumerate() {
        let (lo, hi) = sphere_quotient(s);
        best_lo = best_lo.max(lo);
        best_hi = best_hi.max(hi);
        let mean = mean_from_stats(&stats[..=i]).value;
        let (m_lo, m_hi) = match &mean {
            DehnValue::Exact(q) => (q.clone(), q.clone()),
            DehnValue::Bounds { lower, upper } => (lower.clone(), upper.clone()),
            DehnValue::Sampled(_) => unreachable!("exact statistics"),
        };
        let holds = if m_hi <= best_lo {
            Some(true)
        } else if m_lo > best_hi {
            Some(false)
        } else {
            None
        };
        rows.push(RelationRow {
            n: s.length,
            mean,
            max_smean: DehnValue::from_bounds(best_lo.clone(), best_hi.clone()),
            holds,
        });
    }
    rows
}

/// `2h(⌈n/2⌉) + n ln n <= h(n)` with `h(n) = n (ln n)²`.
pub fn h_inequality_holds(n: u64) -> bool {
    let nf = n as f64;
    2.0 * h(n.div_ceil(2) as f64) + nf * nf.ln() <= h(nf)
}

/// The same inequality with `⌈n/2⌉` relaxed to `(n+1)/2`, an upper bound on
/// the left side: `(n+1)(ln((n+1)/2))² + n ln n <= n (ln n)²`.
pub fn h_inequality_relaxed_holds(n: u64) -> bool {
    let nf = n as f64;
    (nf + 1.0) * ((nf + 1.0) / 2.0).ln().powi(2) + nf * nf.ln() <= h(nf)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HScan {
    pub n_max: u64,
    /// `n` in `2..=n_max` where the inequality fails.
    pub failures: Vec<u64>,
    pub relaxed_failures: Vec<u64>,
}

impl HScan {
    /// Smallest `n0` with the relaxed form holding on all of `n0..=n_max`.
    pub fn relaxed_threshold(&self) -> u64 {
        self.relaxed_failures.last().map_or(2, |f| f + 1)
    }

    pub fn threshold(&self) -> u64 {
        self.failures.last().map_or(2, |f| f + 1)
    }
}

pub fn h_inequality_scan(n_max: u64) -> HScan {
    HScan {
        n_max,
        failures: (2..=n_max).filter(|&n| !h_inequality_holds(n)).collect(),
        relaxed_failures: (2..=n_max)
            .filter(|&n| !h_inequality_relaxed_holds(n))
            .collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitRow {
    pub n: u64,
    pub value: f64,
    pub normalized: f64,
    /// Standard error of `normalized`, 0 for exact values.
    pub normalized_se: f64,
    pub running_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlopeFit {
    /// Least-squares slope of the normalized values against `ln n`.
    pub slope: f64,
    pub std_error: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// The interval reaches down to zero or below: no detectable growth.
    pub no_growth: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundFit {
    pub rows: Vec<FitRow>,
    pub slope: Option<SlopeFit>,
}

/// Normalizes reports by `n (ln n)²` and fits a line against `ln n`; the
/// slope's standard error is propagated from the per-point sampling errors.
pub fn bound_fit(reports: &[DehnReport], z: f64) -> BoundFit {
    let mut rows = Vec::new();
    let mut running = f64::NEG_INFINITY;
    for rep in reports.iter().filter(|r| r.n >= 2) {
        let value = rep.value.point();
        let scale = h(rep.n as f64);
        let normalized = value / scale;
        let se = match &rep.value {
            DehnValue::Sampled(s) => s.std_error / scale,
            _ => 0.0,
        };
        running = running.max(normalized);
        rows.push(FitRow {
            n: rep.n,
            value,
            normalized,
            normalized_se: se,
            running_max: running,
        });
    }
    let slope = (rows.len() >= 2).then(|| {
        let xs: Vec<f64> = rows.iter().map(|r| (r.n as f64).ln()).collect();
        let m = xs.len() as f64;
        let xbar = xs.iter().sum::<f64>() / m;
        let ybar = rows.iter().map(|r| r.normalized).sum::<f64>() / m;
        let sxx: f64 = xs.iter().map(|x| (x - xbar).powi(2)).sum();
        let slope = xs
            .iter()
            .zip(&rows)
            .map(|(x, r)| (x - xbar) * (r.normalized - ybar))
            .sum::<f64>()
            / sxx;
        let var: f64 = xs
            .iter()
            .zip(&rows)
            .map(|(x, r)| ((x - xbar) / sxx).powi(2) * r.normalized_se.powi(2))
            .sum();
        let se = var.sqrt();
        SlopeFit {
            slope,
            std_error: se,
            ci_low: slope - z * se,
            ci_high: slope + z * se,
            no_growth: slope - z * se <= 0.0,
        }
    });
    BoundFit { rows, slope }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NvRow {
    pub two_n: u64,
    /// `g_{2n}·2n·π / (2·16ⁿ)`, tending to 1.
    pub stirling_ratio: f64,
    /// `N_e(2n)·2n / 4^{2n}`, bounded above and below.
    pub local_ratio: f64,
}

/// Closed walk asymptotics on `ℤ²` from `g_{2n} = C(2n, n)²`.
pub fn nv_asymptotics_report(n_max: u64) -> Vec<NvRow> {
    (1..=n_max)
        .map(|n| {
            let c = central_binomial(n);
            let g = &c * &c;
            let two_n = 2 * n;
            let ln_local = ln_biguint(&g) + (two_n as f64).ln() - n as f64 * 16f64.ln();
            let local = ln_local.exp();
            NvRow {
                two_n,
                stirling_ratio: local * std::f64::consts::PI / 2.0,
                local_ratio: local,
            }
        })
        .collect()
}

/// Exact rational to a decimal string with `digits` places, for reports.
pub fn rational_decimal(q: &BigRational, digits: usize) -> String {
    let scale = BigInt::from(10u32).pow(digits as u32);
    let scaled = (q * BigRational::from_integer(scale)).round().to_integer();
    let neg = scaled < BigInt::zero();
    let s = scaled.magnitude().to_str_radix(10);
    let s = format!("{s:0>width$}", width = digits + 1);
    let (int, frac) = s.split_at(s.len() - digits);
    format!("{}{int}.{frac}", if neg { "-" } else { "" })
}

/// Integer-valued `D(n)` as `u64`, if exact.
pub fn exact_integer(v: &DehnValue) -> Option<u64> {
    v.exact()
        .filter(|q| q.is_integer())
        .and_then(|q| q.to_integer().to_u64())
}
