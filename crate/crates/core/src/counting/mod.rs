//! Exact walk counts `N_v(n)` in Cayley graphs, their non-backtracking
//! variant, tail bounds for long random words and a seeded sampler.
//!
//! Free abelian groups of rank at most three run on a dense grid over the
//! bounding box; every other group runs on a sparse map keyed by canonical
//! forms. Both are exact big-integer dynamic programmes, one length step at a
//! time, and the dense engine updates slabs of the grid in parallel.

pub mod sampler;
pub mod tails;

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use crate::binomial::binomial;
use crate::presentation::{AbelianPresentation, CanonicalForm};
use crate::words::Letter;
use crate::{Error, Execution, Result};

pub use sampler::{
    batch_rng, batches, sample_words, LetterSource, SampleStream, BATCH_SIZE, RNG_ALGORITHM,
};
pub use tails::{
    assumption_functions, kolmogorov_bound, sampled_tail_zr, tail_bound_1d, tail_bound_zr,
    tail_count_exact_1d, tail_report_1d, wilson_interval, AssumptionFunctions, TailCount,
    TailReport, K_ONE_SIDED, K_TWO_SIDED,
};

pub(crate) fn ser_big<S: Serializer>(x: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_str_radix(10))
}

pub(crate) fn ser_bigint<S: Serializer>(
    x: &num_bigint::BigInt,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_str_radix(10))
}

fn ser_counts<S: Serializer>(
    m: &BTreeMap<CanonicalForm, BigUint>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_map(m.iter().map(|(k, v)| (k.to_string(), v.to_str_radix(10))))
}

/// Walk counts of one length, keyed by endpoint.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CountTable {
    pub length: u64,
    #[serde(serialize_with = "ser_counts")]
    pub counts: BTreeMap<CanonicalForm, BigUint>,
    pub backtracking_allowed: bool,
}

impl CountTable {
    pub fn get(&self, v: &CanonicalForm) -> BigUint {
        self.counts.get(v).cloned().unwrap_or_default()
    }

    pub fn total(&self) -> BigUint {
        self.counts.values().sum()
    }

    /// Endpoints with the largest count, in canonical order.
    pub fn argmax(&self) -> Vec<&CanonicalForm> {
        let Some(best) = self.counts.values().max() else {
            return Vec::new();
        };
        self.counts
            .iter()
            .filter(|(_, c)| *c == best)
            .map(|(v, _)| v)
            .collect()
    }

    /// `(2r)^n`, or `2r(2r-1)^{n-1}` without backtracking.
    pub fn expected_total(r: usize, n: u64, backtracking_allowed: bool) -> BigUint {
        let q = BigUint::from(2 * r as u64);
        if backtracking_allowed {
            q.pow(n as u32)
        } else if n == 0 {
            BigUint::one()
        } else {
            &q * (q.clone() - 1u32).pow(n as u32 - 1)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CountOptions {
    /// Maximum number of live DP states (grid cells times layers, or map entries).
    pub max_states: u64,
    pub exec: Execution,
}

impl Default for CountOptions {
    fn default() -> Self {
        CountOptions {
            max_states: 50_000_000,
            exec: Execution::default(),
        }
    }
}

/// `N_v(n)` for every endpoint `v`.
pub fn walk_counts(p: &AbelianPresentation, n: u64, opts: &CountOptions) -> Result<CountTable> {
    let mut e = Engine::new(p, n, false, opts)?;
    e.advance_to(n, opts)?;
    Ok(e.table())
}

/// Tables for every length `0..=n`.
pub fn walk_counts_upto(
    p: &AbelianPresentation,
    n: u64,
    opts: &CountOptions,
) -> Result<Vec<CountTable>> {
    tables_upto(p, n, false, opts)
}

/// `N'_v(n)`: walks with no step immediately followed by its inverse.
pub fn nonbacktracking_counts(
    p: &AbelianPresentation,
    n: u64,
    opts: &CountOptions,
) -> Result<CountTable> {
    let mut e = Engine::new(p, n, true, opts)?;
    e.advance_to(n, opts)?;
    Ok(e.table())
}

pub fn nonbacktracking_counts_upto(
    p: &AbelianPresentation,
    n: u64,
    opts: &CountOptions,
) -> Result<Vec<CountTable>> {
    tables_upto(p, n, true, opts)
}

/// Closed walk counts `N_e(k)` for `k = 0..=n`, without materialising tables.
pub fn closed_walk_series(
    p: &AbelianPresentation,
    n: u64,
    nonbacktracking: bool,
    opts: &CountOptions,
) -> Result<Vec<BigUint>> {
    let mut e = Engine::new(p, n, nonbacktracking, opts)?;
    let mut out = vec![e.identity_count()];
    for k in 1..=n {
        e.advance_to(k, opts)?;
        out.push(e.identity_count());
    }
    Ok(out)
}

fn tables_upto(
    p: &AbelianPresentation,
    n: u64,
    nonbacktracking: bool,
    opts: &CountOptions,
) -> Result<Vec<CountTable>> {
    let mut e = Engine::new(p, n, nonbacktracking, opts)?;
    let mut out = vec![e.table()];
    for k in 1..=n {
        e.advance_to(k, opts)?;
        out.push(e.table());
    }
    Ok(out)
}

/// Closed walks of length `n` on `ℤ²`: `C(n, n/2)²` for even `n`, else 0.
pub fn closed_walk_closed_form_z2(n: u64) -> BigUint {
    if n % 2 == 1 {
        return BigUint::zero();
    }
    let c = binomial(n, n / 2);
    &c * &c
}

const NO_LETTER: u8 = u8::MAX;

enum Engine {
    Dense(Box<Dense>),
    Sparse(Box<Sparse>),
}

impl Engine {
    fn new(
        p: &AbelianPresentation,
        n_max: u64,
        nonbacktracking: bool,
        opts: &CountOptions,
    ) -> Result<Engine> {
        let dense = p.is_free_abelian() && p.rank() <= 3;
        Ok(if dense {
            Engine::Dense(Box::new(Dense::new(p, n_max, nonbacktracking, opts)?))
        } else {
            Engine::Sparse(Box::new(Sparse::new(p, nonbacktracking)))
        })
    }

    fn advance_to(&mut self, n: u64, opts: &CountOptions) -> Result<()> {
        match self {
            Engine::Dense(d) => {
                while d.length < n {
                    d.step(opts.exec);
                }
                Ok(())
            }
            Engine::Sparse(s) => {
                while s.length < n {
                    s.step(opts)?;
                }
                Ok(())
            }
        }
    }

    fn identity_count(&self) -> BigUint {
        match self {
            Engine::Dense(d) => d.identity_count(),
            Engine::Sparse(s) => s.identity_count(),
        }
    }

    fn table(&self) -> CountTable {
        match self {
            Engine::Dense(d) => d.table(),
            Engine::Sparse(s) => s.table(),
        }
    }
}

/// Dense grid on `[-R, R]^r` with a zero border of width `pad`, one layer
/// per last letter when backtracking is forbidden.
struct Dense {
    r: usize,
    nonbacktracking: bool,
    radius: i64,
    pad: i64,
    side: usize,
    strides: Vec<usize>,
    /// flat offsets of the generator images, indexed by letter ordinal
    offsets: Vec<isize>,
    layers: Vec<Vec<BigUint>>,
    length: u64,
}

impl Dense {
    fn new(
        p: &AbelianPresentation,
        n_max: u64,
        nonbacktracking: bool,
        opts: &CountOptions,
    ) -> Result<Dense> {
        let r = p.rank();
        let steps: Vec<Vec<i64>> = (0..2 * r)
            .map(|o| p.generator_image(Letter::from_ordinal(o, r)).free.to_vec())
            .collect();
        let pad = steps
            .iter()
            .flatten()
            .map(|x| x.abs())
            .max()
            .unwrap_or(1)
            .max(1);
        let radius = n_max as i64 * pad;
        let side = (2 * (radius + pad) + 1) as usize;
        let cells = (side as u64).checked_pow(r as u32);
        let layers = if nonbacktracking { 2 * r as u64 } else { 1 };
        match cells.and_then(|c| c.checked_mul(layers)) {
            Some(s) if s <= opts.max_states => {}
            _ => {
                return Err(Error::BudgetExceeded {
                    what: "DP state",
                    limit: opts.max_states,
                })
            }
        }
        let mut strides = vec![1usize; r];
        for i in (0..r.saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * side;
        }
        let offsets = steps
            .iter()
            .map(|s| {
                s.iter()
                    .zip(&strides)
                    .map(|(x, st)| *x as isize * *st as isize)
                    .sum()
            })
            .collect();
        let total = side.pow(r as u32);
        let mut d = Dense {
            r,
            nonbacktracking,
            radius,
            pad,
            side,
            strides,
            offsets,
            layers: vec![vec![BigUint::zero(); total]; layers as usize],
            length: 0,
        };
        let c = d.centre();
        d.layers[0][c] = BigUint::one();
        Ok(d)
    }

    fn centre(&self) -> usize {
        let h = (self.radius + self.pad) as usize;
        self.strides.iter().map(|s| s * h).sum()
    }

    /// Flat index ranges of interior slabs along the first coordinate.
    fn slab(&self, i: usize) -> std::ops::Range<usize> {
        let lo = self.pad as usize + i;
        let stride = self.strides[0];
        lo * stride..(lo + 1) * stride
    }

    fn interior_slabs(&self) -> usize {
        (2 * self.radius + 1) as usize
    }

    fn in_interior(&self, idx: usize) -> bool {
        let lo = self.pad as usize;
        let hi = lo + 2 * self.radius as usize;
        let mut rest = idx;
        for &s in &self.strides {
            let c = rest / s;
            rest %= s;
            if c < lo || c > hi {
                return false;
            }
        }
        true
    }

    fn step(&mut self, exec: Execution) {
        let q = 2 * self.r;
        if self.nonbacktracking && self.length == 0 {
            // the empty walk has no last letter: spread it to every layer
            let c = self.centre();
            self.layers[0][c] = BigUint::zero();
            for o in 0..q {
                let idx = (c as isize + self.offsets[o]) as usize;
                self.layers[o][idx] = BigUint::one();
            }
            self.length = 1;
            return;
        }
        let total: Option<Vec<BigUint>> = self.nonbacktracking.then(|| {
            let len = self.layers[0].len();
            (0..len)
                .map(|i| self.layers.iter().map(|l| &l[i]).sum())
                .collect()
        });
        let this = &*self;
        let slabs = exec.map_indexed(this.interior_slabs(), |i| {
            let range = this.slab(i);
            let n_layers = this.layers.len();
            let mut out: Vec<Vec<BigUint>> = vec![Vec::with_capacity(range.len()); n_layers];
            for idx in range {
                let interior = this.in_interior(idx);
                if this.nonbacktracking {
                    let total = total.as_ref().expect("computed above");
                    for (o, layer) in out.iter_mut().enumerate() {
                        if !interior {
                            layer.push(BigUint::zero());
                            continue;
                        }
                        let src = (idx as isize - this.offsets[o]) as usize;
                        // every last letter except the inverse of `o`
                        layer.push(&total[src] - &this.layers[o ^ 1][src]);
                    }
                } else {
                    let v = if interior {
                        this.offsets
                            .iter()
                            .map(|off| &this.layers[0][(idx as isize - off) as usize])
                            .sum()
                    } else {
                        BigUint::zero()
                    };
                    out[0].push(v);
                }
            }
            out
        });
        let stride = self.strides[0];
        let start = self.pad as usize * stride;
        for (i, slab) in slabs.into_iter().enumerate() {
            for (layer, values) in self.layers.iter_mut().zip(slab) {
                let base = start + i * stride;
                for (j, v) in values.into_iter().enumerate() {
                    layer[base + j] = v;
                }
            }
        }
        self.length += 1;
    }

    fn identity_count(&self) -> BigUint {
        let c = self.centre();
        self.layers.iter().map(|l| &l[c]).sum()
    }

    fn coords(&self, idx: usize) -> Vec<i64> {
        let h = self.radius + self.pad;
        let mut rest = idx;
        self.strides
            .iter()
            .map(|&s| {
                let c = rest / s;
                rest %= s;
                c as i64 - h
            })
            .collect()
    }

    fn table(&self) -> CountTable {
        let mut counts = BTreeMap::new();
        let len = self.layers[0].len();
        for idx in 0..len {
            let v: BigUint = self.layers.iter().map(|l| &l[idx]).sum();
            if !v.is_zero() {
                counts.insert(CanonicalForm::free_only(&self.coords(idx)), v);
            }
        }
        debug_assert_eq!(self.side.pow(self.r as u32), len);
        CountTable {
            length: self.length,
            counts,
            backtracking_allowed: !self.nonbacktracking,
        }
    }
}

/// Sparse map keyed by `(endpoint, last letter ordinal)`.
struct Sparse {
    group: AbelianPresentation,
    letters: Vec<Letter>,
    nonbacktracking: bool,
    states: HashMap<(CanonicalForm, u8), BigUint>,
    length: u64,
}

impl Sparse {
    fn new(p: &AbelianPresentation, nonbacktracking: bool) -> Sparse {
        let r = p.rank();
        Sparse {
            group: p.clone(),
            letters: (0..2 * r).map(|o| Letter::from_ordinal(o, r)).collect(),
            nonbacktracking,
            states: HashMap::from([((p.identity(), NO_LETTER), BigUint::one())]),
            length: 0,
        }
    }

    fn step(&mut self, opts: &CountOptions) -> Result<()> {
        let mut entries: Vec<(&(CanonicalForm, u8), &BigUint)> = self.states.iter().collect();
        entries.sort_unstable_by(|a, b| a.0.cmp(b.0));
        let chunk = 1024;
        let n_chunks = entries.len().div_ceil(chunk);
        let this = &*self;
        let partial = opts.exec.map_indexed(n_chunks, |i| {
            let mut local: HashMap<(CanonicalForm, u8), BigUint> = HashMap::new();
            for ((v, last), c) in &entries[i * chunk..((i + 1) * chunk).min(entries.len())] {
                for (o, &l) in this.letters.iter().enumerate() {
                    let o = o as u8;
                    if this.nonbacktracking && *last != NO_LETTER && o == *last ^ 1 {
                        continue;
                    }
                    let key = (
                        this.group.step(v, l),
                        if this.nonbacktracking { o } else { 0 },
                    );
                    *local.entry(key).or_default() += *c;
                }
            }
            local
        });
        let mut next: HashMap<(CanonicalForm, u8), BigUint> = HashMap::new();
        for local in partial {
            for (k, v) in local {
                *next.entry(k).or_default() += v;
            }
        }
        if next.len() as u64 > opts.max_states {
            return Err(Error::BudgetExceeded {
                what: "DP state",
                limit: opts.max_states,
            });
        }
        self.states = next;
        self.length += 1;
        Ok(())
    }

    fn identity_count(&self) -> BigUint {
        let e = self.group.identity();
        self.states
            .iter()
            .filter(|((v, _), _)| *v == e)
            .map(|(_, c)| c)
            .sum()
    }

    fn table(&self) -> CountTable {
        let mut counts: BTreeMap<CanonicalForm, BigUint> = BTreeMap::new();
        for ((v, _), c) in &self.states {
            *counts.entry(v.clone()).or_default() += c;
        }
        counts.retain(|_, c| !c.is_zero());
        CountTable {
            length: self.length,
            counts,
            backtracking_allowed: !self.nonbacktracking,
        }
    }
}
