//! Brute-force area by best-first search over relator applications.
//!
//! Nodes are freely and cyclically reduced words up to rotation and inversion
//! (area is invariant under conjugation and inversion). A move removes one
//! relator occurrence: it inserts a cyclic permutation `σ` of a relator or its
//! inverse in front of a letter that `σ` cancels, then reduces. Every van
//! Kampen diagram has a 2-cell with an edge on the boundary, and peeling it
//! off is such a move, so the search reaches the empty word in exactly
//! `area(w)` moves when intermediate words stay within the length cap.
//!
//! On the standard presentation of `ℤ^r` the search is guided by the sum of
//! absolute signed plane areas, which drops by at most one per move. Other
//! presentations run as plain breadth-first search.

use std::collections::HashMap;

use serde::Serialize;

use crate::presentation::AbelianPresentation;
use crate::words::{reduce_letters, Word};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct OracleConfig {
    /// Extra letters allowed above `|w|_F`; `None` means twice the longest relator.
    pub slack: Option<usize>,
    /// Node expansions before the search gives up with a certified lower bound.
    pub max_nodes: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            slack: None,
            max_nodes: 2_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleOutcome {
    Exact(u64),
    /// Search stopped; the area is at least `lower`.
    Interrupted {
        lower: u64,
        expanded: u64,
    },
}

type State = Vec<i16>;

struct Moves {
    /// relator permutations keyed by the signed value of their last letter
    by_last: HashMap<i16, Vec<Vec<i16>>>,
}

impl Moves {
    fn new(relators: &[Word]) -> Self {
        let mut all: Vec<Vec<i16>> = Vec::new();
        for rel in relators {
            for base in [rel.clone(), rel.inverse()] {
                let s: Vec<i16> = base.letters().iter().map(|l| l.signed()).collect();
                for k in 0..s.len() {
                    let mut rot = s[k..].to_vec();
                    rot.extend_from_slice(&s[..k]);
                    if !all.contains(&rot) {
                        all.push(rot);
                    }
                }
            }
        }
        let mut by_last: HashMap<i16, Vec<Vec<i16>>> = HashMap::new();
        for p in all {
            if let Some(&last) = p.last() {
                by_last.entry(last).or_default().push(p);
            }
        }
        Moves { by_last }
    }
}

fn reduce_signed(s: &[i16]) -> Vec<i16> {
    let mut out: Vec<i16> = Vec::with_capacity(s.len());
    for &x in s {
        if out.last() == Some(&-x) {
            out.pop();
        } else {
            out.push(x);
        }
    }
    out
}

/// Cyclic reduction then the least rotation of the word or its inverse.
fn canonical(reduced: Vec<i16>) -> State {
    let mut s = reduced;
    let (mut a, mut b) = (0usize, s.len());
    while b - a >= 2 && s[a] == -s[b - 1] {
        a += 1;
        b -= 1;
    }
    s = s[a..b].to_vec();
    let n = s.len();
    if n == 0 {
        return s;
    }
    let inv: Vec<i16> = s.iter().rev().map(|x| -x).collect();
    let mut best: Option<(usize, bool)> = None;
    let at = |src: &Vec<i16>, k: usize, i: usize| src[(k + i) % n];
    for (flag, src) in [(false, &s), (true, &inv)] {
        for k in 0..n {
            let better = match best {
                None => true,
                Some((bk, bf)) => {
                    let other = if bf { &inv } else { &s };
                    (0..n)
                        .map(|i| at(src, k, i).cmp(&at(other, bk, i)))
                        .find(|o| o.is_ne())
                        .is_some_and(|o| o.is_lt())
                }
            };
            if better {
                best = Some((k, flag));
            }
        }
    }
    let (k, flag) = best.expect("nonempty");
    let src = if flag { &inv } else { &s };
    (0..n).map(|i| at(src, k, i)).collect()
}

/// Σ_{i<j} |signed area in plane (i, j)| of a closed cyclic word in `ℤ^r`.
fn plane_area_bound(s: &[i16], r: usize) -> u64 {
    let mut pos = vec![0i64; r];
    let mut signed = vec![0i64; r * r];
    for &x in s {
        let g = x.unsigned_abs() as usize - 1;
        let sign = i64::from(x.signum());
        for i in 0..g {
            signed[i * r + g] += pos[i] * sign;
        }
        pos[g] += sign;
    }
    signed.iter().map(|x| x.unsigned_abs()).sum()
}

pub fn search_area(p: &AbelianPresentation, w: &Word, cfg: &OracleConfig) -> Result<OracleOutcome> {
    if w.is_lazy() {
        return Err(Error::LazyWord);
    }
    p.alphabet().check(w)?;
    if !p.is_identity(w)? {
        return Err(Error::NotClosed(w.to_string()));
    }
    let relators = p.area_relators();
    let max_rel = relators.iter().map(|r| r.len()).max().unwrap_or(0);
    let reduced: Vec<i16> = reduce_letters(w.letters())
        .iter()
        .map(|l| l.signed())
        .collect();
    let cap = reduced.len() + cfg.slack.unwrap_or(2 * max_rel);
    let start = canonical(reduced);
    if start.is_empty() {
        return Ok(OracleOutcome::Exact(0));
    }

    let guided = p.is_standard_free_abelian();
    let r = p.rank();
    let h = |s: &[i16]| if guided { plane_area_bound(s, r) } else { 0 };

    let moves = Moves::new(relators);
    let mut best: HashMap<State, u64> = HashMap::new();
    let mut buckets: Vec<Vec<(State, u64)>> = Vec::new();
    let push = |buckets: &mut Vec<Vec<(State, u64)>>, f: u64, item: (State, u64)| {
        let f = f as usize;
        if buckets.len() <= f {
            buckets.resize_with(f + 1, Vec::new);
        }
        buckets[f].push(item);
    };

    let h0 = h(&start);
    best.insert(start.clone(), 0);
    push(&mut buckets, h0, (start, 0));

    let mut expanded = 0u64;
    let mut f = 0usize;
    let mut scratch: Vec<i16> = Vec::with_capacity(cap + max_rel);
    while f < buckets.len() {
        let Some((state, g)) = buckets[f].pop() else {
            f += 1;
            continue;
        };
        if best.get(&state).is_some_and(|&b| b < g) {
            continue;
        }
        if state.is_empty() {
            return Ok(OracleOutcome::Exact(g));
        }
        expanded += 1;
        if expanded > cfg.max_nodes {
            return Ok(OracleOutcome::Interrupted {
                lower: f as u64,
                expanded,
            });
        }
        let n = state.len();
        for k in 0..n {
            let Some(perms) = moves.by_last.get(&-state[k]) else {
                continue;
            };
            for sigma in perms {
                scratch.clear();
                scratch.extend_from_slice(&state[..k]);
                scratch.extend_from_slice(sigma);
                scratch.extend_from_slice(&state[k..]);
                let next = canonical(reduce_signed(&scratch));
                if next.len() > cap {
                    continue;
                }
                let ng = g + 1;
                if best.get(&next).is_none_or(|&b| ng < b) {
                    let nf = ng + h(&next);
                    best.insert(next.clone(), ng);
                    push(&mut buckets, nf, (next, ng));
                }
            }
        }
    }
    Ok(OracleOutcome::Interrupted {
        lower: f as u64,
        expanded,
    })
}
