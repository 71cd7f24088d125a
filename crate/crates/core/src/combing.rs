//! Geodesic combings: one geodesic word `T[v]` from the identity to every
//! element, translated to pairs by `T[u, v] = u · T[u⁻¹ v]`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::RwLock;

use serde::Serialize;

use crate::presentation::{AbelianPresentation, CanonicalForm};
use crate::words::{Letter, Word};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CombingKind {
    /// All `a_1` steps, then all `a_2` steps, and so on. `ℤ^r` only.
    Staircase,
    /// Breadth-first tree from the identity, neighbours visited in letter
    /// order `a1 < A1 < a2 < ...`.
    BfsLex,
}

impl fmt::Display for CombingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CombingKind::Staircase => "staircase",
            CombingKind::BfsLex => "bfs-lex",
        })
    }
}

impl FromStr for CombingKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "staircase" => Ok(CombingKind::Staircase),
            "bfs-lex" => Ok(CombingKind::BfsLex),
            _ => Err(Error::Parse(format!("unknown combing {s:?}"))),
        }
    }
}

#[derive(Debug, Default)]
struct BfsTree {
    parent: HashMap<CanonicalForm, Option<(CanonicalForm, Letter)>>,
    frontier: Vec<CanonicalForm>,
    radius: u64,
}

#[derive(Debug)]
pub struct GeodesicCombing {
    kind: CombingKind,
    group: AbelianPresentation,
    tree: RwLock<BfsTree>,
}

impl Clone for GeodesicCombing {
    fn clone(&self) -> Self {
        GeodesicCombing::new(&self.group, self.kind).expect("already validated")
    }
}

impl GeodesicCombing {
    pub fn new(group: &AbelianPresentation, kind: CombingKind) -> Result<Self> {
        if kind == CombingKind::Staircase && !group.is_free_abelian() {
            return Err(Error::InvalidParameter(
                "staircase combing needs a free abelian group".into(),
            ));
        }
        let identity = group.identity();
        let tree = BfsTree {
            parent: HashMap::from([(identity.clone(), None)]),
            frontier: vec![identity],
            radius: 0,
        };
        Ok(GeodesicCombing {
            kind,
            group: group.clone(),
            tree: RwLock::new(tree),
        })
    }

    /// Staircase on `ℤ^r`, BFS-lex elsewhere.
    pub fn default_for(group: &AbelianPresentation) -> Self {
        let kind = if group.is_free_abelian() {
            CombingKind::Staircase
        } else {
            CombingKind::BfsLex
        };
        Self::new(group, kind).expect("kind matches group")
    }

    pub fn kind(&self) -> CombingKind {
        self.kind
    }

    pub fn group(&self) -> &AbelianPresentation {
        &self.group
    }

    /// `T[v]`: a geodesic word from the identity to `v`.
    pub fn comb_to(&self, v: &CanonicalForm) -> Word {
        match self.kind {
            CombingKind::Staircase => staircase(&v.free),
            CombingKind::BfsLex => self.bfs_word(v),
        }
    }

    /// `T[u, v]` read as a word: the word of `T[u⁻¹ v]`.
    pub fn comb_between(&self, u: &CanonicalForm, v: &CanonicalForm) -> Word {
        let d = self.group.multiply(&self.group.inverse(u), v);
        self.comb_to(&d)
    }

    /// Closes `γ` (read from `base`) through the combing: `γ · T[ιγ, τγ]⁻¹`.
    pub fn close_path(&self, gamma: &Word, base: &CanonicalForm) -> Result<Word> {
        let end = self.group.multiply(base, &self.group.element_of(gamma)?);
        let back = self.comb_between(base, &end);
        Ok(gamma.concat(&back.inverse()))
    }

    fn bfs_word(&self, v: &CanonicalForm) -> Word {
        {
            let tree = self.tree.read().expect("combing cache poisoned");
            if tree.parent.contains_key(v) {
                return trace(&tree, v);
            }
        }
        let mut tree = self.tree.write().expect("combing cache poisoned");
        let letters: Vec<Letter> = self.group.alphabet().letters().collect();
        while !tree.parent.contains_key(v) {
            assert!(
                !tree.frontier.is_empty(),
                "element {v} not reachable in the Cayley graph"
            );
            let frontier = std::mem::take(&mut tree.frontier);
            let mut next = Vec::new();
            for x in &frontier {
                for &l in &letters {
                    let y = self.group.step(x, l);
                    if !tree.parent.contains_key(&y) {
                        tree.parent.insert(y.clone(), Some((x.clone(), l)));
                        next.push(y);
                    }
                }
            }
            tree.frontier = next;
            tree.radius += 1;
        }
        trace(&tree, v)
    }
}

fn trace(tree: &BfsTree, v: &CanonicalForm) -> Word {
    let mut letters = Vec::new();
    let mut cur = v;
    while let Some(Some((p, l))) = tree.parent.get(cur) {
        letters.push(*l);
        cur = p;
    }
    letters.reverse();
    Word::from_letters_unchecked(letters)
}

/// Staircase word for a vector of `ℤ^r`.
pub fn staircase(v: &[i64]) -> Word {
    let mut letters = Vec::with_capacity(v.iter().map(|x| x.unsigned_abs() as usize).sum());
    for (i, &x) in v.iter().enumerate() {
        let l = Letter::new(i + 1, x < 0);
        letters.extend(std::iter::repeat_n(l, x.unsigned_abs() as usize));
    }
    Word::from_letters_unchecked(letters)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn z2() -> AbelianPresentation {
        AbelianPresentation::builtin("z2").unwrap()
    }

    fn cf(v: &[i64]) -> CanonicalForm {
        CanonicalForm::free_only(v)
    }

    #[test]
    fn staircase_examples() {
        let c = GeodesicCombing::new(&z2(), CombingKind::Staircase).unwrap();
        assert_eq!(c.comb_to(&cf(&[2, 1])).to_string(), "a1 a1 a2");
        assert!(c.comb_to(&cf(&[0, 0])).is_empty());
        assert_eq!(c.comb_to(&cf(&[-1, 2])).to_string(), "A1 a2 a2");
        assert_eq!(c.comb_between(&cf(&[1, 0]), &cf(&[1, 1])).to_string(), "a2");
        assert!(c.comb_between(&cf(&[3, 3]), &cf(&[3, 3])).is_empty());
        assert_eq!(
            c.comb_between(&cf(&[2, 1]), &cf(&[0, 0])).to_string(),
            "A1 A1 A2"
        );
    }

    #[test]
    fn staircase_rejects_torsion() {
        let p = AbelianPresentation::builtin("z10").unwrap();
        assert!(GeodesicCombing::new(&p, CombingKind::Staircase).is_err());
        assert_eq!(GeodesicCombing::default_for(&p).kind(), CombingKind::BfsLex);
    }

    #[test]
    fn close_path_examples() {
        let p = z2();
        let c = GeodesicCombing::default_for(&p);
        let e = p.identity();
        let g: Word = "a1 a2".parse().unwrap();
        assert_eq!(c.close_path(&g, &e).unwrap().to_string(), "a1 a2 A2 A1");
        let closed: Word = "a1 a2 A1 A2".parse().unwrap();
        assert_eq!(c.close_path(&closed, &e).unwrap(), closed);
        let lazy: Word = "a1 e".parse().unwrap();
        assert!(c.close_path(&lazy, &e).is_err());
    }

    #[test]
    fn parse_kind() {
        assert_eq!(
            "bfs-lex".parse::<CombingKind>().unwrap(),
            CombingKind::BfsLex
        );
        assert_eq!(CombingKind::Staircase.to_string(), "staircase");
        assert!("tree".parse::<CombingKind>().is_err());
    }

    #[test]
    fn combings_are_geodesic_on_balls() {
        for p in [
            z2(),
            AbelianPresentation::builtin("z3").unwrap(),
            AbelianPresentation::builtin("z10").unwrap(),
            AbelianPresentation::builtin("zxz2").unwrap(),
        ] {
            let radius = if p.rank() == 3 { 8 } else { 20 };
            let ball = p.ball_distances(radius);
            let mut kinds = vec![CombingKind::BfsLex];
            if p.is_free_abelian() {
                kinds.push(CombingKind::Staircase);
            }
            for kind in kinds {
                let c = GeodesicCombing::new(&p, kind).unwrap();
                for x in enumerate_ball(&p, radius) {
                    let t = c.comb_to(&x);
                    assert_eq!(t.len() as u32, ball.get(&x).unwrap(), "{kind} {x}");
                    assert_eq!(p.element_of(&t).unwrap(), x);
                    assert_eq!(c.comb_to(&x), t, "deterministic");
                }
            }
        }
    }

    fn enumerate_ball(p: &AbelianPresentation, radius: u64) -> Vec<CanonicalForm> {
        let letters: Vec<Letter> = p.alphabet().letters().collect();
        let mut seen = std::collections::BTreeSet::from([p.identity()]);
        let mut frontier = vec![p.identity()];
        for _ in 0..radius {
            let mut next = Vec::new();
            for x in &frontier {
                for &l in &letters {
                    let y = p.step(x, l);
                    if seen.insert(y.clone()) {
                        next.push(y);
                    }
                }
            }
            frontier = next;
        }
        seen.into_iter().collect()
    }

    #[test]
    fn translation_identity_and_closure() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for p in [z2(), AbelianPresentation::builtin("zxz2").unwrap()] {
            let c = GeodesicCombing::default_for(&p);
            for _ in 0..1000 {
                let u = p.canonical_form(&[rng.random_range(-9..=9), rng.random_range(-9..=9)]);
                let v = p.canonical_form(&[rng.random_range(-9..=9), rng.random_range(-9..=9)]);
                let d = p.multiply(&p.inverse(&u), &v);
                assert_eq!(c.comb_between(&u, &v), c.comb_to(&d));
                let n = rng.random_range(0..16);
                let g = Word::new(
                    (0..n)
                        .map(|_| Letter::from_ordinal(rng.random_range(0..4), 2))
                        .collect(),
                )
                .unwrap();
                let closed = c.close_path(&g, &u).unwrap();
                assert!(p.is_identity(&closed).unwrap());
                assert!(closed.len() <= 2 * g.len());
            }
        }
    }
}
