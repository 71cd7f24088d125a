//! Finite presentations of abelian groups `G = ⟨a_1..a_r | R⟩`.
//!
//! Membership and element identity only ever look at exponent vectors: the
//! group is `ℤ^r / im(M)` where the columns of `M` are the abelianized
//! relators. Commutators `[a_i, a_j]` are implied; they are added to the
//! relator set used for areas when the caller does not list them.
//!
//! File format:
//!
//! ```text
//! generators 2
//! relator a1 a2 A1 A2
//! relator a2 a2
//! ```

mod snf;

use std::collections::{HashMap, VecDeque};
use std::fmt;

use serde::Serialize;
use smallvec::SmallVec;

pub use snf::{smith_normal_form, IntMatrix, SnfData};

use crate::words::{Alphabet, Letter, Word};
use crate::{Error, Result};

/// Canonical coordinates of a group element: free coordinates followed by
/// torsion residues in `[0, d_i)`. Equal forms means equal elements.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize)]
pub struct CanonicalForm {
    pub free: SmallVec<[i64; 4]>,
    pub torsion: SmallVec<[i64; 2]>,
}

impl CanonicalForm {
    pub fn free_only(v: &[i64]) -> Self {
        CanonicalForm {
            free: v.iter().copied().collect(),
            torsion: SmallVec::new(),
        }
    }

    pub fn l1_free(&self) -> u64 {
        self.free.iter().map(|x| x.unsigned_abs()).sum()
    }
}

impl fmt::Display for CanonicalForm {
    /// `(x1,x2)` for free coordinates, torsion residues after `;`: `(5;1)`, `(;4)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, x) in self.free.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        if !self.torsion.is_empty() {
            f.write_str(";")?;
            for (i, x) in self.torsion.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{x}")?;
            }
        }
        f.write_str(")")
    }
}

impl fmt::Debug for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Coordinate {
    Trivial,
    Free,
    Torsion(i64),
}

#[derive(Clone)]
pub struct AbelianPresentation {
    r: usize,
    relators: Vec<Word>,
    area_relators: Vec<Word>,
    relation_matrix: IntMatrix,
    snf: SnfData,
    coords: Vec<Coordinate>,
    generator_images: Vec<CanonicalForm>,
    name: String,
}

impl fmt::Debug for AbelianPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AbelianPresentation")
            .field("name", &self.name)
            .field("r", &self.r)
            .field("relators", &self.relators)
            .field("invariants", &self.snf.diagonal)
            .finish()
    }
}

/// Exponent sum per generator: `v_i = #a_i - #a_i⁻¹`.
pub fn abelianize(w: &Word, r: usize) -> Result<Vec<i64>> {
    if w.is_lazy() {
        return Err(Error::LazyWord);
    }
    let mut v = vec![0i64; r];
    for l in w.letters() {
        let i = l
            .generator()
            .filter(|&i| i <= r)
            .ok_or_else(|| Error::LetterOutOfRange(l.to_string(), r))?;
        v[i - 1] += l.sign();
    }
    Ok(v)
}

pub fn commutator(i: usize, j: usize) -> Word {
    Word::new(vec![
        Letter::gen(i),
        Letter::gen(j),
        Letter::inv(i),
        Letter::inv(j),
    ])
    .expect("no pauses")
}

/// True when `w` is a cyclic permutation of `c` or of `c⁻¹`.
pub(crate) fn cyclically_equivalent(w: &Word, c: &Word) -> bool {
    if w.len() != c.len() {
        return false;
    }
    let n = w.len();
    if n == 0 {
        return true;
    }
    let ci = c.inverse();
    (0..n).any(|s| {
        (0..n).all(|k| w.letters()[(k + s) % n] == c.letters()[k])
            || (0..n).all(|k| w.letters()[(k + s) % n] == ci.letters()[k])
    })
}

impl AbelianPresentation {
    pub fn new(r: usize, relators: Vec<Word>) -> Result<Self> {
        Self::named(r, relators, String::from("custom"))
    }

    fn named(r: usize, relators: Vec<Word>, name: String) -> Result<Self> {
        let alphabet = Alphabet::new(r)?;
        for w in &relators {
            if w.is_lazy() {
                return Err(Error::LazyWord);
            }
            alphabet.check(w)?;
        }
        let columns = relators
            .iter()
            .map(|w| abelianize(w, r))
            .collect::<Result<Vec<_>>>()?;
        let relation_matrix = IntMatrix::from_columns(r, &columns);
        let snf = smith_normal_form(&relation_matrix);
        let coords: Vec<Coordinate> = (0..r)
            .map(|i| match snf.diagonal.get(i).copied().unwrap_or(0) {
                0 => Coordinate::Free,
                1 => Coordinate::Trivial,
                d => Coordinate::Torsion(d),
            })
            .collect();

        let mut area_relators = relators.clone();
        for i in 1..=r {
            for j in i + 1..=r {
                let c = commutator(i, j);
                if !relators.iter().any(|w| cyclically_equivalent(w, &c)) {
                    area_relators.push(c);
                }
            }
        }
        area_relators.retain(|w| !w.is_empty());

        let mut p = AbelianPresentation {
            r,
            relators,
            area_relators,
            relation_matrix,
            snf,
            coords,
            generator_images: Vec::new(),
            name,
        };
        p.generator_images = (0..r)
            .map(|i| {
                let mut e = vec![0i64; r];
                e[i] = 1;
                p.canonical_form(&e)
            })
            .collect();
        Ok(p)
    }

    /// `ℤ^r` with every commutator `[a_i, a_j]`, `i < j`.
    pub fn free_abelian(r: usize) -> Result<Self> {
        let relators = (1..=r)
            .flat_map(|i| (i + 1..=r).map(move |j| commutator(i, j)))
            .collect();
        Self::named(r, relators, format!("z{r}"))
    }

    /// `ℤ/nℤ = ⟨a | a^n⟩`.
    pub fn cyclic(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter(
                "cyclic order must be positive".into(),
            ));
        }
        let relator = Word::new(vec![Letter::gen(1); n]).expect("no pauses");
        Self::named(1, vec![relator], format!("z/{n}"))
    }

    /// `ℤ × ℤ/2 = ⟨a, b | [a, b], b²⟩`.
    pub fn z_cross_z2() -> Self {
        let b2 = Word::new(vec![Letter::gen(2); 2]).expect("no pauses");
        Self::named(2, vec![commutator(1, 2), b2], "zxz2".into()).expect("valid presentation")
    }

    /// Builtin groups: `z<r>` is `ℤ^r` for `r ≤ 8`, except `z10` which is
    /// `ℤ/10ℤ`; `zxz2` is `ℤ × ℤ/2`; `z/<n>` is `ℤ/nℤ`.
    pub fn builtin(name: &str) -> Option<Self> {
        match name {
            "z10" => Self::cyclic(10).ok().map(|p| p.renamed("z10")),
            "zxz2" => Some(Self::z_cross_z2()),
            _ => {
                if let Some(n) = name.strip_prefix("z/") {
                    return n.parse().ok().and_then(|n| Self::cyclic(n).ok());
                }
                let r: usize = name.strip_prefix('z')?.parse().ok()?;
                (1..=8)
                    .contains(&r)
                    .then(|| Self::free_abelian(r).ok())
                    .flatten()
            }
        }
    }

    fn renamed(mut self, name: &str) -> Self {
        self.name = name.to_string();
        self
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut r: Option<usize> = None;
        let mut relators = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (head, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            match head {
                "generators" => {
                    if r.is_some() {
                        return Err(Error::Parse(format!(
                            "line {}: duplicate generators",
                            lineno + 1
                        )));
                    }
                    r = Some(rest.trim().parse().map_err(|_| {
                        Error::Parse(format!("line {}: bad generator count", lineno + 1))
                    })?);
                }
                "relator" => {
                    if r.is_none() {
                        return Err(Error::Parse(format!(
                            "line {}: relator before generators",
                            lineno + 1
                        )));
                    }
                    let w: Word = rest.parse()?;
                    if w.is_lazy() {
                        return Err(Error::Parse(format!(
                            "line {}: pause in relator",
                            lineno + 1
                        )));
                    }
                    relators.push(w);
                }
                other => {
                    return Err(Error::Parse(format!(
                        "line {}: unknown directive {other:?}",
                        lineno + 1
                    )))
                }
            }
        }
        let r = r.ok_or_else(|| Error::Parse("missing `generators` line".into()))?;
        Self::named(r, relators, "file".into())
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("generators {}\n", self.r);
        for w in &self.relators {
            s.push_str(&format!("relator {w}\n"));
        }
        s
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn rank(&self) -> usize {
        self.r
    }

    pub fn alphabet(&self) -> Alphabet {
        Alphabet::new(self.r).expect("r >= 1")
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    /// Relators used for filling areas: the given ones plus implied commutators.
    pub fn area_relators(&self) -> &[Word] {
        &self.area_relators
    }

    pub fn relation_matrix(&self) -> &IntMatrix {
        &self.relation_matrix
    }

    pub fn snf(&self) -> &SnfData {
        &self.snf
    }

    /// Nontrivial torsion orders in canonical-coordinate order.
    pub fn torsion_orders(&self) -> Vec<i64> {
        self.coords
            .iter()
            .filter_map(|c| match c {
                Coordinate::Torsion(d) => Some(*d),
                _ => None,
            })
            .collect()
    }

    pub fn free_rank(&self) -> usize {
        self.coords
            .iter()
            .filter(|c| **c == Coordinate::Free)
            .count()
    }

    /// `G = ℤ^r` on the standard generators (relation matrix zero).
    pub fn is_free_abelian(&self) -> bool {
        self.relation_matrix.is_zero()
    }

    /// `ℤ^r` presented by commutators of generators only.
    pub fn is_standard_free_abelian(&self) -> bool {
        self.is_free_abelian()
            && self.area_relators.iter().all(|w| {
                w.len() == 4
                    && (1..=self.r).any(|i| {
                        (i + 1..=self.r).any(|j| cyclically_equivalent(w, &commutator(i, j)))
                    })
            })
    }

    /// `ℤ² = ⟨a, b | [a, b]⟩`.
    pub fn is_standard_z2(&self) -> bool {
        self.r == 2 && self.is_standard_free_abelian()
    }

    pub fn abelianize(&self, w: &Word) -> Result<Vec<i64>> {
        abelianize(w, self.r)
    }

    pub fn canonical_form(&self, v: &[i64]) -> CanonicalForm {
        assert_eq!(v.len(), self.r, "vector length must equal generator count");
        if self.is_free_abelian() {
            return CanonicalForm::free_only(v);
        }
        let uv = self.snf.u.mul_vec(v);
        let mut out = CanonicalForm::default();
        for (x, c) in uv.into_iter().zip(&self.coords) {
            match c {
                Coordinate::Trivial => {}
                Coordinate::Free => out.free.push(x),
                Coordinate::Torsion(d) => out.torsion.push(x.rem_euclid(*d)),
            }
        }
        out
    }

    pub fn element_of(&self, w: &Word) -> Result<CanonicalForm> {
        Ok(self.canonical_form(&self.abelianize(w)?))
    }

    pub fn identity(&self) -> CanonicalForm {
        self.canonical_form(&vec![0; self.r])
    }

    pub fn is_identity(&self, w: &Word) -> Result<bool> {
        Ok(self.element_of(w)? == self.identity())
    }

    pub fn generator_image(&self, letter: Letter) -> CanonicalForm {
        let i = letter.generator().expect("pause has no image");
        let g = &self.generator_images[i - 1];
        if letter.is_inverse() {
            self.inverse(g)
        } else {
            g.clone()
        }
    }

    pub fn multiply(&self, a: &CanonicalForm, b: &CanonicalForm) -> CanonicalForm {
        let orders = self.torsion_orders();
        CanonicalForm {
            free: a.free.iter().zip(&b.free).map(|(x, y)| x + y).collect(),
            torsion: a
                .torsion
                .iter()
                .zip(&b.torsion)
                .zip(&orders)
                .map(|((x, y), d)| (x + y).rem_euclid(*d))
                .collect(),
        }
    }

    pub fn inverse(&self, a: &CanonicalForm) -> CanonicalForm {
        let orders = self.torsion_orders();
        CanonicalForm {
            free: a.free.iter().map(|x| -x).collect(),
            torsion: a
                .torsion
                .iter()
                .zip(&orders)
                .map(|(x, d)| (-x).rem_euclid(*d))
                .collect(),
        }
    }

    /// `g · letter`.
    pub fn step(&self, g: &CanonicalForm, letter: Letter) -> CanonicalForm {
        if letter.is_pause() {
            return g.clone();
        }
        self.multiply(g, &self.generator_image(letter))
    }

    /// Exact `|g|_G`. Free abelian groups use the L1 norm; otherwise a
    /// breadth-first search over canonical forms out to `radius_cap`.
    pub fn group_length(&self, g: &CanonicalForm, radius_cap: u64) -> Result<u64> {
        if self.is_free_abelian() {
            let d = g.l1_free();
            return if d <= radius_cap {
                Ok(d)
            } else {
                Err(Error::RadiusCapExceeded(radius_cap))
            };
        }
        let identity = self.identity();
        if *g == identity {
            return Ok(0);
        }
        let letters: Vec<Letter> = self.alphabet().letters().collect();
        let mut seen: HashMap<CanonicalForm, ()> = HashMap::new();
        seen.insert(identity.clone(), ());
        let mut frontier = vec![identity];
        for radius in 1..=radius_cap {
            let mut next = Vec::new();
            for x in &frontier {
                for &l in &letters {
                    let y = self.step(x, l);
                    if y == *g {
                        return Ok(radius);
                    }
                    if seen.insert(y.clone(), ()).is_none() {
                        next.push(y);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            frontier = next;
        }
        Err(Error::RadiusCapExceeded(radius_cap))
    }

    /// `|w|_G`, using `|w|_A` as the radius cap.
    pub fn word_length(&self, w: &Word) -> Result<u64> {
        let g = self.element_of(w)?;
        self.group_length(&g, w.len() as u64)
    }

    /// Breadth-first ball of the given radius: distances of every element.
    pub fn ball_distances(&self, radius: u64) -> BallDistances {
        let letters: Vec<Letter> = self.alphabet().letters().collect();
        let identity = self.identity();
        let mut dist = HashMap::new();
        dist.insert(identity.clone(), 0u32);
        let mut queue = VecDeque::from([identity]);
        while let Some(x) = queue.pop_front() {
            let d = dist[&x];
            if u64::from(d) == radius {
                continue;
            }
            for &l in &letters {
                let y = self.step(&x, l);
                if !dist.contains_key(&y) {
                    dist.insert(y.clone(), d + 1);
                    queue.push_back(y);
                }
            }
        }
        BallDistances { dist, radius }
    }
}

/// Word-metric distances from the identity for every element of a ball.
#[derive(Debug, Clone)]
pub struct BallDistances {
    dist: HashMap<CanonicalForm, u32>,
    radius: u64,
}

impl BallDistances {
    pub fn get(&self, g: &CanonicalForm) -> Option<u32> {
        self.dist.get(g).copied()
    }

    pub fn radius(&self) -> u64 {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.dist.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dist.is_empty()
    }
}
