//! Filling areas of closed words and of open paths closed through a combing.
//!
//! On `ℤ² = ⟨a, b | [a, b]⟩` the area is the L1 norm of the winding field
//! (validated against the search oracle in the test suite). Elsewhere areas
//! come as certified intervals, tightened by the oracle for short words.

mod bounds;
mod oracle;
mod winding;

use serde::Serialize;

pub use bounds::{area_lower_zr, general_upper, sort_filling_upper};
pub use oracle::{search_area, OracleConfig, OracleOutcome};
pub use winding::{area_exact_z2, winding_field, WindingField};

pub(crate) use winding::winding_l1;

use crate::combing::GeodesicCombing;
use crate::presentation::{AbelianPresentation, CanonicalForm};
use crate::words::{reduce_letters, Word};
use crate::{Error, Execution, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AreaResult {
    pub lower: u64,
    pub upper: u64,
    pub exact: bool,
}

impl AreaResult {
    pub fn exact(a: u64) -> Self {
        AreaResult {
            lower: a,
            upper: a,
            exact: true,
        }
    }

    pub fn bounds(lower: u64, upper: u64) -> Self {
        assert!(lower <= upper, "empty interval [{lower}, {upper}]");
        AreaResult {
            lower,
            upper,
            exact: lower == upper,
        }
    }

    pub fn value(&self) -> Option<u64> {
        self.exact.then_some(self.lower)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AreaOptions {
    pub oracle: OracleConfig,
    /// Run the oracle when bounds disagree and `|w|_F` is at most this.
    pub oracle_max_len: usize,
    #[serde(skip)]
    pub exec: Execution,
}

impl Default for AreaOptions {
    fn default() -> Self {
        AreaOptions {
            oracle: OracleConfig::default(),
            oracle_max_len: 16,
            exec: Execution::default(),
        }
    }
}

/// Exact minimal area by search; an interval if the node budget runs out.
pub fn area_oracle(p: &AbelianPresentation, w: &Word, cfg: &OracleConfig) -> Result<AreaResult> {
    match search_area(p, w, cfg)? {
        OracleOutcome::Exact(a) => Ok(AreaResult::exact(a)),
        OracleOutcome::Interrupted { lower, .. } => {
            let upper = general_upper(p, w)?;
            Ok(AreaResult::bounds(lower.min(upper), upper))
        }
    }
}

/// Area of a word equal to the identity in `p`.
pub fn area_closed(p: &AbelianPresentation, w: &Word, opts: &AreaOptions) -> Result<AreaResult> {
    if w.is_lazy() {
        return Err(Error::LazyWord);
    }
    p.alphabet().check(w)?;
    if p.is_standard_z2() {
        return Ok(AreaResult::exact(winding_l1(w.letters())?));
    }
    if !p.is_identity(w)? {
        return Err(Error::NotClosed(w.to_string()));
    }
    let lower = if p.is_standard_free_abelian() {
        area_lower_zr(w, p.rank())?
    } else {
        0
    };
    let upper = general_upper(p, w)?;
    let mut result = AreaResult::bounds(lower, upper);
    if !result.exact && reduce_letters(w.letters()).len() <= opts.oracle_max_len {
        let o = area_oracle(p, w, &opts.oracle)?;
        result = AreaResult::bounds(result.lower.max(o.lower), result.upper.min(o.upper));
    }
    Ok(result)
}

/// `area(γ) = area(γ γ̃⁻¹)` with `γ̃` the combing path between the endpoints.
pub fn area_open(
    p: &AbelianPresentation,
    c: &GeodesicCombing,
    gamma: &Word,
    opts: &AreaOptions,
) -> Result<AreaResult> {
    let closed = c.close_path(gamma, &p.identity())?;
    area_closed(p, &closed, opts)
}

/// Area of a loop based at `u`, read after conjugating back to the identity:
/// `area(T[e,u] γ T[e,u]⁻¹)`.
pub fn area_closed_at(
    p: &AbelianPresentation,
    c: &GeodesicCombing,
    gamma: &Word,
    u: &CanonicalForm,
    opts: &AreaOptions,
) -> Result<AreaResult> {
    if !p.is_identity(gamma)? {
        return Err(Error::NotClosed(format!("{gamma} is not closed at {u}")));
    }
    let t = c.comb_to(u);
    let conj = t.concat(gamma).concat(&t.inverse());
    area_closed(p, &conj, opts)
}

/// Upper bound on `area_open(γ)` by recursive halving: split `γ = γ₁γ₂`,
/// add the areas of both halves and of the geodesic triangle
/// `γ̃₁ γ̃₂ γ̃⁻¹`. Paths of length at most `leaf_size` are filled directly.
pub fn area_upper_dc(
    p: &AbelianPresentation,
    c: &GeodesicCombing,
    gamma: &Word,
    leaf_size: usize,
    opts: &AreaOptions,
) -> Result<u64> {
    if gamma.is_lazy() {
        return Err(Error::LazyWord);
    }
    p.alphabet().check(gamma)?;
    dc(p, c, gamma, leaf_size.max(1), opts)
}

fn dc(
    p: &AbelianPresentation,
    c: &GeodesicCombing,
    gamma: &Word,
    leaf_size: usize,
    opts: &AreaOptions,
) -> Result<u64> {
    if gamma.len() <= leaf_size {
        return Ok(area_open(p, c, gamma, opts)?.upper);
    }
    let mid = gamma.len() / 2;
    let first = Word::from_letters_unchecked(gamma.letters()[..mid].to_vec());
    let second = Word::from_letters_unchecked(gamma.letters()[mid..].to_vec());
    let g1 = p.element_of(&first)?;
    let g2 = p.element_of(&second)?;
    let g = p.multiply(&g1, &g2);
    let triangle = c
        .comb_to(&g1)
        .concat(&c.comb_to(&g2))
        .concat(&c.comb_to(&g).inverse());
    let (a, b) = opts.exec.join(
        || dc(p, c, &first, leaf_size, opts),
        || dc(p, c, &second, leaf_size, opts),
    );
    Ok(a? + b? + area_closed(p, &triangle, opts)?.upper)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combing::CombingKind;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn z2() -> AbelianPresentation {
        AbelianPresentation::builtin("z2").unwrap()
    }

    #[test]
    fn open_area_examples() {
        let p = z2();
        let c = GeodesicCombing::new(&p, CombingKind::Staircase).unwrap();
        let o = AreaOptions::default();
        assert_eq!(
            area_open(&p, &c, &w("a1 a2"), &o).unwrap(),
            AreaResult::exact(0)
        );
        assert_eq!(
            area_open(&p, &c, &w("a2 a1"), &o).unwrap(),
            AreaResult::exact(1)
        );
        let geo = c.comb_to(&CanonicalForm::free_only(&[3, -4]));
        assert_eq!(area_open(&p, &c, &geo, &o).unwrap(), AreaResult::exact(0));
    }

    #[test]
    fn closed_at_examples() {
        let p = z2();
        let c = GeodesicCombing::default_for(&p);
        let o = AreaOptions::default();
        let u = CanonicalForm::free_only(&[5, 5]);
        assert_eq!(
            area_closed_at(&p, &c, &w("a1 a2 A1 A2"), &u, &o).unwrap(),
            AreaResult::exact(1)
        );
        assert_eq!(
            area_closed_at(&p, &c, &Word::empty(), &u, &o).unwrap(),
            AreaResult::exact(0)
        );
        assert_eq!(
            area_closed_at(
                &p,
                &c,
                &w("a2 a1 A2 A1"),
                &CanonicalForm::free_only(&[1, 0]),
                &o
            )
            .unwrap(),
            AreaResult::exact(1)
        );
        assert!(area_closed_at(&p, &c, &w("a1"), &u, &o).is_err());
    }

    #[test]
    fn closed_area_rejects_open_words() {
        let o = AreaOptions::default();
        assert!(matches!(
            area_closed(&z2(), &w("a1 a1"), &o),
            Err(Error::NotClosed(_))
        ));
        let z3 = AbelianPresentation::builtin("z3").unwrap();
        assert!(matches!(
            area_closed(&z3, &w("a3"), &o),
            Err(Error::NotClosed(_))
        ));
    }

    #[test]
    fn non_z2_groups_use_bounds_and_oracle() {
        let o = AreaOptions::default();
        let z3 = AbelianPresentation::builtin("z3").unwrap();
        let r = area_closed(&z3, &w("a1 a2 A1 A2 a2 a3 A2 A3"), &o).unwrap();
        assert_eq!(r, AreaResult::exact(2));
        let z10 = AbelianPresentation::builtin("z10").unwrap();
        let ten = Word::new(vec![crate::words::Letter::gen(1); 10]).unwrap();
        assert_eq!(area_closed(&z10, &ten, &o).unwrap(), AreaResult::exact(1));
        let zxz2 = AbelianPresentation::builtin("zxz2").unwrap();
        assert_eq!(
            area_closed(&zxz2, &w("a2 a1 a2 A1"), &o).unwrap(),
            AreaResult::exact(2)
        );
        // oracle switched off: an honest interval
        let off = AreaOptions {
            oracle_max_len: 0,
            ..o
        };
        let r = area_closed(&zxz2, &w("a2 a1 a2 A1"), &off).unwrap();
        assert!(r.lower <= 2 && r.upper >= 2);
    }

    #[test]
    fn divide_and_conquer_is_an_upper_bound() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        let p = z2();
        let c = GeodesicCombing::default_for(&p);
        let o = AreaOptions::default();
        let mut done = 0;
        while done < 1000 {
            let letters: Vec<_> = (0..20)
                .map(|_| crate::words::Letter::from_ordinal(rng.random_range(0..4), 2))
                .collect();
            let g = Word::new(letters).unwrap();
            if !p.is_identity(&g).unwrap() {
                continue;
            }
            done += 1;
            let exact = area_exact_z2(&g).unwrap();
            for leaf in [1, 3, 8] {
                assert!(area_upper_dc(&p, &c, &g, leaf, &o).unwrap() >= exact);
            }
        }
        let geo = c.comb_to(&CanonicalForm::free_only(&[4, -7]));
        assert_eq!(area_upper_dc(&p, &c, &geo, 2, &o).unwrap(), 0);
    }

    #[test]
    fn divide_and_conquer_on_z3() {
        let p = AbelianPresentation::builtin("z3").unwrap();
        let c = GeodesicCombing::default_for(&p);
        let o = AreaOptions::default();
        let g = w("a1 a2 a3 A1 A2 A3 a3 a2 a1 A3 A2 A1");
        let exact = area_oracle(&p, &g, &o.oracle).unwrap();
        assert!(exact.exact);
        assert!(area_upper_dc(&p, &c, &g, 2, &o).unwrap() >= exact.lower);
        assert!(area_lower_zr(&g, 3).unwrap() <= exact.lower);
    }
}
