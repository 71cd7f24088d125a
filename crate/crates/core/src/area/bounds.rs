//! Certified lower and upper bounds on filling areas away from `ℤ²`.

use crate::presentation::AbelianPresentation;
use crate::words::{reduce_letters, Letter, Word};
use crate::{Error, Result};

/// `Σ_{i<j} |signed area of the projection to the (i, j) plane|`.
///
/// A lower bound on the area of a closed word for `ℤ^r` presented by all
/// commutators: each commutator changes the signed area of exactly one
/// coordinate plane by ±1, and free reduction changes none.
pub fn area_lower_zr(w: &Word, r: usize) -> Result<u64> {
    if w.is_lazy() {
        return Err(Error::LazyWord);
    }
    let letters = w.letters();
    let mut pos = vec![0i64; r];
    // signed[i][j] accumulates Σ x_i · dx_j over steps in direction j, i < j
    let mut signed = vec![vec![0i64; r]; r];
    for l in letters {
        let g = l
            .generator()
            .filter(|&g| g <= r)
            .ok_or_else(|| Error::LetterOutOfRange(l.to_string(), r))?
            - 1;
        let s = l.sign();
        for (i, row) in signed.iter_mut().enumerate().take(g) {
            row[g] += pos[i] * s;
        }
        pos[g] += s;
    }
    if pos.iter().any(|&x| x != 0) {
        return Err(Error::NotClosed(format!("endpoint {pos:?}")));
    }
    Ok(signed
        .iter()
        .flat_map(|row| row.iter())
        .map(|x| x.unsigned_abs())
        .sum())
}

/// Commutator cost of sorting a word into generator order: the number of
/// pairs `p < q` with `gen(w_p) > gen(w_q)`. Each adjacent transposition of
/// letters on different generators is one commutator relation, so this bounds
/// the commutator area of any word whose exponent vector is zero. At most
/// `p(p-1)/2` for perimeter `p`.
pub fn sort_filling_upper(letters: &[Letter], r: usize) -> u64 {
    let mut seen = vec![0u64; r + 1];
    let mut inversions = 0u64;
    for l in letters.iter().rev() {
        let g = l.generator().unwrap_or(0);
        if g > 0 {
            inversions += seen[1..g].iter().sum::<u64>();
            seen[g] += 1;
        }
    }
    inversions
}

/// A certified upper bound on the area of a word equal to the identity in an
/// arbitrary abelian presentation.
///
/// The exponent vector `v` of `w` lies in the image of the relation matrix;
/// an integer preimage `x` is read off the Smith normal form. With
/// `W = Π r_j^{x_j}`, `w = (w W⁻¹) · W`: the first factor has zero exponent
/// sum and is filled by commutators (sorting cost), the second uses `Σ|x_j|`
/// relators.
pub fn general_upper(p: &AbelianPresentation, w: &Word) -> Result<u64> {
    let v = p.abelianize(w)?;
    let r = p.rank();
    if v.iter().all(|&x| x == 0) {
        return Ok(sort_filling_upper(&reduce_letters(w.letters()), r));
    }
    let snf = p.snf();
    let uv = snf.u.mul_vec(&v);
    let cols = p.relators().len();
    let mut y = vec![0i64; cols];
    for (i, &c) in uv.iter().enumerate() {
        let d = snf.diagonal.get(i).copied().unwrap_or(0);
        if d == 0 {
            if c != 0 {
                return Err(Error::NotClosed(format!("exponent vector {v:?}")));
            }
        } else if c % d != 0 {
            return Err(Error::NotClosed(format!("exponent vector {v:?}")));
        } else {
            y[i] = c / d;
        }
    }
    let x = snf.v.mul_vec(&y);
    let mut product: Vec<Letter> = Vec::new();
    let mut relator_cost = 0u64;
    for (rel, &k) in p.relators().iter().zip(&x) {
        let piece = if k < 0 { rel.inverse() } else { rel.clone() };
        for _ in 0..k.unsigned_abs() {
            product.extend_from_slice(piece.letters());
        }
        relator_cost += k.unsigned_abs();
    }
    let mut rest: Vec<Letter> = w.letters().to_vec();
    rest.extend(product.iter().rev().map(|l| l.inverse()));
    Ok(relator_cost + sort_filling_upper(&reduce_letters(&rest), r))
}
