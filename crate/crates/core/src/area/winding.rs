//! Winding numbers of closed loops in the square lattice.
//!
//! A loop in `ℤ²` (generator 1 is the x direction, generator 2 the y
//! direction) is cut by each horizontal line `y + 1/2` at its vertical steps.
//! The winding number of the unit cell `[x, x+1] × [y, y+1]` is the signed
//! count of vertical steps in row `y` strictly to its right: up steps count
//! `+1`, down steps `-1`.

use std::collections::BTreeMap;

use crate::words::{Letter, Word};
use crate::{Error, Result};

/// Nonzero winding numbers keyed by the lower-left corner of the unit cell.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct WindingField {
    cells: BTreeMap<(i64, i64), i64>,
}

impl WindingField {
    pub fn get(&self, x: i64, y: i64) -> i64 {
        self.cells.get(&(x, y)).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = ((i64, i64), i64)> + '_ {
        self.cells.iter().map(|(k, v)| (*k, *v))
    }

    /// Number of cells with nonzero winding.
    pub fn support_len(&self) -> usize {
        self.cells.len()
    }

    pub fn l1(&self) -> u64 {
        self.cells.values().map(|w| w.unsigned_abs()).sum()
    }

    /// Σ winding, the signed (algebraic) area of the loop.
    pub fn signed_sum(&self) -> i64 {
        self.cells.values().sum()
    }
}

/// Vertical crossings `(row, x, ±1)` of a closed ℤ² loop; also validates it.
fn crossings(letters: &[Letter]) -> Result<Vec<(i64, i64, i64)>> {
    let (mut x, mut y) = (0i64, 0i64);
    let mut out = Vec::with_capacity(letters.len() / 2 + 1);
    for l in letters {
        match l.signed() {
            1 => x += 1,
            -1 => x -= 1,
            2 => {
                out.push((y, x, 1));
                y += 1;
            }
            -2 => {
                y -= 1;
                out.push((y, x, -1));
            }
            0 => return Err(Error::LazyWord),
            _ => return Err(Error::LetterOutOfRange(l.to_string(), 2)),
        }
    }
    if (x, y) != (0, 0) {
        return Err(Error::NotClosed(format!("loop ends at ({x},{y})")));
    }
    out.sort_unstable();
    Ok(out)
}

/// Runs of constant winding per row: `(row, x_from, x_to, winding)` covering
/// cells `x_from <= x < x_to`.
fn row_runs(cr: &[(i64, i64, i64)], mut emit: impl FnMut(i64, i64, i64, i64)) {
    let mut i = 0;
    while i < cr.len() {
        let row = cr[i].0;
        let mut j = i;
        while j < cr.len() && cr[j].0 == row {
            j += 1;
        }
        // winding of cells left of the first crossing is the row total, 0 for a closed loop
        let mut running: i64 = 0;
        for k in i..j - 1 {
            running += cr[k].2;
            let (from, to) = (cr[k].1, cr[k + 1].1);
            if running != 0 && to > from {
                // cells x with from <= x < to see the crossings at positions > x,
                // whose sum is -(sum of crossings at positions <= x) = -running
                emit(row, from, to, -running);
            }
        }
        i = j;
    }
}

pub fn winding_field(w: &Word) -> Result<WindingField> {
    if w.is_lazy() {
        return Err(Error::LazyWord);
    }
    let cr = crossings(w.letters())?;
    let mut cells = BTreeMap::new();
    row_runs(&cr, |row, from, to, wind| {
        for x in from..to {
            cells.insert((x, row), wind);
        }
    });
    Ok(WindingField { cells })
}

/// `Σ_cells |winding|` for a closed ℤ² loop.
pub fn area_exact_z2(w: &Word) -> Result<u64> {
    if w.is_lazy() {
        return Err(Error::LazyWord);
    }
    winding_l1(w.letters())
}

pub(crate) fn winding_l1(letters: &[Letter]) -> Result<u64> {
    let cr = crossings(letters)?;
    let mut total = 0u64;
    row_runs(&cr, |_, from, to, wind| {
        total += wind.unsigned_abs() * (to - from) as u64;
    });
    Ok(total)
}
