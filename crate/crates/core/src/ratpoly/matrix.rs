//! Exact determinants and inertia of rational matrices.

use num_traits::{One, Signed, Zero};

use super::Rational;
use crate::error::{Error, Result};

/// A symmetric matrix of exact rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymMatrix {
    entries: Vec<Vec<Rational>>,
}

impl SymMatrix {
    /// Errors if `entries` is not square and symmetric.
    pub fn new(entries: Vec<Vec<Rational>>) -> Result<Self> {
        let n = entries.len();
        for (i, row) in entries.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Precondition("matrix is not square".into()));
            }
            for j in 0..i {
                if row[j] != entries[j][i] {
                    return Err(Error::Precondition("matrix is not symmetric".into()));
                }
            }
        }
        Ok(SymMatrix { entries })
    }

    pub fn from_ints(rows: &[&[i64]]) -> Result<Self> {
        Self::new(
            rows.iter()
                .map(|r| r.iter().map(|&v| super::int(v)).collect())
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Vec<Rational>] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i][j]
    }
}

/// Determinant by fraction-exact Gaussian elimination.
pub fn determinant(mut m: Vec<Vec<Rational>>) -> Rational {
    let n = m.len();
    let mut det = Rational::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return Rational::zero();
        };
        if piv != col {
            m.swap(piv, col);
            det = -det;
        }
        let p = m[col][col].clone();
        det *= &p;
        let pinv = p.recip();
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = &m[r][col] * &pinv;
            for c in col..n {
                let delta = &factor * &m[col][c];
                m[r][c] -= delta;
            }
        }
    }
    det
}

/// Rank and signature of the quadratic form, by symmetric elimination to a
/// congruent block-diagonal form.
///
/// A nonzero diagonal pivot contributes its sign. When the remaining diagonal
/// is zero but some off-diagonal entry `b` at `(i, j)` is not, the block
/// `[[0, b], [b, 0]]` is split off; it has one positive and one negative
/// eigenvalue.
pub fn rank_signature(m: &SymMatrix) -> (usize, i64) {
    let mut a: Vec<Vec<Rational>> = m.entries.clone();
    let mut rank = 0usize;
    let mut sig = 0i64;
    loop {
        let n = a.len();
        if n == 0 {
            break;
        }
        if let Some(i) = (0..n).find(|&i| !a[i][i].is_zero()) {
            let p = a[i][i].clone();
            rank += 1;
            sig += if p.is_positive() { 1 } else { -1 };
            let rest: Vec<usize> = (0..n).filter(|&r| r != i).collect();
            a = rest
                .iter()
                .map(|&r| {
                    rest.iter()
                        .map(|&c| &a[r][c] - &a[r][i] * &a[i][c] / &p)
                        .collect()
                })
                .collect();
            continue;
        }
        let Some((i, j)) = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .find(|&(i, j)| !a[i][j].is_zero())
        else {
            break;
        };
        let b = a[i][j].clone();
        rank += 2;
        // Schur complement of the hyperbolic block: C B^{-1} C^T with
        // B^{-1} = [[0, 1/b], [1/b, 0]].
        let rest: Vec<usize> = (0..n).filter(|&r| r != i && r != j).collect();
        a = rest
            .iter()
            .map(|&r| {
                rest.iter()
                    .map(|&c| {
                        let corr = (&a[r][i] * &a[c][j] + &a[r][j] * &a[c][i]) / &b;
                        &a[r][c] - corr
                    })
                    .collect()
            })
            .collect();
    }
    (rank, sig)
}
