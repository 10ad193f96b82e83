//! Row reduction over an exact field, plus a dedicated kernel for raw
//! residues modulo a 62-bit prime.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::field::{Field, Rational};

/// Reduced row-echelon form. `origin[i]` is the index of the input row that
/// became the i-th pivot row.
#[derive(Clone, Debug)]
pub struct Echelon<T> {
    pub rows: Vec<Vec<T>>,
    pub pivots: Vec<usize>,
    pub origin: Vec<usize>,
    pub cols: usize,
}

impl<T> Echelon<T> {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn free_columns(&self) -> Vec<usize> {
        let mut is_pivot = vec![false; self.cols];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        (0..self.cols).filter(|&c| !is_pivot[c]).collect()
    }
}

/// Gauss-Jordan elimination with the first nonzero entry as pivot.
pub fn rref<F: Field>(mut rows: Vec<Vec<F>>, cols: usize) -> Echelon<F> {
    let mut origin: Vec<usize> = (0..rows.len()).collect();
    let mut pivots = Vec::new();
    let mut next = 0;
    for col in 0..cols {
        let Some(found) = (next..rows.len()).find(|&r| !rows[r][col].is_zero_elem()) else {
            continue;
        };
        rows.swap(next, found);
        origin.swap(next, found);
        let inv = rows[next][col].inverse().expect("pivot is nonzero");
        let pivot_row: Vec<F> = rows[next]
            .iter()
            .map(|v| {
                if v.is_zero_elem() {
                    v.clone()
                } else {
                    v.clone() * &inv
                }
            })
            .collect();
        for (r, row) in rows.iter_mut().enumerate() {
            if r == next || row[col].is_zero_elem() {
                continue;
            }
            let factor = row[col].clone();
            for c in col..cols {
                if !pivot_row[c].is_zero_elem() {
                    row[c] = row[c].clone() - factor.clone() * &pivot_row[c];
                }
            }
        }
        rows[next] = pivot_row;
        pivots.push(col);
        next += 1;
        if next == rows.len() {
            break;
        }
    }
    rows.truncate(next);
    origin.truncate(next);
    Echelon {
        rows,
        pivots,
        origin,
        cols,
    }
}

/// Kernel basis read off a reduced echelon form: one vector per free column.
pub fn kernel_from_echelon<F: Field>(ech: &Echelon<F>, like: &F) -> Vec<Vec<F>> {
    ech.free_columns()
        .into_iter()
        .map(|free| {
            let mut v = vec![like.zero_like(); ech.cols];
            v[free] = like.one_like();
            for (row, &p) in ech.rows.iter().zip(&ech.pivots) {
                v[p] = -row[free].clone();
            }
            v
        })
        .collect()
}

pub fn nullspace_basis<F: Field>(rows: Vec<Vec<F>>, cols: usize, like: &F) -> Vec<Vec<F>> {
    kernel_from_echelon(&rref(rows, cols), like)
}

/// Fraction-free row echelon form over the integers (Bareiss). Every
/// entry stays a minor of the input, so growth is bounded without gcds.
/// Pivot rows are upper triangular but not reduced.
pub fn bareiss_echelon(mut rows: Vec<Vec<BigInt>>, cols: usize) -> Echelon<BigInt> {
    let mut origin: Vec<usize> = (0..rows.len()).collect();
    let mut pivots = Vec::new();
    let mut prev = BigInt::one();
    let mut next = 0;
    for col in 0..cols {
        let Some(found) = (next..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(next, found);
        origin.swap(next, found);
        let (head, tail) = rows.split_at_mut(next + 1);
        let pivot_row = &head[next];
        let pivot = &pivot_row[col];
        for row in tail.iter_mut() {
            let factor = std::mem::take(&mut row[col]);
            for c in col + 1..cols {
                let mut v = pivot * &row[c];
                if !factor.is_zero() && !pivot_row[c].is_zero() {
                    v -= &factor * &pivot_row[c];
                }
                row[c] = if prev.is_one() { v } else { v / &prev };
            }
        }
        prev = rows[next][col].clone();
        pivots.push(col);
        next += 1;
        if next == rows.len() {
            break;
        }
    }
    rows.truncate(next);
    origin.truncate(next);
    Echelon {
        rows,
        pivots,
        origin,
        cols,
    }
}

/// Kernel basis of an integer echelon form by back substitution, one vector
/// per free column.
pub fn kernel_from_integer_echelon(ech: &Echelon<BigInt>) -> Vec<Vec<Rational>> {
    ech.free_columns()
        .into_iter()
        .map(|free| {
            let mut v = vec![Rational::zero(); ech.cols];
            v[free] = Rational::one();
            for (row, &p) in ech.rows.iter().zip(&ech.pivots).rev() {
                let mut acc = Rational::zero();
                for c in p + 1..ech.cols {
                    if !row[c].is_zero() && !v[c].is_zero() {
                        acc += Rational::from_integer(row[c].clone()) * &v[c];
                    }
                }
                v[p] = -acc / Rational::from_integer(row[p].clone());
            }
            v
        })
        .collect()
}

/// Multiplier with a precomputed quotient (Shoup's trick) for repeated
/// products by the same residue modulo p < 2^63.
#[derive(Clone, Copy)]
struct ShoupMul {
    w: u64,
    w_quot: u64,
    p: u64,
}

impl ShoupMul {
    fn new(w: u64, p: u64) -> Self {
        ShoupMul {
            w,
            w_quot: (((w as u128) << 64) / p as u128) as u64,
            p,
        }
    }

    #[inline(always)]
    fn mul(&self, x: u64) -> u64 {
        let q = ((self.w_quot as u128 * x as u128) >> 64) as u64;
        let r = self.w.wrapping_mul(x).wrapping_sub(q.wrapping_mul(self.p));
        if r >= self.p {
            r - self.p
        } else {
            r
        }
    }
}

fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = ((acc as u128 * base as u128) % p as u128) as u64;
        }
        base = ((base as u128 * base as u128) % p as u128) as u64;
        exp >>= 1;
    }
    acc
}

/// Gauss-Jordan elimination on residues modulo the prime `p`.
pub fn rref_mod(mut rows: Vec<Vec<u64>>, cols: usize, p: u64) -> Echelon<u64> {
    assert!(p < 1 << 63);
    let mut origin: Vec<usize> = (0..rows.len()).collect();
    let mut pivots = Vec::new();
    let mut next = 0;
    for col in 0..cols {
        let Some(found) = (next..rows.len()).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(next, found);
        origin.swap(next, found);
        let inv = ShoupMul::new(pow_mod(rows[next][col], p - 2, p), p);
        for v in rows[next][col..].iter_mut() {
            *v = inv.mul(*v);
        }
        let (head, tail) = rows.split_at_mut(next);
        let (pivot_row, tail) = tail.split_first_mut().expect("pivot row");
        let pivot_row = &pivot_row[col..];
        for row in head.iter_mut().chain(tail.iter_mut()) {
            let factor = row[col];
            if factor == 0 {
                continue;
            }
            let f = ShoupMul::new(factor, p);
            for (x, &y) in row[col..].iter_mut().zip(pivot_row) {
                if y != 0 {
                    let t = f.mul(y);
                    *x = if *x >= t { *x - t } else { *x + p - t };
                }
            }
        }
        pivots.push(col);
        next += 1;
        if next == rows.len() {
            break;
        }
    }
    rows.truncate(next);
    origin.truncate(next);
    Echelon {
        rows,
        pivots,
        origin,
        cols,
    }
}

/// Kernel basis of a modular echelon form, as residues.
pub fn kernel_from_echelon_mod(ech: &Echelon<u64>, p: u64) -> Vec<Vec<u64>> {
    ech.free_columns()
        .into_iter()
        .map(|free| {
            let mut v = vec![0u64; ech.cols];
            v[free] = 1;
            for (row, &piv) in ech.rows.iter().zip(&ech.pivots) {
                let x = row[free];
                v[piv] = if x == 0 { 0 } else { p - x };
            }
            v
        })
        .collect()
}
