//! Monomial grids for the polynomial ansatz of H and H̄.
//!
//! H(u_1, …, u_{L−1} | v1, v2) has degree ≤ 2L−1 in each lattice slot u_i,
//! ≤ L−1 in v1 and ≤ 2L−1 in v2. H̄(v1, v2 | u_1, …) mirrors it: degree
//! ≤ 2L−1 in v1 and ≤ L−1 in v2. Exponent tuples are stored in argument
//! order, so for L = 2 they are (u, v1, v2) for H and (v1, v2, u) for H̄.
//!
//! With symmetrization on, the lattice slots carry monomial symmetric
//! functions indexed by non-increasing exponent tuples.

use itertools::Itertools;
use serde::Serialize;

use crate::field::Field;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum AnsatzFunction {
    H,
    HBar,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AnsatzLayout {
    size: usize,
    symmetric: bool,
    /// Exponents per basis function of H, in argument order.
    h: Vec<Vec<u32>>,
    /// Exponents per basis function of H̄, in argument order.
    hbar: Vec<Vec<u32>>,
}

fn lattice_exponents(slots: usize, top: u32, symmetric: bool) -> Vec<Vec<u32>> {
    let all = (0..slots).map(|_| 0..=top).multi_cartesian_product();
    if slots == 0 {
        return vec![Vec::new()];
    }
    if symmetric {
        all.filter(|e| e.windows(2).all(|w| w[0] >= w[1])).collect()
    } else {
        all.collect()
    }
}

impl AnsatzLayout {
    pub fn new(size: usize, symmetric: bool) -> Self {
        assert!(size >= 1);
        let top = 2 * size as u32 - 1;
        let low = size as u32 - 1;
        let lattice = lattice_exponents(size - 1, top, symmetric);
        let mut h = Vec::new();
        let mut hbar = Vec::new();
        // Iterate so that the first slot varies slowest, matching the
        // lexicographic order of the exponent tuples.
        for u in &lattice {
            for v1 in 0..=low {
                for v2 in 0..=top {
                    let mut e = u.clone();
                    e.extend([v1, v2]);
                    h.push(e);
                }
            }
        }
        for v1 in 0..=top {
            for v2 in 0..=low {
                for u in &lattice {
                    let mut e = vec![v1, v2];
                    e.extend(u.iter().copied());
                    hbar.push(e);
                }
            }
        }
        h.sort();
        hbar.sort();
        AnsatzLayout {
            size,
            symmetric,
            h,
            hbar,
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn h_len(&self) -> usize {
        self.h.len()
    }

    pub fn hbar_len(&self) -> usize {
        self.hbar.len()
    }

    /// Total number of unknowns: H coefficients first, then H̄.
    pub fn unknowns(&self) -> usize {
        self.h.len() + self.hbar.len()
    }

    pub fn h_exponents(&self) -> &[Vec<u32>] {
        &self.h
    }

    pub fn hbar_exponents(&self) -> &[Vec<u32>] {
        &self.hbar
    }

    /// Position of an exponent tuple within the H or H̄ block.
    pub fn index_of(&self, which: AnsatzFunction, exps: &[u32]) -> Option<usize> {
        let list = match which {
            AnsatzFunction::H => &self.h,
            AnsatzFunction::HBar => &self.hbar,
        };
        list.binary_search_by(|e| e.as_slice().cmp(exps)).ok()
    }

    /// Maximal exponent per argument, used to size power tables.
    pub fn max_exponent(&self) -> u32 {
        2 * self.size as u32 - 1
    }

    /// Adds `coef` times every basis function of `which` evaluated at
    /// `args` (in argument order) into `row`.
    pub fn accumulate<F: Field>(&self, which: AnsatzFunction, args: &[F], coef: &F, row: &mut [F]) {
        if coef.is_zero_elem() {
            return;
        }
        let (list, offset, lattice_start) = match which {
            AnsatzFunction::H => (&self.h, 0, 0),
            AnsatzFunction::HBar => (&self.hbar, self.h.len(), 2),
        };
        let slots = self.size - 1;
        let top = self.max_exponent() as usize;
        let powers: Vec<Vec<F>> = args
            .iter()
            .map(|a| {
                let mut p = Vec::with_capacity(top + 1);
                p.push(a.one_like());
                for k in 1..=top {
                    let next = p[k - 1].clone() * a;
                    p.push(next);
                }
                p
            })
            .collect();
        let lattice: std::ops::Range<usize> = lattice_start..lattice_start + slots;
        for (i, e) in list.iter().enumerate() {
            let mut fixed = coef.clone();
            for (slot, &k) in e.iter().enumerate() {
                if !lattice.contains(&slot) || !self.symmetric {
                    fixed = fixed * &powers[slot][k as usize];
                }
            }
            let value = if self.symmetric && slots > 1 {
                let exps = &e[lattice.clone()];
                let mut sym = coef.zero_like();
                for perm in exps.iter().permutations(slots).unique() {
                    let term = perm
                        .iter()
                        .enumerate()
                        .fold(fixed.clone(), |acc, (s, &&k)| {
                            acc * &powers[lattice.start + s][k as usize]
                        });
                    sym = sym + term;
                }
                sym
            } else if self.symmetric {
                lattice
                    .clone()
                    .fold(fixed, |acc, slot| acc * &powers[slot][e[slot] as usize])
            } else {
                fixed
            };
            row[offset + i] = row[offset + i].clone() + value;
        }
    }

    /// Evaluates the H or H̄ ansatz with coefficients `coeffs` (the block
    /// for that function only) at `args`.
    pub fn evaluate<F: Field>(&self, which: AnsatzFunction, coeffs: &[F], args: &[F]) -> F {
        let like = &args.first().cloned().unwrap_or_else(|| coeffs[0].clone());
        let mut row = vec![like.zero_like(); self.unknowns()];
        self.accumulate(which, args, &like.one_like(), &mut row);
        let offset = match which {
            AnsatzFunction::H => 0,
            AnsatzFunction::HBar => self.h.len(),
        };
        row[offset..offset + coeffs.len()]
            .iter()
            .zip(coeffs)
            .fold(like.zero_like(), |acc, (r, c)| acc + r.clone() * c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{int, Rational};

    #[test]
    fn grid_sizes() {
        assert_eq!(AnsatzLayout::new(1, false).unknowns(), 4);
        assert_eq!(AnsatzLayout::new(2, false).h_len(), 32);
        assert_eq!(AnsatzLayout::new(3, false).h_len(), 648);
        assert_eq!(AnsatzLayout::new(3, true).h_len(), 378);
        assert_eq!(AnsatzLayout::new(3, true).unknowns(), 756);
        // With one lattice slot symmetrization changes nothing.
        assert_eq!(AnsatzLayout::new(2, true), {
            let mut l = AnsatzLayout::new(2, false);
            l.symmetric = true;
            l
        });
    }

    #[test]
    fn two_site_index_order() {
        let l = AnsatzLayout::new(2, false);
        assert_eq!(l.h_exponents()[0], vec![0, 0, 0]);
        assert_eq!(l.h_exponents()[1], vec![0, 0, 1]);
        assert_eq!(l.index_of(AnsatzFunction::H, &[3, 1, 3]), Some(31));
        assert_eq!(l.index_of(AnsatzFunction::HBar, &[3, 1, 3]), Some(31));
        assert_eq!(l.index_of(AnsatzFunction::H, &[0, 2, 0]), None);
    }

    #[test]
    fn symmetric_basis_is_symmetric() {
        let l = AnsatzLayout::new(3, true);
        let coeffs: Vec<Rational> = (0..l.h_len() as i64).map(|i| int(i % 7 - 3)).collect();
        let a = l.evaluate(
            AnsatzFunction::H,
            &coeffs,
            &[int(2), int(5), int(3), int(7)],
        );
        let b = l.evaluate(
            AnsatzFunction::H,
            &coeffs,
            &[int(5), int(2), int(3), int(7)],
        );
        assert_eq!(a, b);
    }
}
