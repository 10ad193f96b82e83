//! Vertex weights and the 9x9 R-matrix.
//!
//! Row and column indices of an [`RMatrix`] are pairs (α, β) with
//! α, β ∈ {1, 2, 3}, flattened as 3(α−1) + (β−1).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::context::ModelContext;
use crate::error::{Error, Result};
use crate::field::Field;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum WeightName {
    A,
    B,
    C,
    CBar,
    D(u8, u8),
}

impl WeightName {
    /// All 13 weights in a fixed order.
    pub fn all() -> Vec<WeightName> {
        let mut out = vec![
            WeightName::A,
            WeightName::B,
            WeightName::C,
            WeightName::CBar,
        ];
        for alpha in 1..=3 {
            for beta in 1..=3 {
                out.push(WeightName::D(alpha, beta));
            }
        }
        out
    }
}

impl fmt::Display for WeightName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightName::A => f.write_str("a"),
            WeightName::B => f.write_str("b"),
            WeightName::C => f.write_str("c"),
            WeightName::CBar => f.write_str("cbar"),
            WeightName::D(a, b) => write!(f, "d{a}{b}"),
        }
    }
}

/// Evaluates a weight at the multiplicative spectral argument `x`.
pub fn weight<F: Field>(ctx: &ModelContext<F>, name: WeightName, x: &F) -> Result<F> {
    if x.is_zero_elem() {
        return Err(Error::ZeroArgument);
    }
    Ok(weight_unchecked(ctx, name, x))
}

pub(crate) fn weight_unchecked<F: Field>(ctx: &ModelContext<F>, name: WeightName, x: &F) -> F {
    let one = ctx.one();
    let q = ctx.q();
    let zeta = ctx.zeta();
    let q2 = q.square();
    let x_minus_1 = x.clone() - &one;
    let x_minus_zeta = x.clone() - zeta;
    let q2_minus_1 = q2.clone() - &one;
    match name {
        WeightName::A => x_minus_zeta * (x.clone() - &q2),
        WeightName::B => q.clone() * x_minus_1 * x_minus_zeta,
        WeightName::C => (one - &q2) * x_minus_zeta,
        WeightName::CBar => x.clone() * (one - &q2) * x_minus_zeta,
        WeightName::D(alpha, beta) => {
            assert!((1..=3).contains(&alpha) && (1..=3).contains(&beta));
            let beta_prime = 4 - beta;
            let delta = alpha == beta_prime;
            if alpha == beta && beta == beta_prime {
                q.clone() * x_minus_1 * x_minus_zeta
                    + x.clone() * q2_minus_1 * (zeta.clone() - &one)
            } else if alpha == beta {
                x_minus_1 * (x_minus_zeta + x.clone() * q2_minus_1)
            } else {
                let shift = ctx.q_half_power(alpha as i32 - beta as i32);
                let delta_term = if delta { x_minus_zeta } else { ctx.zero() };
                if alpha < beta {
                    q2_minus_1 * (zeta.clone() * x_minus_1 * shift - delta_term)
                } else {
                    x.clone() * q2_minus_1 * (x_minus_1 * shift - delta_term)
                }
            }
        }
    }
}

pub const fn pair_index(alpha: usize, beta: usize) -> usize {
    3 * (alpha - 1) + (beta - 1)
}

/// Positions of the d-block inside the R-matrix: d(α,β) sits at row
/// `D_SLOTS[α-1]` and column `D_SLOTS[β-1]`.
const D_SLOTS: [(usize, usize); 3] = [(1, 3), (2, 2), (3, 1)];

#[derive(Clone, Debug, PartialEq)]
pub struct RMatrix<F> {
    entries: Vec<F>,
}

impl<F: Field> RMatrix<F> {
    pub fn zeros(like: &F) -> Self {
        RMatrix {
            entries: vec![like.zero_like(); 81],
        }
    }

    /// Entry ((α,β),(α′,β′)), all indices 1-based.
    pub fn get(&self, row: (usize, usize), col: (usize, usize)) -> &F {
        &self.entries[9 * pair_index(row.0, row.1) + pair_index(col.0, col.1)]
    }

    /// Entry by flattened 0-based indices.
    pub fn at(&self, row: usize, col: usize) -> &F {
        &self.entries[9 * row + col]
    }

    pub fn set(&mut self, row: (usize, usize), col: (usize, usize), value: F) {
        self.entries[9 * pair_index(row.0, row.1) + pair_index(col.0, col.1)] = value;
    }

    pub fn nonzero_count(&self) -> usize {
        self.entries.iter().filter(|e| !e.is_zero_elem()).count()
    }
}

/// Assembles R(x) from a weight evaluator; tests use this to perturb
/// individual weights.
pub fn r_matrix_with<F: Field>(x: &F, eval: impl Fn(WeightName) -> F) -> Result<RMatrix<F>> {
    if x.is_zero_elem() {
        return Err(Error::ZeroArgument);
    }
    let mut r = RMatrix::zeros(x);
    let a = eval(WeightName::A);
    let b = eval(WeightName::B);
    let c = eval(WeightName::C);
    let cbar = eval(WeightName::CBar);
    r.set((1, 1), (1, 1), a.clone());
    r.set((3, 3), (3, 3), a);
    for (s, t) in [((1, 2), (2, 1)), ((2, 3), (3, 2))] {
        r.set(s, s, b.clone());
        r.set(t, t, b.clone());
        r.set(s, t, c.clone());
        r.set(t, s, cbar.clone());
    }
    for alpha in 1..=3u8 {
        for beta in 1..=3u8 {
            let value = eval(WeightName::D(alpha, beta));
            r.set(
                D_SLOTS[alpha as usize - 1],
                D_SLOTS[beta as usize - 1],
                value,
            );
        }
    }
    Ok(r)
}

pub fn r_matrix<F: Field>(ctx: &ModelContext<F>, x: &F) -> Result<RMatrix<F>> {
    r_matrix_with(x, |name| weight_unchecked(ctx, name, x))
}

/// 27x27 operator on V⊗V⊗V, row-major, basis index 9i + 3j + k.
type Mat27<F> = Vec<F>;

fn embed<F: Field>(r: &RMatrix<F>, first: usize, second: usize, like: &F) -> Mat27<F> {
    let spectator = 3 - first - second;
    let mut out = vec![like.zero_like(); 729];
    for row in 0..27 {
        let rd = [row / 9, (row / 3) % 3, row % 3];
        for col in 0..27 {
            let cd = [col / 9, (col / 3) % 3, col % 3];
            if rd[spectator] != cd[spectator] {
                continue;
            }
            let v = r.at(3 * rd[first] + rd[second], 3 * cd[first] + cd[second]);
            if !v.is_zero_elem() {
                out[27 * row + col] = v.clone();
            }
        }
    }
    out
}

fn mul27<F: Field>(lhs: &Mat27<F>, rhs: &Mat27<F>) -> Mat27<F> {
    let zero = lhs[0].zero_like();
    let mut out = vec![zero; 729];
    for i in 0..27 {
        for k in 0..27 {
            let l = &lhs[27 * i + k];
            if l.is_zero_elem() {
                continue;
            }
            for j in 0..27 {
                let r = &rhs[27 * k + j];
                if !r.is_zero_elem() {
                    out[27 * i + j] = out[27 * i + j].clone() + l.clone() * r;
                }
            }
        }
    }
    out
}

/// Yang-Baxter check R12(x12) R13(x13) R23(x23) = R23(x23) R13(x13) R12(x12)
/// with x23 = x13 / x12, using a caller-supplied R-matrix builder.
pub fn check_ybe_with<F: Field>(
    x12: &F,
    x13: &F,
    build: impl Fn(&F) -> Result<RMatrix<F>>,
) -> Result<bool> {
    if x12.is_zero_elem() || x13.is_zero_elem() {
        return Err(Error::ZeroArgument);
    }
    let x23 = x13.checked_div(x12).ok_or(Error::ZeroArgument)?;
    let r12 = embed(&build(x12)?, 0, 1, x12);
    let r13 = embed(&build(x13)?, 0, 2, x12);
    let r23 = embed(&build(&x23)?, 1, 2, x12);
    let lhs = mul27(&mul27(&r12, &r13), &r23);
    let rhs = mul27(&mul27(&r23, &r13), &r12);
    Ok(lhs == rhs)
}

pub fn check_ybe<F: Field>(ctx: &ModelContext<F>, x12: &F, x13: &F) -> Result<bool> {
    check_ybe_with(x12, x13, |x| r_matrix(ctx, x))
}

/// True iff every entry violating α+β = α′+β′ is zero.
pub fn check_ice_rule<F: Field>(ctx: &ModelContext<F>, x: &F) -> Result<bool> {
    let r = r_matrix(ctx, x)?;
    for row in 0..9 {
        for col in 0..9 {
            let charge_in = row / 3 + row % 3;
            let charge_out = col / 3 + col % 3;
            if charge_in != charge_out && !r.at(row, col).is_zero_elem() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The permutation operator P on V⊗V.
pub fn permutation<F: Field>(like: &F) -> RMatrix<F> {
    let mut p = RMatrix::zeros(like);
    for a in 1..=3 {
        for b in 1..=3 {
            p.set((a, b), (b, a), like.one_like());
        }
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::{make_context, Model};
    use crate::field::{int, rat, Rational};

    fn fz4() -> ModelContext {
        make_context(Model::Fz, int(2), vec![int(1)]).unwrap()
    }

    #[test]
    fn thirteen_weights() {
        let all = WeightName::all();
        assert_eq!(all.len(), 13);
        let mut dedup = all.clone();
        dedup.sort();
        dedup.dedup();
        assert_eq!(dedup.len(), 13);
    }

    #[test]
    fn spot_values() {
        let ctx = fz4();
        assert_eq!(weight(&ctx, WeightName::A, &int(5)).unwrap(), int(-11));
        assert_eq!(weight(&ctx, WeightName::D(2, 2), &int(2)).unwrap(), int(82));
        assert_eq!(weight(&ctx, WeightName::A, &int(16)).unwrap(), int(0));
        assert_eq!(
            weight(&ctx, WeightName::D(1, 3), &int(1)).unwrap(),
            weight(&ctx, WeightName::A, &int(1)).unwrap()
        );
        assert_eq!(
            weight(&ctx, WeightName::D(1, 3), &int(1)).unwrap(),
            int(15 * 3)
        );
        assert_eq!(
            weight(&ctx, WeightName::B, &int(0)),
            Err(Error::ZeroArgument)
        );
    }

    #[test]
    fn r_matrix_layout() {
        let ctx = fz4();
        let r = r_matrix(&ctx, &int(5)).unwrap();
        assert_eq!(r.get((1, 1), (1, 1)), &int(-11));
        assert_eq!(r.get((1, 2), (2, 2)), &int(0));
        assert_eq!(r.nonzero_count(), 19);
        assert_eq!(
            r.get((3, 1), (1, 3)),
            &weight(&ctx, WeightName::D(3, 1), &int(5)).unwrap()
        );
    }

    #[test]
    fn regularity_at_one() {
        for model in Model::ALL {
            let ctx = make_context(model, rat(3, 2), vec![int(1)]).unwrap();
            let r = r_matrix(&ctx, &int(1)).unwrap();
            let a1 = weight(&ctx, WeightName::A, &int(1)).unwrap();
            let p = permutation(&a1);
            for row in 0..9 {
                for col in 0..9 {
                    assert_eq!(r.at(row, col), &(a1.clone() * p.at(row, col)));
                }
            }
        }
    }

    #[test]
    fn ybe_spot_checks() {
        let ik = make_context(Model::Ik, rat(3, 2), vec![int(1)]).unwrap();
        assert!(check_ybe(&ik, &int(2), &int(3)).unwrap());
        let fz = fz4();
        assert!(check_ybe(&fz, &rat(5, 7), &int(11)).unwrap());
    }

    #[test]
    fn ybe_detects_perturbed_d_weight() {
        let ctx = make_context(Model::Ik, rat(3, 2), vec![int(1)]).unwrap();
        let perturbed = |x: &Rational| {
            r_matrix_with(x, |name| {
                let w = weight_unchecked(&ctx, name, x);
                if name == WeightName::D(2, 1) {
                    w + int(1)
                } else {
                    w
                }
            })
        };
        assert!(!check_ybe_with(&int(2), &int(3), perturbed).unwrap());
    }

    #[test]
    fn ice_rule() {
        let ik = make_context(Model::Ik, rat(3, 2), vec![int(1)]).unwrap();
        assert!(check_ice_rule(&ik, &int(3)).unwrap());
        assert!(check_ice_rule(&fz4(), &int(1)).unwrap());
        let q2 = ik.q().square();
        assert!(check_ice_rule(&ik, &q2).unwrap());
    }

    #[test]
    fn cbar_is_x_times_c() {
        let ctx = make_context(Model::Ik, rat(5, 3), vec![int(1)]).unwrap();
        let x = rat(7, 2);
        assert_eq!(
            weight(&ctx, WeightName::CBar, &x).unwrap(),
            x.clone() * weight(&ctx, WeightName::C, &x).unwrap()
        );
    }
}
