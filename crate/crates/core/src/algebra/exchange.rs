//! Coefficients of the B-E reordering identities.

use serde::{Deserialize, Serialize};

use crate::context::ModelContext;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::weights::{weight_unchecked, WeightName};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ExchangeKind {
    M,
    N,
    MBar,
    NBar,
}

/// w(x)/b(x) for x = num/den.
fn over_b<F: Field>(ctx: &ModelContext<F>, name: WeightName, num: &F, den: &F) -> Result<F> {
    let x = num.checked_div(den).ok_or(Error::ZeroArgument)?;
    let b = weight_unchecked(ctx, WeightName::B, &x);
    weight_unchecked(ctx, name, &x)
        .checked_div(&b)
        .ok_or_else(|| Error::DegenerateSample("b weight vanishes".into()))
}

/// M_j^{(n)}, N_{j,k}^{(n)} and their barred versions. `xs` holds
/// X_0, …, X_{n+1}; a spectral difference λ_l − λ_m enters as X_l / X_m.
pub fn exchange_coeffs<F: Field>(
    ctx: &ModelContext<F>,
    kind: ExchangeKind,
    n: usize,
    j: usize,
    k: usize,
    xs: &[F],
) -> Result<F> {
    if xs.len() < n + 2 || j > n || k > n + 1 {
        return Err(Error::InvalidInput(
            "exchange coefficient index out of range".into(),
        ));
    }
    let ab = |l: usize, m: usize| over_b(ctx, WeightName::A, &xs[l], &xs[m]);
    let neg_over_b = |name, l: usize, m: usize| over_b(ctx, name, &xs[l], &xs[m]).map(|v| -v);
    let mut acc;
    match kind {
        ExchangeKind::M | ExchangeKind::MBar => {
            let barred = kind == ExchangeKind::MBar;
            let ordered = |l, m| if barred { (m, l) } else { (l, m) };
            if j == 0 {
                acc = ctx.one();
                for l in 1..=n {
                    let (s, t) = ordered(l, 0);
                    acc = acc * ab(s, t)?;
                }
            } else {
                let (s, t) = ordered(j, 0);
                let name = if barred {
                    WeightName::CBar
                } else {
                    WeightName::C
                };
                acc = neg_over_b(name, s, t)?;
                for l in (1..=n).filter(|&l| l != j) {
                    let (s, t) = ordered(l, j);
                    acc = acc * ab(s, t)?;
                }
            }
        }
        ExchangeKind::N | ExchangeKind::NBar => {
            let barred = kind == ExchangeKind::NBar;
            let ordered = |l, m| if barred { (m, l) } else { (l, m) };
            if k == j {
                return Err(Error::InvalidInput("N needs k ≠ j".into()));
            }
            if k == n + 1 {
                acc = ctx.one();
                for l in (0..=n).filter(|&l| l != j) {
                    let (s, t) = ordered(l, n + 1);
                    acc = acc * ab(s, t)?;
                }
            } else {
                let (s, t) = ordered(k, n + 1);
                let name = if barred {
                    WeightName::CBar
                } else {
                    WeightName::C
                };
                acc = neg_over_b(name, s, t)?;
                for l in (0..=n).filter(|&l| l != j && l != k) {
                    let (s, t) = ordered(l, k);
                    acc = acc * ab(s, t)?;
                }
            }
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::{make_context, Model};
    use crate::field::{int, rat};

    #[test]
    fn simplest_cases() {
        let ctx = make_context(Model::Ik, rat(3, 2), vec![int(1)]).unwrap();
        let xs = [int(2), int(5), int(7)];
        let ab = |x| {
            weight_unchecked(&ctx, WeightName::A, &x) / weight_unchecked(&ctx, WeightName::B, &x)
        };
        assert_eq!(
            exchange_coeffs(&ctx, ExchangeKind::M, 1, 0, 0, &xs).unwrap(),
            ab(rat(5, 2))
        );
        assert_eq!(
            exchange_coeffs(&ctx, ExchangeKind::N, 1, 0, 2, &xs).unwrap(),
            ab(rat(5, 7))
        );
        assert_eq!(
            exchange_coeffs(&ctx, ExchangeKind::NBar, 1, 0, 2, &xs).unwrap(),
            ab(rat(7, 5))
        );
    }

    #[test]
    fn coincident_points_are_degenerate() {
        let ctx = make_context(Model::Fz, int(2), vec![int(1)]).unwrap();
        let xs = [int(3), int(3), int(4)];
        assert!(matches!(
            exchange_coeffs(&ctx, ExchangeKind::M, 1, 0, 0, &xs),
            Err(Error::DegenerateSample(_))
        ));
    }
}
