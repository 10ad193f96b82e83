//! Products over sites and the coefficients of the two Z-H relations.

use serde::Serialize;

use crate::context::ModelContext;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::weights::{weight_unchecked, WeightName};

fn site_product<F: Field>(ctx: &ModelContext<F>, f: impl Fn(&F) -> F) -> F {
    ctx.inhomogeneities()
        .iter()
        .fold(ctx.one(), |acc, m| acc * f(m))
}

fn ratio<F: Field>(x: &F, m: &F) -> F {
    x.checked_div(m).expect("inhomogeneities are nonzero")
}

/// Λ(X) = ∏_j a(X/m_j).
pub fn big_lambda<F: Field>(ctx: &ModelContext<F>, x: &F) -> F {
    site_product(ctx, |m| weight_unchecked(ctx, WeightName::A, &ratio(x, m)))
}

/// Λ̄(X) = ∏_j d11(X/m_j).
pub fn big_lambda_bar<F: Field>(ctx: &ModelContext<F>, x: &F) -> F {
    site_product(ctx, |m| {
        weight_unchecked(ctx, WeightName::D(1, 1), &ratio(x, m))
    })
}

/// ω(Y) = ∏_j (Y − m_j ζ).
pub fn omega<F: Field>(ctx: &ModelContext<F>, y: &F) -> F {
    site_product(ctx, |m| y.clone() - m.clone() * ctx.zeta())
}

/// ω̄(Y) = ∏_j (Y − m_j).
pub fn omega_bar<F: Field>(ctx: &ModelContext<F>, y: &F) -> F {
    site_product(ctx, |m| y.clone() - m)
}

pub fn big_lambdas<F: Field>(ctx: &ModelContext<F>, x: &F) -> Result<(F, F)> {
    if x.is_zero_elem() {
        return Err(Error::ZeroArgument);
    }
    Ok((big_lambda(ctx, x), big_lambda_bar(ctx, x)))
}

pub fn omegas<F: Field>(ctx: &ModelContext<F>, y: &F) -> Result<(F, F)> {
    if y.is_zero_elem() {
        return Err(Error::ZeroArgument);
    }
    Ok((omega(ctx, y), omega_bar(ctx, y)))
}

/// Coefficients of the Z-H and Z-H̄ relations at an ordered pair (X0, X1).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoeffSet<F> {
    pub omega0: F,
    pub omega1: F,
    pub upsilon0: F,
    pub upsilon1: F,
    pub omega_bar0: F,
    pub omega_bar1: F,
    pub upsilon_bar0: F,
    pub upsilon_bar1: F,
    /// Ω0 Ω̄1 − Ω1 Ω̄0.
    pub w: F,
}

fn degenerate(what: &str) -> Error {
    Error::DegenerateSample(format!("{what} vanishes"))
}

fn div<F: Field>(num: F, den: &F, what: &str) -> Result<F> {
    num.checked_div(den).ok_or_else(|| degenerate(what))
}

/// Evaluates all coefficients at (X0, X1); the weights are taken at X1/X0.
pub fn zh_coeffs<F: Field>(ctx: &ModelContext<F>, x0: &F, x1: &F) -> Result<CoeffSet<F>> {
    if x0.is_zero_elem() || x1.is_zero_elem() {
        return Err(Error::ZeroArgument);
    }
    let r = x1.checked_div(x0).expect("nonzero");
    let d = |a, b| weight_unchecked(ctx, WeightName::D(a, b), &r);
    let a = weight_unchecked(ctx, WeightName::A, &r);
    let (d11, d12, d13) = (d(1, 1), d(1, 2), d(1, 3));
    let (d21, d22, d23) = (d(2, 1), d(2, 2), d(2, 3));
    let (d31, d32, d33) = (d(3, 1), d(3, 2), d(3, 3));
    let inv32 = d32.inverse().ok_or_else(|| degenerate("d32"))?;
    let inv33 = d33.inverse().ok_or_else(|| degenerate("d33"))?;
    let inv12 = d12.inverse().ok_or_else(|| degenerate("d12"))?;
    let a_32 = a.clone() * &inv32;
    let d11_12 = d11 * &inv12;

    let omega0 = a.clone() * &inv33 * big_lambda(ctx, x0);
    let omega1 = (d12 * &inv32 - d13 * &inv33) * big_lambda(ctx, x1);
    let upsilon0 = a_32.clone() * omega(ctx, x0);
    let upsilon1 = (d23 * &inv33 - d22.clone() * &inv32) * omega(ctx, x1);
    let omega_bar0 = (d11_12.clone() - d31 * &inv32) * big_lambda_bar(ctx, x0);
    let omega_bar1 = a_32.clone() * big_lambda_bar(ctx, x1);
    let upsilon_bar0 = (d21 * &inv32 - d22 * &inv32 * &d11_12) * omega_bar(ctx, x0);
    let upsilon_bar1 = a_32 * &d11_12 * omega_bar(ctx, x1);
    let w = omega0.clone() * &omega_bar1 - omega1.clone() * &omega_bar0;
    let set = CoeffSet {
        omega0,
        omega1,
        upsilon0,
        upsilon1,
        omega_bar0,
        omega_bar1,
        upsilon_bar0,
        upsilon_bar1,
        w,
    };
    #[cfg(debug_assertions)]
    if let Ok(closed) = w_closed_form(ctx, x0, x1) {
        debug_assert_eq!(set.w, closed, "determinant and closed form disagree");
    }
    Ok(set)
}

/// The factorized expression for W with e = X0/X1:
///
/// (1−q²e)²(1−ζe)² / ((e−1)²(q²−ζe)) · Λ(X0)Λ̄(X1) / (p(q²−1))
///   − (1−ζe)²(q⁴−ζ²e)² / (ζ²(e−1)²(q²−ζe)) · Λ(X1)Λ̄(X0) / (p⁵(q²−1)).
pub fn w_closed_form<F: Field>(ctx: &ModelContext<F>, x0: &F, x1: &F) -> Result<F> {
    let e = x0.checked_div(x1).ok_or(Error::ZeroArgument)?;
    let one = ctx.one();
    let q2 = ctx.q().square();
    let zeta = ctx.zeta();
    let ze = zeta.clone() * &e;
    let em1_sq = (e.clone() - &one).square();
    let q2_ze = q2.clone() - &ze;
    let q2m1 = q2.clone() - &one;
    let one_ze_sq = (one.clone() - &ze).square();
    let first_num = (one.clone() - q2.clone() * &e).square() * &one_ze_sq;
    let first_den = em1_sq.clone() * &q2_ze * ctx.p() * &q2m1;
    let second_num = one_ze_sq * (q2.square() - zeta.square() * &e).square();
    let second_den = zeta.square() * em1_sq * q2_ze * ctx.q_half_power(5) * q2m1;
    let first = div(first_num, &first_den, "closed-form denominator")?
        * big_lambda(ctx, x0)
        * big_lambda_bar(ctx, x1);
    let second = div(second_num, &second_den, "closed-form denominator")?
        * big_lambda(ctx, x1)
        * big_lambda_bar(ctx, x0);
    Ok(first - second)
}
