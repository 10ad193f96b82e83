//! Sampled linear system for the ansatz coefficients.
//!
//! Each sample (X0, X̄0, X1, …, XL) yields two rows:
//!
//! * the difference of the two expressions for Z(X1, …, XL) obtained by
//!   solving the Z-H and Z-H̄ relations at (X0, X1) and at (X1, X̄0);
//! * the second hhb line with lattice (X0, X1, …, XL).
//!
//! Rows are linear in the concatenated vector (φ, φ̄).

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::exchange::{exchange_coeffs, ExchangeKind};
use crate::context::ModelContext;
use crate::error::{Error, Result};
use crate::field::{Field, Rational};
use crate::modular::Fp;
use crate::sampling::{random_positive, SampleRng};

use super::coeffs::{omega, omega_bar, zh_coeffs};
use super::layout::{AnsatzFunction, AnsatzLayout};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EquationFamily {
    ZxIdentity,
    HhbLine2,
}

#[derive(Clone, Debug)]
pub struct LinearSystem<F> {
    pub rows: Vec<Vec<F>>,
    pub families: Vec<EquationFamily>,
    pub unknowns: usize,
    /// Samples rejected as degenerate before enough rows were collected.
    pub resampled: usize,
}

impl<F> LinearSystem<F> {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// Number of samples (two rows each) for the default policy of 2.5 rows per
/// unknown, rounded up.
pub fn default_samples(layout: &AnsatzLayout) -> usize {
    let rows = (5 * layout.unknowns()).div_ceil(2);
    rows.div_ceil(2)
}

fn nonzero<F: Field>(v: F, what: &str) -> Result<F> {
    if v.is_zero_elem() {
        Err(Error::DegenerateSample(format!("{what} vanishes")))
    } else {
        Ok(v)
    }
}

fn inv<F: Field>(v: &F, what: &str) -> Result<F> {
    v.inverse()
        .ok_or_else(|| Error::DegenerateSample(format!("{what} vanishes")))
}

/// Adds the coefficients of Z(X1, rest) expressed through H and H̄ via the
/// relations at (x0, x1) into `row`, scaled by `sign`.
///
/// Solving the pair of relations at (x0, x1) for the term multiplying Ω0
/// gives Z(x1, rest) = [Ω̄1 (Υ0 H(x0,x1) + Υ1 H(x1,x0)) − Ω1 (Ῡ0 H̄(x1,x0) +
/// Ῡ1 H̄(x0,x1))] / W. Solving for the Ω1 term instead gives Z(x0, rest).
#[allow(clippy::too_many_arguments)]
fn add_z_expression<F: Field>(
    ctx: &ModelContext<F>,
    layout: &AnsatzLayout,
    x0: &F,
    x1: &F,
    rest: &[F],
    solve_for_first: bool,
    sign: &F,
    row: &mut [F],
) -> Result<()> {
    let k = zh_coeffs(ctx, x0, x1)?;
    let w_inv = inv(&k.w, "W")?;
    let (h_scale, hbar_scale) = if solve_for_first {
        (k.omega_bar1.clone(), -k.omega1.clone())
    } else {
        (-k.omega_bar0.clone(), k.omega0.clone())
    };
    let s = sign.clone() * &w_inv;
    let h_args = |a: &F, b: &F| {
        let mut v = rest.to_vec();
        v.push(a.clone());
        v.push(b.clone());
        v
    };
    let hbar_args = |a: &F, b: &F| {
        let mut v = vec![a.clone(), b.clone()];
        v.extend_from_slice(rest);
        v
    };
    let hs = s.clone() * &h_scale;
    let hbs = s * &hbar_scale;
    layout.accumulate(
        AnsatzFunction::H,
        &h_args(x0, x1),
        &(hs.clone() * &k.upsilon0),
        row,
    );
    layout.accumulate(AnsatzFunction::H, &h_args(x1, x0), &(hs * &k.upsilon1), row);
    layout.accumulate(
        AnsatzFunction::HBar,
        &hbar_args(x1, x0),
        &(hbs.clone() * &k.upsilon_bar0),
        row,
    );
    layout.accumulate(
        AnsatzFunction::HBar,
        &hbar_args(x0, x1),
        &(hbs * &k.upsilon_bar1),
        row,
    );
    Ok(())
}

/// Row of Z(X1, rest) through the relations at (X0, X1); the ansatz value
/// of Z is the dot product of this row with (φ, φ̄).
pub fn zx1_row<F: Field>(
    ctx: &ModelContext<F>,
    layout: &AnsatzLayout,
    x0: &F,
    lattice: &[F],
) -> Result<Vec<F>> {
    let mut row = vec![ctx.zero(); layout.unknowns()];
    add_z_expression(
        ctx,
        layout,
        x0,
        &lattice[0],
        &lattice[1..],
        true,
        &ctx.one(),
        &mut row,
    )?;
    Ok(row)
}

/// Row of Z(X1, rest) through the relations at (X1, X̄0).
pub fn zx2_row<F: Field>(
    ctx: &ModelContext<F>,
    layout: &AnsatzLayout,
    x0b: &F,
    lattice: &[F],
) -> Result<Vec<F>> {
    let mut row = vec![ctx.zero(); layout.unknowns()];
    add_z_expression(
        ctx,
        layout,
        &lattice[0],
        x0b,
        &lattice[1..],
        false,
        &ctx.one(),
        &mut row,
    )?;
    Ok(row)
}

/// Both rows for one sample `[X0, X̄0, X1, …, XL]`.
pub fn sample_rows<F: Field>(
    ctx: &ModelContext<F>,
    layout: &AnsatzLayout,
    sample: &[F],
) -> Result<[Vec<F>; 2]> {
    let size = layout.size();
    if sample.len() != size + 2 || ctx.size() != size {
        return Err(Error::InvalidInput(format!(
            "a sample for L={size} needs {} values",
            size + 2
        )));
    }
    for (i, a) in sample.iter().enumerate() {
        nonzero(a.clone(), "spectral value")?;
        if sample[..i].contains(a) {
            return Err(Error::DegenerateSample("repeated spectral value".into()));
        }
    }
    let (x0, x0b, xs) = (&sample[0], &sample[1], &sample[2..]);
    let one = ctx.one();

    let mut zx = zx1_row(ctx, layout, x0, xs)?;
    add_z_expression(
        ctx,
        layout,
        &xs[0],
        x0b,
        &xs[1..],
        false,
        &(-one.clone()),
        &mut zx,
    )?;

    let mut hhb = vec![ctx.zero(); layout.unknowns()];
    let mut lam = vec![x0.clone()];
    lam.extend_from_slice(xs);
    let x_last = &lam[size];
    let mut hbar_args = vec![x0.clone(), x_last.clone()];
    hbar_args.extend_from_slice(&lam[1..size]);
    layout.accumulate(
        AnsatzFunction::HBar,
        &hbar_args,
        &(-omega_bar(ctx, x_last)),
        &mut hhb,
    );
    let n = size - 1;
    for j in 0..size {
        let om = omega(ctx, &lam[j]);
        for k in (0..=size).filter(|&k| k != j) {
            let coef = exchange_coeffs(ctx, ExchangeKind::M, n, j, k, &lam)?
                * exchange_coeffs(ctx, ExchangeKind::N, n, j, k, &lam)?
                * &om;
            let mut args: Vec<F> = (0..=size)
                .filter(|&l| l != j && l != k)
                .map(|l| lam[l].clone())
                .collect();
            args.push(lam[j].clone());
            args.push(lam[k].clone());
            layout.accumulate(AnsatzFunction::H, &args, &coef, &mut hhb);
        }
    }
    Ok([zx, hhb])
}

/// Source of sample coordinates for a given field.
pub trait SampleSource<F> {
    fn draw(&self, rng: &mut SampleRng, count: usize) -> Vec<F>;
}

/// Small-height positive and negative rationals.
pub struct RationalSamples;

impl SampleSource<Rational> for RationalSamples {
    fn draw(&self, rng: &mut SampleRng, count: usize) -> Vec<Rational> {
        (0..count)
            .map(|_| {
                let r = random_positive(rng, 40, 9);
                if rng.gen_bool(0.25) {
                    -r
                } else {
                    r
                }
            })
            .collect()
    }
}

/// Uniform residues modulo a prime.
pub struct ResidueSamples(pub u64);

impl SampleSource<Fp> for ResidueSamples {
    fn draw(&self, rng: &mut SampleRng, count: usize) -> Vec<Fp> {
        (0..count)
            .map(|_| Fp::new(rng.gen_range(1..self.0), self.0))
            .collect()
    }
}

/// Assembles `samples` samples' worth of rows. Samples are drawn
/// sequentially from `rng`, evaluated in parallel, and degenerate ones are
/// replaced, so the result depends only on the RNG state.
pub fn assemble_system<F: Field>(
    ctx: &ModelContext<F>,
    layout: &AnsatzLayout,
    samples: usize,
    source: &(impl SampleSource<F> + Sync),
    rng: &mut SampleRng,
) -> Result<LinearSystem<F>> {
    let width = layout.size() + 2;
    let max_attempts = 4 * samples + 64;
    let mut attempts = 0;
    let mut rows = Vec::with_capacity(2 * samples);
    let mut families = Vec::with_capacity(2 * samples);
    let mut resampled = 0;
    while rows.len() < 2 * samples {
        let missing = samples - rows.len() / 2;
        if attempts + missing > max_attempts {
            return Err(Error::DegenerateSample(format!(
                "only {} of {samples} samples were nondegenerate",
                rows.len() / 2
            )));
        }
        attempts += missing;
        let batch: Vec<Vec<F>> = (0..missing).map(|_| source.draw(rng, width)).collect();
        let results: Vec<Result<[Vec<F>; 2]>> = batch
            .par_iter()
            .map(|s| sample_rows(ctx, layout, s))
            .collect();
        for r in results {
            match r {
                Ok([a, b]) => {
                    rows.push(a);
                    families.push(EquationFamily::ZxIdentity);
                    rows.push(b);
                    families.push(EquationFamily::HhbLine2);
                }
                Err(Error::DegenerateSample(_)) | Err(Error::ZeroArgument) => resampled += 1,
                Err(e) => return Err(e),
            }
        }
    }
    Ok(LinearSystem {
        rows,
        families,
        unknowns: layout.unknowns(),
        resampled,
    })
}

/// Multiplies a rational row by the lcm of its denominators and divides by
/// the gcd of the resulting numerators, leaving coprime integers.
pub fn clear_denominators(row: &mut [Rational]) {
    let lcm = row.iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
    let mut gcd = BigInt::from(0);
    for r in row.iter_mut() {
        *r = r.clone() * Rational::from_integer(lcm.clone());
        gcd = gcd.gcd(r.numer());
    }
    if gcd > BigInt::one() {
        let g = Rational::from_integer(gcd);
        for r in row.iter_mut() {
            *r = r.clone() / &g;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::{make_context, Model};
    use crate::field::{int, rat};
    use crate::sampling::rng_from_seed;

    #[test]
    fn rows_have_expected_shape() {
        let ctx = make_context(Model::Fz, int(2), vec![int(1), int(1)]).unwrap();
        let layout = AnsatzLayout::new(2, false);
        let mut rng = rng_from_seed(3);
        let sys = assemble_system(&ctx, &layout, 5, &RationalSamples, &mut rng).unwrap();
        assert_eq!(sys.len(), 10);
        assert_eq!(sys.unknowns, 64);
        assert_eq!(sys.families[0], EquationFamily::ZxIdentity);
        assert_eq!(sys.families[1], EquationFamily::HhbLine2);
        assert!(sys.rows.iter().all(|r| r.len() == 64));
    }

    #[test]
    fn repeated_values_are_degenerate() {
        let ctx = make_context(Model::Ik, rat(3, 2), vec![int(1)]).unwrap();
        let layout = AnsatzLayout::new(1, false);
        let err = sample_rows(&ctx, &layout, &[int(2), int(3), int(2)]).unwrap_err();
        assert!(matches!(err, Error::DegenerateSample(_)));
    }

    #[test]
    fn clearing_gives_coprime_integers() {
        let mut row = vec![rat(1, 6), rat(-2, 3), int(0)];
        clear_denominators(&mut row);
        assert_eq!(row, vec![int(1), int(-4), int(0)]);
    }
}
