//! Kernel of the ansatz system and checks on the normalized solution.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::context::{make_context, Model, ModelContext};
use crate::error::{Error, Result};
use crate::field::{bit_height, serde_rational, Field, Rational};
use crate::linalg::{
    bareiss_echelon, kernel_from_echelon_mod, kernel_from_integer_echelon, rref_mod, Echelon,
};
use crate::modular::{random_prime_62, CrtAccumulator, Fp};
use crate::monodromy::compute_z;
use crate::sampling::{distinct_rationals, rng_from_seed, SampleRng};
use crate::structure::initial_value;

use super::layout::{AnsatzFunction, AnsatzLayout};
use super::system::{
    assemble_system, clear_denominators, default_samples, sample_rows, zx1_row, zx2_row,
    EquationFamily, LinearSystem, RationalSamples, ResidueSamples, SampleSource,
};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Rational,
    #[default]
    Modular,
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Backend::Rational => "rational",
            Backend::Modular => "modular",
        })
    }
}

impl FromStr for Backend {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rational" => Ok(Backend::Rational),
            "modular" | "prime-field" => Ok(Backend::Modular),
            _ => Err(Error::Parse(format!("unknown backend {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveOptions {
    pub backend: Backend,
    /// Symmetrized lattice basis; defaults to on for L ≥ 3.
    pub symmetric: Option<bool>,
    /// Samples per assembly (two rows each); defaults to the 2.5× policy.
    pub samples: Option<usize>,
    pub seed: u64,
    /// Minimum number of agreeing primes for the modular backend.
    pub min_primes: usize,
    /// Fresh points for the reconstruction checks.
    pub check_points: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            backend: Backend::Modular,
            symmetric: None,
            samples: None,
            seed: 0,
            min_primes: 2,
            check_points: 10,
        }
    }
}

const MAX_PRIMES: usize = 64;
/// Fixed prime for choosing independent rows before exact elimination.
const SELECTION_PRIME: u64 = 4611686018427387847;
const MAX_UNLUCKY: usize = 6;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Normalization {
    pub function: AnsatzFunction,
    pub index: usize,
    pub exponents: Vec<u32>,
    /// True when the constant coefficient vanished and the first nonzero
    /// coefficient was used instead.
    pub fallback: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SolutionCheck {
    pub name: String,
    pub points: usize,
    pub pass: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PivotFamilies {
    pub zx_identity: usize,
    pub hhb_line2: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Solution {
    pub model: Model,
    pub size: usize,
    #[serde(with = "serde_rational")]
    pub p: Rational,
    #[serde(with = "serde_rational::vec")]
    pub m: Vec<Rational>,
    pub backend: Backend,
    pub symmetric: bool,
    pub unknowns: usize,
    pub rows: usize,
    pub rank: usize,
    pub kernel_dim: usize,
    pub pivot_families: PivotFamilies,
    pub resampled: usize,
    pub primes: Vec<u64>,
    pub unlucky_primes: usize,
    pub max_bits: u64,
    pub normalization: Normalization,
    #[serde(with = "serde_rational::vec")]
    pub phi: Vec<Rational>,
    #[serde(with = "serde_rational::vec")]
    pub phibar: Vec<Rational>,
    pub h_exponents: Vec<Vec<u32>>,
    pub hbar_exponents: Vec<Vec<u32>>,
    #[serde(with = "serde_rational")]
    pub kappa: Rational,
    pub checks: Vec<SolutionCheck>,
    pub pass: bool,
}

impl Solution {
    pub fn layout(&self) -> AnsatzLayout {
        AnsatzLayout::new(self.size, self.symmetric)
    }

    pub fn context(&self) -> Result<ModelContext> {
        make_context(self.model, self.p.clone(), self.m.clone())
    }

    fn coefficients(&self) -> Vec<Rational> {
        self.phi.iter().chain(&self.phibar).cloned().collect()
    }

    pub fn phi_at(&self, exps: &[u32]) -> Option<&Rational> {
        let idx = self.layout().index_of(AnsatzFunction::H, exps)?;
        self.phi.get(idx)
    }

    pub fn phibar_at(&self, exps: &[u32]) -> Option<&Rational> {
        let idx = self.layout().index_of(AnsatzFunction::HBar, exps)?;
        self.phibar.get(idx)
    }

    /// Ansatz value of H(us | y1, y2), without κ.
    pub fn h(&self, us: &[Rational], y1: &Rational, y2: &Rational) -> Rational {
        let mut args = us.to_vec();
        args.extend([y1.clone(), y2.clone()]);
        self.layout().evaluate(AnsatzFunction::H, &self.phi, &args)
    }

    /// Ansatz value of H̄(y1, y2 | us), without κ.
    pub fn hbar(&self, y1: &Rational, y2: &Rational, us: &[Rational]) -> Rational {
        let mut args = vec![y1.clone(), y2.clone()];
        args.extend_from_slice(us);
        self.layout()
            .evaluate(AnsatzFunction::HBar, &self.phibar, &args)
    }

    /// κ · Z(lattice) reconstructed through the relations at (x0, X1).
    pub fn z(&self, ctx: &ModelContext, x0: &Rational, lattice: &[Rational]) -> Result<Rational> {
        Ok(self.kappa.clone()
            * z_from_row(
                &zx1_row(ctx, &self.layout(), x0, lattice)?,
                &self.coefficients(),
            ))
    }

    /// κ · Z(lattice) reconstructed through the relations at (X1, x0b).
    pub fn z_alt(
        &self,
        ctx: &ModelContext,
        x0b: &Rational,
        lattice: &[Rational],
    ) -> Result<Rational> {
        Ok(self.kappa.clone()
            * z_from_row(
                &zx2_row(ctx, &self.layout(), x0b, lattice)?,
                &self.coefficients(),
            ))
    }

    pub fn check(&self, name: &str) -> Option<&SolutionCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn z_from_row(row: &[Rational], coeffs: &[Rational]) -> Rational {
    row.iter()
        .zip(coeffs)
        .fold(Rational::from_integer(0.into()), |acc, (r, c)| acc + r * c)
}

fn pivot_families<T>(ech: &Echelon<T>, families: &[EquationFamily]) -> PivotFamilies {
    let mut out = PivotFamilies::default();
    for &o in &ech.origin {
        match families[o] {
            EquationFamily::ZxIdentity => out.zx_identity += 1,
            EquationFamily::HhbLine2 => out.hhb_line2 += 1,
        }
    }
    out
}

/// Exact kernel of a rational system.
///
/// Rows are cleared to coprime integers. A row subset that is independent
/// modulo a prime is eliminated fraction-free over the integers, and every
/// kernel vector of the subset is then checked against all rows; rows that
/// fail are added to the subset and the elimination is repeated. On exit the
/// subset kernel equals the full kernel, so the rank is exact over Q.
pub fn nullspace_rational(sys: &LinearSystem<Rational>) -> (Echelon<BigInt>, Vec<Vec<Rational>>) {
    let cols = sys.unknowns;
    let ints: Vec<Vec<BigInt>> = sys
        .rows
        .iter()
        .map(|r| {
            let mut r = r.clone();
            clear_denominators(&mut r);
            r.into_iter().map(|v| v.numer().clone()).collect()
        })
        .collect();
    let residues: Vec<Vec<u64>> = ints
        .iter()
        .map(|r| {
            r.iter()
                .map(|v| Fp::from_bigint(v, SELECTION_PRIME).residue())
                .collect()
        })
        .collect();
    let mut subset = rref_mod(residues, cols, SELECTION_PRIME).origin;
    loop {
        subset.sort_unstable();
        let rows = subset.iter().map(|&i| ints[i].clone()).collect();
        let mut ech = bareiss_echelon(rows, cols);
        let kernel = kernel_from_integer_echelon(&ech);
        let failing: Vec<usize> = (0..ints.len())
            .filter(|i| !subset.contains(i))
            .filter(|&i| {
                kernel
                    .iter()
                    .any(|v| !integer_dot(&ints[i], v).is_zero_elem())
            })
            .collect();
        if failing.is_empty() {
            ech.origin = ech.origin.iter().map(|&o| subset[o]).collect();
            return (ech, kernel);
        }
        subset.extend(failing);
    }
}

fn integer_dot(row: &[BigInt], v: &[Rational]) -> Rational {
    row.iter()
        .zip(v)
        .filter(|(a, b)| !a.is_zero() && !b.is_zero_elem())
        .fold(Rational::zero(), |acc, (a, b)| {
            acc + Rational::from_integer(a.clone()) * b
        })
}

/// Kernel of a system over one prime field.
pub fn nullspace_modular(sys: &LinearSystem<Fp>, prime: u64) -> (Echelon<u64>, Vec<Vec<u64>>) {
    let rows = sys
        .rows
        .iter()
        .map(|r| r.iter().map(Fp::residue).collect())
        .collect();
    let ech = rref_mod(rows, sys.unknowns, prime);
    let kernel = kernel_from_echelon_mod(&ech, prime);
    (ech, kernel)
}

struct KernelImage<T> {
    rank: usize,
    pivots: PivotFamilies,
    kernel: Vec<Vec<T>>,
    rows: usize,
    resampled: usize,
}

/// Picks the unit coefficient: the constant monomial of H, else the first
/// nonzero entry.
fn choose_normalization(
    layout: &AnsatzLayout,
    nonzero: impl Fn(usize) -> bool,
) -> Result<Normalization> {
    let index = (0..layout.unknowns())
        .find(|&i| nonzero(i))
        .ok_or_else(|| Error::NormalizationFailure("kernel vector is zero".into()))?;
    let (function, local, exponents) = if index < layout.h_len() {
        (
            AnsatzFunction::H,
            index,
            layout.h_exponents()[index].clone(),
        )
    } else {
        let local = index - layout.h_len();
        (
            AnsatzFunction::HBar,
            local,
            layout.hbar_exponents()[local].clone(),
        )
    };
    Ok(Normalization {
        function,
        index: local,
        exponents,
        fallback: index != 0,
    })
}

fn global_index(layout: &AnsatzLayout, n: &Normalization) -> usize {
    match n.function {
        AnsatzFunction::H => n.index,
        AnsatzFunction::HBar => layout.h_len() + n.index,
    }
}

struct RawSolution {
    coeffs: Vec<Rational>,
    normalization: Normalization,
    rank: usize,
    kernel_dim: usize,
    pivots: PivotFamilies,
    rows: usize,
    resampled: usize,
    primes: Vec<u64>,
    unlucky: usize,
}

fn solve_rational(
    ctx: &ModelContext,
    layout: &AnsatzLayout,
    samples: usize,
    rng: &mut SampleRng,
) -> Result<RawSolution> {
    let mut samples = samples;
    let mut doubled = false;
    let image = loop {
        let sys = assemble_system(ctx, layout, samples, &RationalSamples, rng)?;
        let (ech, kernel) = nullspace_rational(&sys);
        let image = KernelImage {
            rank: ech.rank(),
            pivots: pivot_families(&ech, &sys.families),
            kernel,
            rows: sys.len(),
            resampled: sys.resampled,
        };
        match image.kernel.len() {
            1 => break image,
            d if d > 1 && !doubled => {
                doubled = true;
                samples *= 2;
            }
            d => return Err(Error::NonUniqueSolution { dim: d }),
        }
    };
    let v = &image.kernel[0];
    let normalization = choose_normalization(layout, |i| !v[i].is_zero_elem())?;
    let unit = v[global_index(layout, &normalization)].clone();
    let coeffs = v
        .iter()
        .map(|c| c.checked_div(&unit).expect("unit is nonzero"))
        .collect();
    Ok(RawSolution {
        coeffs,
        normalization,
        rank: image.rank,
        kernel_dim: 1,
        pivots: image.pivots,
        rows: image.rows,
        resampled: image.resampled,
        primes: Vec::new(),
        unlucky: 0,
    })
}

fn modular_image(
    ctx: &ModelContext,
    layout: &AnsatzLayout,
    samples: usize,
    rng: &mut SampleRng,
) -> Result<Option<(u64, KernelImage<u64>)>> {
    let prime = random_prime_62(rng);
    let Some(ctx_p) = ctx.reduce(prime) else {
        return Ok(None);
    };
    let sys = assemble_system(&ctx_p, layout, samples, &ResidueSamples(prime), rng)?;
    let (ech, kernel) = nullspace_modular(&sys, prime);
    Ok(Some((
        prime,
        KernelImage {
            rank: ech.rank(),
            pivots: pivot_families(&ech, &sys.families),
            kernel,
            rows: sys.len(),
            resampled: sys.resampled,
        },
    )))
}

fn solve_modular(
    ctx: &ModelContext,
    layout: &AnsatzLayout,
    samples: usize,
    min_primes: usize,
    rng: &mut SampleRng,
) -> Result<RawSolution> {
    let mut samples = samples;
    let mut doubled = false;
    let mut unlucky = 0;
    // Images agreeing on the smallest kernel dimension seen so far; a
    // larger kernel modulo some prime means the prime or its samples were
    // unlucky.
    let mut agreeing: Vec<(u64, KernelImage<u64>)> = Vec::new();
    let mut dims_seen: Vec<usize> = Vec::new();
    loop {
        if agreeing.len() >= min_primes.max(2) {
            break;
        }
        if dims_seen.len() > MAX_PRIMES {
            return Err(Error::BackendMismatch(format!(
                "kernel dimensions {dims_seen:?}"
            )));
        }
        let Some((prime, image)) = modular_image(ctx, layout, samples, rng)? else {
            unlucky += 1;
            continue;
        };
        let dim = image.kernel.len();
        dims_seen.push(dim);
        match agreeing.first().map(|(_, i)| i.kernel.len()) {
            Some(current) if dim > current => unlucky += 1,
            Some(current) if dim < current => {
                unlucky += agreeing.len();
                agreeing.clear();
                agreeing.push((prime, image));
            }
            _ => agreeing.push((prime, image)),
        }
        if unlucky > MAX_UNLUCKY {
            return Err(Error::BackendMismatch(format!(
                "kernel dimensions {dims_seen:?}"
            )));
        }
        if agreeing.len() >= 2 {
            let dim = agreeing[0].1.kernel.len();
            if dim > 1 && !doubled {
                doubled = true;
                samples *= 2;
                agreeing.clear();
            } else if dim != 1 {
                return Err(Error::NonUniqueSolution { dim });
            }
        }
    }

    let first = &agreeing[0].1.kernel[0];
    let normalization = choose_normalization(layout, |i| first[i] != 0)?;
    let unit_idx = global_index(layout, &normalization);
    let mut crt = CrtAccumulator::new(layout.unknowns());
    let mut primes = Vec::new();
    let mut previous: Option<Vec<Rational>> = None;
    let push = |crt: &mut CrtAccumulator, prime: u64, v: &[u64]| -> bool {
        if v[unit_idx] == 0 {
            return false;
        }
        let unit = Fp::new(v[unit_idx], prime)
            .inverse()
            .expect("nonzero residue");
        let normed: Vec<Fp> = v.iter().map(|&r| Fp::new(r, prime) * unit).collect();
        crt.push(&normed);
        true
    };
    let (rank, pivots, rows, resampled) = {
        let i = &agreeing[0].1;
        (i.rank, i.pivots.clone(), i.rows, i.resampled)
    };
    let mut pending: Vec<(u64, KernelImage<u64>)> = agreeing;
    pending.reverse();
    loop {
        let (prime, image) = match pending.pop() {
            Some(x) => x,
            None => {
                if primes.len() > MAX_PRIMES {
                    return Err(Error::BackendMismatch(
                        "rational reconstruction did not stabilize".into(),
                    ));
                }
                match modular_image(ctx, layout, samples, rng)? {
                    Some(x) => x,
                    None => {
                        unlucky += 1;
                        continue;
                    }
                }
            }
        };
        if image.kernel.len() != 1 || !push(&mut crt, prime, &image.kernel[0]) {
            unlucky += 1;
            if unlucky > MAX_UNLUCKY + MAX_PRIMES {
                return Err(Error::BackendMismatch("too many unlucky primes".into()));
            }
            continue;
        }
        primes.push(prime);
        let current = crt.reconstruct();
        if primes.len() >= min_primes {
            if let (Some(cur), Some(prev)) = (&current, &previous) {
                if cur == prev {
                    return Ok(RawSolution {
                        coeffs: cur.clone(),
                        normalization,
                        rank,
                        kernel_dim: 1,
                        pivots,
                        rows,
                        resampled,
                        primes,
                        unlucky,
                    });
                }
            }
        }
        previous = current;
    }
}

/// Draws a nondegenerate auxiliary value together with `count` distinct
/// lattice values.
fn fresh_point(rng: &mut SampleRng, count: usize) -> Vec<Rational> {
    distinct_rationals(rng, count, 60, 11)
}

fn retry_degenerate<T>(mut f: impl FnMut() -> Result<T>) -> Result<T> {
    for _ in 0..200 {
        match f() {
            Err(Error::DegenerateSample(_)) | Err(Error::ZeroArgument) | Err(Error::OmegaZero) => {}
            other => return other,
        }
    }
    Err(Error::DegenerateSample(
        "no nondegenerate point found".into(),
    ))
}

/// Solves the ZH system for L = `size`, normalizes, fixes κ through the
/// initial condition, and runs the reconstruction checks.
pub fn solve_zh(ctx: &ModelContext, size: usize, opts: &SolveOptions) -> Result<Solution> {
    if size == 0 || size > 4 {
        return Err(Error::InvalidInput("the solver supports 1 ≤ L ≤ 4".into()));
    }
    if ctx.size() != size {
        return Err(Error::InvalidInput(format!(
            "context has {} inhomogeneities, L={size}",
            ctx.size()
        )));
    }
    let symmetric = opts.symmetric.unwrap_or(size >= 3);
    let layout = AnsatzLayout::new(size, symmetric);
    let samples = opts.samples.unwrap_or_else(|| default_samples(&layout));
    let mut rng = rng_from_seed(opts.seed);
    let raw = match opts.backend {
        Backend::Rational => solve_rational(ctx, &layout, samples, &mut rng)?,
        Backend::Modular => solve_modular(ctx, &layout, samples, opts.min_primes, &mut rng)?,
    };

    let (phi, phibar) = {
        let mut c = raw.coeffs;
        let phibar = c.split_off(layout.h_len());
        (c, phibar)
    };
    let max_bits = phi.iter().chain(&phibar).map(bit_height).max().unwrap_or(0);
    let mut sol = Solution {
        model: ctx.model(),
        size,
        p: ctx.p().clone(),
        m: ctx.inhomogeneities().to_vec(),
        backend: opts.backend,
        symmetric,
        unknowns: layout.unknowns(),
        rows: raw.rows,
        rank: raw.rank,
        kernel_dim: raw.kernel_dim,
        pivot_families: raw.pivots,
        resampled: raw.resampled,
        primes: raw.primes,
        unlucky_primes: raw.unlucky,
        max_bits,
        normalization: raw.normalization,
        phi,
        phibar,
        h_exponents: layout.h_exponents().to_vec(),
        hbar_exponents: layout.hbar_exponents().to_vec(),
        kappa: ctx.one(),
        checks: Vec::new(),
        pass: false,
    };

    let mut check_rng = rng_from_seed(opts.seed ^ 0x5eed_c4ec);
    let target = initial_value(ctx);
    let z_at_m = retry_degenerate(|| {
        let x0 = fresh_point(&mut check_rng, 1).remove(0);
        sol.z(ctx, &x0, ctx.inhomogeneities())
    })?;
    sol.kappa = target.checked_div(&z_at_m).ok_or_else(|| {
        Error::NormalizationFailure("reconstructed Z vanishes at the inhomogeneities".into())
    })?;

    let points = opts.check_points;
    let mut checks = Vec::new();
    let mut run = |name: &str, f: &mut dyn FnMut(&mut SampleRng) -> Result<bool>| -> Result<()> {
        let mut pass = true;
        for _ in 0..points {
            pass &= retry_degenerate(|| f(&mut check_rng))?;
        }
        checks.push(SolutionCheck {
            name: name.into(),
            points,
            pass,
        });
        Ok(())
    };
    run("initial_condition", &mut |rng| {
        let x0 = fresh_point(rng, 1).remove(0);
        Ok(sol.z(ctx, &x0, ctx.inhomogeneities())? == target)
    })?;
    run("z_matches_monodromy", &mut |rng| {
        let pt = fresh_point(rng, size + 1);
        Ok(sol.z(ctx, &pt[0], &pt[1..])? == compute_z(ctx, &pt[1..])?)
    })?;
    run("z_second_expression", &mut |rng| {
        let pt = fresh_point(rng, size + 1);
        Ok(sol.z_alt(ctx, &pt[0], &pt[1..])? == sol.z(ctx, &pt[0], &pt[1..])?)
    })?;
    run("z_independent_of_auxiliary", &mut |rng| {
        let pt = fresh_point(rng, size + 2);
        Ok(sol.z(ctx, &pt[0], &pt[2..])? == sol.z(ctx, &pt[1], &pt[2..])?)
    })?;
    let coeffs = sol.coefficients();
    let rows_layout = sol.layout();
    run("rows_vanish", &mut |rng| {
        let pt = RationalSamples.draw(rng, size + 2);
        let rows = sample_rows(ctx, &rows_layout, &pt)?;
        Ok(rows.iter().all(|r| z_from_row(r, &coeffs).is_zero_elem()))
    })?;
    sol.pass = checks.iter().all(|c| c.pass);
    sol.checks = checks;
    Ok(sol)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RankComparison {
    pub size: usize,
    pub rows: usize,
    pub prime: u64,
    pub rational_rank: usize,
    pub modular_rank: usize,
    pub agree: bool,
}

/// Ranks of one rational row set and of its reduction modulo a random
/// prime. Used to cross-check the modular backend where rational
/// elimination on the full system is out of reach.
pub fn compare_backend_ranks(
    ctx: &ModelContext,
    layout: &AnsatzLayout,
    samples: usize,
    seed: u64,
) -> Result<RankComparison> {
    let mut rng = rng_from_seed(seed);
    let sys = assemble_system(ctx, layout, samples, &RationalSamples, &mut rng)?;
    let mut rows = sys.rows.clone();
    rows.iter_mut().for_each(|r| clear_denominators(r));
    let (prime, reduced) = loop {
        let prime = random_prime_62(&mut rng);
        let reduced: Option<Vec<Vec<u64>>> = rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|x| Fp::from_rational(x, prime).map(|f| f.residue()))
                    .collect()
            })
            .collect();
        if let Some(reduced) = reduced {
            break (prime, reduced);
        }
    };
    let modular_rank = rref_mod(reduced, layout.unknowns(), prime).rank();
    let ints = rows
        .into_iter()
        .map(|r| r.into_iter().map(|v| v.numer().clone()).collect())
        .collect();
    let rational_rank = bareiss_echelon(ints, layout.unknowns()).rank();
    Ok(RankComparison {
        size: layout.size(),
        rows: sys.len(),
        prime,
        rational_rank,
        modular_rank,
        agree: rational_rank == modular_rank,
    })
}
