//! Exact verification of the exchange algebra of the monodromy entries and
//! of the scalar identities obtained by taking vacuum expectation values.
//!
//! An operator relation is stored as a list of terms Σ c_t · word_t that
//! must vanish on V_Q. For L ≤ 3 every column of the operator is checked;
//! for L = 4 five random vectors are probed instead.

pub mod exchange;

use std::cell::RefCell;
use std::collections::HashMap;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::context::{Model, ModelContext};
use crate::error::{Error, Result};
use crate::field::{format_rational, Field, Rational};
use crate::monodromy::{compute_h, compute_hbar, compute_z, Entry, Monodromy, StateVector};
use crate::sampling::{distinct_rationals, random_context, random_rational, rng_from_seed};
use crate::weights::{weight_unchecked, WeightName};
use crate::zh::coeffs::{omega, omega_bar, zh_coeffs};

pub use exchange::{exchange_coeffs, ExchangeKind};

/// Number of redraws allowed when a sample hits a vanishing denominator.
pub const MAX_RESAMPLES: usize = 50;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RelationId {
    /// A(λ1)A(λ2) = A(λ2)A(λ1)
    G1AA,
    G1AB,
    G1AE,
    G2BA,
    G2BB,
    G2BE,
    G3EA,
    G3EB,
    /// E(λ1)E(λ2) = E(λ2)E(λ1)
    G3EE,
    /// A-E reordering in terms of B-B products.
    AE,
    /// E-A reordering in terms of B-B products.
    EA,
    /// AE dressed with a product of E operators on the right.
    AEL,
    /// EA dressed with a product of E operators on the left.
    EAL,
    /// B B ∏E reordered into ∏E B B.
    FFb,
    /// ∏E B B reordered into B B ∏E.
    FbF,
    ZH,
    ZHb,
    HHb1,
    HHb2,
}

impl RelationId {
    pub const COMMUTATION: [RelationId; 9] = [
        RelationId::G1AA,
        RelationId::G1AB,
        RelationId::G1AE,
        RelationId::G2BA,
        RelationId::G2BB,
        RelationId::G2BE,
        RelationId::G3EA,
        RelationId::G3EB,
        RelationId::G3EE,
    ];
    pub const HIGHER: [RelationId; 6] = [
        RelationId::AE,
        RelationId::EA,
        RelationId::AEL,
        RelationId::EAL,
        RelationId::FFb,
        RelationId::FbF,
    ];
    pub const SCALAR: [RelationId; 4] = [
        RelationId::ZH,
        RelationId::ZHb,
        RelationId::HHb1,
        RelationId::HHb2,
    ];

    pub fn all() -> Vec<RelationId> {
        Self::COMMUTATION
            .iter()
            .chain(&Self::HIGHER)
            .chain(&Self::SCALAR)
            .copied()
            .collect()
    }

    pub fn is_operator(self) -> bool {
        !Self::SCALAR.contains(&self)
    }

    /// Number of spectral parameters the relation takes on a lattice of
    /// `size` sites.
    pub fn arity(self, size: usize) -> usize {
        match self {
            r if Self::COMMUTATION.contains(&r) => 2,
            RelationId::AE | RelationId::EA => 2,
            _ => size + 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RelationResidual {
    pub relation: RelationId,
    pub size: usize,
    pub operator_norm_zero: bool,
    /// Spectral parameters X_0, X_1, … of the sample, as "num/den".
    pub sample: Vec<String>,
    #[serde(with = "crate::field::serde_rational")]
    pub p: Rational,
    #[serde(with = "crate::field::serde_rational::vec")]
    pub m: Vec<Rational>,
}

type Word = Vec<(Entry, usize)>;

struct OperatorRelation<F> {
    terms: Vec<(F, Word)>,
}

fn degenerate(what: &str) -> Error {
    Error::DegenerateSample(format!("{what} vanishes"))
}

fn inv<F: Field>(v: F, what: &str) -> Result<F> {
    v.inverse().ok_or_else(|| degenerate(what))
}

/// d(α,β) and a evaluated at X_i / X_j.
struct PairWeights<F> {
    a: F,
    b: F,
    c: F,
    cbar: F,
    d: [[F; 3]; 3],
}

impl<F: Field> PairWeights<F> {
    fn new(ctx: &ModelContext<F>, xs: &[F], i: usize, j: usize) -> Result<Self> {
        let x = xs[i].checked_div(&xs[j]).ok_or(Error::ZeroArgument)?;
        let w = |n| weight_unchecked(ctx, n, &x);
        let d = [1u8, 2, 3].map(|a| [1u8, 2, 3].map(|b| w(WeightName::D(a, b))));
        Ok(PairWeights {
            a: w(WeightName::A),
            b: w(WeightName::B),
            c: w(WeightName::C),
            cbar: w(WeightName::CBar),
            d,
        })
    }

    fn d(&self, a: usize, b: usize) -> &F {
        &self.d[a - 1][b - 1]
    }
}

fn e_product(indices: impl IntoIterator<Item = usize>) -> Word {
    indices.into_iter().map(|i| (Entry::E, i)).collect()
}

fn concat(parts: &[Word]) -> Word {
    parts.iter().flatten().copied().collect()
}

/// Coefficients shared by the AE and AEL forms, at X1/X0:
/// returns (k_AE0, k_AE1, k_BB01, k_BB10).
fn ae_coeffs<F: Field>(w: &PairWeights<F>) -> Result<[F; 4]> {
    let i12 = inv(w.d(1, 2).clone(), "d12")?;
    let i32_ = inv(w.d(3, 2).clone(), "d32")?;
    let d11_12 = w.d(1, 1).clone() * &i12;
    Ok([
        d11_12.clone() - w.d(3, 1).clone() * &i32_,
        w.a.clone() * &i32_,
        w.d(2, 1).clone() * &i32_ - w.d(2, 2).clone() * &i32_ * &d11_12,
        w.a.clone() * &i32_ * &d11_12,
    ])
}

/// Coefficients shared by the EA and EAL forms, at X1/X0:
/// returns (k_EA10, k_EA01, k_BB10, k_BB01).
fn ea_coeffs<F: Field>(w: &PairWeights<F>) -> Result<[F; 4]> {
    let i32_ = inv(w.d(3, 2).clone(), "d32")?;
    let i33 = inv(w.d(3, 3).clone(), "d33")?;
    Ok([
        w.a.clone() * &i33,
        w.d(1, 2).clone() * &i32_ - w.d(1, 3).clone() * &i33,
        w.a.clone() * &i32_,
        w.d(2, 3).clone() * &i33 - w.d(2, 2).clone() * &i32_,
    ])
}

fn build_operator<F: Field>(
    ctx: &ModelContext<F>,
    rel: RelationId,
    xs: &[F],
) -> Result<OperatorRelation<F>> {
    use Entry as T;
    let one = ctx.one();
    let neg = |v: F| -v;
    let (a_, b_, e_) = (T::A, T::B, T::E);
    let mut terms: Vec<(F, Word)> = Vec::new();
    match rel {
        RelationId::G1AA
        | RelationId::G1AB
        | RelationId::G1AE
        | RelationId::G2BA
        | RelationId::G2BB
        | RelationId::G2BE
        | RelationId::G3EA
        | RelationId::G3EB
        | RelationId::G3EE => {
            // Parameters λ1 = xs[0], λ2 = xs[1]; weights at X2/X1.
            let w = PairWeights::new(ctx, xs, 1, 0)?;
            let over = |num: &F, den: &F, what| -> Result<F> {
                Ok(num.clone() * &inv(den.clone(), what)?)
            };
            let (lhs, rest): (Word, Vec<(F, Word)>) = match rel {
                RelationId::G1AA => (
                    vec![(a_, 0), (a_, 1)],
                    vec![(neg(one.clone()), vec![(a_, 1), (a_, 0)])],
                ),
                RelationId::G3EE => (
                    vec![(e_, 0), (e_, 1)],
                    vec![(neg(one.clone()), vec![(e_, 1), (e_, 0)])],
                ),
                RelationId::G1AB => (
                    vec![(a_, 0), (b_, 1)],
                    vec![
                        (neg(over(&w.a, &w.b, "b")?), vec![(b_, 1), (a_, 0)]),
                        (over(&w.c, &w.b, "b")?, vec![(b_, 0), (a_, 1)]),
                    ],
                ),
                RelationId::G1AE => (
                    vec![(a_, 0), (e_, 1)],
                    vec![
                        (neg(over(&w.a, w.d(3, 3), "d33")?), vec![(e_, 1), (a_, 0)]),
                        (over(w.d(1, 3), w.d(3, 3), "d33")?, vec![(e_, 0), (a_, 1)]),
                        (over(w.d(2, 3), w.d(3, 3), "d33")?, vec![(b_, 0), (b_, 1)]),
                    ],
                ),
                RelationId::G2BA => (
                    vec![(b_, 0), (a_, 1)],
                    vec![
                        (neg(over(&w.a, &w.b, "b")?), vec![(a_, 1), (b_, 0)]),
                        (over(&w.cbar, &w.b, "b")?, vec![(a_, 0), (b_, 1)]),
                    ],
                ),
                RelationId::G2BB => (
                    vec![(b_, 0), (b_, 1)],
                    vec![
                        (neg(over(&w.a, w.d(2, 1), "d21")?), vec![(a_, 1), (e_, 0)]),
                        (over(w.d(3, 1), w.d(2, 1), "d21")?, vec![(a_, 0), (e_, 1)]),
                        (over(w.d(1, 1), w.d(2, 1), "d21")?, vec![(e_, 0), (a_, 1)]),
                    ],
                ),
                RelationId::G2BE => (
                    vec![(b_, 0), (e_, 1)],
                    vec![
                        (neg(over(&w.a, &w.b, "b")?), vec![(e_, 1), (b_, 0)]),
                        (over(&w.c, &w.b, "b")?, vec![(e_, 0), (b_, 1)]),
                    ],
                ),
                RelationId::G3EA => (
                    vec![(e_, 0), (a_, 1)],
                    vec![
                        (neg(over(&w.a, w.d(1, 2), "d12")?), vec![(b_, 1), (b_, 0)]),
                        (over(w.d(2, 2), w.d(1, 2), "d12")?, vec![(b_, 0), (b_, 1)]),
                        (over(w.d(3, 2), w.d(1, 2), "d12")?, vec![(a_, 0), (e_, 1)]),
                    ],
                ),
                RelationId::G3EB => (
                    vec![(e_, 0), (b_, 1)],
                    vec![
                        (neg(over(&w.a, &w.b, "b")?), vec![(b_, 1), (e_, 0)]),
                        (over(&w.cbar, &w.b, "b")?, vec![(b_, 0), (e_, 1)]),
                    ],
                ),
                _ => unreachable!(),
            };
            terms.push((one.clone(), lhs));
            terms.extend(rest);
        }
        RelationId::AE | RelationId::AEL => {
            let w = PairWeights::new(ctx, xs, 1, 0)?;
            let [k0, k1, k01, k10] = ae_coeffs(&w)?;
            let n = if rel == RelationId::AE {
                1
            } else {
                xs.len() - 1
            };
            let tail = e_product(2..=n);
            terms.push((k0, concat(&[vec![(a_, 0)], vec![(e_, 1)], tail.clone()])));
            terms.push((k1, concat(&[vec![(a_, 1)], vec![(e_, 0)], tail.clone()])));
            terms.push((neg(k01), concat(&[vec![(b_, 0), (b_, 1)], tail.clone()])));
            terms.push((neg(k10), concat(&[vec![(b_, 1), (b_, 0)], tail])));
        }
        RelationId::EA | RelationId::EAL => {
            let w = PairWeights::new(ctx, xs, 1, 0)?;
            let [k10, k01, kb10, kb01] = ea_coeffs(&w)?;
            let n = if rel == RelationId::EA {
                1
            } else {
                xs.len() - 1
            };
            let tail = e_product(2..=n);
            terms.push((k10, concat(&[vec![(e_, 1)], tail.clone(), vec![(a_, 0)]])));
            terms.push((k01, concat(&[vec![(e_, 0)], tail.clone(), vec![(a_, 1)]])));
            terms.push((neg(kb10), concat(&[tail.clone(), vec![(b_, 1), (b_, 0)]])));
            terms.push((neg(kb01), concat(&[tail, vec![(b_, 0), (b_, 1)]])));
        }
        RelationId::FFb | RelationId::FbF => {
            let n = xs.len() - 2;
            let barred = rel == RelationId::FbF;
            let head = if barred {
                concat(&[e_product(1..=n), vec![(b_, 0), (b_, n + 1)]])
            } else {
                concat(&[vec![(b_, n + 1), (b_, 0)], e_product(1..=n)])
            };
            terms.push((one.clone(), head));
            let (mk, nk) = if barred {
                (ExchangeKind::MBar, ExchangeKind::NBar)
            } else {
                (ExchangeKind::M, ExchangeKind::N)
            };
            for j in 0..=n {
                for k in (0..=n + 1).filter(|&k| k != j) {
                    let coef = exchange_coeffs(ctx, mk, n, j, k, xs)?
                        * exchange_coeffs(ctx, nk, n, j, k, xs)?;
                    let es = e_product((0..=n + 1).filter(|&l| l != j && l != k));
                    let word = if barred {
                        concat(&[vec![(b_, j), (b_, k)], es])
                    } else {
                        concat(&[es, vec![(b_, k), (b_, j)]])
                    };
                    terms.push((neg(coef), word));
                }
            }
        }
        _ => {
            return Err(Error::InvalidInput(format!(
                "{rel:?} is not an operator relation"
            )))
        }
    }
    Ok(OperatorRelation { terms })
}

impl<F: Field> OperatorRelation<F> {
    fn apply(&self, monos: &[Monodromy<F>], v: &StateVector<F>) -> StateVector<F> {
        let zero = v.components()[0].zero_like();
        let mut total = StateVector::zero(v.sites(), &zero);
        for (coef, word) in &self.terms {
            if coef.is_zero_elem() {
                continue;
            }
            let mut out = v.clone();
            for &(entry, idx) in word.iter().rev() {
                let (a, b) = entry.indices();
                out = monos[idx].apply(a, b, &out);
            }
            total.add_scaled(&out, coef);
        }
        total
    }
}

/// Builds the relation at `xs` and checks that it annihilates V_Q.
pub fn operator_identity_holds<F: Field>(
    ctx: &ModelContext<F>,
    rel: RelationId,
    xs: &[F],
    probe: Option<&[StateVector<F>]>,
) -> Result<bool> {
    let relation = build_operator(ctx, rel, xs)?;
    let monos = xs
        .iter()
        .map(|x| Monodromy::new(ctx, x))
        .collect::<Result<Vec<_>>>()?;
    let like = ctx.one();
    let dim = 3usize.pow(ctx.size() as u32);
    let vanishes = |v: &StateVector<F>| relation.apply(&monos, v).is_zero();
    Ok(match probe {
        Some(vectors) => vectors.par_iter().all(vanishes),
        None => (0..dim)
            .into_par_iter()
            .all(|i| vanishes(&StateVector::basis(ctx.size(), i, &like))),
    })
}

fn check_arity(rel: RelationId, size: usize, xs: &[Rational]) -> Result<()> {
    let want = match rel {
        RelationId::FFb | RelationId::FbF => xs.len().max(2),
        _ => rel.arity(size),
    };
    if xs.len() == want && xs.len() >= 2 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "{rel:?} takes {want} spectral parameters, got {}",
            xs.len()
        )))
    }
}

fn residual(ctx: &ModelContext, rel: RelationId, xs: &[Rational], ok: bool) -> RelationResidual {
    RelationResidual {
        relation: rel,
        size: ctx.size(),
        operator_norm_zero: ok,
        sample: xs.iter().map(format_rational).collect(),
        p: ctx.p().clone(),
        m: ctx.inhomogeneities().to_vec(),
    }
}

/// Exact check of an operator relation. `xs` are the spectral parameters
/// in the order X_0, X_1, … of the relation (for the nine quadratic
/// relations, X_0 and X_1 play the roles of λ1 and λ2). For FFb and FbF
/// the order n is `xs.len() − 2`.
pub fn verify_relation(
    ctx: &ModelContext,
    rel: RelationId,
    xs: &[Rational],
    seed: u64,
) -> Result<RelationResidual> {
    if !rel.is_operator() {
        return verify_phi_lemmas(ctx, rel, xs);
    }
    check_arity(rel, ctx.size(), xs)?;
    let ok = if ctx.size() <= 3 {
        operator_identity_holds(ctx, rel, xs, None)?
    } else {
        let mut rng = rng_from_seed(seed);
        let dim = 3usize.pow(ctx.size() as u32);
        let probes: Vec<StateVector<Rational>> = (0..5)
            .map(|_| {
                let comps = (0..dim).map(|_| random_rational(&mut rng, 9, 5)).collect();
                StateVector::from_components(ctx.size(), comps).expect("length")
            })
            .collect();
        operator_identity_holds(ctx, rel, xs, Some(&probes))?
    };
    Ok(residual(ctx, rel, xs, ok))
}

fn without(xs: &[Rational], skip: &[usize]) -> Vec<Rational> {
    xs.iter()
        .enumerate()
        .filter(|(i, _)| !skip.contains(i))
        .map(|(_, x)| x.clone())
        .collect()
}

/// H evaluated as H(lattice | y1, y2).
pub type HFn<'a> = dyn Fn(&[Rational], &Rational, &Rational) -> Result<Rational> + 'a;
/// H̄ evaluated as H̄(y1, y2 | lattice).
pub type HBarFn<'a> = dyn Fn(&Rational, &Rational, &[Rational]) -> Result<Rational> + 'a;

/// Right-hand side of the second hhb line, ω̄(λ_L) H̄(λ0, λL | X_L), for an
/// arbitrary H supplied by the caller.
pub fn hhb_line2_rhs(ctx: &ModelContext, lam: &[Rational], h: &HFn) -> Result<Rational> {
    let size = lam.len() - 1;
    let n = size - 1;
    let mut total = ctx.zero();
    for j in 0..size {
        for k in (0..=size).filter(|&k| k != j) {
            let coef = exchange_coeffs(ctx, ExchangeKind::M, n, j, k, lam)?
                * exchange_coeffs(ctx, ExchangeKind::N, n, j, k, lam)?;
            let lattice = without(lam, &[j, k]);
            total += coef * omega(ctx, &lam[j]) * h(&lattice, &lam[j], &lam[k])?;
        }
    }
    Ok(total)
}

/// Right-hand side of the first hhb line, ω(λ_L) H(X_L | λL, λ0), for an
/// arbitrary H̄.
pub fn hhb_line1_rhs(ctx: &ModelContext, lam: &[Rational], hbar: &HBarFn) -> Result<Rational> {
    let size = lam.len() - 1;
    let n = size - 1;
    let mut total = ctx.zero();
    for j in 0..size {
        for k in (0..=size).filter(|&k| k != j) {
            let coef = exchange_coeffs(ctx, ExchangeKind::MBar, n, j, k, lam)?
                * exchange_coeffs(ctx, ExchangeKind::NBar, n, j, k, lam)?;
            let lattice = without(lam, &[j, k]);
            total += coef * omega_bar(ctx, &lam[j]) * hbar(&lam[k], &lam[j], &lattice)?;
        }
    }
    Ok(total)
}

/// Scalar identities obtained from vacuum expectation values. `xs` holds
/// X_0, X_1, …, X_L. The partition functions come from the monodromy
/// matrix and the coefficients from their closed formulas.
pub fn verify_phi_lemmas(
    ctx: &ModelContext,
    rel: RelationId,
    xs: &[Rational],
) -> Result<RelationResidual> {
    check_arity(rel, ctx.size(), xs)?;
    let size = ctx.size();
    let ok = match rel {
        RelationId::ZH | RelationId::ZHb => {
            let set = zh_coeffs(ctx, &xs[0], &xs[1])?;
            let lattice = &xs[1..];
            let swapped = without(xs, &[1]);
            let rest = &xs[2..];
            let z = compute_z(ctx, lattice)?;
            let z0 = compute_z(ctx, &swapped)?;
            if rel == RelationId::ZH {
                set.omega0 * z + set.omega1 * z0
                    == set.upsilon0 * compute_h(ctx, rest, &xs[0], &xs[1])?
                        + set.upsilon1 * compute_h(ctx, rest, &xs[1], &xs[0])?
            } else {
                set.omega_bar0 * z + set.omega_bar1 * z0
                    == set.upsilon_bar0 * compute_hbar(ctx, &xs[1], &xs[0], rest)?
                        + set.upsilon_bar1 * compute_hbar(ctx, &xs[0], &xs[1], rest)?
            }
        }
        RelationId::HHb1 => {
            let lhs = omega(ctx, &xs[size]) * compute_h(ctx, &xs[1..size], &xs[size], &xs[0])?;
            lhs == hhb_line1_rhs(ctx, xs, &|y1, y2, us| compute_hbar(ctx, y1, y2, us))?
        }
        RelationId::HHb2 => {
            let lhs =
                omega_bar(ctx, &xs[size]) * compute_hbar(ctx, &xs[0], &xs[size], &xs[1..size])?;
            lhs == hhb_line2_rhs(ctx, xs, &|us, y1, y2| compute_h(ctx, us, y1, y2))?
        }
        _ => {
            return Err(Error::InvalidInput(format!(
                "{rel:?} is not a scalar identity"
            )))
        }
    };
    Ok(residual(ctx, rel, xs, ok))
}

/// Checks that the first hhb line follows from the second: H is replaced by
/// a random function symmetric in its lattice arguments, H̄ is defined from
/// it through the second line, and the first line must then hold exactly.
pub fn hhb_redundancy(ctx: &ModelContext, xs: &[Rational], seed: u64) -> Result<bool> {
    check_arity(RelationId::HHb1, ctx.size(), xs)?;
    let size = ctx.size();
    type Key = (Vec<Rational>, Rational, Rational);
    let table: RefCell<HashMap<Key, Rational>> = RefCell::new(HashMap::new());
    let rng = RefCell::new(rng_from_seed(seed));
    let h = |us: &[Rational], y1: &Rational, y2: &Rational| -> Result<Rational> {
        let mut key_us = us.to_vec();
        key_us.sort();
        let key = (key_us, y1.clone(), y2.clone());
        let mut table = table.borrow_mut();
        let value = table
            .entry(key)
            .or_insert_with(|| random_rational(&mut *rng.borrow_mut(), 1000, 97));
        Ok(value.clone())
    };
    let hbar = |y1: &Rational, y2: &Rational, us: &[Rational]| -> Result<Rational> {
        let mut lam = vec![y1.clone()];
        lam.extend_from_slice(us);
        lam.push(y2.clone());
        let w = omega_bar(ctx, y2);
        let rhs = hhb_line2_rhs(ctx, &lam, &h)?;
        rhs.checked_div(&w).ok_or(Error::OmegaZero)
    };
    let lhs = omega(ctx, &xs[size]) * h(&xs[1..size], &xs[size], &xs[0])?;
    Ok(lhs == hhb_line1_rhs(ctx, xs, &hbar)?)
}

/// Draws nondegenerate samples for one relation: a fresh context per
/// sample and pairwise-distinct spectral parameters, redrawing up to
/// [`MAX_RESAMPLES`] times on vanishing denominators.
pub fn verify_relation_sampled(
    model: Model,
    rel: RelationId,
    size: usize,
    arity: usize,
    samples: usize,
    seed: u64,
) -> Result<Vec<RelationResidual>> {
    let mut rng = rng_from_seed(seed);
    let mut out = Vec::with_capacity(samples);
    for _ in 0..samples {
        let mut attempts = 0;
        loop {
            let ctx = random_context(&mut rng, model, size);
            let xs = distinct_rationals(&mut rng, arity, 30, 7);
            let probe_seed = rng.gen();
            match verify_relation(&ctx, rel, &xs, probe_seed) {
                Ok(r) => {
                    out.push(r);
                    break;
                }
                Err(Error::DegenerateSample(_) | Error::OmegaZero) if attempts < MAX_RESAMPLES => {
                    attempts += 1;
                }
                Err(e) => return Err(e),
            }
        }
    }
    Ok(out)
}

/// Default parameter count for a relation sampled on `size` sites: FFb and
/// FbF use n = L − 1.
pub fn default_arity(rel: RelationId, size: usize) -> usize {
    rel.arity(size)
}

/// Every relation at `samples` points on a lattice of `size` sites.
pub fn verify_algebra(
    model: Model,
    size: usize,
    samples: usize,
    seed: u64,
) -> Result<Vec<RelationResidual>> {
    let mut out = Vec::new();
    for (i, rel) in RelationId::all().into_iter().enumerate() {
        let sub_seed = seed.wrapping_add(1000 * i as u64);
        out.extend(verify_relation_sampled(
            model,
            rel,
            size,
            default_arity(rel, size),
            samples,
            sub_seed,
        )?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::make_context;
    use crate::field::{int, rat};

    fn ctx2(model: Model) -> ModelContext {
        make_context(model, rat(3, 2), vec![int(2), rat(5, 3)]).unwrap()
    }

    #[test]
    fn commutation_relations_two_sites() {
        for model in Model::ALL {
            let ctx = ctx2(model);
            for rel in RelationId::COMMUTATION {
                let r = verify_relation(&ctx, rel, &[int(7), rat(11, 3)], 0).unwrap();
                assert!(r.operator_norm_zero, "{model} {rel:?}");
            }
        }
    }

    #[test]
    fn higher_relations_two_sites() {
        let ctx = ctx2(Model::Ik);
        let xs = [int(7), rat(11, 3), rat(2, 5)];
        for rel in [RelationId::AE, RelationId::EA] {
            assert!(
                verify_relation(&ctx, rel, &xs[..2], 0)
                    .unwrap()
                    .operator_norm_zero
            );
        }
        for rel in [
            RelationId::AEL,
            RelationId::EAL,
            RelationId::FFb,
            RelationId::FbF,
        ] {
            assert!(
                verify_relation(&ctx, rel, &xs, 0)
                    .unwrap()
                    .operator_norm_zero,
                "{rel:?}"
            );
        }
    }

    #[test]
    fn scalar_identities_two_sites() {
        let ctx = ctx2(Model::Fz);
        let xs = [int(7), rat(11, 3), rat(2, 5)];
        for rel in RelationId::SCALAR {
            assert!(
                verify_relation(&ctx, rel, &xs, 0)
                    .unwrap()
                    .operator_norm_zero,
                "{rel:?}"
            );
        }
        assert!(hhb_redundancy(&ctx, &xs, 9).unwrap());
    }

    #[test]
    fn a_wrong_coefficient_is_detected() {
        let ctx = ctx2(Model::Ik);
        let xs = [int(7), rat(11, 3)];
        let mut rel = build_operator(&ctx, RelationId::G1AB, &xs).unwrap();
        rel.terms[1].0 = rel.terms[1].0.clone() + int(1);
        let monos: Vec<_> = xs
            .iter()
            .map(|x| Monodromy::new(&ctx, x).unwrap())
            .collect();
        let nonzero = (0..9).any(|i| {
            !rel.apply(&monos, &StateVector::basis(2, i, &int(1)))
                .is_zero()
        });
        assert!(nonzero);
    }

    #[test]
    fn wrong_arity_is_rejected() {
        let ctx = ctx2(Model::Ik);
        assert!(matches!(
            verify_relation(&ctx, RelationId::AEL, &[int(2), int(3)], 0),
            Err(Error::InvalidInput(_))
        ));
    }
}
