//! Monodromy-matrix entries acting on the quantum space (C^3)^{⊗L}.
//!
//! Basis vectors are e_{β1}⊗…⊗e_{βL} with site 1 the most significant
//! base-3 digit. T(X) = R_{a1}(X/m_1)…R_{aL}(X/m_L), and the operator
//! T_α^β is its (α, β) block in the auxiliary space.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::context::ModelContext;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::weights::{r_matrix, RMatrix};
use crate::zh::coeffs::{omega, omega_bar};

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector<F> {
    sites: usize,
    components: Vec<F>,
}

impl<F: Field> StateVector<F> {
    pub fn zero(sites: usize, like: &F) -> Self {
        StateVector {
            sites,
            components: vec![like.zero_like(); 3usize.pow(sites as u32)],
        }
    }

    pub fn basis(sites: usize, index: usize, like: &F) -> Self {
        let mut v = Self::zero(sites, like);
        v.components[index] = like.one_like();
        v
    }

    /// e_c ⊗ … ⊗ e_c.
    pub fn uniform(sites: usize, color: u8, like: &F) -> Self {
        let digit = (color - 1) as usize;
        let index = (0..sites).fold(0, |acc, _| 3 * acc + digit);
        Self::basis(sites, index, like)
    }

    /// The reference state |0⟩ = e1^{⊗L}.
    pub fn vacuum(sites: usize, like: &F) -> Self {
        Self::uniform(sites, 1, like)
    }

    /// The dual reference state ⟨0̄| = e3^{⊗L}, as a row vector.
    pub fn dual_vacuum(sites: usize, like: &F) -> Self {
        Self::uniform(sites, 3, like)
    }

    pub fn from_components(sites: usize, components: Vec<F>) -> Result<Self> {
        if components.len() != 3usize.pow(sites as u32) {
            return Err(Error::InvalidInput("state vector has wrong length".into()));
        }
        Ok(StateVector { sites, components })
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn components(&self) -> &[F] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(Field::is_zero_elem)
    }

    pub fn dot(&self, other: &Self) -> F {
        let zero = self.components[0].zero_like();
        self.components
            .iter()
            .zip(&other.components)
            .filter(|(a, b)| !a.is_zero_elem() && !b.is_zero_elem())
            .fold(zero, |acc, (a, b)| acc + a.clone() * b)
    }

    pub fn scale(&self, s: &F) -> Self {
        StateVector {
            sites: self.sites,
            components: self.components.iter().map(|c| c.clone() * s).collect(),
        }
    }

    pub fn add_scaled(&mut self, other: &Self, s: &F) {
        for (a, b) in self.components.iter_mut().zip(&other.components) {
            if !b.is_zero_elem() {
                *a = a.clone() + b.clone() * s;
            }
        }
    }
}

/// The monodromy matrix at one spectral value, with its site R-matrices
/// precomputed.
#[derive(Clone, Debug)]
pub struct Monodromy<F> {
    sites: Vec<RMatrix<F>>,
}

impl<F: Field> Monodromy<F> {
    pub fn new(ctx: &ModelContext<F>, x: &F) -> Result<Self> {
        if x.is_zero_elem() {
            return Err(Error::ZeroArgument);
        }
        let sites = ctx
            .inhomogeneities()
            .iter()
            .map(|m| r_matrix(ctx, &x.checked_div(m).ok_or(Error::ZeroArgument)?))
            .collect::<Result<Vec<_>>>()?;
        Ok(Monodromy { sites })
    }

    /// Applies the auxiliary block (g, g′) of the R-matrix at `site`,
    /// i.e. the local map e_b ↦ Σ_t R[(g,t),(g′,b)] e_t, accumulating into
    /// `out`. With `dual` the transposed map acts on a row vector.
    fn apply_site(&self, site: usize, g: usize, gp: usize, v: &[F], out: &mut [F], dual: bool) {
        let n = self.sites.len();
        let stride = 3usize.pow((n - 1 - site) as u32);
        let r = &self.sites[site];
        for (s, val) in v.iter().enumerate() {
            if val.is_zero_elem() {
                continue;
            }
            let digit = (s / stride) % 3;
            let base = s - digit * stride;
            for other in 0..3 {
                let e = if dual {
                    r.at(3 * g + digit, 3 * gp + other)
                } else {
                    r.at(3 * g + other, 3 * gp + digit)
                };
                if !e.is_zero_elem() {
                    let target = base + other * stride;
                    out[target] = out[target].clone() + e.clone() * val;
                }
            }
        }
    }

    fn fold(&self, alpha: usize, beta: usize, v: &StateVector<F>, dual: bool) -> StateVector<F> {
        let n = self.sites.len();
        let zero = v.components[0].zero_like();
        let blank = || vec![zero.clone(); v.len()];
        if dual {
            // Row vector: contract from site 1 outward, starting at index α.
            let mut u: Vec<Vec<F>> = (0..3)
                .map(|g| {
                    let mut out = blank();
                    self.apply_site(0, alpha - 1, g, &v.components, &mut out, true);
                    out
                })
                .collect();
            for site in 1..n {
                u = (0..3)
                    .map(|gp| {
                        let mut out = blank();
                        for (g, ug) in u.iter().enumerate() {
                            self.apply_site(site, g, gp, ug, &mut out, true);
                        }
                        out
                    })
                    .collect();
            }
            StateVector {
                sites: n,
                components: u.swap_remove(beta - 1),
            }
        } else {
            let mut u: Vec<Vec<F>> = (0..3)
                .map(|g| {
                    let mut out = blank();
                    self.apply_site(n - 1, g, beta - 1, &v.components, &mut out, false);
                    out
                })
                .collect();
            for site in (0..n - 1).rev() {
                u = (0..3)
                    .map(|g| {
                        let mut out = blank();
                        for (gp, ugp) in u.iter().enumerate() {
                            self.apply_site(site, g, gp, ugp, &mut out, false);
                        }
                        out
                    })
                    .collect();
            }
            StateVector {
                sites: n,
                components: u.swap_remove(alpha - 1),
            }
        }
    }

    /// T_α^β v.
    pub fn apply(&self, alpha: usize, beta: usize, v: &StateVector<F>) -> StateVector<F> {
        assert!((1..=3).contains(&alpha) && (1..=3).contains(&beta));
        assert_eq!(v.sites, self.sites.len());
        self.fold(alpha, beta, v, false)
    }

    /// w T_α^β for a row vector w.
    pub fn apply_dual(&self, alpha: usize, beta: usize, w: &StateVector<F>) -> StateVector<F> {
        assert!((1..=3).contains(&alpha) && (1..=3).contains(&beta));
        assert_eq!(w.sites, self.sites.len());
        self.fold(alpha, beta, w, true)
    }
}

/// T_α^β(X) v.
pub fn apply_t_entry<F: Field>(
    ctx: &ModelContext<F>,
    alpha: usize,
    beta: usize,
    x: &F,
    v: &StateVector<F>,
) -> Result<StateVector<F>> {
    Ok(Monodromy::new(ctx, x)?.apply(alpha, beta, v))
}

/// Named monodromy entries: A=T11, B=T12, E=T13; A_i, B_i, C_i as usual.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Entry {
    A1,
    A2,
    A3,
    B1,
    B2,
    B3,
    C1,
    C2,
    C3,
}

impl Entry {
    pub const ALL: [Entry; 9] = [
        Entry::A1,
        Entry::A2,
        Entry::A3,
        Entry::B1,
        Entry::B2,
        Entry::B3,
        Entry::C1,
        Entry::C2,
        Entry::C3,
    ];
    pub const A: Entry = Entry::A1;
    pub const B: Entry = Entry::B1;
    pub const E: Entry = Entry::B2;

    pub fn indices(self) -> (usize, usize) {
        match self {
            Entry::A1 => (1, 1),
            Entry::A2 => (2, 2),
            Entry::A3 => (3, 3),
            Entry::B1 => (1, 2),
            Entry::B2 => (1, 3),
            Entry::B3 => (2, 3),
            Entry::C1 => (2, 1),
            Entry::C2 => (3, 1),
            Entry::C3 => (3, 2),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Entry::A1 => "A1",
            Entry::A2 => "A2",
            Entry::A3 => "A3",
            Entry::B1 => "B1",
            Entry::B2 => "B2",
            Entry::B3 => "B3",
            Entry::C1 => "C1",
            Entry::C2 => "C2",
            Entry::C3 => "C3",
        }
    }
}

/// An ordered operator product, written left to right; the rightmost
/// factor acts first on a ket.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorWord<F> {
    factors: Vec<(Entry, F)>,
}

impl<F: Field> OperatorWord<F> {
    pub fn new(factors: Vec<(Entry, F)>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidInput("empty operator word".into()));
        }
        if factors.iter().any(|(_, x)| x.is_zero_elem()) {
            return Err(Error::ZeroArgument);
        }
        Ok(OperatorWord { factors })
    }

    pub fn factors(&self) -> &[(Entry, F)] {
        &self.factors
    }

    pub fn apply(&self, ctx: &ModelContext<F>, v: &StateVector<F>) -> Result<StateVector<F>> {
        let mut out = v.clone();
        for (entry, x) in self.factors.iter().rev() {
            let (a, b) = entry.indices();
            out = Monodromy::new(ctx, x)?.apply(a, b, &out);
        }
        Ok(out)
    }

    pub fn apply_dual(&self, ctx: &ModelContext<F>, w: &StateVector<F>) -> Result<StateVector<F>> {
        let mut out = w.clone();
        for (entry, x) in &self.factors {
            let (a, b) = entry.indices();
            out = Monodromy::new(ctx, x)?.apply_dual(a, b, &out);
        }
        Ok(out)
    }

    /// ⟨0̄| word |0⟩.
    pub fn expectation(&self, ctx: &ModelContext<F>) -> Result<F> {
        let like = ctx.one();
        let ket = self.apply(ctx, &StateVector::vacuum(ctx.size(), &like))?;
        Ok(StateVector::dual_vacuum(ctx.size(), &like).dot(&ket))
    }

    /// Every column of the operator on V_Q, computed in parallel.
    pub fn matrix_columns(&self, ctx: &ModelContext<F>) -> Result<Vec<StateVector<F>>> {
        let like = ctx.one();
        let dim = 3usize.pow(ctx.size() as u32);
        (0..dim)
            .into_par_iter()
            .map(|i| self.apply(ctx, &StateVector::basis(ctx.size(), i, &like)))
            .collect()
    }
}

fn require_len<F>(ctx: &ModelContext<F>, got: usize, want: usize, what: &str) -> Result<()>
where
    F: Field,
{
    if got == want {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "{what}: expected {want} arguments for L = {}, got {got}",
            ctx.size()
        )))
    }
}

/// Z = ⟨0̄| E(X_L)…E(X_1) |0⟩.
pub fn compute_z<F: Field>(ctx: &ModelContext<F>, xs: &[F]) -> Result<F> {
    require_len(ctx, xs.len(), ctx.size(), "Z")?;
    let factors = xs.iter().rev().map(|x| (Entry::E, x.clone())).collect();
    OperatorWord::new(factors)?.expectation(ctx)
}

/// F = ⟨0̄| E(U_{L−1})…E(U_1) B(Y2) B(Y1) |0⟩.
pub fn compute_f<F: Field>(ctx: &ModelContext<F>, us: &[F], y1: &F, y2: &F) -> Result<F> {
    require_len(ctx, us.len() + 1, ctx.size(), "F")?;
    let mut factors: Vec<_> = us.iter().rev().map(|u| (Entry::E, u.clone())).collect();
    factors.push((Entry::B, y2.clone()));
    factors.push((Entry::B, y1.clone()));
    OperatorWord::new(factors)?.expectation(ctx)
}

/// F̄ = ⟨0̄| B(Y2) B(Y1) E(U_{L−1})…E(U_1) |0⟩.
pub fn compute_fbar<F: Field>(ctx: &ModelContext<F>, y1: &F, y2: &F, us: &[F]) -> Result<F> {
    require_len(ctx, us.len() + 1, ctx.size(), "Fbar")?;
    let mut factors = vec![(Entry::B, y2.clone()), (Entry::B, y1.clone())];
    factors.extend(us.iter().rev().map(|u| (Entry::E, u.clone())));
    OperatorWord::new(factors)?.expectation(ctx)
}

/// H = F / ω(Y1).
pub fn compute_h<F: Field>(ctx: &ModelContext<F>, us: &[F], y1: &F, y2: &F) -> Result<F> {
    let w = omega(ctx, y1);
    if w.is_zero_elem() {
        return Err(Error::OmegaZero);
    }
    Ok(compute_f(ctx, us, y1, y2)? * w.inverse().expect("nonzero"))
}

/// H̄ = F̄ / ω̄(Y2).
pub fn compute_hbar<F: Field>(ctx: &ModelContext<F>, y1: &F, y2: &F, us: &[F]) -> Result<F> {
    let w = omega_bar(ctx, y2);
    if w.is_zero_elem() {
        return Err(Error::OmegaZero);
    }
    Ok(compute_fbar(ctx, y1, y2, us)? * w.inverse().expect("nonzero"))
}
