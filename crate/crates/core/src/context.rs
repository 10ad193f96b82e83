//! Model parameters shared by every evaluation.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Field, Rational};
use crate::modular::Fp;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    /// Izergin-Korepin, zeta = -q^3.
    Ik,
    /// Fateev-Zamolodchikov, zeta = q.
    Fz,
}

impl Model {
    pub const ALL: [Model; 2] = [Model::Ik, Model::Fz];

    pub fn name(self) -> &'static str {
        match self {
            Model::Ik => "ik",
            Model::Fz => "fz",
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ik" => Ok(Model::Ik),
            "fz" => Ok(Model::Fz),
            other => Err(Error::Parse(format!("unknown model {other:?}"))),
        }
    }
}

/// Immutable evaluation context. Spectral quantities are multiplicative
/// throughout: `p` realizes q^{1/2}, the inhomogeneities `m` realize
/// e^{2 mu_j}, and spectral arguments are always e^{2 lambda}.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelContext<F = Rational> {
    model: Model,
    p: F,
    p_inv: F,
    q: F,
    zeta: F,
    m: Vec<F>,
}

/// Builds a rational context, rejecting parameters that make the weights or
/// the coefficient denominators degenerate.
pub fn make_context(model: Model, p: Rational, m: Vec<Rational>) -> Result<ModelContext> {
    ModelContext::new(model, p, m)
}

impl<F: Field> ModelContext<F> {
    pub fn new(model: Model, p: F, m: Vec<F>) -> Result<Self> {
        let one = p.one_like();
        if p.is_zero_elem() || p == one || p == -one.clone() {
            return Err(Error::DegenerateParameter(
                "p must avoid 0, 1 and -1".into(),
            ));
        }
        if m.iter().any(Field::is_zero_elem) {
            return Err(Error::DegenerateParameter(
                "inhomogeneities must be nonzero".into(),
            ));
        }
        let q = p.square();
        let zeta = match model {
            Model::Fz => q.clone(),
            Model::Ik => -(q.square() * &q),
        };
        if q.square() == zeta {
            return Err(Error::DegenerateParameter("q^2 = zeta".into()));
        }
        let p_inv = p.inverse().expect("p is nonzero");
        Ok(ModelContext {
            model,
            p,
            p_inv,
            q,
            zeta,
            m,
        })
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn p(&self) -> &F {
        &self.p
    }

    pub fn q(&self) -> &F {
        &self.q
    }

    pub fn zeta(&self) -> &F {
        &self.zeta
    }

    pub fn inhomogeneities(&self) -> &[F] {
        &self.m
    }

    /// Lattice width, i.e. the number of inhomogeneities.
    pub fn size(&self) -> usize {
        self.m.len()
    }

    /// p^k, i.e. q^{k/2}.
    pub fn q_half_power(&self, k: i32) -> F {
        if k >= 0 {
            self.p.pow_i(k).expect("nonnegative power")
        } else {
            self.p_inv.pow_i(-k).expect("nonnegative power")
        }
    }

    pub fn one(&self) -> F {
        self.p.one_like()
    }

    pub fn zero(&self) -> F {
        self.p.zero_like()
    }

    pub fn constant(&self, value: i64) -> F {
        F::from_i64_like(value, &self.p)
    }

    /// Same model and p with different inhomogeneities.
    pub fn with_inhomogeneities(&self, m: Vec<F>) -> Result<Self> {
        ModelContext::new(self.model, self.p.clone(), m)
    }
}

impl ModelContext<Rational> {
    /// Image of this context in Z/pZ, or `None` if some parameter has a
    /// denominator divisible by the prime or degenerates there.
    pub fn reduce(&self, prime: u64) -> Option<ModelContext<Fp>> {
        let p = Fp::from_rational(&self.p, prime)?;
        let m = self
            .m
            .iter()
            .map(|mj| Fp::from_rational(mj, prime))
            .collect::<Option<Vec<_>>>()?;
        ModelContext::new(self.model, p, m).ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{int, rat};

    #[test]
    fn fz_context_has_zeta_equal_q() {
        let ctx = make_context(Model::Fz, int(2), vec![int(1)]).unwrap();
        assert_eq!(ctx.q(), &int(4));
        assert_eq!(ctx.zeta(), &int(4));
    }

    #[test]
    fn ik_context_has_zeta_minus_q_cubed() {
        let ctx = make_context(Model::Ik, int(2), vec![int(1), int(1)]).unwrap();
        assert_eq!(ctx.q(), &int(4));
        assert_eq!(ctx.zeta(), &int(-64));
    }

    #[test]
    fn degenerate_parameters_are_rejected() {
        for p in [int(1), int(-1), int(0)] {
            assert!(matches!(
                make_context(Model::Fz, p, vec![int(1)]),
                Err(Error::DegenerateParameter(_))
            ));
        }
        assert!(matches!(
            make_context(Model::Ik, int(2), vec![int(1), int(0)]),
            Err(Error::DegenerateParameter(_))
        ));
    }

    #[test]
    fn half_powers() {
        let ctx = make_context(Model::Fz, int(2), vec![int(1)]).unwrap();
        assert_eq!(ctx.q_half_power(-2), rat(1, 4));
        assert_eq!(ctx.q_half_power(3), int(8));
        let ctx = make_context(Model::Ik, rat(3, 2), vec![int(1)]).unwrap();
        assert_eq!(ctx.q_half_power(1), rat(3, 2));
    }

    #[test]
    fn reduction_mod_prime() {
        let ctx = make_context(Model::Ik, rat(3, 2), vec![int(5)]).unwrap();
        assert!(ctx.reduce(2).is_none());
        let red = ctx.reduce(1_000_000_007).unwrap();
        assert_eq!(
            red.zeta().clone(),
            Fp::from_rational(ctx.zeta(), 1_000_000_007).unwrap()
        );
    }
}
