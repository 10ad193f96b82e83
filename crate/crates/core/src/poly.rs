//! Univariate interpolation over an exact field.

use crate::error::{Error, Result};
use crate::field::Field;

/// Monomial coefficients of the unique polynomial of degree < n through
/// the n points (nodes[i], values[i]). Nodes must be distinct.
pub fn interpolate<F: Field>(nodes: &[F], values: &[F]) -> Result<Vec<F>> {
    assert_eq!(nodes.len(), values.len());
    let n = nodes.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    // Newton divided differences, in place.
    let mut dd = values.to_vec();
    for level in 1..n {
        for i in (level..n).rev() {
            let den = nodes[i].clone() - &nodes[i - level];
            let num = dd[i].clone() - &dd[i - 1];
            dd[i] = num
                .checked_div(&den)
                .ok_or_else(|| Error::InvalidInput("repeated interpolation node".into()))?;
        }
    }
    // Horner expansion of the Newton form.
    let zero = nodes[0].zero_like();
    let mut coeffs = vec![zero.clone(); n];
    coeffs[0] = dd[n - 1].clone();
    for (len, i) in (1..).zip((0..n - 1).rev()) {
        // coeffs ← coeffs·(x − nodes[i]) + dd[i]
        let mut next = vec![zero.clone(); len + 1];
        for (k, c) in coeffs.iter().take(len).enumerate() {
            next[k + 1] = next[k + 1].clone() + c;
            next[k] = next[k].clone() - c.clone() * &nodes[i];
        }
        next[0] = next[0].clone() + &dd[i];
        coeffs[..=len].clone_from_slice(&next);
    }
    Ok(coeffs)
}

/// Index of the highest nonzero coefficient; `None` for the zero polynomial.
pub fn degree<F: Field>(coeffs: &[F]) -> Option<usize> {
    coeffs.iter().rposition(|c| !c.is_zero_elem())
}

pub fn evaluate<F: Field>(coeffs: &[F], x: &F) -> F {
    let zero = x.zero_like();
    coeffs.iter().rev().fold(zero, |acc, c| acc * x + c)
}

/// Degree of a univariate function, measured by interpolating at `count`
/// integer nodes 1, 2, …. Nodes where `f` reports a removable degeneracy
/// (a vanishing ω, a degenerate sample, a zero argument) are skipped.
pub fn measure_degree<F: Field>(
    like: &F,
    count: usize,
    f: impl Fn(&F) -> Result<F>,
) -> Result<Option<usize>> {
    let mut nodes = Vec::with_capacity(count);
    let mut values = Vec::with_capacity(count);
    let mut k = 1i64;
    while nodes.len() < count {
        let x = F::from_i64_like(k, like);
        k += 1;
        match f(&x) {
            Ok(v) => {
                nodes.push(x);
                values.push(v);
            }
            Err(Error::OmegaZero | Error::DegenerateSample(_) | Error::ZeroArgument) => {}
            Err(e) => return Err(e),
        }
        if k > 10 * count as i64 + 100 {
            return Err(Error::DegenerateSample("too many skipped nodes".into()));
        }
    }
    Ok(degree(&interpolate(&nodes, &values)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{int, rat, Rational};

    #[test]
    fn recovers_cubic() {
        let p = [int(3), rat(-1, 2), int(0), int(7)];
        let nodes: Vec<Rational> = (1..=6).map(int).collect();
        let values: Vec<Rational> = nodes.iter().map(|x| evaluate(&p, x)).collect();
        let c = interpolate(&nodes, &values).unwrap();
        assert_eq!(&c[..4], &p);
        assert_eq!(degree(&c), Some(3));
    }

    #[test]
    fn zero_polynomial_has_no_degree() {
        assert_eq!(measure_degree(&int(1), 4, |_| Ok(int(0))).unwrap(), None);
    }

    #[test]
    fn skips_degenerate_nodes() {
        let d = measure_degree(&int(1), 4, |x: &Rational| {
            if *x == int(2) {
                Err(Error::OmegaZero)
            } else {
                Ok(x.clone() * x)
            }
        })
        .unwrap();
        assert_eq!(d, Some(2));
    }
}
