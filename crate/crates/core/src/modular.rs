//! Prime-field arithmetic, random 62-bit primes, Chinese remaindering and
//! rational reconstruction.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;

use crate::field::{Field, Rational};

/// Element of Z/pZ. The modulus travels with the value; mixing moduli is a
/// logic error and is caught in debug builds.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fp {
    residue: u64,
    modulus: u64,
}

impl Fp {
    pub fn new(value: u64, modulus: u64) -> Self {
        Fp {
            residue: value % modulus,
            modulus,
        }
    }

    pub fn from_i64(value: i64, modulus: u64) -> Self {
        let m = modulus as i128;
        let r = (value as i128).rem_euclid(m);
        Fp {
            residue: r as u64,
            modulus,
        }
    }

    pub fn from_bigint(value: &BigInt, modulus: u64) -> Self {
        let m = BigInt::from(modulus);
        let r = value.mod_floor(&m);
        Fp {
            residue: r.to_u64().expect("residue fits in u64"),
            modulus,
        }
    }

    /// `num * den^-1 mod p`, or `None` when the denominator vanishes mod p.
    pub fn from_rational(value: &Rational, modulus: u64) -> Option<Self> {
        let num = Fp::from_bigint(value.numer(), modulus);
        let den = Fp::from_bigint(value.denom(), modulus);
        den.inverse().map(|inv| num * inv)
    }

    pub fn residue(&self) -> u64 {
        self.residue
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn pow(self, mut exp: u64) -> Self {
        let mut acc = Fp::new(1, self.modulus);
        let mut base = self;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            exp >>= 1;
        }
        acc
    }
}

impl fmt::Debug for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.residue, self.modulus)
    }
}

#[inline]
fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

impl Add for Fp {
    type Output = Fp;
    fn add(self, rhs: Fp) -> Fp {
        debug_assert_eq!(self.modulus, rhs.modulus);
        let s = self.residue + rhs.residue;
        Fp {
            residue: if s >= self.modulus {
                s - self.modulus
            } else {
                s
            },
            modulus: self.modulus,
        }
    }
}

impl Sub for Fp {
    type Output = Fp;
    fn sub(self, rhs: Fp) -> Fp {
        debug_assert_eq!(self.modulus, rhs.modulus);
        let r = if self.residue >= rhs.residue {
            self.residue - rhs.residue
        } else {
            self.residue + self.modulus - rhs.residue
        };
        Fp {
            residue: r,
            modulus: self.modulus,
        }
    }
}

impl Mul for Fp {
    type Output = Fp;
    fn mul(self, rhs: Fp) -> Fp {
        debug_assert_eq!(self.modulus, rhs.modulus);
        Fp {
            residue: mul_mod(self.residue, rhs.residue, self.modulus),
            modulus: self.modulus,
        }
    }
}

impl Neg for Fp {
    type Output = Fp;
    fn neg(self) -> Fp {
        Fp {
            residue: if self.residue == 0 {
                0
            } else {
                self.modulus - self.residue
            },
            modulus: self.modulus,
        }
    }
}

impl<'a> Add<&'a Fp> for Fp {
    type Output = Fp;
    fn add(self, rhs: &'a Fp) -> Fp {
        self + *rhs
    }
}

impl<'a> Sub<&'a Fp> for Fp {
    type Output = Fp;
    fn sub(self, rhs: &'a Fp) -> Fp {
        self - *rhs
    }
}

impl<'a> Mul<&'a Fp> for Fp {
    type Output = Fp;
    fn mul(self, rhs: &'a Fp) -> Fp {
        self * *rhs
    }
}

impl Field for Fp {
    fn zero_like(&self) -> Self {
        Fp::new(0, self.modulus)
    }

    fn one_like(&self) -> Self {
        Fp::new(1, self.modulus)
    }

    fn is_zero_elem(&self) -> bool {
        self.residue == 0
    }

    fn inverse(&self) -> Option<Self> {
        if self.residue == 0 {
            return None;
        }
        // Extended Euclid on (residue, modulus).
        let (mut r0, mut r1) = (self.modulus as i128, self.residue as i128);
        let (mut t0, mut t1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        if r0 != 1 {
            return None;
        }
        Some(Fp::from_i64(
            t0.rem_euclid(self.modulus as i128) as i64,
            self.modulus,
        ))
    }

    fn from_i64_like(value: i64, like: &Self) -> Self {
        Fp::from_i64(value, like.modulus)
    }
}

/// Deterministic Miller-Rabin for all 64-bit inputs.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = Fp::new(a, n).pow(d).residue;
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Uniformly drawn prime in [2^61, 2^62).
pub fn random_prime_62<R: Rng + ?Sized>(rng: &mut R) -> u64 {
    loop {
        let candidate = rng.gen_range((1u64 << 61)..(1u64 << 62)) | 1;
        if is_prime_u64(candidate) {
            return candidate;
        }
    }
}

/// Incremental Chinese remaindering of a vector of residues.
#[derive(Clone, Debug)]
pub struct CrtAccumulator {
    modulus: BigInt,
    values: Vec<BigInt>,
}

impl CrtAccumulator {
    pub fn new(len: usize) -> Self {
        CrtAccumulator {
            modulus: BigInt::one(),
            values: vec![BigInt::zero(); len],
        }
    }

    pub fn modulus(&self) -> &BigInt {
        &self.modulus
    }

    /// Folds in one more image; `residues` must all share one prime modulus.
    pub fn push(&mut self, residues: &[Fp]) {
        assert_eq!(residues.len(), self.values.len());
        let Some(first) = residues.first() else {
            return;
        };
        let p = first.modulus();
        let m_mod_p = Fp::from_bigint(&self.modulus, p);
        let inv = m_mod_p.inverse().expect("moduli must be coprime");
        for (value, r) in self.values.iter_mut().zip(residues) {
            // value + M * ((r - value) * M^-1 mod p)
            let t = (*r - Fp::from_bigint(value, p)) * inv;
            *value += &self.modulus * BigInt::from(t.residue());
        }
        self.modulus *= BigInt::from(p);
    }

    /// Reconstructs every entry as a rational, or `None` if any entry has no
    /// reconstruction within the current modulus.
    pub fn reconstruct(&self) -> Option<Vec<Rational>> {
        self.values
            .iter()
            .map(|v| rational_reconstruction(v, &self.modulus))
            .collect()
    }
}

/// Wang's rational reconstruction: finds n/d with |n|, d < sqrt(m/2) and
/// n ≡ a·d (mod m).
pub fn rational_reconstruction(a: &BigInt, m: &BigInt) -> Option<Rational> {
    let a = a.mod_floor(m);
    if a.is_zero() {
        return Some(Rational::zero());
    }
    let bound = (m / BigInt::from(2u8)).sqrt();
    let (mut r0, mut r1) = (m.clone(), a);
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        r0 = std::mem::replace(&mut r1, r2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || t1.abs() > bound {
        return None;
    }
    if !r1.gcd(&t1).is_one() {
        return None;
    }
    let (num, den) = if t1.sign() == Sign::Minus {
        (-r1, -t1)
    } else {
        (r1, t1)
    };
    Some(Rational::new(num, den))
}

/// Bit length of a nonnegative modulus, for reporting.
pub fn modulus_bits(m: &BigInt) -> u64 {
    m.magnitude().bits()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{int, rat};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const P: u64 = 2305843009213693951; // 2^61 - 1

    #[test]
    fn field_axioms_on_samples() {
        let a = Fp::from_i64(-17, P);
        let b = Fp::new(123456789, P);
        assert_eq!(a + b - b, a);
        assert_eq!((a * b) * b.inverse().unwrap(), a);
        assert_eq!(-a + a, a.zero_like());
        assert!(Fp::new(0, P).inverse().is_none());
    }

    #[test]
    fn miller_rabin_matches_known_values() {
        assert!(is_prime_u64(P));
        assert!(is_prime_u64(1_000_000_007));
        assert!(!is_prime_u64(1_000_000_007 * 3));
        assert!(!is_prime_u64(3215031751)); // strong pseudoprime to bases 2,3,5,7
        assert!(!is_prime_u64(1));
    }

    #[test]
    fn random_primes_are_62_bit() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..3 {
            let p = random_prime_62(&mut rng);
            assert!(is_prime_u64(p));
            assert_eq!(64 - p.leading_zeros(), 62);
        }
    }

    #[test]
    fn rational_reduction_rejects_vanishing_denominator() {
        assert!(Fp::from_rational(&rat(1, 7), 7).is_none());
        assert_eq!(
            Fp::from_rational(&rat(3, 2), 7).unwrap(),
            Fp::new(5, 7) // 3 * 4
        );
    }

    #[test]
    fn crt_recovers_rationals() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let targets = vec![rat(-355, 113), int(0), rat(123456789123, 987654321)];
        let mut acc = CrtAccumulator::new(targets.len());
        for _ in 0..3 {
            let p = random_prime_62(&mut rng);
            let images: Vec<Fp> = targets
                .iter()
                .map(|t| Fp::from_rational(t, p).unwrap())
                .collect();
            acc.push(&images);
        }
        assert_eq!(acc.reconstruct().unwrap(), targets);
    }
}
