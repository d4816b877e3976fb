//! Scalar rings with canonically encoded elements.
//!
//! Every scalar is stored as a `u64` code whose meaning is fixed by the ring
//! object carried alongside it. For `Z/p^M` the code is the canonical residue
//! in `[0, p^M)`; for `F_{p^m}` (see [`crate::fq`]) it is the base-`p` digit
//! packing of the polynomial residue. Canonical codes make matrix equality,
//! hashing and deduplication exact.

use std::fmt::Debug;
use std::hash::Hash;

use crate::error::CoreError;

/// A commutative unital ring with `u64`-encoded elements.
pub trait Ring: Clone + PartialEq + Eq + Hash + Debug {
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64;
    fn add(&self, a: u64, b: u64) -> u64;
    fn neg(&self, a: u64) -> u64;
    fn sub(&self, a: u64, b: u64) -> u64 {
        self.add(a, self.neg(b))
    }
    fn mul(&self, a: u64, b: u64) -> u64;
    fn is_unit(&self, a: u64) -> bool;
    /// Multiplicative inverse, when `a` is a unit.
    fn inv(&self, a: u64) -> Option<u64>;
    /// Number of elements of the ring.
    fn card(&self) -> u64;
    /// Canonical code of an arbitrary integer.
    fn encode(&self, raw: i64) -> u64;
    /// Short human-readable ring name, e.g. `Z/2^3` or `F_9`.
    fn name(&self) -> String;
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// The ring `Z/p^M`: residues of the valuation ring at precision `M`.
///
/// `p` must be prime and `M >= 1`. The uniformizer is fixed as `p` itself;
/// only unramified settings are modelled.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ModulusRing {
    p: u64,
    precision: u32,
    modulus: u64,
}

impl ModulusRing {
    pub fn new(p: u64, precision: u32) -> Result<Self, CoreError> {
        if !is_prime(p) {
            return Err(CoreError::NotPrime(p));
        }
        if precision < 1 {
            return Err(CoreError::Config("precision must be >= 1".into()));
        }
        let modulus = p
            .checked_pow(precision)
            .filter(|&m| m <= 1 << 31)
            .ok_or_else(|| CoreError::Config(format!("p^M = {p}^{precision} is too large")))?;
        Ok(ModulusRing {
            p,
            precision,
            modulus,
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// The p-adic valuation of a residue, capped at `M` (so `val(0) = M`).
    pub fn val(&self, a: u64) -> u32 {
        debug_assert!(a < self.modulus);
        if a == 0 {
            return self.precision;
        }
        let mut v = 0;
        let mut a = a;
        while a.is_multiple_of(self.p) {
            a /= self.p;
            v += 1;
        }
        v
    }

    /// Writes `a = p^v * u` and returns `(v, u)` with `u` a unit (or `(M, 0)`).
    pub fn val_unit(&self, a: u64) -> (u32, u64) {
        if a == 0 {
            return (self.precision, 0);
        }
        let mut v = 0;
        let mut u = a;
        while u.is_multiple_of(self.p) {
            u /= self.p;
            v += 1;
        }
        (v, u % self.modulus)
    }

    /// `p^k` as a residue; zero once `k >= M`.
    pub fn pi_pow(&self, k: u32) -> u64 {
        if k >= self.precision {
            0
        } else {
            self.p.pow(k)
        }
    }

    /// The same ring at a lower precision.
    pub fn truncated(&self, precision: u32) -> Result<ModulusRing, CoreError> {
        if precision > self.precision {
            return Err(CoreError::Config(format!(
                "cannot raise precision from {} to {}",
                self.precision, precision
            )));
        }
        ModulusRing::new(self.p, precision)
    }
}

impl Ring for ModulusRing {
    fn one(&self) -> u64 {
        1 % self.modulus
    }

    fn add(&self, a: u64, b: u64) -> u64 {
        (a + b) % self.modulus
    }

    fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.modulus - a
        }
    }

    fn mul(&self, a: u64, b: u64) -> u64 {
        (a * b) % self.modulus
    }

    fn is_unit(&self, a: u64) -> bool {
        !a.is_multiple_of(self.p)
    }

    fn inv(&self, a: u64) -> Option<u64> {
        if !self.is_unit(a) {
            return None;
        }
        // Extended Euclid on (a, p^M).
        let (mut r0, mut r1) = (self.modulus as i64, (a % self.modulus) as i64);
        let (mut t0, mut t1) = (0i64, 1i64);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        debug_assert_eq!(r0, 1);
        Some(self.encode(t0))
    }

    fn card(&self) -> u64 {
        self.modulus
    }

    fn encode(&self, raw: i64) -> u64 {
        let m = self.modulus as i64;
        (((raw % m) + m) % m) as u64
    }

    fn name(&self) -> String {
        if self.precision == 1 {
            format!("Z/{}", self.p)
        } else {
            format!("Z/{}^{}", self.p, self.precision)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_composite_base() {
        assert_eq!(ModulusRing::new(6, 2).unwrap_err(), CoreError::NotPrime(6));
        assert_eq!(ModulusRing::new(1, 2).unwrap_err(), CoreError::NotPrime(1));
    }

    #[test]
    fn valuation_and_units() {
        let r = ModulusRing::new(2, 3).unwrap(); // Z/8
        assert_eq!(r.val(0), 3);
        assert_eq!(r.val(4), 2);
        assert_eq!(r.val(6), 1);
        assert_eq!(r.val(5), 0);
        assert!(r.is_unit(3));
        assert!(!r.is_unit(6));
    }

    #[test]
    fn inverses_of_all_units() {
        for (p, m) in [(2, 3), (3, 2), (5, 2)] {
            let r = ModulusRing::new(p, m).unwrap();
            for a in 0..r.card() {
                match r.inv(a) {
                    Some(b) => assert_eq!(r.mul(a, b), 1, "a={a} in {}", r.name()),
                    None => assert!(!r.is_unit(a)),
                }
            }
        }
    }

    #[test]
    fn encode_wraps_negatives() {
        let r = ModulusRing::new(3, 2).unwrap();
        assert_eq!(r.encode(-1), 8);
        assert_eq!(r.encode(9), 0);
        assert_eq!(r.encode(-10), 8);
    }

    #[test]
    fn truncation() {
        let r = ModulusRing::new(2, 4).unwrap();
        let t = r.truncated(2).unwrap();
        assert_eq!(t.modulus(), 4);
        assert!(r.truncated(5).is_err());
    }
}
