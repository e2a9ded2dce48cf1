//! Residue rings, primality and the small amount of ring abstraction shared
//! by exact and modular Lucas evaluation.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arithmetic needed by the Lucas doubling formulas.
///
/// `halve` is exact division by two: the caller only halves values that are
/// even as integers, or works modulo an odd number.
pub trait Ring {
    type Elem: Clone;

    fn embed(&self, v: i128) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn halve(&self, a: &Self::Elem) -> Self::Elem;
}

/// The integers, with exact big-integer elements.
#[derive(Debug, Clone, Copy, Default)]
pub struct Integers;

impl Ring for Integers {
    type Elem = BigInt;

    fn embed(&self, v: i128) -> BigInt {
        BigInt::from(v)
    }
    fn add(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a + b
    }
    fn sub(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a - b
    }
    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a * b
    }
    fn halve(&self, a: &BigInt) -> BigInt {
        debug_assert!(a.is_even());
        a >> 1
    }
}

/// `Z/mZ` for a modulus below 2^64. Elements are canonical `u64` residues.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Zmod {
    m: u64,
}

impl Zmod {
    pub fn new(m: u64) -> Self {
        assert!(m >= 1, "modulus must be positive");
        Zmod { m }
    }

    /// The ring modulo `prime^exponent`, failing when the modulus overflows.
    pub fn prime_power(prime: u64, exponent: u32) -> Result<Self> {
        prime
            .checked_pow(exponent)
            .map(Zmod::new)
            .ok_or(Error::PrecisionOverflow { prime, exponent })
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.m
    }

    #[inline]
    pub fn reduce_i128(&self, v: i128) -> u64 {
        v.rem_euclid(self.m as i128) as u64
    }

    pub fn reduce_big(&self, v: &BigInt) -> u64 {
        v.mod_floor(&BigInt::from(self.m))
            .to_u64()
            .expect("residue below modulus")
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        ((a as u128 + b as u128) % self.m as u128) as u64
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            ((a as u128 + self.m as u128) - b as u128) as u64
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.m - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.m as u128) as u64
    }

    pub fn pow(&self, base: u64, mut exp: u64) -> u64 {
        let mut acc = 1 % self.m;
        let mut b = base % self.m;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, b);
            }
            b = self.mul(b, b);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse, if `a` is a unit.
    pub fn inv(&self, a: u64) -> Option<u64> {
        let (g, x, _) = ext_gcd(a as i128 % self.m as i128, self.m as i128);
        if g != 1 {
            return None;
        }
        Some(self.reduce_i128(x))
    }

    /// `a / b`, if `b` is a unit.
    pub fn div(&self, a: u64, b: u64) -> Option<u64> {
        self.inv(b).map(|ib| self.mul(a, ib))
    }

    /// Signed representative in `(-m/2, m/2]`.
    pub fn signed(&self, a: u64) -> i128 {
        if a > self.m / 2 {
            a as i128 - self.m as i128
        } else {
            a as i128
        }
    }
}

impl Ring for Zmod {
    type Elem = u64;

    fn embed(&self, v: i128) -> u64 {
        self.reduce_i128(v)
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        Zmod::add(self, *a, *b)
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        Zmod::sub(self, *a, *b)
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        Zmod::mul(self, *a, *b)
    }
    fn halve(&self, a: &u64) -> u64 {
        debug_assert!(self.m % 2 == 1);
        if a.is_even() {
            a / 2
        } else {
            ((*a as u128 + self.m as u128) / 2) as u64
        }
    }
}

/// `Z/mZ` for an arbitrary odd modulus, used when `p^k` outgrows 64 bits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BigMod {
    m: BigInt,
}

impl BigMod {
    pub fn new(m: BigInt) -> Self {
        assert!(m.is_positive(), "modulus must be positive");
        BigMod { m }
    }

    pub fn modulus(&self) -> &BigInt {
        &self.m
    }

    pub fn reduce(&self, v: &BigInt) -> BigInt {
        v.mod_floor(&self.m)
    }
}

impl Ring for BigMod {
    type Elem = BigInt;

    fn embed(&self, v: i128) -> BigInt {
        self.reduce(&BigInt::from(v))
    }
    fn add(&self, a: &BigInt, b: &BigInt) -> BigInt {
        let s = a + b;
        if s >= self.m {
            s - &self.m
        } else {
            s
        }
    }
    fn sub(&self, a: &BigInt, b: &BigInt) -> BigInt {
        let s = a - b;
        if s.is_negative() {
            s + &self.m
        } else {
            s
        }
    }
    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        (a * b) % &self.m
    }
    fn halve(&self, a: &BigInt) -> BigInt {
        if a.is_even() {
            a >> 1
        } else {
            (a + &self.m) >> 1
        }
    }
}

/// Extended Euclid: returns `(g, x, y)` with `a*x + b*y = g >= 0`.
pub fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let q = old_r.div_euclid(r);
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

fn mr_round(n: u64, d: u64, s: u32, a: u64) -> bool {
    let ring = Zmod::new(n);
    let mut x = ring.pow(a, d);
    if x == 1 || x == n - 1 {
        return true;
    }
    for _ in 1..s {
        x = ring.mul(x, x);
        if x == n - 1 {
            return true;
        }
    }
    false
}

/// Deterministic Miller-Rabin over the full `u64` range.
pub fn is_prime(n: u64) -> bool {
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &w in &WITNESSES {
        if n.is_multiple_of(w) {
            return n == w;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    WITNESSES.iter().all(|&a| mr_round(n, d, s, a))
}

/// Primes in the closed interval `[lo, hi]`, ascending.
pub fn primes_between(lo: u64, hi: u64) -> Vec<u64> {
    if lo > hi {
        return Vec::new();
    }
    (lo..=hi).filter(|&n| is_prime(n)).collect()
}

/// `p`-adic valuation of a nonzero big integer, with the cofactor.
pub fn strip_prime(v: &BigInt, prime: u64) -> (u32, BigInt) {
    debug_assert!(!v.is_zero());
    let p = BigInt::from(prime);
    let mut rest = v.clone();
    let mut count = 0;
    loop {
        let (q, r) = rest.div_rem(&p);
        if !r.is_zero() {
            return (count, rest);
        }
        rest = q;
        count += 1;
    }
}

/// `base^exp` as a big integer.
pub fn big_pow(base: u64, exp: u32) -> BigInt {
    num_traits::pow(BigInt::from(base), exp as usize)
}

/// Whether `prime` divides the integer `v`.
pub fn divides_i128(prime: u64, v: i128) -> bool {
    v.rem_euclid(prime as i128) == 0
}

/// `1` if `e` is even, `-1` otherwise, as a residue.
pub fn sign_pow(ring: &Zmod, exponent_parity_odd: bool) -> u64 {
    if exponent_parity_odd {
        ring.neg(1 % ring.modulus())
    } else {
        1 % ring.modulus()
    }
}
