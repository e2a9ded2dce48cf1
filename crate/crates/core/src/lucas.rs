//! Fundamental and companion Lucas sequences.

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::arith::{Integers, Ring};
use crate::error::{Error, Result};

/// The parameters `(P, Q)` of a Lucas pair, `Q != 0`.
///
/// The discriminant `D = P^2 - 4Q` and the first index of a zero term (for
/// degenerate sequences) are derived once at construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct LucasParams {
    p: i64,
    q: i64,
    d: i128,
    zero_period: Option<u32>,
}

#[derive(Serialize, Deserialize)]
struct RawParams {
    #[serde(rename = "P")]
    p: i64,
    #[serde(rename = "Q")]
    q: i64,
}

impl TryFrom<RawParams> for LucasParams {
    type Error = Error;
    fn try_from(raw: RawParams) -> Result<Self> {
        LucasParams::new(raw.p, raw.q)
    }
}

impl From<LucasParams> for RawParams {
    fn from(lp: LucasParams) -> Self {
        RawParams { p: lp.p, q: lp.q }
    }
}

impl LucasParams {
    pub fn new(p: i64, q: i64) -> Result<Self> {
        if q == 0 {
            return Err(Error::ZeroQ);
        }
        let d = (p as i128) * (p as i128) - 4 * (q as i128);
        // U_2 U_3 U_4 U_6 = 0 exactly when some U_t, 1 <= t <= 6, vanishes.
        let (pb, qb) = (BigInt::from(p), BigInt::from(q));
        let mut prev = BigInt::zero();
        let mut cur = BigInt::from(1);
        let mut zero_period = None;
        for t in 2..=6u32 {
            let next = &pb * &cur - &qb * &prev;
            prev = std::mem::replace(&mut cur, next);
            if cur.is_zero() {
                zero_period = Some(t);
                break;
            }
        }
        Ok(LucasParams { p, q, d, zero_period })
    }

    /// The Fibonacci parameters `(1, -1)`.
    pub fn fibonacci() -> Self {
        Self::new(1, -1).expect("valid")
    }

    /// The parameters `(2, 1)` for which `U_n = n`.
    pub fn natural() -> Self {
        Self::new(2, 1).expect("valid")
    }

    #[inline]
    pub fn p(&self) -> i64 {
        self.p
    }

    #[inline]
    pub fn q(&self) -> i64 {
        self.q
    }

    /// Discriminant `P^2 - 4Q`.
    #[inline]
    pub fn d(&self) -> i128 {
        self.d
    }

    /// True when some `U_t` with `t > 0` is zero.
    #[inline]
    pub fn degenerate(&self) -> bool {
        self.zero_period.is_some()
    }

    /// Least `t > 0` with `U_t = 0`; zeros then occur exactly at its multiples.
    #[inline]
    pub fn zero_period(&self) -> Option<u32> {
        self.zero_period
    }

    /// Whether `U_t` is exactly zero.
    #[inline]
    pub fn is_zero_term(&self, t: u64) -> bool {
        match self.zero_period {
            Some(z) => t.is_multiple_of(z as u64),
            None => t == 0,
        }
    }
}

impl std::fmt::Display for LucasParams {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "U({},{})", self.p, self.q)
    }
}

/// `(U_n, V_n)` as exact integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LucasTerm {
    pub n: u64,
    pub u: BigInt,
    pub v: BigInt,
}

/// `(U_n, V_n)` in any ring by fast doubling.
///
/// Uses `U_2t = U_t V_t`, `V_2t = V_t^2 - 2Q^t` and the half-step formulas
/// `2U_{t+1} = P U_t + V_t`, `2V_{t+1} = D U_t + P V_t`.
pub fn lucas_pair_in<R: Ring>(ring: &R, params: &LucasParams, n: u64) -> (R::Elem, R::Elem) {
    let p = ring.embed(params.p as i128);
    let q = ring.embed(params.q as i128);
    let d = ring.embed(params.d);
    let two = ring.embed(2);
    let mut u = ring.embed(0);
    let mut v = two.clone();
    let mut qn = ring.embed(1);
    if n == 0 {
        return (u, v);
    }
    for bit in (0..64 - n.leading_zeros()).rev() {
        let u2 = ring.mul(&u, &v);
        let v2 = ring.sub(&ring.mul(&v, &v), &ring.mul(&two, &qn));
        qn = ring.mul(&qn, &qn);
        u = u2;
        v = v2;
        if (n >> bit) & 1 == 1 {
            let u1 = ring.halve(&ring.add(&ring.mul(&p, &u), &v));
            let v1 = ring.halve(&ring.add(&ring.mul(&d, &u), &ring.mul(&p, &v)));
            qn = ring.mul(&qn, &q);
            u = u1;
            v = v1;
        }
    }
    (u, v)
}

/// Exact `(U_n, V_n)`.
pub fn lucas_term(params: &LucasParams, n: u64) -> LucasTerm {
    let (u, v) = lucas_pair_in(&Integers, params, n);
    LucasTerm { n, u, v }
}

/// `U_0..=U_{n_max}` and `V_0..=V_{n_max}` in a ring, by the linear recurrence.
pub fn sequences_in<R: Ring>(ring: &R, params: &LucasParams, n_max: u64) -> (Vec<R::Elem>, Vec<R::Elem>) {
    let len = n_max as usize + 1;
    let p = ring.embed(params.p as i128);
    let q = ring.embed(params.q as i128);
    let mut us = Vec::with_capacity(len);
    let mut vs = Vec::with_capacity(len);
    us.push(ring.embed(0));
    vs.push(ring.embed(2));
    if len > 1 {
        us.push(ring.embed(1));
        vs.push(p.clone());
    }
    for t in 2..len {
        us.push(ring.sub(&ring.mul(&p, &us[t - 1]), &ring.mul(&q, &us[t - 2])));
        vs.push(ring.sub(&ring.mul(&p, &vs[t - 1]), &ring.mul(&q, &vs[t - 2])));
    }
    (us, vs)
}

/// `U_0..=U_{n_max}` in a ring.
pub fn u_sequence_in<R: Ring>(ring: &R, params: &LucasParams, n_max: u64) -> Vec<R::Elem> {
    let p = ring.embed(params.p as i128);
    let q = ring.embed(params.q as i128);
    let mut us = Vec::with_capacity(n_max as usize + 1);
    us.push(ring.embed(0));
    if n_max >= 1 {
        us.push(ring.embed(1));
    }
    for t in 2..=n_max as usize {
        us.push(ring.sub(&ring.mul(&p, &us[t - 1]), &ring.mul(&q, &us[t - 2])));
    }
    us
}

/// Terms `0..=n_max` by the three-term recurrence.
pub fn lucas_range(params: &LucasParams, n_max: u64) -> Vec<LucasTerm> {
    let (us, vs) = sequences_in(&Integers, params, n_max);
    us.into_iter()
        .zip(vs)
        .enumerate()
        .map(|(n, (u, v))| LucasTerm { n: n as u64, u, v })
        .collect()
}

/// The six addition, doubling and subtraction identities for one pair of
/// indices `s >= t`, given the needed terms and `Q^t`.
fn identities_hold(
    d: &BigInt,
    q_t: &BigInt,
    a: (&BigInt, &BigInt),
    b: (&BigInt, &BigInt),
    sum: (&BigInt, &BigInt),
    diff_u: &BigInt,
    dbl: (&BigInt, &BigInt),
) -> bool {
    let ((au, av), (bu, bv)) = (a, b);
    let two = BigInt::from(2);
    let add_u = &two * sum.0 == au * bv + bu * av;
    let add_v = &two * sum.1 == av * bv + d * au * bu;
    let norm = bv * bv - d * bu * bu == BigInt::from(4) * q_t;
    let dbl_u = *dbl.0 == bu * bv;
    let dbl_v = *dbl.1 == bv * bv - &two * q_t;
    let sub_u = &two * q_t * diff_u == au * bv - bu * av;
    add_u && add_v && norm && dbl_u && dbl_v && sub_u
}

/// Checks the six classical addition, doubling and subtraction identities
/// for the indices `s >= t`.
pub fn check_identities(params: &LucasParams, s: u64, t: u64) -> Result<bool> {
    if s < t {
        return Err(Error::Precondition(format!("identity check needs s >= t, got s={s}, t={t}")));
    }
    let d = BigInt::from(params.d);
    let q_t = num_traits::pow(BigInt::from(params.q), t as usize);
    let a = lucas_term(params, s);
    let b = lucas_term(params, t);
    let sum = lucas_term(params, s + t);
    let diff = lucas_term(params, s - t);
    let dbl = lucas_term(params, 2 * t);
    Ok(identities_hold(&d, &q_t, (&a.u, &a.v), (&b.u, &b.v), (&sum.u, &sum.v), &diff.u, (&dbl.u, &dbl.v)))
}

/// [`check_identities`] for every `0 <= t <= s <= s_max`, from one table of terms.
pub fn check_identities_upto(params: &LucasParams, s_max: u64) -> bool {
    let (us, vs) = sequences_in(&Integers, params, 2 * s_max);
    let d = BigInt::from(params.d);
    let q = BigInt::from(params.q);
    let mut q_t = BigInt::from(1);
    for t in 0..=s_max as usize {
        for s in t..=s_max as usize {
            let ok = identities_hold(
                &d,
                &q_t,
                (&us[s], &vs[s]),
                (&us[t], &vs[t]),
                (&us[s + t], &vs[s + t]),
                &us[s - t],
                (&us[2 * t], &vs[2 * t]),
            );
            if !ok {
                return false;
            }
        }
        q_t *= &q;
    }
    true
}
