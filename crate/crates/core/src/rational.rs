//! Exact rational helpers: parsing, valuations, primality, factorization,
//! modular inverses and exact roots.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Q = num_rational::BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: BigInt) -> Q {
    Q::from_integer(n)
}

/// Parses `"p/q"`, `"-7"` or a terminating decimal such as `"2.375"`.
pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Malformed(format!("not a rational: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::Malformed(format!("zero denominator in {s:?}")));
        }
        return Ok(Q::new(n, d));
    }
    if let Some((ip, fp)) = s.split_once('.') {
        let neg = ip.starts_with('-');
        let ip = ip.trim_start_matches(['-', '+']);
        if fp.is_empty() || !fp.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let digits = format!("{}{}", if ip.is_empty() { "0" } else { ip }, fp);
        let n: BigInt = digits.parse().map_err(|_| bad())?;
        let d = num_traits::pow(BigInt::from(10), fp.len());
        let v = Q::new(n, d);
        return Ok(if neg { -v } else { v });
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(qi(n))
}

pub fn fmt_q(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Multiplicity of `p` in a nonzero integer.
pub fn val_int(n: &BigInt, p: u64) -> Option<u64> {
    if n.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let mut n = n.clone();
    let mut k = 0;
    loop {
        let (d, r) = n.div_rem(&p);
        if !r.is_zero() {
            return Some(k);
        }
        n = d;
        k += 1;
    }
}

/// p-adic valuation; `None` for zero.
pub fn val(x: &Q, p: u64) -> Option<i64> {
    if x.is_zero() {
        return None;
    }
    let a = val_int(x.numer(), p).unwrap() as i64;
    let b = val_int(x.denom(), p).unwrap() as i64;
    Some(a - b)
}

pub fn is_p_integral(x: &Q, p: u64) -> bool {
    val(x, p).is_none_or(|v| v >= 0)
}

/// `p^k` for any integer `k`.
pub fn p_pow(p: u64, k: i64) -> Q {
    let base = BigInt::from(p);
    if k >= 0 {
        qi(num_traits::pow(base, k as usize))
    } else {
        Q::new(BigInt::one(), num_traits::pow(base, (-k) as usize))
    }
}

pub fn pow_q(x: &Q, k: i64) -> Q {
    if k >= 0 {
        num_traits::pow(x.clone(), k as usize)
    } else {
        num_traits::pow(x.recip(), (-k) as usize)
    }
}

/// Exact `p`-adic absolute value `p^{-v_p(x)}`.
pub fn abs_p(x: &Q, p: u64) -> Q {
    match val(x, p) {
        None => Q::zero(),
        Some(v) => p_pow(p, -v),
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod_u64(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for sp in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % sp == 0 {
            return n == sp;
        }
    }
    let (mut d, mut s) = (n - 1, 0);
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod_u64(a, d, n);
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

fn is_probable_prime(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    let one = BigUint::one();
    let nm1 = n - &one;
    let s = nm1.trailing_zeros().unwrap_or(0);
    let d = &nm1 >> s;
    'witness: for a in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        let mut x = BigUint::from(a).modpow(&d, n);
        if x == one || x == nm1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == nm1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_rho(n: &BigUint) -> BigUint {
    let one = BigUint::one();
    let mut c = BigUint::one();
    loop {
        let f = |x: &BigUint| (x * x + &c) % n;
        let (mut x, mut y, mut d) = (BigUint::from(2u32), BigUint::from(2u32), one.clone());
        while d == one {
            x = f(&x);
            y = f(&f(&y));
            let diff = if x > y { &x - &y } else { &y - &x };
            d = diff.gcd(n);
        }
        if &d != n {
            return d;
        }
        c += 1u32;
    }
}

/// Prime factorization of a positive integer.
pub fn factor(n: &BigUint) -> BTreeMap<BigUint, u32> {
    let mut out = BTreeMap::new();
    let mut n = n.clone();
    if n.is_zero() {
        return out;
    }
    let mut p = 2u32;
    while p < 10_000 {
        let bp = BigUint::from(p);
        if &bp * &bp > n {
            break;
        }
        while (&n % &bp).is_zero() {
            n /= &bp;
            *out.entry(bp.clone()).or_insert(0) += 1;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    let mut stack = vec![n];
    while let Some(m) = stack.pop() {
        if m.is_one() {
            continue;
        }
        if is_probable_prime(&m) {
            *out.entry(m).or_insert(0) += 1;
            continue;
        }
        let d = pollard_rho(&m);
        stack.push(&m / &d);
        stack.push(d);
    }
    out
}

/// Distinct primes dividing the numerator or denominator of a nonzero rational.
pub fn support_primes(x: &Q) -> Vec<BigUint> {
    let mut ps: Vec<BigUint> = factor(&x.numer().magnitude().clone())
        .into_keys()
        .chain(factor(&x.denom().magnitude().clone()).into_keys())
        .collect();
    ps.sort();
    ps.dedup();
    ps
}

/// `(g, s, t)` with `g = s a + t b`, `g >= 0`.
pub fn ext_gcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let e = a.extended_gcd(b);
    if e.gcd.is_negative() {
        (-e.gcd, -e.x, -e.y)
    } else {
        (e.gcd, e.x, e.y)
    }
}

pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let (g, s, _) = ext_gcd(&a.mod_floor(m), m);
    if g.is_one() {
        Some(s.mod_floor(m))
    } else {
        None
    }
}

/// Representative of `a mod m` in `(-m/2, m/2]`.
pub fn sym_mod(a: &BigInt, m: &BigInt) -> BigInt {
    let r = a.mod_floor(m);
    if &r * 2 > *m {
        r - m
    } else {
        r
    }
}

/// Reduces a p-integral rational modulo `m` (coprime denominator required).
pub fn reduce_mod(x: &Q, m: &BigInt) -> Option<BigInt> {
    let inv = mod_inverse(x.denom(), m)?;
    Some((x.numer() * inv).mod_floor(m))
}

/// Exact `b`-th root of a nonnegative rational, when it is rational.
pub fn exact_root(x: &Q, b: u32) -> Option<Q> {
    if x.is_negative() {
        return None;
    }
    if b == 1 {
        return Some(x.clone());
    }
    let n = x.numer().magnitude();
    let d = x.denom().magnitude();
    let rn = n.nth_root(b);
    let rd = d.nth_root(b);
    if num_traits::pow(rn.clone(), b as usize) == *n && num_traits::pow(rd.clone(), b as usize) == *d {
        Some(Q::new(BigInt::from_biguint(Sign::Plus, rn), BigInt::from_biguint(Sign::Plus, rd)))
    } else {
        None
    }
}

/// Exact `x^e` for rational `e`, when the result is rational.
pub fn exact_rpow(x: &Q, e: &Q) -> Option<Q> {
    if x.is_zero() {
        return if e.is_zero() { Some(Q::one()) } else if e.is_positive() { Some(Q::zero()) } else { None };
    }
    let a = e.numer().to_i64()?;
    let b = e.denom().to_u32()?;
    exact_root(&pow_q(x, a), b)
}

/// Ordering by cross-multiplication; much faster than `Ratio::cmp` on large
/// operands.
pub fn cmp_q(a: &Q, b: &Q) -> std::cmp::Ordering {
    if a.denom() == b.denom() {
        return a.numer().cmp(b.numer());
    }
    (a.numer() * b.denom()).cmp(&(b.numer() * a.denom()))
}

/// Equality of normalized rationals.
pub fn eq_q(a: &Q, b: &Q) -> bool {
    a.numer() == b.numer() && a.denom() == b.denom()
}

pub fn floor_q(x: &Q) -> BigInt {
    x.floor().to_integer()
}

pub fn ceil_q(x: &Q) -> BigInt {
    x.ceil().to_integer()
}

/// `floor(log2 x)` for positive `x`.
pub fn floor_log2(x: &Q) -> i64 {
    let (n, d) = (x.numer().magnitude(), x.denom().magnitude());
    let e = n.bits() as i64 - d.bits() as i64;
    // 2^e is within a factor 2 of x.
    let below = if e >= 0 { *n < (d << e as usize) } else { (n << (-e) as usize) < *d };
    if below {
        e - 1
    } else {
        e
    }
}

pub fn nearest_integer(x: &Q) -> BigInt {
    floor_q(&(x + qf(1, 2)))
}

pub fn lcm_all<'a>(it: impl IntoIterator<Item = &'a BigInt>) -> BigInt {
    it.into_iter().fold(BigInt::one(), |acc, d| acc.lcm(d))
}

pub fn is_prime_big(n: &BigUint) -> bool {
    n > &BigUint::one() && is_probable_prime(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse_q("3/6").unwrap(), qf(1, 2));
        assert_eq!(parse_q("-7").unwrap(), q(-7));
        assert_eq!(parse_q("2.375").unwrap(), qf(19, 8));
        assert_eq!(parse_q("-0.5").unwrap(), qf(-1, 2));
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("x").is_err());
    }

    #[test]
    fn valuations() {
        assert_eq!(val(&q(12), 2), Some(2));
        assert_eq!(val(&qf(5, 24), 2), Some(-3));
        assert_eq!(val(&q(0), 2), None);
        assert_eq!(abs_p(&q(12), 2), qf(1, 4));
    }

    #[test]
    fn primes_and_factors() {
        let ps: Vec<u64> = (0..60).filter(|&n| is_prime_u64(n)).collect();
        assert_eq!(ps, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59]);
        assert!(is_prime_u64(1_000_000_007));
        assert!(!is_prime_u64(1_000_000_007 * 3));
        let f = factor(&BigUint::from(2u64 * 2 * 3 * 1_000_003 * 1_000_033));
        let got: Vec<(u64, u32)> = f.iter().map(|(k, v)| (k.to_u64().unwrap(), *v)).collect();
        assert_eq!(got, vec![(2, 2), (3, 1), (1_000_003, 1), (1_000_033, 1)]);
    }

    #[test]
    fn roots_and_inverses() {
        assert_eq!(exact_root(&qf(4, 9), 2), Some(qf(2, 3)));
        assert_eq!(exact_root(&q(2), 2), None);
        assert_eq!(exact_rpow(&qf(1, 8), &qf(2, 3)), Some(qf(1, 4)));
        assert_eq!(mod_inverse(&BigInt::from(5), &BigInt::from(64)), Some(BigInt::from(13)));
        assert_eq!(sym_mod(&BigInt::from(18), &BigInt::from(25)), BigInt::from(-7));
        assert_eq!(floor_log2(&qf(1, 3)), -2);
        assert_eq!(floor_log2(&q(8)), 3);
        assert_eq!(nearest_integer(&qf(7, 3)), BigInt::from(2));
        assert_eq!(nearest_integer(&qf(-7, 3)), BigInt::from(-2));
    }
}
