//! Certified nonnegative reals.
//!
//! A [`NormValue`] is either an exact rational or a closed interval with
//! dyadic endpoints that contains the true value. Sums, products and maxima
//! are formed exactly on endpoints and then rounded outward; only rational
//! powers introduce genuine rounding.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::rational::{cmp_q, eq_q, exact_rpow, floor_log2, floor_q, fmt_q, p_pow, pow_q, qi, Q};

/// Significant bits kept on interval endpoints.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Precision {
    pub bits: u32,
}

impl Precision {
    pub const DEFAULT_BITS: u32 = 128;

    pub fn new(bits: u32) -> Self {
        Precision { bits: bits.max(8) }
    }
}

impl Default for Precision {
    fn default() -> Self {
        Precision { bits: Self::DEFAULT_BITS }
    }
}

#[derive(Clone, Debug)]
pub enum NormValue {
    Exact(Q),
    Interval { lo: Q, hi: Q },
}

impl PartialEq for NormValue {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (NormValue::Exact(a), NormValue::Exact(b)) => eq_q(a, b),
            (NormValue::Interval { lo: a, hi: b }, NormValue::Interval { lo: c, hi: d }) => eq_q(a, c) && eq_q(b, d),
            _ => false,
        }
    }
}

impl Eq for NormValue {}

/// Largest dyadic with `bits` significant bits that is `<= x` (x >= 0).
pub fn round_down(x: &Q, bits: u32) -> Q {
    round_dyadic(x, bits, false)
}

/// Smallest dyadic with `bits` significant bits that is `>= x` (x >= 0).
pub fn round_up(x: &Q, bits: u32) -> Q {
    round_dyadic(x, bits, true)
}

fn round_dyadic(x: &Q, bits: u32, up: bool) -> Q {
    if x.is_zero() {
        return Q::zero();
    }
    let s = bits as i64 - 1 - floor_log2(x);
    let (n, d) = (x.numer(), x.denom());
    // m = round(x * 2^s) in the requested direction, by integer shifts only.
    let (num, den) = if s >= 0 { (n << s as usize, d.clone()) } else { (n.clone(), d << (-s) as usize) };
    let (m, rem) = num.div_rem(&den);
    let m = if up && !rem.is_zero() { m + 1 } else { m };
    if s <= 0 {
        return Q::from_integer(m << (-s) as usize);
    }
    let tz = m.trailing_zeros().unwrap_or(0).min(s as u64);
    Q::new_raw(m >> tz as usize, BigInt::one() << (s as u64 - tz) as usize)
}

/// Dyadic bounds `lo <= y^{1/b} <= hi` for `y > 0`.
fn root_bounds(y: &Q, b: u32, bits: u32) -> (Q, Q) {
    let e = floor_log2(y).div_euclid(b as i64);
    let k = bits as i64 - e;
    let z = y * p_pow(2, k * b as i64);
    let zf = floor_q(&z);
    let r = zf.magnitude().nth_root(b);
    let r = BigInt::from(r);
    let scale = p_pow(2, -k);
    let lo = qi(r.clone()) * &scale;
    let exact = Q::from_integer(num_traits::pow(r.clone(), b as usize)) == z;
    let hi = if exact { lo.clone() } else { qi(r + 1) * &scale };
    (lo, hi)
}

impl NormValue {
    pub fn exact(x: Q) -> Self {
        debug_assert!(!x.is_negative());
        NormValue::Exact(x)
    }

    pub fn zero() -> Self {
        NormValue::Exact(Q::zero())
    }

    pub fn one() -> Self {
        NormValue::Exact(Q::one())
    }

    /// Outward-rounded interval; collapses to `Exact` when degenerate.
    pub fn interval(lo: Q, hi: Q, prec: Precision) -> Self {
        debug_assert!(cmp_q(&lo, &hi).is_le());
        if eq_q(&lo, &hi) {
            return NormValue::Exact(lo);
        }
        let lo = round_down(&lo, prec.bits);
        let hi = round_up(&hi, prec.bits);
        NormValue::Interval { lo, hi }
    }

    pub fn lo(&self) -> &Q {
        match self {
            NormValue::Exact(x) => x,
            NormValue::Interval { lo, .. } => lo,
        }
    }

    pub fn hi(&self) -> &Q {
        match self {
            NormValue::Exact(x) => x,
            NormValue::Interval { hi, .. } => hi,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, NormValue::Exact(_))
    }

    pub fn as_exact(&self) -> Option<&Q> {
        match self {
            NormValue::Exact(x) => Some(x),
            NormValue::Interval { .. } => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.hi().is_zero()
    }

    pub fn width(&self) -> Q {
        self.hi() - self.lo()
    }

    fn combine(&self, other: &Self, prec: Precision, f: impl Fn(&Q, &Q) -> Q) -> Self {
        match (self, other) {
            (NormValue::Exact(a), NormValue::Exact(b)) => NormValue::Exact(f(a, b)),
            _ => NormValue::interval(f(self.lo(), other.lo()), f(self.hi(), other.hi()), prec),
        }
    }

    pub fn add(&self, other: &Self, prec: Precision) -> Self {
        self.combine(other, prec, |a, b| a + b)
    }

    pub fn mul(&self, other: &Self, prec: Precision) -> Self {
        self.combine(other, prec, |a, b| a * b)
    }

    pub fn max(&self, other: &Self, prec: Precision) -> Self {
        self.combine(other, prec, |a, b| if cmp_q(a, b).is_ge() { a.clone() } else { b.clone() })
    }

    pub fn min(&self, other: &Self, prec: Precision) -> Self {
        self.combine(other, prec, |a, b| if cmp_q(a, b).is_le() { a.clone() } else { b.clone() })
    }

    pub fn scale(&self, c: &Q, prec: Precision) -> Self {
        self.mul(&NormValue::Exact(c.abs()), prec)
    }

    /// Reciprocal; `None` when zero lies in the enclosure.
    pub fn recip(&self, prec: Precision) -> Option<Self> {
        if self.lo().is_zero() {
            return None;
        }
        Some(match self {
            NormValue::Exact(x) => NormValue::Exact(x.recip()),
            NormValue::Interval { lo, hi } => NormValue::interval(hi.recip(), lo.recip(), prec),
        })
    }

    pub fn pow_i(&self, k: i64, prec: Precision) -> Option<Self> {
        if k < 0 {
            return self.recip(prec)?.pow_i(-k, prec);
        }
        Some(match self {
            NormValue::Exact(x) => NormValue::Exact(pow_q(x, k)),
            NormValue::Interval { lo, hi } => NormValue::interval(pow_q(lo, k), pow_q(hi, k), prec),
        })
    }

    /// `self^e` for rational `e`; `0^0 = 1`. `None` for `0^e` with `e < 0`.
    pub fn rpow(&self, e: &Q, prec: Precision) -> Option<Self> {
        if e.is_zero() {
            return Some(NormValue::one());
        }
        if let NormValue::Exact(x) = self {
            if let Some(r) = exact_rpow(x, e) {
                return Some(NormValue::Exact(r));
            }
        }
        let a = e.numer().to_i64()?;
        let b = e.denom().to_u32()?;
        let (lo, hi) = if a > 0 {
            (pow_q(self.lo(), a), pow_q(self.hi(), a))
        } else {
            if self.lo().is_zero() {
                return None;
            }
            (pow_q(&self.hi().recip(), -a), pow_q(&self.lo().recip(), -a))
        };
        let lo_b = if lo.is_zero() { Q::zero() } else { root_bounds(&lo, b, prec.bits).0 };
        let hi_b = if hi.is_zero() { Q::zero() } else { root_bounds(&hi, b, prec.bits).1 };
        Some(NormValue::interval(lo_b, hi_b, prec))
    }

    /// Certified `self <= other`.
    pub fn certainly_le(&self, other: &Self) -> bool {
        cmp_q(self.hi(), other.lo()).is_le()
    }

    /// Certified `self < other`.
    pub fn certainly_lt(&self, other: &Self) -> bool {
        cmp_q(self.hi(), other.lo()).is_lt()
    }

    pub fn le_q(&self, x: &Q) -> bool {
        cmp_q(self.hi(), x).is_le()
    }

    pub fn lt_q(&self, x: &Q) -> bool {
        cmp_q(self.hi(), x).is_lt()
    }

    /// The enclosures intersect (consistent with equality).
    pub fn overlaps(&self, other: &Self) -> bool {
        cmp_q(self.lo(), other.hi()).is_le() && cmp_q(other.lo(), self.hi()).is_le()
    }

    /// Certified equality: exact and equal.
    pub fn certainly_eq(&self, other: &Self) -> bool {
        matches!((self, other), (NormValue::Exact(a), NormValue::Exact(b)) if eq_q(a, b))
    }

    /// Ordering by enclosure when disjoint, `None` if undecided.
    pub fn try_cmp(&self, other: &Self) -> Option<Ordering> {
        if self.certainly_eq(other) {
            Some(Ordering::Equal)
        } else if self.certainly_lt(other) {
            Some(Ordering::Less)
        } else if other.certainly_lt(self) {
            Some(Ordering::Greater)
        } else {
            None
        }
    }

    pub fn to_f64(&self) -> f64 {
        let mid = (self.lo() + self.hi()) / Q::from_integer(2.into());
        mid.to_f64().unwrap_or(f64::NAN)
    }

    /// Maximum of a nonempty family; zero for an empty one.
    pub fn max_all<'a>(it: impl IntoIterator<Item = &'a NormValue>, prec: Precision) -> NormValue {
        it.into_iter().fold(NormValue::zero(), |acc, x| acc.max(x, prec))
    }

    pub fn sum_all<'a>(it: impl IntoIterator<Item = &'a NormValue>, prec: Precision) -> NormValue {
        it.into_iter().fold(NormValue::zero(), |acc, x| acc.add(x, prec))
    }
}

/// Exact decimal expansion of a dyadic rational; `p/q` otherwise.
pub fn dyadic_to_decimal(x: &Q) -> String {
    let d = x.denom();
    let k = d.trailing_zeros().unwrap_or(0);
    if (d >> k) != BigInt::one() {
        return fmt_q(x);
    }
    if k == 0 {
        return x.numer().to_string();
    }
    let n = x.numer() * num_traits::pow(BigInt::from(5), k as usize);
    let neg = n.is_negative();
    let digits = n.magnitude().to_string();
    let k = k as usize;
    let padded = if digits.len() <= k { format!("{}{}", "0".repeat(k + 1 - digits.len()), digits) } else { digits };
    let (ip, fp) = padded.split_at(padded.len() - k);
    let fp = fp.trim_end_matches('0');
    let body = if fp.is_empty() { ip.to_string() } else { format!("{ip}.{fp}") };
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

impl fmt::Display for NormValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormValue::Exact(x) => write!(f, "{}", fmt_q(x)),
            NormValue::Interval { .. } => write!(f, "[{:.12}..]", self.to_f64()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{parse_q, q, qf};

    #[test]
    fn sqrt7_enclosure() {
        let p = Precision::default();
        let v = NormValue::exact(q(7)).rpow(&qf(1, 2), p).unwrap();
        assert!(!v.is_exact());
        assert!(&(v.lo() * v.lo()) <= &q(7) && &(v.hi() * v.hi()) >= &q(7));
        assert!(v.width() < p_pow(2, -120));
        assert!((v.to_f64() - 2.6457513110645906).abs() < 1e-12);
    }

    #[test]
    fn exact_powers_stay_exact() {
        let p = Precision::default();
        assert_eq!(NormValue::exact(qf(1, 4)).rpow(&qf(3, 2), p), Some(NormValue::exact(qf(1, 8))));
        assert_eq!(NormValue::exact(q(0)).rpow(&q(0), p), Some(NormValue::one()));
        assert_eq!(NormValue::exact(q(0)).rpow(&qf(-1, 2), p), None);
    }

    #[test]
    fn negative_exponent_interval() {
        let p = Precision::new(64);
        let v = NormValue::exact(q(2)).rpow(&qf(-1, 3), p).unwrap();
        // 2^{-1/3} ~ 0.7937
        assert!(pow_q(v.lo(), 3) <= qf(1, 2) && pow_q(v.hi(), 3) >= qf(1, 2));
    }

    #[test]
    fn rounding_is_outward() {
        let x = qf(1, 3);
        assert!(round_down(&x, 16) <= x && round_up(&x, 16) >= x);
        assert_eq!(round_down(&qf(3, 8), 16), qf(3, 8));
    }

    #[test]
    fn decimal_rendering_round_trips() {
        for s in ["0.375", "-2.5", "12", "0.0078125"] {
            let x = parse_q(s).unwrap();
            assert_eq!(dyadic_to_decimal(&x), s);
        }
        assert_eq!(dyadic_to_decimal(&qf(1, 3)), "1/3");
    }
}
