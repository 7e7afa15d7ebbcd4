//! Laurent polynomials as finite models of convergent series on relative
//! annuli `s <= |T| <= t` over a compact of the base.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::affine_line::{Fiber, LinePoint};
use crate::base_space::{base_norm, eval_base_seminorm, shilov_base, BaseCompact, BasePoint};
use crate::error::{Error, Result};
use crate::norm::{NormValue, Precision};
use crate::poly::Poly;
use crate::rational::{fmt_q, lcm_all, pow_q, Q};

/// Finitely supported Laurent polynomial, optionally modulo `T^m`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct LaurentPoly {
    coeffs: BTreeMap<i64, Q>,
    trunc: Option<i64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeriesOp {
    Add,
    Mul,
}

impl LaurentPoly {
    pub fn new(coeffs: BTreeMap<i64, Q>, trunc: Option<i64>) -> Self {
        let coeffs = coeffs
            .into_iter()
            .filter(|(k, a)| !a.is_zero() && trunc.is_none_or(|m| *k < m))
            .collect();
        LaurentPoly { coeffs, trunc }
    }

    pub fn from_pairs(pairs: &[(i64, Q)]) -> Self {
        let mut m = BTreeMap::new();
        for (k, a) in pairs {
            *m.entry(*k).or_insert_with(Q::zero) += a;
        }
        LaurentPoly::new(m, None)
    }

    pub fn zero() -> Self {
        LaurentPoly::default()
    }

    pub fn one() -> Self {
        LaurentPoly::constant(Q::one())
    }

    pub fn constant(a: Q) -> Self {
        LaurentPoly::monomial(a, 0)
    }

    pub fn monomial(a: Q, k: i64) -> Self {
        LaurentPoly::new([(k, a)].into_iter().collect(), None)
    }

    pub fn from_poly(p: &Poly) -> Self {
        LaurentPoly::new(p.coeffs().iter().enumerate().map(|(k, a)| (k as i64, a.clone())).collect(), None)
    }

    /// The polynomial of a series with nonnegative support.
    pub fn to_poly(&self) -> Option<Poly> {
        if self.has_negative_support() {
            return None;
        }
        let n = self.max_degree().map_or(0, |d| d + 1) as usize;
        Some(Poly::new((0..n).map(|k| self.coeff(k as i64)).collect()))
    }

    pub fn coeffs(&self) -> &BTreeMap<i64, Q> {
        &self.coeffs
    }

    pub fn trunc(&self) -> Option<i64> {
        self.trunc
    }

    pub fn coeff(&self, k: i64) -> Q {
        self.coeffs.get(&k).cloned().unwrap_or_else(Q::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn min_degree(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    pub fn max_degree(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn has_negative_support(&self) -> bool {
        self.min_degree().is_some_and(|k| k < 0)
    }

    fn join_trunc(a: Option<i64>, b: Option<i64>) -> Option<i64> {
        match (a, b) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, None) => x,
            (None, y) => y,
        }
    }

    /// Reduces modulo `T^m` (keeping the tighter modulus).
    pub fn truncate(&self, m: i64) -> Self {
        LaurentPoly::new(self.coeffs.clone(), LaurentPoly::join_trunc(self.trunc, Some(m)))
    }

    /// Forgets the modulus, keeping the representative.
    pub fn representative(&self) -> Self {
        LaurentPoly { coeffs: self.coeffs.clone(), trunc: None }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut m = self.coeffs.clone();
        for (k, a) in &o.coeffs {
            *m.entry(*k).or_insert_with(Q::zero) += a;
        }
        LaurentPoly::new(m, LaurentPoly::join_trunc(self.trunc, o.trunc))
    }

    pub fn neg(&self) -> Self {
        LaurentPoly { coeffs: self.coeffs.iter().map(|(k, a)| (*k, -a)).collect(), trunc: self.trunc }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: &Q) -> Self {
        LaurentPoly::new(self.coeffs.iter().map(|(k, a)| (*k, a * c)).collect(), self.trunc)
    }

    /// Multiplication by `T^j`.
    pub fn shift(&self, j: i64) -> Self {
        LaurentPoly::new(self.coeffs.iter().map(|(k, a)| (k + j, a.clone())).collect(), self.trunc.map(|m| m + j))
    }

    pub fn mul(&self, o: &Self) -> Self {
        let trunc = LaurentPoly::join_trunc(self.trunc, o.trunc);
        // Integer products over common denominators; one reduction per term.
        let da = lcm_all(self.coeffs.values().map(|c| c.denom()));
        let db = lcm_all(o.coeffs.values().map(|c| c.denom()));
        let ia: Vec<(i64, BigInt)> = self.coeffs.iter().map(|(k, c)| (*k, c.numer() * (&da / c.denom()))).collect();
        let ib: Vec<(i64, BigInt)> = o.coeffs.iter().map(|(k, c)| (*k, c.numer() * (&db / c.denom()))).collect();
        let mut acc: BTreeMap<i64, BigInt> = BTreeMap::new();
        for (i, a) in &ia {
            for (j, b) in &ib {
                if trunc.is_some_and(|t| i + j >= t) {
                    continue;
                }
                *acc.entry(i + j).or_insert_with(BigInt::zero) += a * b;
            }
        }
        let d = da * db;
        LaurentPoly::new(acc.into_iter().map(|(k, n)| (k, Q::new(n, d.clone()))).collect(), trunc)
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(LaurentPoly::one().with_trunc(self.trunc), |acc, _| acc.mul(self))
    }

    fn with_trunc(mut self, t: Option<i64>) -> Self {
        self.trunc = t;
        self.coeffs.retain(|k, _| t.is_none_or(|m| *k < m));
        self
    }

    /// Terms with exponent in `[lo, hi)`.
    pub fn slice(&self, lo: i64, hi: i64) -> Self {
        LaurentPoly {
            coeffs: self.coeffs.range(lo..hi).map(|(k, a)| (*k, a.clone())).collect(),
            trunc: self.trunc,
        }
    }

    pub fn nonneg_part(&self) -> Self {
        self.slice(0, i64::MAX)
    }

    pub fn neg_part(&self) -> Self {
        self.slice(i64::MIN, 0)
    }

    /// Equality modulo `T^m` of the representatives.
    pub fn eq_mod(&self, o: &Self, m: i64) -> bool {
        self.representative().truncate(m) == o.representative().truncate(m)
    }

    /// Keeps terms satisfying the predicate.
    pub fn filter(&self, keep: impl Fn(i64, &Q) -> bool) -> Self {
        LaurentPoly { coeffs: self.coeffs.iter().filter(|(k, a)| keep(**k, a)).map(|(k, a)| (*k, a.clone())).collect(), trunc: self.trunc }
    }

    /// Evaluation at a rational point (nonzero when negative powers occur).
    pub fn eval(&self, x: &Q) -> Q {
        self.coeffs.iter().map(|(k, a)| a * pow_q(x, *k)).sum()
    }
}

impl std::fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            write!(f, "0")?;
        }
        for (i, (k, a)) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}*T^{k}", fmt_q(a))?;
        }
        if let Some(m) = self.trunc {
            write!(f, " mod T^{m}")?;
        }
        Ok(())
    }
}

pub fn series_arith(f: &LaurentPoly, g: &LaurentPoly, op: SeriesOp) -> LaurentPoly {
    match op {
        SeriesOp::Add => f.add(g),
        SeriesOp::Mul => f.mul(g),
    }
}

/// The relative annulus `s <= |T| <= t` over a base compact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnnulusSpec {
    pub v: BaseCompact,
    pub s: Q,
    pub t: Q,
}

impl AnnulusSpec {
    pub fn new(v: BaseCompact, s: Q, t: Q) -> Result<Self> {
        if s < Q::zero() || s > t {
            return Err(Error::Malformed("annulus needs 0 <= s <= t".into()));
        }
        Ok(AnnulusSpec { v, s, t })
    }

    pub fn disk(v: BaseCompact, t: Q) -> Result<Self> {
        AnnulusSpec::new(v, Q::zero(), t)
    }

    /// `max(s^k, t^k)`.
    pub fn weight(&self, k: i64) -> Result<Q> {
        if k >= 0 {
            Ok(pow_q(&self.t, k))
        } else if self.s.is_zero() {
            Err(Error::NegativePowersOnDisk)
        } else {
            Ok(pow_q(&self.s, k))
        }
    }
}

/// `sum_k ||a_k||_V max(s^k, t^k)`.
pub fn norm_annulus(f: &LaurentPoly, a: &AnnulusSpec, prec: Precision) -> Result<NormValue> {
    let mut acc = NormValue::zero();
    for (k, c) in f.coeffs() {
        let w = a.weight(*k)?;
        acc = acc.add(&base_norm(c, &a.v, prec)?.scale(&w, prec), prec);
    }
    Ok(acc)
}

/// `max_k ||a_k||_V max(s^k, t^k)`, the supremum over the relative annulus.
pub fn uniform_norm_annulus(f: &LaurentPoly, a: &AnnulusSpec, prec: Precision) -> Result<NormValue> {
    if a.v.is_archimedean() {
        return Err(Error::ArchimedeanBase);
    }
    let mut acc = NormValue::zero();
    for (k, c) in f.coeffs() {
        let w = a.weight(*k)?;
        acc = acc.max(&base_norm(c, &a.v, prec)?.scale(&w, prec), prec);
    }
    Ok(acc)
}

/// Uniform norm, or the weighted sum norm as an upper bound over an
/// archimedean base. The flag tells whether the value is exact.
pub fn uniform_norm_bound(f: &LaurentPoly, a: &AnnulusSpec, prec: Precision) -> Result<(NormValue, bool)> {
    match uniform_norm_annulus(f, a, prec) {
        Err(Error::ArchimedeanBase) => Ok((norm_annulus(f, a, prec)?, false)),
        r => r.map(|n| (n, true)),
    }
}

/// `s/(u - s) + t/(t - v)` for `s < u <= v < t`.
pub fn compare_annulus_factor(s: &Q, t: &Q, u: &Q, v: &Q) -> Result<Q> {
    if s < &Q::zero() || !(s < u && u <= v && v < t) {
        return Err(Error::OrderingViolated);
    }
    let left = if s.is_zero() { Q::zero() } else { s / (u - s) };
    Ok(left + t / (t - v))
}

/// `|f|` at a point `eta_{0,r}` of a non-archimedean fiber.
pub fn eval_laurent(f: &LaurentPoly, x: &LinePoint, prec: Precision) -> Result<NormValue> {
    let Fiber::UmDisk { alpha, r } = &x.fiber else {
        return Err(Error::IncompatiblePoint("Laurent evaluation needs a disk point".into()));
    };
    if !alpha.is_zero() {
        return Err(Error::IncompatiblePoint("Laurent evaluation is centered at 0".into()));
    }
    let mut acc = NormValue::zero();
    for (k, c) in f.coeffs() {
        if *k < 0 && r.is_zero() {
            return Err(Error::NegativePowersOnDisk);
        }
        let a = eval_base_seminorm(c, &x.base, prec)?;
        acc = acc.max(&a.scale(&pow_q(r, *k), prec), prec);
    }
    Ok(acc)
}

/// Shilov boundary of the relative annulus.
pub fn shilov_annulus(a: &AnnulusSpec) -> Result<Vec<LinePoint>> {
    if a.v.is_archimedean() {
        return Err(Error::ArchimedeanBase);
    }
    let mut radii = vec![];
    if !a.s.is_zero() {
        radii.push(a.s.clone());
    }
    if !radii.contains(&a.t) {
        radii.push(a.t.clone());
    }
    let mut out = vec![];
    for b in shilov_base(&a.v) {
        for r in &radii {
            out.push(LinePoint { base: b.clone(), fiber: Fiber::UmDisk { alpha: Q::zero(), r: r.clone() } });
        }
    }
    Ok(out)
}

/// How `f g = 1` holds for a computed inverse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Congruence {
    /// `f g = 1 mod T^m`.
    ModT(i64),
    /// `f g - 1` is supported in degrees `<= -m`.
    ModTInv(i64),
    /// Only the residual norm is controlled.
    NormOnly,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InverseCert {
    pub g: LaurentPoly,
    /// `||f/c - 1||` on the annulus.
    pub h_norm: NormValue,
    pub terms: usize,
    pub congruence: Congruence,
    /// `||f g - 1||` of the representatives.
    pub residual: NormValue,
}

fn is_base_unit(c: &Q, v: &BaseCompact) -> bool {
    !c.is_zero() && v.admits(c) && v.admits(&c.recip())
}

/// Inverse of `f = c (1 + h)` by the geometric series in `-h`.
pub fn invert_unit(f: &LaurentPoly, a: &AnnulusSpec, m: i64, prec: Precision) -> Result<InverseCert> {
    if m < 1 {
        return Err(Error::Malformed("truncation order must be positive".into()));
    }
    let c = f.coeff(0);
    if !is_base_unit(&c, &a.v) {
        return Err(Error::NotAUnit("constant term is not invertible on the base".into()));
    }
    let ci = c.recip();
    let h = f.representative().scale(&ci).sub(&LaurentPoly::one());
    let h_norm = norm_annulus(&h, a, prec)?;
    if !h_norm.lt_q(&Q::one()) {
        return Err(Error::NotAUnit(format!("||h|| = {h_norm} is not certified < 1")));
    }
    let positive = h.min_degree().is_none_or(|k| k >= 1);
    let negative = !h.is_zero() && h.max_degree().is_some_and(|k| k <= -1);
    let keep = |g: LaurentPoly| -> LaurentPoly {
        if positive {
            g.representative().filter(|k, _| k < m)
        } else if negative {
            g.filter(|k, _| k > -m)
        } else {
            g
        }
    };
    let minus_h = h.neg();
    let mut term = LaurentPoly::one();
    let mut g = LaurentPoly::zero();
    let mut terms = 0;
    for _ in 0..m {
        if term.is_zero() {
            break;
        }
        g = g.add(&term);
        terms += 1;
        term = keep(term.mul(&minus_h));
    }
    let g = keep(g).scale(&ci);
    let residual = norm_annulus(&f.representative().mul(&g).sub(&LaurentPoly::one()), a, prec)?;
    let congruence = if positive {
        Congruence::ModT(f.trunc().map_or(m, |t| t.min(m)))
    } else if negative {
        Congruence::ModTInv(m)
    } else {
        Congruence::NormOnly
    };
    let g = if positive { g.truncate(f.trunc().map_or(m, |t| t.min(m))) } else { g };
    Ok(InverseCert { g, h_norm, terms, congruence, residual })
}

/// Central point helper used by examples and tests.
pub fn central_annulus(s: Q, t: Q) -> AnnulusSpec {
    AnnulusSpec { v: BaseCompact::point(&BasePoint::Central), s, t }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base_space::Place;
    use crate::rational::{q, qf};

    fn a21() -> BaseCompact {
        BaseCompact::point(&BasePoint::branch(Place::Finite(2), q(1)).unwrap())
    }

    fn ex() -> LaurentPoly {
        LaurentPoly::from_pairs(&[(-1, q(2)), (0, q(3)), (2, q(1))])
    }

    #[test]
    fn arithmetic_examples() {
        let t = LaurentPoly::monomial(q(1), 1);
        assert_eq!(series_arith(&t, &t, SeriesOp::Mul), LaurentPoly::monomial(q(1), 2));
        let a = LaurentPoly::from_pairs(&[(0, q(1)), (1, q(1))]).truncate(3);
        let b = LaurentPoly::from_pairs(&[(0, q(1)), (1, q(-1))]).truncate(3);
        assert_eq!(a.mul(&b), LaurentPoly::from_pairs(&[(0, q(1)), (2, q(-1))]).truncate(3));
        let c = LaurentPoly::from_pairs(&[(-1, q(2)), (0, q(3))]);
        assert_eq!(c.mul(&t), LaurentPoly::from_pairs(&[(0, q(2)), (1, q(3))]));
    }

    #[test]
    fn norm_examples() {
        let pr = Precision::default();
        let an = AnnulusSpec::new(a21(), qf(1, 2), q(2)).unwrap();
        assert_eq!(norm_annulus(&ex(), &an, pr).unwrap(), NormValue::exact(q(6)));
        assert_eq!(uniform_norm_annulus(&ex(), &an, pr).unwrap(), NormValue::exact(q(4)));
        let a31 = BaseCompact::point(&BasePoint::branch(Place::Finite(3), q(1)).unwrap());
        let an3 = AnnulusSpec::new(a31, qf(1, 2), q(2)).unwrap();
        assert_eq!(uniform_norm_annulus(&LaurentPoly::monomial(q(1), -1), &an3, pr).unwrap(), NormValue::exact(q(2)));
        let disk = AnnulusSpec::disk(a21(), q(2)).unwrap();
        assert_eq!(norm_annulus(&ex(), &disk, pr), Err(Error::NegativePowersOnDisk));
    }

    #[test]
    fn comparison_factor_examples() {
        assert_eq!(compare_annulus_factor(&qf(1, 2), &q(2), &q(1), &q(1)).unwrap(), q(3));
        assert_eq!(compare_annulus_factor(&q(0), &q(2), &q(1), &q(1)).unwrap(), q(2));
        assert_eq!(compare_annulus_factor(&qf(1, 4), &q(4), &qf(1, 2), &q(2)).unwrap(), q(3));
        assert_eq!(compare_annulus_factor(&q(1), &q(2), &q(1), &q(1)), Err(Error::OrderingViolated));
    }

    #[test]
    fn inversion_examples() {
        let pr = Precision::default();
        let an = central_annulus(q(0), qf(1, 2));
        let f = LaurentPoly::from_pairs(&[(0, q(1)), (1, q(1))]);
        let inv = invert_unit(&f, &an, 4, pr).unwrap();
        assert_eq!(inv.g, LaurentPoly::from_pairs(&[(0, q(1)), (1, q(-1)), (2, q(1)), (3, q(-1))]).truncate(4));
        let f = LaurentPoly::from_pairs(&[(0, q(2)), (1, q(1))]);
        let inv = invert_unit(&f, &an, 3, pr).unwrap();
        assert_eq!(inv.g, LaurentPoly::from_pairs(&[(0, qf(1, 2)), (1, qf(-1, 4)), (2, qf(1, 8))]).truncate(3));
        assert!(f.mul(&inv.g).eq_mod(&LaurentPoly::one(), 3));
    }

    #[test]
    fn shilov_examples() {
        let an = AnnulusSpec::new(a21(), qf(1, 2), q(2)).unwrap();
        assert_eq!(shilov_annulus(&an).unwrap().len(), 2);
        let disk = AnnulusSpec::disk(a21(), q(1)).unwrap();
        assert_eq!(shilov_annulus(&disk).unwrap().len(), 1);
        assert_eq!(shilov_annulus(&AnnulusSpec::disk(BaseCompact::whole(), q(1)).unwrap()), Err(Error::ArchimedeanBase));
    }
}
