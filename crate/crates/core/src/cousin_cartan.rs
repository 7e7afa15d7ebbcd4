//! Cousin splittings over an overlap `L_0 = {a_sigma^u}` of the base and
//! the Cartan factorization of matrices close to the identity.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::base_space::{BaseCompact, BasePoint, Exponent, Place};
use crate::error::{Error, Result};
use crate::norm::{NormValue, Precision};
use crate::rational::{fmt_q, is_p_integral, mod_inverse, nearest_integer, p_pow, qi, sym_mod, val, Q};
use crate::series_ring::{norm_annulus, AnnulusSpec, Congruence, LaurentPoly};

/// Data of a Cousin system at one place.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitSystem {
    pub place: Place,
    pub u: Q,
    pub annulus: Option<(Q, Q)>,
    /// Lattice constant: every real lies within `c` of an integer.
    pub c: Q,
    /// Splitting constant: `c + 1` at a finite place, `c + 2` at infinity.
    pub d: Q,
}

impl SplitSystem {
    pub fn new(place: Place, u: Q, annulus: Option<(Q, Q)>) -> Result<Self> {
        if !u.is_positive() {
            return Err(Error::Malformed("exponent must be positive".into()));
        }
        if place == Place::Infinite && u > Q::one() {
            return Err(Error::Malformed("archimedean exponent exceeds 1".into()));
        }
        if let Some((s, t)) = &annulus {
            if !s.is_positive() || s > t {
                return Err(Error::Malformed("annulus needs 0 < s <= t".into()));
            }
        }
        let c = Q::new(1.into(), 2.into());
        let d = match place {
            Place::Finite(_) => &c + Q::one(),
            Place::Infinite => &c + Q::from_integer(2.into()),
        };
        Ok(SplitSystem { place, u, annulus, c, d })
    }

    fn radii(&self) -> (Q, Q) {
        self.annulus.clone().unwrap_or_else(|| (Q::one(), Q::one()))
    }

    /// `L_0 = {a_sigma^u}`.
    pub fn l0(&self) -> BaseCompact {
        BaseCompact::point(&BasePoint::Branch { place: self.place, exp: self.u.clone() })
    }

    /// The outer part of the branch, beyond `a_sigma^u`.
    pub fn k_minus(&self) -> BaseCompact {
        BaseCompact::segment(self.place, Exponent::Finite(self.u.clone()), self.place.length()).expect("valid")
    }

    /// The rest of the spectrum, with the branch cut at `a_sigma^u`.
    pub fn k_plus(&self) -> BaseCompact {
        BaseCompact::star([(self.place, Exponent::Finite(self.u.clone()))].into_iter().collect()).expect("valid")
    }

    fn annulus_over(&self, v: BaseCompact) -> AnnulusSpec {
        let (s, t) = self.radii();
        AnnulusSpec { v, s, t }
    }

    pub fn norm_l0(&self, f: &LaurentPoly, prec: Precision) -> Result<NormValue> {
        norm_annulus(f, &self.annulus_over(self.l0()), prec)
    }

    pub fn norm_minus(&self, f: &LaurentPoly, prec: Precision) -> Result<NormValue> {
        norm_annulus(f, &self.annulus_over(self.k_minus()), prec)
    }

    pub fn norm_plus(&self, f: &LaurentPoly, prec: Precision) -> Result<NormValue> {
        norm_annulus(f, &self.annulus_over(self.k_plus()), prec)
    }

    /// Membership of a coefficient in the minus-side ring.
    pub fn is_minus_coeff(&self, a: &Q) -> bool {
        match self.place {
            Place::Finite(p) => is_p_integral(a, p),
            Place::Infinite => true,
        }
    }

    /// Membership in the plus-side ring: `Z[1/p]`, or `Z` at infinity.
    pub fn is_plus_coeff(&self, a: &Q) -> bool {
        match self.place {
            Place::Finite(p) => {
                let mut d = a.denom().clone();
                let pb = BigInt::from(p);
                while d.is_multiple_of(&pb) {
                    d /= &pb;
                }
                d.is_one()
            }
            Place::Infinite => a.is_integer(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalSplit {
    pub a_minus: Q,
    pub a_plus: Q,
    pub norm_a: NormValue,
    pub norm_minus: NormValue,
    pub norm_plus: NormValue,
    pub sides_ok: bool,
    /// Both norms are `<= D ||a||_{L_0}`.
    pub bounds_ok: bool,
}

fn split_values(a: &Q, sys: &SplitSystem) -> (Q, Q) {
    match sys.place {
        Place::Finite(p) => {
            let e = -val(a, p).unwrap_or(0);
            if e <= 0 {
                return (a.clone(), Q::zero());
            }
            let pe: BigInt = p_pow(p, e).numer().clone();
            let d = a.denom() / &pe;
            let dinv = mod_inverse(&(&d % &pe), &pe).expect("coprime to p");
            let c = sym_mod(&(a.numer() * dinv), &pe);
            let plus_part = Q::new(c, pe);
            (a - &plus_part, -plus_part)
        }
        Place::Infinite => {
            if a.is_integer() {
                (Q::zero(), -a)
            } else if a.abs() <= Q::one() {
                (a.clone(), Q::zero())
            } else {
                let n = qi(nearest_integer(a));
                (a - &n, -n)
            }
        }
    }
}

/// `a = a_minus - a_plus` with `a_minus` on the outer part of the branch
/// and `a_plus` on the rest of the spectrum.
pub fn split_rational(a: &Q, sys: &SplitSystem, prec: Precision) -> Result<RationalSplit> {
    let (a_minus, a_plus) = split_values(a, sys);
    let one = |x: &Q| LaurentPoly::constant(x.clone());
    let base = SplitSystem { annulus: None, ..sys.clone() };
    let norm_a = base.norm_l0(&one(a), prec)?;
    let norm_minus = base.norm_minus(&one(&a_minus), prec)?;
    let norm_plus = base.norm_plus(&one(&a_plus), prec)?;
    let bound = norm_a.scale(&sys.d, prec);
    let sides_ok = sys.is_minus_coeff(&a_minus) && sys.is_plus_coeff(&a_plus) && a_minus.clone() - &a_plus == *a;
    let bounds_ok = norm_minus.certainly_le(&bound) && norm_plus.certainly_le(&bound);
    Ok(RationalSplit { a_minus, a_plus, norm_a, norm_minus, norm_plus, sides_ok, bounds_ok })
}

/// `(f_{>=0}, f_{<0})`.
pub fn split_laurent_sides(f: &LaurentPoly) -> (LaurentPoly, LaurentPoly) {
    (f.nonneg_part(), f.neg_part())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentSideReport {
    pub norm_f: NormValue,
    /// `||f_{>=0}||_{V,0,t}`.
    pub norm_nonneg: NormValue,
    /// `||f_{<0}||_{V,s,w}` (independent of `w >= t`).
    pub norm_neg: NormValue,
    pub bounds_ok: bool,
}

pub fn laurent_side_report(f: &LaurentPoly, a: &AnnulusSpec, prec: Precision) -> Result<LaurentSideReport> {
    let (pos, neg) = split_laurent_sides(f);
    let norm_f = norm_annulus(f, a, prec)?;
    let norm_nonneg = norm_annulus(&pos, &AnnulusSpec { s: Q::zero(), ..a.clone() }, prec)?;
    let norm_neg = norm_annulus(&neg, a, prec)?;
    let bounds_ok = norm_nonneg.certainly_le(&norm_f) && norm_neg.certainly_le(&norm_f);
    Ok(LaurentSideReport { norm_f, norm_nonneg, norm_neg, bounds_ok })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesSplit {
    pub f_minus: LaurentPoly,
    pub f_plus: LaurentPoly,
    pub norm_f: NormValue,
    pub norm_minus: NormValue,
    pub norm_plus: NormValue,
    pub sides_ok: bool,
    pub bounds_ok: bool,
}

/// Coefficientwise [`split_rational`]: `f = f_minus - f_plus`.
pub fn split_series_arith(f: &LaurentPoly, sys: &SplitSystem, prec: Precision) -> Result<SeriesSplit> {
    let mut mi = BTreeMap::new();
    let mut pl = BTreeMap::new();
    for (k, a) in f.coeffs() {
        let (x, y) = split_values(a, sys);
        mi.insert(*k, x);
        pl.insert(*k, y);
    }
    let f_minus = LaurentPoly::new(mi, f.trunc());
    let f_plus = LaurentPoly::new(pl, f.trunc());
    let norm_f = sys.norm_l0(f, prec)?;
    let norm_minus = sys.norm_minus(&f_minus, prec)?;
    let norm_plus = sys.norm_plus(&f_plus, prec)?;
    let bound = norm_f.scale(&sys.d, prec);
    let sides_ok = f_minus.coeffs().values().all(|a| sys.is_minus_coeff(a))
        && f_plus.coeffs().values().all(|a| sys.is_plus_coeff(a))
        && f_minus.sub(&f_plus) == *f;
    let bounds_ok = norm_minus.certainly_le(&bound) && norm_plus.certainly_le(&bound);
    Ok(SeriesSplit { f_minus, f_plus, norm_f, norm_minus, norm_plus, sides_ok, bounds_ok })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RungeResult {
    /// `f = p^{-N}`.
    pub f: Q,
    pub s_primes: Vec<LaurentPoly>,
    pub t_primes: Vec<LaurentPoly>,
    /// `max_{i,j} ||f^{-1} s_i - s'_i|| ||f t_j||`.
    pub s_defect: NormValue,
    /// `max_{i,j} ||f t_j - t'_j|| ||f^{-1} s_i||`.
    pub t_defect: NormValue,
    pub ok: bool,
}

const RUNGE_MAX_EXTRA_DIGITS: i64 = 4096;

fn approx_plus(b: &Q, p: u64, extra: i64) -> Q {
    let e = (-val(b, p).unwrap_or(0)).max(0);
    let pe: BigInt = p_pow(p, e).numer().clone();
    let d = b.denom() / &pe;
    if d.is_one() {
        return b.clone();
    }
    let modulus: BigInt = p_pow(p, e + extra).numer().clone();
    let x = (b.numer() * mod_inverse(&(&d % &modulus), &modulus).expect("coprime")).mod_floor(&modulus);
    Q::new(x, pe)
}

fn max_product(xs: &[NormValue], ys: &[NormValue], prec: Precision) -> NormValue {
    let mut acc = NormValue::zero();
    for x in xs {
        for y in ys {
            acc = acc.max(&x.mul(y, prec), prec);
        }
    }
    acc
}

/// Rescales by `f = p^{-N}` so that `f^{-1} s_i` has p-integral
/// coefficients, then approximates `f t_j` in `Z[1/p]` until both products
/// of defects are `<= delta`.
pub fn runge_approximate(
    s_list: &[LaurentPoly],
    t_list: &[LaurentPoly],
    sys: &SplitSystem,
    delta: &Q,
    prec: Precision,
) -> Result<RungeResult> {
    let Place::Finite(p) = sys.place else {
        return Err(Error::InfinitePlaceUnsupported);
    };
    if !delta.is_positive() {
        return Err(Error::Malformed("delta must be positive".into()));
    }
    let n = s_list
        .iter()
        .flat_map(|s| s.coeffs().values())
        .map(|a| (-val(a, p).unwrap_or(0)).max(0))
        .max()
        .unwrap_or(0);
    let f = p_pow(p, -n);
    let finv = f.recip();
    let s_scaled: Vec<LaurentPoly> = s_list.iter().map(|s| s.scale(&finv)).collect();
    let t_scaled: Vec<LaurentPoly> = t_list.iter().map(|t| t.scale(&f)).collect();
    let s_primes = s_scaled.clone();
    let norms = |v: &[LaurentPoly]| v.iter().map(|x| sys.norm_l0(x, prec)).collect::<Result<Vec<_>>>();
    let s_norms = norms(&s_scaled)?;
    let t_norms = norms(&t_scaled)?;
    let s_err = norms(&s_scaled.iter().zip(&s_primes).map(|(a, b)| a.sub(b)).collect::<Vec<_>>())?;
    let s_defect = max_product(&s_err, &t_norms, prec);
    let dq = NormValue::exact(delta.clone());
    let mut extra = 1;
    loop {
        let t_primes: Vec<LaurentPoly> = t_scaled
            .iter()
            .map(|t| LaurentPoly::new(t.coeffs().iter().map(|(k, a)| (*k, approx_plus(a, p, extra))).collect(), t.trunc()))
            .collect();
        let t_err = norms(&t_scaled.iter().zip(&t_primes).map(|(a, b)| a.sub(b)).collect::<Vec<_>>())?;
        let t_defect = max_product(&t_err, &s_norms, prec);
        if s_defect.certainly_le(&dq) && t_defect.certainly_le(&dq) {
            return Ok(RungeResult { f, s_primes, t_primes, s_defect, t_defect, ok: true });
        }
        if extra >= RUNGE_MAX_EXTRA_DIGITS {
            return Err(Error::DeltaNotAchievable);
        }
        extra *= 2;
    }
}

/// Rectangular matrix of Laurent polynomials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Vec<LaurentPoly>>,
}

impl SeriesMatrix {
    pub fn new(entries: Vec<Vec<LaurentPoly>>) -> Result<Self> {
        let rows = entries.len();
        let cols = entries.first().map_or(0, |r| r.len());
        if rows == 0 || cols == 0 || entries.iter().any(|r| r.len() != cols) {
            return Err(Error::ShapeMismatch);
        }
        Ok(SeriesMatrix { rows, cols, entries })
    }

    pub fn identity(n: usize) -> Self {
        let entries = (0..n)
            .map(|i| (0..n).map(|j| if i == j { LaurentPoly::one() } else { LaurentPoly::zero() }).collect())
            .collect();
        SeriesMatrix { rows: n, cols: n, entries }
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        SeriesMatrix { rows, cols, entries: vec![vec![LaurentPoly::zero(); cols]; rows] }
    }

    pub fn scalar(f: LaurentPoly) -> Self {
        SeriesMatrix { rows: 1, cols: 1, entries: vec![vec![f]] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[Vec<LaurentPoly>] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> &LaurentPoly {
        &self.entries[i][j]
    }

    pub fn map(&self, f: impl Fn(&LaurentPoly) -> LaurentPoly) -> Self {
        SeriesMatrix { rows: self.rows, cols: self.cols, entries: self.entries.iter().map(|r| r.iter().map(&f).collect()).collect() }
    }

    fn zip(&self, o: &Self, f: impl Fn(&LaurentPoly, &LaurentPoly) -> LaurentPoly) -> Result<Self> {
        if self.rows != o.rows || self.cols != o.cols {
            return Err(Error::ShapeMismatch);
        }
        let entries = self
            .entries
            .iter()
            .zip(&o.entries)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| f(x, y)).collect())
            .collect();
        Ok(SeriesMatrix { rows: self.rows, cols: self.cols, entries })
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.zip(o, |a, b| a.add(b))
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.zip(o, |a, b| a.sub(b))
    }

    pub fn neg(&self) -> Self {
        self.map(|a| a.neg())
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        if self.cols != o.rows {
            return Err(Error::ShapeMismatch);
        }
        let mut entries = vec![vec![LaurentPoly::zero(); o.cols]; self.rows];
        for (i, row) in entries.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                for k in 0..self.cols {
                    *e = e.add(&self.entries[i][k].mul(&o.entries[k][j]));
                }
            }
        }
        Ok(SeriesMatrix { rows: self.rows, cols: o.cols, entries })
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().flatten().all(|e| e.is_zero())
    }

    fn minus_identity(&self) -> Result<Self> {
        self.sub(&SeriesMatrix::identity(self.rows))
    }

    fn plus_identity(&self) -> Result<Self> {
        self.add(&SeriesMatrix::identity(self.rows))
    }
}

/// Max row sum of entry norms.
pub fn matrix_norm_with(a: &SeriesMatrix, norm: impl Fn(&LaurentPoly) -> Result<NormValue>, prec: Precision) -> Result<NormValue> {
    let mut acc = NormValue::zero();
    for row in &a.entries {
        let mut s = NormValue::zero();
        for e in row {
            s = s.add(&norm(e)?, prec);
        }
        acc = acc.max(&s, prec);
    }
    Ok(acc)
}

pub fn matrix_norm(a: &SeriesMatrix, ctx: &AnnulusSpec, prec: Precision) -> Result<NormValue> {
    matrix_norm_with(a, |f| norm_annulus(f, ctx, prec), prec)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NeumannInverse {
    pub b: SeriesMatrix,
    pub norm_b: NormValue,
    pub terms: usize,
    pub congruence: Congruence,
    /// `||a b - I||` of the representatives.
    pub residual: NormValue,
}

fn nilpotent_power(n: &SeriesMatrix) -> Option<usize> {
    let mut pw = n.clone();
    for k in 1..=n.rows {
        if pw.is_zero() {
            return Some(k);
        }
        pw = pw.mul(n).ok()?;
    }
    None
}

/// `a^{-1} = sum_i (I - a)^i` for `||a - I|| <= 1/2`.
pub fn neumann_inverse(a: &SeriesMatrix, ctx: &AnnulusSpec, m: i64, prec: Precision) -> Result<NeumannInverse> {
    if a.rows != a.cols {
        return Err(Error::ShapeMismatch);
    }
    if m < 1 {
        return Err(Error::Malformed("truncation order must be positive".into()));
    }
    let n = a.minus_identity()?;
    let nn = matrix_norm(&n, ctx, prec)?;
    if !nn.le_q(&Q::new(1.into(), 2.into())) {
        return Err(Error::NormTooLarge(nn.to_string()));
    }
    let entries = n.entries.iter().flatten();
    let positive = entries.clone().all(|e| e.min_degree().is_none_or(|k| k >= 1));
    let negative = entries.clone().all(|e| e.max_degree().is_none_or(|k| k <= -1));
    let (terms, congruence, keep): (usize, Congruence, Box<dyn Fn(&LaurentPoly) -> LaurentPoly>) =
        if let Some(k) = nilpotent_power(&n) {
            (k, Congruence::ModT(i64::MAX), Box::new(|e: &LaurentPoly| e.clone()))
        } else if positive {
            (m as usize, Congruence::ModT(m), Box::new(move |e: &LaurentPoly| e.representative().truncate(m).representative()))
        } else if negative {
            (m as usize, Congruence::ModTInv(m), Box::new(move |e: &LaurentPoly| e.filter(|k, _| k > -m)))
        } else {
            // ||n||^K <= 2^{-m}; ||n|| <= 1/2 so K = m suffices, fewer when smaller.
            let mut k = 0usize;
            let mut acc = NormValue::one();
            let target = Q::new(1.into(), BigInt::one() << m);
            while !acc.le_q(&target) && k < m as usize {
                acc = acc.mul(&nn, prec);
                k += 1;
            }
            (k.max(1), Congruence::NormOnly, Box::new(|e: &LaurentPoly| e.clone()))
        };
    let minus_n = n.neg();
    let mut term = SeriesMatrix::identity(a.rows);
    let mut b = SeriesMatrix::zero(a.rows, a.cols);
    for _ in 0..terms {
        b = b.add(&term)?;
        term = term.mul(&minus_n)?.map(|e| keep(e));
        if term.is_zero() {
            break;
        }
    }
    let b = b.map(|e| keep(e));
    let norm_b = matrix_norm(&b, ctx, prec)?;
    let residual = matrix_norm(&a.mul(&b)?.minus_identity()?, ctx, prec)?;
    let congruence = match congruence {
        Congruence::ModT(k) if k == i64::MAX => Congruence::ModT(m),
        c => c,
    };
    Ok(NeumannInverse { b, norm_b, terms, congruence, residual })
}

/// Additive splitting of the entries for the Cartan iteration:
/// `f = minus + plus`.
pub trait Splitter {
    fn split(&self, f: &LaurentPoly) -> (LaurentPoly, LaurentPoly);
    /// The norm on the overlap.
    fn norm(&self, f: &LaurentPoly, prec: Precision) -> Result<NormValue>;
    fn minus_norm(&self, f: &LaurentPoly, prec: Precision) -> Result<NormValue>;
    fn plus_norm(&self, f: &LaurentPoly, prec: Precision) -> Result<NormValue>;
    fn is_minus(&self, f: &LaurentPoly) -> bool;
    fn is_plus(&self, f: &LaurentPoly) -> bool;
    fn d(&self) -> Q;
}

/// Coefficientwise split at a place, on an annulus over `L_0`.
#[derive(Clone, Debug)]
pub struct ArithmeticSplit(pub SplitSystem);

impl Splitter for ArithmeticSplit {
    fn split(&self, f: &LaurentPoly) -> (LaurentPoly, LaurentPoly) {
        let mut mi = BTreeMap::new();
        let mut pl = BTreeMap::new();
        for (k, a) in f.coeffs() {
            let (x, y) = split_values(a, &self.0);
            mi.insert(*k, x);
            pl.insert(*k, -y);
        }
        (LaurentPoly::new(mi, f.trunc()), LaurentPoly::new(pl, f.trunc()))
    }

    fn norm(&self, f: &LaurentPoly, prec: Precision) -> Result<NormValue> {
        self.0.norm_l0(f, prec)
    }

    fn minus_norm(&self, f: &LaurentPoly, prec: Precision) -> Result<NormValue> {
        self.0.norm_minus(f, prec)
    }

    fn plus_norm(&self, f: &LaurentPoly, prec: Precision) -> Result<NormValue> {
        self.0.norm_plus(f, prec)
    }

    fn is_minus(&self, f: &LaurentPoly) -> bool {
        f.coeffs().values().all(|a| self.0.is_minus_coeff(a))
    }

    fn is_plus(&self, f: &LaurentPoly) -> bool {
        f.coeffs().values().all(|a| self.0.is_plus_coeff(a))
    }

    fn d(&self) -> Q {
        self.0.d.clone()
    }
}

/// Split by the sign of the exponent: negative powers live on `|T| >= s`,
/// the rest on `|T| <= t`.
#[derive(Clone, Debug)]
pub struct LaurentSplit(pub AnnulusSpec);

impl Splitter for LaurentSplit {
    fn split(&self, f: &LaurentPoly) -> (LaurentPoly, LaurentPoly) {
        let (pos, neg) = split_laurent_sides(f);
        (neg, pos)
    }

    fn norm(&self, f: &LaurentPoly, prec: Precision) -> Result<NormValue> {
        norm_annulus(f, &self.0, prec)
    }

    /// Norm on `|T| >= s`.
    fn minus_norm(&self, f: &LaurentPoly, prec: Precision) -> Result<NormValue> {
        norm_annulus(f, &AnnulusSpec { t: self.0.s.clone(), ..self.0.clone() }, prec)
    }

    /// Norm on `|T| <= t`.
    fn plus_norm(&self, f: &LaurentPoly, prec: Precision) -> Result<NormValue> {
        norm_annulus(f, &AnnulusSpec { s: Q::zero(), ..self.0.clone() }, prec)
    }

    fn is_minus(&self, f: &LaurentPoly) -> bool {
        f.max_degree().is_none_or(|k| k <= 0)
    }

    fn is_plus(&self, f: &LaurentPoly) -> bool {
        f.min_degree().is_none_or(|k| k >= 0)
    }

    fn d(&self) -> Q {
        Q::one()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CartanResult {
    pub c_minus: SeriesMatrix,
    pub c_plus: SeriesMatrix,
    /// `||a - c_minus c_plus||`, computed exactly on the representatives.
    pub residual: NormValue,
    pub iterations: usize,
    /// `M = ||a - I||`.
    pub m: NormValue,
    /// `beta = 4 D^2 M`.
    pub beta: Q,
    /// `||b~_k||` along the iteration.
    pub b_norms: Vec<NormValue>,
    /// `||b~_k|| <= M beta^k` for every recorded k.
    pub decay_ok: bool,
    /// `||c_minus - I|| <= 4 D M` and `||c_plus - I|| <= 4 D M`.
    pub bound_4d_ok: bool,
    pub sides_ok: bool,
    /// `||c_pm - I|| <= 1/2`, so both factors are invertible.
    pub invertible_ok: bool,
    pub one_sided: bool,
}

fn prune(f: &LaurentPoly, sp: &dyn Splitter, eta: &Q, prec: Precision) -> Result<LaurentPoly> {
    let mut keep = BTreeMap::new();
    for (k, a) in f.coeffs() {
        let n = sp.norm(&LaurentPoly::monomial(a.clone(), *k), prec)?;
        if !n.lt_q(eta) {
            keep.insert(*k, a.clone());
        }
    }
    Ok(LaurentPoly::new(keep, f.trunc()))
}

fn prune_m(a: &SeriesMatrix, sp: &dyn Splitter, eta: &Q, prec: Precision) -> Result<SeriesMatrix> {
    let entries = a.entries.iter().map(|r| r.iter().map(|e| prune(e, sp, eta, prec)).collect::<Result<Vec<_>>>()).collect::<Result<_>>()?;
    Ok(SeriesMatrix { rows: a.rows, cols: a.cols, entries })
}

/// `(I + x)^{-1} z` truncated once the terms drop below `eta`.
fn left_inverse_apply(x: &SeriesMatrix, z: &SeriesMatrix, sp: &dyn Splitter, eta: &Q, prec: Precision) -> Result<SeriesMatrix> {
    let mut term = z.clone();
    let mut acc = z.clone();
    for _ in 0..256 {
        term = prune_m(&x.mul(&term)?.neg(), sp, eta, prec)?;
        if term.is_zero() {
            break;
        }
        acc = acc.add(&term)?;
    }
    Ok(acc)
}

fn right_inverse_apply(z: &SeriesMatrix, y: &SeriesMatrix, sp: &dyn Splitter, eta: &Q, prec: Precision) -> Result<SeriesMatrix> {
    let mut term = z.clone();
    let mut acc = z.clone();
    for _ in 0..256 {
        term = prune_m(&term.mul(y)?.neg(), sp, eta, prec)?;
        if term.is_zero() {
            break;
        }
        acc = acc.add(&term)?;
    }
    Ok(acc)
}

/// Factors `a = c_minus c_plus` by repeatedly splitting the middle defect.
pub fn cartan_factorize(a: &SeriesMatrix, sp: &dyn Splitter, max_iter: usize, tol: &Q, prec: Precision) -> Result<CartanResult> {
    if a.rows != a.cols {
        return Err(Error::ShapeMismatch);
    }
    let n = a.rows;
    let id = SeriesMatrix::identity(n);
    let mnorm = |x: &SeriesMatrix, f: &dyn Fn(&LaurentPoly) -> Result<NormValue>| matrix_norm_with(x, f, prec);
    let norm_a = |x: &SeriesMatrix| mnorm(x, &|f| sp.norm(f, prec));
    let b0 = a.minus_identity()?;
    let m = norm_a(&b0)?;
    let split_m = |x: &SeriesMatrix| -> (SeriesMatrix, SeriesMatrix) {
        let (mi, pl): (Vec<Vec<_>>, Vec<Vec<_>>) =
            x.entries.iter().map(|r| r.iter().map(|e| sp.split(e)).unzip()).unzip();
        (SeriesMatrix { rows: x.rows, cols: x.cols, entries: mi }, SeriesMatrix { rows: x.rows, cols: x.cols, entries: pl })
    };
    let d = sp.d();
    let eight = Q::from_integer(8.into());
    let two = Q::from_integer(2.into());
    let m_hi = m.hi().clone();
    let (x0, y0) = split_m(&b0);
    let one_sided = x0.is_zero() || y0.is_zero();
    let admissible = one_sided || m_hi < (&two * &d).recip() && m_hi <= (&eight * &d).recip() && m_hi <= (&eight * &d * &d).recip();
    if !admissible {
        return Err(Error::EpsilonTooLarge(m.to_string()));
    }
    let beta = Q::from_integer(4.into()) * &d * &d * &m_hi;
    let eta = tol / Q::from_integer(64.into());

    let mut c_minus = id.clone();
    let mut c_plus = id.clone();
    let mut b = b0.clone();
    let mut b_norms = vec![];
    let mut iterations = 0;
    let mut residual = m.clone();
    while iterations < max_iter {
        b_norms.push(norm_a(&b)?);
        let (x, y) = split_m(&b);
        c_minus = c_minus.mul(&x.plus_identity()?)?;
        c_plus = y.plus_identity()?.mul(&c_plus)?;
        iterations += 1;
        residual = norm_a(&a.sub(&c_minus.mul(&c_plus)?)?)?;
        if residual.le_q(tol) {
            break;
        }
        // b~ <- -(I + x)^{-1} x y (I + y)^{-1}
        let xy = prune_m(&x.mul(&y)?, sp, &eta, prec)?;
        let left = left_inverse_apply(&x, &xy, sp, &eta, prec)?;
        b = prune_m(&right_inverse_apply(&left, &y, sp, &eta, prec)?.neg(), sp, &eta, prec)?;
    }
    if !residual.le_q(tol) {
        return Err(Error::ToleranceNotReached(max_iter));
    }
    let decay_ok = b_norms.iter().enumerate().all(|(k, nb)| {
        let bound = &m_hi * num_traits::pow(beta.clone(), k);
        nb.le_q(&bound)
    });
    let dm = NormValue::exact(Q::from_integer(4.into()) * &d * &m_hi);
    let cm = c_minus.minus_identity()?;
    let cp = c_plus.minus_identity()?;
    let sides_ok = cm.entries.iter().flatten().all(|e| sp.is_minus(e)) && cp.entries.iter().flatten().all(|e| sp.is_plus(e));
    let (bound_4d_ok, invertible_ok) = if sides_ok {
        let cm_norm = mnorm(&cm, &|f| sp.minus_norm(f, prec))?;
        let cp_norm = mnorm(&cp, &|f| sp.plus_norm(f, prec))?;
        let half = Q::new(1.into(), 2.into());
        (
            cm_norm.certainly_le(&dm) && cp_norm.certainly_le(&dm),
            cm_norm.le_q(&half) && cp_norm.le_q(&half),
        )
    } else {
        (false, false)
    };
    Ok(CartanResult {
        c_minus,
        c_plus,
        residual,
        iterations,
        m,
        beta,
        b_norms,
        decay_ok,
        bound_4d_ok,
        sides_ok,
        invertible_ok,
        one_sided,
    })
}

/// Display helper for certificates.
pub fn describe_split(s: &RationalSplit) -> String {
    format!("{} = {} - ({})", fmt_q(&(s.a_minus.clone() - &s.a_plus)), fmt_q(&s.a_minus), fmt_q(&s.a_plus))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qf};

    fn sys2(u: Q) -> SplitSystem {
        SplitSystem::new(Place::Finite(2), u, None).unwrap()
    }

    #[test]
    fn rational_split_examples() {
        let pr = Precision::default();
        let s = split_rational(&qf(5, 6), &sys2(q(1)), pr).unwrap();
        assert_eq!((s.a_minus.clone(), s.a_plus.clone()), (qf(1, 3), qf(-1, 2)));
        assert_eq!(s.norm_a, NormValue::exact(q(2)));
        assert_eq!(s.norm_minus, NormValue::one());
        assert_eq!(s.norm_plus, NormValue::exact(q(2)));
        assert!(s.sides_ok && s.bounds_ok);
        let s = split_rational(&q(7), &sys2(q(1)), pr).unwrap();
        assert_eq!((s.a_minus, s.a_plus), (q(7), q(0)));
        let inf = SplitSystem::new(Place::Infinite, qf(1, 2), None).unwrap();
        let s = split_rational(&qf(7, 3), &inf, pr).unwrap();
        assert_eq!((s.a_minus.clone(), s.a_plus.clone()), (qf(1, 3), q(-2)));
        assert!(s.sides_ok && s.bounds_ok);
        assert!((s.norm_a.to_f64() - 1.5275).abs() < 1e-3);
    }

    #[test]
    fn series_split_examples() {
        let pr = Precision::default();
        let sys = SplitSystem::new(Place::Finite(2), q(1), Some((qf(1, 2), q(2)))).unwrap();
        let f = LaurentPoly::monomial(qf(5, 6), 1);
        let s = split_series_arith(&f, &sys, pr).unwrap();
        assert_eq!(s.f_minus, LaurentPoly::monomial(qf(1, 3), 1));
        assert_eq!(s.f_plus, LaurentPoly::monomial(qf(-1, 2), 1));
        let g = LaurentPoly::from_pairs(&[(0, qf(5, 6)), (-1, qf(1, 10))]);
        let s = split_series_arith(&g, &sys, pr).unwrap();
        assert!(s.sides_ok && s.bounds_ok);
        let (a, b) = split_laurent_sides(&LaurentPoly::from_pairs(&[(-1, q(2)), (0, q(3)), (2, q(1))]));
        assert_eq!(a, LaurentPoly::from_pairs(&[(0, q(3)), (2, q(1))]));
        assert_eq!(b, LaurentPoly::monomial(q(2), -1));
    }

    #[test]
    fn runge_examples() {
        let pr = Precision::default();
        let sys = SplitSystem::new(Place::Finite(2), q(1), Some((qf(1, 2), q(2)))).unwrap();
        let r = runge_approximate(&[LaurentPoly::monomial(qf(1, 6), 1)], &[LaurentPoly::monomial(q(1), 1)], &sys, &qf(1, 100), pr).unwrap();
        assert_eq!(r.f, qf(1, 2));
        assert_eq!(r.s_primes, vec![LaurentPoly::monomial(qf(1, 3), 1)]);
        assert!(r.s_defect.is_zero());
        assert_eq!(approx_plus(&qf(1, 10), 2, 5), qf(13, 2));
    }

    #[test]
    fn neumann_examples() {
        let pr = Precision::default();
        let a21 = BaseCompact::point(&BasePoint::branch(Place::Finite(2), q(1)).unwrap());
        let ctx = AnnulusSpec::new(a21, qf(1, 2), q(2)).unwrap();
        let a = SeriesMatrix::scalar(LaurentPoly::from_pairs(&[(0, q(1)), (1, q(16))]));
        let inv = neumann_inverse(&a, &ctx, 3, pr).unwrap();
        assert_eq!(inv.b, SeriesMatrix::scalar(LaurentPoly::from_pairs(&[(0, q(1)), (1, q(-16)), (2, q(256))])));
        let nil = SeriesMatrix::new(vec![
            vec![LaurentPoly::one(), LaurentPoly::monomial(q(4), 0)],
            vec![LaurentPoly::zero(), LaurentPoly::one()],
        ])
        .unwrap();
        let inv = neumann_inverse(&nil, &ctx, 3, pr).unwrap();
        assert!(inv.residual.is_zero());
        let diag = SeriesMatrix::new(vec![
            vec![LaurentPoly::monomial(q(1), 1), LaurentPoly::zero()],
            vec![LaurentPoly::zero(), LaurentPoly::monomial(q(1), -1)],
        ])
        .unwrap();
        assert_eq!(matrix_norm(&diag, &ctx, pr).unwrap(), NormValue::exact(q(2)));
    }

    #[test]
    fn cartan_examples() {
        let pr = Precision::default();
        let tol = Q::new(1.into(), BigInt::one() << 40);
        let sys = SplitSystem::new(Place::Finite(2), q(1), Some((qf(1, 2), q(2)))).unwrap();
        let ar = ArithmeticSplit(sys.clone());
        let id = SeriesMatrix::identity(2);
        let r = cartan_factorize(&id, &ar, 10, &tol, pr).unwrap();
        assert!(r.residual.is_zero());
        let a = SeriesMatrix::scalar(LaurentPoly::from_pairs(&[(0, q(1)), (-1, qf(8, 3))]));
        let r = cartan_factorize(&a, &ar, 10, &tol, pr).unwrap();
        assert_eq!((r.c_minus.clone(), r.c_plus.clone()), (a, SeriesMatrix::identity(1)));
        let a = SeriesMatrix::scalar(LaurentPoly::from_pairs(&[(0, q(1)), (-1, qf(128, 3)), (1, q(256))]));
        let r = cartan_factorize(&a, &ar, 10, &tol, pr).unwrap();
        assert_eq!(r.m, NormValue::exact(qf(3, 128)));
        assert!(r.sides_ok && r.bound_4d_ok && r.decay_ok);
        let a21 = BaseCompact::point(&BasePoint::branch(Place::Finite(2), q(1)).unwrap());
        let ls = LaurentSplit(AnnulusSpec::new(a21, qf(1, 2), q(2)).unwrap());
        let r = cartan_factorize(&a, &ls, 20, &tol, pr).unwrap();
        assert!(!r.one_sided && r.sides_ok && r.bound_4d_ok && r.decay_ok && r.invertible_ok);
        assert!(r.residual.le_q(&tol));
    }
}
