//! Points, seminorms and compact subsets of the spectrum of Z.
//!
//! The spectrum is a tree: branches `a_p^e` (e in (0, inf], ending at the
//! extreme point `a~_p`) for every prime and one archimedean branch
//! `a_inf^e` (e in (0, 1]), all glued at the trivial seminorm `a_0`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::norm::{NormValue, Precision};
use crate::rational::{abs_p, fmt_q, is_prime_u64, is_p_integral, p_pow, q, qf, support_primes, val, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Place {
    Finite(u64),
    Infinite,
}

impl Place {
    pub fn finite(p: u64) -> Result<Place> {
        if is_prime_u64(p) {
            Ok(Place::Finite(p))
        } else {
            Err(Error::NotPrime(p))
        }
    }

    /// Branch length `l(place)`: unbounded for primes, 1 at infinity.
    pub fn length(&self) -> Exponent {
        match self {
            Place::Finite(_) => Exponent::Infinite,
            Place::Infinite => Exponent::Finite(Q::one()),
        }
    }

    pub fn prime(&self) -> Option<u64> {
        match self {
            Place::Finite(p) => Some(*p),
            Place::Infinite => None,
        }
    }

    /// The normalized absolute value `|x|_place` (exact).
    pub fn abs(&self, x: &Q) -> Q {
        match self {
            Place::Finite(p) => abs_p(x, *p),
            Place::Infinite => x.abs(),
        }
    }
}

impl std::fmt::Display for Place {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Place::Finite(p) => write!(f, "{p}"),
            Place::Infinite => write!(f, "inf"),
        }
    }
}

/// A branch coordinate: a nonnegative rational or `+inf`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Exponent {
    Finite(Q),
    Infinite,
}

impl Exponent {
    pub fn finite(&self) -> Option<&Q> {
        match self {
            Exponent::Finite(x) => Some(x),
            Exponent::Infinite => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Exponent::Finite(x) if x.is_zero())
    }
}

impl std::fmt::Display for Exponent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Exponent::Finite(x) => write!(f, "{}", fmt_q(x)),
            Exponent::Infinite => write!(f, "inf"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BasePoint {
    /// The trivial seminorm `a_0`.
    Central,
    /// `|.|_place^exp` with `exp > 0` (and `exp <= 1` at infinity).
    Branch { place: Place, exp: Q },
    /// `a~_p`: the trivial absolute value of `F_p` pulled back to Z.
    Extreme { p: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PointClass {
    Central,
    Internal,
    Extreme,
}

impl BasePoint {
    /// Builds the point at coordinate `exp` on the branch of `place`.
    pub fn new(place: Option<Place>, exp: Exponent) -> Result<BasePoint> {
        match (place, exp) {
            (None, e) if e.is_zero() => Ok(BasePoint::Central),
            (None, _) => Err(Error::Malformed("central point must have exponent 0".into())),
            (Some(_), e) if e.is_zero() => Ok(BasePoint::Central),
            (Some(Place::Finite(p)), Exponent::Infinite) => {
                Place::finite(p)?;
                Ok(BasePoint::Extreme { p })
            }
            (Some(Place::Infinite), Exponent::Infinite) => {
                Err(Error::Malformed("archimedean exponent must be at most 1".into()))
            }
            (Some(place), Exponent::Finite(e)) => BasePoint::branch(place, e),
        }
    }

    pub fn branch(place: Place, exp: Q) -> Result<BasePoint> {
        if exp.is_negative() {
            return Err(Error::Malformed("negative branch exponent".into()));
        }
        if exp.is_zero() {
            return Ok(BasePoint::Central);
        }
        match place {
            Place::Finite(p) => {
                Place::finite(p)?;
            }
            Place::Infinite if exp > Q::one() => {
                return Err(Error::Malformed("archimedean exponent must be at most 1".into()));
            }
            Place::Infinite => {}
        }
        Ok(BasePoint::Branch { place, exp })
    }

    pub fn place(&self) -> Option<Place> {
        match self {
            BasePoint::Central => None,
            BasePoint::Branch { place, .. } => Some(*place),
            BasePoint::Extreme { p } => Some(Place::Finite(*p)),
        }
    }

    pub fn exponent(&self) -> Exponent {
        match self {
            BasePoint::Central => Exponent::Finite(Q::zero()),
            BasePoint::Branch { exp, .. } => Exponent::Finite(exp.clone()),
            BasePoint::Extreme { .. } => Exponent::Infinite,
        }
    }

    pub fn is_archimedean(&self) -> bool {
        matches!(self, BasePoint::Branch { place: Place::Infinite, .. })
    }
}

impl std::fmt::Display for BasePoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BasePoint::Central => write!(f, "a_0"),
            BasePoint::Branch { place, exp } => write!(f, "a_{place}^{}", fmt_q(exp)),
            BasePoint::Extreme { p } => write!(f, "a~_{p}"),
        }
    }
}

pub fn classify_base_point(x: &BasePoint) -> PointClass {
    match x {
        BasePoint::Central => PointClass::Central,
        BasePoint::Branch { .. } => PointClass::Internal,
        BasePoint::Extreme { .. } => PointClass::Extreme,
    }
}

/// `|f|_x`.
pub fn eval_base_seminorm(f: &Q, x: &BasePoint, prec: Precision) -> Result<NormValue> {
    if f.is_zero() {
        return Ok(NormValue::zero());
    }
    match x {
        BasePoint::Central => Ok(NormValue::one()),
        BasePoint::Extreme { p } => match val(f, *p) {
            Some(v) if v < 0 => Err(Error::NonIntegralAtExtremePoint { p: *p }),
            Some(v) if v > 0 => Ok(NormValue::zero()),
            _ => Ok(NormValue::one()),
        },
        BasePoint::Branch { place, exp } => {
            let a = NormValue::exact(place.abs(f));
            Ok(a.rpow(exp, prec).expect("positive base"))
        }
    }
}

/// `prod_p |f|_p * |f|_inf`, computed exactly over the primes of `f`.
pub fn product_formula_defect(f: &Q) -> Result<NormValue> {
    if f.is_zero() {
        return Err(Error::ZeroInput);
    }
    let mut acc = f.abs();
    for p in support_primes(f) {
        let bp = BigInt::from(p.clone());
        let mut num = f.numer().clone();
        let mut den = f.denom().clone();
        let mut v: i64 = 0;
        while (&num % &bp).is_zero() {
            num /= &bp;
            v += 1;
        }
        while (&den % &bp).is_zero() {
            den /= &bp;
            v -= 1;
        }
        let pq = Q::from_integer(bp);
        acc *= crate::rational::pow_q(&pq, -v);
    }
    Ok(NormValue::exact(acc))
}

/// A compact connected subset of the spectrum.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum BaseCompact {
    /// The arc `[a_place^u, a_place^v]` (u = 0 is the central point).
    Segment { place: Place, u: Exponent, v: Exponent },
    /// Everything except the outer parts `]a_place^{v_place}, end]` of the
    /// listed branches.
    Star { cuts: BTreeMap<Place, Exponent> },
}

impl BaseCompact {
    pub fn segment(place: Place, u: Exponent, v: Exponent) -> Result<BaseCompact> {
        if let Place::Finite(p) = place {
            Place::finite(p)?;
        }
        let bad = |m: &str| Err(Error::Malformed(format!("segment: {m}")));
        if let Exponent::Finite(x) = &u {
            if x.is_negative() {
                return bad("negative endpoint");
            }
        }
        if u > v {
            return bad("u > v");
        }
        if place == Place::Infinite && v > Exponent::Finite(Q::one()) {
            return bad("archimedean segment beyond exponent 1");
        }
        if u.is_zero() && v.is_zero() {
            return Ok(BaseCompact::central());
        }
        Ok(BaseCompact::Segment { place, u, v })
    }

    pub fn star(cuts: BTreeMap<Place, Exponent>) -> Result<BaseCompact> {
        let mut out = BTreeMap::new();
        for (place, v) in cuts {
            if let Place::Finite(p) = place {
                Place::finite(p)?;
            }
            if let Exponent::Finite(x) = &v {
                if x.is_negative() {
                    return Err(Error::Malformed("star: negative cut".into()));
                }
            }
            let len = place.length();
            if v > len {
                return Err(Error::Malformed("star: cut beyond branch length".into()));
            }
            if v != len {
                out.insert(place, v);
            }
        }
        Ok(BaseCompact::Star { cuts: out })
    }

    /// The whole spectrum.
    pub fn whole() -> BaseCompact {
        BaseCompact::Star { cuts: BTreeMap::new() }
    }

    /// `{a_0}`.
    pub fn central() -> BaseCompact {
        BaseCompact::Segment { place: Place::Infinite, u: Exponent::Finite(Q::zero()), v: Exponent::Finite(Q::zero()) }
    }

    /// The singleton `{x}`.
    pub fn point(x: &BasePoint) -> BaseCompact {
        match x {
            BasePoint::Central => BaseCompact::central(),
            _ => BaseCompact::Segment { place: x.place().unwrap(), u: x.exponent(), v: x.exponent() },
        }
    }

    pub fn contains(&self, x: &BasePoint) -> bool {
        match self {
            BaseCompact::Segment { place, u, v } => match x {
                BasePoint::Central => u.is_zero(),
                _ => x.place() == Some(*place) && u <= &x.exponent() && x.exponent() <= *v,
            },
            BaseCompact::Star { cuts } => match x.place() {
                None => true,
                Some(pl) => cuts.get(&pl).is_none_or(|c| x.exponent() <= *c),
            },
        }
    }

    /// Whether some point `a_inf^e` with `e > 0` lies in the compact.
    pub fn is_archimedean(&self) -> bool {
        match self {
            BaseCompact::Segment { place, v, .. } => *place == Place::Infinite && !v.is_zero(),
            BaseCompact::Star { cuts } => cuts.get(&Place::Infinite).is_none_or(|c| !c.is_zero()),
        }
    }

    /// `f` has no pole on the compact: integral at every extreme point it contains.
    pub fn admits(&self, f: &Q) -> bool {
        match self {
            BaseCompact::Segment { place: Place::Finite(p), v: Exponent::Infinite, .. } => is_p_integral(f, *p),
            BaseCompact::Segment { .. } => true,
            BaseCompact::Star { cuts } => {
                if f.is_zero() {
                    return true;
                }
                support_primes(&Q::from_integer(f.denom().clone())).iter().all(|p| {
                    let Ok(p) = u64::try_from(p) else { return false };
                    matches!(cuts.get(&Place::Finite(p)), Some(Exponent::Finite(_)))
                })
            }
        }
    }

    /// Primes `p` whose extreme point lies in a segment compact.
    pub fn segment_extreme_prime(&self) -> Option<u64> {
        match self {
            BaseCompact::Segment { place: Place::Finite(p), v: Exponent::Infinite, .. } => Some(*p),
            _ => None,
        }
    }
}

fn point_at(place: Place, e: &Exponent) -> BasePoint {
    BasePoint::new(Some(place), e.clone()).expect("validated compact")
}

/// `||f||_V` from the endpoint formulas of each case.
pub fn base_norm(f: &Q, v: &BaseCompact, prec: Precision) -> Result<NormValue> {
    if !v.admits(f) {
        return Err(Error::NotInRingOfV(fmt_q(f)));
    }
    if f.is_zero() {
        return Ok(NormValue::zero());
    }
    match v {
        BaseCompact::Segment { place, u, v: hi } => {
            let a = eval_base_seminorm(f, &point_at(*place, u), prec)?;
            match hi {
                // [a^u, a~]: |f|_p^e is nonincreasing in e for integral f.
                Exponent::Infinite => Ok(a),
                _ => Ok(a.max(&eval_base_seminorm(f, &point_at(*place, hi), prec)?, prec)),
            }
        }
        BaseCompact::Star { cuts } => {
            let mut acc = NormValue::one();
            for (place, c) in cuts {
                acc = acc.max(&eval_base_seminorm(f, &point_at(*place, c), prec)?, prec);
            }
            if !cuts.contains_key(&Place::Infinite) {
                acc = acc.max(&NormValue::exact(f.abs()), prec);
            }
            Ok(acc)
        }
    }
}

/// Shilov boundary of a compact.
pub fn shilov_base(v: &BaseCompact) -> Vec<BasePoint> {
    let mut out: Vec<BasePoint> = vec![];
    let mut push = |x: BasePoint| {
        if !out.contains(&x) {
            out.push(x);
        }
    };
    match v {
        BaseCompact::Segment { place, u, v } => match (u, v) {
            (Exponent::Infinite, _) => push(point_at(*place, u)),
            (_, Exponent::Infinite) => push(point_at(*place, u)),
            _ => {
                push(point_at(*place, u));
                push(point_at(*place, v));
            }
        },
        BaseCompact::Star { cuts } => {
            for (place, c) in cuts {
                if let (Place::Finite(_), Exponent::Finite(x)) = (place, c) {
                    if x.is_positive() {
                        push(point_at(*place, c));
                    }
                }
            }
            match cuts.get(&Place::Infinite) {
                Some(c) => push(point_at(Place::Infinite, c)),
                None => push(BasePoint::Branch { place: Place::Infinite, exp: Q::one() }),
            }
            // A branch cut at its root leaves a_0 exposed.
            if cuts.iter().any(|(pl, c)| matches!(pl, Place::Finite(_)) && c.is_zero()) {
                push(BasePoint::Central);
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RingKind {
    /// `Z[1/S]`.
    Integers,
    /// `Z_(p)`.
    Localization,
    /// Completion `Zhat_p`.
    Completion,
    /// `Q_p`.
    PadicField,
    Rationals,
    Reals,
    /// `F_p`.
    ResidueField,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RingLabel {
    pub kind: RingKind,
    pub label: String,
    pub inverted_primes: Vec<u64>,
    pub completion_prime: Option<u64>,
    pub local_prime: Option<u64>,
}

/// Identifies the ring of sections over the compact.
pub fn ring_label(v: &BaseCompact) -> RingLabel {
    let mk = |kind, label: String, inv: Vec<u64>, comp: Option<u64>, loc: Option<u64>| RingLabel {
        kind,
        label,
        inverted_primes: inv,
        completion_prime: comp,
        local_prime: loc,
    };
    match v {
        BaseCompact::Segment { place: Place::Infinite, u, .. } => {
            if u.is_zero() {
                mk(RingKind::Rationals, "Q".into(), vec![], None, None)
            } else {
                mk(RingKind::Reals, "R".into(), vec![], None, None)
            }
        }
        BaseCompact::Segment { place: Place::Finite(p), u, v } => {
            let p = *p;
            match (u.is_zero(), u, v) {
                (_, Exponent::Infinite, _) => mk(RingKind::ResidueField, format!("F_{p}"), vec![], None, Some(p)),
                (true, _, Exponent::Infinite) => mk(RingKind::Localization, format!("Z_({p})"), vec![], None, Some(p)),
                (true, _, _) => mk(RingKind::Rationals, "Q".into(), vec![], None, None),
                (false, _, Exponent::Infinite) => mk(RingKind::Completion, format!("Zhat_{p}"), vec![], Some(p), None),
                (false, _, _) => mk(RingKind::PadicField, format!("Q_{p}"), vec![], Some(p), None),
            }
        }
        BaseCompact::Star { cuts } => {
            let inv: Vec<u64> = cuts
                .iter()
                .filter_map(|(pl, c)| match (pl, c) {
                    (Place::Finite(p), Exponent::Finite(_)) => Some(*p),
                    _ => None,
                })
                .collect();
            let label = if inv.is_empty() {
                "Z".to_string()
            } else {
                format!("Z[1/{}]", inv.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(","))
            };
            mk(RingKind::Integers, label, inv, None, None)
        }
    }
}

/// Small-height rationals in order of height: `a/b` with `1 <= a, b <= h`.
pub fn small_height_rationals(h: i64) -> Vec<Q> {
    let mut out = vec![];
    for height in 1..=h {
        for a in 1..=height {
            for b in 1..=height {
                if a.max(b) == height && num_integer::gcd(a, b) == 1 {
                    out.push(qf(a, b));
                }
            }
        }
    }
    out
}

/// For each Shilov point, a function peaking there and strictly smaller at
/// the other Shilov points, found among small-height rationals.
pub fn minimality_witnesses(v: &BaseCompact, prec: Precision) -> Vec<(BasePoint, Option<Q>)> {
    let gamma = shilov_base(v);
    let mut cands = small_height_rationals(24);
    if let BaseCompact::Star { cuts } = v {
        for pl in cuts.keys() {
            if let Place::Finite(p) = pl {
                for k in 1..6 {
                    cands.push(p_pow(*p, k));
                    cands.push(p_pow(*p, -k));
                }
            }
        }
    }
    gamma
        .iter()
        .map(|g| {
            if gamma.len() == 1 {
                return (g.clone(), Some(q(1)));
            }
            let hit = cands.iter().find(|f| {
                let Ok(norm) = base_norm(f, v, prec) else { return false };
                let Ok(at) = eval_base_seminorm(f, g, prec) else { return false };
                if !at.overlaps(&norm) || norm.certainly_lt(&at) {
                    return false;
                }
                gamma.iter().filter(|x| *x != g).all(|x| {
                    eval_base_seminorm(f, x, prec).is_ok_and(|e| e.certainly_lt(&at))
                })
            });
            (g.clone(), hit.cloned())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(p: u64, e: Q) -> BasePoint {
        BasePoint::branch(Place::Finite(p), e).unwrap()
    }

    #[test]
    fn evaluation_examples() {
        let pr = Precision::default();
        assert_eq!(eval_base_seminorm(&q(12), &pt(2, q(1)), pr).unwrap(), NormValue::exact(qf(1, 4)));
        assert_eq!(eval_base_seminorm(&q(10), &BasePoint::Extreme { p: 5 }, pr).unwrap(), NormValue::zero());
        assert_eq!(
            eval_base_seminorm(&qf(1, 5), &BasePoint::Extreme { p: 5 }, pr),
            Err(Error::NonIntegralAtExtremePoint { p: 5 })
        );
        let s7 = eval_base_seminorm(&q(-7), &BasePoint::branch(Place::Infinite, qf(1, 2)).unwrap(), pr).unwrap();
        assert!(s7.lo() * s7.lo() <= q(7) && s7.hi() * s7.hi() >= q(7));
    }

    #[test]
    fn product_formula_examples() {
        assert_eq!(product_formula_defect(&q(12)).unwrap(), NormValue::one());
        assert_eq!(product_formula_defect(&qf(-5, 6)).unwrap(), NormValue::one());
        assert_eq!(product_formula_defect(&q(0)), Err(Error::ZeroInput));
    }

    #[test]
    fn norm_examples() {
        let pr = Precision::default();
        let seg = BaseCompact::segment(Place::Finite(3), Exponent::Finite(q(1)), Exponent::Infinite).unwrap();
        assert_eq!(base_norm(&q(6), &seg, pr).unwrap(), NormValue::exact(qf(1, 3)));
        let star = BaseCompact::star(
            [(Place::Finite(2), Exponent::Finite(q(1))), (Place::Finite(3), Exponent::Finite(q(1))), (Place::Infinite, Exponent::Finite(q(1)))]
                .into_iter()
                .collect(),
        )
        .unwrap();
        assert_eq!(base_norm(&qf(5, 6), &star, pr).unwrap(), NormValue::exact(q(3)));
        assert!(matches!(base_norm(&qf(1, 5), &star, pr), Err(Error::NotInRingOfV(_))));
    }

    #[test]
    fn shilov_examples() {
        let seg = BaseCompact::segment(Place::Finite(3), Exponent::Finite(qf(1, 2)), Exponent::Finite(q(2))).unwrap();
        assert_eq!(shilov_base(&seg), vec![pt(3, qf(1, 2)), pt(3, q(2))]);
        let seg = BaseCompact::segment(Place::Finite(5), Exponent::Finite(q(1)), Exponent::Infinite).unwrap();
        assert_eq!(shilov_base(&seg), vec![pt(5, q(1))]);
        let star = BaseCompact::star(
            [(Place::Finite(2), Exponent::Finite(qf(1, 3))), (Place::Infinite, Exponent::Finite(qf(1, 2)))].into_iter().collect(),
        )
        .unwrap();
        assert_eq!(
            shilov_base(&star),
            vec![pt(2, qf(1, 3)), BasePoint::branch(Place::Infinite, qf(1, 2)).unwrap()]
        );
    }

    #[test]
    fn ring_labels() {
        let seg = BaseCompact::segment(Place::Finite(2), Exponent::Finite(q(1)), Exponent::Infinite).unwrap();
        assert_eq!(ring_label(&seg).kind, RingKind::Completion);
        let star = BaseCompact::star([(Place::Finite(2), Exponent::Finite(qf(1, 2)))].into_iter().collect()).unwrap();
        let l = ring_label(&star);
        assert_eq!((l.kind, l.inverted_primes), (RingKind::Integers, vec![2]));
        assert_eq!(ring_label(&BaseCompact::whole()).label, "Z");
    }

    #[test]
    fn star_normalizes_full_cuts() {
        let s = BaseCompact::star([(Place::Infinite, Exponent::Finite(q(1))), (Place::Finite(2), Exponent::Infinite)].into_iter().collect())
            .unwrap();
        assert_eq!(s, BaseCompact::whole());
    }
}
