//! Points of the affine line over Z: fiber data over a base point,
//! evaluation of polynomials, and the flow `x -> x^eps`.

use num_traits::{One, Signed, Zero};

use crate::base_space::{eval_base_seminorm, BasePoint, Place};
use crate::error::{Error, Result};
use crate::norm::{NormValue, Precision};
use crate::poly::{rational_roots, FpPoly, Poly};
use crate::rational::{exact_rpow, Q};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Fiber {
    /// `eta_{alpha,r}`: the sup-norm of the disk of center `alpha`, radius `r`.
    UmDisk { alpha: Q, r: Q },
    /// `eta_{P,r}`: `|F| = r^{v_P(F)}` on a trivially valued fiber.
    TrivClosed { p: Poly, r: Q },
    /// `eta_r` with `r > 1` on a trivially valued fiber.
    TrivOuter { r: Q },
    /// Evaluation at `re + i im` on an archimedean fiber.
    Arch { re: Q, im: Q },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinePoint {
    pub base: BasePoint,
    pub fiber: Fiber,
}

/// Bounded search for a good reduction prime certifying irreducibility.
const IRRED_PRIME_BOUND: u64 = 400;

fn check_irreducible_q(p: &Poly) -> Result<()> {
    match p.degree() {
        None | Some(0) => Err(Error::NotIrreducible),
        Some(1) => Ok(()),
        Some(d) => {
            if !rational_roots(p).is_empty() {
                return Err(Error::NotIrreducible);
            }
            if d <= 3 {
                return Ok(());
            }
            let certified = (2..IRRED_PRIME_BOUND).filter(|&l| crate::rational::is_prime_u64(l)).any(|l| {
                FpPoly::reduce(p, l).is_some_and(|r| r.degree() == Some(d) && r.is_irreducible())
            });
            if certified {
                Ok(())
            } else {
                Err(Error::IrreducibilityNotCertified)
            }
        }
    }
}

fn reduce_checked(f: &Poly, p: u64) -> Result<FpPoly> {
    FpPoly::reduce(f, p).ok_or(Error::NonIntegralCoefficients { p })
}

impl LinePoint {
    /// Validates compatibility of the fiber with the base point.
    pub fn new(base: BasePoint, fiber: Fiber) -> Result<LinePoint> {
        let inc = |m: &str| Err(Error::IncompatiblePoint(m.to_string()));
        match (&base, &fiber) {
            (BasePoint::Branch { place: Place::Infinite, .. }, Fiber::Arch { .. }) => {}
            (_, Fiber::Arch { .. }) => return inc("archimedean fiber over a non-archimedean base"),
            (BasePoint::Branch { place: Place::Infinite, .. }, _) => {
                return inc("archimedean base needs an archimedean fiber")
            }
            (_, Fiber::UmDisk { r, .. }) => {
                if r.is_negative() {
                    return Err(Error::Malformed("negative radius".into()));
                }
            }
            (BasePoint::Branch { .. }, _) => return inc("trivially valued fiber over an internal point"),
            (BasePoint::Central, Fiber::TrivClosed { p, r }) => {
                if r.is_negative() || r > &Q::one() {
                    return Err(Error::Malformed("radius must lie in [0, 1]".into()));
                }
                if !p.is_monic() {
                    return Err(Error::NotMonic);
                }
                check_irreducible_q(p)?;
            }
            (BasePoint::Extreme { p: prime }, Fiber::TrivClosed { p, r }) => {
                if r.is_negative() || r > &Q::one() {
                    return Err(Error::Malformed("radius must lie in [0, 1]".into()));
                }
                let red = reduce_checked(p, *prime)?;
                if red.degree() != p.degree() || !red.coeffs().last().is_some_and(|&c| c == 1) {
                    return Err(Error::NotMonic);
                }
                if !red.is_irreducible() {
                    return Err(Error::NotIrreducible);
                }
            }
            (_, Fiber::TrivOuter { r }) => {
                if r <= &Q::one() {
                    return Err(Error::Malformed("outer radius must exceed 1".into()));
                }
            }
        }
        Ok(LinePoint { base, fiber })
    }

    pub fn um(base: BasePoint, alpha: Q, r: Q) -> Result<LinePoint> {
        LinePoint::new(base, Fiber::UmDisk { alpha, r })
    }
}

fn pow_radius(r: &Q, k: u32) -> Q {
    num_traits::pow(r.clone(), k as usize)
}

/// `|F|_x`.
pub fn eval_line_seminorm(f: &Poly, x: &LinePoint, prec: Precision) -> Result<NormValue> {
    match &x.fiber {
        Fiber::UmDisk { alpha, r } => {
            if let BasePoint::Extreme { p } = x.base {
                if !f.all_p_integral(p) {
                    return Err(Error::NonIntegralCoefficients { p });
                }
            }
            let c = f.taylor_shift(alpha);
            let mut acc = NormValue::zero();
            for (k, ck) in c.iter().enumerate() {
                if ck.is_zero() {
                    continue;
                }
                let a = eval_base_seminorm(ck, &x.base, prec).map_err(|e| match e {
                    Error::NonIntegralAtExtremePoint { p } => Error::NonIntegralCoefficients { p },
                    e => e,
                })?;
                acc = acc.max(&a.scale(&pow_radius(r, k as u32), prec), prec);
            }
            Ok(acc)
        }
        Fiber::TrivClosed { p, r } => {
            let v = match x.base {
                BasePoint::Extreme { p: prime } => {
                    let fr = reduce_checked(f, prime)?;
                    if fr.is_zero() {
                        return Ok(NormValue::zero());
                    }
                    fr.valuation_at(&reduce_checked(p, prime)?)
                }
                _ => {
                    if f.is_zero() {
                        return Ok(NormValue::zero());
                    }
                    f.valuation_at(p)
                }
            };
            Ok(NormValue::exact(pow_radius(r, v)))
        }
        Fiber::TrivOuter { r } => {
            let d = match x.base {
                BasePoint::Extreme { p } => reduce_checked(f, p)?.degree(),
                _ => f.degree(),
            };
            Ok(match d {
                None => NormValue::zero(),
                Some(d) => NormValue::exact(pow_radius(r, d as u32)),
            })
        }
        Fiber::Arch { re, im } => {
            let BasePoint::Branch { exp, .. } = &x.base else {
                return Err(Error::IncompatiblePoint("archimedean fiber".into()));
            };
            let (a, b) = f.eval_gaussian(re, im);
            let m2 = &a * &a + &b * &b;
            Ok(NormValue::exact(m2).rpow(&(exp / Q::from_integer(2.into())), prec).expect("nonnegative"))
        }
    }
}

/// The flow `x -> x^eps`.
pub fn flow(x: &LinePoint, eps: &Q) -> Result<LinePoint> {
    if !eps.is_positive() {
        return Err(Error::FlowOutOfDomain("exponent must be positive".into()));
    }
    let base = match &x.base {
        BasePoint::Branch { place, exp } => {
            let e = exp * eps;
            if *place == Place::Infinite && e > Q::one() {
                return Err(Error::FlowOutOfDomain(format!("archimedean exponent {e} exceeds 1")));
            }
            BasePoint::Branch { place: *place, exp: e }
        }
        b => b.clone(),
    };
    let rp = |r: &Q| exact_rpow(r, eps).ok_or(Error::IrrationalRadius);
    let fiber = match &x.fiber {
        Fiber::UmDisk { alpha, r } => Fiber::UmDisk { alpha: alpha.clone(), r: rp(r)? },
        Fiber::TrivClosed { p, r } => Fiber::TrivClosed { p: p.clone(), r: rp(r)? },
        Fiber::TrivOuter { r } => Fiber::TrivOuter { r: rp(r)? },
        Fiber::Arch { re, im } => Fiber::Arch { re: re.clone(), im: im.clone() },
    };
    Ok(LinePoint { base, fiber })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qf};

    fn a(p: u64, e: i64) -> BasePoint {
        BasePoint::branch(Place::Finite(p), q(e)).unwrap()
    }

    #[test]
    fn evaluation_examples() {
        let pr = Precision::default();
        let x = LinePoint::um(a(2, 1), q(0), q(1)).unwrap();
        assert_eq!(eval_line_seminorm(&Poly::from_ints(&[4, 2, 1]), &x, pr).unwrap(), NormValue::one());

        let t = Poly::from_ints(&[0, 1]);
        let x = LinePoint::new(BasePoint::Central, Fiber::TrivClosed { p: t.clone(), r: qf(1, 2) }).unwrap();
        let f = Poly::from_ints(&[0, 0, 0, 1, 1]);
        assert_eq!(eval_line_seminorm(&f, &x, pr).unwrap(), NormValue::exact(qf(1, 8)));

        let x = LinePoint::new(BasePoint::Extreme { p: 2 }, Fiber::TrivClosed { p: t, r: qf(1, 2) }).unwrap();
        assert_eq!(eval_line_seminorm(&Poly::from_ints(&[0, 2, 1]), &x, pr).unwrap(), NormValue::exact(qf(1, 4)));
    }

    #[test]
    fn flow_examples() {
        let pr = Precision::default();
        let x = LinePoint::um(a(2, 1), q(0), qf(1, 2)).unwrap();
        let y = flow(&x, &q(2)).unwrap();
        assert_eq!(y, LinePoint::um(a(2, 2), q(0), qf(1, 4)).unwrap());
        let f = Poly::from_ints(&[-2, 1]);
        assert_eq!(eval_line_seminorm(&f, &x, pr).unwrap(), NormValue::exact(qf(1, 2)));
        assert_eq!(eval_line_seminorm(&f, &y, pr).unwrap(), NormValue::exact(qf(1, 4)));
        assert_eq!(flow(&x, &q(1)).unwrap(), x);
        let z = LinePoint::new(BasePoint::Central, Fiber::TrivClosed { p: Poly::from_ints(&[0, 1]), r: qf(1, 2) }).unwrap();
        assert_eq!(
            flow(&z, &q(3)).unwrap().fiber,
            Fiber::TrivClosed { p: Poly::from_ints(&[0, 1]), r: qf(1, 8) }
        );
        assert_eq!(flow(&x, &qf(1, 2)), Err(Error::IrrationalRadius));
    }

    #[test]
    fn compatibility_is_enforced() {
        assert!(LinePoint::new(BasePoint::Central, Fiber::Arch { re: q(0), im: q(0) }).is_err());
        assert!(LinePoint::new(a(3, 1), Fiber::TrivOuter { r: q(2) }).is_err());
        let reducible = Poly::from_ints(&[1, 0, 1]);
        assert_eq!(
            LinePoint::new(BasePoint::Extreme { p: 5 }, Fiber::TrivClosed { p: reducible, r: qf(1, 2) }),
            Err(Error::NotIrreducible)
        );
    }
}
