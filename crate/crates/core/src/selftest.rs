//! Seeded invariant suites behind `arithline selftest`.
//!
//! Each suite draws random instances from a ChaCha stream, so a fixed seed
//! reproduces the same report.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::affine_line::{eval_line_seminorm, flow, LinePoint};
use crate::base_space::{base_norm, eval_base_seminorm, product_formula_defect, shilov_base, BaseCompact, BasePoint, Exponent, Place};
use crate::cousin_cartan::{cartan_factorize, split_rational, LaurentSplit, SeriesMatrix, SplitSystem};
use crate::covers_galois::{binomial_root_series, cyclic_cover_split, group_library, mu_homomorphism, CoverDescriptor};
use crate::error::{Error, Result};
use crate::norm::{NormValue, Precision};
use crate::poly::Poly;
use crate::rational::{p_pow, q, qf, Q};
use crate::series_ring::{AnnulusSpec, LaurentPoly};
use crate::weierstrass::{divide, global_threshold, hensel_lift_root, HenselRing, HenselRoot};

pub const SUITES: [&str; 6] = ["norms", "division", "hensel", "cousin", "cartan", "covers"];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteReport {
    pub suite: String,
    pub passed: usize,
    pub failed: usize,
    pub first_counterexample: Option<String>,
}

impl SuiteReport {
    pub fn ok(&self) -> bool {
        self.failed == 0
    }
}

struct Tally {
    report: SuiteReport,
}

impl Tally {
    fn new(name: &str) -> Self {
        Tally { report: SuiteReport { suite: name.into(), passed: 0, failed: 0, first_counterexample: None } }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if ok {
            self.report.passed += 1;
        } else {
            self.report.failed += 1;
            if self.report.first_counterexample.is_none() {
                self.report.first_counterexample = Some(what());
            }
        }
    }

    /// An error counts as a failure.
    fn check_result(&mut self, r: Result<bool>, what: impl FnOnce() -> String) {
        match r {
            Ok(ok) => self.check(ok, what),
            Err(e) => self.check(false, || format!("{}: {e}", what())),
        }
    }
}

/// Runs one suite, or every suite for `"all"`.
pub fn run_selftest(suite: &str, seed: u64, prec: Precision) -> Result<Vec<SuiteReport>> {
    let names: Vec<&str> = match suite {
        "all" => SUITES.to_vec(),
        s if SUITES.contains(&s) => vec![s],
        s => return Err(Error::UnknownSuite(s.into())),
    };
    Ok(names
        .into_iter()
        .map(|name| {
            // Per-suite streams keep suites independent of each other.
            let offset = SUITES.iter().position(|s| *s == name).unwrap_or(0) as u64;
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9).wrapping_add(offset));
            match name {
                "norms" => norms(&mut rng, prec),
                "division" => division(&mut rng, prec),
                "hensel" => hensel(&mut rng),
                "cousin" => cousin(&mut rng, prec),
                "cartan" => cartan(&mut rng, prec),
                _ => covers(&mut rng),
            }
        })
        .collect())
}

fn rand_q(rng: &mut ChaCha8Rng, bound: i64) -> Q {
    qf(rng.gen_range(-bound..=bound), rng.gen_range(1..=bound))
}

fn rand_nonzero(rng: &mut ChaCha8Rng, bound: i64) -> Q {
    loop {
        let x = rand_q(rng, bound);
        if !x.is_zero() {
            return x;
        }
    }
}

const PRIMES: [u64; 4] = [2, 3, 5, 7];

fn norms(rng: &mut ChaCha8Rng, prec: Precision) -> SuiteReport {
    let mut t = Tally::new("norms");
    for _ in 0..100 {
        let f = rand_nonzero(rng, 10_000);
        t.check_result(product_formula_defect(&f).map(|d| d == NormValue::one()), || format!("product formula at {f}"));
    }
    for _ in 0..100 {
        let p = PRIMES[rng.gen_range(0..4)];
        let x = BasePoint::branch(Place::Finite(p), q(rng.gen_range(1..=3))).expect("valid point");
        let (f, g) = (rand_q(rng, 500), rand_q(rng, 500));
        let r = (|| {
            let fg = eval_base_seminorm(&(&f * &g), &x, prec)?;
            let prod = eval_base_seminorm(&f, &x, prec)?.mul(&eval_base_seminorm(&g, &x, prec)?, prec);
            let sum = eval_base_seminorm(&(&f + &g), &x, prec)?;
            let mx = eval_base_seminorm(&f, &x, prec)?.max(&eval_base_seminorm(&g, &x, prec)?, prec);
            Ok(fg == prod && sum.certainly_le(&mx))
        })();
        t.check_result(r, || format!("axioms at {x} with f={f}, g={g}"));
    }
    for _ in 0..50 {
        let p = PRIMES[rng.gen_range(0..4)];
        let eps = q(rng.gen_range(1..=3));
        let x = LinePoint::um(BasePoint::branch(Place::Finite(p), q(1)).expect("valid point"), rand_q(rng, 9), qf(rng.gen_range(1..=4), 2))
            .expect("valid point");
        let f = Poly::new((0..rng.gen_range(1..=4)).map(|_| rand_q(rng, 20)).collect());
        let r = (|| {
            let lhs = eval_line_seminorm(&f, &flow(&x, &eps)?, prec)?;
            let rhs = eval_line_seminorm(&f, &x, prec)?.rpow(&eps, prec).ok_or(Error::ZeroInput)?;
            Ok(lhs == rhs)
        })();
        t.check_result(r, || format!("flow law at {x:?}, eps={eps}"));
    }
    for _ in 0..50 {
        let p = Place::Finite(PRIMES[rng.gen_range(0..4)]);
        let v = BaseCompact::segment(p, Exponent::Finite(qf(rng.gen_range(0..=2), 2)), Exponent::Finite(q(2))).expect("valid segment");
        let f = rand_nonzero(rng, 300);
        let r = (|| {
            let n = base_norm(&f, &v, prec)?;
            let vals = shilov_base(&v).iter().map(|x| eval_base_seminorm(&f, x, prec)).collect::<Result<Vec<_>>>()?;
            Ok(n == NormValue::max_all(&vals, prec))
        })();
        t.check_result(r, || format!("Shilov maximum for f={f} on {v:?}"));
    }
    t.report
}

fn division(rng: &mut ChaCha8Rng, prec: Precision) -> SuiteReport {
    let mut t = Tally::new("division");
    let compacts = [BaseCompact::whole(), BaseCompact::central()];
    for _ in 0..100 {
        let p = rng.gen_range(1..=4);
        let mut g: Vec<Q> = (0..p).map(|_| q(rng.gen_range(-50..=50))).collect();
        g.push(Q::one());
        let g = Poly::new(g);
        let f = Poly::new((0..rng.gen_range(1..=9)).map(|_| q(rng.gen_range(-50..=50))).collect());
        let v = &compacts[rng.gen_range(0..2)];
        let r = (|| {
            let w = global_threshold(&g, v, prec)? * qf(rng.gen_range(100..=200), 100);
            let d = divide(&LaurentPoly::from_poly(&f), &g, v, &w, prec)?;
            let (qp, rp) = (d.q.to_poly().ok_or(Error::ZeroInput)?, d.r.to_poly().ok_or(Error::ZeroInput)?);
            let recon = qp.mul(&g).add(&rp) == f;
            let deg_ok = rp.degree().is_none_or(|k| k < p);
            Ok(recon && deg_ok && d.cert.bound_q_ok && d.cert.bound_r_ok)
        })();
        t.check_result(r, || format!("divide F={f:?} by G={g:?}"));
    }
    t.report
}

fn hensel(rng: &mut ChaCha8Rng) -> SuiteReport {
    let mut t = Tally::new("hensel");
    for _ in 0..50 {
        let p = [3u64, 5, 7, 11, 13][rng.gen_range(0..5)];
        // A square with a nonzero root mod p, so the root is simple.
        let a0 = rng.gen_range(1..p) as i64;
        let c = a0 * a0 + p as i64 * rng.gen_range(0..20);
        let n = rng.gen_range(1..=12u32);
        let poly = Poly::from_ints(&[-c, 0, 1]);
        let r = hensel_lift_root(&HenselRing::Padic { poly, p, f0: BigInt::from(a0), n }).map(|lift| match lift.root {
            HenselRoot::Padic(x) => {
                let m = p_pow(p, n as i64).numer().clone();
                ((&x * &x - BigInt::from(c)) % m).is_zero()
            }
            HenselRoot::Series(_) => false,
        });
        t.check_result(r, || format!("sqrt({c}) mod {p}^{n}"));
    }
    for _ in 0..20 {
        let k = rng.gen_range(2..=4);
        let m = rng.gen_range(8..=32);
        // X^k - (1 + c T) near X = 1.
        let c = rand_nonzero(rng, 5);
        let mut coeffs = vec![LaurentPoly::from_pairs(&[(0, -Q::one()), (1, -c.clone())])];
        coeffs.extend((1..k).map(|_| LaurentPoly::zero()));
        coeffs.push(LaurentPoly::one());
        let r = hensel_lift_root(&HenselRing::Series { coeffs, f0: LaurentPoly::one(), m }).map(|lift| match lift.root {
            HenselRoot::Series(x) => x.pow(k as u32).truncate(m).eq_mod(&LaurentPoly::from_pairs(&[(0, Q::one()), (1, c.clone())]), m),
            HenselRoot::Padic(_) => false,
        });
        t.check_result(r, || format!("{k}-th root of 1 + ({c})T mod T^{m}"));
    }
    t.report
}

fn cousin(rng: &mut ChaCha8Rng, prec: Precision) -> SuiteReport {
    let mut t = Tally::new("cousin");
    for i in 0..200 {
        let place = if i % 4 == 3 { Place::Infinite } else { Place::Finite(PRIMES[i % 3]) };
        let a = rand_q(rng, 5000);
        let r = SplitSystem::new(place, Q::one(), None)
            .and_then(|sys| split_rational(&a, &sys, prec))
            .map(|s| &s.a_minus - &s.a_plus == a && s.sides_ok && s.bounds_ok);
        t.check_result(r, || format!("split of {a} at {place}"));
    }
    t.report
}

fn cartan(rng: &mut ChaCha8Rng, prec: Precision) -> SuiteReport {
    let mut t = Tally::new("cartan");
    let tol = p_pow(2, -40);
    for _ in 0..20 {
        // 1 + small Laurent terms, with norm at most 1/18 on {a_2^1} x [1/2, 2].
        let mut terms = vec![(0i64, Q::one())];
        for k in [-2i64, -1, 1, 2] {
            if rng.gen_bool(0.6) {
                terms.push((k, qf(rng.gen_range(-3..=3), 1) * p_pow(2, 7 + k.abs())));
            }
        }
        let a = LaurentPoly::from_pairs(&terms);
        let r = (|| {
            let v = BaseCompact::point(&BasePoint::branch(Place::Finite(2), Q::one())?);
            let sp = LaurentSplit(AnnulusSpec::new(v, qf(1, 2), q(2))?);
            let m = SeriesMatrix::new(vec![vec![a.clone()]])?;
            let res = cartan_factorize(&m, &sp, 40, &tol, prec)?;
            Ok(res.residual.le_q(&tol) && res.sides_ok && res.bound_4d_ok && res.decay_ok)
        })();
        t.check_result(r, || format!("Cartan factorization of {a}"));
    }
    t.report
}

fn covers(rng: &mut ChaCha8Rng) -> SuiteReport {
    let mut t = Tally::new("covers");
    for n in 1..=8u64 {
        let m = rng.gen_range(8..=40);
        t.check_result(binomial_root_series(n, m, None).map(|b| b.power_ok), || format!("g^{n} = 1+Z mod Z^{m}"));
    }
    for (n, p) in [(2u64, 3u64), (2, 5), (3, 7), (4, 5)] {
        let r = CoverDescriptor::build(n, p, 5, 24).and_then(|d| cyclic_cover_split(&d)).map(|r| r.all_zero);
        t.check_result(r, || format!("cover split n={n}, p={p}"));
    }
    for (name, g) in group_library() {
        let m = mu_homomorphism(&g);
        t.check(m.injective && m.homomorphism, || format!("mu on {name}"));
    }
    t.report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_suites_pass_and_are_deterministic() {
        let a = run_selftest("all", 0, Precision::default()).unwrap();
        assert!(a.iter().all(|r| r.ok()), "{a:?}");
        assert_eq!(a, run_selftest("all", 0, Precision::default()).unwrap());
        assert!(run_selftest("norms", 42, Precision::default()).unwrap()[0].ok());
    }

    #[test]
    fn unknown_suite() {
        assert_eq!(run_selftest("unknown", 1, Precision::default()), Err(Error::UnknownSuite("unknown".into())));
    }
}
