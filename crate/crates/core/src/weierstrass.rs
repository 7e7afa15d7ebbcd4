//! Weierstrass division and preparation, Hensel lifting, resultants and the
//! norms attached to finite covers `A[T]/(G)`.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::base_space::{base_norm, eval_base_seminorm, shilov_base, BaseCompact, BasePoint, Place};
use crate::error::{Error, Result};
use crate::norm::{NormValue, Precision};
use crate::poly::{FpPoly, Poly};
use crate::rational::{fmt_q, mod_inverse, p_pow, pow_q, qi, sym_mod, val, Q};
use crate::series_ring::{norm_annulus, AnnulusSpec, LaurentPoly};

/// Grid used by [`global_threshold`].
pub const THRESHOLD_GRID_BITS: u32 = 16;

/// Division constant: `||Q|| <= C v^{-p} ||F||` and `||R|| <= C ||F||`.
pub const DIVISION_CONSTANT: i64 = 2;

fn grid(k: &BigInt) -> Q {
    Q::new(k.clone(), BigInt::one() << THRESHOLD_GRID_BITS)
}

fn threshold_sum(g: &Poly, v: &BaseCompact, x: &Q, prec: Precision) -> Result<NormValue> {
    let p = g.degree().unwrap_or(0) as i64;
    let mut acc = NormValue::zero();
    for (k, c) in g.coeffs().iter().enumerate().take(p as usize) {
        if c.is_zero() {
            continue;
        }
        acc = acc.add(&base_norm(c, v, prec)?.scale(&pow_q(x, k as i64 - p), prec), prec);
    }
    Ok(acc)
}

/// Least `v` on the dyadic grid with `sum_{k<p} ||g_k||_V v^{k-p} <= 1/2`, certified.
pub fn global_threshold(g: &Poly, v: &BaseCompact, prec: Precision) -> Result<Q> {
    if !g.is_monic() || g.degree().is_none_or(|d| d == 0) {
        return Err(Error::NotMonic);
    }
    let half = Q::new(1.into(), 2.into());
    let ok = |k: &BigInt| -> Result<bool> { Ok(threshold_sum(g, v, &grid(k), prec)?.le_q(&half)) };
    let mut hi = BigInt::one() << THRESHOLD_GRID_BITS;
    while !ok(&hi)? {
        hi <<= 1;
    }
    let mut lo = BigInt::zero();
    // Invariant: ok(hi), and lo is either 0 or fails.
    while &hi - &lo > BigInt::one() {
        let mid: BigInt = (&lo + &hi) >> 1;
        if ok(&mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(grid(&hi))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DivisionCert {
    pub v: Q,
    pub w: Q,
    pub norm_f: NormValue,
    pub norm_q: NormValue,
    pub norm_r: NormValue,
    /// `||Q|| <= 2 v^{-p} ||F||`, certified.
    pub bound_q_ok: bool,
    /// `||R|| <= 2 ||F||`, certified.
    pub bound_r_ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Division {
    pub q: LaurentPoly,
    pub r: LaurentPoly,
    pub cert: DivisionCert,
}

/// Division by a monic polynomial on the disk `|T| <= w` over `V`.
pub fn divide(f: &LaurentPoly, g: &Poly, v: &BaseCompact, w: &Q, prec: Precision) -> Result<Division> {
    if f.has_negative_support() {
        return Err(Error::Malformed("dividend has negative powers".into()));
    }
    let thr = global_threshold(g, v, prec)?;
    if w < &thr {
        return Err(Error::RadiusBelowThreshold { w: fmt_q(w), v: fmt_q(&thr) });
    }
    for c in g.coeffs().iter().chain(f.coeffs().values()) {
        if !v.admits(c) {
            return Err(Error::NotInRingOfV(fmt_q(c)));
        }
    }
    let fp = f.to_poly().expect("nonnegative support");
    let (qp, rp) = fp.divrem(g);
    let (q, r) = match f.trunc() {
        Some(m) => (LaurentPoly::from_poly(&qp).truncate(m), LaurentPoly::from_poly(&rp).truncate(m)),
        None => (LaurentPoly::from_poly(&qp), LaurentPoly::from_poly(&rp)),
    };
    let disk = AnnulusSpec::disk(v.clone(), w.clone())?;
    let norm_f = norm_annulus(f, &disk, prec)?;
    let norm_q = norm_annulus(&q, &disk, prec)?;
    let norm_r = norm_annulus(&r, &disk, prec)?;
    let c = Q::from_integer(DIVISION_CONSTANT.into());
    let p = g.degree().unwrap() as i64;
    let bound_q_ok = norm_q.certainly_le(&norm_f.scale(&(&c * pow_q(&thr, -p)), prec));
    let bound_r_ok = norm_r.certainly_le(&norm_f.scale(&c, prec));
    Ok(Division { q, r, cert: DivisionCert { v: thr, w: w.clone(), norm_f, norm_q, norm_r, bound_q_ok, bound_r_ok } })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LocalRegime {
    /// `g_k = 0` for `k < p`: the iteration stabilizes T-adically.
    Formal,
    /// Small but nonzero `g_k` for `k < p`: convergence in the base norm.
    Analytic,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalDivision {
    pub q: LaurentPoly,
    pub r: LaurentPoly,
    pub regime: LocalRegime,
    /// Radius `s` at which `||A - I|| <= eps`.
    pub radius: Q,
    pub epsilon: NormValue,
    pub iterations: usize,
    /// `||F - A(phi_n)||` along the iteration.
    pub error_norms: Vec<NormValue>,
    /// Each step shrank the error by at most `eps`.
    pub contraction_consistent: bool,
    /// `(Q, R)` is exact (T-adically, or after polishing by long division).
    pub exact: bool,
    /// `||F - Q G - R||` at the contraction radius.
    pub residual: NormValue,
}

fn alpha(phi: &LaurentPoly, p: i64) -> LaurentPoly {
    phi.slice(p, i64::MAX).shift(-p)
}

fn beta(phi: &LaurentPoly, p: i64) -> LaurentPoly {
    phi.slice(i64::MIN, p)
}

const ANALYTIC_ITERATIONS_MIN: usize = 8;
const RADIUS_SEARCH_STEPS: u32 = 64;

/// Division `F = Q G + R` with `deg R < p` for a series `G` whose
/// coefficient `g_p` is a unit and whose lower coefficients are small.
pub fn divide_local_series(
    f: &LaurentPoly,
    g: &LaurentPoly,
    p: i64,
    m: i64,
    ctx: &AnnulusSpec,
    radius: Option<&Q>,
    prec: Precision,
) -> Result<LocalDivision> {
    if p < 0 || m <= p {
        return Err(Error::Malformed("need 0 <= p < m".into()));
    }
    if f.has_negative_support() || g.has_negative_support() {
        return Err(Error::Malformed("series must have nonnegative support".into()));
    }
    let gp = g.coeff(p);
    if gp.is_zero() || !ctx.v.admits(&gp) || !ctx.v.admits(&gp.recip()) {
        return Err(Error::ValuationUndefined(format!("g_{p} is not a unit on the base")));
    }
    let regime = if (0..p).all(|k| g.coeff(k).is_zero()) { LocalRegime::Formal } else { LocalRegime::Analytic };
    let polynomial_divisor = g.trunc().is_none() && g.max_degree() == Some(p);
    // Analytic regime with a degree-p polynomial divisor works without truncation:
    // `A - I` then lowers degrees.
    let work_trunc = match regime {
        LocalRegime::Analytic if polynomial_divisor && f.trunc().is_none() => None,
        _ => Some(f.trunc().map_or(m, |t| t.min(m))),
    };
    let tr = |x: LaurentPoly| match work_trunc {
        Some(k) => x.representative().truncate(k),
        None => x,
    };
    let gn = tr(g.representative().scale(&gp.recip()));
    let h = gn.sub(&LaurentPoly::monomial(Q::one(), p));
    let f = tr(f.representative());

    let eps_at = |s: &Q| -> Result<NormValue> {
        let a = AnnulusSpec::disk(ctx.v.clone(), s.clone())?;
        Ok(norm_annulus(&h.representative(), &a, prec)?.scale(&pow_q(s, -p), prec))
    };
    let (s, eps) = match radius {
        Some(s) => {
            let e = eps_at(s)?;
            if !e.lt_q(&Q::one()) {
                return Err(Error::NoContractionRadiusFound);
            }
            (s.clone(), e)
        }
        None => {
            let half = Q::new(1.into(), 2.into());
            let mut found = None;
            let mut s = ctx.t.clone();
            for _ in 0..RADIUS_SEARCH_STEPS {
                if s.is_zero() {
                    break;
                }
                let e = eps_at(&s)?;
                if e.le_q(&half) {
                    found = Some((s.clone(), e));
                    break;
                }
                s /= Q::from_integer(2.into());
            }
            found.ok_or(Error::NoContractionRadiusFound)?
        }
    };
    let at_s = AnnulusSpec::disk(ctx.v.clone(), s.clone())?;
    let apply = |phi: &LaurentPoly| tr(alpha(phi, p).representative().mul(&gn).add(&beta(phi, p)));

    let max_iter = match regime {
        LocalRegime::Formal => (m + 2) as usize,
        LocalRegime::Analytic => (m as usize).max(ANALYTIC_ITERATIONS_MIN),
    };
    let mut phi = f.clone();
    let mut e = tr(f.sub(&apply(&phi)));
    let mut error_norms = vec![norm_annulus(&e.representative(), &at_s, prec)?];
    let mut iterations = 0;
    while !e.is_zero() && iterations < max_iter {
        phi = tr(phi.add(&e));
        e = tr(f.sub(&apply(&phi)));
        error_norms.push(norm_annulus(&e.representative(), &at_s, prec)?);
        iterations += 1;
    }
    let contraction_consistent =
        error_norms.windows(2).all(|w| w[1].lo() <= eps.mul(&w[0], prec).hi());

    let (qn, r, exact) = if e.is_zero() {
        (alpha(&phi, p), beta(&phi, p), true)
    } else if regime == LocalRegime::Analytic && work_trunc.is_none() {
        let gpoly = gn.to_poly().expect("polynomial divisor");
        let (qq, rr) = f.to_poly().expect("polynomial dividend").divrem(&gpoly);
        (LaurentPoly::from_poly(&qq), LaurentPoly::from_poly(&rr), true)
    } else {
        (alpha(&phi, p), beta(&phi, p), false)
    };
    let q = qn.scale(&gp.recip());
    let q = match (regime, work_trunc) {
        (LocalRegime::Formal, Some(k)) => q.representative().truncate(k - p),
        _ => q,
    };
    let resid = tr(f.sub(&q.representative().mul(&g.representative())).sub(&r));
    let residual = norm_annulus(&resid.representative(), &at_s, prec)?;
    Ok(LocalDivision { q, r, regime, radius: s, epsilon: eps, iterations, error_norms, contraction_consistent, exact, residual })
}

/// Inverse of a power series with invertible constant term, mod `T^k`.
pub fn series_inverse(q: &LaurentPoly, k: i64) -> Result<LaurentPoly> {
    if q.has_negative_support() || q.coeff(0).is_zero() {
        return Err(Error::NotAUnit("constant term vanishes".into()));
    }
    let c = q.coeff(0).recip();
    let mut out: Vec<Q> = vec![c.clone()];
    for n in 1..k {
        let s: Q = (1..=n).map(|i| q.coeff(i) * &out[(n - i) as usize]).sum();
        out.push(-&c * s);
    }
    Ok(LaurentPoly::new(out.into_iter().enumerate().map(|(i, a)| (i as i64, a)).collect(), Some(k)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Preparation {
    pub e: LaurentPoly,
    pub omega: Poly,
    /// `E Omega = G` holds modulo `T^k` (exactly when `None`).
    pub modulus: Option<i64>,
    pub division: LocalDivision,
}

/// `G = E Omega` with `Omega = T^p - R` distinguished of degree `p`.
pub fn prepare(g: &LaurentPoly, p: i64, m: i64, ctx: &AnnulusSpec, radius: Option<&Q>, prec: Precision) -> Result<Preparation> {
    let tp = LaurentPoly::monomial(Q::one(), p);
    let division = divide_local_series(&tp, g, p, m, ctx, radius, prec)?;
    if !division.exact {
        return Err(Error::NoConvergence(division.iterations));
    }
    let omega = tp.sub(&division.r).to_poly().expect("polynomial remainder");
    let (e, modulus) = match division.q.trunc() {
        Some(k) => (series_inverse(&division.q, k)?, Some(k)),
        None => {
            // Analytic regime with a polynomial divisor: Q is the constant 1/g_p.
            if division.q.max_degree() != Some(0) {
                return Err(Error::NotAUnit("quotient is not a constant".into()));
            }
            (LaurentPoly::constant(division.q.coeff(0).recip()), None)
        }
    };
    Ok(Preparation { e, omega, modulus, division })
}

/// Coefficient ring for Hensel lifting.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HenselRing {
    /// `Q[[T]]` modulo `T^m`; the polynomial has series coefficients.
    Series { coeffs: Vec<LaurentPoly>, f0: LaurentPoly, m: i64 },
    /// `Z_p` modulo `p^N`; the polynomial has p-integral coefficients.
    Padic { poly: Poly, p: u64, f0: BigInt, n: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HenselRoot {
    Series(LaurentPoly),
    Padic(BigInt),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HenselLift {
    pub root: HenselRoot,
    /// Order (T-adic or p-adic) of `P(f_n)` along the iteration.
    pub gauges: Vec<i64>,
    /// Order of `P'(f_0)`.
    pub derivative_order: i64,
    pub iterations: usize,
}

const HENSEL_MAX_STEPS: usize = 64;

fn series_eval(coeffs: &[LaurentPoly], x: &LaurentPoly, k: i64) -> LaurentPoly {
    let mut acc = LaurentPoly::zero().truncate(k);
    for c in coeffs.iter().rev() {
        acc = acc.mul(x).add(&c.representative().truncate(k));
    }
    acc
}

fn series_derivative(coeffs: &[LaurentPoly]) -> Vec<LaurentPoly> {
    coeffs.iter().enumerate().skip(1).map(|(i, c)| c.scale(&Q::from_integer((i as i64).into()))).collect()
}

fn order(x: &LaurentPoly) -> i64 {
    x.min_degree().unwrap_or(i64::MAX)
}

fn padic_order(x: &Q, p: u64) -> i64 {
    val(x, p).unwrap_or(i64::MAX)
}

/// Newton iteration for a simple root.
pub fn hensel_lift_root(ring: &HenselRing) -> Result<HenselLift> {
    match ring {
        HenselRing::Series { coeffs, f0, m } => {
            let m = *m;
            let d = series_derivative(coeffs);
            let big = m + order(&series_eval(&d, f0, m + 1)).min(m) + 1;
            let k = order(&series_eval(&d, f0, big));
            let p0 = order(&series_eval(coeffs, f0, big));
            if k >= big || (p0 <= 2 * k) {
                return Err(Error::NotSimpleRoot(format!("ord P(f0) = {p0}, ord P'(f0) = {k}")));
            }
            let work = m + k;
            let mut f = f0.representative().truncate(work);
            let mut gauges = vec![p0.min(work)];
            let mut it = 0;
            loop {
                let pv = series_eval(coeffs, &f, work);
                if pv.is_zero() {
                    break;
                }
                if it >= HENSEL_MAX_STEPS {
                    return Err(Error::NoConvergence(it));
                }
                let dv = series_eval(&d, &f, work);
                let num = pv.representative().shift(-k).truncate(m);
                let den = dv.representative().shift(-k).truncate(m);
                let step = num.mul(&series_inverse(&den, m)?);
                f = f.sub(&step).representative().truncate(m).representative().truncate(work);
                gauges.push(order(&series_eval(coeffs, &f, work)).min(work));
                it += 1;
            }
            Ok(HenselLift { root: HenselRoot::Series(f.representative().truncate(m)), gauges, derivative_order: k, iterations: it })
        }
        HenselRing::Padic { poly, p, f0, n } => {
            let p = *p;
            if !poly.all_p_integral(p) {
                return Err(Error::NonIntegralCoefficients { p });
            }
            let d = poly.derivative();
            let x0 = qi(f0.clone());
            let k = padic_order(&d.eval(&x0), p);
            let p0 = padic_order(&poly.eval(&x0), p);
            if k == i64::MAX || p0 <= 2 * k {
                return Err(Error::NotSimpleRoot(format!("v(P(f0)) = {p0}, v(P'(f0)) = {k}")));
            }
            let n = *n as i64;
            let work: BigInt = p_pow(p, n + k).numer().clone();
            let target: BigInt = p_pow(p, n).numer().clone();
            let mut f = f0.clone();
            let mut gauges = vec![p0];
            let mut it = 0;
            loop {
                let pv = poly.eval(&qi(f.clone()));
                let g = padic_order(&pv, p);
                if g >= n {
                    break;
                }
                if it >= HENSEL_MAX_STEPS {
                    return Err(Error::NoConvergence(it));
                }
                let dv = d.eval(&qi(f.clone()));
                let pk = p_pow(p, -k);
                let num = crate::rational::reduce_mod(&(pv * &pk), &work).expect("p-integral");
                let den = crate::rational::reduce_mod(&(dv * &pk), &work).expect("p-integral");
                let inv = mod_inverse(&den, &work).expect("unit derivative");
                f = ((f - num * inv) % &work + &work) % &work;
                gauges.push(padic_order(&poly.eval(&qi(f.clone())), p));
                it += 1;
            }
            let root = ((f % &target) + &target) % &target;
            Ok(HenselLift { root: HenselRoot::Padic(root), gauges, derivative_order: k, iterations: it })
        }
    }
}

fn poly_mod(f: &Poly, m: &BigInt) -> Poly {
    Poly::new(
        f.coeffs()
            .iter()
            .map(|c| qi(sym_mod(&crate::rational::reduce_mod(c, m).expect("p-integral"), m)))
            .collect(),
    )
}

fn lift_pair(g: &Poly, a: &FpPoly, b: &FpPoly, p: u64, n: u32) -> (Poly, Poly) {
    let (_, s, t) = FpPoly::ext_gcd(a, b);
    let mut aa = a.to_poly();
    let mut bb = b.to_poly();
    for k in 1..n {
        let pk = p_pow(p, k as i64);
        let diff = g.sub(&aa.mul(&bb)).scale(&pk.recip());
        let e = FpPoly::reduce(&diff, p).expect("integral defect");
        // b da + a db = e with deg da < deg a.
        let da = t.mul(&e).divrem(a).1;
        let db = e.sub(&b.mul(&da)).divrem(a).0;
        aa = aa.add(&da.to_poly().scale(&pk));
        bb = bb.add(&db.to_poly().scale(&pk));
    }
    let _ = s;
    let m = p_pow(p, n as i64).numer().clone();
    (poly_mod(&aa, &m), poly_mod(&bb, &m))
}

/// Lifts a coprime monic factorization modulo `p` to one modulo `p^N`.
pub fn hensel_factor_lift(g: &Poly, p: u64, factors: &[Poly], n: u32) -> Result<Vec<Poly>> {
    if !g.is_monic() {
        return Err(Error::NotMonic);
    }
    if factors.is_empty() || n == 0 {
        return Err(Error::Malformed("need at least one factor and N >= 1".into()));
    }
    let red = |f: &Poly| FpPoly::reduce(f, p).ok_or(Error::NonIntegralCoefficients { p });
    let gr = red(g)?;
    let fr: Vec<FpPoly> = factors.iter().map(red).collect::<Result<_>>()?;
    for (f, x) in fr.iter().zip(factors) {
        if !x.is_monic() || f.degree() != x.degree() {
            return Err(Error::NotMonic);
        }
    }
    let prod = fr.iter().skip(1).fold(fr[0].clone(), |a, b| a.mul(b));
    if prod != gr {
        return Err(Error::ProductMismatch);
    }
    for i in 0..fr.len() {
        for j in i + 1..fr.len() {
            if fr[i].gcd(&fr[j]).degree() != Some(0) {
                return Err(Error::NotCoprime);
            }
        }
    }
    let m = p_pow(p, n as i64).numer().clone();
    let mut out = vec![];
    let mut rest_target = poly_mod(g, &m);
    for i in 0..fr.len() {
        if i + 1 == fr.len() {
            out.push(poly_mod(&rest_target, &m));
            break;
        }
        let rest = fr[i + 1..].iter().skip(1).fold(fr[i + 1].clone(), |a, b| a.mul(b));
        let (a, b) = lift_pair(&rest_target, &fr[i], &rest, p, n);
        out.push(a);
        rest_target = b;
    }
    Ok(out)
}

/// Sylvester resultant, `Res(f, g) = lc(f)^{deg g} prod_{f(a)=0} g(a)`.
pub fn resultant(f: &Poly, g: &Poly) -> Q {
    let (Some(m), Some(n)) = (f.degree(), g.degree()) else {
        return Q::zero();
    };
    let size = m + n;
    if size == 0 {
        return Q::one();
    }
    let mut a = vec![vec![Q::zero(); size]; size];
    // Rows hold descending coefficients, shifted.
    for i in 0..n {
        for (j, c) in f.coeffs().iter().rev().enumerate() {
            a[i][i + j] = c.clone();
        }
    }
    for i in 0..m {
        for (j, c) in g.coeffs().iter().rev().enumerate() {
            a[n + i][i + j] = c.clone();
        }
    }
    determinant(a)
}

/// Exact determinant by fraction-field Gaussian elimination.
pub fn determinant(mut a: Vec<Vec<Q>>) -> Q {
    let n = a.len();
    let mut det = Q::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return Q::zero();
        };
        if piv != col {
            a.swap(piv, col);
            det = -det;
        }
        let pv = a[col][col].clone();
        det *= &pv;
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let factor = &a[r][col] / &pv;
            for c in col..n {
                let d = &factor * &a[col][c];
                a[r][c] -= d;
            }
        }
    }
    det
}

/// An exactly known root of `g`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExactRoot {
    Rational(Q),
    Gaussian { re: Q, im: Q },
}

impl ExactRoot {
    fn parts(&self) -> (Q, Q) {
        match self {
            ExactRoot::Rational(a) => (a.clone(), Q::zero()),
            ExactRoot::Gaussian { re, im } => (re.clone(), im.clone()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LagrangeReport {
    pub lhs: NormValue,
    pub d: NormValue,
    pub rhs: NormValue,
    pub holds: bool,
}

fn abs_at(x: &Q, place: Place) -> Q {
    place.abs(x)
}

fn gaussian_abs(re: &Q, im: &Q, prec: Precision) -> NormValue {
    let m2 = re * re + im * im;
    NormValue::exact(m2).rpow(&Q::new(1.into(), 2.into()), prec).expect("nonnegative")
}

/// `sum |a_i| r^i <= D max |f(alpha_i)|` with `D = d (2r)^{d^2-d} / |Res(g, g')|`.
pub fn lagrange_bound_report(f: &Poly, g: &Poly, roots: &[ExactRoot], r: &Q, place: Place, prec: Precision) -> Result<LagrangeReport> {
    if !g.is_monic() {
        return Err(Error::NotMonic);
    }
    let d = g.degree().unwrap_or(0);
    if f.degree().is_some_and(|k| k >= d) {
        return Err(Error::Malformed("deg f must be below deg g".into()));
    }
    let res = resultant(g, &g.derivative());
    if res.is_zero() {
        return Err(Error::NotSeparable);
    }
    if roots.len() != d {
        return Err(Error::RootsMismatch);
    }
    for (i, x) in roots.iter().enumerate() {
        let (a, b) = x.parts();
        if g.eval_gaussian(&a, &b) != (Q::zero(), Q::zero()) || roots[..i].contains(x) {
            return Err(Error::RootsMismatch);
        }
    }
    let archimedean = place == Place::Infinite;
    if !archimedean && roots.iter().any(|x| matches!(x, ExactRoot::Gaussian { im, .. } if !im.is_zero())) {
        return Err(Error::Malformed("Gaussian roots need the archimedean place".into()));
    }
    let root_abs = |a: &Q, b: &Q| {
        if archimedean {
            gaussian_abs(a, b, prec)
        } else {
            NormValue::exact(abs_at(a, place))
        }
    };
    let rr = NormValue::exact(r.clone());
    for x in roots {
        let (a, b) = x.parts();
        if !root_abs(&a, &b).certainly_le(&rr) {
            return Err(Error::RadiusTooSmall);
        }
    }
    let lhs = NormValue::exact(f.coeffs().iter().enumerate().map(|(i, c)| abs_at(c, place) * pow_q(r, i as i64)).sum());
    let dd = Q::from_integer((d as i64).into()) * pow_q(&(r * Q::from_integer(2.into())), (d * d - d) as i64)
        / abs_at(&res, place);
    let dval = NormValue::exact(dd.clone());
    let mut mx = NormValue::zero();
    for x in roots {
        let (a, b) = x.parts();
        let (fa, fb) = f.eval_gaussian(&a, &b);
        mx = mx.max(&root_abs(&fa, &fb), prec);
    }
    let rhs = mx.scale(&dd, prec);
    let holds = lhs.certainly_le(&rhs);
    Ok(LagrangeReport { lhs, d: dval, rhs, holds })
}

/// `A[T]/(G)` with the radius `w` used for residual norms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientRing {
    pub g: Poly,
    pub u: BaseCompact,
    pub w: Q,
}

impl QuotientRing {
    pub fn new(g: Poly, u: BaseCompact, w: Q, prec: Precision) -> Result<Self> {
        let v = global_threshold(&g, &u, prec)?;
        if w < v {
            return Err(Error::RadiusBelowThreshold { w: fmt_q(&w), v: fmt_q(&v) });
        }
        Ok(QuotientRing { g, u, w })
    }

    pub fn degree(&self) -> usize {
        self.g.degree().unwrap_or(0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sandwich {
    /// Canonical representative of degree `< p`.
    pub representative: Poly,
    pub div_norm: NormValue,
    /// `||F_0||_{U,w}`, an upper bound for the residual norm.
    pub upper: NormValue,
    /// `upper / C_0`, a lower bound for the residual norm.
    pub lower: NormValue,
    /// `div_norm <= max_i w^{-i} C_0 lower`.
    pub consistent: bool,
}

/// Two-sided bounds on the residual norm of a class in `A[T]/(G)`.
pub fn residual_norm_sandwich(ring: &QuotientRing, f: &Poly, prec: Precision) -> Result<Sandwich> {
    let rep = f.divrem(&ring.g).1;
    let mut div_norm = NormValue::zero();
    for c in rep.coeffs() {
        div_norm = div_norm.max(&base_norm(c, &ring.u, prec)?, prec);
    }
    let disk = AnnulusSpec::disk(ring.u.clone(), ring.w.clone())?;
    let upper = norm_annulus(&LaurentPoly::from_poly(&rep), &disk, prec)?;
    let c0 = Q::from_integer(DIVISION_CONSTANT.into());
    let lower = upper.scale(&c0.recip(), prec);
    let wmax = (0..ring.degree().max(1))
        .map(|i| pow_q(&ring.w, -(i as i64)))
        .max()
        .unwrap_or_else(Q::one);
    let consistent = div_norm.certainly_le(&lower.scale(&(wmax * c0), prec)) || div_norm.is_zero();
    Ok(Sandwich { representative: rep, div_norm, upper, lower, consistent })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RgCheck {
    pub holds: bool,
    pub resultant: Q,
    pub gamma: Vec<(BasePoint, NormValue)>,
    pub m_u: NormValue,
}

/// Lower bound of `|Res(G, G')|` on the Shilov boundary of `U`.
pub fn condition_rg_check(u: &BaseCompact, g: &Poly, prec: Precision) -> Result<RgCheck> {
    if !g.is_monic() {
        return Err(Error::NotMonic);
    }
    let res = resultant(g, &g.derivative());
    let mut gamma = vec![];
    let mut m_u: Option<NormValue> = None;
    for b in shilov_base(u) {
        let n = eval_base_seminorm(&res, &b, prec)?;
        m_u = Some(match m_u {
            None => n.clone(),
            Some(x) => x.min(&n, prec),
        });
        gamma.push((b, n));
    }
    let m_u = m_u.unwrap_or_else(NormValue::zero);
    let holds = m_u.lo().is_positive();
    Ok(RgCheck { holds, resultant: res, gamma, m_u })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base_space::Exponent;
    use crate::rational::{q, qf};
    use crate::series_ring::central_annulus;

    fn lp(c: &[i64]) -> LaurentPoly {
        LaurentPoly::from_poly(&Poly::from_ints(c))
    }

    #[test]
    fn threshold_examples() {
        let pr = Precision::default();
        let mz = BaseCompact::whole();
        let v = global_threshold(&Poly::from_ints(&[2, 2, 1]), &mz, pr).unwrap();
        assert!(v > q(4) && v <= q(5));
        let before = &v - grid(&BigInt::one());
        assert!(threshold_sum(&Poly::from_ints(&[2, 2, 1]), &mz, &before, pr).unwrap().hi() > &qf(1, 2));
        assert_eq!(global_threshold(&Poly::from_ints(&[-10, 1]), &mz, pr).unwrap(), q(20));
        assert_eq!(global_threshold(&Poly::from_ints(&[0, 0, 1]), &mz, pr).unwrap(), grid(&BigInt::one()));
        assert_eq!(global_threshold(&Poly::from_ints(&[1, 2]), &mz, pr), Err(Error::NotMonic));
    }

    #[test]
    fn division_example() {
        let pr = Precision::default();
        let d = divide(&lp(&[0, 0, 0, 1]), &Poly::from_ints(&[2, 2, 1]), &BaseCompact::whole(), &q(5), pr).unwrap();
        assert_eq!(d.q, lp(&[-2, 1]));
        assert_eq!(d.r, lp(&[4, 2]));
        assert_eq!(d.cert.norm_q, NormValue::exact(q(7)));
        assert_eq!(d.cert.norm_r, NormValue::exact(q(14)));
        assert!(d.cert.bound_q_ok && d.cert.bound_r_ok);
        assert!(matches!(
            divide(&lp(&[0, 1]), &Poly::from_ints(&[2, 2, 1]), &BaseCompact::whole(), &q(4), pr),
            Err(Error::RadiusBelowThreshold { .. })
        ));
    }

    #[test]
    fn local_division_examples() {
        let pr = Precision::default();
        let ctx = central_annulus(q(0), qf(1, 2));
        let d = divide_local_series(&lp(&[0, 0, 1]), &lp(&[0, 0, 1, 1]), 2, 5, &ctx, None, pr).unwrap();
        assert_eq!(d.q, lp(&[1, -1, 1]).truncate(3));
        assert!(d.r.is_zero() && d.exact);
        let d = divide_local_series(&lp(&[1]), &lp(&[0, 1, 1]), 1, 6, &ctx, None, pr).unwrap();
        assert_eq!(d.r.representative(), lp(&[1]));
        let p = prepare(&lp(&[0, 0, 1, 1]), 2, 6, &ctx, None, pr).unwrap();
        assert_eq!(p.omega, Poly::from_ints(&[0, 0, 1]));
        assert_eq!(p.e, lp(&[1, 1]).truncate(4));
        let p = prepare(&lp(&[0, 1, 2]), 1, 6, &ctx, None, pr).unwrap();
        assert_eq!(p.omega, Poly::from_ints(&[0, 1]));
        assert_eq!(p.e, lp(&[1, 2]).truncate(5));
    }

    #[test]
    fn analytic_division_polishes_to_long_division() {
        let pr = Precision::default();
        let v = BaseCompact::segment(Place::Finite(2), Exponent::Finite(q(4)), Exponent::Infinite).unwrap();
        let ctx = AnnulusSpec::disk(v, q(1)).unwrap();
        let g = lp(&[2, 1]);
        let d = divide_local_series(&lp(&[3, 1, 1]), &g, 1, 4, &ctx, None, pr).unwrap();
        assert_eq!(d.regime, LocalRegime::Analytic);
        assert!(d.exact && d.contraction_consistent);
        let (qq, rr) = Poly::from_ints(&[3, 1, 1]).divrem(&Poly::from_ints(&[2, 1]));
        assert_eq!((d.q, d.r), (LaurentPoly::from_poly(&qq), LaurentPoly::from_poly(&rr)));
    }

    #[test]
    fn hensel_examples() {
        let s = HenselRing::Series { coeffs: vec![lp(&[-1, -1]), lp(&[]), lp(&[1])], f0: lp(&[1]), m: 4 };
        let HenselRoot::Series(r) = hensel_lift_root(&s).unwrap().root else { panic!() };
        let expect = LaurentPoly::from_pairs(&[(0, q(1)), (1, qf(1, 2)), (2, qf(-1, 8)), (3, qf(1, 16))]).truncate(4);
        assert_eq!(r, expect);
        let pa = HenselRing::Padic { poly: Poly::from_ints(&[-2, 0, 1]), p: 7, f0: 3.into(), n: 3 };
        assert_eq!(hensel_lift_root(&pa).unwrap().root, HenselRoot::Padic(108.into()));
        let bad = HenselRing::Padic { poly: Poly::from_ints(&[-2, 0, 1]), p: 7, f0: 2.into(), n: 3 };
        assert!(matches!(hensel_lift_root(&bad), Err(Error::NotSimpleRoot(_))));
    }

    #[test]
    fn factor_lift_examples() {
        let f = hensel_factor_lift(&Poly::from_ints(&[1, 0, 1]), 5, &[Poly::from_ints(&[-2, 1]), Poly::from_ints(&[2, 1])], 2).unwrap();
        assert_eq!(f, vec![Poly::from_ints(&[-7, 1]), Poly::from_ints(&[7, 1])]);
        let f = hensel_factor_lift(&Poly::from_ints(&[-2, 0, 1]), 7, &[Poly::from_ints(&[-3, 1]), Poly::from_ints(&[3, 1])], 3).unwrap();
        assert_eq!(f, vec![Poly::from_ints(&[-108, 1]), Poly::from_ints(&[108, 1])]);
        let f = hensel_factor_lift(&Poly::from_ints(&[-1, 0, 1]), 5, &[Poly::from_ints(&[-1, 1]), Poly::from_ints(&[1, 1])], 3).unwrap();
        assert_eq!(f, vec![Poly::from_ints(&[-1, 1]), Poly::from_ints(&[1, 1])]);
        assert_eq!(
            hensel_factor_lift(&Poly::from_ints(&[1, 0, 1]), 5, &[Poly::from_ints(&[-1, 1]), Poly::from_ints(&[2, 1])], 2),
            Err(Error::ProductMismatch)
        );
    }

    #[test]
    fn resultant_examples() {
        assert_eq!(resultant(&Poly::from_ints(&[-1, 0, 1]), &Poly::from_ints(&[0, 2])), q(-4));
        assert_eq!(resultant(&Poly::from_ints(&[0, 1]), &Poly::from_ints(&[0, 1])), q(0));
        assert_eq!(resultant(&Poly::from_ints(&[-3, 1]), &Poly::from_ints(&[-5, 1])), q(-2));
    }

    #[test]
    fn lagrange_examples() {
        let pr = Precision::default();
        let g = Poly::from_ints(&[-1, 0, 1]);
        let roots = [ExactRoot::Rational(q(1)), ExactRoot::Rational(q(-1))];
        let r = lagrange_bound_report(&Poly::from_ints(&[0, 1]), &g, &roots, &q(1), Place::Infinite, pr).unwrap();
        assert_eq!((r.lhs, r.d, r.rhs.clone()), (NormValue::exact(q(1)), NormValue::exact(q(2)), NormValue::exact(q(2))));
        let r = lagrange_bound_report(&Poly::from_ints(&[1, 1]), &g, &roots, &q(1), Place::Infinite, pr).unwrap();
        assert!(r.holds && r.rhs == NormValue::exact(q(4)));
        let gi = Poly::from_ints(&[1, 0, 1]);
        let groots = [ExactRoot::Gaussian { re: q(0), im: q(1) }, ExactRoot::Gaussian { re: q(0), im: q(-1) }];
        assert!(lagrange_bound_report(&Poly::from_ints(&[3, 2]), &gi, &groots, &q(1), Place::Infinite, pr).unwrap().holds);
    }

    #[test]
    fn sandwich_examples() {
        let pr = Precision::default();
        let ring = QuotientRing::new(Poly::from_ints(&[2, 2, 1]), BaseCompact::whole(), q(5), pr).unwrap();
        let s = residual_norm_sandwich(&ring, &Poly::from_ints(&[0, 1]), pr).unwrap();
        assert_eq!((s.div_norm, s.upper), (NormValue::one(), NormValue::exact(q(5))));
        let s = residual_norm_sandwich(&ring, &Poly::from_ints(&[0, 0, 1]), pr).unwrap();
        assert_eq!((s.div_norm, s.upper), (NormValue::exact(q(2)), NormValue::exact(q(12))));
        assert!(s.consistent);
    }

    #[test]
    fn rg_examples() {
        let pr = Precision::default();
        let u = BaseCompact::segment(Place::Finite(2), Exponent::Finite(q(1)), Exponent::Infinite).unwrap();
        let c = condition_rg_check(&u, &Poly::from_ints(&[1, 0, 1]), pr).unwrap();
        assert!(c.holds);
        assert_eq!(c.m_u, NormValue::exact(qf(1, 4)));
        assert!(!condition_rg_check(&u, &Poly::from_ints(&[0, 0, 1]), pr).unwrap().holds);
        let star = BaseCompact::star([(Place::Infinite, Exponent::Finite(q(1)))].into_iter().collect()).unwrap();
        let c = condition_rg_check(&star, &Poly::from_ints(&[-2, 0, 1]), pr).unwrap();
        assert!(c.holds);
        assert_eq!(c.m_u, NormValue::exact(q(8)));
    }
}
