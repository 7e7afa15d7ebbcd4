//! Cyclic covers `S^n = p^n + T`: p-adic roots of unity, the binomial
//! n-th root series, the factorization of the cover, and the permutation
//! data used to glue covers along a finite group.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::base_space::Place;
use crate::error::{Error, Result};
use crate::norm::{NormValue, Precision};
use crate::poly::Poly;
use crate::rational::{is_prime_u64, lcm_all, p_pow, pow_mod_u64, qi, val, Q};
use crate::series_ring::LaurentPoly;
use crate::weierstrass::{hensel_lift_root, HenselRing, HenselRoot};

/// An element of `Z_p` known modulo `p^N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PadicApprox {
    pub p: u64,
    pub n: u32,
    residue: BigInt,
}

impl PadicApprox {
    pub fn new(p: u64, n: u32, x: &BigInt) -> Self {
        let m = PadicApprox::modulus_of(p, n);
        PadicApprox { p, n, residue: x.mod_floor(&m) }
    }

    fn modulus_of(p: u64, n: u32) -> BigInt {
        p_pow(p, n as i64).numer().clone()
    }

    pub fn modulus(&self) -> BigInt {
        PadicApprox::modulus_of(self.p, self.n)
    }

    pub fn residue(&self) -> &BigInt {
        &self.residue
    }

    /// The same element at lower precision.
    pub fn reduce(&self, n: u32) -> Self {
        PadicApprox::new(self.p, n.min(self.n), &self.residue)
    }

    pub fn pow(&self, k: u64) -> Self {
        PadicApprox { p: self.p, n: self.n, residue: self.residue.modpow(&BigInt::from(k), &self.modulus()) }
    }

    pub fn is_one(&self) -> bool {
        self.residue.is_one() || (self.n == 0)
    }
}

/// Least prime `p <= bound` with `p = 1 mod n`.
pub fn find_prime_congruent(n: u64, bound: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::Malformed("n must be positive".into()));
    }
    (2..=bound).find(|&p| p % n == 1 % n && is_prime_u64(p)).ok_or(Error::NoneFound(bound))
}

fn prime_divisors(mut n: u64) -> Vec<u64> {
    let mut out = vec![];
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Hensel lift of the least element of exact order `n` modulo `p`.
pub fn primitive_root_of_unity(n: u64, p: u64, prec: u32) -> Result<PadicApprox> {
    if !is_prime_u64(p) {
        return Err(Error::NotPrime(p));
    }
    if n == 0 || prec == 0 {
        return Err(Error::Malformed("need n >= 1 and N >= 1".into()));
    }
    if n == 1 {
        return Ok(PadicApprox::new(p, prec, &BigInt::one()));
    }
    if (p - 1) % n != 0 {
        return Err(Error::CongruenceFails);
    }
    let qs = prime_divisors(n);
    let a = (2..p)
        .find(|&a| pow_mod_u64(a, n, p) == 1 && qs.iter().all(|q| pow_mod_u64(a, n / q, p) != 1))
        .ok_or(Error::CongruenceFails)?;
    let mut c = vec![0i64; n as usize + 1];
    c[0] = -1;
    c[n as usize] = 1;
    let ring = HenselRing::Padic { poly: Poly::from_ints(&c), p, f0: a.into(), n: prec };
    let HenselRoot::Padic(z) = hensel_lift_root(&ring)?.root else { unreachable!() };
    Ok(PadicApprox::new(p, prec, &z))
}

/// `binom(1/n, i)` for `i < m`.
pub fn binomial_coefficients(n: u64, m: usize) -> Vec<Q> {
    let a = Q::new(1.into(), BigInt::from(n));
    let mut out = Vec::with_capacity(m);
    let mut c = Q::one();
    for i in 0..m {
        out.push(c.clone());
        c = c * (&a - Q::from_integer(BigInt::from(i))) / Q::from_integer(BigInt::from(i + 1));
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegralityReport {
    pub p: u64,
    /// Least `v_p(C_{1/n}^i)` over `i < m`.
    pub min_valuation: i64,
    pub integral: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinomialSeries {
    pub g: LaurentPoly,
    /// `g^n = 1 + Z mod Z^m`.
    pub power_ok: bool,
    pub integrality: Option<IntegralityReport>,
}

/// `g = sum_{i<m} C_{1/n}^i Z^i`, an n-th root of `1 + Z`.
pub fn binomial_root_series(n: u64, m: usize, p: Option<u64>) -> Result<BinomialSeries> {
    if n == 0 || m == 0 {
        return Err(Error::Malformed("need n >= 1 and m >= 1".into()));
    }
    if let Some(p) = p {
        if !is_prime_u64(p) {
            return Err(Error::NotPrime(p));
        }
        if n % p == 0 {
            return Err(Error::PDividesN);
        }
    }
    let cs = binomial_coefficients(n, m);
    let g = LaurentPoly::new(cs.iter().cloned().enumerate().map(|(i, c)| (i as i64, c)).collect(), Some(m as i64));
    // With g(0) = 1, g^n = 1 + Z is equivalent to n (1 + Z) g' = g.
    let nq = Q::from_integer(BigInt::from(n));
    let power_ok = cs[0].is_one()
        && (0..m.saturating_sub(1)).all(|i| {
            let lhs = &nq * (&cs[i + 1] * Q::from_integer(BigInt::from(i + 1)) + &cs[i] * Q::from_integer(BigInt::from(i)));
            lhs == cs[i]
        });
    let integrality = p.map(|p| {
        let min_valuation = cs.iter().filter_map(|c| val(c, p)).min().unwrap_or(0);
        IntegralityReport { p, min_valuation, integral: min_valuation >= 0 }
    });
    Ok(BinomialSeries { g, power_ok, integrality })
}

/// Data of the cover `S^n = p^n + T` at finite precision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverDescriptor {
    pub n: u64,
    pub p: u64,
    pub zeta: PadicApprox,
    pub m: usize,
    pub g: LaurentPoly,
}

impl CoverDescriptor {
    pub fn build(n: u64, p: u64, m: usize, prec: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::Malformed("n must be positive".into()));
        }
        let zeta = primitive_root_of_unity(n, p, prec)?;
        let g = binomial_root_series(n, m, Some(p))?.g;
        Ok(CoverDescriptor { n, p, zeta, m, g })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverDefect {
    /// Exponent of `S`.
    pub s_power: usize,
    /// Exponent of `T`.
    pub t_power: i64,
    pub defect: Q,
    /// The defect must have `v_p >= required`.
    pub required: i64,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverSplitReport {
    /// `prod_j (S - p zeta^j g(p^{-n} T))` as coefficients in `S`.
    pub product: Vec<LaurentPoly>,
    pub defects: Vec<CoverDefect>,
    pub all_zero: bool,
}

/// Checks `prod_j (S - p zeta^j g(p^{-n}T)) = S^n - p^n - T` modulo
/// `T^m` and, in the coefficient of `S^{n-k} T^i`, modulo `p^{N + k - n i}`.
pub fn cyclic_cover_split(desc: &CoverDescriptor) -> Result<CoverSplitReport> {
    let n = desc.n as usize;
    let p = desc.p;
    let m = desc.m as i64;
    let prec = desc.zeta.n as i64;
    let pn = p_pow(p, -(n as i64));
    let scaled = LaurentPoly::new(
        desc.g.coeffs().iter().map(|(i, c)| (*i, c * crate::rational::pow_q(&pn, *i))).collect(),
        Some(m),
    );
    let pq = Q::from_integer(BigInt::from(p));
    // Product as a polynomial in S, lowest power first.
    let mut prod: Vec<LaurentPoly> = vec![LaurentPoly::one().truncate(m)];
    let mut zj = BigInt::one();
    for _ in 0..n {
        let y = scaled.scale(&(&pq * qi(zj.clone())));
        let mut next = vec![LaurentPoly::zero().truncate(m); prod.len() + 1];
        for (k, c) in prod.iter().enumerate() {
            next[k + 1] = next[k + 1].add(c);
            next[k] = next[k].sub(&c.mul(&y));
        }
        prod = next;
        zj = (zj * desc.zeta.residue()).mod_floor(&desc.zeta.modulus());
    }
    let mut target = vec![LaurentPoly::zero().truncate(m); n + 1];
    target[n] = LaurentPoly::one().truncate(m);
    target[0] = LaurentPoly::from_pairs(&[(0, -p_pow(p, n as i64)), (1, -Q::one())]).truncate(m);
    let mut defects = vec![];
    for (s_power, (a, b)) in prod.iter().zip(&target).enumerate() {
        let k = (n - s_power) as i64;
        let diff = a.sub(b);
        for i in 0..m {
            let d = diff.coeff(i);
            let required = prec + k - (n as i64) * i;
            let ok = d.is_zero() || val(&d, p).unwrap() >= required;
            if !d.is_zero() || !ok {
                defects.push(CoverDefect { s_power, t_power: i, defect: d, required, ok });
            }
        }
    }
    let all_zero = defects.iter().all(|d| d.ok);
    if !all_zero {
        return Err(Error::PrecisionInsufficient);
    }
    Ok(CoverSplitReport { product: prod, defects, all_zero })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EisensteinWitness {
    pub f: LaurentPoly,
    /// Least common denominator of the truncated coefficients.
    pub denominator: BigInt,
    /// Lower bound on the convergence radius at each place (`None`: no
    /// nonconstant term, any radius).
    pub radii: BTreeMap<Place, Option<NormValue>>,
}

/// Truncated implicit function `P(T, f(T)) = 0` with radius witnesses.
pub fn eisenstein_witness(p: &[LaurentPoly], f0: &LaurentPoly, m: i64, places: &[Place], prec: Precision) -> Result<EisensteinWitness> {
    let ring = HenselRing::Series { coeffs: p.to_vec(), f0: f0.clone(), m };
    let lift = hensel_lift_root(&ring).map_err(|e| Error::NotLiftable(e.to_string()))?;
    let HenselRoot::Series(f) = lift.root else { unreachable!() };
    let denominator = lcm_all(f.coeffs().values().map(|c| c.denom()));
    let mut radii = BTreeMap::new();
    for place in places {
        let mut worst: Option<NormValue> = None;
        for (i, c) in f.coeffs() {
            if *i < 1 {
                continue;
            }
            let a = NormValue::exact(place.abs(c)).rpow(&Q::new(1.into(), BigInt::from(*i)), prec).expect("nonnegative");
            worst = Some(match worst {
                None => a,
                Some(w) => w.max(&a, prec),
            });
        }
        let r = worst.map(|w| w.recip(prec).expect("nonzero coefficient"));
        radii.insert(*place, r);
    }
    Ok(EisensteinWitness { f, denominator, radii })
}

/// Multiplication table of a finite group, elements `0..n` internally.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupTable {
    n: usize,
    table: Vec<Vec<usize>>,
    identity: usize,
}

impl GroupTable {
    /// Builds from a 1-based table and checks the group axioms.
    pub fn from_one_based(table: &[Vec<usize>]) -> Result<Self> {
        let n = table.len();
        let bad = |m: &str| Err(Error::InvalidGroupTable(m.to_string()));
        if n == 0 || table.iter().any(|r| r.len() != n) {
            return bad("table must be square and nonempty");
        }
        if table.iter().flatten().any(|&x| x == 0 || x > n) {
            return bad("entries must lie in [1, n]");
        }
        let t: Vec<Vec<usize>> = table.iter().map(|r| r.iter().map(|x| x - 1).collect()).collect();
        GroupTable::from_zero_based(t)
    }

    pub fn from_zero_based(t: Vec<Vec<usize>>) -> Result<Self> {
        let n = t.len();
        let bad = |m: &str| Err(Error::InvalidGroupTable(m.to_string()));
        let Some(identity) = (0..n).find(|&e| (0..n).all(|x| t[e][x] == x && t[x][e] == x)) else {
            return bad("no identity");
        };
        for a in 0..n {
            if !(0..n).any(|b| t[a][b] == identity && t[b][a] == identity) {
                return bad("missing inverse");
            }
            for b in 0..n {
                for c in 0..n {
                    if t[t[a][b]][c] != t[a][t[b][c]] {
                        return bad("not associative");
                    }
                }
            }
        }
        Ok(GroupTable { n, table: t, identity })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn one_based(&self) -> Vec<Vec<usize>> {
        self.table.iter().map(|r| r.iter().map(|x| x + 1).collect()).collect()
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != self.identity {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn cyclic(n: usize) -> Self {
        GroupTable::from_zero_based((0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect()).expect("group")
    }

    pub fn direct_product(g: &GroupTable, h: &GroupTable) -> Self {
        let n = g.n * h.n;
        let t = (0..n)
            .map(|x| (0..n).map(|y| g.mul(x / h.n, y / h.n) * h.n + h.mul(x % h.n, y % h.n)).collect())
            .collect();
        GroupTable::from_zero_based(t).expect("group")
    }

    /// Dihedral group of order `2k`: `r^a s^b` stored as `a + k b`.
    pub fn dihedral(k: usize) -> Self {
        let n = 2 * k;
        let t = (0..n)
            .map(|x| {
                (0..n)
                    .map(|y| {
                        let (a, b) = (x % k, x / k);
                        let (c, d) = (y % k, y / k);
                        // r^a s^b r^c s^d = r^{a + (-1)^b c} s^{b+d}
                        let e = if b == 0 { (a + c) % k } else { (a + k - c) % k };
                        e + k * ((b + d) % 2)
                    })
                    .collect()
            })
            .collect();
        GroupTable::from_zero_based(t).expect("group")
    }

    /// Quaternion group, elements `+-1, +-i, +-j, +-k` as `sign*4 + unit`.
    pub fn quaternion() -> Self {
        // unit products: (unit, sign flip)
        let unit = |a: usize, b: usize| -> (usize, bool) {
            match (a, b) {
                (0, x) | (x, 0) => (x, false),
                (x, y) if x == y => (0, true),
                (1, 2) => (3, false),
                (2, 3) => (1, false),
                (3, 1) => (2, false),
                (2, 1) => (3, true),
                (3, 2) => (1, true),
                (1, 3) => (2, true),
                _ => unreachable!(),
            }
        };
        let t = (0..8)
            .map(|x| {
                (0..8)
                    .map(|y| {
                        let (u, flip) = unit(x % 4, y % 4);
                        let s = (x / 4 + y / 4 + flip as usize) % 2;
                        s * 4 + u
                    })
                    .collect()
            })
            .collect();
        GroupTable::from_zero_based(t).expect("group")
    }

    pub fn symmetric3() -> Self {
        GroupTable::dihedral(3)
    }
}

/// Stored tables of every order up to 8 used by the checks.
pub fn group_library() -> Vec<(String, GroupTable)> {
    let mut out: Vec<(String, GroupTable)> = (1..=8).map(|n| (format!("Z{n}"), GroupTable::cyclic(n))).collect();
    let c2 = GroupTable::cyclic(2);
    let c4 = GroupTable::cyclic(4);
    let v4 = GroupTable::direct_product(&c2, &c2);
    out.push(("Z2xZ2".into(), v4.clone()));
    out.push(("Z2xZ4".into(), GroupTable::direct_product(&c2, &c4)));
    out.push(("Z2xZ2xZ2".into(), GroupTable::direct_product(&v4, &c2)));
    out.push(("S3".into(), GroupTable::symmetric3()));
    out.push(("D4".into(), GroupTable::dihedral(4)));
    out.push(("Q8".into(), GroupTable::quaternion()));
    out
}

pub fn named_group(name: &str) -> Option<GroupTable> {
    group_library().into_iter().find(|(n, _)| n.eq_ignore_ascii_case(name)).map(|(_, g)| g)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupCoverData {
    pub n_i: usize,
    pub d_i: usize,
    /// Coset representatives, 1-based.
    pub reps: Vec<usize>,
    /// `sigma(u n_i + v) = a_u g_i^{v-1}`, as a 1-based list of images.
    pub sigma: Vec<usize>,
}

/// Left cosets of `<g_i>` (element `i`, 1-based) and the induced numbering.
pub fn group_cover_data(g: &GroupTable, i: usize) -> Result<GroupCoverData> {
    if i == 0 || i > g.n {
        return Err(Error::Malformed(format!("element index {i} out of range")));
    }
    let gi = i - 1;
    let n_i = g.element_order(gi);
    let d_i = g.n / n_i;
    let powers: Vec<usize> = std::iter::successors(Some(g.identity), |&x| Some(g.mul(x, gi))).take(n_i).collect();
    let mut covered = vec![false; g.n];
    let mut reps = vec![];
    let mut sigma = vec![];
    for a in 0..g.n {
        if covered[a] {
            continue;
        }
        reps.push(a + 1);
        for &h in &powers {
            let x = g.mul(a, h);
            covered[x] = true;
            sigma.push(x + 1);
        }
    }
    debug_assert_eq!(reps.len(), d_i);
    Ok(GroupCoverData { n_i, d_i, reps, sigma })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MuReport {
    /// `alpha_h(j)` with `h g_j = g_{alpha_h(j)}`, 1-based.
    pub map: Vec<Vec<usize>>,
    pub injective: bool,
    pub homomorphism: bool,
}

/// Left regular representation of the group.
pub fn mu_homomorphism(g: &GroupTable) -> MuReport {
    let alpha: Vec<Vec<usize>> = (0..g.n).map(|h| (0..g.n).map(|j| g.mul(h, j)).collect()).collect();
    let compose = |a: &[usize], b: &[usize]| -> Vec<usize> { b.iter().map(|&x| a[x]).collect() };
    let homomorphism = (0..g.n).all(|a| (0..g.n).all(|b| alpha[g.mul(a, b)] == compose(&alpha[a], &alpha[b])));
    let mut seen = alpha.clone();
    seen.sort();
    seen.dedup();
    let injective = seen.len() == g.n;
    let map = alpha.iter().map(|r| r.iter().map(|x| x + 1).collect()).collect();
    MuReport { map, injective, homomorphism }
}

/// `v_p(C_{1/n}^i) >= 0` for all `i < m`, from exact valuations.
pub fn binomial_integral(n: u64, p: u64, m: usize) -> bool {
    binomial_coefficients(n, m).iter().all(|c| val(c, p).is_none_or(|v| v >= 0))
}

/// `zeta^n = 1` and `zeta^k != 1 mod p` for `0 < k < n`.
pub fn is_primitive(zeta: &PadicApprox, n: u64) -> bool {
    zeta.pow(n).is_one() && (1..n).all(|k| !zeta.reduce(1).pow(k).is_one())
}

/// Radius lower bound as a plain rational (its lower endpoint), positive.
pub fn radius_lower(r: &NormValue) -> Q {
    let lo = r.lo().clone();
    if lo.is_positive() { lo } else { Q::zero() }
}
