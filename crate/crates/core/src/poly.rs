//! Dense univariate polynomials over Q and over prime fields.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::rational::{is_p_integral, q, reduce_mod, Q};

/// Polynomial over Q, coefficients in ascending degree, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    c: Vec<Q>,
}

impl Poly {
    pub fn new(mut c: Vec<Q>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        Poly { c }
    }

    pub fn from_ints(c: &[i64]) -> Self {
        Poly::new(c.iter().map(|&x| q(x)).collect())
    }

    pub fn zero() -> Self {
        Poly { c: vec![] }
    }

    pub fn one() -> Self {
        Poly { c: vec![Q::one()] }
    }

    pub fn constant(a: Q) -> Self {
        Poly::new(vec![a])
    }

    pub fn monomial(a: Q, k: usize) -> Self {
        let mut c = vec![Q::zero(); k + 1];
        c[k] = a;
        Poly::new(c)
    }

    /// `T - a`.
    pub fn linear_root(a: &Q) -> Self {
        Poly::new(vec![-a.clone(), Q::one()])
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.c
    }

    pub fn coeff(&self, k: usize) -> Q {
        self.c.get(k).cloned().unwrap_or_else(Q::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn lc(&self) -> Q {
        self.c.last().cloned().unwrap_or_else(Q::zero)
    }

    pub fn is_monic(&self) -> bool {
        self.c.last().is_some_and(|x| x.is_one())
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let n = self.c.len().max(o.c.len());
        Poly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        let n = self.c.len().max(o.c.len());
        Poly::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }

    pub fn neg(&self) -> Poly {
        Poly { c: self.c.iter().map(|x| -x).collect() }
    }

    pub fn scale(&self, a: &Q) -> Poly {
        Poly::new(self.c.iter().map(|x| x * a).collect())
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![Q::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Poly::new(c)
    }

    pub fn pow(&self, k: u32) -> Poly {
        (0..k).fold(Poly::one(), |acc, _| acc.mul(self))
    }

    /// Euclidean division by a nonzero divisor.
    pub fn divrem(&self, d: &Poly) -> (Poly, Poly) {
        assert!(!d.is_zero(), "division by the zero polynomial");
        let dd = d.c.len() - 1;
        let lc = d.lc();
        let mut r = self.c.clone();
        if r.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut quo = vec![Q::zero(); r.len() - dd];
        for i in (0..quo.len()).rev() {
            let t = &r[i + dd] / &lc;
            if !t.is_zero() {
                for (j, dj) in d.c.iter().enumerate() {
                    r[i + j] -= &t * dj;
                }
            }
            quo[i] = t;
        }
        r.truncate(dd);
        (Poly::new(quo), Poly::new(r))
    }

    pub fn eval(&self, x: &Q) -> Q {
        self.c.iter().rev().fold(Q::zero(), |acc, a| acc * x + a)
    }

    /// Value at the Gaussian rational `re + i im`, as `(re, im)`.
    pub fn eval_gaussian(&self, re: &Q, im: &Q) -> (Q, Q) {
        let (mut ar, mut ai) = (Q::zero(), Q::zero());
        for a in self.c.iter().rev() {
            let nr = &ar * re - &ai * im + a;
            let ni = &ar * im + &ai * re;
            ar = nr;
            ai = ni;
        }
        (ar, ai)
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(self.c.iter().enumerate().skip(1).map(|(i, a)| a * q(i as i64)).collect())
    }

    /// Coefficients `c_k` with `F(T) = sum c_k (T - alpha)^k`.
    pub fn taylor_shift(&self, alpha: &Q) -> Vec<Q> {
        let mut c = self.c.clone();
        let n = c.len();
        for i in 0..n {
            for j in (i..n.saturating_sub(1)).rev() {
                let t = &c[j + 1] * alpha;
                c[j] += t;
            }
        }
        c
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        self.scale(&self.lc().recip())
    }

    pub fn gcd(&self, o: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.divrem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Multiplicity of `p` as a factor (`p` nonconstant, `self` nonzero).
    pub fn valuation_at(&self, p: &Poly) -> u32 {
        let mut f = self.clone();
        let mut k = 0;
        loop {
            let (quo, r) = f.divrem(p);
            if !r.is_zero() {
                return k;
            }
            f = quo;
            k += 1;
        }
    }

    pub fn all_p_integral(&self, p: u64) -> bool {
        self.c.iter().all(|a| is_p_integral(a, p))
    }
}

/// Polynomial over `F_p`, ascending coefficients in `[0, p)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FpPoly {
    pub p: u64,
    c: Vec<u64>,
}

fn mm(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn inv_mod(a: u64, p: u64) -> u64 {
    crate::rational::pow_mod_u64(a, p - 2, p)
}

impl FpPoly {
    pub fn new(p: u64, mut c: Vec<u64>) -> Self {
        for x in c.iter_mut() {
            *x %= p;
        }
        while c.last() == Some(&0) {
            c.pop();
        }
        FpPoly { p, c }
    }

    /// Reduction of a p-integral polynomial; `None` otherwise.
    pub fn reduce(f: &Poly, p: u64) -> Option<Self> {
        let m = BigInt::from(p);
        let c = f
            .coeffs()
            .iter()
            .map(|a| reduce_mod(a, &m).and_then(|r| r.to_u64()))
            .collect::<Option<Vec<u64>>>()?;
        Some(FpPoly::new(p, c))
    }

    pub fn to_poly(&self) -> Poly {
        Poly::new(self.c.iter().map(|&x| q(x as i64)).collect())
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn x(p: u64) -> Self {
        FpPoly::new(p, vec![0, 1])
    }

    pub fn sub(&self, o: &FpPoly) -> FpPoly {
        let n = self.c.len().max(o.c.len());
        let g = |v: &Vec<u64>, i: usize| v.get(i).copied().unwrap_or(0);
        FpPoly::new(self.p, (0..n).map(|i| (g(&self.c, i) + self.p - g(&o.c, i)) % self.p).collect())
    }

    pub fn mul(&self, o: &FpPoly) -> FpPoly {
        if self.is_zero() || o.is_zero() {
            return FpPoly::new(self.p, vec![]);
        }
        let p = self.p;
        let mut c = vec![0u64; self.c.len() + o.c.len() - 1];
        for (i, &a) in self.c.iter().enumerate() {
            for (j, &b) in o.c.iter().enumerate() {
                c[i + j] = (c[i + j] + mm(a, b, p)) % p;
            }
        }
        FpPoly::new(p, c)
    }

    pub fn divrem(&self, d: &FpPoly) -> (FpPoly, FpPoly) {
        assert!(!d.is_zero());
        let p = self.p;
        let dd = d.c.len() - 1;
        let li = inv_mod(*d.c.last().unwrap(), p);
        let mut r = self.c.clone();
        if r.len() <= dd {
            return (FpPoly::new(p, vec![]), self.clone());
        }
        let mut quo = vec![0u64; r.len() - dd];
        for i in (0..quo.len()).rev() {
            let t = mm(r[i + dd], li, p);
            if t != 0 {
                for (j, &dj) in d.c.iter().enumerate() {
                    r[i + j] = (r[i + j] + p - mm(t, dj, p)) % p;
                }
            }
            quo[i] = t;
        }
        r.truncate(dd);
        (FpPoly::new(p, quo), FpPoly::new(p, r))
    }

    pub fn monic(&self) -> FpPoly {
        match self.c.last() {
            None => self.clone(),
            Some(&l) => {
                let li = inv_mod(l, self.p);
                FpPoly::new(self.p, self.c.iter().map(|&a| mm(a, li, self.p)).collect())
            }
        }
    }

    pub fn gcd(&self, o: &FpPoly) -> FpPoly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.divrem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `(g, s, t)` with `s a + t b = g` monic.
    pub fn ext_gcd(a: &FpPoly, b: &FpPoly) -> (FpPoly, FpPoly, FpPoly) {
        let p = a.p;
        let (mut r0, mut r1) = (a.clone(), b.clone());
        let (mut s0, mut s1) = (FpPoly::new(p, vec![1]), FpPoly::new(p, vec![]));
        let (mut t0, mut t1) = (FpPoly::new(p, vec![]), FpPoly::new(p, vec![1]));
        while !r1.is_zero() {
            let (quo, r) = r0.divrem(&r1);
            let s = s0.sub(&quo.mul(&s1));
            let t = t0.sub(&quo.mul(&t1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
            t0 = t1;
            t1 = t;
        }
        let l = r0.c.last().copied().unwrap_or(1);
        let li = FpPoly::new(p, vec![inv_mod(l, p)]);
        (r0.mul(&li), s0.mul(&li), t0.mul(&li))
    }

    fn powmod(&self, mut e: u128, m: &FpPoly) -> FpPoly {
        let mut base = self.divrem(m).1;
        let mut r = FpPoly::new(self.p, vec![1]).divrem(m).1;
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul(&base).divrem(m).1;
            }
            base = base.mul(&base).divrem(m).1;
            e >>= 1;
        }
        r
    }

    /// `T^{p^k} mod m` by repeated p-th powering.
    fn frobenius_iter(&self, k: usize, m: &FpPoly) -> FpPoly {
        let mut x = FpPoly::x(self.p).divrem(m).1;
        for _ in 0..k {
            x = x.powmod(self.p as u128, m);
        }
        x
    }

    /// Rabin's irreducibility test.
    pub fn is_irreducible(&self) -> bool {
        let n = match self.degree() {
            None | Some(0) => return false,
            Some(1) => return true,
            Some(n) => n,
        };
        let f = self.monic();
        let x = FpPoly::x(self.p);
        if f.frobenius_iter(n, &f).sub(&x).divrem(&f).1 != FpPoly::new(self.p, vec![]) {
            return false;
        }
        let mut m = n;
        let mut qs = vec![];
        let mut d = 2;
        while d * d <= m {
            if m % d == 0 {
                qs.push(d);
                while m % d == 0 {
                    m /= d;
                }
            }
            d += 1;
        }
        if m > 1 {
            qs.push(m);
        }
        qs.into_iter().all(|qq| {
            let h = f.frobenius_iter(n / qq, &f).sub(&x);
            f.gcd(&h).degree() == Some(0)
        })
    }

    /// Multiplicity of `d` as a factor of a nonzero polynomial.
    pub fn valuation_at(&self, d: &FpPoly) -> u32 {
        let mut f = self.clone();
        let mut k = 0;
        loop {
            let (quo, r) = f.divrem(d);
            if !r.is_zero() {
                return k;
            }
            f = quo;
            k += 1;
        }
    }
}

/// Rational roots of a nonzero polynomial over Q.
pub fn rational_roots(f: &Poly) -> Vec<Q> {
    use num_integer::Integer;
    if f.is_zero() {
        return vec![];
    }
    let den = crate::rational::lcm_all(f.coeffs().iter().map(|a| a.denom()));
    let ints: Vec<BigInt> = f.coeffs().iter().map(|a| (a * Q::from_integer(den.clone())).to_integer()).collect();
    let mut roots = vec![];
    let lead = ints.last().unwrap().abs();
    let tz = ints.iter().position(|a| !a.is_zero()).unwrap();
    if tz > 0 {
        roots.push(Q::zero());
    }
    let cst = ints[tz].abs();
    let divisors = |n: &BigInt| -> Vec<BigInt> {
        let n = n.to_u64().filter(|&n| n <= 1_000_000_000_000);
        let Some(n) = n else { return vec![] };
        let mut ds = vec![];
        let mut d = 1u64;
        while d * d <= n {
            if n % d == 0 {
                ds.push(BigInt::from(d));
                if d * d != n {
                    ds.push(BigInt::from(n / d));
                }
            }
            d += 1;
        }
        ds
    };
    for a in divisors(&cst) {
        for b in divisors(&lead) {
            if !a.gcd(&b).is_one() {
                continue;
            }
            for s in [1, -1] {
                let r = Q::new(&a * s, b.clone());
                if f.eval(&r).is_zero() && !roots.contains(&r) {
                    roots.push(r);
                }
            }
        }
    }
    roots
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qf;

    #[test]
    fn division_identity() {
        let f = Poly::from_ints(&[0, 0, 0, 1]);
        let g = Poly::from_ints(&[2, 2, 1]);
        let (quo, r) = f.divrem(&g);
        assert_eq!(quo, Poly::from_ints(&[-2, 1]));
        assert_eq!(r, Poly::from_ints(&[4, 2]));
        assert_eq!(quo.mul(&g).add(&r), f);
    }

    #[test]
    fn taylor_shift_matches_substitution() {
        let f = Poly::from_ints(&[4, 2, 1]);
        let c = f.taylor_shift(&q(3));
        // f(T) = (T-3)^2 + 8(T-3) + 19
        assert_eq!(c, vec![q(19), q(8), q(1)]);
    }

    #[test]
    fn rabin_small_cases() {
        assert!(FpPoly::new(2, vec![1, 1, 1]).is_irreducible());
        assert!(!FpPoly::new(2, vec![1, 0, 1]).is_irreducible());
        assert!(FpPoly::new(3, vec![1, 0, 1]).is_irreducible());
        assert!(!FpPoly::new(5, vec![1, 0, 1]).is_irreducible());
        assert!(FpPoly::new(2, vec![1, 1, 0, 0, 1]).is_irreducible());
        assert!(!FpPoly::new(2, vec![1, 0, 1, 0, 1]).is_irreducible());
    }

    #[test]
    fn ext_gcd_bezout() {
        let a = FpPoly::new(5, vec![3, 1]);
        let b = FpPoly::new(5, vec![2, 1]);
        let (g, s, t) = FpPoly::ext_gcd(&a, &b);
        assert_eq!(g, FpPoly::new(5, vec![1]));
        let lhs = s.mul(&a).sub(&FpPoly::new(5, vec![]).sub(&t.mul(&b)));
        assert_eq!(lhs, g);
    }

    #[test]
    fn rational_root_search() {
        let f = Poly::from_ints(&[-1, 0, 4]);
        let mut r = rational_roots(&f);
        r.sort();
        assert_eq!(r, vec![qf(-1, 2), qf(1, 2)]);
        assert!(rational_roots(&Poly::from_ints(&[-2, 0, 1])).is_empty());
    }
}
