//! Elements of cyclotomic fields `Q(ζ_N)` in the power basis.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::HashMap;
use std::fmt;
use std::sync::{Mutex, OnceLock};

pub type BQ = BigRational;

pub fn bq(n: i64) -> BQ {
    BQ::from_integer(BigInt::from(n))
}

pub fn bq_from(q: Ratio<i64>) -> BQ {
    BQ::new(BigInt::from(*q.numer()), BigInt::from(*q.denom()))
}

/// Euler's totient.
pub fn totient(n: u64) -> u64 {
    let mut n0 = n;
    let mut res = n;
    let mut p = 2;
    while p * p <= n0 {
        if n0 % p == 0 {
            while n0 % p == 0 {
                n0 /= p;
            }
            res -= res / p;
        }
        p += 1;
    }
    if n0 > 1 {
        res -= res / n0;
    }
    res
}

/// Möbius function.
pub fn moebius(n: u64) -> i64 {
    let mut n0 = n;
    let mut k = 0;
    let mut p = 2;
    while p * p <= n0 {
        if n0 % p == 0 {
            n0 /= p;
            if n0 % p == 0 {
                return 0;
            }
            k += 1;
        }
        p += 1;
    }
    if n0 > 1 {
        k += 1;
    }
    if k % 2 == 0 {
        1
    } else {
        -1
    }
}

/// The cyclotomic polynomial `Φ_n` with integer coefficients, low degree first.
pub fn cyclotomic_poly(n: u64) -> Vec<BigInt> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Vec<BigInt>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = cache.lock().expect("cache lock").get(&n) {
        return p.clone();
    }
    let p = compute_cyclotomic_poly(n);
    cache.lock().expect("cache lock").insert(n, p.clone());
    p
}

fn compute_cyclotomic_poly(n: u64) -> Vec<BigInt> {
    // Φ_n(x) = Π_{d|n} (x^d - 1)^{μ(n/d)}.
    let mut num: Vec<BigInt> = vec![BigInt::one()];
    let mut den: Vec<BigInt> = vec![BigInt::one()];
    for d in 1..=n {
        if n % d != 0 {
            continue;
        }
        let mu = moebius(n / d);
        if mu == 0 {
            continue;
        }
        let mut f = vec![BigInt::zero(); d as usize + 1];
        f[0] = BigInt::from(-1);
        f[d as usize] = BigInt::one();
        if mu == 1 {
            num = int_poly_mul(&num, &f);
        } else {
            den = int_poly_mul(&den, &f);
        }
    }
    int_poly_exact_div(&num, &den)
}

fn int_poly_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Exact division by a monic-up-to-sign polynomial.
fn int_poly_exact_div(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lead = b[db].clone();
    let mut q = vec![BigInt::zero(); a.len() - db];
    for i in (0..q.len()).rev() {
        let c = &r[i + db] / &lead;
        for (j, bj) in b.iter().enumerate() {
            r[i + j] -= &c * bj;
        }
        q[i] = c;
    }
    debug_assert!(r.iter().all(|x| x.is_zero()));
    q
}

/// An element of `Q(ζ_n)` as a vector of `φ(n)` rational coordinates in the
/// basis `1, ζ, …, ζ^{φ(n)-1}` with `ζ = e^{2πi/n}`.
#[derive(Clone, Debug)]
pub struct Cyclotomic {
    pub conductor: u64,
    pub coords: Vec<BQ>,
}

impl Cyclotomic {
    pub fn from_rational(q: BQ) -> Self {
        Cyclotomic {
            conductor: 1,
            coords: vec![q],
        }
    }

    pub fn zero() -> Self {
        Self::from_rational(BQ::zero())
    }

    pub fn one() -> Self {
        Self::from_rational(BQ::one())
    }

    /// `e^{2πi·phase}`.
    pub fn root_of_unity(phase: Ratio<i64>) -> Self {
        let p = phase - phase.floor();
        let n = *p.denom() as u64;
        let k = *p.numer() as usize;
        let mut poly = vec![BQ::zero(); k + 1];
        poly[k] = BQ::one();
        Cyclotomic {
            conductor: n,
            coords: reduce_mod_phi(poly, n),
        }
    }

    /// Re-expresses the element in `Q(ζ_m)` where `conductor | m`.
    pub fn lift(&self, m: u64) -> Self {
        assert!(m % self.conductor == 0, "lift to a non-multiple conductor");
        if m == self.conductor {
            return self.clone();
        }
        let step = (m / self.conductor) as usize;
        let mut poly = vec![BQ::zero(); step * self.coords.len().max(1)];
        for (i, c) in self.coords.iter().enumerate() {
            poly[i * step] = c.clone();
        }
        Cyclotomic {
            conductor: m,
            coords: reduce_mod_phi(poly, m),
        }
    }

    fn common(&self, other: &Self) -> (Self, Self) {
        let m = self.conductor.lcm(&other.conductor);
        (self.lift(m), other.lift(m))
    }

    pub fn add(&self, other: &Self) -> Self {
        let (a, b) = self.common(other);
        Cyclotomic {
            conductor: a.conductor,
            coords: a.coords.iter().zip(&b.coords).map(|(x, y)| x + y).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        Cyclotomic {
            conductor: self.conductor,
            coords: self.coords.iter().map(|x| -x).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (a, b) = self.common(other);
        let n = a.conductor;
        let mut prod = vec![BQ::zero(); a.coords.len() + b.coords.len()];
        for (i, x) in a.coords.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coords.iter().enumerate() {
                prod[i + j] += x * y;
            }
        }
        Cyclotomic {
            conductor: n,
            coords: reduce_mod_phi(prod, n),
        }
    }

    pub fn scale(&self, q: &BQ) -> Self {
        Cyclotomic {
            conductor: self.conductor,
            coords: self.coords.iter().map(|x| x * q).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|x| x.is_zero())
    }

    /// Multiplicative inverse via the extended Euclidean algorithm against `Φ_n`.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.conductor;
        let phi: Vec<BQ> = cyclotomic_poly(n)
            .into_iter()
            .map(BQ::from_integer)
            .collect();
        let a = trim(self.coords.clone());
        // Invariant: r_i = s_i * a (mod Φ).
        let (mut r0, mut r1) = (phi, a);
        let (mut s0, mut s1) = (vec![], vec![BQ::one()]);
        while !(r1.len() == 1 && !r1[0].is_zero()) {
            let (q, r) = poly_divmod(&r0, &r1);
            let s2 = poly_sub(&s0, &poly_mul(&q, &s1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s2;
            if r1.is_empty() {
                return None;
            }
        }
        let c = r1[0].clone();
        let s: Vec<BQ> = s1.into_iter().map(|x| x / &c).collect();
        Some(Cyclotomic {
            conductor: n,
            coords: reduce_mod_phi(s, n),
        })
    }

    pub fn pow(&self, e: i64) -> Option<Self> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut out = Cyclotomic::one();
        let mut b = base;
        let mut k = e.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                out = out.mul(&b);
            }
            b = b.mul(&b);
            k >>= 1;
        }
        Some(out)
    }

    /// The rational value, if the element lies in `Q`.
    pub fn as_rational(&self) -> Option<BQ> {
        if self.coords.iter().skip(1).all(|x| x.is_zero()) {
            Some(self.coords.first().cloned().unwrap_or_else(BQ::zero))
        } else {
            None
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        let z = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / self.conductor as f64);
        let mut acc = Complex64::new(0.0, 0.0);
        let mut p = Complex64::new(1.0, 0.0);
        for c in &self.coords {
            acc += p * c.to_f64().unwrap_or(f64::NAN);
            p *= z;
        }
        acc
    }
}

impl PartialEq for Cyclotomic {
    fn eq(&self, other: &Self) -> bool {
        let (a, b) = self.common(other);
        a.coords == b.coords
    }
}

impl fmt::Display for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(q) = self.as_rational() {
            return write!(f, "{q}");
        }
        let mut terms = vec![];
        for (i, c) in self.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mon = match i {
                0 => String::new(),
                1 => format!("z{}", self.conductor),
                _ => format!("z{}^{i}", self.conductor),
            };
            let s = if mon.is_empty() {
                c.to_string()
            } else if c.is_one() {
                mon
            } else if *c == -BQ::one() {
                format!("-{mon}")
            } else {
                format!("{c}*{mon}")
            };
            terms.push(s);
        }
        write!(f, "{}", terms.join(" + ").replace("+ -", "- "))
    }
}

fn trim(mut p: Vec<BQ>) -> Vec<BQ> {
    while p.last().is_some_and(|x| x.is_zero()) {
        p.pop();
    }
    p
}

fn poly_mul(a: &[BQ], b: &[BQ]) -> Vec<BQ> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![BQ::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

fn poly_sub(a: &[BQ], b: &[BQ]) -> Vec<BQ> {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|i| {
            let x = a.get(i).cloned().unwrap_or_else(BQ::zero);
            let y = b.get(i).cloned().unwrap_or_else(BQ::zero);
            x - y
        })
        .collect();
    trim(out)
}

fn poly_divmod(a: &[BQ], b: &[BQ]) -> (Vec<BQ>, Vec<BQ>) {
    let b = trim(b.to_vec());
    let mut r = trim(a.to_vec());
    let db = b.len() - 1;
    if r.len() < b.len() {
        return (vec![], r);
    }
    let mut q = vec![BQ::zero(); r.len() - db];
    for i in (0..q.len()).rev() {
        let c = &r[i + db] / &b[db];
        if !c.is_zero() {
            for (j, bj) in b.iter().enumerate() {
                r[i + j] -= &c * bj;
            }
        }
        q[i] = c;
    }
    (trim(q), trim(r))
}

/// Reduces a polynomial in ζ modulo `Φ_n`, returning exactly `φ(n)` coordinates.
fn reduce_mod_phi(mut p: Vec<BQ>, n: u64) -> Vec<BQ> {
    let phi = cyclotomic_poly(n);
    let d = phi.len() - 1;
    for i in (d..p.len()).rev() {
        if p[i].is_zero() {
            continue;
        }
        let c = p[i].clone();
        for (j, pj) in phi.iter().enumerate() {
            p[i - d + j] -= &c * BQ::from_integer(pj.clone());
        }
    }
    p.resize(d, BQ::zero());
    p
}

/// Sign of a rational, as -1, 0, 1.
pub fn bq_sign(q: &BQ) -> i64 {
    if q.is_positive() {
        1
    } else if q.is_negative() {
        -1
    } else {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootdata::lattice::qr;

    #[test]
    fn small_cyclotomic_polynomials() {
        let as_i = |v: Vec<BigInt>| v.into_iter().map(|x| x.to_i64().unwrap()).collect::<Vec<_>>();
        assert_eq!(as_i(cyclotomic_poly(1)), vec![-1, 1]);
        assert_eq!(as_i(cyclotomic_poly(2)), vec![1, 1]);
        assert_eq!(as_i(cyclotomic_poly(6)), vec![1, -1, 1]);
        assert_eq!(as_i(cyclotomic_poly(12)), vec![1, 0, -1, 0, 1]);
        assert_eq!(cyclotomic_poly(105).len() - 1, 48);
    }

    #[test]
    fn roots_of_unity_relations() {
        let i = Cyclotomic::root_of_unity(qr(1, 4));
        assert_eq!(i.mul(&i), Cyclotomic::from_rational(bq(-1)));
        // (1 - i)(1 + i) = 2.
        let one = Cyclotomic::one();
        assert_eq!(one.sub(&i).mul(&one.add(&i)), Cyclotomic::from_rational(bq(2)));
        // 1 + ω + ω² = 0 for ω of order 3, seen inside Q(ζ_12).
        let w = Cyclotomic::root_of_unity(qr(1, 3)).lift(12);
        assert!(one.add(&w).add(&w.mul(&w)).is_zero());
    }

    #[test]
    fn inverse_roundtrip() {
        let z = Cyclotomic::root_of_unity(qr(2, 5));
        let a = Cyclotomic::one().sub(&z);
        let b = a.inv().unwrap();
        assert_eq!(a.mul(&b), Cyclotomic::one());
        assert!((b.to_complex() * a.to_complex() - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn totient_and_moebius() {
        assert_eq!(totient(12), 4);
        assert_eq!(moebius(30), -1);
        assert_eq!(moebius(12), 0);
    }
}
