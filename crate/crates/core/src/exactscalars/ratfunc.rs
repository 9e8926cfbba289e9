//! Reduced rational functions of `v` over `Q`.

use super::cyclotomic::{cyclotomic_poly, totient, BQ};
use super::laurent::LaurentPoly;
use crate::error::{Error, Result};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// `num / den` with `gcd(num, den) = 1`, `den` monic with lowest exponent 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalFunctionV {
    pub num: LaurentPoly,
    pub den: LaurentPoly,
}

/// A factorization `c · v^shift · Π Φ_e(v)^{n_e}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclotomicFactorization {
    pub constant: BQ,
    pub shift: i64,
    pub exponents: BTreeMap<u64, i64>,
}

fn poly_trim(mut p: Vec<BQ>) -> Vec<BQ> {
    while p.last().is_some_and(|x| x.is_zero()) {
        p.pop();
    }
    p
}

fn poly_divmod(a: &[BQ], b: &[BQ]) -> (Vec<BQ>, Vec<BQ>) {
    let b = poly_trim(b.to_vec());
    let mut r = poly_trim(a.to_vec());
    if r.len() < b.len() {
        return (vec![], r);
    }
    let db = b.len() - 1;
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
    (poly_trim(q), poly_trim(r))
}

fn poly_gcd(a: &[BQ], b: &[BQ]) -> Vec<BQ> {
    let (mut x, mut y) = (poly_trim(a.to_vec()), poly_trim(b.to_vec()));
    while !y.is_empty() {
        let (_, r) = poly_divmod(&x, &y);
        x = y;
        y = r;
    }
    let lead = x.last().cloned().unwrap_or_else(BQ::one);
    x.into_iter().map(|c| c / &lead).collect()
}

impl RationalFunctionV {
    pub fn new(num: LaurentPoly, den: LaurentPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::Arithmetic("zero denominator".into()));
        }
        if num.is_zero() {
            return Ok(RationalFunctionV {
                num,
                den: LaurentPoly::one(),
            });
        }
        let (np, nlo) = num.to_poly();
        let (dp, dlo) = den.to_poly();
        let g = poly_gcd(&np, &dp);
        let (nq, _) = poly_divmod(&np, &g);
        let (dq, _) = poly_divmod(&dp, &g);
        let lead = dq.last().cloned().expect("nonzero denominator");
        let nq: Vec<BQ> = nq.into_iter().map(|c| c / &lead).collect();
        let dq: Vec<BQ> = dq.into_iter().map(|c| c / &lead).collect();
        Ok(RationalFunctionV {
            num: LaurentPoly::from_coeffs(&nq, nlo - dlo),
            den: LaurentPoly::from_coeffs(&dq, 0),
        })
    }

    pub fn from_poly(p: LaurentPoly) -> Self {
        RationalFunctionV {
            num: p,
            den: LaurentPoly::one(),
        }
    }

    pub fn constant(c: BQ) -> Self {
        Self::from_poly(LaurentPoly::constant(c))
    }

    pub fn one() -> Self {
        Self::constant(BQ::one())
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::new(self.num.mul(&o.num), self.den.mul(&o.den)).expect("nonzero")
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        if o.num.is_zero() {
            return Err(Error::Arithmetic("division by zero".into()));
        }
        Self::new(self.num.mul(&o.den), self.den.mul(&o.num))
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 {
            Self::one().div(self)?
        } else {
            self.clone()
        };
        let mut r = Self::one();
        for _ in 0..e.unsigned_abs() {
            r = r.mul(&base);
        }
        Ok(r)
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// The constant value, if the function is constant.
    pub fn as_constant(&self) -> Option<BQ> {
        if self.den == LaurentPoly::one() {
            match self.num.terms.len() {
                0 => Some(BQ::zero()),
                1 => self.num.terms.get(&0).cloned(),
                _ => None,
            }
        } else {
            None
        }
    }

    pub fn eval(&self, x: &BQ) -> Result<BQ> {
        let d = self.den.eval(x);
        if d.is_zero() {
            return Err(Error::Arithmetic(format!("pole at v = {x}")));
        }
        Ok(self.num.eval(x) / d)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.num.eval_f64(x) / self.den.eval_f64(x)
    }

    pub fn invert_variable(&self) -> Self {
        Self::new(self.num.invert_variable(), self.den.invert_variable()).expect("nonzero")
    }

    pub fn negate_variable(&self) -> Self {
        Self::new(self.num.negate_variable(), self.den.negate_variable()).expect("nonzero")
    }

    pub fn order_at_one(&self) -> i64 {
        self.num.order_at_one() - self.den.order_at_one()
    }

    /// Factors numerator and denominator into cyclotomic polynomials.  Returns
    /// `None` if some irreducible factor is not cyclotomic.
    pub fn factor_cyclotomic(&self) -> Option<CyclotomicFactorization> {
        let (nc, ns, ne) = factor_poly_cyclotomic(&self.num)?;
        let (dc, ds, de) = factor_poly_cyclotomic(&self.den)?;
        let mut exponents = ne;
        for (e, k) in de {
            *exponents.entry(e).or_insert(0) -= k;
        }
        exponents.retain(|_, k| *k != 0);
        Some(CyclotomicFactorization {
            constant: nc / dc,
            shift: ns - ds,
            exponents,
        })
    }

    /// Text form with the content pulled out and a centered denominator, e.g.
    /// `(v - v^-1)/(v + v^-1)`.
    pub fn render(&self) -> String {
        if self.num.is_zero() {
            return "0".into();
        }
        let (lo, hi) = (self.den.min_exp().unwrap(), self.den.max_exp().unwrap());
        let s = -Integer::div_floor(&(lo + hi), &2);
        let num = self.num.shift(s);
        let den = self.den.shift(s);
        let (c, num) = pull_content(&num);
        let (cd, den) = pull_content(&den);
        let c = c / cd;
        let wrap = |p: &LaurentPoly| {
            if p.terms.len() > 1 {
                format!("({p})")
            } else {
                p.to_string()
            }
        };
        let mut body = if den == LaurentPoly::one() {
            if num == LaurentPoly::one() {
                String::new()
            } else {
                wrap(&num)
            }
        } else {
            format!("{}/{}", wrap(&num), wrap(&den))
        };
        if body.is_empty() {
            return c.to_string();
        }
        if c == -BQ::one() {
            body = format!("-{body}");
        } else if !c.is_one() {
            body = format!("{c} * {body}");
        }
        body
    }
}

/// Writes `p = c · p'` with `p'` integral, primitive and with positive leading coefficient.
fn pull_content(p: &LaurentPoly) -> (BQ, LaurentPoly) {
    let mut l = num_bigint::BigInt::one();
    for c in p.terms.values() {
        l = l.lcm(c.denom());
    }
    let mut g = num_bigint::BigInt::zero();
    for c in p.terms.values() {
        let v = c * BQ::from_integer(l.clone());
        g = g.gcd(v.numer());
    }
    if g.is_zero() {
        return (BQ::one(), p.clone());
    }
    let mut c = BQ::new(g, l);
    if p.leading().is_some_and(|x| x.is_negative()) {
        c = -c;
    }
    (c.clone(), p.scale(&c.recip()))
}

fn factor_poly_cyclotomic(p: &LaurentPoly) -> Option<(BQ, i64, BTreeMap<u64, i64>)> {
    let (mut poly, shift) = p.to_poly();
    let mut out = BTreeMap::new();
    let mut e = 1u64;
    while poly.len() > 1 {
        let deg = (poly.len() - 1) as u64;
        // φ(e) >= sqrt(e/2), so e <= 2 deg^2 bounds every possible factor.
        if e > 2 * deg * deg + 2 {
            return None;
        }
        if totient(e) <= deg {
            let phi: Vec<BQ> = cyclotomic_poly(e).into_iter().map(BQ::from_integer).collect();
            loop {
                let (q, r) = poly_divmod(&poly, &phi);
                if !r.is_empty() || poly.len() < phi.len() {
                    break;
                }
                poly = q;
                *out.entry(e).or_insert(0) += 1;
            }
        }
        e += 1;
    }
    Some((poly[0].clone(), shift, out))
}

impl fmt::Display for RationalFunctionV {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactscalars::cyclotomic::bq;
    use crate::exactscalars::laurent::{q_integer, v_minus_vinv};

    #[test]
    fn reduces_and_renders() {
        let f = RationalFunctionV::new(v_minus_vinv(), q_integer(2)).unwrap();
        assert_eq!(f.render(), "(v - v^-1)/(v + v^-1)");
        assert_eq!(f.eval(&bq(2)).unwrap(), BQ::new(3.into(), 5.into()));
        let g = RationalFunctionV::new(
            v_minus_vinv().mul(&q_integer(3)),
            q_integer(3).scale(&bq(2)),
        )
        .unwrap();
        assert_eq!(g.render(), "1/2 * (v - v^-1)");
    }

    #[test]
    fn cyclotomic_factorization() {
        let f = RationalFunctionV::new(v_minus_vinv(), q_integer(2)).unwrap();
        let c = f.factor_cyclotomic().unwrap();
        // (v^2 - 1)/(v^2 + 1) = Φ1 Φ2 / Φ4.
        assert_eq!(c.exponents.get(&1), Some(&1));
        assert_eq!(c.exponents.get(&2), Some(&1));
        assert_eq!(c.exponents.get(&4), Some(&-1));
        let h = RationalFunctionV::from_poly(LaurentPoly::from_coeffs(&[bq(1), bq(1), bq(1), bq(1), bq(1)], 0).add(&LaurentPoly::monomial(bq(1), 1)));
        assert!(h.factor_cyclotomic().is_none());
    }
}
