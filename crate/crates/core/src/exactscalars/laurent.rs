//! Laurent polynomials in `v` with rational coefficients.

use super::cyclotomic::{bq, BQ};
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct LaurentPoly {
    /// exponent -> nonzero coefficient.
    pub terms: BTreeMap<i64, BQ>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly::default()
    }

    pub fn constant(c: BQ) -> Self {
        Self::monomial(c, 0)
    }

    pub fn one() -> Self {
        Self::constant(BQ::one())
    }

    pub fn monomial(c: BQ, e: i64) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(e, c);
        }
        LaurentPoly { terms }
    }

    /// `v`.
    pub fn v() -> Self {
        Self::monomial(BQ::one(), 1)
    }

    /// From coefficients `c_0 + c_1 v + …` times `v^shift`.
    pub fn from_coeffs(coeffs: &[BQ], shift: i64) -> Self {
        let mut p = LaurentPoly::zero();
        for (i, c) in coeffs.iter().enumerate() {
            p.add_term(i as i64 + shift, c.clone());
        }
        p
    }

    pub fn add_term(&mut self, e: i64, c: BQ) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(e).or_insert_with(BQ::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    pub fn leading(&self) -> Option<&BQ> {
        self.terms.values().next_back()
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (e, c) in &o.terms {
            r.add_term(*e, c.clone());
        }
        r
    }

    pub fn neg(&self) -> Self {
        LaurentPoly {
            terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut r = LaurentPoly::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                r.add_term(e1 + e2, c1 * c2);
            }
        }
        r
    }

    pub fn scale(&self, c: &BQ) -> Self {
        let mut r = LaurentPoly::zero();
        for (e, x) in &self.terms {
            r.add_term(*e, x * c);
        }
        r
    }

    pub fn shift(&self, k: i64) -> Self {
        LaurentPoly {
            terms: self.terms.iter().map(|(e, c)| (e + k, c.clone())).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut r = LaurentPoly::one();
        for _ in 0..n {
            r = r.mul(self);
        }
        r
    }

    /// `p(v^{-1})`.
    pub fn invert_variable(&self) -> Self {
        LaurentPoly {
            terms: self.terms.iter().map(|(e, c)| (-e, c.clone())).collect(),
        }
    }

    /// `p(-v)`.
    pub fn negate_variable(&self) -> Self {
        LaurentPoly {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (*e, if e % 2 == 0 { c.clone() } else { -c }))
                .collect(),
        }
    }

    /// Coefficients of `v^{-min} p` as an ordinary polynomial, low degree first.
    pub fn to_poly(&self) -> (Vec<BQ>, i64) {
        let Some(lo) = self.min_exp() else {
            return (vec![], 0);
        };
        let hi = self.max_exp().unwrap();
        let mut v = vec![BQ::zero(); (hi - lo + 1) as usize];
        for (e, c) in &self.terms {
            v[(e - lo) as usize] = c.clone();
        }
        (v, lo)
    }

    pub fn eval(&self, x: &BQ) -> BQ {
        let mut acc = BQ::zero();
        for (e, c) in &self.terms {
            acc += c * pow_bq(x, *e);
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| c.to_f64().unwrap_or(f64::NAN) * x.powi(*e as i32))
            .sum()
    }

    /// Order of vanishing at `v = 1`.
    pub fn order_at_one(&self) -> i64 {
        if self.is_zero() {
            return i64::MAX;
        }
        let (mut p, _) = self.to_poly();
        let mut k = 0;
        loop {
            let s: BQ = p.iter().fold(BQ::zero(), |a, b| a + b);
            if !s.is_zero() {
                return k;
            }
            // Divide by (v - 1) with synthetic division.
            let n = p.len();
            let mut q = vec![BQ::zero(); n - 1];
            let mut carry = BQ::zero();
            for i in (1..n).rev() {
                carry += &p[i];
                q[i - 1] = carry.clone();
            }
            p = q;
            k += 1;
        }
    }

    pub fn render(&self) -> String {
        render_terms(self, "v")
    }
}

pub fn pow_bq(x: &BQ, e: i64) -> BQ {
    let mut r = BQ::one();
    let b = if e < 0 { x.recip() } else { x.clone() };
    for _ in 0..e.unsigned_abs() {
        r *= &b;
    }
    r
}

fn render_terms(p: &LaurentPoly, var: &str) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, (e, c)) in p.terms.iter().rev().enumerate() {
        let neg = c.is_negative();
        let a = c.abs();
        let mon = match *e {
            0 => String::new(),
            1 => var.to_string(),
            _ => format!("{var}^{e}"),
        };
        let body = if mon.is_empty() {
            a.to_string()
        } else if a.is_one() {
            mon
        } else {
            format!("{a}*{mon}")
        };
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        out.push_str(&body);
    }
    out
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

/// `[n]_q = (v^n - v^{-n}) / (v - v^{-1}) = v^{n-1} + v^{n-3} + … + v^{1-n}`.
pub fn q_integer(n: u32) -> LaurentPoly {
    let mut p = LaurentPoly::zero();
    let n = n as i64;
    let mut e = n - 1;
    while e >= 1 - n {
        p.add_term(e, bq(1));
        e -= 2;
    }
    p
}

/// `v - v^{-1}`.
pub fn v_minus_vinv() -> LaurentPoly {
    let mut p = LaurentPoly::zero();
    p.add_term(1, bq(1));
    p.add_term(-1, bq(-1));
    p
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn q_integers() {
        assert_eq!(q_integer(1), LaurentPoly::one());
        assert_eq!(q_integer(3).render(), "v^2 + 1 + v^-2");
        // [2]_q (v - v^-1) = v^2 - v^-2.
        let p = q_integer(2).mul(&v_minus_vinv());
        assert_eq!(p.render(), "v^2 - v^-2");
    }

    #[test]
    fn vanishing_order() {
        let p = v_minus_vinv().pow(3).mul(&q_integer(4));
        assert_eq!(p.order_at_one(), 3);
        assert_eq!(q_integer(5).order_at_one(), 0);
    }

    #[test]
    fn symmetries() {
        let p = v_minus_vinv();
        assert_eq!(p.invert_variable(), p.neg());
        assert_eq!(p.negate_variable(), p.neg());
        assert_eq!(p.eval(&bq(2)), BQ::new(3.into(), 2.into()));
    }
}
