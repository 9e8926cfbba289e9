//! The normalizing group 𝐌 generated by positive rationals, `(v - v^{-1})` and
//! the q-integers `[n]_q`.

use super::cyclotomic::{bq, bq_sign, moebius, BQ};
use super::laurent::{q_integer, v_minus_vinv, LaurentPoly};
use super::ratfunc::{CyclotomicFactorization, RationalFunctionV};
use crate::error::{Error, Result};
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;

/// `constant · (v - v^{-1})^vexp · Π_n [n]_q^{qints[n]}` with `constant > 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalizingElement {
    pub constant: BQ,
    pub vexp: i64,
    pub qints: BTreeMap<u32, i64>,
}

impl Default for NormalizingElement {
    fn default() -> Self {
        Self::one()
    }
}

impl NormalizingElement {
    pub fn one() -> Self {
        NormalizingElement {
            constant: BQ::one(),
            vexp: 0,
            qints: BTreeMap::new(),
        }
    }

    pub fn new(constant: BQ, vexp: i64, qints: BTreeMap<u32, i64>) -> Result<Self> {
        if !constant.is_positive() {
            return Err(Error::InvalidParameters(
                "normalizing constant must be a positive rational".into(),
            ));
        }
        if qints.keys().any(|&n| n == 0) {
            return Err(Error::InvalidParameters("[0]_q is not allowed".into()));
        }
        let mut e = NormalizingElement {
            constant,
            vexp,
            qints,
        };
        e.canonicalize();
        Ok(e)
    }

    fn canonicalize(&mut self) {
        self.qints.retain(|&n, k| n > 1 && *k != 0);
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut q = self.qints.clone();
        for (n, k) in &o.qints {
            *q.entry(*n).or_insert(0) += k;
        }
        let mut e = NormalizingElement {
            constant: &self.constant * &o.constant,
            vexp: self.vexp + o.vexp,
            qints: q,
        };
        e.canonicalize();
        e
    }

    pub fn inv(&self) -> Self {
        NormalizingElement {
            constant: self.constant.recip(),
            vexp: -self.vexp,
            qints: self.qints.iter().map(|(n, k)| (*n, -k)).collect(),
        }
    }

    /// Vanishing order at `v = 1`, i.e. `d ∈ 𝐌_(vexp)`.
    pub fn vanishing_order(&self) -> i64 {
        self.vexp
    }

    /// The expanded rational function.
    pub fn expand(&self) -> RationalFunctionV {
        let mut num = LaurentPoly::constant(self.constant.clone());
        let mut den = LaurentPoly::one();
        let mut put = |p: LaurentPoly, k: i64| {
            if k > 0 {
                num = num.mul(&p.pow(k as u32));
            } else if k < 0 {
                den = den.mul(&p.pow((-k) as u32));
            }
        };
        put(v_minus_vinv(), self.vexp);
        for (n, k) in &self.qints {
            put(q_integer(*n), *k);
        }
        RationalFunctionV::new(num, den).expect("nonzero denominator")
    }

    /// Bit-exact text form, e.g. `3/2 * (v-v^-1)^2 * [2]^-1 * [3]`.
    pub fn render(&self) -> String {
        let mut parts = vec![];
        if !self.constant.is_one() {
            parts.push(self.constant.to_string());
        }
        let pw = |base: String, k: i64| {
            if k == 1 {
                base
            } else {
                format!("{base}^{k}")
            }
        };
        if self.vexp != 0 {
            parts.push(pw("(v-v^-1)".into(), self.vexp));
        }
        for (n, k) in &self.qints {
            parts.push(pw(format!("[{n}]"), *k));
        }
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join(" * ")
        }
    }

    /// Parses the text form produced by [`render`](Self::render).
    pub fn parse(s: &str) -> Result<Self> {
        let err = |m: &str| Error::Input(format!("bad normalizing element `{s}`: {m}"));
        let mut constant = BQ::one();
        let mut vexp = 0i64;
        let mut qints = BTreeMap::new();
        let t = s.trim();
        if t == "1" {
            return Ok(Self::one());
        }
        for part in t.split('*') {
            let part: String = part.chars().filter(|c| !c.is_whitespace()).collect();
            let exponent = |rest: &str| -> Result<i64> {
                match rest.strip_prefix('^') {
                    None if rest.is_empty() => Ok(1),
                    Some(e) => e.parse().map_err(|_| err("bad exponent")),
                    None => Err(err("unexpected text after factor")),
                }
            };
            if let Some(rest) = part.strip_prefix("(v-v^-1)") {
                vexp += exponent(rest)?;
            } else if let Some(inner) = part.strip_prefix('[') {
                let (n, rest) = inner.split_once(']').ok_or_else(|| err("missing `]`"))?;
                let n: u32 = n.parse().map_err(|_| err("bad q-integer"))?;
                *qints.entry(n).or_insert(0) += exponent(rest)?;
            } else {
                constant *= parse_rational(&part).ok_or_else(|| err("bad constant"))?;
            }
        }
        Self::new(constant, vexp, qints)
    }
}

impl fmt::Display for NormalizingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

impl Serialize for NormalizingElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("NormalizingElement", 4)?;
        st.serialize_field("constant", &self.constant.to_string())?;
        st.serialize_field("vexp", &self.vexp)?;
        let q: BTreeMap<String, i64> = self.qints.iter().map(|(n, k)| (n.to_string(), *k)).collect();
        st.serialize_field("qints", &q)?;
        st.serialize_field("text", &self.render())?;
        st.end()
    }
}

/// Parses `p`, `-p`, `p/q`.
pub fn parse_rational(s: &str) -> Option<BQ> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (s, "1"),
    };
    let n: num_bigint::BigInt = n.parse().ok()?;
    let d: num_bigint::BigInt = d.parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(BQ::new(n, d))
}

/// Candidate exponents `(vexp, qints)` from the cyclotomic exponents `n_e` of
/// a function `± c v^s Π Φ_e^{n_e}`.  The q-integers are multiplicatively
/// independent, so the candidate is unique when it exists.
pub fn certificate_from_cyclotomic(n: &BTreeMap<u64, i64>) -> Result<(i64, BTreeMap<u32, i64>)> {
    let get = |e: u64| n.get(&e).copied().unwrap_or(0);
    let a = get(1);
    if get(2) != a {
        return Err(Error::NotInM(format!(
            "orders at v = 1 and v = -1 differ ({a} vs {})",
            get(2)
        )));
    }
    let max = n.keys().copied().max().unwrap_or(0);
    for e in (3..=max).step_by(2) {
        if get(e) != get(2 * e) {
            return Err(Error::NotInM(format!(
                "Φ_{e} and Φ_{} occur with different exponents",
                2 * e
            )));
        }
    }
    // N(j) = Σ_{j | k} b_k = n_{2j} for j >= 2; Möbius inversion recovers b_k.
    let big_n = |j: u64| get(2 * j);
    let mut qints = BTreeMap::new();
    for k in 2..=max.max(2) {
        let mut b = 0i64;
        let mut j = 1;
        while 2 * k * j <= max {
            b += moebius(j) * big_n(k * j);
            j += 1;
        }
        if b != 0 {
            qints.insert(k as u32, b);
        }
    }
    Ok((a, qints))
}

/// Certifies `f ∈ ±𝐌`, returning `d` with `expand(d) = sign · f`.
pub fn factor_into_m(f: &RationalFunctionV) -> Result<(NormalizingElement, i64)> {
    if f.is_zero() {
        return Err(Error::NotInM("zero function".into()));
    }
    let CyclotomicFactorization { exponents, .. } = f
        .factor_cyclotomic()
        .ok_or_else(|| Error::NotInM(format!("{} has a non-cyclotomic factor", f.render())))?;
    let (vexp, qints) = certificate_from_cyclotomic(&exponents)?;
    let shape = NormalizingElement {
        constant: BQ::one(),
        vexp,
        qints,
    };
    let ratio = f.div(&shape.expand())?;
    let c = ratio
        .as_constant()
        .ok_or_else(|| Error::NotInM(format!("{} is not symmetric under v ↦ v^-1", f.render())))?;
    let sign = bq_sign(&c);
    let d = NormalizingElement::new(c.abs(), shape.vexp, shape.qints)?;
    Ok((d, sign))
}

/// Evaluates `d` at a rational `v₀`.
pub fn eval_normalizing(d: &NormalizingElement, v0: &BQ) -> Result<BQ> {
    d.expand().eval(v0)
}

/// `[n]_q` as an element.
pub fn q_int_element(n: u32, k: i64) -> NormalizingElement {
    let mut q = BTreeMap::new();
    q.insert(n, k);
    NormalizingElement::new(bq(1), 0, q).expect("valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ne(c: BQ, vexp: i64, q: &[(u32, i64)]) -> NormalizingElement {
        NormalizingElement::new(c, vexp, q.iter().copied().collect()).unwrap()
    }

    #[test]
    fn expand_examples() {
        assert_eq!(NormalizingElement::one().expand().render(), "1");
        assert_eq!(ne(bq(1), 1, &[(2, -1)]).expand().render(), "(v - v^-1)/(v + v^-1)");
        let half3 = BQ::new(3.into(), 2.into());
        assert_eq!(ne(half3, 0, &[(3, 1)]).expand().render(), "3/2 * (v^2 + 1 + v^-2)");
    }

    #[test]
    fn factor_examples() {
        let f = ne(bq(1), 1, &[(2, -1)]).expand();
        let (d, s) = factor_into_m(&f).unwrap();
        assert_eq!((d.render().as_str(), s), ("(v-v^-1) * [2]^-1", 1));
        let (d, s) = factor_into_m(&RationalFunctionV::constant(bq(5))).unwrap();
        assert_eq!((d.render().as_str(), s), ("5", 1));
        let v_plus_1 = RationalFunctionV::from_poly(LaurentPoly::from_coeffs(&[bq(1), bq(1)], 0));
        assert!(matches!(factor_into_m(&v_plus_1), Err(Error::NotInM(_))));
    }

    #[test]
    fn render_parse_roundtrip() {
        let d = ne(BQ::new(3.into(), 2.into()), 2, &[(2, -1), (3, 1)]);
        assert_eq!(d.render(), "3/2 * (v-v^-1)^2 * [2]^-1 * [3]");
        assert_eq!(NormalizingElement::parse(&d.render()).unwrap(), d);
        assert_eq!(NormalizingElement::parse("1").unwrap(), NormalizingElement::one());
    }

    #[test]
    fn dependent_looking_products_factor_uniquely() {
        // [6] = [2]_{q^3} [3]; the certificate must reproduce the input.
        let d = ne(bq(7), -1, &[(6, 1), (4, -2), (5, 3)]);
        let (e, s) = factor_into_m(&d.expand()).unwrap();
        assert_eq!(e, d);
        assert_eq!(s, 1);
        let (e, s) = factor_into_m(&d.expand().mul(&RationalFunctionV::constant(bq(-1)))).unwrap();
        assert_eq!((e, s), (d, -1));
    }
}
