//! Canonical products of binomials `1 - ζ·x^e` over the group algebra of `Q^N`.
//!
//! Variable 0 is always `v`; the remaining variables are torus coordinates.
//! Exponents are rational so that pullbacks along finite covers stay exact.
//! Relative to the lattice `(1/den) Z^N` every binomial is split into factors
//! `1 - ω x^p` with `p` primitive and lexicographically positive; these are
//! pairwise non-associate irreducibles of a UFD, so two functions are equal iff
//! their canonical forms agree.

use super::cyclotomic::{bq, Cyclotomic, BQ};
use super::normalizing::{certificate_from_cyclotomic, NormalizingElement};
use crate::error::{Error, Result};
use crate::rootdata::lattice::{frac, q, Q};
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;
use std::fmt::Write;

fn lcm_den(v: &[Q]) -> i64 {
    v.iter().fold(1i64, |l, x| l.lcm(x.denom()))
}

/// A constant `rat · e^{2πi·phase} · Π_θ (1 - e^{2πiθ})^{k_θ}` with `θ ∈ (0, 1/2)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymConst {
    pub rat: BQ,
    pub phase: Q,
    pub cyc: BTreeMap<Q, i64>,
}

impl SymConst {
    pub fn one() -> Self {
        Self::from_rational(BQ::one())
    }

    pub fn from_rational(rat: BQ) -> Self {
        SymConst {
            rat,
            phase: Q::zero(),
            cyc: BTreeMap::new(),
        }
    }

    pub fn root_of_unity(phase: Q) -> Self {
        SymConst {
            rat: BQ::one(),
            phase: frac(phase),
            cyc: BTreeMap::new(),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut c = self.cyc.clone();
        for (t, k) in &o.cyc {
            *c.entry(*t).or_insert(0) += k;
        }
        c.retain(|_, k| *k != 0);
        SymConst {
            rat: &self.rat * &o.rat,
            phase: frac(self.phase + o.phase),
            cyc: c,
        }
    }

    pub fn pow(&self, e: i64) -> Self {
        let rat = if e >= 0 {
            super::laurent::pow_bq(&self.rat, e)
        } else {
            super::laurent::pow_bq(&self.rat.recip(), -e)
        };
        SymConst {
            rat,
            phase: frac(self.phase * e),
            cyc: self.cyc.iter().map(|(t, k)| (*t, k * e)).collect(),
        }
    }

    pub fn inv(&self) -> Self {
        self.pow(-1)
    }

    /// Multiplies by `(1 - e^{2πiθ})^k`.
    pub fn times_one_minus(&mut self, theta: Q, k: i64) -> Result<()> {
        let t = frac(theta);
        if t.is_zero() {
            return Err(Error::Arithmetic("constant factor (1 - 1) vanishes".into()));
        }
        if t == Q::new(1, 2) {
            self.rat *= super::laurent::pow_bq(&bq(2), k);
            return Ok(());
        }
        let t = if t > Q::new(1, 2) {
            // 1 - ζ = -ζ (1 - ζ^{-1}).
            self.phase = frac(self.phase + (t + Q::new(1, 2)) * k);
            Q::one() - t
        } else {
            t
        };
        let e = self.cyc.entry(t).or_insert(0);
        *e += k;
        if *e == 0 {
            self.cyc.remove(&t);
        }
        Ok(())
    }

    pub fn to_cyclotomic(&self) -> Cyclotomic {
        let mut c = Cyclotomic::from_rational(self.rat.clone()).mul(&Cyclotomic::root_of_unity(self.phase));
        let one = Cyclotomic::one();
        for (t, k) in &self.cyc {
            let b = one.sub(&Cyclotomic::root_of_unity(*t));
            c = c.mul(&b.pow(*k).expect("1 - ζ is a unit for ζ != 1"));
        }
        c
    }

    pub fn as_rational(&self) -> Option<BQ> {
        if self.cyc.is_empty() {
            return if self.phase.is_zero() {
                Some(self.rat.clone())
            } else if self.phase == Q::new(1, 2) {
                Some(-self.rat.clone())
            } else {
                None
            };
        }
        self.to_cyclotomic().as_rational()
    }

    pub fn to_complex(&self) -> Complex64 {
        let mut z = Complex64::from_polar(
            self.rat.to_f64().unwrap_or(f64::NAN),
            2.0 * std::f64::consts::PI * to_f64(self.phase),
        );
        for (t, k) in &self.cyc {
            let b = Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * to_f64(*t));
            z *= b.powi(*k as i32);
        }
        z
    }

    pub fn exact_eq(&self, o: &Self) -> bool {
        self == o || self.to_cyclotomic() == o.to_cyclotomic()
    }
}

pub fn to_f64(x: Q) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}

/// `1 - e^{2πi·phase} · x^exps`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Binomial {
    pub exps: Vec<Q>,
    pub phase: Q,
}

/// Image of each old variable under a substitution: `x_j ↦ e^{2πi·phase_j} · y^{exps_j}`.
/// The phase is a fixed rational lift, so the map is a ring homomorphism even
/// for rational exponents.
#[derive(Clone, Debug, PartialEq)]
pub struct MonomialMap {
    pub new_nvars: usize,
    pub images: Vec<(Q, Vec<Q>)>,
}

impl MonomialMap {
    /// Torus variables mapped by an integer/rational matrix `m` (new exps of old
    /// variable `j+1` are `m[j]`) with phases and v-shifts; `v ↦ v`.
    pub fn torus(phases: &[Q], vshift: &[Q], m: &[Vec<Q>]) -> Self {
        let k = m.first().map_or(0, |r| r.len());
        let mut images = vec![(Q::zero(), unit(k + 1, 0))];
        for j in 0..m.len() {
            let mut e = vec![vshift[j]];
            e.extend_from_slice(&m[j]);
            images.push((phases[j], e));
        }
        MonomialMap {
            new_nvars: k + 1,
            images,
        }
    }
}

fn unit(n: usize, i: usize) -> Vec<Q> {
    (0..n).map(|k| if k == i { Q::one() } else { Q::zero() }).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct FactoredFn {
    pub nvars: usize,
    pub den: i64,
    pub constant: SymConst,
    pub monomial: Vec<Q>,
    pub factors: BTreeMap<Binomial, i64>,
}

impl FactoredFn {
    pub fn one(nvars: usize) -> Self {
        FactoredFn {
            nvars,
            den: 1,
            constant: SymConst::one(),
            monomial: vec![Q::zero(); nvars],
            factors: BTreeMap::new(),
        }
    }

    pub fn from_rational(c: BQ, nvars: usize) -> Self {
        let mut f = Self::one(nvars);
        f.constant = SymConst::from_rational(c);
        f
    }

    pub fn from_const(c: SymConst, nvars: usize) -> Self {
        let mut f = Self::one(nvars);
        f.constant = c;
        f
    }

    pub fn monomial(exps: Vec<Q>) -> Self {
        let mut f = Self::one(exps.len());
        f.monomial = exps;
        f
    }

    /// `(1 - e^{2πi·phase} x^exps)^mult`.
    pub fn binomial(phase: Q, exps: Vec<Q>, mult: i64) -> Result<Self> {
        let mut f = Self::one(exps.len());
        f.mul_binomial(phase, &exps, mult)?;
        Ok(f)
    }

    pub fn is_constant(&self) -> bool {
        self.factors.is_empty() && self.monomial.iter().all(|x| x.is_zero())
    }

    fn raise_den(&mut self, new_den: i64) {
        if new_den == self.den {
            return;
        }
        debug_assert!(new_den % self.den == 0);
        let old = std::mem::take(&mut self.factors);
        self.den = new_den;
        for (b, k) in old {
            self.mul_binomial(b.phase, &b.exps, k)
                .expect("re-splitting a nonconstant binomial cannot vanish");
        }
    }

    /// Multiplies by `(1 - e^{2πi·phase} x^exps)^mult`, splitting it canonically.
    pub fn mul_binomial(&mut self, phase: Q, exps: &[Q], mult: i64) -> Result<()> {
        if mult == 0 {
            return Ok(());
        }
        if exps.iter().all(|x| x.is_zero()) {
            return self.constant.times_one_minus(phase, mult);
        }
        let need = self.den.lcm(&lcm_den(exps));
        self.raise_den(need);
        let den = self.den;
        let p: Vec<i64> = exps.iter().map(|x| (*x * den).to_integer()).collect();
        let g = p.iter().fold(0i64, |a, &b| a.gcd(&b));
        let prim: Vec<i64> = p.iter().map(|x| x / g).collect();
        let negative = prim.iter().find(|&&x| x != 0).is_some_and(|&x| x < 0);
        let sgn = if negative { -1 } else { 1 };
        let key_exps: Vec<Q> = prim.iter().map(|&x| Q::new(sgn * x, den)).collect();
        for j in 0..g {
            let omega = frac((phase + j) / g);
            let (bphase, kk) = if negative {
                // 1 - ω X = -ω X (1 - ω^{-1} X^{-1}).
                self.constant.phase = frac(self.constant.phase + (omega + Q::new(1, 2)) * mult);
                for (m, x) in self.monomial.iter_mut().zip(&prim) {
                    *m += Q::new(*x, den) * mult;
                }
                (frac(-omega), mult)
            } else {
                (omega, mult)
            };
            let key = Binomial {
                exps: key_exps.clone(),
                phase: bphase,
            };
            let e = self.factors.entry(key.clone()).or_insert(0);
            *e += kk;
            if *e == 0 {
                self.factors.remove(&key);
            }
        }
        Ok(())
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.nvars, o.nvars, "variable count mismatch");
        let mut r = self.clone();
        r.raise_den(self.den.lcm(&o.den));
        r.constant = r.constant.mul(&o.constant);
        for (a, b) in r.monomial.iter_mut().zip(&o.monomial) {
            *a += b;
        }
        for (b, k) in &o.factors {
            r.mul_binomial(b.phase, &b.exps, *k).expect("nonconstant");
        }
        r
    }

    pub fn pow(&self, e: i64) -> Self {
        FactoredFn {
            nvars: self.nvars,
            den: self.den,
            constant: self.constant.pow(e),
            monomial: self.monomial.iter().map(|x| *x * e).collect(),
            factors: if e == 0 {
                BTreeMap::new()
            } else {
                self.factors.iter().map(|(b, k)| (b.clone(), k * e)).collect()
            },
        }
    }

    pub fn inv(&self) -> Self {
        self.pow(-1)
    }

    pub fn div(&self, o: &Self) -> Self {
        self.mul(&o.inv())
    }

    /// `self / o` if it is a constant.
    pub fn ratio_constant(&self, o: &Self) -> Option<SymConst> {
        let r = self.div(o);
        r.is_constant().then_some(r.constant)
    }

    pub fn exact_eq(&self, o: &Self) -> bool {
        self.ratio_constant(o)
            .is_some_and(|c| c.exact_eq(&SymConst::one()))
    }

    /// Applies a substitution of variables.
    pub fn substitute(&self, map: &MonomialMap) -> Result<Self> {
        assert_eq!(map.images.len(), self.nvars, "substitution arity");
        let n = map.new_nvars;
        let image = |exps: &[Q], phase: Q| -> (Q, Vec<Q>) {
            let mut ph = phase;
            let mut e = vec![Q::zero(); n];
            for (j, x) in exps.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                let (p, ej) = &map.images[j];
                ph += *x * *p;
                for (a, b) in e.iter_mut().zip(ej) {
                    *a += *x * *b;
                }
            }
            (ph, e)
        };
        let mut out = FactoredFn::from_const(self.constant.clone(), n);
        let (ph, mono) = image(&self.monomial, Q::zero());
        out.constant = out.constant.mul(&SymConst::root_of_unity(ph));
        out.monomial = mono;
        for (b, k) in &self.factors {
            let (ph, e) = image(&b.exps, b.phase);
            if e.iter().all(|x| x.is_zero()) && frac(ph).is_zero() {
                return Err(Error::Internal(
                    "a factor vanishes identically after substitution".into(),
                ));
            }
            out.mul_binomial(ph, &e, *k)?;
        }
        Ok(out)
    }

    /// Evaluates at the point whose variables have the given logarithms.
    pub fn eval_log(&self, logs: &[Complex64]) -> Complex64 {
        let mono = |e: &[Q]| -> Complex64 {
            let s: Complex64 = e.iter().zip(logs).map(|(x, l)| l * to_f64(*x)).sum();
            s.exp()
        };
        let mut z = self.constant.to_complex() * mono(&self.monomial);
        for (b, k) in &self.factors {
            let w = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * to_f64(b.phase));
            let f = Complex64::new(1.0, 0.0) - w * mono(&b.exps);
            z *= f.powi(*k as i32);
        }
        z
    }

    /// Number of binomial factors counted with sign of multiplicity.
    pub fn degree_count(&self) -> i64 {
        self.factors.values().sum()
    }

    pub fn only_v(&self) -> bool {
        self.monomial.iter().skip(1).all(|x| x.is_zero())
            && self.factors.keys().all(|b| b.exps.iter().skip(1).all(|x| x.is_zero()))
    }

    /// Drops the torus variables of a function that depends on `v` only.
    pub fn to_v_only(&self) -> Result<Self> {
        if !self.only_v() {
            return Err(Error::Internal("function depends on torus variables".into()));
        }
        let map = MonomialMap {
            new_nvars: 1,
            images: (0..self.nvars)
                .map(|j| (Q::zero(), vec![if j == 0 { Q::one() } else { Q::zero() }]))
                .collect(),
        };
        self.substitute(&map)
    }

    /// The element `d` as a function of `v` (with `extra` further variables).
    pub fn from_normalizing(d: &NormalizingElement, nvars: usize) -> Self {
        let v = |e: i64| -> Vec<Q> {
            let mut x = vec![Q::zero(); nvars];
            x[0] = q(e);
            x
        };
        let mut f = FactoredFn::from_rational(d.constant.clone(), nvars);
        // v - v^{-1} = -v^{-1} (1 - v^2).
        let mut vm = FactoredFn::binomial(Q::zero(), v(2), 1).unwrap();
        vm.constant = SymConst::from_rational(bq(-1));
        vm.monomial = v(-1);
        f = f.mul(&vm.pow(d.vexp));
        for (n, k) in &d.qints {
            let n = *n as i64;
            // [n] = v^{1-n} (1 - v^{2n}) / (1 - v^2).
            let mut b = FactoredFn::binomial(Q::zero(), v(2 * n), 1).unwrap();
            b.mul_binomial(Q::zero(), &v(2), -1).unwrap();
            b.monomial = v(1 - n);
            f = f.mul(&b.pow(*k));
        }
        f
    }

    /// Certifies a function of `v` alone as `sign · d` with `d ∈ 𝐌`.
    pub fn factor_into_m(&self) -> Result<(NormalizingElement, i64)> {
        let f = self.to_v_only()?;
        if f.den != 1 {
            return Err(Error::NotInM("fractional powers of v".into()));
        }
        let mut by_phase: BTreeMap<Q, i64> = BTreeMap::new();
        for (b, k) in &f.factors {
            debug_assert_eq!(b.exps, vec![Q::one()]);
            by_phase.insert(b.phase, *k);
        }
        let mut n_e: BTreeMap<u64, i64> = BTreeMap::new();
        for (ph, k) in &by_phase {
            let e = *ph.denom();
            match n_e.get(&(e as u64)) {
                Some(m) if m != k => {
                    return Err(Error::NotInM(format!(
                        "roots of unity of order {e} occur with unequal multiplicities"
                    )))
                }
                _ => {
                    n_e.insert(e as u64, *k);
                }
            }
        }
        for &e in n_e.keys() {
            let count = by_phase.keys().filter(|p| *p.denom() as u64 == e).count() as u64;
            if count != super::cyclotomic::totient(e) {
                return Err(Error::NotInM(format!(
                    "factors of order {e} are not Galois-stable"
                )));
            }
        }
        let (vexp, qints) = certificate_from_cyclotomic(&n_e)?;
        let shape = NormalizingElement {
            constant: BQ::one(),
            vexp,
            qints,
        };
        let c = f
            .ratio_constant(&FactoredFn::from_normalizing(&shape, 1))
            .ok_or_else(|| Error::NotInM("not symmetric under v ↦ v^-1".into()))?;
        let r = c
            .as_rational()
            .ok_or_else(|| Error::NotInM(format!("constant {} is not rational", c.to_cyclotomic())))?;
        let sign = if r.is_negative() { -1 } else { 1 };
        Ok((NormalizingElement::new(r.abs(), shape.vexp, shape.qints)?, sign))
    }

    /// Text form using the given variable names (index 0 is `v`).
    pub fn render(&self, names: &[String]) -> String {
        let mono = |e: &[Q]| -> String {
            let mut parts = vec![];
            for (x, n) in e.iter().zip(names) {
                if x.is_zero() {
                    continue;
                }
                if x.is_one() {
                    parts.push(n.clone());
                } else {
                    parts.push(format!("{n}^{x}"));
                }
            }
            parts.join("*")
        };
        let mut out = String::new();
        let c = match self.constant.as_rational() {
            Some(r) => r.to_string(),
            None => format!("({})", self.constant.to_cyclotomic()),
        };
        out.push_str(&c);
        let m = mono(&self.monomial);
        if !m.is_empty() {
            let _ = write!(out, " * {m}");
        }
        let fmt_b = |b: &Binomial| -> String {
            let m = mono(&b.exps);
            let ph = frac(b.phase);
            if ph.is_zero() {
                format!("(1 - {m})")
            } else if ph == Q::new(1, 2) {
                format!("(1 + {m})")
            } else {
                format!("(1 - e({ph})*{m})")
            }
        };
        let num: Vec<String> = self
            .factors
            .iter()
            .filter(|(_, k)| **k > 0)
            .map(|(b, k)| if *k == 1 { fmt_b(b) } else { format!("{}^{k}", fmt_b(b)) })
            .collect();
        let den: Vec<String> = self
            .factors
            .iter()
            .filter(|(_, k)| **k < 0)
            .map(|(b, k)| if *k == -1 { fmt_b(b) } else { format!("{}^{}", fmt_b(b), -k) })
            .collect();
        if !num.is_empty() {
            let _ = write!(out, " * {}", num.join(""));
        }
        if !den.is_empty() {
            let _ = write!(out, " / ({})", den.join(""));
        }
        out
    }
}

/// Default variable names `v, x1, x2, …`.
pub fn default_names(nvars: usize) -> Vec<String> {
    let mut v = vec!["v".to_string()];
    v.extend((1..nvars).map(|i| format!("x{i}")));
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactscalars::normalizing::factor_into_m;

    fn qv(v: &[i64]) -> Vec<Q> {
        v.iter().map(|&x| q(x)).collect()
    }

    #[test]
    fn splitting_and_orientation() {
        // 1 - v^2 = (1 - v)(1 + v); 1 - v^-1 = -v^-1 (1 - v).
        let f = FactoredFn::binomial(Q::zero(), qv(&[2]), 1).unwrap();
        assert_eq!(f.factors.len(), 2);
        let g = FactoredFn::binomial(Q::zero(), qv(&[-1]), 1).unwrap();
        assert_eq!(g.monomial, qv(&[-1]));
        assert_eq!(g.constant.as_rational(), Some(bq(-1)));
    }

    #[test]
    fn equality_across_denominators() {
        // 1 - v = (1 - v^{1/2})(1 + v^{1/2}).
        let a = FactoredFn::binomial(Q::zero(), qv(&[1]), 1).unwrap();
        let mut b = FactoredFn::binomial(Q::zero(), vec![Q::new(1, 2)], 1).unwrap();
        b.mul_binomial(Q::new(1, 2), &[Q::new(1, 2)], 1).unwrap();
        assert!(a.exact_eq(&b));
    }

    #[test]
    fn normalizing_roundtrip_through_factored() {
        let d = NormalizingElement::new(BQ::new(3.into(), 2.into()), 2, [(2, -1), (3, 1), (6, 2)].into_iter().collect()).unwrap();
        let f = FactoredFn::from_normalizing(&d, 1);
        let (e, s) = f.factor_into_m().unwrap();
        assert_eq!((e, s), (d.clone(), 1));
        let (e2, _) = factor_into_m(&d.expand()).unwrap();
        assert_eq!(e2, d);
        let z = f.eval_log(&[Complex64::new(2f64.ln(), 0.0)]);
        let expect = d.expand().eval_f64(2.0);
        assert!((z.re - expect).abs() < 1e-9 && z.im.abs() < 1e-9);
    }

    #[test]
    fn substitution_restricts_characters() {
        // (1 - x) at x = -1 gives 2; at x = v^-2 gives (1 - v^-2).
        let f = FactoredFn::binomial(Q::zero(), qv(&[0, 1]), 1).unwrap();
        let at_minus_one = MonomialMap { new_nvars: 1, images: vec![(Q::zero(), qv(&[1])), (Q::new(1, 2), qv(&[0]))] };
        let g = f.substitute(&at_minus_one).unwrap();
        assert_eq!(g.constant.as_rational(), Some(bq(2)));
        let at_one = MonomialMap { new_nvars: 1, images: vec![(Q::zero(), qv(&[1])), (Q::zero(), qv(&[0]))] };
        assert!(f.substitute(&at_one).is_err());
    }

    #[test]
    fn cyclotomic_constants_resolve() {
        // (1 - i)(1 + i) = 2 built from two constant binomials.
        let mut c = SymConst::one();
        c.times_one_minus(Q::new(1, 4), 1).unwrap();
        c.times_one_minus(Q::new(3, 4), 1).unwrap();
        assert_eq!(c.as_rational(), Some(bq(2)));
    }
}
