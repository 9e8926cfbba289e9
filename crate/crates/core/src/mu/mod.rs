//! The μ-function of a normalized affine Hecke algebra as a ledger of binomial
//! factors, its pole and zero sets along cosets, and regularization.
//!
//! With `a(α) = m_R(α^∨)`, `b(α) = m_R(α^∨+1)` and `2m± = a ± b`,
//!
//! ```text
//! μ = v^{-2 m_W(w₀)} · d · Π_{α ∈ R₀} (1 - α⁻¹)(1 + α⁻¹)
//!                          / ((1 + v^{-2m₋(α)} α⁻¹)(1 - v^{-2m₊(α)} α⁻¹)).
//! ```
//!
//! Functions are [`FactoredFn`]s in the variables `v, x₁, …, xₙ`, where `x_i`
//! is the character with coordinate vector `e_i` in X.

use crate::error::{Error, Result};
use crate::exactscalars::factored::{default_names, FactoredFn};
use crate::exactscalars::NormalizingElement;
use crate::rootdata::lattice::{q, Q};
use crate::rootdata::{m_w, BasedRootDatum, ParameterFunction, WeylGroup};
use crate::torus::{eval_numeric, AffineTorusMap, Coset};
use num_complex::Complex64;
use num_traits::Zero;
use serde::Serialize;
use std::fmt::Write;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum FactorKind {
    /// Numerator `1 - α⁻¹`.
    ZeroPlus,
    /// Numerator `1 + α⁻¹`.
    ZeroMinus,
    /// Denominator `1 + v^{-2m₋} α⁻¹`.
    PoleMinus,
    /// Denominator `1 - v^{-2m₊} α⁻¹`.
    PolePlus,
}

impl FactorKind {
    pub const ALL: [FactorKind; 4] = [
        FactorKind::ZeroPlus,
        FactorKind::ZeroMinus,
        FactorKind::PoleMinus,
        FactorKind::PolePlus,
    ];

    /// `+1` for numerator factors, `-1` for denominator factors.
    pub fn mult(self) -> i64 {
        match self {
            FactorKind::ZeroPlus | FactorKind::ZeroMinus => 1,
            FactorKind::PoleMinus | FactorKind::PolePlus => -1,
        }
    }

    /// Phase of the coefficient in `1 - e^{2πi·phase} v^k α⁻¹`.
    pub fn phase(self) -> Q {
        match self {
            FactorKind::ZeroPlus | FactorKind::PolePlus => Q::zero(),
            FactorKind::ZeroMinus | FactorKind::PoleMinus => Q::new(1, 2),
        }
    }
}

/// One factor `(1 - e^{2πi·phase} v^{vexp} α⁻¹)^{±1}` of the ledger.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MuFactor {
    pub root: usize,
    pub kind: FactorKind,
    pub vexp: i64,
}

impl MuFactor {
    /// Exponent vector of `v^{vexp} α⁻¹` in `(v, x₁, …, xₙ)`.
    pub fn exps(&self, d: &BasedRootDatum) -> Vec<Q> {
        let mut e = vec![q(self.vexp)];
        e.extend(d.roots[self.root].iter().map(|&c| q(-c)));
        e
    }

    /// Value of `v^{vexp} α⁻¹` at a numeric point.
    pub fn eval(&self, d: &BasedRootDatum, z: &[Complex64], log_v: f64) -> Complex64 {
        let a = eval_numeric(&d.roots[self.root], z);
        let inner = Complex64::new(log_v * self.vexp as f64, 0.0).exp() / a;
        let c = if self.kind.phase().is_zero() { 1.0 } else { -1.0 };
        Complex64::new(1.0, 0.0) - inner * c
    }
}

#[derive(Clone, Debug)]
pub struct MuFunction {
    pub datum: BasedRootDatum,
    pub params: ParameterFunction,
    pub d: NormalizingElement,
    /// Exponent of the prefactor, `-2 m_W(w₀)`.
    pub prefactor: i64,
    pub factors: Vec<MuFactor>,
}

/// The pieces of the Macdonald c-function `c_α` for one root: numerator factors
/// `(1 + v^{-2m₋}α⁻¹)`, `(1 - v^{-2m₊}α⁻¹)` and the denominator `(1 - α⁻²)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CFactors {
    pub root: usize,
    /// v-exponent of the `+` numerator factor, `-2m₋`.
    pub minus_vexp: i64,
    /// v-exponent of the `-` numerator factor, `-2m₊`.
    pub plus_vexp: i64,
}

pub fn c_factors(m: &ParameterFunction, root: usize) -> CFactors {
    CFactors {
        root,
        minus_vexp: -m.m_minus2(root),
        plus_vexp: -m.m_plus2(root),
    }
}

impl CFactors {
    pub fn to_factored(&self, d: &BasedRootDatum) -> FactoredFn {
        let n = d.rank;
        let mut e = vec![Q::zero(); n + 1];
        for (i, &c) in d.roots[self.root].iter().enumerate() {
            e[i + 1] = q(-c);
        }
        let with_v = |k: i64| {
            let mut x = e.clone();
            x[0] = q(k);
            x
        };
        let mut f = FactoredFn::one(n + 1);
        f.mul_binomial(Q::new(1, 2), &with_v(self.minus_vexp), 1).unwrap();
        f.mul_binomial(Q::zero(), &with_v(self.plus_vexp), 1).unwrap();
        let two: Vec<Q> = e.iter().map(|x| *x * 2).collect();
        f.mul_binomial(Q::zero(), &two, -1).unwrap();
        f
    }
}

/// Pole and zero sets of μ along a coset and the residual inequality.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PoleZeroReport {
    pub p_plus: Vec<usize>,
    pub p_minus: Vec<usize>,
    pub z_plus: Vec<usize>,
    pub z_minus: Vec<usize>,
    pub lhs: i64,
    pub codim: i64,
    pub residual: bool,
}

impl PoleZeroReport {
    pub fn excludes(&self, root: usize, kind: FactorKind) -> bool {
        let set = match kind {
            FactorKind::ZeroPlus => &self.z_plus,
            FactorKind::ZeroMinus => &self.z_minus,
            FactorKind::PoleMinus => &self.p_minus,
            FactorKind::PolePlus => &self.p_plus,
        };
        set.contains(&root)
    }
}

impl MuFunction {
    pub fn build(datum: &BasedRootDatum, m: &ParameterFunction, d: &NormalizingElement) -> Result<Self> {
        let w = WeylGroup::new(datum)?;
        Ok(Self::build_with(datum, m, d, &w))
    }

    pub fn build_with(
        datum: &BasedRootDatum,
        m: &ParameterFunction,
        d: &NormalizingElement,
        w: &WeylGroup,
    ) -> Self {
        let prefactor = if datum.rank == 0 {
            0
        } else {
            -2 * m_w(datum, w.w0(), &m.a)
        };
        let mut factors = vec![];
        for root in 0..datum.num_roots() {
            for kind in FactorKind::ALL {
                let vexp = match kind {
                    FactorKind::ZeroPlus | FactorKind::ZeroMinus => 0,
                    FactorKind::PoleMinus => -m.m_minus2(root),
                    FactorKind::PolePlus => -m.m_plus2(root),
                };
                factors.push(MuFactor { root, kind, vexp });
            }
        }
        MuFunction {
            datum: datum.clone(),
            params: m.clone(),
            d: d.clone(),
            prefactor,
            factors,
        }
    }

    pub fn nvars(&self) -> usize {
        self.datum.rank + 1
    }

    /// Product of `d`, a power of `v` and the ledger factors accepted by `keep`.
    pub fn partial(&self, vexp: i64, keep: impl Fn(&MuFactor) -> bool) -> FactoredFn {
        let n = self.nvars();
        let mut f = FactoredFn::from_normalizing(&self.d, n);
        let mut mono = vec![Q::zero(); n];
        mono[0] = q(vexp);
        f = f.mul(&FactoredFn::monomial(mono));
        for fa in self.factors.iter().filter(|fa| keep(fa)) {
            f.mul_binomial(fa.kind.phase(), &fa.exps(&self.datum), fa.kind.mult())
                .expect("a root character is never constant");
        }
        f
    }

    pub fn to_factored(&self) -> FactoredFn {
        self.partial(self.prefactor, |_| true)
    }

    pub fn pole_zero_sets(&self, l: &Coset) -> PoleZeroReport {
        let mut r = PoleZeroReport {
            p_plus: vec![],
            p_minus: vec![],
            z_plus: vec![],
            z_minus: vec![],
            lhs: 0,
            codim: l.codim() as i64,
            residual: false,
        };
        let half = Q::new(1, 2);
        for k in l.constant_roots(&self.datum) {
            let (ph, e) = l.base.evaluate(&self.datum.roots[k]);
            let m2p = q(-self.params.m_plus2(k));
            let m2m = q(-self.params.m_minus2(k));
            if ph.is_zero() && e.is_zero() {
                r.z_plus.push(k);
            }
            if ph == half && e.is_zero() {
                r.z_minus.push(k);
            }
            if ph.is_zero() && e == m2p {
                r.p_plus.push(k);
            }
            if ph == half && e == m2m {
                r.p_minus.push(k);
            }
        }
        r.lhs = (r.p_plus.len() + r.p_minus.len()) as i64
            - (r.z_plus.len() + r.z_minus.len()) as i64;
        r.residual = r.lhs >= r.codim;
        r
    }

    /// `μ^{(L)}` as a function of `(v, s₁, …, s_k)` on `L = r·T^L`, where
    /// `s_j` is the coordinate of the cocharacter `u_j` of `T^L`.
    pub fn regularize(&self, l: &Coset) -> Result<FactoredFn> {
        let rep = self.pole_zero_sets(l);
        self.regularize_along(&rep, &l.restriction_map())
    }

    /// Drops the factors excluded by `rep` and pulls back along `map`, whose
    /// image must lie in the coset `rep` was computed for.
    pub fn regularize_along(&self, rep: &PoleZeroReport, map: &AffineTorusMap) -> Result<FactoredFn> {
        let f = self.partial(self.prefactor, |fa| !rep.excludes(fa.root, fa.kind));
        f.substitute(&map.to_monomial_map()).map_err(|_| {
            Error::Internal("regularized μ has a factor vanishing identically on the coset".into())
        })
    }

    /// `μ^{({r})}` as a function of `v`.
    pub fn regularize_point(&self, l: &Coset) -> Result<FactoredFn> {
        if l.dim() != 0 {
            return Err(Error::Input("expected a point".into()));
        }
        self.regularize(l)?.to_v_only()
    }

    /// Splits `μ^{(L)}` into the regularized μ of the standard parabolic
    /// subsystem `R_P = R_L` at the base point and the factors of the roots
    /// outside `R_P`, and checks the product exactly.
    pub fn split_mu(&self, l: &Coset, w: &WeylGroup) -> Result<SplitReport> {
        let d = &self.datum;
        let rl = l.constant_roots(d);
        let p: Vec<usize> = (0..d.rank).filter(|i| rl.contains(i)).collect();
        if d.roots_in_span(&p) != rl {
            return Err(Error::Input(
                "coset is not presented over a standard parabolic subsystem".into(),
            ));
        }
        let rep = self.pole_zero_sets(l);
        if !rep.residual {
            return Err(Error::NotResidual(l.render()));
        }
        let wp = w.longest_in_parabolic(d, &p);
        let m_wp = m_w(d, w.get(wp), &self.params.a);
        let m_w0 = -self.prefactor / 2;
        let map = l.restriction_map().to_monomial_map();
        let point = self
            .partial(-2 * m_wp, |fa| rl.contains(&fa.root) && !rep.excludes(fa.root, fa.kind))
            .substitute(&map)?;
        let one = NormalizingElement::one();
        let outside = MuFunction {
            d: one,
            ..self.clone()
        };
        let coset = outside
            .partial(-2 * (m_w0 - m_wp), |fa| !rl.contains(&fa.root))
            .substitute(&map)?;
        let full = self.regularize(l)?;
        let verified = point.mul(&coset).exact_eq(&full);
        if !verified {
            return Err(Error::Internal("μ splitting mismatch".into()));
        }
        Ok(SplitReport {
            subset: p,
            point,
            coset,
            verified,
        })
    }

    /// Checks `μ ∘ s = μ` for each simple reflection by exact pullback.
    pub fn check_w_invariance(&self, w: &WeylGroup) -> Result<bool> {
        let f = self.to_factored();
        let n = self.datum.rank;
        for &s in &w.simple {
            let map = AffineTorusMap::identity(n).then_weyl(w.get(s));
            if !f.substitute(&map.to_monomial_map())?.exact_eq(&f) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Order of the pole of μ at a numeric point, counting ledger factors that
    /// vanish to within `tol` (denominator minus numerator).
    pub fn numeric_pole_order(&self, z: &[Complex64], v0: f64, tol: f64) -> i64 {
        let lv = v0.ln();
        self.factors
            .iter()
            .filter(|fa| fa.eval(&self.datum, z, lv).norm() < tol)
            .map(|fa| -fa.kind.mult())
            .sum()
    }

    /// The ledger, one line per root in index order.
    pub fn render_ledger(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "d = {}", self.d);
        let _ = writeln!(out, "prefactor = v^{}", self.prefactor);
        for k in 0..self.datum.num_roots() {
            let name = root_name(&self.datum, k);
            let mut num = vec![];
            let mut den = vec![];
            for fa in self.factors.iter().filter(|fa| fa.root == k) {
                let sign = if fa.kind.phase().is_zero() { '-' } else { '+' };
                let v = if fa.vexp == 0 {
                    String::new()
                } else {
                    format!("v^{} ", fa.vexp)
                };
                let s = format!("(1 {sign} {v}x^-({name}))");
                if fa.kind.mult() > 0 {
                    num.push(s);
                } else {
                    den.push(s);
                }
            }
            let _ = writeln!(out, "{name}: {} / {}", num.join(""), den.join(""));
        }
        out
    }

    /// Canonical product form.
    pub fn render(&self) -> String {
        self.to_factored().render(&default_names(self.nvars()))
    }
}

/// Splitting of `μ^{(L)}` along a standard parabolic subsystem.
#[derive(Clone, Debug)]
pub struct SplitReport {
    pub subset: Vec<usize>,
    pub point: FactoredFn,
    pub coset: FactoredFn,
    pub verified: bool,
}

/// A root as a combination of simple roots, e.g. `a1+2a2` or `-a1`.
pub fn root_name(d: &BasedRootDatum, k: usize) -> String {
    let mut s = String::new();
    for (i, &c) in d.simple_coords[k].iter().enumerate() {
        if c == 0 {
            continue;
        }
        if c < 0 {
            s.push('-');
        } else if !s.is_empty() {
            s.push('+');
        }
        if c.abs() != 1 {
            let _ = write!(s, "{}", c.abs());
        }
        let _ = write!(s, "a{}", i + 1);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactscalars::cyclotomic::bq;
    use crate::exactscalars::laurent::{q_integer, v_minus_vinv};
    use crate::exactscalars::ratfunc::RationalFunctionV;
    use crate::exactscalars::normalizing::q_int_element;
    use crate::rootdata::{build_from_expr, LatticeChoice};
    use crate::torus::TorusPoint;

    fn a1(m: i64) -> (BasedRootDatum, ParameterFunction) {
        let d = build_from_expr("A1", &LatticeChoice::Root).unwrap();
        let p = ParameterFunction::uniform(&d, m).unwrap();
        (d, p)
    }

    /// `(1 - c v^k x^e)` built by hand.
    fn bin(phase: Q, v: i64, x: i64) -> FactoredFn {
        FactoredFn::binomial(phase, vec![q(v), q(x)], 1).unwrap()
    }

    #[test]
    fn a1_mu_matches_closed_form() {
        let (d, m) = a1(1);
        let mu = MuFunction::build(&d, &m, &NormalizingElement::one()).unwrap();
        assert_eq!(mu.prefactor, -2);
        // Oracle: v^-2 (1 - x)(1 - x^-1) / ((1 - v^-2 x)(1 - v^-2 x^-1)), x = α.
        let mut o = FactoredFn::monomial(vec![q(-2), q(0)]);
        o = o.mul(&bin(Q::zero(), 0, 1)).mul(&bin(Q::zero(), 0, -1));
        o = o.div(&bin(Q::zero(), -2, 1)).div(&bin(Q::zero(), -2, -1));
        assert!(mu.to_factored().exact_eq(&o));
        let mu2 = MuFunction::build(&d, &m, &q_int_element(2, 1)).unwrap();
        let ratio = mu2.to_factored().div(&mu.to_factored());
        let qi = FactoredFn::from_normalizing(&q_int_element(2, 1), 2);
        assert!(ratio.exact_eq(&qi));
    }

    #[test]
    fn zero_labels_give_constant_mu() {
        let (d, m) = a1(0);
        let mu = MuFunction::build(&d, &m, &NormalizingElement::one()).unwrap();
        let f = mu.to_factored();
        assert!(f.is_constant());
        assert_eq!(f.constant.as_rational(), Some(bq(1)));
    }

    #[test]
    fn c_function_examples() {
        let (d, m) = a1(1);
        let c = c_factors(&m, 0);
        assert_eq!((c.minus_vexp, c.plus_vexp), (0, -2));
        let (_, m0) = a1(0);
        assert!(c_factors(&m0, 0).to_factored(&d).is_constant());
        // Unequal labels on a coroot in 2Y: exponents -(a+b), -(a-b).
        let mut lab = std::collections::BTreeMap::new();
        lab.insert("s1".to_string(), 3);
        lab.insert("s0".to_string(), 1);
        let m31 = ParameterFunction::from_labels(&d, &lab).unwrap();
        let c = c_factors(&m31, 0);
        assert_eq!((c.plus_vexp, c.minus_vexp), (-4, -2));
    }

    #[test]
    fn pole_zero_examples() {
        let (d, m) = a1(1);
        let mu = MuFunction::build(&d, &m, &NormalizingElement::one()).unwrap();
        let t = mu.pole_zero_sets(&Coset::whole(1));
        assert!(t.residual && t.lhs == 0 && t.p_plus.is_empty());
        // X = Q(A1): α has coordinate 1, α^∨ coordinate 2.
        let r = Coset::point(TorusPoint::new(vec![q(0)], vec![q(-2)]));
        let rep = mu.pole_zero_sets(&r);
        assert_eq!(rep.p_plus, vec![0]);
        assert!(rep.p_minus.is_empty() && rep.z_plus.is_empty() && rep.z_minus.is_empty());
        assert!(rep.residual && rep.lhs == 1);
        let e = Coset::point(TorusPoint::identity(1));
        let rep = mu.pole_zero_sets(&e);
        assert_eq!(rep.z_plus, vec![0, 1]);
        assert_eq!(rep.lhs, -2);
        assert!(!rep.residual);
    }

    #[test]
    fn a1_regularization_by_hand() {
        let (d, m) = a1(1);
        let mu = MuFunction::build(&d, &m, &NormalizingElement::one()).unwrap();
        let r = Coset::point(TorusPoint::new(vec![q(0)], vec![q(-2)]));
        let f = mu.regularize_point(&r).unwrap();
        // v^-2 (1 - v^2)(1 - v^-2) / (1 - v^-4) = -(v - v^-1)/(v + v^-1).
        let (e, sign) = f.factor_into_m().unwrap();
        let expect = RationalFunctionV::new(v_minus_vinv(), q_integer(2)).unwrap();
        assert_eq!(e.expand(), expect);
        assert_eq!(sign, -1);
        assert_eq!(e.vanishing_order(), 1);
        let whole = mu.regularize(&Coset::whole(1)).unwrap();
        assert!(whole.exact_eq(&mu.to_factored()));
    }

    #[test]
    fn invariance_and_ledger() {
        for t in ["A2", "B2", "G2"] {
            let d = build_from_expr(t, &LatticeChoice::Root).unwrap();
            let m = ParameterFunction::uniform(&d, 2).unwrap();
            let w = WeylGroup::new(&d).unwrap();
            let mu = MuFunction::build_with(&d, &m, &NormalizingElement::one(), &w);
            assert!(mu.check_w_invariance(&w).unwrap(), "{t}");
        }
        let (d, m) = a1(1);
        let mu = MuFunction::build(&d, &m, &NormalizingElement::one()).unwrap();
        let s = mu.render_ledger();
        assert!(s.contains("a1: (1 - x^-(a1))(1 + x^-(a1)) / (1 + x^-(a1))(1 - v^-2 x^-(a1))"));
    }

    #[test]
    fn a2_split_along_parabolic() {
        let d = build_from_expr("A2", &LatticeChoice::Root).unwrap();
        let m = ParameterFunction::uniform(&d, 1).unwrap();
        let w = WeylGroup::new(&d).unwrap();
        let mu = MuFunction::build_with(&d, &m, &NormalizingElement::one(), &w);
        // L = {α1 = v^-2}: base -α1^∨/1 lies in T_L, U = ker α1.
        let u = crate::rootdata::lattice::integer_kernel(&vec![d.roots[0].clone()], 2);
        let g: Vec<Q> = d.coroots[0].iter().map(|&c| q(-c)).collect();
        let l = Coset::new(TorusPoint::new(vec![q(0); 2], g), u);
        assert!(mu.pole_zero_sets(&l).residual);
        let s = mu.split_mu(&l, &w).unwrap();
        assert!(s.verified);
        assert_eq!(s.subset, vec![0]);
        // The point part is the A1 formal degree, up to the sign.
        let (e, _) = s.point.to_v_only().unwrap().factor_into_m().unwrap();
        assert_eq!(e.render(), "(v-v^-1) * [2]^-1");
    }
}
