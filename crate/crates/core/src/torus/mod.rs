//! Points and cosets of the complex torus `T = Hom(X, C^×)` with values in
//! `C[v^{±1}]`, tempered slices at a fixed `v₀ > 1`, and the finite groups
//! `K_L`, `K_L^n` attached to a coset.
//!
//! A point is stored as `(θ, γ)` with `θ ∈ Y⊗Q / Y` and `γ ∈ Y⊗Q`; a
//! character `x` takes the value `e^{2πi<θ,x>} v^{<γ,x>}`.

use crate::error::{Error, Result};
use crate::exactscalars::cyclotomic::Cyclotomic;
use crate::exactscalars::factored::MonomialMap;
use crate::rootdata::lattice::{
    as_integral, dot, frac, frac_vec, hnf, integer_kernel, q, qdot, qinverse, qmat_mul, qmat_vec,
    qrank, saturate, to_qmat, torsion_solutions, transpose, IMat, QMat, Q,
};
use crate::rootdata::{BasedRootDatum, FiniteAbelianGroup, WeylElement, WeylGroup};
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;
use serde::Serialize;
use std::f64::consts::PI;
use std::fmt;

fn qstr(v: &[Q]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn f(x: Q) -> f64 {
    x.numer().to_f64().unwrap() / x.denom().to_f64().unwrap()
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TorusPoint {
    /// Torsion part, reduced into `[0, 1)`.
    pub torsion: Vec<Q>,
    /// Exponent of `v`.
    pub gamma: Vec<Q>,
}

impl TorusPoint {
    pub fn identity(n: usize) -> Self {
        TorusPoint {
            torsion: vec![Q::zero(); n],
            gamma: vec![Q::zero(); n],
        }
    }

    pub fn new(torsion: Vec<Q>, gamma: Vec<Q>) -> Self {
        assert_eq!(torsion.len(), gamma.len());
        TorusPoint {
            torsion: frac_vec(&torsion),
            gamma,
        }
    }

    pub fn torsion_only(torsion: Vec<Q>) -> Self {
        let n = torsion.len();
        Self::new(torsion, vec![Q::zero(); n])
    }

    pub fn dim(&self) -> usize {
        self.gamma.len()
    }

    /// `x(p) = e^{2πi·phase} v^{vexp}`, returned as `(phase mod 1, vexp)`.
    pub fn evaluate(&self, x: &[i64]) -> (Q, Q) {
        (frac(qdot(&self.torsion, x)), qdot(&self.gamma, x))
    }

    /// `x(p) = ζ·v^n` with `ζ` an explicit root of unity.
    pub fn evaluate_character(&self, x: &[i64]) -> (Cyclotomic, Q) {
        let (ph, n) = self.evaluate(x);
        (Cyclotomic::root_of_unity(ph), n)
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::new(
            self.torsion.iter().zip(&o.torsion).map(|(a, b)| a + b).collect(),
            self.gamma.iter().zip(&o.gamma).map(|(a, b)| a + b).collect(),
        )
    }

    pub fn inv(&self) -> Self {
        Self::new(
            self.torsion.iter().map(|a| -a).collect(),
            self.gamma.iter().map(|a| -a).collect(),
        )
    }

    pub fn div(&self, o: &Self) -> Self {
        self.mul(&o.inv())
    }

    pub fn is_identity(&self) -> bool {
        self.torsion.iter().chain(&self.gamma).all(|x| x.is_zero())
    }

    pub fn is_torsion(&self) -> bool {
        self.gamma.iter().all(|x| x.is_zero())
    }

    /// `w·p`, i.e. `(w·p)(x) = p(w⁻¹x)`.
    pub fn act(&self, w: &WeylElement) -> Self {
        let m = to_qmat(&w.matrix_y);
        Self::new(qmat_vec(&m, &self.torsion), qmat_vec(&m, &self.gamma))
    }

    /// True when every character takes a value `ζ v^n` with `n ∈ Z`.
    pub fn is_l_point(&self) -> bool {
        self.gamma.iter().all(|x| x.is_integer())
    }

    /// Coordinates `z` with `x(p(v₀)) = exp(<x, z>)`.
    pub fn logs(&self, v0: f64) -> Vec<Complex64> {
        let lv = v0.ln();
        self.torsion
            .iter()
            .zip(&self.gamma)
            .map(|(t, g)| Complex64::new(f(*g) * lv, 2.0 * PI * f(*t)))
            .collect()
    }

    pub fn render(&self) -> String {
        format!("zeta=({}) gamma=({})", qstr(&self.torsion), qstr(&self.gamma))
    }
}

impl fmt::Display for TorusPoint {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        fm.write_str(&self.render())
    }
}

impl Serialize for TorusPoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("TorusPoint", 2)?;
        let z: Vec<String> = self.torsion.iter().map(|x| x.to_string()).collect();
        let g: Vec<String> = self.gamma.iter().map(|x| x.to_string()).collect();
        st.serialize_field("zeta", &z)?;
        st.serialize_field("gamma", &g)?;
        st.end()
    }
}

/// `x(p)` for a numeric point given by log coordinates.
pub fn eval_numeric(x: &[i64], z: &[Complex64]) -> Complex64 {
    let s: Complex64 = x.iter().zip(z).map(|(a, b)| b * (*a as f64)).sum();
    s.exp()
}

/// The map `t ↦ b · λ(t)` from a torus of dimension `source_dim` into `T`,
/// where `λ` has cocharacter matrix `lin` (target coordinates by rows, source
/// cocharacters by columns).  Rational entries describe maps into a quotient
/// of `T` by a finite group.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineTorusMap {
    pub base: TorusPoint,
    pub lin: QMat,
    pub source_dim: usize,
}

impl AffineTorusMap {
    pub fn new(base: TorusPoint, lin: QMat, source_dim: usize) -> Self {
        debug_assert_eq!(lin.len(), base.dim());
        debug_assert!(lin.iter().all(|r| r.len() == source_dim));
        AffineTorusMap {
            base,
            lin,
            source_dim,
        }
    }

    pub fn identity(n: usize) -> Self {
        let lin = (0..n)
            .map(|i| (0..n).map(|j| q((i == j) as i64)).collect())
            .collect();
        Self::new(TorusPoint::identity(n), lin, n)
    }

    /// A constant map from the trivial torus.
    pub fn constant(p: TorusPoint) -> Self {
        let n = p.dim();
        Self::new(p, vec![vec![]; n], 0)
    }

    pub fn target_dim(&self) -> usize {
        self.base.dim()
    }

    pub fn apply(&self, p: &TorusPoint) -> TorusPoint {
        let t = qmat_vec(&self.lin, &p.torsion);
        let g = qmat_vec(&self.lin, &p.gamma);
        self.base.mul(&TorusPoint::new(t, g))
    }

    /// The substitution of coordinate functions realizing the pullback.
    pub fn to_monomial_map(&self) -> MonomialMap {
        if self.target_dim() == 0 {
            return MonomialMap {
                new_nvars: self.source_dim + 1,
                images: vec![(Q::zero(), unit_q(self.source_dim + 1, 0))],
            };
        }
        let mut m = MonomialMap::torus(&self.base.torsion, &self.base.gamma, &self.lin);
        m.new_nvars = self.source_dim + 1;
        for img in m.images.iter_mut() {
            img.1.resize(self.source_dim + 1, Q::zero());
        }
        m
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &AffineTorusMap) -> Self {
        assert_eq!(self.source_dim, inner.target_dim());
        let lin = if inner.source_dim == 0 {
            vec![vec![]; self.target_dim()]
        } else if self.source_dim == 0 {
            vec![vec![Q::zero(); inner.source_dim]; self.target_dim()]
        } else {
            qmat_mul(&self.lin, &inner.lin)
        };
        Self::new(self.apply(&inner.base), lin, inner.source_dim)
    }

    /// `w ∘ self`.
    pub fn then_weyl(&self, w: &WeylElement) -> Self {
        let m = to_qmat(&w.matrix_y);
        let lin = if self.source_dim == 0 {
            self.lin.clone()
        } else {
            qmat_mul(&m, &self.lin)
        };
        Self::new(self.base.act(w), lin, self.source_dim)
    }

    /// Rank of the cocharacter map.
    pub fn rank(&self) -> usize {
        if self.source_dim == 0 || self.target_dim() == 0 {
            0
        } else {
            qrank(&self.lin)
        }
    }

    pub fn render(&self) -> String {
        let rows: Vec<String> = self.lin.iter().map(|r| format!("[{}]", qstr(r))).collect();
        format!("base {} lin [{}]", self.base, rows.join(" "))
    }
}

fn unit_q(n: usize, i: usize) -> Vec<Q> {
    (0..n).map(|k| q((k == i) as i64)).collect()
}

/// Canonical data identifying a coset: the Hermite basis of its cocharacter
/// lattice and the values of the base point on the Hermite basis of the
/// characters constant on it.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CosetKey {
    pub u: IMat,
    pub values: Vec<(Q, Q)>,
}

/// A coset `L = r·T^L` of a subtorus.  `u` holds a Hermite-reduced basis of the
/// saturated cocharacter lattice of `T^L` (rows in Y).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coset {
    pub base: TorusPoint,
    pub u: IMat,
}

impl Coset {
    pub fn new(base: TorusPoint, u: IMat) -> Self {
        let n = base.dim();
        let u = if u.is_empty() { u } else { hnf(&saturate(&u, n)) };
        Coset { base, u }
    }

    pub fn whole(n: usize) -> Self {
        let u = (0..n)
            .map(|i| (0..n).map(|j| (i == j) as i64).collect())
            .collect();
        Coset {
            base: TorusPoint::identity(n),
            u,
        }
    }

    pub fn point(p: TorusPoint) -> Self {
        Coset { base: p, u: vec![] }
    }

    pub fn rank(&self) -> usize {
        self.base.dim()
    }

    pub fn dim(&self) -> usize {
        self.u.len()
    }

    pub fn codim(&self) -> usize {
        self.rank() - self.dim()
    }

    /// Hermite basis of `X ∩ U^⊥`, the characters constant on the coset.
    pub fn perp(&self) -> IMat {
        let k = integer_kernel(&self.u, self.rank());
        if k.is_empty() {
            k
        } else {
            hnf(&k)
        }
    }

    pub fn key(&self) -> CosetKey {
        let values = self.perp().iter().map(|x| self.base.evaluate(x)).collect();
        CosetKey {
            u: self.u.clone(),
            values,
        }
    }

    pub fn same_as(&self, o: &Coset) -> bool {
        self.key() == o.key()
    }

    pub fn contains(&self, p: &TorusPoint) -> bool {
        self.perp()
            .iter()
            .all(|x| self.base.evaluate(x) == p.evaluate(x))
    }

    /// Roots constant on the coset.
    pub fn constant_roots(&self, d: &BasedRootDatum) -> Vec<usize> {
        (0..d.num_roots())
            .filter(|&k| self.u.iter().all(|uj| dot(uj, &d.roots[k]) == 0))
            .collect()
    }

    pub fn act(&self, w: &WeylElement) -> Self {
        let u: IMat = self.u.iter().map(|r| w.act_y(r)).collect();
        Coset::new(self.base.act(w), u)
    }

    /// Key of the W₀-orbit: the least key over the group.
    pub fn orbit_key(&self, w: &WeylGroup) -> CosetKey {
        w.elements
            .iter()
            .map(|e| self.act(e).key())
            .min()
            .expect("W₀ is nonempty")
    }

    /// Parametrization `T^L → L`, `s ↦ r·s`.
    pub fn restriction_map(&self) -> AffineTorusMap {
        let n = self.rank();
        let lin = (0..n)
            .map(|i| self.u.iter().map(|uj| q(uj[i])).collect())
            .collect();
        AffineTorusMap::new(self.base.clone(), lin, self.dim())
    }

    /// Cocharacters of `T_L`: the saturated span of the coroots of `R_L` when
    /// these have full rank `codim L`, otherwise the saturated span of the
    /// characters constant on `L` (identified with Y through the dot product).
    pub fn tl_cocharacters(&self, d: &BasedRootDatum) -> IMat {
        let n = self.rank();
        let rl = self.constant_roots(d);
        let co: IMat = rl.iter().map(|&k| d.coroots[k].clone()).collect();
        let c = saturate(&co, n);
        if c.len() == self.codim() {
            c
        } else {
            saturate(&self.perp(), n)
        }
    }

    /// The coset with cocharacters `u` on which the characters of the Hermite
    /// basis of `X ∩ U^⊥` take the given values `(phase, vexp)`, with base
    /// point in `T_L`.
    pub fn with_values(d: &BasedRootDatum, u: IMat, values: &[(Q, Q)]) -> Result<Self> {
        let template = Coset::new(TorusPoint::identity(d.rank), u);
        let n = d.rank;
        let perp = template.perp();
        if values.len() != perp.len() {
            return Err(Error::Input("wrong number of coset values".into()));
        }
        if perp.is_empty() {
            return Ok(template);
        }
        let c = template.tl_cocharacters(d);
        let b: QMat = perp
            .iter()
            .map(|x| c.iter().map(|ck| q(dot(ck, x))).collect())
            .collect();
        let binv = qinverse(&b)?;
        let (th, ga): (Vec<Q>, Vec<Q>) = values.iter().cloned().unzip();
        let comb = |l: &[Q]| -> Vec<Q> {
            (0..n)
                .map(|i| l.iter().zip(&c).map(|(a, ck)| *a * ck[i]).sum())
                .collect()
        };
        let base = TorusPoint::new(comb(&qmat_vec(&binv, &th)), comb(&qmat_vec(&binv, &ga)));
        Ok(Coset {
            base,
            u: template.u,
        })
    }

    /// The same coset with its base moved into `T_L`; among the `|K_L|`
    /// possible choices the least point is taken.
    pub fn normalized(&self, d: &BasedRootDatum) -> Result<Self> {
        let values: Vec<(Q, Q)> = self.perp().iter().map(|x| self.base.evaluate(x)).collect();
        let lifted = Coset::with_values(d, self.u.clone(), &values)?;
        debug_assert!(self.same_as(&lifted));
        if self.codim() == 0 {
            return Ok(lifted);
        }
        let c = self.tl_cocharacters(d);
        let kl = k_l_points(self, &c)?;
        let best = kl
            .iter()
            .map(|k| lifted.base.mul(k))
            .min()
            .expect("K_L contains the identity");
        Ok(Coset {
            base: best,
            u: self.u.clone(),
        })
    }

    /// The tempered slice `r(v₀)·T^L_u` with `r` normalized into `T_L`.
    pub fn tempered(&self, d: &BasedRootDatum, v0: f64) -> Result<TemperedForm> {
        let norm = self.normalized(d)?;
        let z = norm.base.logs(v0);
        let perp = norm.perp();
        let values = perp.iter().map(|x| eval_numeric(x, &z)).collect();
        Ok(TemperedForm {
            v0,
            real: z.iter().map(|c| c.re).collect(),
            torsion: norm.base.torsion.iter().map(|t| f(*t)).collect(),
            u: norm.u.clone(),
            perp,
            values,
        })
    }

    pub fn render(&self) -> String {
        let rows: Vec<String> = self
            .u
            .iter()
            .map(|r| format!("[{}]", r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")))
            .collect();
        format!("{} T^[{}]", self.base, rows.join(" "))
    }
}

impl Serialize for Coset {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Coset", 3)?;
        st.serialize_field("base", &self.base)?;
        st.serialize_field("subtorus", &self.u)?;
        st.serialize_field("codim", &self.codim())?;
        st.end()
    }
}

/// Elements of `K_L = T_L ∩ T^L` for the given cocharacters `c` of `T_L`.
fn k_l_group(l: &Coset, c: &IMat) -> Result<FiniteAbelianGroup> {
    let n = l.rank();
    if l.dim() == 0 || l.codim() == 0 {
        return Ok(FiniteAbelianGroup::trivial());
    }
    // θ ∈ (Q/Z)^{dim U} with <Σ θ_j u_j, x> ∈ Z for x ∈ X ∩ C^⊥.
    let xperp = integer_kernel(c, n);
    let b: IMat = xperp
        .iter()
        .map(|x| l.u.iter().map(|uj| dot(uj, x)).collect())
        .collect();
    let theta = torsion_solutions(&b, l.dim())?;
    let gens = theta
        .generators
        .iter()
        .map(|t| {
            let v: Vec<Q> = (0..n)
                .map(|i| t.iter().zip(&l.u).map(|(tj, uj)| *tj * uj[i]).sum())
                .collect();
            frac_vec(&v)
        })
        .collect();
    Ok(FiniteAbelianGroup {
        invariant_factors: theta.invariant_factors,
        generators: gens,
        relations: b,
    })
}

fn k_l_points(l: &Coset, c: &IMat) -> Result<Vec<TorusPoint>> {
    let g = k_l_group(l, c)?;
    if g.generators.is_empty() {
        return Ok(vec![TorusPoint::identity(l.rank())]);
    }
    let mut v: Vec<TorusPoint> = g
        .elements(true)
        .into_iter()
        .map(TorusPoint::torsion_only)
        .collect();
    v.sort();
    v.dedup();
    Ok(v)
}

/// `K_L`, `K_L^n` and the stabilizers of a coset in `W₀`.
#[derive(Clone, Debug, Serialize)]
pub struct KGroups {
    pub k_l: FiniteAbelianGroup,
    pub k_l_points: Vec<TorusPoint>,
    /// Elements of `K_L^n`, sorted, together with a Weyl element realizing each.
    pub k_n_points: Vec<TorusPoint>,
    pub k_n_witnesses: Vec<usize>,
    /// `N_{W₀}(L)` as element indices.
    pub normalizer: Vec<usize>,
    /// `Z_{W₀}(L)`, the pointwise stabilizer.
    pub centralizer: Vec<usize>,
}

impl KGroups {
    /// Whether `p` and `p'` (points of L) agree modulo `K_L^n`.
    pub fn equal_mod(&self, p: &TorusPoint, p2: &TorusPoint) -> bool {
        let r = p.div(p2);
        self.k_n_points.contains(&r)
    }
}

pub fn k_groups(d: &BasedRootDatum, w: &WeylGroup, l: &Coset) -> Result<KGroups> {
    let c = l.tl_cocharacters(d);
    let k_l = k_l_group(l, &c)?;
    let k_l_points = k_l_points(l, &c)?;
    let key = l.key();
    let mut normalizer = vec![];
    let mut centralizer = vec![];
    let mut kn: Vec<(TorusPoint, usize)> = vec![];
    for (i, e) in w.elements.iter().enumerate() {
        let wl = l.act(e);
        if wl.key() != key {
            continue;
        }
        normalizer.push(i);
        let fixes_u = l.u.iter().all(|uj| &e.act_y(uj) == uj);
        if !fixes_u {
            continue;
        }
        let wr = l.base.act(e);
        if wr == l.base {
            centralizer.push(i);
        }
        let k = wr.div(&l.base);
        if !k.is_torsion() {
            return Err(Error::Internal(
                "a Weyl translation of a coset is not torsion".into(),
            ));
        }
        if !kn.iter().any(|(p, _)| *p == k) {
            kn.push((k, i));
        }
    }
    kn.sort();
    let (k_n_points, k_n_witnesses) = kn.into_iter().unzip();
    Ok(KGroups {
        k_l,
        k_l_points,
        k_n_points,
        k_n_witnesses,
        normalizer,
        centralizer,
    })
}

/// The slice `L^temp_{v₀}` as numeric data.
#[derive(Clone, Debug)]
pub struct TemperedForm {
    pub v0: f64,
    /// `log |r(v₀)|` in Y coordinates.
    pub real: Vec<f64>,
    pub torsion: Vec<f64>,
    pub u: IMat,
    pub perp: IMat,
    /// Values of the constant characters on the slice.
    pub values: Vec<Complex64>,
}

/// Membership tolerance.
pub const TEMPERED_TOL: f64 = 1e-9;

impl TemperedForm {
    /// A uniformly random point of the slice, as log coordinates.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> Vec<Complex64> {
        let n = self.real.len();
        let mut ang = self.torsion.clone();
        for uj in &self.u {
            let s: f64 = rng.gen();
            for i in 0..n {
                ang[i] += s * uj[i] as f64;
            }
        }
        (0..n)
            .map(|i| Complex64::new(self.real[i], 2.0 * PI * ang[i]))
            .collect()
    }

    /// Sup-norm discrepancy of `t` from the slice: the modulus of `t` against
    /// `|r(v₀)|` and the constant characters against their values.  It
    /// vanishes exactly on the slice.
    pub fn distance(&self, t: &[Complex64]) -> f64 {
        let mut d: f64 = 0.0;
        for (z, r) in t.iter().zip(&self.real) {
            d = d.max((z.re - r).abs());
        }
        for (x, val) in self.perp.iter().zip(&self.values) {
            d = d.max((eval_numeric(x, t) - val).norm());
        }
        d
    }

    pub fn contains(&self, t: &[Complex64]) -> (bool, f64) {
        let d = self.distance(t);
        (d <= TEMPERED_TOL, d)
    }
}

/// Tests `t ∈ L^temp_{v₀}`, returning the discrepancy as well.
pub fn tempered_membership(
    d: &BasedRootDatum,
    l: &Coset,
    v0: f64,
    t: &[Complex64],
) -> Result<(bool, f64)> {
    if v0 <= 1.0 {
        return Err(Error::Input("v0 must exceed 1".into()));
    }
    Ok(l.tempered(d, v0)?.contains(t))
}

/// Exact test whether the tempered slices of two cosets meet (for every
/// `v₀ > 1`): the moduli must agree and the unitary parts must intersect.
pub fn tempered_forms_meet(d: &BasedRootDatum, a: &Coset, b: &Coset) -> Result<bool> {
    let (a, b) = (a.normalized(d)?, b.normalized(d)?);
    if a.base.gamma != b.base.gamma {
        return Ok(false);
    }
    // θ_a - θ_b ∈ U_a⊗R + U_b⊗R + Z^n: pair with the integer characters
    // vanishing on both subtori.
    let mut rows = a.u.clone();
    rows.extend(b.u.iter().cloned());
    let n = a.rank();
    let perp = integer_kernel(&rows, n);
    let diff: Vec<Q> = a
        .base
        .torsion
        .iter()
        .zip(&b.base.torsion)
        .map(|(x, y)| x - y)
        .collect();
    Ok(perp.iter().all(|x| qdot(&diff, x).is_integer()))
}

/// Rational cocharacter matrix realizing the map sending each source
/// cocharacter basis vector `e_k` to column `k`; checks integrality.
pub fn integral_columns(lin: &QMat) -> Option<IMat> {
    lin.iter().map(|r| as_integral(r)).collect()
}

/// Columns of `lin` as rows.
pub fn columns(lin: &QMat) -> QMat {
    transpose(lin)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootdata::lattice::qr;
    use crate::rootdata::{build_from_expr, LatticeChoice};

    #[test]
    fn evaluate_character_examples() {
        let alpha = [2i64];
        let e = TorusPoint::identity(1);
        let (z, n) = e.evaluate_character(&alpha);
        assert_eq!((z, n), (Cyclotomic::one(), q(0)));
        // X = Q(A1): Y = Z(α^∨/2), so α^∨ has coordinate 2 and α coordinate 1.
        let r = TorusPoint::new(vec![q(0)], vec![q(-2)]);
        assert_eq!(r.evaluate(&[1]), (q(0), q(-2)));
        let s = TorusPoint::new(vec![qr(1, 2)], vec![q(0)]);
        let (z, n) = s.evaluate_character(&[1]);
        assert_eq!(z.as_rational(), Some(crate::exactscalars::cyclotomic::bq(-1)));
        assert_eq!(n, q(0));
        assert_eq!(r.render(), "zeta=(0) gamma=(-2)");
    }

    #[test]
    fn k_l_trivial_cases() {
        let d = build_from_expr("B2", &LatticeChoice::Root).unwrap();
        let w = WeylGroup::new(&d).unwrap();
        let t = Coset::whole(2);
        let k = k_groups(&d, &w, &t).unwrap();
        assert_eq!(k.k_l.order(), 1);
        assert_eq!(k.normalizer.len(), 8);
        let p = Coset::point(TorusPoint::new(vec![q(0), qr(1, 2)], vec![q(-1), q(0)]));
        assert_eq!(k_groups(&d, &w, &p).unwrap().k_l.order(), 1);
    }

    #[test]
    fn b2_long_parabolic_k_l() {
        let d = build_from_expr("B2", &LatticeChoice::Root).unwrap();
        let w = WeylGroup::new(&d).unwrap();
        // T^P for P = {α1}, α1 = e1 - e2 long.
        let u = integer_kernel(&vec![d.roots[0].clone()], 2);
        let l = Coset::new(TorusPoint::identity(2), u);
        let k = k_groups(&d, &w, &l).unwrap();
        // Oracle in ε-coordinates: T_L = {(z, 1/z)}, T^L = {(w, w)}; they meet
        // in {(1,1), (-1,-1)}, where e1 - e2 is 1 and e2 is -1.
        assert_eq!(k.k_l.order(), 2);
        let nontrivial = k.k_l_points.iter().find(|p| !p.is_identity()).unwrap();
        assert_eq!(nontrivial.evaluate(&d.roots[0]), (q(0), q(0)));
        assert_eq!(nontrivial.evaluate(&d.roots[1]), (qr(1, 2), q(0)));
        // s_{e1-e2} fixes U pointwise and the identity base, so K_L^n is trivial.
        assert_eq!(k.k_n_points.len(), 1);
        assert_eq!(k.centralizer.len(), 2);
    }

    #[test]
    fn normalization_moves_base_into_t_l() {
        let d = build_from_expr("A2", &LatticeChoice::Root).unwrap();
        // L = {α1 = v^-2}, through a point off T_L.
        let u = integer_kernel(&vec![d.roots[0].clone()], 2);
        let g: Vec<Q> = (0..2).map(|i| q(-d.coroots[0][i] + 3 * u[0][i])).collect();
        let base = TorusPoint::new(vec![q(0), qr(1, 5)], g);
        let l = Coset::new(base, u);
        assert_eq!(l.base.evaluate(&d.roots[0]).1, q(-2));
        let n = l.normalized(&d).unwrap();
        assert!(n.same_as(&l));
        let c = l.tl_cocharacters(&d);
        let x = integer_kernel(&c, 2);
        assert!(x.iter().all(|x| n.base.evaluate(x) == (q(0), q(0))));
    }

    #[test]
    fn tempered_membership_examples() {
        let d = build_from_expr("A1", &LatticeChoice::Root).unwrap();
        let r = TorusPoint::new(vec![q(0)], vec![q(-2)]);
        let l = Coset::point(r.clone());
        let (ok, dist) = tempered_membership(&d, &l, 2.0, &r.logs(2.0)).unwrap();
        assert!(ok && dist < 1e-12);
        let (ok, _) =
            tempered_membership(&d, &l, 2.0, &TorusPoint::identity(1).logs(2.0)).unwrap();
        assert!(!ok);
        let t = Coset::whole(1);
        let unit = vec![Complex64::new(0.0, 1.234)];
        assert!(tempered_membership(&d, &t, 2.0, &unit).unwrap().0);
    }

    #[test]
    fn affine_map_composition() {
        let d = build_from_expr("A2", &LatticeChoice::Root).unwrap();
        let w = WeylGroup::new(&d).unwrap();
        let s = &w.elements[w.simple[0]];
        let id = AffineTorusMap::identity(2);
        let m = id.then_weyl(s).then_weyl(s);
        assert_eq!(m, id);
        let p = TorusPoint::new(vec![qr(1, 3), q(0)], vec![q(1), q(-1)]);
        assert_eq!(id.then_weyl(s).apply(&p), p.act(s));
    }
}
