//! Residual points and cosets, their W₀-orbits, formal degrees, and the
//! components of the image of the tempered central characters.

use crate::error::{Error, Result};
use crate::exactscalars::factored::FactoredFn;
use crate::exactscalars::{NormalizingElement, RationalFunctionV, BQ};
use crate::mu::{MuFunction, PoleZeroReport};
use crate::rootdata::lattice::{
    congruence_solutions, idet, q, qinverse, qmat_vec, rref, to_qmat, IMat, Q,
};
use crate::rootdata::lattice::integer_kernel;
use crate::rootdata::WeylGroup;
use crate::torus::{k_groups, Coset, CosetKey, KGroups, TorusPoint};
use num_complex::Complex64;
use num_traits::Zero;
use rand::Rng;
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};

/// Largest rank accepted by the enumeration.
pub const MAX_RANK: usize = 4;

/// One W₀-orbit of residual cosets.
#[derive(Clone, Debug)]
pub struct CatalogEntry {
    /// Standard parabolic subset `P` with `R_L = R_P` for the representative.
    pub subset: Vec<usize>,
    /// Representative with base point in `T_L`.
    pub coset: Coset,
    pub report: PoleZeroReport,
    /// `μ^{(L)}` in the variables `v, s₁, …, s_k` of `T^L`.
    pub density: FactoredFn,
    pub orbit_key: CosetKey,
    pub orbit_size: usize,
}

impl CatalogEntry {
    pub fn codim(&self) -> usize {
        self.coset.codim()
    }
}

#[derive(Clone, Debug)]
pub struct ResidualCatalog {
    pub entries: Vec<CatalogEntry>,
}

impl ResidualCatalog {
    pub fn points(&self) -> impl Iterator<Item = &CatalogEntry> {
        self.entries.iter().filter(|e| e.coset.dim() == 0)
    }

    /// Index of the orbit containing `l`.
    pub fn find(&self, l: &Coset, w: &WeylGroup) -> Option<usize> {
        let k = l.orbit_key(w);
        self.entries.iter().position(|e| e.orbit_key == k)
    }
}

fn subsets_by_size(n: usize) -> Vec<Vec<usize>> {
    let mut all: Vec<Vec<usize>> = (0u32..(1 << n))
        .map(|mask| (0..n).filter(|i| mask & (1 << i) != 0).collect())
        .collect();
    all.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
    all
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = vec![];
    go(0, n, k, &mut vec![], &mut out);
    out
}

/// Integer coordinates of `v` in the row basis `basis` of a saturated lattice.
fn coords_in(basis: &IMat, v: &[i64]) -> Vec<i64> {
    let k = basis.len();
    let n = v.len();
    let aug: Vec<Vec<Q>> = (0..n)
        .map(|i| {
            let mut r: Vec<Q> = basis.iter().map(|b| q(b[i])).collect();
            r.push(q(v[i]));
            r
        })
        .collect();
    let (red, piv) = rref(&aug);
    debug_assert!(!piv.contains(&k));
    (0..k)
        .map(|j| {
            let x = red[j][k];
            debug_assert!(x.is_integer());
            x.to_integer()
        })
        .collect()
}

/// All residual cosets `L` with `R_L = R_P` for the standard subset `p`.
fn residual_over(mu: &MuFunction, p: &[usize]) -> Result<Vec<Coset>> {
    let d = &mu.datum;
    let n = d.rank;
    let m = &mu.params;
    if p.is_empty() {
        return Ok(vec![Coset::whole(n)]);
    }
    let k = p.len();
    let proots: IMat = p.iter().map(|&i| d.roots[i].clone()).collect();
    let u = integer_kernel(&proots, n);
    let template = Coset::new(TorusPoint::identity(n), u.clone());
    let perp = template.perp();
    let rp = d.roots_in_span(p);
    let coords: Vec<Vec<i64>> = rp.iter().map(|&r| coords_in(&perp, &d.roots[r])).collect();
    let mut seen: BTreeSet<CosetKey> = BTreeSet::new();
    let mut out = vec![];
    for combo in combinations(rp.len(), k) {
        let mm: IMat = combo.iter().map(|&c| coords[c].clone()).collect();
        if idet(&mm) == 0 {
            continue;
        }
        let minv = qinverse(&to_qmat(&mm))?;
        for signs in 0u32..(1 << k) {
            let mut rhs = vec![];
            let mut cong = vec![];
            for (i, &c) in combo.iter().enumerate() {
                let root = rp[c];
                if signs & (1 << i) == 0 {
                    rhs.push(q(-m.m_plus2(root)));
                    cong.push(Q::zero());
                } else {
                    rhs.push(q(-m.m_minus2(root)));
                    cong.push(Q::new(1, 2));
                }
            }
            let g = qmat_vec(&minv, &rhs);
            for theta in congruence_solutions(&mm, &cong) {
                let values: Vec<(Q, Q)> = theta.iter().cloned().zip(g.iter().cloned()).collect();
                let l = Coset::with_values(d, u.clone(), &values)?;
                if !seen.insert(l.key()) {
                    continue;
                }
                let rep = mu.pole_zero_sets(&l);
                if rep.residual {
                    if rep.lhs != rep.codim {
                        return Err(Error::Internal(format!(
                            "strict residual inequality at {}",
                            l.render()
                        )));
                    }
                    out.push(l);
                }
            }
        }
    }
    Ok(out)
}

fn check_rank(mu: &MuFunction) -> Result<()> {
    if mu.datum.rank > MAX_RANK {
        return Err(Error::BoundExceeded(format!(
            "residual enumeration is limited to rank {MAX_RANK}"
        )));
    }
    Ok(())
}

fn build_catalog(mu: &MuFunction, w: &WeylGroup, subsets: &[Vec<usize>]) -> Result<ResidualCatalog> {
    check_rank(mu)?;
    let d = &mu.datum;
    // orbit key -> (subset order, base, subset, coset)
    let mut best: BTreeMap<CosetKey, (usize, TorusPoint, Vec<usize>, Coset)> = BTreeMap::new();
    for (order, p) in subsets.iter().enumerate() {
        for l in residual_over(mu, p)? {
            let key = l.orbit_key(w);
            let norm = l.normalized(d)?;
            let cand = (order, norm.base.clone(), p.clone(), norm);
            match best.get(&key) {
                Some(cur) if (cur.0, &cur.1) <= (cand.0, &cand.1) => {}
                _ => {
                    best.insert(key, cand);
                }
            }
        }
    }
    let mut entries = vec![];
    for (key, (_, _, p, l)) in best {
        let report = mu.pole_zero_sets(&l);
        let density = mu.regularize(&l)?;
        let images: BTreeSet<CosetKey> = w.elements.iter().map(|e| l.act(e).key()).collect();
        entries.push(CatalogEntry {
            subset: p,
            coset: l,
            report,
            density,
            orbit_key: key,
            orbit_size: images.len(),
        });
    }
    let pos = |p: &Vec<usize>| subsets.iter().position(|s| s == p).unwrap();
    entries.sort_by(|a, b| {
        (a.codim(), pos(&a.subset), &a.coset.base).cmp(&(b.codim(), pos(&b.subset), &b.coset.base))
    });
    Ok(ResidualCatalog { entries })
}

/// W₀-orbits of residual points.
pub fn enumerate_residual_points(mu: &MuFunction, w: &WeylGroup) -> Result<Vec<CatalogEntry>> {
    let all: Vec<usize> = (0..mu.datum.rank).collect();
    Ok(build_catalog(mu, w, &[all])?.entries)
}

/// W₀-orbits of all residual cosets, including `T` itself.
pub fn enumerate_residual_cosets(mu: &MuFunction, w: &WeylGroup) -> Result<ResidualCatalog> {
    build_catalog(mu, w, &subsets_by_size(mu.datum.rank))
}

/// All distinct W₀-translates of a coset.
pub fn orbit(l: &Coset, w: &WeylGroup) -> Vec<Coset> {
    let mut seen = BTreeSet::new();
    let mut out = vec![];
    for e in &w.elements {
        let x = l.act(e);
        if seen.insert(x.key()) {
            out.push(x);
        }
    }
    out
}

/// The formal degree `μ^{({r})}` of a residual point, certified in `±𝐌`.
#[derive(Clone, Debug, Serialize)]
pub struct FormalDegree {
    #[serde(serialize_with = "ser_display")]
    pub rational: RationalFunctionV,
    pub certificate: NormalizingElement,
    pub sign: i64,
    /// Vanishing order at `v = 1`.
    pub order: i64,
    /// `vexp(d) + rank`, which the order must equal.
    pub expected_order: i64,
    /// `f(1/v) = inv_sign · f(v)`.
    pub inv_sign: i64,
    /// `f(-v) = neg_sign · f(v)`.
    pub neg_sign: i64,
}

fn ser_display<S: serde::Serializer, T: std::fmt::Display>(
    x: &T,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

fn symmetry_sign(f: &RationalFunctionV, g: &RationalFunctionV) -> Result<i64> {
    let r = g.div(f)?;
    match r.as_constant() {
        Some(c) if c == BQ::from_integer(1.into()) => Ok(1),
        Some(c) if c == BQ::from_integer((-1).into()) => Ok(-1),
        _ => Err(Error::NotInM(format!("{} lacks the expected symmetry", f.render()))),
    }
}

pub fn formal_degree(mu: &MuFunction, r: &Coset) -> Result<FormalDegree> {
    if r.dim() != 0 {
        return Err(Error::Input("formal degrees are defined at residual points".into()));
    }
    let rep = mu.pole_zero_sets(r);
    if !rep.residual {
        return Err(Error::NotResidual(r.render()));
    }
    let f = mu.regularize_point(r)?;
    let (cert, sign) = f.factor_into_m()?;
    let mut rational = cert.expand();
    if sign < 0 {
        rational = rational.mul(&RationalFunctionV::constant(BQ::from_integer((-1).into())));
    }
    let order = rational.order_at_one();
    let expected_order = mu.d.vexp + mu.datum.rank as i64;
    if order != cert.vexp || order != expected_order {
        return Err(Error::Internal(format!(
            "formal degree has order {order} at v = 1, expected {expected_order}"
        )));
    }
    // Numeric cross-check of the factored form against the expansion.
    let z = f.eval_log(&[Complex64::new(2f64.ln(), 0.0)]);
    let e = rational.eval_f64(2.0);
    if (z.re - e).abs() > 1e-9 * e.abs().max(1.0) || z.im.abs() > 1e-9 * e.abs().max(1.0) {
        return Err(Error::Internal("formal degree expansion mismatch".into()));
    }
    let inv_sign = symmetry_sign(&rational, &rational.invert_variable())?;
    let neg_sign = symmetry_sign(&rational, &rational.negate_variable())?;
    Ok(FormalDegree {
        rational,
        certificate: cert,
        sign,
        order,
        expected_order,
        inv_sign,
        neg_sign,
    })
}

/// One component `W₀L` of the image of the tempered central characters.
#[derive(Clone, Debug)]
pub struct CentralCharacterComponent {
    pub entry: usize,
    pub groups: KGroups,
}

pub fn central_character_image(
    mu: &MuFunction,
    w: &WeylGroup,
    catalog: &ResidualCatalog,
) -> Result<Vec<CentralCharacterComponent>> {
    catalog
        .entries
        .iter()
        .enumerate()
        .map(|(i, e)| {
            Ok(CentralCharacterComponent {
                entry: i,
                groups: k_groups(&mu.datum, w, &e.coset)?,
            })
        })
        .collect()
}

/// Sign of `μ^{(L)}` on sampled points of `L^temp` at `v₀`, or an error if
/// the values are not real of constant sign.
pub fn density_sign<R: Rng>(entry: &CatalogEntry, v0: f64, samples: usize, rng: &mut R) -> Result<i64> {
    let k = entry.coset.dim();
    let mut sign = 0i64;
    for _ in 0..samples.max(1) {
        let mut logs = vec![Complex64::new(v0.ln(), 0.0)];
        for _ in 0..k {
            let t: f64 = rng.gen();
            logs.push(Complex64::new(0.0, 2.0 * std::f64::consts::PI * t));
        }
        let z = entry.density.eval_log(&logs);
        if !z.re.is_finite() || z.im.abs() > 1e-7 * z.norm().max(1e-300) {
            return Err(Error::Internal(format!(
                "μ^(L) is not real on the tempered slice of {}",
                entry.coset.render()
            )));
        }
        if z.re == 0.0 {
            continue;
        }
        let s = if z.re > 0.0 { 1 } else { -1 };
        if sign != 0 && s != sign {
            return Err(Error::Internal(format!(
                "μ^(L) changes sign on the tempered slice of {}",
                entry.coset.render()
            )));
        }
        sign = s;
    }
    Ok(sign)
}

/// `μ^{({r})}(v₀)` for a rational `v₀`.
pub fn eval_formal_degree(fd: &FormalDegree, v0: &BQ) -> Result<BQ> {
    fd.rational.eval(v0)
}

/// Coordinates of a root in the Hermite basis of the characters constant on
/// a standard parabolic coset; exposed for diagnostics.
pub fn restricted_root_coordinates(l: &Coset, root: &[i64]) -> Vec<i64> {
    coords_in(&l.perp(), root)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;
    use crate::exactscalars::cyclotomic::bq;
    use crate::exactscalars::normalizing::q_int_element;
    use crate::rootdata::{build_from_expr, LatticeChoice, ParameterFunction};

    fn setup(t: &str, m: i64) -> (MuFunction, WeylGroup) {
        let d = build_from_expr(t, &LatticeChoice::Root).unwrap();
        let p = ParameterFunction::uniform(&d, m).unwrap();
        let w = WeylGroup::new(&d).unwrap();
        (MuFunction::build_with(&d, &p, &NormalizingElement::one(), &w), w)
    }

    #[test]
    fn a1_points() {
        let (mu, w) = setup("A1", 1);
        let pts = enumerate_residual_points(&mu, &w).unwrap();
        assert_eq!(pts.len(), 1);
        // gamma = -α^∨, which has coordinate -2 when X = Q.
        assert_eq!(pts[0].coset.base, TorusPoint::new(vec![q(0)], vec![q(-2)]));
        let (mu0, w0) = setup("A1", 0);
        assert!(enumerate_residual_points(&mu0, &w0).unwrap().is_empty());
    }

    #[test]
    fn a2_catalog() {
        let (mu, w) = setup("A2", 1);
        let pts = enumerate_residual_points(&mu, &w).unwrap();
        assert_eq!(pts.len(), 1);
        // The orbit contains the point where both simple roots take v^-2.
        let hit = orbit(&pts[0].coset, &w).iter().any(|c| {
            (0..2).all(|i| c.base.evaluate(&mu.datum.roots[i]) == (q(0), q(-2)))
        });
        assert!(hit);
        let cat = enumerate_residual_cosets(&mu, &w).unwrap();
        let codims: Vec<usize> = cat.entries.iter().map(|e| e.codim()).collect();
        assert_eq!(codims, vec![0, 1, 2]);
        assert_eq!(cat.entries[1].subset, vec![0]);
        assert_eq!(central_character_image(&mu, &w, &cat).unwrap().len(), 3);
    }

    #[test]
    fn zero_labels_leave_only_the_torus() {
        let (mu, w) = setup("B2", 0);
        let cat = enumerate_residual_cosets(&mu, &w).unwrap();
        assert_eq!(cat.entries.len(), 1);
        assert_eq!(cat.entries[0].codim(), 0);
    }

    #[test]
    fn a1_formal_degrees() {
        let (mu, w) = setup("A1", 1);
        let pts = enumerate_residual_points(&mu, &w).unwrap();
        let fd = formal_degree(&mu, &pts[0].coset).unwrap();
        assert_eq!(fd.certificate.render(), "(v-v^-1) * [2]^-1");
        assert_eq!(fd.order, 1);
        assert_eq!(fd.rational.eval(&bq(2)).unwrap().abs(), BQ::new(3.into(), 5.into()));
        let mut mu2 = mu.clone();
        mu2.d = q_int_element(2, 1);
        let fd2 = formal_degree(&mu2, &pts[0].coset).unwrap();
        assert_eq!(fd2.certificate.render(), "(v-v^-1)");
        let rank0 = crate::rootdata::BasedRootDatum::rank_zero();
        let m0 = ParameterFunction::from_root_labels(&rank0, vec![], vec![]).unwrap();
        let d0 = q_int_element(3, 2);
        let w0 = WeylGroup::new(&rank0).unwrap();
        let mu0 = MuFunction::build_with(&rank0, &m0, &d0, &w0);
        let fd0 = formal_degree(&mu0, &Coset::point(TorusPoint::identity(0))).unwrap();
        assert_eq!(fd0.certificate, d0);
    }

    #[test]
    fn g2_points_have_formal_degrees() {
        let (mu, w) = setup("G2", 1);
        let pts = enumerate_residual_points(&mu, &w).unwrap();
        assert!(pts.len() >= 3);
        for p in &pts {
            let fd = formal_degree(&mu, &p.coset).unwrap();
            assert_eq!(fd.order, 2);
        }
    }
}
