//! Spectral transfer maps: verification of the axioms T1–T4, residual
//! correspondences, intertwiners, composition, equivalence, rank-0 search,
//! excellent subsets and density-ratio constants.

pub mod recipes;

use crate::diagrams::{spectral_diagram, DiagramNode};
use crate::error::{Error, Result};
use crate::exactscalars::{FactoredFn, NormalizingElement, BQ};
use crate::mu::MuFunction;
use crate::residual::{enumerate_residual_cosets, enumerate_residual_points, formal_degree, ResidualCatalog};
use crate::rootdata::lattice::{
    as_integral, frac, identity, q, qrank, rref, saturate, to_qmat, transpose, IMat, QMat, Q,
};
use crate::rootdata::{BasedRootDatum, ParameterFunction, WeylGroup};
use crate::torus::{k_groups, AffineTorusMap, Coset, KGroups, TorusPoint};
use num_complex::Complex64;
use num_traits::{Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};

/// A normalized affine Hecke algebra `(ℋ(ℛ, m), τ^d)` on the torus side.
#[derive(Clone, Debug)]
pub struct Algebra {
    pub name: String,
    pub datum: BasedRootDatum,
    pub params: ParameterFunction,
    pub d: NormalizingElement,
    pub weyl: WeylGroup,
    pub mu: MuFunction,
}

impl Algebra {
    pub fn new(
        name: &str,
        datum: BasedRootDatum,
        params: ParameterFunction,
        d: NormalizingElement,
    ) -> Result<Self> {
        let weyl = WeylGroup::new(&datum)?;
        let mu = MuFunction::build_with(&datum, &params, &d, &weyl);
        Ok(Algebra {
            name: name.to_string(),
            datum,
            params,
            d,
            weyl,
            mu,
        })
    }

    /// The rank-0 algebra `𝐋` normalized by `d`.
    pub fn rank_zero(name: &str, d: NormalizingElement) -> Result<Self> {
        let datum = BasedRootDatum::rank_zero();
        let params = ParameterFunction::from_root_labels(&datum, vec![], vec![])?;
        Self::new(name, datum, params, d)
    }

    pub fn rank(&self) -> usize {
        self.datum.rank
    }

    pub fn is_semi_standard(&self) -> bool {
        self.params.is_semi_standard(&self.datum)
    }

    pub fn catalog(&self) -> Result<ResidualCatalog> {
        enumerate_residual_cosets(&self.mu, &self.weyl)
    }
}

/// A candidate spectral transfer map `φ_T : T₁ → L_n ⊂ T₂ / K_L^n`, stored
/// through a lift `T₁ → L`.  Rational cocharacter entries are allowed when
/// their fractional parts lie in `K_L^n`.
#[derive(Clone, Debug)]
pub struct SpectralTransferMap {
    pub source: Algebra,
    pub target: Algebra,
    pub coset: Coset,
    pub map: AffineTorusMap,
    pub recipe: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum T4Status {
    /// The source is semi-standard, where T4 is not tested.
    NotRequired,
    /// Passed on the heuristic family of test points.
    HeuristicPass,
    Fail,
}

/// Verdicts of the four axioms, the constant `a`, and failure witnesses.
#[derive(Clone, Debug, Serialize)]
pub struct VerificationRecord {
    pub t1: bool,
    pub t2: bool,
    pub t3: bool,
    /// T3 is only evaluated when T1 and T2 hold.
    pub t3_checked: bool,
    pub t4: T4Status,
    #[serde(serialize_with = "ser_opt_bq")]
    pub a: Option<BQ>,
    /// `vexp(d₁) = vexp(d₂) + codim L`.
    pub order_consistent: bool,
    pub witnesses: Vec<String>,
}

fn ser_opt_bq<S: serde::Serializer>(x: &Option<BQ>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some(v) => s.serialize_str(&v.to_string()),
        None => s.serialize_none(),
    }
}

impl VerificationRecord {
    pub fn valid(&self) -> bool {
        self.t1 && self.t2 && self.t3 && self.t4 != T4Status::Fail
    }

    pub fn summary(&self) -> String {
        if self.valid() {
            format!("VALID, a = {}", self.a.as_ref().expect("valid maps have a constant"))
        } else {
            let mut failed = vec![];
            let t3 = self.t3 || !self.t3_checked;
            for (name, ok) in [("T1", self.t1), ("T2", self.t2), ("T3", t3), ("T4", self.t4 != T4Status::Fail)] {
                if !ok {
                    failed.push(name);
                }
            }
            format!("INVALID ({})", failed.join(", "))
        }
    }
}

/// Cocharacter columns of an affine map.
fn lin_columns(map: &AffineTorusMap) -> QMat {
    if map.source_dim == 0 {
        vec![]
    } else {
        transpose(&map.lin)
    }
}

fn in_span(u: &IMat, c: &[Q], n: usize) -> bool {
    let perp = crate::rootdata::lattice::integer_kernel(u, n);
    perp.iter()
        .all(|x| c.iter().zip(x).map(|(a, b)| *a * *b).sum::<Q>().is_zero())
}

/// Image of a source coset under an affine map, as a coset of the target.
pub fn image_coset(map: &AffineTorusMap, l: &Coset) -> Coset {
    let n2 = map.target_dim();
    let base = map.apply(&l.base);
    if l.u.is_empty() || map.source_dim == 0 {
        return Coset::point(base);
    }
    let mut u: IMat = vec![];
    for uj in &l.u {
        let img: Vec<Q> = (0..n2)
            .map(|i| (0..map.source_dim).map(|k| map.lin[i][k] * uj[k]).sum())
            .collect();
        let den = img.iter().fold(1i64, |a, x| num_integer::lcm(a, *x.denom()));
        u.push(img.iter().map(|x| (*x * den).to_integer()).collect());
    }
    let u = if qrank(&to_qmat(&u)) == 0 { vec![] } else { saturate(&u, n2) };
    Coset::new(base, u)
}

impl SpectralTransferMap {
    pub fn new(source: &Algebra, target: &Algebra, coset: Coset, map: AffineTorusMap, recipe: &str) -> Self {
        SpectralTransferMap {
            source: source.clone(),
            target: target.clone(),
            coset,
            map,
            recipe: recipe.to_string(),
        }
    }

    pub fn dim_source(&self) -> usize {
        self.source.rank()
    }

    pub fn cork(&self) -> usize {
        self.target.rank() - self.source.rank()
    }

    fn target_k(&self) -> Result<KGroups> {
        k_groups(&self.target.datum, &self.target.weyl, &self.coset)
    }

    /// `φ_T^*(μ₂^{(L)})` as a function of `(v, x₁, …)` on `T₁`.
    pub fn pullback(&self) -> Result<FactoredFn> {
        let rep = self.target.mu.pole_zero_sets(&self.coset);
        self.target.mu.regularize_along(&rep, &self.map)
    }

    pub fn verify(&self) -> Result<VerificationRecord> {
        let mut w = vec![];
        let n1 = self.source.rank();
        let n2 = self.target.rank();
        let l = &self.coset;
        let shape_ok = self.map.source_dim == n1 && self.map.target_dim() == n2 && l.rank() == n2;
        if !shape_ok {
            return Err(Error::Input("map dimensions do not match the algebras".into()));
        }
        let t1 = self.map.rank() == n1 && l.dim() == n1;
        if !t1 {
            w.push(format!(
                "T1: cocharacter map has rank {} but dim T₁ = {n1} and dim L = {}",
                self.map.rank(),
                l.dim()
            ));
        }
        let rep = self.target.mu.pole_zero_sets(l);
        let mut t2 = true;
        if !rep.residual {
            t2 = false;
            w.push(format!("T2: {} is not residual", l.render()));
        }
        if !l.contains(&self.map.base) {
            t2 = false;
            w.push(format!("T2: base point {} is not in L", self.map.base));
        }
        let cols = lin_columns(&self.map);
        let mut kn: Option<KGroups> = None;
        for (j, c) in cols.iter().enumerate() {
            if !in_span(&l.u, c, n2) {
                t2 = false;
                w.push(format!("T2: cocharacter {j} does not map into T^L"));
            }
            if as_integral(c).is_none() {
                if kn.is_none() {
                    kn = Some(self.target_k()?);
                }
                let fr = TorusPoint::torsion_only(c.iter().map(|x| frac(*x)).collect());
                if !kn.as_ref().unwrap().k_n_points.contains(&fr) {
                    t2 = false;
                    w.push(format!("T2: fractional part of cocharacter {j} is not in K_L^n"));
                }
            }
        }
        let mut t3 = false;
        let mut a = None;
        let t3_checked = t1 && t2;
        let pulled = if t3_checked {
            match self.pullback() {
                Ok(f) => Some(f),
                Err(e) => {
                    w.push(format!("T3: {e}"));
                    None
                }
            }
        } else {
            None
        };
        if let Some(pulled) = pulled {
            let mu1 = self.source.mu.to_factored();
            match pulled.ratio_constant(&mu1) {
                Some(c) => match c.as_rational() {
                    Some(x) if !x.is_zero() => {
                        t3 = true;
                        a = Some(x);
                    }
                    _ => w.push("T3: the ratio is a constant outside Q^×".into()),
                },
                None => {
                    let r = pulled.div(&mu1);
                    w.push(format!(
                        "T3: φ^*μ₂^(L) / μ₁ is not constant: {}",
                        r.render(&crate::exactscalars::factored::default_names(n1 + 1))
                    ));
                }
            }
        }
        let order_consistent =
            self.source.d.vanishing_order() == self.target.d.vanishing_order() + l.codim() as i64;
        if t3 && !order_consistent {
            return Err(Error::Internal(
                "T3 holds but the vanishing orders of the normalizations disagree".into(),
            ));
        }
        let t4 = if self.source.is_semi_standard() {
            T4Status::NotRequired
        } else if t1 && t2 {
            match self.t4_witness()? {
                None => T4Status::HeuristicPass,
                Some(msg) => {
                    w.push(msg);
                    T4Status::Fail
                }
            }
        } else {
            T4Status::Fail
        };
        Ok(VerificationRecord {
            t1,
            t2,
            t3,
            t3_checked,
            t4,
            a,
            order_consistent,
            witnesses: w,
        })
    }

    /// Test points for T4: source torsion points of order at most
    /// `max(|Ω_X|, 2)` and the vertices of the fundamental alcove.
    fn t4_points(&self) -> Result<Vec<TorusPoint>> {
        let d = &self.source.datum;
        let n = d.rank;
        let order = d.omega_x()?.order().max(2);
        let mut pts = BTreeSet::new();
        let mut idx = vec![0i64; n];
        loop {
            pts.insert(TorusPoint::torsion_only(idx.iter().map(|&i| Q::new(i, order)).collect()));
            let mut k = 0;
            while k < n {
                idx[k] += 1;
                if idx[k] < order {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == n {
                break;
            }
        }
        if n > 0 {
            let basis = to_qmat(&d.roots[..n].to_vec());
            let binv = crate::rootdata::lattice::qinverse(&basis)?;
            for comp in &d.components {
                let hc = &d.simple_coords[comp.highest];
                for &i in &comp.simple {
                    let mut r = vec![Q::zero(); n];
                    r[i] = Q::new(1, hc[i]);
                    pts.insert(TorusPoint::torsion_only(crate::rootdata::lattice::qmat_vec(&binv, &r)));
                }
            }
        }
        Ok(pts.into_iter().collect())
    }

    fn t4_witness(&self) -> Result<Option<String>> {
        let kg = self.target_k()?;
        let w1 = &self.source.weyl;
        let w2 = &self.target.weyl;
        for t in self.t4_points()? {
            let ref_img = self.map.apply(&t);
            let orbit: Vec<TorusPoint> = w2
                .elements
                .iter()
                .enumerate()
                .filter(|(i, _)| kg.normalizer.contains(i))
                .map(|(_, e)| ref_img.act(e))
                .collect();
            for e in &w1.elements {
                let img = self.map.apply(&t.act(e));
                if !orbit.iter().any(|p| kg.equal_mod(p, &img)) {
                    return Ok(Some(format!(
                        "T4: images of the W₁-orbit of {t} meet two N(L)-orbits"
                    )));
                }
            }
        }
        Ok(None)
    }

    /// Equivalence under post-composition with `W_{2,0}`.
    pub fn equivalent(&self, o: &SpectralTransferMap) -> Result<bool> {
        if self.source.rank() != o.source.rank() || self.target.rank() != o.target.rank() {
            return Ok(false);
        }
        let kg = k_groups(&o.target.datum, &o.target.weyl, &o.coset)?;
        for e in &self.target.weyl.elements {
            if !self.coset.act(e).same_as(&o.coset) {
                continue;
            }
            let m = self.map.then_weyl(e);
            if m.lin == o.map.lin && kg.equal_mod(&m.base, &o.map.base) {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// `other ∘ self`, re-verified.
    pub fn compose(&self, other: &SpectralTransferMap) -> Result<(SpectralTransferMap, VerificationRecord)> {
        if self.target.rank() != other.source.rank() {
            return Err(Error::Input("composition of maps with mismatched tori".into()));
        }
        let map = other.map.compose(&self.map);
        let n = image_coset(&other.map, &self.coset);
        let rep = other.target.mu.pole_zero_sets(&n);
        if !rep.residual || !other.coset.contains(&n.base) {
            return Err(Error::Internal(format!(
                "image {} of L under the second map is not a residual coset inside M",
                n.render()
            )));
        }
        let c = SpectralTransferMap::new(
            &self.source,
            &other.target,
            n,
            map,
            &format!("{} then {}", self.recipe, other.recipe),
        );
        let rec = c.verify()?;
        if !rec.valid() {
            return Err(Error::Internal(format!(
                "composite fails verification: {}",
                rec.witnesses.join("; ")
            )));
        }
        Ok((c, rec))
    }

    /// The constant `r″` with `(φ|_{L₁})^* μ₂^{(L₂)} = r″ μ₁^{(L₁)}`.
    pub fn correspondence_constant(&self, l1: &Coset) -> Result<(Coset, BQ)> {
        let l2 = image_coset(&self.map, l1);
        let rep2 = self.target.mu.pole_zero_sets(&l2);
        if !rep2.residual {
            return Err(Error::Refuted(format!(
                "the image {} of a residual coset is not residual",
                l2.render()
            )));
        }
        let restricted = self.map.compose(&l1.restriction_map());
        let lhs = self.target.mu.regularize_along(&rep2, &restricted)?;
        let rhs = self.source.mu.regularize(l1)?;
        let c = lhs
            .ratio_constant(&rhs)
            .ok_or_else(|| Error::Refuted(format!("density ratio on {} is not constant", l1.render())))?;
        let r = c
            .as_rational()
            .ok_or_else(|| Error::Refuted("density ratio is not rational".into()))?;
        Ok((l2, r))
    }

    pub fn residual_correspondence(&self) -> Result<Correspondence> {
        let src = self.source.catalog()?;
        let tgt = self.target.catalog()?;
        let mut rows = vec![];
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (i, e) in src.entries.iter().enumerate() {
            let (l2, r) = self.correspondence_constant(&e.coset)?;
            let j = tgt.find(&l2, &self.target.weyl).ok_or_else(|| {
                Error::Internal(format!("image {} is missing from the target catalog", l2.render()))
            })?;
            if l2.dim() != e.coset.dim() {
                return Err(Error::Internal("a residual coset lost dimension under φ".into()));
            }
            // Tempered slices map into tempered slices.
            let v0 = 2.0;
            let src_t = e.coset.tempered(&self.source.datum, v0)?;
            let tgt_t = l2.tempered(&self.target.datum, v0)?;
            for _ in 0..16 {
                let z = src_t.sample(&mut rng);
                let img = apply_logs(&self.map, &z, v0);
                let (ok, dist) = tgt_t.contains(&img);
                if !ok {
                    return Err(Error::Internal(format!(
                        "tempered slice of {} is not mapped into that of {} (distance {dist:e})",
                        e.coset.render(),
                        l2.render()
                    )));
                }
            }
            rows.push(CorrespondenceRow {
                source: i,
                target: j,
                ratio: r,
            });
        }
        let mut fibers: BTreeMap<usize, usize> = BTreeMap::new();
        for r in &rows {
            *fibers.entry(r.target).or_insert(0) += 1;
        }
        Ok(Correspondence {
            source: src,
            target: tgt,
            rows,
            fibers,
        })
    }

    /// For each simple reflection of `W₁`, an element of `N_{W₂}(L)` with
    /// `φ ∘ s = w₂ ∘ φ`; consistency is checked on all of `W₁`.
    pub fn intertwiners(&self) -> Result<Intertwiners> {
        let kg = self.target_k()?;
        let w1 = &self.source.weyl;
        let w2 = &self.target.weyl;
        let n1 = self.source.rank();
        let as_map = |e: &crate::rootdata::WeylElement| {
            AffineTorusMap::new(TorusPoint::identity(n1), to_qmat(&e.matrix_y), n1)
        };
        let matches = |lhs: &AffineTorusMap, rhs: &AffineTorusMap| {
            lhs.lin == rhs.lin && kg.equal_mod(&lhs.base, &rhs.base)
        };
        if n1 == 0 {
            let stab: Vec<usize> = kg
                .normalizer
                .iter()
                .copied()
                .filter(|&i| kg.equal_mod(&self.map.base.act(w2.get(i)), &self.map.base))
                .collect();
            return Ok(Intertwiners {
                simple: vec![],
                stabilizer: stab,
            });
        }
        let mut simple = vec![];
        for &s in &w1.simple {
            let lhs = self.map.compose(&as_map(w1.get(s)));
            let found = kg
                .normalizer
                .iter()
                .copied()
                .find(|&i| matches(&lhs, &self.map.then_weyl(w2.get(i))))
                .ok_or_else(|| Error::Refuted(format!("no intertwiner for simple reflection {s}")))?;
            simple.push((s, found));
        }
        for e in &w1.elements {
            let mut idx = w2.from_word(&[]);
            for &letter in &e.word {
                let img = simple[letter].1;
                idx = w2.mul(idx, img);
            }
            let lhs = self.map.compose(&as_map(e));
            if !matches(&lhs, &self.map.then_weyl(w2.get(idx))) {
                return Err(Error::Internal("intertwiners are not multiplicative".into()));
            }
        }
        Ok(Intertwiners {
            simple,
            stabilizer: vec![],
        })
    }
}

fn apply_logs(map: &AffineTorusMap, z: &[Complex64], v0: f64) -> Vec<Complex64> {
    let base = map.base.logs(v0);
    (0..map.target_dim())
        .map(|i| {
            let mut s = base[i];
            for k in 0..map.source_dim {
                let c = map.lin[i][k];
                s += z[k] * (*c.numer() as f64 / *c.denom() as f64);
            }
            s
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct CorrespondenceRow {
    pub source: usize,
    pub target: usize,
    #[serde(serialize_with = "ser_bq")]
    pub ratio: BQ,
}

fn ser_bq<S: serde::Serializer>(x: &BQ, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

/// The map of residual-coset orbits induced by a transfer map.
#[derive(Clone, Debug)]
pub struct Correspondence {
    pub source: ResidualCatalog,
    pub target: ResidualCatalog,
    pub rows: Vec<CorrespondenceRow>,
    /// Number of source orbits over each target orbit.
    pub fibers: BTreeMap<usize, usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Intertwiners {
    /// `(simple index in W₁, element index in W₂)`.
    pub simple: Vec<(usize, usize)>,
    /// For a rank-0 source: the elements of `W₂` fixing the image point.
    pub stabilizer: Vec<usize>,
}

/// An equivalence class of verified transfer maps.
#[derive(Clone, Debug)]
pub struct STMorphism {
    pub rep: SpectralTransferMap,
    pub record: VerificationRecord,
}

impl STMorphism {
    pub fn from_map(rep: SpectralTransferMap) -> Result<Self> {
        let record = rep.verify()?;
        if !record.valid() {
            return Err(Error::Refuted(record.witnesses.join("; ")));
        }
        Ok(STMorphism { rep, record })
    }

    pub fn dim_source(&self) -> usize {
        self.rep.dim_source()
    }

    /// `dim T₁ - 1`, the rank as literally defined.
    pub fn rank_literal(&self) -> i64 {
        self.rep.dim_source() as i64 - 1
    }

    pub fn cork(&self) -> usize {
        self.rep.cork()
    }

    pub fn a(&self) -> BQ {
        self.record.a.clone().expect("verified")
    }
}

/// A rank-0 morphism `𝐋 ⇝ ℋ` at the orbit of a residual point.
#[derive(Clone, Debug)]
pub struct Rank0Hit {
    /// Index in the list of residual point orbits of the target.
    pub point_index: usize,
    pub point: TorusPoint,
    /// `d⁰ = λ · μ^{({r})}`.
    pub lambda: BQ,
    pub morphism: STMorphism,
}

/// All `W₀r` with `d⁰ = λ μ^{({r})}` for some `λ ∈ Q^×`.
pub fn search_rank0(target: &Algebra, d0: &NormalizingElement) -> Result<Vec<Rank0Hit>> {
    let source = Algebra::rank_zero("L", d0.clone())?;
    let mut out = vec![];
    if target.rank() == 0 {
        let ratio = d0.mul(&target.d.inv());
        if ratio.vexp == 0 && ratio.qints.is_empty() {
            let p = TorusPoint::identity(0);
            let m = SpectralTransferMap::new(&source, target, Coset::point(p.clone()), AffineTorusMap::constant(p.clone()), "rank0");
            out.push(Rank0Hit {
                point_index: 0,
                point: p,
                lambda: ratio.constant.clone(),
                morphism: STMorphism::from_map(m)?,
            });
        }
        return Ok(out);
    }
    let points = enumerate_residual_points(&target.mu, &target.weyl)?;
    for (i, e) in points.iter().enumerate() {
        let fd = formal_degree(&target.mu, &e.coset)?;
        let ratio = d0.mul(&fd.certificate.inv());
        if ratio.vexp != 0 || !ratio.qints.is_empty() {
            continue;
        }
        let lambda = ratio.constant.clone() * BQ::from_integer(fd.sign.into());
        let p = e.coset.base.clone();
        let m = SpectralTransferMap::new(&source, target, e.coset.clone(), AffineTorusMap::constant(p.clone()), "rank0");
        let morphism = STMorphism::from_map(m)?;
        if morphism.a() != lambda.recip() {
            return Err(Error::Internal("rank-0 constant disagrees with the formal degree".into()));
        }
        out.push(Rank0Hit {
            point_index: i,
            point: p,
            lambda,
            morphism,
        });
    }
    Ok(out)
}

/// Outcome of the excellence test for the facet attached to an image coset.
#[derive(Clone, Debug, Serialize)]
pub struct ExcellentReport {
    /// Node names of `J` in the spectral diagram.
    pub j: Vec<String>,
    /// Nodes `b ∉ J` and whether `r* = w_{J∪b} w_J` stabilizes `J`; `None`
    /// when `J ∪ {b}` contains a whole component.
    pub checks: Vec<(String, Option<bool>)>,
    /// Permutations of `J` induced by the `r*`, generating `W*`.
    pub generators: Vec<Vec<String>>,
    pub excellent: bool,
}

type AffVec = Vec<Q>;

fn node_vec(a: &DiagramNode) -> AffVec {
    let mut v: AffVec = a.gradient.iter().map(|&x| q(x)).collect();
    v.push(q(a.constant));
    v
}

/// `s_a(f) = f - <a^∨, grad f> a` on affine functions.
fn reflect(a: &DiagramNode, f: &AffVec) -> AffVec {
    let n = a.gradient.len();
    let c: Q = (0..n).map(|i| f[i] * a.coroot[i]).sum();
    let av = node_vec(a);
    f.iter().zip(&av).map(|(x, y)| *x - c * *y).collect()
}

/// Coefficients of `f` in the span of `basis`, if it lies there.
fn coords(basis: &[AffVec], f: &AffVec) -> Option<Vec<Q>> {
    let k = basis.len();
    let m = f.len();
    let aug: QMat = (0..m)
        .map(|i| {
            let mut r: Vec<Q> = basis.iter().map(|b| b[i]).collect();
            r.push(f[i]);
            r
        })
        .collect();
    let (red, piv) = rref(&aug);
    if piv.contains(&k) {
        return None;
    }
    let mut c = vec![Q::zero(); k];
    for (row, &p) in piv.iter().enumerate() {
        c[p] = red[row][k];
    }
    Some(c)
}

/// The longest element of the parabolic subgroup on `set`, as a word.
fn longest_word(nodes: &[DiagramNode], set: &[usize]) -> Vec<usize> {
    let basis: Vec<AffVec> = set.iter().map(|&i| node_vec(&nodes[i])).collect();
    let apply = |word: &[usize], f: &AffVec| -> AffVec {
        word.iter().rev().fold(f.clone(), |acc, &i| reflect(&nodes[i], &acc))
    };
    let mut word: Vec<usize> = vec![];
    loop {
        // Extend w by s when w(α_s) is positive.
        let next = set.iter().copied().find(|&s| {
            let img = apply(&word, &node_vec(&nodes[s]));
            coords(&basis, &img).is_some_and(|c| c.iter().all(|x| !x.is_negative()))
        });
        match next {
            Some(s) => word.push(s),
            None => return word,
        }
        if word.len() > 200 {
            return word;
        }
    }
}

/// Excellence test of the facet of the fundamental alcove determined by a
/// positive-dimensional residual coset `l` of `target`.
pub fn excellent_subset(target: &Algebra, l: &Coset) -> Result<ExcellentReport> {
    if l.dim() == 0 {
        return Err(Error::Input("the image coset must have positive dimension".into()));
    }
    let sd = spectral_diagram(&target.datum, &target.params)?;
    let nodes = &sd.nodes;
    let n = target.rank();
    // A generic point of θ + U⊗R.
    let mut p: Vec<Q> = l.base.torsion.clone();
    for (j, uj) in l.u.iter().enumerate() {
        let c = Q::new(1, 10_007 * (j as i64 + 1) + 3);
        for i in 0..n {
            p[i] += c * uj[i];
        }
    }
    // Fold into the closed fundamental alcove, recording the reflections.
    let val = |a: &DiagramNode, x: &[Q]| -> Q {
        x.iter().zip(&a.gradient).map(|(xi, gi)| *xi * *gi).sum::<Q>() + a.constant
    };
    let mut word = vec![];
    let mut guard = 0;
    while let Some(i) = nodes.iter().position(|a| val(a, &p) < Q::zero()) {
        let a = &nodes[i];
        let k = val(a, &p);
        for t in 0..n {
            p[t] -= k * a.coroot[t];
        }
        word.push(i);
        guard += 1;
        if guard > 100_000 {
            return Err(Error::Internal("alcove folding did not terminate".into()));
        }
    }
    let j: Vec<usize> = (0..nodes.len()).filter(|&i| val(&nodes[i], &p).is_zero()).collect();
    // The facet subspace must have the dimension of L.
    let grads: IMat = j.iter().map(|&i| nodes[i].gradient.clone()).collect();
    let rank_j = if grads.is_empty() { 0 } else { qrank(&to_qmat(&grads)) };
    if n - rank_j != l.dim() {
        return Err(Error::Internal(format!(
            "facet of {} has dimension {} instead of {}",
            l.render(),
            n - rank_j,
            l.dim()
        )));
    }
    let jset: BTreeSet<AffVec> = j.iter().map(|&i| node_vec(&nodes[i])).collect();
    let mut checks = vec![];
    let mut generators = vec![];
    let mut excellent = true;
    for b in 0..nodes.len() {
        if j.contains(&b) {
            continue;
        }
        let mut jb = j.clone();
        jb.push(b);
        jb.sort_unstable();
        let comp = nodes[b].component;
        let whole = nodes
            .iter()
            .enumerate()
            .filter(|(_, a)| a.component == comp)
            .all(|(i, _)| jb.contains(&i));
        if whole {
            checks.push((nodes[b].name.clone(), None));
            continue;
        }
        let mut r = longest_word(nodes, &jb);
        r.extend(longest_word(nodes, &j));
        let apply = |f: &AffVec| r.iter().rev().fold(f.clone(), |acc, &i| reflect(&nodes[i], &acc));
        let imgs: Vec<AffVec> = j.iter().map(|&i| apply(&node_vec(&nodes[i]))).collect();
        let ok = imgs.iter().all(|f| jset.contains(f));
        if ok {
            let perm: Vec<String> = imgs
                .iter()
                .map(|f| {
                    let k = j.iter().position(|&i| &node_vec(&nodes[i]) == f).unwrap();
                    nodes[j[k]].name.clone()
                })
                .collect();
            generators.push(perm);
        } else {
            excellent = false;
        }
        checks.push((nodes[b].name.clone(), Some(ok)));
    }
    Ok(ExcellentReport {
        j: j.iter().map(|&i| nodes[i].name.clone()).collect(),
        checks,
        generators,
        excellent,
    })
}

/// Verdict of [`check_order_witness`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderVerdict {
    Lower,
    Isogenous { coverings: bool },
    Fail(String),
}

/// Checks that `forward` (and `backward`, when given) are verified transfer
/// maps between the same two algebras.
pub fn check_order_witness(
    forward: &SpectralTransferMap,
    backward: Option<&SpectralTransferMap>,
) -> Result<OrderVerdict> {
    let rf = forward.verify()?;
    if !rf.valid() {
        return Ok(OrderVerdict::Fail(format!("forward witness: {}", rf.summary())));
    }
    let Some(b) = backward else {
        return Ok(OrderVerdict::Lower);
    };
    if b.source.name != forward.target.name || b.target.name != forward.source.name {
        return Ok(OrderVerdict::Fail("witnesses do not connect the same algebras".into()));
    }
    let rb = b.verify()?;
    if !rb.valid() {
        return Ok(OrderVerdict::Fail(format!("backward witness: {}", rb.summary())));
    }
    let coverings = forward.cork() == 0 && b.cork() == 0;
    Ok(OrderVerdict::Isogenous { coverings })
}

/// Identity matrix as a rational cocharacter map.
pub fn identity_lin(n: usize) -> QMat {
    to_qmat(&identity(n))
}

/// Integer matrix of a lattice inclusion `X₂ ⊆ X₁` in the respective bases,
/// from the ambient realizations: rows are the basis of `X₂` in `X₁`
/// coordinates.
pub fn inclusion_matrix(x1: &BasedRootDatum, x2: &BasedRootDatum) -> Result<IMat> {
    let (a1, a2) = match (&x1.ambient, &x2.ambient) {
        (Some(a1), Some(a2)) if a1.tag == a2.tag => (a1, a2),
        _ => {
            return Err(Error::Input(
                "lattice maps need data realized in the same ambient coordinates".into(),
            ))
        }
    };
    let inv = crate::rootdata::lattice::qinverse(&a1.basis)?;
    let b = crate::rootdata::lattice::qmat_mul(&a2.basis, &inv);
    b.iter()
        .map(|r| as_integral(r))
        .collect::<Option<IMat>>()
        .ok_or_else(|| Error::Input("X₂ is not contained in X₁".into()))
}


#[cfg(test)]
mod tests {
    use super::recipes::{self, a1_covering, cd_algebras, cd_square, central_translations, eta, lattice_map, weyl};
    use super::*;
    use crate::exactscalars::cyclotomic::bq;
    use crate::rootdata::{build_from_expr, LatticeChoice};

    fn alg(expr: &str, lat: LatticeChoice, m: i64) -> Algebra {
        let d = build_from_expr(expr, &lat).unwrap();
        let p = ParameterFunction::uniform(&d, m).unwrap();
        Algebra::new(expr, d, p, NormalizingElement::one()).unwrap()
    }

    #[test]
    fn identity_and_weyl_maps() {
        let a = alg("B2", LatticeChoice::Root, 1);
        let r = recipes::identity(&a).verify().unwrap();
        assert!(r.valid());
        assert_eq!(r.a, Some(bq(1)));
        for w in 0..a.weyl.len() {
            let r = weyl(&a, w).verify().unwrap();
            assert_eq!(r.summary(), "VALID, a = 1");
        }
        for t in central_translations(&a).unwrap() {
            assert!(t.verify().unwrap().valid());
        }
    }

    #[test]
    fn a1_covering_is_valid() {
        let c = a1_covering(1).unwrap();
        assert_eq!(c.map.lin, vec![vec![q(2)]]);
        let r = c.verify().unwrap();
        assert!(r.valid(), "{:?}", r.witnesses);
        let corr = c.residual_correspondence().unwrap();
        assert_eq!(corr.rows.len(), corr.source.entries.len());
    }

    #[test]
    fn wrong_direction_fails() {
        let algs = cd_algebras().unwrap();
        assert!(lattice_map(&algs["D_sc"], &algs["D_Z"]).is_err());
    }

    #[test]
    fn rank0_a1() {
        let a = alg("A1", LatticeChoice::Root, 1);
        let d0 = NormalizingElement::new(bq(1), 1, BTreeMap::from([(2, -1)])).unwrap();
        let hits = search_rank0(&a, &d0).unwrap();
        assert_eq!(hits.len(), 1);
        assert_eq!(hits[0].morphism.a().abs(), bq(1));
        assert_eq!(hits[0].morphism.rank_literal(), -1);
        assert_eq!(hits[0].morphism.cork(), 1);
        let wrong = NormalizingElement::new(bq(1), 1, BTreeMap::new()).unwrap();
        assert!(search_rank0(&a, &wrong).unwrap().is_empty());
        let it = hits[0].morphism.rep.intertwiners().unwrap();
        assert_eq!(it.stabilizer.len(), 1);
    }

    #[test]
    fn cd_square_arrows_are_valid_and_commute() {
        let arrows = cd_square().unwrap();
        for f in &arrows {
            let r = f.verify().unwrap();
            assert_eq!(r.summary(), "VALID, a = 1", "{}: {:?}", f.recipe, r.witnesses);
        }
        let get = |s: &str, t: &str| arrows.iter().find(|f| f.source.name == s && f.target.name == t).unwrap();
        let paths = [
            vec![("D_ad", "D_Z"), ("D_Z", "D_sc"), ("D_sc", "C_sc")],
            vec![("D_ad", "D_Z"), ("D_Z", "C1"), ("C1", "C_sc")],
            vec![("D_ad", "B_ad"), ("B_ad", "C1"), ("C1", "C_sc")],
        ];
        let composites: Vec<SpectralTransferMap> = paths
            .iter()
            .map(|p| {
                let mut acc = get(p[0].0, p[0].1).clone();
                for &(s, t) in &p[1..] {
                    acc = acc.compose(get(s, t)).unwrap().0;
                }
                acc
            })
            .collect();
        for c in &composites[1..] {
            assert!(composites[0].equivalent(c).unwrap());
        }
    }

    #[test]
    fn translation_is_not_identity() {
        let a = alg("A1", LatticeChoice::Weight, 1);
        let ts = central_translations(&a).unwrap();
        assert_eq!(ts.len(), 2);
        let id = recipes::identity(&a);
        let nontrivial = ts.iter().find(|t| !t.map.base.is_identity()).unwrap();
        assert!(!id.equivalent(nontrivial).unwrap());
        assert!(id.equivalent(&ts.iter().find(|t| t.map.base.is_identity()).unwrap().clone()).unwrap());
    }

    #[test]
    fn eta_maps_verify() {
        let d = build_from_expr("B2", &LatticeChoice::Standard).unwrap();
        let l: BTreeMap<String, i64> = [("s1", 1), ("s2", 2), ("s0", 5)].iter().map(|(k, v)| (k.to_string(), *v)).collect();
        let m = ParameterFunction::from_labels(&d, &l).unwrap();
        let a = Algebra::new("B2", d.clone(), m.clone(), NormalizingElement::one()).unwrap();
        for class in m.classes(&d) {
            let e = eta(&a, &class).unwrap();
            let r = e.verify().unwrap();
            assert!(r.t3, "{class:?}: {:?}", r.witnesses);
        }
    }

    #[test]
    fn a2_facet_is_not_excellent() {
        let a = alg("A2", LatticeChoice::Root, 1);
        let cat = a.catalog().unwrap();
        let line = cat.entries.iter().find(|e| e.coset.dim() == 1).unwrap();
        let rep = excellent_subset(&a, &line.coset).unwrap();
        assert_eq!(rep.j.len(), 1);
        assert!(!rep.excellent);
    }

    #[test]
    fn order_witness() {
        let c = a1_covering(1).unwrap();
        assert_eq!(check_order_witness(&c, None).unwrap(), OrderVerdict::Lower);
    }

    #[test]
    fn mismatched_labels_fail_t3() {
        let a = alg("A1", LatticeChoice::Root, 1);
        let b = alg("A1", LatticeChoice::Root, 2);
        let m = SpectralTransferMap::new(&a, &b, Coset::whole(1), AffineTorusMap::identity(1), "bad");
        let r = m.verify().unwrap();
        assert!(r.t1 && r.t2 && !r.t3);
        assert!(r.summary().starts_with("INVALID"));
        let half = SpectralTransferMap::new(&a, &a, Coset::whole(1), AffineTorusMap::new(TorusPoint::identity(1), vec![vec![Q::new(1, 2)]], 1), "half");
        assert!(!half.verify().unwrap().t2);
        let collapse = SpectralTransferMap::new(&a, &a, Coset::whole(1), AffineTorusMap::new(TorusPoint::identity(1), vec![vec![q(0)]], 1), "zero");
        assert!(!collapse.verify().unwrap().t1);
    }
}
