//! Ready-made transfer maps: Weyl and central translations, lattice maps,
//! rank-0 embeddings, the involutions η, and the square of type B/C/D
//! algebras in rank 3.

use super::{identity_lin, inclusion_matrix, Algebra, SpectralTransferMap};
use crate::diagrams::spectral_isomorphism_eta;
use crate::error::{Error, Result};
use crate::exactscalars::NormalizingElement;
use crate::rootdata::lattice::{q, to_qmat, torsion_solutions, QMat};
use crate::rootdata::{build_from_expr, LatticeChoice, ParameterFunction};
use crate::torus::{AffineTorusMap, Coset, TorusPoint};
use std::collections::BTreeMap;

pub fn identity(alg: &Algebra) -> SpectralTransferMap {
    let n = alg.rank();
    SpectralTransferMap::new(alg, alg, Coset::whole(n), AffineTorusMap::identity(n), "identity")
}

/// `t ↦ w(t)` for the element with index `w` of `W₀`.
pub fn weyl(alg: &Algebra, w: usize) -> SpectralTransferMap {
    let n = alg.rank();
    let map = AffineTorusMap::identity(n).then_weyl(alg.weyl.get(w));
    SpectralTransferMap::new(alg, alg, Coset::whole(n), map, &format!("weyl {:?}", alg.weyl.get(w).word))
}

/// Multiplication by each element of `Ω_X^* = Hom(X/Q, C^×)`.
pub fn central_translations(alg: &Algebra) -> Result<Vec<SpectralTransferMap>> {
    let n = alg.rank();
    if n == 0 {
        return Ok(vec![identity(alg)]);
    }
    let simple = alg.datum.roots[..n].to_vec();
    let group = torsion_solutions(&simple, n)?;
    Ok(group
        .elements(true)
        .into_iter()
        .map(|t| {
            let t = if t.len() == n { TorusPoint::torsion_only(t) } else { TorusPoint::identity(n) };
            let name = format!("translation {}", t.render());
            SpectralTransferMap::new(alg, alg, Coset::whole(n), AffineTorusMap::new(t, identity_lin(n), n), &name)
        })
        .collect())
}

/// The isogeny `T₁ → T₂` dual to an inclusion `X₂ ⊆ X₁` of lattices realized
/// in common ambient coordinates.
pub fn lattice_map(source: &Algebra, target: &Algebra) -> Result<SpectralTransferMap> {
    let n = source.rank();
    if target.rank() != n {
        return Err(Error::Input("lattice maps need algebras of equal rank".into()));
    }
    let b = inclusion_matrix(&source.datum, &target.datum)?;
    let map = AffineTorusMap::new(TorusPoint::identity(n), to_qmat(&b), n);
    let name = format!("lattice {} -> {}", source.name, target.name);
    Ok(SpectralTransferMap::new(source, target, Coset::whole(n), map, &name))
}

/// `𝐋 ⇝ ℋ` at the residual point `r`, with source normalization `d0`.
pub fn rank_zero(target: &Algebra, r: &TorusPoint, d0: &NormalizingElement) -> Result<SpectralTransferMap> {
    let source = Algebra::rank_zero("L", d0.clone())?;
    Ok(SpectralTransferMap::new(
        &source,
        target,
        Coset::point(r.clone()),
        AffineTorusMap::constant(r.clone()),
        "rank0",
    ))
}

/// The spectral isomorphism `η^𝐜 : ℋ(ℛ, m) ⇝ ℋ(ℛ, m')`.
pub fn eta(alg: &Algebra, class: &[String]) -> Result<SpectralTransferMap> {
    let e = spectral_isomorphism_eta(&alg.datum, &alg.params, class)?;
    let target = Algebra::new(&format!("{}^eta", alg.name), alg.datum.clone(), e.params, alg.d.clone())?;
    let n = alg.rank();
    Ok(SpectralTransferMap::new(alg, &target, Coset::whole(n), e.map, &format!("eta {}", class.join(","))))
}

/// Covering `ℋ(A1, P, m) ⇝ ℋ(A1, Q, m)` for uniform labels `m`.
pub fn a1_covering(m: i64) -> Result<SpectralTransferMap> {
    let dp = build_from_expr("A1", &LatticeChoice::Weight)?;
    let dq = build_from_expr("A1", &LatticeChoice::Root)?;
    let src = Algebra::new("A1_P", dp.clone(), ParameterFunction::uniform(&dp, m)?, NormalizingElement::one())?;
    let tgt = Algebra::new("A1_Q", dq.clone(), ParameterFunction::uniform(&dq, m)?, NormalizingElement::one())?;
    lattice_map(&src, &tgt)
}

/// The six rank-3 algebras of type B, C and D used in [`cd_square`].
pub fn cd_algebras() -> Result<BTreeMap<String, Algebra>> {
    let one = NormalizingElement::one();
    let labels = |pairs: &[(&str, i64)]| -> BTreeMap<String, i64> {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    };
    let d_roots: QMat = vec![
        vec![q(1), q(-1), q(0)],
        vec![q(0), q(1), q(-1)],
        vec![q(0), q(1), q(1)],
    ];
    let mut out = BTreeMap::new();
    let mut add = |name: &str, expr: &str, lat: LatticeChoice, lab: Option<BTreeMap<String, i64>>| -> Result<()> {
        let d = build_from_expr(expr, &lat)?;
        let m = match lab {
            None => ParameterFunction::uniform(&d, 1)?,
            Some(l) => ParameterFunction::from_labels(&d, &l)?,
        };
        out.insert(name.to_string(), Algebra::new(name, d, m, one.clone())?);
        Ok(())
    };
    let bc = labels(&[("s1", 1), ("s2", 1), ("s3", 0), ("s0", 0)]);
    add("D_sc", "D3", LatticeChoice::Root, None)?;
    add(
        "C_sc",
        "C3",
        LatticeChoice::Basis(d_roots),
        Some(labels(&[("s1", 1), ("s2", 1), ("s3", 0), ("s0", 1)])),
    )?;
    add("D_Z", "D3", LatticeChoice::Standard, None)?;
    add("C1", "B3", LatticeChoice::Standard, Some(bc.clone()))?;
    add("B_ad", "B3", LatticeChoice::Weight, Some(bc))?;
    add("D_ad", "D3", LatticeChoice::Weight, None)?;
    Ok(out)
}

/// Arrows of the square, as `(source, target)` names.
pub const CD_ARROWS: [(&str, &str); 7] = [
    ("D_ad", "D_Z"),
    ("D_Z", "D_sc"),
    ("D_ad", "B_ad"),
    ("D_Z", "C1"),
    ("D_sc", "C_sc"),
    ("B_ad", "C1"),
    ("C1", "C_sc"),
];

/// All arrows of the square as lattice maps.
pub fn cd_square() -> Result<Vec<SpectralTransferMap>> {
    let algs = cd_algebras()?;
    CD_ARROWS
        .iter()
        .map(|(s, t)| lattice_map(&algs[*s], &algs[*t]))
        .collect()
}

/// Looks up a recipe by name.  Names: `identity`, `a1-covering`,
/// `cd:<source>-><target>`.
pub fn by_name(name: &str) -> Result<SpectralTransferMap> {
    if name == "a1-covering" {
        return a1_covering(1);
    }
    if let Some(rest) = name.strip_prefix("cd:") {
        let (s, t) = rest
            .split_once("->")
            .ok_or_else(|| Error::Input(format!("malformed recipe `{name}`")))?;
        let algs = cd_algebras()?;
        let get = |k: &str| {
            algs.get(k.trim())
                .ok_or_else(|| Error::Input(format!("unknown algebra `{k}`")))
        };
        return lattice_map(get(s)?, get(t)?);
    }
    Err(Error::Input(format!("unknown recipe `{name}`")))
}
