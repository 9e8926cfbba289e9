//! Based root data with roots in lattice coordinates.

use super::cartan::{recognize, CartanType};
use super::lattice::{
    as_integral, dot, lattice_quotient, q, qdot_q, qinverse, qmat_vec, to_qmat, transpose,
    FiniteAbelianGroup, IMat, QMat,
};
use crate::error::{Error, Result};
use std::cmp::Reverse;
use std::collections::HashMap;

/// Choice of character lattice between the root and the weight lattice.
#[derive(Clone, Debug, PartialEq)]
pub enum LatticeChoice {
    /// The root lattice `Q(R₀)`.
    Root,
    /// The weight lattice `P(R₀)`.
    Weight,
    /// `Z^n` in the coordinates `e_1..e_n` (classical B/C/D components only).
    Standard,
    /// Explicit basis rows in ambient coordinates.
    Basis(QMat),
}

impl LatticeChoice {
    pub fn name(&self) -> &'static str {
        match self {
            LatticeChoice::Root => "Q",
            LatticeChoice::Weight => "P",
            LatticeChoice::Standard => "Z",
            LatticeChoice::Basis(_) => "basis",
        }
    }
}

/// An irreducible summand of a root datum.
#[derive(Clone, Debug)]
pub struct Component {
    pub cartan: CartanType,
    /// Global simple-root indices of this summand in Bourbaki order.
    pub simple: Vec<usize>,
    /// Indices of all roots of the summand.
    pub roots: Vec<usize>,
    /// Index of the highest root.
    pub highest: usize,
}

/// Ambient realization, used to compare lattices of different data.
#[derive(Clone, Debug, PartialEq)]
pub struct Ambient {
    /// Identifies the ambient coordinate system (two data can be related by a
    /// lattice map only if the tags agree).
    pub tag: String,
    /// Rows: the basis of X in ambient coordinates.
    pub basis: QMat,
}

/// A based semisimple root datum `(X, R₀, Y, R₀^∨, F₀)`.
///
/// `X = Z^rank` in the chosen basis and `Y` is its dual, so the pairing is the
/// dot product.  Roots `0..npos` are positive, root `npos + i` is `-root i`, and
/// the simple roots are `0..rank` in component order.
#[derive(Clone, Debug)]
pub struct BasedRootDatum {
    pub rank: usize,
    pub roots: IMat,
    pub coroots: IMat,
    /// Coordinates of each root in the basis of simple roots.
    pub simple_coords: IMat,
    pub npos: usize,
    pub components: Vec<Component>,
    pub ambient: Option<Ambient>,
    /// Human-readable type, e.g. `B2` or `A1xA1`.
    pub type_label: String,
    pub lattice_label: String,
    index: HashMap<Vec<i64>, usize>,
}

impl BasedRootDatum {
    /// The datum of rank zero (no roots, trivial torus).
    pub fn rank_zero() -> Self {
        BasedRootDatum {
            rank: 0,
            roots: vec![],
            coroots: vec![],
            simple_coords: vec![],
            npos: 0,
            components: vec![],
            ambient: None,
            type_label: "rank0".into(),
            lattice_label: "-".into(),
            index: HashMap::new(),
        }
    }

    /// Builds the datum generated by simple roots (X coordinates) and simple
    /// coroots (Y coordinates).  `types`, when given, names the components in
    /// the order in which they are discovered.
    pub fn from_simple(
        simple_roots: &IMat,
        simple_coroots: &IMat,
        types: Option<&[CartanType]>,
    ) -> Result<Self> {
        let n = simple_roots.len();
        if n == 0 {
            return Ok(Self::rank_zero());
        }
        if simple_coroots.len() != n || simple_roots.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidDatum(
                "number of simple roots must equal the lattice rank".into(),
            ));
        }
        let cartan: IMat = (0..n)
            .map(|i| (0..n).map(|j| dot(&simple_coroots[i], &simple_roots[j])).collect())
            .collect();
        for i in 0..n {
            if cartan[i][i] != 2 {
                return Err(Error::InvalidDatum(format!("<α^∨,α> != 2 for simple root {i}")));
            }
            for j in 0..n {
                if i != j {
                    let (a, b) = (cartan[i][j], cartan[j][i]);
                    if a > 0 || b > 0 || (a == 0) != (b == 0) || a * b > 3 {
                        return Err(Error::InvalidDatum(format!(
                            "non-crystallographic Cartan entries at ({i},{j})"
                        )));
                    }
                }
            }
        }
        let mut roots: Vec<(Vec<i64>, Vec<i64>, Vec<i64>)> = (0..n)
            .map(|i| {
                let mut c = vec![0; n];
                c[i] = 1;
                (simple_roots[i].clone(), simple_coroots[i].clone(), c)
            })
            .collect();
        let mut seen: HashMap<Vec<i64>, usize> =
            roots.iter().enumerate().map(|(k, r)| (r.0.clone(), k)).collect();
        let mut head = 0;
        while head < roots.len() {
            let (r, c, co) = roots[head].clone();
            for i in 0..n {
                let k = dot(&simple_coroots[i], &r);
                let l = dot(&c, &simple_roots[i]);
                let nr: Vec<i64> = r.iter().zip(&simple_roots[i]).map(|(a, b)| a - k * b).collect();
                if seen.contains_key(&nr) {
                    continue;
                }
                let nc: Vec<i64> = c.iter().zip(&simple_coroots[i]).map(|(a, b)| a - l * b).collect();
                let mut nco = co.clone();
                nco[i] -= k;
                seen.insert(nr.clone(), roots.len());
                roots.push((nr, nc, nco));
                if roots.len() > 2000 {
                    return Err(Error::BoundExceeded("root system too large".into()));
                }
            }
            head += 1;
        }
        let mut pos: Vec<(Vec<i64>, Vec<i64>, Vec<i64>)> = vec![];
        for (r, c, co) in &roots {
            let nonneg = co.iter().all(|&x| x >= 0);
            let nonpos = co.iter().all(|&x| x <= 0);
            if !nonneg && !nonpos {
                return Err(Error::InvalidDatum("simple system is not a base".into()));
            }
            if nonneg {
                pos.push((r.clone(), c.clone(), co.clone()));
            }
        }
        pos.sort_by_key(|(_, _, co)| (co.iter().sum::<i64>(), Reverse(co.clone())));
        let npos = pos.len();
        let mut all_r = vec![];
        let mut all_c = vec![];
        let mut all_co = vec![];
        for (r, c, co) in &pos {
            all_r.push(r.clone());
            all_c.push(c.clone());
            all_co.push(co.clone());
        }
        for (r, c, co) in &pos {
            all_r.push(r.iter().map(|x| -x).collect());
            all_c.push(c.iter().map(|x| -x).collect());
            all_co.push(co.iter().map(|x| -x).collect());
        }
        let index: HashMap<Vec<i64>, usize> =
            all_r.iter().enumerate().map(|(k, r)| (r.clone(), k)).collect();
        // Components: connected components of the Dynkin graph, in order of the
        // smallest simple index.
        let mut comp_of = vec![usize::MAX; n];
        let mut comps: Vec<Vec<usize>> = vec![];
        for s in 0..n {
            if comp_of[s] != usize::MAX {
                continue;
            }
            let id = comps.len();
            let mut stack = vec![s];
            let mut members = vec![];
            comp_of[s] = id;
            while let Some(x) = stack.pop() {
                members.push(x);
                for y in 0..n {
                    if comp_of[y] == usize::MAX && cartan[x][y] != 0 {
                        comp_of[y] = id;
                        stack.push(y);
                    }
                }
            }
            members.sort();
            comps.push(members);
        }
        if let Some(t) = types {
            if t.len() != comps.len() {
                return Err(Error::InvalidDatum("component count mismatch".into()));
            }
        }
        let mut components = vec![];
        for (cid, members) in comps.iter().enumerate() {
            let sub: IMat = members
                .iter()
                .map(|&i| members.iter().map(|&j| cartan[i][j]).collect())
                .collect();
            let (cartan_type, simple) = match types {
                Some(t) => (t[cid], members.clone()),
                None => {
                    let (ct, perm) = recognize(&sub).ok_or_else(|| {
                        Error::InvalidDatum("unrecognized Cartan matrix".into())
                    })?;
                    (ct, perm.into_iter().map(|p| members[p]).collect())
                }
            };
            let root_ids: Vec<usize> = (0..all_r.len())
                .filter(|&k| {
                    all_co[k]
                        .iter()
                        .enumerate()
                        .all(|(i, &x)| x == 0 || comp_of[i] == cid)
                })
                .collect();
            let highest = *root_ids
                .iter()
                .filter(|&&k| k < npos)
                .max_by_key(|&&k| all_co[k].iter().sum::<i64>())
                .unwrap();
            components.push(Component {
                cartan: cartan_type,
                simple,
                roots: root_ids,
                highest,
            });
        }
        let type_label = components
            .iter()
            .map(|c| c.cartan.to_string())
            .collect::<Vec<_>>()
            .join("x");
        Ok(BasedRootDatum {
            rank: n,
            roots: all_r,
            coroots: all_c,
            simple_coords: all_co,
            npos,
            components,
            ambient: None,
            type_label,
            lattice_label: "basis".into(),
            index,
        })
    }

    pub fn num_roots(&self) -> usize {
        self.roots.len()
    }

    /// Simple root indices `F₀` (always `0..rank`).
    pub fn simple(&self) -> Vec<usize> {
        (0..self.rank).collect()
    }

    pub fn neg(&self, i: usize) -> usize {
        if i < self.npos {
            i + self.npos
        } else {
            i - self.npos
        }
    }

    pub fn is_positive(&self, i: usize) -> bool {
        i < self.npos
    }

    pub fn root_index(&self, r: &[i64]) -> Option<usize> {
        self.index.get(r).copied()
    }

    /// `<α_i^∨, α_j>`.
    pub fn pairing(&self, coroot: usize, root: usize) -> i64 {
        dot(&self.coroots[coroot], &self.roots[root])
    }

    pub fn cartan_matrix(&self) -> IMat {
        (0..self.rank)
            .map(|i| (0..self.rank).map(|j| self.pairing(i, j)).collect())
            .collect()
    }

    pub fn height(&self, i: usize) -> i64 {
        self.simple_coords[i].iter().sum()
    }

    pub fn component_of_root(&self, i: usize) -> usize {
        self.components
            .iter()
            .position(|c| c.roots.contains(&i))
            .expect("root belongs to a component")
    }

    pub fn component_of_simple(&self, s: usize) -> usize {
        self.components
            .iter()
            .position(|c| c.simple.contains(&s))
            .expect("simple root belongs to a component")
    }

    /// True if `α^∨ ∈ 2Y`, i.e. all entries of the coroot are even.
    pub fn coroot_in_2y(&self, i: usize) -> bool {
        self.coroots[i].iter().all(|x| x % 2 == 0)
    }

    /// W₀-orbit id of each root: roots of the same component and the same
    /// length share an orbit.  Orbits are numbered by first appearance.
    pub fn root_orbits(&self) -> Vec<usize> {
        // Squared length up to scale: use <α^∨, β>/<β^∨, α> ratios inside a
        // component, seeded at the highest root (which is long).
        let mut orbit = vec![usize::MAX; self.num_roots()];
        let mut next = 0;
        for comp in &self.components {
            let h = comp.highest;
            let mut long_id = None;
            let mut short_id = None;
            for &r in &comp.roots {
                let is_long = self.is_long_in(h, r);
                let slot = if is_long { &mut long_id } else { &mut short_id };
                if slot.is_none() {
                    *slot = Some(next);
                    next += 1;
                }
                orbit[r] = slot.unwrap();
            }
        }
        orbit
    }

    /// Whether root `r` has the same length as the (long) root `h` of its component.
    fn is_long_in(&self, h: usize, r: usize) -> bool {
        // Compare lengths through a chain: |r|^2/|h|^2 = <h^∨,r>/<r^∨,h> when nonzero.
        let a = self.pairing(h, r);
        let b = self.pairing(r, h);
        if a != 0 {
            return a == b;
        }
        // Orthogonal to h: find a root not orthogonal to both.
        let comp = self.component_of_root(r);
        for &t in &self.components[comp].roots {
            let (x, y) = (self.pairing(t, r), self.pairing(r, t));
            let (u, w) = (self.pairing(h, t), self.pairing(t, h));
            if x != 0 && u != 0 {
                // |r|^2/|t|^2 = x / y ; |t|^2/|h|^2 = u / w.
                return x * u == y * w;
            }
        }
        true
    }

    /// Lattice `P(R₀^∨)/Y` is not needed here; this returns `X/Q(R₀)`.
    pub fn omega_x(&self) -> Result<FiniteAbelianGroup> {
        let x = to_qmat(&super::lattice::identity(self.rank));
        let qr = to_qmat(&self.roots[..self.rank].to_vec());
        lattice_quotient(&x, &qr)
    }

    /// Restricts to the sub-root-system spanned by the simple roots in `p`.
    pub fn roots_in_span(&self, p: &[usize]) -> Vec<usize> {
        (0..self.num_roots())
            .filter(|&k| {
                self.simple_coords[k]
                    .iter()
                    .enumerate()
                    .all(|(i, &x)| x == 0 || p.contains(&i))
            })
            .collect()
    }
}

/// Builds a datum from a product of Cartan types and a lattice choice.
pub fn build_root_datum(types: &[CartanType], lattice: &LatticeChoice) -> Result<BasedRootDatum> {
    let n: usize = types.iter().map(|t| t.rank).sum();
    let mut amb_roots: QMat = vec![];
    let mut amb_coroots: QMat = vec![];
    let mut weights: QMat = vec![];
    let mut standard: QMat = vec![];
    let mut tags = vec![];
    let mut offset = 0;
    for t in types {
        let (r, c) = t.ambient_simple();
        let w = t.ambient_fundamental_weights();
        let pad = |v: &Vec<num_rational::Ratio<i64>>| -> Vec<num_rational::Ratio<i64>> {
            let mut out = vec![q(0); n];
            out[offset..offset + t.rank].copy_from_slice(v);
            out
        };
        amb_roots.extend(r.iter().map(pad));
        amb_coroots.extend(c.iter().map(pad));
        weights.extend(w.iter().map(pad));
        standard.extend(t.ambient_standard().iter().map(pad));
        tags.push(if t.is_classical_eps() {
            format!("eps{}", t.rank)
        } else {
            format!("wt:{t}")
        });
        offset += t.rank;
    }
    let basis = match lattice {
        LatticeChoice::Root => amb_roots.clone(),
        LatticeChoice::Weight => weights,
        LatticeChoice::Standard => {
            if !types.iter().all(|t| t.is_classical_eps()) {
                return Err(Error::InvalidDatum(
                    "the standard lattice Z^n is only defined for B, C, D components".into(),
                ));
            }
            standard
        }
        LatticeChoice::Basis(b) => {
            if b.len() != n || b.iter().any(|r| r.len() != n) {
                return Err(Error::InvalidDatum(format!("basis must be {n}x{n}")));
            }
            b.clone()
        }
    };
    let binv = qinverse(&basis)
        .map_err(|_| Error::InvalidDatum("lattice basis is singular".into()))?;
    let binv_t = transpose(&binv);
    let mut sr = vec![];
    for r in &amb_roots {
        // r = c B  =>  c = r B^{-1}, i.e. c^T = (B^{-1})^T r^T.
        let c = qmat_vec(&binv_t, r);
        sr.push(as_integral(&c).ok_or_else(|| {
            Error::InvalidDatum("lattice does not contain the root lattice Q(R₀)".into())
        })?);
    }
    let mut sc = vec![];
    for c in &amb_coroots {
        let y: Vec<_> = basis.iter().map(|b| qdot_q(c, b)).collect();
        sc.push(as_integral(&y).ok_or_else(|| {
            Error::InvalidDatum("lattice is not contained in the weight lattice P(R₀)".into())
        })?);
    }
    let mut d = BasedRootDatum::from_simple(&sr, &sc, Some(types))?;
    d.ambient = Some(Ambient {
        tag: tags.join("+"),
        basis,
    });
    d.type_label = types.iter().map(|t| t.to_string()).collect::<Vec<_>>().join("x");
    d.lattice_label = lattice.name().into();
    Ok(d)
}

/// Parses a type expression and builds the datum.
pub fn build_from_expr(expr: &str, lattice: &LatticeChoice) -> Result<BasedRootDatum> {
    let types = super::cartan::parse_type_expr(expr)?;
    build_root_datum(&types, lattice)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn a1_lattices() {
        let dq = build_from_expr("A1", &LatticeChoice::Root).unwrap();
        assert_eq!(dq.roots[0], vec![1]);
        assert_eq!(dq.coroots[0], vec![2]);
        let dp = build_from_expr("A1", &LatticeChoice::Weight).unwrap();
        assert_eq!(dp.roots[0], vec![2]);
        assert_eq!(dp.coroots[0], vec![1]);
    }

    #[test]
    fn root_counts() {
        for (s, n) in [("A2", 6), ("B2", 8), ("G2", 12), ("B3", 18), ("D4", 24), ("F4", 48), ("E6", 72)] {
            let d = build_from_expr(s, &LatticeChoice::Root).unwrap();
            assert_eq!(d.num_roots(), n, "{s}");
        }
    }

    #[test]
    fn rejects_bad_lattices() {
        let half = num_rational::Ratio::new(1, 2);
        let b = vec![vec![half]];
        // (1/2)α is the fundamental weight of A1 in weight coordinates? In
        // weight coordinates α = 2ω, so basis [1/2] means ω/2, outside P.
        assert!(build_from_expr("A1", &LatticeChoice::Basis(b)).is_err());
        assert!(build_from_expr("A2", &LatticeChoice::Standard).is_err());
    }

    #[test]
    fn orbits_by_length() {
        let d = build_from_expr("B2", &LatticeChoice::Root).unwrap();
        let o = d.root_orbits();
        let distinct: std::collections::BTreeSet<_> = o.iter().collect();
        assert_eq!(distinct.len(), 2);
        let d = build_from_expr("A1xA1", &LatticeChoice::Root).unwrap();
        let o = d.root_orbits();
        assert_ne!(o[0], o[1]);
    }
}
