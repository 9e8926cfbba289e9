//! Parameter functions `m` on the affine simple reflections.

use super::datum::BasedRootDatum;
use crate::error::{Error, Result};
use std::collections::BTreeMap;

/// A W-invariant labelling of the affine reflections.
///
/// For each root α the two labels are `a(α) = m_R(α^∨)` and
/// `b(α) = m_R(α^∨ + 1)`.  They differ only when `α^∨ ∈ 2Y`.  The half-integral
/// parameters are `m₊ = (a+b)/2` and `m₋ = (a-b)/2`; we store twice their value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParameterFunction {
    pub a: Vec<i64>,
    pub b: Vec<i64>,
    /// Labels of the affine simple reflections by node name.
    pub nodes: BTreeMap<String, i64>,
}

/// Node names of the affine simple reflections: `s1..sn` for `F₀` and one
/// affine node per component (`s0`, or `s0.k` for products).
pub fn node_names(d: &BasedRootDatum) -> Vec<String> {
    let mut v: Vec<String> = (0..d.rank).map(|i| format!("s{}", i + 1)).collect();
    v.extend((0..d.components.len()).map(|k| affine_node_name(d, k)));
    v
}

pub fn affine_node_name(d: &BasedRootDatum, comp: usize) -> String {
    if d.components.len() == 1 {
        "s0".into()
    } else {
        format!("s0.{}", comp + 1)
    }
}

/// The root `θ_s` whose coroot is the highest root of `R₀^∨` in a component,
/// i.e. the highest short root.
pub fn dual_highest_root(d: &BasedRootDatum, comp: usize) -> usize {
    let c = &d.components[comp];
    let orbit = d.root_orbits();
    let long = orbit[c.highest];
    let short_exists = c.roots.iter().any(|&r| orbit[r] != long);
    *c.roots
        .iter()
        .filter(|&&r| r < d.npos && (!short_exists || orbit[r] != long))
        .max_by_key(|&&r| d.height(r))
        .expect("component has a positive root")
}

impl ParameterFunction {
    /// All labels equal to `k`.
    pub fn uniform(d: &BasedRootDatum, k: i64) -> Result<Self> {
        let mut m = BTreeMap::new();
        m.insert("default".to_string(), k);
        Self::from_labels(d, &m)
    }

    /// Builds `m` from node labels.  The key `default` fills unspecified nodes.
    pub fn from_labels(d: &BasedRootDatum, labels: &BTreeMap<String, i64>) -> Result<Self> {
        let names = node_names(d);
        for k in labels.keys() {
            if k != "default" && !names.contains(k) {
                return Err(Error::InvalidParameters(format!(
                    "unknown node `{k}` (expected one of {})",
                    names.join(", ")
                )));
            }
        }
        let get = |name: &str| -> Result<i64> {
            labels
                .get(name)
                .or_else(|| labels.get("default"))
                .copied()
                .ok_or_else(|| Error::InvalidParameters(format!("missing label for node `{name}`")))
        };
        let orbit = d.root_orbits();
        let nroots = d.num_roots();
        let mut orbit_label: BTreeMap<usize, (i64, String)> = BTreeMap::new();
        for i in 0..d.rank {
            let name = format!("s{}", i + 1);
            let v = get(&name)?;
            match orbit_label.get(&orbit[i]) {
                Some((w, other)) if *w != v => {
                    return Err(Error::InvalidParameters(format!(
                        "nodes {other} and {name} are W-conjugate but have labels {w} and {v}"
                    )))
                }
                Some(_) => {}
                None => {
                    orbit_label.insert(orbit[i], (v, name));
                }
            }
        }
        let mut a = vec![0; nroots];
        for k in 0..nroots {
            a[k] = orbit_label[&orbit[k]].0;
        }
        let mut b = a.clone();
        let mut nodes = BTreeMap::new();
        for (i, name) in names.iter().enumerate().take(d.rank) {
            nodes.insert(name.clone(), a[i]);
        }
        for c in 0..d.components.len() {
            let name = affine_node_name(d, c);
            let v = get(&name)?;
            let th = dual_highest_root(d, c);
            if d.coroot_in_2y(th) {
                for &r in &d.components[c].roots {
                    if d.coroot_in_2y(r) {
                        b[r] = v;
                    }
                }
            } else if v != a[th] {
                let (_, fin) = &orbit_label[&orbit[th]];
                return Err(Error::InvalidParameters(format!(
                    "nodes {name} and {fin} are W-conjugate but have labels {v} and {}",
                    a[th]
                )));
            }
            nodes.insert(name, v);
        }
        Ok(ParameterFunction { a, b, nodes })
    }

    /// Builds `m` directly from per-root labels, checking W₀-invariance.
    pub fn from_root_labels(d: &BasedRootDatum, a: Vec<i64>, b: Vec<i64>) -> Result<Self> {
        let orbit = d.root_orbits();
        for k in 0..d.num_roots() {
            for l in 0..d.num_roots() {
                if orbit[k] == orbit[l] && (a[k] != a[l] || b[k] != b[l]) {
                    return Err(Error::InvalidParameters("labels are not W₀-invariant".into()));
                }
            }
            if a[k] != b[k] && !d.coroot_in_2y(k) {
                return Err(Error::InvalidParameters(
                    "a and b may differ only when α^∨ ∈ 2Y".into(),
                ));
            }
        }
        let mut nodes = BTreeMap::new();
        for i in 0..d.rank {
            nodes.insert(format!("s{}", i + 1), a[i]);
        }
        for c in 0..d.components.len() {
            let th = dual_highest_root(d, c);
            nodes.insert(affine_node_name(d, c), b[th]);
        }
        Ok(ParameterFunction { a, b, nodes })
    }

    /// `2 m₊(α) = a + b`.
    pub fn m_plus2(&self, k: usize) -> i64 {
        self.a[k] + self.b[k]
    }

    /// `2 m₋(α) = a - b`.
    pub fn m_minus2(&self, k: usize) -> i64 {
        self.a[k] - self.b[k]
    }

    /// `n_m(α) ∈ {1, 2}`.
    pub fn n_m(&self, k: usize) -> i64 {
        if self.a[k] != self.b[k] {
            2
        } else {
            1
        }
    }

    pub fn is_zero(&self) -> bool {
        self.a.iter().chain(&self.b).all(|&x| x == 0)
    }

    /// Standard: every affine simple reflection has a nonzero label.
    pub fn is_standard(&self, d: &BasedRootDatum) -> bool {
        (0..d.npos).all(|k| self.a[k] != 0 && self.b[k] != 0)
    }

    /// Semi-standard: a zero label is allowed only at one end of a pair
    /// `(a, b)` with `α^∨ ∈ 2Y`, and never at both.
    pub fn is_semi_standard(&self, d: &BasedRootDatum) -> bool {
        (0..d.npos).all(|k| {
            if d.coroot_in_2y(k) {
                self.a[k] != 0 || self.b[k] != 0
            } else {
                self.a[k] != 0
            }
        })
    }

    /// W-conjugacy classes of affine simple reflections as groups of node names.
    pub fn classes(&self, d: &BasedRootDatum) -> Vec<Vec<String>> {
        let orbit = d.root_orbits();
        let mut groups: BTreeMap<(usize, bool), Vec<String>> = BTreeMap::new();
        for i in 0..d.rank {
            groups
                .entry((orbit[i], false))
                .or_default()
                .push(format!("s{}", i + 1));
        }
        for c in 0..d.components.len() {
            let th = dual_highest_root(d, c);
            let odd = d.coroot_in_2y(th);
            groups
                .entry((orbit[th], odd))
                .or_default()
                .push(affine_node_name(d, c));
        }
        groups.into_values().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootdata::datum::{build_from_expr, LatticeChoice};

    fn labels(pairs: &[(&str, i64)]) -> BTreeMap<String, i64> {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn a1_root_lattice_has_two_classes() {
        let d = build_from_expr("A1", &LatticeChoice::Root).unwrap();
        let m = ParameterFunction::from_labels(&d, &labels(&[("s1", 3), ("s0", 1)])).unwrap();
        assert_eq!(m.m_plus2(0), 4);
        assert_eq!(m.m_minus2(0), 2);
        assert_eq!(m.n_m(0), 2);
        assert_eq!(m.classes(&d).len(), 2);
    }

    #[test]
    fn a1_weight_lattice_forces_equal_labels() {
        let d = build_from_expr("A1", &LatticeChoice::Weight).unwrap();
        let err = ParameterFunction::from_labels(&d, &labels(&[("s1", 3), ("s0", 1)])).unwrap_err();
        assert!(err.to_string().contains("s0"));
        assert!(err.to_string().contains("s1"));
        assert_eq!(ParameterFunction::uniform(&d, 2).unwrap().classes(&d).len(), 1);
    }

    #[test]
    fn b2_labels_by_length() {
        let d = build_from_expr("B2", &LatticeChoice::Standard).unwrap();
        let m = ParameterFunction::from_labels(&d, &labels(&[("s1", 1), ("s2", 2), ("s0", 1)])).unwrap();
        // Short roots ±e_i have coroots ±2e_i ∈ 2Y.
        assert_eq!(m.n_m(1), 2);
        assert_eq!(m.n_m(0), 1);
        assert_eq!(m.classes(&d).len(), 3);
        let dp = build_from_expr("B2", &LatticeChoice::Weight).unwrap();
        assert!(!dp.coroot_in_2y(dual_highest_root(&dp, 0)));
        let e = ParameterFunction::from_labels(&dp, &labels(&[("s1", 1), ("s2", 2), ("s0", 1)]));
        assert!(e.is_err());
    }

    #[test]
    fn unknown_node_rejected() {
        let d = build_from_expr("A2", &LatticeChoice::Root).unwrap();
        assert!(ParameterFunction::from_labels(&d, &labels(&[("s7", 1)])).is_err());
    }
}
