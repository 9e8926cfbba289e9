//! Enumeration of the finite Weyl group `W₀` with reduced words.

use super::datum::BasedRootDatum;
use super::lattice::{identity, imat_mul, imat_vec, IMat};
use crate::error::{Error, Result};
use std::collections::HashMap;

/// Default bound on `|W₀|` (the order of `W(E6)`).
pub const DEFAULT_WEYL_BOUND: usize = 51840;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeylElement {
    /// Action on X (column vectors in X coordinates).
    pub matrix: IMat,
    /// Contragredient action on Y.
    pub matrix_y: IMat,
    /// Reduced word in simple reflections; `word[0]` is applied last.
    pub word: Vec<usize>,
    /// `perm[k]` is the index of `w(root k)`.
    pub perm: Vec<usize>,
}

impl WeylElement {
    pub fn length(&self) -> usize {
        self.word.len()
    }

    pub fn act_x(&self, x: &[i64]) -> Vec<i64> {
        imat_vec(&self.matrix, x)
    }

    pub fn act_y(&self, y: &[i64]) -> Vec<i64> {
        imat_vec(&self.matrix_y, y)
    }

    pub fn is_identity(&self) -> bool {
        self.word.is_empty()
    }
}

/// The enumerated Weyl group of a datum.
#[derive(Clone, Debug)]
pub struct WeylGroup {
    pub elements: Vec<WeylElement>,
    /// Simple reflections as element indices.
    pub simple: Vec<usize>,
    pub longest: usize,
    by_perm: HashMap<Vec<usize>, usize>,
    rank: usize,
}

/// Matrix of `s_i` on X: `x ↦ x - <α_i^∨, x> α_i`.
pub fn reflection_x(d: &BasedRootDatum, root: usize) -> IMat {
    let n = d.rank;
    let (r, c) = (&d.roots[root], &d.coroots[root]);
    (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j) - r[i] * c[j]).collect())
        .collect()
}

/// Matrix of `s_i` on Y: `y ↦ y - <y, α_i> α_i^∨`.
pub fn reflection_y(d: &BasedRootDatum, root: usize) -> IMat {
    let n = d.rank;
    let (r, c) = (&d.roots[root], &d.coroots[root]);
    (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j) - c[i] * r[j]).collect())
        .collect()
}

fn root_perm(d: &BasedRootDatum, m: &IMat) -> Vec<usize> {
    d.roots
        .iter()
        .map(|r| d.root_index(&imat_vec(m, r)).expect("Weyl group preserves roots"))
        .collect()
}

impl WeylGroup {
    pub fn new(d: &BasedRootDatum) -> Result<Self> {
        Self::with_bound(d, DEFAULT_WEYL_BOUND)
    }

    /// Breadth-first enumeration: each new element is `s_i w` with `w` one
    /// shorter, so words come out reduced.
    pub fn with_bound(d: &BasedRootDatum, bound: usize) -> Result<Self> {
        let n = d.rank;
        let gens: Vec<(IMat, IMat, Vec<usize>)> = (0..n)
            .map(|i| {
                let mx = reflection_x(d, i);
                let p = root_perm(d, &mx);
                (mx, reflection_y(d, i), p)
            })
            .collect();
        let id_perm: Vec<usize> = (0..d.num_roots()).collect();
        let mut elements = vec![WeylElement {
            matrix: identity(n),
            matrix_y: identity(n),
            word: vec![],
            perm: id_perm.clone(),
        }];
        let mut by_perm = HashMap::new();
        by_perm.insert(id_perm, 0usize);
        let mut head = 0;
        while head < elements.len() {
            for (i, (gx, gy, gp)) in gens.iter().enumerate() {
                let w = &elements[head];
                let perm: Vec<usize> = w.perm.iter().map(|&k| gp[k]).collect();
                if by_perm.contains_key(&perm) {
                    continue;
                }
                if elements.len() >= bound {
                    return Err(Error::BoundExceeded(format!(
                        "Weyl group of {} exceeds {bound} elements",
                        d.type_label
                    )));
                }
                let mut word = vec![i];
                word.extend_from_slice(&w.word);
                let e = WeylElement {
                    matrix: imat_mul(gx, &w.matrix),
                    matrix_y: imat_mul(gy, &w.matrix_y),
                    word,
                    perm: perm.clone(),
                };
                by_perm.insert(perm, elements.len());
                elements.push(e);
            }
            head += 1;
        }
        let simple = (0..n)
            .map(|i| by_perm[&gens[i].2])
            .collect::<Vec<_>>();
        let longest = elements
            .iter()
            .position(|w| (0..d.npos).all(|k| w.perm[k] >= d.npos))
            .expect("longest element exists");
        Ok(WeylGroup {
            elements,
            simple,
            longest,
            by_perm,
            rank: n,
        })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn w0(&self) -> &WeylElement {
        &self.elements[self.longest]
    }

    pub fn get(&self, i: usize) -> &WeylElement {
        &self.elements[i]
    }

    pub fn index_of_perm(&self, perm: &[usize]) -> Option<usize> {
        self.by_perm.get(perm).copied()
    }

    /// Index of the product `elements[a] * elements[b]`.
    pub fn mul(&self, a: usize, b: usize) -> usize {
        let pa = &self.elements[a].perm;
        let perm: Vec<usize> = self.elements[b].perm.iter().map(|&k| pa[k]).collect();
        self.by_perm[&perm]
    }

    pub fn inverse(&self, a: usize) -> usize {
        let p = &self.elements[a].perm;
        let mut inv = vec![0; p.len()];
        for (k, &v) in p.iter().enumerate() {
            inv[v] = k;
        }
        self.by_perm[&inv]
    }

    /// Element index from a word of simple reflections (leftmost applied last).
    pub fn from_word(&self, word: &[usize]) -> usize {
        let mut cur = 0;
        for &i in word.iter().rev() {
            cur = self.mul(self.simple[i], cur);
        }
        cur
    }

    /// Inversion count `#{α > 0 : w(α) < 0}`.
    pub fn inversions(&self, a: usize, npos: usize) -> Vec<usize> {
        let p = &self.elements[a].perm;
        (0..npos).filter(|&k| p[k] >= npos).collect()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Longest element of the standard parabolic subgroup `W_P`.
    pub fn longest_in_parabolic(&self, d: &BasedRootDatum, p: &[usize]) -> usize {
        let sub = d.roots_in_span(p);
        let pos: Vec<usize> = sub.iter().copied().filter(|&k| k < d.npos).collect();
        self.elements
            .iter()
            .position(|w| {
                w.word.iter().all(|i| p.contains(i))
                    && pos.iter().all(|&k| w.perm[k] >= d.npos)
            })
            .expect("parabolic longest element exists")
    }
}

/// `m_W(w) = Σ_{α>0, w(α)<0} m_R(α^∨)` for per-root labels `a`.
pub fn m_w(d: &BasedRootDatum, w: &WeylElement, a: &[i64]) -> i64 {
    (0..d.npos).filter(|&k| w.perm[k] >= d.npos).map(|k| a[k]).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootdata::datum::{build_from_expr, LatticeChoice};

    fn group(s: &str) -> (BasedRootDatum, WeylGroup) {
        let d = build_from_expr(s, &LatticeChoice::Root).unwrap();
        let w = WeylGroup::new(&d).unwrap();
        (d, w)
    }

    #[test]
    fn orders_and_longest() {
        for (s, order, l0) in [("A1", 2, 1), ("A2", 6, 3), ("B2", 8, 4), ("G2", 12, 6), ("B3", 48, 9), ("D4", 192, 12)] {
            let (d, w) = group(s);
            assert_eq!(w.len(), order, "{s}");
            assert_eq!(w.w0().length(), l0, "{s}");
            assert_eq!(w.inversions(w.longest, d.npos).len(), l0);
        }
    }

    #[test]
    fn word_length_is_inversion_count() {
        let (d, w) = group("B3");
        for (i, e) in w.elements.iter().enumerate() {
            assert_eq!(e.length(), w.inversions(i, d.npos).len());
            assert_eq!(w.from_word(&e.word), i);
        }
    }

    #[test]
    fn w0_is_involution_and_negates_base() {
        for s in ["A3", "B2", "D4", "G2"] {
            let (d, w) = group(s);
            let l = w.longest;
            assert_eq!(w.mul(l, l), 0);
            for i in 0..d.rank {
                let img = w.w0().perm[i];
                assert!(d.neg(img) < d.rank);
            }
        }
    }

    #[test]
    fn contragredient_pairing() {
        let (d, w) = group("G2");
        for e in &w.elements {
            for k in 0..d.num_roots() {
                let wx = e.act_x(&d.roots[k]);
                let wy = e.act_y(&d.coroots[k]);
                assert_eq!(super::super::lattice::dot(&wy, &wx), 2);
            }
        }
    }

    #[test]
    fn bound_is_enforced() {
        let d = build_from_expr("E7", &LatticeChoice::Root).unwrap();
        assert!(matches!(WeylGroup::new(&d), Err(Error::BoundExceeded(_))));
    }
}
