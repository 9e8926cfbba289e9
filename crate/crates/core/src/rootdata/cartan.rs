//! Irreducible Cartan types, their Cartan matrices in Bourbaki numbering, and
//! concrete realizations of simple roots and coroots.

use super::lattice::{q, qinverse, transpose, IMat, QMat, Q};
use crate::error::{Error, Result};
use num_traits::Zero;
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CartanType {
    pub family: Family,
    pub rank: usize,
}

impl fmt::Display for CartanType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}{}", self.family, self.rank)
    }
}

impl CartanType {
    pub fn new(family: Family, rank: usize) -> Result<Self> {
        let ok = match family {
            Family::A => rank >= 1,
            Family::B => rank >= 2,
            Family::C => rank >= 2,
            Family::D => rank >= 3,
            Family::E => (6..=8).contains(&rank),
            Family::F => rank == 4,
            Family::G => rank == 2,
        };
        if ok {
            Ok(CartanType { family, rank })
        } else {
            Err(Error::InvalidDatum(format!("no Cartan type {family:?}{rank}")))
        }
    }

    /// Parses a single irreducible type such as `B3`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let mut chars = s.chars();
        let fam = match chars.next().map(|c| c.to_ascii_uppercase()) {
            Some('A') => Family::A,
            Some('B') => Family::B,
            Some('C') => Family::C,
            Some('D') => Family::D,
            Some('E') => Family::E,
            Some('F') => Family::F,
            Some('G') => Family::G,
            _ => return Err(Error::InvalidDatum(format!("unknown type `{s}`"))),
        };
        let rank: usize = chars
            .as_str()
            .parse()
            .map_err(|_| Error::InvalidDatum(format!("bad rank in `{s}`")))?;
        CartanType::new(fam, rank)
    }

    /// Types realized in the standard coordinates `e_1..e_n`.
    pub fn is_classical_eps(&self) -> bool {
        matches!(self.family, Family::B | Family::C | Family::D)
    }

    /// Cartan matrix `C[i][j] = <α_i^∨, α_j>`.
    pub fn cartan_matrix(&self) -> IMat {
        let n = self.rank;
        let mut c = vec![vec![0i64; n]; n];
        for (i, row) in c.iter_mut().enumerate() {
            row[i] = 2;
        }
        let mut link = |i: usize, j: usize| {
            c[i][j] = -1;
            c[j][i] = -1;
        };
        match self.family {
            Family::A => (0..n - 1).for_each(|i| link(i, i + 1)),
            Family::B | Family::C => (0..n - 1).for_each(|i| link(i, i + 1)),
            Family::D => {
                (0..n - 2).for_each(|i| link(i, i + 1));
                link(n - 3, n - 1);
            }
            Family::E => {
                link(0, 2);
                link(1, 3);
                link(2, 3);
                (3..n - 1).for_each(|i| link(i, i + 1));
            }
            Family::F => (0..3).for_each(|i| link(i, i + 1)),
            Family::G => link(0, 1),
        }
        match self.family {
            // α_n short: <α_n^∨, α_{n-1}> = -2.
            Family::B => c[n - 1][n - 2] = -2,
            // α_n long: <α_{n-1}^∨, α_n> = -2.
            Family::C => c[n - 2][n - 1] = -2,
            // α_3 short.
            Family::F => c[2][1] = -2,
            // α_1 short.
            Family::G => c[0][1] = -3,
            _ => {}
        }
        c
    }

    /// Simple roots and simple coroots as rows in an ambient space whose
    /// pairing is the dot product.  Classical B/C/D use `e_1..e_n`; the other
    /// types use fundamental-weight coordinates for roots and simple-coroot
    /// coordinates for coroots.
    pub fn ambient_simple(&self) -> (QMat, QMat) {
        let n = self.rank;
        let e = |i: usize| -> Vec<Q> { (0..n).map(|k| if k == i { q(1) } else { q(0) }).collect() };
        let diff = |i: usize, j: usize| -> Vec<Q> {
            let mut v = e(i);
            v[j] -= q(1);
            v
        };
        match self.family {
            Family::B => {
                let mut roots: QMat = (0..n - 1).map(|i| diff(i, i + 1)).collect();
                roots.push(e(n - 1));
                let mut co: QMat = (0..n - 1).map(|i| diff(i, i + 1)).collect();
                co.push(e(n - 1).iter().map(|x| *x * 2).collect());
                (roots, co)
            }
            Family::C => {
                let mut roots: QMat = (0..n - 1).map(|i| diff(i, i + 1)).collect();
                roots.push(e(n - 1).iter().map(|x| *x * 2).collect());
                let mut co: QMat = (0..n - 1).map(|i| diff(i, i + 1)).collect();
                co.push(e(n - 1));
                (roots, co)
            }
            Family::D => {
                let mut roots: QMat = (0..n - 1).map(|i| diff(i, i + 1)).collect();
                let mut last = e(n - 2);
                last[n - 1] = q(1);
                roots.push(last);
                (roots.clone(), roots)
            }
            _ => {
                let c = self.cartan_matrix();
                // α_j = Σ_i C[i][j] ω_i, so row j of the root matrix is column j of C.
                let roots: QMat = transpose(&c)
                    .into_iter()
                    .map(|r| r.into_iter().map(q).collect())
                    .collect();
                let co: QMat = (0..n).map(e).collect();
                (roots, co)
            }
        }
    }

    /// Fundamental weights as ambient rows (dual to the simple coroots).
    pub fn ambient_fundamental_weights(&self) -> QMat {
        let (_, co) = self.ambient_simple();
        // Rows ω_i with co[j] · ω_i = δ_ij: Ω = (co^T)^{-1} transposed = co^{-1}^T.
        let inv = qinverse(&co).expect("simple coroots independent");
        transpose(&inv)
    }

    /// Basis of the standard lattice Z^n (only meaningful for B/C/D).
    pub fn ambient_standard(&self) -> QMat {
        let n = self.rank;
        (0..n)
            .map(|i| (0..n).map(|k| if k == i { q(1) } else { Q::zero() }).collect())
            .collect()
    }
}

/// Parses a product expression such as `A1xB2` or `A1 x A1`.
pub fn parse_type_expr(s: &str) -> Result<Vec<CartanType>> {
    let parts: Vec<&str> = s
        .split(|c| c == 'x' || c == '×' || c == '*')
        .map(|p| p.trim())
        .filter(|p| !p.is_empty())
        .collect();
    if parts.is_empty() {
        return Err(Error::InvalidDatum("empty type expression".into()));
    }
    parts.into_iter().map(CartanType::parse).collect()
}

/// Recognizes the Cartan type of an irreducible Cartan matrix, returning the
/// type and a node permutation `perm` with `c[perm[i]][perm[j]] = standard[i][j]`.
pub fn recognize(c: &IMat) -> Option<(CartanType, Vec<usize>)> {
    let n = c.len();
    let mut candidates = vec![];
    for fam in [
        Family::A,
        Family::B,
        Family::C,
        Family::D,
        Family::E,
        Family::F,
        Family::G,
    ] {
        if let Ok(t) = CartanType::new(fam, n) {
            candidates.push(t);
        }
    }
    for t in candidates {
        let std = t.cartan_matrix();
        let mut perm = vec![usize::MAX; n];
        let mut used = vec![false; n];
        if match_perm(&std, c, 0, &mut perm, &mut used) {
            return Some((t, perm));
        }
    }
    None
}

fn match_perm(std: &IMat, c: &IMat, i: usize, perm: &mut Vec<usize>, used: &mut Vec<bool>) -> bool {
    let n = std.len();
    if i == n {
        return true;
    }
    for cand in 0..n {
        if used[cand] {
            continue;
        }
        let ok = (0..i).all(|j| c[cand][perm[j]] == std[i][j] && c[perm[j]][cand] == std[j][i]);
        if ok {
            perm[i] = cand;
            used[cand] = true;
            if match_perm(std, c, i + 1, perm, used) {
                return true;
            }
            used[cand] = false;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootdata::lattice::qdot_q;

    #[test]
    fn ambient_pairing_matches_cartan() {
        for s in ["A3", "B3", "C3", "D4", "E6", "F4", "G2"] {
            let t = CartanType::parse(s).unwrap();
            let (r, co) = t.ambient_simple();
            let c = t.cartan_matrix();
            for i in 0..t.rank {
                for j in 0..t.rank {
                    assert_eq!(qdot_q(&co[i], &r[j]), q(c[i][j]), "{s} {i} {j}");
                }
            }
        }
    }

    #[test]
    fn recognition_is_stable() {
        for s in ["A2", "B3", "C3", "D4", "G2", "F4", "E6"] {
            let t = CartanType::parse(s).unwrap();
            let (got, _) = recognize(&t.cartan_matrix()).unwrap();
            if s == "B3" || s == "C3" {
                assert_eq!(got.family, t.family);
            }
            assert_eq!(got.rank, t.rank);
        }
    }
}
