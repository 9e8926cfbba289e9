//! Root data, Weyl groups, parameters and lattice utilities.

pub mod cartan;
pub mod datum;
pub mod lattice;
pub mod params;
pub mod weyl;

pub use cartan::{CartanType, Family};
pub use datum::{build_from_expr, build_root_datum, BasedRootDatum, LatticeChoice};
pub use lattice::{lattice_quotient, FiniteAbelianGroup};
pub use params::ParameterFunction;
pub use weyl::{m_w, WeylElement, WeylGroup};

use crate::error::Result;
use lattice::{dot, integer_kernel, saturate, to_q, torsion_solutions, transpose, IMat};

/// The standard parabolic datum `ℛ_P` and the lattices of `T_P`, `T^P`.
#[derive(Clone, Debug)]
pub struct ParabolicRestriction {
    pub subset: Vec<usize>,
    pub datum: BasedRootDatum,
    /// Basis (rows, in Y) of the cocharacters of `T_P`: the saturation of the
    /// coroots of `P`.
    pub y_p: IMat,
    /// Basis (rows, in Y) of the cocharacters of `T^P`: `Y ∩ R_P^⊥`.
    pub u: IMat,
    /// `K_P = T_P ∩ T^P`, generators as torsion vectors in `Y ⊗ Q / Y`.
    pub k_p: FiniteAbelianGroup,
    /// Indices of the ambient roots lying in `R_P`.
    pub roots_of_p: Vec<usize>,
}

/// Restricts to the standard parabolic subsystem spanned by `p ⊆ F₀`.
pub fn parabolic_restriction(d: &BasedRootDatum, p: &[usize]) -> Result<ParabolicRestriction> {
    let mut p: Vec<usize> = p.to_vec();
    p.sort_unstable();
    p.dedup();
    let n = d.rank;
    let coroots: IMat = p.iter().map(|&i| d.coroots[i].clone()).collect();
    let y_p = saturate(&coroots, n);
    let roots_p: IMat = p.iter().map(|&i| d.roots[i].clone()).collect();
    let u = integer_kernel(&roots_p, n);
    // Roots of P restricted to T_P, coroots of P in the basis y_p.
    let k = y_p.len();
    let sr: IMat = p
        .iter()
        .map(|&i| y_p.iter().map(|y| dot(y, &d.roots[i])).collect())
        .collect();
    let yq: Vec<Vec<_>> = transpose(&y_p).iter().map(|r| to_q(r)).collect();
    let mut sc: IMat = vec![];
    for &i in &p {
        let c = if k == 0 {
            vec![]
        } else {
            solve_columns(&yq, &to_q(&d.coroots[i]))
        };
        sc.push(c);
    }
    let mut sub = BasedRootDatum::from_simple(&sr, &sc, None)?;
    sub.lattice_label = "restricted".into();
    let roots_of_p = d.roots_in_span(&p);
    // K_P: θ ∈ (Q/Z)^{dim U} with <x, Σ θ_j u_j> ∈ Z for x ∈ X ∩ (R_P^∨)^⊥.
    let xperp = integer_kernel(&coroots, n);
    let b: IMat = xperp
        .iter()
        .map(|x| u.iter().map(|uj| dot(uj, x)).collect())
        .collect();
    let theta = torsion_solutions(&b, u.len())?;
    let gens = theta
        .generators
        .iter()
        .map(|t| {
            let v: Vec<lattice::Q> = (0..n)
                .map(|c| t.iter().zip(&u).map(|(tj, uj)| *tj * uj[c]).sum())
                .collect();
            lattice::frac_vec(&v)
        })
        .collect();
    let k_p = FiniteAbelianGroup {
        invariant_factors: theta.invariant_factors,
        generators: gens,
        relations: b,
    };
    Ok(ParabolicRestriction {
        subset: p,
        datum: sub,
        y_p,
        u,
        k_p,
        roots_of_p,
    })
}

/// Integer coordinates of `v` in the column basis `a` (full column rank).
fn solve_columns(a: &[Vec<lattice::Q>], v: &[lattice::Q]) -> Vec<i64> {
    let rows = a.len();
    let cols = a[0].len();
    let aug: lattice::QMat = (0..rows)
        .map(|i| {
            let mut r = a[i].clone();
            r.push(v[i]);
            r
        })
        .collect();
    let (red, piv) = lattice::rref(&aug);
    debug_assert!(!piv.contains(&cols));
    (0..cols)
        .map(|j| {
            let x = red[j][cols];
            assert!(x.is_integer(), "coroot not in the saturated lattice");
            x.to_integer()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_quotient_examples() {
        use lattice::{q, qr};
        // P(A1)/Q(A1) in root coordinates: Zα/2 over Zα.
        let g = lattice_quotient(&vec![vec![qr(1, 2)]], &vec![vec![q(1)]]).unwrap();
        assert_eq!(g.invariant_factors, vec![2]);
        // Z^n over the D_n root lattice.
        let z3: lattice::QMat = (0..3)
            .map(|i| (0..3).map(|j| q((i == j) as i64)).collect())
            .collect();
        let d3 = vec![
            vec![q(1), q(-1), q(0)],
            vec![q(0), q(1), q(-1)],
            vec![q(0), q(1), q(1)],
        ];
        assert_eq!(lattice_quotient(&z3, &d3).unwrap().invariant_factors, vec![2]);
        let d = build_from_expr("A2", &LatticeChoice::Weight).unwrap();
        assert_eq!(d.omega_x().unwrap().order(), 3);
    }

    #[test]
    fn parabolic_extremes() {
        let d = build_from_expr("B2", &LatticeChoice::Root).unwrap();
        let e = parabolic_restriction(&d, &[]).unwrap();
        assert_eq!(e.datum.rank, 0);
        assert_eq!(e.u.len(), 2);
        let f = parabolic_restriction(&d, &[0, 1]).unwrap();
        assert_eq!(f.datum.num_roots(), 8);
        assert!(f.u.is_empty());
        assert_eq!(f.k_p.order(), 1);
    }

    #[test]
    fn b2_long_parabolic() {
        let d = build_from_expr("B2", &LatticeChoice::Root).unwrap();
        // α_1 = e1 - e2 is long.
        let r = parabolic_restriction(&d, &[0]).unwrap();
        assert_eq!(r.datum.num_roots(), 2);
        assert_eq!(r.k_p.order(), 2);
    }
}
