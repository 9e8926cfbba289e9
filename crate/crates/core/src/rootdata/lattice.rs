//! Integer and rational linear algebra on small lattices: Smith and Hermite
//! normal forms, integer kernels, saturations and finite quotient groups.

use crate::error::{Error, Result};
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

/// Small exact rationals used for lattice coordinates and exponents.
pub type Q = Ratio<i64>;

/// Row-major integer matrix.
pub type IMat = Vec<Vec<i64>>;
/// Row-major rational matrix.
pub type QMat = Vec<Vec<Q>>;

pub fn q(n: i64) -> Q {
    Q::from_integer(n)
}

pub fn qr(n: i64, d: i64) -> Q {
    Q::new(n, d)
}

pub fn identity(n: usize) -> IMat {
    (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
        .collect()
}

pub fn transpose<T: Clone>(a: &[Vec<T>]) -> Vec<Vec<T>> {
    if a.is_empty() {
        return vec![];
    }
    let (m, n) = (a.len(), a[0].len());
    (0..n).map(|j| (0..m).map(|i| a[i][j].clone()).collect()).collect()
}

pub fn imat_mul(a: &IMat, b: &IMat) -> IMat {
    let inner = b.len();
    let n = if inner == 0 { 0 } else { b[0].len() };
    a.iter()
        .map(|row| {
            (0..n)
                .map(|j| (0..inner).map(|k| row[k] * b[k][j]).sum())
                .collect()
        })
        .collect()
}

pub fn imat_vec(a: &IMat, x: &[i64]) -> Vec<i64> {
    a.iter()
        .map(|row| row.iter().zip(x).map(|(p, q)| p * q).sum())
        .collect()
}

pub fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn qdot(a: &[Q], b: &[i64]) -> Q {
    a.iter().zip(b).fold(Q::zero(), |acc, (x, y)| acc + *x * *y)
}

pub fn qdot_q(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).fold(Q::zero(), |acc, (x, y)| acc + *x * *y)
}

pub fn to_q(v: &[i64]) -> Vec<Q> {
    v.iter().map(|&x| q(x)).collect()
}

pub fn to_qmat(a: &IMat) -> QMat {
    a.iter().map(|r| to_q(r)).collect()
}

/// Returns the integer vector if every entry is integral.
pub fn as_integral(v: &[Q]) -> Option<Vec<i64>> {
    v.iter()
        .map(|x| if x.is_integer() { Some(x.to_integer()) } else { None })
        .collect()
}

/// Fractional part in `[0, 1)`.
pub fn frac(x: Q) -> Q {
    x - x.floor()
}

pub fn frac_vec(v: &[Q]) -> Vec<Q> {
    v.iter().map(|x| frac(*x)).collect()
}

pub fn qmat_mul(a: &QMat, b: &QMat) -> QMat {
    let inner = b.len();
    let n = if inner == 0 { 0 } else { b[0].len() };
    a.iter()
        .map(|row| {
            (0..n)
                .map(|j| (0..inner).fold(Q::zero(), |acc, k| acc + row[k] * b[k][j]))
                .collect()
        })
        .collect()
}

pub fn qmat_vec(a: &QMat, x: &[Q]) -> Vec<Q> {
    a.iter().map(|row| qdot_q(row, x)).collect()
}

/// Reduced row echelon form; returns (rref, pivot columns).
pub fn rref(a: &QMat) -> (QMat, Vec<usize>) {
    let mut m = a.clone();
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c];
                for j in 0..cols {
                    let t = m[r][j] * f;
                    m[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (m, pivots)
}

pub fn qrank(a: &QMat) -> usize {
    rref(a).1.len()
}

pub fn irank(a: &IMat) -> usize {
    qrank(&to_qmat(a))
}

/// Inverse of a square rational matrix.
pub fn qinverse(a: &QMat) -> Result<QMat> {
    let n = a.len();
    let mut aug: QMat = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Q::one() } else { Q::zero() }));
            r
        })
        .collect();
    let (red, piv) = rref(&aug);
    if piv.len() < n || piv.iter().take(n).enumerate().any(|(i, &p)| p != i) {
        return Err(Error::Lattice("singular matrix".into()));
    }
    aug = red;
    Ok(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Solves `a x = b` for square nonsingular `a`.
pub fn qsolve(a: &QMat, b: &[Q]) -> Result<Vec<Q>> {
    Ok(qmat_vec(&qinverse(a)?, b))
}

pub fn qdet(a: &QMat) -> Q {
    let n = a.len();
    let mut m = a.clone();
    let mut det = Q::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else {
            return Q::zero();
        };
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        det *= m[c][c];
        for i in c + 1..n {
            let f = m[i][c] / m[c][c];
            for j in c..n {
                let t = m[c][j] * f;
                m[i][j] -= t;
            }
        }
    }
    det
}

pub fn idet(a: &IMat) -> i64 {
    qdet(&to_qmat(a)).to_integer()
}

/// Smith normal form `a = u * diag(d) * v` with `u`, `v` unimodular.
#[derive(Clone, Debug)]
pub struct Snf {
    pub u: IMat,
    pub u_inv: IMat,
    pub v: IMat,
    pub v_inv: IMat,
    /// Diagonal entries (length `min(rows, cols)`), nonnegative, each dividing the next.
    pub diag: Vec<i64>,
    pub rank: usize,
}

fn swap_cols(m: &mut [Vec<i128>], a: usize, b: usize) {
    for row in m.iter_mut() {
        row.swap(a, b);
    }
}

pub fn snf(a: &IMat) -> Snf {
    let m = a.len();
    let n = if m == 0 { 0 } else { a[0].len() };
    let ident = |k: usize| -> Vec<Vec<i128>> {
        (0..k)
            .map(|i| (0..k).map(|j| i128::from(i == j)).collect())
            .collect()
    };
    let mut s: Vec<Vec<i128>> = a
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let (mut l, mut linv, mut r, mut rinv) = (ident(m), ident(m), ident(n), ident(n));
    let mut rank = 0;
    for t in 0..m.min(n) {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..m {
                for j in t..n {
                    if s[i][j] != 0
                        && best.map_or(true, |(bi, bj)| s[i][j].abs() < s[bi][bj].abs())
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                break;
            };
            s.swap(t, pi);
            l.swap(t, pi);
            swap_cols(&mut linv, t, pi);
            swap_cols(&mut s, t, pj);
            swap_cols(&mut r, t, pj);
            rinv.swap(t, pj);
            let mut clean = true;
            for i in t + 1..m {
                let qt = Integer::div_floor(&s[i][t], &s[t][t]);
                if qt != 0 {
                    for j in 0..n {
                        let x = s[t][j];
                        s[i][j] -= qt * x;
                    }
                    for j in 0..m {
                        let x = l[t][j];
                        l[i][j] -= qt * x;
                    }
                    for row in linv.iter_mut() {
                        row[t] += qt * row[i];
                    }
                }
                if s[i][t] != 0 {
                    clean = false;
                }
            }
            for j in t + 1..n {
                let qt = Integer::div_floor(&s[t][j], &s[t][t]);
                if qt != 0 {
                    for row in s.iter_mut() {
                        row[j] -= qt * row[t];
                    }
                    for row in r.iter_mut() {
                        row[j] -= qt * row[t];
                    }
                    for k in 0..n {
                        let x = rinv[j][k];
                        rinv[t][k] += qt * x;
                    }
                }
                if s[t][j] != 0 {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            let piv = s[t][t];
            let bad = (t + 1..m).find(|&i| (t + 1..n).any(|j| s[i][j] % piv != 0));
            if let Some(i) = bad {
                for j in 0..n {
                    let x = s[i][j];
                    s[t][j] += x;
                }
                for j in 0..m {
                    let x = l[i][j];
                    l[t][j] += x;
                }
                for row in linv.iter_mut() {
                    row[i] -= row[t];
                }
                continue;
            }
            break;
        }
        if s[t][t] == 0 {
            break;
        }
        if s[t][t] < 0 {
            for x in s[t].iter_mut() {
                *x = -*x;
            }
            for x in l[t].iter_mut() {
                *x = -*x;
            }
            for row in linv.iter_mut() {
                row[t] = -row[t];
            }
        }
        rank += 1;
    }
    let back = |x: Vec<Vec<i128>>| -> IMat {
        x.into_iter()
            .map(|r| r.into_iter().map(|v| v as i64).collect())
            .collect()
    };
    let diag = (0..m.min(n)).map(|i| s[i][i] as i64).collect();
    Snf {
        u: back(linv),
        u_inv: back(l),
        v: back(rinv),
        v_inv: back(r),
        diag,
        rank,
    }
}

/// Basis (as rows) of the integer kernel `{x : a x = 0}`; saturated by construction.
pub fn integer_kernel(a: &IMat, ncols: usize) -> IMat {
    if a.is_empty() {
        return identity(ncols);
    }
    let s = snf(a);
    // a = u d v, so a x = 0 iff (v x)_i = 0 for i < rank; x = v_inv e_j.
    (s.rank..ncols)
        .map(|j| s.v_inv.iter().map(|row| row[j]).collect())
        .collect()
}

/// Basis (rows) of the saturation `(span_Q rows) ∩ Z^n` of the given row vectors.
pub fn saturate(rows: &IMat, n: usize) -> IMat {
    if rows.is_empty() {
        return vec![];
    }
    let cols = transpose(rows);
    let s = snf(&cols);
    (0..s.rank)
        .map(|j| (0..n).map(|i| s.u[i][j]).collect())
        .collect()
}

/// Hermite normal form of the lattice spanned by the rows (zero rows removed).
/// Canonical: two generating sets of the same lattice give the same output.
pub fn hnf(rows: &IMat) -> IMat {
    if rows.is_empty() {
        return vec![];
    }
    let n = rows[0].len();
    let mut m: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let mut out_row = 0;
    for c in 0..n {
        if out_row == m.len() {
            break;
        }
        loop {
            let nz: Vec<usize> = (out_row..m.len()).filter(|&i| m[i][c] != 0).collect();
            if nz.is_empty() {
                break;
            }
            let p = *nz.iter().min_by_key(|&&i| m[i][c].abs()).unwrap();
            m.swap(out_row, p);
            if nz.len() == 1 {
                break;
            }
            for i in out_row + 1..m.len() {
                if m[i][c] != 0 {
                    let qt = Integer::div_floor(&m[i][c], &m[out_row][c]);
                    for j in 0..n {
                        let x = m[out_row][j];
                        m[i][j] -= qt * x;
                    }
                }
            }
        }
        if m[out_row][c] == 0 {
            continue;
        }
        if m[out_row][c] < 0 {
            for x in m[out_row].iter_mut() {
                *x = -*x;
            }
        }
        let piv = m[out_row][c];
        for i in 0..out_row {
            let qt = Integer::div_floor(&m[i][c], &piv);
            if qt != 0 {
                for j in 0..n {
                    let x = m[out_row][j];
                    m[i][j] -= qt * x;
                }
            }
        }
        out_row += 1;
    }
    m.truncate(out_row);
    m.into_iter()
        .map(|r| r.into_iter().map(|x| x as i64).collect())
        .collect()
}

/// A finite abelian group `⊕ Z/d_i` with explicit generators.
#[derive(Clone, Debug, Serialize)]
pub struct FiniteAbelianGroup {
    /// Invariant factors greater than one, each dividing the next.
    pub invariant_factors: Vec<i64>,
    /// One generator per invariant factor, as a rational vector whose meaning
    /// depends on the context (a coset representative or a torsion vector mod 1).
    #[serde(serialize_with = "ser_qmat")]
    pub generators: QMat,
    /// Relation matrix the group was computed from.
    pub relations: IMat,
}

fn ser_qmat<S: serde::Serializer>(m: &QMat, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(m.len()))?;
    for row in m {
        let r: Vec<String> = row.iter().map(|x| x.to_string()).collect();
        seq.serialize_element(&r)?;
    }
    seq.end()
}

impl FiniteAbelianGroup {
    pub fn trivial() -> Self {
        FiniteAbelianGroup {
            invariant_factors: vec![],
            generators: vec![],
            relations: vec![],
        }
    }

    pub fn order(&self) -> i64 {
        self.invariant_factors.iter().product()
    }

    /// All elements as integer combinations `Σ c_i g_i`, each reduced mod 1 when
    /// `mod_one` is set (torsion-point semantics).
    pub fn elements(&self, mod_one: bool) -> Vec<Vec<Q>> {
        let dim = self.generators.first().map_or(0, |g| g.len());
        let mut out = vec![vec![Q::zero(); dim]];
        for (g, &d) in self.generators.iter().zip(&self.invariant_factors) {
            let mut next = Vec::with_capacity(out.len() * d as usize);
            for e in &out {
                for c in 0..d {
                    let v: Vec<Q> = e.iter().zip(g).map(|(a, b)| *a + *b * c).collect();
                    next.push(if mod_one { frac_vec(&v) } else { v });
                }
            }
            out = next;
        }
        out
    }
}

/// Quotient `sup / sub` of two full-rank lattices given by row bases in common
/// rational coordinates.
pub fn lattice_quotient(sup: &QMat, sub: &QMat) -> Result<FiniteAbelianGroup> {
    let n = sup.len();
    if sub.len() != n || qrank(sup) != n || qrank(sub) != n {
        return Err(Error::Lattice("rank defect in lattice quotient".into()));
    }
    // sub = c * sup with c integral.
    let sup_inv = qinverse(sup)?;
    let cq = qmat_mul(sub, &sup_inv);
    let c: IMat = cq
        .iter()
        .map(|r| as_integral(r).ok_or_else(|| Error::Lattice("sublattice not contained".into())))
        .collect::<Result<_>>()?;
    let s = snf(&c);
    // c = u d v, so sub = u d (v sup); the rows w_j = (v sup)_j generate sup and
    // d_j w_j generate sub.
    let w = qmat_mul(&to_qmat(&s.v), sup);
    let mut inv = vec![];
    let mut gens = vec![];
    for (j, &d) in s.diag.iter().enumerate() {
        if d > 1 {
            inv.push(d);
            gens.push(w[j].clone());
        }
    }
    Ok(FiniteAbelianGroup {
        invariant_factors: inv,
        generators: gens,
        relations: c,
    })
}

/// The finite group `{θ ∈ (Q/Z)^k : b θ ∈ Z^m}` for a matrix `b` of full column rank.
pub fn torsion_solutions(b: &IMat, k: usize) -> Result<FiniteAbelianGroup> {
    if k == 0 {
        return Ok(FiniteAbelianGroup::trivial());
    }
    if irank(b) != k {
        return Err(Error::Lattice("torsion system is not of full rank".into()));
    }
    let s = snf(b);
    // b = u d v: b θ ∈ Z^m iff d (v θ) ∈ Z^m iff (v θ)_i ∈ (1/d_i) Z.
    let mut inv = vec![];
    let mut gens = vec![];
    for i in 0..k {
        let d = s.diag[i];
        if d > 1 {
            let col: Vec<Q> = (0..k).map(|r| qr(s.v_inv[r][i], d)).collect();
            inv.push(d);
            gens.push(frac_vec(&col));
        }
    }
    Ok(FiniteAbelianGroup {
        invariant_factors: inv,
        generators: gens,
        relations: b.clone(),
    })
}

/// Solves the congruence `m θ ≡ c (mod Z^k)` for square nonsingular `m`,
/// returning every solution `θ ∈ (Q/Z)^k`.
pub fn congruence_solutions(m: &IMat, c: &[Q]) -> Vec<Vec<Q>> {
    let k = m.len();
    let s = snf(m);
    // m = u d v; d (v θ) ≡ u^{-1} c.
    let uc = qmat_vec(&to_qmat(&s.u_inv), c);
    let mut partial: Vec<Vec<Q>> = vec![vec![]];
    for i in 0..k {
        let d = s.diag[i];
        let mut next = vec![];
        for p in &partial {
            for j in 0..d {
                let mut v = p.clone();
                v.push((uc[i] + j) / d);
                next.push(v);
            }
        }
        partial = next;
    }
    let vinv = to_qmat(&s.v_inv);
    partial
        .into_iter()
        .map(|w| frac_vec(&qmat_vec(&vinv, &w)))
        .collect()
}

pub fn gcd_vec(v: &[i64]) -> i64 {
    v.iter().fold(0i64, |g, &x| g.gcd(&x))
}

pub fn lcm_denoms(v: &[Q]) -> i64 {
    v.iter().fold(1i64, |l, x| l.lcm(x.denom()))
}

pub fn is_zero_vec(v: &[Q]) -> bool {
    v.iter().all(|x| x.is_zero())
}

pub fn sign_of(x: i64) -> i64 {
    x.signum()
}

pub fn abs_q(x: Q) -> Q {
    x.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_snf(a: &IMat) {
        let s = snf(a);
        let m = a.len();
        let n = a[0].len();
        let mut d = vec![vec![0; n]; m];
        for (i, &x) in s.diag.iter().enumerate() {
            d[i][i] = x;
        }
        assert_eq!(&imat_mul(&imat_mul(&s.u, &d), &s.v), a);
        assert_eq!(imat_mul(&s.u, &s.u_inv), identity(m));
        assert_eq!(imat_mul(&s.v, &s.v_inv), identity(n));
        for w in s.diag[..s.rank].windows(2) {
            assert_eq!(w[1] % w[0], 0);
        }
    }

    #[test]
    fn snf_examples() {
        check_snf(&vec![vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]);
        check_snf(&vec![vec![2, -1], vec![-1, 2]]);
        check_snf(&vec![vec![0, 0], vec![0, 3]]);
        check_snf(&vec![vec![1, 1, 0]]);
        let s = snf(&vec![vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]);
        assert_eq!(s.diag, vec![2, 6, 12]);
    }

    #[test]
    fn quotients() {
        // P(A2)/Q(A2) in fundamental-weight coordinates.
        let p = to_qmat(&identity(2));
        let qa2 = to_qmat(&vec![vec![2, -1], vec![-1, 2]]);
        assert_eq!(lattice_quotient(&p, &qa2).unwrap().invariant_factors, vec![3]);
        // Z^3 / D3.
        let z = to_qmat(&identity(3));
        let d = to_qmat(&vec![vec![1, -1, 0], vec![0, 1, -1], vec![0, 1, 1]]);
        assert_eq!(lattice_quotient(&z, &d).unwrap().invariant_factors, vec![2]);
    }

    #[test]
    fn kernel_and_saturation() {
        let k = integer_kernel(&vec![vec![1, -1, 0]], 3);
        assert_eq!(k.len(), 2);
        for r in &k {
            assert_eq!(r[0], r[1]);
        }
        let s = saturate(&vec![vec![2, 2, 0]], 3);
        assert_eq!(hnf(&s), vec![vec![1, 1, 0]]);
    }

    #[test]
    fn congruences() {
        let sols = congruence_solutions(&vec![vec![2]], &[qr(1, 2)]);
        let mut got: Vec<Q> = sols.into_iter().map(|v| v[0]).collect();
        got.sort();
        assert_eq!(got, vec![qr(1, 4), qr(3, 4)]);
    }
}
