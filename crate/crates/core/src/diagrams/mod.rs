//! Labelled affine Dynkin diagrams (arithmetic and spectral), standardization
//! of semi-standard data, the symmetry group `Out_T(μ)` and the involutions
//! `η^𝐜` on parameters.

use crate::error::{Error, Result};
use crate::exactscalars::NormalizingElement;
use crate::mu::MuFunction;
use crate::rootdata::lattice::{
    congruence_solutions, dot, identity, lattice_quotient, q, qinverse, qmat_vec, to_qmat,
    torsion_solutions, IMat, QMat, Q,
};
use crate::rootdata::params::{affine_node_name, dual_highest_root};
use crate::rootdata::{BasedRootDatum, ParameterFunction};
use crate::torus::{AffineTorusMap, TorusPoint};
use num_traits::Zero;
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DiagramKind {
    Arithmetic,
    Spectral,
}

/// One affine simple root `x ↦ <x, gradient> + constant`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiagramNode {
    pub name: String,
    pub component: usize,
    pub gradient: Vec<i64>,
    /// Coroot of the gradient, in the coordinates of the space the affine
    /// functions live on.
    pub coroot: Vec<i64>,
    pub constant: i64,
    pub label: i64,
    /// The affine node not in `F₀`.
    pub special: bool,
}

/// A bond with Cartan entries `a_ij = <coroot_i, gradient_j>` and `a_ji`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiagramEdge {
    pub from: usize,
    pub to: usize,
    pub a_ij: i64,
    pub a_ji: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiagramGroup {
    pub order: usize,
    /// Generators as permutations of the node list.
    pub generators: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LabelledAffineDiagram {
    pub kind: DiagramKind,
    pub type_label: String,
    pub nodes: Vec<DiagramNode>,
    pub edges: Vec<DiagramEdge>,
    /// Orbits of nodes under conjugation in the extended affine Weyl group.
    pub classes: Vec<Vec<String>>,
    pub group: DiagramGroup,
}

/// An affine map `x ↦ M x + c` on the space the affine roots are functions on.
#[derive(Clone, Debug)]
struct AffineMotion {
    m: QMat,
    c: Vec<Q>,
}

impl AffineMotion {
    fn translation(y: &[i64]) -> Self {
        let n = y.len();
        AffineMotion {
            m: to_qmat(&identity(n)),
            c: y.iter().map(|&v| q(v)).collect(),
        }
    }

    /// `s_a ∘ self` for the reflection in the node `a`.
    fn reflect_after(&self, a: &DiagramNode) -> Self {
        let n = self.c.len();
        let s: QMat = (0..n)
            .map(|i| (0..n).map(|j| q((i == j) as i64 - a.coroot[i] * a.gradient[j])).collect())
            .collect();
        let m = crate::rootdata::lattice::qmat_mul(&s, &self.m);
        let mut c = qmat_vec(&s, &self.c);
        for i in 0..n {
            c[i] -= q(a.constant * a.coroot[i]);
        }
        AffineMotion { m, c }
    }

    /// `a ∘ self` as `(gradient, constant)`.
    fn pull(&self, a: &DiagramNode) -> Option<(Vec<i64>, i64)> {
        let n = self.c.len();
        let mut g = vec![];
        for j in 0..n {
            let v: Q = (0..n).map(|i| self.m[i][j] * a.gradient[i]).sum();
            if !v.is_integer() {
                return None;
            }
            g.push(v.to_integer());
        }
        let k: Q = (0..n).map(|i| self.c[i] * a.gradient[i]).sum::<Q>() + a.constant;
        k.is_integer().then(|| (g, k.to_integer()))
    }
}

fn eval_node(a: &DiagramNode, x: &[Q]) -> Q {
    x.iter().zip(&a.gradient).map(|(xi, gi)| *xi * *gi).sum::<Q>() + a.constant
}

/// Positive roots of `R_m = {n_m(α) α}` and their simple subset, per root index of `R₀`.
fn scaled_simple(d: &BasedRootDatum, scale: &[i64], pos: &[usize]) -> Vec<usize> {
    let vecs: BTreeMap<usize, Vec<i64>> = pos
        .iter()
        .map(|&r| (r, d.roots[r].iter().map(|x| x * scale[r]).collect()))
        .collect();
    let all: BTreeSet<Vec<i64>> = vecs.values().cloned().collect();
    pos.iter()
        .copied()
        .filter(|r| {
            let v = &vecs[r];
            !all.iter().any(|a| {
                let rest: Vec<i64> = v.iter().zip(a).map(|(x, y)| x - y).collect();
                all.contains(&rest)
            })
        })
        .collect()
}

struct AffineInput {
    /// Root index in `R₀`, gradient, coroot, constant, label, special.
    nodes: Vec<(usize, Vec<i64>, Vec<i64>, i64, i64, bool)>,
    translations: FiniteAbelianGroupInt,
}

/// Coset representatives of a finite quotient of translation lattices.
struct FiniteAbelianGroupInt {
    generators: Vec<Vec<i64>>,
}

fn integral_generators(g: &crate::rootdata::FiniteAbelianGroup) -> Result<Vec<Vec<i64>>> {
    g.generators
        .iter()
        .map(|v| {
            crate::rootdata::lattice::as_integral(v)
                .ok_or_else(|| Error::Internal("non-integral coset representative".into()))
        })
        .collect()
}

fn build_diagram(
    d: &BasedRootDatum,
    kind: DiagramKind,
    input: AffineInput,
) -> Result<LabelledAffineDiagram> {
    let n = d.rank;
    let nodes: Vec<DiagramNode> = input
        .nodes
        .iter()
        .map(|(r, g, c, k, label, special)| DiagramNode {
            name: node_name(d, *r, *special),
            component: d.component_of_root(*r),
            gradient: g.clone(),
            coroot: c.clone(),
            constant: *k,
            label: *label,
            special: *special,
        })
        .collect();
    let mut edges = vec![];
    for i in 0..nodes.len() {
        for j in i + 1..nodes.len() {
            let aij = dot(&nodes[i].coroot, &nodes[j].gradient);
            let aji = dot(&nodes[j].coroot, &nodes[i].gradient);
            if aij != 0 || aji != 0 {
                edges.push(DiagramEdge {
                    from: i,
                    to: j,
                    a_ij: aij,
                    a_ji: aji,
                });
            }
        }
    }
    // An interior point of the fundamental alcove: every finite simple node
    // takes the value 1/h on it, h the Coxeter number of its component.
    let finite: Vec<&DiagramNode> = nodes.iter().filter(|a| !a.special).collect();
    let p: Vec<Q> = if n == 0 {
        vec![]
    } else {
        let b: QMat = finite.iter().map(|a| a.gradient.iter().map(|&x| q(x)).collect()).collect();
        let binv = qinverse(&b)?;
        // Height of the highest root in each component.
        let mut h: BTreeMap<usize, i64> = BTreeMap::new();
        for a in nodes.iter().filter(|a| a.special) {
            let theta: Vec<Q> = a.gradient.iter().map(|&x| q(-x)).collect();
            // coordinates c with Σ c_i b_i = θ, i.e. c = θ B^{-1}.
            let c: Vec<Q> = (0..n).map(|j| (0..n).map(|i| theta[i] * binv[i][j]).sum()).collect();
            let ht: Q = c.iter().copied().sum();
            h.insert(a.component, ht.to_integer() + 1);
        }
        let r: Vec<Q> = finite.iter().map(|a| Q::new(1, h[&a.component])).collect();
        qmat_vec(&binv, &r)
    };
    let mut perms: Vec<Vec<usize>> = vec![];
    for y in &input.translations.generators {
        let mut g = AffineMotion::translation(y);
        let mut z: Vec<Q> = p.iter().zip(y).map(|(a, b)| *a + *b).collect();
        let mut guard = 0;
        while let Some(a) = nodes.iter().find(|a| eval_node(a, &z) < Q::zero()) {
            let k = eval_node(a, &z);
            for i in 0..n {
                z[i] -= k * a.coroot[i];
            }
            g = g.reflect_after(a);
            guard += 1;
            if guard > 10_000 {
                return Err(Error::Internal("alcove folding did not terminate".into()));
            }
        }
        let mut perm = vec![];
        for a in &nodes {
            let img = g
                .pull(a)
                .and_then(|(gr, k)| nodes.iter().position(|b| b.gradient == gr && b.constant == k))
                .ok_or_else(|| Error::Internal("length-zero element does not permute nodes".into()))?;
            perm.push(img);
        }
        for (i, &j) in perm.iter().enumerate() {
            if nodes[i].label != nodes[j].label {
                return Err(Error::Internal(format!(
                    "labels of {} and {} differ on an orbit of the diagram group",
                    nodes[i].name, nodes[j].name
                )));
            }
        }
        if perm.iter().enumerate().any(|(i, &j)| i != j) {
            perms.push(perm);
        }
    }
    let order = closure(&perms, nodes.len()).len();
    let mut uf: Vec<usize> = (0..nodes.len()).collect();
    fn find(uf: &mut [usize], i: usize) -> usize {
        if uf[i] != i {
            let r = find(uf, uf[i]);
            uf[i] = r;
        }
        uf[i]
    }
    let join = |uf: &mut Vec<usize>, a: usize, b: usize| {
        let (x, y) = (find(uf, a), find(uf, b));
        uf[x.max(y)] = x.min(y);
    };
    for e in &edges {
        if e.a_ij * e.a_ji == 1 {
            join(&mut uf, e.from, e.to);
        }
    }
    for p in &perms {
        for (i, &j) in p.iter().enumerate() {
            join(&mut uf, i, j);
        }
    }
    let mut cls: BTreeMap<usize, Vec<String>> = BTreeMap::new();
    for i in 0..nodes.len() {
        let r = find(&mut uf, i);
        cls.entry(r).or_default().push(nodes[i].name.clone());
    }
    Ok(LabelledAffineDiagram {
        kind,
        type_label: d.type_label.clone(),
        nodes,
        edges,
        classes: cls.into_values().collect(),
        group: DiagramGroup {
            order,
            generators: perms,
        },
    })
}

fn node_name(d: &BasedRootDatum, r: usize, special: bool) -> String {
    if special {
        affine_node_name(d, d.component_of_root(r))
    } else if r < d.rank {
        format!("s{}", r + 1)
    } else {
        format!("r{r}")
    }
}

fn closure(gens: &[Vec<usize>], n: usize) -> BTreeSet<Vec<usize>> {
    let id: Vec<usize> = (0..n).collect();
    let mut seen = BTreeSet::from([id.clone()]);
    let mut queue = VecDeque::from([id]);
    while let Some(p) = queue.pop_front() {
        for g in gens {
            let c: Vec<usize> = p.iter().map(|&i| g[i]).collect();
            if seen.insert(c.clone()) {
                queue.push_back(c);
            }
        }
    }
    seen
}

/// `Σ_s`: the affine diagram of `R_m^{(1)}` with the labels `m^∨_R` and the
/// action of `Ω^∨_Y = Y / Q(R_m^∨)`.
pub fn spectral_diagram(d: &BasedRootDatum, m: &ParameterFunction) -> Result<LabelledAffineDiagram> {
    let nm: Vec<i64> = (0..d.num_roots()).map(|k| m.n_m(k)).collect();
    let pos: Vec<usize> = (0..d.npos).collect();
    let mut simple = scaled_simple(d, &nm, &pos);
    simple.sort_unstable();
    let label = |r: usize, k: i64| -> i64 {
        if nm[r] == 1 {
            m.a[r]
        } else if k % 2 == 0 {
            m.m_plus2(r)
        } else {
            m.m_minus2(r)
        }
    };
    let grad = |r: usize| -> Vec<i64> { d.roots[r].iter().map(|x| x * nm[r]).collect() };
    let cograd = |r: usize| -> Vec<i64> { d.coroots[r].iter().map(|x| x / nm[r]).collect() };
    let mut nodes = vec![];
    for &r in &simple {
        nodes.push((r, grad(r), cograd(r), 0, label(r, 0), false));
    }
    // Highest root of R_m in each component, by height in the simple basis.
    let sb: QMat = simple.iter().map(|&r| grad(r).iter().map(|&x| q(x)).collect()).collect();
    let sbinv = if d.rank > 0 { qinverse(&sb)? } else { vec![] };
    for comp in &d.components {
        let height = |r: usize| -> Q {
            let g = grad(r);
            (0..d.rank).map(|j| (0..d.rank).map(|i| q(g[i]) * sbinv[i][j]).sum::<Q>()).sum()
        };
        let top = *comp
            .roots
            .iter()
            .filter(|&&r| r < d.npos)
            .max_by_key(|&&r| height(r))
            .expect("nonempty component");
        let neg = d.neg(top);
        nodes.push((neg, grad(neg), cograd(neg), 1, label(top, 1), true));
    }
    let y = to_qmat(&identity(d.rank));
    let qr: QMat = simple.iter().map(|&r| cograd(r).iter().map(|&x| q(x)).collect()).collect();
    let translations = if d.rank == 0 {
        vec![]
    } else {
        integral_generators(&lattice_quotient(&y, &qr)?)?
    };
    build_diagram(
        d,
        DiagramKind::Spectral,
        AffineInput {
            nodes,
            translations: FiniteAbelianGroupInt {
                generators: translations,
            },
        },
    )
}

/// `Σ_a`: the affine diagram of `(R₀^∨)^{(1)}` with labels `m_R`, the marked
/// affine nodes and the action of `Ω_X = X / Q(R₀)`.
pub fn arithmetic_diagram(d: &BasedRootDatum, m: &ParameterFunction) -> Result<LabelledAffineDiagram> {
    let mut nodes = vec![];
    for i in 0..d.rank {
        nodes.push((i, d.coroots[i].clone(), d.roots[i].clone(), 0, m.a[i], false));
    }
    for c in 0..d.components.len() {
        let th = dual_highest_root(d, c);
        let neg = d.neg(th);
        let label = m.nodes[&affine_node_name(d, c)];
        nodes.push((neg, d.coroots[neg].clone(), d.roots[neg].clone(), 1, label, true));
    }
    let x = to_qmat(&identity(d.rank));
    let qr = to_qmat(&d.roots[..d.rank].to_vec());
    let translations = if d.rank == 0 {
        vec![]
    } else {
        integral_generators(&lattice_quotient(&x, &qr)?)?
    };
    build_diagram(
        d,
        DiagramKind::Arithmetic,
        AffineInput {
            nodes,
            translations: FiniteAbelianGroupInt {
                generators: translations,
            },
        },
    )
}

fn cycles(p: &[usize], names: &[String]) -> String {
    let mut seen = vec![false; p.len()];
    let mut out = vec![];
    for i in 0..p.len() {
        if seen[i] || p[i] == i {
            continue;
        }
        let mut c = vec![];
        let mut j = i;
        while !seen[j] {
            seen[j] = true;
            c.push(names[j].clone());
            j = p[j];
        }
        out.push(format!("({})", c.join(" ")));
    }
    out.join("")
}

impl LabelledAffineDiagram {
    pub fn names(&self) -> Vec<String> {
        self.nodes.iter().map(|a| a.name.clone()).collect()
    }

    pub fn label(&self, name: &str) -> Option<i64> {
        self.nodes.iter().find(|a| a.name == name).map(|a| a.label)
    }

    /// Plain-text rendering: one line per node, then bonds, classes and the
    /// diagram group.
    pub fn render(&self) -> String {
        let names = self.names();
        let kind = match self.kind {
            DiagramKind::Arithmetic => "arithmetic",
            DiagramKind::Spectral => "spectral",
        };
        let mut s = format!("{kind} diagram of {}\n", self.type_label);
        for a in &self.nodes {
            let g: Vec<String> = a.gradient.iter().map(|x| x.to_string()).collect();
            let _ = writeln!(
                s,
                "  {:<6} label {:>3}  root ({}){}{}",
                a.name,
                a.label,
                g.join(","),
                if a.constant != 0 {
                    format!(" + {}", a.constant)
                } else {
                    String::new()
                },
                if a.special { "  *" } else { "" }
            );
        }
        let bonds: Vec<String> = self
            .edges
            .iter()
            .map(|e| format!("{} {} {}", names[e.from], bond(e.a_ij, e.a_ji), names[e.to]))
            .collect();
        let _ = writeln!(s, "  bonds: {}", if bonds.is_empty() { "none".into() } else { bonds.join(", ") });
        let cls: Vec<String> = self.classes.iter().map(|c| format!("{{{}}}", c.join(","))).collect();
        let _ = writeln!(s, "  classes: {}", cls.join(" "));
        let gens: Vec<String> = self.group.generators.iter().map(|p| cycles(p, &names)).collect();
        let _ = writeln!(
            s,
            "  group: order {}{}",
            self.group.order,
            if gens.is_empty() {
                String::new()
            } else {
                format!(", generators {}", gens.join(" "))
            }
        );
        s
    }
}

fn bond(aij: i64, aji: i64) -> String {
    match (aij.abs(), aji.abs()) {
        (1, 1) => "---".into(),
        (2, 2) => "<=>".into(),
        (x, y) if x < y => format!("{}>", "=".repeat(y as usize - 1)),
        (x, y) if x > y => format!("<{}", "=".repeat(x as usize - 1)),
        (x, y) => format!("?{x}{y}?"),
    }
}

/// Record of the admissible isomorphism found by [`standardize`].
#[derive(Clone, Debug, Serialize)]
pub struct StandardizeReport {
    /// Positive roots (one per orbit) whose labels `(a, b)` were swapped.
    pub swapped: Vec<usize>,
    /// Positive roots (one per orbit) replaced by twice themselves.
    pub doubled: Vec<usize>,
    /// For each root of the new datum, the root of the old datum it comes from.
    pub root_map: Vec<usize>,
    /// `μ` of the new data equals `μ` of the old data, checked exactly.
    pub mu_equal: bool,
}

impl StandardizeReport {
    pub fn is_identity(&self) -> bool {
        self.swapped.is_empty() && self.doubled.is_empty()
    }
}

/// Replaces semi-standard data by standard data with the same μ.
pub fn standardize(
    d: &BasedRootDatum,
    m: &ParameterFunction,
) -> Result<(BasedRootDatum, ParameterFunction, StandardizeReport)> {
    if !m.is_semi_standard(d) {
        return Err(Error::InvalidParameters(
            "data are not semi-standard: a zero label occurs outside a pair (a, b) with α^∨ ∈ 2Y"
                .into(),
        ));
    }
    let orbit = d.root_orbits();
    let mut a = m.a.clone();
    let mut b = m.b.clone();
    let mut swapped = vec![];
    let mut doubled_orbits = BTreeSet::new();
    let mut doubled = vec![];
    for k in 0..d.npos {
        if a[k] != 0 && b[k] != 0 || doubled_orbits.contains(&orbit[k]) {
            continue;
        }
        if a[k] == 0 {
            swapped.push(k);
            for l in 0..d.num_roots() {
                if orbit[l] == orbit[k] {
                    std::mem::swap(&mut a[l], &mut b[l]);
                }
            }
        }
        doubled_orbits.insert(orbit[k]);
        doubled.push(k);
    }
    if doubled.is_empty() {
        let report = StandardizeReport {
            swapped,
            doubled,
            root_map: (0..d.num_roots()).collect(),
            mu_equal: true,
        };
        return Ok((d.clone(), m.clone(), report));
    }
    let scale = |k: usize| if doubled_orbits.contains(&orbit[k]) { 2 } else { 1 };
    let sr: IMat = (0..d.rank)
        .map(|i| d.roots[i].iter().map(|x| x * scale(i)).collect())
        .collect();
    let sc: IMat = (0..d.rank)
        .map(|i| d.coroots[i].iter().map(|x| x / scale(i)).collect())
        .collect();
    let mut nd = BasedRootDatum::from_simple(&sr, &sc, None)?;
    nd.ambient = d.ambient.clone();
    nd.lattice_label = d.lattice_label.clone();
    let mut root_map = vec![];
    for r in &nd.roots {
        let old = d
            .root_index(r)
            .filter(|&k| scale(k) == 1)
            .or_else(|| {
                let half: Vec<i64> = r.iter().map(|x| x / 2).collect();
                d.root_index(&half).filter(|&k| scale(k) == 2)
            })
            .ok_or_else(|| Error::Internal("doubled root system does not match".into()))?;
        root_map.push(old);
    }
    let na: Vec<i64> = root_map.iter().map(|&k| a[k]).collect();
    let nb: Vec<i64> = root_map
        .iter()
        .map(|&k| if scale(k) == 2 { a[k] } else { b[k] })
        .collect();
    let nm = ParameterFunction::from_root_labels(&nd, na, nb)?;
    let one = NormalizingElement::one();
    let mu_old = MuFunction::build(d, m, &one)?.to_factored();
    let mu_new = MuFunction::build(&nd, &nm, &one)?.to_factored();
    let mu_equal = mu_old.exact_eq(&mu_new);
    if !mu_equal {
        return Err(Error::Internal("standardization changed μ".into()));
    }
    Ok((
        nd,
        nm,
        StandardizeReport {
            swapped,
            doubled,
            root_map,
            mu_equal,
        },
    ))
}

/// A diagram automorphism of `(R₀^∨, F₀^∨)` normalizing `Y`.
#[derive(Clone, Debug, Serialize)]
pub struct DiagramAutomorphism {
    /// Image of each simple root index.
    pub perm: Vec<usize>,
    /// The induced automorphism of `Y`.
    pub matrix_y: IMat,
}

/// `Out_T(μ) = Ω_X^* ⋊ Ω₀^Y`.
#[derive(Clone, Debug, Serialize)]
pub struct OutTGroup {
    /// All elements of `Ω_X^*`, as torsion points with every root equal to 1.
    pub translations: Vec<TorusPoint>,
    /// All elements of `Ω₀^Y`, identity included.
    pub automorphisms: Vec<DiagramAutomorphism>,
    pub order: usize,
    /// Every element fixes μ exactly.
    pub verified: bool,
}

fn cartan_perms(c: &IMat) -> Vec<Vec<usize>> {
    let n = c.len();
    let mut out = vec![];
    fn go(c: &IMat, cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        let n = c.len();
        let i = cur.len();
        if i == n {
            out.push(cur.clone());
            return;
        }
        for j in 0..n {
            if used[j] {
                continue;
            }
            if (0..i).all(|k| c[k][i] == c[cur[k]][j] && c[i][k] == c[j][cur[k]]) {
                used[j] = true;
                cur.push(j);
                go(c, cur, used, out);
                cur.pop();
                used[j] = false;
            }
        }
    }
    go(c, &mut vec![], &mut vec![false; n], &mut out);
    out
}

/// The affine automorphisms of `T` fixing μ.  Semi-standard data are
/// standardized first.
pub fn out_t_mu(d: &BasedRootDatum, m: &ParameterFunction) -> Result<OutTGroup> {
    let (d, m, _) = standardize(d, m)?;
    let n = d.rank;
    let one = NormalizingElement::one();
    let mu = MuFunction::build(&d, &m, &one)?;
    let f = mu.to_factored();
    let fixes = |map: &AffineTorusMap| -> Result<bool> {
        Ok(f.substitute(&map.to_monomial_map())?.exact_eq(&f))
    };
    let simple: IMat = d.roots[..n].to_vec();
    let omega = torsion_solutions(&simple, n)?;
    let translations: Vec<TorusPoint> = omega
        .elements(true)
        .into_iter()
        .map(|t| {
            if t.len() == n {
                TorusPoint::torsion_only(t)
            } else {
                TorusPoint::identity(n)
            }
        })
        .collect();
    let idq = to_qmat(&identity(n));
    for t in &translations {
        if !fixes(&AffineTorusMap::new(t.clone(), idq.clone(), n))? {
            return Err(Error::Internal(format!("translation by {t} does not fix μ")));
        }
    }
    let mut automorphisms = vec![];
    let cart = d.cartan_matrix();
    let kq: QMat = (0..n).map(|i| (0..n).map(|j| q(d.coroots[j][i])).collect()).collect();
    let kinv = if n > 0 { qinverse(&kq)? } else { vec![] };
    for perm in cartan_perms(&cart) {
        let labels_kept = (0..n).all(|i| {
            let j = perm[i];
            m.a[i] == m.a[j] && m.b[i] == m.b[j] && d.coroot_in_2y(i) == d.coroot_in_2y(j)
        });
        if !labels_kept {
            continue;
        }
        // M K = K_σ, columns of K the simple coroots.
        let ks: QMat = (0..n).map(|i| (0..n).map(|j| q(d.coroots[perm[j]][i])).collect()).collect();
        let mq = crate::rootdata::lattice::qmat_mul(&ks, &kinv);
        let Some(mi) = mq
            .iter()
            .map(|r| crate::rootdata::lattice::as_integral(r))
            .collect::<Option<IMat>>()
        else {
            continue;
        };
        if crate::rootdata::lattice::idet(&mi).abs() != 1 {
            continue;
        }
        let map = AffineTorusMap::new(TorusPoint::identity(n), to_qmat(&mi), n);
        if !fixes(&map)? {
            return Err(Error::Internal(format!(
                "diagram automorphism {perm:?} does not fix μ"
            )));
        }
        automorphisms.push(DiagramAutomorphism {
            perm,
            matrix_y: mi,
        });
    }
    let order = translations.len() * automorphisms.len();
    Ok(OutTGroup {
        translations,
        automorphisms,
        order,
        verified: true,
    })
}

/// Result of `η^𝐜`: the new parameters and the torus map realizing it.
#[derive(Clone, Debug)]
pub struct EtaMap {
    pub class: Vec<String>,
    pub params: ParameterFunction,
    pub map: AffineTorusMap,
    /// Whether `𝐜` meets `S₀`.
    pub meets_finite: bool,
}

/// The involution `η^𝐜` attached to a W-conjugacy class of affine simple
/// reflections, given as a list of node names.
pub fn spectral_isomorphism_eta(
    d: &BasedRootDatum,
    m: &ParameterFunction,
    class: &[String],
) -> Result<EtaMap> {
    let mut want: Vec<String> = class.to_vec();
    want.sort();
    let found = m.classes(d).into_iter().find(|c| {
        let mut c = c.clone();
        c.sort();
        c == want
    });
    let Some(found) = found else {
        return Err(Error::Input(format!(
            "`{}` is not a conjugacy class of affine simple reflections",
            class.join(",")
        )));
    };
    let orbit = d.root_orbits();
    let n = d.rank;
    let mut a = m.a.clone();
    let mut b = m.b.clone();
    let finite = found.iter().find(|s| !s.starts_with("s0"));
    let idq = to_qmat(&identity(n));
    if let Some(name) = finite {
        let i: usize = name[1..].parse::<usize>().expect("finite node name") - 1;
        for k in 0..d.num_roots() {
            if orbit[k] != orbit[i] {
                continue;
            }
            if d.coroot_in_2y(k) {
                let (x, y) = (a[k], b[k]);
                a[k] = -y;
                b[k] = -x;
            } else {
                a[k] = -a[k];
                b[k] = -b[k];
            }
        }
        let params = ParameterFunction::from_root_labels(d, a, b)?;
        return Ok(EtaMap {
            class: found,
            params,
            map: AffineTorusMap::new(TorusPoint::identity(n), idq, n),
            meets_finite: true,
        });
    }
    // Only affine nodes: the b-labels of the roots with α^∨ ∈ 2Y of one component.
    let comp = (0..d.components.len())
        .find(|&c| found.contains(&affine_node_name(d, c)))
        .expect("class contains an affine node");
    let th = dual_highest_root(d, comp);
    let target: Vec<usize> = (0..d.num_roots())
        .filter(|&k| orbit[k] == orbit[th] && d.coroot_in_2y(k))
        .collect();
    for &k in &target {
        b[k] = -b[k];
    }
    let params = ParameterFunction::from_root_labels(d, a, b)?;
    let simple: IMat = d.roots[..n].to_vec();
    let c: Vec<Q> = (0..n)
        .map(|i| if target.contains(&i) { Q::new(1, 2) } else { Q::zero() })
        .collect();
    let s_c = congruence_solutions(&simple, &c)
        .into_iter()
        .map(TorusPoint::torsion_only)
        .find(|s| {
            (0..d.num_roots()).all(|k| {
                let want = if target.contains(&k) { Q::new(1, 2) } else { Q::zero() };
                s.evaluate(&d.roots[k]).0 == want
            })
        })
        .ok_or_else(|| Error::Internal("no W₀-invariant element s_c".into()))?;
    Ok(EtaMap {
        class: found,
        params,
        map: AffineTorusMap::new(s_c, idq, n),
        meets_finite: false,
    })
}

/// Order of the group generated by the `η^𝐜` for the given classes, acting on
/// parameter functions, computed as the orbit of `m`.  For generic `m` this
/// equals the order of the group.
pub fn eta_group_orbit(
    d: &BasedRootDatum,
    m: &ParameterFunction,
    classes: &[Vec<String>],
) -> Result<usize> {
    let key = |p: &ParameterFunction| (p.a.clone(), p.b.clone());
    let mut seen = BTreeSet::from([key(m)]);
    let mut queue = VecDeque::from([m.clone()]);
    while let Some(p) = queue.pop_front() {
        for c in classes {
            let e = spectral_isomorphism_eta(d, &p, c)?;
            if seen.insert(key(&e.params)) {
                queue.push_back(e.params);
            }
        }
    }
    Ok(seen.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootdata::{build_from_expr, LatticeChoice};

    fn labels(d: &BasedRootDatum, pairs: &[(&str, i64)]) -> ParameterFunction {
        let l: BTreeMap<String, i64> = pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        ParameterFunction::from_labels(d, &l).unwrap()
    }

    #[test]
    fn a1_spectral() {
        let d = build_from_expr("A1", &LatticeChoice::Root).unwrap();
        let m = ParameterFunction::uniform(&d, 1).unwrap();
        let s = spectral_diagram(&d, &m).unwrap();
        assert_eq!(s.nodes.len(), 2);
        assert!(s.nodes.iter().all(|a| a.label == 1));
        assert_eq!(s.group.order, 2);
        assert_eq!(s.classes.len(), 1);
        let dp = build_from_expr("A1", &LatticeChoice::Weight).unwrap();
        let mp = ParameterFunction::uniform(&dp, 1).unwrap();
        assert_eq!(spectral_diagram(&dp, &mp).unwrap().group.order, 1);
        let a = arithmetic_diagram(&d, &m).unwrap();
        assert_eq!(a.group.order, 1);
        assert_eq!(a.nodes.iter().filter(|n| n.special).count(), 1);
        assert_eq!(arithmetic_diagram(&dp, &mp).unwrap().group.order, 2);
    }

    #[test]
    fn c1_labels_split() {
        let d = build_from_expr("A1", &LatticeChoice::Root).unwrap();
        let m = labels(&d, &[("s1", 3), ("s0", 1)]);
        let s = spectral_diagram(&d, &m).unwrap();
        let mut ls: Vec<i64> = s.nodes.iter().map(|a| a.label).collect();
        ls.sort();
        assert_eq!(ls, vec![2, 4]);
        assert_eq!(s.nodes[0].gradient, vec![2]);
    }

    #[test]
    fn zero_labels() {
        let d = build_from_expr("B2", &LatticeChoice::Root).unwrap();
        let m = ParameterFunction::uniform(&d, 0).unwrap();
        assert!(spectral_diagram(&d, &m).unwrap().nodes.iter().all(|a| a.label == 0));
    }

    #[test]
    fn b2_arithmetic_classes_match_parameters() {
        for lat in [LatticeChoice::Standard, LatticeChoice::Weight, LatticeChoice::Root] {
            let d = build_from_expr("B2", &lat).unwrap();
            let m = ParameterFunction::uniform(&d, 1).unwrap();
            let a = arithmetic_diagram(&d, &m).unwrap();
            let mut x: Vec<Vec<String>> = a.classes.iter().map(|c| { let mut c = c.clone(); c.sort(); c }).collect();
            let mut y: Vec<Vec<String>> = m.classes(&d).iter().map(|c| { let mut c = c.clone(); c.sort(); c }).collect();
            x.sort();
            y.sort();
            assert_eq!(x, y, "{lat:?}");
        }
        let d = build_from_expr("B2", &LatticeChoice::Standard).unwrap();
        let m = labels(&d, &[("s1", 1), ("s2", 2), ("s0", 1)]);
        let a = arithmetic_diagram(&d, &m).unwrap();
        assert_eq!(a.classes.len(), 3);
        assert!(a.render().contains("classes: "));
    }

    #[test]
    fn standardize_c_type() {
        let d = build_from_expr("B2", &LatticeChoice::Standard).unwrap();
        let m = labels(&d, &[("s1", 1), ("s2", 2), ("s0", 0)]);
        let (nd, nm, rep) = standardize(&d, &m).unwrap();
        assert!(rep.mu_equal);
        assert_eq!(rep.doubled.len(), 1);
        assert!(nm.is_standard(&nd));
        let m2 = labels(&d, &[("s1", 1), ("s2", 0), ("s0", 2)]);
        let (_, _, rep2) = standardize(&d, &m2).unwrap();
        assert_eq!(rep2.swapped.len(), 1);
        let m3 = ParameterFunction::uniform(&d, 1).unwrap();
        assert!(standardize(&d, &m3).unwrap().2.is_identity());
        let bad = labels(&d, &[("s1", 0), ("s2", 1), ("s0", 1)]);
        assert!(standardize(&d, &bad).is_err());
    }

    #[test]
    fn out_t_examples() {
        let d = build_from_expr("A1", &LatticeChoice::Root).unwrap();
        let m = ParameterFunction::uniform(&d, 1).unwrap();
        assert_eq!(out_t_mu(&d, &m).unwrap().order, 1);
        let d = build_from_expr("A1", &LatticeChoice::Weight).unwrap();
        let m = ParameterFunction::uniform(&d, 1).unwrap();
        assert_eq!(out_t_mu(&d, &m).unwrap().order, 2);
        let d = build_from_expr("D4", &LatticeChoice::Root).unwrap();
        let m = ParameterFunction::uniform(&d, 1).unwrap();
        let g = out_t_mu(&d, &m).unwrap();
        assert_eq!(g.automorphisms.len(), 6);
        assert_eq!(g.translations.len(), 1);
    }

    #[test]
    fn eta_involutions_and_dihedral_group() {
        let d = build_from_expr("B2", &LatticeChoice::Standard).unwrap();
        let m = labels(&d, &[("s1", 1), ("s2", 2), ("s0", 5)]);
        let c_s: Vec<String> = vec!["s2".into()];
        let c_0: Vec<String> = vec!["s0".into()];
        let e = spectral_isomorphism_eta(&d, &m, &c_s).unwrap();
        assert!(e.meets_finite);
        assert_eq!(e.params.m_plus2(1), -m.m_plus2(1));
        assert_eq!(e.params.m_minus2(1), m.m_minus2(1));
        let back = spectral_isomorphism_eta(&d, &e.params, &c_s).unwrap();
        assert_eq!(back.params, m);
        let f = spectral_isomorphism_eta(&d, &m, &c_0).unwrap();
        assert!(!f.meets_finite);
        assert_eq!(f.params.m_plus2(1), m.m_minus2(1));
        assert_eq!(f.params.m_minus2(1), m.m_plus2(1));
        assert_eq!(eta_group_orbit(&d, &m, &[c_s, c_0]).unwrap(), 8);
    }
}
