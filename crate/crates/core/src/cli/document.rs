//! The input format: INI-like sections describing one algebra and an
//! optional transfer map.
//!
//! ```text
//! [datum]
//! type = B2
//! lattice = standard
//!
//! [parameters]
//! s0 = 1
//! s1 = 1
//! s2 = 2
//!
//! [normalization]
//! constant = 1
//! vexp = 0
//! qints = 2:-1
//!
//! [stm]
//! recipe = weyl
//! word = [1, 2]
//! ```

use crate::error::{Error, Result};
use crate::exactscalars::normalizing::parse_rational;
use crate::exactscalars::{NormalizingElement, BQ};
use crate::rootdata::lattice::{QMat, Q};
use crate::rootdata::{build_from_expr, params::node_names, LatticeChoice, ParameterFunction};
use crate::stm::Algebra;
use num_traits::{One, ToPrimitive};
use std::collections::BTreeMap;
use std::fmt::Write;

#[derive(Clone, Debug, PartialEq)]
pub enum LatticeSpec {
    Root,
    Weight,
    Standard,
    Basis(QMat),
}

#[derive(Clone, Debug, PartialEq)]
pub struct DatumSection {
    pub type_expr: String,
    pub lattice: LatticeSpec,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Recipe {
    Identity,
    /// A Weyl group element as a word in the simple reflections (1-based).
    Weyl(Vec<usize>),
    /// The element with this index in `Ω_X^*`.
    Translation(usize),
    /// The isogeny dual to an inclusion of character lattices.
    Lattice,
    /// `η^𝐜` for a class of affine nodes.
    Eta(Vec<String>),
    /// Embedding of `𝐋` normalized by `d0` at the residual point orbit with
    /// this catalog index.
    Rank0 { point: usize, d0: NormalizingElement },
    Explicit {
        matrix: QMat,
        torsion: Vec<Q>,
        gamma: Vec<Q>,
        coset: Option<Vec<Vec<i64>>>,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct InputDocument {
    pub datum: DatumSection,
    /// Labels per affine node; empty means all labels equal to 1.
    pub parameters: BTreeMap<String, i64>,
    pub normalization: NormalizingElement,
    pub stm: Option<Recipe>,
    /// Location of each `section` header and `section.key`, for diagnostics.
    positions: BTreeMap<String, (usize, usize)>,
}

const SECTIONS: [&str; 4] = ["datum", "parameters", "normalization", "stm"];

struct Entry {
    value: String,
    line: usize,
    col: usize,
}

fn perr(line: usize, col: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        col,
        msg: msg.into(),
    }
}

/// Scanner over a bracketed literal with column tracking.
struct Lit<'a> {
    s: &'a [u8],
    i: usize,
    line: usize,
    col0: usize,
}

impl<'a> Lit<'a> {
    fn new(e: &'a Entry) -> Self {
        Lit {
            s: e.value.as_bytes(),
            i: 0,
            line: e.line,
            col0: e.col,
        }
    }

    fn err(&self, msg: &str) -> Error {
        perr(self.line, self.col0 + self.i, msg)
    }

    fn ws(&mut self) {
        while self.i < self.s.len() && self.s[self.i].is_ascii_whitespace() {
            self.i += 1;
        }
    }

    fn eat(&mut self, c: u8) -> Result<()> {
        self.ws();
        if self.s.get(self.i) == Some(&c) {
            self.i += 1;
            Ok(())
        } else {
            Err(self.err(&format!("expected `{}`", c as char)))
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.s.get(self.i).copied()
    }

    fn rational(&mut self) -> Result<Q> {
        self.ws();
        let start = self.i;
        while self.i < self.s.len() && (self.s[self.i].is_ascii_digit() || b"-+/".contains(&self.s[self.i])) {
            self.i += 1;
        }
        let tok = std::str::from_utf8(&self.s[start..self.i]).unwrap();
        let col = self.col0 + start;
        let v = parse_rational(tok).ok_or_else(|| perr(self.line, col, format!("bad number `{tok}`")))?;
        let n = v.numer().to_i64();
        let d = v.denom().to_i64();
        match (n, d) {
            (Some(n), Some(d)) => Ok(Q::new(n, d)),
            _ => Err(perr(self.line, col, "number out of range")),
        }
    }

    fn vector(&mut self) -> Result<Vec<Q>> {
        self.eat(b'[')?;
        let mut out = vec![];
        if self.peek() == Some(b']') {
            self.i += 1;
            return Ok(out);
        }
        loop {
            out.push(self.rational()?);
            match self.peek() {
                Some(b',') => self.i += 1,
                Some(b']') => {
                    self.i += 1;
                    return Ok(out);
                }
                _ => return Err(self.err("expected `,` or `]`")),
            }
        }
    }

    fn matrix(&mut self) -> Result<QMat> {
        self.eat(b'[')?;
        let mut out = vec![];
        if self.peek() == Some(b']') {
            self.i += 1;
            return Ok(out);
        }
        loop {
            let col = self.col0 + self.i;
            let row = self.vector()?;
            if let Some(first) = out.first() {
                let first: &Vec<Q> = first;
                if first.len() != row.len() {
                    return Err(perr(self.line, col, "rows of different lengths"));
                }
            }
            out.push(row);
            match self.peek() {
                Some(b',') => self.i += 1,
                Some(b']') => {
                    self.i += 1;
                    return Ok(out);
                }
                _ => return Err(self.err("expected `,` or `]`")),
            }
        }
    }

    fn end(&mut self) -> Result<()> {
        if self.peek().is_some() {
            return Err(self.err("trailing characters"));
        }
        Ok(())
    }
}

fn int_of(e: &Entry) -> Result<i64> {
    e.value
        .parse()
        .map_err(|_| perr(e.line, e.col, format!("expected an integer, found `{}`", e.value)))
}

fn integral(e: &Entry, v: &[Q]) -> Result<Vec<i64>> {
    v.iter()
        .map(|x| {
            if x.is_integer() {
                Ok(x.to_integer())
            } else {
                Err(perr(e.line, e.col, "expected integer entries"))
            }
        })
        .collect()
}

fn parse_qints(e: &Entry) -> Result<BTreeMap<u32, i64>> {
    let mut out = BTreeMap::new();
    if e.value.trim().is_empty() {
        return Ok(out);
    }
    for part in e.value.split(',') {
        let (n, k) = part
            .split_once(':')
            .ok_or_else(|| perr(e.line, e.col, format!("expected `n:k`, found `{}`", part.trim())))?;
        let n: u32 = n.trim().parse().map_err(|_| perr(e.line, e.col, "bad q-integer index"))?;
        let k: i64 = k.trim().parse().map_err(|_| perr(e.line, e.col, "bad exponent"))?;
        *out.entry(n).or_insert(0) += k;
    }
    Ok(out)
}

fn normalizing(
    constant: Option<&Entry>,
    vexp: Option<&Entry>,
    qints: Option<&Entry>,
    at: (usize, usize),
) -> Result<NormalizingElement> {
    let c = match constant {
        Some(e) => parse_rational(&e.value)
            .ok_or_else(|| perr(e.line, e.col, format!("bad rational `{}`", e.value)))?,
        None => BQ::one(),
    };
    let v = vexp.map(int_of).transpose()?.unwrap_or(0);
    let q = qints.map(parse_qints).transpose()?.unwrap_or_default();
    NormalizingElement::new(c, v, q).map_err(|e| perr(at.0, at.1, e.to_string()))
}

impl InputDocument {
    pub fn parse(text: &str) -> Result<Self> {
        let mut sections: BTreeMap<String, BTreeMap<String, Entry>> = BTreeMap::new();
        let mut positions = BTreeMap::new();
        let mut current: Option<String> = None;
        for (ln, raw) in text.lines().enumerate() {
            let line = ln + 1;
            let body = match raw.find(['#', ';']) {
                Some(i) => &raw[..i],
                None => raw,
            };
            let indent = body.len() - body.trim_start().len();
            let t = body.trim();
            if t.is_empty() {
                continue;
            }
            let col = raw[..indent].chars().count() + 1;
            if let Some(rest) = t.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| perr(line, col, "unterminated section header"))?
                    .trim();
                if !SECTIONS.contains(&name) {
                    return Err(perr(line, col + 1, format!("unknown section `{name}`")));
                }
                if sections.contains_key(name) {
                    return Err(perr(line, col, format!("duplicate section `{name}`")));
                }
                sections.insert(name.to_string(), BTreeMap::new());
                positions.insert(name.to_string(), (line, col));
                current = Some(name.to_string());
                continue;
            }
            let Some(sec) = &current else {
                return Err(perr(line, col, "key outside of a section"));
            };
            let (k, v) = t.split_once('=').ok_or_else(|| perr(line, col, "expected `key = value`"))?;
            let key = k.trim();
            if key.is_empty() {
                return Err(perr(line, col, "empty key"));
            }
            let eq = body.find('=').unwrap();
            let vcol = raw[..eq + 1].chars().count() + 1 + (v.len() - v.trim_start().len());
            let map = sections.get_mut(sec).unwrap();
            if map.contains_key(key) {
                return Err(perr(line, col, format!("duplicate key `{key}`")));
            }
            positions.insert(format!("{sec}.{key}"), (line, vcol));
            map.insert(
                key.to_string(),
                Entry {
                    value: v.trim().to_string(),
                    line,
                    col: vcol,
                },
            );
        }
        let take = |sec: &str, allowed: &[&str]| -> Result<BTreeMap<String, Entry>> {
            let mut m = BTreeMap::new();
            if let Some(src) = sections.get(sec) {
                for (k, e) in src {
                    if !allowed.is_empty() && !allowed.contains(&k.as_str()) {
                        let (l, _) = positions[&format!("{sec}.{k}")];
                        return Err(perr(l, 1, format!("unknown key `{k}` in [{sec}]")));
                    }
                    m.insert(
                        k.clone(),
                        Entry {
                            value: e.value.clone(),
                            line: e.line,
                            col: e.col,
                        },
                    );
                }
            }
            Ok(m)
        };
        let d = take("datum", &["type", "lattice", "basis"])?;
        let dpos = positions.get("datum").copied().unwrap_or((1, 1));
        let ty = d
            .get("type")
            .ok_or_else(|| perr(dpos.0, dpos.1, "[datum] needs a `type`"))?
            .value
            .clone();
        let lattice = match d.get("lattice").map(|e| (e.value.as_str(), e)) {
            None | Some(("root", _)) => LatticeSpec::Root,
            Some(("weight", _)) => LatticeSpec::Weight,
            Some(("standard", _)) => LatticeSpec::Standard,
            Some(("basis", _)) => {
                let e = d
                    .get("basis")
                    .ok_or_else(|| perr(dpos.0, dpos.1, "`lattice = basis` needs a `basis` matrix"))?;
                let mut lit = Lit::new(e);
                let m = lit.matrix()?;
                lit.end()?;
                LatticeSpec::Basis(m)
            }
            Some((other, e)) => {
                return Err(perr(e.line, e.col, format!("unknown lattice `{other}`")));
            }
        };
        if d.contains_key("basis") && !matches!(lattice, LatticeSpec::Basis(_)) {
            let e = &d["basis"];
            return Err(perr(e.line, e.col, "`basis` requires `lattice = basis`"));
        }
        let mut parameters = BTreeMap::new();
        for (k, e) in take("parameters", &[])? {
            parameters.insert(k, int_of(&e)?);
        }
        let n = take("normalization", &["constant", "vexp", "qints"])?;
        let npos = positions.get("normalization").copied().unwrap_or((1, 1));
        let normalization = normalizing(n.get("constant"), n.get("vexp"), n.get("qints"), npos)?;
        let stm = if sections.contains_key("stm") {
            let s = take(
                "stm",
                &[
                    "recipe", "word", "index", "class", "point", "d0.constant", "d0.vexp", "d0.qints", "matrix",
                    "torsion", "gamma", "coset",
                ],
            )?;
            let spos = positions["stm"];
            Some(parse_recipe(&s, spos)?)
        } else {
            None
        };
        Ok(InputDocument {
            datum: DatumSection {
                type_expr: ty,
                lattice,
            },
            parameters,
            normalization,
            stm,
            positions,
        })
    }

    /// Position of a section or `section.key`, if present in the source.
    pub fn position(&self, key: &str) -> Option<(usize, usize)> {
        self.positions.get(key).copied()
    }

    fn at(&self, key: &str, e: Error) -> Error {
        match (self.position(key), e) {
            (_, e @ Error::Parse { .. }) => e,
            (Some((line, col)), e) => perr(line, col, e.to_string()),
            (None, e) => e,
        }
    }

    /// Builds the algebra described by the document, with semantic errors
    /// located at the offending section.
    pub fn algebra(&self, name: &str) -> Result<Algebra> {
        let lat = match &self.datum.lattice {
            LatticeSpec::Root => LatticeChoice::Root,
            LatticeSpec::Weight => LatticeChoice::Weight,
            LatticeSpec::Standard => LatticeChoice::Standard,
            LatticeSpec::Basis(b) => LatticeChoice::Basis(b.clone()),
        };
        let d = build_from_expr(&self.datum.type_expr, &lat).map_err(|e| self.at("datum", e))?;
        let m = if self.parameters.is_empty() {
            ParameterFunction::uniform(&d, 1)
        } else {
            let names = node_names(&d);
            for k in self.parameters.keys() {
                if !names.contains(k) {
                    let e = Error::Input(format!("unknown node `{k}`; nodes are {}", names.join(", ")));
                    return Err(self.at(&format!("parameters.{k}"), e));
                }
            }
            ParameterFunction::from_labels(&d, &self.parameters)
        }
        .map_err(|e| self.at("parameters", e))?;
        Algebra::new(name, d, m, self.normalization.clone())
    }

    /// Canonical text form; `parse(render(doc)) == doc` up to positions.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "[datum]\ntype = {}", self.datum.type_expr);
        match &self.datum.lattice {
            LatticeSpec::Root => out.push_str("lattice = root\n"),
            LatticeSpec::Weight => out.push_str("lattice = weight\n"),
            LatticeSpec::Standard => out.push_str("lattice = standard\n"),
            LatticeSpec::Basis(b) => {
                let _ = writeln!(out, "lattice = basis\nbasis = {}", render_matrix(b));
            }
        }
        if !self.parameters.is_empty() {
            out.push_str("\n[parameters]\n");
            for (k, v) in &self.parameters {
                let _ = writeln!(out, "{k} = {v}");
            }
        }
        if self.normalization != NormalizingElement::one() {
            out.push_str("\n[normalization]\n");
            render_normalizing(&mut out, "", &self.normalization);
        }
        if let Some(r) = &self.stm {
            out.push_str("\n[stm]\n");
            match r {
                Recipe::Identity => out.push_str("recipe = identity\n"),
                Recipe::Weyl(w) => {
                    let ws: Vec<String> = w.iter().map(|x| x.to_string()).collect();
                    let _ = writeln!(out, "recipe = weyl\nword = [{}]", ws.join(", "));
                }
                Recipe::Translation(i) => {
                    let _ = writeln!(out, "recipe = translation\nindex = {i}");
                }
                Recipe::Lattice => out.push_str("recipe = lattice\n"),
                Recipe::Eta(c) => {
                    let _ = writeln!(out, "recipe = eta\nclass = {}", c.join(", "));
                }
                Recipe::Rank0 { point, d0 } => {
                    let _ = writeln!(out, "recipe = rank0\npoint = {point}");
                    render_normalizing(&mut out, "d0.", d0);
                }
                Recipe::Explicit {
                    matrix,
                    torsion,
                    gamma,
                    coset,
                } => {
                    let _ = writeln!(out, "recipe = explicit\nmatrix = {}", render_matrix(matrix));
                    let _ = writeln!(out, "torsion = {}", render_vec(torsion));
                    let _ = writeln!(out, "gamma = {}", render_vec(gamma));
                    if let Some(u) = coset {
                        let uq: QMat = u.iter().map(|r| r.iter().map(|&x| Q::from(x)).collect()).collect();
                        let _ = writeln!(out, "coset = {}", render_matrix(&uq));
                    }
                }
            }
        }
        out
    }
}

fn render_normalizing(out: &mut String, prefix: &str, d: &NormalizingElement) {
    let _ = writeln!(out, "{prefix}constant = {}", d.constant);
    let _ = writeln!(out, "{prefix}vexp = {}", d.vexp);
    if !d.qints.is_empty() {
        let q: Vec<String> = d.qints.iter().map(|(n, k)| format!("{n}:{k}")).collect();
        let _ = writeln!(out, "{prefix}qints = {}", q.join(", "));
    }
}

fn render_vec(v: &[Q]) -> String {
    let s: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("[{}]", s.join(", "))
}

fn render_matrix(m: &QMat) -> String {
    let rows: Vec<String> = m.iter().map(|r| render_vec(r)).collect();
    format!("[{}]", rows.join(", "))
}

fn parse_recipe(s: &BTreeMap<String, Entry>, at: (usize, usize)) -> Result<Recipe> {
    let recipe = s
        .get("recipe")
        .ok_or_else(|| perr(at.0, at.1, "[stm] needs a `recipe`"))?;
    let allowed: &[&str] = match recipe.value.as_str() {
        "identity" | "lattice" => &[],
        "weyl" => &["word"],
        "translation" => &["index"],
        "eta" => &["class"],
        "rank0" => &["point", "d0.constant", "d0.vexp", "d0.qints"],
        "explicit" => &["matrix", "torsion", "gamma", "coset"],
        other => return Err(perr(recipe.line, recipe.col, format!("unknown recipe `{other}`"))),
    };
    for (k, e) in s {
        if k != "recipe" && !allowed.contains(&k.as_str()) {
            return Err(perr(
                e.line,
                1,
                format!("key `{k}` does not apply to recipe `{}`", recipe.value),
            ));
        }
    }
    let need = |k: &str| {
        s.get(k)
            .ok_or_else(|| perr(at.0, at.1, format!("recipe `{}` needs `{k}`", recipe.value)))
    };
    let vec_of = |k: &str| -> Result<Vec<Q>> {
        let e = need(k)?;
        let mut lit = Lit::new(e);
        let v = lit.vector()?;
        lit.end()?;
        Ok(v)
    };
    Ok(match recipe.value.as_str() {
        "identity" => Recipe::Identity,
        "lattice" => Recipe::Lattice,
        "weyl" => {
            let e = need("word")?;
            let w = integral(e, &vec_of("word")?)?;
            if w.iter().any(|&x| x < 1) {
                return Err(perr(e.line, e.col, "simple reflections are numbered from 1"));
            }
            Recipe::Weyl(w.into_iter().map(|x| x as usize).collect())
        }
        "translation" => {
            let e = need("index")?;
            Recipe::Translation(int_of(e)?.try_into().map_err(|_| perr(e.line, e.col, "negative index"))?)
        }
        "eta" => {
            let e = need("class")?;
            Recipe::Eta(e.value.split(',').map(|x| x.trim().to_string()).filter(|x| !x.is_empty()).collect())
        }
        "rank0" => {
            let e = need("point")?;
            let point = int_of(e)?.try_into().map_err(|_| perr(e.line, e.col, "negative index"))?;
            let d0 = normalizing(s.get("d0.constant"), s.get("d0.vexp"), s.get("d0.qints"), at)?;
            Recipe::Rank0 { point, d0 }
        }
        _ => {
            let e = need("matrix")?;
            let mut lit = Lit::new(e);
            let matrix = lit.matrix()?;
            lit.end()?;
            let n = matrix.len();
            let torsion = if s.contains_key("torsion") { vec_of("torsion")? } else { vec![Q::from(0); n] };
            let gamma = if s.contains_key("gamma") { vec_of("gamma")? } else { vec![Q::from(0); n] };
            if torsion.len() != n || gamma.len() != n {
                return Err(perr(at.0, at.1, "base point length differs from the number of matrix rows"));
            }
            let coset = match s.get("coset") {
                Some(e) => {
                    let mut lit = Lit::new(e);
                    let m = lit.matrix()?;
                    lit.end()?;
                    Some(m.iter().map(|r| integral(e, r)).collect::<Result<Vec<_>>>()?)
                }
                None => None,
            };
            Recipe::Explicit {
                matrix,
                torsion,
                gamma,
                coset,
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const B2: &str = "[datum]\ntype = B2\nlattice = standard\n\n[parameters]\ns0 = 1\ns1 = 1\ns2 = 2\n\n[normalization]\nconstant = 1\nvexp = 1\nqints = 2:-1\n\n[stm]\nrecipe = weyl\nword = [1, 2]\n";

    #[test]
    fn round_trip() {
        let d = InputDocument::parse(B2).unwrap();
        assert_eq!(d.render(), B2);
        assert_eq!(InputDocument::parse(&d.render()).unwrap(), d);
        assert_eq!(d.normalization.render(), "(v-v^-1) * [2]^-1");
    }

    #[test]
    fn minimal() {
        let d = InputDocument::parse("[datum]\ntype = A1\n").unwrap();
        let a = d.algebra("A1").unwrap();
        assert_eq!(a.params.a, vec![1, 1]);
        assert!(d.stm.is_none());
    }

    #[test]
    fn diagnostics() {
        let e = InputDocument::parse("[datum]\ntype = A1\ncolour = red\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }), "{e:?}");
        let e = InputDocument::parse("[datum]\ntype = A1\nlattice = basis\nbasis = [[1, 2], [3 4]]\n").unwrap_err();
        match e {
            Error::Parse { line, col, .. } => assert_eq!((line, col), (4, 21)),
            other => panic!("{other:?}"),
        }
        let e = InputDocument::parse("type = A1\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 1, col: 1, .. }));
        let e = InputDocument::parse("[datum]\ntype = A1\n[stm]\nrecipe = weyl\nindex = 2\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 5, .. }));
    }

    #[test]
    fn label_mismatch_names_nodes() {
        let d = InputDocument::parse("[datum]\ntype = A2\n[parameters]\ns0 = 1\ns1 = 1\ns2 = 2\n").unwrap();
        let e = d.algebra("A2").unwrap_err().to_string();
        assert!(e.starts_with("3:"), "{e}");
        assert!(e.contains("s1") && e.contains("s2"), "{e}");
    }
}
