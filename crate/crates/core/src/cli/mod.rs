//! Command dispatch and reporting for the `residua` binary.

pub mod document;

pub use document::{InputDocument, LatticeSpec, Recipe};

use crate::diagrams::{arithmetic_diagram, eta_group_orbit, out_t_mu, spectral_diagram, spectral_isomorphism_eta};
use crate::error::{Error, Result};
use crate::exactscalars::{NormalizingElement, BQ};
use crate::residual::{enumerate_residual_cosets, enumerate_residual_points, eval_formal_degree, formal_degree};
use crate::stm::{
    check_order_witness, excellent_subset, image_coset, recipes, search_rank0, Algebra, OrderVerdict,
    SpectralTransferMap, T4Status, VerificationRecord,
};
use crate::torus::{AffineTorusMap, Coset, TorusPoint};
use num_traits::ToPrimitive;
use serde_json::{json, Value};
use std::fmt::Write;

pub const SCHEMA: &str = "residua/1";

pub const COMMANDS: [&str; 12] = [
    "residual-points",
    "residual-cosets",
    "mu",
    "fdeg",
    "spectral-diagram",
    "arithmetic-diagram",
    "symmetries",
    "verify-stm",
    "compose-stm",
    "search-rank0",
    "check-order",
    "correspondence",
];

#[derive(Clone, Debug, Default)]
pub struct Options {
    /// Evaluation point for numeric cross-checks.
    pub v0: Option<BQ>,
    /// Source normalization for `search-rank0`.
    pub d0: Option<NormalizingElement>,
}

/// Output of a command.  `refuted` selects exit code 2.
#[derive(Clone, Debug)]
pub struct Report {
    pub text: String,
    pub json: Value,
    pub refuted: bool,
}

impl Report {
    fn new(command: &str, text: String, mut body: Value, refuted: bool) -> Self {
        if let Value::Object(m) = &mut body {
            m.insert("schema".into(), json!(SCHEMA));
            m.insert("command".into(), json!(command));
        }
        Report {
            text,
            json: body,
            refuted,
        }
    }
}

/// A parsed input file together with the name used for its algebra.
#[derive(Clone, Debug)]
pub struct NamedDocument {
    pub name: String,
    pub doc: InputDocument,
}

pub fn exit_code(r: &Result<Report>) -> i32 {
    match r {
        Ok(rep) if rep.refuted => 2,
        Ok(_) => 0,
        Err(Error::Refuted(_)) => 2,
        Err(_) => 1,
    }
}

fn header(a: &Algebra) -> String {
    let labels: Vec<String> = a.params.nodes.iter().map(|(k, v)| format!("{k}={v}")).collect();
    format!(
        "{} ({}), labels {}, d = {}",
        a.datum.type_label,
        a.datum.lattice_label,
        if labels.is_empty() { "none".to_string() } else { labels.join(" ") },
        a.d
    )
}

fn algebra_json(a: &Algebra) -> Value {
    json!({
        "name": a.name,
        "type": a.datum.type_label,
        "lattice": a.datum.lattice_label,
        "labels": a.params.nodes,
        "d": a.d,
    })
}

fn plural(n: usize, word: &str) -> String {
    if n == 1 {
        format!("{n} {word}")
    } else {
        format!("{n} {word}s")
    }
}

fn bq_f64(x: &BQ) -> f64 {
    x.numer().to_f64().unwrap_or(f64::NAN) / x.denom().to_f64().unwrap_or(f64::NAN)
}

fn need_docs(command: &str, docs: &[NamedDocument], min: usize, max: usize) -> Result<()> {
    if docs.len() < min || docs.len() > max {
        let range = if min == max { min.to_string() } else { format!("{min} to {max}") };
        return Err(Error::Input(format!("`{command}` takes {range} input files, got {}", docs.len())));
    }
    Ok(())
}

/// Builds the transfer map described by the `[stm]` section of `src`, with
/// `tgt` as target algebra where the recipe needs one.
pub fn build_stm(src: &NamedDocument, tgt: Option<&NamedDocument>) -> Result<SpectralTransferMap> {
    let recipe = src
        .doc
        .stm
        .as_ref()
        .ok_or_else(|| Error::Input(format!("{} has no [stm] section", src.name)))?;
    let a = src.doc.algebra(&src.name)?;
    let target = || -> Result<Algebra> {
        match tgt {
            Some(t) => t.doc.algebra(&t.name),
            None => Ok(a.clone()),
        }
    };
    match recipe {
        Recipe::Identity => Ok(recipes::identity(&a)),
        Recipe::Weyl(word) => {
            if let Some(&bad) = word.iter().find(|&&s| s > a.rank()) {
                return Err(Error::Input(format!("no simple reflection s{bad} in rank {}", a.rank())));
            }
            let w: Vec<usize> = word.iter().map(|s| s - 1).collect();
            Ok(recipes::weyl(&a, a.weyl.from_word(&w)))
        }
        Recipe::Translation(i) => {
            let all = recipes::central_translations(&a)?;
            let n = all.len();
            all.into_iter()
                .nth(*i)
                .ok_or_else(|| Error::Input(format!("translation index {i} out of range (|Ω_X^*| = {n})")))
        }
        Recipe::Lattice => {
            let t = tgt.ok_or_else(|| Error::Input("recipe `lattice` needs a target file".into()))?;
            recipes::lattice_map(&a, &t.doc.algebra(&t.name)?)
        }
        Recipe::Eta(class) => recipes::eta(&a, class),
        Recipe::Rank0 { point, d0 } => {
            let pts = enumerate_residual_points(&a.mu, &a.weyl)?;
            let e = pts.get(*point).ok_or_else(|| {
                Error::Input(format!("residual point index {point} out of range ({} orbits)", pts.len()))
            })?;
            recipes::rank_zero(&a, &e.coset.base, d0)
        }
        Recipe::Explicit {
            matrix,
            torsion,
            gamma,
            coset,
        } => {
            let t = target()?;
            let base = TorusPoint::new(torsion.clone(), gamma.clone());
            let map = AffineTorusMap::new(base.clone(), matrix.clone(), a.rank());
            if matrix.len() != t.rank() || matrix.iter().any(|r| r.len() != a.rank()) {
                return Err(Error::Input(format!(
                    "matrix must be {} x {} (target rank x source rank)",
                    t.rank(),
                    a.rank()
                )));
            }
            let l = match coset {
                Some(u) => Coset::new(base, u.clone()),
                None => image_coset(&map, &Coset::whole(a.rank())),
            };
            Ok(SpectralTransferMap::new(&a, &t, l, map, "explicit"))
        }
    }
}

pub fn run(command: &str, docs: &[NamedDocument], opts: &Options) -> Result<Report> {
    match command {
        "residual-points" => residual_points(docs, opts),
        "residual-cosets" => residual_cosets(docs),
        "mu" => mu(docs),
        "fdeg" => fdeg(docs, opts),
        "spectral-diagram" | "arithmetic-diagram" => diagram(command, docs),
        "symmetries" => symmetries(docs),
        "verify-stm" => verify_stm(docs),
        "compose-stm" => compose_stm(docs),
        "search-rank0" => rank0(docs, opts),
        "check-order" => check_order(docs),
        "correspondence" => correspondence(docs),
        other => Err(Error::Input(format!("unknown command `{other}`"))),
    }
}

fn single(command: &str, docs: &[NamedDocument]) -> Result<Algebra> {
    need_docs(command, docs, 1, 1)?;
    docs[0].doc.algebra(&docs[0].name)
}

fn residual_points(docs: &[NamedDocument], opts: &Options) -> Result<Report> {
    let a = single("residual-points", docs)?;
    let pts = enumerate_residual_points(&a.mu, &a.weyl)?;
    let mut t = format!("{}\nresidual points: {}\n", header(&a), plural(pts.len(), "orbit"));
    let mut rows = vec![];
    for (i, e) in pts.iter().enumerate() {
        let _ = writeln!(t, "  [{i}] {}  orbit size {}", e.coset.base, e.orbit_size);
        let mut row = json!({"index": i, "point": e.coset.base, "orbit_size": e.orbit_size});
        if let Some(v0) = &opts.v0 {
            let z = e.coset.base.logs(bq_f64(v0));
            let order = a.mu.numeric_pole_order(&z, bq_f64(v0), 1e-9);
            if order != a.rank() as i64 {
                return Err(Error::Internal(format!(
                    "numeric pole order {order} at point [{i}] differs from the rank"
                )));
            }
            let _ = writeln!(t, "      numeric pole order at v0 = {v0}: {order}");
            row["numeric_pole_order"] = json!(order);
        }
        rows.push(row);
    }
    Ok(Report::new(
        "residual-points",
        t,
        json!({"algebra": algebra_json(&a), "orbits": rows}),
        false,
    ))
}

fn residual_cosets(docs: &[NamedDocument]) -> Result<Report> {
    let a = single("residual-cosets", docs)?;
    let cat = enumerate_residual_cosets(&a.mu, &a.weyl)?;
    let mut t = format!("{}\nresidual cosets: {}\n", header(&a), plural(cat.entries.len(), "orbit"));
    let mut rows = vec![];
    for (i, e) in cat.entries.iter().enumerate() {
        let _ = writeln!(
            t,
            "  [{i}] dim {}  {}  orbit size {}  |pole| - |zero| = {}",
            e.coset.dim(),
            e.coset.render(),
            e.orbit_size,
            e.report.lhs
        );
        rows.push(json!({
            "index": i,
            "dim": e.coset.dim(),
            "coset": e.coset,
            "orbit_size": e.orbit_size,
            "poles_minus_zeros": e.report.lhs,
        }));
    }
    Ok(Report::new(
        "residual-cosets",
        t,
        json!({"algebra": algebra_json(&a), "orbits": rows}),
        false,
    ))
}

fn mu(docs: &[NamedDocument]) -> Result<Report> {
    let a = single("mu", docs)?;
    let inv = a.mu.check_w_invariance(&a.weyl)?;
    let t = format!(
        "{}\nmu = {}\nW0-invariant: {}\n{}",
        header(&a),
        a.mu.render(),
        if inv { "yes" } else { "no" },
        a.mu.render_ledger()
    );
    Ok(Report::new(
        "mu",
        t,
        json!({"algebra": algebra_json(&a), "mu": a.mu.render(), "w_invariant": inv, "factors": a.mu.factors}),
        !inv,
    ))
}

fn sign_str(s: i64) -> &'static str {
    if s < 0 {
        "-1"
    } else {
        "+1"
    }
}

fn fdeg(docs: &[NamedDocument], opts: &Options) -> Result<Report> {
    let a = single("fdeg", docs)?;
    let pts = enumerate_residual_points(&a.mu, &a.weyl)?;
    let mut t = format!("{}\nformal degrees: {}\n", header(&a), plural(pts.len(), "orbit"));
    let mut rows = vec![];
    for (i, e) in pts.iter().enumerate() {
        let fd = formal_degree(&a.mu, &e.coset)?;
        let _ = writeln!(t, "  [{i}] {}", e.coset.base);
        let _ = writeln!(t, "      {}", fd.certificate);
        let _ = writeln!(
            t,
            "      sign {}, order {} at v = 1, f(1/v) = {}f(v), f(-v) = {}f(v)",
            sign_str(fd.sign),
            fd.order,
            if fd.inv_sign < 0 { "-" } else { "" },
            if fd.neg_sign < 0 { "-" } else { "" }
        );
        let _ = writeln!(t, "      = {}", fd.rational);
        let mut row = json!({"index": i, "point": e.coset.base, "formal_degree": fd});
        if let Some(v0) = &opts.v0 {
            let val = eval_formal_degree(&fd, v0)?;
            let _ = writeln!(t, "      at v0 = {v0}: {val}");
            row["value_at_v0"] = json!(val.to_string());
        }
        rows.push(row);
    }
    Ok(Report::new(
        "fdeg",
        t,
        json!({"algebra": algebra_json(&a), "points": rows}),
        false,
    ))
}

fn diagram(command: &str, docs: &[NamedDocument]) -> Result<Report> {
    let a = single(command, docs)?;
    let d = if command == "spectral-diagram" {
        spectral_diagram(&a.datum, &a.params)?
    } else {
        arithmetic_diagram(&a.datum, &a.params)?
    };
    let t = format!("{}\n{}", header(&a), d.render());
    Ok(Report::new(
        command,
        t,
        json!({"algebra": algebra_json(&a), "diagram": d}),
        false,
    ))
}

fn symmetries(docs: &[NamedDocument]) -> Result<Report> {
    let a = single("symmetries", docs)?;
    let mut t = format!("{}\n", header(&a));
    let mut body = json!({"algebra": algebra_json(&a)});
    match out_t_mu(&a.datum, &a.params) {
        Ok(g) => {
            let _ = writeln!(
                t,
                "Out_T(mu): order {} ({} translations, {} diagram automorphisms), fixes mu: {}",
                g.order,
                g.translations.len(),
                g.automorphisms.len(),
                if g.verified { "yes" } else { "no" }
            );
            for p in &g.translations {
                let _ = writeln!(t, "  translation {p}");
            }
            for m in &g.automorphisms {
                let _ = writeln!(t, "  automorphism {:?}", m.perm);
            }
            body["out_t_mu"] = json!(g);
        }
        Err(e) => {
            let _ = writeln!(t, "Out_T(mu): not computed ({e})");
        }
    }
    let classes = a.params.classes(&a.datum);
    let mut etas = vec![];
    for c in &classes {
        let e = spectral_isomorphism_eta(&a.datum, &a.params, c)?;
        let labels: Vec<String> = e.params.nodes.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let _ = writeln!(
            t,
            "eta[{}]: labels {}, map {}",
            c.join(","),
            labels.join(" "),
            if e.meets_finite { "identity".to_string() } else { format!("translation by {}", e.map.base) }
        );
        etas.push(json!({"class": c, "labels": e.params.nodes, "map_base": e.map.base}));
    }
    let orbit = eta_group_orbit(&a.datum, &a.params, &classes)?;
    let _ = writeln!(t, "orbit of the labels under the eta maps: {orbit}");
    body["eta"] = json!(etas);
    body["eta_orbit"] = json!(orbit);
    Ok(Report::new("symmetries", t, body, false))
}

fn t4_str(s: &T4Status) -> &'static str {
    match s {
        T4Status::NotRequired => "not required (semi-standard source)",
        T4Status::HeuristicPass => "passed on torsion and alcove-vertex test points (heuristic)",
        T4Status::Fail => "FAIL",
    }
}

fn describe(m: &SpectralTransferMap, r: &VerificationRecord) -> String {
    let ok = |b: bool| if b { "ok" } else { "FAIL" };
    let mut t = String::new();
    let _ = writeln!(t, "{}", r.summary());
    let _ = writeln!(t, "source: {}", header(&m.source));
    let _ = writeln!(t, "target: {}", header(&m.target));
    let _ = writeln!(t, "recipe: {}", m.recipe);
    let _ = writeln!(t, "image coset L: {}", m.coset.render());
    let _ = writeln!(t, "map: {}", m.map.render());
    let _ = writeln!(t, "T1 {}", ok(r.t1));
    let _ = writeln!(t, "T2 {}", ok(r.t2));
    match &r.a {
        Some(a) => {
            let _ = writeln!(t, "T3 ok, a = {a}");
        }
        None if r.t3_checked => {
            let _ = writeln!(t, "T3 FAIL");
        }
        None => {
            let _ = writeln!(t, "T3 not checked");
        }
    }
    let _ = writeln!(t, "T4 {}", t4_str(&r.t4));
    let n1 = m.dim_source();
    let _ = writeln!(
        t,
        "dim T1 = {n1} (rk = {} by dim T1 - 1, {n1} by the rank-0 convention), cork = {}",
        n1 as i64 - 1,
        m.cork()
    );
    for w in &r.witnesses {
        let _ = writeln!(t, "  {w}");
    }
    t
}

fn stm_json(m: &SpectralTransferMap, r: &VerificationRecord) -> Value {
    json!({
        "source": algebra_json(&m.source),
        "target": algebra_json(&m.target),
        "recipe": m.recipe,
        "coset": m.coset,
        "base": m.map.base,
        "matrix": m.map.lin.iter().map(|row| row.iter().map(|x| x.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "verification": r,
        "valid": r.valid(),
        "dim_source": m.dim_source(),
        "rk_literal": m.dim_source() as i64 - 1,
        "cork": m.cork(),
    })
}

fn verify_stm(docs: &[NamedDocument]) -> Result<Report> {
    need_docs("verify-stm", docs, 1, 2)?;
    let m = build_stm(&docs[0], docs.get(1))?;
    let r = m.verify()?;
    Ok(Report::new("verify-stm", describe(&m, &r), stm_json(&m, &r), !r.valid()))
}

fn compose_stm(docs: &[NamedDocument]) -> Result<Report> {
    need_docs("compose-stm", docs, 2, usize::MAX)?;
    let mut maps = vec![];
    for i in 0..docs.len() {
        if docs[i].doc.stm.is_none() && i + 1 == docs.len() {
            break;
        }
        maps.push(build_stm(&docs[i], docs.get(i + 1))?);
    }
    let mut t = String::new();
    for m in &maps {
        let r = m.verify()?;
        if !r.valid() {
            let text = format!("component {} is invalid\n{}", m.recipe, describe(m, &r));
            return Ok(Report::new("compose-stm", text, stm_json(m, &r), true));
        }
        let _ = writeln!(t, "{}: {}", m.recipe, r.summary());
    }
    let mut acc = maps[0].clone();
    for m in &maps[1..] {
        acc = acc.compose(m)?.0;
    }
    let r = acc.verify()?;
    t.push_str("composite: ");
    t.push_str(&describe(&acc, &r));
    Ok(Report::new("compose-stm", t, stm_json(&acc, &r), !r.valid()))
}

fn rank0(docs: &[NamedDocument], opts: &Options) -> Result<Report> {
    let a = single("search-rank0", docs)?;
    let d0 = opts
        .d0
        .as_ref()
        .ok_or_else(|| Error::Input("search-rank0 needs --d0".into()))?;
    let hits = search_rank0(&a, d0)?;
    let mut t = format!("{}\nd0 = {d0}\nrank-0 morphisms: {}\n", header(&a), hits.len());
    let mut rows = vec![];
    for h in &hits {
        let _ = writeln!(
            t,
            "  point [{}] {}  lambda = {}  a = {}",
            h.point_index,
            h.point,
            h.lambda,
            h.morphism.a()
        );
        rows.push(json!({
            "point_index": h.point_index,
            "point": h.point,
            "lambda": h.lambda.to_string(),
            "a": h.morphism.a().to_string(),
        }));
    }
    Ok(Report::new(
        "search-rank0",
        t,
        json!({"algebra": algebra_json(&a), "d0": d0, "morphisms": rows}),
        false,
    ))
}

fn check_order(docs: &[NamedDocument]) -> Result<Report> {
    need_docs("check-order", docs, 1, 2)?;
    let fwd = build_stm(&docs[0], docs.get(1))?;
    let bwd = match docs.get(1) {
        Some(d) if d.doc.stm.is_some() => Some(build_stm(d, Some(&docs[0]))?),
        _ => None,
    };
    let v = check_order_witness(&fwd, bwd.as_ref())?;
    let (line, refuted) = match &v {
        OrderVerdict::Lower => (format!("{} is lower than {}", fwd.source.name, fwd.target.name), false),
        OrderVerdict::Isogenous { coverings } => (
            format!(
                "{} and {} are spectrally isogenous{}",
                fwd.source.name,
                fwd.target.name,
                if *coverings { " (both witnesses are coverings)" } else { "" }
            ),
            false,
        ),
        OrderVerdict::Fail(msg) => (format!("fail: {msg}"), true),
    };
    Ok(Report::new("check-order", format!("{line}\n"), json!({"verdict": v}), refuted))
}

fn correspondence(docs: &[NamedDocument]) -> Result<Report> {
    need_docs("correspondence", docs, 1, 2)?;
    let m = build_stm(&docs[0], docs.get(1))?;
    let r = m.verify()?;
    if !r.valid() {
        return Ok(Report::new("correspondence", describe(&m, &r), stm_json(&m, &r), true));
    }
    let c = m.residual_correspondence()?;
    let mut t = format!(
        "{}\nresidual correspondence ({}):\n",
        r.summary(),
        plural(c.rows.len(), "source orbit")
    );
    for row in &c.rows {
        let _ = writeln!(
            t,
            "  [{}] {} -> [{}] {}  r'' = {}",
            row.source,
            c.source.entries[row.source].coset.render(),
            row.target,
            c.target.entries[row.target].coset.render(),
            row.ratio
        );
    }
    for (tgt, n) in &c.fibers {
        let _ = writeln!(t, "  fiber over [{tgt}]: {n}");
    }
    let mut body = stm_json(&m, &r);
    body["correspondence"] = json!(c.rows);
    let it = m.intertwiners()?;
    if m.dim_source() == 0 {
        let _ = writeln!(t, "stabilizer of the image point in W0: {} elements", it.stabilizer.len());
    } else {
        let pairs: Vec<String> = it
            .simple
            .iter()
            .map(|(s, w)| format!("s{} -> {:?}", s + 1, m.target.weyl.get(*w).word.iter().map(|x| x + 1).collect::<Vec<_>>()))
            .collect();
        let _ = writeln!(t, "intertwiners: {}", pairs.join(", "));
    }
    body["intertwiners"] = json!(it);
    if m.coset.dim() > 0 && m.cork() > 0 {
        match excellent_subset(&m.target, &m.coset) {
            Ok(ex) => {
                let _ = writeln!(
                    t,
                    "facet J = {{{}}}: {}",
                    ex.j.join(", "),
                    if ex.excellent { "excellent" } else { "not excellent" }
                );
                body["excellent"] = json!(ex);
            }
            Err(e) => {
                let _ = writeln!(t, "facet: not computed ({e})");
            }
        }
    }
    Ok(Report::new("correspondence", t, body, false))
}
