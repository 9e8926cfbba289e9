//! WebAssembly bindings used by the static page in `www/`.
//!
//! Every entry point takes input documents in the same INI format as the
//! command-line tool and returns the plain-text report.  Errors come back
//! as strings so the page can show them inline.

use residua::cli::{run, InputDocument, NamedDocument, Options};
use residua::exactscalars::normalizing::parse_rational;
use wasm_bindgen::prelude::*;

fn document(name: &str, text: &str) -> Result<NamedDocument, String> {
    let doc = InputDocument::parse(text).map_err(|e| format!("{name}: {e}"))?;
    Ok(NamedDocument {
        name: name.to_string(),
        doc,
    })
}

fn report(command: &str, docs: &[NamedDocument], opts: &Options) -> Result<String, String> {
    run(command, docs, opts).map(|r| r.text).map_err(|e| e.to_string())
}

/// Residual points with their formal degrees; `v0` (a positive rational,
/// possibly empty) adds numeric values.
#[wasm_bindgen]
pub fn formal_degrees(input: &str, v0: &str) -> Result<String, String> {
    let v0 = v0.trim();
    let v0 = if v0.is_empty() {
        None
    } else {
        Some(parse_rational(v0).ok_or_else(|| format!("`{v0}` is not a rational number"))?)
    };
    report("fdeg", &[document("H", input)?], &Options { v0, d0: None })
}

/// Residual cosets up to `W₀` with their spectral diagram.
#[wasm_bindgen]
pub fn spectral_diagram(input: &str) -> Result<String, String> {
    report("spectral-diagram", &[document("H", input)?], &Options::default())
}

/// Builds the transfer map described by the `[stm]` section of `source`
/// and checks it against `target`.
#[wasm_bindgen]
pub fn verify_stm(source: &str, target: &str) -> Result<String, String> {
    let docs = [document("H1", source)?, document("H2", target)?];
    report("verify-stm", &docs, &Options::default())
}
