use clap::Parser;
use residua::cli::{exit_code, run, InputDocument, NamedDocument, Options, COMMANDS};
use residua::exactscalars::normalizing::parse_rational;
use residua::exactscalars::NormalizingElement;
use std::path::PathBuf;
use std::process::ExitCode;

/// Residual cosets, formal degrees, diagrams and spectral transfer maps of
/// normalized affine Hecke algebras.
#[derive(Parser, Debug)]
#[command(name = "residua", version)]
struct Args {
    /// Command to run.
    #[arg(value_parser = clap::builder::PossibleValuesParser::new(COMMANDS))]
    command: String,

    /// Input documents; transfer-map commands read the target algebra from
    /// the next file.
    #[arg(required = true)]
    files: Vec<PathBuf>,

    /// Emit JSON instead of text.
    #[arg(long)]
    json: bool,

    /// Rational evaluation point for numeric cross-checks.
    #[arg(long, value_parser = parse_v0)]
    v0: Option<String>,

    /// Source normalization for search-rank0, e.g. "(v-v^-1) * [2]^-1".
    #[arg(long)]
    d0: Option<String>,
}

fn parse_v0(s: &str) -> Result<String, String> {
    match parse_rational(s) {
        Some(x) if x > num_traits::Zero::zero() => Ok(s.to_string()),
        _ => Err(format!("`{s}` is not a positive rational")),
    }
}

fn load(path: &PathBuf) -> residua::Result<NamedDocument> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| residua::Error::Input(format!("{}: {e}", path.display())))?;
    let doc = InputDocument::parse(&text).map_err(|e| residua::Error::Input(format!("{}: {e}", path.display())))?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "input".into());
    Ok(NamedDocument { name, doc })
}

fn main() -> ExitCode {
    let args = Args::parse();
    let result = (|| {
        let docs = args.files.iter().map(load).collect::<residua::Result<Vec<_>>>()?;
        let opts = Options {
            v0: args.v0.as_deref().and_then(parse_rational),
            d0: args.d0.as_deref().map(NormalizingElement::parse).transpose()?,
        };
        run(&args.command, &docs, &opts)
    })();
    let code = exit_code(&result);
    match result {
        Ok(rep) => {
            if args.json {
                println!("{}", serde_json::to_string_pretty(&rep.json).expect("reports serialize"));
            } else {
                print!("{}", rep.text);
            }
        }
        Err(e) => eprintln!("error: {e}"),
    }
    ExitCode::from(code as u8)
}
