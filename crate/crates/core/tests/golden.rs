//! Byte-exact regression tests of the command-line reports.  Set
//! `RESIDUA_BLESS=1` to rewrite the expected files.

use std::path::Path;
use std::process::Command;

const CASES: &[(&str, &[&str])] = &[
    ("fdeg_a1", &["fdeg", "data/a1.ini", "--v0", "2"]),
    ("points_a1_zero", &["residual-points", "data/a1_zero.ini"]),
    ("points_a1_v0", &["residual-points", "data/a1.ini", "--v0", "3/2"]),
    ("cosets_g2", &["residual-cosets", "data/g2.ini"]),
    ("mu_a1", &["mu", "data/a1.ini"]),
    ("spectral_b2", &["spectral-diagram", "data/b2_unequal.ini"]),
    ("arithmetic_b2", &["arithmetic-diagram", "data/b2_unequal.ini"]),
    ("symmetries_a1_weight", &["symmetries", "data/a1_weight.ini"]),
    ("symmetries_b2", &["symmetries", "data/b2_unequal.ini"]),
    ("verify_d_to_c", &["verify-stm", "data/cd/D_sc.ini", "data/cd/C_sc.ini"]),
    ("verify_eta", &["verify-stm", "data/b2_unequal.ini"]),
    ("verify_half_map", &["verify-stm", "tests/inputs/half_map.ini"]),
    (
        "compose_cd",
        &["compose-stm", "data/cd/D_ad.ini", "data/cd/B_ad.ini", "data/cd/C1.ini", "data/cd/C_sc.ini"],
    ),
    ("rank0_a1", &["search-rank0", "data/a1.ini", "--d0", "(v-v^-1) * [2]^-1"]),
    ("rank0_a1_none", &["search-rank0", "data/a1.ini", "--d0", "1"]),
    ("order_rank0", &["check-order", "data/a1_rank0.ini"]),
    ("correspondence_rank0", &["correspondence", "data/a1_rank0.ini"]),
    ("fdeg_a1_json", &["fdeg", "data/a1.ini", "--json"]),
    ("verify_json", &["verify-stm", "data/cd/D_sc.ini", "data/cd/C_sc.ini", "--json"]),
    ("bad_syntax", &["mu", "tests/inputs/bad_syntax.ini"]),
];

fn run(args: &[&str]) -> String {
    let out = Command::new(env!("CARGO_BIN_EXE_residua"))
        .args(args)
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .output()
        .expect("binary runs");
    format!(
        "{}{}exit {}\n",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr),
        out.status.code().unwrap_or(-1)
    )
}

#[test]
fn golden_reports() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let bless = std::env::var_os("RESIDUA_BLESS").is_some();
    let mut failures = vec![];
    for (name, args) in CASES {
        let got = run(args);
        let path = dir.join(format!("{name}.txt"));
        if bless {
            std::fs::write(&path, &got).unwrap();
            continue;
        }
        let want = std::fs::read_to_string(&path).unwrap_or_default();
        if got != want {
            failures.push(format!("{name}:\n--- expected\n{want}--- got\n{got}"));
        }
    }
    assert!(failures.is_empty(), "{}", failures.join("\n"));
}

#[test]
fn reports_are_stable() {
    let args = ["residual-cosets", "data/g2.ini", "--json"];
    assert_eq!(run(&args), run(&args));
}

#[test]
fn exit_codes() {
    assert!(run(&["fdeg", "data/a1.ini"]).ends_with("exit 0\n"));
    assert!(run(&["verify-stm", "tests/inputs/half_map.ini"]).ends_with("exit 2\n"));
    assert!(run(&["mu", "tests/inputs/bad_syntax.ini"]).ends_with("exit 1\n"));
    assert!(run(&["verify-stm", "data/cd/D_sc.ini"]).ends_with("exit 1\n"));
}

#[test]
fn documented_examples() {
    assert!(run(&["fdeg", "data/a1.ini"]).contains("(v-v^-1) * [2]^-1"));
    assert!(run(&["residual-points", "data/a1_zero.ini"]).contains("0 orbits"));
    assert!(run(&["verify-stm", "data/cd/D_sc.ini", "data/cd/C_sc.ini"]).starts_with("VALID, a = 1\n"));
}
