//! End-to-end behavior of the binary: flag handling, output layout,
//! provenance comments, significant digits, exit codes, and the failure
//! diagnostics. Physics-level claims live in the acceptance suite.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lifetime-fisher"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

fn tmp_path(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("lifetime-fisher-test-{}-{name}", std::process::id()));
    p
}

#[test]
fn purity_stdout_layout() {
    let out = run(&["purity", "--sigma-tau-bar", "0,0.25"]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# tool = lifetime-fisher "));
    assert!(lines.iter().any(|l| l.starts_with("# numerics:")));
    assert!(lines.iter().any(|l| l.starts_with("# spectral:")));
    let header_idx = lines.iter().position(|l| !l.starts_with('#')).unwrap();
    assert_eq!(lines[header_idx], "sigma_tau_bar,purity");
    assert_eq!(lines[header_idx + 1], "0.00000000000e0,1.00000000000e0");
    // 12 significant digits in scientific notation
    let second = lines[header_idx + 2];
    assert!(second.starts_with("2.50000000000e-1,9.05"), "row was {second}");
}

#[test]
fn purity_rejects_bad_grid() {
    let out = run(&["purity", "--sigma-tau-bar", "0.1:0.01:5:log"]);
    assert!(!out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("start < stop"), "stderr was {err}");
}

#[test]
fn fi_curves_writes_file_with_one_row_per_grid_point() {
    let path = tmp_path("fi.csv");
    let out = run(&[
        "fi-curves",
        "--epsilon-grid",
        "1.1,1.3",
        "--sigma-tau-bar",
        "0.1,0.25",
        "--nmax",
        "60",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).ok();
    let data_rows: Vec<&str> = text
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("epsilon"))
        .collect();
    assert_eq!(data_rows.len(), 4);
    // deterministic order: sigma-major, epsilon-minor
    assert!(data_rows[0].starts_with("1.10000000000e0,1.00000000000e-1"));
    assert!(data_rows[1].starts_with("1.30000000000e0,1.00000000000e-1"));
    assert!(data_rows[2].starts_with("1.10000000000e0,2.50000000000e-1"));
    assert!(text.contains("# numerics: n_max=60 "));
    assert!(text.lines().any(|l| l == "epsilon,sigma_tau_bar,qfi_max,qfi,cfi_tcspc,cfi_wl"));
}

#[test]
fn fi_curves_drops_unconverged_linewidth_and_exits_nonzero() {
    let path = tmp_path("fi-trunc.csv");
    let out = run(&[
        "fi-curves",
        "--epsilon-grid",
        "1.2",
        "--sigma-tau-bar",
        "0.1,3",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(
        err.contains("sigma_tau_bar = 3") && err.contains("trace deficit"),
        "stderr was {err}"
    );
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).ok();
    // the convergent linewidth is still delivered
    let data_rows = text
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("epsilon"))
        .count();
    assert_eq!(data_rows, 1);
}

#[test]
fn fi_curves_json_document() {
    let out = run(&[
        "fi-curves",
        "--epsilon-grid",
        "1.2",
        "--sigma-tau-bar",
        "0.1",
        "--nmax",
        "60",
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(doc["columns"][0], "epsilon");
    assert_eq!(doc["rows"].as_array().unwrap().len(), 1);
    assert_eq!(doc["rows"][0].as_array().unwrap().len(), 6);
    let provenance = doc["provenance"].as_array().unwrap();
    assert!(provenance[0].as_str().unwrap().starts_with("tool = lifetime-fisher"));
}

#[test]
fn borderline_requires_design_eps() {
    let out = run(&["borderline", "--epsilon-grid", "1.2"]);
    assert!(!out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("--design-eps"), "stderr was {err}");
}

#[test]
fn borderline_rejects_multiple_linewidths() {
    let out = run(&[
        "borderline",
        "--design-eps",
        "1.2",
        "--sigma-tau-bar",
        "0.1,0.25",
    ]);
    assert!(!out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("single --sigma-tau-bar"), "stderr was {err}");
}

#[test]
fn hom_emits_verdict_comment() {
    let out = run(&["hom", "--epsilon-grid", "1.5,2", "--p", "0.8", "--xi", "0.4"]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    assert!(text.lines().any(|l| l == "epsilon,overlap,p_coincidence,hom_cfi,info_fraction"));
    assert!(
        text.ends_with("# scheme_compare: p = 0.8, xi = 0.4 -> Tie\n"),
        "tail was {:?}",
        text.lines().last()
    );
}

#[test]
fn hom_rejects_out_of_range_loss() {
    let out = run(&["hom", "--epsilon-grid", "1.5", "--p", "1.4"]);
    assert!(!out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("[0, 1]"), "stderr was {err}");
}
