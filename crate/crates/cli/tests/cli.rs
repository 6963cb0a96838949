use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use matderiv::hermitian_eig;
use matderiv_cli::sampling::{hermitian_matrix, seeded};
use matderiv_cli::CSV_HEADER;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_matderiv")).args(args).output().expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("matderiv-cli-tests-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn write(path: &Path, text: &str) -> String {
    std::fs::write(path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn csv_header_and_success() {
    for cmd in ["fig1-real", "fig1-complex", "fig2", "density-demo"] {
        let out = bin(&[cmd, "--deterministic"]);
        assert_eq!(out.status.code(), Some(0), "{cmd}: {}", String::from_utf8_lossy(&out.stderr));
        let text = String::from_utf8(out.stdout).unwrap();
        assert_eq!(text.lines().next(), Some(CSV_HEADER), "{cmd}");
    }
}

#[test]
fn equal_seeds_give_identical_bytes() {
    for cmd in ["fig1-complex", "fig2", "density-demo"] {
        let a = bin(&[cmd, "--seed", "7", "--deterministic"]).stdout;
        let b = bin(&[cmd, "--seed", "7", "--deterministic"]).stdout;
        assert!(!a.is_empty());
        assert_eq!(a, b, "{cmd}");
        let c = bin(&[cmd, "--seed", "8", "--deterministic"]).stdout;
        assert_ne!(a, c, "{cmd}");
    }
}

#[test]
fn output_file_matches_stdout() {
    let path = scratch("fig2.csv");
    let out = bin(&["fig2", "--deterministic", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), bin(&["fig2", "--deterministic"]).stdout);
}

#[test]
fn records_sorted_by_method_then_decreasing_step() {
    let text = String::from_utf8(bin(&["fig2", "--deterministic", "--points", "5"]).stdout).unwrap();
    let rows: Vec<(String, f64)> = text
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[1].to_string(), f[0].parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 20);
    assert!(rows.windows(2).all(|w| w[0].0 < w[1].0 || (w[0].0 == w[1].0 && w[0].1 > w[1].1)));
}

#[test]
fn config_errors_exit_1() {
    assert_eq!(bin(&["fig2", "--points", "1"]).status.code(), Some(1));
    assert_eq!(bin(&["fig1-real", "--h-max", "1e-9", "--h-min", "1e-3"]).status.code(), Some(1));
    assert_eq!(bin(&["no-such-command"]).status.code(), Some(1));
    let base = write(&scratch("base1.txt"), "1 1\n1 0\n");
    let missing = scratch("absent.txt");
    let out = bin(&[
        "custom",
        "--function",
        "exp",
        "--route",
        "blocktri",
        "--alpha",
        "1",
        "--base",
        missing.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let out = bin(&["custom", "--function", "tanh", "--route", "blocktri", "--alpha", "1", "--base", &base]);
    assert_eq!(out.status.code(), Some(1));
    let bad = write(&scratch("bad.txt"), "2 2\n1 0 2\n");
    let out = bin(&["custom", "--function", "exp", "--route", "blocktri", "--alpha", "1", "--base", &bad]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn near_degenerate_mu_exits_2() {
    let mut rng = seeded(3);
    let h = hermitian_matrix(&mut rng, 6);
    let lambda = hermitian_eig(&h).unwrap().lambda;
    let mu = format!("{:e}", lambda[2] + 1e-12);
    let out = bin(&["density-demo", "--seed", "3", "--mu", &mu]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("chemical potential"));
}

#[test]
fn custom_identity_returns_jet_term() {
    let base = write(&scratch("id_base.txt"), "2 2\n1 0 2 0\n0 0 3 1\n");
    let term = write(&scratch("id_term.txt"), "2 2\n0.5 -1 0 0\n7 0 0.25 0.125\n");
    let out_path = scratch("id_out.txt");
    let out = bin(&[
        "custom",
        "--function",
        "identity",
        "--route",
        "blocktri",
        "--alpha",
        "0,1",
        "--base",
        &base,
        "--term",
        &format!("0,1={term}"),
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let got = matderiv::textio::from_text(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    let want = matderiv::textio::from_text(&std::fs::read_to_string(&term).unwrap()).unwrap();
    assert_eq!(got, want);
}

#[test]
fn custom_comparison_table() {
    let base = write(&scratch("cmp_base.txt"), "2 2\n1 0 0.5 0\n0.5 0 -1 0\n");
    let e = write(&scratch("cmp_e.txt"), "2 2\n0 0 1 0\n1 0 0 0\n");
    let csv = scratch("cmp.csv");
    let out = bin(&[
        "custom",
        "--function",
        "cos",
        "--route",
        "blocktri,dk,cs,fd",
        "--alpha",
        "1",
        "--base",
        &base,
        "--term",
        &format!("1={e}"),
        "--csv",
        csv.to_str().unwrap(),
        "--deterministic",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(CSV_HEADER));
    let rows: Vec<Vec<String>> = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    assert_eq!(rows.iter().map(|r| r[1].as_str()).collect::<Vec<_>>(), ["blocktri", "dk", "cs", "fd"]);
    for r in &rows {
        let err: f64 = r[2].parse().unwrap();
        assert!(err <= 1e-9, "{r:?}");
    }
}

#[test]
fn custom_route_preconditions_exit_2() {
    let base = write(&scratch("nh_base.txt"), "2 2\n1 0 2 0\n0 0 1 0\n");
    let e = write(&scratch("nh_e.txt"), "2 2\n0 0 1 0\n1 0 0 0\n");
    let term = format!("1={e}");
    let dk = bin(&["custom", "--function", "exp", "--route", "dk", "--alpha", "1", "--base", &base, "--term", &term]);
    assert_eq!(dk.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&dk.stderr).contains("not Hermitian"));
    let hybrid =
        bin(&["custom", "--function", "exp", "--route", "hybrid", "--alpha", "1", "--base", &base, "--term", &term]);
    assert_eq!(hybrid.status.code(), Some(2));
}
