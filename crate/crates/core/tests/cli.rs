mod common;

use std::path::Path;
use std::process::Command;

use broadcast_tensor::btf;
use broadcast_tensor::decomposition::{reconstruct, BdFactors};
use broadcast_tensor::lstsq::ls_solve_general;
use common::*;

fn cli(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_broadcast-tensor")).args(args).output().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn ls_solve_writes_closed_form_solution() {
    let dir = tempfile::tempdir().unwrap();
    let mut r = rng(51);
    let x = randn(&[3, 4, 5], &mut r);
    let h = randn(&[1, 4, 5], &mut r);
    let (xp, hp, out) = (dir.path().join("x.btf"), dir.path().join("h.btf"), dir.path().join("w.btf"));
    btf::write(&x, &xp).unwrap();
    btf::write(&h, &hp).unwrap();
    let o = cli(&["ls-solve", "--observed", path(&xp), "--known", path(&hp), "--unknown-shape", "3,4,1", "--out", path(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let w = btf::read(&out).unwrap();
    assert_eq!(w, ls_solve_general(&x, &h, &shape(&[3, 4, 1])).unwrap());
}

#[test]
fn ls_solve_reports_errors() {
    let dir = tempfile::tempdir().unwrap();
    let xp = dir.path().join("x.btf");
    btf::write(&broadcast_tensor::DenseTensor::ones(shape(&[2, 2])), &xp).unwrap();
    let o = cli(&["ls-solve", "--observed", path(&xp), "--known", path(&xp), "--unknown-shape", "3,3", "--out", "w.btf"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
}

#[test]
fn decompose_writes_factors_and_trace() {
    let dir = tempfile::tempdir().unwrap();
    let mut r = rng(52);
    let y = reconstruct(&BdFactors::random([4, 5, 3], &mut r).unwrap());
    let input = dir.path().join("y.btf");
    btf::write(&y, &input).unwrap();
    let prefix = dir.path().join("out/fit");
    let o = cli(&["decompose", "--input", path(&input), "--model", "sum-bd", "--R", "2", "--seed", "3", "--max-iters", "20", "--tol", "1e-12", "--out-prefix", path(&prefix)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for name in ["A1", "B1", "C1", "A2", "B2", "C2"] {
        assert!(dir.path().join(format!("out/fit_{name}.btf")).exists(), "{name}");
    }
    let trace = std::fs::read_to_string(dir.path().join("out/fit_trace.csv")).unwrap();
    let mut lines = trace.lines();
    assert_eq!(lines.next(), Some("iter,objective"));
    let objectives: Vec<f64> = lines.map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert!(objectives.len() >= 2 && objectives.len() <= 21);
    assert!(objectives.windows(2).all(|w| w[1] <= w[0] + 1e-10));
}

#[test]
fn baseline_writes_factors() {
    let dir = tempfile::tempdir().unwrap();
    let mut r = rng(53);
    let input = dir.path().join("y.btf");
    btf::write(&randn(&[4, 5, 3], &mut r), &input).unwrap();
    let cp = dir.path().join("cp");
    let o = cli(&["baseline", "--method", "cp", "--input", path(&input), "--rank", "2", "--seed", "1", "--out-prefix", path(&cp)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(btf::read(dir.path().join("cp_U2.btf")).unwrap().dims(), &[5, 2]);

    let tk = dir.path().join("tk");
    let o = cli(&["baseline", "--method", "tucker", "--input", path(&input), "--rank", "2,3,1", "--out-prefix", path(&tk)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(btf::read(dir.path().join("tk_G.btf")).unwrap().dims(), &[2, 3, 1]);
    assert!(dir.path().join("tk_trace.csv").exists());
}

#[test]
fn experiment_flags_and_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = cli(&["experiment", "--dims", "6,6,6", "--sigma", "0.05", "--seeds", "0,1", "--bd-R", "1", "--cp-R", "1,2", "--tucker-r", "2", "--max-iters", "30", "--out", path(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out.join("report.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 2 * 4);
    assert!(out.join("factors").read_dir().unwrap().count() > 0);

    // the effective configuration written next to the report reproduces it
    let again = dir.path().join("again");
    let cfg = out.join("config.toml");
    let o = cli(&["experiment", "--config", path(&cfg), "--out", path(&again)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(csv, std::fs::read_to_string(again.join("report.csv")).unwrap());
}
