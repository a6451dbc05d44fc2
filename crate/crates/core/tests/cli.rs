use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use vanishdamp::cli::{run_to_dir, Criterion, Group, RunConfig, RunStatus, Suite, Tolerances, OUT_ENV};

fn bin(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vanishdamp")).args(args).env(OUT_ENV, out).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn default_config_exits_zero_with_three_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "run.toml", "");
    let out = tmp.path().join("out");
    let o = bin(&["simulate", &cfg], &out);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let mut names: Vec<String> = fs::read_dir(&out).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    names.sort();
    assert_eq!(names, ["report.toml", "summary.csv", "trajectory.csv"]);
}

#[test]
fn alpha_out_of_range_is_rejected_with_key() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "run.toml", "[schedule]\nalpha = 1.2\n");
    let o = bin(&["simulate", &cfg], &tmp.path().join("out"));
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("schedule.alpha") && err.contains("line 2"), "{err}");
    assert!(!tmp.path().join("out").exists());
}

#[test]
fn excluded_weight_exponent_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "run.toml", "[accumulators]\nenergy_exponents = [0.5, -1.0]\n");
    let o = bin(&["simulate", &cfg], &tmp.path().join("out"));
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("r = -1") && err.contains("weighted-energy exponents"), "{err}");
}

#[test]
fn oversized_step_without_guard_exits_three() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "run.toml",
        "[problem]\nid = \"dirichlet-wave-20\"\n[integrator]\nh = 0.1\nt_end = 50.0\nenforce_step_bound = false\n",
    );
    let out = tmp.path().join("out");
    let o = bin(&["simulate", &cfg], &out);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stdout));
    let summary = fs::read_to_string(out.join("summary.csv")).unwrap();
    assert!(summary.contains("non-finite"), "{summary}");
}

#[test]
fn guarded_oversized_step_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "run.toml", "[problem]\nid = \"dirichlet-wave-20\"\n[integrator]\nh = 0.1\n");
    let o = bin(&["simulate", &cfg], &tmp.path().join("out"));
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("h_max"));
}

#[test]
fn failed_assertion_exits_two() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "run.toml", "[checks]\ntol_e = 0.0\n");
    let out = tmp.path().join("out");
    let o = bin(&["simulate", &cfg], &out);
    assert_eq!(o.status.code(), Some(2));
    let report = fs::read_to_string(out.join("report.toml")).unwrap();
    assert!(report.contains("assertion-failed:dissipation"), "{report}");
}

#[test]
fn svg_is_emitted_on_request() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = RunConfig::default();
    cfg.output.emit_svg = true;
    let outcome = run_to_dir(&cfg, tmp.path()).unwrap();
    assert_eq!(outcome.status, RunStatus::Ok);
    assert_eq!(outcome.files.len(), 4);
    let svg = fs::read_to_string(tmp.path().join("decay.svg")).unwrap();
    assert!(svg.contains("slope -1") && svg.contains("slope -(1+0.4)"));
}

#[test]
fn identical_configs_give_byte_identical_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = RunConfig::default();
    cfg.problem.id = "semilinear-wave-20".into();
    cfg.integrator.h = 5e-3;
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    run_to_dir(&cfg, &a).unwrap();
    run_to_dir(&cfg, &b).unwrap();
    for f in ["trajectory.csv", "summary.csv", "report.toml"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn rates_subcommand_reads_a_trajectory() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "run.toml", "[problem]\nid = \"kernel-quartic\"\n[integrator]\nh = 0.005\nt_end = 1000.0\n");
    let out = tmp.path().join("out");
    assert_eq!(bin(&["simulate", &cfg], &out).status.code(), Some(0));
    let csv = out.join("trajectory.csv");
    let o = bin(&["rates", csv.to_str().unwrap(), "--probe", "1", "--probe", "1.4"], &out);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("fitted_exponent=") && text.contains("tail s=1.4"), "{text}");
    let o = bin(&["rates", tmp.path().join("missing.csv").to_str().unwrap()], &out);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn verify_only_integrator_passes() {
    let tmp = tempfile::tempdir().unwrap();
    let o = bin(&["verify", "--only", "integrator"], tmp.path());
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8_lossy(&o.stdout);
    assert_eq!(text.lines().filter(|l| l.starts_with("criterion=")).count(), 1);
    assert!(text.contains("criterion=1 group=integrator name=integrator-order status=PASS"), "{text}");
    assert_eq!(bin(&["verify", "--only", "everything"], tmp.path()).status.code(), Some(1));
}

#[test]
fn group_filter_selects_rate_criteria() {
    let ids: Vec<u8> = Suite::selected(Some(Group::Rates)).iter().map(|c| c.id).collect();
    assert_eq!(ids, [4, 5]);
    assert_eq!(Suite::selected(None).len(), 11);
    assert_eq!("rates".parse::<Group>().unwrap(), Group::Rates);
    assert_eq!(Criterion::by_id(9).unwrap().group, Group::Anchor);
}

#[test]
fn tampered_dissipation_tolerance_fails() {
    let tol = Tolerances::default();
    let tampered = Tolerances { dissipation: tol.dissipation * 1e-6, ..tol };
    let report = Suite::new(tampered).run(Some(Group::Dissipation));
    let r2 = report.results.iter().find(|r| r.criterion.id == 2).unwrap();
    assert!(!r2.pass, "{r2}");
    assert_eq!(report.exit_code(), 1);
    assert!(report.to_string().contains("criterion=2 group=dissipation name=dissipation-identity status=FAIL"));
}
