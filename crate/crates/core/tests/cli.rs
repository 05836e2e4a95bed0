use std::path::Path;
use std::process::{Command, Output};

fn nkji(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nkji")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn header(o: &Output) -> (String, String) {
    let s = stdout(o);
    let mut lines = s.lines();
    (lines.next().unwrap().to_string(), lines.next().unwrap().to_string())
}

#[test]
fn audit_emits_json() {
    let o = nkji(&["audit"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["errata"].as_array().unwrap().len() > 2);
    assert!(v["condition_number"].as_f64().unwrap() < 1e12);
    for eq in ["is_curve", "okun", "phillips", "taylor", "saving_investment", "resource"] {
        assert_eq!(v["residuals"]["oracle"][eq]["pass"], true, "{eq}");
    }
    assert!(v["residuals"]["oracle"].get("budget").is_none());
}

#[test]
fn audit_stability_mode() {
    let o = nkji(&["audit", "--draws", "10", "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["stable"], true);
    assert_eq!(v["draws"], 10);
}

#[test]
fn nonstationary_override_exits_2() {
    let o = nkji(&["coeffs", "--param", "rho_chi=1.0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("NonStationary"));
    assert!(o.stdout.is_empty());
}

#[test]
fn balanced_budget_conflict_exits_2() {
    let o = nkji(&["simulate", "--budget", "balanced", "--param", "rho_g=0.8", "--param", "rho_tax=0.5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("rho_g == rho_tax"));
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["determinacy", "--n-pre", "12"][..],
        &["sweep", "--axis1", "alpha_pi:0:1:3", "--axis2", "alpha_y:0:1:3"],
        &["sweep", "--axis1", "alpha_pi:0:1", "--axis2", "alpha_y:0:1:3", "--n-pre", "1"],
        &["sweep", "--axis1", "nope:0:1:2", "--axis2", "alpha_y:0:1:3", "--n-pre", "1"],
        &["irf", "--shock", "nope"],
        &["coeffs", "--param", "nope=1"],
        &["coeffs", "--param", "sigma"],
        &["transparency", "--format", "csv"],
        &["simulate", "--T", "0"],
    ] {
        let o = nkji(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn help_lists_defaults() {
    let o = nkji(&["simulate", "--help"]);
    assert_eq!(o.status.code(), Some(0));
    let h = stdout(&o);
    for flag in ["--seed", "--T", "--burn", "--budget", "--calib", "--param", "--out", "--format"] {
        assert!(h.contains(flag), "{flag}");
    }
    assert!(h.contains("[default: 42]"));
}

#[test]
fn csv_headers_are_fixed() {
    let cases: [(&[&str], &str); 5] = [
        (&["coeffs", "--format", "csv"], "variable,index,regressor,value"),
        (
            &["shocks", "--T", "5"],
            "t,omega,eta,L,lambda,xi,v,sigma_cp,T_natu,Xi,chi,mu,ybar,g,tax,eps,ubar,Psi",
        ),
        (&["simulate", "--T", "5"], "t,r,y,yhat,pi,c,I,S,i,u,Ey,Eyhat,Epi,Eu,JI,chi,fe"),
        (&["irf", "--shock", "eta", "--H", "3"], "h,variable,response"),
        (
            &["sweep", "--axis1", "alpha_pi:1:2:2", "--axis2", "alpha_y:0:1:2", "--n-pre", "2"],
            "axis1,axis2,stable,unstable,borderline,verdict",
        ),
    ];
    for (args, want) in cases {
        let o = nkji(args);
        assert_eq!(o.status.code(), Some(0), "{args:?}");
        let (comment, head) = header(&o);
        assert_eq!(comment, format!("# nkji {} v1", args[0]));
        assert_eq!(head, want);
    }
}

#[test]
fn simulate_is_reproducible_and_round_trips() {
    let a = stdout(&nkji(&["simulate", "--seed", "9", "--T", "50"]));
    let b = stdout(&nkji(&["simulate", "--seed", "9", "--T", "50"]));
    assert_eq!(a, b);
    let c = stdout(&nkji(&["simulate", "--seed", "10", "--T", "50"]));
    assert_ne!(a, c);
    let row: Vec<&str> = a.lines().nth(2).unwrap().split(',').collect();
    for f in &row[1..] {
        let x: f64 = f.parse().unwrap();
        assert_eq!(format!("{x}"), *f);
    }
    // the last period has no realised forecast error
    assert!(a.lines().last().unwrap().ends_with(','));
}

#[test]
fn burn_in_shifts_the_path() {
    let full = stdout(&nkji(&["shocks", "--T", "30", "--seed", "4"]));
    let burned = stdout(&nkji(&["shocks", "--T", "20", "--burn", "10", "--seed", "4"]));
    let tail = |s: &str, skip: usize| -> Vec<String> {
        s.lines().skip(2 + skip).map(|l| l.split_once(',').unwrap().1.to_string()).collect()
    };
    assert_eq!(tail(&full, 10), tail(&burned, 0));
}

#[test]
fn transparent_signal_is_chi() {
    let s = stdout(&nkji(&["shocks", "--T", "20", "--transparent", "true"]));
    for line in s.lines().skip(2) {
        let f: Vec<&str> = line.split(',').collect();
        assert_eq!(f[10], f[17]);
    }
}

#[test]
fn calibration_file_then_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let calib = dir.path().join("calib.json");
    std::fs::write(&calib, r#"{"theta": 0.7, "rho_u": 0.5}"#).unwrap();
    let c = calib.to_str().unwrap();
    let v: serde_json::Value =
        serde_json::from_slice(&nkji(&["coeffs", "--calib", c, "--param", "rho_u=0.6"]).stdout).unwrap();
    assert_eq!(v["u"]["11"], 0.7);
    assert_eq!(v["u"]["12"], 0.6);
    std::fs::write(&calib, r#"{"thetta": 0.7}"#).unwrap();
    assert_eq!(nkji(&["coeffs", "--calib", c]).status.code(), Some(2));
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("d.json");
    let o = nkji(&["determinacy", "--n-pre", "3", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(Path::new(&out)).unwrap()).unwrap();
    assert_eq!(v["eigenvalues"].as_array().unwrap().len(), 9);
    assert_eq!(v["k"].as_array().unwrap().len(), 10);
    assert_eq!(v["verdicts"].as_object().unwrap().len(), 1);
    assert!(v["verdicts"]["3"].is_string());
}

#[test]
fn determinacy_reports_every_n_pre_by_default() {
    let v: serde_json::Value = serde_json::from_slice(&nkji(&["determinacy"]).stdout).unwrap();
    assert_eq!(v["verdicts"].as_object().unwrap().len(), 10);
}

#[test]
fn sweep_marks_invalid_cells() {
    let o = nkji(&["sweep", "--axis1", "rho_chi:0.5:1.5:3", "--axis2", "alpha_y:0:1:2", "--n-pre", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    let invalid: Vec<&str> = s.lines().filter(|l| l.ends_with(",invalid")).collect();
    assert_eq!(invalid.len(), 4, "{s}");
    assert!(invalid.iter().all(|l| l.contains(",,,")));
}

#[test]
fn sweep_is_identical_across_worker_counts() {
    let args = |w: &'static str| {
        ["sweep", "--axis1", "alpha_pi:0.5:2.5:21", "--axis2", "alpha_y:0:1:21", "--n-pre", "2", "--workers", w]
    };
    assert_eq!(nkji(&args("1")).stdout, nkji(&args("3")).stdout);
}

#[test]
fn oracle_solution_flag() {
    let t: serde_json::Value = serde_json::from_slice(&nkji(&["coeffs"]).stdout).unwrap();
    let o: serde_json::Value = serde_json::from_slice(&nkji(&["coeffs", "--solution", "oracle"]).stdout).unwrap();
    assert_ne!(t["r"]["1"], o["r"]["1"]);
    assert_eq!(t["u"]["11"], o["u"]["11"]);
}
