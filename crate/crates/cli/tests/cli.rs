use std::process::{Command, Output};

use serde_json::Value;

fn psflab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_psflab")).args(args).output().expect("binary runs")
}

fn lines(out: &Output) -> Vec<Value> {
    String::from_utf8(out.stdout.clone())
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).expect("each line is a JSON object"))
        .collect()
}

#[test]
fn theta_passes_with_exit_zero() {
    let out = psflab(&["theta", "--dim", "1", "--t", "1", "--tol", "1e-12"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = lines(&out);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0]["identity"], "theta");
    assert_eq!(rows[0]["passed"], true);
}

#[test]
fn corollary_passes() {
    let out = psflab(&["corollary35", "--tol", "1e-10"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = lines(&out);
    let rhs = rows[0]["rhs"][0].as_f64().unwrap();
    assert!((rhs - 4.15335).abs() < 5e-6);
}

#[test]
fn lp_report_emits_one_row_per_level() {
    let out = psflab(&["lp-report", "--dim", "1", "--jmax", "8"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = lines(&out);
    assert_eq!(rows.len(), 9);
    for (j, row) in rows.iter().enumerate() {
        assert_eq!(row["params"]["j"], j);
        assert_eq!(row["passed"], true);
    }
}

#[test]
fn usage_errors_exit_one() {
    for args in [
        vec!["bogus"],
        vec!["theta", "--nope"],
        vec!["heat", "--t", "-1"],
        vec!["theta", "--tol", "0"],
        vec!["bessel", "--alpha", "-0.5"],
        vec!["affine", "--matrix", "1,2;2,4"],
        vec!["lp-report", "--points", "8"],
        vec!["theta", "--threads", "0"],
    ] {
        let out = psflab(&args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
        assert!(!out.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn help_exits_zero() {
    assert_eq!(psflab(&["--help"]).status.code(), Some(0));
    assert_eq!(psflab(&["theta", "--help"]).status.code(), Some(0));
}

#[test]
fn failed_verification_exits_two() {
    // A shell cap far too small for either side of a slowly decaying pair.
    let out = psflab(&["poisson", "--t", "0.01", "--x", "0.3", "--max-shell", "2", "--tol", "1e-14"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(lines(&out)[0]["passed"], false);
}

#[test]
fn output_is_byte_identical_across_runs_and_thread_counts() {
    let args = ["poisson", "--dim", "1,2", "--t", "0.5,1,2", "--x", "0,0.3", "--tol", "1e-10"];
    let a = psflab(&args);
    let b = psflab(&args);
    assert_eq!(a.stdout, b.stdout);
    let mut one = args.to_vec();
    one.extend(["--threads", "1"]);
    let c = psflab(&one);
    assert_eq!(a.stdout, c.stdout);
    let d = Command::new(env!("CARGO_BIN_EXE_psflab")).args(args).env("PSFLAB_THREADS", "3").output().unwrap();
    assert_eq!(a.stdout, d.stdout);
}

#[test]
fn rows_follow_input_order() {
    let out = psflab(&["heat", "--t", "2,0.5,1", "--x", "0.1,0.2"]);
    let rows = lines(&out);
    let got: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| (r["params"]["t"].as_f64().unwrap(), r["params"]["x"].as_f64().unwrap()))
        .collect();
    assert_eq!(got, vec![(2.0, 0.1), (2.0, 0.2), (0.5, 0.1), (0.5, 0.2), (1.0, 0.1), (1.0, 0.2)]);
}

#[test]
fn json_field_order_is_fixed() {
    let out = psflab(&["theta"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let keys = [
        "\"identity\"",
        "\"params\"",
        "\"lhs\"",
        "\"rhs\"",
        "\"abs_discrepancy\"",
        "\"lhs_tail\"",
        "\"rhs_tail\"",
        "\"shells_used\"",
        "\"chosen_side\"",
        "\"passed\"",
        "\"wall_time_ms\"",
        "\"engine_version\"",
    ];
    let positions: Vec<usize> = keys.iter().map(|k| text.find(k).unwrap_or_else(|| panic!("{k} missing"))).collect();
    assert!(positions.windows(2).all(|w| w[0] < w[1]), "{text}");
    assert!(text.contains("\"wall_time_ms\":null"));
}

#[test]
fn timing_is_opt_in() {
    let out = psflab(&["theta", "--timing"]);
    let rows = lines(&out);
    assert!(rows[0]["wall_time_ms"].as_f64().unwrap() >= 0.0);
}

#[test]
fn csv_has_header_and_rows() {
    let out = psflab(&["theta", "--dim", "1,2", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut it = text.lines();
    assert_eq!(
        it.next().unwrap(),
        "identity,params,lhs_re,lhs_im,rhs_re,rhs_im,abs_discrepancy,lhs_tail,rhs_tail,\
         shells_lhs,shells_rhs,chosen_side,passed,wall_time_ms,engine_version"
    );
    let rows: Vec<&str> = it.collect();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r.starts_with("theta,") && r.split(',').count() == 15));
}

#[test]
fn json_flag_conflicts_with_csv() {
    assert_eq!(psflab(&["theta", "--json"]).status.code(), Some(0));
    assert_eq!(psflab(&["theta", "--json", "--format", "csv"]).status.code(), Some(1));
}

#[test]
fn quiet_silences_summary() {
    let loud = psflab(&["theta"]);
    let quiet = psflab(&["theta", "--quiet"]);
    assert!(!loud.stderr.is_empty());
    assert!(quiet.stderr.is_empty());
    assert_eq!(loud.stdout, quiet.stdout);
}

#[test]
fn seed_moves_the_lp_grid() {
    let a = lines(&psflab(&["lp-report", "--jmax", "4", "--seed", "0"]));
    let b = lines(&psflab(&["lp-report", "--jmax", "4", "--seed", "5"]));
    let c = lines(&psflab(&["lp-report", "--jmax", "4", "--seed", "5"]));
    assert_eq!(b, c);
    assert!(a.iter().zip(&b).any(|(x, y)| x["lhs"] != y["lhs"]));
}

#[test]
fn every_subcommand_runs() {
    for args in [
        vec!["heat", "--t", "0.01", "--x", "0.5"],
        vec!["poisson", "--dim", "2", "--t", "1"],
        vec!["bessel", "--alpha", "-4", "--x", "0.5"],
        vec!["bessel", "--alpha", "-1.5", "--mode", "weak", "--width", "1", "--tol", "1e-10"],
        vec!["psf", "--battery", "--x", "0,3.14159"],
        vec!["symbol", "--width", "0.5", "--x", "1"],
        vec!["weak", "--dim", "2", "--battery"],
        vec!["diffeo", "--amp", "0.1", "--multiplier", "one,gaussian"],
        vec!["affine", "--matrix", "2,0;0,0.5", "--offset", "0.25,-0.1", "--shift", "0.3"],
    ] {
        let out = psflab(&args);
        assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(lines(&out).iter().all(|r| r["passed"] == true), "{args:?}");
    }
}
