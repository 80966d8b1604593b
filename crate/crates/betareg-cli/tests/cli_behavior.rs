//! Exit-code contracts and end-to-end behavior of the command-line surface.

use std::path::PathBuf;
use std::process::Command;

fn cli() -> Command {
    Command::new(env!("CARGO_BIN_EXE_betareg"))
}

fn write_temp(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join("betareg_cli_tests");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn toy_csv() -> PathBuf {
    write_temp(
        "toy.csv",
        "y,a,b\n25,1.2,0.5\n40,0.3,1.8\n33,2.2,0.9\n61,0.5,0.1\n52,1.1,0.3\n47,0.8,1.1\n\
         58,0.2,0.7\n36,1.9,1.4\n29,2.5,0.2\n44,0.9,0.8\n55,0.4,1.6\n38,1.4,0.6\n",
    )
}

#[test]
fn fit_succeeds_on_valid_input() {
    let input = toy_csv();
    let out = std::env::temp_dir().join("betareg_cli_tests/fit_ok");
    let status = cli()
        .args([
            "fit",
            "--input",
            input.to_str().unwrap(),
            "--response",
            "y",
            "--predictors",
            "a,b",
            "--scale",
            "percent",
            "--method",
            "ml",
            "--out",
            out.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    for file in ["estimates.csv", "estimates.txt", "fit_summary.csv", "run_manifest.txt"] {
        assert!(out.join(file).exists(), "missing {file}");
    }
}

#[test]
fn missing_column_exits_2() {
    let input = toy_csv();
    let status = cli()
        .args([
            "fit",
            "--input",
            input.to_str().unwrap(),
            "--response",
            "y",
            "--predictors",
            "nope",
            "--out",
            "/tmp/betareg_cli_tests/none",
        ])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn boundary_response_exits_2() {
    let input = write_temp("zero.csv", "y,a\n0.5,1\n0.0,2\n0.7,3\n0.6,4\n0.2,5\n0.4,6\n");
    let status = cli()
        .args([
            "fit",
            "--input",
            input.to_str().unwrap(),
            "--response",
            "y",
            "--predictors",
            "a",
            "--out",
            "/tmp/betareg_cli_tests/none2",
        ])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn bad_flag_value_exits_2() {
    let input = toy_csv();
    let status = cli()
        .args([
            "fit",
            "--input",
            input.to_str().unwrap(),
            "--response",
            "y",
            "--predictors",
            "a,b",
            "--scale",
            "percent",
            "--method",
            "ridge",
            "--ridge-k",
            "-3.0",
            "--out",
            "/tmp/betareg_cli_tests/none3",
        ])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn simulate_emits_plot_data_per_grid_point() {
    let out = std::env::temp_dir().join("betareg_cli_tests/sim_small");
    let _ = std::fs::remove_dir_all(&out);
    let status = cli()
        .args([
            "simulate",
            "--n",
            "25",
            "--p-slopes",
            "3",
            "--zero-tail",
            "0",
            "--phi",
            "5",
            "--rho-grid",
            "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9",
            "--reps",
            "5",
            "--estimators",
            "ml,ridge_med",
            "--seed",
            "11",
            "--out",
            out.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let plot = std::fs::read_to_string(out.join("plot_data.csv")).unwrap();
    // header + 9 grid points x 2 estimators
    assert_eq!(plot.lines().count(), 1 + 18);
    let sim = std::fs::read_to_string(out.join("simulation.csv")).unwrap();
    // header + 9 points x 2 estimators x 4 coefficients
    assert_eq!(sim.lines().count(), 1 + 72);
}

#[test]
fn diagnose_writes_all_tables() {
    let input = toy_csv();
    let out = std::env::temp_dir().join("betareg_cli_tests/diag");
    let status = cli()
        .args([
            "diagnose",
            "--input",
            input.to_str().unwrap(),
            "--response",
            "y",
            "--predictors",
            "a,b",
            "--scale",
            "percent",
            "--out",
            out.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    for file in ["condition.csv", "correlations.csv", "ks_tests.csv", "run_manifest.txt"] {
        assert!(out.join(file).exists(), "missing {file}");
    }
}

// Boston-gated checks beyond the acceptance criteria: full coefficient
// agreement with the reference application fit and the loose cross-validated
// penalty scale. Skipped silently when the data file is absent.

fn boston_path() -> Option<PathBuf> {
    if let Ok(path) = std::env::var("BETAREG_BOSTON_CSV") {
        let p = PathBuf::from(path);
        if p.exists() {
            return Some(p);
        }
    }
    let workspace = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/boston.csv");
    workspace.exists().then_some(workspace)
}

#[test]
fn boston_ml_coefficients_match_reference_fit() {
    let Some(path) = boston_path() else {
        println!("SKIP: boston csv not found");
        return;
    };
    use betareg::*;
    let predictors: Vec<String> = "crim,zn,indus,nox,rm,age,dis,tax,ptratio,black,medv"
        .split(',')
        .map(|s| s.into())
        .collect();
    let (ds, _) = load_csv(&path, "lstat", &predictors, ResponseScale::Percent).unwrap();
    let fit = fit_estimator(&ds, &EstimatorSpec::Ml, &FitOptions::default()).unwrap();
    let reference = [
        0.21254, -0.00089, -3.397e-6, 0.00315, -0.31534, -0.20249, 0.00706, -0.02188, 0.00017,
        -0.01651, -0.00017, -0.04293,
    ];
    for (j, wanted) in reference.iter().enumerate() {
        let got = fit.coef.beta[j];
        assert!(
            (got - wanted).abs() < 5e-5 + 1e-3 * wanted.abs(),
            "{}: {got:+.6} vs reference {wanted:+.6}",
            ds.predictor_names()[j]
        );
    }
}

#[test]
fn boston_extreme_correlation_is_nox_dis() {
    let Some(path) = boston_path() else {
        println!("SKIP: boston csv not found");
        return;
    };
    use betareg::*;
    let predictors: Vec<String> = "crim,zn,indus,nox,rm,age,dis,tax,ptratio,black,medv"
        .split(',')
        .map(|s| s.into())
        .collect();
    let (ds, _) = load_csv(&path, "lstat", &predictors, ResponseScale::Percent).unwrap();
    let scan = correlation_scan(&ds).unwrap();
    let (a, b, r) = scan.extreme_pair;
    assert_eq!(scan.names[a], "nox");
    assert_eq!(scan.names[b], "dis");
    assert!((r - (-0.77)).abs() < 0.01, "correlation {r:.4}");
}

#[test]
fn boston_cv_penalty_is_near_the_reference_scale() {
    let Some(path) = boston_path() else {
        println!("SKIP: boston csv not found");
        return;
    };
    use betareg::*;
    let predictors: Vec<String> = "crim,zn,indus,nox,rm,age,dis,tax,ptratio,black,medv"
        .split(',')
        .map(|s| s.into())
        .collect();
    let (ds, _) = load_csv(&path, "lstat", &predictors, ResponseScale::Percent).unwrap();
    let (std_ds, _) = standardize(&ds).unwrap();
    // the reference scale for the cross-validated penalty is 0.04; under the
    // plain loss-minimizing rule the choice must land within one decade
    let cfg = LassoConfig {
        cv_rule: CvRule::Min,
        ..LassoConfig::default()
    };
    let sel = select_lasso_k_cv(&std_ds, &cfg).unwrap();
    assert!(
        sel.k >= 0.004 && sel.k <= 0.4,
        "cv-min penalty {:.4} outside [0.004, 0.4]",
        sel.k
    );
}
