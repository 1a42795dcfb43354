mod common;

use common::{csv_bytes, run, stderr, stdout, Table};
use tempfile::TempDir;

fn out_arg(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).display().to_string()
}

#[test]
fn example2_discrete_converges() {
    let tmp = TempDir::new().unwrap();
    let out = out_arg(&tmp, "run");
    let res = run(&[
        "solve", "--problem", "example2", "--solver", "discrete", "--p", "0.2", "--q", "0.4", "--r", "0.5", "--x0",
        "random:7:1.0", "--max-iter", "1000000", "--target", "1e-3", "--out", &out,
    ]);
    assert_eq!(res.status.code(), Some(0), "{}", stderr(&res));
    let table = Table::read(&tmp.path().join("run/iterates.csv"));
    assert!(*table.column("res").last().unwrap() <= 1e-3);
    for f in ["manifest.txt", "run.log", "summary.csv"] {
        assert!(tmp.path().join("run").join(f).is_file(), "{f}");
    }
}

#[test]
fn invalid_schedule_is_a_config_error_naming_the_condition() {
    let tmp = TempDir::new().unwrap();
    let out = out_arg(&tmp, "run");
    let res = run(&[
        "solve", "--problem", "example2", "--solver", "discrete", "--p", "0.5", "--q", "0.6", "--r", "0.7", "--out", &out,
    ]);
    assert_eq!(res.status.code(), Some(1));
    assert!(stderr(&res).contains("p + r < 1"), "{}", stderr(&res));
    assert!(!tmp.path().join("run").exists(), "no artifacts on a config error");
}

#[test]
fn forced_invalid_schedule_runs_and_is_logged() {
    let tmp = TempDir::new().unwrap();
    let out = out_arg(&tmp, "run");
    let res = run(&[
        "solve", "--problem", "example2", "--solver", "discrete", "--p", "0.5", "--q", "0.6", "--r", "0.7",
        "--max-iter", "2000", "--force", "--out", &out,
    ]);
    assert!(matches!(res.status.code(), Some(0 | 2)), "{}", stderr(&res));
    let log = std::fs::read_to_string(tmp.path().join("run/run.log")).unwrap();
    assert!(log.contains("--force acknowledged"), "{log}");
}

#[test]
fn example1_matches_closed_form() {
    let tmp = TempDir::new().unwrap();
    let out = out_arg(&tmp, "run");
    let res = run(&[
        "solve", "--problem", "example1:m=3,N=5", "--solver", "continuous", "--p", "0.2", "--q", "0.4", "--t-end",
        "50", "--x0", "ones", "--out", &out,
    ]);
    assert_eq!(res.status.code(), Some(0), "{}", stderr(&res));
    let table = Table::read(&tmp.path().join("run/trajectory.csv"));
    assert_eq!(table.rows.len(), 501);
    let dev = common::closed_form_deviation(&table, 3, 0.2, 0.4, &[1.0; 5]);
    assert!(dev < 1e-6, "{dev:e}");
}

#[test]
fn unknown_problem_and_bad_values_exit_1() {
    let tmp = TempDir::new().unwrap();
    let out = out_arg(&tmp, "run");
    for args in [
        vec!["solve", "--problem", "example9", "--out", &out],
        vec!["solve", "--problem", "example2", "--t-end", "-1", "--out", &out],
        vec!["solve", "--problem", "example2", "--x0", "1,2", "--out", &out],
        vec!["solve", "--problem", "example2", "--solver", "newton", "--out", &out],
        vec!["check", "nonsense", "--out", &out],
        vec!["repro", "fig4", "--out", &out],
        vec!["solve", "--bogus-flag"],
    ] {
        let res = run(&args);
        assert_eq!(res.status.code(), Some(1), "{args:?}: {}", stderr(&res));
    }
}

#[test]
fn check_passes_on_catalog_problems() {
    let tmp = TempDir::new().unwrap();
    let out = out_arg(&tmp, "ex3");
    let res = run(&["check", "example3:n=10", "--samples", "10000", "--out", &out]);
    assert_eq!(res.status.code(), Some(0), "{}", stdout(&res));
    let table = std::fs::read_to_string(tmp.path().join("ex3/check.csv")).unwrap();
    let ratio: f64 = table
        .lines()
        .find(|l| l.starts_with("couple_min_ratio,"))
        .and_then(|l| l.split(',').nth(1))
        .unwrap()
        .parse()
        .unwrap();
    assert!(ratio.abs() <= 1e-12, "{ratio}");

    let out = out_arg(&tmp, "ex2");
    assert_eq!(run(&["check", "example2", "--out", &out]).status.code(), Some(0));
}

#[test]
fn anti_monotone_fixture_fails_check() {
    let tmp = TempDir::new().unwrap();
    let out = out_arg(&tmp, "anti");
    let res = run(&["check", "antimonotone", "--samples", "500", "--out", &out]);
    assert_eq!(res.status.code(), Some(2));
    let text = stdout(&res);
    assert!(text.contains("FAIL couple_min_ratio") && text.contains("-1e0"), "{text}");
}

#[test]
fn validate_schedule_exit_codes() {
    assert_eq!(run(&["validate-schedule", "--p", "0.2", "--q", "0.4"]).status.code(), Some(0));
    assert_eq!(run(&["validate-schedule", "--p", "0.4", "--q", "0.2"]).status.code(), Some(2));
    assert_eq!(run(&["validate-schedule", "--p", "0.2", "--q", "0.4", "--r", "0.5"]).status.code(), Some(0));
    let res = run(&["validate-schedule", "--p", "0.2", "--q", "0.5", "--r", "0.4"]);
    assert_eq!(res.status.code(), Some(2));
    assert!(stderr(&res).contains("[FAIL] mu_k*h_k -> 0"), "{}", stderr(&res));
}

#[test]
fn config_file_precedence_and_manifest_rerun() {
    let tmp = TempDir::new().unwrap();
    let config = tmp.path().join("run.conf");
    std::fs::write(
        &config,
        "# discrete run\nproblem = example3:n=5\nsolver = discrete\np = 0.3\nmax_iter = 5000\nx0 = random:3:0.5\n",
    )
    .unwrap();
    let first = out_arg(&tmp, "first");
    let res = run(&["solve", "--config", config.to_str().unwrap(), "--p", "0.2", "--out", &first]);
    assert!(matches!(res.status.code(), Some(0 | 2)), "{}", stderr(&res));
    let manifest = std::fs::read_to_string(tmp.path().join("first/manifest.txt")).unwrap();
    assert!(manifest.contains("p = 0.2\n"), "flag wins over file: {manifest}");
    assert!(manifest.contains("max_iter = 5000\n"), "file wins over default: {manifest}");
    assert!(manifest.contains("r = 0.5\n"), "default fills the rest: {manifest}");

    let second = out_arg(&tmp, "second");
    let manifest_path = tmp.path().join("first/manifest.txt");
    let again = run(&["rerun", manifest_path.to_str().unwrap(), "--out", &second]);
    assert_eq!(again.status.code(), res.status.code());
    assert_eq!(csv_bytes(&tmp.path().join("first")), csv_bytes(&tmp.path().join("second")));

    // The manifest also works as a config file for `solve`.
    let third = out_arg(&tmp, "third");
    run(&["solve", "--config", manifest_path.to_str().unwrap(), "--out", &third]);
    assert_eq!(csv_bytes(&tmp.path().join("first")), csv_bytes(&tmp.path().join("third")));
}

#[test]
fn output_directory_comes_from_the_environment() {
    let tmp = TempDir::new().unwrap();
    let res = common::gvi()
        .current_dir(tmp.path())
        .env("GVI_OUT_DIR", tmp.path().join("env-out"))
        .args(["check", "example1:m=3,N=5", "--samples", "200"])
        .output()
        .unwrap();
    assert_eq!(res.status.code(), Some(0), "{}", stderr(&res));
    assert!(tmp.path().join("env-out/check.csv").is_file());
}

#[test]
fn path_command_checks_bounds() {
    let tmp = TempDir::new().unwrap();
    let out = out_arg(&tmp, "path");
    let res = run(&["path", "--problem", "shifted", "--alphas", "1,0.3,0.1,0.03,0.01", "--out", &out]);
    assert_eq!(res.status.code(), Some(0), "{}", stderr(&res));
    let table = Table::read(&tmp.path().join("path/path.csv"));
    assert_eq!(table.rows.len(), 5);
    assert!(table.column("res").iter().all(|r| *r <= 1e-10));
}

#[test]
fn repro_presets_meet_their_targets() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().display().to_string();
    for fig in ["fig1", "fig2", "fig3"] {
        let res = run(&["repro", fig, "--out", &out]);
        assert_eq!(res.status.code(), Some(0), "{fig}: {}", stderr(&res));
    }

    let fig1 = Table::read(&tmp.path().join("fig1/example2_continuous/trajectory.csv"));
    let t = fig1.column("t");
    assert_eq!(*t.last().unwrap(), 200.0);
    assert!(*fig1.column("err").last().unwrap() <= 1e-3);

    let fig2 = std::fs::read_to_string(tmp.path().join("fig2/summary.csv")).unwrap();
    assert_eq!(fig2.lines().count(), 5);
    assert!(fig2.lines().skip(1).all(|l| l.contains(",true,")), "{fig2}");

    for n in [5, 10, 20] {
        let table = Table::read(&tmp.path().join(format!("fig3/example3_n{n}/trajectory.csv")));
        let err = table.column("err");
        let (first, last) = (err[0], *err.last().unwrap());
        assert!(last <= first * 1e-2, "n={n}: {first:e} -> {last:e}");
    }
    let plot = std::fs::read_to_string(tmp.path().join("fig3/plot_data.csv")).unwrap();
    assert!(plot.starts_with("curve,t,err\n"));
}
