use std::process::{Command, Output};

const CONFIG: &str = r#"
name = "cli"
geometry = { kind = "circle" }
operator = { kind = "helmholtz_single_layer", wavenumber = 2.0 }
basis = { degree = 1, n = [8, 12, 16] }
data = { kind = "circle_bessel" }
metrics = [{ kind = "sobolev", s = -1.0 }, { kind = "field_point", point = [2.0, 0.0] }]
[[cases]]
method = { kind = "least_squares" }
grid = { rule = "linear", value = 4, placement = { kind = "equispaced" } }
"#;

fn run(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_oversample"));
    cmd.args(args);
    match threads {
        Some(t) => cmd.env("OVERSAMPLE_THREADS", t),
        None => cmd.env_remove("OVERSAMPLE_THREADS"),
    };
    cmd.output().unwrap()
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn study_prints_csv_and_writes_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cli.toml");
    std::fs::write(&cfg, CONFIG).unwrap();
    let printed = stdout(&run(&["study", cfg.to_str().unwrap()], None));
    assert!(printed.starts_with("method,N,M,metric,s_or_point,error,cond,seed,wall_ms\n"));
    assert_eq!(printed.lines().count(), 1 + 3 * 2);

    let csv = dir.path().join("out.csv");
    let json = dir.path().join("out.json");
    let fits = stdout(&run(
        &["study", cfg.to_str().unwrap(), "--csv", csv.to_str().unwrap(), "--json", json.to_str().unwrap(), "--fit"],
        Some("2"),
    ));
    assert_eq!(std::fs::read_to_string(&csv).unwrap(), printed);
    assert!(std::fs::read_to_string(&json).unwrap().contains("\"records\""));
    assert!(fits.contains("least_squares sobolev(-1): slope"));
}

#[test]
fn oracle_table() {
    let out = stdout(&run(&["oracle", "--n", "8", "--j", "2", "--band", "512"], None));
    let rows: Vec<&str> = out.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "mu,error_re,error_im,leading_re,leading_im,remainder_re,remainder_im,D,E");
    assert_eq!(rows.len(), 1 + 8);
    assert!(out.contains("# H^-1 norm"));
    let json = stdout(&run(&["oracle", "--n", "8", "--j", "0", "--json"], None));
    assert!(json.contains("\"coeffs\""));
}

#[test]
fn quad_report() {
    let out = stdout(&run(&["quad", "--n", "8", "--m", "32", "--placement", "offset", "--delta", "0.25"], None));
    assert!(out.contains("points 32"));
    assert!(out.contains("E_rs "));
}

#[test]
fn field_reports_every_case() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cli.toml");
    std::fs::write(&cfg, CONFIG).unwrap();
    let out = stdout(&run(&["field", cfg.to_str().unwrap(), "0", "-2.5", "--n", "12"], None));
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[1].starts_with("least_squares,12,48,"));
}

#[test]
fn errors_exit_non_zero() {
    assert!(!run(&["study", "/nonexistent.toml"], None).status.success());
    assert!(!run(&["oracle", "--degree", "1", "--two-alpha", "2"], None).status.success());
    let out = run(&["oracle"], Some("zero"));
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("OVERSAMPLE_THREADS"));
}
