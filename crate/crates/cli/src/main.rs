use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use oversample::colloc::{make_grid, quadrature_error_report, GridKind};
use oversample::geometry::Point;
use oversample::harness::{self, study, ExperimentConfig, Format};
use oversample::oracle::{exact_error_coeffs, exact_error_coeffs_continuous, ModelProblem};
use oversample::par::{init_threads, Execution};
use oversample::spectral::FourierVector;
use oversample::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Thread-count variable; unset means one thread.
const THREADS_VAR: &str = "OVERSAMPLE_THREADS";

#[derive(Parser)]
#[command(name = "oversample", version, about = "Oversampled collocation for 2D boundary integral equations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a convergence study from a TOML config.
    Study {
        config: PathBuf,
        /// CSV output; overrides the config.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// JSON output; overrides the config.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Print log-log slope fits for every curve.
        #[arg(long)]
        fit: bool,
    },
    /// Exact error table of the model problem on the refined grid.
    Oracle {
        #[arg(long, default_value_t = 1)]
        degree: usize,
        #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
        two_alpha: f64,
        #[arg(long, default_value_t = 16)]
        n: usize,
        /// Points per mesh cell; 0 gives the continuous limit.
        #[arg(long, default_value_t = 2)]
        j: usize,
        /// Density coefficients (1 + |m|)^(-decay).
        #[arg(long, default_value_t = 4.0)]
        decay: f64,
        /// Band of the density.
        #[arg(long, default_value_t = 2048)]
        band: usize,
        /// Sobolev orders of the reported error norms.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_values_t = vec![-1.0, -4.0])]
        s: Vec<f64>,
        /// Emit JSON instead of a table.
        #[arg(long)]
        json: bool,
    },
    /// Empirical quadrature error E_{r,s} of a collocation grid.
    Quad {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, value_enum, default_value_t = Placement::Equispaced)]
        placement: Placement,
        /// Offset in mesh cells for the offset placement.
        #[arg(long, default_value_t = 0.5)]
        delta: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        r: f64,
        #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
        s: f64,
        /// Number of random probe functions.
        #[arg(long, default_value_t = 12)]
        probes: usize,
        /// Band of the probes as a multiple of M.
        #[arg(long, default_value_t = 2)]
        probe_band: usize,
    },
    /// Field of every case of a config at a point, next to the exact value.
    Field {
        config: PathBuf,
        x: f64,
        #[arg(allow_hyphen_values = true)]
        y: f64,
        /// Mesh size; defaults to the largest in the config.
        #[arg(long)]
        n: Option<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Placement {
    Equispaced,
    Offset,
    Random,
}

fn threads() -> Result<usize, String> {
    match std::env::var(THREADS_VAR) {
        Ok(v) => v.trim().parse::<usize>().ok().filter(|&t| t > 0).ok_or(format!("{THREADS_VAR}={v} is not a positive integer")),
        Err(_) => Ok(1),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = threads().and_then(|t| {
        init_threads(t);
        run(cli.command, Execution::from_threads(t))
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}

fn run(command: Command, exec: Execution) -> Result<(), String> {
    match command {
        Command::Study { config, csv, json, fit } => run_study(&config, csv, json, fit, exec),
        Command::Oracle { degree, two_alpha, n, j, decay, band, s, json } => {
            run_oracle(degree, two_alpha, n, j, decay, band, &s, json)
        }
        Command::Quad { n, m, placement, delta, seed, r, s, probes, probe_band } => {
            let kind = match placement {
                Placement::Equispaced => GridKind::Equispaced { m, shift: 0.0 },
                Placement::Offset => GridKind::Offset { n, m, delta },
                Placement::Random => GridKind::Random { m, seed },
            };
            let grid = make_grid(kind, 1).map_err(|e| e.to_string())?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let band = probe_band * m;
            let probes: Vec<FourierVector> = (0..probes)
                .map(|_| {
                    let coeffs: Vec<Complex64> = (0..2 * band + 1)
                        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                        .collect();
                    FourierVector::from_coeffs(coeffs)
                })
                .collect();
            let report = quadrature_error_report(&grid, &probes, r, s);
            println!("points {}", grid.len());
            println!("max_spacing {:e}", grid.max_spacing());
            println!("spacing_diagnostic {:e}", harness::spacing_diagnostic(&grid, n));
            println!("E_rs {:e}", report.e_rs);
            println!("worst_pair {} {}", report.worst_pair.0, report.worst_pair.1);
            Ok(())
        }
        Command::Field { config, x, y, n } => {
            let cfg = ExperimentConfig::from_file(&config).map_err(|e| e.to_string())?;
            let n = n.unwrap_or(*cfg.basis.n.last().expect("validated"));
            let problem = study::Problem::new(&cfg).map_err(|e| e.to_string())?;
            let point = Point::new(x, y);
            println!("case,N,M,seed,field_re,field_im,exact_re,exact_im,error");
            for case in &cfg.cases {
                let seeds: Vec<Option<u64>> = match case.grid.as_ref().map(|g| &g.placement) {
                    Some(harness::Placement::Random { seeds }) => seeds.iter().map(|s| Some(*s)).collect(),
                    _ => vec![None],
                };
                for seed in seeds {
                    let seed_text = seed.map(|s| s.to_string()).unwrap_or_default();
                    match study::solve_case(&problem, &cfg, case, n, seed, exec)
                        .and_then(|sol| study::field_values(&problem, &sol, &point).map(|v| (sol.m, v)))
                    {
                        Ok((m, (v, e))) => println!(
                            "{},{n},{m},{seed_text},{:e},{:e},{:e},{:e},{:e}",
                            case.label(),
                            v.re,
                            v.im,
                            e.re,
                            e.im,
                            (v - e).norm()
                        ),
                        Err(err) => eprintln!("{}: {err}", case.label()),
                    }
                }
            }
            Ok(())
        }
    }
}

fn run_study(
    config: &Path,
    csv: Option<PathBuf>,
    json: Option<PathBuf>,
    fit: bool,
    exec: Execution,
) -> Result<(), String> {
    let cfg = ExperimentConfig::from_file(config).map_err(|e| e.to_string())?;
    let records = harness::run_study(&cfg, exec).map_err(|e| e.to_string())?;
    let csv = csv.or_else(|| cfg.output.csv.as_ref().map(PathBuf::from));
    let json = json.or_else(|| cfg.output.json.as_ref().map(PathBuf::from));
    if csv.is_none() && json.is_none() {
        print!("{}", harness::to_csv(&records));
    }
    if let Some(path) = &csv {
        harness::emit(path, Format::Csv, &cfg, &records).map_err(|e| e.to_string())?;
        eprintln!("wrote {}", path.display());
    }
    if let Some(path) = &json {
        harness::emit(path, Format::Json, &cfg, &records).map_err(|e| e.to_string())?;
        eprintln!("wrote {}", path.display());
    }
    if fit {
        let mut curves: Vec<(String, String, String, Option<u64>)> = Vec::new();
        for r in &records {
            let key = (r.method.clone(), r.metric.clone(), r.s_or_point.clone(), r.seed);
            if !curves.contains(&key) {
                curves.push(key);
            }
        }
        for (method, metric, param, seed) in curves {
            let sel = harness::select(&records, &method, &metric, &param, seed);
            let seed_text = seed.map(|s| format!(" seed {s}")).unwrap_or_default();
            match harness::fit_records(&sel) {
                Ok(f) => println!("{method} {metric}({param}){seed_text}: slope {:.3} r2 {:.4}", f.slope, f.r_squared),
                Err(e) => println!("{method} {metric}({param}){seed_text}: {e}"),
            }
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn run_oracle(
    degree: usize,
    two_alpha: f64,
    n: usize,
    j: usize,
    decay: f64,
    band: usize,
    orders: &[f64],
    json: bool,
) -> Result<(), String> {
    let u = FourierVector::from_fn(band, |m| Complex64::new((1.0 + m.abs() as f64).powf(-decay), 0.0));
    let exact = if j == 0 {
        if !(degree as f64 > two_alpha) {
            return Err(format!("consistency requires d > 2α (d = {degree}, 2α = {two_alpha})"));
        }
        exact_error_coeffs_continuous(degree, two_alpha, n, &u)
    } else {
        let problem = ModelProblem::new(degree, two_alpha, n, j, u.clone()).map_err(|e| e.to_string())?;
        exact_error_coeffs(&problem)
    };
    if json {
        println!("{}", serde_json::to_string_pretty(&exact).map_err(|e| e.to_string())?);
        return Ok(());
    }
    println!("mu,error_re,error_im,leading_re,leading_im,remainder_re,remainder_im,D,E");
    for c in &exact.coeffs {
        println!(
            "{},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e}",
            c.mu, c.error.re, c.error.im, c.leading.re, c.leading.im, c.remainder.re, c.remainder.im, c.d, c.e
        );
    }
    for &s in orders {
        println!("# H^{s} norm of u_N - u: {:e}", exact.full_norm(&u, s));
    }
    Ok(())
}
