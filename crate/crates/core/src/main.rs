use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use fracdiff::elliptic::{assemble_operator, eigendecompose};
use fracdiff::forward::{solve_homogeneous_l1, SpectralSolver};
use fracdiff::harness::{self, BandCheck, ExperimentConfig, FieldMetadata, GFamily, SweepReport};
use fracdiff::norms::{hrs_norm_q, RegularityIndex};
use fracdiff::special::{mittag_leffler, MlParams};
use fracdiff::transposition::{weak_solution_closed_form, weak_solution_riesz};
use fracdiff::{Coefficients, Error, Result, SpatialGrid, TimeGrid};

#[derive(Parser)]
#[command(name = "fraclab", version, about = "Time-fractional diffusion with rough Dirichlet data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Experiment configuration (key = value file).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (overrides `out` in the config).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Base seed (overrides `seed` in the config).
    #[arg(long)]
    seed: Option<u64>,
}

impl Common {
    fn load(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(p) => ExperimentConfig::from_file(p)?,
            None => ExperimentConfig::default(),
        };
        if let Some(o) = &self.out {
            cfg.out = o.clone();
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        Ok(cfg)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Spectral,
    L1,
}

#[derive(Clone, Copy, ValueEnum)]
enum Construction {
    Closed,
    Riesz,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate E_{α,β}(z) for z ≤ 0.
    MlEval {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        beta: f64,
        #[arg(long, allow_hyphen_values = true)]
        z: f64,
    },
    /// Residuals of the fractional-operator identities (CSV on stdout).
    VerifyFracops {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        n: usize,
    },
    /// Transposition identity over random smooth (g, f) pairs.
    VerifyDuality(Common),
    /// Homogeneous problem with a seeded smooth source.
    Solve {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "spectral")]
        method: Method,
    },
    /// Transposition solution for one boundary-data realization.
    SolveTransposition {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        g_family: Option<String>,
        #[arg(long, value_enum, default_value = "closed")]
        construction: Construction,
    },
    /// H^{r,s}(Q) norm of a field CSV (x,t,value).
    Norm {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        r: f64,
        #[arg(long)]
        s: f64,
    },
    /// ‖u‖_{H^{1/2,α/4}(Q)} / ‖g‖_{L²(Σ)} band.
    SweepRegularity(Common),
    /// ‖u‖_{L²(Q)} / ‖g‖_{H^{-1/2,-α/4}(Σ)} band.
    CheckNegative(Common),
    /// Maximal-regularity surrogate band.
    CheckMaxreg(Common),
    /// Growth of the D(A^{1/2}) norm with the number of modes.
    Sharpness(Common),
    /// Distance to the heat equation as α → 1.
    ClassicalLimit(Common),
}

enum Outcome {
    Done,
    Bands(Vec<BandCheck>),
}

fn first_level(cfg: &ExperimentConfig) -> (f64, harness::Level) {
    let levels = cfg.levels();
    (cfg.alphas[0], *levels.last().expect("validated config has a level"))
}

fn finish(report: SweepReport, cfg: &ExperimentConfig, checks: Vec<BandCheck>) -> Result<Outcome> {
    report.write(&cfg.out)?;
    print!("{}", report.summary_csv());
    for c in &checks {
        println!("{} {}: {:e} (limit {:e})", if c.pass { "PASS" } else { "FAIL" }, c.name, c.value, c.limit);
    }
    let json = serde_json::to_string_pretty(&checks).map_err(|e| Error::Io(e.to_string()))?;
    std::fs::write(cfg.out.join(format!("{}_bands.json", report.kind)), json + "\n")?;
    Ok(Outcome::Bands(checks))
}

fn run(cmd: Command) -> Result<Outcome> {
    match cmd {
        Command::MlEval { alpha, beta, z } => {
            let v = mittag_leffler(MlParams::new(alpha, beta)?, z)?;
            println!("{v:.11e}");
            Ok(Outcome::Done)
        }
        Command::VerifyFracops { alpha, n } => {
            println!("test_name,n,residual");
            for (name, n, r) in harness::fracops_identity_residuals(alpha, n)? {
                println!("{name},{n},{r:e}");
            }
            Ok(Outcome::Done)
        }
        Command::VerifyDuality(c) => {
            let cfg = c.load()?;
            let report = harness::run_duality_verification(&cfg);
            let checks = harness::residual_bands(&report, 1e-3);
            finish(report, &cfg, checks)
        }
        Command::Solve { common, method } => {
            let cfg = common.load()?;
            let (alpha, lv) = first_level(&cfg);
            let sgrid = SpatialGrid::new(cfg.length, lv.m)?;
            let tgrid = TimeGrid::new(cfg.horizon, lv.n)?;
            let coeffs = Coefficients::by_name(&cfg.coefficients, &sgrid)?;
            let op = assemble_operator(&coeffs, &sgrid)?;
            let f = harness::smooth_source(sgrid, tgrid, cfg.seed);
            let (u, name, modes, tail) = match method {
                Method::Spectral => {
                    let basis = eigendecompose(&op, &coeffs, lv.k)?;
                    let s = SpectralSolver::new(alpha, basis, tgrid)?.solve_forward(&f)?;
                    (s.field, "spectral", lv.k, s.tail_fraction)
                }
                Method::L1 => (solve_homogeneous_l1(&f, alpha, &op)?, "l1", 0, 0.0),
            };
            let meta = FieldMetadata {
                method: name.into(),
                alpha,
                length: cfg.length,
                cells: lv.m,
                horizon: cfg.horizon,
                steps: lv.n,
                modes,
                coefficients: coeffs.profile().to_string(),
                seed: cfg.seed,
                tail_fraction: tail,
            };
            harness::write_field(&cfg.out, "solution", &u, &meta)?;
            println!("{:e}", u.l2_norm());
            Ok(Outcome::Done)
        }
        Command::SolveTransposition { common, g_family, construction } => {
            let mut cfg = common.load()?;
            if let Some(f) = g_family {
                cfg.g_family = f.parse::<GFamily>()?;
            }
            let (alpha, lv) = first_level(&cfg);
            let ctx = harness::LevelContext::build(&cfg, alpha, cfg.levels().len() - 1, lv)?;
            let g = ctx.boundary(cfg.g_family, cfg.seed);
            let (u, name, tail) = match construction {
                Construction::Closed => {
                    let s = weak_solution_closed_form(&g, &ctx.solver)?;
                    (s.field, "transposition-closed", s.tail_fraction)
                }
                Construction::Riesz => (weak_solution_riesz(&g, &ctx.solver, lv.p)?, "transposition-riesz", f64::NAN),
            };
            let meta = FieldMetadata {
                method: name.into(),
                alpha,
                length: cfg.length,
                cells: lv.m,
                horizon: cfg.horizon,
                steps: lv.n,
                modes: lv.k,
                coefficients: ctx.coeffs.profile().to_string(),
                seed: cfg.seed,
                tail_fraction: tail,
            };
            harness::write_field(&cfg.out, "transposition", &u, &meta)?;
            let hrs = hrs_norm_q(&u, RegularityIndex::new(0.5, alpha / 4.0)?)?;
            println!("g_norm,u_l2,u_hrs");
            println!("{:e},{:e},{:e}", g.l2_norm(), u.l2_norm(), hrs);
            Ok(Outcome::Done)
        }
        Command::Norm { input, r, s } => {
            let u = harness::read_field_csv(&input)?;
            println!("{:.11e}", hrs_norm_q(&u, RegularityIndex::new(r, s)?)?);
            Ok(Outcome::Done)
        }
        Command::SweepRegularity(c) => {
            let cfg = c.load()?;
            let report = harness::run_regularity_sweep(&cfg);
            let checks = harness::ratio_band(&report, 3.0);
            finish(report, &cfg, checks)
        }
        Command::CheckNegative(c) => {
            let cfg = c.load()?;
            let report = harness::run_negative_data_check(&cfg);
            let checks = harness::ratio_band(&report, 3.0);
            finish(report, &cfg, checks)
        }
        Command::CheckMaxreg(c) => {
            let cfg = c.load()?;
            let report = harness::run_maxreg_check(&cfg);
            let checks = harness::median_band(&report, 5.0);
            finish(report, &cfg, checks)
        }
        Command::Sharpness(c) => {
            let cfg = c.load()?;
            let report = harness::run_sharpness_probe(&cfg);
            let checks = harness::sharpness_bands(&report, 1.2, 3.0);
            finish(report, &cfg, checks)
        }
        Command::ClassicalLimit(c) => {
            let cfg = c.load()?;
            let report = harness::run_classical_limit(&cfg);
            let checks = harness::classical_bands(&report, 0.05);
            finish(report, &cfg, checks)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::Bands(checks)) if harness::all_pass(&checks) => ExitCode::SUCCESS,
        Ok(Outcome::Bands(_)) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
