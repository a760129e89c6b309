//! `definetti`: scale functions, optimal barriers, HJB verification and simulation
//! for de Finetti's dividend problem.
//!
//! Exit codes:
//!   0  success (with `--strict`, every verdict passed)
//!   1  model, numerical or I/O error
//!   2  usage error
//!   3  monotonicity fails: W′ decreases somewhere beyond a*
//!   4  convexity of W′ beyond a* fails
//!   5  HJB verdict fails (interior identity, (Γ−q)v ≤ 0 beyond a, or v′ ≥ 1)
//!   6  a* does not attain the simulated maximum over the compared barriers
//! Codes 3 to 6 are only used with `--strict`; the lowest failing code wins.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use definetti::barrier_policy::{bracketed_scale_function, certify, write_w1_csv, BarrierPolicy};
use definetti::hjb_verifier::{default_grid, verify_hjb, GeneratorQuadrature, VerificationReport};
use definetti::levy_model::{preset, preset_names, ModelFile};
use definetti::mc_simulator::{compare_policies, simulate_barrier, SimConfig};
use definetti::{Execution, LevyDensity, LevyModel, ScaleFunction};

const EXIT_ERROR: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_CONDITION2: u8 = 3;
const EXIT_CONVEXITY: u8 = 4;
const EXIT_HJB: u8 = 5;
const EXIT_SIMULATION: u8 = 6;

/// Right end of the figure domain.
const FIGURE_X_MAX: f64 = 40.0;
/// Points on each figure's generator grid.
const FIGURE_HJB_POINTS: usize = 1000;

#[derive(Parser)]
#[command(name = "definetti", version, about = "Optimal dividend barriers for spectrally negative Lévy processes")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Model file (JSON) or preset name.
    #[arg(long, global = true, default_value = "erlang2-sigma2")]
    model: String,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Grid size for tables and scans.
    #[arg(long, global = true, default_value_t = 2048)]
    grid: usize,
    /// Right end of the domain (default: grown until W′ brackets a*).
    #[arg(long, global = true)]
    xmax: Option<f64>,
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    #[arg(long, global = true, default_value_t = 100_000)]
    paths: usize,
    /// Exit nonzero when any verdict fails.
    #[arg(long, global = true)]
    strict: bool,
    /// Run on one thread.
    #[arg(long, global = true)]
    sequential: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate W, W′, W″ and W‴ as `x,w,w1,w2,w3`.
    Scale,
    /// Locate a* and check that W′ is nondecreasing and convex beyond a*.
    Barrier,
    /// Apply the generator to v_a and check the HJB inequalities.
    Verify {
        /// Barrier to verify (default a*).
        #[arg(long)]
        barrier: Option<f64>,
        /// Points on the verification grid.
        #[arg(long, default_value_t = 1000)]
        points: usize,
    },
    /// Monte Carlo estimate of v_a(x), optionally over several barriers.
    Simulate {
        /// Initial surplus.
        #[arg(long)]
        x: f64,
        /// Barrier (default a*).
        #[arg(long)]
        barrier: Option<f64>,
        /// Comma-separated barriers to compare with common random numbers.
        #[arg(long, value_delimiter = ',')]
        compare: Vec<f64>,
        /// Diffusion step (default 1/(20λ)).
        #[arg(long)]
        dt: Option<f64>,
    },
    /// Write the W′ and (Γ−q)v_{a*} curves for the Erlang example with σ = 1.4 and σ = 2.
    ReproduceFigures,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<definetti::Error> for Failure {
    fn from(e: definetti::Error) -> Self {
        Failure {
            code: EXIT_ERROR,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        definetti::Error::from(e).into()
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

/// Verdicts collected by a run, as (exit code, passed).
#[derive(Default)]
struct Verdicts(Vec<(u8, bool)>);

impl Verdicts {
    fn record(&mut self, code: u8, passed: bool) {
        self.0.push((code, passed));
    }

    fn exit_code(&self) -> u8 {
        self.0.iter().filter(|v| !v.1).map(|v| v.0).min().unwrap_or(0)
    }
}

impl Common {
    fn exec(&self) -> Execution {
        if self.sequential {
            Execution::Sequential
        } else {
            Execution::Parallel
        }
    }

    fn load_model(&self) -> Result<LevyModel, Failure> {
        let path = Path::new(&self.model);
        if path.is_file() {
            return Ok(ModelFile::load(path)?.to_model()?);
        }
        preset(&self.model).ok_or_else(|| {
            usage(format!(
                "`{}` is neither a model file nor a preset (presets: {})",
                self.model,
                preset_names().join(", ")
            ))
        })
    }

    fn validate(&self) -> Result<(), Failure> {
        if let Some(x) = self.xmax {
            if !(x.is_finite() && x > 0.0) {
                return Err(usage(format!("--xmax must be positive, got {x}")));
            }
        }
        if self.grid < 64 {
            return Err(usage(format!("--grid must be at least 64, got {}", self.grid)));
        }
        if self.paths < 2 {
            return Err(usage("--paths must be at least 2"));
        }
        Ok(())
    }

    fn create(&self, name: &str) -> Result<BufWriter<File>, Failure> {
        fs::create_dir_all(&self.out)?;
        Ok(BufWriter::new(File::create(self.out.join(name))?))
    }

    fn write_json(&self, name: &str, doc: &Value) -> Result<(), Failure> {
        fs::create_dir_all(&self.out)?;
        fs::write(self.out.join(name), serde_json::to_string_pretty(doc).unwrap() + "\n")?;
        Ok(())
    }
}

fn uniform(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect()
}

fn run_scale(c: &Common) -> Result<(Value, Verdicts), Failure> {
    let model = c.load_model()?;
    let (sf, x_hi) = bracketed_scale_function(&model, c.grid, c.xmax, c.exec())?;
    sf.write_csv(c.create("scale.csv")?, &uniform(0.0, x_hi, c.grid))?;
    let mut doc = sf.describe();
    doc["x_max"] = json!(x_hi);
    doc["rows"] = json!(c.grid + 1);
    doc["csv"] = json!("scale.csv");
    c.write_json("scale.json", &doc)?;
    Ok((doc, Verdicts::default()))
}

fn run_barrier(c: &Common) -> Result<(Value, Verdicts), Failure> {
    let model = c.load_model()?;
    let (sf, x_hi) = bracketed_scale_function(&model, c.grid, c.xmax, c.exec())?;
    let cert = certify(&sf, x_hi, c.grid, c.exec())?;
    write_w1_csv(&sf, c.create("w1.csv")?, &uniform(0.0, x_hi, c.grid))?;
    let doc = serde_json::to_value(&cert).unwrap();
    c.write_json("barrier.json", &doc)?;
    let mut verdicts = Verdicts::default();
    verdicts.record(EXIT_CONDITION2, cert.condition2_holds);
    verdicts.record(EXIT_CONVEXITY, cert.convexity_holds);
    Ok((doc, verdicts))
}

fn hjb_report(sf: &ScaleFunction, a: f64, x_hi: f64, points: usize, exec: Execution) -> Result<VerificationReport, Failure> {
    let policy = BarrierPolicy::new(sf, a)?;
    let quad = GeneratorQuadrature::for_scale_function(sf);
    Ok(verify_hjb(&policy, &default_grid(a, x_hi, points), &quad, exec)?)
}

fn run_verify(c: &Common, barrier: Option<f64>, points: usize) -> Result<(Value, Verdicts), Failure> {
    let model = c.load_model()?;
    let (sf, x_hi) = bracketed_scale_function(&model, c.grid, c.xmax, c.exec())?;
    let cert = certify(&sf, x_hi, c.grid, c.exec())?;
    let a = barrier.unwrap_or(cert.a_star);
    let report = hjb_report(&sf, a, x_hi.max(2.0 * a), points, c.exec())?;
    report.write_csv(c.create("hjb.csv")?)?;
    let mut doc = serde_json::to_value(&report).unwrap();
    doc["a_star"] = json!(cert.a_star);
    doc["condition2_holds"] = json!(cert.condition2_holds);
    c.write_json("verify.json", &doc)?;
    let mut verdicts = Verdicts::default();
    verdicts.record(EXIT_CONDITION2, cert.condition2_holds);
    verdicts.record(EXIT_HJB, report.hjb_holds);
    Ok((doc, verdicts))
}

fn run_simulate(
    c: &Common,
    x: f64,
    barrier: Option<f64>,
    compare: &[f64],
    dt: Option<f64>,
) -> Result<(Value, Verdicts), Failure> {
    let model = c.load_model()?;
    let a = match barrier {
        Some(a) => a,
        None => {
            let (sf, x_hi) = bracketed_scale_function(&model, c.grid, c.xmax, c.exec())?;
            certify(&sf, x_hi, c.grid, c.exec())?.a_star
        }
    };
    let mut cfg = SimConfig::new(&model, a, x).paths(c.paths).seed(c.seed).exec(c.exec());
    cfg.dt = dt;
    let mut verdicts = Verdicts::default();
    let mut doc = serde_json::to_value(simulate_barrier(&cfg)?).unwrap();
    if !compare.is_empty() {
        let table = compare_policies(&cfg, compare, Some(a))?;
        table.write_csv(c.create("compare.csv")?)?;
        doc["argmax"] = json!(table.argmax);
        doc["candidate_attains_max"] = json!(table.candidate_attains_max);
        verdicts.record(EXIT_SIMULATION, table.candidate_attains_max.unwrap_or(true));
    }
    c.write_json("simulate.json", &doc)?;
    Ok((doc, verdicts))
}

fn erlang_example(sigma: f64) -> Result<LevyModel, Failure> {
    let claims = LevyDensity::Erlang {
        rate: 10.0,
        alpha: 1.0,
        shape: 2,
    };
    Ok(LevyModel::cramer_lundberg(21.4, sigma, claims, 0.1)?)
}

fn run_reproduce(c: &Common) -> Result<(Value, Verdicts), Failure> {
    let mut summary = serde_json::Map::new();
    let mut verdicts = Verdicts::default();
    for (figure, sigma) in [(1, 1.4), (2, 2.0)] {
        let model = erlang_example(sigma)?;
        let sf = ScaleFunction::partial_fractions(&model)?;
        let (_, x_hi) = bracketed_scale_function(&model, c.grid, c.xmax, c.exec())?;
        let cert = certify(&sf, x_hi.max(FIGURE_X_MAX), c.grid, c.exec())?;
        write_w1_csv(&sf, c.create(&format!("fig{figure}_left_w1.csv"))?, &uniform(0.0, FIGURE_X_MAX, c.grid))?;
        let report = hjb_report(&sf, cert.a_star, FIGURE_X_MAX, FIGURE_HJB_POINTS, c.exec())?;
        report.write_csv(c.create(&format!("fig{figure}_right_generator.csv"))?)?;
        summary.insert(
            format!("sigma_{sigma}"),
            json!({
                "sigma": sigma,
                "a_star": cert.a_star,
                "condition2_holds": cert.condition2_holds,
                "convexity_holds": cert.convexity_holds,
                "condition3_holds": report.condition3_holds,
                "interior_holds": report.interior_holds,
                "hjb_holds": report.hjb_holds,
                "worst_excursion": report.worst_excursion,
                "worst_excursion_x": report.worst_excursion_x,
            }),
        );
        verdicts.record(EXIT_CONDITION2, cert.condition2_holds);
        verdicts.record(EXIT_HJB, report.hjb_holds);
    }
    let doc = Value::Object(summary);
    c.write_json("summary.json", &doc)?;
    Ok((doc, verdicts))
}

fn run(cli: &Cli) -> Result<(Value, Verdicts), Failure> {
    let c = &cli.common;
    c.validate()?;
    match &cli.command {
        Command::Scale => run_scale(c),
        Command::Barrier => run_barrier(c),
        Command::Verify { barrier, points } => run_verify(c, *barrier, *points),
        Command::Simulate { x, barrier, compare, dt } => run_simulate(c, *x, *barrier, compare, *dt),
        Command::ReproduceFigures => run_reproduce(c),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((doc, verdicts)) => {
            println!("{}", serde_json::to_string_pretty(&doc).unwrap());
            if cli.common.strict {
                ExitCode::from(verdicts.exit_code())
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
