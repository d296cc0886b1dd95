//! Command-line front end. [`run`] does all the work and returns the exit code
//! and the text to print, so the binary is a thin shell around it.
//!
//! Exit codes: 0 success (or a true verdict), 1 a negative verdict or a numeric
//! failure, 2 a usage error.

mod render;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::algorithms::{Algorithm, Path};
use crate::error::McfError;
use crate::lyapunov::{SpectrumConfig, DEFAULT_BURN_IN, DEFAULT_SEED, DEFAULT_STEPS, DEFAULT_TRIALS};

pub const SCHEMA_VERSION: u32 = 1;
pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "mcf", version, about = "Multidimensional continued fraction experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Pinching and twisting certificates for two loops.
    Certify(CertifyArgs),
    /// Monte-Carlo Lyapunov spectrum and approximation exponent.
    Lyapunov(LyapunovArgs),
    /// Distribution of the positivity time over random points.
    Nu(NuArgs),
    /// Exact depth-1 triangle cylinder table.
    Cylinders(CylinderArgs),
    /// Spectrum of the first-return cocycle to a positive cylinder.
    Accelerate(AccelerateArgs),
    /// Enumerate loops and list certified pairs.
    Search(SearchArgs),
    /// One orbit with its branch labels.
    Orbit(OrbitArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
}

fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    s.parse().map_err(|e: McfError| e.to_string())
}

#[derive(Args, Debug, Serialize)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct SpectrumArgs {
    #[arg(long, default_value_t = DEFAULT_STEPS, value_parser = clap::value_parser!(u64).range(1..))]
    steps: u64,
    #[arg(long, default_value_t = DEFAULT_TRIALS, value_parser = positive_usize)]
    trials: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    renorm_period: u64,
    #[arg(long, default_value_t = DEFAULT_BURN_IN, value_parser = clap::value_parser!(u64).range(1..))]
    burn_in: u64,
}

impl SpectrumArgs {
    fn config(&self) -> SpectrumConfig {
        SpectrumConfig {
            steps: self.steps,
            trials: self.trials,
            seed: self.seed,
            renorm_period: self.renorm_period,
            burn_in: self.burn_in,
        }
    }
}

fn positive_usize(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be positive".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Args, Debug, Serialize)]
struct CertifyArgs {
    /// Use the reference pair of an algorithm (triangle or cassaigne).
    #[arg(long, value_parser = parse_algorithm, conflicts_with = "paths", required_unless_present = "paths")]
    paper_paths: Option<Algorithm>,
    /// Two paths, e.g. `C:21221 C:1222121`.
    #[arg(long, num_args = 2, value_names = ["GAMMA1", "GAMMA2"])]
    paths: Option<Vec<String>>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug, Serialize)]
struct LyapunovArgs {
    #[arg(long, value_parser = parse_algorithm)]
    algorithm: Algorithm,
    #[command(flatten)]
    spectrum: SpectrumArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug, Serialize)]
struct NuArgs {
    #[arg(long, value_parser = parse_algorithm)]
    algorithm: Algorithm,
    #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
    samples: u64,
    #[arg(long, default_value_t = 64, value_parser = positive_usize)]
    cap: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug, Serialize)]
struct CylinderArgs {
    #[arg(long, default_value_t = 100)]
    max_b: u64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug, Serialize)]
struct AccelerateArgs {
    #[arg(long, value_parser = parse_algorithm, default_value = "cassaigne")]
    algorithm: Algorithm,
    /// Positive loop whose cylinder is the return set; defaults to `C:21221`.
    #[arg(long)]
    path: Option<String>,
    /// Induced matrices listed from one sample orbit.
    #[arg(long, default_value_t = 5)]
    show_returns: usize,
    #[command(flatten)]
    spectrum: SpectrumArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug, Serialize)]
struct SearchArgs {
    #[arg(long, value_parser = parse_algorithm)]
    algorithm: Algorithm,
    #[arg(long, default_value_t = 7, value_parser = positive_usize)]
    max_len: usize,
    /// Largest triangle quotient.
    #[arg(long, default_value_t = 4)]
    max_b: u64,
    #[arg(long, default_value_t = 1000, value_parser = positive_usize)]
    max_pairs: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug, Serialize)]
struct OrbitArgs {
    #[arg(long, value_parser = parse_algorithm)]
    algorithm: Algorithm,
    /// Starting point `x1,x2,x3`; integers or fractions `p/q`, normalized.
    #[arg(long)]
    point: String,
    #[arg(long, default_value_t = 20)]
    steps: usize,
    /// Iterate in double precision instead of exact rationals.
    #[arg(long)]
    float: bool,
    /// Iterate with the wide mantissa floating flavor.
    #[arg(long, conflicts_with = "float")]
    wide: bool,
    /// Also report the product of the step matrices.
    #[arg(long)]
    product: bool,
    #[arg(long, default_value_t = 20)]
    digits: usize,
    #[command(flatten)]
    output: OutputArgs,
}

/// What the binary prints and returns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl CliOutput {
    fn usage(msg: impl Into<String>) -> Self {
        CliOutput {
            code: EXIT_USAGE,
            stdout: String::new(),
            stderr: msg.into(),
        }
    }
}

/// A rendered report and whether its verdict holds.
pub(crate) struct Report {
    pub json: serde_json::Value,
    pub text: String,
    pub csv: String,
    pub ok: bool,
}

fn error_code(e: &McfError) -> i32 {
    match e {
        McfError::InvalidInput(_) | McfError::Parse(_) | McfError::Unsupported(_) => EXIT_USAGE,
        _ => EXIT_NEGATIVE,
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> CliOutput
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                CliOutput {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                CliOutput::usage(text)
            };
        }
    };
    let (name, config, output, result) = match &cli.command {
        Command::Certify(a) => ("certify", json!(a), &a.output, certify(a)),
        Command::Lyapunov(a) => ("lyapunov", json!(a), &a.output, render::lyapunov(a.algorithm, &a.spectrum.config())),
        Command::Nu(a) => ("nu", json!(a), &a.output, Ok(render::nu(a.algorithm, a.samples, a.cap, a.seed))),
        Command::Cylinders(a) => ("cylinders", json!(a), &a.output, render::cylinders(a.max_b)),
        Command::Accelerate(a) => ("accelerate", json!(a), &a.output, accelerate(a)),
        Command::Search(a) => (
            "search",
            json!(a),
            &a.output,
            render::search(a.algorithm, a.max_len, a.max_b, a.max_pairs),
        ),
        Command::Orbit(a) => ("orbit", json!(a), &a.output, orbit(a)),
    };
    let report = match result {
        Ok(r) => r,
        Err(e) => {
            return CliOutput {
                code: error_code(&e),
                stdout: String::new(),
                stderr: format!("error: {e}\n"),
            }
        }
    };
    let body = match output.format {
        Format::Json => {
            let envelope = json!({
                "schema": SCHEMA_VERSION,
                "version": env!("CARGO_PKG_VERSION"),
                "command": name,
                "config": config,
                "report": report.json,
            });
            serde_json::to_string_pretty(&envelope).expect("serializable") + "\n"
        }
        Format::Csv => report.csv,
        Format::Text => report.text,
    };
    let code = if report.ok { EXIT_OK } else { EXIT_NEGATIVE };
    match &output.out {
        Some(path) => match std::fs::write(path, &body) {
            Ok(()) => CliOutput {
                code,
                stdout: format!("wrote {}\n", path.display()),
                stderr: String::new(),
            },
            Err(e) => CliOutput {
                code: EXIT_NEGATIVE,
                stdout: String::new(),
                stderr: format!("error: cannot write {}: {e}\n", path.display()),
            },
        },
        None => CliOutput {
            code,
            stdout: body,
            stderr: String::new(),
        },
    }
}

fn certify(a: &CertifyArgs) -> crate::error::Result<Report> {
    let (g1, g2) = match (&a.paper_paths, &a.paths) {
        (Some(alg), _) => crate::galois::reference_pair(*alg)?,
        (None, Some(p)) => (p[0].parse::<Path>()?, p[1].parse::<Path>()?),
        (None, None) => return Err(McfError::InvalidInput("give --paper-paths or --paths".into())),
    };
    Ok(render::certify(&g1, &g2))
}

fn accelerate(a: &AccelerateArgs) -> crate::error::Result<Report> {
    let gamma: Path = match &a.path {
        Some(p) => p.parse()?,
        None if a.algorithm == Algorithm::Cassaigne => Path::cassaigne_word("21221")?,
        None => return Err(McfError::InvalidInput(format!("--path is required for {}", a.algorithm))),
    };
    render::accelerate(a.algorithm, &gamma, &a.spectrum.config(), a.show_returns)
}

fn orbit(a: &OrbitArgs) -> crate::error::Result<Report> {
    let parts: Vec<&str> = a.point.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(McfError::Parse(format!("expected three coordinates in '{}'", a.point)));
    }
    if a.float {
        let v: Vec<f64> = parts
            .iter()
            .map(|s| s.parse::<f64>().map_err(|_| McfError::Parse(format!("bad coordinate '{s}'"))))
            .collect::<crate::error::Result<_>>()?;
        let theta = crate::numeric::normalize([v[0], v[1], v[2]])?;
        Ok(render::orbit(&crate::cocycle::orbit(a.algorithm, &theta, a.steps, a.product), a.digits))
    } else {
        let v: Vec<num_rational::BigRational> = parts
            .iter()
            .map(|s| s.parse().map_err(|_| McfError::Parse(format!("bad coordinate '{s}'"))))
            .collect::<crate::error::Result<_>>()?;
        let theta = crate::numeric::normalize([v[0].clone(), v[1].clone(), v[2].clone()])?;
        if a.wide {
            let wide = theta.to_wide();
            return Ok(render::orbit(&crate::cocycle::orbit(a.algorithm, &wide, a.steps, a.product), a.digits));
        }
        Ok(render::orbit(&crate::cocycle::orbit(a.algorithm, &theta, a.steps, a.product), a.digits))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &str) -> CliOutput {
        run(std::iter::once("mcf").chain(args.split_whitespace()))
    }

    #[test]
    fn certify_reference_pairs() {
        let out = call("certify --paper-paths cassaigne --format json");
        assert_eq!(out.code, 0, "{}", out.stderr);
        let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
        assert_eq!(v["schema"], 1);
        assert_eq!(v["report"]["loops"][0]["certificate"]["discriminant"], "229");
        assert_eq!(v["report"]["loops"][1]["certificate"]["discriminant"], "837");
        assert_eq!(v["report"]["gcd_of_discriminants"], "1");
        let out = call("certify --paper-paths triangle");
        assert_eq!(out.code, 0);
        assert!(out.stdout.contains("x^3 - 7x^2 + 6x - 1"));
    }

    #[test]
    fn certify_negative_and_malformed() {
        assert_eq!(call("certify --paths C:2 C:1").code, EXIT_NEGATIVE);
        assert_eq!(call("certify --paths C:3 C:1").code, EXIT_USAGE);
        assert_eq!(call("certify").code, EXIT_USAGE);
        assert_eq!(call("certify --paper-paths selmer").code, EXIT_USAGE);
        assert_eq!(call("frobnicate").code, EXIT_USAGE);
    }

    #[test]
    fn lyapunov_validation() {
        assert_eq!(call("lyapunov --algorithm cassaigne --steps 0").code, EXIT_USAGE);
        assert_eq!(call("lyapunov --algorithm cassaigne --steps 10").code, EXIT_USAGE);
        assert_eq!(call("lyapunov --algorithm nonsense").code, EXIT_USAGE);
    }

    #[test]
    fn lyapunov_json_is_reproducible() {
        let args = "lyapunov --algorithm cassaigne --steps 20000 --trials 3 --seed 7 --format json";
        let a = call(args);
        assert_eq!(a.code, 0, "{}", a.stderr);
        assert_eq!(a.stdout, call(args).stdout);
        let v: serde_json::Value = serde_json::from_str(&a.stdout).unwrap();
        assert_eq!(v["config"]["spectrum"]["seed"], 7);
        assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
        let csv = call("lyapunov --algorithm cassaigne --steps 20000 --trials 3 --format csv");
        assert!(csv.stdout.starts_with("algorithm,lambda1"));
    }

    #[test]
    fn nu_and_cylinders() {
        let out = call("nu --algorithm triangle --samples 2000 --cap 64 --format json");
        assert_eq!(out.code, 0);
        let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
        assert!(v["report"]["stats"]["max"].as_u64().unwrap() <= 64);
        let out = call("cylinders --max-b 100 --format json");
        let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
        assert_eq!(v["report"]["rows"][0]["measure"], "1/48");
        assert_eq!(v["report"]["rows"][100]["measure"], "1/42848");
        let csv = call("cylinders --max-b 3 --format csv").stdout;
        assert_eq!(csv.lines().count(), 5);
    }

    #[test]
    fn search_finds_the_cassaigne_pair() {
        let out = call("search --algorithm cassaigne --max-len 7 --format csv");
        assert_eq!(out.code, 0);
        assert!(out.stdout.lines().any(|l| l.starts_with("C:21221,C:1222121,")));
    }

    #[test]
    fn orbit_exact_and_float() {
        let out = call("orbit --algorithm cassaigne --point 3,5,7 --steps 3 --format json");
        assert_eq!(out.code, 0, "{}", out.stderr);
        let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
        assert_eq!(v["report"]["flavor"], "exact");
        let out = call("orbit --algorithm triangle --point 0.2,0.3,0.5 --float --steps 5");
        assert_eq!(out.code, 0);
        assert_eq!(call("orbit --algorithm triangle --point 1,2").code, EXIT_USAGE);
    }

    #[test]
    fn accelerate_small_run() {
        let out = call("accelerate --steps 20000 --trials 4 --seed 3 --format json");
        assert!(out.code == 0 || out.code == 1, "{}", out.stderr);
        let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
        assert_eq!(v["report"]["abramov"]["non_positive_segments"], 0);
        assert_eq!(call("accelerate --path C:12 --steps 20000").code, EXIT_USAGE);
    }

    #[test]
    fn out_file() {
        let dir = std::env::temp_dir().join(format!("mcf-cli-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let file = dir.join("cyl.csv");
        let out = call(&format!("cylinders --max-b 2 --format csv --out {}", file.display()));
        assert_eq!(out.code, 0);
        assert!(std::fs::read_to_string(&file).unwrap().starts_with("b,measure"));
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
