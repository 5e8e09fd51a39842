//! `hyplab` command line: loads JSON inputs, runs one operation or check,
//! and writes a single JSON report envelope.
//!
//! Exit codes: 0 pass, 1 check failed, 2 invalid input, 3 non-convergence,
//! 4 precondition violated. Diagnostics go to stderr only.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use hyplab::json::{self, ScalarFormat};
use hyplab::{dmodule, dop, theoremlab};
use hyplab::{DNormConfig, DPlus, DSeminorm, Error};
use serde::Serialize;
use sha2::{Digest, Sha256};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INVALID_INPUT: i32 = 2;
pub const EXIT_NO_CONVERGENCE: i32 = 3;
pub const EXIT_PRECONDITION: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "hyplab", version, about = "Bicomplex operator and hyperbolic-seminorm checks")]
struct Cli {
    /// Numerical tolerance (rank cutoff, series convergence).
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol: f64,
    /// Seed for every sampled quantity.
    #[arg(long, global = true, env = "HYPLAB_SEED", default_value_t = 42)]
    seed: u64,
    /// Term / step cap for series and decompositions.
    #[arg(long = "max-n", global = true, default_value_t = 1000)]
    max_n: usize,
    /// Write the report here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Scalar emission form.
    #[arg(long, global = true, value_enum, default_value_t = Format::Idempotent)]
    format: Format,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Idempotent,
    Cartesian,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum NormArg {
    L2,
    L1,
    Linf,
}

impl From<NormArg> for DNormConfig {
    fn from(n: NormArg) -> Self {
        let component_norm = match n {
            NormArg::L2 => dmodule::ComponentNorm::L2,
            NormArg::L1 => dmodule::ComponentNorm::L1,
            NormArg::Linf => dmodule::ComponentNorm::LInf,
        };
        DNormConfig { component_norm }
    }
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// k-norm and Euclidean norm of a scalar.
    Knorm {
        #[arg(long)]
        scalar: PathBuf,
    },
    /// Inverse of a scalar (fails on zero divisors).
    Inv {
        #[arg(long)]
        scalar: PathBuf,
    },
    /// D-norm of a vector.
    Norm {
        #[arg(long)]
        vector: PathBuf,
        #[arg(long, value_enum, default_value_t = NormArg::L2)]
        component_norm: NormArg,
    },
    /// Operator D-norm of a matrix.
    Opnorm {
        #[arg(long)]
        matrix: PathBuf,
    },
    /// Minimum-norm solution of Tx = y.
    Solve {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        y: PathBuf,
    },
    /// Surjectivity and open-mapping constant.
    Omc {
        #[arg(long)]
        matrix: PathBuf,
    },
    /// Sum a vector series and check absolute summability.
    Series {
        #[arg(long)]
        series: PathBuf,
    },
    /// Constructive Zabreiko decomposition of x for p = ‖T·‖_D.
    Zabreiko {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        x: PathBuf,
        /// Hyperbolic literal "a1,a2".
        #[arg(long)]
        m: String,
        #[arg(long)]
        r: f64,
        /// Hyperbolic literal "a1,a2".
        #[arg(long)]
        eps: String,
    },
    /// Uniform bound over a finite family of operators.
    Ubp {
        #[arg(long)]
        family: PathBuf,
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
    /// Open mapping bound, minimality and quotient subadditivity.
    #[command(name = "omt-verify")]
    OmtVerify {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value = "1e-3,1e-3")]
        eps: String,
    },
    /// Lipschitz bound p(x) ≤ α‖x‖_D and sequential continuity.
    Lemma31 {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        /// Candidate constant; defaults to the operator D-norm.
        #[arg(long)]
        alpha: Option<String>,
    },
    /// Countable subadditivity of p = ‖T·‖_D along a series.
    Subadd {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        series: PathBuf,
    },
    /// Ball scaling of the sublevel sets of p = ‖T·‖_D.
    Ballscale {
        #[arg(long)]
        matrix: PathBuf,
        /// Defaults to r times the operator D-norm.
        #[arg(long)]
        alpha: Option<String>,
        #[arg(long)]
        r: f64,
        #[arg(long, value_delimiter = ',', default_value = "0.5,2,10")]
        deltas: Vec<f64>,
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
}

impl Cmd {
    fn name(&self) -> &'static str {
        match self {
            Cmd::Knorm { .. } => "knorm",
            Cmd::Inv { .. } => "inv",
            Cmd::Norm { .. } => "norm",
            Cmd::Opnorm { .. } => "opnorm",
            Cmd::Solve { .. } => "solve",
            Cmd::Omc { .. } => "omc",
            Cmd::Series { .. } => "series",
            Cmd::Zabreiko { .. } => "zabreiko",
            Cmd::Ubp { .. } => "ubp",
            Cmd::OmtVerify { .. } => "omt-verify",
            Cmd::Lemma31 { .. } => "lemma31",
            Cmd::Subadd { .. } => "subadd",
            Cmd::Ballscale { .. } => "ballscale",
        }
    }
}

#[derive(Serialize)]
struct ReportEnvelope<'a, P: Serialize> {
    version: &'static str,
    subcommand: &'static str,
    inputs_digest: String,
    seed: u64,
    payload: &'a P,
    pass: bool,
}

/// Failure of a run, carrying its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NotConverged(_) | Error::NoConvergence { .. } => EXIT_NO_CONVERGENCE,
            Error::ZeroDivisor { .. }
            | Error::NotSurjective { .. }
            | Error::NotInRange { .. }
            | Error::PreconditionViolated(_)
            | Error::HypothesisFailed(_) => EXIT_PRECONDITION,
            Error::NonFinite(_)
            | Error::NotInCone(_)
            | Error::NotStrictlyPositive { .. }
            | Error::EmptySet
            | Error::DimensionMismatch { .. }
            | Error::ShapeMismatch(_)
            | Error::InvalidArgument(_)
            | Error::Parse(_) => EXIT_INVALID_INPUT,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn invalid(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_INVALID_INPUT,
        message: message.into(),
    }
}

/// Reads inputs while hashing their bytes and the scalar parameters, so the
/// digest depends on content rather than on file paths.
struct Ctx {
    subcommand: &'static str,
    hasher: Sha256,
    seed: u64,
    format: ScalarFormat,
}

impl Ctx {
    fn read(&mut self, label: &str, path: &Path) -> Result<serde_json::Value, Failure> {
        let bytes = std::fs::read(path).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
        self.hasher.update(label.as_bytes());
        self.hasher.update((bytes.len() as u64).to_le_bytes());
        self.hasher.update(&bytes);
        let text = std::str::from_utf8(&bytes).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
        Ok(json::from_str(text)?)
    }

    fn param(&mut self, label: &str, value: impl std::fmt::Display) {
        self.hasher.update(format!("{label}={value};").as_bytes());
    }

    fn finish<P: Serialize>(self, payload: &P, pass: bool) -> Result<Report, Failure> {
        let envelope = ReportEnvelope {
            version: env!("CARGO_PKG_VERSION"),
            subcommand: self.subcommand,
            inputs_digest: hex::encode(self.hasher.finalize()),
            seed: self.seed,
            payload,
            pass,
        };
        Ok(Report {
            text: json::to_string(&envelope, self.format)?,
            pass,
        })
    }
}

struct Report {
    text: String,
    pass: bool,
}

fn dplus_literal(s: &str) -> Result<DPlus, Failure> {
    Ok(DPlus::try_from(json::parse_hyperbolic_literal(s)?)?)
}

fn positive(name: &str, x: f64) -> Result<f64, Failure> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(invalid(format!("--{name} must be a positive real, got {x}")))
    }
}

fn execute(cli: Cli) -> Result<Report, Failure> {
    let tol = positive("tol", cli.tol)?;
    if cli.max_n == 0 {
        return Err(invalid("--max-n must be ≥ 1"));
    }
    let mut ctx = Ctx {
        subcommand: cli.cmd.name(),
        hasher: Sha256::new(),
        seed: cli.seed,
        format: match cli.format {
            Format::Idempotent => ScalarFormat::Idempotent,
            Format::Cartesian => ScalarFormat::Cartesian,
        },
    };
    ctx.hasher.update(ctx.subcommand.as_bytes());
    ctx.param("tol", json::format_real(tol));
    ctx.param("max_n", cli.max_n);
    let seed = cli.seed;
    let max_n = cli.max_n;

    match cli.cmd {
        Cmd::Knorm { scalar } => {
            let z = json::parse_scalar(&ctx.read("scalar", &scalar)?)?;
            #[derive(Serialize)]
            struct P {
                z: hyplab::Bicomplex,
                knorm: DPlus,
                #[serde(serialize_with = "json::real")]
                euclid_norm: f64,
            }
            ctx.finish(&P { z, knorm: z.knorm(), euclid_norm: z.euclid_norm() }, true)
        }
        Cmd::Inv { scalar } => {
            let z = json::parse_scalar(&ctx.read("scalar", &scalar)?)?;
            #[derive(Serialize)]
            struct P {
                z: hyplab::Bicomplex,
                inverse: hyplab::Bicomplex,
            }
            ctx.finish(&P { z, inverse: z.inverse()? }, true)
        }
        Cmd::Norm { vector, component_norm } => {
            let v = json::parse_vector(&ctx.read("vector", &vector)?)?;
            let cfg = DNormConfig::from(component_norm);
            ctx.param("component_norm", format!("{component_norm:?}"));
            #[derive(Serialize)]
            struct P {
                dim: usize,
                config: DNormConfig,
                norm: DPlus,
            }
            ctx.finish(&P { dim: v.dim(), config: cfg, norm: v.dnorm(cfg) }, true)
        }
        Cmd::Opnorm { matrix } => {
            let t = json::parse_matrix(&ctx.read("matrix", &matrix)?)?;
            let report = dop::op_dnorm(&t, tol)?;
            ctx.finish(&report, true)
        }
        Cmd::Solve { matrix, y } => {
            let t = json::parse_matrix(&ctx.read("matrix", &matrix)?)?;
            let y = json::parse_vector(&ctx.read("y", &y)?)?;
            let report = dop::min_norm_solve(&t, &y, tol)?;
            ctx.finish(&report, true)
        }
        Cmd::Omc { matrix } => {
            let t = json::parse_matrix(&ctx.read("matrix", &matrix)?)?;
            let report = dop::open_mapping_report(&t, tol)?;
            ctx.finish(&report, true)
        }
        Cmd::Series { series } => {
            let source = json::parse_series(&ctx.read("series", &series)?)?;
            let stol = DPlus::real(tol)?;
            let sum = dmodule::series_sum(source.terms(), stol, max_n)?;
            let abs = dmodule::abs_summability_check(source.terms(), stol, max_n)?;
            #[derive(Serialize)]
            struct P {
                series: dmodule::SeriesReport,
                abs_summability: dmodule::AbsSummabilityReport,
            }
            let pass = sum.converged && abs.chain_ok;
            ctx.finish(&P { series: sum, abs_summability: abs }, pass)
        }
        Cmd::Zabreiko { matrix, x, m, r, eps } => {
            let t = json::parse_matrix(&ctx.read("matrix", &matrix)?)?;
            let x = json::parse_vector(&ctx.read("x", &x)?)?;
            ctx.param("m", &m);
            ctx.param("r", json::format_real(r));
            ctx.param("eps", &eps);
            let m = DPlus::try_from(json::parse_hyperbolic_literal(&m)?)?;
            let eps = dplus_literal(&eps)?;
            let p = DSeminorm::new(t, DNormConfig::L2);
            let trace = theoremlab::zabreiko_decompose(&p, &x, m, r, eps, max_n)?;
            let pass = trace.final_bound_ok && trace.invariants_ok;
            ctx.finish(&trace, pass)
        }
        Cmd::Ubp { family, samples } => {
            let family = json::parse_family(&ctx.read("family", &family)?)?;
            ctx.param("samples", samples);
            let report = theoremlab::ubp_verify(&family, samples, seed)?;
            let pass = report.all_bounds_ok;
            ctx.finish(&report, pass)
        }
        Cmd::OmtVerify { matrix, trials, eps } => {
            let t = json::parse_matrix(&ctx.read("matrix", &matrix)?)?;
            ctx.param("trials", trials);
            ctx.param("eps", &eps);
            let eps = dplus_literal(&eps)?;
            let report = theoremlab::open_mapping_verify(&t, trials, seed, eps)?;
            let pass = report.pass;
            ctx.finish(&report, pass)
        }
        Cmd::Lemma31 { matrix, trials, alpha } => {
            let t = json::parse_matrix(&ctx.read("matrix", &matrix)?)?;
            ctx.param("trials", trials);
            let p = DSeminorm::new(t, DNormConfig::L2);
            let report = match alpha {
                Some(a) => {
                    ctx.param("alpha", &a);
                    theoremlab::continuity_bound_check_with(&p, dplus_literal(&a)?, trials, seed)?
                }
                None => theoremlab::continuity_bound_check(&p, trials, seed)?,
            };
            let pass = report.pass;
            ctx.finish(&report, pass)
        }
        Cmd::Subadd { matrix, series } => {
            let t = json::parse_matrix(&ctx.read("matrix", &matrix)?)?;
            let source = json::parse_series(&ctx.read("series", &series)?)?;
            let p = DSeminorm::new(t, DNormConfig::L2);
            let report = theoremlab::countable_subadd_check(
                &p,
                source.terms(),
                DPlus::real(tol)?,
                max_n,
                theoremlab::VERIFY_TOL,
            )?;
            let pass = report.pass;
            ctx.finish(&report, pass)
        }
        Cmd::Ballscale { matrix, alpha, r, deltas, samples } => {
            let t = json::parse_matrix(&ctx.read("matrix", &matrix)?)?;
            let r = positive("r", r)?;
            ctx.param("r", json::format_real(r));
            for d in &deltas {
                ctx.param("delta", json::format_real(*d));
            }
            ctx.param("samples", samples);
            let alpha = match alpha {
                Some(a) => {
                    ctx.param("alpha", &a);
                    dplus_literal(&a)?
                }
                None => dop::op_dnorm(&t, tol)?.m.scale(r),
            };
            let p = DSeminorm::new(t, DNormConfig::L2);
            let report = theoremlab::ball_scaling_check(&p, alpha, r, &deltas, samples, seed)?;
            let pass = report.pass;
            ctx.finish(&report, pass)
        }
    }
}

/// Runs the command line `argv` (program name first) and returns the exit code.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{e}");
                    EXIT_PASS
                }
                _ => {
                    let _ = write!(stderr, "{e}");
                    EXIT_INVALID_INPUT
                }
            };
        }
    };
    let output = cli.output.clone();
    let subcommand = cli.cmd.name();

    let report = match execute(cli) {
        Ok(r) => r,
        Err(f) => {
            let _ = writeln!(stderr, "hyplab {subcommand}: {}", f.message);
            return f.code;
        }
    };
    let written = match &output {
        Some(path) => std::fs::write(path, &report.text).map_err(|e| format!("{}: {e}", path.display())),
        None => stdout.write_all(report.text.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(msg) = written {
        let _ = writeln!(stderr, "hyplab {subcommand}: cannot write report: {msg}");
        return EXIT_INVALID_INPUT;
    }
    if report.pass {
        EXIT_PASS
    } else {
        let _ = writeln!(stderr, "hyplab {subcommand}: check failed");
        EXIT_CHECK_FAILED
    }
}
