//! Command-line interface: verification runs, basis dumps, convergence and
//! sharpness experiments, and raw moment queries.
//!
//! Everything is a flag (no config files, no environment variables) so runs
//! are reproducible from their command line alone. Output is byte-identical
//! for identical flags and seed.
//!
//! Exit codes: 0 success, 1 failed verification, 2 flag or parameter
//! errors, 3 numerical rank failure.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};

use dunkl_ball::harness;
use dunkl_ball::moments::MomentEngine;
use dunkl_ball::multipoly::{MultiIndex, Polynomial};
use dunkl_ball::orthobasis::{OrthoBasis, TestFunction};
use dunkl_ball::propcheck::{self, CheckConfig};
use dunkl_ball::scalar::{Rational, Scalar};
use dunkl_ball::weights::WeightParams;
use dunkl_ball::Error;

#[derive(Parser)]
#[command(
    name = "dunkl-ball",
    about = "Dunkl-operator calculus and weighted orthogonal projection on the unit ball",
    long_about = "Weighted orthogonal polynomial machinery for the ball weight\n\
                  (1-|x|^2)^alpha * prod_i |x_i|^{gamma_i}. Axes in function\n\
                  specs are 1-based. alpha and gamma accept decimals (0.25)\n\
                  or fractions (1/4); both parse exactly in the rational\n\
                  backend."
)]
struct Cli {
    /// Ambient dimension d.
    #[arg(long, global = true, default_value_t = 1)]
    dim: usize,
    /// Exponent alpha > -1 of (1 - |x|^2).
    #[arg(long, global = true, default_value = "0", allow_hyphen_values = true)]
    alpha: String,
    /// Comma-separated exponents gamma_i > -1 of |x_i|, one per axis.
    #[arg(long, global = true, default_value = "0", allow_hyphen_values = true)]
    gamma: String,
    /// Seed for the randomized checks.
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,
    /// Scalar backend.
    #[arg(long, global = true, value_enum, default_value_t = BackendOpt::F64)]
    backend: BackendOpt,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Output format for experiment tables.
    #[arg(long, global = true, value_enum, default_value_t = FormatOpt::Csv)]
    format: FormatOpt,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BackendOpt {
    F64,
    Rational,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatOpt {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Run the identity-check registry and emit a JSON report array.
    /// Exits 0 only if every check passes.
    Verify {
        /// Degree cap of the random polynomial ensemble.
        #[arg(long, default_value_t = 8)]
        max_degree: u32,
        /// Random draws per check on the primary weight.
        #[arg(long, default_value_t = 50)]
        draws: usize,
    },
    /// Build the orthogonal basis and print a summary, or the full
    /// serialization with --print.
    Basis {
        #[arg(long, default_value_t = 6)]
        max_degree: u32,
        /// Emit every basis polynomial, one per line:
        /// `k=<degree> i=<index>: <coeff> <e_1> ... <e_d>; ...`.
        #[arg(long)]
        print: bool,
    },
    /// Truncation-error experiment for a test function over a degree list.
    Converge {
        /// Function spec: `poly:<file>`, `abs-power:axis=<j>,theta=<t>[,signed]`
        /// or `radial-jacobi:<c0,c1,...>` (axis is 1-based).
        #[arg(long = "fn")]
        function: String,
        /// Error order (0 = weighted L2 only, 1 adds the Dunkl-gradient
        /// error; higher orders need a polynomial function).
        #[arg(long, default_value_t = 1)]
        r: u32,
        /// Comma-separated strictly increasing truncation degrees.
        #[arg(long = "N")]
        n_list: String,
    },
    /// Sharpness table: closed-form and polynomial-route gradient ratios
    /// plus the normalized first-order truncation error, n = 2..=n_max.
    Sharpness {
        #[arg(long, default_value_t = 12)]
        n_max: u32,
    },
    /// One weighted monomial moment (unit-mass normalized by default).
    Moments {
        /// Comma-separated exponent vector, one entry per axis.
        #[arg(long)]
        index: String,
        /// Optional comma-separated real exponent shifts (f64 backend only).
        #[arg(long, allow_hyphen_values = true)]
        theta: Option<String>,
        /// Scale by the absolute mass of the weight instead of unit mass.
        #[arg(long)]
        absolute: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::RankDeficient { .. } => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}

fn parse_scalar_list<S: Scalar>(text: &str, dim: usize, what: &str) -> Result<Vec<S>, Error> {
    let values: Vec<S> = text.split(',').map(S::parse).collect::<Result<_, _>>()?;
    if values.len() != dim {
        return Err(Error::Parse(format!(
            "{what} needs {dim} comma-separated entries, got {}",
            values.len()
        )));
    }
    Ok(values)
}

fn weight_from<S: Scalar>(cli: &Cli) -> Result<WeightParams<S>, Error> {
    let alpha = S::parse(&cli.alpha)?;
    let gamma = parse_scalar_list::<S>(&cli.gamma, cli.dim, "--gamma")?;
    WeightParams::new(cli.dim, alpha, gamma)
}

fn emit(cli: &Cli, text: &str) -> Result<(), Error> {
    match &cli.output {
        Some(path) => fs::write(path, text)
            .map_err(|e| Error::Parse(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode, Error> {
    match &cli.command {
        Command::Verify { max_degree, draws } => {
            let reports = match cli.backend {
                BackendOpt::F64 => propcheck::run_all(&CheckConfig {
                    w: weight_from::<f64>(cli)?,
                    max_degree: *max_degree,
                    seed: cli.seed,
                    draws: *draws,
                })?,
                BackendOpt::Rational => propcheck::run_all(&CheckConfig {
                    w: weight_from::<Rational>(cli)?,
                    max_degree: *max_degree,
                    seed: cli.seed,
                    draws: *draws,
                })?,
            };
            let json = serde_json::to_string_pretty(&reports).expect("reports serialize") + "\n";
            emit(cli, &json)?;
            Ok(if propcheck::all_pass(&reports) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Basis { max_degree, print } => {
            let text = match cli.backend {
                BackendOpt::F64 => basis_text(weight_from::<f64>(cli)?, *max_degree, *print)?,
                BackendOpt::Rational => {
                    basis_text(weight_from::<Rational>(cli)?, *max_degree, *print)?
                }
            };
            emit(cli, &text)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Converge {
            function,
            r,
            n_list,
        } => {
            if cli.backend == BackendOpt::Rational {
                return Err(Error::Unsupported(
                    "converge runs on the f64 backend (its test families have \
                     irrational moments); drop --backend rational"
                        .into(),
                ));
            }
            let w = weight_from::<f64>(cli)?;
            let n_list: Vec<u32> = n_list
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse::<u32>()
                        .map_err(|_| Error::Parse(format!("bad degree `{t}` in --N")))
                })
                .collect::<Result<_, _>>()?;
            let function = parse_function(function, &w)?;
            let mut cap = n_list.iter().copied().max().unwrap_or(0);
            if let Some(p) = function.as_polynomial(&w) {
                cap = cap.max(p.degree().max(0) as u32);
            }
            let basis = OrthoBasis::build(Arc::new(MomentEngine::new(w)), cap)?;
            let records = harness::converge(&basis, &function, *r, &n_list)?;
            let text = match cli.format {
                FormatOpt::Csv => harness::records_to_csv(&records),
                FormatOpt::Json => {
                    serde_json::to_string_pretty(&records).expect("records serialize") + "\n"
                }
            };
            emit(cli, &text)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Sharpness { n_max } => {
            if cli.backend == BackendOpt::Rational {
                return Err(Error::Unsupported(
                    "sharpness reports f64 ratios (its polynomial route is \
                     exact internally); drop --backend rational"
                        .into(),
                ));
            }
            let w = weight_from::<f64>(cli)?;
            let rows = harness::sharpness_run(&w, *n_max)?;
            let text = match cli.format {
                FormatOpt::Csv => harness::sharpness_to_csv(&rows),
                FormatOpt::Json => {
                    serde_json::to_string_pretty(&rows).expect("rows serialize") + "\n"
                }
            };
            emit(cli, &text)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Moments {
            index,
            theta,
            absolute,
        } => {
            let exponents: Vec<u32> = index
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse::<u32>()
                        .map_err(|_| Error::Parse(format!("bad exponent `{t}` in --index")))
                })
                .collect::<Result<_, _>>()?;
            if exponents.len() != cli.dim {
                return Err(Error::Parse(format!(
                    "--index needs {} entries, got {}",
                    cli.dim,
                    exponents.len()
                )));
            }
            let a = MultiIndex::new(exponents);
            match cli.backend {
                BackendOpt::Rational => {
                    if theta.is_some() {
                        return Err(Error::Unsupported(
                            "theta shifts have irrational moments; use --backend f64".into(),
                        ));
                    }
                    if *absolute {
                        return Err(Error::Unsupported(
                            "absolute normalization is irrational; use --backend f64".into(),
                        ));
                    }
                    let me = MomentEngine::new(weight_from::<Rational>(cli)?);
                    emit(cli, &format!("{}\n", me.moment(&a)))?;
                }
                BackendOpt::F64 => {
                    let me = MomentEngine::new(weight_from::<f64>(cli)?);
                    let mut value = match theta {
                        Some(text) => {
                            let shifts = parse_scalar_list::<f64>(text, cli.dim, "--theta")?;
                            me.moment_shifted(&a, &shifts)?
                        }
                        None => me.moment(&a),
                    };
                    if *absolute {
                        value *= me.mass_absolute();
                    }
                    emit(cli, &format!("{value}\n"))?;
                }
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn basis_text<S: Scalar>(
    w: WeightParams<S>,
    max_degree: u32,
    print: bool,
) -> Result<String, Error> {
    let basis = OrthoBasis::build(Arc::new(MomentEngine::new(w)), max_degree)?;
    if print {
        let mut out = basis.print_lines().join("\n");
        out.push('\n');
        return Ok(out);
    }
    let mut out = format!(
        "orthogonal basis up to degree {max_degree} (backend {})\n",
        S::BACKEND
    );
    for k in 0..=max_degree {
        out.push_str(&format!(
            "  degree {k}: {} elements\n",
            basis.level(k).len()
        ));
    }
    Ok(out)
}

/// Parse the `--fn` grammar. Axes are 1-based on the command line.
fn parse_function(spec: &str, w: &WeightParams<f64>) -> Result<TestFunction, Error> {
    let (kind, rest) = spec
        .split_once(':')
        .ok_or_else(|| Error::Parse(format!("function spec `{spec}` lacks a `kind:` prefix")))?;
    match kind {
        "poly" => {
            let text = fs::read_to_string(rest)
                .map_err(|e| Error::Parse(format!("cannot read `{rest}`: {e}")))?;
            Ok(TestFunction::Poly(Polynomial::parse_text(w.dim(), &text)?))
        }
        "abs-power" => {
            let mut axis = None;
            let mut theta = None;
            let mut signed = false;
            for part in rest.split(',') {
                match part.split_once('=') {
                    Some(("axis", v)) => {
                        axis = Some(v.parse::<usize>().map_err(|_| {
                            Error::Parse(format!("bad axis `{v}` in abs-power spec"))
                        })?)
                    }
                    Some(("theta", v)) => {
                        theta = Some(v.parse::<f64>().map_err(|_| {
                            Error::Parse(format!("bad theta `{v}` in abs-power spec"))
                        })?)
                    }
                    None if part.trim() == "signed" => signed = true,
                    _ => return Err(Error::Parse(format!("unknown abs-power field `{part}`"))),
                }
            }
            let axis = axis.ok_or_else(|| Error::Parse("abs-power needs axis=<j>".into()))?;
            let theta = theta.ok_or_else(|| Error::Parse("abs-power needs theta=<t>".into()))?;
            if axis == 0 || axis > w.dim() {
                return Err(Error::Parse(format!(
                    "axis {axis} out of range 1..={}",
                    w.dim()
                )));
            }
            if w.gamma(axis - 1) + 2.0 * theta <= -1.0 {
                return Err(Error::NonIntegrable {
                    axis,
                    value: w.gamma(axis - 1) + 2.0 * theta,
                });
            }
            Ok(TestFunction::AxisPower {
                axis: axis - 1,
                theta,
                signed,
            })
        }
        "radial-jacobi" => {
            let coeffs: Vec<f64> = rest
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::Parse(format!("bad coefficient `{t}`")))
                })
                .collect::<Result<_, _>>()?;
            Ok(TestFunction::RadialJacobi { coeffs })
        }
        other => Err(Error::Parse(format!("unknown function kind `{other}`"))),
    }
}
