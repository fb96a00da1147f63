//! Command-line frontend: trace, classify, reproduce the figure table,
//! export sweep meshes, and run the verification grid.
//!
//! Exit codes: 0 success, 1 verification failure (or runtime error),
//! 2 flag/config errors.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use weingarten_core::classify::{predict, verify};
use weingarten_core::emit::{sweep_mesh, write_curve, write_obj, CurveFormat};
use weingarten_core::odetrace::trace;
use weingarten_core::params::{normalize_linear, NormalizedOutcome};
use weingarten_core::suite;
use weingarten_core::{InitialConditions, TraceOptions, WeingartenSpec};

#[derive(Parser)]
#[command(
    name = "weingarten",
    about = "Trace and classify generating curves of parabolic linear Weingarten surfaces",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Trace a generating curve and serialize the samples.
    Trace {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
        format: FormatArg,
        /// Output path; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Predict the regime, trace, verify, and print both as JSON.
    Classify {
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Render the canonical figure table as SVG files.
    Figures {
        #[arg(long = "out-dir")]
        out_dir: PathBuf,
    },
    /// Sweep a traced curve into a quad mesh and write OBJ.
    Mesh {
        #[command(flatten)]
        params: ParamArgs,
        /// Half-width of the sweep interval in the translation direction.
        #[arg(long = "t-width", allow_hyphen_values = true)]
        t_width: f64,
        /// Number of sweep stations (>= 2).
        #[arg(long)]
        cols: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the full acceptance grid and print one line per criterion.
    Verify,
}

/// Curvature relation flags: exactly one of `--K`, `--m --n`, `--a --b --c`.
#[derive(Args)]
struct ParamArgs {
    /// Constant Gauss curvature K.
    #[arg(long = "K", allow_hyphen_values = true)]
    k: Option<f64>,
    /// Slope of the linear relation k1 = m*k2 + n.
    #[arg(long, allow_hyphen_values = true, requires = "n")]
    m: Option<f64>,
    /// Offset of the linear relation k1 = m*k2 + n.
    #[arg(long, allow_hyphen_values = true, requires = "m")]
    n: Option<f64>,
    /// Raw relation a*k1 + b*k2 = c.
    #[arg(long, allow_hyphen_values = true, requires = "b", requires = "c")]
    a: Option<f64>,
    #[arg(long, allow_hyphen_values = true, requires = "a")]
    b: Option<f64>,
    #[arg(long, allow_hyphen_values = true, requires = "a")]
    c: Option<f64>,
    /// Starting tangent angle in radians.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    theta0: f64,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

/// Errors that should exit 2 (bad flags or config) vs 1 (runtime).
enum CliError {
    Usage(String),
    Runtime(String),
}

impl CliError {
    fn report(&self) -> ExitCode {
        match self {
            CliError::Usage(msg) => {
                eprintln!("error: {msg}");
                ExitCode::from(2)
            }
            CliError::Runtime(msg) => {
                eprintln!("error: {msg}");
                ExitCode::from(1)
            }
        }
    }
}

fn resolve_spec(p: &ParamArgs) -> Result<WeingartenSpec, CliError> {
    let groups = [p.k.is_some(), p.m.is_some(), p.a.is_some()];
    if groups.iter().filter(|&&g| g).count() != 1 {
        return Err(CliError::Usage(
            "give exactly one of --K, --m/--n, or --a/--b/--c".to_string(),
        ));
    }
    if let Some(k) = p.k {
        return Ok(WeingartenSpec::gauss(k));
    }
    // The --m/--n path goes through the same normalization as --a/--b/--c,
    // so the two flag spellings agree exactly.
    let (a, b, c) = if let (Some(m), Some(n)) = (p.m, p.n) {
        (1.0, -m, n)
    } else {
        (p.a.unwrap(), p.b.unwrap(), p.c.unwrap())
    };
    match normalize_linear(a, b, c) {
        Ok(NormalizedOutcome::Linear {
            m,
            n,
            orientation_flipped,
        }) => Ok(WeingartenSpec::LinearPrincipal {
            m,
            n,
            orientation_flipped,
        }),
        Ok(NormalizedOutcome::ConstantPc(pc)) => Ok(match pc {
            weingarten_core::params::ConstantPrincipal::Kappa1(c1) => {
                WeingartenSpec::Kappa1Constant { c1 }
            }
            weingarten_core::params::ConstantPrincipal::Kappa2(c2) => {
                WeingartenSpec::Kappa2Constant { c2 }
            }
        }),
        Ok(NormalizedOutcome::Trivial(kind)) => Err(CliError::Usage(format!(
            "trivial Weingarten relation ({kind:?}): no regime to trace or classify"
        ))),
        Err(e) => Err(CliError::Usage(e.to_string())),
    }
}

/// TraceOptions, with overrides from the `key = value` file named by
/// WEINGARTEN_CONFIG. Unknown keys are rejected.
fn trace_options() -> Result<TraceOptions, CliError> {
    let mut opts = TraceOptions::default();
    let Ok(path) = std::env::var("WEINGARTEN_CONFIG") else {
        return Ok(opts);
    };
    let text = fs::read_to_string(&path)
        .map_err(|e| CliError::Usage(format!("cannot read config {path}: {e}")))?;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Usage(format!("config line {}: expected `key = value`", lineno + 1))
        })?;
        let value: f64 = value.trim().parse().map_err(|_| {
            CliError::Usage(format!("config line {}: bad number `{}`", lineno + 1, value.trim()))
        })?;
        match key.trim() {
            "s_max" => opts.s_max = value,
            "z_floor" => opts.z_floor = value,
            "rel_tol" => opts.rel_tol = value,
            "abs_tol" => opts.abs_tol = value,
            "max_step" => opts.max_step = value,
            "event_tol" => opts.event_tol = value,
            other => {
                return Err(CliError::Usage(format!(
                    "config line {}: unknown key `{other}`",
                    lineno + 1
                )))
            }
        }
    }
    opts.validate()
        .map_err(|e| CliError::Usage(format!("config: {e}")))?;
    Ok(opts)
}

fn traced(
    spec: &WeingartenSpec,
    theta0: f64,
    opts: &TraceOptions,
) -> Result<weingarten_core::GeneratingCurve, CliError> {
    trace(spec, &InitialConditions::new(theta0), opts)
        .map_err(|e| CliError::Runtime(e.to_string()))
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.cmd {
        Cmd::Trace {
            params,
            format,
            out,
        } => {
            let spec = resolve_spec(&params)?;
            let opts = trace_options()?;
            let curve = traced(&spec, params.theta0, &opts)?;
            let format = match format {
                FormatArg::Csv => CurveFormat::Csv,
                FormatArg::Json => CurveFormat::Json,
            };
            let mut sink: Box<dyn Write> = match out {
                Some(path) => Box::new(
                    fs::File::create(&path)
                        .map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?,
                ),
                None => Box::new(std::io::stdout().lock()),
            };
            write_curve(&curve, format, &mut sink)
                .map_err(|e| CliError::Runtime(e.to_string()))?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Classify { params } => {
            let spec = resolve_spec(&params)?;
            let opts = trace_options()?;
            let report = predict(&spec, params.theta0)
                .map_err(|e| CliError::Usage(e.to_string()))?;
            // Constant principal curvature specs are classified, not traced.
            let outcome = match spec {
                WeingartenSpec::Kappa1Constant { .. } | WeingartenSpec::Kappa2Constant { .. } => {
                    None
                }
                _ => {
                    let curve = traced(&spec, params.theta0, &opts)?;
                    Some(verify(&spec, &curve, &report))
                }
            };
            let doc = serde_json::json!({ "report": report, "outcome": outcome });
            println!("{}", serde_json::to_string_pretty(&doc).expect("serializable"));
            let passed = outcome.as_ref().is_none_or(|o| o.passed);
            Ok(if passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Cmd::Figures { out_dir } => {
            fs::create_dir_all(&out_dir)
                .map_err(|e| CliError::Runtime(format!("{}: {e}", out_dir.display())))?;
            for set in suite::figure_sets() {
                let svg =
                    suite::render_figure(&set).map_err(|e| CliError::Runtime(e.to_string()))?;
                let path = out_dir.join(set.file_name);
                fs::write(&path, svg)
                    .map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?;
                println!("{}", path.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Mesh {
            params,
            t_width,
            cols,
            out,
        } => {
            if cols < 2 {
                return Err(CliError::Usage("--cols must be at least 2".to_string()));
            }
            if t_width <= 0.0 {
                return Err(CliError::Usage("--t-width must be positive".to_string()));
            }
            let spec = resolve_spec(&params)?;
            let opts = trace_options()?;
            let curve = traced(&spec, params.theta0, &opts)?;
            let mesh =
                sweep_mesh(&curve, t_width, cols).map_err(|e| CliError::Runtime(e.to_string()))?;
            let mut file = fs::File::create(&out)
                .map_err(|e| CliError::Runtime(format!("{}: {e}", out.display())))?;
            write_obj(&mesh, &mut file).map_err(|e| CliError::Runtime(e.to_string()))?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Verify => {
            let results = suite::run_all();
            let mut all_passed = true;
            for r in &results {
                let status = if r.passed { "PASS" } else { "FAIL" };
                println!("[{status}] {:2}. {} — {}", r.id, r.name, r.detail);
                all_passed &= r.passed;
            }
            Ok(if all_passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => e.report(),
    }
}
