use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use krein_frames::analysis::{analyze, Outcome};
use krein_frames::genkit::{random_jframe, GenConfig};
use krein_frames::io::{FrameFile, InputError, OperatorFile, SynthesisDiagnostics};
use krein_frames::linalg::{hermitian_defect, norm2};
use krein_frames::sqrtpolar::synthesize_from_operator;
use krein_frames::svg::{enclosure_data, enclosure_svg};
use krein_frames::verify::{parse_sizes, run_suite, VerifyConfig};
use krein_frames::{is_jframe, KreinError, Tolerances};

const EXIT_FAILURE: u8 = 1;
const EXIT_NOT_JFRAME: u8 = 2;
const EXIT_VIOLATION: u8 = 3;
const EXIT_SIGN_MISMATCH: u8 = 4;
const EXIT_SPECTRAL_GATE: u8 = 5;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(name = "krein-frames", version, about = "J-frames in finite-dimensional Krein spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full analysis of a frame file.
    Analyze {
        input: PathBuf,
        /// Write the JSON report here.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Write the enclosure figure here.
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Override a tolerance, e.g. `--tol angle=1e-7`. Repeatable.
        #[arg(long = "tol", value_name = "KEY=VALUE")]
        tol: Vec<String>,
    },
    /// Draw a random J-frame.
    Generate {
        #[arg(long)]
        p: usize,
        #[arg(long)]
        q: usize,
        #[arg(long)]
        nplus: usize,
        #[arg(long)]
        nminus: usize,
        /// Norm of the angular operators.
        #[arg(long, default_value_t = 0.5)]
        cap: f64,
        /// Condition-number cap of the coefficient matrices.
        #[arg(long, default_value_t = 1e3)]
        cond: f64,
        #[arg(long, env = "KREIN_FRAMES_SEED")]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Spectral enclosure figure, or the region parameters as JSON.
    Enclosure {
        input: PathBuf,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Build a frame with a prescribed J-frame operator.
    Synthesize {
        #[arg(long)]
        operator: PathBuf,
        #[arg(long)]
        nplus: usize,
        #[arg(long)]
        nminus: usize,
        /// Seed of the random J-unitaries; identity maps when absent.
        #[arg(long, env = "KREIN_FRAMES_SEED")]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Randomized property suite.
    Verify {
        #[arg(long, default_value_t = 200)]
        seeds: u64,
        #[arg(long, default_value = "1+1,2+1,3+2,4+4")]
        sizes: String,
        #[arg(long, default_value_t = 0.3)]
        cap: f64,
        #[arg(long, default_value_t = 1.5)]
        cond: f64,
        /// First generator seed.
        #[arg(long, env = "KREIN_FRAMES_SEED", default_value_t = 0)]
        seed: u64,
        /// Harness self-test: scale every tolerance by this factor.
        #[arg(long, hide = true, default_value_t = 1.0)]
        corrupt_tol: f64,
    },
}

/// Error carrying its exit code.
struct Fail(u8, String);

impl From<InputError> for Fail {
    fn from(e: InputError) -> Self {
        Fail(EXIT_USAGE, e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Analyze { input, report, svg, tol } => cmd_analyze(&input, report.as_deref(), svg.as_deref(), &tol),
        Command::Generate {
            p,
            q,
            nplus,
            nminus,
            cap,
            cond,
            seed,
            out,
        } => cmd_generate(p, q, nplus, nminus, cap, cond, seed, &out),
        Command::Enclosure { input, svg } => cmd_enclosure(&input, svg.as_deref()),
        Command::Synthesize {
            operator,
            nplus,
            nminus,
            seed,
            out,
        } => cmd_synthesize(&operator, nplus, nminus, seed, &out),
        Command::Verify {
            seeds,
            sizes,
            cap,
            cond,
            seed,
            corrupt_tol,
        } => cmd_verify(seeds, &sizes, cap, cond, seed, corrupt_tol),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Fail(code, message)) => {
            eprintln!("error: {message}");
            ExitCode::from(code)
        }
    }
}

fn write(path: &Path, text: &str) -> Result<(), Fail> {
    std::fs::write(path, text).map_err(|e| Fail(EXIT_FAILURE, format!("cannot write {}: {e}", path.display())))
}

fn parse_tolerances(overrides: &[String]) -> Result<Tolerances, Fail> {
    let mut tol = Tolerances::default();
    for item in overrides {
        let usage = |m: String| Fail(EXIT_USAGE, format!("--tol {item}: {m}"));
        let (key, value) = item.split_once('=').ok_or_else(|| usage("expected KEY=VALUE".into()))?;
        let value: f64 = value.trim().parse().map_err(|_| usage("value is not a number".into()))?;
        if !(value.is_finite() && value >= 0.0) {
            return Err(usage("value must be finite and non-negative".into()));
        }
        let slot = match key.trim() {
            "rank" => &mut tol.rank,
            "pd" => &mut tol.pd,
            "contract" => &mut tol.contract,
            "angle" => &mut tol.angle,
            "real" => &mut tol.real,
            "encl" => &mut tol.encl,
            other => {
                return Err(usage(format!(
                    "unknown key `{other}` (rank, pd, contract, angle, real, encl)"
                )))
            }
        };
        *slot = value;
    }
    Ok(tol)
}

fn cmd_analyze(input: &Path, report_path: Option<&Path>, svg: Option<&Path>, overrides: &[String]) -> Result<u8, Fail> {
    let tol = parse_tolerances(overrides)?;
    let frame = FrameFile::read(input)?.to_frame()?;
    let report = analyze(&frame, &tol);
    if let Some(path) = report_path {
        write(path, &report.to_json())?;
    }
    let (np, nm) = (report.partition.plus.len(), report.partition.minus.len());
    println!("frame: {} vectors in C^{} ({np} positive, {nm} negative)", frame.len(), report.space.dim());
    match report.outcome {
        Outcome::NotJFrame => {
            println!("not a J-frame: {}", report.reasons.join("; "));
            return Ok(EXIT_NOT_JFRAME);
        }
        Outcome::Pass | Outcome::Violation => {}
    }
    let failing: Vec<_> = report.failing_checks().collect();
    println!("theorem checks: {} run, {} failed", report.checks.len(), failing.len());
    for c in &failing {
        println!("  FAIL {}: {:.3e} (tolerance {:.3e})", c.name, c.value, c.tolerance);
    }
    for c in report.advisories.iter().filter(|c| !c.pass) {
        println!("  note {}: {:.3e} (tolerance {:.3e})", c.name, c.value, c.tolerance);
    }
    if let Some(svg_path) = svg {
        match enclosure_data(&frame, &tol) {
            Ok((sigma, regions)) => write(svg_path, &enclosure_svg(&sigma, &regions))?,
            Err(e) => println!("no figure: {e}"),
        }
    }
    Ok(match report.outcome {
        Outcome::Pass => 0,
        _ => EXIT_VIOLATION,
    })
}

#[allow(clippy::too_many_arguments)]
fn cmd_generate(
    p: usize,
    q: usize,
    n_plus: usize,
    n_minus: usize,
    cap: f64,
    cond: f64,
    seed: Option<u64>,
    out: &Path,
) -> Result<u8, Fail> {
    let seed = seed.unwrap_or_else(rand::random);
    let cfg = GenConfig {
        angular_norm_cap: cap,
        conditioning_cap: cond,
        ..GenConfig::new(p, q, n_plus, n_minus, seed)
    };
    let frame = random_jframe(&cfg).map_err(|e| match e {
        KreinError::InvalidConfig(m) => Fail(EXIT_USAGE, m),
        other => Fail(EXIT_FAILURE, other.to_string()),
    })?;
    write(out, &FrameFile::from_frame(&frame).to_json())?;
    println!("seed {seed}");
    Ok(0)
}

fn cmd_enclosure(input: &Path, svg: Option<&Path>) -> Result<u8, Fail> {
    let tol = Tolerances::default();
    let frame = FrameFile::read(input)?.to_frame()?;
    let jr = is_jframe(&frame, &tol);
    if !jr.is_jframe {
        eprintln!("not a J-frame: {}", jr.failure_reason.unwrap_or_default());
        return Ok(EXIT_NOT_JFRAME);
    }
    let (sigma, regions) = enclosure_data(&frame, &tol).map_err(|e| Fail(EXIT_VIOLATION, e.to_string()))?;
    match svg {
        Some(path) => {
            write(path, &enclosure_svg(&sigma, &regions))?;
            println!("{} eigenvalues, {} regions", sigma.eigenvalues.len(), regions.len());
        }
        None => {
            let text = serde_json::to_string_pretty(&regions).expect("regions serialize");
            let _ = writeln!(std::io::stdout(), "{text}");
        }
    }
    Ok(0)
}

fn cmd_synthesize(operator: &Path, n_plus: usize, n_minus: usize, seed: Option<u64>, out: &Path) -> Result<u8, Fail> {
    let tol = Tolerances::default();
    let file = OperatorFile::read(operator)?;
    let space = file.space.space()?;
    let s = file.to_matrix()?;
    let defect = hermitian_defect(&(space.symmetry() * &s));
    if defect > 1e-10 * norm2(&s).max(f64::MIN_POSITIVE) {
        return Err(InputError::Field {
            field: "matrix".into(),
            message: format!("J·matrix is not Hermitian (defect {defect:.3e})"),
        }
        .into());
    }
    match synthesize_from_operator(&s, &space, n_plus, n_minus, seed, &tol) {
        Ok(synth) => {
            write(out, &FrameFile::from_frame(&synth.frame).to_json())?;
            println!("‖TT⁺ − S‖/‖S‖ = {:.3e}", synth.operator_residual);
            Ok(0)
        }
        Err(KreinError::SignPartitionMismatch(m)) => {
            let mut file = FrameFile::from_frame(&m.frame);
            file.diagnostics = Some(SynthesisDiagnostics {
                prescribed_n_plus: n_plus,
                prescribed_n_minus: n_minus,
                seed,
                operator_residual: m.operator_residual,
                mismatched: m.mismatched.clone(),
                is_jframe: m.is_jframe,
            });
            write(out, &file.to_json())?;
            println!("‖TT⁺ − S‖/‖S‖ = {:.3e}", m.operator_residual);
            eprintln!(
                "realized signs differ from the prescribed partition at columns {:?} (J-frame under its own signs: {})",
                m.mismatched, m.is_jframe
            );
            Ok(EXIT_SIGN_MISMATCH)
        }
        Err(e @ (KreinError::SpectrumNotInRightHalfPlane { .. } | KreinError::RecurrenceBreakdown(_))) => {
            Err(Fail(EXIT_SPECTRAL_GATE, e.to_string()))
        }
        Err(e @ (KreinError::InvalidConfig(_) | KreinError::DimensionMismatch { .. })) => {
            Err(Fail(EXIT_USAGE, e.to_string()))
        }
        Err(e @ KreinError::TheoremViolation { .. }) => Err(Fail(EXIT_VIOLATION, e.to_string())),
        Err(e) => Err(Fail(EXIT_FAILURE, e.to_string())),
    }
}

fn cmd_verify(seeds: u64, sizes: &str, cap: f64, cond: f64, seed: u64, corrupt_tol: f64) -> Result<u8, Fail> {
    let sizes = parse_sizes(sizes).map_err(|m| Fail(EXIT_USAGE, format!("--sizes: {m}")))?;
    let cfg = VerifyConfig {
        seeds,
        sizes,
        base_seed: seed,
        angular_norm_cap: cap,
        conditioning_cap: cond,
        tolerance_scale: corrupt_tol,
    };
    GenConfig {
        angular_norm_cap: cap,
        conditioning_cap: cond,
        ..cfg.instance(0)
    }
    .validate()
    .map_err(|e| Fail(EXIT_USAGE, e.to_string()))?;
    let started = std::time::Instant::now();
    let report = run_suite(&cfg);
    print!("{}", report.table());
    println!("{seeds} instances in {:.2} s", started.elapsed().as_secs_f64());
    if report.all_pass() {
        return Ok(0);
    }
    Err(Fail(EXIT_VIOLATION, format!("failing properties: {}", report.failing().join(", "))))
}
