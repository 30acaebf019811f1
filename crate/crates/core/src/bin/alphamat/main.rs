mod parse;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use alphamat::distribution::{distribution_experiment, Family, Mode};
use alphamat::multigrid::{cosine_prolongation, multigrid_report, pathological_symmetry_probe, ProjectionSetup};
use alphamat::spectra::{alpha_circulant_spectrum, svd_oracle, zero_alpha_reduction, ReductionKind};
use alphamat::structured::{alpha_circulant, alpha_toeplitz, gcd_data};
use alphamat::verify::{run_verification, VerifyConfig};
use alphamat::{MultiIndex, StructuredMatrix, SymbolSpec};

/// α-circulant and α-Toeplitz matrices: generation, singular values, verification
/// sweeps, distribution experiments and multigrid projections.
#[derive(Parser, Serialize)]
#[command(name = "alphamat", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Base seed for randomized sweeps (SplitMix64).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Build a matrix and write it as matrix-text.
    Gen(GenArgs),
    /// Singular values of an α-circulant or α-Toeplitz matrix.
    Singvals(SingvalsArgs),
    /// Identity and closed-form sweeps; exits 1 on any failed residual.
    Verify(VerifyArgs),
    /// Σ_σ(F, A_n) over a size sweep against the analytic limit.
    Distribution(DistributionArgs),
    /// Coarse-grid operator of a circulant system and its spectra.
    Multigrid(MultigridArgs),
}

#[derive(Args, Serialize)]
#[group(required = true, multiple = false)]
struct SymbolArgs {
    /// Named symbol.
    #[arg(long, value_enum)]
    builtin: Option<Builtin>,
    /// Comma-separated `re` or `re+imi` coefficients a_0, a_1, ... in lexicographic order.
    #[arg(long, allow_hyphen_values = true)]
    coeffs: Option<String>,
    /// Coefficient file: one `j1 .. jd re im` line per coefficient.
    #[arg(long)]
    coeff_file: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Builtin {
    /// 2 - 2cos x
    Laplace1d,
    /// 1 + e^{ix}
    Shift1,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Kind {
    Toeplitz,
    Circulant,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Format {
    Csv,
    Json,
    MatrixText,
}

#[derive(Args, Serialize)]
struct OutputArgs {
    /// Output file (standard output if absent).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format; inferred from the --out extension when absent.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args, Serialize)]
struct ShapeArgs {
    /// Level sizes, comma-separated.
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<usize>,
    /// Shift vector, one entry per level.
    #[arg(long, value_delimiter = ',', required = true)]
    alpha: Vec<usize>,
    #[arg(long, value_enum, default_value = "toeplitz")]
    kind: Kind,
}

#[derive(Args, Serialize)]
struct GenArgs {
    #[command(flatten)]
    symbol: SymbolArgs,
    #[command(flatten)]
    shape: ShapeArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Serialize)]
struct SingvalsArgs {
    #[command(flatten)]
    symbol: SymbolArgs,
    #[command(flatten)]
    shape: ShapeArgs,
    /// Always use the dense SVD, even when a closed form exists.
    #[arg(long)]
    oracle: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Serialize)]
struct VerifyArgs {
    /// Largest size in the closed-form sweep.
    #[arg(long, default_value_t = 24)]
    max_n: usize,
    /// Spectral tolerance, scaled by max(1, ‖a‖₁).
    #[arg(long, default_value_t = 1e-10)]
    tolerance: f64,
    /// Random coefficient vectors per (n, α).
    #[arg(long, default_value_t = 5)]
    seeds: usize,
    #[arg(long, default_value_t = 20)]
    identity_max_n: usize,
    #[arg(long, default_value_t = 5)]
    identity_max_alpha: usize,
    #[arg(long, default_value_t = 1e-12)]
    identity_tolerance: f64,
    #[arg(long, hide = true)]
    corrupt: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum ModeArg {
    ClosedForm,
    Oracle,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum FamilyArg {
    Toeplitz,
    Circulant,
}

#[derive(Args, Serialize)]
struct DistributionArgs {
    #[command(flatten)]
    symbol: SymbolArgs,
    #[arg(long, value_delimiter = ',', required = true)]
    alpha: Vec<usize>,
    /// Increasing sizes: `16,32,64` or multilevel `2x3x4,4x6x8`.
    #[arg(long, required = true)]
    sizes: String,
    /// Test functions `hat:C:W`, `bump:C:S:R`, `clamp:C`.
    #[arg(long, default_value = "bump:0:0.5:1.5,bump:1.4142135623730951:0.25:0.75,clamp:5")]
    functions: String,
    #[arg(long, value_enum, default_value = "oracle")]
    mode: ModeArg,
    #[arg(long, value_enum, default_value = "toeplitz")]
    family: FamilyArg,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Serialize)]
struct MultigridArgs {
    /// Symbol f of the fine circulant A_n = C_n(f).
    #[command(flatten)]
    symbol: SymbolArgs,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    alpha: usize,
    /// Prolongation symbol coefficients q_0, q_1, ... (default 1 + cos x).
    #[arg(long, allow_hyphen_values = true, conflicts_with = "q_file")]
    q: Option<String>,
    #[arg(long)]
    q_file: Option<PathBuf>,
    /// Also compare the coarse-grid fold of f for α = 2 and this α.
    #[arg(long)]
    probe_alpha: Option<usize>,
    #[command(flatten)]
    output: OutputArgs,
}

fn read_symbol_file(path: &Path) -> Result<SymbolSpec> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    SymbolSpec::from_text(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Inline lists fill `0..len` for one level or the box `n` for several.
fn inline_symbol(list: &str, n: Option<&MultiIndex>) -> Result<SymbolSpec> {
    let a = parse::coeff_list(list)?;
    match n {
        Some(n) if n.len() > 1 => {
            let total = n.product() as usize;
            if a.len() != total {
                bail!("{} coefficients given; a {}-level inline list needs exactly n̂ = {total}", a.len(), n.len());
            }
            Ok(SymbolSpec::from_box_vector(&a, n)?)
        }
        _ => Ok(SymbolSpec::from_box_vector(&a, &MultiIndex::from_sizes(&[a.len()]))?),
    }
}

fn symbol(args: &SymbolArgs, n: Option<&MultiIndex>) -> Result<SymbolSpec> {
    match (args.builtin, &args.coeffs, &args.coeff_file) {
        (Some(Builtin::Laplace1d), ..) => Ok(SymbolSpec::laplace1d()),
        (Some(Builtin::Shift1), ..) => Ok(SymbolSpec::shift1()),
        (_, Some(list), _) => inline_symbol(list, n),
        (_, _, Some(path)) => read_symbol_file(path),
        _ => bail!("one of --builtin, --coeffs, --coeff-file is required"),
    }
}

fn shape(args: &ShapeArgs) -> Result<(MultiIndex, MultiIndex)> {
    if args.n.len() != args.alpha.len() {
        bail!("--n has {} levels but --alpha has {}", args.n.len(), args.alpha.len());
    }
    if args.n.contains(&0) {
        bail!("level sizes must be positive");
    }
    Ok((MultiIndex::from_sizes(&args.n), MultiIndex::from_sizes(&args.alpha)))
}

fn resolve_format(out: &OutputArgs, default: Format, allowed: &[Format]) -> Result<Format> {
    let inferred = out.out.as_deref().and_then(|p| p.extension()).and_then(|e| e.to_str()).and_then(|e| {
        match e.to_ascii_lowercase().as_str() {
            "csv" => Some(Format::Csv),
            "json" => Some(Format::Json),
            "txt" | "mat" => Some(Format::MatrixText),
            _ => None,
        }
    });
    let f = out.format.or(inferred).unwrap_or(default);
    if !allowed.contains(&f) {
        bail!("format {f:?} is not available for this command");
    }
    Ok(f)
}

fn emit(out: &OutputArgs, body: &str) -> Result<()> {
    match &out.out {
        Some(p) => fs::write(p, body).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(body.as_bytes())?;
            Ok(stdout.flush()?)
        }
    }
}

fn envelope<T: Serialize>(cli: &Cli, results: &T) -> Result<String> {
    #[derive(Serialize)]
    struct Envelope<'a, T> {
        config: &'a Cli,
        results: &'a T,
    }
    let mut s = serde_json::to_string_pretty(&Envelope { config: cli, results })?;
    s.push('\n');
    Ok(s)
}

fn build(kind: Kind, s: &SymbolSpec, n: &MultiIndex, alpha: &MultiIndex) -> Result<StructuredMatrix> {
    Ok(match kind {
        Kind::Toeplitz => alpha_toeplitz(s, n, alpha)?,
        Kind::Circulant => alpha_circulant(&s.wrapped_box_vector(n)?, n, alpha)?,
    })
}

fn cmd_gen(cli: &Cli, args: &GenArgs) -> Result<ExitCode> {
    let (n, alpha) = shape(&args.shape)?;
    let s = symbol(&args.symbol, Some(&n))?;
    let m = build(args.shape.kind, &s, &n, &alpha)?;
    let format = resolve_format(&args.output, Format::MatrixText, &[Format::MatrixText, Format::Json])?;

    let mut info = format!("kind={:?} n={n} alpha={alpha}", m.kind);
    for (k, (&nk, &ak)) in args.shape.n.iter().zip(&args.shape.alpha).enumerate() {
        if ak > 0 {
            let g = gcd_data(nk, ak)?;
            info.push_str(&format!(
                " level{}: gcd={} n_alpha={} alpha_check={} mu_alpha={} d_tail={}",
                k + 1,
                g.g,
                g.n_alpha,
                g.alpha_check,
                g.mu_alpha,
                g.d_tail
            ));
        }
    }
    eprintln!("{info}");

    let body = match format {
        Format::Json => {
            let rows: Vec<Vec<[f64; 2]>> = (0..m.matrix.rows())
                .map(|r| (0..m.matrix.cols()).map(|c| [m.matrix.get(r, c).re, m.matrix.get(r, c).im]).collect())
                .collect();
            #[derive(Serialize)]
            struct Out<'a> {
                kind: alphamat::MatrixKind,
                n: &'a MultiIndex,
                alpha: &'a MultiIndex,
                entries: Vec<Vec<[f64; 2]>>,
            }
            envelope(cli, &Out { kind: m.kind, n: &n, alpha: &alpha, entries: rows })?
        }
        _ => m.matrix.to_text(),
    };
    emit(&args.output, &body)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_singvals(cli: &Cli, args: &SingvalsArgs) -> Result<ExitCode> {
    let (n, alpha) = shape(&args.shape)?;
    let s = symbol(&args.symbol, Some(&n))?;
    let spec = match (args.oracle, args.shape.kind) {
        (false, Kind::Circulant) => alpha_circulant_spectrum(&s.wrapped_box_vector(&n)?, &n, &alpha)?,
        (false, Kind::Toeplitz) if !alpha.is_positive() => {
            zero_alpha_reduction(&s, &n, &alpha, ReductionKind::Toeplitz)?
        }
        _ => svd_oracle(&build(args.shape.kind, &s, &n, &alpha)?.matrix)?,
    };
    let body = match resolve_format(&args.output, Format::Csv, &[Format::Csv, Format::Json])? {
        Format::Json => envelope(cli, &spec)?,
        _ => spec.to_csv(),
    };
    emit(&args.output, &body)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(cli: &Cli, args: &VerifyArgs) -> Result<ExitCode> {
    let cfg = VerifyConfig {
        max_n: args.max_n,
        seeds: args.seeds,
        tolerance: args.tolerance,
        identity_tolerance: args.identity_tolerance,
        identity_max_n: args.identity_max_n,
        identity_max_alpha: args.identity_max_alpha,
        seed: cli.seed,
        corrupt: args.corrupt,
    };
    let report = run_verification(&cfg)?;
    let body = match resolve_format(&args.output, Format::Csv, &[Format::Csv, Format::Json])? {
        Format::Json => envelope(cli, &report)?,
        _ => report.to_csv(),
    };
    emit(&args.output, &body)?;
    match report.first_failure() {
        None => {
            eprintln!("verify: all {} checks passed", report.records.len());
            Ok(ExitCode::SUCCESS)
        }
        Some(f) => {
            eprintln!(
                "verify: {} of {} checks failed; first: {} at n={} alpha={} seed={} (residual {:e} > {:e})",
                report.failures,
                report.records.len(),
                f.check,
                f.n,
                f.alpha,
                f.seed,
                f.residual,
                f.tolerance
            );
            Ok(ExitCode::from(1))
        }
    }
}

fn cmd_distribution(cli: &Cli, args: &DistributionArgs) -> Result<ExitCode> {
    let d = args.alpha.len();
    let sizes = parse::size_list(&args.sizes, d)?;
    let s = symbol(&args.symbol, sizes.first())?;
    let functions = parse::function_list(&args.functions)?;
    let mode = match args.mode {
        ModeArg::ClosedForm => Mode::ClosedForm,
        ModeArg::Oracle => Mode::Oracle,
    };
    let family = match args.family {
        FamilyArg::Toeplitz => Family::AlphaToeplitz,
        FamilyArg::Circulant => Family::AlphaCirculant,
    };
    let alpha = MultiIndex::from_sizes(&args.alpha);
    let report = distribution_experiment(&s, &alpha, &sizes, &functions, mode, family)?;
    let body = match resolve_format(&args.output, Format::Csv, &[Format::Csv, Format::Json])? {
        Format::Json => envelope(cli, &report)?,
        _ => report.to_csv(),
    };
    emit(&args.output, &body)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_multigrid(cli: &Cli, args: &MultigridArgs) -> Result<ExitCode> {
    let f = symbol(&args.symbol, None)?;
    let q = match (&args.q, &args.q_file) {
        (Some(list), _) => inline_symbol(list, None)?,
        (_, Some(path)) => read_symbol_file(path)?,
        _ => cosine_prolongation(),
    };
    let setup = ProjectionSetup::new(args.n, args.alpha, f, q);
    let report = multigrid_report(&setup)?;
    let probe = match args.probe_alpha {
        Some(a) => Some(pathological_symmetry_probe(&setup.a_fine, 0.0, args.n, a)?),
        None => None,
    };
    let body = match resolve_format(&args.output, Format::Json, &[Format::Csv, Format::Json])? {
        Format::Csv => {
            let mut out = String::from("index,projected_eig,direct_eig,projector_singval,oracle_singval\n");
            for i in 0..report.projected_eigs.len() {
                out.push_str(&format!(
                    "{i},{:?},{:?},{:?},{:?}\n",
                    report.projected_eigs[i],
                    report.direct_eigs[i],
                    report.projector_singvals[i],
                    report.oracle_singvals[i]
                ));
            }
            out
        }
        _ => {
            #[derive(Serialize)]
            struct Out<'a> {
                report: &'a alphamat::multigrid::MultigridReport,
                #[serde(skip_serializing_if = "Option::is_none")]
                symmetry_probe: Option<alphamat::multigrid::SymmetryProbe>,
            }
            envelope(cli, &Out { report: &report, symmetry_probe: probe })?
        }
    };
    emit(&args.output, &body)?;
    Ok(ExitCode::SUCCESS)
}

fn run(cli: &Cli) -> Result<ExitCode> {
    match &cli.command {
        Command::Gen(a) => cmd_gen(cli, a),
        Command::Singvals(a) => cmd_singvals(cli, a),
        Command::Verify(a) => cmd_verify(cli, a),
        Command::Distribution(a) => cmd_distribution(cli, a),
        Command::Multigrid(a) => cmd_multigrid(cli, a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            let msg = format!("{e:#}").replace('\n', " ");
            eprintln!("alphamat: error: {msg}");
            ExitCode::from(2)
        }
    }
}
