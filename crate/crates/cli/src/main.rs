//! `minpoints` command-line front end.
//!
//! Number specs:
//!
//! ```text
//! cf:[a0;a1,a2,...]        finite prefix; a trailing `...` repeats a1.. periodically
//! word:<word-id>           [0; w1, w2, ...] with partial quotients from a word
//! sq:<spec>                square of another spec
//! poly:<c0>,<c1>,...:<spec> c0 + c1 t + c2 t^2 + ... at t = <spec>
//! ```
//!
//! `--eta sq:xi` (the default) squares whatever `--xi` is.
//!
//! Word ids: `fib(a,b)`, `sturm([0;a1,a2,...],a,b)`, `per(p1,...)`, `expl(t1,...)`.
//!
//! Conics: `parabola` or `conic:poly:c_xx,c_xy,c_yy,c_x,c_y,c_1`.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 invalid input, 3 precision
//! exhausted, 4 a lemma check was violated.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use minpoints::analysis::{self, MeasureParams, VerifyConfig};
use minpoints::exact_reals::{format_rational, parse_rational};
use minpoints::geometry::ConicForm;
use minpoints::hp::{self, RealInterval};
use minpoints::minimal_points::{self, MinimalPoint};
use minpoints::words::WordSpec;
use minpoints::{Error, Rational, RealSpec, SweepOptions};

const TAIL_THRESHOLD: u64 = 1000;

#[derive(Debug, Parser)]
#[command(name = "minpoints", version, about = "Certified minimal points and growth checks")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// Write the main output here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true)]
    max_depth: Option<usize>,
    /// TOML file with the same keys as the flags; flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the first n letters of a word.
    Word { id: String, n: usize },
    /// Sweep x0 = 1..=x-max and export the minimal points.
    MinimalPoints(RunArgs),
    /// Sweep (or replay a sequence file) and print the verification report.
    Verify {
        #[command(flatten)]
        run: RunArgs,
        /// Verify a previously exported CSV or JSON sequence instead of sweeping.
        #[arg(long)]
        replay: Option<PathBuf>,
    },
    /// Bound calculators.
    #[command(subcommand)]
    Bounds(BoundsCommand),
}

#[derive(Debug, Default, Args)]
struct RunArgs {
    #[arg(long)]
    xi: Option<String>,
    #[arg(long)]
    eta: Option<String>,
    #[arg(long)]
    x_max: Option<u64>,
    #[arg(long)]
    lambda: Option<String>,
    /// Rational or `auto`.
    #[arg(long)]
    theta: Option<String>,
    #[arg(long)]
    conic: Option<String>,
}

#[derive(Debug, Subcommand)]
enum BoundsCommand {
    /// Subspace-count bound 2^(60 n^2) delta^(-7n) ln(4D) ln ln(4D).
    Evertse {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        delta: String,
        #[arg(long = "D")]
        big_d: u64,
        #[command(flatten)]
        base: BaseArgs,
    },
    /// Transcendence measure w(d) = exp(c ln d ln ln d) and ln H^(-w(d)).
    Measure {
        #[arg(long, default_value = "1")]
        c: String,
        #[arg(long)]
        d: u64,
        #[arg(long = "H", default_value_t = 2)]
        big_h: u64,
        #[command(flatten)]
        base: BaseArgs,
    },
}

#[derive(Debug, Args)]
#[group(multiple = false)]
struct BaseArgs {
    #[arg(long)]
    log2: bool,
    #[arg(long)]
    ln: bool,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    #[serde(alias = "xi_spec")]
    xi: Option<String>,
    #[serde(alias = "eta_spec")]
    eta: Option<String>,
    x_max: Option<u64>,
    max_depth: Option<usize>,
    lambda: Option<String>,
    theta: Option<String>,
    conic: Option<String>,
    output: Option<PathBuf>,
    format: Option<Format>,
    threads: Option<usize>,
}

/// Fully resolved run settings.
struct RunConfig {
    xi_text: String,
    eta_text: String,
    xi: RealSpec,
    eta: RealSpec,
    x_max: u64,
    lambda: Rational,
    theta: Rational,
    conic: ConicForm,
    conic_text: String,
    output: Option<PathBuf>,
    format: Format,
    sweep: SweepOptions,
}

#[derive(Debug)]
enum Failure {
    Input(String),
    Core(Error),
    Io(String),
    Violated,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Io(_) | Failure::Core(Error::Io(_)) => 1,
            Failure::Core(Error::PrecisionExhausted { .. }) => 3,
            Failure::Input(_) | Failure::Core(_) => 2,
            Failure::Violated => 4,
        }
    }
}

type CmdResult<T = ()> = Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Input(m) | Failure::Io(m) => eprintln!("error: {m}"),
                Failure::Core(e) => eprintln!("error: {e}"),
                Failure::Violated => eprintln!("a lemma check was violated"),
            }
            ExitCode::from(f.code())
        }
    }
}

fn run(cli: Cli) -> CmdResult {
    let file = match &cli.global.config {
        Some(path) => {
            let text = fs::read_to_string(path)?;
            toml::from_str::<FileConfig>(&text)
                .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?
        }
        None => FileConfig::default(),
    };
    match cli.command {
        Command::Word { id, n } => cmd_word(&id, n, &cli.global, &file),
        Command::MinimalPoints(args) => {
            let cfg = resolve(&args, &cli.global, file)?;
            cmd_minimal_points(&cfg)
        }
        Command::Verify { run, replay } => {
            let cfg = resolve(&run, &cli.global, file)?;
            cmd_verify(&cfg, replay.as_deref())
        }
        Command::Bounds(b) => cmd_bounds(b, &cli.global, &file),
    }
}

fn resolve(args: &RunArgs, global: &GlobalArgs, file: FileConfig) -> CmdResult<RunConfig> {
    let xi_text = args.xi.clone().or(file.xi).unwrap_or_else(|| "word:fib(1,2)".into());
    let eta_text = args.eta.clone().or(file.eta).unwrap_or_else(|| "sq:xi".into());
    let xi: RealSpec = xi_text.parse()?;
    let eta = match eta_text.as_str() {
        "sq:xi" => xi.clone().square(),
        "xi" => xi.clone(),
        other => other.parse()?,
    };
    let x_max = args.x_max.or(file.x_max).unwrap_or(10_000);
    if x_max < 1 {
        return Err(Failure::Input("x-max must be >= 1".into()));
    }
    let lambda_text = args.lambda.clone().or(file.lambda).unwrap_or_else(|| "3/5".into());
    let lambda = parse_rational(&lambda_text)?;
    let half = Rational::new(1.into(), 2.into());
    if lambda <= half || lambda >= Rational::from_integer(1.into()) {
        return Err(Failure::Input(format!("lambda = {lambda_text} must lie in (1/2, 1)")));
    }
    let theta_text = args.theta.clone().or(file.theta).unwrap_or_else(|| "auto".into());
    let theta = if theta_text == "auto" {
        analysis::auto_theta(&lambda)?
    } else {
        parse_rational(&theta_text)?
    };
    let conic_text = args.conic.clone().or(file.conic).unwrap_or_else(|| "parabola".into());
    let conic: ConicForm = conic_text.parse()?;
    let format = global.format.or(file.format).unwrap_or(Format::Csv);
    let mut sweep = SweepOptions::default();
    if let Some(d) = global.max_depth.or(file.max_depth) {
        if d < 2 {
            return Err(Failure::Input("max-depth must be >= 2".into()));
        }
        sweep = sweep.with_max_depth(d);
    }
    if let Some(t) = global.threads.or(file.threads) {
        if t == 0 {
            return Err(Failure::Input("threads must be >= 1".into()));
        }
        sweep = sweep.with_threads(t);
    }
    Ok(RunConfig {
        xi_text,
        eta_text,
        xi,
        eta,
        x_max,
        lambda,
        theta,
        conic,
        conic_text,
        output: global.output.clone().or(file.output),
        format,
        sweep,
    })
}

fn emit(output: Option<&Path>, text: &str) -> CmdResult {
    match output {
        Some(path) => fs::write(path, text)?,
        None => io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn cmd_word(id: &str, n: usize, global: &GlobalArgs, file: &FileConfig) -> CmdResult {
    let spec: WordSpec = id.parse()?;
    let letters = spec.letters(n)?;
    let line = letters.iter().map(u64::to_string).collect::<Vec<_>>().join(",");
    let out = global.output.as_deref().or(file.output.as_deref());
    emit(out, &format!("{line}\n"))
}

fn export(points: &[MinimalPoint], format: Format) -> CmdResult<String> {
    Ok(match format {
        Format::Csv => minimal_points::to_csv_string(points)?,
        Format::Json => minimal_points::to_json_string(points)?,
    })
}

fn cmd_minimal_points(cfg: &RunConfig) -> CmdResult {
    let seq = minimal_points::minimal_point_sequence(&cfg.xi, &cfg.eta, cfg.x_max, &cfg.sweep)?;
    emit(cfg.output.as_deref(), &export(&seq, cfg.format)?)?;

    let last = seq.last().expect("sweep always records x0 = 1");
    let mut summary = format!("points={} final_X={}", seq.len(), last.x);
    if last.delta.lo == Rational::from_integer(0.into()) && last.delta.is_exact() {
        summary.push_str(&format!(" delta=0 at X={} (sweep stopped)", last.x));
    }
    let usable = seq.iter().take_while(|p| p.delta.lo > Rational::from_integer(0.into())).count() + 1;
    let usable = usable.min(seq.len());
    if usable >= 2 {
        let window = &seq[..usable];
        let tail = analysis::tail_index_for(window, TAIL_THRESHOLD).unwrap_or(usable - 1);
        let est = analysis::estimate_lambda(window, tail)?;
        summary.push_str(&format!(
            " tail_lambda_min~{:.6} (i={}, tail from i={})",
            est.tail_min.approx, est.tail_min.index, est.tail_from
        ));
    }
    // keep stdout clean for the export when no output file is given
    if cfg.output.is_some() {
        println!("{summary}");
    } else {
        eprintln!("{summary}");
    }
    Ok(())
}

fn read_sequence(path: &Path) -> CmdResult<Vec<MinimalPoint>> {
    let text = fs::read_to_string(path)?;
    let trimmed = text.trim_start();
    let seq = if trimmed.starts_with('[') || trimmed.starts_with('{') {
        minimal_points::read_json(&text)?
    } else {
        minimal_points::read_csv(text.as_bytes())?
    };
    if seq.is_empty() {
        return Err(Failure::Input(format!("{}: no points", path.display())));
    }
    Ok(seq)
}

fn cmd_verify(cfg: &RunConfig, replay: Option<&Path>) -> CmdResult {
    let seq = match replay {
        Some(path) => read_sequence(path)?,
        None => minimal_points::minimal_point_sequence(&cfg.xi, &cfg.eta, cfg.x_max, &cfg.sweep)?,
    };
    let vc = VerifyConfig {
        xi_spec: cfg.xi_text.clone(),
        eta_spec: cfg.eta_text.clone(),
        x_max: cfg.x_max,
        max_depth: cfg.sweep.max_depth,
        lambda: cfg.lambda.clone(),
        theta: cfg.theta.clone(),
        conic: cfg.conic.clone(),
        conic_label: cfg.conic_text.clone(),
        tail_threshold: TAIL_THRESHOLD,
    };
    let report = analysis::verify_sequence(&seq, &vc)?;
    emit(cfg.output.as_deref(), &report.to_json()?)?;
    if report.any_violated() {
        return Err(Failure::Violated);
    }
    Ok(())
}

fn print_value(name: &str, v: &RealInterval, format: Format) {
    match format {
        Format::Json => {
            let b = analysis::BoundValue::from(v);
            println!(
                "{{\"{name}\": {{\"approx\": {:.12}, \"lo\": \"{}\", \"hi\": \"{}\"}}}}",
                b.approx,
                format_rational(&b.lo),
                format_rational(&b.hi)
            );
        }
        Format::Csv => println!("{name} = {:.12}", v.approx()),
    }
}

fn cmd_bounds(cmd: BoundsCommand, global: &GlobalArgs, file: &FileConfig) -> CmdResult {
    let format = global.format.or(file.format).unwrap_or(Format::Csv);
    match cmd {
        BoundsCommand::Evertse { n, delta, big_d, base } => {
            let delta = parse_rational(&delta)?;
            let v = analysis::evertse_count_log2(n, &delta, big_d)?;
            if base.ln {
                print_value("ln_count", &v.mul(hp::ln2()), format);
            } else {
                print_value("log2_count", &v, format);
            }
        }
        BoundsCommand::Measure { c, d, big_h, base } => {
            let c = parse_rational(&c)?;
            let m = analysis::measure_w(&MeasureParams { c, d, h: big_h.into() })?;
            print_value("w", &m.w, format);
            if base.log2 {
                print_value("log2_bound", &m.log_bound.div(hp::ln2())?, format);
            } else {
                print_value("log_bound", &m.log_bound, format);
            }
        }
    }
    Ok(())
}
