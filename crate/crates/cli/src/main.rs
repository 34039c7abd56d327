use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use srt_select::engine::{self, ParamMenu};
use srt_select::params::{self, RadixConfig};
use srt_select::plot::{render_pd_svg, PlotOptions};
use srt_select::tables::{self, SelectionTable, TableFormat};
use srt_select::verify::{self, EstimateModel, Schedule, Side, SimulationSummary, VerificationReport};

mod repro;

#[derive(Parser)]
#[command(name = "srt-select", version, about = "Truncation parameters and selection tables for SRT division")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the valid (u, t) pairs for a digit set and mark the cheapest.
    Params {
        #[command(flatten)]
        radix: Radix,
        #[command(flatten)]
        out: Output,
    },
    /// Generate a selection-constant table.
    Table {
        #[command(flatten)]
        radix: Radix,
        #[command(flatten)]
        pair: Pair,
        #[command(flatten)]
        out: Output,
    },
    /// Check a table against the digit regions of the P-D plane.
    Verify {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        out: Output,
    },
    /// Run seeded divisions through a table.
    Simulate {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        /// Quotient digits per division.
        #[arg(short = 'n', long, default_value_t = 12)]
        digits: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// truncate, carry-save or carry-save-lag.
        #[arg(long, default_value = "truncate")]
        model: EstimateModel,
        /// uniform (random operands) or edges (one division per threshold edge; ignores --trials).
        #[arg(long, default_value = "uniform")]
        schedule: Schedule,
        #[command(flatten)]
        out: Output,
    },
    /// Digit sets of radix 2^p, β/2 <= a < β-1, whose minimal u needs t̂ + 1.
    Sweep {
        /// Range of p, e.g. 2..7 (inclusive) or 5.
        #[arg(long = "p", default_value = "2..7", value_parser = parse_bits)]
        bits: (u32, u32),
        #[command(flatten)]
        out: Output,
    },
    /// Recompute the reference numbers and report PASS/FAIL for each.
    Repro {
        #[command(flatten)]
        out: Output,
    },
    /// Draw the P-D diagram of a table as SVG, violations highlighted.
    Plot {
        #[command(flatten)]
        source: Source,
        /// Divisor window, e.g. 0.5,0.6.
        #[arg(long, value_parser = parse_window)]
        y_range: Option<(f64, f64)>,
        /// Shifted-remainder window, e.g. 6,8.
        #[arg(long, value_parser = parse_window)]
        p_range: Option<(f64, f64)>,
        #[arg(long, default_value_t = 900)]
        width: u32,
        #[arg(long, default_value_t = 640)]
        height: u32,
        /// Output file; stdout when absent.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Radix {
    /// Radix, a power of two from 4 to 128.
    #[arg(long, short = 'p')]
    beta: u32,
    /// Largest digit.
    #[arg(short)]
    a: u32,
}

#[derive(Args)]
struct Pair {
    /// Divisor bits; the cheapest valid pair is used when omitted.
    #[arg(short)]
    u: Option<u32>,
    /// Remainder bits; requires -u. Defaults to the engine's choice for u.
    #[arg(short)]
    t: Option<u32>,
    /// Build the table even if the engine does not validate (u, t).
    #[arg(long = "unsafe")]
    allow_unvalidated: bool,
}

#[derive(Args)]
struct Source {
    /// Table file (JSON, or CSV with --beta and -t); `-` for stdin. Without
    /// it the table is built from --beta, -a, -u, -t.
    table: Option<PathBuf>,
    #[arg(long, short = 'p')]
    beta: Option<u32>,
    #[arg(short)]
    a: Option<u32>,
    #[command(flatten)]
    pair: Pair,
}

#[derive(Args)]
struct Output {
    /// json, csv or text. Tables and verification reports default to json,
    /// everything else to text.
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Output file; stdout when absent.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

fn parse_bits(s: &str) -> Result<(u32, u32), String> {
    let (lo, hi) = match s.split_once("..") {
        Some((lo, hi)) => (lo, hi.trim_start_matches('=')),
        None => (s, s),
    };
    let lo: u32 = lo.trim().parse().map_err(|_| format!("bad range `{s}`"))?;
    let hi: u32 = hi.trim().parse().map_err(|_| format!("bad range `{s}`"))?;
    if lo > hi || lo < params::MIN_BITS || hi > params::MAX_BITS {
        return Err(format!("p range must lie within {}..{}", params::MIN_BITS, params::MAX_BITS));
    }
    Ok((lo, hi))
}

fn parse_window(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or("expected lo,hi")?;
    let a: f64 = a.trim().parse().map_err(|_| format!("bad number `{a}`"))?;
    let b: f64 = b.trim().parse().map_err(|_| format!("bad number `{b}`"))?;
    if a.partial_cmp(&b) != Some(std::cmp::Ordering::Less) {
        return Err("lo must be below hi".into());
    }
    Ok((a, b))
}

/// Exit 1: the configuration or table is mathematically invalid.
/// Exit 2: usage, parse and I/O errors.
enum Failure {
    Invalid(String),
    Usage(String),
}

impl From<srt_select::Error> for Failure {
    fn from(e: srt_select::Error) -> Self {
        use srt_select::Error as E;
        match e {
            E::UBelowMinimum { .. }
            | E::UOutOfRange { .. }
            | E::TBelowPrime { .. }
            | E::NotValidated { .. }
            | E::Arith(_) => Failure::Invalid(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type CmdResult = Result<ExitCode, Failure>;

fn open_output(path: &Option<PathBuf>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_all(path: &Option<PathBuf>, text: &str) -> io::Result<()> {
    let mut w = open_output(path)?;
    w.write_all(text.as_bytes())?;
    w.flush()
}

fn radix(beta: u32, a: u32) -> Result<RadixConfig, Failure> {
    Ok(RadixConfig::new(beta, a)?)
}

fn resolve_table(cfg: &RadixConfig, pair: &Pair) -> Result<SelectionTable, Failure> {
    let (u, t) = match (pair.u, pair.t) {
        (None, Some(_)) => return Err(Failure::Usage("-t needs -u".into())),
        (None, None) => {
            let best = engine::enumerate_params(cfg).best_pair();
            (best.u, best.t)
        }
        (Some(u), Some(t)) => (u, t),
        (Some(u), None) => (u, engine::decide_t(cfg, u)?.t_final),
    };
    Ok(if pair.allow_unvalidated {
        tables::build_table_unvalidated(cfg, u, t)?
    } else {
        tables::build_table(cfg, u, t)?
    })
}

fn load_table(source: &Source) -> Result<SelectionTable, Failure> {
    let Some(path) = &source.table else {
        let (Some(beta), Some(a)) = (source.beta, source.a) else {
            return Err(Failure::Usage("give a table file or --beta and -a".into()));
        };
        return resolve_table(&radix(beta, a)?, &source.pair);
    };
    let mut text = String::new();
    if path == Path::new("-") {
        io::stdin().read_to_string(&mut text)?;
    } else {
        BufReader::new(File::open(path)?).read_to_string(&mut text)?;
    }
    let is_csv = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) || !text.trim_start().starts_with('{');
    if is_csv {
        let (Some(beta), Some(t)) = (source.beta, source.pair.t) else {
            return Err(Failure::Usage("CSV tables need --beta and -t".into()));
        };
        Ok(tables::parse_csv(text.as_bytes(), beta, t)?)
    } else {
        Ok(tables::parse_json(text.as_bytes())?)
    }
}

fn status(ok: bool) -> ExitCode {
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn params_text(menu: &ParamMenu) -> String {
    let mut s = String::new();
    let cfg = &menu.cfg;
    let _ = writeln!(s, "beta={} a={} rho={}", cfg.beta(), cfg.a(), cfg.rho());
    let _ = writeln!(s, "u_min={} u_max={} t'={}", menu.u_min, menu.u_max, params::t_prime(cfg));
    let _ = writeln!(s, "{:>3} {:>5} {:>6} {:>6} {:>3} {:>4}", "u", "t_hat", "simple", "rest", "t", "u+t");
    let verdict = |failed: bool| if failed { "fail" } else { "ok" };
    for (i, e) in menu.entries.iter().enumerate() {
        let rest = if e.rest_checked { verdict(e.rest_failed) } else { "-" };
        let mark = if i == menu.best { "  *" } else { "" };
        let _ = writeln!(
            s,
            "{:>3} {:>5} {:>6} {:>6} {:>3} {:>4}{mark}",
            e.u,
            e.t_hat,
            verdict(e.simple_failed),
            rest,
            e.t_final,
            e.pair().cost()
        );
    }
    let best = menu.best_pair();
    let _ = writeln!(s, "best: u={} t={}", best.u, best.t);
    s
}

fn params_csv(menu: &ParamMenu) -> String {
    let mut s = String::from("u,t_hat,simple_failed,rest_failed,t,cost\n");
    for e in &menu.entries {
        let rest = if e.rest_checked { e.rest_failed.to_string() } else { String::new() };
        let _ = writeln!(s, "{},{},{},{},{},{}", e.u, e.t_hat, e.simple_failed, rest, e.t_final, e.pair().cost());
    }
    s
}

fn cmd_params(radix_args: &Radix, out: &Output) -> CmdResult {
    let menu = engine::enumerate_params(&radix(radix_args.beta, radix_args.a)?);
    let text = match out.format.unwrap_or(Format::Text) {
        Format::Text => params_text(&menu),
        Format::Csv => params_csv(&menu),
        Format::Json => format!("{}\n", menu.to_json()),
    };
    write_all(&out.output, &text)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_table(radix_args: &Radix, pair: &Pair, out: &Output) -> CmdResult {
    let table = resolve_table(&radix(radix_args.beta, radix_args.a)?, pair)?;
    let format = match out.format.unwrap_or(Format::Json) {
        Format::Json => TableFormat::Json,
        Format::Csv => TableFormat::Csv,
        Format::Text => TableFormat::Text,
    };
    let mut w = open_output(&out.output)?;
    tables::emit_table(&table, format, &mut w)?;
    w.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn report_text(report: &VerificationReport) -> String {
    let mut s = format!(
        "beta={} a={} u={} t={}: {} ({} entries checked, {} violations)\n",
        report.cfg.beta(),
        report.cfg.a(),
        report.u,
        report.t,
        if report.is_valid() { "valid" } else { "INVALID" },
        report.checked,
        report.violations.len()
    );
    for v in &report.violations {
        let _ = writeln!(
            s,
            "  k={} s={} selects {} but the {} edge of its rectangle leaves the region (threshold d={})",
            v.k,
            v.s,
            v.chosen_digit(),
            side_name(v.side),
            v.d
        );
    }
    s
}

fn side_name(side: Side) -> &'static str {
    match side {
        Side::Lower => "lower",
        Side::Upper => "upper",
    }
}

fn cmd_verify(source: &Source, out: &Output) -> CmdResult {
    let table = load_table(source)?;
    let report = verify::verify_table_geometric(&table);
    let text = match out.format.unwrap_or(Format::Json) {
        Format::Json => format!("{}\n", report.to_json()),
        Format::Text => report_text(&report),
        Format::Csv => {
            let mut s = String::from("k,s,d,side\n");
            for v in &report.violations {
                let _ = writeln!(s, "{},{},{},{}", v.k, v.s, v.d, side_name(v.side));
            }
            s
        }
    };
    write_all(&out.output, &text)?;
    Ok(status(report.is_valid()))
}

fn summary_text(summary: &SimulationSummary) -> String {
    let model = serde_json::to_value(summary.model).ok();
    let schedule = serde_json::to_value(summary.schedule).ok();
    let name =
        |v: &Option<serde_json::Value>| v.as_ref().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default();
    let mut s = format!(
        "{}/{} ok (seed {}, model {}, schedule {}, {} digits)\n",
        summary.passed,
        summary.trials,
        summary.seed,
        name(&model),
        name(&schedule),
        summary.digits
    );
    if let Some(f) = &summary.first_failure {
        let _ = writeln!(
            s,
            "first failure: trial {} x={} y={} {:?} at step {}",
            f.trial, f.x, f.y, f.failure.kind, f.failure.step
        );
    }
    s
}

fn cmd_simulate(
    source: &Source,
    trials: usize,
    digits: usize,
    seed: u64,
    model: EstimateModel,
    schedule: Schedule,
    out: &Output,
) -> CmdResult {
    if digits == 0 {
        return Err(Failure::Usage("-n must be at least 1".into()));
    }
    let table = load_table(source)?;
    let summary = match schedule {
        Schedule::Uniform => verify::run_trials(&table, trials, digits, seed, model)?,
        Schedule::Edges => verify::run_edge_trials(&table, digits, seed, model)?,
    };
    let text = match out.format.unwrap_or(Format::Text) {
        Format::Json => format!("{}\n", serde_json::to_string(&summary).map_err(|e| Failure::Usage(e.to_string()))?),
        Format::Text => summary_text(&summary),
        Format::Csv => format!(
            "seed,trials,digits,passed,failed\n{},{},{},{},{}\n",
            summary.seed, summary.trials, summary.digits, summary.passed, summary.failed
        ),
    };
    write_all(&out.output, &text)?;
    Ok(status(summary.all_ok()))
}

fn cmd_sweep(bits: (u32, u32), out: &Output) -> CmdResult {
    let found = engine::sweep_accept_list(bits.0..=bits.1);
    let text = match out.format.unwrap_or(Format::Text) {
        Format::Json => {
            let list: Vec<_> = found.iter().map(|(b, a)| serde_json::json!({"beta": b, "a": a})).collect();
            format!("{}\n", serde_json::Value::from(list))
        }
        Format::Csv => {
            let mut s = String::from("beta,a\n");
            for (b, a) in &found {
                let _ = writeln!(s, "{b},{a}");
            }
            s
        }
        Format::Text => {
            let mut s = String::new();
            for (b, a) in &found {
                let _ = writeln!(s, "({b}, {a})");
            }
            s
        }
    };
    write_all(&out.output, &text)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_plot(source: &Source, opts: PlotOptions, output: &Option<PathBuf>) -> CmdResult {
    let table = load_table(source)?;
    let report = verify::verify_table_geometric(&table);
    write_all(output, &render_pd_svg(&table, &report.violations, &opts))?;
    Ok(ExitCode::SUCCESS)
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(value) = std::env::var("SRT_SELECT_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Usage(format!("SRT_SELECT_THREADS must be a positive integer, got `{value}`")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Failure::Usage(e.to_string()))
}

fn run(cli: Cli) -> CmdResult {
    configure_threads()?;
    match &cli.command {
        Command::Params { radix, out } => cmd_params(radix, out),
        Command::Table { radix, pair, out } => cmd_table(radix, pair, out),
        Command::Verify { source, out } => cmd_verify(source, out),
        Command::Simulate { source, trials, digits, seed, model, schedule, out } => {
            cmd_simulate(source, *trials, *digits, *seed, *model, *schedule, out)
        }
        Command::Sweep { bits, out } => cmd_sweep(*bits, out),
        Command::Repro { out } => {
            let items = repro::run();
            let ok = items.iter().all(|i| i.pass);
            let text = match out.format.unwrap_or(Format::Text) {
                Format::Json => {
                    format!("{}\n", serde_json::Value::from(items.iter().map(repro::Item::to_json).collect::<Vec<_>>()))
                }
                Format::Csv => repro::csv(&items),
                Format::Text => repro::text(&items),
            };
            write_all(&out.output, &text)?;
            Ok(status(ok))
        }
        Command::Plot { source, y_range, p_range, width, height, output } => {
            let opts = PlotOptions { width: *width, height: *height, y_range: *y_range, p_range: *p_range };
            cmd_plot(source, opts, output)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
