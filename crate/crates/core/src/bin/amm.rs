use std::fs::{File, OpenOptions};
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use amm_core::axioms::run_all;
use amm_core::convert::{convert, Target};
use amm_core::engine::{read_trade_log, write_trade_log};
use amm_core::grid::{Axis, GridMode, GridRequest};
use amm_core::numerics::SimplexPoint;
use amm_core::registry::{build_rule, Params};
use amm_core::{Bundle, Error, Market, MarketSpec, Representation, Result};

/// Prediction markets and constant-function market makers.
#[derive(Parser)]
#[command(name = "amm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct MarketArgs {
    /// Market descriptor (JSON); `-` reads stdin.
    #[arg(long)]
    spec: PathBuf,
    /// Override the descriptor's initial reserves.
    #[arg(long, value_delimiter = ',')]
    reserves: Option<Vec<f64>>,
}

impl MarketArgs {
    fn load(&self) -> Result<MarketSpec> {
        let mut spec = MarketSpec::load(&self.spec)?;
        if let Some(q) = &self.reserves {
            spec.initial_reserves = Bundle::new(q.clone())?;
            spec.validate()?;
        }
        Ok(spec)
    }
}

#[derive(Clone, Copy, ValueEnum)]
#[allow(clippy::enum_variant_names)]
enum Direction {
    ToCost,
    ToPotential,
    ToPerspective,
    ToScoring,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Surface,
    Levels,
}

#[derive(Subcommand)]
enum Command {
    /// Validate and price a bundle without executing it.
    Quote {
        #[command(flatten)]
        market: MarketArgs,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        bundle: Vec<f64>,
        /// Validity tolerance; defaults to the market's own.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Convert a market to another representation.
    Convert {
        #[arg(value_enum)]
        direction: Direction,
        #[command(flatten)]
        market: MarketArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Emit a two-asset surface or level-set grid as CSV.
    Grid {
        /// Full grid request (JSON); replaces the flags below.
        #[arg(long, conflicts_with_all = ["spec", "x", "y", "mode", "levels"])]
        request: Option<PathBuf>,
        #[arg(long, required_unless_present = "request")]
        spec: Option<PathBuf>,
        /// `lo,hi,steps` for the first asset.
        #[arg(long, value_parser = parse_axis, default_value = "0.05,3,50")]
        x: Axis,
        #[arg(long, value_parser = parse_axis, default_value = "0.05,3,50")]
        y: Axis,
        #[arg(long, value_enum, default_value = "surface")]
        mode: Mode,
        #[arg(long, value_delimiter = ',', default_value = "0.2,0.6,1.0,1.4,1.8")]
        levels: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the randomized axiom suite; exits 1 if any axiom fails.
    Check {
        #[command(flatten)]
        market: MarketArgs,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Score a probability report.
    Score {
        #[arg(long)]
        rule: String,
        #[arg(long, value_delimiter = ',')]
        report: Vec<f64>,
        /// 1-based outcome index.
        #[arg(long)]
        outcome: usize,
        /// Rule parameter as `name=value`; repeatable.
        #[arg(long = "param", value_parser = parse_param)]
        params: Vec<(String, f64)>,
    },
    /// Execute a trade and append it to a trade log.
    Trade {
        #[command(flatten)]
        market: MarketArgs,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        bundle: Vec<f64>,
        /// Trade log (JSON lines); replayed first if it exists.
        #[arg(long)]
        out: PathBuf,
    },
    /// Rebuild a market from its trade log.
    Replay {
        #[command(flatten)]
        market: MarketArgs,
        #[arg(long)]
        log: PathBuf,
    },
}

fn parse_axis(s: &str) -> std::result::Result<Axis, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [lo, hi, steps] = parts[..] else {
        return Err(format!("expected lo,hi,steps, got {s:?}"));
    };
    Ok(Axis::new(
        lo.parse().map_err(|e| format!("{lo:?}: {e}"))?,
        hi.parse().map_err(|e| format!("{hi:?}: {e}"))?,
        steps.parse().map_err(|e| format!("{steps:?}: {e}"))?,
    ))
}

fn parse_param(s: &str) -> std::result::Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected name=value, got {s:?}"))?;
    Ok((k.trim().to_string(), v.trim().parse().map_err(|e| format!("{v:?}: {e}"))?))
}

fn print_json(v: &serde_json::Value) -> Result<()> {
    emit(&format!("{}\n", serde_json::to_string_pretty(v)?))
}

/// Write to stdout; a reader that closed the pipe early is not an error.
fn emit(text: &str) -> Result<()> {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn run(cmd: Command) -> Result<ExitCode> {
    match cmd {
        Command::Quote { market, bundle, tol } => {
            let m = Market::from_spec(market.load()?)?;
            let r = Bundle::new(bundle)?;
            let tol = tol.unwrap_or_else(|| m.tolerance());
            let (residual, quote) = match m.spec().representation {
                Representation::Cost => {
                    let q = m.quote(&r)?;
                    (m.base_residual(&r.shift(q.cash_leg.unwrap_or(0.0)))?, Some(q))
                }
                Representation::Potential => {
                    let res = m.base_residual(&r)?;
                    (res, if res.abs() <= tol { m.quote(&r).ok() } else { None })
                }
            };
            print_json(&json!({
                "valid": quote.is_some() && residual.abs() <= tol,
                "residual": residual,
                "quote": quote,
            }))?;
        }
        Command::Convert { direction, market, seed } => {
            let target = match direction {
                Direction::ToCost => Target::Cost,
                Direction::ToPotential => Target::Potential,
                Direction::ToPerspective => Target::Perspective,
                Direction::ToScoring => Target::Scoring,
            };
            let out = convert(&market.load()?, target, seed)?;
            print_json(&serde_json::to_value(out)?)?;
        }
        Command::Grid { request, spec, x, y, mode, levels, out } => {
            let req = match request {
                Some(path) => GridRequest::from_json(&read_text(&path)?)?,
                None => GridRequest {
                    market: MarketSpec::load(spec.as_deref().expect("clap enforces --spec"))?,
                    axes: [x, y],
                    mode: match mode {
                        Mode::Surface => GridMode::Surface,
                        Mode::Levels => GridMode::Levels,
                    },
                    levels,
                },
            };
            let csv = req.run()?;
            match out {
                Some(path) => std::fs::write(path, csv)?,
                None => emit(&csv)?,
            }
        }
        Command::Check { market, trials, seed } => {
            let m = Market::from_spec(market.load()?)?;
            let reports = run_all(&m, seed, trials);
            print_json(&serde_json::to_value(&reports)?)?;
            if reports.iter().any(|r| r.failed()) {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Score { rule, report, outcome, params } => {
            let n = report.len();
            let params: Params = params.into_iter().collect();
            let rule = build_rule(&rule, n, &params)?;
            if outcome == 0 || outcome > n {
                return Err(Error::domain(format!("outcome {outcome} is not in 1..={n}")));
            }
            let p = SimplexPoint::new(report)?;
            print_json(&json!(rule.score(&p, outcome - 1)?))?;
        }
        Command::Trade { market, bundle, out } => {
            let spec = market.load()?;
            let records = if out.exists() {
                read_trade_log(BufReader::new(File::open(&out)?))?
            } else {
                Vec::new()
            };
            let m = Market::replay(spec, &records)?;
            let (next, quote) = m.trade(&Bundle::new(bundle)?)?;
            let file = OpenOptions::new().create(true).append(true).open(&out)?;
            write_trade_log(&next.trade_log()[records.len()..], file)?;
            print_json(&serde_json::to_value(quote)?)?;
        }
        Command::Replay { market, log } => {
            let records = read_trade_log(BufReader::new(File::open(&log)?))?;
            let m = Market::replay(market.load()?, &records)?;
            print_json(&json!({
                "trades": records.len(),
                "reserves": m.reserves(),
                "level": m.level(),
            }))?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn read_text(path: &Path) -> Result<String> {
    if path == Path::new("-") {
        let mut s = String::new();
        std::io::Read::read_to_string(&mut std::io::stdin(), &mut s)?;
        Ok(s)
    } else {
        Ok(std::fs::read_to_string(path)?)
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Domain(_) | Error::Bracket { .. } | Error::Tolerance { .. } => 2,
        Error::Spec(_) | Error::Io(_) => 3,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(3) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("amm: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
