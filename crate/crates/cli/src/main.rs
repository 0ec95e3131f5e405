use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hk_core::formats::{
    read_series_json, write_classes_json, write_report_json, write_series_csv, write_series_json,
    write_verdicts_csv, ReportDocument,
};
use hk_core::mutation::classify_box;
use hk_core::reduced::{count_unsolvable, DEFAULT_BOUND};
use hk_core::sweep::{run_sweep, write_summary_csv, SweepSpec};
use hk_core::{
    estimate_multiplicity, hk_series, parse_trinomial, rationality_probe, FrobeniusBox, HkError,
    OracleConfig, DEFAULT_BUDGET,
};

#[derive(Parser)]
#[command(
    name = "hk",
    version,
    about = "Hilbert-Kunz functions of trinomial hypersurfaces"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args)]
struct Global {
    /// Characteristic
    #[arg(short = 'p', global = true)]
    p: Option<u64>,
    /// Largest basis the oracle may allocate
    #[arg(long, env = "HK_BUDGET", global = true)]
    budget: Option<u64>,
    #[arg(long, value_enum, global = true)]
    format: Option<Format>,
    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Output file (default: stdout)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// HK(n) for n = 1..=nmax
    Compute {
        #[arg(long)]
        poly: String,
        #[arg(long, default_value_t = 4)]
        nmax: u32,
    },
    /// Membership verdict for every box monomial
    Classify {
        #[arg(long)]
        poly: String,
        #[arg(short = 'n', long)]
        n: u32,
        #[arg(long, default_value_t = 8)]
        depth: usize,
    },
    /// Class decomposition and unsolvable counts of the reduced systems
    Analyze {
        #[arg(long)]
        poly: String,
        #[arg(short = 'n', long)]
        n: u32,
        #[arg(long, default_value_t = DEFAULT_BOUND)]
        bound: u32,
    },
    /// Multiplicity estimate and rationality probe from a series file
    Estimate {
        #[arg(long)]
        series: PathBuf,
        /// Dimension of the hypersurface (default: variables - 1)
        #[arg(long)]
        d: Option<u32>,
        #[arg(long, default_value_t = 10_000)]
        qmax: u64,
    },
    /// Series, estimate and probe for every member of a family file
    Sweep {
        #[arg(long)]
        spec: PathBuf,
        /// Also write the full per-member reports as JSON
        #[arg(long)]
        reports: Option<PathBuf>,
    },
}

enum Failure {
    Input(String),
    Budget(String),
}

impl From<HkError> for Failure {
    fn from(e: HkError) -> Self {
        match e {
            HkError::BudgetExceeded { .. } => Failure::Budget(e.to_string()),
            e => Failure::Input(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn open_in(path: &Path) -> Result<BufReader<File>, Failure> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<(), Failure> {
    let g = cli.global;
    if let Some(jobs) = g.jobs {
        if jobs == 0 {
            return Err(Failure::Input("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| Failure::Input(e.to_string()))?;
    }
    let p = g.p.unwrap_or(2);
    let budget = g.budget.unwrap_or(DEFAULT_BUDGET);
    let cfg = OracleConfig {
        budget,
        ..Default::default()
    };
    let out = g.out.as_deref();
    match cli.cmd {
        Command::Compute { poly, nmax } => {
            let f = parse_trinomial(&poly, p)?;
            let series = hk_series(&f, nmax, &cfg)?;
            if series.points.is_empty() {
                let size = FrobeniusBox::new(f.p(), 1, f.nvars())?.size_u128();
                return Err(Failure::Budget(format!(
                    "basis of size {size} at n = 1 exceeds budget {budget}"
                )));
            }
            let mut w = open_out(out)?;
            match g.format.unwrap_or(Format::Json) {
                Format::Json => {
                    write_series_json(&series, &mut w)?;
                    writeln!(w)?;
                }
                Format::Csv => write_series_csv(&series.points, &mut w)?,
            }
            w.flush()?;
        }
        Command::Classify { poly, n, depth } => {
            let f = parse_trinomial(&poly, p)?;
            let bx = FrobeniusBox::new(f.p(), n, f.nvars())?;
            bx.check_budget(budget)?;
            let rows = classify_box(&f, bx.q, depth)?;
            let mut w = open_out(out)?;
            match g.format.unwrap_or(Format::Csv) {
                Format::Csv => write_verdicts_csv(&rows, &mut w)?,
                Format::Json => {
                    let list: Vec<serde_json::Value> = rows
                        .iter()
                        .map(|(a, m)| {
                            serde_json::json!({
                                "monomial": a.to_string(),
                                "verdict": m.verdict.as_str(),
                                "witness": m.witness,
                            })
                        })
                        .collect();
                    serde_json::to_writer_pretty(&mut w, &list).map_err(HkError::from)?;
                    writeln!(w)?;
                }
            }
            w.flush()?;
        }
        Command::Analyze { poly, n, bound } => {
            if g.format == Some(Format::Csv) {
                return Err(Failure::Input("analyze writes JSON only".into()));
            }
            let f = parse_trinomial(&poly, p)?;
            let report = count_unsolvable(&f, n, bound, budget)?;
            let mut w = open_out(out)?;
            write_classes_json(&report, &mut w)?;
            writeln!(w)?;
            w.flush()?;
        }
        Command::Estimate { series, d, qmax } => {
            if g.format == Some(Format::Csv) {
                return Err(Failure::Input("estimate writes JSON only".into()));
            }
            let s = read_series_json(open_in(&series)?)?;
            let d = d.unwrap_or(s.nvars.saturating_sub(1) as u32);
            let est = estimate_multiplicity(&s.points, s.p, d)?;
            let probe = rationality_probe(&est.estimate, &est.band, qmax, est.converged)?;
            let mut w = open_out(out)?;
            write_report_json(&ReportDocument::new(&s, d, &est, &probe), &mut w)?;
            writeln!(w)?;
            w.flush()?;
        }
        Command::Sweep { spec, reports } => {
            if g.format == Some(Format::Json) {
                return Err(Failure::Input(
                    "sweep summary is CSV; use --reports for JSON".into(),
                ));
            }
            let mut sweep = SweepSpec::from_reader(open_in(&spec)?)?;
            if let Some(p) = g.p {
                sweep.p = p;
            }
            if let Some(b) = g.budget {
                sweep.budget = b;
            }
            let members = sweep.members()?.len();
            let docs = run_sweep(&sweep)?;
            if docs.is_empty() {
                return Err(Failure::Input("no sweep member completed".into()));
            }
            let mut w = open_out(out)?;
            write_summary_csv(&docs, &mut w)?;
            w.flush()?;
            if let Some(path) = reports {
                let mut w = open_out(Some(&path))?;
                serde_json::to_writer_pretty(&mut w, &docs).map_err(HkError::from)?;
                writeln!(w)?;
                w.flush()?;
            }
            log::info!("{} of {members} members completed", docs.len());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("hk: error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Budget(msg)) => {
            eprintln!("hk: refused: {msg}");
            ExitCode::from(2)
        }
    }
}
