//! Command-line front end.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::acceptance::CRITERIA;
use crate::arith::Rational;
use crate::error::{Error, Result};
use crate::family::{moduli_census, CensusReport, Membership};
use crate::invariants::{invariant_report, validate_pair, InvariantReport, ParamPair, Triple, CSV_HEADER};
use crate::oracle::{oracle_check, random_valid_pairs, OracleReport};
use crate::search::{stream_search, write_search_csv, SearchConfig, Space};

pub const THREADS_ENV: &str = "SEVEN_INV_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "seven-inv", version, about = "Exact invariants of the 7-manifolds M_{a,b}")]
pub struct Cli {
    /// Output format (default depends on the command).
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write output to a file instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Worker threads; falls back to SEVEN_INV_THREADS.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct PairArgs {
    /// a1,a2,a3 (use --a=-3,-3,1 for negative entries)
    #[arg(long)]
    pub a: Triple,
    /// b1,b2,b3
    #[arg(long)]
    pub b: Triple,
}

impl PairArgs {
    fn pair(&self) -> Result<ParamPair> {
        validate_pair(self.a, self.b)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Invariant report of one pair.
    Invariants(PairArgs),
    /// Family members i = stride·t, t = 0..count, checked pairwise.
    Family {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        count: u64,
        #[arg(long)]
        stride: Option<i64>,
    },
    /// Compare the strata integral against the closed-form defect sums.
    VerifyOracle {
        #[arg(long, requires = "b", conflicts_with = "random")]
        a: Option<Triple>,
        #[arg(long, requires = "a")]
        b: Option<Triple>,
        /// Number of random pairs.
        #[arg(long, requires = "max_q")]
        random: Option<usize>,
        #[arg(long, default_value_t = 3)]
        min_q: i64,
        #[arg(long)]
        max_q: Option<i64>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Enumerate pairs and stream their invariants.
    Search {
        /// Bound on |entries|.
        #[arg(long, required_unless_present = "mk", conflicts_with = "mk")]
        max: Option<i64>,
        /// Only the pairs M_k for these k.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        mk: Option<Vec<i64>>,
        /// Keep rows with μ equal to P/Q mod 1.
        #[arg(long)]
        target_mu: Option<Rational>,
        #[arg(long)]
        homotopy_sphere: bool,
        #[arg(long, conflicts_with = "non_milnor")]
        milnor: bool,
        #[arg(long)]
        non_milnor: bool,
        /// Resume after a1,a2,a3,b1,b2,b3.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, num_args = 1)]
        start_after: Option<Vec<i64>>,
    },
    /// Run the acceptance battery.
    Selftest,
}

/// Parses `args` (program name first), runs, and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    configure_threads(cli.threads);
    let result = match &cli.output {
        Some(path) => match File::create(path) {
            Ok(f) => {
                let mut w = BufWriter::new(f);
                let r = dispatch(&cli, &mut w);
                r.and_then(|code| {
                    w.flush().map_err(|e| Error::Io { cursor: path.display().to_string(), detail: e.to_string() })?;
                    Ok(code)
                })
            }
            Err(e) => Err(Error::Io { cursor: path.display().to_string(), detail: e.to_string() }),
        },
        None => dispatch(&cli, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn configure_threads(flag: Option<usize>) {
    let n = flag.or_else(|| std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse().ok()));
    if let Some(n) = n.filter(|&n| n > 0) {
        // the global pool can only be built once per process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn io_err(e: impl std::fmt::Display) -> Error {
    Error::Io { cursor: "output".into(), detail: e.to_string() }
}

fn json_line(out: &mut dyn Write, v: &impl Serialize) -> Result<()> {
    let s = serde_json::to_string_pretty(v).map_err(io_err)?;
    writeln!(out, "{s}").map_err(io_err)
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    match &cli.command {
        Command::Invariants(p) => {
            let rep = invariant_report(&p.pair()?)?;
            print_report(&rep, cli.format.unwrap_or(Format::Json), out)?;
            Ok(0)
        }
        Command::Family { pair, count, stride } => {
            let rep = moduli_census(&pair.pair()?, *count as usize, *stride)?;
            print_census(&rep, cli.format.unwrap_or(Format::Json), out)?;
            Ok(0)
        }
        Command::VerifyOracle { a, b, random, min_q, max_q, seed } => {
            let pairs = match (a, b, random) {
                (Some(a), Some(b), _) => vec![validate_pair(*a, *b)?],
                (_, _, Some(count)) => {
                    let max_q = max_q.ok_or_else(|| Error::Precondition("--random needs --max-q".into()))?;
                    random_valid_pairs(*count, *min_q, max_q, *seed)?
                }
                _ => return Err(Error::Precondition("give --a and --b, or --random with --max-q".into())),
            };
            let reports = pairs.iter().map(oracle_check).collect::<Result<Vec<_>>>()?;
            print_oracle(&reports, cli.format.unwrap_or(Format::Table), out)?;
            Ok(if reports.iter().all(|r| r.equal) { 0 } else { 1 })
        }
        Command::Search { max, mk, target_mu, homotopy_sphere, milnor, non_milnor, start_after } => {
            let space = match (max, mk) {
                (_, Some(ks)) => Space::Mk(ks.clone()),
                (Some(m), None) => Space::Box { max: *m },
                (None, None) => return Err(Error::Precondition("--max or --mk is required".into())),
            };
            let mut cfg = SearchConfig::new(space);
            cfg.target_mu = target_mu.as_ref().map(Rational::mod_one);
            cfg.homotopy_sphere = *homotopy_sphere;
            cfg.membership = match (milnor, non_milnor) {
                (true, _) => Some(Membership::Milnor),
                (_, true) => Some(Membership::NonMilnor),
                _ => None,
            };
            cfg.start_after = match start_after {
                None => None,
                Some(v) => Some(
                    <[i64; 6]>::try_from(v.as_slice())
                        .map_err(|_| Error::Precondition("--start-after takes six integers".into()))?,
                ),
            };
            match cli.format.unwrap_or(Format::Csv) {
                Format::Csv => {
                    write_search_csv(&cfg, out)?;
                }
                Format::Json => {
                    stream_search(&cfg, |rep| {
                        let s = serde_json::to_string(rep).map_err(io_err)?;
                        writeln!(out, "{s}").map_err(io_err)
                    })?;
                }
                Format::Table => {
                    stream_search(&cfg, |rep| {
                        writeln!(out, "a={} b={} n={} s={} mu={} lk={}", rep.a, rep.b, rep.n, rep.s, rep.mu, rep.lk)
                            .map_err(io_err)
                    })?;
                }
            }
            Ok(0)
        }
        Command::Selftest => {
            let mut ok = true;
            let mut rows = Vec::new();
            for criterion in CRITERIA {
                let r = criterion();
                ok &= r.ok();
                match cli.format.unwrap_or(Format::Table) {
                    Format::Table => writeln!(out, "{r}").map_err(io_err)?,
                    _ => rows.push(serde_json::json!({
                        "id": r.id,
                        "name": r.name,
                        "passed": r.ok(),
                        "detail": r.detail,
                        "seconds": r.elapsed.as_secs_f64(),
                    })),
                }
            }
            match cli.format {
                Some(Format::Json) => json_line(out, &rows)?,
                Some(Format::Csv) => {
                    let mut w = csv::Writer::from_writer(&mut *out);
                    w.write_record(["id", "name", "passed", "detail", "seconds"]).map_err(io_err)?;
                    for r in &rows {
                        w.write_record([
                            r["id"].to_string(),
                            r["name"].as_str().unwrap_or_default().to_string(),
                            r["passed"].to_string(),
                            r["detail"].as_str().unwrap_or_default().to_string(),
                            r["seconds"].to_string(),
                        ])
                        .map_err(io_err)?;
                    }
                    w.flush().map_err(io_err)?;
                }
                _ => {}
            }
            Ok(if ok { 0 } else { 1 })
        }
    }
}

fn print_report(rep: &InvariantReport, format: Format, out: &mut dyn Write) -> Result<()> {
    match format {
        Format::Json => json_line(out, rep),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(CSV_HEADER).map_err(io_err)?;
            w.write_record(rep.csv_record()).map_err(io_err)?;
            w.flush().map_err(io_err)
        }
        Format::Table => {
            let p1 = match &rep.p1 {
                Some(p) => p.to_string(),
                None => "unavailable".into(),
            };
            let rows = [
                ("a", rep.a.to_string()),
                ("b", rep.b.to_string()),
                ("n", rep.n.to_string()),
                ("m", rep.m.to_string()),
                ("s", rep.s.to_string()),
                ("mu", rep.mu.to_string()),
                ("lk", rep.lk.to_string()),
                ("p1", p1),
                ("defect_minus", rep.defect_minus.to_string()),
                ("defect_plus", rep.defect_plus.to_string()),
                ("sign_W", rep.sign_w.to_string()),
                ("euler_integral", rep.euler_integral.to_string()),
                ("p1_base_integral", rep.p1_base_integral.to_string()),
                ("p1_bundle_integral", rep.p1_bundle_integral.to_string()),
            ];
            for (k, v) in rows {
                writeln!(out, "{k:<20}{v}").map_err(io_err)?;
            }
            Ok(())
        }
    }
}

fn print_census(rep: &CensusReport, format: Format, out: &mut dyn Write) -> Result<()> {
    match format {
        Format::Json => json_line(out, rep),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["index", "a1", "a2", "a3", "b1", "b2", "b3", "s", "mu", "verdict"]).map_err(io_err)?;
            for e in &rep.entries {
                let (a, b) = (e.pair.a(), e.pair.b());
                let mut row: Vec<String> =
                    [e.index, a.t1, a.t2, a.t3, b.t1, b.t2, b.t3].iter().map(|x| x.to_string()).collect();
                row.extend([e.s.to_string(), e.mu.to_string(), e.verdict.to_string()]);
                w.write_record(row).map_err(io_err)?;
            }
            w.flush().map_err(io_err)
        }
        Format::Table => {
            writeln!(out, "base {}  stride {}", rep.base, rep.stride).map_err(io_err)?;
            for e in &rep.entries {
                writeln!(out, "i={:<12} {}  s={}  mu={}  {}", e.index, e.pair, e.s, e.mu, e.verdict).map_err(io_err)?;
            }
            writeln!(out, "distinct |s|: {}", rep.distinct_abs_s()).map_err(io_err)
        }
    }
}

fn print_oracle(reports: &[OracleReport], format: Format, out: &mut dyn Write) -> Result<()> {
    match format {
        Format::Json if reports.len() == 1 => json_line(out, &reports[0]),
        Format::Json => json_line(out, &reports),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["a1", "a2", "a3", "b1", "b2", "b3", "oracle", "closed_form", "equal"]).map_err(io_err)?;
            for r in reports {
                let (a, b) = (r.pair.a(), r.pair.b());
                let mut row: Vec<String> = [a.t1, a.t2, a.t3, b.t1, b.t2, b.t3].iter().map(|x| x.to_string()).collect();
                row.extend([r.oracle.to_string(), r.closed_form.to_string(), r.equal.to_string()]);
                w.write_record(row).map_err(io_err)?;
            }
            w.flush().map_err(io_err)
        }
        Format::Table if reports.len() == 1 => writeln!(out, "{}", reports[0]).map_err(io_err),
        Format::Table => {
            for r in reports {
                writeln!(out, "{}  {r}", r.pair).map_err(io_err)?;
            }
            let ok = reports.iter().filter(|r| r.equal).count();
            writeln!(out, "{ok}/{} equal", reports.len()).map_err(io_err)
        }
    }
}
