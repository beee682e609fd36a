mod output;
mod verify;

use std::collections::BTreeMap;
use std::io::{self, Write};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use majorant_gap::analytic::{GFunction, QuadratureSpec};
use majorant_gap::laplace_inv::{InversionConfig, MLaw, DEFAULT_EXTENDED_ORDER};
use majorant_gap::mc_sampler::{MSampleConfig, MSampler};
use majorant_gap::path_lab::DEFAULT_GRID;
use majorant_gap::special_fns::SeriesControl;
use majorant_gap::stats::{mean_estimate, median, moment_estimate};
use majorant_gap::Error;
use serde_json::{json, Value};

use output::{Cell, OutputRecord, Table};
use verify::{Suite, SuiteOptions};

const MACHINE_ORDER: usize = 14;

#[derive(Debug, Parser)]
#[command(name = "majorant-gap", version, about = "Law of the maximal gap between Brownian paths and their concave majorants")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Global {
    /// Seed for every random stream.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads; 0 uses all cores. Never changes results.
    #[arg(long, global = true, env = "MAJORANT_GAP_THREADS", default_value_t = 0)]
    threads: usize,
    /// Series truncation and relative quadrature tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Record wall time in JSON metadata.
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Analytic,
    Mc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Precision {
    Machine,
    Extended,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Emit {
    Samples,
    Summary,
}

#[derive(Debug, Args)]
struct Inversion {
    /// Working precision of the Laplace inversion.
    #[arg(long, value_enum, default_value_t = Precision::Extended)]
    precision: Precision,
    /// Gaver–Stehfest order (even); defaults to 14 machine, 28 extended.
    #[arg(long)]
    order: Option<usize>,
}

impl Inversion {
    fn config(&self) -> InversionConfig {
        match self.precision {
            Precision::Machine => InversionConfig::machine(self.order.unwrap_or(MACHINE_ORDER)),
            Precision::Extended => InversionConfig::extended(self.order.unwrap_or(DEFAULT_EXTENDED_ORDER)),
        }
    }

    fn record(&self, inputs: &mut BTreeMap<String, Value>) {
        let cfg = self.config();
        inputs.insert("precision".into(), json!(format!("{:?}", self.precision).to_lowercase()));
        inputs.insert("order".into(), json!(cfg.order));
    }
}

#[derive(Debug, Args)]
struct Grid {
    /// Comma-separated evaluation points.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required_unless_present = "range")]
    x: Vec<f64>,
    /// Uniform grid `start,stop,step`, inclusive of `stop`.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, conflicts_with = "x")]
    range: Option<Vec<f64>>,
}

impl Grid {
    fn points(&self) -> Result<Vec<f64>, Error> {
        let Some(r) = &self.range else {
            return Ok(self.x.clone());
        };
        let &[start, stop, step] = r.as_slice() else {
            return Err(Error::Config("--range takes start,stop,step".into()));
        };
        if !(step > 0.0 && stop >= start) {
            return Err(Error::Config("--range needs step > 0 and stop >= start".into()));
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        Ok((0..count).map(|i| start + i as f64 * step).collect())
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Moments E(M^r), optionally with Monte Carlo estimates.
    Moments {
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
        r: Vec<f64>,
        /// Monte Carlo sample size.
        #[arg(long)]
        mc: Option<usize>,
    },
    /// Distribution function of M.
    Cdf {
        #[command(flatten)]
        grid: Grid,
        #[arg(long, value_enum, default_value_t = Method::Analytic)]
        method: Method,
        /// Stick-breaking processes for the Monte Carlo route.
        #[arg(long, default_value_t = 10_000)]
        n: usize,
        #[command(flatten)]
        inversion: Inversion,
    },
    /// Density of M.
    Pdf {
        #[command(flatten)]
        grid: Grid,
        #[arg(long, value_enum, default_value_t = Method::Analytic)]
        method: Method,
        #[arg(long, default_value_t = 10_000)]
        n: usize,
        #[command(flatten)]
        inversion: Inversion,
    },
    /// Quantiles of M.
    Quantile {
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
        p: Vec<f64>,
        #[command(flatten)]
        inversion: Inversion,
    },
    /// Exact draws of M, or their summary statistics.
    Simulate {
        #[arg(long, default_value_t = 5_000, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        #[arg(long, value_enum, default_value_t = Emit::Summary)]
        emit: Emit,
    },
    /// Runs a verification suite; exits 1 if any check fails.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
        /// Replications; the default depends on the suite.
        #[arg(long)]
        n: Option<usize>,
        /// Grid intervals per simulated path (a power of two).
        #[arg(long, default_value_t = DEFAULT_GRID)]
        grid: usize,
        #[command(flatten)]
        inversion: Inversion,
    },
}

struct Outcome {
    command: &'static str,
    inputs: BTreeMap<String, Value>,
    table: Table,
    passed: bool,
}

fn g_function(tol: Option<f64>) -> Result<GFunction, Error> {
    let Some(tol) = tol else {
        return Ok(GFunction::default());
    };
    let series = SeriesControl::new(tol, SeriesControl::default().max_terms)?;
    let quad_default = QuadratureSpec::default();
    let quad = QuadratureSpec::new(tol, quad_default.abs_tol, quad_default.max_depth)?;
    Ok(GFunction::new(series, quad))
}

fn sampler(seed: u64, n: usize) -> Result<MSampler, Error> {
    let d = MSampleConfig::default();
    MSampler::new(MSampleConfig::new(d.residual_eps, d.tail_guard, seed, n)?)
}

fn run(command: &Command, global: &Global) -> Result<Outcome, Error> {
    let seed = global.seed;
    let g = g_function(global.tol)?;
    let mut inputs = BTreeMap::new();
    if let Some(tol) = global.tol {
        inputs.insert("tol".to_string(), json!(tol));
    }
    let outcome = |command, inputs, table| Outcome {
        command,
        inputs,
        table,
        passed: true,
    };
    match command {
        Command::Moments { r, mc } => {
            inputs.insert("r".into(), json!(r));
            inputs.insert("mc".into(), json!(mc));
            let sample = match mc {
                Some(n) => Some(sampler(seed, *n)?.par_sample()),
                None => None,
            };
            let mut table = Table::new(&["r", "analytic", "mc", "mc_se"]);
            for &r in r {
                let analytic = g.moment(r)?;
                let est = sample.as_deref().map(|s| moment_estimate(s, r));
                table.push(vec![
                    r.into(),
                    analytic.into(),
                    est.map(|e| e.mean).into(),
                    est.map(|e| e.std_error).into(),
                ]);
            }
            Ok(outcome("moments", inputs, table))
        }
        Command::Cdf { grid, method, n, inversion } | Command::Pdf { grid, method, n, inversion } => {
            let is_cdf = matches!(command, Command::Cdf { .. });
            let xs = grid.points()?;
            if let Some(&x) = xs.iter().find(|&&x| x.is_nan() || x <= 0.0) {
                return Err(Error::Config(format!("x must be positive, got {x}")));
            }
            inputs.insert("x".into(), json!(xs));
            inputs.insert("method".into(), json!(format!("{method:?}").to_lowercase()));
            let name = if is_cdf { "cdf" } else { "pdf" };
            let mut table = Table::new(&["x", name, "se"]);
            match method {
                Method::Analytic => {
                    inversion.record(&mut inputs);
                    let law = MLaw::new(g, inversion.config())?;
                    for &x in &xs {
                        let v = if is_cdf { law.cdf(x)? } else { law.pdf(x)? };
                        table.push(vec![x.into(), v.into(), Cell::Empty]);
                    }
                }
                Method::Mc => {
                    inputs.insert("n".into(), json!(n));
                    let s = sampler(seed, *n)?;
                    let est = if is_cdf {
                        s.par_mc_cdf_grid(&xs, *n)?
                    } else {
                        s.par_mc_pdf_grid(&xs, *n)?
                    };
                    for (&x, e) in xs.iter().zip(est) {
                        table.push(vec![x.into(), e.mean.into(), e.std_error.into()]);
                    }
                }
            }
            Ok(outcome(name, inputs, table))
        }
        Command::Quantile { p, inversion } => {
            if let Some(&q) = p.iter().find(|&&q| !(q > 0.0 && q < 1.0)) {
                return Err(Error::Config(format!("p must lie in (0, 1), got {q}")));
            }
            inputs.insert("p".into(), json!(p));
            inversion.record(&mut inputs);
            let law = MLaw::new(g, inversion.config())?;
            let mut table = Table::new(&["p", "quantile"]);
            for &q in p {
                table.push(vec![q.into(), law.quantile(q)?.into()]);
            }
            Ok(outcome("quantile", inputs, table))
        }
        Command::Simulate { n, emit } => {
            inputs.insert("n".into(), json!(n));
            inputs.insert("emit".into(), json!(format!("{emit:?}").to_lowercase()));
            let sample = sampler(seed, *n as usize)?.par_sample();
            let table = match emit {
                Emit::Samples => {
                    let mut t = Table::new(&["m"]);
                    for &m in &sample {
                        t.push(vec![m.into()]);
                    }
                    t
                }
                Emit::Summary => {
                    let est = mean_estimate(sample.iter().copied());
                    let sd = est.std_error * (sample.len() as f64).sqrt();
                    let min = sample.iter().copied().fold(f64::INFINITY, f64::min);
                    let max = sample.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                    let mut t = Table::new(&["statistic", "value"]);
                    t.push(vec!["n".into(), Cell::Int(*n)]);
                    for (name, v) in [
                        ("mean", est.mean),
                        ("mean_se", est.std_error),
                        ("sd", sd),
                        ("median", median(&sample)),
                        ("min", min),
                        ("max", max),
                    ] {
                        t.push(vec![name.into(), v.into()]);
                    }
                    t
                }
            };
            Ok(outcome("simulate", inputs, table))
        }
        Command::Verify { suite, n, grid, inversion } => {
            let replications = n.unwrap_or(suite.default_replications());
            let suite_name = suite
                .to_possible_value()
                .expect("no skipped variants")
                .get_name()
                .to_string();
            inputs.insert("suite".into(), json!(suite_name));
            inputs.insert("n".into(), json!(replications));
            inputs.insert("grid".into(), json!(grid));
            if *suite == Suite::Excursion {
                inversion.record(&mut inputs);
            }
            let opts = SuiteOptions {
                replications,
                grid: *grid,
                seed,
                quad: g.quad,
                law: MLaw::new(g, inversion.config())?,
            };
            let verdicts = verify::run(*suite, &opts)?;
            let mut table = Table::new(&["check", "statistic", "threshold", "passed"]);
            for v in &verdicts {
                table.push(vec![v.name.as_str().into(), v.statistic.into(), v.threshold.into(), v.passed.into()]);
            }
            Ok(Outcome {
                command: "verify",
                inputs,
                table,
                passed: verdicts.iter().all(|v| v.passed),
            })
        }
    }
}

fn emit(outcome: &Outcome, global: &Global, wall_time: f64) -> io::Result<()> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match global.format {
        Format::Csv => outcome.table.write_csv(&mut out)?,
        Format::Json => {
            let record = OutputRecord::new(
                outcome.command,
                outcome.inputs.clone(),
                &outcome.table,
                global.seed,
                global.timing.then_some(wall_time),
            );
            serde_json::to_writer_pretty(&mut out, &record)?;
            writeln!(out)?;
        }
    }
    out.flush()
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Domain { .. } | Error::Config(_) | Error::Overflow { .. } | Error::Unsupported(_) => 2,
        Error::NonConvergence(_) => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.global.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.global.threads)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let start = Instant::now();
    let outcome = match run(&cli.command, &cli.global) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    if let Err(e) = emit(&outcome, &cli.global, start.elapsed().as_secs_f64()) {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    if outcome.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
