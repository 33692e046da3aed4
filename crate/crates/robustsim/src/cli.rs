//! Command-line front end.
//!
//! Exit codes: 0 when every checked claim holds, 1 when a claim fails,
//! 2 for usage and configuration errors.

use std::ffi::OsString;
use std::fs::OpenOptions;
use std::io::{BufReader, Write};
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use robustsim_core::learners::learn_monotone_conjunction;
use robustsim_core::{
    Classifier, Concept, DistributionSpec, EvalMode, LabeledSample, RiskEngine, RiskEstimate, RiskKind,
};

use crate::checks::{self, CheckOutcome};
use crate::config::ScenarioConfig;
use crate::error::ConfigError;
use crate::scenarios;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CLAIM_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "robustsim", version, about = "Robust risk experiments on the boolean hypercube")]
pub struct Cli {
    /// Master seed; overrides the config's seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Append output to this file instead of printing it.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    /// Include wall-clock runtime in scenario reports.
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate one robust risk.
    Risk {
        /// exact-in-ball or constant-in-ball.
        #[arg(long, default_value = "exact-in-ball")]
        kind: String,
        /// Hypothesis, e.g. `conj:0,2`.
        #[arg(long)]
        h: String,
        /// Target concept.
        #[arg(long)]
        c: String,
        /// `uniform:<n>`, `product:<p0>,<p1>,...`, or a JSON distribution spec.
        #[arg(long)]
        dist: String,
        #[arg(long)]
        rho: usize,
        /// Estimate by Monte Carlo with this many samples instead of exactly.
        #[arg(long)]
        mc_samples: Option<u64>,
        /// Report every radius from 0 to rho.
        #[arg(long)]
        curve: bool,
    },
    /// Run the elimination learner on a sample file (`<bits> <label>` lines).
    Learn {
        #[arg(long)]
        samples: PathBuf,
        /// Concept to score the output against.
        #[arg(long)]
        target: Option<String>,
    },
    /// Run a named scenario.
    Scenario {
        name: String,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Run the property suites.
    Verify {
        /// Run only the named suite.
        #[arg(long)]
        only: Option<String>,
    },
    /// List scenario and suite names.
    List,
}

struct Failure(i32, String);

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure(EXIT_USAGE, e.to_string())
    }
}

impl From<robustsim_core::Error> for Failure {
    fn from(e: robustsim_core::Error) -> Self {
        Failure(EXIT_USAGE, e.to_string())
    }
}

pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(cli.workers.unwrap_or(0))
        .build()
    {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    match pool.install(|| execute(&cli)) {
        Ok((code, text)) => match emit(&cli, &text) {
            Ok(()) => code,
            Err(e) => {
                eprintln!("error: writing output: {e}");
                EXIT_USAGE
            }
        },
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            code
        }
    }
}

fn emit(cli: &Cli, text: &str) -> std::io::Result<()> {
    match &cli.out {
        Some(path) => {
            let mut f = OpenOptions::new().create(true).append(true).open(path)?;
            f.write_all(text.as_bytes())?;
            if !text.ends_with('\n') {
                f.write_all(b"\n")?;
            }
            Ok(())
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            if !text.ends_with('\n') {
                out.write_all(b"\n")?;
            }
            Ok(())
        }
    }
}

fn execute(cli: &Cli) -> Result<(i32, String), Failure> {
    match &cli.command {
        Command::Risk {
            kind,
            h,
            c,
            dist,
            rho,
            mc_samples,
            curve,
        } => {
            let kind: RiskKind = kind.parse()?;
            let spec = if dist.trim_start().starts_with('{') {
                serde_json::from_str(dist).map_err(|e| Failure(EXIT_USAGE, format!("bad distribution: {e}")))?
            } else {
                DistributionSpec::parse_short(dist)?
            };
            let n = spec.dim();
            let d = spec.build::<f64>()?;
            let h = Concept::parse(h, n)?;
            let c = Concept::parse(c, n)?;
            let mode = match mc_samples {
                Some(samples) => EvalMode::MonteCarlo {
                    samples: *samples,
                    seed: cli.seed.unwrap_or(0),
                },
                None => EvalMode::Exact,
            };
            let values = RiskEngine::default().risk_curve(kind, &h, &c, &d, *rho, mode)?;
            let values: Vec<RiskEstimate> = if *curve { values } else { vec![values[*rho]] };
            let text = match cli.format {
                Format::Json if *curve => serde_json::to_string_pretty(&values).expect("serializes"),
                Format::Json => serde_json::to_string_pretty(&values[0]).expect("serializes"),
                Format::Csv => {
                    let mut w = csv::Writer::from_writer(Vec::new());
                    w.write_record(["kind", "rho", "value", "method", "samples", "confidence_radius"])
                        .map_err(csv_err)?;
                    for v in &values {
                        w.write_record([
                            serde_json::to_value(v.kind).expect("serializes").as_str().unwrap_or_default(),
                            &v.rho.to_string(),
                            &v.value.to_string(),
                            serde_json::to_value(v.method).expect("serializes").as_str().unwrap_or_default(),
                            &v.samples_used.to_string(),
                            &v.confidence_radius.to_string(),
                        ])
                        .map_err(csv_err)?;
                    }
                    String::from_utf8(w.into_inner().map_err(|e| Failure(EXIT_USAGE, e.to_string()))?)
                        .expect("utf8")
                }
            };
            Ok((EXIT_PASS, text))
        }
        Command::Learn { samples, target } => {
            let file = std::fs::File::open(samples)
                .map_err(|e| Failure(EXIT_USAGE, format!("{}: {e}", samples.display())))?;
            let s = LabeledSample::read_from(BufReader::new(file))?;
            let h = learn_monotone_conjunction(&s);
            let errors = s.iter().filter(|(x, y)| h.eval(x) != *y).count();
            let mut out = serde_json::json!({
                "learner": "elimination",
                "examples": s.len(),
                "dim": s.dim(),
                "hypothesis": h.clone().into_concept().to_string(),
                "training_errors": errors,
            });
            if let Some(t) = target {
                let t = Concept::parse(t, s.dim())?;
                out["exact_recovery"] = (t == h.clone().into_concept()).into();
            }
            let text = match cli.format {
                Format::Json => serde_json::to_string_pretty(&out).expect("serializes"),
                Format::Csv => format!(
                    "hypothesis,examples,training_errors\n{},{},{}\n",
                    out["hypothesis"].as_str().unwrap_or_default(),
                    s.len(),
                    errors
                ),
            };
            Ok((EXIT_PASS, text))
        }
        Command::Scenario { name, config } => {
            let mut cfg = match config {
                Some(path) => ScenarioConfig::load(path)?,
                None => ScenarioConfig::new(),
            };
            if let Some(seed) = cli.seed {
                cfg.seed = Some(seed);
            }
            let start = Instant::now();
            let mut report = scenarios::run(name, &cfg)?;
            if cli.timing {
                report.runtime_ms = Some(start.elapsed().as_millis() as u64);
            }
            let text = match cli.format {
                Format::Json => report.to_json(),
                Format::Csv => {
                    let mut buf = Vec::new();
                    report.write_csv(&mut buf).map_err(csv_err)?;
                    String::from_utf8(buf).expect("utf8")
                }
            };
            Ok((if report.pass { EXIT_PASS } else { EXIT_CLAIM_FAILED }, text))
        }
        Command::Verify { only } => {
            let seed = cli.seed.unwrap_or(0);
            let outcomes: Vec<CheckOutcome> = match only {
                Some(name) => {
                    let (_, f) = checks::CHECKS
                        .iter()
                        .find(|(n, _)| n == name)
                        .ok_or_else(|| Failure(EXIT_USAGE, format!("unknown suite {name:?}")))?;
                    vec![f(seed)]
                }
                None => checks::run_all(seed),
            };
            let pass = outcomes.iter().all(|o| o.pass);
            let text = match cli.format {
                Format::Json => serde_json::to_string_pretty(&outcomes).expect("serializes"),
                Format::Csv => {
                    let mut w = csv::Writer::from_writer(Vec::new());
                    w.write_record(["suite", "pass", "detail"]).map_err(csv_err)?;
                    for o in &outcomes {
                        w.write_record([o.name, if o.pass { "true" } else { "false" }, &o.detail])
                            .map_err(csv_err)?;
                    }
                    String::from_utf8(w.into_inner().map_err(|e| Failure(EXIT_USAGE, e.to_string()))?)
                        .expect("utf8")
                }
            };
            for o in &outcomes {
                eprintln!("{} {}: {}", if o.pass { "PASS" } else { "FAIL" }, o.name, o.detail);
            }
            Ok((if pass { EXIT_PASS } else { EXIT_CLAIM_FAILED }, text))
        }
        Command::List => {
            let mut text = String::from("scenarios:\n");
            for (name, _) in scenarios::SCENARIOS {
                text.push_str(&format!("  {name}\n"));
            }
            text.push_str("suites:\n");
            for (name, _) in checks::CHECKS {
                text.push_str(&format!("  {name}\n"));
            }
            Ok((EXIT_PASS, text))
        }
    }
}

fn csv_err(e: csv::Error) -> Failure {
    Failure(EXIT_USAGE, e.to_string())
}
