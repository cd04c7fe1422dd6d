//! `gle`: exact counts, samplers, the limit density and experiment runs from the shell.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use gle_core::exact::{acceptance_probability, count_avoid_enum, count_avoid_lgv, fixed_time_pmf};
use gle_core::experiments::ExperimentConfig;
use gle_core::limit::{normalizing_constant_closed_form, normalizing_constant_quadrature};
use gle_core::limit::{LimitDensity, QuadratureOptions};
use gle_core::sampling::{default_burn_in, rejection_sample, GlauberChain, SequentialSampler};
use gle_core::{
    Barrier, BernoulliLineEnsemble, EnsembleSpec, LimitSpec, RngHandle, UpRightPath,
};

const ENUM_CAP: u64 = 50_000_000;

#[derive(Parser)]
#[command(name = "gle", version, about = "Avoiding Bernoulli line ensembles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Number of avoiding ensembles.
    Count {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, value_enum, default_value_t = CountMethod::Auto)]
        method: CountMethod,
    },
    /// Exact law of the column at time T0 + m (no barriers, full avoidance).
    Pmf {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(short, long)]
        m: i64,
        /// Print `lambda_1,..,lambda_k,prob_num,prob_den` rows.
        #[arg(long)]
        csv: bool,
    },
    /// Probability that independent bridges avoid each other.
    Accept {
        #[command(flatten)]
        spec: SpecArgs,
    },
    /// Uniform samples as long CSV `replicate,path_index,time,value`.
    Sample {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, value_enum, default_value_t = Method::Sequential)]
        method: Method,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        replicates: usize,
        /// Glauber moves between recorded replicates (default: the burn-in).
        #[arg(long)]
        steps: Option<u64>,
        /// Glauber moves before the first replicate (default: 10·k·T·width).
        #[arg(long)]
        burnin: Option<u64>,
        #[arg(long, default_value_t = 10_000_000)]
        max_tries: u64,
    },
    /// Runs Glauber dynamics and prints snapshots as `step,path_index,time,value`.
    Glauber {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        steps: u64,
        /// Snapshot period; 0 prints only the final state.
        #[arg(long, default_value_t = 0)]
        every: u64,
    },
    /// Evaluates H, Zc and rho at a point, or at every row of a CSV grid.
    Density {
        #[command(flatten)]
        limit: LimitArgs,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, conflicts_with = "grid")]
        z: Option<Vec<f64>>,
        /// CSV with columns z_1..z_k (header optional); prints z_1..z_k,rho.
        #[arg(long)]
        grid: Option<PathBuf>,
    },
    /// Normalizing constant of the limit density.
    Zc {
        #[command(flatten)]
        limit: LimitArgs,
        #[arg(long, value_enum, default_value_t = ZcMethod::Auto)]
        method: ZcMethod,
    },
    /// Runs an experiment from a config file and writes report.json plus CSV files.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Worker threads (fallback: GLE_THREADS, then all cores). Output does not depend on it.
        #[arg(long)]
        threads: Option<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum CountMethod {
    Auto,
    Lgv,
    Enum,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Rejection,
    Sequential,
    Glauber,
}

#[derive(Clone, Copy, ValueEnum)]
enum ZcMethod {
    Auto,
    Closed,
    Quadrature,
}

/// An ensemble spec, from a TOML file or from flags.
#[derive(Args)]
struct SpecArgs {
    /// TOML spec document; replaces the other spec flags.
    #[arg(long, conflicts_with_all = ["x", "y", "t1"])]
    spec: Option<PathBuf>,
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    t0: i64,
    #[arg(long, allow_hyphen_values = true)]
    t1: Option<i64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    x: Option<Vec<i64>>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    y: Option<Vec<i64>>,
    /// `+inf` or comma-separated values on T0..=T1.
    #[arg(long, allow_hyphen_values = true)]
    top: Option<String>,
    /// `-inf` or comma-separated values on T0..=T1.
    #[arg(long, allow_hyphen_values = true)]
    bottom: Option<String>,
    /// Avoidance times, comma-separated (default: all of T0..=T1).
    #[arg(long = "avoid", value_delimiter = ',', allow_hyphen_values = true)]
    avoid: Option<Vec<i64>>,
}

fn parse_barrier(text: &str, t0: i64) -> Result<Barrier> {
    match text.trim() {
        "+inf" | "inf" => Ok(Barrier::PlusInfinity),
        "-inf" => Ok(Barrier::MinusInfinity),
        list => {
            let values = list
                .split(',')
                .map(|v| v.trim().parse::<i64>())
                .collect::<Result<Vec<_>, _>>()
                .with_context(|| format!("bad barrier {list:?}"))?;
            Ok(Barrier::Path(UpRightPath::new(t0, values)?))
        }
    }
}

impl SpecArgs {
    fn build(&self) -> Result<EnsembleSpec> {
        if let Some(path) = &self.spec {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            return Ok(EnsembleSpec::from_toml_str(&text)?);
        }
        let (Some(t1), Some(x), Some(y)) = (self.t1, &self.x, &self.y) else {
            bail!("give --spec FILE or all of --t1, --x, --y");
        };
        let top = match &self.top {
            Some(s) => parse_barrier(s, self.t0)?,
            None => Barrier::PlusInfinity,
        };
        let bottom = match &self.bottom {
            Some(s) => parse_barrier(s, self.t0)?,
            None => Barrier::MinusInfinity,
        };
        let avoid = self.avoid.as_ref().map(|v| v.iter().copied().collect());
        Ok(EnsembleSpec::with_all(self.t0, t1, x.clone(), y.clone(), top, bottom, avoid)?)
    }
}

/// A limit spec, from a TOML file or from flags.
#[derive(Args)]
struct LimitArgs {
    /// TOML document with `p`, `t`, `a`, `b`.
    #[arg(long = "limit-spec", conflicts_with_all = ["a", "b"])]
    limit_spec: Option<PathBuf>,
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    #[arg(long, default_value_t = 0.5)]
    t: f64,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    a: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    b: Option<Vec<f64>>,
}

impl LimitArgs {
    fn build(&self) -> Result<LimitSpec> {
        if let Some(path) = &self.limit_spec {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            return Ok(LimitSpec::from_toml_str(&text)?);
        }
        let (Some(a), Some(b)) = (&self.a, &self.b) else {
            bail!("give --limit-spec FILE or both --a and --b");
        };
        Ok(LimitSpec::new(self.p, self.t, a.clone(), b.clone())?)
    }
}

fn write_ensemble(out: &mut impl Write, label: u64, ens: &BernoulliLineEnsemble) -> io::Result<()> {
    for (i, path) in ens.paths().iter().enumerate() {
        for (j, v) in path.values().iter().enumerate() {
            writeln!(out, "{label},{},{},{v}", i + 1, path.t0() + j as i64)?;
        }
    }
    Ok(())
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn run(cli: Cli) -> Result<()> {
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    match cli.command {
        Command::Count { spec, method } => {
            let spec = spec.build()?;
            let lgv = || count_avoid_lgv(spec.x(), spec.y(), spec.duration());
            let n = match method {
                CountMethod::Lgv if !spec.is_unconstrained() => {
                    bail!("the determinant needs no barriers and avoidance at every time")
                }
                CountMethod::Lgv => lgv(),
                CountMethod::Auto if spec.is_unconstrained() => lgv(),
                CountMethod::Auto | CountMethod::Enum => count_avoid_enum(&spec, ENUM_CAP)?,
            };
            writeln!(out, "{}", n.value())?;
        }
        Command::Pmf { spec, m, csv } => {
            let spec = spec.build()?;
            if !spec.is_unconstrained() {
                bail!("pmf needs no barriers and avoidance at every time");
            }
            let table = fixed_time_pmf(spec.x(), spec.y(), spec.duration(), m)?;
            if csv {
                let header: Vec<String> = (1..=spec.k()).map(|i| format!("lambda_{i}")).collect();
                writeln!(out, "{},prob_num,prob_den", header.join(","))?;
            }
            for (lambda, prob) in table.iter() {
                if csv {
                    writeln!(out, "{},{},{}", join(lambda), prob.numer(), prob.denom())?;
                } else {
                    writeln!(out, "({}) {}", join(lambda), prob)?;
                }
            }
        }
        Command::Accept { spec } => {
            let spec = spec.build()?;
            writeln!(out, "{}", acceptance_probability(&spec, ENUM_CAP)?)?;
        }
        Command::Sample { spec, method, seed, replicates, steps, burnin, max_tries } => {
            let spec = spec.build()?;
            let mut rng = RngHandle::from_seed(seed).rng();
            writeln!(out, "replicate,path_index,time,value")?;
            match method {
                Method::Rejection => {
                    for r in 0..replicates {
                        let (ens, _) = rejection_sample(&mut rng, &spec, max_tries)?;
                        write_ensemble(&mut out, r as u64, &ens)?;
                    }
                }
                Method::Sequential => {
                    if !spec.is_unconstrained() {
                        bail!("the sequential sampler needs no barriers and avoidance at every time");
                    }
                    let mut sampler =
                        SequentialSampler::new(spec.x().to_vec(), spec.y().to_vec(), spec.duration())?;
                    for r in 0..replicates {
                        write_ensemble(&mut out, r as u64, &sampler.sample(&mut rng, spec.t0()))?;
                    }
                }
                Method::Glauber => {
                    let burn = burnin.unwrap_or_else(|| default_burn_in(&spec));
                    let gap = steps.unwrap_or_else(|| default_burn_in(&spec));
                    let mut chain = GlauberChain::new(spec, None)?;
                    chain.run(&mut rng, burn);
                    for r in 0..replicates {
                        if r > 0 {
                            chain.run(&mut rng, gap);
                        }
                        write_ensemble(&mut out, r as u64, chain.state())?;
                    }
                }
            }
        }
        Command::Glauber { spec, seed, steps, every } => {
            let spec = spec.build()?;
            let mut rng = RngHandle::from_seed(seed).rng();
            let mut chain = GlauberChain::new(spec, None)?;
            writeln!(out, "step,path_index,time,value")?;
            if every > 0 {
                write_ensemble(&mut out, 0, chain.state())?;
                let mut done = 0;
                while done < steps {
                    let n = every.min(steps - done);
                    chain.run(&mut rng, n);
                    done += n;
                    write_ensemble(&mut out, done, chain.state())?;
                }
            } else {
                chain.run(&mut rng, steps);
                write_ensemble(&mut out, steps, chain.state())?;
            }
        }
        Command::Density { limit, z, grid } => {
            let density = LimitDensity::new(limit.build()?)?;
            match (z, grid) {
                (Some(z), None) => {
                    writeln!(out, "{}", serde_json::to_string(&density.eval(&z))?)?;
                }
                (None, Some(path)) => {
                    let k = density.spec().k();
                    let text = fs::read_to_string(&path)
                        .with_context(|| format!("reading {}", path.display()))?;
                    let header: Vec<String> = (1..=k).map(|i| format!("z_{i}")).collect();
                    writeln!(out, "{},rho", header.join(","))?;
                    for (n, line) in text.lines().enumerate() {
                        let line = line.trim();
                        if line.is_empty() || line.starts_with("z_") {
                            continue;
                        }
                        let z = line
                            .split(',')
                            .map(|v| v.trim().parse::<f64>())
                            .collect::<Result<Vec<_>, _>>()
                            .with_context(|| format!("line {} of {}", n + 1, path.display()))?;
                        if z.len() != k {
                            bail!("line {} has {} values, expected {k}", n + 1, z.len());
                        }
                        writeln!(out, "{},{}", join(&z), density.rho(&z))?;
                    }
                }
                _ => bail!("give exactly one of --z and --grid"),
            }
        }
        Command::Zc { limit, method } => {
            let spec = limit.build()?;
            let zc = match method {
                ZcMethod::Closed => normalizing_constant_closed_form(&spec)?,
                ZcMethod::Quadrature => {
                    normalizing_constant_quadrature(&spec, &QuadratureOptions::default())?
                }
                ZcMethod::Auto => LimitDensity::new(spec)?.zc(),
            };
            writeln!(out, "{zc:e}")?;
        }
        Command::Experiment { config, seed, out: dir, threads } => {
            let text = fs::read_to_string(&config)
                .with_context(|| format!("reading {}", config.display()))?;
            let cfg = ExperimentConfig::from_toml_str(&text)?;
            let threads = match threads {
                Some(n) => Some(n),
                None => match std::env::var("GLE_THREADS") {
                    Ok(v) => Some(v.trim().parse().context("GLE_THREADS is not a number")?),
                    Err(_) => None,
                },
            };
            let mut pool = rayon::ThreadPoolBuilder::new();
            if let Some(n) = threads {
                pool = pool.num_threads(n);
            }
            let pool = pool.build()?;
            let result = pool.install(|| cfg.run(seed))?;
            write_outputs(&dir, &result)?;
            let pass = match result.report.pass {
                Some(true) => "pass",
                Some(false) => "fail",
                None => "undecided",
            };
            writeln!(out, "{}: {pass} ({})", result.report.experiment, dir.display())?;
        }
    }
    out.flush()?;
    Ok(())
}

fn write_outputs(dir: &Path, result: &gle_core::experiments::ExperimentOutput) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    fs::write(dir.join("report.json"), result.report.to_json_pretty())?;
    for table in &result.tables {
        fs::write(dir.join(&table.name), table.to_csv_string())?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
