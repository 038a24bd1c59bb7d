use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use tnet::bench::{run_suite_with, CsvSink, Suite, SuiteSpec};
use tnet::gf2::VecAdds;
use tnet::merit::{merit, merit_embedded, MeritConfig, MeritReport, Norm, TildeT, WeightSpec};
use tnet::netio::{emit_net, parse_net, sample_nets};
use tnet::projections::ProjectionKey;
use tnet::tvalue::{rho_counted, Method};
use tnet::NetDef;

#[derive(Parser)]
#[command(
    name = "tnet",
    version,
    about = "t-values and figures of merit of base-2 digital nets"
)]
struct Cli {
    /// Worker threads for the projection computations.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// t-value of a net or of one of its projections.
    Compute(ComputeArgs),
    /// Figure of merit over the projections of a net.
    Merit(MeritArgs),
    /// Write random nets in the text format.
    Random(RandomArgs),
    /// Time and count the methods on random nets, writing CSV.
    Bench(BenchArgs),
}

#[derive(Args)]
struct ComputeArgs {
    #[arg(long)]
    input: PathBuf,
    /// mgl-inc, mgl-dec, schmid, ps or oracle.
    #[arg(long, default_value = "mgl-inc")]
    method: String,
    /// 1-based coordinates, e.g. 1,3.
    #[arg(long)]
    projection: Option<String>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct MeritArgs {
    #[arg(long)]
    input: PathBuf,
    /// Largest projection order; defaults to s.
    #[arg(long)]
    dmax: Option<usize>,
    /// inf or an exponent q >= 1.
    #[arg(long, default_value = "inf")]
    norm: String,
    /// uniform, order:w1,...,ws, product:g1,...,gs or joe-kuo-2d.
    #[arg(long, default_value = "uniform")]
    weights: String,
    /// t, star-disc or joe-kuo:P.
    #[arg(long, default_value = "t")]
    tilde: String,
    /// Score the embedded nets from this size up to k and report the maximum.
    #[arg(long)]
    embedded_from: Option<usize>,
    #[arg(long)]
    per_projection: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct RandomArgs {
    #[arg(long)]
    s: usize,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    count: usize,
    #[arg(long)]
    out: PathBuf,
    /// Make every leading minor non-singular, as embedded nets require.
    #[arg(long)]
    embedded: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteName {
    Single,
    Projections,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_enum, default_value = "single")]
    suite: SuiteName,
    /// Comma-separated dimensions.
    #[arg(long, value_delimiter = ',', required = true)]
    s: Vec<usize>,
    /// Comma-separated matrix sizes.
    #[arg(long, value_delimiter = ',', required = true)]
    k: Vec<usize>,
    /// Projection order cap of the projections suite.
    #[arg(long, default_value_t = 2)]
    dmax: usize,
    #[arg(long, value_delimiter = ',', default_value = "mgl-inc,schmid,ps")]
    methods: Vec<String>,
    #[arg(long, default_value_t = 20)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Skip cells whose bound exceeds this many vector additions.
    #[arg(long, default_value_t = 1_000_000_000_000)]
    budget: u128,
    /// CSV destination; standard output if absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            let lines: Vec<&str> = msg
                .lines()
                .take_while(|l| !l.starts_with("Usage:"))
                .map(str::trim)
                .filter(|l| !l.is_empty())
                .collect();
            eprintln!("error: {}", lines.join(" ").trim_start_matches("error: "));
            return ExitCode::FAILURE;
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let chain: Vec<String> = e.chain().map(|c| c.to_string()).collect();
            eprintln!("error: {}", chain.join(": ").replace('\n', " "));
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    if cli.threads == 0 {
        bail!("--threads must be at least 1");
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build_global()
        .context("starting the thread pool")?;
    match cli.command {
        Command::Compute(args) => compute(args),
        Command::Merit(args) => merit_cmd(args),
        Command::Random(args) => random(args),
        Command::Bench(args) => bench(args),
    }
}

fn read_net(path: &Path) -> Result<NetDef> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_net(&text).with_context(|| format!("parsing {}", path.display()))
}

/// `"1,3"` to 0-based coordinates.
fn parse_projection(spec: &str, s: usize) -> Result<Vec<usize>> {
    let coords = spec
        .split(',')
        .map(|c| {
            let j: usize = c.trim().parse().with_context(|| format!("bad coordinate `{c}`"))?;
            if j == 0 || j > s {
                bail!("coordinate {j} outside 1..={s}");
            }
            Ok(j - 1)
        })
        .collect::<Result<Vec<_>>>()?;
    ProjectionKey::from_coords(&coords)?;
    Ok(coords)
}

fn compute(args: ComputeArgs) -> Result<()> {
    let method: Method = args.method.parse()?;
    let net = read_net(&args.input)?;
    let matrices = match &args.projection {
        Some(spec) => net.project(&parse_projection(spec, net.s())?)?,
        None => net.matrices().to_vec(),
    };
    let mut counter = VecAdds::new();
    let rho = rho_counted(&matrices, method, &mut counter)?;
    let (k, s, t) = (net.k(), matrices.len(), net.k() - rho);
    if args.json {
        let out = json!({
            "t": t,
            "rho": rho,
            "method": method.name(),
            "s": s,
            "k": k,
            "vecadds": counter.get(),
        });
        println!("{out}");
    } else {
        println!("t={t}");
        println!("rho={rho}");
        println!("method={method} s={s} k={k} vecadds={}", counter.get());
    }
    Ok(())
}

fn report_json(report: &MeritReport, per_projection: bool) -> Value {
    let mut v = json!({ "merit": report.value });
    if per_projection {
        v["projections"] = report
            .rows
            .iter()
            .map(|r| {
                json!({
                    "projection": r.projection.to_string(),
                    "t": r.t,
                    "tilde": r.tilde,
                    "gamma": r.gamma,
                    "term": r.term,
                })
            })
            .collect();
    }
    v
}

fn print_rows(report: &MeritReport, out: &mut impl Write) -> io::Result<()> {
    writeln!(out, "{:<16} {:>4} {:>14} {:>14}", "projection", "t", "t~", "gamma*t~")?;
    for r in &report.rows {
        let tilde = r.tilde.map_or_else(|| "-".to_string(), |x| x.to_string());
        writeln!(
            out,
            "{:<16} {:>4} {:>14} {:>14}",
            r.projection.to_string(),
            r.t,
            tilde,
            r.term
        )?;
    }
    Ok(())
}

fn merit_cmd(args: MeritArgs) -> Result<()> {
    let weights: WeightSpec = args.weights.parse()?;
    let tilde: TildeT = args.tilde.parse()?;
    let norm: Norm = args.norm.parse()?;
    let net = read_net(&args.input)?;
    let cfg = MeritConfig {
        weights,
        tilde,
        norm,
        d_max: args.dmax.unwrap_or(net.s()),
        embedded_from: args.embedded_from,
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    if cfg.embedded_from.is_some() {
        let report = merit_embedded(&net, &cfg)?;
        if args.json {
            let levels: Vec<Value> = report
                .levels
                .iter()
                .map(|(m, r)| {
                    let mut v = report_json(r, args.per_projection);
                    v["m"] = json!(m);
                    v
                })
                .collect();
            writeln!(out, "{}", json!({ "merit": report.value, "levels": levels }))?;
        } else {
            for (m, r) in &report.levels {
                writeln!(out, "m={m} merit={}", r.value)?;
                if args.per_projection {
                    print_rows(r, &mut out)?;
                }
            }
            writeln!(out, "merit={}", report.value)?;
        }
    } else {
        let report = merit(&net, &cfg)?;
        if args.json {
            writeln!(out, "{}", report_json(&report, args.per_projection))?;
        } else {
            if args.per_projection {
                print_rows(&report, &mut out)?;
            }
            writeln!(out, "merit={}", report.value)?;
        }
    }
    Ok(())
}

fn random(args: RandomArgs) -> Result<()> {
    if args.s == 0 || args.k == 0 {
        bail!("s and k must be positive");
    }
    fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    let nets = sample_nets(args.s, args.k, args.seed, args.count, args.embedded)?;
    for (i, net) in nets.iter().enumerate() {
        let path = args.out.join(format!("net_s{}_k{}_{:04}.txt", args.s, args.k, i));
        fs::write(&path, emit_net(net)).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn bench(args: BenchArgs) -> Result<()> {
    let spec = SuiteSpec {
        suite: match args.suite {
            SuiteName::Single => Suite::Single,
            SuiteName::Projections => Suite::Projections { d_max: args.dmax },
        },
        s_values: args.s,
        k_values: args.k,
        methods: args.methods,
        samples: args.samples,
        seed: args.seed,
        budget: args.budget,
    };
    let sink: Box<dyn Write> = match &args.out {
        Some(path) => Box::new(fs::File::create(path).with_context(|| format!("creating {}", path.display()))?),
        None => Box::new(io::stdout()),
    };
    let mut csv = CsvSink::new(sink)?;
    let records = run_suite_with(&spec, |r| csv.write(r))?;
    if records.is_empty() {
        bail!("no benchmark cell ran (all skipped)");
    }
    Ok(())
}
