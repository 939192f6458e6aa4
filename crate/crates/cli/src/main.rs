//! `claycode`: encode messages into Claycodes, scan images for them and run
//! the synthetic experiments.
//!
//! Exit codes: 0 on success (for `scan`, at least one message found), 1 when
//! a scan finds nothing, 2 on any error.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;

use claycode::bittree::{decode_tree_bounded, encode_bits, nat_of_bits, Scheme, TopologyTree};
use claycode::framing::{build_code_tree, frame_message, unframe, RedundancyLevel, MAX_FRAME_BITS};
use claycode::geometry::Polygon;
use claycode::harness::{footprint_benchmark, run_sweep, write_bench_csv, write_sweep_csv, BenchConfig, SweepConfig};
use claycode::packer::{pack_auto, rasterize, render_svg, Style};
use claycode::scanner::{scan_file, ScanParams};

#[derive(Debug, Parser)]
#[command(name = "claycode", version, about = "Topology-based 2D codes")]
struct Cli {
    #[command(flatten)]
    shared: Shared,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Shared {
    /// Seed for all randomness; overrides the seed in config files.
    #[arg(long, global = true, env = "CLAYCODE_SEED")]
    seed: Option<u64>,
    /// TOML file with Style fields.
    #[arg(long, global = true, value_name = "FILE")]
    style: Option<PathBuf>,
    /// TOML file with ScanParams fields.
    #[arg(long, global = true, value_name = "FILE")]
    scan_params: Option<PathBuf>,
    /// Worker threads for scanning and experiments.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[arg(long, global = true, value_enum, default_value = "squares")]
    scheme: SchemeArg,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
enum SchemeArg {
    Squares,
    Cubes,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Squares => Scheme::Squares,
            SchemeArg::Cubes => Scheme::Cubes,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Pack a message into a code and write it as SVG, and PNG if asked.
    Encode {
        #[arg(short, long)]
        message: String,
        /// Outer shape as JSON `{"vertices": [[x, y], ...]}`, counterclockwise.
        #[arg(long, value_name = "FILE")]
        shape: Option<PathBuf>,
        #[arg(short, long, default_value_t = 1)]
        redundancy: u32,
        #[arg(short, long, default_value = "claycode.svg")]
        out: PathBuf,
        #[arg(long, value_name = "FILE")]
        png: Option<PathBuf>,
        /// Side of the PNG in pixels.
        #[arg(long, default_value_t = 1024)]
        size: usize,
    },
    /// Print every message found in the given images.
    Scan {
        #[arg(required = true)]
        images: Vec<PathBuf>,
        /// One JSON report per image instead of plain messages.
        #[arg(long)]
        json: bool,
    },
    /// Footprint statistics of the codec as CSV.
    Bench {
        /// TOML file with BenchConfig fields.
        #[arg(long, value_name = "FILE")]
        config: Option<PathBuf>,
        /// Defaults to stdout.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Scan success under synthetic distortions as CSV.
    Sweep {
        /// TOML file with SweepConfig fields.
        #[arg(long, value_name = "FILE")]
        config: Option<PathBuf>,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Show how a message or tree is framed and encoded.
    Inspect {
        #[arg(short, long, conflicts_with = "tree", required_unless_present = "tree")]
        message: Option<String>,
        /// A tree in parenthesis notation, e.g. `(()(()))`.
        #[arg(long)]
        tree: Option<String>,
    },
}

fn load_toml<T: DeserializeOwned + Default>(path: Option<&Path>) -> Result<T> {
    match path {
        None => Ok(T::default()),
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            toml::from_str(&text).with_context(|| format!("parsing {}", p.display()))
        }
    }
}

fn style(shared: &Shared) -> Result<Style> {
    let mut style: Style = load_toml(shared.style.as_deref())?;
    if let Some(seed) = shared.seed {
        style.seed = seed;
    }
    style.validate()?;
    Ok(style)
}

/// Files get edge-preserving smoothing unless a params file says otherwise.
fn scan_params(shared: &Shared) -> Result<ScanParams> {
    let params = match &shared.scan_params {
        Some(p) => load_toml(Some(p))?,
        None => ScanParams::for_files(),
    };
    params.validate()?;
    Ok(params)
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(fs::File::create(p).with_context(|| format!("creating {}", p.display()))?),
        None => Box::new(io::stdout().lock()),
    })
}

fn encode(shared: &Shared, message: &str, shape: Option<&Path>, redundancy: u32, out: &Path, png: Option<&Path>, size: usize) -> Result<()> {
    let shape = match shape {
        Some(p) => Polygon::from_json(&fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?)
            .with_context(|| format!("shape {}", p.display()))?,
        None => Polygon::unit_square(),
    };
    let tree = build_code_tree(message, RedundancyLevel::new(redundancy)?, shared.scheme.into())?;
    let doc = pack_auto(&tree, &shape, &style(shared)?)?;
    fs::write(out, render_svg(&doc)).with_context(|| format!("writing {}", out.display()))?;
    if let Some(p) = png {
        if size < 64 {
            bail!("PNG size must be at least 64");
        }
        rasterize(&doc, size, size).save(p).with_context(|| format!("writing {}", p.display()))?;
    }
    println!("phi = {:.6}", doc.phi);
    println!("nodes = {}", doc.node_count());
    println!("total footprint = {}", tree.total_footprint());
    Ok(())
}

fn scan(shared: &Shared, images: &[PathBuf], json: bool) -> Result<bool> {
    let params = scan_params(shared)?;
    let mut found = false;
    for path in images {
        let report = scan_file(path, &params, shared.scheme.into()).with_context(|| format!("scanning {}", path.display()))?;
        found |= !report.messages.is_empty();
        if json {
            println!("{}", serde_json::to_string(&report)?);
        } else {
            for m in &report.messages {
                if images.len() > 1 {
                    println!("{}: {m}", path.display());
                } else {
                    println!("{m}");
                }
            }
        }
    }
    Ok(found)
}

fn inspect(shared: &Shared, message: Option<&str>, tree: Option<&str>) -> Result<()> {
    let scheme: Scheme = shared.scheme.into();
    let (frame, tree) = match (message, tree) {
        (Some(m), _) => {
            let frame = frame_message(m)?;
            let tree = encode_bits(&frame, scheme);
            (Some(frame), tree)
        }
        (None, Some(t)) => (None, t.parse::<TopologyTree>()?),
        (None, None) => bail!("give a message or a tree"),
    };
    if let Some(frame) = &frame {
        println!("frame bits ({}): {frame}", frame.len());
        println!("natural: {} decimal digits", nat_of_bits(frame).to_string().len());
    }
    let leaves = {
        fn count(t: &TopologyTree) -> usize {
            if t.is_leaf() { 1 } else { t.children().iter().map(count).sum() }
        }
        count(&tree)
    };
    println!(
        "tree: {} nodes, depth {}, {} leaves, {} root children",
        tree.node_count(),
        tree.depth(),
        leaves,
        tree.children().len()
    );
    println!("total footprint = {}", tree.total_footprint());
    let Some(decoded) = decode_tree_bounded(&tree, scheme, MAX_FRAME_BITS) else {
        println!("decoded bits: more than {MAX_FRAME_BITS}");
        return Ok(());
    };
    println!("decoded bits ({}): {decoded}", decoded.len());
    match unframe(&decoded) {
        Some(text) => println!("decoded message: {text}"),
        None => println!("decoded message: none (frame check failed)"),
    }
    if let Some(frame) = frame {
        println!("round trip: {}", if decoded == frame { "ok" } else { "MISMATCH" });
    }
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    let shared = &cli.shared;
    if let Some(jobs) = shared.jobs {
        rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global().context("configuring worker pool")?;
    }
    match &cli.command {
        Command::Encode { message, shape, redundancy, out, png, size } => {
            encode(shared, message, shape.as_deref(), *redundancy, out, png.as_deref(), *size)?
        }
        Command::Scan { images, json } => {
            return Ok(if scan(shared, images, *json)? { ExitCode::SUCCESS } else { ExitCode::from(1) });
        }
        Command::Bench { config, out } => {
            let mut cfg: BenchConfig = load_toml(config.as_deref())?;
            if let Some(seed) = shared.seed {
                cfg.seed = seed;
            }
            let result = footprint_benchmark(&cfg)?;
            write_bench_csv(&result.rows, output(out.as_deref())?)?;
        }
        Command::Sweep { config, out } => {
            let mut cfg: SweepConfig = load_toml(config.as_deref())?;
            if let Some(seed) = shared.seed {
                cfg.seed = seed;
            }
            let rows = run_sweep(&cfg, &style(shared)?, &scan_params(shared)?)?;
            write_sweep_csv(&rows, output(out.as_deref())?)?;
        }
        Command::Inspect { message, tree } => inspect(shared, message.as_deref(), tree.as_deref())?,
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
