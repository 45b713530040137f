use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use samble::attention::{init_weights, load_weights, WeightSet};
use samble::binsampler::{run_policy, score_cloud, BoundaryMode, BoundaryState, SambleConfig};
use samble::geometry::{
    knn_with, load_pointcloud, neighbor_frequency, normalize_unit_sphere, write_xyz, CloudFormat,
    PointCloud,
};
use samble::harness::{gen_shape, load_config, run_bench, SamplerSpec, ShapeKind, ShapeParams};
use samble::{Error, Policy, Result};

/// Key dimension used when no weights file is given.
const DEFAULT_KEY_DIM: usize = 16;

#[derive(Parser)]
#[command(
    name = "samble",
    version,
    about = "Sparse-attention point cloud sampling"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalOpts {
    /// RNG seed; overrides the config file's `seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Flat key-value config file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Binary weights file; seeded weights are generated when absent.
    #[arg(long, global = true)]
    weights: Option<PathBuf>,
    /// Boundary state file (read by sample/bins, written by calibrate).
    #[arg(long, global = true)]
    state: Option<PathBuf>,
    /// Input cloud format; guessed from the extension when absent.
    #[arg(long, global = true)]
    format: Option<CloudFormat>,
}

#[derive(Args)]
struct CloudArgs {
    cloud: PathBuf,
    /// Skip unit-sphere normalization of the input.
    #[arg(long)]
    raw: bool,
    /// Output file (stdout when absent).
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run any policy on a cloud and write the selected indices.
    Sample {
        #[command(flatten)]
        input: CloudArgs,
        #[arg(short)]
        m: usize,
        /// Override the config policy.
        #[arg(long)]
        policy: Option<Policy>,
    },
    /// Emit the `index raw normalized` score table.
    Scores {
        #[command(flatten)]
        input: CloudArgs,
    },
    /// Bin-based sampling plus a `bin beta kappa ratio omega` histogram.
    Bins {
        #[command(flatten)]
        input: CloudArgs,
        #[arg(short)]
        m: usize,
        /// Histogram file (stdout when absent).
        #[arg(long)]
        hist: Option<PathBuf>,
    },
    /// Emit how often each point is chosen as a neighbor.
    KnnFreq {
        #[command(flatten)]
        input: CloudArgs,
        /// Neighbor count; defaults to the config's k.
        #[arg(short)]
        k: Option<usize>,
    },
    /// Compare samplers on synthetic shapes.
    Bench {
        /// Comma-separated generator ids.
        #[arg(
            long,
            default_value = "grid2d,circle,cube-shell,l-bracket",
            value_delimiter = ','
        )]
        shapes: Vec<String>,
        /// Comma-separated sample sizes.
        #[arg(long, short, default_value = "16,32", value_delimiter = ',')]
        m: Vec<usize>,
        /// Comma-separated policies.
        #[arg(
            long,
            default_value = "random,fps,voxel,top-m,prior,bin",
            value_delimiter = ','
        )]
        samplers: Vec<Policy>,
        /// Add a wall-clock column (makes output run-dependent).
        #[arg(long)]
        timing: bool,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Learn bin boundaries over a directory of clouds.
    Calibrate {
        dir: PathBuf,
        /// Clouds per boundary update.
        #[arg(long, default_value_t = 8)]
        batch: usize,
        /// Passes over the directory.
        #[arg(long, default_value_t = 1)]
        epochs: usize,
        /// State output path; defaults to --state.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Write a synthetic shape as an xyz file.
    Gen {
        shape: ShapeKind,
        #[arg(long)]
        size: Option<usize>,
        #[arg(long, default_value_t = 0.0)]
        jitter: f64,
        #[arg(long, short)]
        out: Option<PathBuf>,
        /// Also write the edge mask, one 0/1 per line.
        #[arg(long)]
        mask: Option<PathBuf>,
    },
}

fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(io::BufWriter::new(
            fs::File::create(p).map_err(|e| io_err(p, e))?,
        )),
        None => Box::new(io::BufWriter::new(io::stdout().lock())),
    })
}

fn io_err(path: &Path, e: io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source: e,
    }
}

fn write_err(e: io::Error) -> Error {
    io_err(Path::new("<output>"), e)
}

struct Context {
    config: SambleConfig,
    global: GlobalOpts,
}

impl Context {
    fn new(global: GlobalOpts) -> Result<Self> {
        let mut config = match &global.config {
            Some(p) => load_config(p)?,
            None => SambleConfig::default(),
        };
        if let Some(s) = global.seed {
            config.seed = s;
        }
        Ok(Context { config, global })
    }

    fn cloud(&self, input: &CloudArgs) -> Result<PointCloud> {
        self.load(&input.cloud, input.raw)
    }

    fn load(&self, path: &Path, raw: bool) -> Result<PointCloud> {
        let format = self
            .global
            .format
            .unwrap_or_else(|| CloudFormat::from_path(path));
        let cloud = load_pointcloud(path, format)?;
        Ok(if raw {
            cloud
        } else {
            normalize_unit_sphere(&cloud)
        })
    }

    fn weights(&self, d_in: usize) -> Result<WeightSet> {
        match &self.global.weights {
            Some(p) => load_weights(p),
            None => init_weights(d_in, DEFAULT_KEY_DIM, self.config.n_b, self.config.seed),
        }
    }

    fn state(&self) -> Result<Option<BoundaryState>> {
        match &self.global.state {
            Some(p) if p.exists() => Ok(Some(BoundaryState::load(p)?)),
            _ => Ok(None),
        }
    }
}

fn boundary_mode(state: &Option<BoundaryState>) -> BoundaryMode<'_> {
    match state {
        Some(s) => BoundaryMode::Frozen(s),
        None => BoundaryMode::Adaptive(None),
    }
}

fn run(cli: Cli) -> Result<()> {
    let ctx = Context::new(cli.global)?;
    match cli.command {
        Command::Sample { input, m, policy } => {
            let cloud = ctx.cloud(&input)?;
            let mut cfg = ctx.config.clone();
            if let Some(p) = policy {
                cfg.policy = p;
            }
            let ws = ctx.weights(cloud.attended_dim())?;
            let state = ctx.state()?;
            let out = run_policy(&cloud, &ws, &cfg, boundary_mode(&state), m)?;
            let mut w = open_out(input.out.as_deref())?;
            out.result.write_to(&mut w).map_err(write_err)?;
            w.flush().map_err(write_err)
        }
        Command::Scores { input } => {
            let cloud = ctx.cloud(&input)?;
            let cfg = &ctx.config;
            let ws = ctx.weights(cloud.attended_dim())?;
            let scored = score_cloud(&cloud, &ws, cfg)?;
            let mut w = open_out(input.out.as_deref())?;
            let wr = |w: &mut Box<dyn Write>| -> io::Result<()> {
                writeln!(
                    w,
                    "# mode {} k {} variant {} N {} seed {}",
                    cfg.mode,
                    cfg.k,
                    cfg.variant,
                    cloud.len(),
                    cfg.seed
                )?;
                writeln!(w, "# index raw normalized")?;
                for (i, (r, n)) in scored
                    .scores
                    .raw
                    .iter()
                    .zip(&scored.scores.normalized)
                    .enumerate()
                {
                    writeln!(w, "{i} {r} {n}")?;
                }
                w.flush()
            };
            wr(&mut w).map_err(write_err)
        }
        Command::Bins { input, m, hist } => {
            let cloud = ctx.cloud(&input)?;
            let cfg = SambleConfig {
                policy: Policy::Bin,
                ..ctx.config.clone()
            };
            let ws = ctx.weights(cloud.attended_dim())?;
            let state = ctx.state()?;
            let out = run_policy(&cloud, &ws, &cfg, boundary_mode(&state), m)?;
            let model = out.model.expect("bin policy reports its model");
            if let Some(path) = &input.out {
                let mut w = open_out(Some(path))?;
                out.result
                    .write_to(&mut w)
                    .and_then(|_| w.flush())
                    .map_err(write_err)?;
            }
            let mut h = open_out(hist.as_deref())?;
            model
                .write_histogram(&mut h, cloud.id())
                .and_then(|_| h.flush())
                .map_err(write_err)
        }
        Command::KnnFreq { input, k } => {
            let cloud = ctx.cloud(&input)?;
            let k = k.unwrap_or(ctx.config.k);
            let table = knn_with(&cloud, k, ctx.config.search)?;
            let counts = neighbor_frequency(&table);
            let mut w = open_out(input.out.as_deref())?;
            let wr = |w: &mut Box<dyn Write>| -> io::Result<()> {
                writeln!(w, "# N {} k {}", cloud.len(), k)?;
                writeln!(w, "# index count")?;
                for (i, c) in counts.iter().enumerate() {
                    writeln!(w, "{i} {c}")?;
                }
                w.flush()
            };
            wr(&mut w).map_err(write_err)
        }
        Command::Bench {
            shapes,
            m,
            samplers,
            timing,
            out,
        } => {
            let shapes = shapes
                .iter()
                .map(|id| {
                    let kind: ShapeKind = id.parse()?;
                    gen_shape(
                        kind,
                        ShapeParams::sized(kind.default_size()),
                        ctx.config.seed,
                    )
                })
                .collect::<Result<Vec<_>>>()?;
            let specs: Vec<SamplerSpec> = samplers
                .iter()
                .map(|&p| {
                    SamplerSpec::new(
                        p.name(),
                        SambleConfig {
                            policy: p,
                            ..ctx.config.clone()
                        },
                    )
                })
                .collect();
            let report = run_bench(&shapes, &specs, &m, ctx.config.seed)?;
            let mut w = open_out(out.as_deref())?;
            w.write_all(report.to_table(timing).as_bytes())
                .and_then(|_| w.flush())
                .map_err(write_err)
        }
        Command::Calibrate {
            dir,
            batch,
            epochs,
            out,
        } => {
            let target = out
                .or_else(|| ctx.global.state.clone())
                .ok_or_else(|| Error::Config("calibrate needs --out or --state".into()))?;
            if batch == 0 {
                return Err(Error::Config("batch must be at least 1".into()));
            }
            let mut files: Vec<PathBuf> = fs::read_dir(&dir)
                .map_err(|e| io_err(&dir, e))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| matches!(p.extension().and_then(|e| e.to_str()), Some("xyz" | "ply")))
                .collect();
            files.sort();
            if files.is_empty() {
                return Err(Error::Config(format!(
                    "no .xyz or .ply clouds in {}",
                    dir.display()
                )));
            }
            let mut state = match ctx.state()? {
                Some(s) if s.n_b == ctx.config.n_b => s,
                _ => BoundaryState::new(ctx.config.n_b, ctx.config.gamma)?,
            };
            let mut ws: Option<WeightSet> = None;
            for _ in 0..epochs {
                for chunk in files.chunks(batch) {
                    let mut scores = Vec::with_capacity(chunk.len());
                    for path in chunk {
                        let cloud = ctx.load(path, false)?;
                        if ws.is_none() {
                            ws = Some(ctx.weights(cloud.attended_dim())?);
                        }
                        let cfg = SambleConfig {
                            k: ctx.config.k.min(cloud.len()),
                            ..ctx.config.clone()
                        };
                        scores.push(
                            score_cloud(&cloud, ws.as_ref().expect("set above"), &cfg)?
                                .scores
                                .normalized,
                        );
                    }
                    state.observe_batch(&scores)?;
                }
            }
            state.save(&target)?;
            eprintln!(
                "calibrated {} boundaries over {} steps -> {}",
                state.boundaries.len(),
                state.steps,
                target.display()
            );
            Ok(())
        }
        Command::Gen {
            shape,
            size,
            jitter,
            out,
            mask,
        } => {
            let params = ShapeParams {
                size: size.unwrap_or(shape.default_size()),
                jitter,
            };
            let s = gen_shape(shape, params, ctx.config.seed)?;
            let header = vec![
                format!(
                    "shape {} size {} jitter {} seed {}",
                    shape, params.size, jitter, ctx.config.seed
                ),
                format!("N {} edges {}", s.cloud.len(), s.edge_count()),
            ];
            let mut w = open_out(out.as_deref())?;
            write_xyz(&mut w, &s.cloud, &header)
                .and_then(|_| w.flush())
                .map_err(write_err)?;
            if let Some(p) = mask {
                let text: String = s
                    .edge_mask
                    .iter()
                    .map(|&e| if e { "1\n" } else { "0\n" })
                    .collect();
                fs::write(&p, text).map_err(|e| io_err(&p, e))?;
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("samble: {e}");
            ExitCode::FAILURE
        }
    }
}
