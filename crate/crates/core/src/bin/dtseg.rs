use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use dtseg::features::extract_features;
use dtseg::labelmap::read_labelmap;
use dtseg::pipeline::{
    evaluate_paths, run_segment, sweep_csv, sweep_k, LabeledVideo, PipelineConfig,
};
use dtseg::synth::{self, Layout, SynthSpec};
use dtseg::video::{load_cube, CubeFormat, PlaneFamily};
use dtseg::Result;

#[derive(Parser)]
#[command(name = "dtseg", version, about = "Dynamic texture video segmentation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Segment one video into a consensus label map.
    Segment(SegmentArgs),
    /// Compare predicted label maps with ground truth.
    Evaluate {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        gt: PathBuf,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Write synthetic moving-grating fixtures.
    GenSynth(GenSynthArgs),
    /// Run the pipeline for several projection dimensions.
    SweepK(SweepArgs),
    /// Write the feature matrix of one plane family.
    DumpFeatures {
        #[command(flatten)]
        pipeline: PipelineArgs,
        #[arg(long, default_value = "xy")]
        plane: PlaneFamily,
        #[arg(long)]
        output: PathBuf,
    },
}

/// Flags shared by every command that runs the pipeline. Each one overrides
/// the same key of `--config`.
#[derive(Args, Clone)]
struct PipelineArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    input_format: Option<String>,
    #[arg(long)]
    labels: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    replicates: Option<usize>,
    #[arg(long)]
    lbp_p: Option<u32>,
    #[arg(long)]
    lbp_r: Option<u32>,
    #[arg(long)]
    bins: Option<u32>,
    #[arg(long)]
    window: Option<usize>,
    #[arg(long)]
    stride_t: Option<usize>,
    #[arg(long)]
    max_sweeps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    fusion_seed: Option<u64>,
}

impl PipelineArgs {
    fn config(&self) -> Result<PipelineConfig> {
        let mut cfg = match &self.config {
            Some(path) => PipelineConfig::from_file(path)?,
            None => PipelineConfig::default(),
        };
        let overrides: [(&str, Option<String>); 13] = [
            ("input", self.input.as_ref().map(|p| p.display().to_string())),
            ("input_format", self.input_format.clone()),
            ("labels", self.labels.map(|v| v.to_string())),
            ("k", self.k.map(|v| v.to_string())),
            ("replicates", self.replicates.map(|v| v.to_string())),
            ("lbp_p", self.lbp_p.map(|v| v.to_string())),
            ("lbp_r", self.lbp_r.map(|v| v.to_string())),
            ("bins", self.bins.map(|v| v.to_string())),
            ("window", self.window.map(|v| v.to_string())),
            ("stride_t", self.stride_t.map(|v| v.to_string())),
            ("max_sweeps", self.max_sweeps.map(|v| v.to_string())),
            ("seed", self.seed.map(|v| v.to_string())),
            ("fusion_seed", self.fusion_seed.map(|v| v.to_string())),
        ];
        for (key, value) in overrides {
            if let Some(v) = value {
                cfg.set(key, &v)?;
            }
        }
        Ok(cfg)
    }
}

#[derive(Args)]
struct SegmentArgs {
    #[command(flatten)]
    pipeline: PipelineArgs,
    #[arg(long)]
    output_dir: Option<PathBuf>,
    /// Also write every ensemble member map.
    #[arg(long)]
    dump_ensemble: bool,
}

#[derive(Args)]
struct GenSynthArgs {
    #[arg(long)]
    output_dir: PathBuf,
    #[arg(long, default_value = "vertical-split")]
    layout: Layout,
    #[arg(long, default_value_t = 64)]
    height: usize,
    #[arg(long, default_value_t = 64)]
    width: usize,
    #[arg(long, default_value_t = 16)]
    frames: usize,
    #[arg(long, default_value_t = 10.0)]
    noise: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of fixtures; more than one writes `fixture_NN` subdirectories
    /// with consecutive seeds.
    #[arg(long, default_value_t = 1)]
    count: u64,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    pipeline: PipelineArgs,
    /// Directory of fixtures as written by `gen-synth --count`.
    #[arg(long)]
    fixtures: Option<PathBuf>,
    /// Ground truth for each `--input`, in the same order.
    #[arg(long = "gt")]
    ground_truth: Vec<PathBuf>,
    #[arg(long, value_delimiter = ',', default_value = "20,40,60,80,100")]
    ks: Vec<usize>,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    output: Option<PathBuf>,
}

fn write_or_print(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| dtseg::Error::io(p, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn fixture_dirs(root: &Path) -> Result<Vec<PathBuf>> {
    if root.join(synth::CUBE_FILE).exists() {
        return Ok(vec![root.to_path_buf()]);
    }
    let mut dirs: Vec<PathBuf> = std::fs::read_dir(root)
        .map_err(|e| dtseg::Error::io(root, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.join(synth::CUBE_FILE).exists())
        .collect();
    dirs.sort();
    Ok(dirs)
}

fn load_videos(args: &SweepArgs, config: &PipelineConfig) -> Result<Vec<LabeledVideo>> {
    let mut pairs: Vec<(PathBuf, PathBuf)> = Vec::new();
    if let Some(root) = &args.fixtures {
        for d in fixture_dirs(root)? {
            pairs.push((d.join(synth::CUBE_FILE), d.join(synth::GROUND_TRUTH_FILE)));
        }
    }
    if let Some(input) = &config.input {
        let gt = args.ground_truth.first().ok_or_else(|| {
            dtseg::Error::InvalidParameter("--input needs a matching --gt".into())
        })?;
        pairs.push((input.clone(), gt.clone()));
    }
    pairs
        .into_iter()
        .map(|(cube, gt)| {
            let format = config.input_format.unwrap_or_else(|| CubeFormat::detect(&cube));
            Ok(LabeledVideo {
                name: cube.display().to_string(),
                cube: load_cube(&cube, format)?,
                ground_truth: read_labelmap(&gt)?,
            })
        })
        .collect()
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Segment(args) => {
            let mut config = args.pipeline.config()?;
            if let Some(dir) = args.output_dir {
                config.output_dir = Some(dir);
            }
            config.dump_ensemble |= args.dump_ensemble;
            let run = run_segment(&config)?;
            println!(
                "consensus: {} labels, energy {:.6} (best member {:.6}), {} sweeps",
                run.consensus.num_labels(),
                run.final_energy(),
                run.min_member_energy(),
                run.fusion.sweeps()
            );
            Ok(true)
        }
        Command::Evaluate { pred, gt, output } => {
            let summary = evaluate_paths(&pred, &gt)?;
            for row in &summary.rows {
                match (&row.report, &row.error) {
                    (Some(r), _) => eprintln!(
                        "{}: PR {:.4} GCE {:.4} VoI {:.4} F {:.4}",
                        row.name, r.pr, r.gce, r.voi, r.f_measure
                    ),
                    (None, Some(e)) => eprintln!("{}: error: {e}", row.name),
                    (None, None) => {}
                }
            }
            if let Some(avg) = &summary.average {
                eprintln!("Avg. PR {:.4} over {} maps", avg.pr, avg.count);
            }
            let json = serde_json::to_string_pretty(&summary).expect("report serializes") + "\n";
            write_or_print(output.as_deref(), &json)?;
            Ok(summary.failures == 0)
        }
        Command::GenSynth(args) => {
            for i in 0..args.count {
                let spec = SynthSpec {
                    height: args.height,
                    width: args.width,
                    frames: args.frames,
                    layout: args.layout,
                    noise_sigma: args.noise,
                    seed: args.seed + i,
                    ..SynthSpec::default()
                };
                let fixture = synth::generate(&spec)?;
                for w in &fixture.warnings {
                    eprintln!("warning: {w}");
                }
                let dir = if args.count == 1 {
                    args.output_dir.clone()
                } else {
                    args.output_dir.join(format!("fixture_{i:02}"))
                };
                synth::write_fixture(&fixture, &spec, &dir)?;
                println!("{}", dir.display());
            }
            Ok(true)
        }
        Command::SweepK(args) => {
            let config = args.pipeline.config()?;
            let videos = load_videos(&args, &config)?;
            let rows = sweep_k(&videos, &config, &args.ks)?;
            write_or_print(args.output.as_deref(), &sweep_csv(&rows))?;
            Ok(true)
        }
        Command::DumpFeatures { pipeline, plane, output } => {
            let config = pipeline.config()?;
            let input = config
                .input
                .as_ref()
                .ok_or_else(|| dtseg::Error::InvalidParameter("no input given".into()))?;
            let format = config.input_format.unwrap_or_else(|| CubeFormat::detect(input));
            let cube = load_cube(input, format)?;
            let features = extract_features(&cube, plane, &config.lbp, &config.features)?;
            features.write(&output)?;
            println!("{} x {} -> {}", features.rows, features.dim, output.display());
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
