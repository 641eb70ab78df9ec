use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use crate::ensemble::{generate_ensemble_timed, Ensemble};
use crate::error::{Error, Result};
use crate::fusion::{consensus_energy, icm_fuse, FusionOutcome};
use crate::labelmap::{write_labelmap, SegmentationMap};
use crate::video::{load_cube, write_file, CubeFormat, PlaneFamily, VideoCube};

use super::PipelineConfig;

pub const CONSENSUS_FILE: &str = "consensus.pgm";
pub const TRACE_FILE: &str = "energy_trace.json";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const TIMING_FILE: &str = "timing.json";
pub const CONFIG_FILE: &str = "config.txt";
pub const MEMBERS_DIR: &str = "members";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageTiming {
    pub stage: &'static str,
    pub seconds: f64,
}

/// Everything produced by one segmentation run.
#[derive(Debug, Clone)]
pub struct SegmentRun {
    pub consensus: SegmentationMap,
    pub ensemble: Ensemble,
    pub fusion: FusionOutcome,
    /// Consensus energy of each ensemble member used as the candidate.
    pub member_energies: Vec<f64>,
    pub fusion_seed: u64,
    pub timings: Vec<StageTiming>,
    pub total_seconds: f64,
}

impl SegmentRun {
    pub fn final_energy(&self) -> f64 {
        self.fusion.final_energy()
    }

    pub fn min_member_energy(&self) -> f64 {
        self.member_energies.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Runs LBP, features, ensemble generation and fusion on an in-memory cube.
pub fn segment(cube: &VideoCube, config: &PipelineConfig) -> Result<SegmentRun> {
    config.validate().map_err(|e| e.in_stage("config"))?;
    let start = Instant::now();
    let (ensemble, et) = generate_ensemble_timed(cube, &config.lbp, &config.features, &config.ensemble)
        .map_err(|e| e.in_stage("ensemble"))?;

    let fusion_start = Instant::now();
    let maps = ensemble.maps();
    let params = config.icm_params();
    let fusion = icm_fuse(&maps, &params).map_err(|e| e.in_stage("fusion"))?;
    let member_energies = maps
        .iter()
        .map(|m| consensus_energy(m, &maps))
        .collect::<Result<Vec<_>>>()
        .map_err(|e| e.in_stage("fusion"))?;
    let fusion_time = fusion_start.elapsed();

    let timings = vec![
        StageTiming { stage: "lbp", seconds: et.lbp.as_secs_f64() },
        StageTiming { stage: "features", seconds: et.features.as_secs_f64() },
        StageTiming {
            stage: "projection_clustering",
            seconds: et.projection_clustering.as_secs_f64(),
        },
        StageTiming { stage: "fusion", seconds: fusion_time.as_secs_f64() },
    ];
    Ok(SegmentRun {
        consensus: fusion.map.clone(),
        ensemble,
        fusion,
        member_energies,
        fusion_seed: params.seed,
        timings,
        total_seconds: start.elapsed().as_secs_f64(),
    })
}

#[derive(Debug, Serialize)]
struct MemberRecord {
    name: String,
    plane: PlaneFamily,
    replicate: usize,
    seed: u64,
    labels: usize,
    kmeans_iterations: usize,
    inertia: f64,
    consensus_energy: f64,
}

#[derive(Debug, Serialize)]
struct FusionRecord<'a> {
    init_member: usize,
    labels: usize,
    initial_energy: f64,
    final_energy: f64,
    sweeps: usize,
    changes: &'a [usize],
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    input: Option<String>,
    cube: [usize; 3],
    config: &'a PipelineConfig,
    master_seed: u64,
    fusion_seed: u64,
    ensemble: Vec<MemberRecord>,
    fusion: FusionRecord<'a>,
    outputs: Vec<String>,
}

#[derive(Debug, Serialize)]
struct Timing<'a> {
    stages: &'a [StageTiming],
    total_seconds: f64,
}

fn to_json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("manifest serializes");
    bytes.push(b'\n');
    bytes
}

/// Writes the consensus map, energy trace, manifest, timing record,
/// effective config and (optionally) ensemble members into `dir`. Every
/// file except `timing.json` depends only on the config and the input.
pub fn write_outputs(
    run: &mut SegmentRun,
    cube: &VideoCube,
    config: &PipelineConfig,
    dir: &Path,
) -> Result<Vec<PathBuf>> {
    let start = Instant::now();
    // The output location is not part of what the run computes; leaving it
    // out keeps manifests comparable across directories.
    let config = &PipelineConfig {
        output_dir: None,
        ..config.clone()
    };
    let mut written = Vec::new();
    let consensus = dir.join(CONSENSUS_FILE);
    write_labelmap(&run.consensus, &consensus)?;
    written.push(consensus.clone());
    written.push(crate::labelmap::sidecar_path(&consensus));

    let trace = dir.join(TRACE_FILE);
    write_file(&trace, &to_json(&run.fusion.energy_trace))?;
    written.push(trace);

    let cfg_path = dir.join(CONFIG_FILE);
    write_file(&cfg_path, config.to_text().as_bytes())?;
    written.push(cfg_path);

    if config.dump_ensemble {
        let members = dir.join(MEMBERS_DIR);
        run.ensemble.dump(&members)?;
        for m in &run.ensemble.members {
            written.push(members.join(format!("{}.pgm", m.file_stem())));
        }
    }

    let records = run
        .ensemble
        .members
        .iter()
        .zip(&run.member_energies)
        .map(|(m, &e)| MemberRecord {
            name: m.file_stem(),
            plane: m.plane,
            replicate: m.replicate,
            seed: m.seed,
            labels: m.map.num_labels(),
            kmeans_iterations: m.kmeans_iterations,
            inertia: m.inertia,
            consensus_energy: e,
        })
        .collect();
    let manifest = Manifest {
        tool: "dtseg",
        version: env!("CARGO_PKG_VERSION"),
        input: config.input.as_ref().map(|p| p.display().to_string()),
        cube: [cube.height(), cube.width(), cube.frames()],
        config,
        master_seed: config.master_seed(),
        fusion_seed: run.fusion_seed,
        ensemble: records,
        fusion: FusionRecord {
            init_member: run.fusion.init_member,
            labels: run.fusion.labels,
            initial_energy: run.fusion.initial_energy,
            final_energy: run.fusion.final_energy(),
            sweeps: run.fusion.sweeps(),
            changes: &run.fusion.changes,
        },
        outputs: written
            .iter()
            .filter_map(|p| p.strip_prefix(dir).ok())
            .map(|p| p.display().to_string())
            .collect(),
    };
    let manifest_path = dir.join(MANIFEST_FILE);
    write_file(&manifest_path, &to_json(&manifest))?;
    written.push(manifest_path);

    run.timings.push(StageTiming {
        stage: "output",
        seconds: start.elapsed().as_secs_f64(),
    });
    run.total_seconds += start.elapsed().as_secs_f64();
    let timing_path = dir.join(TIMING_FILE);
    write_file(
        &timing_path,
        &to_json(&Timing {
            stages: &run.timings,
            total_seconds: run.total_seconds,
        }),
    )?;
    written.push(timing_path);
    Ok(written)
}

/// The `segment` command: load the configured input, run the pipeline and
/// write all outputs into the configured output directory.
pub fn run_segment(config: &PipelineConfig) -> Result<SegmentRun> {
    let start = Instant::now();
    config.validate().map_err(|e| e.in_stage("config"))?;
    let input = config
        .input
        .as_ref()
        .ok_or_else(|| Error::InvalidParameter("no input given".into()).in_stage("config"))?;
    let output = config
        .output_dir
        .as_ref()
        .ok_or_else(|| Error::InvalidParameter("no output directory given".into()).in_stage("config"))?;
    let format = config.input_format.unwrap_or_else(|| CubeFormat::detect(input));
    let cube = load_cube(input, format).map_err(|e| e.in_stage("load"))?;
    let load_seconds = start.elapsed().as_secs_f64();

    let mut run = segment(&cube, config)?;
    run.timings.insert(0, StageTiming { stage: "load", seconds: load_seconds });
    run.total_seconds += load_seconds;
    write_outputs(&mut run, &cube, config, output).map_err(|e| e.in_stage("output"))?;
    Ok(run)
}
