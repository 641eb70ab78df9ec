mod common;

use std::process::Command;

use dtseg::ensemble::{generate_ensemble, kmeans, EnsembleConfig, KMeansParams, Points};
use dtseg::features::{FeatureParams, LbpParams};
use dtseg::labelmap::{read_labelmap, write_labelmap};
use dtseg::metrics::pr_index;
use dtseg::pipeline::{run_segment, sweep_k, LabeledVideo, PipelineConfig};
use dtseg::synth::{generate, write_fixture, SynthSpec, CUBE_FILE, GROUND_TRUTH_FILE};
use dtseg::SegmentationMap;
use rand::seq::index::sample;
use rand::Rng;
use rand_distr::{Distribution, Normal};

/// Plain Lloyd iterations from `k` distinct random points; returns the inertia.
fn lloyd(points: &Points, k: usize, rng: &mut impl Rng) -> f64 {
    let mut centers: Vec<Vec<f64>> =
        sample(rng, points.rows, k).iter().map(|i| points.row(i).to_vec()).collect();
    let dist = |p: &[f64], c: &[f64]| p.iter().zip(c).map(|(a, b)| (a - b).powi(2)).sum::<f64>();
    let mut assign = vec![usize::MAX; points.rows];
    for _ in 0..300 {
        let mut moved = false;
        for (i, a) in assign.iter_mut().enumerate() {
            let p = points.row(i);
            let best = (0..k)
                .min_by(|&x, &y| dist(p, &centers[x]).total_cmp(&dist(p, &centers[y])))
                .unwrap();
            moved |= *a != best;
            *a = best;
        }
        if !moved {
            break;
        }
        for (c, center) in centers.iter_mut().enumerate() {
            let members: Vec<usize> = (0..points.rows).filter(|&i| assign[i] == c).collect();
            if members.is_empty() {
                continue;
            }
            for (j, v) in center.iter_mut().enumerate() {
                *v = members.iter().map(|&i| points.row(i)[j]).sum::<f64>() / members.len() as f64;
            }
        }
    }
    (0..points.rows).map(|i| dist(points.row(i), &centers[assign[i]])).sum()
}

#[test]
fn kmeans_is_close_to_best_of_many_restarts() {
    for seed in 0..4u64 {
        let mut rng = common::rng(100 + seed);
        let (k, dim, per) = (3 + seed as usize % 2, 4, 80);
        let noise = Normal::new(0.0, 1.0).unwrap();
        let mut values = Vec::new();
        for c in 0..k {
            let center: Vec<f64> = (0..dim).map(|_| rng.random_range(-4.0..4.0) + c as f64).collect();
            for _ in 0..per {
                values.extend(center.iter().map(|m| m + noise.sample(&mut rng)));
            }
        }
        let points = Points::new(k * per, dim, values);
        let best = (0..200).map(|_| lloyd(&points, k, &mut rng)).fold(f64::INFINITY, f64::min);
        let fit = kmeans(&points, &KMeansParams::new(k, seed)).unwrap();
        assert!(
            fit.inertia <= 1.05 * best,
            "seed {seed}: inertia {} vs best restart {best}",
            fit.inertia
        );
    }
}

#[test]
fn every_ensemble_member_is_a_usable_weak_segmentation() {
    let fixture = generate(&SynthSpec { seed: 7, ..SynthSpec::default() }).unwrap();
    let cfg = EnsembleConfig::default();
    let ensemble =
        generate_ensemble(&fixture.cube, &LbpParams::default(), &FeatureParams::default(), &cfg).unwrap();
    assert_eq!(ensemble.len(), 12);
    for m in &ensemble.members {
        let pr = pr_index(&m.map, &fixture.ground_truth).unwrap();
        assert!(pr >= 0.6, "{} has PR {pr}", m.file_stem());
    }
}

fn fixture_dir(seed: u64) -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    let spec = SynthSpec { seed, ..SynthSpec::default() };
    write_fixture(&generate(&spec).unwrap(), &spec, dir.path()).unwrap();
    dir
}

#[test]
fn stage_times_are_positive_and_add_up() {
    let dir = fixture_dir(3);
    let config = PipelineConfig {
        input: Some(dir.path().join(CUBE_FILE)),
        output_dir: Some(dir.path().join("out")),
        ..PipelineConfig::default()
    };
    let run = run_segment(&config).unwrap();
    let stages: Vec<&str> = run.timings.iter().map(|t| t.stage).collect();
    assert_eq!(stages, ["load", "lbp", "features", "projection_clustering", "fusion", "output"]);
    assert!(run.timings.iter().all(|t| t.seconds > 0.0), "{:?}", run.timings);
    let sum: f64 = run.timings.iter().map(|t| t.seconds).sum();
    assert!(
        (sum - run.total_seconds).abs() <= 0.1 * run.total_seconds,
        "stages sum to {sum}, total {}",
        run.total_seconds
    );
    let consensus = read_labelmap(dir.path().join("out/consensus.pgm")).unwrap();
    assert_eq!(consensus.num_labels(), 2);
}

#[test]
fn single_k_gives_single_row() {
    let f = generate(&SynthSpec { height: 16, width: 16, frames: 10, ..SynthSpec::default() }).unwrap();
    let videos = [LabeledVideo { name: "v".into(), cube: f.cube, ground_truth: f.ground_truth }];
    let rows = sweep_k(&videos, &PipelineConfig::default(), &[30]).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].k, 30);
}

#[test]
fn identical_textures_are_flagged() {
    let textures = vec![dtseg::synth::Grating::PALETTE[0]; 2];
    let spec = SynthSpec { textures: textures.clone(), noise_sigma: 0.0, ..SynthSpec::default() };
    let f = generate(&spec).unwrap();
    assert!(f.warnings.iter().any(|w| w.contains("unsegmentable")), "{:?}", f.warnings);
    assert_eq!(f.ground_truth.num_labels(), 2);
    assert!(f.ground_truth.get(0, 0) != f.ground_truth.get(0, 63));
}

fn dtseg(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_dtseg")).args(args).output().expect("binary runs")
}

fn path(p: &std::path::Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn cli_generates_segments_and_evaluates() {
    let tmp = tempfile::tempdir().unwrap();
    let fixtures = tmp.path().join("fx");
    let out = dtseg(&["gen-synth", "--output-dir", path(&fixtures), "--count", "2", "--seed", "5"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let first = fixtures.join("fixture_00");

    let seg = tmp.path().join("seg");
    let out = dtseg(&[
        "segment",
        "--input",
        path(&first.join(CUBE_FILE)),
        "--output-dir",
        path(&seg),
        "--labels",
        "2",
        "--k",
        "60",
        "--replicates",
        "2",
        "--seed",
        "9",
        "--dump-ensemble",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(seg.join("members/member_yt_1.pgm").exists());
    let config = PipelineConfig::from_file(seg.join("config.txt")).unwrap();
    assert_eq!((config.ensemble.projection_dim, config.ensemble.replicates, config.master_seed()), (60, 2, 9));

    let gt = first.join(GROUND_TRUTH_FILE);
    let report = tmp.path().join("report.json");
    let out = dtseg(&["evaluate", "--pred", path(&gt), "--gt", path(&gt), "--output", path(&report)]);
    assert!(out.status.success());
    let json: serde_json::Value = serde_json::from_slice(&std::fs::read(&report).unwrap()).unwrap();
    assert_eq!(json["rows"][0]["report"]["pr"], 1.0);

    let csv = tmp.path().join("sweep.csv");
    let out = dtseg(&["sweep-k", "--fixtures", path(&fixtures), "--ks", "20,40", "--output", path(&csv)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "k,avg_pr,wall_time_s");
    assert_eq!(lines.len(), 3);

    let features = tmp.path().join("xt.dtf");
    let out = dtseg(&[
        "dump-features",
        "--input",
        path(&first.join(CUBE_FILE)),
        "--plane",
        "xt",
        "--stride-t",
        "2",
        "--output",
        path(&features),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let m = dtseg::features::FeatureMatrix::read(&features).unwrap();
    assert_eq!((m.rows, m.dim), (64 * 64, 8 * 16));
}

#[test]
fn cli_reports_mismatched_maps_and_stage_errors() {
    let tmp = tempfile::tempdir().unwrap();
    let (pred, gt) = (tmp.path().join("p"), tmp.path().join("g"));
    write_labelmap(&SegmentationMap::uniform(4, 4), pred.join("a.pgm")).unwrap();
    write_labelmap(&SegmentationMap::uniform(4, 5), gt.join("a.pgm")).unwrap();
    let out = dtseg(&["evaluate", "--pred", path(&pred), "--gt", path(&gt)]);
    assert!(!out.status.success());
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(json["rows"][0]["error"].as_str().unwrap().contains("dimension"));

    let out = dtseg(&[
        "segment",
        "--input",
        path(&tmp.path().join("missing.dtc")),
        "--output-dir",
        path(&tmp.path().join("o")),
    ]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("load stage failed"), "{err}");

    let out = dtseg(&["segment", "--input", "x", "--output-dir", "y", "--bins", "1"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("config stage failed"));
}

#[test]
fn config_file_values_yield_to_flags() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = fixture_dir(11);
    let cfg = tmp.path().join("run.cfg");
    std::fs::write(&cfg, "k = 40\nreplicates = 1\nseed = 3\n").unwrap();
    let out_dir = tmp.path().join("out");
    let out = dtseg(&[
        "segment",
        "--config",
        path(&cfg),
        "--input",
        path(&dir.path().join(CUBE_FILE)),
        "--output-dir",
        path(&out_dir),
        "--seed",
        "4",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let used = PipelineConfig::from_file(out_dir.join("config.txt")).unwrap();
    assert_eq!(used.ensemble.projection_dim, 40);
    assert_eq!(used.ensemble.replicates, 1);
    assert_eq!(used.master_seed(), 4);
}
