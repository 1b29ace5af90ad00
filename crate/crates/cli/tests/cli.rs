mod common;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use common::{imgq, path_str};
use imgq::assembly::{extract_quality, read_vectors};
use imgq::dataset::{read_manifest, write_manifest};
use imgq::imgcore::{load_image, save_png};
use imgq::RasterImage;

fn synth(dir: &Path, n: usize, seed: u64) -> PathBuf {
    let out = imgq(&["synth", "--n", &n.to_string(), "--seed", &seed.to_string(), "--out", path_str(dir)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    dir.join("manifest.jsonl")
}

/// A manifest holding only the first `n` records of `manifest`, written next to it.
fn truncated(manifest: &Path, n: usize) -> PathBuf {
    let records = read_manifest(manifest).unwrap();
    let path = manifest.with_file_name(format!("first{n}.jsonl"));
    write_manifest(&records[..n], &path).unwrap();
    path
}

fn tree(dir: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(d).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push((p.strip_prefix(dir).unwrap().to_path_buf(), fs::read(&p).unwrap()));
            }
        }
    }
    out.sort();
    out
}

#[test]
fn extract_ten_records() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = truncated(&synth(dir.path(), 20, 4), 10);
    let out = dir.path().join("f.imgq");
    let csv = dir.path().join("f.csv");
    let run = imgq(&["extract", "--manifest", path_str(&manifest), "--out", path_str(&out), "--csv", path_str(&csv)]);
    assert!(run.status.success());
    let vectors = read_vectors(&out).unwrap();
    let ids: Vec<u64> = vectors.iter().map(|v| v.0).collect();
    assert_eq!(ids, (1..=10).collect::<Vec<_>>());
    assert_eq!(fs::read_to_string(&csv).unwrap().lines().count(), 11);
}

#[test]
fn extract_skips_one_missing_image() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = truncated(&synth(dir.path(), 20, 4), 10);
    fs::remove_file(dir.path().join("images/000003.png")).unwrap();
    let out = dir.path().join("f.imgq");
    let run = imgq(&["extract", "--manifest", path_str(&manifest), "--out", path_str(&out)]);
    assert!(run.status.success());
    assert_eq!(read_vectors(&out).unwrap().len(), 9);
    let stderr = String::from_utf8_lossy(&run.stderr);
    assert!(stderr.contains("listing 3"), "{stderr}");
}

#[test]
fn extract_fails_above_ten_percent() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = truncated(&synth(dir.path(), 20, 4), 10);
    fs::remove_file(dir.path().join("images/000003.png")).unwrap();
    fs::write(dir.path().join("images/000007.png"), b"not a png").unwrap();
    let out = dir.path().join("f.imgq");
    let run = imgq(&["extract", "--manifest", path_str(&manifest), "--out", path_str(&out)]);
    assert_eq!(run.status.code(), Some(1));
}

#[test]
fn extract_unreadable_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let run = imgq(&["extract", "--manifest", "/nonexistent/m.jsonl", "--out", path_str(&dir.path().join("f"))]);
    assert_eq!(run.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&run.stderr).contains("/nonexistent/m.jsonl"));
}

#[test]
fn extract_output_independent_of_threads() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = truncated(&synth(dir.path(), 24, 6), 24);
    let (one, three) = (dir.path().join("1.imgq"), dir.path().join("3.imgq"));
    assert!(imgq(&["--threads", "1", "extract", "--manifest", path_str(&manifest), "--out", path_str(&one)]).status.success());
    let env_run = Command::new(env!("CARGO_BIN_EXE_imgq"))
        .args(["extract", "--manifest", path_str(&manifest), "--out", path_str(&three)])
        .env("IMGQ_THREADS", "3")
        .status()
        .unwrap();
    assert!(env_run.success());
    assert_eq!(fs::read(one).unwrap(), fs::read(three).unwrap());
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let d = path_str(dir.path());
    assert_eq!(imgq(&["synth", "--n", "5", "--out", d]).status.code(), Some(2));
    assert_eq!(imgq(&["extract", "--manifest", "m.jsonl"]).status.code(), Some(2));
    assert_eq!(imgq(&["train-eval", "--manifest", "m", "--binarize", "mean"]).status.code(), Some(2));
    assert_eq!(imgq(&["train-eval", "--manifest", "m", "--test-fraction", "1.5"]).status.code(), Some(2));
    assert_eq!(imgq(&["--threads", "0", "synth", "--n", "20", "--out", d]).status.code(), Some(2));
    assert_eq!(imgq(&["extract", "--manifest", "m", "--out", "o", "--theta", "-1"]).status.code(), Some(2));
    assert_eq!(imgq(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn visualize_writes_maps_and_features() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = synth(&dir.path().join("c"), 20, 2);
    let image = dir.path().join("c/images/000005.png");
    let out = dir.path().join("vis");
    let run = imgq(&["visualize", "--image", path_str(&image), "--out", path_str(&out)]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let mut names: Vec<String> = fs::read_dir(&out).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    names.sort();
    assert_eq!(
        names,
        [
            "features.json",
            "laplacian.png",
            "lbp.png",
            "saliency.png",
            "thirds_map.png",
            "wavelet_hh.png",
            "wavelet_hl.png",
            "wavelet_lh.png"
        ]
    );

    let features: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("features.json")).unwrap()).unwrap();
    let features_file = dir.path().join("f.imgq");
    let manifest5 = truncated(&manifest, 5);
    assert!(imgq(&["extract", "--manifest", path_str(&manifest5), "--out", path_str(&features_file)]).status.success());
    let (_, q) = read_vectors(&features_file).unwrap().into_iter().find(|v| v.0 == 5).unwrap();
    for (name, value) in q.scalars() {
        assert_eq!(features[name].as_f64().unwrap(), value, "{name}");
    }
    let thirds: Vec<f64> = features["Mai11-thirds map"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    assert_eq!(thirds, q.block("Mai11-thirds map").unwrap());
}

#[test]
fn visualize_constant_image_has_black_laplacian() {
    let dir = tempfile::tempdir().unwrap();
    let image = dir.path().join("flat.png");
    save_png(&RasterImage::solid_rgb(64, 48, [0.3, 0.6, 0.2]), &image).unwrap();
    let out = dir.path().join("vis");
    assert!(imgq(&["visualize", "--image", path_str(&image), "--out", path_str(&out)]).status.success());
    let lap = load_image(out.join("laplacian.png")).unwrap();
    assert!(lap.data().iter().all(|v| *v == 0.0));
    let thirds = load_image(out.join("thirds_map.png")).unwrap();
    assert_eq!((thirds.width(), thirds.height()), (200, 200));
}

#[test]
fn visualize_decode_failure() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.png");
    fs::write(&bad, b"garbage").unwrap();
    let run = imgq(&["visualize", "--image", path_str(&bad), "--out", path_str(&dir.path().join("v"))]);
    assert_eq!(run.status.code(), Some(1));
}

#[test]
fn train_eval_report_and_models() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = synth(dir.path(), 200, 8);
    let features = dir.path().join("f.imgq");
    assert!(imgq(&["extract", "--manifest", path_str(&manifest), "--out", path_str(&features)]).status.success());
    let args = |models: &Path| {
        imgq(&[
            "train-eval",
            "--manifest",
            path_str(&manifest),
            "--features",
            path_str(&features),
            "--out",
            path_str(models),
            "--epochs",
            "20",
        ])
    };
    let (m1, m2) = (dir.path().join("m1"), dir.path().join("m2"));
    let first = args(&m1);
    assert!(first.status.success(), "{}", String::from_utf8_lossy(&first.stderr));
    let report: serde_json::Value = serde_json::from_slice(&first.stdout).unwrap();
    for key in ["auc_text", "auc_image", "auc_mm", "lift_image_pct", "lift_mm_pct", "n_train", "n_test", "seed"] {
        assert!(report.get(key).is_some(), "{key}");
    }
    assert_eq!(report["seed"], 3);
    for name in ["model_text.json", "model_image.json", "model_mm.json"] {
        assert!(m1.join(name).exists());
    }
    assert_eq!(args(&m2).stdout, first.stdout);
    assert_eq!(tree(&m1), tree(&m2));

    let seeded = Command::new(env!("CARGO_BIN_EXE_imgq"))
        .args(["train-eval", "--manifest", path_str(&manifest), "--features", path_str(&features)])
        .args(["--out", path_str(&m2), "--epochs", "20"])
        .env("IMGQ_SEED", "12")
        .output()
        .unwrap();
    let report: serde_json::Value = serde_json::from_slice(&seeded.stdout).unwrap();
    assert_eq!(report["seed"], 12);
}

#[test]
fn train_eval_single_class_fails() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = synth(dir.path(), 40, 5);
    let mut records = read_manifest(&manifest).unwrap();
    for r in &mut records {
        (r.favorites, r.clicks, r.purchases) = (1, 1, 1);
    }
    write_manifest(&records, &manifest).unwrap();
    let run = imgq(&["train-eval", "--manifest", path_str(&manifest)]);
    assert_eq!(run.status.code(), Some(1));
}

#[test]
fn synth_tree_is_reproducible() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    synth(a.path(), 50, 21);
    let via_env = Command::new(env!("CARGO_BIN_EXE_imgq"))
        .args(["synth", "--n", "50", "--out", path_str(b.path())])
        .env("IMGQ_SEED", "21")
        .status()
        .unwrap();
    assert!(via_env.success());
    let tree_a = tree(a.path());
    assert_eq!(tree_a.iter().filter(|(p, _)| p.extension().is_some_and(|e| e == "png")).count(), 50);
    assert_eq!(read_manifest(a.path().join("manifest.jsonl")).unwrap().len(), 50);
    assert_eq!(tree_a, tree(b.path()));
}

#[test]
fn features_json_matches_library() {
    let dir = tempfile::tempdir().unwrap();
    let image = dir.path().join("g.png");
    save_png(&common::textured_image(64, 3), &image).unwrap();
    let out = dir.path().join("v");
    assert!(imgq(&["visualize", "--image", path_str(&image), "--out", path_str(&out)]).status.success());
    let q = extract_quality(&load_image(&image).unwrap()).unwrap();
    let features: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("features.json")).unwrap()).unwrap();
    assert_eq!(features["Ke06-qh"].as_f64().unwrap(), q.block("Ke06-qh").unwrap()[0]);
}

/// Needs at least two cores; on a single core it only reports the timings.
#[test]
fn extract_scales_with_threads() {
    let cores = std::thread::available_parallelism().map_or(1, |n| n.get());
    let dir = tempfile::tempdir().unwrap();
    let manifest = synth(dir.path(), 200, 13);
    let mut records = read_manifest(&manifest).unwrap();
    for r in &mut records {
        let img = load_image(dir.path().join(&r.image_path)).unwrap();
        let big = imgq::imgcore::resize(&img, 256, 256);
        r.image_path = format!("big/{}.png", r.listing_id);
        fs::create_dir_all(dir.path().join("big")).unwrap();
        save_png(&big, dir.path().join(&r.image_path)).unwrap();
    }
    write_manifest(&records, &manifest).unwrap();
    let time = |threads: &str| {
        let start = Instant::now();
        let out = dir.path().join(format!("t{threads}.imgq"));
        assert!(imgq(&["--threads", threads, "extract", "--manifest", path_str(&manifest), "--out", path_str(&out)]).status.success());
        start.elapsed().as_secs_f64()
    };
    let (t1, t2) = (time("1"), time("2"));
    println!("1 thread {t1:.2} s, 2 threads {t2:.2} s, {cores} cores available");
    if cores >= 2 {
        assert!(t1 / t2 >= 1.4, "speedup {:.2}", t1 / t2);
    }
}
