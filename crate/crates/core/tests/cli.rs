use std::collections::HashMap;
use std::path::Path;
use std::process::{Command, Output};

use snnq::analysis::SpikeRaster;

fn snnq(args: &[&str]) -> Output {
    let out = Command::new(env!("CARGO_BIN_EXE_snnq")).args(args).output().unwrap();
    assert!(
        out.status.success(),
        "snnq {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn stats(text: &str) -> HashMap<String, String> {
    text.lines()
        .filter_map(|l| l.split_once('='))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

#[test]
fn pingpong_raster_alternates_between_populations() {
    let dir = tempfile::tempdir().unwrap();
    let raster = path(dir.path(), "raster.tsv");
    snnq(&[
        "--model",
        "pingpong",
        "--duration",
        "1",
        "--deterministic",
        "--raster",
        &raster,
    ]);
    let r = SpikeRaster::load(Path::new(&raster)).unwrap();
    assert!(!r.is_empty());
    let mut steps: Vec<u64> = r.records().iter().map(|&(t, _)| t).collect();
    steps.dedup();
    for t in steps {
        let ids = r.frame(t);
        let group = ids[0] / 100;
        assert!(ids.iter().all(|&i| i / 100 == group), "step {t} mixes populations");
        if let Some(&prev) = r.frame(t.wrapping_sub(1)).first() {
            assert_eq!(prev / 100, 1 - group);
        }
    }
}

#[test]
fn deterministic_runs_repeat_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let a = path(dir.path(), "a.tsv");
    let b = path(dir.path(), "b.tsv");
    for out in [&a, &b] {
        snnq(&[
            "--model",
            "vogels",
            "--neurons",
            "800",
            "--duration",
            "0.1",
            "--seed",
            "7",
            "--deterministic",
            "--raster",
            out,
        ]);
    }
    let (a, b) = (std::fs::read_to_string(a).unwrap(), std::fs::read_to_string(b).unwrap());
    assert!(a.lines().count() > 2);
    assert_eq!(a, b);
}

#[test]
fn stats_report_scaling_and_memory() {
    let out = snnq(&[
        "--model",
        "vogels",
        "--neurons",
        "4000",
        "--duration",
        "0.05",
        "--seed",
        "3",
    ]);
    let s = stats(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(s["model"], "vogels");
    assert_eq!(s["neurons"], "4000");
    assert_eq!(s["seed"], "3");
    assert_eq!(s["steps"], "500");
    assert_eq!(s["scaling_constant"].parse::<f64>().unwrap(), 1.0);
    assert!(s["memory.bytes"].parse::<f64>().unwrap() > 0.0);
    assert!(s["estimate.bytes"].parse::<f64>().unwrap() > 0.0);
    assert!(s.contains_key("setup_s") && s.contains_key("sim_s") && s.contains_key("firing_rate"));
}

#[test]
fn stats_file_and_param_override() {
    let dir = tempfile::tempdir().unwrap();
    let file = path(dir.path(), "stats.txt");
    snnq(&[
        "--model",
        "brunel",
        "--neurons",
        "1000",
        "--duration",
        "0.02",
        "--delay",
        "4",
        "--param",
        "brunel.w_exc=0.12",
        "--stats",
        &file,
    ]);
    let s = stats(&std::fs::read_to_string(file).unwrap());
    assert_eq!(s["delay"], "4");
    assert_eq!(s["neurons"], "1000");
}

#[test]
fn sweep_writes_one_csv_row_per_size() {
    let dir = tempfile::tempdir().unwrap();
    let csv = path(dir.path(), "sweep.csv");
    snnq(&[
        "--model",
        "brunel",
        "--sweep",
        "10000,40000",
        "--duration",
        "0.01",
        "--csv",
        &csv,
    ]);
    let text = std::fs::read_to_string(csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "synapses,setup_s,sim_s,bytes");
    assert_eq!(lines.len(), 3);
    for row in &lines[1..] {
        let cols: Vec<f64> = row.split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!(cols.len(), 4);
        assert!(cols.iter().all(|&c| c >= 0.0));
    }
}

#[test]
fn bad_arguments_fail_cleanly() {
    for args in [
        &["--model", "nope", "--neurons", "10"][..],
        &["--model", "brunel"][..],
        &["--model", "brunel", "--neurons", "100", "--param", "brunel.unknown=1"][..],
    ] {
        let out = Command::new(env!("CARGO_BIN_EXE_snnq")).args(args).output().unwrap();
        assert!(!out.status.success(), "{args:?} should fail");
        assert!(!out.stderr.is_empty());
    }
}
