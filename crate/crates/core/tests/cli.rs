use std::fs;
use std::process::Command;

use sha2::{Digest, Sha256};

const SMALL: &str = "burn_in_steps = 200\nhorizon = 0.5\nensemble = 3\n";

fn mdshadow() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mdshadow"))
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "horizon = 1\ndts = 0.3\n").unwrap();
    let out = mdshadow().arg("exp3").arg("--config").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("multiple"));

    fs::write(&cfg, "no_such_key = 1\n").unwrap();
    let out = mdshadow().arg("exp1").arg("--config").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1"));
}

#[test]
fn manifest_lists_every_output_with_its_hash() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("small.cfg");
    fs::write(&cfg, SMALL).unwrap();
    let out_dir = dir.path().join("out");
    let status = mdshadow()
        .args(["exp4", "--preset", "desk", "--seed", "17", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out_dir)
        .status()
        .unwrap();
    assert!(status.success());
    let manifest = fs::read_to_string(out_dir.join("manifest.sha256")).unwrap();
    let mut listed = 0;
    for line in manifest.lines() {
        let (hash, name) = line.split_once("  ").unwrap();
        let bytes = fs::read(out_dir.join(name)).unwrap();
        assert_eq!(hex::encode(Sha256::digest(&bytes)), hash, "{name}");
        listed += 1;
    }
    let on_disk = fs::read_dir(&out_dir).unwrap().count();
    assert_eq!(listed + 1, on_disk);
    assert!(manifest.contains("ks.csv"));
    assert!(manifest.contains("hist_F5_dt0.0025.csv"));
    let ks = fs::read_to_string(out_dir.join("ks.csv")).unwrap();
    assert!(ks.starts_with("functional,dt_a,dt_b,ks\n"));
}

#[test]
fn same_seed_same_hashes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("small.cfg");
    fs::write(&cfg, SMALL).unwrap();
    let run = |sub: &str| {
        let out = mdshadow()
            .args(["exp1", "--preset", "desk", "--seed", "3", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(dir.path().join(sub))
            .output()
            .unwrap();
        assert!(out.status.success());
        fs::read_to_string(dir.path().join(sub).join("manifest.sha256")).unwrap()
    };
    assert_eq!(run("a"), run("b"));
    let traj = fs::read_to_string(dir.path().join("a").join("traj_0.csv")).unwrap();
    assert!(traj.starts_with("t,qx,qy\n0,0,0\n"));
}
