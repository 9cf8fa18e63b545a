//! End-to-end runs of the `rimsteer` binary.

use std::path::Path;
use std::process::{Command, Output};

const SMALL: &str =
    "[dish]\ndiameter_m = 18.0\nreflector_diameter_m = 17.0\nfocal_length_m = 7.2\nfrequency_hz = 5.0e8\n\
[dyads]\nsource = \"ideal\"\n\
[null]\ntheta_z_deg = 5.0\nphi_deg = 0.0\n\
[pattern]\nstart_deg = -8.0\nstop_deg = 8.0\nstep_deg = 0.5\n\
[sweep]\ntheta_z_deg = [3.0, 4.0, 5.0]\nphi_deg = [0.0, 45.0]\nbatch = 2\n";

fn rimsteer(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rimsteer"))
        .args(args)
        .env("RIMSTEER_WORKERS", "2")
        .output()
        .expect("binary runs")
}

fn ok(out: &Output) {
    assert!(
        out.status.success(),
        "exit {:?}\nstdout: {}\nstderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("run.toml");
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn data_lines(path: &Path) -> Vec<String> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(str::to_string)
        .collect()
}

fn column(path: &Path, name: &str) -> Vec<String> {
    let lines = data_lines(path);
    let idx = lines[0].split(',').position(|h| h == name).expect("column present");
    lines[1..]
        .iter()
        .map(|l| l.split(',').nth(idx).unwrap().to_string())
        .collect()
}

#[test]
fn malformed_config_names_the_field() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        &SMALL.replace("focal_length_m = 7.2", "focal_length_m = -1.0"),
    );
    let out = rimsteer(&["reference", "-c", &cfg]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("focal_length_m"), "stderr: {err}");

    let cfg = write_config(tmp.path(), &format!("{SMALL}[mesh]\nsample_per_wavelength = 4.0\n"));
    let out = rimsteer(&["reference", "-c", &cfg]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sample_per_wavelength"));
}

#[test]
fn states_round_trip_reproduces_design() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), SMALL);
    let d = tmp.path().join("design");
    ok(&rimsteer(&["design", "-c", &cfg, "-o", d.to_str().unwrap()]));
    for f in ["pattern.csv", "pattern.svg", "states.csv", "states.svg", "summary.toml"] {
        assert!(d.join(f).exists(), "missing {f}");
    }

    let e = tmp.path().join("export");
    ok(&rimsteer(&["states", "export", "-c", &cfg, "-o", e.to_str().unwrap()]));
    assert_eq!(data_lines(&e.join("states.csv")), data_lines(&d.join("states.csv")));

    let i = tmp.path().join("import");
    let exported = e.join("states.csv");
    ok(&rimsteer(&[
        "states",
        "import",
        "-c",
        &cfg,
        "-o",
        i.to_str().unwrap(),
        "--states",
        exported.to_str().unwrap(),
    ]));
    assert_eq!(data_lines(&i.join("states.csv")), data_lines(&d.join("states.csv")));

    let p = tmp.path().join("replay");
    let imported = i.join("states.csv");
    ok(&rimsteer(&[
        "pattern",
        "-c",
        &cfg,
        "-o",
        p.to_str().unwrap(),
        "--states",
        imported.to_str().unwrap(),
    ]));
    assert_eq!(data_lines(&p.join("pattern.csv")), data_lines(&d.join("pattern.csv")));

    let theta: Vec<f64> = column(&p.join("pattern.csv"), "theta_z_deg")
        .iter()
        .map(|s| s.parse().unwrap())
        .collect();
    assert_eq!(theta.len(), 33);
    assert!(theta.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn import_rejects_foreign_states() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), SMALL);
    let e = tmp.path().join("export");
    ok(&rimsteer(&["states", "export", "-c", &cfg, "-o", e.to_str().unwrap()]));
    let other = write_config(
        tmp.path(),
        &SMALL.replace("reflector_diameter_m = 17.0", "reflector_diameter_m = 16.5"),
    );
    let exported = e.join("states.csv");
    let out = rimsteer(&["states", "import", "-c", &other, "--states", exported.to_str().unwrap()]);
    assert!(!out.status.success());
}

#[test]
fn sweep_resumes_from_checkpoint() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), SMALL);
    let s = tmp.path().join("sweep");
    let sdir = s.to_str().unwrap();
    ok(&rimsteer(&["sweep", "-c", &cfg, "-o", sdir]));
    let csv = s.join("sweep.csv");
    let first = column(&csv, "null_depth_db");
    assert_eq!(first.len(), 6);
    assert_eq!(column(&csv, "status"), vec!["ok"; 6]);

    // Keep only the first two points in the checkpoint, then resume.
    std::fs::write(s.join("sweep.csv.checkpoint"), "0\n1\n").unwrap();
    let out = rimsteer(&["--workers", "1", "sweep", "-c", &cfg, "-o", sdir, "--resume"]);
    ok(&out);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(
        text.contains("4 points computed") && text.contains("2 reused"),
        "{text}"
    );
    let mut resumed: Vec<(usize, String)> = column(&csv, "index")
        .iter()
        .map(|s| s.parse().unwrap())
        .zip(column(&csv, "null_depth_db"))
        .collect();
    resumed.sort();
    assert_eq!(resumed.into_iter().map(|r| r.1).collect::<Vec<_>>(), first);
}

#[test]
fn plot_rerenders_svg() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), &format!("{SMALL}[output]\nsvg = false\n"));
    let d = tmp.path().join("ref");
    ok(&rimsteer(&["reference", "-c", &cfg, "-o", d.to_str().unwrap()]));
    assert!(!d.join("pattern.svg").exists());
    let svg = tmp.path().join("cut.svg");
    ok(&rimsteer(&[
        "plot",
        "pattern",
        d.join("pattern.csv").to_str().unwrap(),
        "-o",
        svg.to_str().unwrap(),
    ]));
    let text = std::fs::read_to_string(&svg).unwrap();
    assert!(text.starts_with("<svg") || text.starts_with("<?xml"));
    assert!(text.contains("polyline") || text.contains("path"));
}
