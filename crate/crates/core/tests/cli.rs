use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sphere-sfwm"))
}

fn run_ok(args: &[&str]) {
    let out = bin().args(args).output().unwrap();
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

fn report(path: &Path) -> Vec<(String, String)> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| {
            let mut it = l.split(',');
            (it.next().unwrap().to_string(), it.next().unwrap().to_string())
        })
        .collect()
}

fn value(rows: &[(String, String)], key: &str) -> f64 {
    rows.iter().find(|(k, _)| k == key).unwrap().1.parse().unwrap()
}

#[test]
fn comb_peak_width_decreases_with_q() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(&cfg, "[grids]\nteeth = 3\nband_hz = 2e12\n").unwrap();
    let mut widths = Vec::new();
    for q in ["1e6", "1e7", "1e8"] {
        let out = dir.path().join(q);
        run_ok(&[
            "comb",
            "--q",
            q,
            "--layout",
            "central",
            "--config",
            cfg.to_str().unwrap(),
            "--out-dir",
            out.to_str().unwrap(),
        ]);
        let peaks = std::fs::read_to_string(out.join("comb_peaks.csv")).unwrap();
        assert!(peaks.starts_with("j,omega_offset_Hz,height,fwhm_Hz\n"));
        let centre = peaks.lines().find(|l| l.starts_with("0,")).unwrap();
        widths.push(centre.split(',').nth(3).unwrap().parse::<f64>().unwrap());
        let comb = std::fs::read_to_string(out.join("comb.csv")).unwrap();
        assert!(comb.starts_with("omega_offset_Hz,intensity\n"));
    }
    assert!(widths[0] > widths[1] && widths[1] > widths[2], "{widths:?}");
}

#[test]
fn resonances_list_pump_order() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(&["resonances", "--out-dir", dir.path().to_str().unwrap()]);
    let text = std::fs::read_to_string(dir.path().join("resonances.csv")).unwrap();
    let row = text.lines().find(|l| l.starts_with("774,")).unwrap();
    let lambda: f64 = row.split(',').nth(3).unwrap().parse().unwrap();
    assert!((lambda - 1550.9).abs() < 2.0, "{row}");
}

#[test]
fn exit_codes_follow_failure_class() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "[sphere]\nradius_m = -1.0\n").unwrap();
    let out = bin()
        .args(["resonances", "--config", cfg.to_str().unwrap(), "--out-dir", dir.path().to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sphere.radius_m"));

    std::fs::write(&cfg, "[sphere]\nradius_mm = 1.0\n").unwrap();
    let out = bin().args(["resonances", "--config", cfg.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(3));

    let garbage = dir.path().join("g.txt");
    std::fs::write(&garbage, "not a spectrogram\n").unwrap();
    std::fs::write(&cfg, format!("[analyze]\ninput = {:?}\n", garbage.to_str().unwrap())).unwrap();
    let out = bin()
        .args(["analyze", "--config", cfg.to_str().unwrap(), "--out-dir", dir.path().to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));

    assert_eq!(bin().arg("bogus").output().unwrap().status.code(), Some(2));
}

#[test]
fn analyze_reingests_its_own_spectrogram() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("a");
    run_ok(&["analyze", "--seed", "3", "--out-dir", first.to_str().unwrap()]);
    let cfg = dir.path().join("c.toml");
    std::fs::write(
        &cfg,
        format!("[analyze]\ninput = {:?}\n", first.join("spectrogram.txt").to_str().unwrap()),
    )
    .unwrap();
    let second = dir.path().join("b");
    run_ok(&["analyze", "--config", cfg.to_str().unwrap(), "--out-dir", second.to_str().unwrap()]);
    let a = std::fs::read(first.join("analyze_report.csv")).unwrap();
    let b = std::fs::read(second.join("analyze_report.csv")).unwrap();
    assert_eq!(a, b);
    let r = report(&first.join("analyze_report.csv"));
    assert!((value(&r, "idler_observed") - 1562.30).abs() < 0.285);
}

#[test]
fn herald_width_reingests_envelope() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("a");
    run_ok(&["herald-width", "--out-dir", first.to_str().unwrap()]);
    let cfg = dir.path().join("c.toml");
    std::fs::write(
        &cfg,
        format!("[herald]\ninput = {:?}\n", first.join("herald_envelope.csv").to_str().unwrap()),
    )
    .unwrap();
    let second = dir.path().join("b");
    run_ok(&["herald-width", "--config", cfg.to_str().unwrap(), "--out-dir", second.to_str().unwrap()]);
    let a = report(&first.join("herald_report.csv"));
    let b = report(&second.join("herald_report.csv"));
    // the envelope file round-trips at 17 significant digits
    assert!((value(&a, "linewidth_fwhm") / value(&b, "linewidth_fwhm") - 1.0).abs() < 1e-12);
    assert!((value(&a, "linewidth_fwhm") / 0.366e6 - 1.0).abs() < 0.1);
}

#[test]
fn seed_changes_synthetic_output() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    run_ok(&["fit-airy", "--seed", "1", "--out-dir", a.to_str().unwrap()]);
    run_ok(&["fit-airy", "--seed", "2", "--out-dir", b.to_str().unwrap()]);
    assert_ne!(std::fs::read(a.join("scan.csv")).unwrap(), std::fs::read(b.join("scan.csv")).unwrap());
}

#[test]
fn threads_flag_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    run_ok(&["phasematch", "--threads", "1", "--out-dir", a.to_str().unwrap()]);
    run_ok(&["phasematch", "--threads", "3", "--out-dir", b.to_str().unwrap()]);
    assert_eq!(
        std::fs::read(a.join("phasematch.csv")).unwrap(),
        std::fs::read(b.join("phasematch.csv")).unwrap()
    );
}
