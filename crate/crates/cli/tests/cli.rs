use std::process::Command;

fn ao() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_ao"));
    c.env_remove("AO_PRECISION");
    c
}

fn tmpdir(tag: &str) -> std::path::PathBuf {
    let d = std::env::temp_dir().join(format!("ao-cli-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    d
}

#[test]
fn decreasing_precision_is_a_config_error() {
    let out = ao().args(["scan", "--precision", "100,50"]).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("strictly increasing"));
    let env = ao().args(["scan"]).env("AO_PRECISION", "60,60").output().unwrap();
    assert_eq!(env.status.code(), Some(3));
}

#[test]
fn catalog_lists_families() {
    let out = ao().arg("catalog").output().unwrap();
    assert!(out.status.success());
    let s = String::from_utf8(out.stdout).unwrap();
    for l in ["legendre", "wilson_g2", "masser_g2"] {
        assert!(s.contains(l), "{l} missing from {s}");
    }
    let one = ao().args(["catalog", "--family", "wilson_g2"]).output().unwrap();
    let v: serde_json::Value = serde_json::from_slice(&one.stdout).unwrap();
    assert!(v.is_object());
    assert_eq!(ao().args(["catalog", "--family", "nope"]).output().unwrap().status.code(), Some(3));
}

#[test]
fn empty_region_profile_has_headers_only() {
    let d = tmpdir("empty");
    let out = ao().args(["profile", "--region", "2,2,0,1", "--out"]).arg(&d).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for (f, h) in [("cusp_profile.csv", "abs_z,norm_tau"), ("height_disc.csv", "abs_disc,height_tau"), ("degree_height.csv", "d,h")] {
        assert_eq!(std::fs::read_to_string(d.join(f)).unwrap(), format!("{h}\n"));
    }
    let _ = std::fs::remove_dir_all(&d);
}

#[test]
fn genus_two_profile_rows() {
    let d = tmpdir("g2");
    let out = ao()
        .args(["profile", "--family", "wilson_g2", "--samples", "5", "--precision", "20,40", "--out"])
        .arg(&d)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(d.join("cusp_profile.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 5);
    assert!(rows.iter().all(|r| r.split(',').count() == 2));
    let _ = std::fs::remove_dir_all(&d);
}

#[test]
fn small_bound_away_from_equianharmonic_fibres_is_empty() {
    // D = −3 fibres sit at t = (1 ± i√3)/2; the strip Im t ∈ [−0.5, 0.5] misses them
    let d = tmpdir("d3");
    let out = ao()
        .args(["scan", "--disc-bound", "3", "--region", "-5,5,-0.5,0.5", "--out"])
        .arg(&d)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(d.join("scan.json")).unwrap()).unwrap();
    assert_eq!(v["certificates"].as_array().unwrap().len(), 0);
    assert_eq!(v["complete"], true);
    let _ = std::fs::remove_dir_all(&d);
}
