//! `profile`: plot data as CSV — the cusp profile (|z|, ‖τ‖), and
//! (|D|, H(τ)) and (d, h) over the scan's certificates.

use std::fmt::Write as _;

use ao_core::siegel::cusp_norm_profile;
use serde::Serialize;

use crate::config::ScanConfig;
use crate::scan::{scan, ScanReport};
use crate::CliError;

pub const CUSP_HEADER: &str = "abs_z,norm_tau";
pub const HEIGHT_DISC_HEADER: &str = "abs_disc,height_tau";
pub const DEGREE_HEIGHT_HEADER: &str = "d,h";

#[derive(Clone, Debug, Serialize)]
pub struct ProfileSummary {
    pub family: String,
    pub cusp: Option<(f64, f64)>,
    /// Fitted ‖τ‖ ≤ A + B·|log|z − s||.
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub certificates: usize,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct Profile {
    pub cusp_csv: String,
    pub height_disc_csv: String,
    pub degree_height_csv: String,
    pub summary: ProfileSummary,
    pub scan: Option<ScanReport>,
}

fn csv(header: &str, rows: impl IntoIterator<Item = String>) -> String {
    let mut s = format!("{header}\n");
    for r in rows {
        let _ = writeln!(s, "{r}");
    }
    s
}

/// Singular point inside the region nearest the origin, and its distance to
/// the other finite singular points.
fn cusp_in_region(cfg: &ScanConfig, locus: &[(f64, f64)]) -> Option<((f64, f64), f64)> {
    if cfg.region_is_empty() {
        return None;
    }
    let mut inside: Vec<(f64, f64)> = locus.iter().copied().filter(|s| cfg.region.contains(s.0, s.1)).collect();
    inside.sort_by(|a, b| a.0.hypot(a.1).partial_cmp(&b.0.hypot(b.1)).expect("finite"));
    let s = *inside.first()?;
    let sep = locus
        .iter()
        .filter(|o| (o.0 - s.0).hypot(o.1 - s.1) > 1e-12)
        .map(|o| (o.0 - s.0).hypot(o.1 - s.1))
        .fold(f64::INFINITY, f64::min);
    Some((s, sep))
}

pub fn profile(cfg: &ScanConfig) -> Result<Profile, CliError> {
    cfg.validate()?;
    let fam = cfg.load_family()?;
    let digits = cfg.precision[0];
    let locus: Vec<(f64, f64)> =
        fam.discriminant_locus(128)?.iter().map(|b| b.to_c64()).collect();
    let mut summary = ProfileSummary {
        family: fam.label().to_string(),
        cusp: None,
        a: None,
        b: None,
        certificates: 0,
        notes: vec![],
    };
    let mut cusp_rows = vec![];
    match cusp_in_region(cfg, &locus) {
        Some((s, sep)) => {
            let r_max = (sep / 4.0).min(1e-2);
            let prof = cusp_norm_profile(&fam, s, 0.0, r_max, r_max * 1e-6, cfg.samples, digits)?;
            cusp_rows = prof.samples.iter().map(|(r, v)| format!("{r:.6e},{v:.12e}")).collect();
            summary.cusp = Some(s);
            summary.a = Some(prof.a);
            summary.b = Some(prof.b);
        }
        None => summary.notes.push("no singular point in the region: empty cusp profile".into()),
    }
    let scan = if fam.label() == "legendre" { Some(scan(cfg)?) } else { None };
    let (mut hd, mut dh) = (vec![], vec![]);
    match &scan {
        Some(rep) => {
            for r in &rep.certificates {
                let c = &r.certificate;
                hd.push(format!("{},{:.12e}", c.disc_center.abs(), c.h_tau));
                dh.push(format!("{},{:.12e}", c.d, c.h));
            }
            summary.certificates = rep.certificates.len();
        }
        None => summary.notes.push("CM scan unavailable for this family: empty certificate tables".into()),
    }
    Ok(Profile {
        cusp_csv: csv(CUSP_HEADER, cusp_rows),
        height_disc_csv: csv(HEIGHT_DISC_HEADER, hd),
        degree_height_csv: csv(DEGREE_HEIGHT_HEADER, dh),
        summary,
        scan,
    })
}
