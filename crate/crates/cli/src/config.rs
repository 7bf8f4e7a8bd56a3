//! Run configuration shared by every subcommand.

use std::path::PathBuf;

use ao_core::counting::Region;
use ao_core::periods::{catalog, HyperellipticFamily};
use serde::Serialize;

use crate::CliError;

/// Default schedule when neither `--precision` nor the environment sets one.
pub const DEFAULT_PRECISION: &[u32] = &[50, 100];
pub const PRECISION_ENV: &str = "AO_PRECISION";
/// Radius of the discs about t = 0 and t = 1 left out of a scan unless the
/// caller overrides it.
pub const DEFAULT_EXCLUDE: f64 = 0.05;

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilySource {
    Label(String),
    File(PathBuf),
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanConfig {
    pub family: FamilySource,
    pub region: Region,
    pub exclude: f64,
    pub disc_bound: i64,
    /// Digit counts, strictly increasing.
    pub precision: Vec<u32>,
    pub height: f64,
    pub epsilon: f64,
    pub degree: u32,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    pub seed: u64,
    /// Number of profile samples along the cusp ray.
    pub samples: usize,
    /// Cap on the sweep candidates per chart in `count`.
    pub sweep_cap: f64,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            family: FamilySource::Label("legendre".into()),
            region: Region::Rect { x0: -5.0, x1: 5.0, y0: -5.0, y1: 5.0 },
            exclude: DEFAULT_EXCLUDE,
            disc_bound: 100,
            precision: DEFAULT_PRECISION.to_vec(),
            height: 25.0,
            epsilon: 0.5,
            degree: 2,
            out: None,
            seed: 1,
            samples: 12,
            sweep_cap: 4e6,
        }
    }
}

impl ScanConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        if self.precision.is_empty() {
            return bad("empty precision schedule".into());
        }
        if self.precision.windows(2).any(|w| w[1] <= w[0]) {
            return bad(format!("precision schedule {:?} is not strictly increasing", self.precision));
        }
        if self.precision[0] < 10 {
            return bad("precision below 10 digits".into());
        }
        if self.disc_bound < 3 {
            return bad(format!("discriminant bound {} < 3", self.disc_bound));
        }
        if !(self.height >= 1.0) || !(self.epsilon > 0.0) || self.degree == 0 {
            return bad("need H >= 1, epsilon > 0, degree >= 1".into());
        }
        if !(self.exclude >= 0.0) {
            return bad("negative exclusion radius".into());
        }
        match self.region {
            Region::Rect { x0, x1, y0, y1 } if !(x0 <= x1 && y0 <= y1) => bad("region with x0 > x1 or y0 > y1".into()),
            Region::Annulus { r_in, r_out, .. } if !(0.0 <= r_in && r_in <= r_out) => bad("annulus needs 0 <= r_in <= r_out".into()),
            _ => Ok(()),
        }
    }

    pub fn load_family(&self) -> Result<HyperellipticFamily, CliError> {
        match &self.family {
            FamilySource::Label(l) => catalog(l).map_err(|e| CliError::Config(e.to_string())),
            FamilySource::File(p) => {
                let s = std::fs::read_to_string(p).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
                HyperellipticFamily::from_json(&s).map_err(|e| CliError::Config(e.to_string()))
            }
        }
    }

    pub fn top_digits(&self) -> u32 {
        *self.precision.last().expect("validated")
    }

    /// Zero-area regions hold no parameters.
    pub fn region_is_empty(&self) -> bool {
        match self.region {
            Region::Rect { x0, x1, y0, y1 } => x0 == x1 || y0 == y1,
            Region::Annulus { r_in, r_out, .. } => r_in == r_out,
        }
    }

    /// True when `(x, y)` is in the region and outside the no-go discs.
    pub fn admits(&self, x: f64, y: f64) -> bool {
        !self.region_is_empty() && self.region.contains(x, y) && x.hypot(y) > self.exclude && (x - 1.0).hypot(y) > self.exclude
    }
}

pub fn parse_precision(s: &str) -> Result<Vec<u32>, CliError> {
    s.split(',')
        .map(|p| p.trim().parse::<u32>().map_err(|_| CliError::Config(format!("bad precision entry `{p}`"))))
        .collect()
}

/// `x0,x1,y0,y1` or `annulus:cx,cy,r_in,r_out`.
pub fn parse_region(s: &str) -> Result<Region, CliError> {
    let (annulus, body) = match s.strip_prefix("annulus:") {
        Some(b) => (true, b),
        None => (false, s),
    };
    let v: Vec<f64> = body
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|_| CliError::Config(format!("bad region entry `{p}`"))))
        .collect::<Result<_, _>>()?;
    if v.len() != 4 {
        return Err(CliError::Config(format!("region needs 4 numbers, got {}", v.len())));
    }
    Ok(if annulus {
        Region::Annulus { center: (v[0], v[1]), r_in: v[2], r_out: v[3] }
    } else {
        Region::Rect { x0: v[0], x1: v[1], y0: v[2], y1: v[3] }
    })
}

pub fn region_label(r: &Region) -> String {
    match *r {
        Region::Rect { x0, x1, y0, y1 } => format!("[{x0},{x1}]x[{y0},{y1}]"),
        Region::Annulus { center, r_in, r_out } => format!("annulus({},{};{r_in},{r_out})", center.0, center.1),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedule_must_increase() {
        let mut c = ScanConfig::default();
        assert!(c.validate().is_ok());
        c.precision = vec![100, 50];
        assert!(matches!(c.validate(), Err(CliError::Config(_))));
        c.precision = vec![50, 50];
        assert!(c.validate().is_err());
    }

    #[test]
    fn region_strings() {
        assert_eq!(parse_region("-1,1,0,2").unwrap(), Region::Rect { x0: -1.0, x1: 1.0, y0: 0.0, y1: 2.0 });
        assert_eq!(
            parse_region("annulus:0,0,0,1e-4").unwrap(),
            Region::Annulus { center: (0.0, 0.0), r_in: 0.0, r_out: 1e-4 }
        );
        assert!(parse_region("1,2,3").is_err());
        assert_eq!(parse_precision("30, 60").unwrap(), vec![30, 60]);
    }

    #[test]
    fn no_go_discs() {
        let c = ScanConfig::default();
        assert!(!c.admits(0.01, 0.0) && !c.admits(1.0, 0.02) && c.admits(2.0, 0.0));
    }
}
