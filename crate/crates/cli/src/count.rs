//! `count`: the counting engine on the τ-coordinate tuple of the family.

use ao_core::counting::{count_points, cusp::legendre_cusps, AnalyticTuple, CountOptions, CountReport};
use serde::Serialize;

use crate::config::{region_label, ScanConfig};
use crate::CliError;

#[derive(Clone, Debug, Serialize)]
pub struct CountRun {
    pub family: String,
    pub region: String,
    pub tuple: String,
    #[serde(rename = "H")]
    pub height: f64,
    pub epsilon: f64,
    pub degree: u32,
    pub digits: u32,
    pub seed: u64,
    pub singular_points: Vec<(f64, f64)>,
    pub report: CountReport,
    pub notes: Vec<String>,
}

impl CountRun {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn complete(&self) -> bool {
        self.report.complete
    }
}

pub fn count(cfg: &ScanConfig) -> Result<CountRun, CliError> {
    cfg.validate()?;
    let fam = cfg.load_family()?;
    if fam.label() != "legendre" {
        return Err(CliError::Config(format!(
            "count needs the τ-coordinate tuple, available for the Legendre family only (got `{}`)",
            fam.label()
        )));
    }
    let sigma = vec![(0.0, 0.0), (1.0, 0.0)];
    let cusps = legendre_cusps(cfg.height, cfg.degree)?;
    let digits = cfg.precision[0];
    let opts = CountOptions { digits, seed: cfg.seed, p: None, sweep_cap: cfg.sweep_cap };
    let tuple = AnalyticTuple::legendre();
    let report =
        count_points(&tuple, &cfg.region, &sigma, &cusps, cfg.height, cfg.epsilon, cfg.degree, &opts)?;
    let mut notes = vec![];
    if report.cusp_charts == 0 {
        notes.push("region meets no singular point: interior-disc charts only, zero cusp charts".into());
    }
    Ok(CountRun {
        family: fam.label().to_string(),
        region: region_label(&cfg.region),
        tuple: "(tau, tau^2)".into(),
        height: cfg.height,
        epsilon: cfg.epsilon,
        degree: cfg.degree,
        digits,
        seed: cfg.seed,
        singular_points: sigma,
        report,
        notes,
    })
}
