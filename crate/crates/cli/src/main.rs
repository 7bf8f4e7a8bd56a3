use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use ao_cli::config::{parse_precision, parse_region, FamilySource, ScanConfig, DEFAULT_EXCLUDE, PRECISION_ENV};
use ao_cli::{count, profile, scan, CliError};
use ao_core::periods::{catalog, CATALOG};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "ao", about = "CM points and effective point counts on families of Jacobians")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Find and certify CM parameters in a region.
    Scan(Common),
    /// Count low-height points on the τ-coordinate curve.
    Count(Common),
    /// Write plot data (cusp profile, height/discriminant tables).
    Profile(Common),
    /// List catalogued families, or print one as JSON.
    Catalog {
        #[arg(long)]
        family: Option<String>,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value = "legendre", conflicts_with = "family_file")]
    family: String,
    /// Family as JSON (see `catalog --family`).
    #[arg(long)]
    family_file: Option<PathBuf>,
    /// `x0,x1,y0,y1` or `annulus:cx,cy,r_in,r_out`.
    #[arg(long, default_value = "-5,5,-5,5", allow_hyphen_values = true)]
    region: String,
    /// Radius of the discs about 0 and 1 left out of scans.
    #[arg(long, default_value_t = DEFAULT_EXCLUDE)]
    exclude: f64,
    #[arg(long, default_value_t = 100)]
    disc_bound: i64,
    #[arg(long, default_value_t = 25.0)]
    height: f64,
    #[arg(long, default_value_t = 0.5)]
    epsilon: f64,
    #[arg(long, default_value_t = 2)]
    degree: u32,
    /// Digit schedule, strictly increasing.
    #[arg(long, env = PRECISION_ENV, default_value = "50,100")]
    precision: String,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Samples along the cusp ray (profile).
    #[arg(long, default_value_t = 12)]
    samples: usize,
}

impl Common {
    fn config(&self) -> Result<ScanConfig, CliError> {
        let cfg = ScanConfig {
            family: match &self.family_file {
                Some(p) => FamilySource::File(p.clone()),
                None => FamilySource::Label(self.family.clone()),
            },
            region: parse_region(&self.region)?,
            exclude: self.exclude,
            disc_bound: self.disc_bound,
            precision: parse_precision(&self.precision)?,
            height: self.height,
            epsilon: self.epsilon,
            degree: self.degree,
            out: self.out.clone(),
            seed: self.seed,
            samples: self.samples,
            ..ScanConfig::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

fn write(dir: &Option<PathBuf>, name: &str, body: &str) -> Result<(), CliError> {
    match dir {
        Some(d) => {
            std::fs::create_dir_all(d)?;
            std::fs::write(Path::new(d).join(name), body)?;
        }
        None => {
            if name.ends_with(".json") {
                println!("{body}");
            }
        }
    }
    Ok(())
}

/// Exit status: 0 complete, 2 with unresolved regions.
fn run(cli: Cli) -> Result<u8, CliError> {
    let start = Instant::now();
    let complete = match cli.cmd {
        Cmd::Catalog { family } => {
            match family {
                Some(l) => println!("{}", catalog(&l).map_err(|e| CliError::Config(e.to_string()))?.to_json()),
                None => {
                    for l in CATALOG {
                        let f = catalog(l)?;
                        println!("{l}\tgenus {}", f.genus());
                    }
                }
            }
            true
        }
        Cmd::Scan(c) => {
            let cfg = c.config()?;
            let rep = scan::scan(&cfg)?;
            write(&cfg.out, "scan.json", &rep.to_json())?;
            eprintln!(
                "scan: {} candidates, {} certified, {} unresolved in {:.1?}",
                rep.candidates,
                rep.certificates.len(),
                rep.unresolved.len(),
                start.elapsed()
            );
            rep.complete
        }
        Cmd::Count(c) => {
            let cfg = c.config()?;
            let run = count::count(&cfg)?;
            write(&cfg.out, "count.json", &run.to_json())?;
            eprintln!(
                "count: N = {}, {} hypersurfaces, {} charts ({} cusp), {} unresolved in {:.1?}",
                run.report.n,
                run.report.certificate.count,
                run.report.charts,
                run.report.cusp_charts,
                run.report.unresolved.len(),
                start.elapsed()
            );
            run.complete()
        }
        Cmd::Profile(c) => {
            let cfg = c.config()?;
            let p = profile::profile(&cfg)?;
            let out = cfg.out.clone().or_else(|| Some(PathBuf::from(".")));
            write(&out, "cusp_profile.csv", &p.cusp_csv)?;
            write(&out, "height_disc.csv", &p.height_disc_csv)?;
            write(&out, "degree_height.csv", &p.degree_height_csv)?;
            write(&out, "profile.json", &serde_json::to_string_pretty(&p.summary).expect("serializable"))?;
            eprintln!("profile: B = {:?} in {:.1?}", p.summary.b, start.elapsed());
            p.scan.map_or(true, |s| s.complete)
        }
    };
    Ok(if complete { 0 } else { 2 })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
    }
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
