//! Run configuration: CLI flags merged over an optional TOML file, with
//! flags taking precedence.

use std::path::PathBuf;

use clap::Args;
use serde::Deserialize;

#[derive(Args, Debug, Default)]
pub struct CliArgs {
    /// Catalog metric id; see `statvac catalog`.
    #[arg(long)]
    pub metric: Option<String>,
    /// Spatial dimension n.
    #[arg(long)]
    pub n: Option<usize>,
    /// Mass parameter for schwarzschild-ads.
    #[arg(long = "M")]
    pub mass: Option<f64>,
    /// Tip radius for ads-soliton.
    #[arg(long)]
    pub r0: Option<f64>,
    /// Identity selection: `all` or a comma-free single suite name.
    #[arg(long)]
    pub suite: Option<String>,
    /// Run one identity by name (overrides --suite).
    #[arg(long)]
    pub identity: Option<String>,
    /// Sample points per identity.
    #[arg(long)]
    pub points: Option<usize>,
    /// Quadrature refinement level.
    #[arg(long)]
    pub level: Option<usize>,
    /// Start offset of the quasirandom sample stream.
    #[arg(long)]
    pub seed: Option<usize>,
    /// Tolerance override applied to every selected pointwise identity.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Report file path.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Report format: json or csv.
    #[arg(long)]
    pub format: Option<String>,
    /// TOML config file; explicit flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// TOML mirror of the flag set.
#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    metric: Option<String>,
    n: Option<usize>,
    #[serde(rename = "M")]
    mass: Option<f64>,
    r0: Option<f64>,
    suite: Option<String>,
    identity: Option<String>,
    points: Option<usize>,
    level: Option<usize>,
    seed: Option<usize>,
    tol: Option<f64>,
    output: Option<PathBuf>,
    format: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug)]
pub struct RunConfig {
    pub metric: String,
    pub n: usize,
    pub mass: f64,
    pub r0: f64,
    pub suite: String,
    pub identity: Option<String>,
    pub points: usize,
    pub level: usize,
    pub seed: usize,
    pub tol: Option<f64>,
    pub output: PathBuf,
    pub format: Format,
}

impl RunConfig {
    pub fn resolve(args: CliArgs) -> Result<RunConfig, String> {
        let file = match &args.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
                toml::from_str::<FileConfig>(&text)
                    .map_err(|e| format!("malformed config {}: {e}", path.display()))?
            }
            None => FileConfig::default(),
        };

        let metric = args
            .metric
            .or(file.metric)
            .ok_or("missing required option: --metric")?;
        let n = args.n.or(file.n).ok_or("missing required option: --n")?;
        let format = match args.format.or(file.format).as_deref() {
            None | Some("json") => Format::Json,
            Some("csv") => Format::Csv,
            Some(other) => return Err(format!("unknown format {other:?} (expected json or csv)")),
        };
        let points = args.points.or(file.points).unwrap_or(50);
        if points == 0 {
            return Err("sample count must be at least 1".into());
        }
        let tol = args.tol.or(file.tol);
        if let Some(t) = tol {
            if !(t > 0.0) {
                return Err(format!("tolerance must be positive, got {t}"));
            }
        }
        let output = args.output.or(file.output).unwrap_or_else(|| {
            PathBuf::from(match format {
                Format::Json => "report.json",
                Format::Csv => "report.csv",
            })
        });
        Ok(RunConfig {
            metric,
            n,
            mass: args.mass.or(file.mass).unwrap_or(1.0),
            r0: args.r0.or(file.r0).unwrap_or(1.0),
            suite: args.suite.or(file.suite).unwrap_or_else(|| "all".into()),
            identity: args.identity.or(file.identity),
            points,
            level: args.level.or(file.level).unwrap_or(2),
            seed: args.seed.or(file.seed).unwrap_or(1),
            tol,
            output,
            format,
        })
    }
}
