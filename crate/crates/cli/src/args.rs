use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(
    name = "dmax",
    version,
    about = "Directional maximal operator laboratory"
)]
pub struct Cli {
    /// Omit the timestamp from metadata so reruns are byte-identical.
    #[arg(long, global = true)]
    pub deterministic: bool,

    /// Worker threads (default: logical cores).
    #[arg(long, global = true, env = "DMAX_WORKERS")]
    pub workers: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a direction set as JSON.
    GenDirections(GenDirections),
    /// Apply a single directional multiplier `T_v`.
    Apply(Apply),
    /// Apply a maximal operator to a grid function.
    Maximal(Maximal),
    #[command(subcommand)]
    Experiment(Experiment),
    /// Run the invariant suite and print a pass/fail table.
    Verify(Verify),
    #[command(subcommand)]
    Sectors(Sectors),
    /// Render a growth or lower-bound CSV as SVG.
    Plot(Plot),
    /// Re-run the experiment recorded in an artifact's metadata.
    Rerun(Rerun),
}

#[derive(Debug, Subcommand)]
pub enum Experiment {
    /// Norm growth of a maximal operator over nested equispaced sets.
    Growth(Growth),
    /// Ratio `‖H_N^* f‖/‖f‖` for the extremal radial function.
    LowerBound(LowerBound),
    /// Chang–Wilson–Wolff profiling over a martingale corpus.
    Cww(Cww),
}

#[derive(Debug, Subcommand)]
pub enum Sectors {
    /// Export the sectors of one annulus, optionally with their clusters.
    Dump(SectorsDump),
}

#[derive(Clone, Debug, Args, Serialize, Deserialize)]
pub struct GenDirections {
    #[arg(long, default_value = "equispaced")]
    pub kind: String,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, Args, Serialize, Deserialize)]
pub struct Apply {
    #[arg(long, default_value = "sgn")]
    pub symbol: String,
    /// Unit direction `v1,v2`.
    #[arg(long, allow_hyphen_values = true)]
    pub v: String,
    /// DMAX file, or CSV rows `i,j,re,im` (then `--side` applies).
    #[arg(long = "in")]
    #[serde(skip)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    pub side: f64,
    #[arg(long)]
    #[serde(skip)]
    pub out: PathBuf,
}

#[derive(Clone, Debug, Args, Serialize, Deserialize)]
pub struct Maximal {
    /// `kakeya0`, `kakeya`, `smooth0[:window]`, `hilbert` or `directional:<symbol>`.
    #[arg(long)]
    pub op: String,
    /// Direction set JSON; otherwise built from `--kind`, `--n`, `--seed`.
    #[arg(long)]
    #[serde(skip)]
    pub directions: Option<PathBuf>,
    #[arg(long, default_value = "equispaced")]
    pub kind: String,
    #[arg(long, default_value_t = 16)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long = "in")]
    #[serde(skip)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    pub side: f64,
    #[arg(long)]
    #[serde(skip)]
    pub out: PathBuf,
}

#[derive(Clone, Debug, Args, Serialize, Deserialize)]
pub struct Growth {
    #[arg(long, default_value = "kakeya0")]
    pub op: String,
    /// Comma list; `a,b,...,c` extends a geometric or arithmetic run.
    #[arg(long, default_value = "4,8,...,256")]
    pub n: String,
    #[arg(long, default_value_t = 10)]
    pub level: u32,
    #[arg(long, default_value_t = 4.0)]
    pub side: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 5)]
    pub greedy_rounds: usize,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, Args, Serialize, Deserialize)]
pub struct LowerBound {
    #[arg(long, default_value = "64,128,...,4096")]
    pub n: String,
    #[arg(long, default_value_t = 1.0)]
    pub r0: f64,
    #[arg(long, default_value_t = 4.0)]
    pub c0: f64,
    #[arg(long, default_value_t = 64)]
    pub radii_per_octave: usize,
    #[arg(long, default_value_t = 512)]
    pub angles: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, Args, Serialize, Deserialize)]
pub struct Cww {
    /// Corpus size; member `k` uses seed `seed + k`.
    #[arg(long, default_value_t = 200)]
    pub count: u64,
    #[arg(long, default_value_t = 8)]
    pub level: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "0.5,1,1.5,2,2.5,3,3.5,4,4.5,5,5.5,6"
    )]
    pub lambdas: Vec<f64>,
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9"
    )]
    pub epsilons: Vec<f64>,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
    /// Profile of the member with the smallest fitted `c₁`.
    #[arg(long)]
    #[serde(skip)]
    pub profile_out: Option<PathBuf>,
}

#[derive(Clone, Debug, Args, Serialize, Deserialize)]
pub struct Verify {
    #[arg(long, default_value_t = 6)]
    pub level: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Clone, Debug, Args, Serialize, Deserialize)]
pub struct SectorsDump {
    /// Annulus index: `2^n` sectors.
    #[arg(long)]
    pub n: u32,
    /// Also decompose every κ-class of this many equispaced directions into clusters.
    #[arg(long)]
    pub clusters: Option<usize>,
    #[arg(long, default_value = "equispaced")]
    pub kind: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, Args, Serialize, Deserialize)]
pub struct Plot {
    #[arg(long = "in")]
    #[serde(skip)]
    pub input: PathBuf,
    #[arg(long, value_parser = ["log", "sqrtlog"], default_value = "sqrtlog")]
    pub model: String,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, Args)]
pub struct Rerun {
    /// A CSV artifact or `.meta.json` sidecar.
    #[arg(long)]
    pub from: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Expands `4,8,...,256` (geometric when the step is a ratio of integers,
/// otherwise arithmetic) and plain comma lists.
pub fn parse_n_list(text: &str) -> Result<Vec<usize>, String> {
    let mut out: Vec<usize> = Vec::new();
    let tokens: Vec<&str> = text
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .collect();
    let mut k = 0;
    while k < tokens.len() {
        if tokens[k] == "..." {
            let end: usize = tokens
                .get(k + 1)
                .ok_or("`...` must be followed by an end value")?
                .parse()
                .map_err(|_| format!("bad end value in {text}"))?;
            let [a, b] = match out[..] {
                [.., a, b] => [a, b],
                _ => return Err("`...` needs two leading values".into()),
            };
            if b > a && a > 0 && b % a == 0 && b / a > 1 {
                let r = b / a;
                let mut x = b * r;
                while x <= end {
                    out.push(x);
                    x *= r;
                }
            } else if b > a {
                let mut x = b + (b - a);
                while x <= end {
                    out.push(x);
                    x += b - a;
                }
            } else {
                return Err("`...` needs an increasing run".into());
            }
            if out.last() != Some(&end) {
                return Err(format!("{end} is not reached by the run in {text}"));
            }
            k += 2;
        } else {
            out.push(
                tokens[k]
                    .parse()
                    .map_err(|_| format!("bad integer {}", tokens[k]))?,
            );
            k += 1;
        }
    }
    if out.is_empty() {
        return Err("empty N list".into());
    }
    Ok(out)
}

pub fn parse_vector(text: &str) -> Result<[f64; 2], String> {
    let parts: Vec<f64> = text
        .split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| format!("bad component {p}"))
        })
        .collect::<Result<_, _>>()?;
    match parts[..] {
        [a, b] => Ok([a, b]),
        _ => Err(format!("expected two components, got {text}")),
    }
}
