use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::CliError;

pub const TOOL: &str = "dmax";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Provenance block carried by every artifact: CSV files get it as `#` lines,
/// binary and JSON outputs as a `.meta.json` sidecar.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: Value,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
}

impl Metadata {
    pub fn new(command: &str, config: &impl Serialize, seed: u64, deterministic: bool) -> Self {
        let timestamp = (!deterministic).then(|| {
            SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0)
        });
        Self {
            tool: TOOL.into(),
            version: VERSION.into(),
            command: command.into(),
            config: serde_json::to_value(config).expect("configs serialize"),
            seed,
            timestamp,
        }
    }

    pub fn header_lines(&self) -> Vec<String> {
        let mut lines = vec![
            format!("# {} {}", self.tool, self.version),
            format!("# command: {}", self.command),
            format!("# config: {}", self.config),
            format!("# seed: {}", self.seed),
        ];
        if let Some(t) = self.timestamp {
            lines.push(format!("# timestamp: {t}"));
        }
        lines
    }

    pub fn write_header(&self, w: &mut impl Write) -> std::io::Result<()> {
        for line in self.header_lines() {
            writeln!(w, "{line}")?;
        }
        Ok(())
    }

    /// Parses the `#` block at the top of a CSV artifact.
    pub fn from_csv_header(r: impl BufRead) -> Result<Self, CliError> {
        let mut meta = Self {
            tool: String::new(),
            version: String::new(),
            command: String::new(),
            config: Value::Null,
            seed: 0,
            timestamp: None,
        };
        for line in r.lines() {
            let line = line?;
            let Some(body) = line.strip_prefix("# ") else {
                break;
            };
            if let Some(rest) = body.strip_prefix("command: ") {
                meta.command = rest.into();
            } else if let Some(rest) = body.strip_prefix("config: ") {
                meta.config = serde_json::from_str(rest)?;
            } else if let Some(rest) = body.strip_prefix("seed: ") {
                meta.seed = rest
                    .parse()
                    .map_err(|_| CliError::Usage(format!("bad seed {rest}")))?;
            } else if let Some(rest) = body.strip_prefix("timestamp: ") {
                meta.timestamp = rest.parse().ok();
            } else if let Some((tool, version)) = body.split_once(' ') {
                meta.tool = tool.into();
                meta.version = version.into();
            }
        }
        if meta.command.is_empty() || meta.config.is_null() {
            return Err(CliError::Usage("no metadata block found".into()));
        }
        Ok(meta)
    }
}

pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".meta.json");
    PathBuf::from(name)
}

pub fn write_sidecar(out: &Path, meta: &Metadata) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(meta)?;
    text.push('\n');
    std::fs::write(sidecar_path(out), text)?;
    Ok(())
}
