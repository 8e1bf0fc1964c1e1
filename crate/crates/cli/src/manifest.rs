//! Run manifests: everything needed to reproduce a run's outputs.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::args::Command;

pub const TOOL: &str = "warpmean";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub seed: u64,
    pub outputs: Vec<PathBuf>,
    pub command: Command,
}

impl RunManifest {
    pub fn new(command: Command, seed: u64, outputs: Vec<PathBuf>) -> Self {
        RunManifest {
            tool: TOOL.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            outputs,
            command,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }
}

/// `<out>.manifest.json`.
pub fn manifest_path(out: &Path) -> PathBuf {
    let mut s = OsString::from(out.as_os_str());
    s.push(".manifest.json");
    PathBuf::from(s)
}

/// `<dir>/<stem>.<suffix>` next to `out`.
pub fn sibling(out: &Path, suffix: &str) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    out.with_file_name(format!("{stem}.{suffix}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paths() {
        assert_eq!(
            manifest_path(Path::new("a/b.csv")),
            PathBuf::from("a/b.csv.manifest.json")
        );
        assert_eq!(
            sibling(Path::new("a/b.csv"), "band.csv"),
            PathBuf::from("a/b.band.csv")
        );
        assert_eq!(sibling(Path::new("b"), "svg"), PathBuf::from("b.svg"));
    }
}
