use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use clap::ArgMatches;

use fourier_greeks::distributions::GENERATOR_ID;

/// Where relative output paths land.
pub fn resolve(dir: &Path, file: &Path) -> PathBuf {
    if file.is_absolute() {
        file.to_path_buf()
    } else {
        dir.join(file)
    }
}

pub fn ensure_parent(path: &Path) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
        }
    }
    Ok(())
}

/// Provenance written next to every output file as `<file>.manifest`, in the
/// same `key = value` form the `--config` option reads.
#[derive(Debug, Clone)]
pub struct RunManifest {
    pub command_line: String,
    pub config: Vec<(String, String)>,
    pub seed: Option<u64>,
    pub generator: &'static str,
    pub version: &'static str,
    pub timestamp: u64,
}

impl RunManifest {
    pub fn new(argv: &[OsString], matches: &ArgMatches, seed: Option<u64>) -> Self {
        let command_line = argv
            .iter()
            .map(|a| a.to_string_lossy().into_owned())
            .collect::<Vec<_>>()
            .join(" ");
        let mut config = Vec::new();
        if let Some((_, sub)) = matches.subcommand() {
            for id in sub.ids() {
                let key = id.as_str();
                if let Ok(Some(values)) = sub.try_get_raw(key) {
                    let joined = values.map(|v| v.to_string_lossy().into_owned()).collect::<Vec<_>>().join(",");
                    config.push((key.replace('_', "-"), joined));
                }
            }
        }
        Self {
            command_line,
            config,
            seed,
            generator: GENERATOR_ID,
            version: env!("CARGO_PKG_VERSION"),
            timestamp: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
        }
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        writeln!(s, "# command = {}", self.command_line).unwrap();
        writeln!(s, "# version = {}", self.version).unwrap();
        writeln!(s, "# generator = {}", self.generator).unwrap();
        writeln!(s, "# timestamp = {}", self.timestamp).unwrap();
        if let Some(seed) = self.seed {
            writeln!(s, "# seed = {seed}").unwrap();
        }
        for (k, v) in &self.config {
            writeln!(s, "{k} = {v}").unwrap();
        }
        s
    }

    pub fn write_beside(&self, output: &Path) -> Result<PathBuf> {
        let mut name = output.as_os_str().to_owned();
        name.push(".manifest");
        let path = PathBuf::from(name);
        fs::write(&path, self.render()).with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }
}

/// Left-aligned first column, right-aligned rest.
pub fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let cols = header.len();
    let mut width: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for r in rows {
        for (i, cell) in r.iter().enumerate().take(cols) {
            width[i] = width[i].max(cell.len());
        }
    }
    let mut out = String::new();
    let mut line = |cells: Vec<&str>| {
        let mut l = String::new();
        for (i, c) in cells.iter().enumerate() {
            if i == 0 {
                write!(l, "{c:<w$}", w = width[0]).unwrap();
            } else {
                write!(l, "  {c:>w$}", w = width[i]).unwrap();
            }
        }
        out.push_str(l.trim_end());
        out.push('\n');
    };
    line(header.to_vec());
    for r in rows {
        line(r.iter().map(String::as_str).collect());
    }
    out
}

pub fn num(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v != 0.0 && (v.abs() < 1e-3 || v.abs() >= 1e6) {
        format!("{v:.6e}")
    } else {
        format!("{v:.6}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aligned_table() {
        let t = table(&["m", "value"], &[vec!["cos".into(), "1.5".into()], vec!["fd".into(), "-12.25".into()]]);
        assert_eq!(t, "m     value\ncos     1.5\nfd   -12.25\n");
    }

    #[test]
    fn number_format() {
        assert_eq!(num(0.4536988), "0.453699");
        assert_eq!(num(1.2e-6), "1.200000e-6");
        assert_eq!(num(f64::NAN), "NaN");
        assert_eq!(num(0.0), "0.000000");
    }

    #[test]
    fn relative_paths_join_output_dir() {
        assert_eq!(resolve(Path::new("out"), Path::new("a.csv")), PathBuf::from("out/a.csv"));
        assert_eq!(resolve(Path::new("out"), Path::new("/tmp/a.csv")), PathBuf::from("/tmp/a.csv"));
    }
}
