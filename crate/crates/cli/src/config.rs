//! Flat `key = value` experiment files. Keys are long flag names without the
//! leading dashes; `#` starts a comment. Entries are spliced into the argument
//! list ahead of the user's own flags, so flags given on the command line win.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::Path;

use anyhow::{bail, Context, Result};
use clap::{ArgAction, Command};

pub fn parse(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            bail!("line {}: expected `key = value`, got `{raw}`", n + 1);
        };
        let key = key.trim().trim_start_matches("--");
        if key.is_empty() {
            bail!("line {}: empty key", n + 1);
        }
        out.insert(key.to_string(), value.trim().to_string());
    }
    Ok(out)
}

pub fn load(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    parse(&text).with_context(|| format!("in config {}", path.display()))
}

/// Value of `--config` in raw arguments, if any.
pub fn config_path(args: &[OsString]) -> Option<OsString> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it.next().cloned();
        }
        if let Some(v) = s.strip_prefix("--config=") {
            return Some(v.into());
        }
    }
    None
}

/// Inserts config entries right after the subcommand name. Keys the
/// subcommand does not know are rejected; boolean flags take `true`/`false`.
pub fn splice(cmd: &Command, args: Vec<OsString>, entries: &BTreeMap<String, String>) -> Result<Vec<OsString>> {
    let Some(pos) = args
        .iter()
        .position(|a| cmd.get_subcommands().any(|s| s.get_name() == a.to_string_lossy()))
    else {
        return Ok(args);
    };
    let name = args[pos].to_string_lossy().into_owned();
    let sub = cmd.find_subcommand(&name).expect("subcommand located above");
    let mut injected = Vec::new();
    for (key, value) in entries {
        if key == "config" || key == "output-dir" {
            continue;
        }
        let flag = format!("--{key}");
        let given = args[pos + 1..].iter().any(|a| {
            let a = a.to_string_lossy();
            a == flag || a.starts_with(&format!("{flag}="))
        });
        if given {
            if sub.get_arguments().all(|a| a.get_long() != Some(key.as_str())) {
                bail!("config key `{key}` is not an option of `{name}`");
            }
            continue;
        }
        let Some(arg) = sub.get_arguments().find(|a| a.get_long() == Some(key.as_str())) else {
            bail!("config key `{key}` is not an option of `{name}`");
        };
        match arg.get_action() {
            ArgAction::SetTrue => match value.as_str() {
                "true" => injected.push(OsString::from(format!("--{key}"))),
                "false" => {}
                other => bail!("config key `{key}` expects true or false, got `{other}`"),
            },
            _ => injected.push(OsString::from(format!("--{key}={value}"))),
        }
    }
    let mut out = args;
    out.splice(pos + 1..pos + 1, injected);
    Ok(out)
}
