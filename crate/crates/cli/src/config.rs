//! `--config FILE`: `key=value` lines standing in for long flags.
//!
//! Keys are long flag names without the leading dashes. Blank lines and lines
//! starting with `#` are ignored. A key may repeat for multi-valued flags. A
//! flag given on the command line overrides every config line for that key.

use std::collections::HashSet;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::Command;

use crate::error::{CliError, CliResult};

pub fn parse(text: &str, path: &Path) -> CliResult<Vec<(String, String)>> {
    let mut entries = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::Usage(format!("{}: line {}: expected key=value", path.display(), i + 1)));
        };
        let key = key.trim().trim_start_matches("--").to_string();
        if key.is_empty() {
            return Err(CliError::Usage(format!("{}: line {}: empty key", path.display(), i + 1)));
        }
        entries.push((key, value.trim().to_string()));
    }
    Ok(entries)
}

fn config_path(args: &[OsString]) -> Option<PathBuf> {
    let mut iter = args.iter().skip(1);
    while let Some(arg) = iter.next() {
        let s = arg.to_string_lossy();
        if s == "--config" {
            return iter.next().map(PathBuf::from);
        }
        if let Some(rest) = s.strip_prefix("--config=") {
            return Some(PathBuf::from(rest));
        }
    }
    None
}

fn given_flags(args: &[OsString]) -> HashSet<String> {
    args.iter()
        .filter_map(|a| a.to_str())
        .filter_map(|a| a.strip_prefix("--"))
        .map(|a| a.split('=').next().unwrap_or(a).to_string())
        .collect()
}

/// Appends the config file's settings to `args` as long flags, skipping keys
/// already present on the command line.
pub fn expand(command: &Command, args: Vec<OsString>) -> CliResult<Vec<OsString>> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
    let entries = parse(&text, &path)?;
    let Some(sub) = args
        .iter()
        .skip(1)
        .filter_map(|a| a.to_str())
        .find_map(|a| command.find_subcommand(a))
    else {
        return Ok(args);
    };
    let given = given_flags(&args);
    let mut out = args.clone();
    for (key, value) in entries {
        if given.contains(&key) {
            continue;
        }
        let Some(arg) = sub.get_arguments().find(|a| a.get_long() == Some(key.as_str())) else {
            return Err(CliError::Usage(format!("{}: unknown key {key:?} for {}", path.display(), sub.get_name())));
        };
        if arg.get_action().takes_values() {
            out.push(format!("--{key}").into());
            out.push(value.into());
        } else {
            match value.as_str() {
                "true" | "yes" | "1" => out.push(format!("--{key}").into()),
                "false" | "no" | "0" => {}
                other => {
                    return Err(CliError::Usage(format!("{}: {key} expects true or false, got {other:?}", path.display())))
                }
            }
        }
    }
    Ok(out)
}
