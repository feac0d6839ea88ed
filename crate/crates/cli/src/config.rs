//! `--config` files: one `key = value` per line, `#` starts a comment.
//! Keys are flag names without the leading dashes; `true`/`false` switch
//! boolean flags.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use crate::args::SUBCOMMANDS;
use crate::error::CliError;

fn config_path(argv: &[OsString]) -> Option<PathBuf> {
    let mut it = argv.iter().skip(1);
    while let Some(arg) = it.next() {
        let s = arg.to_string_lossy();
        if s == "--" {
            return None;
        }
        if s == "--config" {
            return it.next().map(PathBuf::from);
        }
        if let Some(path) = s.strip_prefix("--config=") {
            return Some(PathBuf::from(path));
        }
    }
    None
}

pub fn parse_config(text: &str, path: &Path) -> Result<Vec<OsString>, CliError> {
    let mut args = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::Config(format!("{}:{}: expected key=value", path.display(), lineno + 1)));
        };
        let (key, value) = (key.trim().trim_start_matches("--"), value.trim());
        if key.is_empty() || key == "config" {
            return Err(CliError::Config(format!("{}:{}: invalid key '{key}'", path.display(), lineno + 1)));
        }
        match value {
            "true" => args.push(format!("--{key}").into()),
            "false" => {}
            _ => {
                args.push(format!("--{key}").into());
                args.push(value.into());
            }
        }
    }
    Ok(args)
}

/// Splices the config file's flags in right after the subcommand name, so
/// that flags given later on the command line override them.
pub fn expand(argv: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    let Some(path) = config_path(&argv) else {
        return Ok(argv);
    };
    let text = fs::read_to_string(&path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let extra = parse_config(&text, &path)?;
    let at = argv
        .iter()
        .position(|a| SUBCOMMANDS.contains(&a.to_string_lossy().as_ref()))
        .map_or(argv.len(), |i| i + 1);
    let mut out = argv;
    out.splice(at..at, extra);
    Ok(out)
}
