//! Plain-text `key = value` config files, merged in front of the command-line
//! flags so that explicit flags take precedence.

use std::fs;

use padestep::{Error, Result};

/// Parses `key = value` lines into `--key value` arguments. Blank lines and
/// lines starting with `#` are skipped; `key = true` becomes a bare flag.
pub fn parse_config(text: &str) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("config line {}: expected key = value", no + 1)))?;
        let key = k.trim().replace('_', "-");
        if key.is_empty() || key == "config" {
            return Err(Error::Parse(format!("config line {}: bad key '{}'", no + 1, k.trim())));
        }
        let value = v.trim();
        out.push(format!("--{key}"));
        if value != "true" {
            out.push(value.to_string());
        }
    }
    Ok(out)
}

/// Removes `--config FILE` (or `--config=FILE`) from `args` and splices the
/// file's options in right after the subcommand name.
pub fn expand_config(args: Vec<String>) -> Result<Vec<String>> {
    let mut rest = Vec::with_capacity(args.len());
    let mut path = None;
    let mut it = args.into_iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            path = Some(it.next().ok_or_else(|| Error::Parse("--config needs a file".into()))?);
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        } else {
            rest.push(a);
        }
    }
    let Some(path) = path else {
        return Ok(rest);
    };
    let text = fs::read_to_string(&path).map_err(|e| Error::Parse(format!("cannot read config {path}: {e}")))?;
    let extra = parse_config(&text)?;
    // Subcommand is the first non-flag argument after the program name.
    let at = rest.iter().skip(1).position(|a| !a.starts_with('-')).map_or(rest.len(), |p| p + 2);
    let at = at.min(rest.len());
    rest.splice(at..at, extra);
    Ok(rest)
}
