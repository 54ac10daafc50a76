//! Flat `key = value` configuration files.
//!
//! Each entry becomes the flag `--key value` (underscores map to hyphens);
//! `true` and `false` toggle switches. Entries are inserted before the
//! command-line flags, which therefore take precedence.

use std::ffi::OsString;
use std::path::Path;

use crate::LabError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigEntry {
    pub key: String,
    pub value: String,
    pub line: usize,
}

pub fn parse_config(text: &str, path: &Path) -> Result<Vec<ConfigEntry>, LabError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| LabError::Parse { path: path.to_path_buf(), line: i + 1, msg };
        let (k, v) = line.split_once('=').ok_or_else(|| err(format!("expected `key = value`, found `{line}`")))?;
        let key = k.trim().replace('_', "-");
        if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '-') {
            return Err(err(format!("invalid key `{}`", k.trim())));
        }
        out.push(ConfigEntry { key, value: v.trim().to_string(), line: i + 1 });
    }
    Ok(out)
}

pub fn entries_to_args(entries: &[ConfigEntry]) -> Vec<OsString> {
    let mut args = Vec::new();
    for e in entries {
        match e.value.as_str() {
            "true" => args.push(format!("--{}", e.key).into()),
            "false" => {}
            v => {
                args.push(format!("--{}", e.key).into());
                args.push(v.into());
            }
        }
    }
    args
}

/// Expands `--config FILE` (anywhere before the command name or right after
/// it) into the command's flags.
pub fn expand_config(args: Vec<OsString>) -> Result<Vec<OsString>, LabError> {
    let mut rest = Vec::with_capacity(args.len());
    let mut config = None;
    let mut it = args.into_iter();
    if let Some(bin) = it.next() {
        rest.push(bin);
    }
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            let p = it.next().ok_or_else(|| LabError::Usage("--config needs a file".into()))?;
            config = Some(p);
        } else if let Some(p) = s.strip_prefix("--config=") {
            config = Some(p.into());
        } else if s == "--" {
            rest.push(a);
            rest.extend(it.by_ref());
        } else {
            rest.push(a);
        }
    }
    let Some(path) = config else { return Ok(rest) };
    let path = Path::new(&path);
    let text = std::fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
    let extra = entries_to_args(&parse_config(&text, path)?);
    // the command is the first non-flag argument after the binary name
    let cmd = rest.iter().skip(1).position(|a| !a.to_string_lossy().starts_with('-')).map(|i| i + 2);
    match cmd {
        Some(at) => {
            let tail = rest.split_off(at);
            rest.extend(extra);
            rest.extend(tail);
            Ok(rest)
        }
        None => Err(LabError::Usage("--config given without a command".into())),
    }
}
