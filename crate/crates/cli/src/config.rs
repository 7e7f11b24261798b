//! `key=value` run files.
//!
//! Each non-blank line holds one pair; `#` starts a comment. Keys are flag
//! names without the leading dashes (`r1`, `max-iter` or `max_iter`), plus
//! `command` to name the subcommand. The pairs are spliced in front of the
//! command-line flags, and since every flag keeps its last occurrence,
//! explicit flags win.

use std::ffi::OsString;
use std::path::Path;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigFile {
    pub command: Option<String>,
    /// Remaining pairs in file order, keys normalized to dashes.
    pub pairs: Vec<(String, String)>,
}

pub fn parse_config(text: &str) -> CliResult<ConfigFile> {
    let mut command = None;
    let mut pairs = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::validation(format!("config line {}: expected key=value, got {raw:?}", n + 1)));
        };
        let key = key.trim().trim_start_matches('-').replace('_', "-");
        let value = value.trim().to_string();
        if key.is_empty() {
            return Err(CliError::validation(format!("config line {}: empty key", n + 1)));
        }
        if key == "config" {
            return Err(CliError::validation(format!("config line {}: nested config files are not supported", n + 1)));
        }
        if key == "command" {
            command = Some(value);
        } else {
            pairs.push((key, value));
        }
    }
    Ok(ConfigFile { command, pairs })
}

pub fn read_config(path: &Path) -> CliResult<ConfigFile> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::validation(format!("cannot read config file {}: {e}", path.display())))?;
    parse_config(&text)
}

/// Removes `--config PATH` / `--config=PATH` from `args` (program name
/// excluded) and returns the path.
fn take_config_flag(args: &mut Vec<OsString>) -> CliResult<Option<OsString>> {
    let mut found = None;
    let mut i = 0;
    while i < args.len() {
        let arg = args[i].to_string_lossy();
        if arg == "--config" {
            if i + 1 >= args.len() {
                return Err(CliError::validation("--config needs a file path"));
            }
            found = Some(args.remove(i + 1));
            args.remove(i);
        } else if let Some(rest) = arg.strip_prefix("--config=") {
            found = Some(OsString::from(rest));
            args.remove(i);
        } else {
            i += 1;
        }
    }
    Ok(found)
}

/// Expands a config file reference into ordinary arguments.
///
/// `args` excludes the program name. The result starts with the subcommand,
/// then the file's flags, then the user's own flags.
pub fn expand_args(mut args: Vec<OsString>) -> CliResult<Vec<OsString>> {
    let Some(path) = take_config_flag(&mut args)? else {
        return Ok(args);
    };
    let cfg = read_config(Path::new(&path))?;
    let user_has_command = args.first().is_some_and(|a| !a.to_string_lossy().starts_with('-'));
    let mut out = Vec::with_capacity(args.len() + 2 * cfg.pairs.len() + 1);
    let mut rest = args.into_iter();
    if user_has_command {
        out.extend(rest.next());
    } else if let Some(cmd) = &cfg.command {
        out.push(OsString::from(cmd));
    } else {
        return Err(CliError::validation("no command given on the command line or in the config file"));
    }
    for (key, value) in cfg.pairs {
        out.push(OsString::from(format!("--{key}={value}")));
    }
    out.extend(rest);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_pairs_and_comments() {
        let cfg = parse_config("# run\ncommand = orbit\nr1=2   # growth\n\nmax_iter = 10\n").unwrap();
        assert_eq!(cfg.command.as_deref(), Some("orbit"));
        assert_eq!(cfg.pairs, vec![("r1".into(), "2".into()), ("max-iter".into(), "10".into())]);
    }

    #[test]
    fn rejects_malformed_lines() {
        assert!(parse_config("r1 2\n").is_err());
        assert!(parse_config("=2\n").is_err());
        assert!(parse_config("config=x\n").is_err());
    }

    #[test]
    fn without_config_args_are_untouched() {
        let args: Vec<OsString> = ["orbit", "--r1", "2"].iter().map(OsString::from).collect();
        assert_eq!(expand_args(args.clone()).unwrap(), args);
    }
}
