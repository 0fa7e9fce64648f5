//! `key = value` config files mirroring the command-line flags.
//!
//! Keys are long flag names without the leading dashes. Repeating a key
//! gives a repeatable flag several values. Flags given on the command line
//! always win over the file.

use std::ffi::OsString;

use clap::Command;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConfigError {
    #[error("config line {line}: expected key = value")]
    Syntax { line: usize },
    #[error("config line {line}: unknown key {key:?}")]
    UnknownKey { line: usize, key: String },
    #[error("config line {line}: {key} expects true or false, got {value:?}")]
    NotBool { line: usize, key: String, value: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Entry {
    pub line: usize,
    pub key: String,
    pub value: String,
}

/// Parses `key = value` lines; `#` starts a comment line.
pub fn parse_config(text: &str) -> Result<Vec<Entry>, ConfigError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let l = raw.trim();
        if l.is_empty() || l.starts_with('#') {
            continue;
        }
        let (k, v) = l.split_once('=').ok_or(ConfigError::Syntax { line: i + 1 })?;
        let key = k.trim().trim_start_matches("--");
        if key.is_empty() {
            return Err(ConfigError::Syntax { line: i + 1 });
        }
        out.push(Entry {
            line: i + 1,
            key: key.into(),
            value: v.trim().trim_matches('"').into(),
        });
    }
    Ok(out)
}

/// Finds the value of `--config` in raw arguments.
pub fn config_path(argv: &[OsString]) -> Option<OsString> {
    let mut it = argv.iter().skip(1);
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Some(p.into());
        }
    }
    None
}

fn given_on_command_line(args: &[OsString], long: &str) -> bool {
    let flag = format!("--{long}");
    let with_value = format!("--{long}=");
    args.iter().any(|a| {
        let s = a.to_string_lossy();
        s == flag || s.starts_with(&with_value)
    })
}

/// Inserts config entries for the chosen subcommand right after its name,
/// skipping keys the command line already sets. Keys belonging only to
/// other subcommands are ignored.
pub fn merge_args(cmd: &Command, argv: Vec<OsString>, entries: &[Entry]) -> Result<Vec<OsString>, ConfigError> {
    let names: Vec<&str> = cmd.get_subcommands().map(Command::get_name).collect();
    let Some(pos) = argv
        .iter()
        .skip(1)
        .position(|a| names.contains(&a.to_string_lossy().as_ref()))
        .map(|p| p + 1)
    else {
        return Ok(argv);
    };
    let sub = cmd
        .find_subcommand(argv[pos].to_string_lossy().as_ref())
        .expect("matched by name");
    let known = |key: &str| {
        cmd.get_subcommands()
            .chain(std::iter::once(cmd))
            .flat_map(Command::get_arguments)
            .any(|a| a.get_long() == Some(key))
    };
    let mut extra: Vec<OsString> = Vec::new();
    for e in entries {
        if e.key == "config" || !known(&e.key) {
            return Err(ConfigError::UnknownKey {
                line: e.line,
                key: e.key.clone(),
            });
        }
        let Some(arg) = sub.get_arguments().find(|a| a.get_long() == Some(e.key.as_str())) else {
            continue;
        };
        if given_on_command_line(&argv, &e.key) {
            continue;
        }
        if arg.get_action().takes_values() {
            extra.push(format!("--{}", e.key).into());
            extra.push(e.value.clone().into());
        } else {
            match e.value.to_ascii_lowercase().as_str() {
                "true" | "yes" | "1" => extra.push(format!("--{}", e.key).into()),
                "false" | "no" | "0" => {}
                _ => {
                    return Err(ConfigError::NotBool {
                        line: e.line,
                        key: e.key.clone(),
                        value: e.value.clone(),
                    })
                }
            }
        }
    }
    let mut out = argv;
    out.splice(pos + 1..pos + 1, extra);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::{Arg, ArgAction};

    fn cmd() -> Command {
        Command::new("t")
            .subcommand(
                Command::new("run")
                    .arg(Arg::new("width").long("width"))
                    .arg(Arg::new("fast").long("fast").action(ArgAction::SetTrue)),
            )
            .subcommand(Command::new("other").arg(Arg::new("depth").long("depth")))
    }

    fn os(v: &[&str]) -> Vec<OsString> {
        v.iter().map(OsString::from).collect()
    }

    #[test]
    fn flags_win() {
        let entries = parse_config("# c\nwidth = 3\nfast = true\ndepth = 9\n").unwrap();
        let merged = merge_args(&cmd(), os(&["t", "run", "--width", "5"]), &entries).unwrap();
        assert_eq!(merged, os(&["t", "run", "--fast", "--width", "5"]));
        let merged = merge_args(&cmd(), os(&["t", "run"]), &entries).unwrap();
        assert_eq!(merged, os(&["t", "run", "--width", "3", "--fast"]));
    }

    #[test]
    fn errors() {
        assert_eq!(parse_config("nonsense"), Err(ConfigError::Syntax { line: 1 }));
        let e = parse_config("colour = red").unwrap();
        assert!(matches!(
            merge_args(&cmd(), os(&["t", "run"]), &e),
            Err(ConfigError::UnknownKey { line: 1, .. })
        ));
        let e = parse_config("fast = maybe").unwrap();
        assert!(merge_args(&cmd(), os(&["t", "run"]), &e).is_err());
    }

    #[test]
    fn finds_config_path() {
        assert_eq!(config_path(&os(&["t", "run", "--config", "a.conf"])), Some("a.conf".into()));
        assert_eq!(config_path(&os(&["t", "--config=b.conf", "run"])), Some("b.conf".into()));
        assert_eq!(config_path(&os(&["t", "run"])), None);
    }
}
