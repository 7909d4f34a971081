//! `--config FILE`: a TOML table whose keys are the long flag names of one
//! subcommand, plus `command`. Flags given on the command line after the
//! file win.
//!
//! ```toml
//! command = "detsol"
//! case = "M"
//! M = -3
//! Q = "-2"
//! m0 = -10
//! k0 = 1
//! C = "-10"
//! chi = "+1"
//! ```

use std::path::Path;

use toml::Value;

use crate::CliError;

fn flag_value(key: &str, v: &Value) -> Result<Vec<String>, CliError> {
    let scalar = |v: &Value| match v {
        Value::String(s) => Ok(s.clone()),
        Value::Integer(i) => Ok(i.to_string()),
        Value::Float(f) => Ok(f.to_string()),
        Value::Boolean(b) => Ok(b.to_string()),
        _ => Err(CliError::Usage(format!("config key `{key}`: unsupported value {v}"))),
    };
    match v {
        Value::Boolean(true) => Ok(vec![format!("--{key}")]),
        Value::Boolean(false) => Ok(vec![]),
        Value::Array(items) => {
            let joined: Result<Vec<String>, _> = items.iter().map(scalar).collect();
            Ok(vec![format!("--{key}"), joined?.join(",")])
        }
        _ => Ok(vec![format!("--{key}"), scalar(v)?]),
    }
}

/// Arguments equivalent to the file: the subcommand followed by its flags.
pub fn args_from_toml(text: &str) -> Result<Vec<String>, CliError> {
    let table: toml::Table = text.parse().map_err(|e| CliError::Usage(format!("config: {e}")))?;
    let command = match table.get("command") {
        Some(Value::String(c)) => c.clone(),
        _ => return Err(CliError::Usage("config: missing string key `command`".into())),
    };
    let mut out = vec![command];
    for (k, v) in &table {
        if k != "command" {
            out.extend(flag_value(k, v)?);
        }
    }
    Ok(out)
}

pub fn args_from_file(path: &Path) -> Result<Vec<String>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?;
    args_from_toml(&text)
}

/// Replace `--config FILE` in `argv` (program name first) by the file's
/// contents, keeping the remaining flags after it.
pub fn expand(argv: Vec<String>) -> Result<Vec<String>, CliError> {
    let Some(pos) = argv.iter().position(|a| a == "--config" || a.starts_with("--config=")) else {
        return Ok(argv);
    };
    let (path, skip) = match argv[pos].strip_prefix("--config=") {
        Some(p) => (p.to_string(), 1),
        None => (argv.get(pos + 1).cloned().ok_or_else(|| CliError::Usage("--config needs a file".into()))?, 2),
    };
    let from_file = args_from_file(Path::new(&path))?;
    let mut rest: Vec<String> = argv[1..pos].iter().chain(&argv[pos + skip..]).cloned().collect();
    if rest.first() == Some(&from_file[0]) {
        rest.remove(0);
    }
    let mut out = vec![argv[0].clone()];
    out.extend(from_file);
    out.extend(rest);
    Ok(out)
}
