//! Configuration files: flat `key = value` lines or a flat JSON object whose
//! keys are subcommand flag names (`grid-n`, `alpha_s`, `Z`, ...).

use std::path::Path;

use serde_json::Value;

#[derive(Debug)]
pub struct ConfigError(pub String);

fn parse_lines(text: &str) -> Result<Vec<(String, String)>, ConfigError> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(ConfigError(format!("line {}: expected key = value", lineno + 1)));
        };
        let value = value.trim().trim_matches('"');
        out.push((key.trim().to_string(), value.to_string()));
    }
    Ok(out)
}

fn scalar(key: &str, v: &Value) -> Result<String, ConfigError> {
    match v {
        Value::Number(n) => Ok(n.to_string()),
        Value::String(s) => Ok(s.clone()),
        Value::Bool(b) => Ok(b.to_string()),
        _ => Err(ConfigError(format!("key {key}: expected a scalar or a list of scalars"))),
    }
}

fn parse_json(text: &str) -> Result<Vec<(String, String)>, ConfigError> {
    let value: Value = serde_json::from_str(text).map_err(|e| ConfigError(format!("malformed JSON: {e}")))?;
    let Value::Object(map) = value else {
        return Err(ConfigError("JSON config must be an object".into()));
    };
    let mut out = Vec::new();
    for (key, v) in &map {
        let text = match v {
            Value::Array(items) => items
                .iter()
                .map(|x| scalar(key, x))
                .collect::<Result<Vec<_>, _>>()?
                .join(","),
            other => scalar(key, other)?,
        };
        out.push((key.clone(), text));
    }
    Ok(out)
}

/// Flag tokens equivalent to the entries of a config file.
pub fn config_tokens(path: &Path) -> Result<Vec<String>, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
    let entries = if text.trim_start().starts_with('{') {
        parse_json(&text)?
    } else {
        parse_lines(&text)?
    };
    let mut tokens = Vec::new();
    for (key, value) in entries {
        let flag = key.replace('_', "-");
        if matches!(flag.as_str(), "config" | "out" | "format" | "jobs") {
            return Err(ConfigError(format!("key {key} is a global option and must be given on the command line")));
        }
        match value.as_str() {
            "true" => tokens.push(format!("--{flag}")),
            "false" => {}
            _ => {
                tokens.push(format!("--{flag}"));
                tokens.push(value);
            }
        }
    }
    Ok(tokens)
}
