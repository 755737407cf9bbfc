use crate::error::{Error, Result};

/// Parses `key = value` lines; `#` starts a comment, blank lines are skipped.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(Error::Configuration(format!(
                "config line {}: expected 'key = value', got '{raw}'",
                n + 1
            )));
        };
        let key = k.trim().replace('_', "-");
        if key.is_empty() {
            return Err(Error::Configuration(format!("config line {}: empty key", n + 1)));
        }
        out.push((key, v.trim().to_string()));
    }
    Ok(out)
}

/// Replaces `--config PATH` in `argv` (after the subcommand) with the flags
/// from the file, placed before the command-line flags so that those win.
///
/// Boolean keys take `true`/`false`.
pub fn expand_config_args(argv: Vec<String>) -> Result<Vec<String>> {
    let Some(pos) = argv.iter().position(|a| a == "--config" || a.starts_with("--config=")) else {
        return Ok(argv);
    };
    let (path, consumed) = match argv[pos].strip_prefix("--config=") {
        Some(p) => (p.to_string(), 1),
        None => match argv.get(pos + 1) {
            Some(p) => (p.clone(), 2),
            None => return Err(Error::Configuration("--config needs a path".into())),
        },
    };
    let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let mut injected = Vec::new();
    for (k, v) in parse_config(&text)? {
        match v.as_str() {
            "true" => injected.push(format!("--{k}")),
            "false" => {}
            _ => {
                injected.push(format!("--{k}"));
                injected.push(v);
            }
        }
    }
    let mut rest: Vec<String> = argv;
    rest.drain(pos..pos + consumed);
    // Insert right after the subcommand (first non-flag argument after argv[0]).
    let at = rest
        .iter()
        .enumerate()
        .skip(1)
        .find(|(_, a)| !a.starts_with('-'))
        .map(|(i, _)| i + 1)
        .unwrap_or(rest.len());
    rest.splice(at..at, injected);
    Ok(rest)
}
