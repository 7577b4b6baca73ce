//! `key = value` configuration files.
//!
//! ```text
//! # default geometry
//! box_length = 6.283185307179586
//! mass_neutral = 1
//! mass_charged = 1
//! lambda1 = 1
//! lambda2 = 1
//! neutral_modes = 2
//! charged_modes = 1
//! q_index = 1
//! k_index = 2
//! cutoff_default = 32
//! cutoff_overrides = a2=40, b1=24
//! ```
//!
//! Every key except `cutoff_overrides` is required. Unknown and repeated keys
//! are errors. `#` starts a comment.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use fockshift_core::{LadderId, ModelConfig};

use crate::{ProbeError, Result};

const REQUIRED: [&str; 10] = [
    "box_length",
    "mass_neutral",
    "mass_charged",
    "lambda1",
    "lambda2",
    "neutral_modes",
    "charged_modes",
    "q_index",
    "k_index",
    "cutoff_default",
];
const OPTIONAL: [&str; 1] = ["cutoff_overrides"];

fn bad(line: usize, msg: impl std::fmt::Display) -> ProbeError {
    ProbeError::Usage(format!("config line {line}: {msg}"))
}

fn scalar<T: FromStr>(line: usize, key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| bad(line, format!("cannot parse {key} = '{value}'")))
}

fn list<T: FromStr>(line: usize, key: &str, value: &str) -> Result<Vec<T>> {
    value.split(',').map(|v| scalar(line, key, v.trim())).collect()
}

fn overrides(line: usize, value: &str) -> Result<BTreeMap<LadderId, usize>> {
    let mut out = BTreeMap::new();
    for pair in value.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (id, n) = pair
            .split_once('=')
            .ok_or_else(|| bad(line, format!("cutoff override '{pair}' is not ladder=value")))?;
        let id: LadderId = id.parse().map_err(|e| bad(line, e))?;
        let n = scalar(line, "cutoff_overrides", n.trim())?;
        if out.insert(id, n).is_some() {
            return Err(bad(line, format!("ladder {id} overridden twice")));
        }
    }
    Ok(out)
}

/// Parses and validates a configuration.
pub fn parse_config(text: &str) -> Result<ModelConfig> {
    let mut seen: BTreeMap<&str, (usize, &str)> = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| bad(line, format!("expected key = value, got '{content}'")))?;
        let (key, value) = (key.trim(), value.trim());
        if !REQUIRED.contains(&key) && !OPTIONAL.contains(&key) {
            return Err(bad(line, format!("unknown key '{key}'")));
        }
        if let Some((first, _)) = seen.insert(key, (line, value)) {
            return Err(bad(line, format!("key '{key}' already set on line {first}")));
        }
    }
    if let Some(missing) = REQUIRED.iter().find(|k| !seen.contains_key(*k)) {
        return Err(ProbeError::Usage(format!("config is missing required key '{missing}'")));
    }
    let get = |k: &str| seen[k];
    let f = |k: &str| -> Result<f64> {
        let (line, v) = get(k);
        scalar(line, k, v)
    };
    let i = |k: &str| -> Result<i32> {
        let (line, v) = get(k);
        scalar(line, k, v)
    };
    let modes = |k: &str| -> Result<Vec<i32>> {
        let (line, v) = get(k);
        list(line, k, v)
    };
    let (cut_line, cut) = get("cutoff_default");
    let config = ModelConfig {
        box_length: f("box_length")?,
        mass_neutral: f("mass_neutral")?,
        mass_charged: f("mass_charged")?,
        lambda1: f("lambda1")?,
        lambda2: f("lambda2")?,
        neutral_modes: modes("neutral_modes")?,
        charged_modes: modes("charged_modes")?,
        q_index: i("q_index")?,
        k_index: i("k_index")?,
        cutoff_default: scalar(cut_line, "cutoff_default", cut)?,
        cutoff_overrides: match seen.get("cutoff_overrides") {
            Some(&(line, v)) => overrides(line, v)?,
            None => BTreeMap::new(),
        },
    };
    config.validate()?;
    Ok(config)
}

pub fn load_config(path: &Path) -> Result<ModelConfig> {
    let text = fs::read_to_string(path).map_err(|e| ProbeError::io(path, e))?;
    parse_config(&text)
}

/// Serializes a configuration in the format [`parse_config`] reads.
pub fn render_config(config: &ModelConfig) -> String {
    let join = |v: &[i32]| v.iter().map(i32::to_string).collect::<Vec<_>>().join(", ");
    let mut out = format!(
        "box_length = {}\nmass_neutral = {}\nmass_charged = {}\nlambda1 = {}\nlambda2 = {}\n\
         neutral_modes = {}\ncharged_modes = {}\nq_index = {}\nk_index = {}\ncutoff_default = {}\n",
        config.box_length,
        config.mass_neutral,
        config.mass_charged,
        config.lambda1,
        config.lambda2,
        join(&config.neutral_modes),
        join(&config.charged_modes),
        config.q_index,
        config.k_index,
        config.cutoff_default,
    );
    if !config.cutoff_overrides.is_empty() {
        let pairs: Vec<String> = config
            .cutoff_overrides
            .iter()
            .map(|(id, n)| format!("{}{}={n}", id.family.letter(), id.mode_index))
            .collect();
        out.push_str(&format!("cutoff_overrides = {}\n", pairs.join(", ")));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_round_trip() {
        let c = ModelConfig::default();
        assert_eq!(parse_config(&render_config(&c)).unwrap(), c);
    }

    #[test]
    fn overrides_and_comments() {
        let mut text = render_config(&ModelConfig::default());
        text.push_str("# tighter charged ladders\ncutoff_overrides = b1=20, d[1]=20 # inline\n");
        let c = parse_config(&text).unwrap();
        assert_eq!(c.cutoff(LadderId::b(1)), 20);
        assert_eq!(c.cutoff(LadderId::d(1)), 20);
        assert_eq!(c.cutoff(LadderId::a(2)), 32);
    }

    #[test]
    fn rejects_unknown_missing_and_repeated_keys() {
        let base = render_config(&ModelConfig::default());
        let unknown = format!("{base}temperature = 3\n");
        assert!(matches!(parse_config(&unknown), Err(ProbeError::Usage(m)) if m.contains("unknown key")));
        let missing = base.replace("lambda2 = 1\n", "");
        assert!(matches!(parse_config(&missing), Err(ProbeError::Usage(m)) if m.contains("lambda2")));
        let repeated = format!("{base}lambda1 = 2\n");
        assert!(matches!(parse_config(&repeated), Err(ProbeError::Usage(m)) if m.contains("already set")));
    }

    #[test]
    fn validation_errors_surface() {
        let base = render_config(&ModelConfig::default());
        let zero = base.replace("box_length = 6.283185307179586", "box_length = 0");
        let err = parse_config(&zero).unwrap_err();
        assert_eq!(err.exit_code(), crate::EXIT_USAGE);
        let bad_override = format!("{base}cutoff_overrides = a7=3\n");
        assert_eq!(parse_config(&bad_override).unwrap_err().exit_code(), crate::EXIT_USAGE);
        let garbage = base.replace("q_index = 1", "q_index = one");
        assert!(parse_config(&garbage).is_err());
    }
}
