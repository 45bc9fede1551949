//! Engine construction with precedence: `--set` flags, then the config file, then defaults.

use anyhow::{anyhow, bail, Context, Result};
use humanscore::motion::{default_limits, default_skeleton, LimitTable, SkeletonDefinition};
use humanscore::{Config, Scorer};
use serde_json::Value;

use crate::args::EngineArgs;

pub fn skeleton(path: Option<&std::path::Path>) -> Result<SkeletonDefinition<f64>> {
    match path {
        Some(p) => SkeletonDefinition::load(p).with_context(|| format!("loading skeleton {}", p.display())),
        None => Ok(default_skeleton()),
    }
}

pub fn limits(path: Option<&std::path::Path>) -> Result<LimitTable<f64>> {
    match path {
        Some(p) => LimitTable::load(p).with_context(|| format!("loading limits {}", p.display())),
        None => Ok(default_limits()),
    }
}

pub fn scoring_config(args: &EngineArgs) -> Result<Config> {
    let mut cfg = match &args.config {
        Some(p) => Config::load(p).with_context(|| format!("loading config {}", p.display()))?,
        None => Config::default(),
    };
    if !args.overrides.is_empty() {
        let mut tree = serde_json::to_value(cfg)?;
        for o in &args.overrides {
            apply_override(&mut tree, o)?;
        }
        cfg = serde_json::from_value(tree).map_err(|e| invalid(format!("config override: {e}")))?;
        cfg.validate()?;
    }
    Ok(cfg)
}

pub fn engine(args: &EngineArgs) -> Result<Scorer> {
    let skeleton = skeleton(args.skeleton.as_deref())?;
    let limits = limits(args.limits.as_deref())?;
    Ok(Scorer::new(skeleton, limits, scoring_config(args)?)?)
}

fn invalid(msg: String) -> anyhow::Error {
    anyhow!(humanscore::Error::Config(msg))
}

/// Sets the dotted `key` of `tree` to `value`, parsed as JSON when possible and as a string
/// otherwise. The key must already exist so typos are caught.
fn apply_override(tree: &mut Value, spec: &str) -> Result<()> {
    let Some((key, raw)) = spec.split_once('=') else {
        bail!(invalid(format!("override '{spec}' is not KEY=VALUE")));
    };
    let mut node = &mut *tree;
    for part in key.trim().split('.') {
        node = node
            .get_mut(part)
            .ok_or_else(|| invalid(format!("unknown config key '{key}'")))?;
    }
    *node = serde_json::from_str(raw.trim()).unwrap_or_else(|_| Value::String(raw.trim().to_owned()));
    Ok(())
}
