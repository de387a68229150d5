//! Agent config files: one `key value...` pair per line, `#` comments.
//!
//! ```text
//! angle_count 106
//! window 1
//! gravity 0 -50
//! position_correction 0.8
//! ```

use std::str::FromStr;

use thiserror::Error;

use super::AgentConfig;
use crate::geometry::Vec2;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid config: {0}")]
    Invalid(String),
}

fn value<T: FromStr>(key: &str, args: &[&str]) -> Result<T, String> {
    match args {
        [v] => v.parse().map_err(|_| format!("`{key}`: cannot parse `{v}`")),
        _ => Err(format!("`{key}` takes 1 value, got {}", args.len())),
    }
}

/// Applies the settings in `text` on top of `AgentConfig::default()`.
pub fn parse_config(text: &str) -> Result<AgentConfig, ConfigError> {
    let mut cfg = AgentConfig::default();
    for (idx, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let toks: Vec<&str> = content.split_whitespace().collect();
        let (key, args) = (toks[0], &toks[1..]);
        apply(&mut cfg, key, args).map_err(|msg| ConfigError::Parse { line: idx + 1, msg })?;
    }
    cfg.planner.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
    if cfg.width == 0 || cfg.height == 0 {
        return Err(ConfigError::Invalid("viewport must be non-empty".into()));
    }
    Ok(cfg)
}

fn apply(cfg: &mut AgentConfig, key: &str, args: &[&str]) -> Result<(), String> {
    let p = &mut cfg.planner;
    let phys = &mut cfg.template.physics;
    match key {
        "angle_count" => p.angle_count = value(key, args)?,
        "angle_step" => p.angle_step = value(key, args)?,
        "angle_min" => p.angle_min = value(key, args)?,
        "tap_count" => p.tap_count = value(key, args)?,
        "horizon" => p.horizon = value(key, args)?,
        "dt" => {
            p.dt = value(key, args)?;
            phys.dt = p.dt;
        }
        "window" => p.window = value(key, args)?,
        "speed_factor" => p.speed_factor = value(key, args)?,
        "robust_over_taps" => p.robust_over_taps = value(key, args)?,
        "workers" => p.workers = value(key, args)?,
        "min_pixels" => cfg.perception.min_pixels = value(key, args)?,
        "equalize_tol" => cfg.perception.equalize_tol = value(key, args)?,
        "gravity" => match args {
            [x, y] => {
                let parse = |s: &str| s.parse::<f64>().map_err(|_| format!("`gravity`: cannot parse `{s}`"));
                cfg.template.gravity = Vec2::new(parse(x)?, parse(y)?);
            }
            _ => return Err(format!("`gravity` takes 2 values, got {}", args.len())),
        },
        "speed" => cfg.template.launch_speed = value(key, args)?,
        "solver_passes" => phys.solver_passes = value(key, args)?,
        "position_correction" => phys.position_correction = value(key, args)?,
        "restitution_threshold" => phys.restitution_threshold = value(key, args)?,
        "v_sleep" => phys.v_sleep = value(key, args)?,
        "w_sleep" => phys.w_sleep = value(key, args)?,
        "sleep_frames" => phys.sleep_frames = value(key, args)?,
        "rolling_resistance" => phys.rolling_resistance = value(key, args)?,
        "width" => cfg.width = value(key, args)?,
        "height" => cfg.height = value(key, args)?,
        "max_shots" => cfg.max_shots = value(key, args)?,
        other => return Err(format!("unknown key `{other}`")),
    }
    Ok(())
}
