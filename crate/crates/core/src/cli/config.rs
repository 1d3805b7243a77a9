//! Plain-text `key = value` configuration.
//!
//! Lines starting with `#` and blank lines are ignored. Precedence is
//! command-line flag, then configuration file, then built-in default.

use std::collections::BTreeSet;
use std::str::FromStr;

use thiserror::Error;

use crate::metrics::SdDenominator;
use crate::render::{DEFAULT_HEIGHT, DEFAULT_WIDTH};
use crate::signal::F0Params;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("config line {line}: unknown key \"{key}\"")]
    UnknownKey { line: usize, key: String },
    #[error("config line {line}: invalid value \"{value}\" for \"{key}\"")]
    InvalidValue {
        line: usize,
        key: String,
        value: String,
    },
    #[error("config line {line}: expected key = value")]
    Syntax { line: usize },
}

/// Every key accepted in a configuration file.
pub const KEYS: &[&str] = &[
    "f_min",
    "f_max",
    "frame_step",
    "window",
    "voicing_threshold",
    "sd_denominator",
    "quartile_method",
    "tier",
    "exclude_labels",
    "plot_width",
    "plot_height",
    "global_degree",
    "local_degree",
    "npvi_window",
    "npvi_step",
    "span_labels",
    "final_faithful",
];

/// Labels treated as pauses when none are configured.
pub const DEFAULT_EXCLUDE: &[&str] = &["", "#", "<p:>", "pau", "sil", "sp"];

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub f0: F0Params,
    pub sd_denominator: SdDenominator,
    pub tier: Option<String>,
    pub exclude_labels: BTreeSet<String>,
    pub plot_width: u32,
    pub plot_height: u32,
    pub global_degree: Option<usize>,
    pub local_degree: Option<usize>,
    pub npvi_window: usize,
    pub npvi_step: usize,
    pub span_labels: (String, String),
    pub final_faithful: bool,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            f0: F0Params::default(),
            sd_denominator: SdDenominator::Sample,
            tier: None,
            exclude_labels: DEFAULT_EXCLUDE.iter().map(|s| s.to_string()).collect(),
            plot_width: DEFAULT_WIDTH,
            plot_height: DEFAULT_HEIGHT,
            global_degree: None,
            local_degree: None,
            npvi_window: 5,
            npvi_step: 1,
            span_labels: ("F01".into(), "F02".into()),
            final_faithful: true,
        }
    }
}

/// Comma-separated label list; surrounding whitespace is trimmed, so `,sil`
/// names the empty label and `sil`.
pub fn parse_label_list(s: &str) -> BTreeSet<String> {
    s.split(',').map(|l| l.trim().to_owned()).collect()
}

impl Config {
    pub fn parse(text: &str) -> Result<Config, ConfigError> {
        let mut cfg = Config::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let s = raw.trim();
            if s.is_empty() || s.starts_with('#') {
                continue;
            }
            let (key, value) = s.split_once('=').ok_or(ConfigError::Syntax { line })?;
            cfg.set(key.trim(), value.trim(), line)?;
        }
        Ok(cfg)
    }

    fn set(&mut self, key: &str, value: &str, line: usize) -> Result<(), ConfigError> {
        let invalid = || ConfigError::InvalidValue {
            line,
            key: key.to_owned(),
            value: value.to_owned(),
        };
        fn num<T: FromStr>(v: &str, err: impl Fn() -> ConfigError) -> Result<T, ConfigError> {
            v.parse().map_err(|_| err())
        }
        match key {
            "f_min" => self.f0.f_min = num(value, invalid)?,
            "f_max" => self.f0.f_max = num(value, invalid)?,
            "frame_step" => self.f0.frame_step = num(value, invalid)?,
            "window" => self.f0.window = num(value, invalid)?,
            "voicing_threshold" => self.f0.voicing_threshold = num(value, invalid)?,
            "sd_denominator" => {
                self.sd_denominator = match value {
                    "sample" => SdDenominator::Sample,
                    "population" => SdDenominator::Population,
                    _ => return Err(invalid()),
                }
            }
            "quartile_method" => {
                if value != "inclusive" {
                    return Err(invalid());
                }
            }
            "tier" => self.tier = Some(value.to_owned()),
            "exclude_labels" => self.exclude_labels = parse_label_list(value),
            "plot_width" => self.plot_width = num(value, invalid)?,
            "plot_height" => self.plot_height = num(value, invalid)?,
            "global_degree" => self.global_degree = Some(num(value, invalid)?),
            "local_degree" => self.local_degree = Some(num(value, invalid)?),
            "npvi_window" => self.npvi_window = num(value, invalid)?,
            "npvi_step" => self.npvi_step = num(value, invalid)?,
            "span_labels" => {
                let (a, b) = value.split_once(',').ok_or_else(invalid)?;
                self.span_labels = (a.trim().to_owned(), b.trim().to_owned());
            }
            "final_faithful" => self.final_faithful = num(value, invalid)?,
            _ => {
                return Err(ConfigError::UnknownKey {
                    line,
                    key: key.to_owned(),
                })
            }
        }
        Ok(())
    }
}
