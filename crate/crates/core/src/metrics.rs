//! Timing irregularity metrics over duration sequences (milliseconds).
//!
//! All pairwise indices use the absolute difference of neighbouring
//! durations, so none of them can distinguish alternation from other
//! sequences with the same local ratios.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::fmt::trim_decimal;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("insufficient data: n={n} < {required}")]
    InsufficientData { n: usize, required: usize },
    #[error("mean duration is zero")]
    ZeroMean,
    #[error("non-positive duration {value} at position {index}")]
    NonPositiveDuration { index: usize, value: f64 },
    #[error("sequence of {n} is shorter than window {window}")]
    SequenceShorterThanWindow { n: usize, window: usize },
    #[error("invalid window {window} / step {step}")]
    InvalidWindow { window: usize, step: usize },
    #[error("empty group \"{0}\"")]
    EmptyGroup(String),
    #[error("empty input")]
    EmptyInput,
}

/// Variance denominator for the standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SdDenominator {
    /// `N - 1`.
    #[default]
    Sample,
    /// `N`.
    Population,
}

fn require(d: &[f64], required: usize) -> Result<(), MetricsError> {
    if d.len() < required {
        Err(MetricsError::InsufficientData {
            n: d.len(),
            required,
        })
    } else {
        Ok(())
    }
}

fn mean(d: &[f64]) -> f64 {
    d.iter().sum::<f64>() / d.len() as f64
}

fn abs_diffs(d: &[f64]) -> impl Iterator<Item = f64> + '_ {
    d.windows(2).map(|w| (w[0] - w[1]).abs())
}

/// Sample standard deviation (denominator `N - 1`).
pub fn sd(durations: &[f64]) -> Result<f64, MetricsError> {
    sd_with(durations, SdDenominator::Sample)
}

pub fn sd_with(durations: &[f64], denom: SdDenominator) -> Result<f64, MetricsError> {
    require(durations, 2)?;
    let mu = mean(durations);
    let ss: f64 = durations.iter().map(|x| (x - mu) * (x - mu)).sum();
    let n = durations.len() as f64;
    let div = match denom {
        SdDenominator::Sample => n - 1.0,
        SdDenominator::Population => n,
    };
    Ok((ss / div).sqrt())
}

/// `100 * sd / mean`.
pub fn coeff_var(durations: &[f64]) -> Result<f64, MetricsError> {
    coeff_var_with(durations, SdDenominator::Sample)
}

pub fn coeff_var_with(durations: &[f64], denom: SdDenominator) -> Result<f64, MetricsError> {
    let s = sd_with(durations, denom)?;
    let mu = mean(durations);
    if mu == 0.0 {
        return Err(MetricsError::ZeroMean);
    }
    Ok(100.0 * s / mu)
}

/// Raw pairwise variability index: mean absolute neighbour difference.
pub fn rpvi(durations: &[f64]) -> Result<f64, MetricsError> {
    require(durations, 2)?;
    Ok(abs_diffs(durations).sum::<f64>() / (durations.len() - 1) as f64)
}

/// Normalized pairwise variability index, each difference divided by the
/// mean of its pair, scaled by 100.
pub fn npvi(durations: &[f64]) -> Result<f64, MetricsError> {
    require(durations, 2)?;
    if let Some((index, &value)) = durations.iter().enumerate().find(|(_, &v)| !(v > 0.0)) {
        return Err(MetricsError::NonPositiveDuration { index, value });
    }
    let sum: f64 = durations
        .windows(2)
        .map(|w| (w[0] - w[1]).abs() / ((w[0] + w[1]) / 2.0))
        .sum();
    Ok(100.0 * sum / (durations.len() - 1) as f64)
}

/// Variability index with each neighbour difference normalized by the mean
/// of the whole sequence, scaled by 100.
pub fn vi_deterding(durations: &[f64]) -> Result<f64, MetricsError> {
    require(durations, 2)?;
    let mu = mean(durations);
    if !(mu > 0.0) {
        return Err(MetricsError::ZeroMean);
    }
    Ok(100.0 * rpvi(durations)? / mu)
}

fn median_sorted(v: &[f64]) -> f64 {
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

/// Inclusive linear-interpolation quantile of sorted data (position
/// `p * (n - 1)`).
pub fn quantile_sorted(v: &[f64], p: f64) -> f64 {
    let pos = p * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    v[lo] + (v[hi] - v[lo]) * (pos - lo as f64)
}

fn sorted(d: &[f64]) -> Vec<f64> {
    let mut v = d.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    pub n: usize,
    pub mean: f64,
    pub median: f64,
    pub min: f64,
    pub max: f64,
    pub sd: f64,
    pub coeff_var: f64,
    pub rpvi: f64,
    pub npvi: f64,
    pub vi_det: f64,
}

pub const METRICS_SCHEMA_VERSION: u32 = 1;

impl MetricsReport {
    pub fn compute(durations: &[f64], denom: SdDenominator) -> Result<Self, MetricsError> {
        require(durations, 2)?;
        let s = sorted(durations);
        Ok(MetricsReport {
            n: durations.len(),
            mean: mean(durations),
            median: median_sorted(&s),
            min: s[0],
            max: s[s.len() - 1],
            sd: sd_with(durations, denom)?,
            coeff_var: coeff_var_with(durations, denom)?,
            rpvi: rpvi(durations)?,
            npvi: npvi(durations)?,
            vi_det: vi_deterding(durations)?,
        })
    }

    /// JSON with integer display values and `_exact` full-precision twins.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Doc {
            schema_version: u32,
            n: usize,
            mean: i64,
            mean_exact: f64,
            median: i64,
            median_exact: f64,
            min: i64,
            min_exact: f64,
            max: i64,
            max_exact: f64,
            sd: i64,
            sd_exact: f64,
            coeff_var: i64,
            coeff_var_exact: f64,
            rpvi: i64,
            rpvi_exact: f64,
            npvi: i64,
            npvi_exact: f64,
            vi_det: i64,
            vi_det_exact: f64,
        }
        let r = |x: f64| x.round() as i64;
        let doc = Doc {
            schema_version: METRICS_SCHEMA_VERSION,
            n: self.n,
            mean: r(self.mean),
            mean_exact: self.mean,
            median: r(self.median),
            median_exact: self.median,
            min: r(self.min),
            min_exact: self.min,
            max: r(self.max),
            max_exact: self.max,
            sd: r(self.sd),
            sd_exact: self.sd,
            coeff_var: r(self.coeff_var),
            coeff_var_exact: self.coeff_var,
            rpvi: r(self.rpvi),
            rpvi_exact: self.rpvi,
            npvi: r(self.npvi),
            npvi_exact: self.npvi,
            vi_det: r(self.vi_det),
            vi_det_exact: self.vi_det,
        };
        serde_json::to_string_pretty(&doc).expect("serializable") + "\n"
    }

    pub fn to_csv(&self) -> String {
        format!(
            "n,mean,median,min,max,sd,coeff_var,rpvi,npvi,vi_det\n{},{},{},{},{},{},{},{},{},{}\n",
            self.n,
            self.mean,
            self.median,
            self.min,
            self.max,
            self.sd,
            self.coeff_var,
            self.rpvi,
            self.npvi,
            self.vi_det
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindowSummary {
    pub mean: f64,
    /// `None` with a single window.
    pub sd: Option<f64>,
    /// `None` with a single window or a zero mean.
    pub coeff_var: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindowSeries {
    pub window: usize,
    pub step: usize,
    pub values: Vec<f64>,
    pub sorted_values: Vec<f64>,
    pub summary: WindowSummary,
}

/// nPVI of every `window`-long run, advancing by `step`.
pub fn moving_npvi(durations: &[f64], window: usize, step: usize) -> Result<WindowSeries, MetricsError> {
    if window < 2 || step == 0 {
        return Err(MetricsError::InvalidWindow { window, step });
    }
    if durations.len() < window {
        return Err(MetricsError::SequenceShorterThanWindow {
            n: durations.len(),
            window,
        });
    }
    let values = (0..=durations.len() - window)
        .step_by(step)
        .map(|i| npvi(&durations[i..i + window]))
        .collect::<Result<Vec<_>, _>>()?;
    let sorted_values = sorted(&values);
    let m = mean(&values);
    let s = sd(&values).ok();
    let cv = s.and_then(|s| (m != 0.0).then(|| 100.0 * s / m));
    Ok(WindowSeries {
        window,
        step,
        values,
        sorted_values,
        summary: WindowSummary {
            mean: m,
            sd: s,
            coeff_var: cv,
        },
    })
}

impl WindowSeries {
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Doc<'a> {
            schema_version: u32,
            #[serde(flatten)]
            series: &'a WindowSeries,
        }
        serde_json::to_string_pretty(&Doc {
            schema_version: METRICS_SCHEMA_VERSION,
            series: self,
        })
        .expect("serializable")
            + "\n"
    }

    /// CSV `index,npvi,sorted_npvi`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,npvi,sorted_npvi\n");
        for (i, (v, s)) in self.values.iter().zip(&self.sorted_values).enumerate() {
            out.push_str(&format!("{i},{v},{s}\n"));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoxSummary {
    pub n: usize,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub mean: f64,
}

impl BoxSummary {
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let s = sorted(values);
        Some(BoxSummary {
            n: s.len(),
            min: s[0],
            q1: quantile_sorted(&s, 0.25),
            median: quantile_sorted(&s, 0.5),
            q3: quantile_sorted(&s, 0.75),
            max: s[s.len() - 1],
            mean: mean(&s),
        })
    }
}

/// Box statistics per category, ordered by category name.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoxStats {
    pub categories: BTreeMap<String, BoxSummary>,
}

pub fn box_stats(groups: &BTreeMap<String, Vec<f64>>) -> Result<BoxStats, MetricsError> {
    let categories = groups
        .iter()
        .map(|(k, v)| {
            BoxSummary::of(v)
                .map(|b| (k.clone(), b))
                .ok_or_else(|| MetricsError::EmptyGroup(k.clone()))
        })
        .collect::<Result<_, _>>()?;
    Ok(BoxStats { categories })
}

impl BoxStats {
    /// CSV `category,n,min,q1,median,q3,max,mean`.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["category", "n", "min", "q1", "median", "q3", "max", "mean"])
            .expect("writing to memory");
        for (k, b) in &self.categories {
            w.write_record([
                k.clone(),
                b.n.to_string(),
                b.min.to_string(),
                b.q1.to_string(),
                b.median.to_string(),
                b.q3.to_string(),
                b.max.to_string(),
                b.mean.to_string(),
            ])
            .expect("writing to memory");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpeechRate {
    /// Units per second, from the median duration.
    pub median_rate: f64,
    pub median_duration: f64,
    pub mean_duration: f64,
    pub min: f64,
    pub max: f64,
}

pub fn speech_rate(durations: &[f64]) -> Result<SpeechRate, MetricsError> {
    if durations.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    let s = sorted(durations);
    let median = median_sorted(&s);
    Ok(SpeechRate {
        median_rate: 1000.0 / median,
        median_duration: median,
        mean_duration: mean(&s),
        min: s[0],
        max: s[s.len() - 1],
    })
}

impl SpeechRate {
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Doc<'a> {
            schema_version: u32,
            median_rate_display: String,
            #[serde(flatten)]
            rate: &'a SpeechRate,
        }
        serde_json::to_string_pretty(&Doc {
            schema_version: METRICS_SCHEMA_VERSION,
            median_rate_display: trim_decimal(self.median_rate, 2),
            rate: self,
        })
        .expect("serializable")
            + "\n"
    }
}
