//! Tempered-semitone conversions and musical-interval analysis of chanted
//! contours.

use serde::Serialize;
use thiserror::Error;

use crate::annotation::{Tier, TierKind};
use crate::signal::F0Track;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScalesError {
    #[error("non-positive frequency {0}")]
    NonPositiveFrequency(f64),
    #[error("no voiced frames in span {span} [{t0}, {t1}]")]
    NoVoicedFrames { span: usize, t0: f64, t1: f64 },
    #[error("no interval labelled \"{0}\"")]
    MissingSpanLabel(String),
    #[error("interval table is empty")]
    EmptyTable,
}

pub fn hz_to_semitones(f: f64, base: f64) -> Result<f64, ScalesError> {
    for v in [f, base] {
        if !(v > 0.0) {
            return Err(ScalesError::NonPositiveFrequency(v));
        }
    }
    Ok(12.0 * (f / base).log2())
}

pub fn semitones_to_ratio(st: f64) -> f64 {
    (st / 12.0).exp2()
}

pub fn ratio_to_semitones(ratio: f64) -> Result<f64, ScalesError> {
    hz_to_semitones(ratio, 1.0)
}

/// Just-intonation minor third, kept as a reference constant only.
pub const JUST_MINOR_THIRD: f64 = 1.2;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NamedInterval {
    pub name: String,
    pub semitones: f64,
}

/// Tempered intervals used for classification, in ascending size.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntervalTable {
    pub intervals: Vec<NamedInterval>,
}

impl Default for IntervalTable {
    fn default() -> Self {
        let named = [
            ("unison", 0.0),
            ("minor_third", 3.0),
            ("fourth", 5.0),
            ("fifth", 7.0),
            ("sixth", 9.0),
            ("octave", 12.0),
        ];
        IntervalTable {
            intervals: named
                .iter()
                .map(|&(name, semitones)| NamedInterval {
                    name: name.into(),
                    semitones,
                })
                .collect(),
        }
    }
}

impl IntervalTable {
    pub fn with(mut self, name: impl Into<String>, semitones: f64) -> Self {
        self.intervals.push(NamedInterval {
            name: name.into(),
            semitones,
        });
        self.intervals
            .sort_by(|a, b| a.semitones.total_cmp(&b.semitones));
        self
    }

    pub fn ratio(&self, name: &str) -> Option<f64> {
        self.intervals
            .iter()
            .find(|i| i.name == name)
            .map(|i| semitones_to_ratio(i.semitones))
    }

    /// Entry nearest to `st`; ties go to the smaller interval.
    pub fn nearest(&self, st: f64) -> Option<&NamedInterval> {
        let mut best: Option<&NamedInterval> = None;
        for iv in &self.intervals {
            let d = (st - iv.semitones).abs();
            match best {
                None => best = Some(iv),
                Some(b) => {
                    let bd = (st - b.semitones).abs();
                    if d < bd || (d == bd && iv.semitones < b.semitones) {
                        best = Some(iv);
                    }
                }
            }
        }
        best
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChromaReport {
    pub f0_1_mean: f64,
    pub f0_2_mean: f64,
    pub ratio: f64,
    pub semitone_distance: f64,
    pub nearest_interval: String,
    /// `100 * (semitone_distance - nearest semitones)`.
    pub deviation_cents: f64,
}

pub const CHROMA_SCHEMA_VERSION: u32 = 1;

impl ChromaReport {
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Doc<'a> {
            schema_version: u32,
            #[serde(flatten)]
            report: &'a ChromaReport,
        }
        serde_json::to_string_pretty(&Doc {
            schema_version: CHROMA_SCHEMA_VERSION,
            report: self,
        })
        .expect("serializable")
            + "\n"
    }
}

/// Interval analysis of two level means.
pub fn chroma_from_means(
    f0_1_mean: f64,
    f0_2_mean: f64,
    table: &IntervalTable,
) -> Result<ChromaReport, ScalesError> {
    let semitone_distance = hz_to_semitones(f0_1_mean, f0_2_mean)?;
    let nearest = table
        .nearest(semitone_distance.abs())
        .ok_or(ScalesError::EmptyTable)?;
    Ok(ChromaReport {
        f0_1_mean,
        f0_2_mean,
        ratio: f0_1_mean / f0_2_mean,
        semitone_distance,
        nearest_interval: nearest.name.clone(),
        deviation_cents: 100.0 * (semitone_distance.abs() - nearest.semitones),
    })
}

fn span_mean(track: &F0Track, span: usize, (t0, t1): (f64, f64)) -> Result<f64, ScalesError> {
    let eps = 1e-9;
    let vals: Vec<f64> = track
        .voiced()
        .filter(|&(_, t, _)| t >= t0 - eps && t <= t1 + eps)
        .map(|(_, _, hz)| hz)
        .collect();
    if vals.is_empty() {
        return Err(ScalesError::NoVoicedFrames { span, t0, t1 });
    }
    Ok(vals.iter().sum::<f64>() / vals.len() as f64)
}

/// Mean F0 over voiced frames of each span, then [`chroma_from_means`].
pub fn chroma_analyze(
    track: &F0Track,
    span1: (f64, f64),
    span2: (f64, f64),
    table: &IntervalTable,
) -> Result<ChromaReport, ScalesError> {
    let m1 = span_mean(track, 1, span1)?;
    let m2 = span_mean(track, 2, span2)?;
    chroma_from_means(m1, m2, table)
}

/// Finds the first interval of the tier whose trimmed label equals `label`.
pub fn span_from_tier(tier: &Tier, label: &str) -> Result<(f64, f64), ScalesError> {
    tier.items
        .iter()
        .filter(|_| tier.kind == TierKind::Interval)
        .find(|it| it.label.trim() == label)
        .map(|it| (it.tmin, it.tmax))
        .ok_or_else(|| ScalesError::MissingSpanLabel(label.to_owned()))
}
