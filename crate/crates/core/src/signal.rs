//! Audio input and F0 tracks.
//!
//! The tracker is a time-domain normalized cross-correlation estimator: for
//! each frame the correlation between a window and its lagged copy is
//! normalized by both energies, so the score is 1.0 for a perfectly periodic
//! signal at its period and independent of amplitude.

use std::io::Cursor;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::fmt::trim_decimal;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SignalError {
    #[error("unsupported WAV format: {0}")]
    UnsupportedFormat(String),
    #[error("corrupt WAV header: {0}")]
    CorruptHeader(String),
    #[error("sample rate {sample_rate} Hz does not exceed twice f_max {f_max} Hz")]
    NyquistViolation { sample_rate: u32, f_max: f64 },
    #[error("signal too short: {samples} samples, need at least {required}")]
    SignalTooShort { samples: usize, required: usize },
    #[error("invalid F0 parameters: {0}")]
    InvalidParams(String),
    #[error("non-uniform frame spacing at row {row}: step {found} s, expected {expected} s")]
    NonUniformSpacing {
        row: usize,
        found: f64,
        expected: f64,
    },
    #[error("negative F0 {value} at row {row}")]
    NegativeF0 { row: usize, value: f64 },
    #[error("malformed F0 CSV row {row}: {message}")]
    MalformedRow { row: usize, message: String },
    #[error("cannot infer frame step from fewer than two rows; supply a step")]
    MissingFrameStep,
    #[error("no voiced frames")]
    NoVoicedFrames,
}

/// Mono audio normalized to [-1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSignal {
    pub sample_rate: u32,
    pub samples: Vec<f64>,
}

impl SampledSignal {
    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate as f64
    }
}

/// Reads a RIFF/WAVE file holding 16-bit mono PCM.
pub fn read_wav(content: &[u8]) -> Result<SampledSignal, SignalError> {
    let reader = hound::WavReader::new(Cursor::new(content)).map_err(|e| match e {
        hound::Error::Unsupported => SignalError::UnsupportedFormat("not integer PCM".into()),
        other => SignalError::CorruptHeader(other.to_string()),
    })?;
    let spec = reader.spec();
    if spec.channels != 1 {
        return Err(SignalError::UnsupportedFormat(format!(
            "{} channels, only mono is supported",
            spec.channels
        )));
    }
    if spec.sample_format != hound::SampleFormat::Int || spec.bits_per_sample != 16 {
        return Err(SignalError::UnsupportedFormat(format!(
            "{}-bit {:?}, only 16-bit PCM is supported",
            spec.bits_per_sample, spec.sample_format
        )));
    }
    if spec.sample_rate == 0 {
        return Err(SignalError::CorruptHeader("zero sample rate".into()));
    }
    let samples = reader
        .into_samples::<i16>()
        .map(|s| {
            s.map(|v| v as f64 / 32768.0)
                .map_err(|e| SignalError::CorruptHeader(e.to_string()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SampledSignal {
        sample_rate: spec.sample_rate,
        samples,
    })
}

/// Encodes a signal as 16-bit mono PCM. Samples are clamped to [-1, 1] and
/// scaled by 32768 (saturating at 32767).
pub fn write_wav(signal: &SampledSignal) -> Vec<u8> {
    let spec = hound::WavSpec {
        channels: 1,
        sample_rate: signal.sample_rate,
        bits_per_sample: 16,
        sample_format: hound::SampleFormat::Int,
    };
    let mut buf = Cursor::new(Vec::new());
    {
        let mut w = hound::WavWriter::new(&mut buf, spec).expect("in-memory WAV writer");
        for &s in &signal.samples {
            let v = (s.clamp(-1.0, 1.0) * 32768.0).round().clamp(-32768.0, 32767.0) as i16;
            w.write_sample(v).expect("in-memory write");
        }
        w.finalize().expect("in-memory finalize");
    }
    buf.into_inner()
}

/// True iff `sample_rate > 2 * f_signal_max`.
pub fn validate_nyquist(sample_rate: f64, f_signal_max: f64) -> bool {
    sample_rate > 2.0 * f_signal_max
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct F0Params {
    pub f_min: f64,
    pub f_max: f64,
    pub frame_step: f64,
    pub window: f64,
    pub voicing_threshold: f64,
}

impl Default for F0Params {
    fn default() -> Self {
        F0Params {
            f_min: 70.0,
            f_max: 400.0,
            frame_step: 0.01,
            window: 0.02,
            voicing_threshold: 0.3,
        }
    }
}

impl F0Params {
    pub fn validate(&self) -> Result<(), SignalError> {
        let bad = |m: &str| Err(SignalError::InvalidParams(m.to_owned()));
        if !(self.f_min > 0.0 && self.f_min < self.f_max) {
            return bad("require 0 < f_min < f_max");
        }
        if !(self.frame_step > 0.0) {
            return bad("frame_step must be positive");
        }
        if !(self.window > 0.0) {
            return bad("window must be positive");
        }
        if !(0.0..=1.0).contains(&self.voicing_threshold) {
            return bad("voicing_threshold must lie in [0, 1]");
        }
        Ok(())
    }

    /// Non-fatal configuration warnings.
    pub fn warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        if self.window < 1.0 / self.f_min {
            w.push(format!(
                "window {} s is shorter than one period of f_min ({} s)",
                self.window,
                1.0 / self.f_min
            ));
        }
        w
    }
}

/// Framewise F0 in Hz; `None` marks an unvoiced frame. Frame `i` is at
/// `start + i * frame_step` seconds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct F0Track {
    pub start: f64,
    pub frame_step: f64,
    pub frames: Vec<Option<f64>>,
    /// `(f_min, f_max)` of the analysis that produced the track, if known.
    pub range: Option<(f64, f64)>,
}

impl F0Track {
    pub fn new(start: f64, frame_step: f64, frames: Vec<Option<f64>>) -> Self {
        F0Track {
            start,
            frame_step,
            frames,
            range: None,
        }
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn time(&self, frame: usize) -> f64 {
        self.start + frame as f64 * self.frame_step
    }

    /// Time of the last frame (or `start` when empty).
    pub fn end(&self) -> f64 {
        self.time(self.frames.len().saturating_sub(1))
    }

    /// `(frame index, time, Hz)` of every voiced frame.
    pub fn voiced(&self) -> impl Iterator<Item = (usize, f64, f64)> + '_ {
        self.frames
            .iter()
            .enumerate()
            .filter_map(move |(i, f)| f.map(|hz| (i, self.time(i), hz)))
    }

    pub fn voiced_count(&self) -> usize {
        self.frames.iter().filter(|f| f.is_some()).count()
    }

    /// CSV `time_s,f0_hz`; unvoiced frames have an empty F0 field.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("time_s,f0_hz\n");
        for (i, f) in self.frames.iter().enumerate() {
            out.push_str(&trim_decimal(self.time(i), 9));
            out.push(',');
            if let Some(hz) = f {
                out.push_str(&hz.to_string());
            }
            out.push('\n');
        }
        out
    }
}

/// Reads an F0 track from CSV `time_s,f0_hz`. An empty or zero F0 marks an
/// unvoiced frame. `step_override` supplies the frame step when fewer than
/// two rows are present, and otherwise must agree with the rows.
pub fn ingest_f0_csv(content: &str, step_override: Option<f64>) -> Result<F0Track, SignalError> {
    const SPACING_TOL: f64 = 1e-6;

    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(content.as_bytes());
    let headers = rdr
        .headers()
        .map_err(|e| SignalError::MalformedRow {
            row: 1,
            message: e.to_string(),
        })?
        .clone();
    if headers.len() != 2 || &headers[0] != "time_s" || &headers[1] != "f0_hz" {
        return Err(SignalError::MalformedRow {
            row: 1,
            message: "expected header `time_s,f0_hz`".into(),
        });
    }

    let mut times = Vec::new();
    let mut frames = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 2;
        let rec = rec.map_err(|e| SignalError::MalformedRow {
            row,
            message: e.to_string(),
        })?;
        if rec.len() != 2 {
            return Err(SignalError::MalformedRow {
                row,
                message: format!("expected 2 fields, found {}", rec.len()),
            });
        }
        let t: f64 = rec[0].parse().map_err(|_| SignalError::MalformedRow {
            row,
            message: format!("invalid time \"{}\"", &rec[0]),
        })?;
        let f0 = if rec[1].is_empty() {
            None
        } else {
            let v: f64 = rec[1].parse().map_err(|_| SignalError::MalformedRow {
                row,
                message: format!("invalid F0 \"{}\"", &rec[1]),
            })?;
            if v < 0.0 {
                return Err(SignalError::NegativeF0 { row, value: v });
            }
            (v > 0.0).then_some(v)
        };
        times.push(t);
        frames.push(f0);
    }

    let step = if times.len() >= 2 {
        (times[times.len() - 1] - times[0]) / (times.len() - 1) as f64
    } else {
        step_override.ok_or(SignalError::MissingFrameStep)?
    };
    let step = step_override.unwrap_or(step);
    if !(step > 0.0) {
        return Err(SignalError::NonUniformSpacing {
            row: 3,
            found: step,
            expected: step,
        });
    }
    let start = times.first().copied().unwrap_or(0.0);
    for (i, &t) in times.iter().enumerate().skip(1) {
        let found = t - times[i - 1];
        if (found - step).abs() > SPACING_TOL || (t - (start + i as f64 * step)).abs() > SPACING_TOL
        {
            return Err(SignalError::NonUniformSpacing {
                row: i + 2,
                found,
                expected: step,
            });
        }
    }
    Ok(F0Track::new(start, step, frames))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrackStats {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub median: f64,
    pub voiced_count: usize,
    pub total_count: usize,
}

/// Statistics over voiced frames only.
pub fn track_stats(t: &F0Track) -> Result<TrackStats, SignalError> {
    let mut v: Vec<f64> = t.voiced().map(|(_, _, hz)| hz).collect();
    if v.is_empty() {
        return Err(SignalError::NoVoicedFrames);
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    let median = if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    };
    Ok(TrackStats {
        min: v[0],
        max: v[n - 1],
        mean: v.iter().sum::<f64>() / n as f64,
        median,
        voiced_count: n,
        total_count: t.len(),
    })
}

/// Candidate peaks within this fraction of the best score are preferred at
/// the shortest lag, which suppresses subharmonic (octave-down) errors.
const OCTAVE_TOLERANCE: f64 = 0.95;

/// Estimates an F0 track.
///
/// Frame `i` analyses `window` seconds starting at sample
/// `round(i * frame_step * sample_rate)` against copies lagged by
/// `[1/f_max, 1/f_min]`; its time stamp is the window centre. Frames are
/// produced while the window plus the longest lag fits in the signal.
pub fn estimate_f0(s: &SampledSignal, p: &F0Params) -> Result<F0Track, SignalError> {
    p.validate()?;
    if !validate_nyquist(s.sample_rate as f64, p.f_max) {
        return Err(SignalError::NyquistViolation {
            sample_rate: s.sample_rate,
            f_max: p.f_max,
        });
    }
    let sr = s.sample_rate as f64;
    let win = ((p.window * sr).round() as usize).max(1);
    let min_lag = ((sr / p.f_max).floor() as usize).max(1);
    let max_lag = (sr / p.f_min).ceil() as usize;
    // One extra lag on each side for the parabolic refinement.
    let span = win + max_lag + 1;
    if s.samples.len() < span {
        return Err(SignalError::SignalTooShort {
            samples: s.samples.len(),
            required: span,
        });
    }
    let hop = p.frame_step * sr;
    let n_frames = ((s.samples.len() - span) as f64 / hop).floor() as usize + 1;

    let frames: Vec<Option<f64>> = (0..n_frames)
        .into_par_iter()
        .map(|i| {
            let offset = (i as f64 * hop).round() as usize;
            let frame = &s.samples[offset..offset + span];
            analyse_frame(frame, win, min_lag, max_lag, sr, p)
        })
        .collect();

    Ok(F0Track {
        start: (win as f64 / 2.0) / sr,
        frame_step: p.frame_step,
        frames,
        range: Some((p.f_min, p.f_max)),
    })
}

fn nccf(frame: &[f64], win: usize, lag: usize, e0: f64) -> f64 {
    let a = &frame[..win];
    let b = &frame[lag..lag + win];
    let cross: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let e1: f64 = b.iter().map(|y| y * y).sum();
    let denom = (e0 * e1).sqrt();
    if denom > 0.0 {
        cross / denom
    } else {
        0.0
    }
}

fn analyse_frame(
    frame: &[f64],
    win: usize,
    min_lag: usize,
    max_lag: usize,
    sr: f64,
    p: &F0Params,
) -> Option<f64> {
    let e0: f64 = frame[..win].iter().map(|x| x * x).sum();
    if e0 == 0.0 {
        return None;
    }
    let lo = min_lag.saturating_sub(1).max(1);
    let hi = max_lag + 1;
    // r[k] holds the correlation at lag lo + k.
    let r: Vec<f64> = (lo..=hi).map(|lag| nccf(frame, win, lag, e0)).collect();
    let at = |lag: usize| r[lag - lo];

    let peaks: Vec<usize> = (min_lag.max(lo + 1)..=max_lag)
        .filter(|&lag| at(lag) >= at(lag - 1) && at(lag) >= at(lag + 1))
        .collect();
    let best = peaks.iter().map(|&l| at(l)).fold(f64::NEG_INFINITY, f64::max);
    if !(best > p.voicing_threshold) {
        return None;
    }
    let lag = *peaks.iter().find(|&&l| at(l) >= OCTAVE_TOLERANCE * best)?;

    let (ym, y0, yp) = (at(lag - 1), at(lag), at(lag + 1));
    let curvature = ym - 2.0 * y0 + yp;
    let delta = if curvature < 0.0 {
        (0.5 * (ym - yp) / curvature).clamp(-0.5, 0.5)
    } else {
        0.0
    };
    let f0 = sr / (lag as f64 + delta);
    Some(f0.clamp(p.f_min, p.f_max))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sine(freq: f64, sr: u32, secs: f64, amp: f64) -> SampledSignal {
        let n = (sr as f64 * secs) as usize;
        SampledSignal {
            sample_rate: sr,
            samples: (0..n)
                .map(|i| amp * (2.0 * std::f64::consts::PI * freq * i as f64 / sr as f64).sin())
                .collect(),
        }
    }

    #[test]
    fn nyquist_is_strict() {
        assert!(validate_nyquist(44100.0, 20000.0));
        assert!(!validate_nyquist(16000.0, 8000.0));
        assert!(validate_nyquist(16000.0, 400.0));
    }

    #[test]
    fn wav_of_zeros() {
        let sig = SampledSignal {
            sample_rate: 16000,
            samples: vec![0.0; 16000],
        };
        let back = read_wav(&write_wav(&sig)).unwrap();
        assert_eq!(back.sample_rate, 16000);
        assert_eq!(back.samples.len(), 16000);
        assert!(back.samples.iter().all(|&s| s == 0.0));
    }

    #[test]
    fn wav_square_wave_extremes() {
        let sig = SampledSignal {
            sample_rate: 8000,
            samples: (0..80).map(|i| if (i / 10) % 2 == 0 { 1.0 } else { -1.0 }).collect(),
        };
        let back = read_wav(&write_wav(&sig)).unwrap();
        for s in back.samples {
            assert!(s == -1.0 || s == 32767.0 / 32768.0, "{s}");
        }
    }

    #[test]
    fn wav_rejects_stereo_and_float() {
        let mut buf = Cursor::new(Vec::new());
        {
            let spec = hound::WavSpec {
                channels: 2,
                sample_rate: 16000,
                bits_per_sample: 16,
                sample_format: hound::SampleFormat::Int,
            };
            let mut w = hound::WavWriter::new(&mut buf, spec).unwrap();
            w.write_sample(0i16).unwrap();
            w.write_sample(0i16).unwrap();
            w.finalize().unwrap();
        }
        assert!(matches!(
            read_wav(buf.get_ref()),
            Err(SignalError::UnsupportedFormat(_))
        ));

        let mut buf = Cursor::new(Vec::new());
        {
            let spec = hound::WavSpec {
                channels: 1,
                sample_rate: 16000,
                bits_per_sample: 32,
                sample_format: hound::SampleFormat::Float,
            };
            let mut w = hound::WavWriter::new(&mut buf, spec).unwrap();
            w.write_sample(0.0f32).unwrap();
            w.finalize().unwrap();
        }
        assert!(matches!(
            read_wav(buf.get_ref()),
            Err(SignalError::UnsupportedFormat(_))
        ));
    }

    #[test]
    fn wav_garbage_is_corrupt() {
        assert!(matches!(
            read_wav(b"RIFF\x00\x00"),
            Err(SignalError::CorruptHeader(_))
        ));
    }

    #[test]
    fn sine_200_hz() {
        let t = estimate_f0(&sine(200.0, 16000, 1.0, 0.5), &F0Params::default()).unwrap();
        let good = t
            .frames
            .iter()
            .filter(|f| matches!(f, Some(hz) if (hz - 200.0).abs() <= 2.0))
            .count();
        assert!(good as f64 >= 0.95 * t.len() as f64, "{good}/{}", t.len());
    }

    #[test]
    fn silence_is_unvoiced() {
        let sig = SampledSignal {
            sample_rate: 16000,
            samples: vec![0.0; 16000],
        };
        let t = estimate_f0(&sig, &F0Params::default()).unwrap();
        assert!(!t.is_empty());
        assert_eq!(t.voiced_count(), 0);
    }

    #[test]
    fn estimation_errors() {
        let p = F0Params::default();
        let low_rate = SampledSignal {
            sample_rate: 800,
            samples: vec![0.0; 800],
        };
        assert!(matches!(
            estimate_f0(&low_rate, &p),
            Err(SignalError::NyquistViolation { .. })
        ));
        let short = SampledSignal {
            sample_rate: 16000,
            samples: vec![0.0; 100],
        };
        assert!(matches!(
            estimate_f0(&short, &p),
            Err(SignalError::SignalTooShort { .. })
        ));
        let bad = F0Params {
            f_min: 500.0,
            ..p
        };
        assert!(matches!(
            estimate_f0(&short, &bad),
            Err(SignalError::InvalidParams(_))
        ));
    }

    #[test]
    fn short_window_warns() {
        assert!(F0Params::default().warnings().is_empty());
        let p = F0Params {
            window: 0.01,
            ..F0Params::default()
        };
        assert_eq!(p.warnings().len(), 1);
    }

    #[test]
    fn csv_ingest_direct() {
        let t = ingest_f0_csv("time_s,f0_hz\n0.00,180\n0.01,0\n0.02,190\n", None).unwrap();
        assert_eq!(t.frames, vec![Some(180.0), None, Some(190.0)]);
        assert!((t.frame_step - 0.01).abs() < 1e-12);
        assert_eq!(t.start, 0.0);
        let t = ingest_f0_csv("time_s,f0_hz\n0.00,\n0.01,200\n", None).unwrap();
        assert_eq!(t.frames, vec![None, Some(200.0)]);
    }

    #[test]
    fn csv_ingest_degenerate() {
        assert_eq!(
            ingest_f0_csv("time_s,f0_hz\n", None),
            Err(SignalError::MissingFrameStep)
        );
        let t = ingest_f0_csv("time_s,f0_hz\n", Some(0.01)).unwrap();
        assert!(t.is_empty());
        assert_eq!(t.frame_step, 0.01);
    }

    #[test]
    fn csv_ingest_errors() {
        assert!(matches!(
            ingest_f0_csv("time_s,f0_hz\n0.00,1\n0.01,1\n0.025,1\n", None),
            Err(SignalError::NonUniformSpacing { .. })
        ));
        assert_eq!(
            ingest_f0_csv("time_s,f0_hz\n0.00,-3\n", Some(0.01)),
            Err(SignalError::NegativeF0 { row: 2, value: -3.0 })
        );
        assert!(matches!(
            ingest_f0_csv("time_s,f0_hz\n0.00,abc\n", Some(0.01)),
            Err(SignalError::MalformedRow { row: 2, .. })
        ));
        assert!(matches!(
            ingest_f0_csv("t,f\n", Some(0.01)),
            Err(SignalError::MalformedRow { row: 1, .. })
        ));
    }

    #[test]
    fn stats() {
        let one = F0Track::new(0.0, 0.01, vec![Some(150.0)]);
        let s = track_stats(&one).unwrap();
        assert_eq!((s.min, s.max, s.mean, s.median), (150.0, 150.0, 150.0, 150.0));

        let three = F0Track::new(0.0, 0.01, vec![Some(100.0), Some(200.0), Some(300.0)]);
        let s = track_stats(&three).unwrap();
        assert_eq!((s.min, s.max, s.mean, s.median), (100.0, 300.0, 200.0, 200.0));

        let gap = F0Track::new(0.0, 0.01, vec![Some(100.0), None, Some(300.0)]);
        let s = track_stats(&gap).unwrap();
        assert_eq!(s.mean, 200.0);
        assert_eq!((s.voiced_count, s.total_count), (2, 3));

        assert_eq!(
            track_stats(&F0Track::new(0.0, 0.01, vec![None])),
            Err(SignalError::NoVoicedFrames)
        );
    }
}
