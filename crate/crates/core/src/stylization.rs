//! Least-squares stylisation of F0 tracks.
//!
//! Polynomials are fitted in normalized time `x = (t - t0) / (t1 - t0)` over
//! the fit domain `[t0, t1]`, which keeps degree-6 Vandermonde systems well
//! conditioned. The solver is Householder QR on the design matrix. Multiple
//! Polynomial Stylisation fits one global model over the whole track and one
//! local model per annotated sub-domain; the residual is taken against the
//! global model.

use serde::Serialize;
use thiserror::Error;

use crate::annotation::{Tier, TierKind};
use crate::signal::F0Track;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StylizationError {
    #[error("insufficient points: {found} distinct abscissae, need {required}")]
    InsufficientPoints { found: usize, required: usize },
    #[error("degenerate abscissa: all t equal")]
    DegenerateAbscissa,
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("no voiced frames")]
    NoVoicedFrames,
    #[error("median filter width {0} is not odd and positive")]
    EvenWidth(usize),
}

/// `f0 = a + m * x`. The slope unit is Hz per unit of the abscissa supplied.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearModel {
    pub a: f64,
    pub m: f64,
    pub sd_residual: f64,
}

impl LinearModel {
    pub fn eval(&self, x: f64) -> f64 {
        self.a + self.m * x
    }
}

pub fn linear_fit(points: &[(f64, f64)]) -> Result<LinearModel, StylizationError> {
    let n = points.len();
    if n < 2 {
        return Err(StylizationError::InsufficientPoints {
            found: distinct_count(points),
            required: 2,
        });
    }
    let nf = n as f64;
    let mean_t = points.iter().map(|p| p.0).sum::<f64>() / nf;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / nf;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for &(t, y) in points {
        sxx += (t - mean_t) * (t - mean_t);
        sxy += (t - mean_t) * (y - mean_y);
    }
    if sxx == 0.0 {
        return Err(StylizationError::DegenerateAbscissa);
    }
    let m = sxy / sxx;
    let a = mean_y - m * mean_t;
    let ss: f64 = points
        .iter()
        .map(|&(t, y)| {
            let r = y - (a + m * t);
            r * r
        })
        .sum();
    // Residuals have zero mean, so this is their sample standard deviation.
    let sd_residual = (ss / (nf - 1.0)).sqrt();
    Ok(LinearModel { a, m, sd_residual })
}

/// Linear fit over voiced frames with the frame index as abscissa, so the
/// slope is in Hz per frame.
pub fn track_linear_fit(track: &F0Track) -> Result<LinearModel, StylizationError> {
    let points: Vec<(f64, f64)> = track.voiced().map(|(i, _, hz)| (i as f64, hz)).collect();
    if points.is_empty() {
        return Err(StylizationError::NoVoicedFrames);
    }
    linear_fit(&points)
}

/// Polynomial in normalized time over `domain`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolyModel {
    pub domain: (f64, f64),
    pub degree: usize,
    /// `a_0..a_n`, ascending powers of normalized time.
    pub coeffs: Vec<f64>,
    pub rmse: f64,
}

impl PolyModel {
    pub fn normalize(&self, t: f64) -> f64 {
        normalize(t, self.domain)
    }

    /// Value at `t`, or `None` outside the domain.
    pub fn eval(&self, t: f64) -> Option<f64> {
        let (t0, t1) = self.domain;
        let eps = 1e-9 * (1.0 + t0.abs().max(t1.abs()));
        if t < t0 - eps || t > t1 + eps {
            return None;
        }
        Some(self.eval_normalized(self.normalize(t)))
    }

    pub fn eval_normalized(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }
}

fn normalize(t: f64, (t0, t1): (f64, f64)) -> f64 {
    if t1 > t0 {
        (t - t0) / (t1 - t0)
    } else {
        0.0
    }
}

fn distinct_count(points: &[(f64, f64)]) -> usize {
    let mut ts: Vec<f64> = points.iter().map(|p| p.0).collect();
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    ts.len()
}

/// Least-squares polynomial of `degree` over the extent of the points.
pub fn poly_fit(points: &[(f64, f64)], degree: usize) -> Result<PolyModel, StylizationError> {
    let t0 = points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let t1 = points.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    poly_fit_in(points, degree, (t0, t1))
}

/// Least-squares polynomial of `degree` with time normalized over `domain`.
pub fn poly_fit_in(
    points: &[(f64, f64)],
    degree: usize,
    domain: (f64, f64),
) -> Result<PolyModel, StylizationError> {
    let required = degree + 1;
    let found = distinct_count(points);
    if found < required {
        return Err(StylizationError::InsufficientPoints { found, required });
    }
    let xs: Vec<f64> = points.iter().map(|p| normalize(p.0, domain)).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1).collect();
    let coeffs = least_squares_poly(&xs, &ys, degree)?;
    let model = PolyModel {
        domain,
        degree,
        coeffs,
        rmse: 0.0,
    };
    let sse: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(&x, &y)| {
            let r = y - model.eval_normalized(x);
            r * r
        })
        .sum();
    Ok(PolyModel {
        rmse: (sse / xs.len() as f64).sqrt(),
        ..model
    })
}

/// Householder QR solution of the Vandermonde least-squares problem.
fn least_squares_poly(xs: &[f64], ys: &[f64], degree: usize) -> Result<Vec<f64>, StylizationError> {
    let cols = degree + 1;
    // Column-major design matrix.
    let mut a: Vec<Vec<f64>> = (0..cols)
        .map(|j| xs.iter().map(|&x| x.powi(j as i32)).collect())
        .collect();
    let mut b = ys.to_vec();

    for k in 0..cols {
        let norm = a[k][k..].iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(StylizationError::NumericalFailure(format!(
                "column {k} vanished during factorization"
            )));
        }
        let alpha = if a[k][k] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = a[k][k..].to_vec();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        if vnorm2 > 0.0 {
            let reflect = |col: &mut [f64]| {
                let dot: f64 = v.iter().zip(col.iter()).map(|(p, q)| p * q).sum();
                let s = 2.0 * dot / vnorm2;
                for (c, vi) in col.iter_mut().zip(&v) {
                    *c -= s * vi;
                }
            };
            for col in a.iter_mut().skip(k) {
                reflect(&mut col[k..]);
            }
            reflect(&mut b[k..]);
        }
    }

    let max_diag = (0..cols).map(|k| a[k][k].abs()).fold(0.0, f64::max);
    let mut coeffs = vec![0.0; cols];
    for k in (0..cols).rev() {
        let rkk = a[k][k];
        if rkk.abs() <= max_diag * 1e-13 {
            return Err(StylizationError::NumericalFailure(format!(
                "rank-deficient system at degree {degree}"
            )));
        }
        let s: f64 = (k + 1..cols).map(|j| a[j][k] * coeffs[j]).sum();
        coeffs[k] = (b[k] - s) / rkk;
    }
    Ok(coeffs)
}

/// Rule-of-thumb degree: at least the number of F0-shaping events, and no
/// less than 2.
pub fn default_degree(n_events: usize) -> usize {
    n_events.max(2)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Domain {
    pub t0: f64,
    pub t1: f64,
    pub label: String,
}

impl Domain {
    pub fn new(t0: f64, t1: f64, label: impl Into<String>) -> Self {
        Domain {
            t0,
            t1,
            label: label.into(),
        }
    }

    fn contains(&self, t: f64) -> bool {
        let eps = 1e-9;
        t >= self.t0 - eps && t <= self.t1 + eps
    }
}

/// Domains from the intervals of a tier, skipping labels in `exclude` and
/// point tiers.
pub fn domains_from_tier(tier: &Tier, exclude: &std::collections::BTreeSet<String>) -> Vec<Domain> {
    if tier.kind != TierKind::Interval {
        return Vec::new();
    }
    tier.items
        .iter()
        .filter(|it| !exclude.contains(it.label.trim()) && it.tmax > it.tmin)
        .map(|it| Domain::new(it.tmin, it.tmax, it.label.clone()))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalFit {
    pub index: usize,
    pub domain: Domain,
    pub model: PolyModel,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkippedDomain {
    pub index: usize,
    pub domain: Domain,
    pub voiced_frames: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StylisationResult {
    pub global: PolyModel,
    pub locals: Vec<LocalFit>,
    pub skipped: Vec<SkippedDomain>,
    /// Same frame grid and voicing as the input; voiced frames hold
    /// `f0 - global(t)`.
    pub residual: F0Track,
}

/// Multiple Polynomial Stylisation over the whole track and each domain.
/// Domains with fewer than `local_degree + 1` voiced frames are skipped.
pub fn mps_stylize(
    track: &F0Track,
    domains: &[Domain],
    global_degree: usize,
    local_degree: usize,
) -> Result<StylisationResult, StylizationError> {
    let points: Vec<(f64, f64)> = track.voiced().map(|(_, t, hz)| (t, hz)).collect();
    if points.is_empty() {
        return Err(StylizationError::NoVoicedFrames);
    }
    let global = poly_fit_in(&points, global_degree, (track.start, track.end()))?;

    let mut locals = Vec::new();
    let mut skipped = Vec::new();
    for (index, d) in domains.iter().enumerate() {
        let sub: Vec<(f64, f64)> = points.iter().copied().filter(|p| d.contains(p.0)).collect();
        let skip = |reason: String| SkippedDomain {
            index,
            domain: d.clone(),
            voiced_frames: sub.len(),
            reason,
        };
        if sub.len() < local_degree + 1 {
            skipped.push(skip(format!(
                "{} voiced frames, need {}",
                sub.len(),
                local_degree + 1
            )));
            continue;
        }
        match poly_fit_in(&sub, local_degree, (d.t0, d.t1)) {
            Ok(model) => locals.push(LocalFit {
                index,
                domain: d.clone(),
                model,
            }),
            Err(e) => skipped.push(skip(e.to_string())),
        }
    }

    let frames = track
        .frames
        .iter()
        .enumerate()
        .map(|(i, f)| f.map(|hz| hz - global.eval_normalized(global.normalize(track.time(i)))))
        .collect();
    let residual = F0Track::new(track.start, track.frame_step, frames);

    Ok(StylisationResult {
        global,
        locals,
        skipped,
        residual,
    })
}

pub const STYLISATION_SCHEMA_VERSION: u32 = 1;

#[derive(Serialize)]
struct ModelJson<'a> {
    #[serde(skip_serializing_if = "Option::is_none")]
    index: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    label: Option<&'a str>,
    t0: f64,
    t1: f64,
    degree: usize,
    coeffs: &'a [f64],
    rmse: f64,
}

impl<'a> ModelJson<'a> {
    fn new(m: &'a PolyModel, index: Option<usize>, label: Option<&'a str>) -> Self {
        ModelJson {
            index,
            label,
            t0: m.domain.0,
            t1: m.domain.1,
            degree: m.degree,
            coeffs: &m.coeffs,
            rmse: m.rmse,
        }
    }
}

#[derive(Serialize)]
struct StylisationJson<'a> {
    schema_version: u32,
    time_normalization: &'static str,
    global: ModelJson<'a>,
    locals: Vec<ModelJson<'a>>,
    skipped: &'a [SkippedDomain],
}

impl StylisationResult {
    /// Model coefficients as JSON. The residual is exported separately with
    /// [`F0Track::to_csv`].
    pub fn to_json(&self) -> String {
        let doc = StylisationJson {
            schema_version: STYLISATION_SCHEMA_VERSION,
            time_normalization:
                "x = (t - t0) / (t1 - t0); f0(t) = sum_k coeffs[k] * x^k; t in seconds, f0 in Hz",
            global: ModelJson::new(&self.global, None, None),
            locals: self
                .locals
                .iter()
                .map(|l| ModelJson::new(&l.model, Some(l.index), Some(&l.domain.label)))
                .collect(),
            skipped: &self.skipped,
        };
        serde_json::to_string_pretty(&doc).expect("serializable") + "\n"
    }
}

/// Replaces each voiced frame by the median of the voiced frames in a
/// centred window of `width`. The window stays symmetric, shrinking at the
/// track edges and at unvoiced gaps.
pub fn median_filter(track: &F0Track, width: usize) -> Result<F0Track, StylizationError> {
    if width.is_multiple_of(2) {
        return Err(StylizationError::EvenWidth(width));
    }
    let half = width / 2;
    let n = track.frames.len();
    let mut out = track.frames.clone();
    let mut i = 0;
    while i < n {
        if track.frames[i].is_none() {
            i += 1;
            continue;
        }
        let run_start = i;
        while i < n && track.frames[i].is_some() {
            i += 1;
        }
        let run: Vec<f64> = track.frames[run_start..i].iter().map(|f| f.unwrap()).collect();
        let mut buf = Vec::with_capacity(width);
        for (k, slot) in out[run_start..i].iter_mut().enumerate() {
            let h = half.min(k).min(run.len() - 1 - k);
            buf.clear();
            buf.extend_from_slice(&run[k - h..=k + h]);
            buf.sort_by(f64::total_cmp);
            *slot = Some(buf[h]);
        }
    }
    Ok(F0Track {
        frames: out,
        ..track.clone()
    })
}
