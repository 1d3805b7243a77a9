#![allow(dead_code)]

pub mod oracle;

use std::f64::consts::PI;
use std::path::PathBuf;

use prosody::signal::SampledSignal;

/// The worked English duration list, ms.
pub const ENGLISH: [f64; 16] = [
    170.0, 40.0, 210.0, 120.0, 180.0, 210.0, 140.0, 120.0, 150.0, 170.0, 130.0, 130.0, 80.0,
    350.0, 80.0, 320.0,
];

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data")
}

pub fn textgrid_paths() -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = std::fs::read_dir(data_dir().join("textgrids"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    v.sort();
    v
}

pub fn sine(freq: f64, sample_rate: u32, seconds: f64, amplitude: f64) -> SampledSignal {
    let n = (seconds * sample_rate as f64).round() as usize;
    let sr = sample_rate as f64;
    SampledSignal {
        sample_rate,
        samples: (0..n)
            .map(|i| amplitude * (2.0 * PI * freq * i as f64 / sr).sin())
            .collect(),
    }
}

pub fn sawtooth(freq: f64, sample_rate: u32, seconds: f64, amplitude: f64) -> SampledSignal {
    let n = (seconds * sample_rate as f64).round() as usize;
    let sr = sample_rate as f64;
    SampledSignal {
        sample_rate,
        samples: (0..n)
            .map(|i| {
                let phase = (freq * i as f64 / sr).fract();
                amplitude * (2.0 * phase - 1.0)
            })
            .collect(),
    }
}

/// Fraction of all frames that are voiced and within `tol` Hz of `truth`.
pub fn accuracy(track: &prosody::signal::F0Track, truth: f64, tol: f64) -> f64 {
    let good = track
        .frames
        .iter()
        .filter(|f| matches!(f, Some(hz) if (hz - truth).abs() <= tol))
        .count();
    good as f64 / track.len() as f64
}

/// The fixed inputs behind the checked-in golden SVGs.
pub fn golden_plots() -> Vec<(&'static str, String)> {
    use prosody::annotation::{LabelledInterval, Tier};
    use prosody::metrics::{box_stats, moving_npvi};
    use prosody::render::{plot_boxes, plot_track, plot_window_series, PlotSpec};
    use prosody::signal::F0Track;
    use prosody::stylization::{mps_stylize, Domain};
    use std::collections::BTreeMap;

    let frames: Vec<Option<f64>> = (0..120)
        .map(|i| {
            if (50..58).contains(&i) {
                None
            } else {
                let x = i as f64 / 119.0;
                Some(140.0 + 90.0 * x - 110.0 * x * x + if i % 9 == 4 { 6.0 } else { 0.0 })
            }
        })
        .collect();
    let track = F0Track::new(0.0, 0.01, frames);
    let doms = [Domain::new(0.0, 0.5, "ba"), Domain::new(0.58, 1.19, "dum")];
    let r = mps_stylize(&track, &doms, 4, 2).unwrap();
    let mut spec = PlotSpec::new(track);
    spec.title = "golden track".into();
    spec.global = Some(r.global.clone());
    spec.locals = r.locals.iter().map(|l| l.model.clone()).collect();
    spec.residual = Some(r.residual.clone());
    spec.annotation = Some(Tier::intervals(
        "syll",
        vec![
            LabelledInterval::new(0.0, 0.5, "ba"),
            LabelledInterval::new(0.5, 0.58, ""),
            LabelledInterval::new(0.58, 1.19, "dum"),
        ],
    ));
    spec.waveform = Some(sine(150.0, 8_000, 1.2, 0.6));
    let track_svg = plot_track(&spec).unwrap();

    let mut groups = BTreeMap::new();
    groups.insert("stressed".to_string(), ENGLISH[..8].to_vec());
    groups.insert("unstressed".to_string(), ENGLISH[8..].to_vec());
    let boxes_svg =
        plot_boxes(&box_stats(&groups).unwrap(), Some(&groups), 600, 400, "golden boxes").unwrap();

    let ws = moving_npvi(&ENGLISH, 5, 1).unwrap();
    let window_svg = plot_window_series(&ws, 800, 300, "golden window").unwrap();

    vec![
        ("track.svg", track_svg),
        ("boxes.svg", boxes_svg),
        ("window.svg", window_svg),
    ]
}

/// Compares against `tests/golden/<name>`; with `UPDATE_GOLDEN` set, rewrites
/// the file instead.
pub fn check_golden(name: &str, svg: &str) -> Result<(), String> {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, svg).unwrap();
        return Ok(());
    }
    let want = std::fs::read_to_string(&path)
        .map_err(|e| format!("{}: {e} (run with UPDATE_GOLDEN=1 to create)", path.display()))?;
    if want == svg {
        Ok(())
    } else {
        Err(format!("{name} differs from {}", path.display()))
    }
}
