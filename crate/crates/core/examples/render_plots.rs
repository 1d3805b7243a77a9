//! Write the three plot kinds as SVG files.
//!
//! Run with `cargo run --example render_plots [OUT_DIR]`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::PathBuf;

use prosody::annotation::{LabelledInterval, Tier};
use prosody::metrics::{box_stats, moving_npvi};
use prosody::render::{plot_boxes, plot_track, plot_window_series, PlotSpec};
use prosody::signal::{F0Track, SampledSignal};
use prosody::stylization::{mps_stylize, Domain};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "plots".into()));
    std::fs::create_dir_all(&dir)?;

    let frames: Vec<Option<f64>> = (0..100)
        .map(|i| {
            let x = i as f64 / 99.0;
            (!(40..46).contains(&i)).then_some(120.0 + 80.0 * x - 90.0 * x * x)
        })
        .collect();
    let track = F0Track::new(0.0, 0.01, frames);
    let doms = [Domain::new(0.0, 0.4, "a"), Domain::new(0.46, 0.99, "b")];
    let fit = mps_stylize(&track, &doms, 3, 2)?;

    let mut spec = PlotSpec::new(track);
    spec.title = "rise-fall".into();
    spec.global = Some(fit.global.clone());
    spec.locals = fit.locals.iter().map(|l| l.model.clone()).collect();
    spec.residual = Some(fit.residual);
    spec.annotation = Some(Tier::intervals(
        "syllables",
        vec![
            LabelledInterval::new(0.0, 0.4, "a"),
            LabelledInterval::new(0.4, 0.46, ""),
            LabelledInterval::new(0.46, 0.99, "b"),
        ],
    ));
    let sr = 8_000;
    spec.waveform = Some(SampledSignal {
        sample_rate: sr,
        samples: (0..sr as usize)
            .map(|i| 0.5 * (2.0 * PI * 140.0 * i as f64 / sr as f64).sin())
            .collect(),
    });
    std::fs::write(dir.join("track.svg"), plot_track(&spec)?)?;

    let mut groups = BTreeMap::new();
    groups.insert("tone".to_string(), vec![180.0, 210.0, 195.0, 230.0, 175.0]);
    groups.insert("toneless".to_string(), vec![120.0, 95.0, 140.0, 110.0]);
    let stats = box_stats(&groups)?;
    std::fs::write(
        dir.join("boxes.svg"),
        plot_boxes(&stats, Some(&groups), 600, 400, "durations by tone")?,
    )?;

    let durations = [170.0, 40.0, 210.0, 120.0, 180.0, 210.0, 140.0, 120.0, 150.0, 170.0];
    let series = moving_npvi(&durations, 4, 1)?;
    std::fs::write(
        dir.join("window.svg"),
        plot_window_series(&series, 800, 300, "moving nPVI")?,
    )?;

    println!("wrote track.svg, boxes.svg, window.svg to {}", dir.display());
    Ok(())
}
