//! Estimate F0 from a synthetic glide (or a 16-bit mono WAV given on the
//! command line), smooth it and summarise it.
//!
//! Run with `cargo run --example f0_estimation [FILE.wav]`.

use std::f64::consts::PI;

use prosody::signal::{estimate_f0, read_wav, track_stats, F0Params, SampledSignal};
use prosody::stylization::{median_filter, track_linear_fit};

/// A falling glide from 220 to 140 Hz with a 100 ms pause in the middle.
fn glide() -> SampledSignal {
    let sr = 16_000;
    let n = sr as usize;
    let mut phase = 0.0;
    let samples = (0..n)
        .map(|i| {
            let t = i as f64 / sr as f64;
            let f = 220.0 - 80.0 * t;
            phase += 2.0 * PI * f / sr as f64;
            if (0.45..0.55).contains(&t) {
                0.0
            } else {
                0.4 * phase.sin() + 0.2 * (2.0 * phase).sin()
            }
        })
        .collect();
    SampledSignal {
        sample_rate: sr,
        samples,
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let signal = match std::env::args().nth(1) {
        Some(path) => read_wav(&std::fs::read(path)?)?,
        None => glide(),
    };
    let params = F0Params::default();
    for w in params.warnings() {
        eprintln!("warning: {w}");
    }

    let track = estimate_f0(&signal, &params)?;
    let smooth = median_filter(&track, 5)?;
    let stats = track_stats(&smooth)?;
    println!(
        "{} frames, {} voiced; min {:.1} max {:.1} mean {:.1} median {:.1} Hz",
        stats.total_count, stats.voiced_count, stats.min, stats.max, stats.mean, stats.median
    );

    let line = track_linear_fit(&smooth)?;
    println!(
        "baseline {:.1} Hz, slope {:.3} Hz/frame, residual sd {:.2} Hz",
        line.a, line.m, line.sd_residual
    );

    for (i, t, hz) in smooth.voiced().step_by(10) {
        println!("frame {i:3} t={t:.3}s {hz:.1} Hz");
    }
    Ok(())
}
