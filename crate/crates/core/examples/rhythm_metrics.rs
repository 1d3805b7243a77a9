//! Timing irregularity metrics on a sequence of interval durations.
//!
//! Run with `cargo run --example rhythm_metrics [MS ...]`.

use prosody::metrics::{npvi, rpvi, speech_rate, MetricsReport, SdDenominator};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut durations: Vec<f64> = std::env::args()
        .skip(1)
        .map(|a| a.parse())
        .collect::<Result<_, _>>()?;
    if durations.is_empty() {
        durations = vec![
            170.0, 40.0, 210.0, 120.0, 180.0, 210.0, 140.0, 120.0, 150.0, 170.0, 130.0, 130.0,
            80.0, 350.0, 80.0, 320.0,
        ];
    }

    let report = MetricsReport::compute(&durations, SdDenominator::Sample)?;
    print!("{}", report.to_json());

    let population = MetricsReport::compute(&durations, SdDenominator::Population)?;
    println!("population SD {:.2}", population.sd);

    // Alternation and steady growth look the same to the PVIs.
    let alternating = [2.0, 4.0, 2.0, 4.0, 2.0, 4.0];
    let growing = [2.0, 4.0, 8.0, 16.0, 32.0, 16.0];
    println!(
        "nPVI alternating {:.3}, growing {:.3}; rPVI {:.3} vs {:.3}",
        npvi(&alternating)?,
        npvi(&growing)?,
        rpvi(&alternating)?,
        rpvi(&growing)?
    );

    let rate = speech_rate(&durations)?;
    println!(
        "median duration {} ms, {:.2} units/s",
        rate.median_duration, rate.median_rate
    );
    Ok(())
}
