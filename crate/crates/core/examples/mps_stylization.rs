//! Multiple polynomial stylisation: a global contour model, local models per
//! syllable, and the residual left over by the global model.
//!
//! Run with `cargo run --example mps_stylization`.

use prosody::signal::F0Track;
use prosody::stylization::{default_degree, mps_stylize, Domain};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // Rise-fall over 1.2 s with a voiceless gap and a consonantal dip.
    let frames: Vec<Option<f64>> = (0..120)
        .map(|i| {
            let x = i as f64 / 119.0;
            match i {
                48..=55 => None,
                56..=59 => Some(130.0 + 120.0 * x - 150.0 * x * x - 12.0),
                _ => Some(130.0 + 120.0 * x - 150.0 * x * x),
            }
        })
        .collect();
    let track = F0Track::new(0.0, 0.01, frames);

    let syllables = [
        Domain::new(0.0, 0.47, "ma"),
        Domain::new(0.48, 0.55, "s"),
        Domain::new(0.56, 1.19, "lo"),
    ];
    let degree = default_degree(1);
    let result = mps_stylize(&track, &syllables, degree, 2)?;

    println!("global degree {degree}: {:?}", result.global.coeffs);
    println!("global rmse {:.2} Hz", result.global.rmse);
    for l in &result.locals {
        println!(
            "local {} [{:.2}, {:.2}] rmse {:.3}: {:?}",
            l.domain.label, l.domain.t0, l.domain.t1, l.model.rmse, l.model.coeffs
        );
    }
    for s in &result.skipped {
        println!("skipped {}: {}", s.domain.label, s.reason);
    }

    let dip: Vec<String> = result
        .residual
        .voiced()
        .filter(|(i, _, _)| (54..62).contains(i))
        .map(|(i, _, r)| format!("{i}:{r:+.1}"))
        .collect();
    println!("residual near the dip: {}", dip.join(" "));

    println!("{}", result.to_json());
    Ok(())
}
