//! Musical intervals in chanted call contours: the step down from the high
//! level to the low level, compared with tempered intervals.
//!
//! Run with `cargo run --example chanted_contour`.

use prosody::scales::{
    chroma_analyze, chroma_from_means, semitones_to_ratio, IntervalTable, JUST_MINOR_THIRD,
};
use prosody::signal::F0Track;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let table = IntervalTable::default();
    println!(
        "tempered minor third {:.3}, just {JUST_MINOR_THIRD}, semitone {:.4}",
        semitones_to_ratio(3.0),
        semitones_to_ratio(1.0)
    );

    for (phrase, f1, f2) in [
        ("hello", 212.0, 177.0),
        ("dinner's ready", 201.0, 168.0),
        ("Johnny", 240.0, 196.0),
        ("where are you", 230.0, 197.0),
    ] {
        let r = chroma_from_means(f1, f2, &table)?;
        println!(
            "{phrase:15} {f1:.0}/{f2:.0} ratio {:.3} = {:.2} st -> {} ({:+.1} cents)",
            r.ratio, r.semitone_distance, r.nearest_interval, r.deviation_cents
        );
    }

    // From an F0 track with the two levels given as time spans.
    let mut frames: Vec<Option<f64>> = (0..25).map(|i| Some(205.0 + (i % 4) as f64)).collect();
    frames.extend([None; 4]);
    frames.extend((0..30).map(|i| Some(171.0 + (i % 3) as f64)));
    let track = F0Track::new(0.0, 0.01, frames);
    let r = chroma_analyze(&track, (0.0, 0.24), (0.29, 0.58), &table)?;
    print!("{}", r.to_json());

    // A richer table.
    let table = table.with("tritone", 6.0).with("major_third", 4.0);
    let r = chroma_from_means(250.0, 198.0, &table)?;
    println!("250/198 -> {}", r.nearest_interval);
    Ok(())
}
