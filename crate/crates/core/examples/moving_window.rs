//! Moving-window nPVI: a profile of local timing irregularity.
//!
//! Run with `cargo run --example moving_window [WINDOW [STEP]]`.

use prosody::metrics::moving_npvi;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let window: usize = args.next().map(|a| a.parse()).transpose()?.unwrap_or(5);
    let step: usize = args.next().map(|a| a.parse()).transpose()?.unwrap_or(1);

    // A regular stretch, then an alternating one.
    let durations = [
        150.0, 155.0, 148.0, 152.0, 150.0, 149.0, 151.0, 90.0, 210.0, 85.0, 220.0, 95.0, 200.0,
    ];
    let series = moving_npvi(&durations, window, step)?;
    for (i, v) in series.values.iter().enumerate() {
        println!("window {i:2} {v:7.2} {}", "#".repeat((v / 4.0) as usize));
    }
    println!(
        "mean {:.2}, sd {}, cv {}",
        series.summary.mean,
        series.summary.sd.map_or("n/a".into(), |v| format!("{v:.2}")),
        series.summary.coeff_var.map_or("n/a".into(), |v| format!("{v:.1}%"))
    );
    print!("{}", series.to_csv());
    Ok(())
}
