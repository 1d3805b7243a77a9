//! Parse a TextGrid, pull interval durations from one tier and group them by
//! category.
//!
//! Run with `cargo run --example annotation_mining [FILE.TextGrid TIER]`.

use std::collections::{BTreeMap, BTreeSet};

use prosody::annotation::{extract_durations, group_by_label, parse_textgrid, serialize_textgrid};

const SAMPLE: &str = r#"File type = "ooTextFile"
Object class = "TextGrid"

0
1.5
<exists>
1
"IntervalTier"
"phones"
0
1.5
10
0
0.35
"sil"
0.35
0.42
"h"
0.42
0.5
"@"
0.5
0.63
"l"
0.63
0.8
"oU"
0.8
0.9
"w"
0.9
1.05
"3:"
1.05
1.15
"l"
1.15
1.3
"d"
1.3
1.5
"sil"
"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let (bytes, tier) = match args.as_slice() {
        [path, tier] => (std::fs::read(path)?, tier.clone()),
        _ => (SAMPLE.as_bytes().to_vec(), "phones".to_string()),
    };

    let annotation = parse_textgrid(&bytes)?;
    for t in &annotation.tiers {
        println!("tier {:?}: {:?}, {} items", t.name, t.kind, t.items.len());
    }

    let exclude: BTreeSet<String> = ["", "sil"].iter().map(|s| s.to_string()).collect();
    let durations = extract_durations(&annotation, &tier, &exclude)?;
    print!("{}", durations.to_csv());

    let vowels = ["@", "oU", "3:"];
    let map: BTreeMap<String, String> = vowels
        .iter()
        .map(|v| (v.to_string(), "vowel".to_string()))
        .collect();
    for (category, values) in group_by_label(&durations, &map) {
        println!("{category}: {values:?}");
    }

    // Long-format output, readable by Praat.
    let long = serialize_textgrid(&annotation);
    println!("long format: {} lines", long.lines().count());
    Ok(())
}
