//! The tone-terracing transducer: lexical H/L tones to phonetic h/l, with
//! downstep and upstep marks.
//!
//! Run with `cargo run --example tone_terracing [TONES ...]`.

use prosody::tonefst::{annotate_steps, apply_rules, transduce, LexicalToneString, ToneFst};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut inputs: Vec<String> = std::env::args().skip(1).collect();
    if inputs.is_empty() {
        inputs = vec!["LHLLHLLHLLH".into(), "HL".into(), "HHLLHH".into()];
    }

    let fst = ToneFst::terracing(true);
    for t in &fst.transitions {
        println!("{:?} --{:?}:{:?}--> {:?}", t.from, t.input, t.output, t.to);
    }

    for s in &inputs {
        let lex: LexicalToneString = s.parse()?;
        let phon = transduce(&lex, true)?;
        assert_eq!(phon, apply_rules(&lex, true)?);
        let marks: String = annotate_steps(&lex, true)?
            .into_iter()
            .map(|m| match m.symbol() {
                "" => "·",
                s => s,
            })
            .collect();
        let free = transduce(&lex, false)?;
        println!("{lex} -> {phon}  steps {marks}  (final assimilated: {free})");
    }
    Ok(())
}
