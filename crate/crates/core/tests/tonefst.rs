use proptest::prelude::*;
use prosody::tonefst::*;

fn all_strings(len: usize) -> impl Iterator<Item = LexicalToneString> {
    (0u32..1 << len).map(move |bits| {
        LexicalToneString(
            (0..len)
                .map(|i| if bits >> i & 1 == 1 { LexicalTone::H } else { LexicalTone::L })
                .collect(),
        )
    })
}

#[test]
fn transducer_equals_rules_exhaustively() {
    for len in 1..=12 {
        for lex in all_strings(len) {
            for ff in [true, false] {
                assert_eq!(transduce(&lex, ff).unwrap(), apply_rules(&lex, ff).unwrap(), "{lex}");
            }
        }
    }
}

#[test]
fn worked_sequence() {
    let lex: LexicalToneString = "LHLLHLLHLLH".parse().unwrap();
    assert_eq!(transduce(&lex, true).unwrap().to_string(), "llhllhllhlh");
    let marks: String = annotate_steps(&lex, true)
        .unwrap()
        .iter()
        .map(|m| m.symbol())
        .collect::<Vec<_>>()
        .concat();
    assert!(marks.contains('↓'));
}

#[test]
fn output_length_and_first_symbol() {
    for len in 1..=8 {
        for lex in all_strings(len) {
            let out = transduce(&lex, false).unwrap();
            assert_eq!(out.0.len(), lex.0.len());
            assert_eq!(out.0[0], lex.0[0].faithful());
        }
    }
}

#[test]
fn start_state_policy() {
    let lex: LexicalToneString = "HL".parse().unwrap();
    let fst = ToneFst {
        start: StartPolicy::Fixed(State::StateL),
        ..ToneFst::terracing(false)
    };
    assert_eq!(fst.run(&lex).unwrap().to_string(), "lh");
    assert_eq!(transduce(&lex, false).unwrap().to_string(), "hh");
}

fn tones() -> impl Strategy<Value = LexicalToneString> {
    prop::collection::vec(prop_oneof![Just(LexicalTone::H), Just(LexicalTone::L)], 2..30)
        .prop_map(LexicalToneString)
}

proptest! {
    /// Each output symbol depends only on the tone to its left, outside the
    /// faithful first position.
    #[test]
    fn output_is_left_context_only(lex in tones(), pos in any::<prop::sample::Index>()) {
        let i = 1 + pos.index(lex.0.len() - 1);
        let out = transduce(&lex, false).unwrap();
        let mut mutated = lex.clone();
        mutated.0[i] = match mutated.0[i] { LexicalTone::H => LexicalTone::L, LexicalTone::L => LexicalTone::H };
        let out2 = transduce(&mutated, false).unwrap();
        for j in 0..lex.0.len() {
            if j != i + 1 {
                prop_assert_eq!(out.0[j], out2.0[j]);
            }
        }
    }

    /// With the final override, mutating any non-final tone leaves every
    /// output except its right neighbour unchanged.
    #[test]
    fn final_override_context(lex in tones(), pos in any::<prop::sample::Index>()) {
        let last = lex.0.len() - 1;
        let j = pos.index(last);
        let out = transduce(&lex, true).unwrap();
        let mut mutated = lex.clone();
        mutated.0[j] = match mutated.0[j] { LexicalTone::H => LexicalTone::L, LexicalTone::L => LexicalTone::H };
        let out2 = transduce(&mutated, true).unwrap();
        for i in 0..=last {
            if i != j + 1 && !(i == j && j == 0) {
                prop_assert_eq!(out.0[i], out2.0[i], "position {}", i);
            }
        }
        prop_assert_eq!(out2.0[last], mutated.0[last].faithful());
    }

    #[test]
    fn display_parse_round_trip(lex in tones()) {
        prop_assert_eq!(lex.to_string().parse::<LexicalToneString>().unwrap(), lex);
    }
}
