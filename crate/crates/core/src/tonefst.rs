//! Terraced-tone realisation with a two-state finite-state transducer.
//!
//! Lexical tones `H`/`L` map to phonetic tones `h`/`l`. In state H every
//! input surfaces as `h`; in state L every input surfaces as `l`; the input
//! symbol selects the next state. The realisation of a tone is therefore
//! conditioned by the preceding *lexical* tone: H after L is downstepped
//! (surfaces `l`), L after H is upstepped (surfaces `h`).
//!
//! [`apply_rules`] computes the same mapping from context-sensitive rewrite
//! rules without a state machine.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ToneError {
    #[error("empty tone string")]
    EmptyInput,
    #[error("invalid lexical tone '{symbol}' at position {position}; expected H or L")]
    InvalidSymbol { symbol: char, position: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum LexicalTone {
    H,
    L,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum PhoneticTone {
    #[serde(rename = "h")]
    High,
    #[serde(rename = "l")]
    Low,
}

impl LexicalTone {
    /// The phonetic tone with the same register.
    pub fn faithful(self) -> PhoneticTone {
        match self {
            LexicalTone::H => PhoneticTone::High,
            LexicalTone::L => PhoneticTone::Low,
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'H' => Some(LexicalTone::H),
            'L' => Some(LexicalTone::L),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            LexicalTone::H => 'H',
            LexicalTone::L => 'L',
        }
    }
}

impl PhoneticTone {
    pub fn as_char(self) -> char {
        match self {
            PhoneticTone::High => 'h',
            PhoneticTone::Low => 'l',
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LexicalToneString(pub Vec<LexicalTone>);

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PhoneticToneString(pub Vec<PhoneticTone>);

impl FromStr for LexicalToneString {
    type Err = ToneError;

    /// Parses `H`/`L` symbols; whitespace is ignored.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let tones = s
            .chars()
            .filter(|c| !c.is_whitespace())
            .enumerate()
            .map(|(position, symbol)| {
                LexicalTone::from_char(symbol).ok_or(ToneError::InvalidSymbol { symbol, position })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(LexicalToneString(tones))
    }
}

impl fmt::Display for LexicalToneString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.iter().try_for_each(|t| write!(f, "{}", t.as_char()))
    }
}

impl fmt::Display for PhoneticToneString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.iter().try_for_each(|t| write!(f, "{}", t.as_char()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum State {
    StateH,
    StateL,
}

/// `(from, input, output, to)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Transition {
    pub from: State,
    pub input: LexicalTone,
    pub output: PhoneticTone,
    pub to: State,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum StartPolicy {
    /// Start in the state named by the first lexical tone.
    #[default]
    MatchFirst,
    Fixed(State),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ToneFst {
    pub transitions: [Transition; 4],
    pub start: StartPolicy,
    pub final_faithful: bool,
}

impl Default for ToneFst {
    fn default() -> Self {
        ToneFst::terracing(true)
    }
}

impl ToneFst {
    /// The four-transition terracing machine.
    pub fn terracing(final_faithful: bool) -> Self {
        use LexicalTone::{H, L};
        use PhoneticTone::{High, Low};
        use State::{StateH, StateL};
        let t = |from, input, output, to| Transition {
            from,
            input,
            output,
            to,
        };
        ToneFst {
            transitions: [
                t(StateH, H, High, StateH),
                t(StateH, L, High, StateL),
                t(StateL, L, Low, StateL),
                t(StateL, H, Low, StateH),
            ],
            start: StartPolicy::MatchFirst,
            final_faithful,
        }
    }

    /// Transitions applicable to `(state, input)`.
    pub fn applicable(&self, state: State, input: LexicalTone) -> impl Iterator<Item = &Transition> {
        self.transitions
            .iter()
            .filter(move |t| t.from == state && t.input == input)
    }

    fn step(&self, state: State, input: LexicalTone) -> &Transition {
        self.applicable(state, input)
            .next()
            .expect("transition function is total")
    }

    pub fn run(&self, lex: &LexicalToneString) -> Result<PhoneticToneString, ToneError> {
        let first = *lex.0.first().ok_or(ToneError::EmptyInput)?;
        let mut state = match self.start {
            StartPolicy::MatchFirst => match first {
                LexicalTone::H => State::StateH,
                LexicalTone::L => State::StateL,
            },
            StartPolicy::Fixed(s) => s,
        };
        let mut out = Vec::with_capacity(lex.0.len());
        for &tone in &lex.0 {
            let t = self.step(state, tone);
            out.push(t.output);
            state = t.to;
        }
        if self.final_faithful {
            let last = out.len() - 1;
            out[last] = lex.0[last].faithful();
        }
        Ok(PhoneticToneString(out))
    }
}

/// Transduces with the terracing machine, starting in the state of the first
/// tone. With `final_faithful` the last tone surfaces unassimilated.
pub fn transduce(
    lex: &LexicalToneString,
    final_faithful: bool,
) -> Result<PhoneticToneString, ToneError> {
    ToneFst::terracing(final_faithful).run(lex)
}

/// A rewrite rule `input -> output / left _`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RewriteRule {
    pub input: LexicalTone,
    pub output: PhoneticTone,
    pub left: LexicalTone,
}

/// `H -> h / H_`, `L -> h / H_`, `L -> l / L_`, `H -> l / L_`.
pub const TERRACING_RULES: [RewriteRule; 4] = [
    RewriteRule {
        input: LexicalTone::H,
        output: PhoneticTone::High,
        left: LexicalTone::H,
    },
    RewriteRule {
        input: LexicalTone::L,
        output: PhoneticTone::High,
        left: LexicalTone::H,
    },
    RewriteRule {
        input: LexicalTone::L,
        output: PhoneticTone::Low,
        left: LexicalTone::L,
    },
    RewriteRule {
        input: LexicalTone::H,
        output: PhoneticTone::Low,
        left: LexicalTone::L,
    },
];

/// Applies [`TERRACING_RULES`] simultaneously to every non-initial position;
/// the initial tone is faithful.
pub fn apply_rules(
    lex: &LexicalToneString,
    final_faithful: bool,
) -> Result<PhoneticToneString, ToneError> {
    let tones = &lex.0;
    if tones.is_empty() {
        return Err(ToneError::EmptyInput);
    }
    let last = tones.len() - 1;
    let out = (0..tones.len())
        .map(|i| {
            if i == 0 || (final_faithful && i == last) {
                return tones[i].faithful();
            }
            TERRACING_RULES
                .iter()
                .find(|r| r.input == tones[i] && r.left == tones[i - 1])
                .map(|r| r.output)
                .expect("rules cover every context")
        })
        .collect();
    Ok(PhoneticToneString(out))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StepMark {
    Plain,
    Downstep,
    Upstep,
}

impl StepMark {
    pub fn symbol(self) -> &'static str {
        match self {
            StepMark::Plain => "",
            StepMark::Downstep => "↓",
            StepMark::Upstep => "↑",
        }
    }
}

/// Marks downstepped H (after L) and upstepped L (after H). With
/// `final_faithful` the last position is plain, since it is not assimilated.
pub fn annotate_steps(
    lex: &LexicalToneString,
    final_faithful: bool,
) -> Result<Vec<StepMark>, ToneError> {
    let tones = &lex.0;
    if tones.is_empty() {
        return Err(ToneError::EmptyInput);
    }
    let last = tones.len() - 1;
    Ok((0..tones.len())
        .map(|i| {
            if i == 0 || (final_faithful && i == last) {
                return StepMark::Plain;
            }
            match (tones[i - 1], tones[i]) {
                (LexicalTone::L, LexicalTone::H) => StepMark::Downstep,
                (LexicalTone::H, LexicalTone::L) => StepMark::Upstep,
                _ => StepMark::Plain,
            }
        })
        .collect())
}

/// Splits a syllable label ending in `H` or `L` into `(syllable, tone)`.
pub fn split_tone_label(label: &str) -> Option<(&str, LexicalTone)> {
    let label = label.trim();
    let c = label.chars().last()?;
    let tone = LexicalTone::from_char(c)?;
    Some((label[..label.len() - c.len_utf8()].trim_end(), tone))
}

/// CSV `syllable,lexical,phonetic`.
pub fn triples_csv(syllables: &[String], lex: &LexicalToneString, out: &PhoneticToneString) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["syllable", "lexical", "phonetic"])
        .expect("writing to memory");
    for ((s, l), p) in syllables.iter().zip(&lex.0).zip(&out.0) {
        w.write_record([s.as_str(), &l.as_char().to_string(), &p.as_char().to_string()])
            .expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}
