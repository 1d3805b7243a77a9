//! Praat TextGrid annotations: parsing (long and short text formats, UTF-8 or
//! UTF-16), long-format serialization, and annotation mining of interval
//! durations.
//!
//! Both Praat text formats carry the same token stream; the long format only
//! adds `key =` labels and `[i]` indices. The reader therefore tokenizes into
//! numbers, quoted strings and `<flag>`s, skipping labels, which accepts either
//! layout with one grammar.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

/// Tolerance used when comparing interval boundaries read from text.
const TIME_EPS: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnnotationError {
    #[error("malformed TextGrid at line {line}: {message}")]
    MalformedTextGrid { line: usize, message: String },
    #[error("overlapping intervals in tier \"{tier}\": interval {index} starts at {start} before previous end {prev_end}")]
    OverlappingIntervals {
        tier: String,
        index: usize,
        start: f64,
        prev_end: f64,
    },
    #[error("encoding error: {0}")]
    EncodingError(String),
    #[error("unknown tier \"{0}\"")]
    UnknownTier(String),
    #[error("tier \"{0}\" is a point tier, not an interval tier")]
    NotIntervalTier(String),
}

fn malformed(line: usize, message: impl Into<String>) -> AnnotationError {
    AnnotationError::MalformedTextGrid {
        line,
        message: message.into(),
    }
}

/// A labelled time span in seconds. Points are stored with `tmin == tmax`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LabelledInterval {
    pub tmin: f64,
    pub tmax: f64,
    pub label: String,
}

impl LabelledInterval {
    pub fn new(tmin: f64, tmax: f64, label: impl Into<String>) -> Self {
        LabelledInterval {
            tmin,
            tmax,
            label: label.into(),
        }
    }

    pub fn duration(&self) -> f64 {
        self.tmax - self.tmin
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TierKind {
    Interval,
    Point,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tier {
    pub name: String,
    pub kind: TierKind,
    pub items: Vec<LabelledInterval>,
}

impl Tier {
    pub fn intervals(name: impl Into<String>, items: Vec<LabelledInterval>) -> Self {
        Tier {
            name: name.into(),
            kind: TierKind::Interval,
            items,
        }
    }

    pub fn points(name: impl Into<String>, points: Vec<(f64, String)>) -> Self {
        Tier {
            name: name.into(),
            kind: TierKind::Point,
            items: points
                .into_iter()
                .map(|(t, mark)| LabelledInterval::new(t, t, mark))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Annotation {
    pub xmin: f64,
    pub xmax: f64,
    pub tiers: Vec<Tier>,
}

impl Annotation {
    pub fn tier(&self, name: &str) -> Option<&Tier> {
        self.tiers.iter().find(|t| t.name == name)
    }

    /// Checks every structural invariant. `line` is attached to errors that
    /// are reported as malformed input.
    pub fn validate(&self) -> Result<(), AnnotationError> {
        self.validate_at(0)
    }

    fn validate_at(&self, line: usize) -> Result<(), AnnotationError> {
        if !(self.xmin <= self.xmax) {
            return Err(malformed(
                line,
                format!("xmin {} exceeds xmax {}", self.xmin, self.xmax),
            ));
        }
        let mut names = BTreeSet::new();
        for tier in &self.tiers {
            if !names.insert(tier.name.as_str()) {
                return Err(malformed(
                    line,
                    format!("duplicate tier name \"{}\"", tier.name),
                ));
            }
            validate_tier(tier, self.xmin, self.xmax, line)?;
        }
        Ok(())
    }
}

fn validate_tier(tier: &Tier, xmin: f64, xmax: f64, line: usize) -> Result<(), AnnotationError> {
    let mut prev: Option<&LabelledInterval> = None;
    for (i, item) in tier.items.iter().enumerate() {
        if !(item.tmin <= item.tmax) {
            return Err(malformed(
                line,
                format!(
                    "tier \"{}\" item {}: tmin {} exceeds tmax {}",
                    tier.name,
                    i + 1,
                    item.tmin,
                    item.tmax
                ),
            ));
        }
        if item.tmin < xmin - TIME_EPS || item.tmax > xmax + TIME_EPS {
            return Err(malformed(
                line,
                format!(
                    "tier \"{}\" item {} [{}, {}] lies outside [{}, {}]",
                    tier.name,
                    i + 1,
                    item.tmin,
                    item.tmax,
                    xmin,
                    xmax
                ),
            ));
        }
        if let Some(p) = prev {
            match tier.kind {
                TierKind::Interval if item.tmin < p.tmax - TIME_EPS => {
                    return Err(AnnotationError::OverlappingIntervals {
                        tier: tier.name.clone(),
                        index: i + 1,
                        start: item.tmin,
                        prev_end: p.tmax,
                    });
                }
                TierKind::Point if item.tmin < p.tmin => {
                    return Err(malformed(
                        line,
                        format!("tier \"{}\" point {} out of time order", tier.name, i + 1),
                    ));
                }
                _ => {}
            }
        }
        prev = Some(item);
    }
    Ok(())
}

// --- decoding -------------------------------------------------------------

fn decode(content: &[u8]) -> Result<String, AnnotationError> {
    fn utf16(body: &[u8], big_endian: bool) -> Result<String, AnnotationError> {
        if !body.len().is_multiple_of(2) {
            return Err(AnnotationError::EncodingError(
                "odd byte count in UTF-16 input".into(),
            ));
        }
        let units: Vec<u16> = body
            .chunks_exact(2)
            .map(|c| {
                if big_endian {
                    u16::from_be_bytes([c[0], c[1]])
                } else {
                    u16::from_le_bytes([c[0], c[1]])
                }
            })
            .collect();
        String::from_utf16(&units).map_err(|e| AnnotationError::EncodingError(e.to_string()))
    }

    match content {
        [0xFF, 0xFE, rest @ ..] => utf16(rest, false),
        [0xFE, 0xFF, rest @ ..] => utf16(rest, true),
        [0xEF, 0xBB, 0xBF, rest @ ..] => std::str::from_utf8(rest)
            .map(str::to_owned)
            .map_err(|e| AnnotationError::EncodingError(e.to_string())),
        _ => std::str::from_utf8(content)
            .map(str::to_owned)
            .map_err(|e| AnnotationError::EncodingError(e.to_string())),
    }
}

// --- tokenizer ------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Str(String),
    Flag(String),
}

#[derive(Debug)]
struct Token {
    tok: Tok,
    line: usize,
}

fn tokenize(text: &str) -> Result<Vec<Token>, AnnotationError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let mut line = 1usize;

    while let Some(&c) = chars.peek() {
        match c {
            '\n' => {
                line += 1;
                chars.next();
            }
            c if c.is_whitespace() => {
                chars.next();
            }
            '"' => {
                let start_line = line;
                chars.next();
                let mut s = String::new();
                loop {
                    match chars.next() {
                        Some('"') => {
                            if chars.peek() == Some(&'"') {
                                chars.next();
                                s.push('"');
                            } else {
                                break;
                            }
                        }
                        Some(ch) => {
                            if ch == '\n' {
                                line += 1;
                            }
                            s.push(ch);
                        }
                        None => {
                            return Err(malformed(start_line, "unterminated string"));
                        }
                    }
                }
                out.push(Token {
                    tok: Tok::Str(s),
                    line: start_line,
                });
            }
            '<' => {
                chars.next();
                let mut s = String::new();
                loop {
                    match chars.next() {
                        Some('>') => break,
                        Some('\n') | None => return Err(malformed(line, "unterminated <flag>")),
                        Some(ch) => s.push(ch),
                    }
                }
                out.push(Token {
                    tok: Tok::Flag(s),
                    line,
                });
            }
            '[' => {
                // Index brackets in the long format, e.g. `item [1]:`.
                chars.next();
                loop {
                    match chars.next() {
                        Some(']') => break,
                        Some('\n') | None => return Err(malformed(line, "unterminated [index]")),
                        Some(_) => {}
                    }
                }
            }
            '!' => {
                // Comment to end of line.
                while let Some(&ch) = chars.peek() {
                    if ch == '\n' {
                        break;
                    }
                    chars.next();
                }
            }
            c if c.is_ascii_digit() || c == '-' || c == '+' || c == '.' => {
                let mut s = String::new();
                while let Some(&ch) = chars.peek() {
                    if ch.is_whitespace() {
                        break;
                    }
                    s.push(ch);
                    chars.next();
                }
                let v: f64 = s
                    .parse()
                    .map_err(|_| malformed(line, format!("invalid number \"{s}\"")))?;
                out.push(Token {
                    tok: Tok::Num(v),
                    line,
                });
            }
            _ => {
                // Labels such as `xmin`, `=`, `intervals:`, `tiers?`.
                while let Some(&ch) = chars.peek() {
                    if ch.is_whitespace() || ch == '"' || ch == '<' || ch == '[' {
                        break;
                    }
                    chars.next();
                }
            }
        }
    }
    Ok(out)
}

struct Cursor {
    tokens: Vec<Token>,
    pos: usize,
    last_line: usize,
}

impl Cursor {
    fn line(&self) -> usize {
        self.tokens
            .get(self.pos)
            .map(|t| t.line)
            .unwrap_or(self.last_line)
    }

    fn next(&mut self, what: &str) -> Result<&Token, AnnotationError> {
        let line = self.line();
        let tok = self
            .tokens
            .get(self.pos)
            .ok_or_else(|| malformed(line, format!("unexpected end of file, expected {what}")))?;
        self.pos += 1;
        Ok(tok)
    }

    fn num(&mut self, what: &str) -> Result<f64, AnnotationError> {
        let t = self.next(what)?;
        match &t.tok {
            Tok::Num(v) => Ok(*v),
            other => Err(malformed(t.line, format!("expected {what}, found {other:?}"))),
        }
    }

    fn count(&mut self, what: &str) -> Result<usize, AnnotationError> {
        let line = self.line();
        let v = self.num(what)?;
        if v < 0.0 || v.fract() != 0.0 || v > 1e9 {
            return Err(malformed(line, format!("invalid {what} {v}")));
        }
        Ok(v as usize)
    }

    fn string(&mut self, what: &str) -> Result<String, AnnotationError> {
        let t = self.next(what)?;
        match &t.tok {
            Tok::Str(s) => Ok(s.clone()),
            other => Err(malformed(t.line, format!("expected {what}, found {other:?}"))),
        }
    }
}

/// Parses a Praat TextGrid in long or short text format.
pub fn parse_textgrid(content: &[u8]) -> Result<Annotation, AnnotationError> {
    let text = decode(content)?;
    let last_line = text.lines().count().max(1);
    let tokens = tokenize(&text)?;
    let mut cur = Cursor {
        tokens,
        pos: 0,
        last_line,
    };

    let file_type = cur.string("file type")?;
    if file_type != "ooTextFile" {
        return Err(malformed(1, format!("unsupported file type \"{file_type}\"")));
    }
    let class_line = cur.line();
    let class = cur.string("object class")?;
    if class != "TextGrid" {
        return Err(malformed(
            class_line,
            format!("object class \"{class}\" is not TextGrid"),
        ));
    }
    let xmin = cur.num("xmin")?;
    let xmax = cur.num("xmax")?;

    let flag_line = cur.line();
    let has_tiers = match &cur.next("tiers flag")?.tok {
        Tok::Flag(f) if f == "exists" => true,
        Tok::Flag(f) if f == "absent" => false,
        other => {
            return Err(malformed(
                flag_line,
                format!("expected <exists> or <absent>, found {other:?}"),
            ))
        }
    };

    let mut tiers = Vec::new();
    if has_tiers {
        let n_tiers = cur.count("tier count")?;
        for _ in 0..n_tiers {
            let class_line = cur.line();
            let class = cur.string("tier class")?;
            let name = cur.string("tier name")?;
            let _tier_xmin = cur.num("tier xmin")?;
            let _tier_xmax = cur.num("tier xmax")?;
            let n_items = cur.count("item count")?;
            let tier = match class.as_str() {
                "IntervalTier" => {
                    let mut items = Vec::with_capacity(n_items);
                    for _ in 0..n_items {
                        let tmin = cur.num("interval xmin")?;
                        let tmax = cur.num("interval xmax")?;
                        let label = cur.string("interval text")?;
                        items.push(LabelledInterval { tmin, tmax, label });
                    }
                    Tier {
                        name,
                        kind: TierKind::Interval,
                        items,
                    }
                }
                "TextTier" | "PointTier" => {
                    let mut items = Vec::with_capacity(n_items);
                    for _ in 0..n_items {
                        let t = cur.num("point time")?;
                        let mark = cur.string("point mark")?;
                        items.push(LabelledInterval::new(t, t, mark));
                    }
                    Tier {
                        name,
                        kind: TierKind::Point,
                        items,
                    }
                }
                other => {
                    return Err(malformed(class_line, format!("unknown tier class \"{other}\"")))
                }
            };
            tiers.push(tier);
        }
    }

    if cur.pos < cur.tokens.len() {
        return Err(malformed(cur.line(), "trailing content after last tier"));
    }

    let annotation = Annotation { xmin, xmax, tiers };
    annotation.validate_at(cur.last_line)?;
    Ok(annotation)
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\"\""))
}

/// Emits the long ("text file") TextGrid format.
pub fn serialize_textgrid(a: &Annotation) -> String {
    let mut out = String::new();
    out.push_str("File type = \"ooTextFile\"\n");
    out.push_str("Object class = \"TextGrid\"\n\n");
    let _ = writeln!(out, "xmin = {} ", a.xmin);
    let _ = writeln!(out, "xmax = {} ", a.xmax);
    if a.tiers.is_empty() {
        out.push_str("tiers? <absent> \n");
        return out;
    }
    out.push_str("tiers? <exists> \n");
    let _ = writeln!(out, "size = {} ", a.tiers.len());
    out.push_str("item []: \n");
    for (i, tier) in a.tiers.iter().enumerate() {
        let _ = writeln!(out, "    item [{}]:", i + 1);
        let class = match tier.kind {
            TierKind::Interval => "IntervalTier",
            TierKind::Point => "TextTier",
        };
        let _ = writeln!(out, "        class = {} ", quote(class));
        let _ = writeln!(out, "        name = {} ", quote(&tier.name));
        let _ = writeln!(out, "        xmin = {} ", a.xmin);
        let _ = writeln!(out, "        xmax = {} ", a.xmax);
        match tier.kind {
            TierKind::Interval => {
                let _ = writeln!(out, "        intervals: size = {} ", tier.items.len());
                for (j, it) in tier.items.iter().enumerate() {
                    let _ = writeln!(out, "        intervals [{}]:", j + 1);
                    let _ = writeln!(out, "            xmin = {} ", it.tmin);
                    let _ = writeln!(out, "            xmax = {} ", it.tmax);
                    let _ = writeln!(out, "            text = {} ", quote(&it.label));
                }
            }
            TierKind::Point => {
                let _ = writeln!(out, "        points: size = {} ", tier.items.len());
                for (j, it) in tier.items.iter().enumerate() {
                    let _ = writeln!(out, "        points [{}]:", j + 1);
                    let _ = writeln!(out, "            number = {} ", it.tmin);
                    let _ = writeln!(out, "            mark = {} ", quote(&it.label));
                }
            }
        }
    }
    out
}

// --- mining ---------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DurationEntry {
    pub label: String,
    /// Milliseconds.
    pub duration: f64,
}

/// Ordered interval durations in milliseconds.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct DurationSeries {
    pub entries: Vec<DurationEntry>,
}

impl DurationSeries {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn durations(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.duration).collect()
    }

    /// CSV with header `label,duration_ms`.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["label", "duration_ms"])
            .expect("writing to memory");
        for e in &self.entries {
            w.write_record([e.label.as_str(), &e.duration.to_string()])
                .expect("writing to memory");
        }
        String::from_utf8(w.into_inner().expect("flush to memory")).expect("utf-8 labels")
    }
}

/// Seconds to milliseconds, rounded to the nanosecond so that boundary
/// arithmetic noise (0.449 - 0.2) does not leak into reports.
fn to_ms(seconds: f64) -> f64 {
    (seconds * 1e9).round() / 1e6
}

/// Interval durations of `tier_name` in temporal order, skipping labels in
/// `exclude_labels` and zero-length intervals. Labels are compared after
/// trimming surrounding whitespace.
pub fn extract_durations(
    a: &Annotation,
    tier_name: &str,
    exclude_labels: &BTreeSet<String>,
) -> Result<DurationSeries, AnnotationError> {
    let tier = a
        .tier(tier_name)
        .ok_or_else(|| AnnotationError::UnknownTier(tier_name.to_owned()))?;
    if tier.kind != TierKind::Interval {
        return Err(AnnotationError::NotIntervalTier(tier_name.to_owned()));
    }
    let entries = tier
        .items
        .iter()
        .filter(|it| !exclude_labels.contains(it.label.trim()))
        .map(|it| DurationEntry {
            label: it.label.clone(),
            duration: to_ms(it.duration()),
        })
        .filter(|e| e.duration > 0.0)
        .collect();
    Ok(DurationSeries { entries })
}

/// Category used for labels without a mapping.
pub const OTHER_CATEGORY: &str = "other";

/// Groups durations by the category assigned to each label; unmapped labels
/// go to [`OTHER_CATEGORY`].
pub fn group_by_label(
    ds: &DurationSeries,
    category_of: &BTreeMap<String, String>,
) -> BTreeMap<String, Vec<f64>> {
    group_by(ds, |label| category_of.get(label).cloned())
}

/// Grouping by an arbitrary classifier; `None` means [`OTHER_CATEGORY`].
pub fn group_by<F>(ds: &DurationSeries, category_of: F) -> BTreeMap<String, Vec<f64>>
where
    F: Fn(&str) -> Option<String>,
{
    let mut groups: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for e in &ds.entries {
        let cat = category_of(&e.label).unwrap_or_else(|| OTHER_CATEGORY.to_owned());
        groups.entry(cat).or_default().push(e.duration);
    }
    groups
}

#[cfg(test)]
mod tests {
    use super::*;

    const LONG: &str = r#"File type = "ooTextFile"
Object class = "TextGrid"

xmin = 0
xmax = 0.732
tiers? <exists>
size = 1
item []:
    item [1]:
        class = "IntervalTier"
        name = "syll"
        xmin = 0
        xmax = 0.732
        intervals: size = 2
        intervals [1]:
            xmin = 0
            xmax = 0.2
            text = "how"
        intervals [2]:
            xmin = 0.2
            xmax = 0.732
            text = "are ""you"""
"#;

    #[test]
    fn parses_hand_built_long_format() {
        let a = parse_textgrid(LONG.as_bytes()).unwrap();
        assert_eq!(a.xmin, 0.0);
        assert_eq!(a.xmax, 0.732);
        assert_eq!(a.tiers.len(), 1);
        let t = &a.tiers[0];
        assert_eq!(t.name, "syll");
        assert_eq!(t.kind, TierKind::Interval);
        assert_eq!(
            t.items,
            vec![
                LabelledInterval::new(0.0, 0.2, "how"),
                LabelledInterval::new(0.2, 0.732, "are \"you\""),
            ]
        );
    }

    #[test]
    fn empty_tier() {
        let src = "File type = \"ooTextFile\"\nObject class = \"TextGrid\"\n0\n1\n<exists>\n1\n\"IntervalTier\"\n\"empty\"\n0\n1\n0\n";
        let a = parse_textgrid(src.as_bytes()).unwrap();
        assert_eq!(a.tiers.len(), 1);
        assert!(a.tiers[0].items.is_empty());
    }

    #[test]
    fn truncated_file_names_line() {
        let cut: String = LONG.lines().take(17).collect::<Vec<_>>().join("\n");
        let err = parse_textgrid(cut.as_bytes()).unwrap_err();
        match err {
            AnnotationError::MalformedTextGrid { line, message } => {
                assert_eq!(line, 17);
                assert!(message.contains("end of file"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn bad_number_reports_its_line() {
        let src = LONG.replace("xmax = 0.2\n", "xmax = 0.2x\n");
        let err = parse_textgrid(src.as_bytes()).unwrap_err();
        assert!(matches!(err, AnnotationError::MalformedTextGrid { line: 17, .. }), "{err:?}");
    }

    #[test]
    fn overlap_is_rejected() {
        let src = LONG.replace("xmin = 0.2\n", "xmin = 0.1\n");
        assert!(matches!(
            parse_textgrid(src.as_bytes()),
            Err(AnnotationError::OverlappingIntervals { index: 2, .. })
        ));
    }

    #[test]
    fn duplicate_tier_names_rejected() {
        let a = Annotation {
            xmin: 0.0,
            xmax: 1.0,
            tiers: vec![Tier::intervals("a", vec![]), Tier::intervals("a", vec![])],
        };
        let err = parse_textgrid(serialize_textgrid(&a).as_bytes()).unwrap_err();
        assert!(matches!(err, AnnotationError::MalformedTextGrid { .. }));
    }

    #[test]
    fn invalid_utf8_is_encoding_error() {
        let mut bytes = LONG.as_bytes().to_vec();
        bytes.push(0xFF);
        assert!(matches!(
            parse_textgrid(&bytes),
            Err(AnnotationError::EncodingError(_))
        ));
    }

    #[test]
    fn empty_annotation_serializes_header_only() {
        let a = Annotation {
            xmin: 0.0,
            xmax: 0.0,
            tiers: vec![],
        };
        let text = serialize_textgrid(&a);
        assert_eq!(
            text,
            "File type = \"ooTextFile\"\nObject class = \"TextGrid\"\n\nxmin = 0 \nxmax = 0 \ntiers? <absent> \n"
        );
        assert_eq!(parse_textgrid(text.as_bytes()).unwrap(), a);
    }

    fn how_are_you() -> Annotation {
        Annotation {
            xmin: 0.0,
            xmax: 1.0,
            tiers: vec![Tier::intervals(
                "syll",
                vec![
                    LabelledInterval::new(0.0, 0.2, "how"),
                    LabelledInterval::new(0.2, 0.449, "are"),
                    LabelledInterval::new(0.449, 0.732, "you"),
                    LabelledInterval::new(0.732, 1.0, ""),
                ],
            )],
        }
    }

    #[test]
    fn durations_in_ms() {
        let exclude: BTreeSet<String> = [String::new()].into();
        let ds = extract_durations(&how_are_you(), "syll", &exclude).unwrap();
        assert_eq!(ds.durations(), vec![200.0, 249.0, 283.0]);
        assert_eq!(ds.entries[1].label, "are");
    }

    #[test]
    fn silent_only_tier_is_empty() {
        let a = Annotation {
            xmin: 0.0,
            xmax: 1.0,
            tiers: vec![Tier::intervals("s", vec![LabelledInterval::new(0.0, 1.0, "")])],
        };
        let exclude: BTreeSet<String> = [String::new()].into();
        assert!(extract_durations(&a, "s", &exclude).unwrap().is_empty());
        let empty = Annotation {
            xmin: 0.0,
            xmax: 1.0,
            tiers: vec![Tier::intervals("s", vec![])],
        };
        assert!(extract_durations(&empty, "s", &BTreeSet::new())
            .unwrap()
            .is_empty());
    }

    #[test]
    fn zero_length_intervals_dropped() {
        let a = Annotation {
            xmin: 0.0,
            xmax: 1.0,
            tiers: vec![Tier::intervals(
                "s",
                vec![
                    LabelledInterval::new(0.0, 0.5, "a"),
                    LabelledInterval::new(0.5, 0.5, "b"),
                    LabelledInterval::new(0.5, 1.0, "c"),
                ],
            )],
        };
        let ds = extract_durations(&a, "s", &BTreeSet::new()).unwrap();
        assert_eq!(ds.durations(), vec![500.0, 500.0]);
    }

    #[test]
    fn mining_errors() {
        let mut a = how_are_you();
        assert_eq!(
            extract_durations(&a, "nope", &BTreeSet::new()),
            Err(AnnotationError::UnknownTier("nope".into()))
        );
        a.tiers.push(Tier::points("tones", vec![(0.1, "H".into())]));
        assert_eq!(
            extract_durations(&a, "tones", &BTreeSet::new()),
            Err(AnnotationError::NotIntervalTier("tones".into()))
        );
    }

    fn series(items: &[(&str, f64)]) -> DurationSeries {
        DurationSeries {
            entries: items
                .iter()
                .map(|(l, d)| DurationEntry {
                    label: l.to_string(),
                    duration: *d,
                })
                .collect(),
        }
    }

    #[test]
    fn grouping_by_identity() {
        let ds = series(&[("ma1", 100.0), ("ma1", 120.0), ("ma3", 200.0)]);
        let map: BTreeMap<String, String> = [("ma1", "ma1"), ("ma3", "ma3")]
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect();
        let g = group_by_label(&ds, &map);
        assert_eq!(g.len(), 2);
        assert_eq!(g["ma1"], vec![100.0, 120.0]);
        assert_eq!(g["ma3"], vec![200.0]);
        assert!(group_by_label(&DurationSeries::default(), &map).is_empty());
    }

    #[test]
    fn grouping_by_stress_class() {
        let ds = series(&[
            ("'ma", 210.0),
            ("ri", 90.0),
            (",lyn", 150.0),
            ("'ra", 230.0),
            ("x", 50.0),
        ]);
        let map: BTreeMap<String, String> = [
            ("'ma", "primary"),
            ("'ra", "primary"),
            (",lyn", "secondary"),
            ("ri", "unstressed"),
        ]
        .iter()
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .collect();
        let g = group_by_label(&ds, &map);
        assert_eq!(g["primary"], vec![210.0, 230.0]);
        assert_eq!(g["secondary"], vec![150.0]);
        assert_eq!(g["unstressed"], vec![90.0]);
        assert_eq!(g[OTHER_CATEGORY], vec![50.0]);
    }

    #[test]
    fn csv_export() {
        let ds = series(&[("a,b", 200.0), ("c", 249.5)]);
        assert_eq!(ds.to_csv(), "label,duration_ms\n\"a,b\",200\nc,249.5\n");
    }
}
