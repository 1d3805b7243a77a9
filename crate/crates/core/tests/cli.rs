mod common;

use std::path::{Path, PathBuf};
use std::process::Command;

use prosody::signal::write_wav;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_prosody"))
}

fn tg(name: &str) -> PathBuf {
    common::data_dir().join("textgrids").join(name)
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = bin().args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn english_textgrid(dir: &Path) -> PathBuf {
    let mut t = 0.0;
    let items = common::ENGLISH
        .iter()
        .map(|d| {
            let iv = prosody::annotation::LabelledInterval::new(t, t + d / 1000.0, "v");
            t += d / 1000.0;
            iv
        })
        .collect();
    let a = prosody::annotation::Annotation {
        xmin: 0.0,
        xmax: t,
        tiers: vec![prosody::annotation::Tier::intervals("vowels", items)],
    };
    let path = dir.join("english.TextGrid");
    std::fs::write(&path, prosody::annotation::serialize_textgrid(&a)).unwrap();
    path
}

#[test]
fn tonemap_cli() {
    let (code, out, _) = run(&["tonemap", "LHLLHLLHLLH"]);
    assert_eq!((code, out.as_str()), (0, "llhllhllhlh\n"));
    let (code, _, err) = run(&["tonemap", "LHX"]);
    assert_eq!(code, 2);
    assert!(err.contains("'X'"));
    let (code, out, _) = run(&["tonemap", "--tier", "tones", p(&tg("09_short_tone.TextGrid"))]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "syllable,lexical,phonetic");
    assert_eq!(lines[1], "ba,L,l");
    assert_eq!(lines.len(), 12);
    let phon: String = lines[1..].iter().map(|l| l.rsplit(',').next().unwrap()).collect();
    assert_eq!(phon, "llhllhllhlh");
}

#[test]
fn metrics_cli() {
    let dir = tempfile::tempdir().unwrap();
    let path = english_textgrid(dir.path());
    let (code, out, _) = run(&["metrics", "--tier", "vowels", p(&path)]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["sd"], 82);
    assert_eq!(v["npvi"], 60);
    assert_eq!(v["coeff_var"], 50);

    let (code, out, _) = run(&["metrics", "--tier", "vowels", "--format", "csv", p(&path)]);
    assert_eq!(code, 0);
    assert!(out.starts_with("n,"));
}

#[test]
fn metrics_on_single_interval_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("one.TextGrid");
    std::fs::copy(tg("10_long_offset_times.TextGrid"), &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap().replace("\"first\"", "\"\"");
    std::fs::write(&path, text).unwrap();
    let (code, out, err) = run(&["metrics", "--tier", "words", p(&path)]);
    assert_eq!(code, 2);
    assert!(out.is_empty());
    assert!(err.contains("insufficient data: n=1 < 2"), "{err}");
    assert_eq!(err.lines().count(), 1);
}

#[test]
fn usage_errors() {
    assert_eq!(run(&["nonsense"]).0, 1);
    assert_eq!(run(&["metrics", p(&tg("01_long_single.TextGrid"))]).0, 1, "no tier");
    assert_eq!(run(&["window-npvi", "--size", "x", "a"]).0, 1);
    let (code, out, _) = run(&["--version"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("prosody "));
    for sub in ["track", "stylize", "metrics", "window-npvi", "durations", "rate", "chroma", "tonemap", "plot", "validate"] {
        let (code, out, _) = run(&[sub, "--help"]);
        assert_eq!(code, 0, "{sub}");
        assert!(out.contains("Usage:"), "{sub}");
    }
}

#[test]
fn config_file_and_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let path = english_textgrid(dir.path());
    let cfg = dir.path().join("prosody.conf");
    std::fs::write(&cfg, "# test\ntier = vowels\nsd_denominator = population\n").unwrap();
    let (code, out, _) = run(&["--config", p(&cfg), "metrics", p(&path)]);
    assert_eq!(code, 0);
    let pop: serde_json::Value = serde_json::from_str(&out).unwrap();
    let (_, out, _) = run(&["--config", p(&cfg), "metrics", "--sd-denominator", "sample", p(&path)]);
    let sample: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!(pop["sd_exact"].as_f64().unwrap() < sample["sd_exact"].as_f64().unwrap());

    std::fs::write(&cfg, "tier = vowels\ncolour = red\n").unwrap();
    let (code, _, err) = run(&["--config", p(&cfg), "metrics", p(&path)]);
    assert_eq!(code, 1);
    assert!(err.contains("colour"));
}

#[test]
fn track_and_stylize_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let wav = dir.path().join("tone.wav");
    std::fs::write(&wav, write_wav(&common::sine(200.0, 16_000, 0.6, 0.5))).unwrap();
    let csv = dir.path().join("tone.csv");
    let (code, _, _) = run(&["track", "--out", p(&csv), p(&wav)]);
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("time_s,f0_hz\n"));

    let resid = dir.path().join("resid.csv");
    let (code, out, _) = run(&["stylize", "--global-degree", "2", "--residual", p(&resid), p(&csv)]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["global"]["degree"], 2);
    assert!((v["global"]["coeffs"][0].as_f64().unwrap() - 200.0).abs() < 2.0);
    assert!(std::fs::read_to_string(&resid).unwrap().starts_with("time_s,f0_hz\n"));

    // WAV straight into stylize, and a plot.
    assert_eq!(run(&["stylize", p(&wav)]).0, 0);
    let (code, svg, _) = run(&["plot", "track", "--wav", p(&wav), "--global-degree", "2", "--residual", p(&csv)]);
    assert_eq!(code, 0);
    roxmltree::Document::parse(&svg).unwrap();
}

#[test]
fn batch_mode() {
    let dir = tempfile::tempdir().unwrap();
    let good = english_textgrid(dir.path());
    let bad = dir.path().join("broken.TextGrid");
    std::fs::write(&bad, "File type = \"ooTextFile\"\nObject class = \"TextGrid\"\n\nxmin = 0\n").unwrap();

    let (code, out, err) = run(&["rate", "--tier", "vowels", p(&good), p(&bad)]);
    assert_eq!(code, 2);
    assert!(out.contains(&format!("==> {} <==", p(&good))));
    assert!(err.contains("broken.TextGrid"));
    assert!(err.contains("1 of 2 inputs failed"));

    let outdir = dir.path().join("out");
    let copy = dir.path().join("copy.TextGrid");
    std::fs::copy(&good, &copy).unwrap();
    let (code, _, _) = run(&["--out", p(&outdir), "window-npvi", "--tier", "vowels", "--format", "csv", p(&good), p(&copy)]);
    assert_eq!(code, 0);
    assert!(outdir.join("english.csv").exists());
    assert!(outdir.join("copy.csv").exists());
}

#[test]
fn durations_and_categories() {
    let dir = tempfile::tempdir().unwrap();
    let map = dir.path().join("map.csv");
    std::fs::write(&map, "label,category\nh,consonant\nl,consonant\nw,consonant\nd,consonant\n").unwrap();
    let (code, out, _) = run(&[
        "durations", "--tier", "phones", "--category-map", p(&map),
        p(&tg("02_long_multi.TextGrid")),
    ]);
    assert_eq!(code, 0, "{out}");
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "category,n,min,q1,median,q3,max,mean");
    assert!(lines[1].starts_with("consonant,5,"));
    assert!(lines[2].starts_with("other,3,"));

    let (code, svg, _) = run(&["plot", "boxes", "--tier", "phones", "--category-map", p(&map), p(&tg("02_long_multi.TextGrid"))]);
    assert_eq!(code, 0);
    roxmltree::Document::parse(&svg).unwrap();
}

#[test]
fn chroma_cli() {
    let (code, out, _) = run(&["chroma", "--means", "240,196"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!((v["ratio"].as_f64().unwrap() - 1.224).abs() < 0.001);
    assert_eq!(v["nearest_interval"], "minor_third");

    let dir = tempfile::tempdir().unwrap();
    let mut frames = vec![Some(212.0); 30];
    frames.extend([None; 5]);
    frames.extend(vec![Some(177.0); 30]);
    let csv = dir.path().join("call.csv");
    std::fs::write(&csv, prosody::signal::F0Track::new(0.0, 0.01, frames).to_csv()).unwrap();
    let (code, out, err) = run(&[
        "chroma", "--textgrid", p(&tg("11_short_chant.TextGrid")), "--tier", "levels", p(&csv),
    ]);
    assert_eq!(code, 0, "{err}");
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!((v["ratio"].as_f64().unwrap() - 1.198).abs() < 0.001);
    assert_eq!(run(&["chroma", "--span1", "0,0.29", p(&csv)]).0, 1);
}

#[test]
fn validate_cli() {
    let (code, out, _) = run(&["validate", p(&tg("02_long_multi.TextGrid"))]);
    assert_eq!(code, 0);
    assert!(out.contains("\"valid\": true"));

    let dir = tempfile::tempdir().unwrap();
    let wav = dir.path().join("low.wav");
    std::fs::write(&wav, write_wav(&common::sine(100.0, 700, 0.1, 0.5))).unwrap();
    let (code, _, err) = run(&["validate", p(&wav)]);
    assert_eq!(code, 2);
    assert!(err.contains("does not exceed twice f_max"), "{err}");
    assert_eq!(run(&["validate", "--f-max", "300", p(&wav)]).0, 0);

    let bad = dir.path().join("overlap.TextGrid");
    let text = std::fs::read_to_string(tg("01_long_single.TextGrid")).unwrap()
        .replacen("xmin = 0.35 ", "xmin = 0.3 ", 1);
    std::fs::write(&bad, text).unwrap();
    let (code, _, err) = run(&["validate", p(&bad)]);
    assert_eq!(code, 2);
    assert!(err.contains("overlap"), "{err}");
}

#[test]
fn missing_file_is_a_data_error() {
    let (code, _, err) = run(&["rate", "--tier", "x", "/nonexistent/file.TextGrid"]);
    assert_eq!(code, 2);
    assert!(err.starts_with("error: /nonexistent/file.TextGrid"));
}
