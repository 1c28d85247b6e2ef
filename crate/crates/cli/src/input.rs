use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;
use std::path::Path;

use anyhow::{bail, Context, Result};
use freecurrents::currents::{parse_dump, parse_json, CurrentJson, CurrentTable, TruncatedCurrent};
use freecurrents::fixtures::{TRIBONACCI_INVERSE_TOML, TRIBONACCI_TOML};
use freecurrents::laminations::LaminaryLanguage;
use freecurrents::{Automorphism, Rational, Word};
use serde::Deserialize;

pub fn read(path: &str) -> Result<String> {
    if path == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).context("reading standard input")?;
        return Ok(s);
    }
    std::fs::read_to_string(path).with_context(|| format!("reading {path}"))
}

fn is_json(text: &str) -> bool {
    text.trim_start().starts_with('{')
}

fn bundled(path: &str) -> Option<&'static str> {
    let stem = Path::new(path).file_stem()?.to_str()?;
    match stem.replace('-', "_").as_str() {
        "tribonacci" => Some(TRIBONACCI_TOML),
        "tribonacci_inverse" => Some(TRIBONACCI_INVERSE_TOML),
        _ => None,
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AutomorphismJson {
    rank: usize,
    images: BTreeMap<String, String>,
    #[serde(default)]
    inverse_images: Option<BTreeMap<String, String>>,
}

/// A TOML or JSON automorphism file. Missing files named after a bundled
/// automorphism (`tribonacci`, `tribonacci-inverse`) load the bundled copy.
/// Reduction warnings go to standard error.
pub fn automorphism(path: &str) -> Result<Automorphism> {
    let text = match bundled(path) {
        Some(text) if !Path::new(path).exists() => text.to_string(),
        _ => read(path)?,
    };
    let (alpha, warnings) = if is_json(&text) {
        let file: AutomorphismJson = serde_json::from_str(&text).with_context(|| format!("parsing {path}"))?;
        Automorphism::from_tables(file.rank, &file.images, file.inverse_images.as_ref())?
    } else {
        Automorphism::from_toml(&text).with_context(|| format!("parsing {path}"))?
    };
    for w in warnings {
        eprintln!("warning: {path}: {w}");
    }
    Ok(alpha)
}

pub fn current(path: &str) -> Result<(CurrentTable, Option<Rational>)> {
    let text = read(path)?;
    let parsed = if is_json(&text) {
        let json: CurrentJson = serde_json::from_str(&text).with_context(|| format!("parsing {path}"))?;
        parse_json(&json)
    } else {
        parse_dump(&text)
    };
    parsed.with_context(|| format!("parsing {path}"))
}

/// A current that must pass exact validation.
pub fn exact_current(path: &str) -> Result<TruncatedCurrent> {
    let (table, tolerance) = current(path)?;
    if tolerance.is_some() {
        bail!("{path} is an approximate current; an exact one is required");
    }
    TruncatedCurrent::new(table).with_context(|| format!("validating {path}"))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LanguageJson {
    rank: usize,
    depth: usize,
    words: Vec<String>,
}

pub fn language(path: &str) -> Result<LaminaryLanguage> {
    let text = read(path)?;
    let parsed = if is_json(&text) {
        let json: LanguageJson = serde_json::from_str(&text).with_context(|| format!("parsing {path}"))?;
        json.words
            .iter()
            .map(|w| Word::parse(w, json.rank))
            .collect::<freecurrents::Result<BTreeSet<Word>>>()
            .and_then(|words| LaminaryLanguage::new(json.rank, json.depth, words))
    } else {
        LaminaryLanguage::parse_dump(&text)
    };
    parsed.with_context(|| format!("parsing {path}"))
}

/// The explicit rank, else the largest generator mentioned (at least one).
pub fn rank_of(explicit: Option<usize>, words: &[&str]) -> usize {
    explicit.unwrap_or_else(|| {
        words
            .iter()
            .flat_map(|s| s.chars())
            .filter(char::is_ascii_alphabetic)
            .map(|c| (c.to_ascii_lowercase() as u8 - b'a') as usize + 1)
            .max()
            .unwrap_or(1)
    })
}
