//! Text and JSON forms of current tables.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::CurrentTable;
use crate::error::{Error, Result};
use crate::free_group::Word;
use crate::rational::{self, Rational};

/// `rank=N`, `depth=L`, optional `tolerance=p/q`, then `word<TAB>p/q` lines
/// in shortlex order.
pub fn to_dump(table: &CurrentTable, tolerance: Option<&Rational>) -> String {
    let mut out = format!("rank={}\ndepth={}\n", table.rank(), table.depth());
    if let Some(t) = tolerance {
        out.push_str(&format!("tolerance={}\n", rational::format(t)));
    }
    for (w, v) in table.values() {
        out.push_str(&format!("{w}\t{}\n", rational::format(v)));
    }
    out
}

fn header<'a>(line: Option<&'a str>, key: &str) -> Result<&'a str> {
    line.and_then(|l| l.trim().strip_prefix(key)).and_then(|l| l.strip_prefix('=')).ok_or_else(|| Error::Format(format!("expected `{key}=` header")))
}

fn parse_usize(s: &str, what: &str) -> Result<usize> {
    s.trim().parse().map_err(|_| Error::Format(format!("bad {what}: {s:?}")))
}

pub fn parse_dump(text: &str) -> Result<(CurrentTable, Option<Rational>)> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#')).peekable();
    let rank = parse_usize(header(lines.next(), "rank")?, "rank")?;
    let depth = parse_usize(header(lines.next(), "depth")?, "depth")?;
    let mut tolerance = None;
    if let Some(t) = lines.peek().and_then(|l| l.trim().strip_prefix("tolerance=")) {
        tolerance = Some(rational::parse(t)?);
        lines.next();
    }
    let mut values = BTreeMap::new();
    for line in lines {
        let (w, v) = line
            .split_once('\t')
            .or_else(|| line.trim().split_once(char::is_whitespace))
            .ok_or_else(|| Error::Format(format!("expected `word<TAB>value`: {line:?}")))?;
        let word = Word::parse(w, rank)?;
        if values.insert(word.clone(), rational::parse(v)?).is_some() {
            return Err(Error::Format(format!("duplicate word {word}")));
        }
    }
    Ok((CurrentTable::new(rank, depth, values)?, tolerance))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurrentJson {
    pub rank: usize,
    pub depth: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<String>,
    pub values: Vec<(String, String)>,
}

pub fn to_json(table: &CurrentTable, tolerance: Option<&Rational>) -> CurrentJson {
    CurrentJson {
        rank: table.rank(),
        depth: table.depth(),
        tolerance: tolerance.map(rational::format),
        values: table.values().iter().map(|(w, v)| (w.to_string(), rational::format(v))).collect(),
    }
}

pub fn parse_json(json: &CurrentJson) -> Result<(CurrentTable, Option<Rational>)> {
    let mut values = BTreeMap::new();
    for (w, v) in &json.values {
        values.insert(Word::parse(w, json.rank)?, rational::parse(v)?);
    }
    let tolerance = json.tolerance.as_deref().map(rational::parse).transpose()?;
    Ok((CurrentTable::new(json.rank, json.depth, values)?, tolerance))
}
