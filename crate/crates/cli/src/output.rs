use clap::ValueEnum;
use freecurrents::currents::{to_dump, to_json, CurrentTable};
use freecurrents::laminations::LaminaryLanguage;
use freecurrents::Rational;
use serde_json::{json, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Tsv,
    Json,
}

/// Both renderings of a result; `ok = false` exits with status 1 after
/// printing.
pub struct Output {
    pub tsv: String,
    pub json: Value,
    pub ok: bool,
}

impl Output {
    pub fn new(tsv: String, json: Value) -> Output {
        Output { tsv, json, ok: true }
    }

    pub fn failing_if(mut self, failed: bool) -> Output {
        self.ok = !failed;
        self
    }

    pub fn render(&self, format: Format) -> String {
        let mut s = match format {
            Format::Tsv => self.tsv.clone(),
            Format::Json => serde_json::to_string_pretty(&self.json).expect("json values serialize"),
        };
        if !s.ends_with('\n') {
            s.push('\n');
        }
        s
    }
}

pub fn current(table: &CurrentTable, tolerance: Option<&Rational>) -> Output {
    Output::new(to_dump(table, tolerance), serde_json::to_value(to_json(table, tolerance)).expect("serializable"))
}

pub fn language(lang: &LaminaryLanguage) -> Output {
    let words: Vec<String> = lang.words().iter().map(ToString::to_string).collect();
    Output::new(lang.to_dump(), json!({ "rank": lang.rank(), "depth": lang.depth(), "words": words }))
}

/// `key<TAB>value` lines and the matching flat object.
pub fn pairs(rows: &[(&str, String)]) -> Output {
    let tsv = rows.iter().map(|(k, v)| format!("{k}\t{v}\n")).collect();
    let json = Value::Object(rows.iter().map(|(k, v)| (k.to_string(), Value::String(v.clone()))).collect());
    Output::new(tsv, json)
}
