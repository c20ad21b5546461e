//! Vote data from files, inline lists and share presets.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;

use apportion::harness::sqrt_shares;
use apportion::{PartyWeights, Real};
use num_rational::BigRational;
use serde::Serialize;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum InputFormat {
    Csv,
    Json,
}

/// Exact vote counts, or floating-point shares for the irrational presets.
#[derive(Debug, Clone)]
pub enum Weights {
    Exact(PartyWeights<BigRational>),
    Float(PartyWeights<f64>),
}

impl Weights {
    pub fn len(&self) -> usize {
        match self {
            Weights::Exact(w) => w.len(),
            Weights::Float(w) => w.len(),
        }
    }

    pub fn names(&self) -> Vec<String> {
        match self {
            Weights::Exact(w) => (0..w.len()).map(|i| w.name(i)).collect(),
            Weights::Float(w) => (0..w.len()).map(|i| w.name(i)).collect(),
        }
    }

    pub fn shares_f64(&self) -> Vec<f64> {
        match self {
            Weights::Exact(w) => w.shares().iter().map(Real::to_f64).collect(),
            Weights::Float(w) => w.shares().to_vec(),
        }
    }

    pub fn to_f64(&self) -> PartyWeights<f64> {
        match self {
            Weights::Exact(w) => w.to_f64(),
            Weights::Float(w) => w.clone(),
        }
    }

    pub fn index_of(&self, key: &str) -> Result<usize, CliError> {
        let names = self.names();
        if let Some(i) = names.iter().position(|n| n == key) {
            return Ok(i);
        }
        match key.parse::<usize>() {
            Ok(k) if k >= 1 && k <= names.len() => Ok(k - 1),
            _ => Err(CliError::Input(format!("no party `{key}`"))),
        }
    }
}

fn named(votes: Vec<(String, u64)>) -> Result<Weights, CliError> {
    if votes.is_empty() {
        return Err(CliError::Input("no parties given".into()));
    }
    if let Some((name, _)) = votes.iter().find(|(_, v)| *v == 0) {
        return Err(CliError::Input(format!("party `{name}` has zero votes")));
    }
    let (names, counts): (Vec<String>, Vec<u64>) = votes.into_iter().unzip();
    Ok(Weights::Exact(PartyWeights::from_counts(&counts)?.with_names(names)?))
}

fn count(text: &str, party: &str) -> Result<u64, CliError> {
    let text = text.trim();
    if text.starts_with('-') {
        return Err(CliError::Input(format!("party `{party}` has negative votes")));
    }
    text.parse().map_err(|_| CliError::Input(format!("party `{party}`: `{text}` is not an integer vote count")))
}

/// `A=2,B=1` or plain `2,1` (parties named P1, P2, ...).
pub fn parse_votes(text: &str) -> Result<Weights, CliError> {
    let mut out = Vec::new();
    for (k, item) in text.split(',').map(str::trim).filter(|s| !s.is_empty()).enumerate() {
        let (name, value) = match item.split_once('=') {
            Some((n, v)) => (n.trim().to_string(), v),
            None => (format!("P{}", k + 1), item),
        };
        let votes = count(value, &name)?;
        out.push((name, votes));
    }
    named(out)
}

/// `sqrt`, `sqrt:<m>` or an explicit list of positive shares.
pub fn parse_shares(text: &str) -> Result<Weights, CliError> {
    let text = text.trim();
    let shares = if text == "sqrt" {
        sqrt_shares(4)
    } else if let Some(m) = text.strip_prefix("sqrt:") {
        let m: usize = m.parse().map_err(|_| CliError::Input(format!("bad preset `{text}`")))?;
        if m < 2 {
            return Err(CliError::Input("the sqrt preset needs at least two parties".into()));
        }
        sqrt_shares(m)
    } else {
        text.split(',')
            .map(|s| s.trim().parse::<f64>().map_err(|_| CliError::Input(format!("bad share `{s}`"))))
            .collect::<Result<Vec<_>, _>>()?
    };
    let names = (1..=shares.len()).map(|k| format!("P{k}")).collect();
    Ok(Weights::Float(PartyWeights::from_shares(&shares)?.with_names(names)?))
}

pub fn parse_csv(text: &str) -> Result<Weights, CliError> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| CliError::Input(format!("csv: {e}")))?.clone();
    let (party_col, votes_col) = match (headers.iter().position(|h| h == "party"), headers.iter().position(|h| h == "votes")) {
        (Some(p), Some(v)) => (p, v),
        _ => return Err(CliError::Input("csv needs a `party,votes` header".into())),
    };
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| CliError::Input(format!("csv: {e}")))?;
        let name = record.get(party_col).unwrap_or_default().to_string();
        let votes = count(record.get(votes_col).unwrap_or_default(), &name)?;
        out.push((name, votes));
    }
    named(out)
}

/// Object from party name to votes; parties come out in name order.
pub fn parse_json(text: &str) -> Result<Weights, CliError> {
    let map: BTreeMap<String, serde_json::Value> =
        serde_json::from_str(text).map_err(|e| CliError::Input(format!("json: {e}")))?;
    let mut out = Vec::with_capacity(map.len());
    for (name, value) in map {
        let votes = match &value {
            serde_json::Value::Number(n) if n.is_u64() => n.as_u64().unwrap(),
            serde_json::Value::Number(n) if n.is_i64() => {
                return Err(CliError::Input(format!("party `{name}` has negative votes")))
            }
            _ => return Err(CliError::Input(format!("party `{name}`: `{value}` is not an integer vote count"))),
        };
        out.push((name, votes));
    }
    named(out)
}

fn guess_format(path: &Path) -> InputFormat {
    match path.extension().and_then(|e| e.to_str()) {
        Some("json") => InputFormat::Json,
        _ => InputFormat::Csv,
    }
}

/// Reads `path` (`-` for stdin).
pub fn parse_input(path: &Path, format: Option<InputFormat>) -> Result<Weights, CliError> {
    let mut text = String::new();
    if path.as_os_str() == "-" {
        std::io::stdin().read_to_string(&mut text)?;
    } else {
        text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    }
    match format.unwrap_or_else(|| guess_format(path)) {
        InputFormat::Csv => parse_csv(&text),
        InputFormat::Json => parse_json(&text),
    }
}
