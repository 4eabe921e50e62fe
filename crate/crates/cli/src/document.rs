//! Chain documents: JSON `{"states"?, "matrix", "initial"?}` or a bare CSV grid.

use std::path::Path;

use chaindist::{MarkovChain, ProbabilityVector, SquareMatrix, StochasticMatrix};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    /// `.csv` files are grids, `.json` files are documents; anything else is
    /// sniffed from its first non-blank character.
    pub fn detect(path: &Path, text: &str) -> Format {
        match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase) {
            Some(ext) if ext == "csv" => Format::Csv,
            Some(ext) if ext == "json" => Format::Json,
            _ if text.trim_start().starts_with('{') => Format::Json,
            _ => Format::Csv,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub states: Option<Vec<String>>,
    pub matrix: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<Vec<f64>>,
}

/// A validated document. The raw document is kept so that re-serializing
/// reproduces the input values exactly.
#[derive(Debug, Clone)]
pub struct ParsedChain {
    pub document: ChainDocument,
    pub matrix: StochasticMatrix,
    pub initial: Option<ProbabilityVector>,
}

impl ParsedChain {
    pub fn chain(&self, source_name: &str) -> Result<MarkovChain> {
        let initial = self.initial.clone().ok_or_else(|| CliError::Validation {
            source_name: source_name.into(),
            message: "an initial distribution is required for this command".into(),
        })?;
        MarkovChain::new(initial, self.matrix.clone()).map_err(|e| validation(source_name, e))
    }
}

fn validation(source_name: &str, e: impl std::fmt::Display) -> CliError {
    CliError::Validation {
        source_name: source_name.into(),
        message: e.to_string(),
    }
}

fn parse_json(text: &str, source_name: &str) -> Result<ChainDocument> {
    serde_json::from_str(text).map_err(|e| CliError::Parse {
        source_name: source_name.into(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

fn parse_csv(text: &str, source_name: &str) -> Result<ChainDocument> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut matrix = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            CliError::Parse {
                source_name: source_name.into(),
                line,
                column: 0,
                message: e.to_string(),
            }
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.iter().all(str::is_empty) {
            continue;
        }
        let row = record
            .iter()
            .enumerate()
            .map(|(field, s)| {
                s.parse::<f64>().map_err(|_| CliError::Parse {
                    source_name: source_name.into(),
                    line,
                    column: field + 1,
                    message: format!("field {} is not a number: '{s}'", field + 1),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        matrix.push(row);
    }
    Ok(ChainDocument {
        states: None,
        matrix,
        initial: None,
    })
}

/// Validates a document against the stochastic-matrix and simplex rules.
pub fn validate_document(document: ChainDocument, source_name: &str) -> Result<ParsedChain> {
    if document.matrix.iter().flatten().any(|v| !v.is_finite()) {
        return Err(validation(source_name, "matrix entries must be finite"));
    }
    let mut matrix =
        StochasticMatrix::from_rows(document.matrix.clone()).map_err(|e| validation(source_name, e))?;
    if let Some(states) = &document.states {
        matrix = matrix
            .with_labels(states.clone())
            .map_err(|e| validation(source_name, e))?;
    }
    let initial = document
        .initial
        .as_ref()
        .map(|v| {
            if v.len() != matrix.dim() {
                return Err(validation(
                    source_name,
                    format!("initial has {} entries for {} states", v.len(), matrix.dim()),
                ));
            }
            ProbabilityVector::new(v.clone()).map_err(|e| validation(source_name, format!("initial: {e}")))
        })
        .transpose()?;
    Ok(ParsedChain {
        document,
        matrix,
        initial,
    })
}

pub fn parse_chain_document(text: &str, format: Format, source_name: &str) -> Result<ParsedChain> {
    let document = match format {
        Format::Json => parse_json(text, source_name)?,
        Format::Csv => parse_csv(text, source_name)?,
    };
    validate_document(document, source_name)
}

pub fn read_chain(path: &Path) -> Result<ParsedChain> {
    let name = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{name}: {e}")))?;
    parse_chain_document(&text, Format::detect(path, &text), &name)
}

pub fn to_json(document: &ChainDocument) -> String {
    serde_json::to_string_pretty(document).expect("documents always serialize")
}

pub fn to_csv(document: &ChainDocument) -> String {
    let mut out = String::new();
    for row in &document.matrix {
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}
