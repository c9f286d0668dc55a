//! Delimited-text input: column selection, numeric parsing and conversion to
//! categorical or continuous series.

use std::path::Path;

use anyhow::{bail, Context, Result};
use transfer_entropy::{CategoricalSeries, ContinuousSeries};

pub struct Table {
    names: Option<Vec<String>>,
    records: Vec<csv::StringRecord>,
}

/// One parsed column, with the file line of every value for diagnostics.
#[derive(Debug, Clone)]
pub struct Column {
    pub label: String,
    pub values: Vec<f64>,
    pub lines: Vec<u64>,
}

impl Table {
    pub fn read(path: &Path, delimiter: char, header: bool) -> Result<Self> {
        if !delimiter.is_ascii() {
            bail!("delimiter {delimiter:?} is not a single-byte character");
        }
        let mut reader = csv::ReaderBuilder::new()
            .delimiter(delimiter as u8)
            .has_headers(header)
            .trim(csv::Trim::All)
            .from_path(path)
            .with_context(|| format!("cannot open {}", path.display()))?;
        let names = if header {
            Some(reader.headers()?.iter().map(str::to_owned).collect())
        } else {
            None
        };
        let records = reader
            .records()
            .collect::<std::result::Result<Vec<_>, _>>()
            .with_context(|| format!("malformed input {}", path.display()))?;
        Ok(Self { names, records })
    }

    pub fn width(&self) -> usize {
        match (&self.names, self.records.first()) {
            (Some(names), _) => names.len(),
            (None, Some(r)) => r.len(),
            (None, None) => 0,
        }
    }

    /// Resolves a comma-separated list of header names or 0-based indices.
    pub fn resolve(&self, spec: &str) -> Result<Vec<usize>> {
        spec.split(',')
            .map(|part| {
                let part = part.trim();
                if let Some(i) = self
                    .names
                    .as_ref()
                    .and_then(|n| n.iter().position(|name| name == part))
                {
                    return Ok(i);
                }
                match part.parse::<usize>() {
                    Ok(i) if i < self.width() => Ok(i),
                    _ => bail!(
                        "missing column {part:?} ({} columns in input)",
                        self.width()
                    ),
                }
            })
            .collect()
    }

    pub fn column(&self, index: usize) -> Result<Column> {
        let label = match &self.names {
            Some(n) => n[index].clone(),
            None => index.to_string(),
        };
        let mut values = Vec::with_capacity(self.records.len());
        let mut lines = Vec::with_capacity(self.records.len());
        for (i, record) in self.records.iter().enumerate() {
            let line = record.position().map_or(i as u64 + 1, |p| p.line());
            let cell = record.get(index).unwrap_or("");
            match cell.parse::<f64>() {
                Ok(v) if v.is_finite() => values.push(v),
                _ => bail!("row {line}, column {label}: cannot parse {cell:?} as a finite number"),
            }
            lines.push(line);
        }
        Ok(Column {
            label,
            values,
            lines,
        })
    }

    pub fn columns(&self, spec: &str) -> Result<Vec<Column>> {
        self.resolve(spec)?
            .into_iter()
            .map(|i| self.column(i))
            .collect()
    }
}

impl Column {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_symbolic(&self) -> bool {
        self.values.iter().all(|v| *v >= 0.0 && v.fract() == 0.0)
    }

    /// Validates integer symbols against `alphabet` (inferred as max + 1 when absent).
    pub fn to_symbols(&self, alphabet: Option<usize>) -> Result<CategoricalSeries> {
        let mut symbols = Vec::with_capacity(self.len());
        for (v, line) in self.values.iter().zip(&self.lines) {
            if *v < 0.0 || v.fract() != 0.0 || *v >= u32::MAX as f64 {
                bail!(
                    "row {line}, column {}: {v} is not a symbol (nonnegative integer); use --bins or --model var",
                    self.label
                );
            }
            let s = *v as usize;
            if let Some(a) = alphabet {
                if s >= a {
                    bail!(
                        "row {line}, column {}: symbol {s} outside declared alphabet of size {a}",
                        self.label
                    );
                }
            }
            symbols.push(s);
        }
        let alphabet =
            alphabet.unwrap_or_else(|| symbols.iter().max().map_or(2, |m| (m + 1).max(2)));
        CategoricalSeries::new(symbols, alphabet).with_context(|| format!("column {}", self.label))
    }

    /// Equal-width bins over the observed range; a constant column maps to bin 0.
    pub fn quantize(&self, bins: usize) -> Result<CategoricalSeries> {
        if bins < 2 {
            bail!("--bins must be at least 2, got {bins}");
        }
        let (lo, hi) = self
            .values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            });
        let width = (hi - lo) / bins as f64;
        let symbols = self
            .values
            .iter()
            .map(|&v| {
                if width > 0.0 {
                    (((v - lo) / width) as usize).min(bins - 1)
                } else {
                    0
                }
            })
            .collect();
        CategoricalSeries::new(symbols, bins).with_context(|| format!("column {}", self.label))
    }
}

/// Stacks columns into a vector-valued series, one row per observation.
pub fn to_continuous(columns: &[Column], demean: bool) -> Result<ContinuousSeries> {
    let n = columns.first().map_or(0, Column::len);
    let mut flat = Vec::with_capacity(n * columns.len());
    for t in 0..n {
        flat.extend(columns.iter().map(|c| c.values[t]));
    }
    let series = ContinuousSeries::from_flat(flat, columns.len())?;
    Ok(if demean { series.demeaned() } else { series })
}
