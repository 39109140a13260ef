//! Delimited numeric text input.
//!
//! Input is a single numeric column, one value per line, with an optional
//! non-numeric header on the first non-blank line. Blank lines and lines
//! starting with `#` are skipped. A trailing field delimiter (`,`, `;`, tab)
//! is tolerated.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evd::{BlockMaximaSample, ExcessSample};

/// How a column of numbers becomes a sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum IngestMode {
    /// Values are already the excesses z_i.
    Excesses,
    /// Values are already the block maxima y_i.
    Maxima,
    /// Raw observations; keep x − u for x > u.
    RawThreshold { threshold: f64 },
    /// Raw observations in time order; take per-block maxima.
    RawBlocks { block_size: usize },
}

impl IngestMode {
    pub fn name(&self) -> &'static str {
        match self {
            IngestMode::Excesses => "excesses",
            IngestMode::Maxima => "maxima",
            IngestMode::RawThreshold { .. } => "raw+threshold",
            IngestMode::RawBlocks { .. } => "raw+blocks",
        }
    }
}

impl fmt::Display for IngestMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The mode names accepted on the command line, without their parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeName {
    Excesses,
    Maxima,
    RawThreshold,
    RawBlocks,
}

impl FromStr for ModeName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "excesses" => Ok(ModeName::Excesses),
            "maxima" => Ok(ModeName::Maxima),
            "raw+threshold" | "raw-threshold" | "threshold" => Ok(ModeName::RawThreshold),
            "raw+blocks" | "raw-blocks" | "blocks" => Ok(ModeName::RawBlocks),
            other => Err(Error::Usage(format!("unknown ingest mode `{other}`"))),
        }
    }
}

impl ModeName {
    /// Attaches the threshold or block size a raw mode needs.
    pub fn with_params(self, threshold: Option<f64>, block_size: Option<usize>) -> Result<IngestMode> {
        match self {
            ModeName::Excesses => Ok(IngestMode::Excesses),
            ModeName::Maxima => Ok(IngestMode::Maxima),
            ModeName::RawThreshold => threshold
                .map(|threshold| IngestMode::RawThreshold { threshold })
                .ok_or_else(|| Error::Usage("raw+threshold mode needs a threshold".into())),
            ModeName::RawBlocks => block_size
                .map(|block_size| IngestMode::RawBlocks { block_size })
                .ok_or_else(|| Error::Usage("raw+blocks mode needs a block size".into())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Sample {
    Excesses(ExcessSample),
    Maxima(BlockMaximaSample),
}

impl Sample {
    pub fn values(&self) -> &[f64] {
        match self {
            Sample::Excesses(s) => s.values(),
            Sample::Maxima(s) => s.values(),
        }
    }

    pub fn len(&self) -> usize {
        self.values().len()
    }

    pub fn is_empty(&self) -> bool {
        self.values().is_empty()
    }
}

/// Parses one numeric column. Returns the values in file order.
pub fn parse_column(text: &str) -> Result<Vec<f64>> {
    let mut values = Vec::new();
    let mut seen_content = false;
    for (idx, raw_line) in text.lines().enumerate() {
        let line = raw_line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let field = line.trim_end_matches([',', ';', '\t']).trim();
        let first_content = !seen_content;
        seen_content = true;
        if field.split([',', ';', '\t', ' ']).filter(|f| !f.is_empty()).count() > 1 {
            return Err(Error::Data(format!("line {}: expected a single column, got `{line}`", idx + 1)));
        }
        let field = field.trim_matches('"');
        match field.parse::<f64>() {
            Ok(v) if v.is_finite() => values.push(v),
            Ok(v) => return Err(Error::Data(format!("line {}: non-finite value {v}", idx + 1))),
            Err(_) if first_content => {}
            Err(_) => return Err(Error::Data(format!("line {}: `{field}` is not a number", idx + 1))),
        }
    }
    if values.is_empty() {
        return Err(Error::Data("no numeric values found".into()));
    }
    Ok(values)
}

/// Turns a column of values into a sample according to `mode`.
pub fn build_sample(values: &[f64], mode: IngestMode) -> Result<Sample> {
    match mode {
        IngestMode::Excesses => Ok(Sample::Excesses(ExcessSample::new(0.0, values.to_vec())?)),
        IngestMode::Maxima => Ok(Sample::Maxima(BlockMaximaSample::new(values.to_vec())?)),
        IngestMode::RawThreshold { threshold } => {
            let s = ExcessSample::from_raw(values, threshold).map_err(|e| match e {
                Error::Tie { value } => Error::Tie { value: value + threshold },
                Error::Data(msg) if !values.iter().any(|&x| x > threshold) => {
                    Error::Data(format!("no values exceed the threshold {threshold}: {msg}"))
                }
                other => other,
            })?;
            Ok(Sample::Excesses(s))
        }
        IngestMode::RawBlocks { block_size } => {
            if values.len() < block_size {
                return Err(Error::Data(format!(
                    "{} values do not fill one block of size {block_size}",
                    values.len()
                )));
            }
            Ok(Sample::Maxima(BlockMaximaSample::from_blocks(values, block_size)?))
        }
    }
}

/// [`parse_column`] followed by [`build_sample`].
pub fn ingest(text: &str, mode: IngestMode) -> Result<Sample> {
    build_sample(&parse_column(text)?, mode)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn raw_threshold_extracts_excesses() {
        let s = ingest("0.5\n1.2\n3.0\n", IngestMode::RawThreshold { threshold: 1.0 }).unwrap();
        let v = s.values();
        assert_eq!(v.len(), 2);
        assert!((v[0] - 0.2).abs() < 1e-15 && (v[1] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn raw_blocks_take_maxima() {
        let text: String = (1..=10).map(|i| format!("{}\n", (i * 7 % 11) as f64)).collect();
        let s = ingest(&text, IngestMode::RawBlocks { block_size: 5 }).unwrap();
        assert_eq!(s.values(), &[9.0, 10.0]);
        let s = ingest(&(text + "100\n"), IngestMode::RawBlocks { block_size: 5 }).unwrap();
        assert_eq!(s.len(), 2);
    }

    #[test]
    fn ties_are_rejected() {
        let e = ingest("value\n2.0\n2.0\n3.5\n", IngestMode::Excesses).unwrap_err();
        assert_eq!(e, Error::Tie { value: 2.0 });
        assert!(e.to_string().contains('2'));
    }

    #[test]
    fn header_comments_and_delimiters() {
        let v = parse_column("# data\nlevel,\n1.5,\n\n2.5;\n\"3\"\n").unwrap();
        assert_eq!(v, vec![1.5, 2.5, 3.0]);
        assert!(parse_column("1\nfoo\n").is_err());
        assert!(parse_column("1,2\n").is_err());
        assert!(parse_column("header only\n").is_err());
        assert!(parse_column("").is_err());
        assert!(parse_column("inf\n").is_err());
    }

    #[test]
    fn empty_results_are_errors() {
        assert!(ingest("0.1\n0.2\n", IngestMode::RawThreshold { threshold: 5.0 }).is_err());
        assert!(ingest("1\n2\n", IngestMode::RawBlocks { block_size: 5 }).is_err());
        assert!(ingest("-1\n2\n", IngestMode::Excesses).is_err());
    }

    #[test]
    fn mode_names() {
        assert_eq!("raw+threshold".parse::<ModeName>().unwrap(), ModeName::RawThreshold);
        assert!(ModeName::RawBlocks.with_params(None, None).is_err());
        assert_eq!(
            ModeName::RawBlocks.with_params(None, Some(3)).unwrap(),
            IngestMode::RawBlocks { block_size: 3 }
        );
    }
}
