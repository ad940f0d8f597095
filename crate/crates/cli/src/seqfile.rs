//! The two sequence file encodings: `index value` lines, and a JSON object
//! `{"entries": [[index, "p/q"], ...]}`.

use greedylab_core::{FinSeq, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SeqFileError {
    #[error("line {line}: {reason}")]
    Line { line: usize, reason: String },
    #[error("invalid JSON sequence: {0}")]
    Json(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Encoding {
    #[default]
    Lines,
    Json,
}

/// Reads either encoding; text whose first non-blank character is `{` is JSON.
pub fn parse(text: &str) -> Result<FinSeq, SeqFileError> {
    if text.trim_start().starts_with('{') {
        serde_json::from_str(text).map_err(|e| SeqFileError::Json(e.to_string()))
    } else {
        parse_lines(text)
    }
}

pub fn parse_lines(text: &str) -> Result<FinSeq, SeqFileError> {
    let mut pairs = Vec::new();
    let mut prev = 0usize;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let err = |reason: String| SeqFileError::Line { line, reason };
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut fields = content.split_whitespace();
        let (Some(index), Some(value), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(err(format!("expected `index value`, got {content:?}")));
        };
        let index: usize = index.parse().map_err(|_| err(format!("bad index {index:?}")))?;
        if index == 0 {
            return Err(err("indices start at 1".into()));
        }
        if index <= prev {
            return Err(err(format!("index {index} does not increase past {prev}")));
        }
        let value: Scalar = value.parse().map_err(|e| err(format!("{e}")))?;
        prev = index;
        pairs.push((index, value));
    }
    Ok(FinSeq::from_pairs(pairs).expect("validated above"))
}

/// Canonical text: lowest-terms values, zero entries omitted.
pub fn write(f: &FinSeq, encoding: Encoding) -> String {
    match encoding {
        Encoding::Lines => f.iter().map(|(n, v)| format!("{n} {v}\n")).collect(),
        Encoding::Json => serde_json::to_string(f).expect("sequences serialize") + "\n",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_encodings() {
        let f = FinSeq::from_pairs([(1, Scalar::ratio(3, 1)), (4, Scalar::ratio(-2, 6))]).unwrap();
        assert_eq!(write(&f, Encoding::Lines), "1 3\n4 -1/3\n");
        assert_eq!(write(&f, Encoding::Json), "{\"entries\":[[1,\"3\"],[4,\"-1/3\"]]}\n");
        for enc in [Encoding::Lines, Encoding::Json] {
            assert_eq!(parse(&write(&f, enc)).unwrap(), f);
        }
    }

    #[test]
    fn comments_blanks_and_reduction() {
        let f = parse("# header\n\n2 4/6  # trailing\n5 0\n7 -3\n").unwrap();
        assert_eq!(write(&f, Encoding::Lines), "2 2/3\n7 -3\n");
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(matches!(parse("2 1\n2 3\n"), Err(SeqFileError::Line { line: 2, .. })));
        assert!(matches!(parse("0 1\n"), Err(SeqFileError::Line { line: 1, .. })));
        assert!(matches!(parse("1 1/0\n"), Err(SeqFileError::Line { .. })));
        assert!(matches!(parse("1 0.5\n"), Err(SeqFileError::Line { .. })));
        assert!(matches!(parse("1\n"), Err(SeqFileError::Line { .. })));
        assert!(matches!(parse("{\"entries\": [[2, \"1\"], [1, \"1\"]]}"), Err(SeqFileError::Json(_))));
    }
}
