//! Number formatting and table writing.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use crate::config::Format;

/// Shortest representation that round-trips the value rounded to 9
/// significant digits.
pub fn fmt9(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let rounded: f64 = format!("{x:.8e}").parse().expect("formatted float parses");
    let a = rounded.abs();
    if (1e-4..1e9).contains(&a) {
        format!("{rounded}")
    } else {
        format!("{rounded:e}")
    }
}

pub fn join_row(cells: &[String], format: Format) -> String {
    let sep = format.separator().to_string();
    cells.join(&sep)
}

/// Writes `text` to `path`, or to stdout when there is none.
pub fn emit(text: &str, path: Option<&Path>) -> io::Result<()> {
    match path {
        Some(p) => fs::write(p, text),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(fmt9(0.1), "0.1");
        assert_eq!(fmt9(13.191_227_444_152_4), "13.1912274");
        assert_eq!(fmt9(0.087_013_199_448_583_3), "0.0870131994");
        assert_eq!(fmt9(1e-10), "1e-10");
        assert_eq!(fmt9(-2.5e12), "-2.5e12");
        assert_eq!(fmt9(4.0), "4");
        assert_eq!(fmt9(f64::NAN), "nan");
    }

    #[test]
    fn separators() {
        let cells = vec!["a".to_string(), "b".to_string()];
        assert_eq!(join_row(&cells, Format::Csv), "a,b");
        assert_eq!(join_row(&cells, Format::Tsv), "a\tb");
    }
}
