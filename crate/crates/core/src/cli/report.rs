//! Rendering helpers shared by the commands. Every number goes out in exact
//! form (when the mode has one) next to a 12-significant-digit decimal.

use serde_json::{json, Value};

use crate::rational::format_decimal;
use crate::scalar::{Mode, Scalar};

/// Output of one command: a human table and the same content as JSON.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub text: String,
    pub json: Value,
}

/// `127/15 (8.46666666667)`, or just the decimal in float mode.
pub fn show<S: Scalar>(value: &S) -> String {
    let decimal = format_decimal(value.to_f64());
    match value.exact_string() {
        Some(exact) if exact == decimal => exact,
        Some(exact) => format!("{exact} ({decimal})"),
        None => decimal,
    }
}

/// The shortest faithful rendering, for table cells.
pub fn cell<S: Scalar>(value: &S) -> String {
    value.exact_string().unwrap_or_else(|| format_decimal(value.to_f64()))
}

pub fn number<S: Scalar>(value: &S) -> Value {
    match value.exact_string() {
        Some(exact) => json!({"exact": exact, "decimal": value.to_f64()}),
        None => json!({"decimal": value.to_f64()}),
    }
}

pub fn mode_name<S: Scalar>() -> &'static str {
    match S::MODE {
        Mode::Exact => "exact",
        Mode::Float => "float",
    }
}

/// Left-aligned columns separated by two spaces.
pub fn table(header: &[String], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, c) in widths.iter_mut().zip(row) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |cells: &[String]| {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, &w)| format!("{c:<w$}"))
            .collect();
        padded.join("  ").trim_end().to_string()
    };
    let mut out = line(header);
    out.push('\n');
    for row in rows {
        out.push_str(&line(row));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    #[test]
    fn exact_and_decimal_forms() {
        assert_eq!(show(&ratio(127, 15)), "127/15 (8.46666666667)");
        assert_eq!(show(&int(6)), "6");
        assert_eq!(show(&0.25f64), "0.25");
        assert_eq!(number(&ratio(1, 4)), json!({"exact": "1/4", "decimal": 0.25}));
        assert_eq!(cell(&ratio(1, 6)), "1/6");
    }

    #[test]
    fn aligned_table() {
        let t = table(
            &["n".into(), "value".into()],
            &[vec!["1".into(), "0".into()], vec!["10".into(), "1/6".into()]],
        );
        assert_eq!(t, "n   value\n1   0\n10  1/6\n");
    }
}
