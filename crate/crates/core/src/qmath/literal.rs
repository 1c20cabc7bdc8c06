//! Text form of complex matrices: one row per line, entries `re+imj`
//! separated by whitespace, e.g.
//!
//! ```text
//! 0.5+0j 0+0.5j
//! 0-0.5j 0.5+0j
//! ```
//!
//! Both parts are parsed with the standard library's correctly rounded
//! decimal parser, so a literal names exactly one matrix of doubles.

use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use crate::{Error, Result};

/// Parses one `re+imj` / `re-imj` token.
pub fn parse_complex(token: &str) -> std::result::Result<Complex64, String> {
    let body = token
        .strip_suffix('j')
        .ok_or_else(|| format!("entry `{token}` does not end in `j`"))?;
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'))
        .ok_or_else(|| format!("entry `{token}` has no imaginary part"))?;
    let (re_txt, im_txt) = body.split_at(split);
    let im_txt = im_txt.strip_prefix('+').unwrap_or(im_txt);
    let part = |txt: &str| -> std::result::Result<f64, String> {
        match txt.parse::<f64>() {
            Ok(x) if x.is_finite() => Ok(x),
            _ => Err(format!("entry `{token}`: `{txt}` is not a finite decimal number")),
        }
    };
    Ok(Complex64::new(part(re_txt)?, part(im_txt)?))
}

/// Parses a matrix literal. Blank lines are skipped; line numbers in errors
/// are 1-based positions within `text`.
pub fn parse_matrix_literal(text: &str) -> Result<ComplexMatrix> {
    let mut rows: Vec<Vec<Complex64>> = Vec::new();
    let mut width = None;
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let row = line
            .split_whitespace()
            .map(parse_complex)
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|message| Error::Parse { line: line_no, message })?;
        match width {
            None => width = Some(row.len()),
            Some(w) if w != row.len() => {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("row has {} entries, expected {w}", row.len()),
                })
            }
            Some(_) => {}
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse {
            line: 1,
            message: "empty matrix literal".into(),
        });
    }
    ComplexMatrix::from_rows(&rows)
}

/// Inverse of [`parse_matrix_literal`]; round-trips every finite matrix
/// exactly.
pub fn format_matrix_literal(m: &ComplexMatrix) -> String {
    let mut out = String::new();
    for i in 0..m.rows() {
        let row: Vec<String> = (0..m.cols())
            .map(|j| {
                let z = m[(i, j)];
                let sign = if z.im.is_sign_negative() { '-' } else { '+' };
                format!("{}{}{}j", z.re, sign, z.im.abs())
            })
            .collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_entries() {
        assert_eq!(parse_complex("0.5+0.0j").unwrap(), Complex64::new(0.5, 0.0));
        assert_eq!(parse_complex("-1e-3-2.5E+2j").unwrap(), Complex64::new(-1e-3, -250.0));
        assert_eq!(parse_complex("+1-1j").unwrap(), Complex64::new(1.0, -1.0));
        assert!(parse_complex("0.5").is_err());
        assert!(parse_complex("0.5j").is_err());
        assert!(parse_complex("inf+0j").is_err());
        assert!(parse_complex("a+bj").is_err());
    }

    #[test]
    fn error_names_offending_line() {
        let text = "0.5+0j 0+0j\n0+0j 0.5+0x\n";
        match parse_matrix_literal(text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        match parse_matrix_literal("1+0j 0+0j\n\n1+0j\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    proptest! {
        #[test]
        fn literal_round_trip(
            rows in 1usize..4,
            cols in 1usize..4,
            seed in proptest::collection::vec(any::<f64>().prop_filter("finite", |x| x.is_finite()), 18)
        ) {
            let data: Vec<Complex64> = (0..rows * cols)
                .map(|k| Complex64::new(seed[2 * k], seed[2 * k + 1]))
                .collect();
            let m = ComplexMatrix::from_vec(rows, cols, data).unwrap();
            let back = parse_matrix_literal(&format_matrix_literal(&m)).unwrap();
            for (a, b) in m.as_slice().iter().zip(back.as_slice()) {
                prop_assert_eq!(a.re.to_bits(), b.re.to_bits());
                prop_assert_eq!(a.im.to_bits(), b.im.to_bits());
            }
        }
    }
}
