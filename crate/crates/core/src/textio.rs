//! Plain-text matrix format.
//!
//! ```text
//! rows cols
//! re im re im ...
//! ```
//!
//! Entries are row-major `re im` pairs separated by arbitrary whitespace.
//! Writing uses the shortest decimal representation that parses back to the
//! same `f64`, so a write/read cycle is bit-exact.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, C64};

pub fn to_text(m: &ComplexMatrix) -> String {
    let mut out = format!("{} {}\n", m.rows(), m.cols());
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(|z| format!("{:e} {:e}", z.re, z.im)).collect();
        let _ = writeln!(out, "{}", row.join("  "));
    }
    out
}

pub fn from_text(text: &str) -> Result<ComplexMatrix> {
    let mut tokens = text.split_whitespace();
    let mut dim = |what: &str| -> Result<usize> {
        tokens
            .next()
            .ok_or_else(|| Error::Parse(format!("missing {what}")))?
            .parse::<usize>()
            .map_err(|e| Error::Parse(format!("bad {what}: {e}")))
    };
    let rows = dim("row count")?;
    let cols = dim("column count")?;
    let values: Vec<f64> = tokens
        .map(|t| t.parse::<f64>().map_err(|e| Error::Parse(format!("bad entry '{t}': {e}"))))
        .collect::<Result<_>>()?;
    if values.len() != 2 * rows * cols {
        return Err(Error::Parse(format!(
            "expected {} numbers for a {rows}x{cols} complex matrix, found {}",
            2 * rows * cols,
            values.len()
        )));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Parse("non-finite entry".into()));
    }
    let data = values.chunks_exact(2).map(|p| C64::new(p[0], p[1])).collect();
    ComplexMatrix::from_vec(rows, cols, data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_example() {
        let m = from_text("2 2\n1 0 0 1\n0 -1 2 0\n").unwrap();
        assert_eq!(m[(0, 1)], C64::new(0.0, 1.0));
        assert_eq!(m[(1, 0)], C64::new(0.0, -1.0));
    }

    #[test]
    fn rejects_short_and_nonfinite() {
        assert!(from_text("1 1\n1").is_err());
        assert!(from_text("1 1\nNaN 0").is_err());
        assert!(from_text("x 1\n1 0").is_err());
    }

    proptest! {
        #[test]
        fn roundtrip_is_bit_exact(entries in proptest::collection::vec((any::<f64>(), any::<f64>()), 6)) {
            prop_assume!(entries.iter().all(|(a, b)| a.is_finite() && b.is_finite()));
            let data = entries.iter().map(|&(a, b)| C64::new(a, b)).collect();
            let m = ComplexMatrix::from_vec(2, 3, data).unwrap();
            let back = from_text(&to_text(&m)).unwrap();
            for (x, y) in m.as_slice().iter().zip(back.as_slice()) {
                prop_assert_eq!(x.re.to_bits(), y.re.to_bits());
                prop_assert_eq!(x.im.to_bits(), y.im.to_bits());
            }
        }
    }
}
