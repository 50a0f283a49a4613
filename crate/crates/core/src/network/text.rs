//! Plain-text matrix format: a line holding `n`, then `n` rows of `n`
//! space-separated decimals.
//!
//! Numbers are written with the shortest representation that parses back to
//! the same `f64`, so a write/read cycle is bit-exact.

use std::fmt::Write as _;

use super::WeightMatrix;
use crate::error::{Error, Result};

impl WeightMatrix {
    pub fn to_text(&self) -> String {
        let n = self.n();
        let mut out = format!("{n}\n");
        for i in 0..n {
            for j in 0..n {
                if j > 0 {
                    out.push(' ');
                }
                write!(out, "{}", self.get(i, j)).unwrap();
            }
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty matrix file".into()))?;
        let n: usize = header
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad size line `{}`", header.trim())))?;
        let mut data = Vec::with_capacity(n * n);
        for (row, line) in lines.enumerate() {
            let before = data.len();
            for tok in line.split_whitespace() {
                let x: f64 = tok
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad number `{tok}` in row {}", row + 1)))?;
                data.push(x);
            }
            if data.len() - before != n {
                return Err(Error::Parse(format!(
                    "row {} has {} entries, expected {n}",
                    row + 1,
                    data.len() - before
                )));
            }
        }
        if data.len() != n * n {
            return Err(Error::Parse(format!(
                "expected {n} rows, found {}",
                data.len() / n.max(1)
            )));
        }
        WeightMatrix::from_row_major(n, data)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{build_complete_equal, build_complete_self_weight, build_core_periphery};
    use proptest::prelude::*;

    #[test]
    fn complete_equal_file() {
        let text = build_complete_equal(4).unwrap().to_text();
        assert_eq!(text, "4\n0.25 0.25 0.25 0.25\n0.25 0.25 0.25 0.25\n0.25 0.25 0.25 0.25\n0.25 0.25 0.25 0.25\n");
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(WeightMatrix::from_text(""), Err(Error::Parse(_))));
        assert!(matches!(
            WeightMatrix::from_text("2\n0.5 0.5\n"),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            WeightMatrix::from_text("2\n0.5 x\n0.5 0.5\n"),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            WeightMatrix::from_text("2\n0.6 0.5\n0.5 0.5\n"),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn core_periphery_round_trip() {
        let w = build_core_periphery(9).unwrap();
        assert_eq!(WeightMatrix::from_text(&w.to_text()).unwrap(), w);
    }

    proptest! {
        #[test]
        fn round_trip_is_bit_exact(x in prop::collection::vec(0.001f64..0.999, 2..10)) {
            let w = build_complete_self_weight(&x).unwrap();
            let back = WeightMatrix::from_text(&w.to_text()).unwrap();
            prop_assert_eq!(back.as_matrix(), w.as_matrix());
        }
    }
}
