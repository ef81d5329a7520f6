//! Tabulated one-dimensional weights with linear interpolation.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::quad::{gl8, integrate};

/// Samples `(x_i, v_i)` with strictly increasing `x_i` and positive `v_i`.
///
/// The weight is `interp(x)^power`; `power` is 1 for a freshly read table and
/// changes only through [`super::dual_weight`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    coords: Vec<f64>,
    values: Vec<f64>,
    power: f64,
}

impl Table {
    pub fn new(coords: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if coords.len() != values.len() || coords.len() < 2 {
            return Err(Error::InvalidArgument(
                "a weight table needs at least two (coordinate, value) rows".into(),
            ));
        }
        if coords.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidArgument(
                "table coordinates must be strictly increasing".into(),
            ));
        }
        if let Some(i) = values.iter().position(|&v| !(v > 0.0) || !v.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "table value {} at row {i} is not strictly positive",
                values[i]
            )));
        }
        Ok(Self {
            coords,
            values,
            power: 1.0,
        })
    }

    /// Reads a two-column text file; `#` starts a comment, columns are
    /// separated by whitespace or a comma.
    pub fn read_text(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut coords = Vec::new();
        let mut values = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .collect();
            if cols.len() != 2 {
                return Err(Error::Parse(format!(
                    "line {}: expected two columns, found {}",
                    lineno + 1,
                    cols.len()
                )));
            }
            let parse = |s: &str| {
                s.parse::<f64>()
                    .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))
            };
            coords.push(parse(cols[0])?);
            values.push(parse(cols[1])?);
        }
        Self::new(coords, values)
    }

    pub fn write_text(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut out = String::new();
        for (x, v) in self.coords.iter().zip(&self.values) {
            out.push_str(&format!("{x:.17e} {v:.17e}\n"));
        }
        std::fs::write(path, out)?;
        Ok(())
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn power(&self) -> f64 {
        self.power
    }

    pub fn range(&self) -> (f64, f64) {
        (self.coords[0], self.coords[self.coords.len() - 1])
    }

    /// Smallest sample spacing.
    pub fn spacing(&self) -> f64 {
        self.coords
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min)
    }

    pub(crate) fn with_power(&self, power: f64) -> Self {
        Self {
            power,
            ..self.clone()
        }
    }

    fn interp(&self, x: f64) -> f64 {
        let c = &self.coords;
        let x = x.clamp(c[0], c[c.len() - 1]);
        let i = c.partition_point(|&v| v <= x).clamp(1, c.len() - 1);
        let (x0, x1) = (c[i - 1], c[i]);
        let s = (x - x0) / (x1 - x0);
        self.values[i - 1] * (1.0 - s) + self.values[i] * s
    }

    pub fn eval(&self, x: f64) -> f64 {
        let v = self.interp(x);
        if self.power == 1.0 {
            v
        } else {
            v.powf(self.power)
        }
    }

    /// `int_a^b w`, exact for `power == 1` and by an 8-point rule per
    /// sample interval otherwise.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        let c = &self.coords;
        let lo = c.partition_point(|&v| v <= a);
        let hi = c.partition_point(|&v| v < b);
        let mut breaks = vec![a];
        breaks.extend_from_slice(&c[lo..hi]);
        breaks.push(b);
        breaks
            .windows(2)
            .map(|w| {
                if self.power == 1.0 {
                    0.5 * (self.interp(w[0]) + self.interp(w[1])) * (w[1] - w[0])
                } else {
                    integrate(gl8(), w[0], w[1], |x| self.eval(x))
                }
            })
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_evaluate() {
        let t = Table::parse("# x w\n0 1\n1, 3\n\n2 2 # tail\n").unwrap();
        assert_eq!(t.eval(1.0), 3.0);
        assert_eq!(t.eval(0.5), 2.0);
        assert!((t.integral(0.0, 2.0) - 4.5).abs() < 1e-15);
        assert!((t.integral(0.25, 1.5) - (0.5 * (1.5 + 3.0) * 0.75 + 0.5 * (3.0 + 2.5) * 0.5)).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(Table::parse("0 1\n").is_err());
        assert!(Table::parse("0 1\n1 0\n").is_err());
        assert!(Table::parse("1 1\n0 2\n").is_err());
        assert!(Table::parse("0 1 2\n1 1 1\n").is_err());
        assert!(Table::parse("0 x\n1 1\n").is_err());
    }

    #[test]
    fn powered_table_integral() {
        let t = Table::new(vec![0.0, 1.0], vec![1.0, 2.0]).unwrap().with_power(-1.0);
        // int_0^1 1/(1+x) dx
        assert!((t.integral(0.0, 1.0) - 2f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn text_round_trip() {
        let t = Table::new(vec![-1.0, 0.0, 1.0], vec![0.5, 1.0 / 3.0, 2.0]).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("w.txt");
        t.write_text(&path).unwrap();
        assert_eq!(Table::read_text(&path).unwrap(), t);
    }
}
