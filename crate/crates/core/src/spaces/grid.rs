//! Periodic space grids, fields on them and space-time stacks of fields.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frac_calc::TimeGrid;
use crate::scalar::Real;
use crate::weights::Domain;

/// Uniform periodic grid on `[-L, L)^d` with `n` nodes per axis,
/// `x_i = -L + i h`, `h = 2L / n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpaceGrid {
    dim: usize,
    half_width: f64,
    n: usize,
}

impl SpaceGrid {
    pub fn new(dim: usize, half_width: f64, n: usize) -> Result<Self> {
        if !(dim == 1 || dim == 2) {
            return Err(Error::InvalidGrid(format!("dimension {dim} not in {{1, 2}}")));
        }
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::InvalidGrid(format!("half-width {half_width} must be positive")));
        }
        if n < 16 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "{n} points per axis: need a power of two >= 16"
            )));
        }
        Ok(Self { dim, half_width, n })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    /// Points per axis.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Total number of nodes, `n^d`.
    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    /// Volume of one cell.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    pub fn domain(&self) -> Domain {
        Domain::Box {
            dim: self.dim,
            half_width: self.half_width,
        }
    }

    pub fn axis(&self) -> Vec<f64> {
        let h = self.spacing();
        (0..self.n).map(|i| -self.half_width + i as f64 * h).collect()
    }

    /// Multi-index of a flat node index (row-major, last axis fastest).
    pub fn multi_index(&self, flat: usize) -> [usize; 2] {
        if self.dim == 1 {
            [flat, 0]
        } else {
            [flat / self.n, flat % self.n]
        }
    }

    pub fn node(&self, flat: usize) -> Vec<f64> {
        let h = self.spacing();
        let idx = self.multi_index(flat);
        (0..self.dim)
            .map(|k| -self.half_width + idx[k] as f64 * h)
            .collect()
    }

    /// Signed angular frequency of each FFT bin along one axis, `pi k / L`.
    pub fn frequencies(&self) -> Vec<f64> {
        let n = self.n as i64;
        let scale = std::f64::consts::PI / self.half_width;
        (0..n)
            .map(|k| if k <= n / 2 { k } else { k - n } as f64 * scale)
            .collect()
    }

    pub fn nyquist_index(&self) -> usize {
        self.n / 2
    }

    /// Largest `|xi|` on the grid.
    pub fn max_frequency(&self) -> f64 {
        let axis = std::f64::consts::PI / self.half_width * (self.n / 2) as f64;
        axis * (self.dim as f64).sqrt()
    }

    /// The grid with twice as many points per axis.
    pub fn refined(&self) -> Self {
        Self { n: self.n * 2, ..*self }
    }

    /// Same resolution on a box scaled by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.dim, self.half_width * factor, self.n)
    }

    /// Periodic distance between two nodes.
    pub fn periodic_distance(&self, a: &[f64], b: &[f64]) -> f64 {
        let period = 2.0 * self.half_width;
        a.iter()
            .zip(b)
            .map(|(x, y)| {
                let d = (x - y).rem_euclid(period);
                let d = d.min(period - d);
                d * d
            })
            .sum::<f64>()
            .sqrt()
    }
}

/// Real values at the nodes of a [`SpaceGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct Field<T> {
    grid: SpaceGrid,
    values: Vec<T>,
}

impl<T: Real> Field<T> {
    pub fn new(grid: SpaceGrid, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} values for a grid of {} nodes",
                values.len(),
                grid.len()
            )));
        }
        crate::frac_calc::ensure_finite(&values)?;
        Ok(Self { grid, values })
    }

    pub(crate) fn from_values_unchecked(grid: SpaceGrid, values: Vec<T>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values }
    }

    pub fn zeros(grid: SpaceGrid) -> Self {
        Self {
            grid,
            values: vec![T::zero(); grid.len()],
        }
    }

    /// Samples `f` at every node; the closure receives the node coordinates.
    pub fn from_fn(grid: SpaceGrid, f: impl Fn(&[T]) -> T) -> Self {
        let values = (0..grid.len())
            .map(|i| {
                let x: Vec<T> = grid.node(i).into_iter().map(T::lit).collect();
                f(&x)
            })
            .collect();
        Self { grid, values }
    }

    pub fn grid(&self) -> &SpaceGrid {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn max_abs(&self) -> T {
        crate::scalar::max_abs(&self.values)
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self::from_values_unchecked(self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn scale(&self, s: T) -> Self {
        self.map(|v| v * s)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(T, T) -> T) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch("fields live on different grids".into()));
        }
        Ok(Self::from_values_unchecked(
            self.grid,
            self.values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        ))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    /// Pointwise product.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    /// Writes the binary format: `u32 d`, `u32 n`, `f64 L`, then the values
    /// row-major as little-endian `f64`.
    pub fn write_binary<W: Write>(&self, mut out: W) -> Result<()> {
        out.write_all(&(self.grid.dim as u32).to_le_bytes())?;
        out.write_all(&(self.grid.n as u32).to_le_bytes())?;
        out.write_all(&self.grid.half_width.to_le_bytes())?;
        let mut buf = Vec::with_capacity(8 * self.values.len());
        for v in &self.values {
            buf.extend_from_slice(&v.to_f64_lossy().to_le_bytes());
        }
        out.write_all(&buf)?;
        Ok(())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.write_binary(std::io::BufWriter::new(file))
    }

    /// Small grids as CSV: `x[,y],value`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let header: &[&str] = if self.grid.dim == 1 {
            &["x", "value"]
        } else {
            &["x", "y", "value"]
        };
        w.write_record(header).map_err(csv_error)?;
        for (i, v) in self.values.iter().enumerate() {
            let mut row: Vec<String> = self.grid.node(i).iter().map(|c| format!("{c:.17e}")).collect();
            row.push(format!("{:.17e}", v.to_f64_lossy()));
            w.write_record(&row).map_err(csv_error)?;
        }
        w.flush()?;
        Ok(())
    }
}

impl Field<f64> {
    /// Reads one field in the binary format.
    pub fn read_binary<R: Read>(mut input: R) -> Result<Self> {
        let mut b4 = [0u8; 4];
        let mut b8 = [0u8; 8];
        input.read_exact(&mut b4)?;
        let dim = u32::from_le_bytes(b4) as usize;
        input.read_exact(&mut b4)?;
        let n = u32::from_le_bytes(b4) as usize;
        input.read_exact(&mut b8)?;
        let half_width = f64::from_le_bytes(b8);
        let grid = SpaceGrid::new(dim, half_width, n)?;
        let mut raw = vec![0u8; 8 * grid.len()];
        input.read_exact(&mut raw)?;
        let values = raw
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
            .collect();
        Self::new(grid, values)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::read_binary(std::io::BufReader::new(file))
    }
}

pub(crate) fn csv_error(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e.to_string()))
}

/// Fields `u(t_n, .)` on a shared space grid, one per time node.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeField<T> {
    tgrid: TimeGrid<T>,
    sgrid: SpaceGrid,
    slices: Vec<Field<T>>,
}

impl<T: Real> SpaceTimeField<T> {
    pub fn new(tgrid: TimeGrid<T>, slices: Vec<Field<T>>) -> Result<Self> {
        if slices.len() != tgrid.len() {
            return Err(Error::GridMismatch(format!(
                "{} slices for {} time nodes",
                slices.len(),
                tgrid.len()
            )));
        }
        let sgrid = *slices[0].grid();
        if slices.iter().any(|s| *s.grid() != sgrid) {
            return Err(Error::GridMismatch("slices use different space grids".into()));
        }
        Ok(Self { tgrid, sgrid, slices })
    }

    pub fn zeros(tgrid: TimeGrid<T>, sgrid: SpaceGrid) -> Self {
        let slices = vec![Field::zeros(sgrid); tgrid.len()];
        Self { tgrid, sgrid, slices }
    }

    /// Samples `f(t, x)` at every space-time node.
    pub fn from_fn(tgrid: TimeGrid<T>, sgrid: SpaceGrid, f: impl Fn(T, &[T]) -> T) -> Self {
        let slices = tgrid
            .nodes()
            .iter()
            .map(|&t| Field::from_fn(sgrid, |x| f(t, x)))
            .collect();
        Self { tgrid, sgrid, slices }
    }

    pub fn tgrid(&self) -> &TimeGrid<T> {
        &self.tgrid
    }

    pub fn sgrid(&self) -> &SpaceGrid {
        &self.sgrid
    }

    pub fn slices(&self) -> &[Field<T>] {
        &self.slices
    }

    pub fn slice(&self, n: usize) -> &Field<T> {
        &self.slices[n]
    }

    pub fn into_slices(self) -> Vec<Field<T>> {
        self.slices
    }

    /// Applies `f` to every slice.
    pub fn map_slices(&self, f: impl Fn(&Field<T>) -> Field<T>) -> Self {
        Self {
            tgrid: self.tgrid.clone(),
            sgrid: self.sgrid,
            slices: self.slices.iter().map(f).collect(),
        }
    }

    pub fn try_map_slices(&self, f: impl Fn(&Field<T>) -> Result<Field<T>>) -> Result<Self> {
        let slices = self.slices.iter().map(f).collect::<Result<Vec<_>>>()?;
        Self::new(self.tgrid.clone(), slices)
    }

    /// The time series at one spatial node.
    pub fn at_node(&self, node: usize) -> Vec<T> {
        self.slices.iter().map(|s| s.values()[node]).collect()
    }

    pub fn max_abs(&self) -> T {
        self.slices.iter().fold(T::zero(), |m, s| m.max(s.max_abs()))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.tgrid != other.tgrid {
            return Err(Error::GridMismatch("time grids differ".into()));
        }
        let slices = self
            .slices
            .iter()
            .zip(&other.slices)
            .map(|(a, b)| a.sub(b))
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.tgrid.clone(), slices)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.tgrid != other.tgrid {
            return Err(Error::GridMismatch("time grids differ".into()));
        }
        let slices = self
            .slices
            .iter()
            .zip(&other.slices)
            .map(|(a, b)| a.add(b))
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.tgrid.clone(), slices)
    }

    /// Keeps the first `steps + 1` slices on the correspondingly truncated grid.
    pub fn truncated(&self, steps: usize) -> Result<Self> {
        let tgrid = self.tgrid.truncated(steps)?;
        Self::new(tgrid, self.slices[..=steps].to_vec())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_geometry() {
        let g = SpaceGrid::new(1, std::f64::consts::PI, 16).unwrap();
        assert_eq!(g.len(), 16);
        assert!((g.spacing() - std::f64::consts::PI / 8.0).abs() < 1e-15);
        let f = g.frequencies();
        assert_eq!(f[1], 1.0);
        assert_eq!(f[8], 8.0);
        assert_eq!(f[15], -1.0);
        assert!(SpaceGrid::new(1, 1.0, 24).is_err());
        assert!(SpaceGrid::new(1, 1.0, 8).is_err());
        assert!(SpaceGrid::new(3, 1.0, 16).is_err());
        let g2 = SpaceGrid::new(2, 1.0, 16).unwrap();
        assert_eq!(g2.node(17), vec![-1.0 + 0.125, -1.0 + 0.125]);
    }

    #[test]
    fn periodic_distance_wraps() {
        let g = SpaceGrid::new(1, 1.0, 16).unwrap();
        assert!((g.periodic_distance(&[-0.9], &[0.9]) - 0.2).abs() < 1e-15);
    }

    #[test]
    fn field_rejects_bad_values() {
        let g = SpaceGrid::new(1, 1.0, 16).unwrap();
        assert!(Field::new(g, vec![0.0; 15]).is_err());
        let mut v = vec![0.0; 16];
        v[2] = f64::INFINITY;
        assert!(Field::new(g, v).is_err());
    }

    #[test]
    fn binary_round_trip_is_bitwise() {
        let g = SpaceGrid::new(2, 1.5, 16).unwrap();
        let f = Field::from_fn(g, |x: &[f64]| (3.0 * x[0]).sin() * x[1].exp());
        let mut buf = Vec::new();
        f.write_binary(&mut buf).unwrap();
        assert_eq!(buf.len(), 16 + 8 * 256);
        let back = Field::read_binary(&buf[..]).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn csv_output() {
        let g = SpaceGrid::new(1, 1.0, 16).unwrap();
        let f = Field::from_fn(g, |x: &[f64]| x[0]);
        let mut buf = Vec::new();
        f.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 17);
        assert!(text.starts_with("x,value"));
    }
}
