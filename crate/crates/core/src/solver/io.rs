//! Solutions on disk: the slices back to back in the field binary format,
//! plus a JSON manifest next to them.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frac_calc::{Grading, TimeGrid};
use crate::scalar::Real;
use crate::spaces::{Field, SpaceGrid, SpaceTimeField};

use super::march::{Scheme, Solution};

pub const SOLUTION_FORMAT: &str = "wfrac-solution/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionManifest {
    pub format: String,
    pub alpha: f64,
    pub scheme: Scheme,
    pub residual: f64,
    pub space: SpaceGrid,
    pub final_time: f64,
    pub steps: usize,
    pub grading: Grading,
    pub times: Vec<f64>,
    /// File name of the binary data, relative to the manifest.
    pub data: String,
}

/// `sol.bin` -> `sol.json`.
pub fn manifest_path(data: &Path) -> PathBuf {
    data.with_extension("json")
}

impl<T: Real> Solution<T> {
    pub fn manifest(&self, data: &Path) -> SolutionManifest {
        let tg = self.u().tgrid();
        SolutionManifest {
            format: SOLUTION_FORMAT.into(),
            alpha: self.alpha().value(),
            scheme: self.scheme(),
            residual: self.residual(),
            space: *self.u().sgrid(),
            final_time: tg.final_time().to_f64_lossy(),
            steps: tg.steps(),
            grading: tg.grading(),
            times: tg.nodes().iter().map(|t| t.to_f64_lossy()).collect(),
            data: data
                .file_name()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default(),
        }
    }

    /// Writes the slices to `path` and the manifest to [`manifest_path`].
    pub fn save(&self, path: impl AsRef<Path>) -> Result<SolutionManifest> {
        let path = path.as_ref();
        let mut out = BufWriter::new(File::create(path)?);
        for s in self.u().slices() {
            s.write_binary(&mut out)?;
        }
        out.flush()?;
        let manifest = self.manifest(path);
        let file = File::create(manifest_path(path))?;
        serde_json::to_writer_pretty(BufWriter::new(file), &manifest)?;
        Ok(manifest)
    }
}

/// Reads a solution written by [`Solution::save`], given the binary path.
pub fn load_solution(path: impl AsRef<Path>) -> Result<(SolutionManifest, SpaceTimeField<f64>)> {
    let path = path.as_ref();
    let manifest: SolutionManifest = serde_json::from_reader(BufReader::new(File::open(manifest_path(path))?))?;
    if manifest.format != SOLUTION_FORMAT {
        return Err(Error::Parse(format!("unknown solution format {:?}", manifest.format)));
    }
    let tgrid = TimeGrid::new(manifest.final_time, manifest.steps, manifest.grading)?;
    if tgrid.nodes() != manifest.times.as_slice() {
        return Err(Error::Parse("manifest times do not match the grid".into()));
    }
    let mut input = BufReader::new(File::open(path)?);
    let slices = (0..tgrid.len())
        .map(|_| Field::read_binary(&mut input))
        .collect::<Result<Vec<_>>>()?;
    if slices.iter().any(|s| *s.grid() != manifest.space) {
        return Err(Error::Parse("slice grid differs from the manifest".into()));
    }
    Ok((manifest, SpaceTimeField::new(tgrid, slices)?))
}
