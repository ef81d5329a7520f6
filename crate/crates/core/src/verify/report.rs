//! Suite reports: JSON for machines, CSV rows for plotting.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spaces::BesselSymbol;

use super::{CheckId, CheckResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub suite: String,
    pub seed: u64,
    pub bessel: BesselSymbol,
    pub checks: Vec<CheckResult>,
    pub pass: bool,
}

/// One CSV line: an instance at one refinement level.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CsvRow {
    pub check: CheckId,
    pub instance: usize,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub gamma: Option<f64>,
    pub w_x: Option<String>,
    pub w_t: Option<String>,
    pub final_time: Option<f64>,
    pub theta: Option<f64>,
    pub gamma1: Option<f64>,
    pub p1: Option<f64>,
    pub w_x1: Option<String>,
    pub ratio_r: Option<f64>,
    pub variant: Option<String>,
    pub level: usize,
    pub member: String,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub drift: f64,
    pub verdict: String,
    pub expect: String,
    pub pass: bool,
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

impl Report {
    pub fn new(suite: &str, seed: u64, bessel: BesselSymbol, checks: Vec<CheckResult>) -> Self {
        let pass = checks.iter().all(|c| c.pass);
        Self {
            suite: suite.into(),
            seed,
            bessel,
            checks,
            pass,
        }
    }

    /// Ids of the checks that failed, in suite order.
    pub fn failing(&self) -> Vec<CheckId> {
        self.checks.iter().filter(|c| !c.pass).map(|c| c.check).collect()
    }

    pub fn check(&self, id: CheckId) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.check == id)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn rows(&self) -> Vec<CsvRow> {
        let mut out = Vec::new();
        for c in &self.checks {
            for (k, inst) in c.instances.iter().enumerate() {
                let p = &inst.params;
                for l in &inst.levels {
                    out.push(CsvRow {
                        check: c.check,
                        instance: k,
                        alpha: p.alpha,
                        beta: p.beta,
                        p: p.p,
                        q: p.q,
                        gamma: p.gamma,
                        w_x: p.w_x.clone(),
                        w_t: p.w_t.clone(),
                        final_time: p.final_time,
                        theta: p.theta,
                        gamma1: p.gamma1,
                        p1: p.p1,
                        w_x1: p.w_x1.clone(),
                        ratio_r: p.ratio,
                        variant: p.variant.clone(),
                        level: l.level,
                        member: l.member.clone(),
                        lhs: l.lhs,
                        rhs: l.rhs,
                        ratio: l.ratio,
                        drift: inst.drift,
                        verdict: inst.verdict.to_string(),
                        expect: p.expect.to_string(),
                        pass: inst.pass,
                    });
                }
            }
        }
        out
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for row in self.rows() {
            w.serialize(row).map_err(csv_error)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Writes the JSON report to `path` and the CSV rows next to it
    /// (same stem, `.csv`); returns the CSV path.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<PathBuf> {
        let path = path.as_ref();
        let mut f = BufWriter::new(File::create(path)?);
        f.write_all(self.to_json()?.as_bytes())?;
        f.write_all(b"\n")?;
        f.flush()?;
        let csv_path = path.with_extension("csv");
        self.write_csv(BufWriter::new(File::create(&csv_path)?))?;
        Ok(csv_path)
    }
}

/// Serde adapters that keep `inf` and `NaN` (JSON has no literal for them).
pub(crate) mod lenient {
    use serde::{Deserialize, Deserializer, Serializer};

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    fn decode<E: serde::de::Error>(r: Repr) -> Result<f64, E> {
        match r {
            Repr::Num(v) => Ok(v),
            Repr::Text(s) => match s.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(E::custom(format!("not a number: {other:?}"))),
            },
        }
    }

    fn encode<S: Serializer>(v: f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        encode(*v, s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        decode(Repr::deserialize(d)?)
    }

    pub mod vec {
        use super::*;
        use serde::ser::SerializeSeq;

        pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
            struct One(f64);
            impl serde::Serialize for One {
                fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                    encode(self.0, s)
                }
            }
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for &x in v {
                seq.serialize_element(&One(x))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
            Vec::<Repr>::deserialize(d)?.into_iter().map(decode).collect()
        }
    }
}
