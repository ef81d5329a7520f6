//! `A_p` characteristic `sup_B (avg_B w)(avg_B w^(-1/(p-1)))^(p-1)` over a
//! dyadic family of balls clipped to the domain.
//!
//! In two dimensions the balls are axis-aligned squares; the resulting
//! characteristic is comparable to the Euclidean one and keeps every
//! average an exact rectangle integral.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{check_exponent, dual_weight, Domain, Weight, WeightKind};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Ball {
    /// The ball intersected with the domain, as `(lo, hi)` corners.
    pub fn clipped(&self, domain: Domain) -> (Vec<f64>, Vec<f64>) {
        let (a, b) = domain.bounds();
        let lo = self.center.iter().map(|&c| (c - self.radius).max(a)).collect();
        let hi = self.center.iter().map(|&c| (c + self.radius).min(b)).collect();
        (lo, hi)
    }
}

/// Balls of radius `L 2^-m`, `m = 0..=M`, centered on a lattice of spacing
/// `radius / 2` plus the singular center of the weight and its offsets by
/// one radius. `L` is the box half-width or the length of the time interval.
#[derive(Debug, Clone)]
pub struct BallFamily {
    domain: Domain,
    levels: Vec<Vec<Ball>>,
}

impl BallFamily {
    pub fn dyadic(domain: Domain, max_level: usize, singular_center: Option<&[f64]>) -> Result<Self> {
        if max_level < 4 {
            return Err(Error::InvalidArgument(format!(
                "ball family needs at least 5 levels, got max level {max_level}"
            )));
        }
        let (a, b) = domain.bounds();
        let scale = match domain {
            Domain::Box { half_width, .. } => half_width,
            Domain::Interval { final_time } => final_time,
        };
        let dim = domain.dim();
        let levels = (0..=max_level)
            .map(|m| {
                let radius = scale * (-(m as f64)).exp2();
                let step = radius / 2.0;
                let count = ((b - a) / step).round() as usize;
                let axis: Vec<f64> = (0..=count).map(|i| a + i as f64 * step).collect();
                let mut centers: Vec<Vec<f64>> = if dim == 1 {
                    axis.iter().map(|&x| vec![x]).collect()
                } else {
                    axis.iter()
                        .flat_map(|&x| axis.iter().map(move |&y| vec![x, y]))
                        .collect()
                };
                if let Some(c) = singular_center {
                    centers.push(c.to_vec());
                    for sign in [-1.0, 1.0] {
                        let shifted: Vec<f64> = c.iter().map(|&v| v + sign * radius).collect();
                        if domain.contains(&shifted) {
                            centers.push(shifted);
                        }
                    }
                }
                centers
                    .into_iter()
                    .map(|center| Ball { center, radius })
                    .collect()
            })
            .collect();
        Ok(Self { domain, levels })
    }

    /// Family adapted to a weight: the singular center of a power weight is
    /// always included.
    pub fn for_weight(w: &Weight, max_level: usize) -> Result<Self> {
        let center = match w.kind() {
            WeightKind::Power { center, .. } => Some(center.as_slice()),
            _ => None,
        };
        Self::dyadic(w.domain(), max_level, center)
    }

    pub fn max_level(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn level(&self, m: usize) -> &[Ball] {
        &self.levels[m]
    }

    pub fn smallest_radius(&self) -> f64 {
        self.levels[self.max_level()][0].radius
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn len(&self) -> usize {
        self.levels.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApEstimate {
    pub p: f64,
    pub value: f64,
    pub argmax_ball: Ball,
    /// Supremum over the balls with level `<= m`, for each `m`.
    pub refinement_trend: Vec<f64>,
    /// Infinite estimate, or growth by at least 2x over the last level.
    pub diverging: bool,
    pub warnings: Vec<String>,
}

/// Estimates `[w]_p` over `balls`.
pub fn ap_constant(w: &Weight, p: f64, balls: &BallFamily) -> Result<ApEstimate> {
    check_exponent(p)?;
    if balls.domain() != w.domain() {
        return Err(Error::InvalidArgument(
            "ball family and weight live on different domains".into(),
        ));
    }
    let (sigma, _) = dual_weight(w, p)?;
    let domain = w.domain();

    let mut warnings = Vec::new();
    if let WeightKind::Tabulated { table } = w.kind() {
        let diameter = 2.0 * balls.smallest_radius();
        if table.spacing() > diameter / 8.0 {
            warnings.push(format!(
                "table spacing {} exceeds 1/8 of the smallest ball diameter {diameter}",
                table.spacing()
            ));
        }
    }

    let mut trend = Vec::with_capacity(balls.max_level() + 1);
    let mut best = f64::NEG_INFINITY;
    let mut argmax = balls.level(0)[0].clone();
    for m in 0..=balls.max_level() {
        let products: Vec<f64> = balls
            .level(m)
            .par_iter()
            .map(|ball| {
                let (lo, hi) = ball.clipped(domain);
                let aw = w.average(&lo, &hi);
                let asig = sigma.average(&lo, &hi);
                if aw.is_infinite() || asig.is_infinite() {
                    f64::INFINITY
                } else {
                    aw * asig.powf(p - 1.0)
                }
            })
            .collect();
        for (ball, &v) in balls.level(m).iter().zip(&products) {
            if v > best {
                best = v;
                argmax = ball.clone();
            }
        }
        trend.push(best);
    }

    let n = trend.len();
    let diverging = best.is_infinite() || trend[n - 1] >= 2.0 * trend[n - 2];
    Ok(ApEstimate {
        p,
        value: best,
        argmax_ball: argmax,
        refinement_trend: trend,
        diverging,
        warnings,
    })
}
