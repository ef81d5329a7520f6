//! Muckenhoupt weights: construction, exact cell integrals, `A_p`
//! characteristics over dyadic ball families and dual weights.
//!
//! Weights are described by `f64` parameters. Power weights `|x - y|^lambda`
//! are integrated with their antiderivative (1-D) or in polar form around
//! the singularity (2-D), so integrals over cells that contain the center
//! are exact and come out as `+inf` when the singularity is not integrable.

mod ap;
mod quad;
mod table;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use ap::{ap_constant, ApEstimate, Ball, BallFamily};
pub use quad::gauss_legendre;
pub use table::Table;

use quad::{gl24, gl8, integrate, integrate_2d};

/// Where a weight lives: a spatial box `[-L, L]^d` or a time interval `(0, T)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Domain {
    Box { dim: usize, half_width: f64 },
    Interval { final_time: f64 },
}

impl Domain {
    pub fn spatial(dim: usize, half_width: f64) -> Result<Self> {
        if !(dim == 1 || dim == 2) {
            return Err(Error::InvalidArgument(format!("dimension {dim} not in {{1, 2}}")));
        }
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::InvalidArgument(format!("half-width {half_width} must be positive")));
        }
        Ok(Domain::Box { dim, half_width })
    }

    pub fn temporal(final_time: f64) -> Result<Self> {
        if !(final_time > 0.0 && final_time.is_finite()) {
            return Err(Error::InvalidArgument(format!("final time {final_time} must be positive")));
        }
        Ok(Domain::Interval { final_time })
    }

    pub fn dim(&self) -> usize {
        match *self {
            Domain::Box { dim, .. } => dim,
            Domain::Interval { .. } => 1,
        }
    }

    /// Coordinate bounds of one axis.
    pub fn bounds(&self) -> (f64, f64) {
        match *self {
            Domain::Box { half_width, .. } => (-half_width, half_width),
            Domain::Interval { final_time } => (0.0, final_time),
        }
    }

    pub fn extent(&self) -> f64 {
        let (a, b) = self.bounds();
        b - a
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        let (a, b) = self.bounds();
        let slack = 1e-12 * self.extent();
        x.len() == self.dim() && x.iter().all(|&v| v >= a - slack && v <= b + slack)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightKind {
    Constant { value: f64 },
    /// `|x - center|^exponent`.
    Power { exponent: f64, center: Vec<f64> },
    /// One-dimensional samples, linearly interpolated.
    Tabulated { table: Table },
}

/// A positive weight on a [`Domain`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Weight {
    kind: WeightKind,
    domain: Domain,
}

impl Weight {
    pub fn constant(domain: Domain) -> Self {
        Self::constant_value(domain, 1.0).expect("unit weight")
    }

    pub fn constant_value(domain: Domain, value: f64) -> Result<Self> {
        if !(value > 0.0 && value.is_finite()) {
            return Err(Error::InvalidArgument(format!("constant weight {value} must be positive")));
        }
        Ok(Self {
            kind: WeightKind::Constant { value },
            domain,
        })
    }

    pub fn power(domain: Domain, exponent: f64, center: &[f64]) -> Result<Self> {
        if !exponent.is_finite() {
            return Err(Error::InvalidArgument(format!("power exponent {exponent} is not finite")));
        }
        if center.len() != domain.dim() {
            return Err(Error::InvalidArgument(format!(
                "center has {} coordinates, domain has dimension {}",
                center.len(),
                domain.dim()
            )));
        }
        Ok(Self {
            kind: WeightKind::Power {
                exponent,
                center: center.to_vec(),
            },
            domain,
        })
    }

    /// Power weight centered at the origin.
    pub fn power_at_origin(domain: Domain, exponent: f64) -> Result<Self> {
        Self::power(domain, exponent, &vec![0.0; domain.dim()])
    }

    pub fn tabulated(domain: Domain, table: Table) -> Result<Self> {
        if domain.dim() != 1 {
            return Err(Error::InvalidArgument(
                "tabulated weights are one-dimensional".into(),
            ));
        }
        let (a, b) = domain.bounds();
        let (lo, hi) = table.range();
        let slack = 1e-9 * domain.extent();
        if lo > a + slack || hi < b - slack {
            return Err(Error::InvalidArgument(format!(
                "table covers [{lo}, {hi}] but the domain is [{a}, {b}]"
            )));
        }
        Ok(Self {
            kind: WeightKind::Tabulated { table },
            domain,
        })
    }

    /// Parses `const`, `const:c`, `power:l`, `power:l@y` (`y` a coordinate,
    /// or `y1,y2` in 2-D) and `table:path`.
    pub fn parse_spec(spec: &str, domain: Domain) -> Result<Self> {
        let spec = spec.trim();
        let (head, rest) = match spec.split_once(':') {
            Some((h, r)) => (h, Some(r)),
            None => (spec, None),
        };
        let num = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("weight spec {spec:?}: {e}")))
        };
        match (head, rest) {
            ("const" | "1", None) => Ok(Self::constant(domain)),
            ("const", Some(v)) => Self::constant_value(domain, num(v)?),
            ("power", Some(body)) => {
                let (exp, center) = match body.split_once('@') {
                    Some((e, c)) => (
                        num(e)?,
                        c.split(',').map(num).collect::<Result<Vec<f64>>>()?,
                    ),
                    None => (num(body)?, vec![0.0; domain.dim()]),
                };
                let center = if center.len() == 1 && domain.dim() == 2 {
                    vec![center[0]; 2]
                } else {
                    center
                };
                Self::power(domain, exp, &center)
            }
            ("table", Some(path)) => Self::tabulated(domain, Table::read_text(path)?),
            _ => Err(Error::Parse(format!("unrecognized weight spec {spec:?}"))),
        }
    }

    pub fn kind(&self) -> &WeightKind {
        &self.kind
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    /// The same weight on another domain of equal dimension.
    pub fn on_domain(&self, domain: Domain) -> Result<Self> {
        match &self.kind {
            WeightKind::Tabulated { table } => Self::tabulated(domain, table.clone()),
            _ if domain.dim() != self.dim() => Err(Error::InvalidArgument(
                "cannot move a weight across dimensions".into(),
            )),
            kind => Ok(Self {
                kind: kind.clone(),
                domain,
            }),
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.kind, WeightKind::Constant { .. })
    }

    /// Short human-readable identity, used in reports.
    pub fn label(&self) -> String {
        match &self.kind {
            WeightKind::Constant { value } if *value == 1.0 => "1".into(),
            WeightKind::Constant { value } => format!("{value}"),
            WeightKind::Power { exponent, center } if center.iter().all(|&c| c == 0.0) => {
                format!("|x|^{exponent}")
            }
            WeightKind::Power { exponent, center } => format!("|x-{center:?}|^{exponent}"),
            WeightKind::Tabulated { table } if table.power() == 1.0 => {
                format!("table[{} rows]", table.coords().len())
            }
            WeightKind::Tabulated { table } => {
                format!("table[{} rows]^{}", table.coords().len(), table.power())
            }
        }
    }

    /// Distance from a power weight's center at which [`Weight::eval`]
    /// reads the value when asked for the center itself.
    pub fn regularization(&self) -> f64 {
        self.domain.extent() * (-12f64).exp2()
    }

    /// Pointwise value.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        if !self.domain.contains(x) {
            return Err(Error::OutsideDomain { point: x.to_vec() });
        }
        Ok(match &self.kind {
            WeightKind::Constant { value } => *value,
            WeightKind::Power { exponent, center } => {
                if *exponent == 0.0 {
                    return Ok(1.0);
                }
                let r = x
                    .iter()
                    .zip(center)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                r.max(self.regularization()).powf(*exponent)
            }
            WeightKind::Tabulated { table } => table.eval(x[0]),
        })
    }

    /// `int w` over the axis-aligned box `[lo, hi]`.
    pub fn integral(&self, lo: &[f64], hi: &[f64]) -> f64 {
        debug_assert_eq!(lo.len(), self.dim());
        let measure: f64 = lo.iter().zip(hi).map(|(a, b)| (b - a).max(0.0)).product();
        if measure == 0.0 {
            return 0.0;
        }
        match &self.kind {
            WeightKind::Constant { value } => value * measure,
            WeightKind::Power { exponent, center } => {
                if *exponent == 0.0 {
                    return measure;
                }
                if self.dim() == 1 {
                    power_integral_1d(lo[0] - center[0], hi[0] - center[0], *exponent)
                } else {
                    power_integral_2d(
                        (lo[0] - center[0], hi[0] - center[0]),
                        (lo[1] - center[1], hi[1] - center[1]),
                        *exponent,
                    )
                }
            }
            WeightKind::Tabulated { table } => table.integral(lo[0], hi[0]),
        }
    }

    /// Average over `[lo, hi]`; exact for constant weights.
    pub fn average(&self, lo: &[f64], hi: &[f64]) -> f64 {
        if let WeightKind::Constant { value } = self.kind {
            return value;
        }
        let measure: f64 = lo.iter().zip(hi).map(|(a, b)| b - a).product();
        self.integral(lo, hi) / measure
    }
}

impl Weight {
    /// `(int_a^b (b-t)/(b-a) w, int_a^b (t-a)/(b-a) w)` for a one-dimensional
    /// weight: the integrals of the two hat-function halves on `[a, b]`.
    pub fn hat_moments(&self, a: f64, b: f64) -> (f64, f64) {
        debug_assert_eq!(self.dim(), 1);
        let width = b - a;
        let left = |t: f64| (b - t) / width;
        let right = |t: f64| (t - a) / width;
        match &self.kind {
            WeightKind::Constant { value } => (0.5 * value * width, 0.5 * value * width),
            WeightKind::Power { exponent, center } => {
                let l = *exponent;
                let (u0, u1) = (a - center[0], b - center[0]);
                let dist = if u0 > 0.0 { u0 } else if u1 < 0.0 { -u1 } else { 0.0 };
                if dist > width {
                    // smooth on the cell
                    let f = |t: f64| (t - center[0]).abs().powf(l);
                    return (
                        integrate(gl24(), a, b, |t| left(t) * f(t)),
                        integrate(gl24(), a, b, |t| right(t) * f(t)),
                    );
                }
                let m0 = power_integral_1d(u0, u1, l);
                if m0.is_infinite() {
                    return (f64::INFINITY, f64::INFINITY);
                }
                // int u |u|^l du = |u|^(l+2) / (l+2)
                let odd = if l == -2.0 {
                    (u1.abs() / u0.abs()).ln()
                } else {
                    (u1.abs().powf(l + 2.0) - u0.abs().powf(l + 2.0)) / (l + 2.0)
                };
                let m1 = center[0] * m0 + odd;
                ((b * m0 - m1) / width, (m1 - a * m0) / width)
            }
            WeightKind::Tabulated { table } => {
                let c = table.coords();
                let lo = c.partition_point(|&v| v <= a);
                let hi = c.partition_point(|&v| v < b);
                let mut breaks = vec![a];
                breaks.extend_from_slice(&c[lo..hi]);
                breaks.push(b);
                breaks.windows(2).fold((0.0, 0.0), |(l0, r0), w| {
                    (
                        l0 + integrate(gl8(), w[0], w[1], |t| left(t) * table.eval(t)),
                        r0 + integrate(gl8(), w[0], w[1], |t| right(t) * table.eval(t)),
                    )
                })
            }
        }
    }
}

/// Pointwise evaluation; see [`Weight::eval`].
pub fn weight_eval(w: &Weight, x: &[f64]) -> Result<f64> {
    w.eval(x)
}

/// `(w^(-1/(p-1)), p/(p-1))`.
pub fn dual_weight(w: &Weight, p: f64) -> Result<(Weight, f64)> {
    check_exponent(p)?;
    let s = -1.0 / (p - 1.0);
    let kind = match &w.kind {
        WeightKind::Constant { value } => WeightKind::Constant {
            value: value.powf(s),
        },
        WeightKind::Power { exponent, center } => WeightKind::Power {
            exponent: exponent * s,
            center: center.clone(),
        },
        WeightKind::Tabulated { table } => WeightKind::Tabulated {
            table: table.with_power(table.power() * s),
        },
    };
    Ok((
        Weight {
            kind,
            domain: w.domain,
        },
        p / (p - 1.0),
    ))
}

pub(crate) fn check_exponent(p: f64) -> Result<()> {
    if p > 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidExponent(p))
    }
}

/// `int_{u0}^{u1} |u|^l du`.
fn power_integral_1d(u0: f64, u1: f64, l: f64) -> f64 {
    if u0 >= 0.0 {
        half_line(u0, u1, l)
    } else if u1 <= 0.0 {
        half_line(-u1, -u0, l)
    } else {
        half_line(0.0, -u0, l) + half_line(0.0, u1, l)
    }
}

/// `int_a^b u^l du` for `0 <= a < b`.
fn half_line(a: f64, b: f64, l: f64) -> f64 {
    if a == 0.0 {
        return if l <= -1.0 {
            f64::INFINITY
        } else {
            b.powf(l + 1.0) / (l + 1.0)
        };
    }
    let ratio = ((b - a) / a).ln_1p();
    if l == -1.0 {
        ratio
    } else {
        // a^(l+1) ((b/a)^(l+1) - 1) / (l+1), without cancellation for b ~ a
        a.powf(l + 1.0) * ((l + 1.0) * ratio).exp_m1() / (l + 1.0)
    }
}

/// `int |x|^l` over `[x0, x1] x [y0, y1]` (coordinates relative to the center).
fn power_integral_2d(x: (f64, f64), y: (f64, f64), l: f64) -> f64 {
    let contains = x.0 <= 0.0 && x.1 >= 0.0 && y.0 <= 0.0 && y.1 >= 0.0;
    if contains {
        if l <= -2.0 {
            return f64::INFINITY;
        }
        // four rectangles with a corner at the singularity
        let (ax, bx) = (-x.0, x.1);
        let (ay, by) = (-y.0, y.1);
        return corner_rect(ax, ay, l) + corner_rect(ax, by, l) + corner_rect(bx, ay, l) + corner_rect(bx, by, l);
    }
    adaptive_rect(x, y, l, 0)
}

/// `int_0^a int_0^b |x|^l` in polar form: the rectangle splits along its
/// diagonal into two triangles, each reduced to `int_0^S (1+s^2)^(l/2) ds`.
fn corner_rect(a: f64, b: f64, l: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        return 0.0;
    }
    (a.powf(l + 2.0) * tan_profile(b / a, l) + b.powf(l + 2.0) * tan_profile(a / b, l)) / (l + 2.0)
}

fn tan_profile(s_max: f64, l: f64) -> f64 {
    let f = |s: f64| (1.0 + s * s).powf(0.5 * l);
    if s_max <= 1.0 {
        return integrate(gl24(), 0.0, s_max, f);
    }
    let mut total = integrate(gl24(), 0.0, 1.0, f);
    let mut a = 1.0;
    while a < s_max {
        let b = (2.0 * a).min(s_max);
        total += integrate(gl24(), a, b, f);
        a = b;
    }
    total
}

fn adaptive_rect(x: (f64, f64), y: (f64, f64), l: f64, depth: usize) -> f64 {
    let dx = if x.0 > 0.0 { x.0 } else if x.1 < 0.0 { -x.1 } else { 0.0 };
    let dy = if y.0 > 0.0 { y.0 } else if y.1 < 0.0 { -y.1 } else { 0.0 };
    let dist = (dx * dx + dy * dy).sqrt();
    let diam = ((x.1 - x.0).powi(2) + (y.1 - y.0).powi(2)).sqrt();
    let f = |a: f64, b: f64| (a * a + b * b).powf(0.5 * l);
    if dist >= diam || depth >= 48 {
        return integrate_2d(gl8(), x, y, f);
    }
    let (xm, ym) = (0.5 * (x.0 + x.1), 0.5 * (y.0 + y.1));
    adaptive_rect((x.0, xm), (y.0, ym), l, depth + 1)
        + adaptive_rect((xm, x.1), (y.0, ym), l, depth + 1)
        + adaptive_rect((x.0, xm), (ym, y.1), l, depth + 1)
        + adaptive_rect((xm, x.1), (ym, y.1), l, depth + 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn line(l: f64) -> Domain {
        Domain::spatial(1, l).unwrap()
    }

    #[test]
    fn evaluation() {
        let d = Domain::spatial(1, 10.0).unwrap();
        let w = Weight::power_at_origin(d, 0.0).unwrap();
        assert_eq!(w.eval(&[3.3]).unwrap(), 1.0);
        let w = Weight::power_at_origin(d, 0.5).unwrap();
        assert_eq!(w.eval(&[4.0]).unwrap(), 2.0);
        assert!(w.eval(&[11.0]).is_err());
        assert!(w.eval(&[0.0]).unwrap() > 0.0);
        let t = Table::new(vec![-10.0, 0.0, 10.0], vec![1.0, 5.0, 2.0]).unwrap();
        let w = Weight::tabulated(d, t).unwrap();
        assert_eq!(w.eval(&[0.0]).unwrap(), 5.0);
    }

    #[test]
    fn one_dimensional_power_integrals() {
        let w = Weight::power_at_origin(line(1.0), 0.5).unwrap();
        assert_relative_eq!(w.integral(&[-1.0], &[1.0]), 4.0 / 3.0, max_relative = 1e-15);
        assert_relative_eq!(
            w.integral(&[0.25], &[0.5]),
            (0.5f64.powf(1.5) - 0.25f64.powf(1.5)) / 1.5,
            max_relative = 1e-14
        );
        let w = Weight::power_at_origin(line(1.0), -1.0).unwrap();
        assert!(w.integral(&[-0.1], &[0.1]).is_infinite());
        assert!(w.integral(&[0.0], &[0.1]).is_infinite());
        assert_relative_eq!(w.integral(&[0.5], &[1.0]), 2f64.ln(), max_relative = 1e-15);
        // a narrow cell far away: no cancellation
        let w = Weight::power_at_origin(line(1.0), 0.7).unwrap();
        let v = w.integral(&[0.9], &[0.9 + 1e-12]);
        assert_relative_eq!(v, 0.9f64.powf(0.7) * 1e-12, max_relative = 1e-9);
    }

    #[test]
    fn two_dimensional_power_integrals() {
        let d = Domain::spatial(2, 1.0).unwrap();
        // int over the unit disc-free square [-1,1]^2 of |x|^0 = 4
        let w = Weight::power_at_origin(d, 1e-300).unwrap();
        assert_relative_eq!(w.integral(&[-1.0, -1.0], &[1.0, 1.0]), 4.0, max_relative = 1e-12);
        // |x|^2 = x^2 + y^2 has a polynomial antiderivative
        let w = Weight::power_at_origin(d, 2.0).unwrap();
        let exact = |x0: f64, x1: f64, y0: f64, y1: f64| {
            (x1.powi(3) - x0.powi(3)) / 3.0 * (y1 - y0) + (y1.powi(3) - y0.powi(3)) / 3.0 * (x1 - x0)
        };
        assert_relative_eq!(
            w.integral(&[-0.3, -0.2], &[0.5, 0.1]),
            exact(-0.3, 0.5, -0.2, 0.1),
            max_relative = 1e-13
        );
        assert_relative_eq!(
            w.integral(&[0.01, 0.02], &[0.5, 0.1]),
            exact(0.01, 0.5, 0.02, 0.1),
            max_relative = 1e-13
        );
        // |x|^-1 over the square [-a,a]^2 = 8 a asinh(1)
        let w = Weight::power_at_origin(d, -1.0).unwrap();
        let a = 0.3;
        assert_relative_eq!(
            w.integral(&[-a, -a], &[a, a]),
            8.0 * a * 1f64.asinh(),
            max_relative = 1e-12
        );
        let w = Weight::power_at_origin(d, -2.0).unwrap();
        assert!(w.integral(&[-a, 0.0], &[a, a]).is_infinite());
        assert!(w.integral(&[0.1, 0.1], &[a, a]).is_finite());
    }

    #[test]
    fn hat_moments_match_quadrature() {
        let d = Domain::temporal(2.0).unwrap();
        for l in [0.5, -0.5, 0.0, 1.5] {
            let w = Weight::power_at_origin(d, l).unwrap();
            for (a, b) in [(0.0, 0.1), (0.1, 0.3), (1.0, 1.01)] {
                let (left, right) = w.hat_moments(a, b);
                assert_relative_eq!(left + right, w.integral(&[a], &[b]), max_relative = 1e-13);
                // first moment about a
                let m1 = if a == 0.0 {
                    b.powf(l + 2.0) / (l + 2.0)
                } else {
                    (b.powf(l + 2.0) - a.powf(l + 2.0)) / (l + 2.0)
                };
                assert_relative_eq!(right * (b - a) + a * (left + right), m1, max_relative = 1e-10);
            }
        }
        let c = Weight::constant(d);
        assert_eq!(c.hat_moments(0.0, 1.0), (0.5, 0.5));
    }

    #[test]
    fn dual_weights() {
        let (d, pp) = dual_weight(&Weight::constant(line(1.0)), 3.0).unwrap();
        assert!(d.is_constant());
        assert_eq!(pp, 1.5);
        let w = Weight::power_at_origin(line(1.0), 0.5).unwrap();
        let (d, pp) = dual_weight(&w, 2.0).unwrap();
        assert_eq!(pp, 2.0);
        assert!(matches!(d.kind(), WeightKind::Power { exponent, .. } if *exponent == -0.5));
        assert!(dual_weight(&w, 1.0).is_err());
        assert!(dual_weight(&w, 0.5).is_err());
    }

    #[test]
    fn spec_strings() {
        let d = line(2.0);
        assert!(Weight::parse_spec("const", d).unwrap().is_constant());
        let w = Weight::parse_spec("power:0.5@1", d).unwrap();
        assert_eq!(w.eval(&[2.0]).unwrap(), 1.0);
        let w2 = Weight::parse_spec("power:-0.5", Domain::spatial(2, 1.0).unwrap()).unwrap();
        assert_eq!(w2.dim(), 2);
        assert!(Weight::parse_spec("cubic:1", d).is_err());
        assert!(Weight::parse_spec("power:x", d).is_err());
        assert!(Weight::parse_spec("table:/nonexistent/file", d).is_err());
    }
}
