//! Seeded test families: the functions over which worst-case ratios are taken.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::frac_calc::TimeGrid;
use crate::spaces::{Field, SpaceGrid, SpaceTimeField};

/// Number of random trigonometric members.
pub const TRIG_MEMBERS: usize = 30;

/// A named member of a test family.
#[derive(Debug, Clone)]
pub struct Member<F> {
    pub name: String,
    pub value: F,
}

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

fn smooth_bump(s: f64) -> f64 {
    if s.abs() < 1.0 {
        (-1.0 / (1.0 - s * s)).exp()
    } else {
        0.0
    }
}

/// Probabilists' Hermite polynomial `He_k`.
fn hermite(k: usize, x: f64) -> f64 {
    let (mut a, mut b) = (1.0, x);
    if k == 0 {
        return a;
    }
    for j in 1..k {
        let c = x * b - j as f64 * a;
        a = b;
        b = c;
    }
    b
}

/// Random trigonometric sums under a Gaussian envelope.
#[derive(Debug, Clone)]
struct TrigSpec {
    shift: f64,
    terms: Vec<(f64, f64, f64)>,
}

fn trig_specs(seed: u64, half_width: f64) -> Vec<TrigSpec> {
    let mut r = rng(seed, 1);
    (0..TRIG_MEMBERS)
        .map(|_| {
            let count = r.gen_range(1..=6);
            let shift = r.gen_range(-0.0625..0.0625) * half_width;
            let terms = (0..count)
                .map(|_| (r.gen_range(-1.0..1.0), r.gen_range(0.0..16.0), r.gen_range(0.0..std::f64::consts::TAU)))
                .collect();
            TrigSpec { shift, terms }
        })
        .collect()
}

/// The 40-member spatial family on a 1-D grid of half-width `L`:
///
/// * 30 seeded trigonometric sums `sum a_k cos(omega_k x + phi_k)` times a
///   Gaussian of width `L / 16` shifted by at most `L / 16`, with `omega_k < 16`;
/// * 5 compactly supported bumps centered at the origin with radii
///   `L/16`, `L/32`, `4h`, `2h`, `h`;
/// * 5 Hermite functions `He_k(x/s) exp(-x^2 / 2s^2)`, `k = 0..4`, `s = L/16`.
///
/// All members are negligible (below `1e-9` of their peak) outside
/// `|x| <= L/2`, apart from the wide bumps which are supported there.
pub fn spatial_family(grid: &SpaceGrid, seed: u64) -> Vec<Member<Field<f64>>> {
    assert_eq!(grid.dim(), 1, "test families are one-dimensional");
    let big_l = grid.half_width();
    let h = grid.spacing();
    let sigma = big_l / 16.0;
    let mut out = Vec::with_capacity(40);
    for (k, spec) in trig_specs(seed, big_l).into_iter().enumerate() {
        let value = Field::from_fn(*grid, |x: &[f64]| {
            let y = x[0] - spec.shift;
            let envelope = (-0.5 * (y / sigma).powi(2)).exp();
            envelope * spec.terms.iter().map(|&(a, w, ph)| a * (w * y + ph).cos()).sum::<f64>()
        });
        out.push(Member {
            name: format!("trig-{k:02}"),
            value,
        });
    }
    let radii = [
        ("bump-L/16", big_l / 16.0),
        ("bump-L/32", big_l / 32.0),
        ("bump-4h", 4.0 * h),
        ("bump-2h", 2.0 * h),
        // the nodes at +-h sit on the edge of the support: a discrete delta
        ("bump-h", h),
    ];
    for (name, r) in radii {
        out.push(Member {
            name: name.into(),
            value: Field::from_fn(*grid, |x: &[f64]| smooth_bump(x[0] / r)),
        });
    }
    for k in 0..5 {
        out.push(Member {
            name: format!("hermite-{k}"),
            value: Field::from_fn(*grid, |x: &[f64]| {
                let s = x[0] / sigma;
                hermite(k, s) * (-0.5 * s * s).exp()
            }),
        });
    }
    out
}

/// Time profiles on `[0, T]`, in units of `T` so that the family dilates
/// with the horizon:
///
/// * 30 seeded sums `c_0 + sum a_k cos(omega_k t / T + phi_k)`, `omega_k < 16`;
/// * 5 bumps centered at `T/2` with radii `T/2`, `T/4`, `4 dt`, `2 dt`, `dt`
///   (`dt = T / N`);
/// * 5 powers `t^beta`, `beta in {0, 0.5, 1, 2, 3}`.
pub fn time_family(tgrid: &TimeGrid<f64>, seed: u64) -> Vec<Member<Vec<f64>>> {
    let big_t = tgrid.final_time();
    let dt = big_t / tgrid.steps() as f64;
    let nodes = tgrid.nodes();
    let mut r = rng(seed, 2);
    let mut out = Vec::with_capacity(40);
    for k in 0..TRIG_MEMBERS {
        let c0: f64 = r.gen_range(-1.0..1.0);
        let count = r.gen_range(1..=4);
        let terms: Vec<(f64, f64, f64)> = (0..count)
            .map(|_| (r.gen_range(-1.0..1.0), r.gen_range(0.0..16.0), r.gen_range(0.0..std::f64::consts::TAU)))
            .collect();
        out.push(Member {
            name: format!("trig-{k:02}"),
            value: nodes
                .iter()
                .map(|&t| c0 + terms.iter().map(|&(a, w, ph)| a * (w * t / big_t + ph).cos()).sum::<f64>())
                .collect(),
        });
    }
    let mid = 0.5 * big_t;
    for (name, rad) in [
        ("bump-T/2", 0.5 * big_t),
        ("bump-T/4", 0.25 * big_t),
        ("bump-4dt", 4.0 * dt),
        ("bump-2dt", 2.0 * dt),
        ("bump-dt", dt),
    ] {
        out.push(Member {
            name: name.into(),
            value: nodes.iter().map(|&t| smooth_bump((t - mid) / rad)).collect(),
        });
    }
    for beta in [0.0, 0.5, 1.0, 2.0, 3.0] {
        out.push(Member {
            name: format!("power-{beta}"),
            value: nodes.iter().map(|&t| t.powf(beta)).collect(),
        });
    }
    out
}

/// Space-time forcings `sum_j g_j(t) phi_j(x)` for solver-based checks.
///
/// Eight members, built from the spatial family (Gaussian-enveloped
/// trigonometric sums, the `L/16` and `4h` bumps, a Hermite function) and
/// smooth time profiles on `[0, T]` in units of `T`: constants, ramps,
/// oscillations and a bump.
pub fn forcing_family(tgrid: &TimeGrid<f64>, sgrid: &SpaceGrid, seed: u64) -> Vec<Member<SpaceTimeField<f64>>> {
    let space = spatial_family(sgrid, seed);
    let pick = |name: &str| {
        space
            .iter()
            .find(|m| m.name == name)
            .map(|m| m.value.clone())
            .expect("family member")
    };
    let big_t = tgrid.final_time();
    let profiles: Vec<(&str, Box<dyn Fn(f64) -> f64>)> = vec![
        ("const", Box::new(|_| 1.0)),
        ("ramp", Box::new(move |t| t / big_t)),
        ("wave", Box::new(move |t| (std::f64::consts::TAU * t / big_t).sin())),
        ("bump", Box::new(move |t| smooth_bump((t - 0.5 * big_t) / (0.25 * big_t)))),
    ];
    let combos: [(&str, &[(&str, usize)]); 8] = [
        ("trig-00*const", &[("trig-00", 0)]),
        ("trig-01*ramp", &[("trig-01", 1)]),
        ("trig-02*wave+trig-03*const", &[("trig-02", 2), ("trig-03", 0)]),
        ("bump-L/16*const", &[("bump-L/16", 0)]),
        ("bump-L/16*bump", &[("bump-L/16", 3)]),
        ("bump-4h*ramp", &[("bump-4h", 1)]),
        ("hermite-2*wave+bump-4h*const", &[("hermite-2", 2), ("bump-4h", 0)]),
        ("trig-04*bump+hermite-1*ramp", &[("trig-04", 3), ("hermite-1", 1)]),
    ];
    combos
        .iter()
        .map(|(name, parts)| {
            let pieces: Vec<(Field<f64>, &dyn Fn(f64) -> f64)> =
                parts.iter().map(|&(s, t)| (pick(s), profiles[t].1.as_ref())).collect();
            let slices = tgrid
                .nodes()
                .iter()
                .map(|&t| {
                    let mut acc = vec![0.0; sgrid.len()];
                    for (phi, g) in &pieces {
                        let s = g(t);
                        for (a, &v) in acc.iter_mut().zip(phi.values()) {
                            *a += s * v;
                        }
                    }
                    Field::new(*sgrid, acc).expect("finite forcing")
                })
                .collect();
            Member {
                name: (*name).into(),
                value: SpaceTimeField::new(tgrid.clone(), slices).expect("matching grids"),
            }
        })
        .collect()
}
