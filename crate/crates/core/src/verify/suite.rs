//! Curated check lists.

use crate::error::{Error, Result};
use crate::spaces::BesselSymbol;

use super::report::Report;
use super::{run_check, CheckId, CheckSpec, Params, TolerancePolicy, Verdict};

pub const DEFAULT_SEED: u64 = 7;

/// Known suite ids.
pub const SUITES: [&str; 2] = ["fast", "full"];

/// Fractional orders of the identity checks.
const IDENTITY_ORDERS: [f64; 6] = [0.3, 0.5, 0.7, 1.2, 1.5, 1.8];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteOptions {
    pub seed: u64,
    pub bessel: BesselSymbol,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            bessel: BesselSymbol::Standard,
        }
    }
}

fn spec(check: CheckId, params: Vec<Params>, levels: &[usize]) -> Result<CheckSpec> {
    CheckSpec::new(check, params, levels.to_vec())
}

fn frac_identities() -> Result<CheckSpec> {
    let params = IDENTITY_ORDERS
        .iter()
        .flat_map(|&a| {
            ["semigroup", "inversion"]
                .into_iter()
                .map(move |v| Params::new().with_alpha(a).with_variant(v))
        })
        .collect();
    Ok(spec(CheckId::FracIdentities, params, &[512, 1024])?.with_policy(TolerancePolicy::exact(1e-6)))
}

fn ialpha_bound(full: bool) -> Result<CheckSpec> {
    let weights: &[&str] = if full { &["1", "power:0.5"] } else { &["power:0.5"] };
    let alphas: &[f64] = if full { &[0.3, 0.5, 1.5] } else { &[0.5] };
    let mut params = Vec::new();
    for &a in alphas {
        for &w in weights {
            for t in [0.25, 0.5, 1.0, 2.0, 4.0] {
                params.push(Params::new().with_alpha(a).with_q(2.0).with_w_t(w).with_final_time(t));
            }
        }
    }
    spec(CheckId::IalphaBound, params, &[256, 512])
}

fn solution_norm_bound(full: bool) -> Result<CheckSpec> {
    let alphas: &[f64] = if full { &[0.3, 0.5, 1.5] } else { &[0.5, 1.5] };
    let mut params = Vec::new();
    for &a in alphas {
        params.push(Params::new().with_alpha(a).with_p(2.0).with_q(2.0).with_gamma(0.0));
        params.push(
            Params::new()
                .with_alpha(a)
                .with_p(3.0)
                .with_q(2.0)
                .with_gamma(1.0)
                .with_w_x("power:0.5")
                .with_w_t("power:0.5"),
        );
    }
    let levels: &[usize] = if full { &[64, 128, 256] } else { &[32, 64, 128] };
    spec(CheckId::SolutionNormBound, params, levels)
}

/// `(p, w)` pairs of the spatial checks.
const SPATIAL_PAIRS: [(f64, &str); 3] = [(2.0, "1"), (2.0, "power:0.5"), (3.0, "1")];

fn lp_equivalence(full: bool) -> Result<CheckSpec> {
    let gammas: &[f64] = if full { &[-1.0, 0.0, 1.0] } else { &[0.0, 1.0] };
    let mut params = Vec::new();
    for (p, w) in SPATIAL_PAIRS {
        for &g in gammas {
            for side in ["upper", "lower"] {
                params.push(Params::new().with_p(p).with_w_x(w).with_gamma(g).with_variant(side));
            }
        }
    }
    // |x|^2 is not an A_2 weight
    params.push(
        Params::new()
            .with_p(2.0)
            .with_w_x("power:2")
            .with_gamma(0.0)
            .with_variant("upper")
            .expecting(Verdict::Diverging),
    );
    spec(CheckId::LpEquivalence, params, &[128, 256, 512])
}

fn interpolation() -> Result<CheckSpec> {
    let mut params = Vec::new();
    for theta in [0.25, 0.5, 0.75] {
        params.push(
            Params::new()
                .with_variant("interpolation")
                .with_theta(theta)
                .with_gamma(0.0)
                .with_p(2.0)
                .with_w_x("1")
                .with_gamma1(2.0)
                .with_p1(3.0)
                .with_w_x1("power:0.5"),
        );
        params.push(
            Params::new()
                .with_variant("interpolation")
                .with_theta(theta)
                .with_gamma(-1.0)
                .with_p(2.0)
                .with_w_x("power:0.5")
                .with_gamma1(1.0)
                .with_p1(2.0)
                .with_w_x1("power:-0.5"),
        );
    }
    for (nu, g) in [(-1.0, 0.0), (0.0, 1.0), (1.0, 2.0)] {
        for w in ["1", "power:0.5"] {
            params.push(
                Params::new()
                    .with_variant("embedding")
                    .with_gamma(nu)
                    .with_gamma1(g)
                    .with_p(2.0)
                    .with_w_x(w),
            );
        }
    }
    spec(CheckId::Interpolation, params, &[128, 256, 512])
}

fn multiplier() -> Result<CheckSpec> {
    let mut params = Vec::new();
    for (p, w) in SPATIAL_PAIRS {
        for g in [-1.0, 0.0, 1.0] {
            params.push(Params::new().with_p(p).with_w_x(w).with_gamma(g));
        }
    }
    spec(CheckId::Multiplier, params, &[128, 256, 512])
}

fn localization() -> Result<CheckSpec> {
    let mut params = Vec::new();
    for (p, w) in [(2.0, "1"), (3.0, "power:0.5")] {
        for g in [-1.0, 0.0, 1.0] {
            for side in ["upper", "lower"] {
                params.push(Params::new().with_p(p).with_w_x(w).with_gamma(g).with_variant(side));
            }
        }
    }
    spec(CheckId::Localization, params, &[128, 256, 512])
}

fn maximal_regularity(full: bool) -> Result<CheckSpec> {
    let mut params = Vec::new();
    if full {
        for alpha in [0.3, 0.5, 1.0 - 1e-3, 1.5] {
            for (p, q) in [(2.0, 2.0), (3.0, 2.0)] {
                for g in [0.0, 1.0, -1.0] {
                    for w_x in ["1", "power:0.5", "power:-0.5"] {
                        for w_t in ["1", "power:0.5"] {
                            for variant in ["constant", "variable"] {
                                params.push(
                                    Params::new()
                                        .with_alpha(alpha)
                                        .with_p(p)
                                        .with_q(q)
                                        .with_gamma(g)
                                        .with_w_x(w_x)
                                        .with_w_t(w_t)
                                        .with_final_time(1.0)
                                        .with_variant(variant),
                                );
                            }
                        }
                    }
                }
            }
        }
    } else {
        for alpha in [0.5, 1.5] {
            for (w_x, w_t) in [("1", "1"), ("power:0.5", "power:0.5")] {
                for variant in ["constant", "variable"] {
                    params.push(
                        Params::new()
                            .with_alpha(alpha)
                            .with_p(2.0)
                            .with_q(2.0)
                            .with_gamma(0.0)
                            .with_w_x(w_x)
                            .with_w_t(w_t)
                            .with_final_time(1.0)
                            .with_variant(variant),
                    );
                }
            }
        }
    }
    // independence of the horizon, constant coefficients
    let alphas: &[f64] = if full { &[0.3, 0.5, 1.5] } else { &[0.5] };
    for &alpha in alphas {
        for t in [2.0, 4.0] {
            params.push(
                Params::new()
                    .with_alpha(alpha)
                    .with_p(2.0)
                    .with_q(2.0)
                    .with_gamma(0.0)
                    .with_w_x("1")
                    .with_w_t("1")
                    .with_final_time(t)
                    .with_variant("constant"),
            );
        }
    }
    let levels: &[usize] = if full { &[64, 128, 256] } else { &[32, 64, 128] };
    spec(CheckId::MaximalRegularity, params, levels)
}

fn scaling_invariance(full: bool) -> Result<CheckSpec> {
    let mut params = Vec::new();
    for alpha in [0.5, 1.5] {
        for r in [0.5, 0.25] {
            for variant in ["constant", "variable"] {
                if !full && variant == "variable" {
                    continue;
                }
                params.push(Params::new().with_alpha(alpha).with_ratio(r).with_variant(variant));
            }
        }
    }
    let levels: &[usize] = if full { &[64, 128] } else { &[32, 64] };
    Ok(spec(CheckId::ScalingInvariance, params, levels)?.with_policy(TolerancePolicy::exact(1e-9)))
}

fn ap_membership() -> Result<CheckSpec> {
    let mut params = Vec::new();
    for lambda in [-0.9, 0.0, 0.5, 0.9] {
        params.push(Params::new().with_p(2.0).with_w_x(&format!("power:{lambda}")));
    }
    for lambda in [-1.0, 1.0, 2.0] {
        params.push(
            Params::new()
                .with_p(2.0)
                .with_w_x(&format!("power:{lambda}"))
                .expecting(Verdict::Diverging),
        );
    }
    params.push(Params::new().with_p(2.0).with_w_t("power:0.5"));
    params.push(Params::new().with_p(3.0).with_w_x("power:1.5"));
    spec(CheckId::ApMembership, params, &[6, 8, 10])
}

/// The check list of a suite.
pub fn suite(name: &str, options: &SuiteOptions) -> Result<Vec<CheckSpec>> {
    let full = match name {
        "fast" => false,
        "full" => true,
        _ => return Err(Error::UnknownSuite(name.into())),
    };
    let specs = vec![
        frac_identities()?,
        ialpha_bound(full)?,
        solution_norm_bound(full)?,
        lp_equivalence(full)?,
        interpolation()?,
        multiplier()?,
        localization()?,
        maximal_regularity(full)?,
        scaling_invariance(full)?,
        ap_membership()?,
    ];
    Ok(specs
        .into_iter()
        .map(|s| s.with_seed(options.seed).with_bessel(options.bessel))
        .collect())
}

/// Runs a suite with the default seed and the standard Bessel symbol.
pub fn run_suite(name: &str) -> Result<Report> {
    run_suite_with(name, &SuiteOptions::default())
}

pub fn run_suite_with(name: &str, options: &SuiteOptions) -> Result<Report> {
    let specs = suite(name, options)?;
    let mut checks = Vec::with_capacity(specs.len());
    for s in &specs {
        let started = std::time::Instant::now();
        let result = run_check(s)?;
        log::info!(
            "{}: {} in {:.1} s",
            s.check,
            if result.pass { "pass" } else { "FAIL" },
            started.elapsed().as_secs_f64()
        );
        checks.push(result);
    }
    Ok(Report::new(name, options.seed, options.bessel, checks))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suites_are_rejected() {
        for bad in ["", "nonexistent", "FAST"] {
            assert!(matches!(suite(bad, &SuiteOptions::default()), Err(Error::UnknownSuite(_))));
        }
        for name in SUITES {
            let specs = suite(name, &SuiteOptions::default()).unwrap();
            assert_eq!(specs.len(), CheckId::ALL.len());
            assert!(specs.iter().all(|s| s.validate().is_ok()));
        }
    }
}
