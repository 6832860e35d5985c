//! Named verification suites, each a fixed list of checks for one `p`.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::complex::HolderPair;
use crate::density::{p2_closed_form_check, positivity_scan};
use crate::expansion::{
    absolute_monotonicity_check, interior_grid, series_check, unrescaled_derivative_scan,
};
use crate::hardy::{
    averaged_corpus_check, corpus_check, tapered_linear, verify_inequality, WeightChoice,
};
use crate::herglotz;
use crate::moments::{
    agreement_check, closed_form_check, moments_combinatorial, positivity_decay_check,
    sum_rule_check,
};
use crate::report::VerificationReport;
use crate::weight;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    Representation,
    Herglotz,
    Symmetry,
    Positivity,
    Inequality,
    Monotonicity,
    Asymptotics,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Representation,
        Suite::Herglotz,
        Suite::Symmetry,
        Suite::Positivity,
        Suite::Inequality,
        Suite::Monotonicity,
        Suite::Asymptotics,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Representation => "representation",
            Suite::Herglotz => "herglotz",
            Suite::Symmetry => "symmetry",
            Suite::Positivity => "positivity",
            Suite::Inequality => "inequality",
            Suite::Monotonicity => "monotonicity",
            Suite::Asymptotics => "asymptotics",
        }
    }

    pub fn parse(name: &str) -> Option<Suite> {
        Suite::ALL.into_iter().find(|s| s.name() == name)
    }

    /// Parses a comma list of suite names; `all` selects every suite.
    pub fn parse_list(list: &str) -> core::result::Result<Vec<Suite>, String> {
        let mut out: Vec<Suite> = Vec::new();
        for item in list.split(',').map(str::trim) {
            let chosen: Vec<Suite> = if item == "all" {
                Suite::ALL.to_vec()
            } else {
                let s =
                    Suite::parse(item).ok_or_else(|| alloc::format!("unknown suite '{item}'"))?;
                alloc::vec![s]
            };
            for s in chosen {
                if !out.contains(&s) {
                    out.push(s);
                }
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Multiplies every nonzero threshold.
    pub tolerance_scale: f64,
    pub representation_points: usize,
    pub boundary_points: usize,
    pub herglotz_samples: usize,
    pub symmetry_points: usize,
    pub weight_horizon: u64,
    pub corpus_size: usize,
    pub corpus_max_len: usize,
    pub averaged_horizon: usize,
    pub max_order: u32,
    pub monotonicity_points: usize,
    pub moment_kmax: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 1,
            tolerance_scale: 1.0,
            representation_points: 100,
            boundary_points: 50,
            herglotz_samples: 10_000,
            symmetry_points: 1000,
            weight_horizon: 10_000,
            corpus_size: 1000,
            corpus_max_len: 200,
            averaged_horizon: 10_000,
            max_order: 8,
            monotonicity_points: 20,
            moment_kmax: 20,
        }
    }
}

pub fn run_suite(hp: &HolderPair, suite: Suite, cfg: &SuiteConfig) -> Vec<VerificationReport> {
    let mut reports = match suite {
        Suite::Representation => {
            let mut r = alloc::vec![
                herglotz::representation_check(hp, cfg.representation_points),
                herglotz::boundary_check(hp, cfg.boundary_points),
                agreement_check(hp, cfg.moment_kmax),
                closed_form_check(hp),
                sum_rule_check(hp, cfg.moment_kmax),
            ];
            if hp.p() == 2.0 {
                r.push(p2_closed_form_check(1000));
            }
            r
        }
        Suite::Herglotz => alloc::vec![herglotz::herglotz_scan(hp, cfg.herglotz_samples)],
        Suite::Symmetry => alloc::vec![
            herglotz::symmetry_check(hp, cfg.symmetry_points, cfg.seed),
            herglotz::real_axis_check(hp, 2.0),
        ],
        Suite::Positivity => alloc::vec![
            positivity_scan(hp, 1000),
            positivity_decay_check(hp, &moments_combinatorial(hp, cfg.moment_kmax)),
        ],
        Suite::Inequality => {
            let n = cfg.corpus_size;
            let len = cfg.corpus_max_len;
            alloc::vec![
                weight::improvement_margin(hp, cfg.weight_horizon),
                corpus_check(hp, cfg.seed, n, len, WeightChoice::Optimal),
                corpus_check(hp, cfg.seed, n, len, WeightChoice::TruncatedSeries(3)),
                verify_inequality(hp, &tapered_linear(50, 50), WeightChoice::Optimal),
                averaged_corpus_check(hp, cfg.seed, n, len, cfg.averaged_horizon),
            ]
        }
        Suite::Monotonicity => {
            let grid = interior_grid(cfg.monotonicity_points);
            let mv = moments_combinatorial(hp, 64);
            alloc::vec![
                absolute_monotonicity_check(hp, cfg.max_order, &grid),
                series_check(hp, &[0.1, 0.3, 0.5, 0.7], &[4, 8, 16, 32, 64], &mv),
            ]
        }
        Suite::Asymptotics => alloc::vec![
            herglotz::asymptotic_check(hp),
            weight::asymptotic_check(hp, 1_000_000, 2.0),
        ],
    };
    if cfg.tolerance_scale != 1.0 {
        for r in &mut reports {
            r.scale_tolerance(cfg.tolerance_scale);
        }
    }
    reports
}

/// A named set of numbers reported without a pass/fail outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    pub name: String,
    pub parameters: Vec<(String, f64)>,
}

impl Diagnostic {
    fn new(name: &str) -> Self {
        Diagnostic {
            name: name.to_string(),
            parameters: Vec::new(),
        }
    }

    fn param(mut self, name: &str, value: f64) -> Self {
        self.parameters.push((name.to_string(), value));
        self
    }
}

/// Exploratory numbers: signs of derivatives of the unrescaled weight
/// `x -> omega_p(1/x)`, the moment partial sum against `omega_p(1)`, and
/// the saturation ratio of the tapered-linear sequence.
pub fn diagnostics(hp: &HolderPair, cfg: &SuiteConfig) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let grid = interior_grid(cfg.monotonicity_points);
    match unrescaled_derivative_scan(hp, cfg.max_order, &grid) {
        Ok(scans) => {
            for s in scans {
                out.push(
                    Diagnostic::new("diagnostic.unrescaled_derivative")
                        .param("p", hp.p())
                        .param("order", s.order as f64)
                        .param("min_value", s.min_value)
                        .param("argmin", s.argmin)
                        .param("negatives", s.negatives as f64),
                );
            }
        }
        Err(_) => out.push(
            Diagnostic::new("diagnostic.unrescaled_derivative")
                .param("p", hp.p())
                .param("min_value", f64::NAN),
        ),
    }
    let rule = sum_rule_check(hp, cfg.moment_kmax);
    let mut d = Diagnostic::new("diagnostic.moment_partial_sum").param("p", hp.p());
    for key in ["omega_at_1", "partial_sum", "partial_terms"] {
        d = d.param(key, rule.parameter(key).unwrap_or(f64::NAN));
    }
    out.push(d);
    let taper = verify_inequality(hp, &tapered_linear(50, 50), WeightChoice::Optimal);
    out.push(
        Diagnostic::new("diagnostic.tapered_saturation")
            .param("p", hp.p())
            .param("ratio", taper.parameter("saturation").unwrap_or(f64::NAN)),
    );
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(Suite::parse(s.name()), Some(s));
        }
        assert_eq!(Suite::parse("nope"), None);
        assert_eq!(Suite::parse_list("all").unwrap(), Suite::ALL.to_vec());
        assert_eq!(
            Suite::parse_list("symmetry,herglotz,symmetry").unwrap(),
            alloc::vec![Suite::Symmetry, Suite::Herglotz]
        );
        assert!(Suite::parse_list("herglotz,bogus").is_err());
    }

    #[test]
    fn small_suites_pass() {
        let hp = HolderPair::new(2.0).unwrap();
        let cfg = SuiteConfig {
            herglotz_samples: 200,
            symmetry_points: 100,
            ..SuiteConfig::default()
        };
        for suite in [
            Suite::Herglotz,
            Suite::Symmetry,
            Suite::Positivity,
            Suite::Asymptotics,
        ] {
            for r in run_suite(&hp, suite, &cfg) {
                assert!(r.passed, "{r:?}");
            }
        }
    }

    #[test]
    fn tolerance_scale_is_applied() {
        let hp = HolderPair::new(3.0).unwrap();
        let cfg = SuiteConfig {
            symmetry_points: 50,
            tolerance_scale: 10.0,
            ..SuiteConfig::default()
        };
        let r = &run_suite(&hp, Suite::Symmetry, &cfg)[0];
        assert_eq!(r.threshold, 1e-11);
    }

    #[test]
    fn diagnostics_are_reported() {
        let hp = HolderPair::new(2.5).unwrap();
        let cfg = SuiteConfig {
            max_order: 3,
            monotonicity_points: 5,
            ..SuiteConfig::default()
        };
        let d = diagnostics(&hp, &cfg);
        assert_eq!(d.len(), 4 + 2);
        let ratio = d.last().unwrap().parameters[1].1;
        assert!(ratio > 0.0 && ratio < 1.0);
    }
}
