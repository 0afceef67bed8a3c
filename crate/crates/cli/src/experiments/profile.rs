use magic_core::entanglement::{ent_profile, measure_by_name, summarize_profile};
use magic_core::special::{build_omega, build_phi, build_w, PhaseOffset};
use magic_core::StateVector;

use super::sre::{momenta, theta_for};
use super::{Experiment, Report};
use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};
use crate::output::{Table, Value};

/// Entropy of the length-a block starting at each site k*. The summary
/// holds one row per profile with its max − min amplitude.
pub struct EntProfile;

pub const COLUMNS: &[&str] = &[
    "kind", "L", "ell", "theta", "a", "measure", "k_star", "entropy",
];
pub const SUMMARY_COLUMNS: &[&str] = &[
    "kind",
    "L",
    "ell",
    "theta",
    "a",
    "measure",
    "min",
    "max",
    "amplitude",
    "amplitude_times_l",
];

impl Experiment for EntProfile {
    fn name(&self) -> &'static str {
        "ent-profile"
    }

    fn run(&self, cfg: &ExperimentConfig) -> CliResult<Report> {
        let kind = cfg.name("kind", "phi");
        let sizes = cfg.sizes(&[9])?;
        let measures = cfg.names("measure", &["von_neumann"]);
        let measure_impls = measures
            .iter()
            .map(|m| measure_by_name(m))
            .collect::<magic_core::Result<Vec<_>>>()?;
        let mut report = Report::new(Table::new(COLUMNS));
        let mut summary = Table::new(SUMMARY_COLUMNS);

        for &n in &sizes {
            let a = cfg.opt_usize("a")?.unwrap_or((n - 1) / 2);
            if a == 0 || a >= n {
                return Err(CliError::Config(format!(
                    "a: need 1 ≤ a < L, got a={a}, L={n}"
                )));
            }
            for ell in momenta(cfg, n, &[1])? {
                let (state, theta): (StateVector, Option<f64>) = match kind.as_str() {
                    "phi" => {
                        let theta = theta_for(cfg, n)?;
                        (build_phi(n, ell, PhaseOffset(theta))?, Some(theta))
                    }
                    "omega" => (build_omega(n, ell)?, None),
                    "w" => (build_w(n, ell)?, None),
                    _ => {
                        return Err(CliError::Config(format!(
                            "kind: expected phi, omega or w, got `{kind}`"
                        )))
                    }
                };
                for (name, measure) in measures.iter().zip(&measure_impls) {
                    let profile = ent_profile(&state, a, measure.as_ref())?;
                    let head = |extra: Vec<Value>| -> Vec<Value> {
                        let mut row: Vec<Value> = vec![
                            kind.as_str().into(),
                            n.into(),
                            ell.ell().into(),
                            theta.into(),
                            a.into(),
                            name.as_str().into(),
                        ];
                        row.extend(extra);
                        row
                    };
                    for (k, &s) in profile.iter().enumerate() {
                        report.table.push(head(vec![(k + 1).into(), s.into()]))?;
                    }
                    let s = summarize_profile(&profile);
                    summary.push(head(vec![
                        s.min.into(),
                        s.max.into(),
                        s.amplitude.into(),
                        s.amplitude_times_l.into(),
                    ]))?;
                }
            }
        }
        report.summary = Some(summary);
        Ok(report)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(pairs: &[(&str, &str)]) -> Report {
        let mut cfg = ExperimentConfig::new("ent-profile");
        for (k, v) in pairs {
            cfg.set(k, v).unwrap();
        }
        EntProfile.run(&cfg).unwrap()
    }

    #[test]
    fn phi_profile_oscillates() {
        let r = run(&[("L", "9"), ("ell", "1"), ("theta", "2"), ("a", "4")]);
        assert_eq!(r.table.len(), 9);
        let s = r.summary.unwrap();
        assert!(s.get(0, "amplitude").unwrap().as_f64().unwrap() > 1e-3);
    }

    #[test]
    fn eigenstate_profile_is_flat() {
        let r = run(&[
            ("kind", "omega"),
            ("L", "7"),
            ("ell", "all"),
            ("measure", "renyi2,von_neumann"),
        ]);
        let s = r.summary.unwrap();
        assert_eq!(s.len(), 14);
        for amp in s.floats("amplitude") {
            assert!(amp.unwrap() < 1e-10);
        }
    }
}
