use magic_core::registry::{estimator_by_name, SreSubject};
use magic_core::special::{build_omega, build_phi, build_w, PhaseOffset};
use magic_core::xyz::ChainParams;
use magic_core::{MomentumIndex, StateVector};
use rayon::prelude::*;

use super::{solver_from, Experiment, Report};
use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};
use crate::output::{Table, Value};

/// SRE of one state by several estimators. Columns: kind, L, ell, theta,
/// method, m2, raw_moment, delta (m2 minus the first method's value).
pub struct Sre;

pub const COLUMNS: &[&str] = &[
    "kind",
    "L",
    "ell",
    "theta",
    "method",
    "m2",
    "raw_moment",
    "delta",
];
pub const DEFAULT_AGREEMENT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    W,
    Omega,
    Phi,
    Ground,
}

impl Kind {
    fn parse(s: &str) -> CliResult<Self> {
        match s {
            "w" => Ok(Kind::W),
            "omega" => Ok(Kind::Omega),
            "phi" => Ok(Kind::Phi),
            "ground" => Ok(Kind::Ground),
            _ => Err(CliError::Config(format!(
                "kind: expected w, omega, phi or ground, got `{s}`"
            ))),
        }
    }

    fn default_methods(self) -> &'static [&'static str] {
        match self {
            Kind::W | Kind::Omega => &["brute", "structured", "closed"],
            Kind::Phi | Kind::Ground => &["brute"],
        }
    }
}

/// θ for φ states; `auto` or absent means (L−1)/4.
pub(crate) fn theta_for(cfg: &ExperimentConfig, n: usize) -> CliResult<f64> {
    match cfg.raw("theta") {
        None | Some("auto") => Ok((n as f64 - 1.0) / 4.0),
        Some(_) => cfg.float("theta", 0.0),
    }
}

pub(crate) fn momenta(
    cfg: &ExperimentConfig,
    n: usize,
    default: &[i64],
) -> CliResult<Vec<MomentumIndex>> {
    match cfg.ells(default)? {
        None => Ok(MomentumIndex::all(n)?),
        Some(ells) => Ok(ells
            .into_iter()
            .map(|e| MomentumIndex::new(e, n))
            .collect::<magic_core::Result<_>>()?),
    }
}

struct Point {
    n: usize,
    ell: Option<MomentumIndex>,
    theta: Option<f64>,
}

impl Experiment for Sre {
    fn name(&self) -> &'static str {
        "sre"
    }

    fn run(&self, cfg: &ExperimentConfig) -> CliResult<Report> {
        let kind = Kind::parse(&cfg.name("kind", "w"))?;
        let sizes = cfg.sizes(&[9])?;
        let methods = cfg.names("method", kind.default_methods());
        if methods.is_empty() {
            return Err(CliError::Config("method: empty list".into()));
        }
        let estimators = methods
            .iter()
            .map(|m| estimator_by_name(m))
            .collect::<magic_core::Result<Vec<_>>>()?;
        let tol = cfg.positive("tol", DEFAULT_AGREEMENT_TOL)?;

        let mut points = Vec::new();
        for &n in &sizes {
            match kind {
                Kind::Ground => points.push(Point {
                    n,
                    ell: None,
                    theta: None,
                }),
                _ => {
                    let default: &[i64] = if kind == Kind::Phi { &[1] } else { &[0] };
                    let theta = if kind == Kind::Phi {
                        Some(theta_for(cfg, n)?)
                    } else {
                        None
                    };
                    for ell in momenta(cfg, n, default)? {
                        points.push(Point {
                            n,
                            ell: Some(ell),
                            theta,
                        });
                    }
                }
            }
        }
        let ground = if kind == Kind::Ground {
            Some((
                solver_from(cfg)?,
                cfg.float("jy", 0.33)?,
                cfg.float("jz", 0.0)?,
                cfg.float("h", 0.1)?,
            ))
        } else {
            None
        };

        let results: Vec<CliResult<Vec<Vec<Value>>>> = points
            .par_iter()
            .map(|p| {
                let (state, ell, w_equivalent): (
                    StateVector,
                    MomentumIndex,
                    Option<MomentumIndex>,
                ) = match kind {
                    Kind::W => {
                        let ell = p.ell.expect("set for w");
                        (build_w(p.n, ell)?, ell, Some(ell))
                    }
                    Kind::Omega => {
                        let ell = p.ell.expect("set for omega");
                        (build_omega(p.n, ell)?, ell, Some(ell))
                    }
                    Kind::Phi => {
                        let ell = p.ell.expect("set for phi");
                        (
                            build_phi(p.n, ell, PhaseOffset(p.theta.unwrap_or(0.0)))?,
                            ell,
                            None,
                        )
                    }
                    Kind::Ground => {
                        let (solver, jy, jz, h) = ground.as_ref().expect("set for ground");
                        let params = ChainParams::frustrated(p.n, *jy, *jz, *h)?;
                        let rep = solver.ground_manifold(&params)?.representative().clone();
                        (rep.state, rep.momentum, None)
                    }
                };
                let subject = SreSubject {
                    n_sites: p.n,
                    state: Some(&state),
                    w_equivalent,
                };
                let values = estimators
                    .iter()
                    .map(|e| e.estimate(&subject))
                    .collect::<magic_core::Result<Vec<_>>>()?;
                let reference = values[0].value;
                Ok(values
                    .iter()
                    .zip(&methods)
                    .map(|(v, m)| {
                        vec![
                            cfg.name("kind", "w").into(),
                            p.n.into(),
                            ell.ell().into(),
                            p.theta.into(),
                            m.as_str().into(),
                            v.value.into(),
                            v.raw_moment.into(),
                            (v.value - reference).into(),
                        ]
                    })
                    .collect())
            })
            .collect();

        let mut report = Report::new(Table::new(COLUMNS));
        for rows in results {
            for row in rows? {
                let delta = row[7].as_f64().unwrap_or(0.0);
                if delta.abs() > tol {
                    report.breaches.push(format!(
                        "L={} ell={} method={}: delta {delta:e} exceeds {tol:e}",
                        row[1], row[2], row[4]
                    ));
                }
                report.table.push(row)?;
            }
        }
        Ok(report)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(pairs: &[(&str, &str)]) -> CliResult<Report> {
        let mut cfg = ExperimentConfig::new("sre");
        for (k, v) in pairs {
            cfg.set(k, v).unwrap();
        }
        Sre.run(&cfg)
    }

    #[test]
    fn w_triad_agrees() {
        let r = run(&[("L", "9"), ("ell", "0")]).unwrap();
        assert_eq!(r.table.len(), 3);
        let m2 = r.table.floats("m2");
        for v in &m2 {
            assert!((v.unwrap() - m2[0].unwrap()).abs() < 1e-10);
        }
        assert_eq!(r.exit_code(), 0);
    }

    #[test]
    fn small_w_value() {
        let r = run(&[("L", "3"), ("ell", "1"), ("method", "brute")]).unwrap();
        let v = r.table.floats("m2")[0].unwrap();
        assert!((v - 1.169925).abs() < 1e-6);
    }

    #[test]
    fn omega_matches_closed_w_value() {
        let r = run(&[("kind", "omega"), ("L", "7"), ("ell", "1")]).unwrap();
        let m2 = r.table.floats("m2");
        assert!((m2[0].unwrap() - m2[2].unwrap()).abs() < 1e-10);
    }

    #[test]
    fn phi_defaults_and_rejections() {
        let r = run(&[("kind", "phi"), ("L", "5")]).unwrap();
        assert_eq!(r.table.len(), 1);
        assert_eq!(r.table.get(0, "theta").unwrap().as_f64(), Some(1.0));
        assert!(run(&[("kind", "phi"), ("L", "5"), ("method", "closed")]).is_err());
        assert!(run(&[("kind", "phi"), ("L", "5"), ("ell", "0")]).is_err());
        assert!(run(&[("L", "5"), ("ell", "3")]).is_err());
        assert!(run(&[("L", "17"), ("method", "brute")]).is_err());
    }

    #[test]
    fn ground_state_row() {
        let r = run(&[("kind", "ground"), ("L", "5")]).unwrap();
        assert_eq!(r.table.len(), 1);
        assert!(r.table.floats("m2")[0].unwrap() > 0.0);
    }
}
