use magic_core::xyz::{find_hstar, HstarOptions};
use rayon::prelude::*;

use super::{note_failure, solver_from, Experiment, Report};
use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};
use crate::output::{Table, Value};

/// Critical field over a (Jy, Jz) grid. One row per (L, Jy, Jz); a failed
/// point keeps its row with the message in `error` and no h*.
pub struct HstarMap;

pub const COLUMNS: &[&str] = &[
    "L",
    "jy",
    "jz",
    "hstar",
    "bracket_width",
    "status",
    "nonfrustrated_region",
    "ell_below",
    "evaluations",
    "error",
];

impl Experiment for HstarMap {
    fn name(&self) -> &'static str {
        "hstar-map"
    }

    fn run(&self, cfg: &ExperimentConfig) -> CliResult<Report> {
        let sizes = cfg.sizes(&[11])?;
        let jys = cfg.grid("jy", &[0.33])?;
        let jzs = cfg.grid("jz", &[0.0])?;
        for &j in jys.iter().chain(&jzs) {
            if j.is_nan() || j.abs() >= 1.0 {
                return Err(CliError::Config(format!("coupling {j} outside (−1, 1)")));
            }
        }
        let opts = HstarOptions {
            tol: cfg.positive("tol", HstarOptions::default().tol)?,
            h_max: cfg.positive("h_max", HstarOptions::default().h_max)?,
            ..HstarOptions::default()
        };
        let solver = solver_from(cfg)?;

        let mut points: Vec<(usize, f64, f64)> = Vec::new();
        for &n in &sizes {
            for &jy in &jys {
                points.extend(jzs.iter().map(|&jz| (n, jy, jz)));
            }
        }
        let results: Vec<_> = points
            .par_iter()
            .map(|&(n, jy, jz)| find_hstar(jy, jz, n, &opts, solver.as_ref()))
            .collect();

        let mut report = Report::new(Table::new(COLUMNS));
        for (&(n, jy, jz), res) in points.iter().zip(results) {
            let region = jz < -jy;
            let row: Vec<Value> = match res {
                Ok(r) => {
                    let ell_below = r.below.as_ref().map(|m| m.representative().momentum.ell());
                    vec![
                        n.into(),
                        jy.into(),
                        jz.into(),
                        r.hstar.into(),
                        r.bracket_width.into(),
                        r.status.name().into(),
                        region.into(),
                        ell_below.into(),
                        r.evaluations.into(),
                        Value::Missing,
                    ]
                }
                Err(e) => {
                    let msg =
                        note_failure(&mut report.failures, format!("L={n} jy={jy} jz={jz}"), &e);
                    vec![
                        n.into(),
                        jy.into(),
                        jz.into(),
                        Value::Missing,
                        Value::Missing,
                        "error".into(),
                        region.into(),
                        Value::Missing,
                        Value::Missing,
                        msg.into(),
                    ]
                }
            };
            report.table.push(row)?;
        }
        Ok(report)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use magic_core::xyz::HstarStatus;

    fn cfg(pairs: &[(&str, &str)]) -> ExperimentConfig {
        let mut cfg = ExperimentConfig::new("hstar-map");
        for (k, v) in pairs {
            cfg.set(k, v).unwrap();
        }
        cfg
    }

    #[test]
    fn small_grid_rows_in_order() {
        let r = HstarMap
            .run(&cfg(&[("L", "5"), ("jy", "0.33,0.5"), ("jz", "-0.6,0")]))
            .unwrap();
        assert_eq!(r.table.len(), 4);
        let jy = r.table.floats("jy");
        let jz = r.table.floats("jz");
        assert_eq!((jy[0], jz[0]), (Some(0.33), Some(-0.6)));
        assert_eq!((jy[3], jz[3]), (Some(0.5), Some(0.0)));
        // (0.33, −0.6) lies in Jz < −Jy
        assert_eq!(r.table.get(0, "hstar").unwrap().as_f64(), Some(0.0));
        assert_eq!(
            r.table.get(0, "nonfrustrated_region"),
            Some(&Value::Bool(true))
        );
        assert_eq!(
            r.table.get(0, "status"),
            Some(&Value::Text(HstarStatus::NoFinitePhase.name().to_string()))
        );
        for h in r.table.floats("hstar") {
            assert!(h.unwrap() >= 0.0);
        }
        assert!(r.table.get(1, "hstar").unwrap().as_f64().unwrap() > 0.0);
    }

    #[test]
    fn empty_grid_gives_empty_table() {
        let r = HstarMap.run(&cfg(&[("jy", "")])).unwrap();
        assert!(r.table.is_empty());
        assert_eq!(r.exit_code(), 0);
    }

    #[test]
    fn rejects_out_of_range_couplings() {
        assert!(HstarMap.run(&cfg(&[("jy", "1.2")])).is_err());
    }
}
