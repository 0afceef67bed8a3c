//! Experiments selectable by subcommand name.

use std::io::Write;
use std::path::PathBuf;

use magic_core::entanglement::{block_entropy, Bipartition, Renyi2};
use magic_core::pauli::sre_brute;
use magic_core::xyz::{solver_by_name, SpectrumSolver};
use magic_core::StateVector;

use crate::config::ExperimentConfig;
use crate::error::{is_solver_failure, CliError, CliResult, EXIT_OK, EXIT_SOLVER, EXIT_TOLERANCE};
use crate::output::{summary_path, write_text, Table};

pub mod hstar_map;
pub mod jump;
pub mod profile;
pub mod ratio;
pub mod sre;
pub mod verify;

pub use hstar_map::HstarMap;
pub use jump::JumpScaling;
pub use profile::EntProfile;
pub use ratio::Ratio;
pub use sre::Sre;
pub use verify::Verify;

#[derive(Debug, Clone)]
pub struct Report {
    pub table: Table,
    /// Derived quantities over the whole run, such as fitted exponents.
    pub summary: Option<Table>,
    /// Comparisons that exceeded their tolerance.
    pub breaches: Vec<String>,
    /// Parameter points whose numerics failed.
    pub failures: Vec<String>,
}

impl Report {
    pub fn new(table: Table) -> Self {
        Self {
            table,
            summary: None,
            breaches: Vec::new(),
            failures: Vec::new(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        if !self.failures.is_empty() {
            EXIT_SOLVER
        } else if !self.breaches.is_empty() {
            EXIT_TOLERANCE
        } else {
            EXIT_OK
        }
    }
}

pub trait Experiment: Send + Sync {
    fn name(&self) -> &'static str;
    fn run(&self, cfg: &ExperimentConfig) -> CliResult<Report>;
}

pub fn experiment_names() -> &'static [&'static str] {
    &[
        "sre",
        "hstar-map",
        "jump-scaling",
        "ratio",
        "ent-profile",
        "verify",
    ]
}

pub fn experiment_by_name(name: &str) -> CliResult<Box<dyn Experiment>> {
    match name {
        "sre" => Ok(Box::new(Sre)),
        "hstar-map" => Ok(Box::new(HstarMap)),
        "jump-scaling" => Ok(Box::new(JumpScaling)),
        "ratio" => Ok(Box::new(Ratio)),
        "ent-profile" => Ok(Box::new(EntProfile)),
        "verify" => Ok(Box::new(Verify)),
        _ => Err(CliError::Config(format!("unknown experiment `{name}`"))),
    }
}

/// Runs the configured experiment on a pool of `workers` threads.
pub fn run(cfg: &ExperimentConfig) -> CliResult<Report> {
    let experiment = experiment_by_name(cfg.experiment())?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers()?)
        .build()
        .map_err(|e| CliError::Config(format!("workers: {e}")))?;
    pool.install(|| experiment.run(cfg))
}

/// Writes the table, and the summary next to it, returning the files
/// written. Standard output receives both when `out = -`.
pub fn write_report(report: &Report, cfg: &ExperimentConfig) -> CliResult<Vec<PathBuf>> {
    let format = cfg.format()?;
    let main = report.table.render(format)?;
    let summary = report
        .summary
        .as_ref()
        .map(|t| t.render(format))
        .transpose()?;
    match cfg.output_path()? {
        None => {
            let mut out = std::io::stdout().lock();
            let io_err = |source| CliError::Io {
                path: PathBuf::from("<stdout>"),
                source,
            };
            out.write_all(main.as_bytes()).map_err(io_err)?;
            if let Some(s) = summary {
                out.write_all(b"\n").map_err(io_err)?;
                out.write_all(s.as_bytes()).map_err(io_err)?;
            }
            Ok(Vec::new())
        }
        Some(path) => {
            write_text(&path, &main)?;
            let mut written = vec![path.clone()];
            if let Some(s) = summary {
                let sp = summary_path(&path);
                write_text(&sp, &s)?;
                written.push(sp);
            }
            Ok(written)
        }
    }
}

pub(crate) fn solver_from(cfg: &ExperimentConfig) -> CliResult<Box<dyn SpectrumSolver>> {
    Ok(solver_by_name(&cfg.name("solver", "lanczos"))?)
}

/// Rényi-2 entropy of sites 1..=(L−1)/2.
pub(crate) fn half_chain_renyi2(state: &StateVector) -> magic_core::Result<f64> {
    let n = state.n_sites();
    block_entropy(state, &Bipartition::new(1, (n - 1) / 2, n)?, &Renyi2)
}

pub(crate) fn m2(state: &StateVector) -> magic_core::Result<f64> {
    Ok(sre_brute(state)?.value)
}

/// Records a per-point core error and renders it for an `error` column.
pub(crate) fn note_failure(
    report_failures: &mut Vec<String>,
    label: String,
    err: &magic_core::Error,
) -> String {
    let msg = err.to_string();
    if is_solver_failure(err) {
        report_failures.push(format!("{label}: {msg}"));
    }
    msg
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLaw {
    pub exponent: f64,
    pub prefactor: f64,
}

/// Least-squares fit of y = c·x^b on log–log axes. Needs at least two
/// points with positive coordinates.
pub fn fit_power_law(xs: &[f64], ys: &[f64]) -> Option<PowerLaw> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && **y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let b = sxy / sxx;
    Some(PowerLaw {
        exponent: b,
        prefactor: (my - b * mx).exp(),
    })
}

pub fn strictly_decreasing(ys: &[f64]) -> bool {
    ys.windows(2).all(|w| w[1] < w[0])
}

/// Columns of a fit summary row.
pub(crate) const FIT_COLUMNS: &[&str] = &[
    "quantity",
    "points",
    "exponent",
    "prefactor",
    "monotone_decreasing",
];

pub(crate) fn push_fit(
    summary: &mut Table,
    quantity: &str,
    ls: &[f64],
    ys: &[f64],
) -> CliResult<()> {
    let fit = fit_power_law(ls, ys);
    summary.push(vec![
        quantity.into(),
        ys.len().into(),
        fit.map(|f| f.exponent).into(),
        fit.map(|f| f.prefactor).into(),
        strictly_decreasing(ys).into(),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_power_law() {
        let xs = [7.0, 9.0, 11.0, 13.0];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powf(-1.5)).collect();
        let f = fit_power_law(&xs, &ys).unwrap();
        assert!((f.exponent + 1.5).abs() < 1e-12);
        assert!((f.prefactor - 3.0).abs() < 1e-10);
        assert!(fit_power_law(&xs[..1], &ys[..1]).is_none());
    }

    #[test]
    fn registry_round_trip() {
        for name in experiment_names() {
            assert_eq!(experiment_by_name(name).unwrap().name(), *name);
        }
        assert!(experiment_by_name("plot").is_err());
    }
}
