use magic_core::oracles::m2_w_closed;
use magic_core::xyz::{nonfrustrated_counterpart, ChainParams, SpectrumSolver};
use rayon::prelude::*;

use super::{m2, push_fit, solver_from, Experiment, Report, FIT_COLUMNS};
use crate::config::ExperimentConfig;
use crate::error::CliResult;
use crate::output::Table;

/// R = M₂(TF) / (M₂(NF) + M₂(W_ℓ₀)), with NF the chain with Jx and Jy
/// negated and ℓ₀ the momentum of the frustrated ground state.
pub struct Ratio;

pub const COLUMNS: &[&str] = &[
    "L",
    "jy",
    "jz",
    "h",
    "ell0",
    "parity",
    "degeneracy_tf",
    "finite_momentum",
    "m2_tf",
    "m2_nf",
    "m2_w",
    "r",
    "one_minus_r",
];

/// Trend fits use only chains at least this long.
pub const TREND_MIN_L: usize = 7;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioPoint {
    pub n_sites: usize,
    pub ell0: i64,
    pub parity: i8,
    pub degeneracy_tf: usize,
    pub finite_momentum: bool,
    pub m2_tf: f64,
    pub m2_nf: f64,
    pub m2_w: f64,
}

impl RatioPoint {
    pub fn ratio(&self) -> f64 {
        self.m2_tf / (self.m2_nf + self.m2_w)
    }
}

pub fn ratio_at(
    params: &ChainParams,
    solver: &dyn SpectrumSolver,
) -> magic_core::Result<RatioPoint> {
    let tf = solver.ground_manifold(params)?;
    let nf = solver.ground_manifold(&nonfrustrated_counterpart(params))?;
    let rep = tf.representative();
    Ok(RatioPoint {
        n_sites: params.n_sites(),
        ell0: rep.momentum.ell(),
        parity: rep.parity,
        degeneracy_tf: tf.degeneracy(),
        finite_momentum: !tf.is_unique_zero_momentum(),
        m2_tf: m2(&rep.state)?,
        m2_nf: m2(&nf.representative().state)?,
        m2_w: m2_w_closed(params.n_sites(), rep.momentum)?,
    })
}

impl Experiment for Ratio {
    fn name(&self) -> &'static str {
        "ratio"
    }

    fn run(&self, cfg: &ExperimentConfig) -> CliResult<Report> {
        let sizes = cfg.sizes(&[7, 9, 11, 13])?;
        let jy = cfg.float("jy", 0.33)?;
        let jz = cfg.float("jz", 0.0)?;
        let h = cfg.float("h", 0.1)?;
        let solver = solver_from(cfg)?;
        let params = sizes
            .iter()
            .map(|&n| ChainParams::frustrated(n, jy, jz, h))
            .collect::<magic_core::Result<Vec<_>>>()?;
        let points = params
            .par_iter()
            .map(|p| ratio_at(p, solver.as_ref()))
            .collect::<magic_core::Result<Vec<_>>>()?;

        let mut report = Report::new(Table::new(COLUMNS));
        for p in &points {
            let r = p.ratio();
            report.table.push(vec![
                p.n_sites.into(),
                jy.into(),
                jz.into(),
                h.into(),
                p.ell0.into(),
                (p.parity as i64).into(),
                p.degeneracy_tf.into(),
                p.finite_momentum.into(),
                p.m2_tf.into(),
                p.m2_nf.into(),
                p.m2_w.into(),
                r.into(),
                (1.0 - r).into(),
            ])?;
        }
        let trend: Vec<&RatioPoint> = points.iter().filter(|p| p.n_sites >= TREND_MIN_L).collect();
        if trend.len() >= 2 {
            let ls: Vec<f64> = trend.iter().map(|p| p.n_sites as f64).collect();
            let dev: Vec<f64> = trend.iter().map(|p| (1.0 - p.ratio()).abs()).collect();
            let mut summary = Table::new(FIT_COLUMNS);
            push_fit(&mut summary, "abs_one_minus_r", &ls, &dev)?;
            report.summary = Some(summary);
        }
        Ok(report)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classical_point_gives_unit_ratio() {
        let mut cfg = ExperimentConfig::new("ratio");
        for (k, v) in [("L", "5,7"), ("jy", "0"), ("jz", "0"), ("h", "0")] {
            cfg.set(k, v).unwrap();
        }
        let r = Ratio.run(&cfg).unwrap();
        for i in 0..2 {
            assert!(r.table.get(i, "m2_nf").unwrap().as_f64().unwrap().abs() < 1e-10);
            assert!(
                r.table
                    .get(i, "one_minus_r")
                    .unwrap()
                    .as_f64()
                    .unwrap()
                    .abs()
                    < 1e-10
            );
        }
    }

    #[test]
    fn short_chains_have_no_trend() {
        let mut cfg = ExperimentConfig::new("ratio");
        cfg.set("L", "3,5").unwrap();
        let r = Ratio.run(&cfg).unwrap();
        assert_eq!(r.table.len(), 2);
        assert!(r.summary.is_none());
    }
}
