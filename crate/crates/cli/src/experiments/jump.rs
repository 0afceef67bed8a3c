use magic_core::oracles::delta_m2_limit;
use magic_core::xyz::{
    find_hstar, ChainParams, GroundManifold, HstarOptions, HstarStatus, SpectrumSolver,
};
use rayon::prelude::*;

use super::{
    half_chain_renyi2, m2, note_failure, push_fit, solver_from, Experiment, Report, FIT_COLUMNS,
};
use crate::config::ExperimentConfig;
use crate::error::CliResult;
use crate::output::{Table, Value};

/// Discontinuity of M₂ and of the half-chain Rényi-2 entropy across h*.
/// ΔX = X(h* − ε) − X(h* + ε); `delta_m2_excess` is ΔM₂ − log₂(7/6).
pub struct JumpScaling;

pub const COLUMNS: &[&str] = &[
    "L",
    "jy",
    "jz",
    "hstar",
    "bracket_width",
    "eps",
    "ell_below",
    "degeneracy_below",
    "m2_above",
    "m2_below",
    "delta_m2",
    "delta_m2_limit",
    "delta_m2_excess",
    "s2_above",
    "s2_below",
    "delta_s2",
    "error",
];

/// Relative ε when none is configured: ε = 1e-3 · max(1, h*).
pub const DEFAULT_REL_EPS: f64 = 1e-3;
pub const DEFAULT_TOL: f64 = 1e-4;

#[derive(Debug, Clone)]
pub struct JumpPoint {
    pub n_sites: usize,
    pub hstar: f64,
    pub bracket_width: f64,
    pub eps: f64,
    pub ell_below: i64,
    pub degeneracy_below: usize,
    pub m2_above: f64,
    pub m2_below: f64,
    pub s2_above: f64,
    pub s2_below: f64,
}

impl JumpPoint {
    pub fn delta_m2(&self) -> f64 {
        self.m2_below - self.m2_above
    }

    pub fn delta_s2(&self) -> f64 {
        self.s2_below - self.s2_above
    }
}

/// h* to within `tol`, then the two ground manifolds at h* ± ε.
pub fn jump_at(
    jy: f64,
    jz: f64,
    n: usize,
    eps: Option<f64>,
    tol: f64,
    solver: &dyn SpectrumSolver,
) -> magic_core::Result<JumpPoint> {
    // the bisection error must stay below ε so that h* ± ε straddles h*
    let eps_floor = eps.unwrap_or(DEFAULT_REL_EPS);
    let opts = HstarOptions {
        tol: tol.min(eps_floor / 2.0),
        ..HstarOptions::default()
    };
    let found = find_hstar(jy, jz, n, &opts, solver)?;
    if found.status != HstarStatus::Found {
        return Err(magic_core::Error::Bracket(format!(
            "no transition at L={n} (status {})",
            found.status.name()
        )));
    }
    let eps = eps.unwrap_or(DEFAULT_REL_EPS * found.hstar.max(1.0));
    let at = |h: f64| -> magic_core::Result<GroundManifold> {
        solver.ground_manifold(&ChainParams::frustrated(n, jy, jz, h)?)
    };
    let above = at(found.hstar + eps)?;
    let below = at(found.hstar - eps)?;
    if !above.is_unique_zero_momentum() {
        return Err(magic_core::Error::Bracket(format!(
            "ground state at h* + ε is not the unique zero-momentum state (momenta {:?})",
            above.momenta().iter().map(|m| m.ell()).collect::<Vec<_>>()
        )));
    }
    let rep_below = below.representative();
    if below.degeneracy() < 2 || rep_below.momentum.ell() == 0 {
        return Err(magic_core::Error::Bracket(format!(
            "ground manifold at h* − ε is not a finite-momentum pair (momenta {:?})",
            below.momenta().iter().map(|m| m.ell()).collect::<Vec<_>>()
        )));
    }
    let rep_above = above.representative();
    Ok(JumpPoint {
        n_sites: n,
        hstar: found.hstar,
        bracket_width: found.bracket_width,
        eps,
        ell_below: rep_below.momentum.ell(),
        degeneracy_below: below.degeneracy(),
        m2_above: m2(&rep_above.state)?,
        m2_below: m2(&rep_below.state)?,
        s2_above: half_chain_renyi2(&rep_above.state)?,
        s2_below: half_chain_renyi2(&rep_below.state)?,
    })
}

impl Experiment for JumpScaling {
    fn name(&self) -> &'static str {
        "jump-scaling"
    }

    fn run(&self, cfg: &ExperimentConfig) -> CliResult<Report> {
        let sizes = cfg.sizes(&[7, 9, 11, 13])?;
        let jy = cfg.float("jy", 0.33)?;
        let jz = cfg.float("jz", 0.0)?;
        let eps = match cfg.opt_float("eps")? {
            Some(_) => Some(cfg.positive("eps", 0.0)?),
            None => None,
        };
        let tol = cfg.positive("tol", DEFAULT_TOL)?;
        let solver = solver_from(cfg)?;
        let limit = delta_m2_limit();

        let results: Vec<_> = sizes
            .par_iter()
            .map(|&n| jump_at(jy, jz, n, eps, tol, solver.as_ref()))
            .collect();

        let mut report = Report::new(Table::new(COLUMNS));
        let mut ok = Vec::new();
        for (&n, res) in sizes.iter().zip(results) {
            let row: Vec<Value> = match res {
                Ok(p) => {
                    let row = vec![
                        n.into(),
                        jy.into(),
                        jz.into(),
                        p.hstar.into(),
                        p.bracket_width.into(),
                        p.eps.into(),
                        p.ell_below.into(),
                        p.degeneracy_below.into(),
                        p.m2_above.into(),
                        p.m2_below.into(),
                        p.delta_m2().into(),
                        limit.into(),
                        (p.delta_m2() - limit).into(),
                        p.s2_above.into(),
                        p.s2_below.into(),
                        p.delta_s2().into(),
                        Value::Missing,
                    ];
                    ok.push(p);
                    row
                }
                Err(e) => {
                    let msg = note_failure(&mut report.failures, format!("L={n}"), &e);
                    let mut row = vec![Value::Missing; COLUMNS.len()];
                    row[0] = n.into();
                    row[1] = jy.into();
                    row[2] = jz.into();
                    row[11] = limit.into();
                    row[16] = msg.into();
                    row
                }
            };
            report.table.push(row)?;
        }

        if ok.len() >= 2 {
            let ls: Vec<f64> = ok.iter().map(|p| p.n_sites as f64).collect();
            let excess: Vec<f64> = ok.iter().map(|p| (p.delta_m2() - limit).abs()).collect();
            let ds2: Vec<f64> = ok.iter().map(|p| p.delta_s2().abs()).collect();
            let mut summary = Table::new(FIT_COLUMNS);
            push_fit(&mut summary, "abs_delta_m2_excess", &ls, &excess)?;
            push_fit(&mut summary, "abs_delta_s2", &ls, &ds2)?;
            report.summary = Some(summary);
        }
        Ok(report)
    }
}
