//! Named SRE estimators selectable at runtime.

use crate::error::{Error, Result};
use crate::oracles::m2_w_closed;
use crate::pauli::{
    sre_brute_capped, sre_structured_w, SreMethod, SreResult, ALPHA, DEFAULT_BRUTE_CAP,
};
use crate::state::{MomentumIndex, StateVector};

/// What an estimator is asked about. `w_equivalent` is set when the state
/// is known to carry the same magic as |W_ℓ⟩ (the W state itself or a
/// Clifford image of it); only then do the W-specific estimators apply.
#[derive(Debug, Clone, Copy)]
pub struct SreSubject<'a> {
    pub n_sites: usize,
    pub state: Option<&'a StateVector>,
    pub w_equivalent: Option<MomentumIndex>,
}

impl<'a> SreSubject<'a> {
    pub fn state(state: &'a StateVector) -> Self {
        Self {
            n_sites: state.n_sites(),
            state: Some(state),
            w_equivalent: None,
        }
    }

    pub fn w(n_sites: usize, ell: MomentumIndex, state: Option<&'a StateVector>) -> Self {
        Self {
            n_sites,
            state,
            w_equivalent: Some(ell),
        }
    }
}

pub trait SreEstimator: Send + Sync {
    fn name(&self) -> &'static str;
    fn estimate(&self, subject: &SreSubject<'_>) -> Result<SreResult>;
}

fn unsupported(method: &str, what: &str) -> Error {
    Error::Unsupported {
        method: method.to_string(),
        subject: what.to_string(),
    }
}

#[derive(Debug, Clone, Copy)]
pub struct BruteEstimator {
    pub cap: usize,
}

impl Default for BruteEstimator {
    fn default() -> Self {
        Self {
            cap: DEFAULT_BRUTE_CAP,
        }
    }
}

impl SreEstimator for BruteEstimator {
    fn name(&self) -> &'static str {
        "brute"
    }

    fn estimate(&self, subject: &SreSubject<'_>) -> Result<SreResult> {
        let state = subject
            .state
            .ok_or_else(|| unsupported(self.name(), "a subject without amplitudes"))?;
        sre_brute_capped(state, self.cap)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct StructuredEstimator;

impl SreEstimator for StructuredEstimator {
    fn name(&self) -> &'static str {
        "structured"
    }

    fn estimate(&self, subject: &SreSubject<'_>) -> Result<SreResult> {
        let ell = subject
            .w_equivalent
            .ok_or_else(|| unsupported(self.name(), "a state not equivalent to a W state"))?;
        sre_structured_w(subject.n_sites, ell)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ClosedEstimator;

impl SreEstimator for ClosedEstimator {
    fn name(&self) -> &'static str {
        "closed"
    }

    fn estimate(&self, subject: &SreSubject<'_>) -> Result<SreResult> {
        let ell = subject
            .w_equivalent
            .ok_or_else(|| unsupported(self.name(), "a state not equivalent to a W state"))?;
        let value = m2_w_closed(subject.n_sites, ell)?;
        Ok(SreResult {
            value,
            alpha: ALPHA,
            raw_moment: 2f64.powf(subject.n_sites as f64 - value),
            method: SreMethod::Closed,
        })
    }
}

pub fn estimator_names() -> &'static [&'static str] {
    &["brute", "structured", "closed"]
}

pub fn estimator_by_name(name: &str) -> Result<Box<dyn SreEstimator>> {
    match name {
        "brute" => Ok(Box::new(BruteEstimator::default())),
        "structured" => Ok(Box::new(StructuredEstimator)),
        "closed" => Ok(Box::new(ClosedEstimator)),
        _ => Err(Error::UnknownName {
            kind: "SRE method",
            name: name.to_string(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::build_w;

    #[test]
    fn triad_agrees_on_w() {
        let l = 7;
        for ell in MomentumIndex::all(l).unwrap() {
            let w = build_w(l, ell).unwrap();
            let subject = SreSubject::w(l, ell, Some(&w));
            let values: Vec<SreResult> = estimator_names()
                .iter()
                .map(|n| estimator_by_name(n).unwrap().estimate(&subject).unwrap())
                .collect();
            for v in &values[1..] {
                assert!((v.value - values[0].value).abs() < 1e-10);
                assert!((v.raw_moment - values[0].raw_moment).abs() < 1e-8 * values[0].raw_moment);
            }
            assert_eq!(values[2].method, SreMethod::Closed);
        }
    }

    #[test]
    fn unsupported_subjects() {
        let l = 5;
        let w = build_w(l, MomentumIndex::zero(l).unwrap()).unwrap();
        let plain = SreSubject::state(&w);
        assert!(matches!(
            StructuredEstimator.estimate(&plain),
            Err(Error::Unsupported { .. })
        ));
        let stateless = SreSubject::w(l, MomentumIndex::zero(l).unwrap(), None);
        assert!(BruteEstimator::default().estimate(&stateless).is_err());
        assert!(ClosedEstimator.estimate(&stateless).is_ok());
        assert!(estimator_by_name("sampling").is_err());
    }
}
