//! Reduced density matrices of contiguous (possibly wrapping) blocks and
//! their entropies.

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::state::{SiteLabel, StateVector, C64};

/// Largest block kept as an explicit 2^a × 2^a matrix.
pub const RDM_CAP: usize = 12;
/// Eigenvalues at or below this are dropped before taking logarithms.
pub const EIGEN_FLOOR: f64 = 1e-14;

/// Sites start, start+1, …, start+length−1, counted modulo L.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bipartition {
    start: SiteLabel,
    length: usize,
    n_sites: usize,
}

impl Bipartition {
    pub fn new(start: usize, length: usize, n_sites: usize) -> Result<Self> {
        let start = SiteLabel::new(start, n_sites)?;
        if length == 0 || length >= n_sites {
            return Err(Error::OutOfRange(format!(
                "block length {length} outside 1..={}",
                n_sites.saturating_sub(1)
            )));
        }
        Ok(Self {
            start,
            length,
            n_sites,
        })
    }

    pub fn start(&self) -> SiteLabel {
        self.start
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn complement(&self) -> Self {
        let start = (self.start.index() - 1 + self.length) % self.n_sites + 1;
        Self {
            start: SiteLabel::new(start, self.n_sites).expect("in range"),
            length: self.n_sites - self.length,
            n_sites: self.n_sites,
        }
    }

    /// The smaller of the block and its complement.
    pub fn smaller_side(&self) -> Self {
        if 2 * self.length > self.n_sites {
            self.complement()
        } else {
            *self
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReducedDensity {
    matrix: DMatrix<C64>,
}

impl ReducedDensity {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    /// Tr ρ².
    pub fn purity(&self) -> f64 {
        self.matrix.iter().map(|x| x.norm_sqr()).sum()
    }

    /// Descending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut e: Vec<f64> = SymmetricEigen::new(self.matrix.clone())
            .eigenvalues
            .iter()
            .copied()
            .collect();
        e.sort_by(|a, b| b.total_cmp(a));
        e
    }
}

/// Exact partial trace over the complement of `part`. Basis index bit i of
/// the block corresponds to site start + i.
pub fn reduced_density(state: &StateVector, part: &Bipartition) -> Result<ReducedDensity> {
    let n = state.n_sites();
    if part.n_sites != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: part.n_sites,
        });
    }
    if part.length > RDM_CAP {
        return Err(Error::SizeCap {
            what: "an explicit reduced density matrix",
            n_sites: part.length,
            cap: RDM_CAP,
        });
    }
    // bring the block's first site to site 1
    let shifted = state.translate(-(part.start.index() as i64 - 1));
    let rows = 1usize << part.length;
    let cols = 1usize << (n - part.length);
    let m = DMatrix::from_column_slice(rows, cols, shifted.amplitudes());
    Ok(ReducedDensity {
        matrix: &m * m.adjoint(),
    })
}

/// −log₂ Tr ρ².
pub fn renyi2(rho: &ReducedDensity) -> f64 {
    -rho.purity().log2()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LogBase {
    Two,
    E,
}

impl LogBase {
    fn log(self, x: f64) -> f64 {
        match self {
            LogBase::Two => x.log2(),
            LogBase::E => x.ln(),
        }
    }
}

/// −Σ λ log λ over eigenvalues above [`EIGEN_FLOOR`].
pub fn von_neumann(rho: &ReducedDensity, base: LogBase) -> f64 {
    -rho.eigenvalues()
        .into_iter()
        .filter(|&l| l > EIGEN_FLOOR)
        .map(|l| l * base.log(l))
        .sum::<f64>()
}

pub trait EntropyMeasure: Send + Sync {
    fn name(&self) -> &'static str;
    fn evaluate(&self, rho: &ReducedDensity) -> f64;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Renyi2;

impl EntropyMeasure for Renyi2 {
    fn name(&self) -> &'static str {
        "renyi2"
    }
    fn evaluate(&self, rho: &ReducedDensity) -> f64 {
        renyi2(rho)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct VonNeumann(pub LogBase);

impl EntropyMeasure for VonNeumann {
    fn name(&self) -> &'static str {
        match self.0 {
            LogBase::Two => "von_neumann",
            LogBase::E => "von_neumann_nats",
        }
    }
    fn evaluate(&self, rho: &ReducedDensity) -> f64 {
        von_neumann(rho, self.0)
    }
}

pub fn measure_names() -> &'static [&'static str] {
    &["renyi2", "von_neumann", "von_neumann_nats"]
}

pub fn measure_by_name(name: &str) -> Result<Box<dyn EntropyMeasure>> {
    match name {
        "renyi2" => Ok(Box::new(Renyi2)),
        "von_neumann" => Ok(Box::new(VonNeumann(LogBase::Two))),
        "von_neumann_nats" => Ok(Box::new(VonNeumann(LogBase::E))),
        _ => Err(Error::UnknownName {
            kind: "entropy measure",
            name: name.to_string(),
        }),
    }
}

/// Entropy of a block, computed on whichever side is smaller.
pub fn block_entropy(
    state: &StateVector,
    part: &Bipartition,
    measure: &dyn EntropyMeasure,
) -> Result<f64> {
    Ok(measure.evaluate(&reduced_density(state, &part.smaller_side())?))
}

/// Entry k−1 is the entropy of the length-`a` block starting at site k.
pub fn ent_profile(
    state: &StateVector,
    a: usize,
    measure: &dyn EntropyMeasure,
) -> Result<Vec<f64>> {
    let n = state.n_sites();
    (1..=n)
        .into_par_iter()
        .map(|k| block_entropy(state, &Bipartition::new(k, a, n)?, measure))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileSummary {
    pub min: f64,
    pub max: f64,
    /// max − min.
    pub amplitude: f64,
    pub amplitude_times_l: f64,
}

pub fn summarize_profile(profile: &[f64]) -> ProfileSummary {
    let min = profile.iter().copied().fold(f64::INFINITY, f64::min);
    let max = profile.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    ProfileSummary {
        min,
        max,
        amplitude: max - min,
        amplitude_times_l: (max - min) * profile.len() as f64,
    }
}
