//! Named states: generalized W-states, kinks, and their momentum
//! superpositions.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::state::{check_odd, make_x_product, MomentumIndex, StateVector, XSign, C64};

/// Which Néel sea a kink is embedded in: `|k^+⟩` starts from `|+⟩^{⊗L}`,
/// `|k^−⟩` from `|−⟩^{⊗L}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KinkSector {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct KinkLabel {
    pub k: usize,
    pub sector: KinkSector,
}

impl KinkLabel {
    pub fn new(k: usize, sector: KinkSector) -> Self {
        Self { k, sector }
    }

    /// All 2L labels, minus sector first.
    pub fn all(n_sites: usize) -> Vec<KinkLabel> {
        [KinkSector::Minus, KinkSector::Plus]
            .into_iter()
            .flat_map(|sector| (1..=n_sites).map(move |k| KinkLabel { k, sector }))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseOffset(pub f64);

fn check_momentum(n_sites: usize, ell: MomentumIndex) -> Result<()> {
    check_odd(n_sites)?;
    if ell.n_sites() != n_sites {
        return Err(Error::InvalidMomentum {
            ell: ell.ell(),
            n_sites,
        });
    }
    Ok(())
}

/// `|W_p⟩ = L^{-1/2} Σ_j e^{ipj} σᶻ_j |−⟩^{⊗L}`.
pub fn build_w(n_sites: usize, ell: MomentumIndex) -> Result<StateVector> {
    check_momentum(n_sites, ell)?;
    let p = ell.momentum();
    let phases: Vec<C64> = (1..=n_sites)
        .map(|j| Complex64::from_polar(1.0, p * j as f64))
        .collect();
    let scale = (2f64).powf(-(n_sites as f64) / 2.0) / (n_sites as f64).sqrt();
    // σᶻ_j|−⟩^{⊗L} has amplitude 2^{-L/2} (−1)^{|s|} (−1)^{s_j}
    let amps = (0..1usize << n_sites)
        .map(|s| {
            let sea = if s.count_ones() % 2 == 0 {
                scale
            } else {
                -scale
            };
            let sum: C64 = phases
                .iter()
                .enumerate()
                .map(|(j, ph)| if s >> j & 1 == 1 { -ph } else { *ph })
                .sum();
            sum * sea
        })
        .collect();
    StateVector::from_amplitudes(n_sites, amps)
}

/// `|k^±⟩ = T^{k−1} ⊗_{j=1}^{M} σᶻ_{2j} |±⟩^{⊗L}`; for k = 1 the
/// ferromagnetic defect sits between sites L and 1.
pub fn build_kink(n_sites: usize, label: KinkLabel) -> Result<StateVector> {
    check_odd(n_sites)?;
    if label.k == 0 || label.k > n_sites {
        return Err(Error::InvalidSite {
            site: label.k,
            n_sites,
        });
    }
    let sea = match label.sector {
        KinkSector::Plus => XSign::Plus,
        KinkSector::Minus => XSign::Minus,
    };
    let base: Vec<XSign> = (1..=n_sites)
        .map(|j| if j % 2 == 0 { sea.flipped() } else { sea })
        .collect();
    let shift = label.k - 1;
    let signs: Vec<XSign> = (0..n_sites)
        .map(|j| base[(j + n_sites - shift) % n_sites])
        .collect();
    make_x_product(n_sites, &signs)
}

/// `|ω_p⟩ = (2L)^{-1/2} Σ_k e^{ipk} (|k^−⟩ + |k^+⟩)`.
pub fn build_omega(n_sites: usize, ell: MomentumIndex) -> Result<StateVector> {
    check_momentum(n_sites, ell)?;
    let p = ell.momentum();
    kink_superposition(n_sites, |k| Complex64::from_polar(1.0, p * k as f64))
}

/// `|φ(p,θ)⟩ = (e^{−iθ}|ω_p⟩ + e^{iθ}|ω_{−p}⟩)/√2`, a real-weighted kink
/// superposition `L^{-1/2} Σ_k cos(pk − θ)(|k^−⟩ + |k^+⟩)`.
pub fn build_phi(n_sites: usize, ell: MomentumIndex, theta: PhaseOffset) -> Result<StateVector> {
    check_momentum(n_sites, ell)?;
    if ell.ell() == 0 {
        return Err(Error::OutOfRange(
            "phi states need a nonzero momentum index".into(),
        ));
    }
    let p = ell.momentum();
    let plus = build_omega(n_sites, ell)?;
    let minus = build_omega(n_sites, ell.negated())?;
    let a = Complex64::from_polar(std::f64::consts::FRAC_1_SQRT_2, -theta.0);
    let b = Complex64::from_polar(std::f64::consts::FRAC_1_SQRT_2, theta.0);
    let amps = plus
        .amplitudes()
        .iter()
        .zip(minus.amplitudes())
        .map(|(x, y)| a * x + b * y)
        .collect();
    debug_assert!(p != 0.0);
    StateVector::from_amplitudes(n_sites, amps)
}

fn kink_superposition<F: Fn(usize) -> C64>(n_sites: usize, weight: F) -> Result<StateVector> {
    let mut acc = vec![C64::new(0.0, 0.0); 1 << n_sites];
    for label in KinkLabel::all(n_sites) {
        let w = weight(label.k);
        let kink = build_kink(n_sites, label)?;
        for (a, v) in acc.iter_mut().zip(kink.amplitudes()) {
            *a += w * v;
        }
    }
    StateVector::from_amplitudes(n_sites, acc)
}
