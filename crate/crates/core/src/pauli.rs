//! Pauli-string expectation values and the order-2 stabilizer Rényi entropy.
//!
//! A string is stored as `X_a Z_b` without the Hermitian `i^{|a∧b|}`
//! prefactor; only magnitudes of expectation values are ever consumed, so
//! the phase convention is irrelevant.
//!
//! For a fixed x-mask `a`, all z-mask expectations come out of one fast
//! Walsh–Hadamard transform of `g_a(s) = conj(ψ(s⊕a))·ψ(s)`, since
//! `⟨ψ|X_a Z_b|ψ⟩ = Σ_s (−1)^{b·s} g_a(s)`. The full spectrum therefore
//! costs `O(L·4^L)` time and `O(2^L)` memory per worker.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::state::{check_odd, MomentumIndex, StateVector, C64};
use crate::summation::CompensatedSum;

pub const DEFAULT_BRUTE_CAP: usize = 15;
pub const ALPHA: u32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliMask {
    pub x: u64,
    pub z: u64,
}

impl PauliMask {
    pub fn new(x: u64, z: u64, n_sites: usize) -> Result<Self> {
        let limit = 1u64 << n_sites;
        if x >= limit || z >= limit {
            return Err(Error::OutOfRange(format!(
                "Pauli mask ({x:#b}, {z:#b}) does not fit {n_sites} sites"
            )));
        }
        Ok(Self { x, z })
    }

    pub fn identity() -> Self {
        Self { x: 0, z: 0 }
    }

    /// Number of non-identity factors.
    pub fn weight(self) -> u32 {
        (self.x | self.z).count_ones()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SreMethod {
    Brute,
    Structured,
    Closed,
}

impl SreMethod {
    pub fn name(self) -> &'static str {
        match self {
            SreMethod::Brute => "brute",
            SreMethod::Structured => "structured",
            SreMethod::Closed => "closed",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SreResult {
    /// M₂ in bits.
    pub value: f64,
    pub alpha: u32,
    /// Σ_P ⟨P⟩⁴ before the 2^{-L} normalization.
    pub raw_moment: f64,
    pub method: SreMethod,
}

impl SreResult {
    fn from_normalized(normalized: f64, n_sites: usize, method: SreMethod) -> Self {
        Self {
            value: -normalized.log2(),
            alpha: ALPHA,
            raw_moment: normalized * 2f64.powi(n_sites as i32),
            method,
        }
    }
}

/// Sums of the second and fourth powers of all 4^L expectation magnitudes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliMoments {
    pub second: f64,
    pub fourth: f64,
}

/// In-place unnormalized Walsh–Hadamard transform.
pub fn fwht(buf: &mut [C64]) {
    let n = buf.len();
    debug_assert!(n.is_power_of_two());
    let mut h = 1;
    while h < n {
        for block in buf.chunks_exact_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        h *= 2;
    }
}

fn fill_product(amps: &[C64], x: usize, out: &mut [C64]) {
    for (s, o) in out.iter_mut().enumerate() {
        *o = amps[s ^ x].conj() * amps[s];
    }
}

fn check_cap(n_sites: usize, cap: usize) -> Result<()> {
    if n_sites > cap {
        return Err(Error::SizeCap {
            what: "the exhaustive Pauli spectrum",
            n_sites,
            cap,
        });
    }
    Ok(())
}

/// |⟨ψ| X_x Z_z |ψ⟩|.
pub fn pauli_expectation(state: &StateVector, mask: PauliMask) -> Result<f64> {
    let mask = PauliMask::new(mask.x, mask.z, state.n_sites())?;
    let amps = state.amplitudes();
    let (x, z) = (mask.x as usize, mask.z as usize);
    let v: C64 = amps
        .iter()
        .enumerate()
        .map(|(s, a)| {
            let term = amps[s ^ x].conj() * a;
            if (z & s).count_ones() % 2 == 0 {
                term
            } else {
                -term
            }
        })
        .sum();
    Ok(v.norm())
}

/// Second and fourth Pauli moments. Parallel over x-masks; per-mask partial
/// sums are folded in mask order, so the result does not depend on the
/// number of worker threads.
pub fn pauli_moments(state: &StateVector, cap: usize) -> Result<PauliMoments> {
    let n = state.n_sites();
    check_cap(n, cap)?;
    let dim = state.dim();
    let amps = state.amplitudes();
    let partials: Vec<(f64, f64)> = (0..dim)
        .into_par_iter()
        .map_init(
            || vec![C64::new(0.0, 0.0); dim],
            |scratch, x| {
                fill_product(amps, x, scratch);
                fwht(scratch);
                let mut second = CompensatedSum::new();
                let mut fourth = CompensatedSum::new();
                for c in scratch.iter() {
                    let m2 = c.norm_sqr();
                    second.add(m2);
                    fourth.add(m2 * m2);
                }
                (second.value(), fourth.value())
            },
        )
        .collect();
    let mut second = CompensatedSum::new();
    let mut fourth = CompensatedSum::new();
    for (s2, s4) in partials {
        second.add(s2);
        fourth.add(s4);
    }
    Ok(PauliMoments {
        second: second.value(),
        fourth: fourth.value(),
    })
}

pub fn sre_brute_capped(state: &StateVector, cap: usize) -> Result<SreResult> {
    let moments = pauli_moments(state, cap)?;
    let n = state.n_sites();
    let raw = moments.fourth;
    Ok(SreResult {
        value: -(raw / 2f64.powi(n as i32)).log2(),
        alpha: ALPHA,
        raw_moment: raw,
        method: SreMethod::Brute,
    })
}

pub fn sre_brute(state: &StateVector) -> Result<SreResult> {
    sre_brute_capped(state, DEFAULT_BRUTE_CAP)
}

/// log of the binomial pmf C(n,k)/2^n for k = 0..=n.
fn binomial_weights(n: usize) -> Vec<f64> {
    let ln2 = std::f64::consts::LN_2;
    let mut ln_c = 0.0f64;
    let mut out = Vec::with_capacity(n + 1);
    for k in 0..=n {
        out.push((ln_c - n as f64 * ln2).exp());
        if k < n {
            ln_c += ((n - k) as f64).ln() - ((k + 1) as f64).ln();
        }
    }
    out
}

/// M₂ of `|W_p⟩` from the two families of strings with nonzero
/// expectation: strings made of identities and σˣ only, with magnitude
/// |L − 2l|/L for l factors of σˣ; and strings with exactly two factors in
/// {σʸ, σᶻ} at distance r, with magnitude 2|cos(pr)|/L (equal factors) or
/// 2|sin(pr)|/L (different factors).
pub fn sre_structured_w(n_sites: usize, ell: MomentumIndex) -> Result<SreResult> {
    check_odd(n_sites)?;
    if ell.n_sites() != n_sites {
        return Err(Error::InvalidMomentum {
            ell: ell.ell(),
            n_sites,
        });
    }
    let l = n_sites as f64;
    let p = ell.momentum();

    // identity/σˣ strings, weighted by C(L, l)/2^L
    let mut normalized = CompensatedSum::new();
    for (count, w) in binomial_weights(n_sites).into_iter().enumerate() {
        let m = (l - 2.0 * count as f64) / l;
        normalized.add(w * m.powi(4));
    }

    // two-defect strings: L·Σ_l C(L−2, l) Σ_r [...], divided by 2^L
    if n_sites >= 2 {
        let mut over_r = CompensatedSum::new();
        for r in 1..n_sites {
            let pr = p * r as f64;
            over_r.add((2.0 * pr.cos() / l).powi(4) + (2.0 * pr.sin() / l).powi(4));
        }
        let over_r = over_r.value();
        for w in binomial_weights(n_sites - 2) {
            // C(L−2,l)/2^L = w/4
            normalized.add(l * w / 4.0 * over_r);
        }
    }

    Ok(SreResult::from_normalized(
        normalized.value(),
        n_sites,
        SreMethod::Structured,
    ))
}

/// Every |⟨P⟩| in x-major, z-minor order.
pub fn pauli_magnitudes(state: &StateVector, cap: usize) -> Result<Vec<f64>> {
    check_cap(state.n_sites(), cap)?;
    let dim = state.dim();
    let amps = state.amplitudes();
    let mut out = Vec::with_capacity(dim * dim);
    let mut scratch = vec![C64::new(0.0, 0.0); dim];
    for x in 0..dim {
        fill_product(amps, x, &mut scratch);
        fwht(&mut scratch);
        out.extend(scratch.iter().map(|c| c.norm()));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
}

impl Histogram {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

pub fn uniform_edges(bins: usize) -> Vec<f64> {
    (0..=bins).map(|i| i as f64 / bins as f64).collect()
}

/// Counts of all 4^L magnitudes in bins `[e_i, e_{i+1})`, the last bin
/// closed. Values above the last edge (rounding past 1) land in the last bin.
pub fn pauli_moment_profile(state: &StateVector, edges: &[f64], cap: usize) -> Result<Histogram> {
    if edges.len() < 2 || edges.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::OutOfRange(
            "histogram edges must be strictly increasing with at least two entries".into(),
        ));
    }
    let values = pauli_magnitudes(state, cap)?;
    let bins = edges.len() - 1;
    let mut counts = vec![0u64; bins];
    for v in values {
        let i = edges[1..].partition_point(|&e| e <= v).min(bins - 1);
        counts[i] += 1;
    }
    Ok(Histogram {
        edges: edges.to_vec(),
        counts,
    })
}
