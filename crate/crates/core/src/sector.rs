//! Translation-orbit basis for a fixed (momentum, Πᶻ) sector.
//!
//! For an orbit representative r with period d (the smallest d with
//! Tᵈ r = r), the sector state is
//! |r̂⟩ = (√d / L) Σ_{m<L} e^{ipm} Tᵐ|r⟩, which exists only when p·d ≡ 0
//! (mod 2π). For s = Tᵐˢ r', the projection of |s⟩ onto the sector is
//! e^{−ip·mₛ} |r̂'⟩ / √d', which gives
//! ⟨r̂'|H|r̂⟩ = Σ_{s ∈ orbit(r')} H_{s,r} e^{−ip·mₛ} √(d/d').

use crate::error::Result;
use crate::state::{parity_sign, rotate_bits, MomentumIndex, StateVector, C64};

/// Orbit data for every basis state of an L-site ring.
#[derive(Debug, Clone)]
pub struct TranslationOrbits {
    n_sites: usize,
    /// Smallest element of the orbit of s.
    rep: Vec<u32>,
    /// s = T^{shift[s]} rep[s].
    shift: Vec<u8>,
    /// Orbit size, stored at representatives.
    period: Vec<u8>,
}

impl TranslationOrbits {
    pub fn new(n_sites: usize) -> Self {
        let dim = 1usize << n_sites;
        let mut rep = vec![u32::MAX; dim];
        let mut shift = vec![0u8; dim];
        let mut period = vec![0u8; dim];
        for s in 0..dim {
            if rep[s] != u32::MAX {
                continue;
            }
            // s is the smallest unvisited element, hence its orbit's minimum
            let mut t = s;
            let mut m = 0usize;
            loop {
                if rep[t] == u32::MAX {
                    rep[t] = s as u32;
                    shift[t] = m as u8;
                }
                m += 1;
                t = rotate_bits(t, 1, n_sites);
                if t == s {
                    break;
                }
            }
            period[s] = m as u8;
        }
        Self {
            n_sites,
            rep,
            shift,
            period,
        }
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }
}

/// Sparse Hermitian matrix of H restricted to one sector.
#[derive(Debug, Clone)]
pub struct SectorHamiltonian {
    n_sites: usize,
    momentum: MomentumIndex,
    reps: Vec<usize>,
    periods: Vec<usize>,
    /// CSR rows: (column, value)
    row_start: Vec<usize>,
    entries: Vec<(usize, C64)>,
}

impl SectorHamiltonian {
    /// `column(s)` lists (s', H_{s',s}) for every nonzero entry of column s,
    /// the diagonal included.
    pub fn build<F>(
        orbits: &TranslationOrbits,
        momentum: MomentumIndex,
        parity: i8,
        column: F,
    ) -> Self
    where
        F: Fn(usize, &mut Vec<(usize, f64)>),
    {
        let n = orbits.n_sites;
        let pf = parity as f64;
        let ell = momentum.ell().rem_euclid(n as i64) as usize;
        let mut reps = Vec::new();
        let mut periods = Vec::new();
        let mut index = vec![u32::MAX; orbits.rep.len()];
        for s in 0..orbits.rep.len() {
            if orbits.rep[s] as usize != s || parity_sign(s) != pf {
                continue;
            }
            let d = orbits.period[s] as usize;
            if !(ell * d).is_multiple_of(n) {
                continue;
            }
            index[s] = reps.len() as u32;
            reps.push(s);
            periods.push(d);
        }
        let p = momentum.momentum();
        let mut row_start = Vec::with_capacity(reps.len() + 1);
        let mut entries = Vec::new();
        let mut col = Vec::new();
        let mut acc: Vec<(usize, C64)> = Vec::new();
        // rows of the transpose; H is Hermitian so this is H† = H
        for (i, &r) in reps.iter().enumerate() {
            row_start.push(entries.len());
            col.clear();
            column(r, &mut col);
            acc.clear();
            for &(s, h) in &col {
                let j = index[orbits.rep[s] as usize];
                if j == u32::MAX {
                    continue;
                }
                let j = j as usize;
                let phase = C64::from_polar(1.0, -p * orbits.shift[s] as f64);
                let v = phase * h * (periods[i] as f64 / periods[j] as f64).sqrt();
                match acc.iter_mut().find(|e| e.0 == j) {
                    Some(e) => e.1 += v,
                    None => acc.push((j, v)),
                }
            }
            acc.sort_by_key(|e| e.0);
            // acc holds column i: entries (j, H_{j,i}); store as row i of H†
            entries.extend(acc.iter().map(|&(j, v)| (j, v.conj())));
        }
        row_start.push(entries.len());
        Self {
            n_sites: n,
            momentum,
            reps,
            periods,
            row_start,
            entries,
        }
    }

    pub fn dim(&self) -> usize {
        self.reps.len()
    }

    pub fn apply(&self, x: &[C64], y: &mut [C64]) {
        for (i, out) in y.iter_mut().enumerate() {
            *out = self.entries[self.row_start[i]..self.row_start[i + 1]]
                .iter()
                .map(|&(j, v)| v * x[j])
                .sum();
        }
    }

    /// Largest |H_{ij} − conj(H_{ji})|.
    pub fn hermiticity_defect(&self) -> f64 {
        let get = |i: usize, j: usize| -> C64 {
            self.entries[self.row_start[i]..self.row_start[i + 1]]
                .iter()
                .find(|e| e.0 == j)
                .map(|e| e.1)
                .unwrap_or_default()
        };
        let mut worst = 0.0f64;
        for i in 0..self.dim() {
            for &(j, v) in &self.entries[self.row_start[i]..self.row_start[i + 1]] {
                worst = worst.max((v - get(j, i).conj()).norm());
            }
        }
        worst
    }

    /// Expands sector coefficients into a full state.
    pub fn lift(&self, coeffs: &[C64]) -> Result<StateVector> {
        let n = self.n_sites;
        let p = self.momentum.momentum();
        let mut amps = vec![C64::new(0.0, 0.0); 1 << n];
        for ((&r, &d), &c) in self.reps.iter().zip(&self.periods).zip(coeffs) {
            let w = (d as f64).sqrt() / n as f64;
            for m in 0..n {
                amps[rotate_bits(r, m, n)] += c * C64::from_polar(w, p * m as f64);
            }
        }
        StateVector::from_amplitudes(n, amps)
    }
}
