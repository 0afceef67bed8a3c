//! Dense state vectors over the computational (σᶻ) basis.
//!
//! Site `j` (1-based) is stored in bit `j - 1` of the basis index, and a bit
//! value of 0 is the σᶻ = +1 eigenstate. With `|±⟩ = (|0⟩ ± |1⟩)/√2` the
//! operator σᶻ maps `|−⟩` to `|+⟩`, and the z-parity Πᶻ is a diagonal sign
//! mask `(-1)^popcount(s)`.
//!
//! The translation `T` moves the content of site `j` to site `j + 1`. Its
//! eigenstates carry `T|ψ_p⟩ = e^{-ip}|ψ_p⟩`, with `p = 2πℓ/L`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const NORM_TOL: f64 = 1e-12;
pub const EIGENSTATE_TOL: f64 = 1e-8;

/// 1-based site index on a chain of `n_sites`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SiteLabel(usize);

impl SiteLabel {
    pub fn new(index: usize, n_sites: usize) -> Result<Self> {
        if index == 0 || index > n_sites {
            return Err(Error::InvalidSite {
                site: index,
                n_sites,
            });
        }
        Ok(Self(index))
    }

    pub fn index(self) -> usize {
        self.0
    }

    pub(crate) fn bit(self) -> usize {
        1 << (self.0 - 1)
    }
}

/// Quantized momentum `p = 2πℓ/L` with `|ℓ| <= (L-1)/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MomentumIndex {
    ell: i64,
    n_sites: usize,
}

impl MomentumIndex {
    pub fn new(ell: i64, n_sites: usize) -> Result<Self> {
        check_odd(n_sites)?;
        let half = ((n_sites - 1) / 2) as i64;
        if ell.abs() > half {
            return Err(Error::InvalidMomentum { ell, n_sites });
        }
        Ok(Self { ell, n_sites })
    }

    /// Wraps any integer onto the symmetric range.
    pub fn wrapped(ell: i64, n_sites: usize) -> Result<Self> {
        check_odd(n_sites)?;
        let l = n_sites as i64;
        let half = (l - 1) / 2;
        let e = (ell + half).rem_euclid(l) - half;
        Self::new(e, n_sites)
    }

    pub fn zero(n_sites: usize) -> Result<Self> {
        Self::new(0, n_sites)
    }

    /// All allowed indices in increasing order.
    pub fn all(n_sites: usize) -> Result<Vec<Self>> {
        check_odd(n_sites)?;
        let half = ((n_sites - 1) / 2) as i64;
        Ok((-half..=half).map(|ell| Self { ell, n_sites }).collect())
    }

    pub fn ell(self) -> i64 {
        self.ell
    }

    pub fn n_sites(self) -> usize {
        self.n_sites
    }

    pub fn momentum(self) -> f64 {
        2.0 * PI * self.ell as f64 / self.n_sites as f64
    }

    pub fn negated(self) -> Self {
        Self {
            ell: -self.ell,
            n_sites: self.n_sites,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum XSign {
    Plus,
    Minus,
}

impl XSign {
    pub fn flipped(self) -> Self {
        match self {
            XSign::Plus => XSign::Minus,
            XSign::Minus => XSign::Plus,
        }
    }

    fn factor(self) -> f64 {
        match self {
            XSign::Plus => 1.0,
            XSign::Minus => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PauliAxis {
    X,
    Y,
    Z,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ParityAxis {
    X,
    Z,
}

pub(crate) fn check_odd(n_sites: usize) -> Result<()> {
    if n_sites == 0 || n_sites.is_multiple_of(2) {
        return Err(Error::EvenLength(n_sites));
    }
    Ok(())
}

#[inline]
pub(crate) fn rotate_bits(s: usize, steps: usize, n_sites: usize) -> usize {
    if steps == 0 {
        return s;
    }
    let mask = (1usize << n_sites) - 1;
    ((s << steps) | (s >> (n_sites - steps))) & mask
}

#[inline]
pub(crate) fn parity_sign(s: usize) -> f64 {
    if s.count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Normalized pure state on an odd number of qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_sites: usize,
    amps: Vec<C64>,
}

impl StateVector {
    /// Builds a state from raw amplitudes, normalizing them.
    pub fn from_amplitudes(n_sites: usize, amps: Vec<C64>) -> Result<Self> {
        check_odd(n_sites)?;
        let expected = 1usize << n_sites;
        if amps.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                got: amps.len(),
            });
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::ZeroNorm);
        }
        let amps = amps.into_iter().map(|a| a / norm).collect();
        Ok(Self { n_sites, amps })
    }

    /// For outputs of unitary maps on already-normalized input.
    pub(crate) fn from_unitary_image(n_sites: usize, amps: Vec<C64>) -> Self {
        debug_assert_eq!(amps.len(), 1 << n_sites);
        Self { n_sites, amps }
    }

    pub fn basis(n_sites: usize, index: usize) -> Result<Self> {
        check_odd(n_sites)?;
        let dim = 1usize << n_sites;
        if index >= dim {
            return Err(Error::OutOfRange(format!("basis index {index} >= {dim}")));
        }
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        amps[index] = C64::new(1.0, 0.0);
        Ok(Self { n_sites, amps })
    }

    /// Haar-distributed random state (normalized complex Gaussian vector).
    pub fn random<R: Rng + ?Sized>(n_sites: usize, rng: &mut R) -> Result<Self> {
        check_odd(n_sites)?;
        let amps = (0..1usize << n_sites)
            .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        Self::from_amplitudes(n_sites, amps)
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn site(&self, index: usize) -> Result<SiteLabel> {
        SiteLabel::new(index, self.n_sites)
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        self.check_same_size(other)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm().min(1.0))
    }

    pub fn scaled(&self, factor: C64) -> StateVector {
        Self::from_unitary_image(self.n_sites, self.amps.iter().map(|a| a * factor).collect())
    }

    pub fn conjugated(&self) -> StateVector {
        Self::from_unitary_image(self.n_sites, self.amps.iter().map(|a| a.conj()).collect())
    }

    pub fn apply_pauli(&self, site: SiteLabel, which: PauliAxis) -> Result<StateVector> {
        self.check_site(site)?;
        let bit = site.bit();
        let i = C64::new(0.0, 1.0);
        let mut out = vec![C64::new(0.0, 0.0); self.dim()];
        for (s, &a) in self.amps.iter().enumerate() {
            let one = s & bit != 0;
            match which {
                PauliAxis::X => out[s ^ bit] = a,
                PauliAxis::Z => out[s] = if one { -a } else { a },
                // Y = iXZ
                PauliAxis::Y => out[s ^ bit] = if one { -i * a } else { i * a },
            }
        }
        Ok(Self::from_unitary_image(self.n_sites, out))
    }

    /// Shifts every site `steps` positions to the right (mod L).
    pub fn translate(&self, steps: i64) -> StateVector {
        let l = self.n_sites;
        let shift = steps.rem_euclid(l as i64) as usize;
        if shift == 0 {
            return self.clone();
        }
        let mut out = vec![C64::new(0.0, 0.0); self.dim()];
        for (s, &a) in self.amps.iter().enumerate() {
            out[rotate_bits(s, shift, l)] = a;
        }
        Self::from_unitary_image(l, out)
    }

    /// Mirror image sending site `j` to `2·center − j` (mod L).
    pub fn reflect(&self, center: SiteLabel) -> Result<StateVector> {
        self.check_site(center)?;
        let l = self.n_sites as i64;
        let c = center.index() as i64;
        // target bit position for each source bit position
        let target: Vec<usize> = (1..=l)
            .map(|j| ((2 * c - j - 1).rem_euclid(l)) as usize)
            .collect();
        let mut out = vec![C64::new(0.0, 0.0); self.dim()];
        for (s, &a) in self.amps.iter().enumerate() {
            let mut t = 0usize;
            let mut rest = s;
            while rest != 0 {
                let b = rest.trailing_zeros() as usize;
                t |= 1 << target[b];
                rest &= rest - 1;
            }
            out[t] = a;
        }
        Ok(Self::from_unitary_image(self.n_sites, out))
    }

    /// ⟨ψ|T|ψ⟩.
    pub fn translation_overlap(&self) -> C64 {
        let shifted = self.translate(1);
        self.amps
            .iter()
            .zip(&shifted.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn measure_momentum(&self, tol: f64) -> Result<MomentumIndex> {
        let overlap = self.translation_overlap();
        if overlap.norm() <= 1.0 - tol {
            return Err(Error::NotTranslationEigenstate {
                overlap: overlap.norm(),
            });
        }
        let l = self.n_sites as f64;
        let p = -overlap.arg();
        let ell = (p * l / (2.0 * PI)).round() as i64;
        let idx = MomentumIndex::wrapped(ell, self.n_sites)?;
        let residual = wrap_angle(p - idx.momentum()).abs();
        if residual >= tol {
            return Err(Error::NotTranslationEigenstate {
                overlap: overlap.norm(),
            });
        }
        Ok(idx)
    }

    pub fn parity_expectation(&self, axis: ParityAxis) -> f64 {
        match axis {
            ParityAxis::Z => self
                .amps
                .iter()
                .enumerate()
                .map(|(s, a)| parity_sign(s) * a.norm_sqr())
                .sum(),
            ParityAxis::X => {
                let all = self.dim() - 1;
                self.amps
                    .iter()
                    .enumerate()
                    .map(|(s, a)| self.amps[s ^ all].conj() * a)
                    .sum::<C64>()
                    .re
            }
        }
    }

    fn check_site(&self, site: SiteLabel) -> Result<()> {
        if site.index() > self.n_sites {
            return Err(Error::InvalidSite {
                site: site.index(),
                n_sites: self.n_sites,
            });
        }
        Ok(())
    }

    fn check_same_size(&self, other: &StateVector) -> Result<()> {
        if self.n_sites != other.n_sites {
            return Err(Error::LengthMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(())
    }
}

fn wrap_angle(x: f64) -> f64 {
    (x + PI).rem_euclid(2.0 * PI) - PI
}

/// Product of σˣ eigenstates, one sign per site (site 1 first).
pub fn make_x_product(n_sites: usize, signs: &[XSign]) -> Result<StateVector> {
    check_odd(n_sites)?;
    if signs.len() != n_sites {
        return Err(Error::LengthMismatch {
            expected: n_sites,
            got: signs.len(),
        });
    }
    let scale = FRAC_1_SQRT_2.powi(n_sites as i32);
    let amps = (0..1usize << n_sites)
        .map(|s| {
            let sign: f64 = signs
                .iter()
                .enumerate()
                .filter(|(j, _)| s >> j & 1 == 1)
                .map(|(_, x)| x.factor())
                .product();
            C64::new(sign * scale, 0.0)
        })
        .collect();
    Ok(StateVector::from_unitary_image(n_sites, amps))
}

pub fn fidelity(a: &StateVector, b: &StateVector) -> Result<f64> {
    a.fidelity(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn minus_sea(l: usize) -> StateVector {
        make_x_product(l, &vec![XSign::Minus; l]).unwrap()
    }

    #[test]
    fn single_minus() {
        let s = make_x_product(1, &[XSign::Minus]).unwrap();
        let a = s.amplitudes();
        assert!((a[0].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((a[1].re + FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn minus_product_signs_follow_popcount() {
        let s = minus_sea(3);
        let v = 1.0 / 8f64.sqrt();
        for (b, a) in s.amplitudes().iter().enumerate() {
            assert!((a.re - parity_sign(b) * v).abs() < 1e-15);
            assert_eq!(a.im, 0.0);
        }
    }

    #[test]
    fn x_product_is_sigma_x_eigenstate() {
        let s = make_x_product(3, &[XSign::Plus, XSign::Minus, XSign::Plus]).unwrap();
        for (site, want) in [(1, 1.0), (2, -1.0), (3, 1.0)] {
            let flipped = s.apply_pauli(s.site(site).unwrap(), PauliAxis::X).unwrap();
            let ev = s.inner(&flipped).unwrap();
            assert!((ev.re - want).abs() < 1e-14 && ev.im.abs() < 1e-14);
        }
    }

    #[test]
    fn x_product_rejects_bad_input() {
        assert_eq!(
            make_x_product(2, &[XSign::Plus; 2]),
            Err(Error::EvenLength(2))
        );
        assert!(matches!(
            make_x_product(3, &[XSign::Plus; 2]),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn pauli_actions() {
        let minus = make_x_product(1, &[XSign::Minus]).unwrap();
        let plus = make_x_product(1, &[XSign::Plus]).unwrap();
        let z = minus
            .apply_pauli(minus.site(1).unwrap(), PauliAxis::Z)
            .unwrap();
        assert!((z.inner(&plus).unwrap().re - 1.0).abs() < 1e-15);

        let zero = StateVector::basis(1, 0).unwrap();
        let y = zero
            .apply_pauli(zero.site(1).unwrap(), PauliAxis::Y)
            .unwrap();
        assert!(y.amplitudes()[0].norm() < 1e-15);
        assert!((y.amplitudes()[1] - C64::new(0.0, 1.0)).norm() < 1e-15);

        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let r = StateVector::random(5, &mut rng).unwrap();
        let site = r.site(3).unwrap();
        let back = r
            .apply_pauli(site, PauliAxis::X)
            .unwrap()
            .apply_pauli(site, PauliAxis::X)
            .unwrap();
        assert!((r.fidelity(&back).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn translate_moves_site_content_right() {
        // |1⟩ on site 1 of L = 3 goes to site 2
        let s = StateVector::basis(3, 0b001).unwrap();
        let t = s.translate(1);
        assert_eq!(t.amplitudes()[0b010], C64::new(1.0, 0.0));
        let t = s.translate(-1);
        assert_eq!(t.amplitudes()[0b100], C64::new(1.0, 0.0));
    }

    #[test]
    fn translate_period_and_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let s = StateVector::random(5, &mut rng).unwrap();
        assert_eq!(s.translate(5), s);
        assert_eq!(s.translate(1).translate(-1), s);
    }

    #[test]
    fn reflection_is_an_involution() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = StateVector::random(7, &mut rng).unwrap();
        for c in 1..=7 {
            let c = s.site(c).unwrap();
            let twice = s.reflect(c).unwrap().reflect(c).unwrap();
            assert!((s.fidelity(&twice).unwrap() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn reflect_maps_sites() {
        // site 2 about center 1 on L = 5 lands on site 0 ≡ 5
        let s = StateVector::basis(5, 0b00010).unwrap();
        let r = s.reflect(s.site(1).unwrap()).unwrap();
        assert_eq!(r.amplitudes()[0b10000], C64::new(1.0, 0.0));
    }

    #[test]
    fn parity_of_all_zero_state() {
        let s = StateVector::basis(5, 0).unwrap();
        assert_eq!(s.parity_expectation(ParityAxis::Z), 1.0);
        assert!((minus_sea(5).parity_expectation(ParityAxis::X) + 1.0).abs() < 1e-14);
    }

    #[test]
    fn fidelity_is_phase_blind() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let s = StateVector::random(3, &mut rng).unwrap();
        assert!((s.fidelity(&s).unwrap() - 1.0).abs() < 1e-14);
        let phased = s.scaled(C64::from_polar(1.0, 0.731));
        assert!((s.fidelity(&phased).unwrap() - 1.0).abs() < 1e-14);
        let other = StateVector::random(5, &mut rng).unwrap();
        assert!(s.fidelity(&other).is_err());
    }

    #[test]
    fn momentum_index_range() {
        assert!(MomentumIndex::new(3, 7).is_ok());
        assert!(MomentumIndex::new(4, 7).is_err());
        assert_eq!(MomentumIndex::wrapped(4, 7).unwrap().ell(), -3);
        assert_eq!(MomentumIndex::all(5).unwrap().len(), 5);
        assert!(MomentumIndex::new(0, 4).is_err());
    }

    #[test]
    fn from_amplitudes_normalizes() {
        let s =
            StateVector::from_amplitudes(1, vec![C64::new(3.0, 0.0), C64::new(0.0, 4.0)]).unwrap();
        assert!((s.norm_sqr() - 1.0).abs() < NORM_TOL);
        assert_eq!(
            StateVector::from_amplitudes(1, vec![C64::new(0.0, 0.0); 2]),
            Err(Error::ZeroNorm)
        );
    }
}
