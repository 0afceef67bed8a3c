//! Closed-form values for the W and ω families.

use crate::error::{Error, Result};
use crate::state::{check_odd, MomentumIndex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FormulaId {
    M2WFinite,
    M2WZero,
    DeltaM2,
    S2WHalf,
    S2OmegaHalf,
    S2OmegaGeneral,
    RdmEigs,
}

impl FormulaId {
    pub fn name(self) -> &'static str {
        match self {
            FormulaId::M2WFinite => "M2_W_FINITE",
            FormulaId::M2WZero => "M2_W_ZERO",
            FormulaId::DeltaM2 => "DELTA_M2",
            FormulaId::S2WHalf => "S2_W_HALF",
            FormulaId::S2OmegaHalf => "S2_OMEGA_HALF",
            FormulaId::S2OmegaGeneral => "S2_OMEGA_GENERAL",
            FormulaId::RdmEigs => "RDM_EIGS",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormValue {
    pub value: f64,
    pub formula_id: FormulaId,
}

/// ΔM₂ as L → ∞.
pub fn delta_m2_limit() -> f64 {
    (7.0f64 / 6.0).log2()
}

fn check_ell(n_sites: usize, ell: MomentumIndex) -> Result<()> {
    if ell.n_sites() != n_sites {
        return Err(Error::InvalidMomentum {
            ell: ell.ell(),
            n_sites,
        });
    }
    Ok(())
}

/// 3 log₂L − log₂(7L − 6).
pub fn m2_w_zero(n_sites: usize) -> Result<f64> {
    check_odd(n_sites)?;
    let l = n_sites as f64;
    Ok(3.0 * l.log2() - (7.0 * l - 6.0).log2())
}

/// M₂ of |W_p⟩. ℓ = 0 branches to [`m2_w_zero`].
pub fn m2_w_closed(n_sites: usize, ell: MomentumIndex) -> Result<f64> {
    check_odd(n_sites)?;
    check_ell(n_sites, ell)?;
    if ell.ell() == 0 {
        return m2_w_zero(n_sites);
    }
    let l = n_sites as f64;
    let p = ell.momentum();
    let ratio = ((2.0 - 4.0 * l) * p).sin() / (2.0 * p).sin();
    Ok(-(-(11.0 - 12.0 * l + ratio) / (2.0 * l.powi(3))).log2())
}

/// log₂((7L − 6)/(6L − 6)).
pub fn delta_m2(n_sites: usize) -> Result<f64> {
    check_odd(n_sites)?;
    if n_sites == 1 {
        return Err(Error::OutOfRange(
            "a single site has no nonzero momentum".into(),
        ));
    }
    let l = n_sites as f64;
    Ok(((7.0 * l - 6.0) / (6.0 * l - 6.0)).log2())
}

/// Half-chain Rényi-2 entropy of |W_p⟩. The reduced density matrix has
/// eigenvalues (L ± 1)/2L, so S₂ = −log₂[((L+1)² + (L−1)²)/(4L²)]
/// = −log₂[(L² + 1)/(2L²)].
pub fn s2_w_half(n_sites: usize) -> Result<f64> {
    check_half_chain(n_sites)?;
    let l = n_sites as f64;
    Ok(-(((l + 1.0).powi(2) + (l - 1.0).powi(2)) / (4.0 * l * l)).log2())
}

/// −log₂[(4L² + (L−1)² − 4(L−1)L)/(4L²)] = −log₂[(L+1)²/(4L²)], which keeps
/// only the larger eigenvalue's square. Exceeds one bit, impossible for a
/// rank-2 reduced density matrix; kept for side-by-side reporting.
pub fn s2_w_half_printed(n_sites: usize) -> Result<f64> {
    check_half_chain(n_sites)?;
    let l = n_sites as f64;
    Ok(-((4.0 * l * l + (l - 1.0).powi(2) - 4.0 * (l - 1.0) * l) / (4.0 * l * l)).log2())
}

fn check_half_chain(n_sites: usize) -> Result<()> {
    check_odd(n_sites)?;
    if n_sites < 3 {
        return Err(Error::OutOfRange("half-chain cut needs L >= 3".into()));
    }
    Ok(())
}

fn check_block(n_sites: usize, a: usize) -> Result<()> {
    check_odd(n_sites)?;
    if a < 2 || a + 2 > n_sites {
        return Err(Error::OutOfRange(format!(
            "block size {a} outside 2..={} for L = {n_sites}",
            n_sites.saturating_sub(2)
        )));
    }
    Ok(())
}

/// The four nonzero eigenvalues of the reduced density matrix of the first
/// `a` sites of |ω_p⟩, ordered (γ=+1,+), (γ=+1,−), (γ=−1,+), (γ=−1,−).
pub fn rdm_eigs_omega(n_sites: usize, a: usize, ell: MomentumIndex) -> Result<[f64; 4]> {
    check_block(n_sites, a)?;
    check_ell(n_sites, ell)?;
    let l = n_sites as f64;
    let af = a as f64;
    let pa = ell.momentum() * af;
    let c = pa.cos();
    let s = pa.sin();
    let mut out = [0.0; 4];
    for (k, gamma) in [1.0, -1.0].into_iter().enumerate() {
        let disc = (l - 2.0 * af).powi(2) + 4.0 * l * (1.0 + gamma * c) - 4.0 * s * s;
        let root = disc.max(0.0).sqrt();
        out[2 * k] = (l + 2.0 * gamma * c + root) / (4.0 * l);
        out[2 * k + 1] = (l + 2.0 * gamma * c - root) / (4.0 * l);
    }
    Ok(out)
}

/// Rényi-2 entropy of the first `a` sites of |ω_p⟩, equal to
/// −log₂ Σλ² over [`rdm_eigs_omega`]:
/// −log₂[(L(2+L) − 2a(L−a) + 2cos(2pa))/(2L²)].
pub fn s2_omega(n_sites: usize, a: usize, ell: MomentumIndex) -> Result<f64> {
    check_block(n_sites, a)?;
    check_ell(n_sites, ell)?;
    Ok(s2_omega_general(
        n_sites,
        a,
        2.0 * ell.momentum() * a as f64,
    ))
}

/// The same expression with cos(pa) in place of cos(2pa). Agrees with
/// [`s2_omega`] only when cos(pa) = cos(2pa), e.g. at p = 0.
pub fn s2_omega_printed(n_sites: usize, a: usize, ell: MomentumIndex) -> Result<f64> {
    check_block(n_sites, a)?;
    check_ell(n_sites, ell)?;
    Ok(s2_omega_general(n_sites, a, ell.momentum() * a as f64))
}

fn s2_omega_general(n_sites: usize, a: usize, angle: f64) -> f64 {
    let l = n_sites as f64;
    let a = a as f64;
    -((l * (2.0 + l) - 2.0 * a * (l - a) + 2.0 * angle.cos()) / (2.0 * l * l)).log2()
}

/// −log₂[(1 + L(4+L) + 4cos p)/(4L²)], the cut at a = (L ± 1)/2.
pub fn s2_omega_half(n_sites: usize, ell: MomentumIndex) -> Result<f64> {
    check_half_chain(n_sites)?;
    check_ell(n_sites, ell)?;
    let l = n_sites as f64;
    let p = ell.momentum();
    Ok(-((1.0 + l * (4.0 + l) + 4.0 * p.cos()) / (4.0 * l * l)).log2())
}

/// Side-by-side values of the ω-state Rényi-2 expressions at one cut.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct S2OmegaForms {
    pub corrected: f64,
    pub printed: f64,
    /// Only at a = (L ± 1)/2.
    pub half_chain: Option<f64>,
    /// printed and corrected differ by more than `tol`.
    pub mismatch: bool,
}

pub fn s2_omega_forms(
    n_sites: usize,
    a: usize,
    ell: MomentumIndex,
    tol: f64,
) -> Result<S2OmegaForms> {
    let corrected = s2_omega(n_sites, a, ell)?;
    let printed = s2_omega_printed(n_sites, a, ell)?;
    let half_chain = if 2 * a + 1 == n_sites || 2 * a == n_sites + 1 {
        Some(s2_omega_half(n_sites, ell)?)
    } else {
        None
    };
    Ok(S2OmegaForms {
        corrected,
        printed,
        half_chain,
        mismatch: (corrected - printed).abs() > tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn idx(ell: i64, l: usize) -> MomentumIndex {
        MomentumIndex::new(ell, l).unwrap()
    }

    #[test]
    fn m2_small_values() {
        assert_eq!(m2_w_zero(1).unwrap(), 0.0);
        assert_eq!(m2_w_closed(1, idx(0, 1)).unwrap(), 0.0);
        assert!((m2_w_zero(3).unwrap() - (27.0f64 / 15.0).log2()).abs() < 1e-14);
        assert!((m2_w_zero(5).unwrap() - (125.0f64 / 29.0).log2()).abs() < 1e-14);
        assert!((m2_w_zero(5).unwrap() - 2.107803).abs() < 1e-6);
        assert!((m2_w_closed(3, idx(1, 3)).unwrap() - (9.0f64 / 4.0).log2()).abs() < 1e-13);
        assert!((m2_w_closed(3, idx(0, 3)).unwrap() - 0.847997).abs() < 1e-6);
    }

    #[test]
    fn zero_momentum_limit_of_sin_ratio() {
        // sin((2−4L)p)/sin(2p) → 1 − 2L as p → 0
        for l in [3usize, 5, 7, 13] {
            let lf = l as f64;
            let p = 1e-6;
            let ratio = ((2.0 - 4.0 * lf) * p).sin() / (2.0 * p).sin();
            let near = -(-(11.0 - 12.0 * lf + ratio) / (2.0 * lf.powi(3))).log2();
            assert!((near - m2_w_zero(l).unwrap()).abs() < 1e-9);
        }
    }

    #[test]
    fn delta_is_ell_independent_and_decreasing() {
        assert!(delta_m2(1).is_err());
        assert!((delta_m2(3).unwrap() - 1.25f64.log2()).abs() < 1e-14);
        let mut prev = f64::INFINITY;
        for l in (3..=41).step_by(2) {
            let d = delta_m2(l).unwrap();
            assert!(d < prev && d > delta_m2_limit());
            prev = d;
            let zero = m2_w_zero(l).unwrap();
            for ell in 1..=(l as i64 - 1) / 2 {
                let m = m2_w_closed(l, idx(ell, l)).unwrap();
                assert!((m - zero - d).abs() < 1e-10, "L={l} ell={ell}");
                assert!((m - m2_w_closed(l, idx(-ell, l)).unwrap()).abs() < 1e-12);
            }
        }
        assert!((delta_m2(1_000_001).unwrap() - 0.222392).abs() < 1e-6);
    }

    #[test]
    fn half_chain_w() {
        assert!((s2_w_half(3).unwrap() - (18.0f64 / 10.0).log2()).abs() < 1e-14);
        assert!((s2_w_half(5).unwrap() - (50.0f64 / 26.0).log2()).abs() < 1e-14);
        assert!((s2_w_half_printed(3).unwrap() - (36.0f64 / 16.0).log2()).abs() < 1e-14);
        assert!((s2_w_half_printed(5).unwrap() - (100.0f64 / 36.0).log2()).abs() < 1e-14);
        for l in (3..=21).step_by(2) {
            let lf = l as f64;
            let alt = -((lf + 1.0).powi(2) / (4.0 * lf * lf)).log2();
            assert!((s2_w_half_printed(l).unwrap() - alt).abs() < 1e-13);
            // two eigenvalues (1 ± 1/L)/2
            let x = 1.0 / lf;
            let direct = -(((1.0 + x) / 2.0).powi(2) + ((1.0 - x) / 2.0).powi(2)).log2();
            assert!((s2_w_half(l).unwrap() - direct).abs() < 1e-13);
            assert!(s2_w_half(l).unwrap() < 1.0 && s2_w_half_printed(l).unwrap() > 1.0);
        }
        assert!(s2_w_half(1).is_err());
    }

    #[test]
    fn rdm_eigs_example() {
        let e = rdm_eigs_omega(5, 2, idx(0, 5)).unwrap();
        let r = 41f64.sqrt();
        let want = [(7.0 + r) / 20.0, (7.0 - r) / 20.0, 0.2, 0.1];
        for (a, b) in e.iter().zip(want) {
            assert!((a - b).abs() < 1e-14);
        }
        assert!(rdm_eigs_omega(5, 1, idx(0, 5)).is_err());
        assert!(rdm_eigs_omega(5, 4, idx(0, 5)).is_err());
    }

    #[test]
    fn rdm_eigs_trace_and_purity() {
        for l in [5usize, 7, 9, 11, 13] {
            for a in 2..=l - 2 {
                for ell in MomentumIndex::all(l).unwrap() {
                    let e = rdm_eigs_omega(l, a, ell).unwrap();
                    assert!((e.iter().sum::<f64>() - 1.0).abs() < 1e-12);
                    assert!(e.iter().all(|&x| (-1e-12..=1.0 + 1e-12).contains(&x)));
                    let s2 = -e.iter().map(|x| x * x).sum::<f64>().log2();
                    assert!((s2 - s2_omega(l, a, ell).unwrap()).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn s2_omega_example_and_forms() {
        assert!((s2_omega(5, 2, idx(0, 5)).unwrap() - 1.0).abs() < 1e-14);
        assert!((s2_omega_printed(5, 2, idx(0, 5)).unwrap() - 1.0).abs() < 1e-14);
        let f = s2_omega_forms(5, 2, idx(1, 5), 1e-10).unwrap();
        assert!(f.mismatch);
        let h = f.half_chain.unwrap();
        assert!((h - f.corrected).abs() < 1e-13);
        let f = s2_omega_forms(7, 4, idx(2, 7), 1e-10).unwrap();
        assert!((f.half_chain.unwrap() - f.corrected).abs() < 1e-13);
        assert!(s2_omega_forms(9, 2, idx(1, 9), 1e-10)
            .unwrap()
            .half_chain
            .is_none());
    }

    #[test]
    fn s2_omega_momentum_dependence_fades() {
        let mut prev = f64::INFINITY;
        for l in (5..=13).step_by(2) {
            let a = (l - 1) / 2;
            let d = (s2_omega(l, a, idx(1, l)).unwrap() - s2_omega(l, a, idx(0, l)).unwrap()).abs();
            assert!(d < prev);
            prev = d;
        }
    }

    #[test]
    fn formula_names() {
        assert_eq!(FormulaId::RdmEigs.name(), "RDM_EIGS");
    }
}
