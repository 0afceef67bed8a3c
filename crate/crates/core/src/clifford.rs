//! Gate-level simulation of the circuit that maps |W_p⟩ onto |ω_p⟩.
//!
//! `CXZ j l` is C(j,l) = exp[iπ/4 (1 − σˣ_j)(1 − σᶻ_l)]. Expanded, it
//! applies σˣ to site j when site l is in |1⟩ (σᶻ = −1). The 4×4 matrix is
//! taken from the exponential itself rather than hand-written.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use nalgebra::{Matrix2, Matrix4};

use crate::error::{Error, Result};
use crate::pauli::fwht;
use crate::special::{build_omega, build_w};
use crate::state::{check_odd, parity_sign, MomentumIndex, StateVector, C64};

pub const VERIFY_CAP: usize = 7;
const OFF_TOL: f64 = 1e-12;
const UNIT_TOL: f64 = 1e-10;

/// Sites are 1-based.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    Hadamard(usize),
    CnotXz {
        x_site: usize,
        z_site: usize,
    },
    PauliZ(usize),
    ParityZ,
    /// exp(i·angle·σᶻ); non-Clifford unless angle is a multiple of π/4.
    PhaseZ {
        site: usize,
        angle: f64,
    },
}

impl Gate {
    fn sites(&self) -> Vec<usize> {
        match *self {
            Gate::Hadamard(s) | Gate::PauliZ(s) | Gate::PhaseZ { site: s, .. } => vec![s],
            Gate::CnotXz { x_site, z_site } => vec![x_site, z_site],
            Gate::ParityZ => vec![],
        }
    }

    fn validate(&self, n_sites: usize) -> Result<()> {
        for s in self.sites() {
            if s == 0 || s > n_sites {
                return Err(Error::InvalidSite { site: s, n_sites });
            }
        }
        if let Gate::CnotXz { x_site, z_site } = *self {
            if x_site == z_site {
                return Err(Error::OutOfRange(format!(
                    "CXZ needs two distinct sites, got {x_site} twice"
                )));
            }
        }
        Ok(())
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Gate::Hadamard(s) => write!(f, "H {s}"),
            Gate::CnotXz { x_site, z_site } => write!(f, "CXZ {x_site} {z_site}"),
            Gate::PauliZ(s) => write!(f, "Z {s}"),
            Gate::ParityZ => write!(f, "PARITYZ"),
            Gate::PhaseZ { site, angle } => write!(f, "PHASEZ {site} {angle:e}"),
        }
    }
}

impl FromStr for Gate {
    type Err = Error;

    fn from_str(line: &str) -> Result<Self> {
        let parts: Vec<&str> = line.split_whitespace().collect();
        let site = |i: usize| -> Result<usize> {
            parts
                .get(i)
                .ok_or_else(|| Error::Parse(format!("missing operand in '{line}'")))?
                .parse::<usize>()
                .map_err(|e| Error::Parse(format!("bad site in '{line}': {e}")))
        };
        let arity = |n: usize| -> Result<()> {
            if parts.len() != n + 1 {
                return Err(Error::Parse(format!(
                    "'{}' takes {n} operand(s): '{line}'",
                    parts[0]
                )));
            }
            Ok(())
        };
        match parts.first().map(|s| s.to_ascii_uppercase()).as_deref() {
            Some("H") => {
                arity(1)?;
                Ok(Gate::Hadamard(site(1)?))
            }
            Some("CXZ") => {
                arity(2)?;
                Ok(Gate::CnotXz {
                    x_site: site(1)?,
                    z_site: site(2)?,
                })
            }
            Some("Z") => {
                arity(1)?;
                Ok(Gate::PauliZ(site(1)?))
            }
            Some("PARITYZ") => {
                arity(0)?;
                Ok(Gate::ParityZ)
            }
            Some("PHASEZ") => {
                arity(2)?;
                let angle = parts[2]
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("bad angle in '{line}': {e}")))?;
                Ok(Gate::PhaseZ {
                    site: site(1)?,
                    angle,
                })
            }
            Some(other) => Err(Error::Parse(format!("unknown gate '{other}'"))),
            None => Err(Error::Parse("empty gate line".into())),
        }
    }
}

/// Gates in application order.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    n_sites: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_sites: usize, gates: Vec<Gate>) -> Result<Self> {
        check_odd(n_sites)?;
        for g in &gates {
            g.validate(n_sites)?;
        }
        Ok(Self { n_sites, gates })
    }

    pub fn empty(n_sites: usize) -> Result<Self> {
        Self::new(n_sites, Vec::new())
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// One gate per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for g in &self.gates {
            out.push_str(&g.to_string());
            out.push('\n');
        }
        out
    }

    /// Inverse of [`Circuit::to_text`]; blank lines and `#` comments are
    /// skipped.
    pub fn parse(text: &str, n_sites: usize) -> Result<Self> {
        let gates = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty())
            .map(Gate::from_str)
            .collect::<Result<Vec<_>>>()?;
        Self::new(n_sites, gates)
    }

    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        if state.n_sites() != self.n_sites {
            return Err(Error::LengthMismatch {
                expected: self.n_sites,
                got: state.n_sites(),
            });
        }
        let mut amps = state.amplitudes().to_vec();
        for g in &self.gates {
            apply_in_place(&mut amps, g);
        }
        Ok(StateVector::from_unitary_image(self.n_sites, amps))
    }
}

/// exp[iπ/4 (1 − σˣ) ⊗ (1 − σᶻ)] in the basis |b_x b_z⟩ → row 2·b_x + b_z.
pub fn cnot_xz_matrix() -> &'static Matrix4<C64> {
    static M: OnceLock<Matrix4<C64>> = OnceLock::new();
    M.get_or_init(|| {
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        let id = Matrix2::<C64>::identity();
        let sx = Matrix2::new(zero, one, one, zero);
        let sz = Matrix2::new(one, zero, zero, -one);
        let generator = (id - sx).kronecker(&(id - sz));
        (generator * C64::new(0.0, std::f64::consts::FRAC_PI_4)).exp()
    })
}

fn apply_in_place(amps: &mut [C64], gate: &Gate) {
    match *gate {
        Gate::Hadamard(site) => {
            let m = 1usize << (site - 1);
            for s in 0..amps.len() {
                if s & m == 0 {
                    let (a, b) = (amps[s], amps[s | m]);
                    amps[s] = (a + b) * FRAC_1_SQRT_2;
                    amps[s | m] = (a - b) * FRAC_1_SQRT_2;
                }
            }
        }
        Gate::PauliZ(site) => {
            let m = 1usize << (site - 1);
            for (s, a) in amps.iter_mut().enumerate() {
                if s & m != 0 {
                    *a = -*a;
                }
            }
        }
        Gate::ParityZ => {
            for (s, a) in amps.iter_mut().enumerate() {
                *a *= parity_sign(s);
            }
        }
        Gate::PhaseZ { site, angle } => {
            let m = 1usize << (site - 1);
            let up = C64::from_polar(1.0, angle);
            let down = up.conj();
            for (s, a) in amps.iter_mut().enumerate() {
                *a *= if s & m == 0 { up } else { down };
            }
        }
        Gate::CnotXz { x_site, z_site } => {
            let u = cnot_xz_matrix();
            let mx = 1usize << (x_site - 1);
            let mz = 1usize << (z_site - 1);
            for s in 0..amps.len() {
                if s & (mx | mz) != 0 {
                    continue;
                }
                let idx = [s, s | mz, s | mx, s | mx | mz];
                let v = idx.map(|i| amps[i]);
                for (r, &i) in idx.iter().enumerate() {
                    amps[i] = (0..4).map(|c| u[(r, c)] * v[c]).sum();
                }
            }
        }
    }
}

pub fn apply_gate(state: &StateVector, gate: Gate) -> Result<StateVector> {
    Circuit::new(state.n_sites(), vec![gate])?.apply(state)
}

/// Composition order of the factors C(j, j+1), j = 1..L−1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ProductOrder {
    /// C(1,2) acts first. Realizes the W → ω map.
    #[default]
    FirstActsFirst,
    /// C(L−1,L) acts first.
    LastActsFirst,
}

/// Πᶻ, then C(j,j+1) for j = 1..L−1, σᶻ_L, H(L), σᶻ on sites 1,3,…,L−2,
/// and finally C(L, L−j) for j = 1..L−1 (these commute among themselves).
pub fn build_circuit_s(n_sites: usize, order: ProductOrder) -> Result<Circuit> {
    check_odd(n_sites)?;
    if n_sites < 3 {
        return Err(Error::OutOfRange("the mapping circuit needs L >= 3".into()));
    }
    let l = n_sites;
    let mut gates = vec![Gate::ParityZ];
    let chain: Vec<Gate> = (1..l)
        .map(|j| Gate::CnotXz {
            x_site: j,
            z_site: j + 1,
        })
        .collect();
    match order {
        ProductOrder::FirstActsFirst => gates.extend(chain),
        ProductOrder::LastActsFirst => gates.extend(chain.into_iter().rev()),
    }
    gates.push(Gate::PauliZ(l));
    gates.push(Gate::Hadamard(l));
    gates.extend((1..=(l - 1) / 2).map(|j| Gate::PauliZ(2 * j - 1)));
    gates.extend((1..l).map(|j| Gate::CnotXz {
        x_site: l,
        z_site: l - j,
    }));
    Circuit::new(l, gates)
}

pub fn apply_circuit_s(state: &StateVector) -> Result<StateVector> {
    build_circuit_s(state.n_sites(), ProductOrder::default())?.apply(state)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliffordCheck {
    pub is_clifford: bool,
    /// First generator whose image is not a single Pauli string.
    pub offending: Option<String>,
}

/// Checks that U σ U† is ± one Pauli string for σ ∈ {σˣ_j, σʸ_j, σᶻ_j}.
pub fn verify_clifford(circuit: &Circuit) -> Result<CliffordCheck> {
    let n = circuit.n_sites();
    if n > VERIFY_CAP {
        return Err(Error::SizeCap {
            what: "Clifford verification",
            n_sites: n,
            cap: VERIFY_CAP,
        });
    }
    let dim = 1usize << n;
    // columns of U
    let cols: Vec<Vec<C64>> = (0..dim)
        .map(|k| {
            let b = StateVector::basis(n, k)?;
            Ok(circuit.apply(&b)?.into_amplitudes())
        })
        .collect::<Result<_>>()?;

    for j in 0..n {
        let m = 1usize << j;
        for (name, flip, phase) in [("X", true, false), ("Y", true, true), ("Z", false, false)] {
            // P|s⟩ = coef(s)|s ⊕ flip·m⟩
            let coef = |s: usize| -> C64 {
                let bit = s & m != 0;
                match (flip, phase) {
                    (true, false) => C64::new(1.0, 0.0),
                    (true, true) => {
                        if bit {
                            C64::new(0.0, -1.0)
                        } else {
                            C64::new(0.0, 1.0)
                        }
                    }
                    _ => C64::new(if bit { -1.0 } else { 1.0 }, 0.0),
                }
            };
            // M = U P U†, M[r,c] = Σ_s U[r, s⊕f] coef(s) conj(U[c, s])
            let f = if flip { m } else { 0 };
            let mut mat = vec![C64::new(0.0, 0.0); dim * dim];
            for s in 0..dim {
                let cs = coef(s);
                let col_out = &cols[s ^ f];
                let col_in = &cols[s];
                for r in 0..dim {
                    let left = col_out[r] * cs;
                    for c in 0..dim {
                        mat[r * dim + c] += left * col_in[c].conj();
                    }
                }
            }
            let mut unit = 0usize;
            let mut stray = false;
            let mut g = vec![C64::new(0.0, 0.0); dim];
            for x in 0..dim {
                for (s, v) in g.iter_mut().enumerate() {
                    *v = mat[(s ^ x) * dim + s];
                }
                fwht(&mut g);
                for v in &g {
                    let c = v.norm() / dim as f64;
                    if (c - 1.0).abs() < UNIT_TOL {
                        unit += 1;
                    } else if c > OFF_TOL {
                        stray = true;
                    }
                }
            }
            if unit != 1 || stray {
                return Ok(CliffordCheck {
                    is_clifford: false,
                    offending: Some(format!("{name}_{}", j + 1)),
                });
            }
        }
    }
    Ok(CliffordCheck {
        is_clifford: true,
        offending: None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MappingRecord {
    pub ell: i64,
    /// ω momentum with the largest overlap.
    pub ell_prime: i64,
    pub fidelity: f64,
}

/// For each ℓ, applies the circuit to |W_ℓ⟩ and finds the best-matching
/// |ω_ℓ'⟩.
pub fn realized_mapping(n_sites: usize, order: ProductOrder) -> Result<Vec<MappingRecord>> {
    let circuit = build_circuit_s(n_sites, order)?;
    let ells = MomentumIndex::all(n_sites)?;
    let omegas = ells
        .iter()
        .map(|&e| build_omega(n_sites, e))
        .collect::<Result<Vec<_>>>()?;
    ells.iter()
        .map(|&ell| {
            let image = circuit.apply(&build_w(n_sites, ell)?)?;
            let mut best = MappingRecord {
                ell: ell.ell(),
                ell_prime: ell.ell(),
                fidelity: -1.0,
            };
            for (e, om) in ells.iter().zip(&omegas) {
                let f = image.fidelity(om)?;
                if f > best.fidelity {
                    best.ell_prime = e.ell();
                    best.fidelity = f;
                }
            }
            Ok(best)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::sre_brute;
    use crate::state::{make_x_product, XSign};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random(l: usize, seed: u64) -> StateVector {
        StateVector::random(l, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap()
    }

    #[test]
    fn cnot_matrix_is_x_controlled_by_z() {
        // rows/cols 2·b_x + b_z: identity when b_z = 0, σˣ on the x site
        // when b_z = 1
        let u = cnot_xz_matrix();
        let want = [
            [1., 0., 0., 0.],
            [0., 0., 0., 1.],
            [0., 0., 1., 0.],
            [0., 1., 0., 0.],
        ];
        for r in 0..4 {
            for c in 0..4 {
                assert!((u[(r, c)] - C64::new(want[r][c], 0.0)).norm() < 1e-13);
            }
        }
        let sq = u * u;
        assert!((sq - Matrix4::identity()).norm() < 1e-13);
    }

    #[test]
    fn hadamard_squares_to_identity() {
        let s = random(3, 1);
        let h = apply_gate(
            &apply_gate(&s, Gate::Hadamard(2)).unwrap(),
            Gate::Hadamard(2),
        )
        .unwrap();
        assert!((h.fidelity(&s).unwrap() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn cnot_leaves_plus_control_alone() {
        let plus_first = make_x_product(3, &[XSign::Plus, XSign::Minus, XSign::Plus]).unwrap();
        let out = apply_gate(
            &plus_first,
            Gate::CnotXz {
                x_site: 1,
                z_site: 2,
            },
        )
        .unwrap();
        assert!((out.inner(&plus_first).unwrap() - C64::new(1.0, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn cnot_squared_is_identity_on_random_states() {
        for seed in 0..10 {
            let s = random(3, seed);
            let g = Gate::CnotXz {
                x_site: 3,
                z_site: 1,
            };
            let t = apply_gate(&apply_gate(&s, g).unwrap(), g).unwrap();
            assert!((t.inner(&s).unwrap() - C64::new(1.0, 0.0)).norm() < 1e-13);
        }
    }

    #[test]
    fn gate_validation() {
        assert!(Circuit::new(3, vec![Gate::Hadamard(4)]).is_err());
        assert!(Circuit::new(3, vec![Gate::Hadamard(0)]).is_err());
        assert!(Circuit::new(
            3,
            vec![Gate::CnotXz {
                x_site: 2,
                z_site: 2
            }]
        )
        .is_err());
    }

    #[test]
    fn gate_count() {
        let c = build_circuit_s(5, ProductOrder::default()).unwrap();
        assert_eq!(c.len(), 13);
        assert_eq!(c.gates()[0], Gate::ParityZ);
        assert_eq!(
            c.gates()[1],
            Gate::CnotXz {
                x_site: 1,
                z_site: 2
            }
        );
    }

    #[test]
    fn maps_w_onto_omega_with_same_momentum() {
        for l in [3usize, 5, 7] {
            for rec in realized_mapping(l, ProductOrder::default()).unwrap() {
                assert_eq!(rec.ell, rec.ell_prime);
                assert!((rec.fidelity - 1.0).abs() < 1e-10, "L={l} {rec:?}");
            }
        }
    }

    #[test]
    fn reversed_order_does_not_map() {
        let recs = realized_mapping(5, ProductOrder::LastActsFirst).unwrap();
        assert!(recs.iter().any(|r| r.fidelity < 0.99));
    }

    #[test]
    fn preserves_sre() {
        for l in [3usize, 5] {
            for seed in 0..5 {
                let s = random(l, 100 + seed);
                let a = sre_brute(&s).unwrap().value;
                let b = sre_brute(&apply_circuit_s(&s).unwrap()).unwrap().value;
                assert!((a - b).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn verification() {
        let c = build_circuit_s(3, ProductOrder::default()).unwrap();
        assert!(verify_clifford(&c).unwrap().is_clifford);
        assert!(
            verify_clifford(&Circuit::empty(3).unwrap())
                .unwrap()
                .is_clifford
        );
        let t = Circuit::new(
            3,
            vec![
                Gate::Hadamard(1),
                Gate::PhaseZ {
                    site: 2,
                    angle: std::f64::consts::PI / 8.0,
                },
            ],
        )
        .unwrap();
        let check = verify_clifford(&t).unwrap();
        assert!(!check.is_clifford);
        assert_eq!(check.offending.as_deref(), Some("X_2"));
        let big = Circuit::empty(9).unwrap();
        assert!(verify_clifford(&big).is_err());
    }

    #[test]
    fn text_round_trip() {
        let c = build_circuit_s(5, ProductOrder::default()).unwrap();
        let text = c.to_text();
        assert!(text.starts_with("PARITYZ\nCXZ 1 2\n"));
        assert!(text.contains("H 5\n") && text.contains("Z 3\n"));
        assert_eq!(Circuit::parse(&text, 5).unwrap(), c);
        let with_comments = format!("# mapping\n\n{text}");
        assert_eq!(Circuit::parse(&with_comments, 5).unwrap(), c);
        let p = Circuit::new(
            3,
            vec![Gate::PhaseZ {
                site: 1,
                angle: 0.3,
            }],
        )
        .unwrap();
        assert_eq!(Circuit::parse(&p.to_text(), 3).unwrap(), p);
        assert!(Circuit::parse("FOO 1", 3).is_err());
        assert!(Circuit::parse("CXZ 1", 3).is_err());
        assert!(Circuit::parse("H 7", 3).is_err());
    }
}
